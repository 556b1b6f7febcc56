#ifndef VERSEKIT_LEXICON_HPP
#define VERSEKIT_LEXICON_HPP

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "versekit/common.hpp"

namespace versekit {

// Named-entity table: entity id -> per-language surface form. Immutable
// after load; per-language surface indexes reject duplicates.
class LexiconTable {
 public:
  // TSV with header "entity_id<TAB>lang1<TAB>lang2..."; empty cell = the
  // entity has no surface in that language.
  static LexiconTable load(const std::string& path);
  static LexiconTable from_rows(
      const std::vector<std::string>& languages,
      const std::vector<std::pair<std::string, std::vector<std::string>>>&
          rows);

  const std::vector<std::string>& languages() const { return languages_; }
  bool has_language(const std::string& language) const;
  size_t entity_count() const { return entities_.size(); }

  std::optional<std::string> surface(const std::string& entity_id,
                                     const std::string& language) const;
  std::optional<std::string> entity_of(const std::string& surface,
                                       const std::string& language) const;
  // All (surface, entity) pairs of one language, longest surface first.
  const std::vector<std::pair<std::string, std::string>>& surfaces(
      const std::string& language) const;

 private:
  void index_surface(const std::string& language, const std::string& surface,
                     const std::string& entity_id);

  std::vector<std::string> languages_;
  std::map<std::string, std::map<std::string, std::string>> entities_;
  std::map<std::string, std::map<std::string, std::string>> index_;
  std::map<std::string, std::vector<std::pair<std::string, std::string>>>
      by_length_;
};

// Sentence with entities replaced by __NE0, __NE1, ... in appearance
// order. Repeated mentions of one entity share the first index.
struct MaskedSentence {
  std::string text;
  std::vector<std::string> slots;          // entity ids, slot order
  std::vector<std::string> source_spans;   // matched source text per slot
};

struct DecodeTable {
  std::map<int, std::string> entries;
};

struct MaskOptions {
  int fuzzy_max_edit = 1;  // 0 disables fuzzy matching
  bool case_fold = false;  // second pass with case-insensitive comparison
};

std::pair<MaskedSentence, DecodeTable> mask(std::string_view sentence,
                                            const std::string& language,
                                            const LexiconTable& table,
                                            const MaskOptions& options = {});

// Target surfaces for every slot; a missing target surface falls back to
// the source span verbatim with a warning.
DecodeTable build_decode_table(const MaskedSentence& masked,
                               const std::string& target_language,
                               const LexiconTable& table);

std::string unmask(std::string_view translated_masked_text,
                   const DecodeTable& decode);

struct MaskAudit {
  std::vector<int> missing;
  std::vector<int> duplicated;
  bool clean() const { return missing.empty() && duplicated.empty(); }
};

MaskAudit audit_mask_coverage(const MaskedSentence& source,
                              std::string_view translated_text);

}  // namespace versekit

#endif  // VERSEKIT_LEXICON_HPP
