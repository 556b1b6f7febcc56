#ifndef VERSEKIT_CORPUS_HPP
#define VERSEKIT_CORPUS_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "versekit/common.hpp"

namespace versekit {

// Per-language sentence store keyed by verse id. Entries are stored in
// verse order; missing verses are simply absent (never empty strings).
struct MonoText {
  std::string language;
  std::map<VerseId, std::string> entries;

  bool covers(const VerseId& id) const { return entries.count(id) != 0; }
  const std::string& sentence(const VerseId& id) const;
  std::set<VerseId> coverage() const;
};

// Immutable after load; safe for concurrent readers.
struct VerseAlignedCorpus {
  std::vector<std::string> languages;
  std::map<std::string, MonoText> texts;

  const MonoText& text(const std::string& language) const;
  bool has_language(const std::string& language) const {
    return texts.count(language) != 0;
  }
  // Union of verse ids over all languages.
  std::set<VerseId> all_ids() const;
  // Ids covered by every language in the corpus.
  std::set<VerseId> shared_ids() const;
};

struct SplitSpec {
  std::set<VerseId> train;
  std::set<VerseId> valid;
  std::set<VerseId> test;
};

struct WordBudget {
  uint64_t word_count = 0;
  // (language, book) the budget was derived from, when applicable.
  std::optional<std::pair<std::string, std::string>> reference;
};

enum class CorpusFormat {
  Tsv,    // verse_id<TAB>sentence per line
  Lines,  // one sentence per line, ids in a "<path>.ids" sidecar
};

struct LangFile {
  std::string code;
  std::string path;
};

VerseAlignedCorpus load_corpus(const std::vector<LangFile>& files,
                               CorpusFormat format);

// JSON-lines manifest, one record per language: {"code","path","lines"}.
// Paths are resolved relative to the manifest. A line count mismatch is a
// hard error so stale manifests never go unnoticed.
VerseAlignedCorpus load_manifest(const std::string& manifest_path);

// Writes <code>.tsv per language plus manifest.jsonl into `directory`.
void save_corpus(const VerseAlignedCorpus& corpus,
                 const std::string& directory);

VerseAlignedCorpus restrict(const VerseAlignedCorpus& corpus,
                            const std::vector<std::string>& languages,
                            bool require_full);

uint64_t word_count(const VerseAlignedCorpus& corpus,
                    const std::string& language,
                    const std::set<VerseId>& ids);

WordBudget reference_budget(const VerseAlignedCorpus& corpus,
                            const std::string& language,
                            const std::string& book);

// all_ids minus the union of the seed sets; the shared test set.
std::set<VerseId> intersection_test_set(
    const std::set<VerseId>& all_ids,
    const std::vector<std::set<VerseId>>& seed_sets);

// Tail `valid_fraction` of seed_ids (selection order) becomes validation.
SplitSpec build_splits(const VerseAlignedCorpus& corpus,
                       const std::vector<VerseId>& seed_ids,
                       double valid_fraction);

}  // namespace versekit

#endif  // VERSEKIT_CORPUS_HPP
