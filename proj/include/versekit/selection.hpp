#ifndef VERSEKIT_SELECTION_HPP
#define VERSEKIT_SELECTION_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "versekit/corpus.hpp"
#include "versekit/ngramlm.hpp"

namespace versekit {

// Corpus-global n-gram frequencies F(.), fixed before selection starts.
// Lookups are counted so tests can assert that rand/excerpt never touch
// frequencies.
class FrequencyTable {
 public:
  static FrequencyTable build(const MonoText& text, int max_order);

  int max_order() const { return max_order_; }
  uint64_t freq(int order, const std::string& gram) const;
  uint64_t queries() const { return queries_; }

 private:
  int max_order_ = 0;
  std::vector<std::unordered_map<std::string, uint64_t>> by_order_;
  mutable uint64_t queries_ = 0;
};

// n-grams covered so far plus selection bookkeeping.
struct KnownState {
  int max_order = 1;
  std::vector<std::unordered_set<std::string>> known;  // [order-1]
  std::vector<VerseId> chosen;
  uint64_t words_spent = 0;

  explicit KnownState(int order = 1) : max_order(order), known(order) {}
  bool knows(int order, const std::string& gram) const {
    return known[order - 1].count(gram) != 0;
  }
  // Marks every n-gram of orders 1..max_order as known.
  void absorb(const std::vector<std::string>& tokens);
};

// Frequency sum of unknown words, summed over token positions.
double score_s(const std::vector<std::string>& tokens, const KnownState& state,
               const FrequencyTable& freqs);
// score_s normalized by token count.
double score_sn(const std::vector<std::string>& tokens,
                const KnownState& state, const FrequencyTable& freqs);
// Normalized frequency sum of unknown n-grams of orders 1..J.
double score_sng(const std::vector<std::string>& tokens,
                 const KnownState& state, const FrequencyTable& freqs, int J);

enum class Membership { Left, Right };

// H_c(s) minus the cross entropy under the opposite half's model.
double score_ent(const std::vector<std::string>& tokens,
                 const NGramLM& lm_chosen, const NGramLM& lm_left,
                 const NGramLM& lm_right, Membership membership);

double aggregate_scores(const std::map<std::string, double>& per_language,
                        const std::set<std::string>& voters);

enum class VoterKind { L, F, P, N };

struct LanguageMetadata {
  struct Row {
    std::string language;
    std::optional<std::string> family;
    std::optional<uint64_t> speakers;
    std::optional<bool> neighbor;
  };
  std::vector<Row> rows;

  // TSV: language<TAB>family<TAB>speakers<TAB>neighbor; empty cell = absent.
  static LanguageMetadata load(const std::string& path);
};

std::set<std::string> voter_set(VoterKind kind,
                                const LanguageMetadata& metadata, int k);

struct Method {
  enum class Kind { Rand, Excerpt, S, SN, SNG, Ent, Agg };
  Kind kind = Kind::Rand;
  std::string book;            // excerpt
  int J = 1;                   // sng / agg n-gram order
  int ent_chosen_order = 5;    // ent: order of the chosen-data LM
  VoterKind agg_kind = VoterKind::L;
  int agg_k = 0;

  // rand | excerpt:BOOK | s | sn | sng:J | ent[:J] | agg:{L|F|P|N}[:k]
  static Method parse(std::string_view text);
  std::string str() const;
  bool uses_frequencies() const {
    return kind == Kind::S || kind == Kind::SN || kind == Kind::SNG ||
           kind == Kind::Ent || kind == Kind::Agg;
  }
};

struct SeedStep {
  VerseId id;
  double score = 0.0;
  uint64_t words = 0;
  uint64_t cum_words = 0;
};

struct SeedCorpus {
  std::string method;
  std::vector<SeedStep> steps;
  WordBudget budget;
  std::string budget_language;
  uint64_t freq_queries = 0;  // engine-level frequency lookups

  std::vector<VerseId> ids() const;
  uint64_t total_words() const {
    return steps.empty() ? 0 : steps.back().cum_words;
  }
  // (step, verse_id, score, cum_words), one line per pick.
  std::string to_tsv() const;
};

struct SelectOptions {
  WordBudget budget;
  bool memoize = true;
  uint64_t rng_seed = 0;
  // Words are counted in this language; defaults to the first reference.
  std::string budget_language;
  // Required for agg:{F,P,N}; agg:L falls back to all reference languages.
  const LanguageMetadata* metadata = nullptr;
  double lm_epsilon = 0.1;
};

// Greedy budgeted seed selection. Ties go to the smaller VerseId; the
// pick that first reaches or crosses the budget is included, then
// selection stops. With memoize on, only sentences sharing a newly-known
// n-gram are rescored (exact for the frequency family; ent rescans fully
// each step either way).
SeedCorpus greedy_select(const VerseAlignedCorpus& corpus,
                         const std::vector<std::string>& reference_languages,
                         const Method& method, const SelectOptions& options);

// Same ordered ids re-budgeted against the target language's word counts;
// ids the target does not cover are dropped with a warning.
SeedCorpus transfer_ranking(const SeedCorpus& seed,
                            const VerseAlignedCorpus& target,
                            const std::string& target_language);

// Whole-set repetitions plus a deterministic prefix to hit the count.
std::vector<std::string> replicate_to_match(
    const std::vector<std::string>& seed_sentences, size_t target_line_count);

}  // namespace versekit

#endif  // VERSEKIT_SELECTION_HPP
