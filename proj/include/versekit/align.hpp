#ifndef VERSEKIT_ALIGN_HPP
#define VERSEKIT_ALIGN_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "versekit/corpus.hpp"
#include "versekit/textmetrics.hpp"

namespace versekit {

struct SentencePair {
  std::string src;
  std::string tgt;
};

// Lexical translation model trained with EM (Model-1 style) plus a NULL
// source option. Training is deterministic: uniform initialization, fixed
// alignment priors. The optional diagonal prior is off by default so the
// distortion measure stays uncontaminated.
class AlignmentModel {
 public:
  static constexpr int kNull = -1;

  struct TrainOptions {
    int iterations = 5;
    uint64_t seed = 0;  // reserved; training has no random component
    double null_prob = 0.05;
    bool diagonal_prior = false;
    double diagonal_tension = 4.0;
  };

  std::string src_lang;
  std::string tgt_lang;
  int iterations_run = 0;
  double null_prob = 0.05;
  // Training log-likelihood under the parameters entering each iteration.
  std::vector<double> iteration_loglik;

  // P(tgt | src); 0 for unseen pairs. src = "" queries the NULL row.
  double lex_prob(std::string_view src, std::string_view tgt) const;
  // Sum of one row; 1 (within rounding) for any source seen in training.
  double row_sum(std::string_view src) const;
  std::vector<std::string> row_targets(std::string_view src) const;
  const std::vector<std::string>& source_vocab() const { return src_vocab_; }

  // Most probable target for a source token under the word-replacement
  // rule; nullopt for OOV. Ties break to the smaller target token.
  struct Best {
    std::string target;
    double prob;
  };
  std::optional<Best> best_target(std::string_view src) const;

  // TSV dump (src, tgt, prob) for rows with prob >= floor.
  std::string dump_tsv(double floor = 1e-6) const;
  // Source vocabulary in byte order, NULL row (empty string) first.
  std::vector<std::string> source_vocab_sorted() const;

 private:
  friend AlignmentModel train_model1(const std::vector<SentencePair>&,
                                     const TrainOptions&);
  friend std::vector<int> viterbi_align(const AlignmentModel&,
                                        std::string_view, std::string_view);

  uint32_t src_id(std::string_view token) const;   // kMissing if unseen
  uint32_t tgt_id(std::string_view token) const;
  static constexpr uint32_t kMissing = UINT32_MAX;

  std::unordered_map<std::string, uint32_t> src_index_;
  std::unordered_map<std::string, uint32_t> tgt_index_;
  std::vector<std::string> src_vocab_;
  std::vector<std::string> tgt_vocab_;
  // probs_[src_id] : sparse row over target ids; row 0 is NULL.
  std::vector<std::unordered_map<uint32_t, double>> probs_;
};

AlignmentModel train_model1(const std::vector<SentencePair>& pairs,
                            const AlignmentModel::TrainOptions& options);
AlignmentModel train_model1(const std::vector<SentencePair>& pairs,
                            int iterations, uint64_t seed);

// One source index (or kNull) per target token.
std::vector<int> viterbi_align(const AlignmentModel& model,
                               std::string_view src, std::string_view tgt);

struct AlignmentStats {
  double p_zero_distortion = 0.0;  // P(D_t = 0) over non-NULL target slots
  double p_unit_fertility = 0.0;   // P(F_s = 1) over source tokens
  uint64_t pair_count = 0;
};

AlignmentStats alignment_stats(const AlignmentModel& model,
                               const std::vector<SentencePair>& pairs);

// Replace every source token with the most probable target token; the
// corpus-level fertility/distortion factors scale all candidates alike,
// so the per-token argmax reduces to the lexical argmax. OOV tokens pass
// through unchanged.
std::string word_replace_translate(const AlignmentModel& model,
                                   const AlignmentStats& stats,
                                   std::string_view src_sentence);

enum class RankMethod { FAMD, FAMP };

struct LanguageRanking {
  std::string target;
  RankMethod method = RankMethod::FAMD;
  std::vector<std::pair<std::string, double>> entries;  // score descending
  std::string to_tsv() const;  // (rank, language, score)
};

LanguageRanking famd_rank(const MonoText& target_seed,
                          const std::vector<MonoText>& sources,
                          int em_iterations);
LanguageRanking famp_rank(const MonoText& target_seed,
                          const std::vector<MonoText>& sources,
                          int em_iterations);

// Languages whose similarity to `target` is at least `threshold`, the
// target itself excluded. Row = target as reference.
std::vector<std::string> threshold_filter(const SimilarityMatrix& matrix,
                                          const std::string& target,
                                          double threshold);

}  // namespace versekit

#endif  // VERSEKIT_ALIGN_HPP
