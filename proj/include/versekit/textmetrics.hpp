#ifndef VERSEKIT_TEXTMETRICS_HPP
#define VERSEKIT_TEXTMETRICS_HPP

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "versekit/corpus.hpp"

namespace versekit {

// chrF: character n-gram F-beta, orders 1..max_n averaged (orders where
// neither side has n-grams are skipped), whitespace removed first.
// Both strings empty is defined as 1.0 with a warning.
double chrf(std::string_view hyp, std::string_view ref, int max_n = 6,
            double beta = 2.0);

// characTER-style error: greedy word-block shifts (cost 1 each) plus
// character edit distance, normalized by hypothesis character length.
// The shift search is greedy, not exact.
double character_error(std::string_view hyp, std::string_view ref);

// Sentence BLEU up to max_n (1..4), single reference, no smoothing.
double bleu_n(std::string_view hyp, std::string_view ref, int max_n);

// Corpus-level (micro) BLEU accumulator.
struct BleuCounts {
  int max_n = 4;
  std::vector<uint64_t> match;
  std::vector<uint64_t> total;
  uint64_t hyp_len = 0;
  uint64_t ref_len = 0;

  explicit BleuCounts(int n = 4) : max_n(n), match(n, 0), total(n, 0) {}
  void add(std::string_view hyp, std::string_view ref);
  double score() const;
};

// Fraction of shared verses whose sentences are byte-identical.
double sentence_overlap(const MonoText& a, const MonoText& b);

enum class OverlapMode {
  Jaccard,      // |Va n Vb| / |Va u Vb|
  CoverageOfA,  // |Va n Vb| / |Va|
};
double word_overlap(const MonoText& a, const MonoText& b,
                    OverlapMode mode = OverlapMode::Jaccard);

enum class Metric {
  Chrf,
  CharacTer,
  Bleu1,
  Bleu4,
  SentenceOverlap,
  WordOverlap,
};
Metric parse_metric(std::string_view name);
std::string metric_name(Metric metric);

struct SimilarityMatrix {
  std::vector<std::string> languages;
  std::vector<std::vector<double>> values;  // [ref_row][hyp_col]
  Metric metric = Metric::Chrf;

  double at(const std::string& ref_lang, const std::string& hyp_lang) const;
  size_t index_of(const std::string& language) const;
  // Increasing orientation: characTER entries become 1 - min(error, 1),
  // other metrics are returned unchanged.
  SimilarityMatrix as_similarity() const;
  std::string to_csv() const;
  std::string to_long_tsv() const;  // (ref_lang, hyp_lang, value)
};

// Entry (i,j): language j as hypothesis against language i as reference,
// micro-averaged over their shared verses. Parallel over cells; results
// are identical to the serial reference for any thread count.
SimilarityMatrix similarity_matrix(const VerseAlignedCorpus& corpus,
                                   const std::vector<std::string>& languages,
                                   Metric metric);
// Plain single-loop implementation kept as the testing reference.
SimilarityMatrix similarity_matrix_serial(
    const VerseAlignedCorpus& corpus,
    const std::vector<std::string>& languages, Metric metric);

struct CorrelationResult {
  double rho = 0.0;
  double p_value = 1.0;
  size_t n = 0;
  bool p_approximate = false;  // t approximation flagged for n < 10
};

// Spearman rank correlation with average ranks for ties; p-value from the
// t-distribution approximation.
CorrelationResult spearman(const std::vector<double>& x,
                           const std::vector<double>& y);

struct ColumnwiseCorrelation {
  CorrelationResult pooled;
  std::vector<std::optional<CorrelationResult>> per_column;
};

ColumnwiseCorrelation columnwise_spearman(
    const std::vector<std::vector<double>>& a,
    const std::vector<std::vector<double>>& b, bool exclude_diagonal);

// Shannon entropy (base 2) of the empirical unigram distribution.
double unigram_entropy(const std::vector<std::string>& tokens);

// Percentile bootstrap interval over token-level resamples.
std::pair<double, double> bootstrap_ci(
    const std::vector<std::string>& tokens,
    const std::function<double(const std::vector<std::string>&)>& statistic,
    int resamples, double level, uint64_t rng_seed);

// Word F-measure restricted to reference tokens whose training frequency
// equals `bucket` (bucket 0 = unseen in training). Empty bucket -> nullopt.
std::optional<double> f1_by_frequency_bucket(
    const MonoText& hyp, const MonoText& ref,
    const std::map<std::string, uint64_t>& train_freqs, uint64_t bucket);

}  // namespace versekit

#endif  // VERSEKIT_TEXTMETRICS_HPP
