#ifndef VERSEKIT_NGRAMLM_HPP
#define VERSEKIT_NGRAMLM_HPP

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "versekit/common.hpp"

namespace versekit {

// Lidstone-smoothed n-gram model. Sentences are padded with order-1 begin
// markers and one end marker; order-1 models use no markers so unigram
// probabilities are plain smoothed relative frequencies. No backoff.
class NGramLM {
 public:
  static NGramLM fit(const std::vector<std::string>& sentences, int order,
                     double epsilon);

  int order() const { return order_; }
  double epsilon() const { return epsilon_; }
  size_t vocab_size() const { return vocab_.size(); }
  bool fitted() const { return order_ > 0; }
  // Outcome vocabulary in byte order (includes the end marker for
  // order >= 2).
  std::vector<std::string> vocabulary() const;

  // P(token | context); unseen tokens and contexts fall back to the
  // smoothing floor, so the result is always strictly positive.
  double prob(const std::vector<std::string>& context,
              const std::string& token) const;

  // -(1/T) sum log2 P(token | context) over the padded sentence.
  double cross_entropy(std::string_view sentence) const;
  double cross_entropy_tokens(const std::vector<std::string>& tokens) const;

  // TSV dump of raw counts, for debugging.
  std::string dump_counts() const;

  static const std::string kBegin;
  static const std::string kEnd;

 private:
  double prob_joined(const std::string& context_key,
                     const std::string& token) const;

  int order_ = 0;
  double epsilon_ = 0.0;
  // Outcome vocabulary (tokens plus the end marker for order >= 2).
  std::unordered_map<std::string, uint64_t> vocab_;
  struct ContextCounts {
    uint64_t total = 0;
    std::unordered_map<std::string, uint64_t> by_token;
  };
  std::unordered_map<std::string, ContextCounts> contexts_;
};

}  // namespace versekit

#endif  // VERSEKIT_NGRAMLM_HPP
