#include "versekit/ngramlm.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace versekit {

const std::string NGramLM::kBegin = "\x01<s>";
const std::string NGramLM::kEnd = "\x01</s>";

namespace {

std::string join_context(const std::vector<std::string>& tokens, size_t begin,
                         size_t end) {
  std::string key;
  for (size_t i = begin; i < end; ++i) {
    if (i > begin) key.push_back('\x1f');
    key += tokens[i];
  }
  return key;
}

}  // namespace

NGramLM NGramLM::fit(const std::vector<std::string>& sentences, int order,
                     double epsilon) {
  if (order < 1) throw DataError("n-gram order must be >= 1");
  if (epsilon <= 0.0) throw DataError("Lidstone epsilon must be > 0");
  if (sentences.empty()) throw DataError("cannot fit LM on an empty corpus");

  NGramLM lm;
  lm.order_ = order;
  lm.epsilon_ = epsilon;
  bool any_tokens = false;
  for (const auto& sentence : sentences) {
    std::vector<std::string> tokens = tokenize(sentence);
    if (tokens.empty()) continue;
    any_tokens = true;
    if (order >= 2) {
      std::vector<std::string> padded;
      padded.reserve(tokens.size() + order);
      padded.insert(padded.end(), order - 1, kBegin);
      padded.insert(padded.end(), tokens.begin(), tokens.end());
      padded.push_back(kEnd);
      for (size_t i = order - 1; i < padded.size(); ++i) {
        std::string ctx = join_context(padded, i - (order - 1), i);
        ContextCounts& counts = lm.contexts_[ctx];
        ++counts.total;
        ++counts.by_token[padded[i]];
        ++lm.vocab_[padded[i]];
      }
    } else {
      ContextCounts& counts = lm.contexts_[std::string()];
      for (const auto& token : tokens) {
        ++counts.total;
        ++counts.by_token[token];
        ++lm.vocab_[token];
      }
    }
  }
  if (!any_tokens) throw DataError("cannot fit LM: all sentences are empty");
  return lm;
}

double NGramLM::prob_joined(const std::string& context_key,
                            const std::string& token) const {
  // +1 outcome for the unknown type.
  double denom_extra = epsilon_ * static_cast<double>(vocab_.size() + 1);
  auto ctx = contexts_.find(context_key);
  if (ctx == contexts_.end()) return epsilon_ / denom_extra;
  uint64_t count = 0;
  auto it = ctx->second.by_token.find(token);
  if (it != ctx->second.by_token.end()) count = it->second;
  return (static_cast<double>(count) + epsilon_) /
         (static_cast<double>(ctx->second.total) + denom_extra);
}

double NGramLM::prob(const std::vector<std::string>& context,
                     const std::string& token) const {
  if (!fitted()) throw DataError("LM is not fitted");
  if (order_ == 1) return prob_joined(std::string(), token);
  if (static_cast<int>(context.size()) != order_ - 1)
    throw DataError("context length must be order-1");
  return prob_joined(join_context(context, 0, context.size()), token);
}

double NGramLM::cross_entropy_tokens(
    const std::vector<std::string>& tokens) const {
  if (!fitted()) throw DataError("LM is not fitted");
  if (tokens.empty()) throw DataError("cross entropy of an empty sentence");
  double bits = 0.0;
  size_t events = 0;
  if (order_ == 1) {
    for (const auto& token : tokens) {
      bits -= std::log2(prob_joined(std::string(), token));
      ++events;
    }
  } else {
    std::vector<std::string> padded;
    padded.reserve(tokens.size() + order_);
    padded.insert(padded.end(), order_ - 1, kBegin);
    padded.insert(padded.end(), tokens.begin(), tokens.end());
    padded.push_back(kEnd);
    for (size_t i = order_ - 1; i < padded.size(); ++i) {
      std::string ctx = join_context(padded, i - (order_ - 1), i);
      bits -= std::log2(prob_joined(ctx, padded[i]));
      ++events;
    }
  }
  return bits / static_cast<double>(events);
}

double NGramLM::cross_entropy(std::string_view sentence) const {
  return cross_entropy_tokens(tokenize(sentence));
}

std::vector<std::string> NGramLM::vocabulary() const {
  std::vector<std::string> out;
  out.reserve(vocab_.size());
  for (const auto& [token, _] : vocab_) out.push_back(token);
  std::sort(out.begin(), out.end());
  return out;
}

std::string NGramLM::dump_counts() const {
  // Sorted for stable diffs.
  std::map<std::string, std::map<std::string, uint64_t>> sorted;
  for (const auto& [ctx, counts] : contexts_)
    for (const auto& [token, count] : counts.by_token)
      sorted[ctx][token] = count;
  std::ostringstream out;
  for (const auto& [ctx, tokens] : sorted) {
    std::string ctx_print = ctx;
    std::replace(ctx_print.begin(), ctx_print.end(), '\x1f', ' ');
    for (const auto& [token, count] : tokens)
      out << ctx_print << '\t' << token << '\t' << count << '\n';
  }
  return out.str();
}

}  // namespace versekit
