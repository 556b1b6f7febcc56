#include "versekit/align.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>

namespace versekit {

namespace {

struct TokenizedPair {
  std::vector<uint32_t> src;
  std::vector<uint32_t> tgt;
};

// Alignment prior over NULL (index 0) and source positions 1..n.
std::vector<double> alignment_prior(size_t n, size_t tgt_pos, size_t m,
                                    const AlignmentModel::TrainOptions& opt) {
  std::vector<double> prior(n + 1, 0.0);
  prior[0] = opt.null_prob;
  if (!opt.diagonal_prior) {
    for (size_t i = 1; i <= n; ++i)
      prior[i] = (1.0 - opt.null_prob) / static_cast<double>(n);
    return prior;
  }
  double z = 0.0;
  for (size_t i = 1; i <= n; ++i) {
    double delta = std::fabs(static_cast<double>(tgt_pos + 1) / m -
                             static_cast<double>(i) / n);
    prior[i] = std::exp(-opt.diagonal_tension * delta);
    z += prior[i];
  }
  for (size_t i = 1; i <= n; ++i) prior[i] *= (1.0 - opt.null_prob) / z;
  return prior;
}

}  // namespace

uint32_t AlignmentModel::src_id(std::string_view token) const {
  auto it = src_index_.find(std::string(token));
  return it == src_index_.end() ? kMissing : it->second;
}

uint32_t AlignmentModel::tgt_id(std::string_view token) const {
  auto it = tgt_index_.find(std::string(token));
  return it == tgt_index_.end() ? kMissing : it->second;
}

double AlignmentModel::lex_prob(std::string_view src,
                                std::string_view tgt) const {
  uint32_t s = src.empty() ? 0 : src_id(src);
  uint32_t t = tgt_id(tgt);
  if (s == kMissing || t == kMissing) return 0.0;
  const auto& row = probs_[s];
  auto it = row.find(t);
  return it == row.end() ? 0.0 : it->second;
}

double AlignmentModel::row_sum(std::string_view src) const {
  uint32_t s = src.empty() ? 0 : src_id(src);
  if (s == kMissing) return 0.0;
  double sum = 0.0;
  for (const auto& [_, p] : probs_[s]) sum += p;
  return sum;
}

std::vector<std::string> AlignmentModel::row_targets(
    std::string_view src) const {
  std::vector<std::string> out;
  uint32_t s = src.empty() ? 0 : src_id(src);
  if (s == kMissing) return out;
  for (const auto& [t, _] : probs_[s]) out.push_back(tgt_vocab_[t]);
  std::sort(out.begin(), out.end());
  return out;
}

std::optional<AlignmentModel::Best> AlignmentModel::best_target(
    std::string_view src) const {
  uint32_t s = src_id(src);
  if (s == kMissing) return std::nullopt;
  const auto& row = probs_[s];
  if (row.empty()) return std::nullopt;
  const std::string* best_token = nullptr;
  double best_prob = -1.0;
  for (const auto& [t, p] : row) {
    const std::string& token = tgt_vocab_[t];
    if (p > best_prob || (p == best_prob && token < *best_token)) {
      best_prob = p;
      best_token = &token;
    }
  }
  return Best{*best_token, best_prob};
}

std::string AlignmentModel::dump_tsv(double floor) const {
  std::ostringstream out;
  std::vector<std::string> sources = source_vocab_sorted();
  for (const auto& src : sources) {
    uint32_t s = src.empty() ? 0 : src_id(src);
    std::vector<std::pair<std::string, double>> row;
    for (const auto& [t, p] : probs_[s])
      if (p >= floor) row.emplace_back(tgt_vocab_[t], p);
    std::sort(row.begin(), row.end());
    for (const auto& [tgt, p] : row)
      out << (src.empty() ? "<NULL>" : src) << '\t' << tgt << '\t'
          << format_double(p) << '\n';
  }
  return out.str();
}

std::vector<std::string> AlignmentModel::source_vocab_sorted() const {
  std::vector<std::string> sources = src_vocab_;
  std::sort(sources.begin(), sources.end());
  sources.insert(sources.begin(), std::string());  // NULL row first
  return sources;
}

AlignmentModel train_model1(const std::vector<SentencePair>& pairs,
                            int iterations, uint64_t seed) {
  AlignmentModel::TrainOptions options;
  options.iterations = iterations;
  options.seed = seed;
  return train_model1(pairs, options);
}

AlignmentModel train_model1(const std::vector<SentencePair>& pairs,
                            const AlignmentModel::TrainOptions& options) {
  if (options.iterations < 1)
    throw DataError("EM needs at least one iteration");
  if (pairs.empty()) throw DataError("no sentence pairs to train on");
  if (!(options.null_prob > 0.0 && options.null_prob < 1.0))
    throw DataError("null_prob must be in (0,1)");

  AlignmentModel model;
  model.null_prob = options.null_prob;

  std::vector<TokenizedPair> data;
  for (const auto& pair : pairs) {
    TokenizedPair tp;
    for (const auto& token : tokenize(pair.src)) {
      auto [it, inserted] = model.src_index_.emplace(
          token, static_cast<uint32_t>(model.src_vocab_.size() + 1));
      if (inserted) model.src_vocab_.push_back(token);
      tp.src.push_back(it->second);
    }
    for (const auto& token : tokenize(pair.tgt)) {
      auto [it, inserted] = model.tgt_index_.emplace(
          token, static_cast<uint32_t>(model.tgt_vocab_.size()));
      if (inserted) model.tgt_vocab_.push_back(token);
      tp.tgt.push_back(it->second);
    }
    if (!tp.src.empty() && !tp.tgt.empty()) data.push_back(std::move(tp));
  }
  if (data.empty())
    throw DataError("all sentence pairs are empty on one side");

  const size_t rows = model.src_vocab_.size() + 1;  // row 0 = NULL
  const size_t tgt_types = model.tgt_vocab_.size();

  // Uniform initialization; no randomness involved (`seed` is recorded in
  // run headers for interface stability only).
  model.probs_.assign(rows, {});
  double uniform = 1.0 / static_cast<double>(tgt_types);
  for (const auto& tp : data)
    for (uint32_t t : tp.tgt) {
      model.probs_[0][t] = uniform;
      for (uint32_t s : tp.src) model.probs_[s][t] = uniform;
    }
  // Renormalize rows over their observed targets so they start as proper
  // conditionals.
  for (auto& row : model.probs_) {
    double sum = 0.0;
    for (const auto& [_, p] : row) sum += p;
    if (sum > 0.0)
      for (auto& [_, p] : row) p /= sum;
  }

  for (int iter = 0; iter < options.iterations; ++iter) {
    std::vector<std::unordered_map<uint32_t, double>> counts(rows);
    std::vector<double> row_totals(rows, 0.0);
    double loglik = 0.0;

    for (const auto& tp : data) {
      const size_t n = tp.src.size();
      const size_t m = tp.tgt.size();
      for (size_t j = 0; j < m; ++j) {
        std::vector<double> prior = alignment_prior(n, j, m, options);
        uint32_t t = tp.tgt[j];
        double z = prior[0] * model.probs_[0].at(t);
        for (size_t i = 0; i < n; ++i)
          z += prior[i + 1] * model.probs_[tp.src[i]].at(t);
        loglik += std::log(z);
        double w0 = prior[0] * model.probs_[0].at(t) / z;
        counts[0][t] += w0;
        row_totals[0] += w0;
        for (size_t i = 0; i < n; ++i) {
          double w = prior[i + 1] * model.probs_[tp.src[i]].at(t) / z;
          counts[tp.src[i]][t] += w;
          row_totals[tp.src[i]] += w;
        }
      }
    }
    model.iteration_loglik.push_back(loglik);

    for (size_t s = 0; s < rows; ++s) {
      if (row_totals[s] <= 0.0) continue;
      for (auto& [t, p] : model.probs_[s]) {
        auto it = counts[s].find(t);
        p = it == counts[s].end() ? 0.0 : it->second / row_totals[s];
      }
    }
  }
  model.iterations_run = options.iterations;
  return model;
}

std::vector<int> viterbi_align(const AlignmentModel& model,
                               std::string_view src, std::string_view tgt) {
  std::vector<std::string> src_tokens = tokenize(src);
  std::vector<std::string> tgt_tokens = tokenize(tgt);
  std::vector<int> alignment(tgt_tokens.size(), AlignmentModel::kNull);
  if (src_tokens.empty()) return alignment;
  const size_t n = src_tokens.size();

  std::vector<uint32_t> src_ids;
  src_ids.reserve(n);
  for (const auto& token : src_tokens) src_ids.push_back(model.src_id(token));

  double real_prior = (1.0 - model.null_prob) / static_cast<double>(n);
  for (size_t j = 0; j < tgt_tokens.size(); ++j) {
    uint32_t t = model.tgt_id(tgt_tokens[j]);
    if (t == AlignmentModel::kMissing) continue;  // OOV -> NULL
    auto row_prob = [&](uint32_t s) {
      const auto& row = model.probs_[s];
      auto it = row.find(t);
      return it == row.end() ? 0.0 : it->second;
    };
    double best = model.null_prob * row_prob(0);
    int best_i = AlignmentModel::kNull;
    for (size_t i = 0; i < n; ++i) {
      if (src_ids[i] == AlignmentModel::kMissing) continue;
      double p = real_prior * row_prob(src_ids[i]);
      if (p > best) {  // strict: ties stay with the leftmost candidate
        best = p;
        best_i = static_cast<int>(i);
      }
    }
    if (best > 0.0) alignment[j] = best_i;
  }
  return alignment;
}

AlignmentStats alignment_stats(const AlignmentModel& model,
                               const std::vector<SentencePair>& pairs) {
  if (pairs.empty()) throw DataError("no pairs for alignment statistics");
  uint64_t zero_distortion = 0, aligned_positions = 0;
  uint64_t unit_fertility = 0, source_tokens = 0;

  for (const auto& pair : pairs) {
    std::vector<std::string> src_tokens = tokenize(pair.src);
    std::vector<int> alignment = viterbi_align(model, pair.src, pair.tgt);
    std::vector<uint64_t> fertility(src_tokens.size(), 0);
    int prev = -1;  // pre-sentence anchor
    for (int a : alignment) {
      if (a == AlignmentModel::kNull) continue;
      ++aligned_positions;
      if (a - prev - 1 == 0) ++zero_distortion;
      prev = a;
      ++fertility[a];
    }
    source_tokens += src_tokens.size();
    for (uint64_t f : fertility)
      if (f == 1) ++unit_fertility;
  }

  if (aligned_positions == 0)
    throw DataError("no non-NULL alignments; model and data are disjoint");

  AlignmentStats stats;
  stats.pair_count = pairs.size();
  stats.p_zero_distortion = static_cast<double>(zero_distortion) /
                            static_cast<double>(aligned_positions);
  stats.p_unit_fertility = static_cast<double>(unit_fertility) /
                           static_cast<double>(source_tokens);
  return stats;
}

std::string word_replace_translate(const AlignmentModel& model,
                                   const AlignmentStats& stats,
                                   std::string_view src_sentence) {
  std::ostringstream out;
  bool first = true;
  for (const auto& token : tokenize(src_sentence)) {
    if (!first) out << ' ';
    first = false;
    auto best = model.best_target(token);
    if (!best) {
      out << token;  // OOV passes through
      continue;
    }
    // The stats factors are constant across candidates; kept in the score
    // so per-token statistics can slot in later without an interface
    // change.
    double score =
        best->prob * stats.p_unit_fertility * stats.p_zero_distortion;
    (void)score;
    out << best->target;
  }
  return out.str();
}

std::string LanguageRanking::to_tsv() const {
  std::ostringstream out;
  for (size_t i = 0; i < entries.size(); ++i)
    out << (i + 1) << '\t' << entries[i].first << '\t'
        << format_double(entries[i].second) << '\n';
  return out.str();
}

namespace {

std::vector<SentencePair> shared_pairs(const MonoText& source,
                                       const MonoText& target) {
  std::vector<SentencePair> pairs;
  for (const auto& [id, sentence] : source.entries) {
    auto it = target.entries.find(id);
    if (it != target.entries.end()) pairs.push_back({sentence, it->second});
  }
  return pairs;
}

LanguageRanking rank_sources(const MonoText& target_seed,
                             const std::vector<MonoText>& sources,
                             int em_iterations, RankMethod method) {
  if (target_seed.entries.size() < 1000)
    warn("ranking on " + std::to_string(target_seed.entries.size()) +
         " seed lines; the measure is tuned for ~1,000 lines");

  std::vector<std::pair<std::string, double>> scored(sources.size());
  std::vector<char> skipped(sources.size(), 0);

#pragma omp parallel for schedule(dynamic)
  for (int idx = 0; idx < static_cast<int>(sources.size()); ++idx) {
    const MonoText& source = sources[idx];
    std::vector<SentencePair> pairs = shared_pairs(source, target_seed);
    if (pairs.empty()) {
      skipped[idx] = 1;
      continue;
    }
    AlignmentModel model = train_model1(pairs, em_iterations, 0);
    model.src_lang = source.language;
    model.tgt_lang = target_seed.language;
    AlignmentStats stats = alignment_stats(model, pairs);
    double score = 0.0;
    if (method == RankMethod::FAMD) {
      score = stats.p_zero_distortion;
    } else {
      BleuCounts counts(4);
      for (const auto& pair : pairs)
        counts.add(word_replace_translate(model, stats, pair.src), pair.tgt);
      score = counts.score();
    }
    scored[idx] = {source.language, score};
  }

  LanguageRanking ranking;
  ranking.target = target_seed.language;
  ranking.method = method;
  for (size_t i = 0; i < scored.size(); ++i) {
    if (skipped[i]) {
      warn("source " + sources[i].language +
           " shares no verses with the target seed; skipped");
      continue;
    }
    ranking.entries.push_back(scored[i]);
  }
  std::sort(ranking.entries.begin(), ranking.entries.end(),
            [](const auto& a, const auto& b) {
              if (a.second != b.second) return a.second > b.second;
              return a.first < b.first;
            });
  return ranking;
}

}  // namespace

LanguageRanking famd_rank(const MonoText& target_seed,
                          const std::vector<MonoText>& sources,
                          int em_iterations) {
  return rank_sources(target_seed, sources, em_iterations, RankMethod::FAMD);
}

LanguageRanking famp_rank(const MonoText& target_seed,
                          const std::vector<MonoText>& sources,
                          int em_iterations) {
  return rank_sources(target_seed, sources, em_iterations, RankMethod::FAMP);
}

std::vector<std::string> threshold_filter(const SimilarityMatrix& matrix,
                                          const std::string& target,
                                          double threshold) {
  size_t row = matrix.index_of(target);
  std::vector<std::string> kept;
  for (size_t j = 0; j < matrix.languages.size(); ++j) {
    if (j == row) continue;
    if (matrix.values[row][j] >= threshold) kept.push_back(matrix.languages[j]);
  }
  if (kept.empty())
    warn("no language reaches similarity " + format_double(threshold) +
         " to " + target);
  return kept;
}

}  // namespace versekit
