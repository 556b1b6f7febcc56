#include "versekit/combine.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace versekit {

namespace {

double candidate_similarity(const std::string& a, const std::string& b,
                            Metric metric) {
  switch (metric) {
    case Metric::Chrf:
      return chrf(b, a);
    case Metric::CharacTer:
      // Increasing orientation so "most similar" stays an argmax.
      return 1.0 - std::min(character_error(b, a), 1.0);
    case Metric::Bleu1:
      return bleu_n(b, a, 1);
    case Metric::Bleu4:
      return bleu_n(b, a, 4);
    default:
      throw DataError("metric not usable for sentence combination: " +
                      metric_name(metric));
  }
}

}  // namespace

CenteredChoice centered_translation(const CandidateSet& set, Metric metric) {
  if (set.candidates.empty())
    throw DataError("no candidates for verse " + set.verse.str());
  {
    std::set<std::string> langs;
    for (const auto& [lang, _] : set.candidates)
      if (!langs.insert(lang).second)
        throw DataError("duplicate source language in candidate set: " + lang);
  }

  const size_t n = set.candidates.size();
  CenteredChoice choice;
  choice.row_sums.assign(n, 0.0);
  if (n > 1) {
    // Directed scores averaged into a symmetric S_ij.
    std::vector<std::vector<double>> directed(n, std::vector<double>(n, 0.0));
    for (size_t i = 0; i < n; ++i)
      for (size_t j = 0; j < n; ++j)
        if (i != j)
          directed[i][j] = candidate_similarity(set.candidates[i].second,
                                                set.candidates[j].second,
                                                metric);
    for (size_t i = 0; i < n; ++i)
      for (size_t j = 0; j < n; ++j)
        if (i != j)
          choice.row_sums[i] += (directed[i][j] + directed[j][i]) / 2.0;
  }

  size_t best = 0;
  for (size_t i = 1; i < n; ++i)
    if (choice.row_sums[i] > choice.row_sums[best]) best = i;
  choice.winner = best;
  choice.text = set.candidates[best].second;
  return choice;
}

namespace {

CombineResult combine_impl(const std::vector<MonoText>& inputs, Metric metric,
                           const std::string& output_language, bool parallel) {
  if (inputs.empty()) throw DataError("no input translations to combine");
  std::set<VerseId> shared = inputs.front().coverage();
  for (const auto& text : inputs) {
    std::set<VerseId> next;
    for (const auto& id : shared)
      if (text.covers(id)) next.insert(id);
    shared = std::move(next);
  }
  if (shared.empty())
    throw DataError("inputs share no verses; nothing to combine");

  std::vector<VerseId> order(shared.begin(), shared.end());
  std::vector<std::string> texts(order.size());
  std::vector<std::string> winners(order.size());

  auto combine_one = [&](size_t k) {
    CandidateSet set;
    set.verse = order[k];
    for (const auto& input : inputs)
      set.candidates.emplace_back(input.language, input.sentence(order[k]));
    CenteredChoice choice = centered_translation(set, metric);
    texts[k] = choice.text;
    winners[k] = set.candidates[choice.winner].first;
  };

  if (parallel) {
    const int64_t m = static_cast<int64_t>(order.size());
#pragma omp parallel for schedule(dynamic, 8)
    for (int64_t k = 0; k < m; ++k) combine_one(static_cast<size_t>(k));
  } else {
    for (size_t k = 0; k < order.size(); ++k) combine_one(k);
  }

  CombineResult result;
  result.combined.language = output_language;
  for (size_t k = 0; k < order.size(); ++k) {
    result.combined.entries.emplace(order[k], std::move(texts[k]));
    result.winners.emplace(order[k], std::move(winners[k]));
  }
  return result;
}

}  // namespace

CombineResult combine_corpus(const std::vector<MonoText>& inputs,
                             Metric metric,
                             const std::string& output_language) {
  return combine_impl(inputs, metric, output_language, true);
}

CombineResult combine_corpus_serial(const std::vector<MonoText>& inputs,
                                    Metric metric,
                                    const std::string& output_language) {
  return combine_impl(inputs, metric, output_language, false);
}

std::string CombineResult::winners_tsv() const {
  std::ostringstream out;
  for (const auto& [id, lang] : winners) out << id.str() << '\t' << lang << '\n';
  return out.str();
}

}  // namespace versekit
