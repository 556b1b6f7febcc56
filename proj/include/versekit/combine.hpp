#ifndef VERSEKIT_COMBINE_HPP
#define VERSEKIT_COMBINE_HPP

#include <map>
#include <string>
#include <vector>

#include "versekit/corpus.hpp"
#include "versekit/textmetrics.hpp"

namespace versekit {

struct CandidateSet {
  VerseId verse;
  // (source language, translation text); language codes unique.
  std::vector<std::pair<std::string, std::string>> candidates;
};

struct CenteredChoice {
  size_t winner = 0;
  std::string text;
  std::vector<double> row_sums;  // symmetrized similarity row sums
};

// Picks the candidate maximizing the sum of its symmetrized similarities
// to the others. Ties resolve to the lowest candidate index.
CenteredChoice centered_translation(const CandidateSet& set,
                                    Metric metric = Metric::Chrf);

struct CombineResult {
  MonoText combined;
  std::map<VerseId, std::string> winners;  // verse -> winning source language
  std::string winners_tsv() const;
};

// Per shared verse, centered_translation over all inputs. Parallel per
// verse; output coverage is the shared coverage.
CombineResult combine_corpus(const std::vector<MonoText>& inputs,
                             Metric metric = Metric::Chrf,
                             const std::string& output_language = "combined");

// Plain loop reference used by tests.
CombineResult combine_corpus_serial(
    const std::vector<MonoText>& inputs, Metric metric = Metric::Chrf,
    const std::string& output_language = "combined");

}  // namespace versekit

#endif  // VERSEKIT_COMBINE_HPP
