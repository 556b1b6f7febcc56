#ifndef VERSEKIT_TESTS_FIXTURES_HPP
#define VERSEKIT_TESTS_FIXTURES_HPP

#include <random>
#include <string>
#include <vector>

#include "versekit/corpus.hpp"

namespace versekit::testing {

// Zipf-ish sampler over a synthetic vocabulary: p(rank) ~ 1/(rank+2).
class ZipfVocab {
 public:
  ZipfVocab(size_t size, const std::string& prefix, uint64_t seed)
      : rng_(seed) {
    weights_.reserve(size);
    double cumulative = 0.0;
    for (size_t i = 0; i < size; ++i) {
      cumulative += 1.0 / static_cast<double>(i + 2);
      weights_.push_back(cumulative);
      words_.push_back(prefix + std::to_string(i));
    }
  }

  const std::string& sample() {
    double u = std::uniform_real_distribution<double>(0.0, weights_.back())(
        rng_);
    size_t lo = 0, hi = weights_.size() - 1;
    while (lo < hi) {
      size_t mid = (lo + hi) / 2;
      if (weights_[mid] < u)
        lo = mid + 1;
      else
        hi = mid;
    }
    return words_[lo];
  }

  size_t sentence_length() {
    return 3 + static_cast<size_t>(std::uniform_int_distribution<int>(0, 12)(
               rng_));
  }

 private:
  std::mt19937_64 rng_;
  std::vector<double> weights_;
  std::vector<std::string> words_;
};

// Synthetic verse-aligned corpus: `languages` parallel texts over shared
// verse ids BK.c.v, each language with its own vocabulary but identical
// sentence lengths per verse (verse-aligned by construction).
inline VerseAlignedCorpus synthetic_corpus(size_t languages, size_t verses,
                                           uint64_t seed,
                                           size_t vocab_size = 400) {
  VerseAlignedCorpus corpus;
  std::vector<ZipfVocab> vocabs;
  for (size_t l = 0; l < languages; ++l)
    vocabs.emplace_back(vocab_size, "w" + std::to_string(l) + "_",
                        seed + 1000 * l);

  std::mt19937_64 length_rng(seed ^ 0x5eed);
  std::vector<size_t> lengths(verses);
  for (size_t v = 0; v < verses; ++v)
    lengths[v] = 3 + static_cast<size_t>(
                         std::uniform_int_distribution<int>(0, 12)(length_rng));

  for (size_t l = 0; l < languages; ++l) {
    MonoText text;
    text.language = "lang" + std::to_string(l);
    for (size_t v = 0; v < verses; ++v) {
      std::string book = "BK" + std::to_string(v / 100);
      VerseId id(book + "." + std::to_string(v / 10 % 10 + 1) + "." +
                 std::to_string(v % 10 + 1));
      std::string sentence;
      for (size_t t = 0; t < lengths[v]; ++t) {
        if (t) sentence.push_back(' ');
        sentence += vocabs[l].sample();
      }
      text.entries.emplace(id, sentence);
    }
    corpus.languages.push_back(text.language);
    corpus.texts.emplace(text.language, std::move(text));
  }
  return corpus;
}

inline MonoText mono_from_lines(const std::string& language,
                                const std::vector<std::string>& lines) {
  MonoText text;
  text.language = language;
  for (size_t i = 0; i < lines.size(); ++i)
    text.entries.emplace(VerseId("V." + std::to_string(i / 50 + 1) + "." +
                                 std::to_string(i % 50 + 1)),
                         lines[i]);
  return text;
}

}  // namespace versekit::testing

#endif  // VERSEKIT_TESTS_FIXTURES_HPP
