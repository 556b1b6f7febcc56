#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "versekit/ngramlm.hpp"

using namespace versekit;

TEST_CASE("unigram Lidstone matches the closed form") {
  auto lm = NGramLM::fit({"a a"}, 1, 0.1);
  // One observed type plus the unknown type in the denominator.
  CHECK(lm.prob({}, "a") == doctest::Approx((2.0 + 0.1) / (2.0 + 0.1 * 2.0)));
  CHECK(lm.prob({}, "zzz") == doctest::Approx(0.1 / (2.0 + 0.1 * 2.0)));
}

TEST_CASE("bigram probability is dominated by the single observation") {
  auto lm = NGramLM::fit({"a b"}, 2, 0.1);
  // Outcome vocab is {a, b, end}; context "a" was continued by "b" once.
  CHECK(lm.prob({"a"}, "b") ==
        doctest::Approx((1.0 + 0.1) / (1.0 + 0.1 * 4.0)));
  CHECK(lm.prob({"a"}, "b") > 0.5);
  CHECK(lm.prob({"a"}, "a") < 0.1);
}

TEST_CASE("order zero and empty corpora are rejected") {
  CHECK_THROWS_AS(NGramLM::fit({"a"}, 0, 0.1), DataError);
  CHECK_THROWS_AS(NGramLM::fit({}, 1, 0.1), DataError);
  CHECK_THROWS_AS(NGramLM::fit({"  "}, 1, 0.1), DataError);
  CHECK_THROWS_AS(NGramLM::fit({"a"}, 1, 0.0), DataError);
}

TEST_CASE("cross entropy of the training text approaches zero as eps -> 0") {
  auto lm = NGramLM::fit({"a a a"}, 1, 1e-12);
  CHECK(lm.cross_entropy("a a a") == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("all-unknown sentences sit at the smoothing floor") {
  auto lm = NGramLM::fit({"a b c"}, 1, 0.1);
  // N=3 tokens, V=3 types plus unknown.
  double floor = -std::log2(0.1 / (3.0 + 0.1 * 4.0));
  CHECK(lm.cross_entropy("zz yy") == doctest::Approx(floor));
  CHECK(std::isfinite(lm.cross_entropy("zz")));
}

TEST_CASE("uniform two-token model costs one bit per token") {
  auto lm = NGramLM::fit({"a b"}, 1, 1e-12);
  CHECK(lm.cross_entropy("a") == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(lm.cross_entropy("b") == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("conditionals sum to one over vocab plus unknown") {
  auto check_sums = [](const NGramLM& lm,
                       const std::vector<std::vector<std::string>>& contexts) {
    for (const auto& ctx : contexts) {
      double total = lm.prob(ctx, "\x02never-seen\x03");
      for (const auto& token : lm.vocabulary()) total += lm.prob(ctx, token);
      CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
    }
  };
  check_sums(NGramLM::fit({"a b a", "b c"}, 1, 0.1), {{}});
  check_sums(NGramLM::fit({"a b a", "b c a b"}, 2, 0.1),
             {{"a"}, {"b"}, {"c"}, {NGramLM::kBegin}});
  check_sums(NGramLM::fit({"x y z x y"}, 3, 0.25),
             {{"x", "y"}, {NGramLM::kBegin, NGramLM::kBegin}});
}

TEST_CASE("training text scores below disjoint-vocabulary text") {
  auto lm = NGramLM::fit({"the cat sat", "the dog ran"}, 2, 0.1);
  CHECK(lm.cross_entropy("the cat sat") < lm.cross_entropy("vi er her nu"));
}

TEST_CASE("probabilities are always strictly positive") {
  auto lm = NGramLM::fit({"a b"}, 3, 0.01);
  CHECK(lm.prob({"q", "w"}, "zzz") > 0.0);
  CHECK(std::isfinite(lm.cross_entropy("q w e r t y")));
}

TEST_CASE("fit is deterministic") {
  std::vector<std::string> corpus = {"a b c", "c b a", "b b b"};
  auto first = NGramLM::fit(corpus, 2, 0.1);
  auto second = NGramLM::fit(corpus, 2, 0.1);
  CHECK(first.dump_counts() == second.dump_counts());
  CHECK(first.cross_entropy("a b") == second.cross_entropy("a b"));
}
