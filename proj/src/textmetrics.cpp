#include "versekit/textmetrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace versekit {

namespace {

std::u32string strip_whitespace(std::string_view text) {
  std::u32string out;
  for (char32_t c : decode_utf8(text)) {
    bool space = (c == U' ' || c == U'\t' || c == U'\n' || c == U'\r' ||
                  c == U'\v' || c == U'\f' || c == U' ' ||
                  c == U' ' || c == U' ' || c == U' ' ||
                  c == U' ' || c == U'　' || c == U' ' ||
                  (c >= U' ' && c <= U' '));
    if (!space) out.push_back(c);
  }
  return out;
}

using GramCounts = std::unordered_map<std::u32string, uint64_t>;

GramCounts char_ngrams(const std::u32string& chars, int n) {
  GramCounts counts;
  if (static_cast<int>(chars.size()) < n) return counts;
  for (size_t i = 0; i + n <= chars.size(); ++i)
    ++counts[chars.substr(i, n)];
  return counts;
}

struct ChrfAccumulator {
  int max_n;
  std::vector<uint64_t> match, hyp_total, ref_total;

  explicit ChrfAccumulator(int n)
      : max_n(n), match(n, 0), hyp_total(n, 0), ref_total(n, 0) {}

  void add(std::string_view hyp, std::string_view ref) {
    std::u32string h = strip_whitespace(hyp);
    std::u32string r = strip_whitespace(ref);
    for (int n = 1; n <= max_n; ++n) {
      GramCounts hc = char_ngrams(h, n);
      GramCounts rc = char_ngrams(r, n);
      uint64_t m = 0;
      for (const auto& [gram, count] : hc) {
        auto it = rc.find(gram);
        if (it != rc.end()) m += std::min(count, it->second);
      }
      match[n - 1] += m;
      for (const auto& [_, count] : hc) hyp_total[n - 1] += count;
      for (const auto& [_, count] : rc) ref_total[n - 1] += count;
    }
  }

  double score(double beta) const {
    double prec_sum = 0.0, rec_sum = 0.0;
    int orders = 0;
    for (int n = 0; n < max_n; ++n) {
      if (hyp_total[n] == 0 && ref_total[n] == 0) continue;
      ++orders;
      if (hyp_total[n] > 0)
        prec_sum += static_cast<double>(match[n]) /
                    static_cast<double>(hyp_total[n]);
      if (ref_total[n] > 0)
        rec_sum += static_cast<double>(match[n]) /
                   static_cast<double>(ref_total[n]);
    }
    if (orders == 0) return 1.0;  // caller warns on the empty-empty case
    double p = prec_sum / orders;
    double r = rec_sum / orders;
    double b2 = beta * beta;
    if (b2 * p + r == 0.0) return 0.0;
    return (1.0 + b2) * p * r / (b2 * p + r);
  }
};

using WordCounts = std::unordered_map<std::string, uint64_t>;

WordCounts word_ngrams(const std::vector<std::string>& tokens, int n) {
  WordCounts counts;
  if (static_cast<int>(tokens.size()) < n) return counts;
  for (size_t i = 0; i + n <= tokens.size(); ++i) {
    std::string gram = tokens[i];
    for (int k = 1; k < n; ++k) {
      gram.push_back(' ');
      gram += tokens[i + k];
    }
    ++counts[gram];
  }
  return counts;
}

// Cost of the greedy characTER search: number of accepted word-block
// shifts plus the residual character edit distance.
struct ShiftResult {
  uint64_t cost = 0;
  uint64_t hyp_chars = 0;
};

std::u32string join_words(const std::vector<std::u32string>& words) {
  std::u32string out;
  for (size_t i = 0; i < words.size(); ++i) {
    if (i) out.push_back(U' ');
    out += words[i];
  }
  return out;
}

ShiftResult character_shift_cost(std::string_view hyp, std::string_view ref) {
  std::vector<std::u32string> hyp_words;
  for (const auto& token : tokenize(hyp)) hyp_words.push_back(decode_utf8(token));
  std::vector<std::u32string> ref_words;
  for (const auto& token : tokenize(ref)) ref_words.push_back(decode_utf8(token));
  std::u32string ref_chars = join_words(ref_words);

  ShiftResult result;
  result.hyp_chars = join_words(hyp_words).size();

  constexpr size_t kMaxBlock = 5;
  size_t shifts = 0;
  size_t dist = edit_distance(join_words(hyp_words), ref_chars);
  size_t guard = hyp_words.size() + 1;
  while (dist > 0 && guard-- > 0) {
    size_t best_dist = dist;
    std::vector<std::u32string> best_words;
    for (size_t start = 0; start < hyp_words.size(); ++start) {
      size_t max_len = std::min(kMaxBlock, hyp_words.size() - start);
      for (size_t len = 1; len <= max_len; ++len) {
        // Only consider blocks that occur verbatim in the reference.
        bool in_ref = false;
        for (size_t r = 0; r + len <= ref_words.size() && !in_ref; ++r) {
          in_ref = std::equal(hyp_words.begin() + start,
                              hyp_words.begin() + start + len,
                              ref_words.begin() + r);
        }
        if (!in_ref) continue;
        std::vector<std::u32string> rest;
        rest.reserve(hyp_words.size() - len);
        rest.insert(rest.end(), hyp_words.begin(), hyp_words.begin() + start);
        rest.insert(rest.end(), hyp_words.begin() + start + len,
                    hyp_words.end());
        for (size_t pos = 0; pos <= rest.size(); ++pos) {
          if (pos == start) continue;  // no-op shift
          std::vector<std::u32string> candidate;
          candidate.reserve(hyp_words.size());
          candidate.insert(candidate.end(), rest.begin(), rest.begin() + pos);
          candidate.insert(candidate.end(), hyp_words.begin() + start,
                           hyp_words.begin() + start + len);
          candidate.insert(candidate.end(), rest.begin() + pos, rest.end());
          size_t d = edit_distance(join_words(candidate), ref_chars);
          if (d < best_dist) {
            best_dist = d;
            best_words = std::move(candidate);
          }
        }
      }
    }
    // A shift pays 1; accept only if it strictly lowers the total.
    if (best_dist + 1 < dist) {
      hyp_words = std::move(best_words);
      dist = best_dist;
      ++shifts;
    } else {
      break;
    }
  }
  result.cost = shifts + dist;
  return result;
}

struct BucketCounts {
  uint64_t match = 0;
  uint64_t hyp = 0;
  uint64_t ref = 0;
};

}  // namespace

double chrf(std::string_view hyp, std::string_view ref, int max_n,
            double beta) {
  if (max_n < 1) throw DataError("chrf requires max_n >= 1");
  if (strip_whitespace(hyp).empty() && strip_whitespace(ref).empty()) {
    warn("chrf of two empty strings defined as 1.0");
    return 1.0;
  }
  ChrfAccumulator acc(max_n);
  acc.add(hyp, ref);
  return acc.score(beta);
}

double character_error(std::string_view hyp, std::string_view ref) {
  if (count_tokens(ref) == 0) throw DataError("characTER needs a non-empty reference");
  ShiftResult r = character_shift_cost(hyp, ref);
  return static_cast<double>(r.cost) /
         static_cast<double>(std::max<uint64_t>(1, r.hyp_chars));
}

void BleuCounts::add(std::string_view hyp, std::string_view ref) {
  std::vector<std::string> h = tokenize(hyp);
  std::vector<std::string> r = tokenize(ref);
  hyp_len += h.size();
  ref_len += r.size();
  for (int n = 1; n <= max_n; ++n) {
    WordCounts hc = word_ngrams(h, n);
    WordCounts rc = word_ngrams(r, n);
    for (const auto& [gram, count] : hc) {
      total[n - 1] += count;
      auto it = rc.find(gram);
      if (it != rc.end()) match[n - 1] += std::min(count, it->second);
    }
  }
}

double BleuCounts::score() const {
  if (hyp_len == 0) return 0.0;
  double log_sum = 0.0;
  int orders = 0;
  for (int n = 0; n < max_n; ++n) {
    if (total[n] == 0 && ref_len < static_cast<uint64_t>(n + 1)) continue;
    ++orders;
    if (total[n] == 0 || match[n] == 0) return 0.0;
    log_sum += std::log(static_cast<double>(match[n]) /
                        static_cast<double>(total[n]));
  }
  if (orders == 0) return 0.0;
  double precision = std::exp(log_sum / orders);
  double bp = hyp_len >= ref_len
                  ? 1.0
                  : std::exp(1.0 - static_cast<double>(ref_len) /
                                       static_cast<double>(hyp_len));
  return bp * precision;
}

double bleu_n(std::string_view hyp, std::string_view ref, int max_n) {
  if (max_n < 1 || max_n > 4) throw DataError("bleu_n requires max_n in 1..4");
  BleuCounts counts(max_n);
  counts.add(hyp, ref);
  return counts.score();
}

double sentence_overlap(const MonoText& a, const MonoText& b) {
  uint64_t shared = 0, identical = 0;
  for (const auto& [id, sentence] : a.entries) {
    auto it = b.entries.find(id);
    if (it == b.entries.end()) continue;
    ++shared;
    if (sentence == it->second) ++identical;
  }
  if (shared == 0)
    throw DataError("no shared verses between " + a.language + " and " +
                    b.language);
  return static_cast<double>(identical) / static_cast<double>(shared);
}

double word_overlap(const MonoText& a, const MonoText& b, OverlapMode mode) {
  std::unordered_set<std::string> va, vb;
  for (const auto& [_, sentence] : a.entries)
    for (auto& token : tokenize(sentence)) va.insert(std::move(token));
  for (const auto& [_, sentence] : b.entries)
    for (auto& token : tokenize(sentence)) vb.insert(std::move(token));
  uint64_t both = 0;
  for (const auto& token : va)
    if (vb.count(token)) ++both;
  if (mode == OverlapMode::CoverageOfA) {
    if (va.empty()) return 0.0;
    return static_cast<double>(both) / static_cast<double>(va.size());
  }
  uint64_t either = va.size() + vb.size() - both;
  if (either == 0) return 0.0;
  return static_cast<double>(both) / static_cast<double>(either);
}

Metric parse_metric(std::string_view name) {
  if (name == "chrf") return Metric::Chrf;
  if (name == "character") return Metric::CharacTer;
  if (name == "bleu1") return Metric::Bleu1;
  if (name == "bleu4") return Metric::Bleu4;
  if (name == "sentence-overlap") return Metric::SentenceOverlap;
  if (name == "word-overlap") return Metric::WordOverlap;
  throw UsageError("unknown metric: " + std::string(name));
}

std::string metric_name(Metric metric) {
  switch (metric) {
    case Metric::Chrf: return "chrf";
    case Metric::CharacTer: return "character";
    case Metric::Bleu1: return "bleu1";
    case Metric::Bleu4: return "bleu4";
    case Metric::SentenceOverlap: return "sentence-overlap";
    case Metric::WordOverlap: return "word-overlap";
  }
  return "?";
}

double SimilarityMatrix::at(const std::string& ref_lang,
                            const std::string& hyp_lang) const {
  return values[index_of(ref_lang)][index_of(hyp_lang)];
}

size_t SimilarityMatrix::index_of(const std::string& language) const {
  auto it = std::find(languages.begin(), languages.end(), language);
  if (it == languages.end())
    throw DataError("language not in matrix: " + language);
  return static_cast<size_t>(it - languages.begin());
}

SimilarityMatrix SimilarityMatrix::as_similarity() const {
  SimilarityMatrix out = *this;
  if (metric == Metric::CharacTer) {
    for (auto& row : out.values)
      for (double& v : row) v = 1.0 - std::min(v, 1.0);
  }
  return out;
}

std::string SimilarityMatrix::to_csv() const {
  std::ostringstream out;
  out << "lang";
  for (const auto& lang : languages) out << ',' << lang;
  out << '\n';
  for (size_t i = 0; i < languages.size(); ++i) {
    out << languages[i];
    for (size_t j = 0; j < languages.size(); ++j)
      out << ',' << format_double(values[i][j]);
    out << '\n';
  }
  return out.str();
}

std::string SimilarityMatrix::to_long_tsv() const {
  std::ostringstream out;
  for (size_t i = 0; i < languages.size(); ++i)
    for (size_t j = 0; j < languages.size(); ++j)
      out << languages[i] << '\t' << languages[j] << '\t'
          << format_double(values[i][j]) << '\n';
  return out.str();
}

namespace {

double matrix_cell(const VerseAlignedCorpus& corpus, const std::string& ref_lang,
                   const std::string& hyp_lang, Metric metric) {
  const MonoText& ref = corpus.text(ref_lang);
  const MonoText& hyp = corpus.text(hyp_lang);

  if (metric == Metric::SentenceOverlap) return sentence_overlap(ref, hyp);
  if (metric == Metric::WordOverlap) return word_overlap(ref, hyp);

  std::vector<std::pair<const std::string*, const std::string*>> pairs;
  for (const auto& [id, sentence] : ref.entries) {
    auto it = hyp.entries.find(id);
    if (it != hyp.entries.end()) pairs.emplace_back(&it->second, &sentence);
  }
  if (pairs.empty())
    throw DataError("no shared verses between " + ref_lang + " and " +
                    hyp_lang);

  switch (metric) {
    case Metric::Chrf: {
      ChrfAccumulator acc(6);
      for (const auto& [h, r] : pairs) acc.add(*h, *r);
      return acc.score(2.0);
    }
    case Metric::CharacTer: {
      uint64_t cost = 0, chars = 0;
      for (const auto& [h, r] : pairs) {
        ShiftResult sr = character_shift_cost(*h, *r);
        cost += sr.cost;
        chars += sr.hyp_chars;
      }
      return static_cast<double>(cost) /
             static_cast<double>(std::max<uint64_t>(1, chars));
    }
    case Metric::Bleu1:
    case Metric::Bleu4: {
      BleuCounts counts(metric == Metric::Bleu1 ? 1 : 4);
      for (const auto& [h, r] : pairs) counts.add(*h, *r);
      return counts.score();
    }
    default:
      throw DataError("unhandled metric");
  }
}

}  // namespace

SimilarityMatrix similarity_matrix_serial(
    const VerseAlignedCorpus& corpus,
    const std::vector<std::string>& languages, Metric metric) {
  SimilarityMatrix matrix;
  matrix.languages = languages;
  matrix.metric = metric;
  matrix.values.assign(languages.size(),
                       std::vector<double>(languages.size(), 0.0));
  for (size_t i = 0; i < languages.size(); ++i)
    for (size_t j = 0; j < languages.size(); ++j)
      matrix.values[i][j] =
          matrix_cell(corpus, languages[i], languages[j], metric);
  return matrix;
}

SimilarityMatrix similarity_matrix(const VerseAlignedCorpus& corpus,
                                   const std::vector<std::string>& languages,
                                   Metric metric) {
  SimilarityMatrix matrix;
  matrix.languages = languages;
  matrix.metric = metric;
  const int L = static_cast<int>(languages.size());
  matrix.values.assign(L, std::vector<double>(L, 0.0));
  std::string first_error;
#pragma omp parallel for collapse(2) schedule(dynamic)
  for (int i = 0; i < L; ++i) {
    for (int j = 0; j < L; ++j) {
      try {
        matrix.values[i][j] =
            matrix_cell(corpus, languages[i], languages[j], metric);
      } catch (const std::exception& e) {
#pragma omp critical
        if (first_error.empty()) first_error = e.what();
      }
    }
  }
  if (!first_error.empty()) throw DataError(first_error);
  return matrix;
}

namespace {

std::vector<double> rank_with_ties(const std::vector<double>& values) {
  const size_t n = values.size();
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](size_t a, size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n, 0.0);
  size_t i = 0;
  while (i < n) {
    size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
    i = j + 1;
  }
  return ranks;
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const size_t n = x.size();
  double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (size_t i = 0; i < n; ++i) {
    double dx = x[i] - mx;
    double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0)
    throw DataError("spearman input is rank-degenerate (constant vector)");
  return sxy / std::sqrt(sxx * syy);
}

double beta_cont_fraction(double a, double b, double x) {
  constexpr int kMaxIter = 200;
  constexpr double kEps = 3e-14;
  constexpr double kFpMin = 1e-300;
  double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kFpMin) d = kFpMin;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) break;
  }
  return h;
}

double incomplete_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  double ln_bt = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                 a * std::log(x) + b * std::log(1.0 - x);
  double bt = std::exp(ln_bt);
  if (x < (a + 1.0) / (a + b + 2.0))
    return bt * beta_cont_fraction(a, b, x) / a;
  return 1.0 - bt * beta_cont_fraction(b, a, 1.0 - x) / b;
}

// Two-sided p-value of a t statistic with nu degrees of freedom.
double student_two_sided(double t, double nu) {
  double x = nu / (nu + t * t);
  return std::clamp(incomplete_beta(nu / 2.0, 0.5, x), 0.0, 1.0);
}

}  // namespace

CorrelationResult spearman(const std::vector<double>& x,
                           const std::vector<double>& y) {
  if (x.size() != y.size()) throw DataError("spearman: length mismatch");
  if (x.size() < 3) throw DataError("spearman needs at least 3 samples");
  std::vector<double> rx = rank_with_ties(x);
  std::vector<double> ry = rank_with_ties(y);
  CorrelationResult result;
  result.n = x.size();
  result.rho = pearson(rx, ry);
  result.p_approximate = result.n < 10;
  if (std::fabs(result.rho) >= 1.0 - 1e-15) {
    result.p_value = 0.0;
    return result;
  }
  double nu = static_cast<double>(result.n - 2);
  double t = result.rho * std::sqrt(nu / (1.0 - result.rho * result.rho));
  result.p_value = student_two_sided(t, nu);
  return result;
}

ColumnwiseCorrelation columnwise_spearman(
    const std::vector<std::vector<double>>& a,
    const std::vector<std::vector<double>>& b, bool exclude_diagonal) {
  if (a.size() != b.size()) throw DataError("matrix shape mismatch");
  for (size_t i = 0; i < a.size(); ++i)
    if (a[i].size() != b[i].size() || a[i].size() != a.size())
      throw DataError("matrix shape mismatch");

  ColumnwiseCorrelation out;
  std::vector<double> pooled_a, pooled_b;
  for (size_t j = 0; j < a.size(); ++j) {
    std::vector<double> col_a, col_b;
    for (size_t i = 0; i < a.size(); ++i) {
      if (exclude_diagonal && i == j) continue;
      col_a.push_back(a[i][j]);
      col_b.push_back(b[i][j]);
      pooled_a.push_back(a[i][j]);
      pooled_b.push_back(b[i][j]);
    }
    std::optional<CorrelationResult> col;
    if (col_a.size() >= 3) {
      try {
        col = spearman(col_a, col_b);
      } catch (const DataError&) {
        col = std::nullopt;  // degenerate column
      }
    }
    out.per_column.push_back(col);
  }
  out.pooled = spearman(pooled_a, pooled_b);
  return out;
}

double unigram_entropy(const std::vector<std::string>& tokens) {
  if (tokens.empty()) throw DataError("entropy of an empty token sequence");
  std::unordered_map<std::string, uint64_t> counts;
  for (const auto& token : tokens) ++counts[token];
  double total = static_cast<double>(tokens.size());
  double h = 0.0;
  for (const auto& [_, count] : counts) {
    double p = static_cast<double>(count) / total;
    h -= p * std::log2(p);
  }
  return h;
}

std::pair<double, double> bootstrap_ci(
    const std::vector<std::string>& tokens,
    const std::function<double(const std::vector<std::string>&)>& statistic,
    int resamples, double level, uint64_t rng_seed) {
  if (resamples < 100) throw DataError("bootstrap needs >= 100 resamples");
  if (tokens.empty()) throw DataError("bootstrap of an empty token sequence");
  if (!(level > 0.0 && level < 1.0))
    throw DataError("confidence level must be in (0,1)");

  std::mt19937_64 rng(rng_seed);
  const size_t n = tokens.size();
  std::vector<double> stats(resamples);
  std::vector<std::string> sample(n);
  for (int r = 0; r < resamples; ++r) {
    for (size_t i = 0; i < n; ++i) {
      // Multiply-shift keeps index mapping identical across platforms.
      sample[i] = tokens[static_cast<size_t>(
          (static_cast<unsigned __int128>(rng()) * n) >> 64)];
    }
    stats[r] = statistic(sample);
  }
  std::sort(stats.begin(), stats.end());
  auto quantile = [&](double q) {
    double pos = q * static_cast<double>(stats.size() - 1);
    size_t lo = static_cast<size_t>(pos);
    size_t hi = std::min(lo + 1, stats.size() - 1);
    double frac = pos - static_cast<double>(lo);
    return stats[lo] * (1.0 - frac) + stats[hi] * frac;
  };
  double alpha = (1.0 - level) / 2.0;
  return {quantile(alpha), quantile(1.0 - alpha)};
}

std::optional<double> f1_by_frequency_bucket(
    const MonoText& hyp, const MonoText& ref,
    const std::map<std::string, uint64_t>& train_freqs, uint64_t bucket) {
  auto in_bucket = [&](const std::string& token) {
    auto it = train_freqs.find(token);
    uint64_t freq = it == train_freqs.end() ? 0 : it->second;
    return freq == bucket;
  };

  BucketCounts totals;
  for (const auto& [id, ref_sentence] : ref.entries) {
    auto it = hyp.entries.find(id);
    std::unordered_map<std::string, uint64_t> rc, hc;
    for (const auto& token : tokenize(ref_sentence))
      if (in_bucket(token)) ++rc[token];
    if (it != hyp.entries.end())
      for (const auto& token : tokenize(it->second))
        if (in_bucket(token)) ++hc[token];
    for (const auto& [token, count] : rc) {
      totals.ref += count;
      auto hit = hc.find(token);
      if (hit != hc.end()) totals.match += std::min(count, hit->second);
    }
    for (const auto& [_, count] : hc) totals.hyp += count;
  }

  if (totals.ref == 0) return std::nullopt;
  double precision = totals.hyp > 0 ? static_cast<double>(totals.match) /
                                          static_cast<double>(totals.hyp)
                                    : 0.0;
  double recall =
      static_cast<double>(totals.match) / static_cast<double>(totals.ref);
  if (precision + recall == 0.0) return 0.0;
  return 2.0 * precision * recall / (precision + recall);
}

}  // namespace versekit
