#include "versekit/selection.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace versekit {

namespace {

std::string join_gram(const std::vector<std::string>& tokens, size_t begin,
                      int order) {
  std::string gram = tokens[begin];
  for (int k = 1; k < order; ++k) {
    gram.push_back(' ');
    gram += tokens[begin + k];
  }
  return gram;
}

// Multiply-shift bounded draw; identical across platforms, unlike the
// standard distributions.
uint64_t bounded_draw(std::mt19937_64& rng, uint64_t n) {
  return static_cast<uint64_t>(
      (static_cast<unsigned __int128>(rng()) * n) >> 64);
}

}  // namespace

FrequencyTable FrequencyTable::build(const MonoText& text, int max_order) {
  if (max_order < 1) throw DataError("frequency order must be >= 1");
  FrequencyTable table;
  table.max_order_ = max_order;
  table.by_order_.resize(max_order);
  for (const auto& [_, sentence] : text.entries) {
    std::vector<std::string> tokens = tokenize(sentence);
    for (int j = 1; j <= max_order; ++j)
      for (size_t i = 0; i + j <= tokens.size(); ++i)
        ++table.by_order_[j - 1][join_gram(tokens, i, j)];
  }
  return table;
}

uint64_t FrequencyTable::freq(int order, const std::string& gram) const {
  if (order < 1 || order > max_order_)
    throw DataError("frequency order out of range");
  ++queries_;
  const auto& table = by_order_[order - 1];
  auto it = table.find(gram);
  return it == table.end() ? 0 : it->second;
}

void KnownState::absorb(const std::vector<std::string>& tokens) {
  for (int j = 1; j <= max_order; ++j)
    for (size_t i = 0; i + j <= tokens.size(); ++i)
      known[j - 1].insert(join_gram(tokens, i, j));
}

double score_s(const std::vector<std::string>& tokens, const KnownState& state,
               const FrequencyTable& freqs) {
  double total = 0.0;
  for (const auto& token : tokens)
    if (!state.knows(1, token))
      total += static_cast<double>(freqs.freq(1, token));
  return total;
}

double score_sn(const std::vector<std::string>& tokens,
                const KnownState& state, const FrequencyTable& freqs) {
  if (tokens.empty()) throw DataError("cannot score an empty sentence");
  return score_s(tokens, state, freqs) / static_cast<double>(tokens.size());
}

double score_sng(const std::vector<std::string>& tokens,
                 const KnownState& state, const FrequencyTable& freqs, int J) {
  if (J < 1) throw DataError("score_sng needs J >= 1");
  if (tokens.empty()) throw DataError("cannot score an empty sentence");
  double total = 0.0;
  for (int j = 1; j <= J; ++j) {
    for (size_t i = 0; i + j <= tokens.size(); ++i) {
      std::string gram = join_gram(tokens, i, j);
      if (!state.knows(j, gram))
        total += static_cast<double>(freqs.freq(j, gram));
    }
  }
  return total / static_cast<double>(tokens.size());
}

double score_ent(const std::vector<std::string>& tokens,
                 const NGramLM& lm_chosen, const NGramLM& lm_left,
                 const NGramLM& lm_right, Membership membership) {
  if (!lm_chosen.fitted() || !lm_left.fitted() || !lm_right.fitted())
    throw DataError("score_ent needs all three fitted models");
  double h_c = lm_chosen.cross_entropy_tokens(tokens);
  double h_opposite = membership == Membership::Left
                          ? lm_right.cross_entropy_tokens(tokens)
                          : lm_left.cross_entropy_tokens(tokens);
  return h_c - h_opposite;
}

double aggregate_scores(const std::map<std::string, double>& per_language,
                        const std::set<std::string>& voters) {
  if (voters.empty()) throw DataError("empty voter set");
  double total = 0.0;
  for (const auto& lang : voters) {
    auto it = per_language.find(lang);
    if (it == per_language.end())
      throw DataError("voter " + lang + " has no score");
    total += it->second;
  }
  return total;
}

LanguageMetadata LanguageMetadata::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open metadata: " + path);
  LanguageMetadata metadata;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    size_t start = 0;
    while (true) {
      size_t tab = line.find('\t', start);
      cells.push_back(line.substr(start, tab - start));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    if (cells[0].empty())
      throw DataError(path + ":" + std::to_string(line_no) +
                      ": empty language code");
    Row row;
    row.language = cells[0];
    if (cells.size() > 1 && !cells[1].empty()) row.family = cells[1];
    if (cells.size() > 2 && !cells[2].empty()) {
      uint64_t speakers = 0;
      auto [ptr, ec] = std::from_chars(
          cells[2].data(), cells[2].data() + cells[2].size(), speakers);
      if (ec != std::errc() || ptr != cells[2].data() + cells[2].size())
        throw DataError(path + ":" + std::to_string(line_no) +
                        ": bad speaker count \"" + cells[2] + "\"");
      row.speakers = speakers;
    }
    if (cells.size() > 3 && !cells[3].empty())
      row.neighbor = cells[3] == "1" || cells[3] == "true";
    metadata.rows.push_back(std::move(row));
  }
  return metadata;
}

std::set<std::string> voter_set(VoterKind kind,
                                const LanguageMetadata& metadata, int k) {
  std::set<std::string> voters;
  switch (kind) {
    case VoterKind::L: {
      for (const auto& row : metadata.rows) voters.insert(row.language);
      break;
    }
    case VoterKind::P: {
      if (k < 1) throw DataError("one-vote-per-person needs k >= 1");
      std::vector<const LanguageMetadata::Row*> rows;
      for (const auto& row : metadata.rows) {
        if (!row.speakers)
          throw DataError("language " + row.language +
                          " lacks a speaker count");
        rows.push_back(&row);
      }
      std::sort(rows.begin(), rows.end(), [](const auto* a, const auto* b) {
        if (*a->speakers != *b->speakers) return *a->speakers > *b->speakers;
        return a->language < b->language;
      });
      for (size_t i = 0; i < rows.size() && i < static_cast<size_t>(k); ++i)
        voters.insert(rows[i]->language);
      break;
    }
    case VoterKind::F: {
      if (k < 1) throw DataError("one-vote-per-family needs k >= 1");
      struct FamilyPick {
        std::string representative;
        uint64_t speakers = 0;
      };
      std::map<std::string, FamilyPick> families;
      for (const auto& row : metadata.rows) {
        if (!row.family)
          throw DataError("language " + row.language + " lacks a family");
        if (!row.speakers)
          throw DataError("language " + row.language +
                          " lacks a speaker count");
        FamilyPick& pick = families[*row.family];
        if (pick.representative.empty() || *row.speakers > pick.speakers ||
            (*row.speakers == pick.speakers &&
             row.language < pick.representative)) {
          pick.representative = row.language;
          pick.speakers = *row.speakers;
        }
      }
      std::vector<std::pair<std::string, FamilyPick>> ranked(families.begin(),
                                                             families.end());
      std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.second.speakers != b.second.speakers)
          return a.second.speakers > b.second.speakers;
        return a.first < b.first;
      });
      for (size_t i = 0; i < ranked.size() && i < static_cast<size_t>(k); ++i)
        voters.insert(ranked[i].second.representative);
      break;
    }
    case VoterKind::N: {
      bool any_flag = false;
      for (const auto& row : metadata.rows) {
        if (row.neighbor) {
          any_flag = true;
          if (*row.neighbor) voters.insert(row.language);
        }
      }
      if (!any_flag)
        throw DataError("metadata has no neighbor column for voter kind N");
      break;
    }
  }
  if (voters.empty()) throw DataError("voter set is empty");
  return voters;
}

Method Method::parse(std::string_view text) {
  Method method;
  auto take_head = [&](std::string_view& rest) {
    size_t colon = rest.find(':');
    std::string_view head = rest.substr(0, colon);
    rest = colon == std::string_view::npos ? std::string_view()
                                           : rest.substr(colon + 1);
    return head;
  };
  std::string_view rest = text;
  std::string_view head = take_head(rest);
  auto parse_int = [&](std::string_view s, const char* what) {
    int value = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size() || value < 1)
      throw UsageError(std::string("bad ") + what + " in method: " +
                       std::string(text));
    return value;
  };

  if (head == "rand") {
    method.kind = Kind::Rand;
  } else if (head == "excerpt") {
    method.kind = Kind::Excerpt;
    if (rest.empty())
      throw UsageError("excerpt method needs a book: excerpt:BOOK");
    method.book = std::string(rest);
    rest = {};
  } else if (head == "s") {
    method.kind = Kind::S;
  } else if (head == "sn") {
    method.kind = Kind::SN;
  } else if (head == "sng") {
    method.kind = Kind::SNG;
    if (rest.empty()) throw UsageError("sng method needs an order: sng:J");
    method.J = parse_int(take_head(rest), "order");
  } else if (head == "ent") {
    method.kind = Kind::Ent;
    if (!rest.empty())
      method.ent_chosen_order = parse_int(take_head(rest), "order");
  } else if (head == "agg") {
    method.kind = Kind::Agg;
    method.J = 5;
    if (rest.empty())
      throw UsageError("agg method needs a voter kind: agg:{L|F|P|N}[:k]");
    std::string_view kind = take_head(rest);
    if (kind == "L") method.agg_kind = VoterKind::L;
    else if (kind == "F") method.agg_kind = VoterKind::F;
    else if (kind == "P") method.agg_kind = VoterKind::P;
    else if (kind == "N") method.agg_kind = VoterKind::N;
    else throw UsageError("unknown voter kind: " + std::string(kind));
    if (!rest.empty()) method.agg_k = parse_int(take_head(rest), "k");
  } else {
    throw UsageError("unknown selection method: " + std::string(text));
  }
  if (!rest.empty())
    throw UsageError("trailing junk in method: " + std::string(text));
  return method;
}

std::string Method::str() const {
  switch (kind) {
    case Kind::Rand: return "rand";
    case Kind::Excerpt: return "excerpt:" + book;
    case Kind::S: return "s";
    case Kind::SN: return "sn";
    case Kind::SNG: return "sng:" + std::to_string(J);
    case Kind::Ent: return "ent:" + std::to_string(ent_chosen_order);
    case Kind::Agg: {
      std::string out = "agg:";
      switch (agg_kind) {
        case VoterKind::L: out += 'L'; break;
        case VoterKind::F: out += 'F'; break;
        case VoterKind::P: out += 'P'; break;
        case VoterKind::N: out += 'N'; break;
      }
      if (agg_k > 0) out += ':' + std::to_string(agg_k);
      return out;
    }
  }
  return "?";
}

std::vector<VerseId> SeedCorpus::ids() const {
  std::vector<VerseId> out;
  out.reserve(steps.size());
  for (const auto& step : steps) out.push_back(step.id);
  return out;
}

std::string SeedCorpus::to_tsv() const {
  std::ostringstream out;
  for (size_t i = 0; i < steps.size(); ++i)
    out << (i + 1) << '\t' << steps[i].id.str() << '\t'
        << format_double(steps[i].score) << '\t' << steps[i].cum_words << '\n';
  return out.str();
}

namespace {

// Interned n-gram scorer for one reference language. Scores depend only
// on the known flags of the sentence's own grams, which is what makes the
// dirty propagation exact.
class LangEngine {
 public:
  LangEngine(const MonoText& text, const std::vector<VerseId>& candidates,
             int max_order)
      : max_order_(max_order) {
    // Frequencies come from the full text, not just the candidate slice.
    std::unordered_map<std::string, uint32_t> token_ids;
    auto intern_token = [&](const std::string& token) {
      auto [it, inserted] =
          token_ids.emplace(token, static_cast<uint32_t>(token_ids.size()));
      return it->second;
    };
    std::unordered_map<std::string, uint32_t> gram_ids;
    auto intern_gram = [&](int order, const std::vector<uint32_t>& ids,
                           size_t begin) {
      std::string key(1, static_cast<char>(order));
      key.reserve(1 + order * 4);
      for (int k = 0; k < order; ++k) {
        uint32_t v = ids[begin + k];
        key.append(reinterpret_cast<const char*>(&v), 4);
      }
      auto [it, inserted] =
          gram_ids.emplace(std::move(key), static_cast<uint32_t>(freq_.size()));
      if (inserted) freq_.push_back(0);
      return it->second;
    };

    for (const auto& [id, sentence] : text.entries) {
      std::vector<std::string> tokens = tokenize(sentence);
      std::vector<uint32_t> ids;
      ids.reserve(tokens.size());
      for (const auto& token : tokens) ids.push_back(intern_token(token));
      for (int j = 1; j <= max_order; ++j)
        for (size_t i = 0; i + j <= ids.size(); ++i)
          ++freq_[intern_gram(j, ids, i)];
    }

    known_.assign(freq_.size(), 0);
    inverted_.resize(freq_.size());
    grams_.resize(candidates.size());
    lengths_.resize(candidates.size());
    for (size_t s = 0; s < candidates.size(); ++s) {
      std::vector<std::string> tokens =
          tokenize(text.sentence(candidates[s]));
      lengths_[s] = tokens.size();
      std::vector<uint32_t> ids;
      ids.reserve(tokens.size());
      for (const auto& token : tokens) ids.push_back(token_ids.at(token));
      grams_[s].resize(max_order);
      for (int j = 1; j <= max_order; ++j) {
        auto& row = grams_[s][j - 1];
        for (size_t i = 0; i + j <= ids.size(); ++i)
          row.push_back(intern_gram(j, ids, i));
      }
      std::vector<uint32_t> unique;
      for (const auto& row : grams_[s])
        unique.insert(unique.end(), row.begin(), row.end());
      std::sort(unique.begin(), unique.end());
      unique.erase(std::unique(unique.begin(), unique.end()), unique.end());
      for (uint32_t gid : unique) inverted_[gid].push_back(
          static_cast<uint32_t>(s));
    }
  }

  // Same summation order as the public scorers: order-major, position-minor.
  double score(size_t sent, bool normalize, int J, uint64_t* queries) const {
    double total = 0.0;
    uint64_t q = 0;
    for (int j = 1; j <= J; ++j) {
      for (uint32_t gid : grams_[sent][j - 1]) {
        ++q;
        if (!known_[gid]) total += static_cast<double>(freq_[gid]);
      }
    }
    *queries += q;
    if (!normalize) return total;
    return total / static_cast<double>(lengths_[sent]);
  }

  // Marks the sentence's grams known; appends sentences that share a
  // newly-known gram to `dirty`.
  void absorb(size_t sent, std::vector<uint32_t>* dirty) {
    std::vector<uint32_t> unique;
    for (const auto& row : grams_[sent])
      unique.insert(unique.end(), row.begin(), row.end());
    std::sort(unique.begin(), unique.end());
    unique.erase(std::unique(unique.begin(), unique.end()), unique.end());
    for (uint32_t gid : unique) {
      if (known_[gid]) continue;
      known_[gid] = 1;
      dirty->insert(dirty->end(), inverted_[gid].begin(),
                    inverted_[gid].end());
    }
  }

  size_t sentence_length(size_t sent) const { return lengths_[sent]; }

 private:
  int max_order_;
  std::vector<uint64_t> freq_;
  std::vector<char> known_;
  std::vector<std::vector<uint32_t>> inverted_;
  std::vector<std::vector<std::vector<uint32_t>>> grams_;  // [sent][j-1][pos]
  std::vector<size_t> lengths_;
};

struct Logger {
  SeedCorpus seed;
  const std::vector<VerseId>* candidates;
  const std::vector<uint64_t>* words;

  void log(size_t idx, double score) {
    SeedStep step;
    step.id = (*candidates)[idx];
    step.score = score;
    step.words = (*words)[idx];
    step.cum_words = seed.total_words() + step.words;
    seed.steps.push_back(step);
  }
  bool budget_reached() const {
    return seed.total_words() >= seed.budget.word_count;
  }
};

}  // namespace

SeedCorpus greedy_select(const VerseAlignedCorpus& corpus,
                         const std::vector<std::string>& reference_languages,
                         const Method& method, const SelectOptions& options) {
  if (options.budget.word_count == 0)
    throw DataError("selection needs a positive word budget");
  if (reference_languages.empty())
    throw DataError("selection needs at least one reference language");
  for (const auto& lang : reference_languages)
    if (!corpus.has_language(lang))
      throw DataError("unknown language: " + lang);

  // Resolve the scoring languages. agg uses a voter set; everything else
  // scores on the first reference language.
  std::vector<std::string> scorers;
  if (method.kind == Method::Kind::Agg) {
    if (method.agg_kind == VoterKind::L && options.metadata == nullptr) {
      scorers = reference_languages;
    } else {
      if (options.metadata == nullptr)
        throw DataError("agg:" + method.str() +
                        " needs a language metadata table");
      for (const auto& lang :
           voter_set(method.agg_kind, *options.metadata, method.agg_k))
        scorers.push_back(lang);
      for (const auto& lang : scorers)
        if (!corpus.has_language(lang))
          throw DataError("voter " + lang + " is not in the corpus");
    }
    std::sort(scorers.begin(), scorers.end());
  } else {
    scorers.push_back(reference_languages.front());
  }

  std::string budget_lang = options.budget_language.empty()
                                ? reference_languages.front()
                                : options.budget_language;
  if (!corpus.has_language(budget_lang))
    throw DataError("unknown budget language: " + budget_lang);

  // Candidate pool: verses covered by every scoring language (and the
  // budget language, which pays for them).
  std::vector<VerseId> candidates;
  {
    std::vector<std::string> involved = scorers;
    involved.push_back(budget_lang);
    VerseAlignedCorpus pool = restrict(corpus, involved, true);
    for (const auto& id : pool.shared_ids()) candidates.push_back(id);
  }
  if (method.kind == Method::Kind::Excerpt) {
    std::vector<VerseId> book_verses;
    for (const auto& id : candidates)
      if (id.book() == method.book) book_verses.push_back(id);
    if (book_verses.empty())
      throw DataError("book \"" + method.book +
                      "\" has no verses in the candidate pool");
    candidates = std::move(book_verses);
  }
  if (candidates.empty()) throw DataError("no candidate verses to select from");

  const MonoText& budget_text = corpus.text(budget_lang);
  std::vector<uint64_t> words(candidates.size());
  uint64_t min_words = UINT64_MAX;
  for (size_t i = 0; i < candidates.size(); ++i) {
    words[i] = count_tokens(budget_text.sentence(candidates[i]));
    min_words = std::min(min_words, words[i]);
  }
  if (options.budget.word_count < min_words)
    throw DataError("budget of " + std::to_string(options.budget.word_count) +
                    " words is smaller than every candidate sentence");

  Logger logger;
  logger.seed.method = method.str();
  logger.seed.budget = options.budget;
  logger.seed.budget_language = budget_lang;
  logger.candidates = &candidates;
  logger.words = &words;

  const size_t n = candidates.size();
  std::vector<char> alive(n, 1);

  auto exhaust_warning = [&]() {
    warn("corpus exhausted before reaching the budget of " +
         std::to_string(options.budget.word_count) + " words");
  };

  if (method.kind == Method::Kind::Rand) {
    std::vector<uint32_t> order(n);
    std::iota(order.begin(), order.end(), 0u);
    std::mt19937_64 rng(options.rng_seed);
    for (size_t i = n; i > 1; --i) {
      size_t j = static_cast<size_t>(bounded_draw(rng, i));
      std::swap(order[i - 1], order[j]);
    }
    for (uint32_t idx : order) {
      logger.log(idx, 0.0);
      if (logger.budget_reached()) break;
    }
    if (!logger.budget_reached()) exhaust_warning();
    return std::move(logger.seed);
  }

  if (method.kind == Method::Kind::Excerpt) {
    for (size_t idx = 0; idx < n; ++idx) {
      logger.log(idx, 0.0);
      if (logger.budget_reached()) break;
    }
    if (!logger.budget_reached()) exhaust_warning();
    return std::move(logger.seed);
  }

  const int J = method.kind == Method::Kind::SNG ||
                        method.kind == Method::Kind::Agg
                    ? method.J
                    : 1;
  // ent's warm start ranks by plain score_s, like s itself.
  const bool normalize =
      method.kind != Method::Kind::S && method.kind != Method::Kind::Ent;

  // One engine per scoring language.
  std::vector<LangEngine> engines;
  engines.reserve(scorers.size());
  for (const auto& lang : scorers)
    engines.emplace_back(corpus.text(lang), candidates, J);

  std::vector<std::vector<double>> cell(scorers.size(),
                                        std::vector<double>(n, 0.0));
  std::vector<double> combined(n, 0.0);
  uint64_t freq_queries = 0;

  auto rescore = [&](const std::vector<uint32_t>* only,
                     std::vector<char>* touched) {
    for (size_t v = 0; v < engines.size(); ++v) {
      const int64_t limit = only ? static_cast<int64_t>(only->size())
                                 : static_cast<int64_t>(n);
      uint64_t queries = 0;
#pragma omp parallel for schedule(static) reduction(+ : queries)
      for (int64_t k = 0; k < limit; ++k) {
        size_t s = only ? (*only)[k] : static_cast<size_t>(k);
        if (!alive[s]) continue;
        cell[v][s] = engines[v].score(s, normalize, J, &queries);
        if (touched) (*touched)[s] = 1;
      }
      freq_queries += queries;
    }
  };

  auto recombine = [&](const std::vector<char>* touched) {
    for (size_t s = 0; s < n; ++s) {
      if (!alive[s]) continue;
      if (touched && !(*touched)[s]) continue;
      double sum = 0.0;
      for (size_t v = 0; v < engines.size(); ++v) sum += cell[v][s];
      combined[s] = sum;
    }
  };

  // ent keeps the engine for its score_s warm start, then rescans fully
  // each step because the half models are refit; the memoize flag cannot
  // help there and is ignored.
  const bool use_ent = method.kind == Method::Kind::Ent;

  rescore(nullptr, nullptr);
  recombine(nullptr);

  std::vector<std::string> chosen_sentences;
  const MonoText& ent_text = use_ent ? corpus.text(scorers.front())
                                     : budget_text;

  while (true) {
    bool warm = !use_ent || logger.seed.steps.size() < 5;
    if (use_ent && !warm) {
      // Alternating-parity split of the remaining candidates.
      std::vector<std::string> left, right;
      std::vector<size_t> alive_idx;
      for (size_t s = 0; s < n; ++s)
        if (alive[s]) alive_idx.push_back(s);
      for (size_t k = 0; k < alive_idx.size(); ++k)
        (k % 2 == 0 ? left : right)
            .push_back(ent_text.sentence(candidates[alive_idx[k]]));
      if (left.empty() || right.empty()) {
        warn("too few candidates to split for ent; falling back to score_s");
        warm = true;
        rescore(nullptr, nullptr);
        recombine(nullptr);
      } else {
        NGramLM lm_chosen = NGramLM::fit(chosen_sentences,
                                         method.ent_chosen_order,
                                         options.lm_epsilon);
        NGramLM lm_left = NGramLM::fit(left, 2, options.lm_epsilon);
        NGramLM lm_right = NGramLM::fit(right, 2, options.lm_epsilon);
        const int64_t m = static_cast<int64_t>(alive_idx.size());
#pragma omp parallel for schedule(dynamic, 16)
        for (int64_t k = 0; k < m; ++k) {
          size_t s = alive_idx[k];
          std::vector<std::string> tokens =
              tokenize(ent_text.sentence(candidates[s]));
          combined[s] = score_ent(tokens, lm_chosen, lm_left, lm_right,
                                  k % 2 == 0 ? Membership::Left
                                             : Membership::Right);
        }
      }
    }

    // Argmax over alive candidates; ties fall to the smaller VerseId,
    // which is the smaller index because candidates are sorted.
    int64_t best = -1;
    for (size_t s = 0; s < n; ++s) {
      if (!alive[s]) continue;
      if (best < 0 || combined[s] > combined[best]) best =
          static_cast<int64_t>(s);
    }
    if (best < 0) {
      exhaust_warning();
      break;
    }

    logger.log(static_cast<size_t>(best), combined[best]);
    alive[best] = 0;
    if (use_ent)
      chosen_sentences.push_back(ent_text.sentence(candidates[best]));

    std::vector<uint32_t> dirty;
    for (auto& engine : engines) engine.absorb(static_cast<size_t>(best),
                                               &dirty);
    if (logger.budget_reached()) break;

    if (!use_ent || logger.seed.steps.size() < 5) {
      if (options.memoize) {
        std::sort(dirty.begin(), dirty.end());
        dirty.erase(std::unique(dirty.begin(), dirty.end()), dirty.end());
        std::vector<char> touched(n, 0);
        rescore(&dirty, &touched);
        recombine(&touched);
      } else {
        rescore(nullptr, nullptr);
        recombine(nullptr);
      }
    }
  }

  logger.seed.freq_queries = freq_queries;
  return std::move(logger.seed);
}

SeedCorpus transfer_ranking(const SeedCorpus& seed,
                            const VerseAlignedCorpus& target,
                            const std::string& target_language) {
  const MonoText& text = target.text(target_language);
  SeedCorpus out;
  out.method = seed.method;
  out.budget = seed.budget;
  out.budget_language = target_language;
  for (const auto& step : seed.steps) {
    if (!text.covers(step.id)) {
      warn("verse " + step.id.str() + " not covered by " + target_language +
           "; dropped from the transferred ranking");
      continue;
    }
    SeedStep moved;
    moved.id = step.id;
    moved.score = step.score;
    moved.words = count_tokens(text.sentence(step.id));
    moved.cum_words = out.total_words() + moved.words;
    out.steps.push_back(moved);
    if (out.total_words() >= out.budget.word_count) break;
  }
  return out;
}

std::vector<std::string> replicate_to_match(
    const std::vector<std::string>& seed_sentences, size_t target_line_count) {
  if (seed_sentences.empty()) throw DataError("cannot replicate an empty seed");
  if (target_line_count < seed_sentences.size())
    throw DataError("target line count is smaller than the seed");
  std::vector<std::string> out;
  out.reserve(target_line_count);
  size_t full = target_line_count / seed_sentences.size();
  size_t remainder = target_line_count % seed_sentences.size();
  for (size_t r = 0; r < full; ++r)
    out.insert(out.end(), seed_sentences.begin(), seed_sentences.end());
  out.insert(out.end(), seed_sentences.begin(),
             seed_sentences.begin() + remainder);
  return out;
}

}  // namespace versekit
