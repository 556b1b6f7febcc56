#include "versekit/lexicon.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace versekit {

namespace {

bool is_punct_cp(char32_t c) {
  static const std::u32string kPunct =
      U".,;:!?\"'()[]{}<>/\\|@#$%^&*_~`«»“”‘’„‚…¿¡—–-"
      U"。、，；：！？『』「」（）《》";
  return kPunct.find(c) != std::u32string::npos;
}

struct Token {
  std::string ws_before;  // whitespace preceding the token, verbatim
  std::u32string prefix;  // leading punctuation
  std::u32string core;
  std::u32string suffix;  // trailing punctuation
};

bool is_space_cp(char32_t c) {
  return c == U' ' || c == U'\t' || c == U'\n' || c == U'\r' || c == U'\v' ||
         c == U'\f' || c == U' ' || c == U' ' || c == U' ' ||
         c == U' ' || c == U' ' || c == U'　' ||
         c == U' ' || (c >= U' ' && c <= U' ');
}

std::vector<Token> split_tokens(std::string_view sentence,
                                std::string* trailing_ws) {
  std::u32string points = decode_utf8(sentence);
  std::vector<Token> tokens;
  std::u32string ws, raw;
  auto flush = [&]() {
    if (raw.empty()) return;
    Token token;
    token.ws_before = encode_utf8(ws);
    ws.clear();
    size_t begin = 0, end = raw.size();
    while (begin < end && is_punct_cp(raw[begin])) ++begin;
    while (end > begin && is_punct_cp(raw[end - 1])) --end;
    token.prefix = raw.substr(0, begin);
    token.core = raw.substr(begin, end - begin);
    token.suffix = raw.substr(end);
    tokens.push_back(std::move(token));
    raw.clear();
  };
  for (char32_t c : points) {
    if (is_space_cp(c)) {
      flush();
      ws.push_back(c);
    } else {
      raw.push_back(c);
    }
  }
  flush();
  *trailing_ws = encode_utf8(ws);
  return tokens;
}

char32_t fold_cp(char32_t c) {
  if (c >= U'A' && c <= U'Z') return c + 32;
  if (c >= U'À' && c <= U'Þ' && c != U'×') return c + 32;
  return c;
}

std::u32string fold(const std::u32string& s) {
  std::u32string out = s;
  for (char32_t& c : out) c = fold_cp(c);
  return out;
}

}  // namespace

LexiconTable LexiconTable::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open lexicon: " + path);
  std::string line;
  if (!std::getline(in, line))
    throw DataError("lexicon is empty: " + path);
  if (!line.empty() && line.back() == '\r') line.pop_back();

  std::vector<std::string> header;
  std::istringstream hs(line);
  std::string cell;
  while (std::getline(hs, cell, '\t')) header.push_back(cell);
  if (header.size() < 2 || header[0] != "entity_id")
    throw DataError(path + ": header must be entity_id<TAB>lang1<TAB>...");

  std::vector<std::string> languages(header.begin() + 1, header.end());
  std::vector<std::pair<std::string, std::vector<std::string>>> rows;
  size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells;
    size_t start = 0;
    while (true) {
      size_t tab = line.find('\t', start);
      cells.push_back(line.substr(start, tab - start));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    if (cells.size() > languages.size() + 1)
      throw DataError(path + ":" + std::to_string(line_no) +
                      ": more cells than header columns");
    cells.resize(languages.size() + 1);
    rows.emplace_back(cells[0],
                      std::vector<std::string>(cells.begin() + 1, cells.end()));
  }
  return from_rows(languages, rows);
}

LexiconTable LexiconTable::from_rows(
    const std::vector<std::string>& languages,
    const std::vector<std::pair<std::string, std::vector<std::string>>>&
        rows) {
  LexiconTable table;
  table.languages_ = languages;
  for (const auto& [entity_id, cells] : rows) {
    if (entity_id.empty()) throw DataError("lexicon row with empty entity id");
    if (table.entities_.count(entity_id))
      throw DataError("duplicate entity id: " + entity_id);
    auto& per_lang = table.entities_[entity_id];
    for (size_t i = 0; i < languages.size() && i < cells.size(); ++i) {
      if (cells[i].empty()) continue;
      per_lang[languages[i]] = cells[i];
      table.index_surface(languages[i], cells[i], entity_id);
    }
  }
  // Longest-first match order: word count, then code point length.
  for (auto& [lang, surfaces] : table.by_length_) {
    std::stable_sort(surfaces.begin(), surfaces.end(),
                     [](const auto& a, const auto& b) {
                       size_t aw = count_tokens(a.first);
                       size_t bw = count_tokens(b.first);
                       if (aw != bw) return aw > bw;
                       size_t ac = decode_utf8(a.first).size();
                       size_t bc = decode_utf8(b.first).size();
                       if (ac != bc) return ac > bc;
                       return a.first < b.first;
                     });
  }
  return table;
}

void LexiconTable::index_surface(const std::string& language,
                                 const std::string& surface,
                                 const std::string& entity_id) {
  auto [it, inserted] = index_[language].emplace(surface, entity_id);
  if (!inserted)
    throw DataError("duplicate surface \"" + surface + "\" in " + language +
                    " for entities " + it->second + " and " + entity_id);
  by_length_[language].emplace_back(surface, entity_id);
}

bool LexiconTable::has_language(const std::string& language) const {
  return std::find(languages_.begin(), languages_.end(), language) !=
         languages_.end();
}

std::optional<std::string> LexiconTable::surface(
    const std::string& entity_id, const std::string& language) const {
  auto it = entities_.find(entity_id);
  if (it == entities_.end()) return std::nullopt;
  auto lang_it = it->second.find(language);
  if (lang_it == it->second.end()) return std::nullopt;
  return lang_it->second;
}

std::optional<std::string> LexiconTable::entity_of(
    const std::string& surface, const std::string& language) const {
  auto it = index_.find(language);
  if (it == index_.end()) return std::nullopt;
  auto surface_it = it->second.find(surface);
  if (surface_it == it->second.end()) return std::nullopt;
  return surface_it->second;
}

const std::vector<std::pair<std::string, std::string>>& LexiconTable::surfaces(
    const std::string& language) const {
  static const std::vector<std::pair<std::string, std::string>> kEmpty;
  auto it = by_length_.find(language);
  return it == by_length_.end() ? kEmpty : it->second;
}

std::pair<MaskedSentence, DecodeTable> mask(std::string_view sentence,
                                            const std::string& language,
                                            const LexiconTable& table,
                                            const MaskOptions& options) {
  if (!table.has_language(language))
    throw DataError("language not in lexicon: " + language);

  std::string trailing_ws;
  std::vector<Token> tokens = split_tokens(sentence, &trailing_ws);
  const auto& surfaces = table.surfaces(language);

  struct SurfaceWords {
    std::vector<std::u32string> words;
    const std::string* entity;
  };
  std::vector<SurfaceWords> candidates;
  candidates.reserve(surfaces.size());
  for (const auto& [surface, entity] : surfaces) {
    SurfaceWords sw;
    for (const auto& word : tokenize(surface))
      sw.words.push_back(decode_utf8(word));
    sw.entity = &entity;
    candidates.push_back(std::move(sw));
  }

  MaskedSentence masked;
  std::map<std::string, int> slot_of_entity;
  std::vector<std::string> out_pieces;

  auto matches_at = [&](const SurfaceWords& sw, size_t t, bool folded) {
    if (t + sw.words.size() > tokens.size()) return false;
    for (size_t k = 0; k < sw.words.size(); ++k) {
      const Token& token = tokens[t + k];
      if (token.core.empty()) return false;
      // Interior punctuation breaks a multi-word span.
      if (k > 0 && !token.prefix.empty()) return false;
      if (k + 1 < sw.words.size() && !token.suffix.empty()) return false;
      const std::u32string& want = sw.words[k];
      if (folded ? fold(token.core) != fold(want) : token.core != want)
        return false;
    }
    return true;
  };

  size_t t = 0;
  while (t < tokens.size()) {
    const Token& token = tokens[t];
    const std::string* matched_entity = nullptr;
    size_t matched_len = 1;

    for (const auto& sw : candidates) {
      if (matches_at(sw, t, false) ||
          (options.case_fold && matches_at(sw, t, true))) {
        matched_entity = sw.entity;
        matched_len = sw.words.size();
        break;
      }
    }

    if (!matched_entity && options.fuzzy_max_edit > 0 &&
        token.core.size() >= 5 &&
        encode_utf8(token.core).rfind("__NE", 0) != 0) {
      int best_dist = options.fuzzy_max_edit + 1;
      for (const auto& sw : candidates) {
        if (sw.words.size() != 1) continue;
        int d = static_cast<int>(edit_distance(token.core, sw.words[0]));
        if (d > 0 && d < best_dist) {
          best_dist = d;
          matched_entity = sw.entity;
        }
      }
      if (best_dist > options.fuzzy_max_edit) matched_entity = nullptr;
    }

    if (matched_entity) {
      int slot;
      auto it = slot_of_entity.find(*matched_entity);
      if (it != slot_of_entity.end()) {
        slot = it->second;
      } else {
        slot = static_cast<int>(masked.slots.size());
        slot_of_entity.emplace(*matched_entity, slot);
        masked.slots.push_back(*matched_entity);
        // Matched span verbatim: core of the first token through core of
        // the last, inner whitespace preserved.
        std::u32string span = tokens[t].core;
        for (size_t k = 1; k < matched_len; ++k) {
          span += decode_utf8(tokens[t + k].ws_before);
          span += tokens[t + k].core;
        }
        masked.source_spans.push_back(encode_utf8(span));
      }
      std::string piece = tokens[t].ws_before + encode_utf8(tokens[t].prefix) +
                          "__NE" + std::to_string(slot) +
                          encode_utf8(tokens[t + matched_len - 1].suffix);
      out_pieces.push_back(std::move(piece));
      t += matched_len;
    } else {
      out_pieces.push_back(token.ws_before + encode_utf8(token.prefix) +
                           encode_utf8(token.core) +
                           encode_utf8(token.suffix));
      ++t;
    }
  }

  for (const auto& piece : out_pieces) masked.text += piece;
  masked.text += trailing_ws;

  DecodeTable source_decode;
  for (size_t i = 0; i < masked.source_spans.size(); ++i)
    source_decode.entries[static_cast<int>(i)] = masked.source_spans[i];
  return {std::move(masked), std::move(source_decode)};
}

DecodeTable build_decode_table(const MaskedSentence& masked,
                               const std::string& target_language,
                               const LexiconTable& table) {
  DecodeTable decode;
  for (size_t i = 0; i < masked.slots.size(); ++i) {
    auto surface = table.surface(masked.slots[i], target_language);
    if (surface) {
      decode.entries[static_cast<int>(i)] = *surface;
    } else {
      warn("entity " + masked.slots[i] + " has no surface in " +
           target_language + "; copying source form");
      decode.entries[static_cast<int>(i)] = masked.source_spans[i];
    }
  }
  return decode;
}

std::string unmask(std::string_view text, const DecodeTable& decode) {
  std::string out;
  size_t pos = 0;
  while (pos < text.size()) {
    size_t hit = text.find("__NE", pos);
    if (hit == std::string_view::npos) {
      out.append(text.substr(pos));
      break;
    }
    out.append(text.substr(pos, hit - pos));
    size_t digits = hit + 4;
    size_t end = digits;
    while (end < text.size() && text[end] >= '0' && text[end] <= '9') ++end;
    if (end == digits) {
      out.append("__NE");  // bare marker without an index, leave it
      pos = digits;
      continue;
    }
    int index = std::stoi(std::string(text.substr(digits, end - digits)));
    auto it = decode.entries.find(index);
    if (it == decode.entries.end())
      throw DataError("no decode entry for placeholder __NE" +
                      std::to_string(index));
    out.append(it->second);
    pos = end;
  }
  return out;
}

MaskAudit audit_mask_coverage(const MaskedSentence& source,
                              std::string_view translated_text) {
  std::map<int, int> seen;
  size_t pos = 0;
  while (pos < translated_text.size()) {
    size_t hit = translated_text.find("__NE", pos);
    if (hit == std::string_view::npos) break;
    size_t digits = hit + 4;
    size_t end = digits;
    while (end < translated_text.size() && translated_text[end] >= '0' &&
           translated_text[end] <= '9')
      ++end;
    if (end > digits)
      ++seen[std::stoi(std::string(translated_text.substr(digits, end - digits)))];
    pos = end;
  }
  MaskAudit audit;
  for (size_t i = 0; i < source.slots.size(); ++i) {
    int index = static_cast<int>(i);
    int count = seen.count(index) ? seen[index] : 0;
    if (count == 0) audit.missing.push_back(index);
    if (count > 1) audit.duplicated.push_back(index);
  }
  return audit;
}

}  // namespace versekit
