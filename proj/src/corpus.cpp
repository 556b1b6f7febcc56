#include "versekit/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace fs = std::filesystem;

namespace versekit {

namespace {

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open file: " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
  }
  return lines;
}

void insert_entry(MonoText& text, const std::string& path, size_t line_no,
                  std::string id_str, std::string sentence) {
  // Trim check only; the stored sentence stays verbatim.
  if (count_tokens(sentence) == 0)
    throw DataError(path + ":" + std::to_string(line_no) +
                    ": empty sentence for id \"" + id_str + "\"");
  VerseId id(std::move(id_str));
  auto [it, inserted] = text.entries.emplace(std::move(id), std::move(sentence));
  if (!inserted)
    throw DataError(path + ":" + std::to_string(line_no) +
                    ": duplicate verse id \"" + it->first.str() + "\" in " +
                    text.language);
}

MonoText load_tsv(const std::string& code, const std::string& path) {
  MonoText text;
  text.language = code;
  auto lines = read_lines(path);
  for (size_t i = 0; i < lines.size(); ++i) {
    const std::string& line = lines[i];
    if (line.empty()) continue;
    size_t tab = line.find('\t');
    if (tab == std::string::npos || tab == 0)
      throw DataError(path + ":" + std::to_string(i + 1) +
                      ": malformed line, expected verse_id<TAB>sentence");
    decode_utf8(line);  // validate encoding
    insert_entry(text, path, i + 1, line.substr(0, tab), line.substr(tab + 1));
  }
  return text;
}

MonoText load_lines(const std::string& code, const std::string& path) {
  MonoText text;
  text.language = code;
  std::string id_path = path + ".ids";
  auto sentences = read_lines(path);
  auto ids = read_lines(id_path);
  if (sentences.size() != ids.size())
    throw DataError(path + ": " + std::to_string(sentences.size()) +
                    " sentences but " + std::to_string(ids.size()) +
                    " ids in " + id_path);
  for (size_t i = 0; i < sentences.size(); ++i) {
    decode_utf8(sentences[i]);
    insert_entry(text, path, i + 1, ids[i], sentences[i]);
  }
  return text;
}

}  // namespace

const std::string& MonoText::sentence(const VerseId& id) const {
  auto it = entries.find(id);
  if (it == entries.end())
    throw DataError("verse \"" + id.str() + "\" not covered by " + language);
  return it->second;
}

std::set<VerseId> MonoText::coverage() const {
  std::set<VerseId> ids;
  for (const auto& [id, _] : entries) ids.insert(id);
  return ids;
}

const MonoText& VerseAlignedCorpus::text(const std::string& language) const {
  auto it = texts.find(language);
  if (it == texts.end()) throw DataError("unknown language: " + language);
  return it->second;
}

std::set<VerseId> VerseAlignedCorpus::all_ids() const {
  std::set<VerseId> ids;
  for (const auto& [_, text] : texts)
    for (const auto& [id, __] : text.entries) ids.insert(id);
  return ids;
}

std::set<VerseId> VerseAlignedCorpus::shared_ids() const {
  std::set<VerseId> ids = all_ids();
  for (const auto& [_, text] : texts) {
    for (auto it = ids.begin(); it != ids.end();) {
      if (!text.covers(*it))
        it = ids.erase(it);
      else
        ++it;
    }
  }
  return ids;
}

VerseAlignedCorpus load_corpus(const std::vector<LangFile>& files,
                               CorpusFormat format) {
  VerseAlignedCorpus corpus;
  for (const auto& file : files) {
    if (corpus.texts.count(file.code))
      throw DataError("language listed twice: " + file.code);
    MonoText text = format == CorpusFormat::Tsv
                        ? load_tsv(file.code, file.path)
                        : load_lines(file.code, file.path);
    corpus.languages.push_back(file.code);
    corpus.texts.emplace(file.code, std::move(text));
  }
  return corpus;
}

VerseAlignedCorpus load_manifest(const std::string& manifest_path) {
  auto lines = read_lines(manifest_path);
  fs::path base = fs::path(manifest_path).parent_path();
  std::vector<LangFile> files;
  std::vector<uint64_t> expected_lines;
  for (size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    nlohmann::json record;
    try {
      record = nlohmann::json::parse(lines[i]);
    } catch (const nlohmann::json::exception& e) {
      throw DataError(manifest_path + ":" + std::to_string(i + 1) + ": " +
                      e.what());
    }
    if (!record.contains("code") || !record.contains("path"))
      throw DataError(manifest_path + ":" + std::to_string(i + 1) +
                      ": record needs \"code\" and \"path\"");
    fs::path p = record["path"].get<std::string>();
    if (p.is_relative()) p = base / p;
    files.push_back({record["code"].get<std::string>(), p.string()});
    expected_lines.push_back(
        record.contains("lines") ? record["lines"].get<uint64_t>() : 0);
  }
  VerseAlignedCorpus corpus = load_corpus(files, CorpusFormat::Tsv);
  for (size_t i = 0; i < files.size(); ++i) {
    if (expected_lines[i] == 0) continue;
    uint64_t actual = corpus.text(files[i].code).entries.size();
    if (actual != expected_lines[i])
      throw DataError("manifest says " + std::to_string(expected_lines[i]) +
                      " lines for " + files[i].code + " but file has " +
                      std::to_string(actual));
  }
  return corpus;
}

void save_corpus(const VerseAlignedCorpus& corpus,
                 const std::string& directory) {
  fs::create_directories(directory);
  std::ofstream manifest(fs::path(directory) / "manifest.jsonl",
                         std::ios::binary);
  for (const std::string& lang : corpus.languages) {
    const MonoText& text = corpus.text(lang);
    std::string filename = lang + ".tsv";
    std::ofstream out(fs::path(directory) / filename, std::ios::binary);
    for (const auto& [id, sentence] : text.entries)
      out << id.str() << '\t' << sentence << '\n';
    nlohmann::json record = {{"code", lang},
                             {"path", filename},
                             {"lines", text.entries.size()}};
    manifest << record.dump() << '\n';
  }
}

VerseAlignedCorpus restrict(const VerseAlignedCorpus& corpus,
                            const std::vector<std::string>& languages,
                            bool require_full) {
  for (const auto& lang : languages)
    if (!corpus.has_language(lang))
      throw DataError("unknown language: " + lang);

  std::set<VerseId> keep;
  if (require_full) {
    bool first = true;
    for (const auto& lang : languages) {
      const MonoText& text = corpus.text(lang);
      if (first) {
        keep = text.coverage();
        first = false;
      } else {
        std::set<VerseId> next;
        for (const auto& id : keep)
          if (text.covers(id)) next.insert(id);
        keep = std::move(next);
      }
    }
  }

  VerseAlignedCorpus out;
  for (const auto& lang : languages) {
    const MonoText& text = corpus.text(lang);
    MonoText slice;
    slice.language = lang;
    if (require_full) {
      for (const auto& id : keep) slice.entries.emplace(id, text.sentence(id));
    } else {
      slice.entries = text.entries;
    }
    out.languages.push_back(lang);
    out.texts.emplace(lang, std::move(slice));
  }
  return out;
}

uint64_t word_count(const VerseAlignedCorpus& corpus,
                    const std::string& language,
                    const std::set<VerseId>& ids) {
  const MonoText& text = corpus.text(language);
  uint64_t total = 0;
  for (const auto& id : ids) total += count_tokens(text.sentence(id));
  return total;
}

WordBudget reference_budget(const VerseAlignedCorpus& corpus,
                            const std::string& language,
                            const std::string& book) {
  const MonoText& text = corpus.text(language);
  uint64_t total = 0;
  bool seen = false;
  for (const auto& [id, sentence] : text.entries) {
    if (id.book() == book) {
      total += count_tokens(sentence);
      seen = true;
    }
  }
  if (!seen)
    throw DataError("book \"" + book + "\" absent from " + language);
  WordBudget budget;
  budget.word_count = total;
  budget.reference = {{language, book}};
  return budget;
}

std::set<VerseId> intersection_test_set(
    const std::set<VerseId>& all_ids,
    const std::vector<std::set<VerseId>>& seed_sets) {
  std::set<VerseId> result = all_ids;
  for (const auto& seed : seed_sets) {
    for (const auto& id : seed) {
      if (!all_ids.count(id))
        throw DataError("seed id \"" + id.str() +
                        "\" is not part of the corpus");
      result.erase(id);
    }
  }
  if (result.empty())
    warn("intersection test set is empty: the seed sets cover the corpus");
  return result;
}

SplitSpec build_splits(const VerseAlignedCorpus& corpus,
                       const std::vector<VerseId>& seed_ids,
                       double valid_fraction) {
  if (seed_ids.empty()) throw DataError("seed is empty");
  if (!(valid_fraction > 0.0 && valid_fraction < 1.0))
    throw DataError("valid_fraction must be in (0,1)");
  size_t valid_count = static_cast<size_t>(
      std::llround(valid_fraction * static_cast<double>(seed_ids.size())));
  if (valid_count == 0)
    throw DataError("validation split would be empty for " +
                    std::to_string(seed_ids.size()) + " seed ids at fraction " +
                    format_double(valid_fraction));
  if (valid_count >= seed_ids.size())
    throw DataError("validation split would swallow the whole seed");

  SplitSpec spec;
  size_t train_count = seed_ids.size() - valid_count;
  for (size_t i = 0; i < seed_ids.size(); ++i)
    (i < train_count ? spec.train : spec.valid).insert(seed_ids[i]);

  for (const auto& id : corpus.all_ids())
    if (!spec.train.count(id) && !spec.valid.count(id)) spec.test.insert(id);
  if (spec.test.empty())
    warn("seed covers the whole corpus: test split is empty");
  return spec;
}

}  // namespace versekit
