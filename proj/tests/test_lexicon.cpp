#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "versekit/lexicon.hpp"

using namespace versekit;
namespace fs = std::filesystem;

namespace {

LexiconTable story_table() {
  return LexiconTable::from_rows(
      {"en", "de", "zh"},
      {
          {"fatma", {"Fatma", "Fatma", "法特玛"}},
          {"wati", {"Wati", "Wati", "瓦蒂"}},
          {"yi", {"Yi", "Yi", "依"}},
          {"andika", {"Andika", "Andika", "安迪卡"}},
          {"jesus", {"Jesus", "Jesus", ""}},
          {"newyork", {"New York", "New York", ""}},
      });
}

std::string write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
  return path.string();
}

}  // namespace

TEST_CASE("lexicon load and lookup") {
  auto dir = fs::temp_directory_path() / "versekit_lexicon";
  fs::create_directories(dir);
  auto path = write_file(dir / "lex.tsv",
                         "entity_id\ten\tde\tsv\n"
                         "e1\tJoseph\tJoseph\tJosef\n"
                         "e2\tPeter\tPetrus\tPetrus\n"
                         "e3\tZion\tZion\t\n");
  auto table = LexiconTable::load(path);
  CHECK(table.entity_count() == 3);
  CHECK(*table.entity_of("Josef", "sv") == "e1");
  CHECK(*table.surface("e2", "de") == "Petrus");
  CHECK_FALSE(table.surface("e3", "sv").has_value());
}

TEST_CASE("duplicate surface in one language names both entities") {
  CHECK_THROWS_WITH_AS(
      LexiconTable::from_rows({"en"}, {{"e1", {"Zion"}}, {"e2", {"Zion"}}}),
      doctest::Contains("e1"), DataError);
}

TEST_CASE("masking the four-name example") {
  auto table = story_table();
  auto [masked, decode] = mask(
      "Fatma asks her sister Wati to call Yi, the brother of Andika", "en",
      table);
  CHECK(masked.text ==
        "__NE0 asks her sister __NE1 to call __NE2, the brother of __NE3");
  CHECK(masked.slots ==
        std::vector<std::string>{"fatma", "wati", "yi", "andika"});
  CHECK(decode.entries.at(2) == "Yi");
}

TEST_CASE("sentence without entities is unchanged") {
  auto table = story_table();
  auto [masked, decode] = mask("nothing to see here", "en", table);
  CHECK(masked.text == "nothing to see here");
  CHECK(masked.slots.empty());
  CHECK(decode.entries.empty());
}

TEST_CASE("fuzzy masking catches small edit distances on long tokens") {
  auto table = story_table();
  MaskOptions options;
  options.fuzzy_max_edit = 1;
  auto [masked, _] = mask("Jesús spoke", "en", table, options);
  CHECK(masked.text == "__NE0 spoke");
  CHECK(masked.slots == std::vector<std::string>{"jesus"});

  // Short tokens never fuzzy-match.
  auto [short_masked, __] = mask("Yii spoke", "en", table, options);
  CHECK(short_masked.text == "Yii spoke");

  MaskOptions off;
  off.fuzzy_max_edit = 0;
  auto [exact_only, ___] = mask("Jesús spoke", "en", table, off);
  CHECK(exact_only.text == "Jesús spoke");
}

TEST_CASE("multi-word entities match longest-first") {
  auto table = story_table();
  auto [masked, decode] = mask("they reached New York, at dawn", "en", table);
  CHECK(masked.text == "they reached __NE0, at dawn");
  CHECK(decode.entries.at(0) == "New York");
}

TEST_CASE("repeated mentions of one entity share the first index") {
  auto table = story_table();
  auto [masked, _] = mask("Wati called Yi and Yi answered Wati", "en", table);
  CHECK(masked.text == "__NE0 called __NE1 and __NE1 answered __NE0");
  CHECK(masked.slots == std::vector<std::string>{"wati", "yi"});
}

TEST_CASE("decode table prefers the target surface and falls back to source") {
  auto table = story_table();
  auto [masked, _] =
      mask("Fatma asks her sister Wati to call Yi, the brother of Andika",
           "en", table);
  auto german = build_decode_table(masked, "de", table);
  CHECK(german.entries.at(0) == "Fatma");
  CHECK(unmask("__NE0 bittet ihre Schwester __NE1", german) ==
        "Fatma bittet ihre Schwester Wati");

  int warned = 0;
  auto previous = set_warn_sink([&](const std::string&) { ++warned; });
  auto [jm, __] = mask("Jesus and New York", "en", table);
  auto chinese = build_decode_table(jm, "zh", table);
  set_warn_sink(previous);
  CHECK(warned == 2);  // jesus and newyork have no zh surface
  CHECK(chinese.entries.at(0) == "Jesus");
  CHECK(chinese.entries.at(1) == "New York");
}

TEST_CASE("unmask errors on unknown placeholders and keeps other text") {
  DecodeTable decode;
  decode.entries[0] = "Fatma";
  CHECK(unmask("no placeholders at all", decode) == "no placeholders at all");
  CHECK(unmask("__NE0!", decode) == "Fatma!");
  CHECK_THROWS_WITH_AS(unmask("__NE7 speaks", decode), doctest::Contains("7"),
                       DataError);
}

TEST_CASE("mask-unmask round trip with the source decode table") {
  auto table = story_table();
  const std::string sentences[] = {
      "Fatma asks her sister Wati to call Yi, the brother of Andika",
      "then \"Wati\" (the sister) spoke to Yi...",
      "New York, said Andika; New York!",
      "plain text with no names at all",
  };
  for (const auto& sentence : sentences) {
    CAPTURE(sentence);
    auto [masked, decode] = mask(sentence, "en", table);
    CHECK(unmask(masked.text, decode) == sentence);
  }
}

TEST_CASE("round trip holds on generated sentences") {
  auto table = story_table();
  std::mt19937_64 rng(123);
  const std::vector<std::string> names = {"Fatma", "Wati", "Yi",
                                          "Andika", "New York"};
  const std::vector<std::string> fillers = {"and", "then", "speaks", "with",
                                            "the", "friend", "of"};
  const std::vector<std::string> puncts = {"", ",", ".", "!", ";"};
  for (int round = 0; round < 300; ++round) {
    std::string sentence;
    size_t words = 3 + rng() % 10;
    std::string used_name;
    for (size_t w = 0; w < words; ++w) {
      if (!sentence.empty()) sentence += ' ';
      if (rng() % 3 == 0) {
        // Repeat mentions verbatim so the shared slot index round-trips.
        if (used_name.empty() || rng() % 2 == 0)
          used_name = names[rng() % names.size()];
        sentence += used_name;
      } else {
        sentence += fillers[rng() % fillers.size()];
      }
      sentence += puncts[rng() % puncts.size()];
    }
    CAPTURE(sentence);
    auto [masked, decode] = mask(sentence, "en", table);
    CHECK(unmask(masked.text, decode) == sentence);
  }
}

TEST_CASE("placeholders are consecutive from zero in appearance order") {
  auto table = story_table();
  auto [masked, _] =
      mask("Andika saw Fatma before Wati met Yi", "en", table);
  for (size_t k = 0; k < masked.slots.size(); ++k) {
    std::string marker = "__NE" + std::to_string(k);
    size_t pos = masked.text.find(marker);
    REQUIRE(pos != std::string::npos);
    // Each later marker appears after the previous one.
    if (k > 0)
      CHECK(masked.text.find("__NE" + std::to_string(k - 1)) < pos);
  }
}

TEST_CASE("masking is idempotent") {
  auto table = story_table();
  MaskOptions options;
  options.fuzzy_max_edit = 1;
  const std::string sentence = "Fatma met Wati and Andika in New York.";
  auto [first, _] = mask(sentence, "en", table, options);
  auto [second, __] = mask(first.text, "en", table, options);
  CHECK(second.slots.empty());
  CHECK(second.text == first.text);
}

TEST_CASE("case folding is opt-in") {
  auto table = story_table();
  auto [plain, _] = mask("FATMA speaks", "en", table);
  CHECK(plain.slots.empty());
  MaskOptions options;
  options.case_fold = true;
  auto [folded, __] = mask("FATMA speaks", "en", table, options);
  CHECK(folded.text == "__NE0 speaks");
}

TEST_CASE("audit reports missing and duplicated placeholders") {
  auto table = story_table();
  auto [masked, _] =
      mask("Fatma asks her sister Wati to call Yi, the brother of Andika",
           "en", table);
  CHECK(audit_mask_coverage(masked, "__NE0 x __NE1 y __NE2 z __NE3").clean());

  auto missing = audit_mask_coverage(masked, "__NE0 x __NE1 y __NE3");
  CHECK(missing.missing == std::vector<int>{2});
  CHECK(missing.duplicated.empty());

  auto duplicated =
      audit_mask_coverage(masked, "__NE0 a __NE0 b __NE1 __NE2 __NE3");
  CHECK(duplicated.duplicated == std::vector<int>{0});
}
