#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "support/fixtures.hpp"
#include "versekit/schedule.hpp"

using namespace versekit;

namespace {

VerseAlignedCorpus stage_corpus() {
  // Three sources plus a target; target covers only a seed-sized slice.
  auto corpus = testing::synthetic_corpus(4, 10, 81);
  return corpus;
}

std::set<VerseId> first_ids(const VerseAlignedCorpus& corpus, size_t n) {
  std::set<VerseId> ids;
  for (const auto& [id, _] : corpus.text("lang0").entries) {
    ids.insert(id);
    if (ids.size() == n) break;
  }
  return ids;
}

}  // namespace

TEST_CASE("schedule names resolve to the printed stage lists") {
  auto b = schedule_by_name("B");
  CHECK(b.stages == std::vector<StageKind>{StageKind::NSq, StageKind::N1Sq,
                                           StageKind::N1});
  auto i = schedule_by_name("I");
  CHECK(i.stages ==
        std::vector<StageKind>{StageKind::Ext, StageKind::NSq, StageKind::N1Sq,
                               StageKind::N1, StageKind::Auto});
  auto l = schedule_by_name("L");
  CHECK(l.stages ==
        std::vector<StageKind>{StageKind::Ext, StageKind::NSq,
                               StageKind::N1Sq});
  auto x = schedule_by_name("X");
  CHECK(x.stages == std::vector<StageKind>{StageKind::Ext});
  CHECK_THROWS_AS(schedule_by_name("Z"), DataError);
}

TEST_CASE("there are 24 schedules, 8 own-pretraining and 16 with ext") {
  auto schedules = all_schedules();
  CHECK(schedules.size() == 24);
  int with_ext = 0;
  for (const auto& schedule : schedules) {
    REQUIRE(!schedule.stages.empty());
    if (schedule.stages.front() == StageKind::Ext) ++with_ext;
    // Ext never appears after the first stage.
    for (size_t i = 1; i < schedule.stages.size(); ++i)
      CHECK(schedule.stages[i] != StageKind::Ext);
  }
  CHECK(with_ext == 16);
}

TEST_CASE("ext schedules mirror their ext-less counterparts") {
  // A..H map to I..P by prepending ext.
  for (char name = 'A'; name <= 'H'; ++name) {
    auto base = schedule_by_name(std::string(1, name));
    auto ext = schedule_by_name(std::string(1, static_cast<char>(name + 8)));
    REQUIRE(ext.stages.size() == base.stages.size() + 1);
    CHECK(ext.stages.front() == StageKind::Ext);
    for (size_t i = 0; i < base.stages.size(); ++i)
      CHECK(ext.stages[i + 1] == base.stages[i]);
  }
}

TEST_CASE("path counts match the printed arithmetic") {
  CHECK(path_count(PathConfig::Complete, 4) == 12);
  CHECK(path_count(PathConfig::Complete, 24) == 552);
  CHECK(path_count(PathConfig::Star, 10) == 10);
  CHECK_THROWS_AS(path_count(PathConfig::Complete, 1), DataError);
}

TEST_CASE("nsq emits all ordered source pairs over full shared text") {
  auto corpus = stage_corpus();
  Stage stage;
  stage.kind = StageKind::NSq;
  stage.sources = {"lang0", "lang1", "lang2"};
  auto records = emit_pairs(corpus, stage, {});
  CHECK(records.size() == path_count(PathConfig::Complete, 3) * 10);
  // Sorted by path tag then verse id.
  for (size_t i = 1; i < records.size(); ++i) {
    bool ordered = records[i - 1].path_tag < records[i].path_tag ||
                   (records[i - 1].path_tag == records[i].path_tag &&
                    records[i - 1].verse < records[i].verse);
    CHECK(ordered);
  }
}

TEST_CASE("n1sq and n1 restrict to seed-aligned lines") {
  auto corpus = stage_corpus();
  auto seed = first_ids(corpus, 4);

  Stage n1sq;
  n1sq.kind = StageKind::N1Sq;
  n1sq.sources = {"lang0", "lang1", "lang2"};
  n1sq.target = "lang3";
  auto full = emit_pairs(corpus, n1sq, seed);
  CHECK(full.size() == path_count(PathConfig::Complete, 4) * 4);

  Stage n1;
  n1.kind = StageKind::N1;
  n1.sources = {"lang0", "lang1", "lang2"};
  n1.target = "lang3";
  auto star = emit_pairs(corpus, n1, seed);
  CHECK(star.size() == path_count(PathConfig::Star, 3) * 4);
  for (const auto& record : star)
    CHECK(record.path_tag.substr(record.path_tag.find('-') + 1) == "lang3");

  CHECK_THROWS_AS(emit_pairs(corpus, n1, {}), DataError);
}

TEST_CASE("auto stage emits identity pairs with matching labels") {
  auto corpus = stage_corpus();
  auto seed = first_ids(corpus, 5);
  Stage stage;
  stage.kind = StageKind::Auto;
  stage.target = "lang3";
  auto records = emit_pairs(corpus, stage, seed);
  CHECK(records.size() == 5);
  for (const auto& record : records) {
    CHECK(record.path_tag == "lang3-lang3");
    CHECK(record.labeled_source.rfind("__opt_src_lang3 __opt_tgt_lang3 ", 0) ==
          0);
    // Stripping the label prefix recovers the target sentence verbatim.
    CHECK(record.labeled_source.substr(
              std::string("__opt_src_lang3 __opt_tgt_lang3 ").size()) ==
          record.target);
  }
}

TEST_CASE("label grammar matches the printed form byte for byte") {
  VerseAlignedCorpus corpus;
  MonoText fr, en;
  fr.language = "fr";
  en.language = "en";
  fr.entries.emplace(VerseId("T.1.1"), "le chat");
  en.entries.emplace(VerseId("T.1.1"), "the cat");
  corpus.languages = {"fr", "en"};
  corpus.texts.emplace("fr", fr);
  corpus.texts.emplace("en", en);

  std::map<std::string, std::string> families = {{"fr", "romance"},
                                                 {"en", "germanic"}};
  Stage stage;
  stage.kind = StageKind::N1;
  stage.sources = {"fr"};
  stage.target = "en";
  LabelOptions options;
  options.family_labels = true;
  options.families = &families;
  std::set<VerseId> seed = {VerseId("T.1.1")};
  auto records = emit_pairs(corpus, stage, seed, options);
  REQUIRE(records.size() == 1);
  CHECK(records[0].labeled_source ==
        "__opt_family_src_romance __opt_family_tgt_germanic "
        "__opt_src_fr __opt_tgt_en le chat");

  LabelOptions plain;
  auto bare = emit_pairs(corpus, stage, seed, plain);
  CHECK(bare[0].labeled_source == "__opt_src_fr __opt_tgt_en le chat");
}

TEST_CASE("paraphrase codes ride the same label grammar") {
  VerseAlignedCorpus corpus;
  MonoText j1, e0;
  j1.language = "j1";
  e0.language = "e0";
  j1.entries.emplace(VerseId("P.1.1"), "paraphrase text");
  e0.entries.emplace(VerseId("P.1.1"), "plain text");
  corpus.languages = {"j1", "e0"};
  corpus.texts.emplace("j1", j1);
  corpus.texts.emplace("e0", e0);

  Stage stage;
  stage.kind = StageKind::N1;
  stage.sources = {"j1"};
  stage.target = "e0";
  auto records = emit_pairs(corpus, stage, {VerseId("P.1.1")});
  CHECK(records[0].labeled_source.rfind("__opt_src_j1 __opt_tgt_e0 ", 0) == 0);
}

TEST_CASE("record counts equal path_count times the restricted line count") {
  auto corpus = stage_corpus();
  // Make coverage uneven: drop two verses from lang2.
  auto holed = corpus;
  auto& entries = holed.texts.at("lang2").entries;
  entries.erase(entries.begin());
  entries.erase(entries.begin());

  Stage stage;
  stage.kind = StageKind::NSq;
  stage.sources = {"lang0", "lang1", "lang2"};
  auto records = emit_pairs(holed, stage, {});
  CHECK(records.size() == 6 * 8);  // 8 shared lines survive
}

TEST_CASE("ext emits nothing and pairs_to_tsv is stable") {
  auto corpus = stage_corpus();
  Stage stage;
  stage.kind = StageKind::Ext;
  CHECK_THROWS_AS(emit_pairs(corpus, stage, {}), DataError);

  Stage n1;
  n1.kind = StageKind::Auto;
  n1.target = "lang0";
  auto records = emit_pairs(corpus, n1, first_ids(corpus, 1));
  auto tsv = pairs_to_tsv(records);
  CHECK(tsv.find("lang0-lang0\t") == 0);
  CHECK(std::count(tsv.begin(), tsv.end(), '\n') == 1);
}

TEST_CASE("generalization loss formula") {
  CHECK(generalization_loss(100.0, 100.0) == 0.0);
  CHECK(generalization_loss(90.0, 100.0) == doctest::Approx(10.0));
  CHECK(generalization_loss(99.9, 100.0) == doctest::Approx(0.1));
  CHECK_THROWS_AS(generalization_loss(1.0, 0.0), DataError);

  int warned = 0;
  auto previous = set_warn_sink([&](const std::string&) { ++warned; });
  CHECK(generalization_loss(101.0, 100.0) == 0.0);
  set_warn_sink(previous);
  CHECK(warned == 1);

  std::mt19937_64 rng(91);
  for (int round = 0; round < 50; ++round) {
    double x = 0.001 + static_cast<double>(rng() % 10000) / 100.0;
    CHECK(generalization_loss(x, x) == 0.0);
  }
}
