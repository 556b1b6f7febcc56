#include "versekit/schedule.hpp"

#include <algorithm>
#include <sstream>

namespace versekit {

extern const char* kScheduleTableTsv;

std::string stage_name(StageKind kind) {
  switch (kind) {
    case StageKind::Ext: return "ext";
    case StageKind::NSq: return "nsq";
    case StageKind::N1Sq: return "n1sq";
    case StageKind::N1: return "n1";
    case StageKind::Auto: return "auto";
  }
  return "?";
}

StageKind parse_stage(std::string_view name) {
  if (name == "ext") return StageKind::Ext;
  if (name == "nsq") return StageKind::NSq;
  if (name == "n1sq") return StageKind::N1Sq;
  if (name == "n1") return StageKind::N1;
  if (name == "auto") return StageKind::Auto;
  throw DataError("unknown stage: " + std::string(name));
}

namespace {

std::vector<Schedule> parse_schedule_table() {
  std::vector<Schedule> schedules;
  std::istringstream in(kScheduleTableTsv);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    size_t tab = line.find('\t');
    Schedule schedule;
    schedule.name = line.substr(0, tab);
    std::istringstream stages(line.substr(tab + 1));
    std::string stage;
    while (std::getline(stages, stage, ','))
      schedule.stages.push_back(parse_stage(stage));
    for (size_t i = 1; i < schedule.stages.size(); ++i)
      if (schedule.stages[i] == StageKind::Ext)
        throw DataError("schedule " + schedule.name +
                        ": ext is only valid as the first stage");
    schedules.push_back(std::move(schedule));
  }
  return schedules;
}

}  // namespace

std::vector<Schedule> all_schedules() {
  static const std::vector<Schedule> kSchedules = parse_schedule_table();
  return kSchedules;
}

Schedule schedule_by_name(std::string_view name) {
  for (const auto& schedule : all_schedules())
    if (schedule.name == name) return schedule;
  throw DataError("unknown schedule: " + std::string(name));
}

uint64_t path_count(PathConfig config, uint64_t n_languages) {
  if (config == PathConfig::Complete) {
    if (n_languages < 2)
      throw DataError("complete configuration needs at least 2 languages");
    return n_languages * (n_languages - 1);
  }
  if (n_languages < 1)
    throw DataError("star configuration needs at least 1 source");
  return n_languages;
}

namespace {

std::string label_prefix(const std::string& src, const std::string& tgt,
                         const LabelOptions& options) {
  std::string prefix;
  if (options.family_labels) {
    if (options.families == nullptr)
      throw DataError("family labels requested without a family table");
    auto src_family = options.families->find(src);
    auto tgt_family = options.families->find(tgt);
    if (src_family == options.families->end())
      throw DataError("no family for language " + src);
    if (tgt_family == options.families->end())
      throw DataError("no family for language " + tgt);
    prefix += "__opt_family_src_" + src_family->second + " ";
    prefix += "__opt_family_tgt_" + tgt_family->second + " ";
  }
  prefix += "__opt_src_" + src + " __opt_tgt_" + tgt + " ";
  return prefix;
}

// Verses every involved language covers; seed stages intersect with the
// seed ids on top.
std::vector<VerseId> stage_lines(const VerseAlignedCorpus& corpus,
                                 const std::vector<std::string>& involved,
                                 const Stage& stage,
                                 const std::set<VerseId>& seed_ids) {
  std::vector<VerseId> lines;
  VerseAlignedCorpus pool = restrict(corpus, involved, true);
  for (const auto& id : pool.shared_ids()) {
    if (stage.seed_restricted() && !seed_ids.count(id)) continue;
    lines.push_back(id);
  }
  return lines;
}

void emit_path(const VerseAlignedCorpus& corpus, const std::string& src,
               const std::string& tgt, const std::vector<VerseId>& lines,
               const LabelOptions& options,
               std::vector<PairRecord>* records) {
  const MonoText& src_text = corpus.text(src);
  const MonoText& tgt_text = corpus.text(tgt);
  std::string prefix = label_prefix(src, tgt, options);
  for (const auto& id : lines) {
    PairRecord record;
    record.path_tag = src + "-" + tgt;
    record.verse = id;
    record.labeled_source = prefix + src_text.sentence(id);
    record.target = tgt_text.sentence(id);
    records->push_back(std::move(record));
  }
}

}  // namespace

std::vector<PairRecord> emit_pairs(const VerseAlignedCorpus& corpus,
                                   const Stage& stage,
                                   const std::set<VerseId>& seed_ids,
                                   const LabelOptions& options) {
  if (stage.kind == StageKind::Ext)
    throw DataError("ext is an opaque stage marker; it emits no pairs");
  if (stage.seed_restricted() && seed_ids.empty())
    throw DataError("stage " + stage_name(stage.kind) +
                    " is seed-restricted but the seed is empty");
  if (stage.kind != StageKind::NSq && stage.target.empty())
    throw DataError("stage " + stage_name(stage.kind) +
                    " needs a designated target language");

  std::vector<PairRecord> records;
  switch (stage.kind) {
    case StageKind::NSq: {
      // All ordered source pairs over their full shared text; the target
      // is excluded by construction.
      std::vector<VerseId> lines =
          stage_lines(corpus, stage.sources, stage, seed_ids);
      for (const auto& src : stage.sources)
        for (const auto& tgt : stage.sources)
          if (src != tgt) emit_path(corpus, src, tgt, lines, options, &records);
      break;
    }
    case StageKind::N1Sq: {
      std::vector<std::string> involved = stage.sources;
      involved.push_back(stage.target);
      std::vector<VerseId> lines = stage_lines(corpus, involved, stage,
                                               seed_ids);
      for (const auto& src : involved)
        for (const auto& tgt : involved)
          if (src != tgt) emit_path(corpus, src, tgt, lines, options, &records);
      break;
    }
    case StageKind::N1: {
      std::vector<std::string> involved = stage.sources;
      involved.push_back(stage.target);
      std::vector<VerseId> lines = stage_lines(corpus, involved, stage,
                                               seed_ids);
      for (const auto& src : stage.sources)
        emit_path(corpus, src, stage.target, lines, options, &records);
      break;
    }
    case StageKind::Auto: {
      std::vector<VerseId> lines = stage_lines(
          corpus, {stage.target}, stage, seed_ids);
      emit_path(corpus, stage.target, stage.target, lines, options, &records);
      break;
    }
    case StageKind::Ext:
      break;  // unreachable
  }

  std::sort(records.begin(), records.end(),
            [](const PairRecord& a, const PairRecord& b) {
              if (a.path_tag != b.path_tag) return a.path_tag < b.path_tag;
              return a.verse < b.verse;
            });
  return records;
}

std::string pairs_to_tsv(const std::vector<PairRecord>& records) {
  std::ostringstream out;
  for (const auto& record : records)
    out << record.path_tag << '\t' << record.verse.str() << '\t'
        << record.labeled_source << '\t' << record.target << '\n';
  return out.str();
}

double generalization_loss(double e_val, double e_opt) {
  if (e_opt <= 0.0)
    throw DataError("generalization loss needs a positive optimum score");
  if (e_val > e_opt) {
    warn("validation score exceeds the optimum; GL clamped to 0");
    return 0.0;
  }
  return 100.0 * (1.0 - e_val / e_opt);
}

}  // namespace versekit
