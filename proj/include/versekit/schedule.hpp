#ifndef VERSEKIT_SCHEDULE_HPP
#define VERSEKIT_SCHEDULE_HPP

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "versekit/corpus.hpp"

namespace versekit {

// Training stages. EXT is an opaque marker for an external pretrained
// model; downstream trainers interpret it, nothing is loaded here.
enum class StageKind { Ext, NSq, N1Sq, N1, Auto };

std::string stage_name(StageKind kind);
StageKind parse_stage(std::string_view name);

struct Stage {
  StageKind kind = StageKind::NSq;
  std::vector<std::string> sources;  // excludes the target
  std::string target;
  bool seed_restricted() const {
    return kind == StageKind::N1Sq || kind == StageKind::N1 ||
           kind == StageKind::Auto;
  }
};

struct Schedule {
  std::string name;  // A..H without EXT, I..X with EXT
  std::vector<StageKind> stages;
};

// Stage lists transcribed from the two schedule tables; the table lives
// in schedule_table.cpp as one TSV string so a transcription fix is a
// one-line change.
Schedule schedule_by_name(std::string_view name);
std::vector<Schedule> all_schedules();

enum class PathConfig { Star, Complete };

// complete -> N(N-1) ordered pairs; star -> N paths into one target.
uint64_t path_count(PathConfig config, uint64_t n_languages);

struct PairRecord {
  std::string path_tag;  // "src-tgt"
  VerseId verse;
  std::string labeled_source;
  std::string target;
};

struct LabelOptions {
  bool family_labels = false;
  // language code -> family name; required when family_labels is on.
  const std::map<std::string, std::string>* families = nullptr;
};

// Labeled training pairs for one stage, sorted by (path_tag, verse).
// NSq: all ordered source pairs over their full shared text. N1Sq: all
// ordered pairs over the seed-aligned lines, target included. N1: star
// into the target over seed lines. Auto: target->target identity pairs.
std::vector<PairRecord> emit_pairs(const VerseAlignedCorpus& corpus,
                                   const Stage& stage,
                                   const std::set<VerseId>& seed_ids,
                                   const LabelOptions& options = {});

std::string pairs_to_tsv(const std::vector<PairRecord>& records);

// GL(t) = 100 * (1 - e_val / e_opt); validation score above the optimum
// clamps to zero with a warning.
double generalization_loss(double e_val, double e_opt);

}  // namespace versekit

#endif  // VERSEKIT_SCHEDULE_HPP
