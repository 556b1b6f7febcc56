// versekit: corpus engineering for translating a closed multi-parallel
// text into a new low-resource language. Subcommands cover ingestion,
// similarity matrices, empirical language ranking, active-learning seed
// selection, named-entity masking, split construction, candidate
// combination, training-pair manifests, correlation, and corpus stats.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "versekit/align.hpp"
#include "versekit/combine.hpp"
#include "versekit/corpus.hpp"
#include "versekit/lexicon.hpp"
#include "versekit/schedule.hpp"
#include "versekit/selection.hpp"
#include "versekit/textmetrics.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace versekit;

namespace {

int run_argv(std::vector<std::string> args);  // forward, for replay

uint64_t fnv1a(std::string_view bytes, uint64_t hash = 1469598103934665603ull) {
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 1099511628211ull;
  }
  return hash;
}

std::string corpus_hash(const VerseAlignedCorpus& corpus) {
  uint64_t hash = 1469598103934665603ull;
  for (const auto& lang : corpus.languages) {
    hash = fnv1a(lang, hash);
    for (const auto& [id, sentence] : corpus.text(lang).entries) {
      hash = fnv1a(id.str(), hash);
      hash = fnv1a(sentence, hash);
    }
  }
  std::ostringstream out;
  out << std::hex << hash;
  return out.str();
}

void write_file(const fs::path& path, const std::string& content) {
  if (!path.parent_path().empty()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << content;
}

// Every run leaves a replayable config echo next to its outputs.
void write_run_header(const fs::path& out_dir,
                      const std::vector<std::string>& argv, json extra) {
  extra["argv"] = argv;
  write_file(out_dir / "run.json", extra.dump(2) + "\n");
}

std::vector<std::string> split_csv(const std::string& value) {
  std::vector<std::string> out;
  std::istringstream in(value);
  std::string item;
  while (std::getline(in, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

std::vector<std::string> resolve_langs(const VerseAlignedCorpus& corpus,
                                       const std::string& flag) {
  if (flag.empty()) return corpus.languages;
  return split_csv(flag);
}

// Seed TSV as written by `select`: step, verse_id, score, cum_words.
std::vector<VerseId> read_seed_ids(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open seed file: " + path);
  std::vector<VerseId> ids;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    size_t first = line.find('\t');
    size_t second = line.find('\t', first + 1);
    if (first == std::string::npos)
      throw DataError(path + ":" + std::to_string(line_no) +
                      ": expected seed TSV (step, verse_id, ...)");
    ids.emplace_back(line.substr(first + 1, second - first - 1));
  }
  return ids;
}

SimilarityMatrix read_matrix_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open matrix: " + path);
  SimilarityMatrix matrix;
  std::string line;
  if (!std::getline(in, line)) throw DataError(path + ": empty matrix file");
  auto header = split_csv(line);
  if (header.size() < 2) throw DataError(path + ": malformed matrix header");
  matrix.languages.assign(header.begin() + 1, header.end());
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto cells = split_csv(line);
    if (cells.size() != header.size())
      throw DataError(path + ": ragged matrix row");
    std::vector<double> row;
    for (size_t i = 1; i < cells.size(); ++i) row.push_back(std::stod(cells[i]));
    matrix.values.push_back(std::move(row));
  }
  if (matrix.values.size() != matrix.languages.size())
    throw DataError(path + ": matrix is not square");
  return matrix;
}

struct MaskedRow {
  VerseId verse;
  MaskedSentence masked;
};

json slots_record(const VerseId& id, const MaskedSentence& masked) {
  return json{{"verse", id.str()},
              {"slots", masked.slots},
              {"spans", masked.source_spans}};
}

int run_argv(std::vector<std::string> args) {
  CLI::App app{"corpus engineering toolkit for closed-text translation"};
  app.require_subcommand(1);

  int threads = 0;
  if (const char* env = std::getenv("VERSEKIT_THREADS"))
    threads = std::atoi(env);
  app.add_option("--threads", threads,
                 "worker threads (default: VERSEKIT_THREADS or all cores)");

  // ---- ingest ----
  auto* ingest = app.add_subcommand("ingest", "load, validate and normalize a corpus");
  std::string ingest_manifest, ingest_out;
  ingest->add_option("--manifest", ingest_manifest, "corpus manifest (JSON lines)")
      ->required();
  ingest->add_option("--out", ingest_out, "output directory")->required();

  // ---- sim-matrix ----
  auto* sim = app.add_subcommand("sim-matrix", "pairwise language similarity matrix");
  std::string sim_manifest, sim_metric = "chrf", sim_langs, sim_out;
  bool sim_long = false, sim_raw = false;
  sim->add_option("--manifest", sim_manifest)->required();
  sim->add_option("--metric", sim_metric,
                  "chrf|character|bleu1|bleu4|sentence-overlap|word-overlap");
  sim->add_option("--langs", sim_langs, "comma-separated subset (default all)");
  sim->add_option("--out", sim_out)->required();
  sim->add_flag("--long", sim_long, "also write long-form (ref,hyp,value) TSV");
  sim->add_flag("--raw", sim_raw,
                "keep characTER as an error rate instead of 1-min(err,1)");

  // ---- rank-langs ----
  auto* rank = app.add_subcommand("rank-langs",
                                  "rank source languages by empirical closeness");
  std::string rank_manifest, rank_target, rank_method = "famd", rank_out,
              rank_seed_file;
  int rank_iterations = 5;
  rank->add_option("--manifest", rank_manifest)->required();
  rank->add_option("--target", rank_target, "target language code")->required();
  rank->add_option("--method", rank_method, "famd|famp");
  rank->add_option("--iterations", rank_iterations, "EM iterations");
  rank->add_option("--seed-file", rank_seed_file,
                   "seed TSV restricting the target text (default: full coverage)");
  rank->add_option("--out", rank_out)->required();

  // ---- select ----
  auto* select = app.add_subcommand("select", "greedy budgeted seed selection");
  std::string select_manifest, select_ref, select_method, select_budget_ref,
      select_metadata, select_out, select_memoize = "on";
  uint64_t select_budget_words = 0, select_seed = 0;
  select->add_option("--manifest", select_manifest)->required();
  select->add_option("--ref", select_ref,
                     "reference language(s), comma-separated")
      ->required();
  select->add_option("--method", select_method,
                     "rand|excerpt:BOOK|s|sn|sng:J|ent|agg:{L|F|P|N}[:k]")
      ->required();
  select->add_option("--budget-words", select_budget_words, "word budget");
  select->add_option("--budget-ref", select_budget_ref,
                     "LANG:BOOK reference budget");
  select->add_option("--seed", select_seed, "RNG seed (rand method)");
  select->add_option("--memoize", select_memoize, "on|off");
  select->add_option("--metadata", select_metadata,
                     "language metadata TSV for agg voters");
  select->add_option("--out", select_out)->required();

  // ---- mask ----
  auto* mask_cmd = app.add_subcommand("mask", "order-preserving named-entity masking");
  std::string mask_manifest, mask_lang, mask_lexicon, mask_out;
  int mask_fuzzy = 1;
  bool mask_fold = false;
  mask_cmd->add_option("--manifest", mask_manifest)->required();
  mask_cmd->add_option("--lang", mask_lang)->required();
  mask_cmd->add_option("--lexicon", mask_lexicon)->required();
  mask_cmd->add_option("--fuzzy", mask_fuzzy, "max edit distance (0 disables)");
  mask_cmd->add_flag("--case-fold", mask_fold);
  mask_cmd->add_option("--out", mask_out)->required();

  // ---- unmask ----
  auto* unmask_cmd = app.add_subcommand("unmask", "restore placeholders from a decode table");
  std::string un_in, un_slots, un_lexicon, un_target, un_out;
  unmask_cmd->add_option("--in", un_in, "masked corpus TSV")->required();
  unmask_cmd->add_option("--slots", un_slots, "slots JSON-lines sidecar")->required();
  unmask_cmd->add_option("--lexicon", un_lexicon)->required();
  unmask_cmd->add_option("--target", un_target, "target language")->required();
  unmask_cmd->add_option("--out", un_out)->required();

  // ---- splits ----
  auto* splits_cmd = app.add_subcommand("splits", "train/valid/test construction");
  std::string sp_manifest, sp_seed_file, sp_out;
  std::vector<std::string> sp_intersect;
  double sp_fraction = 0.2;
  splits_cmd->add_option("--manifest", sp_manifest)->required();
  splits_cmd->add_option("--seed-file", sp_seed_file)->required();
  splits_cmd->add_option("--valid-fraction", sp_fraction);
  splits_cmd->add_option("--intersect", sp_intersect,
                         "other seed TSVs for the shared test set");
  splits_cmd->add_option("--out", sp_out)->required();

  // ---- combine ----
  auto* combine_cmd = app.add_subcommand("combine", "centered combination of candidates");
  std::string cb_metric = "chrf", cb_out, cb_log;
  std::vector<std::string> cb_inputs;
  combine_cmd->add_option("--metric", cb_metric);
  combine_cmd->add_option("inputs", cb_inputs, "per-language translation TSVs")
      ->required();
  combine_cmd->add_option("--out", cb_out, "combined TSV")->required();
  combine_cmd->add_option("--log", cb_log, "winner log TSV");

  // ---- schedule ----
  auto* sched = app.add_subcommand("schedule", "labeled training-pair manifests");
  std::string sc_manifest, sc_name, sc_target, sc_sources, sc_seed_file,
      sc_metadata, sc_out;
  bool sc_family = false;
  sched->add_option("--manifest", sc_manifest)->required();
  sched->add_option("--name", sc_name, "schedule name A..X")->required();
  sched->add_option("--target", sc_target)->required();
  sched->add_option("--sources", sc_sources, "comma-separated source languages")
      ->required();
  sched->add_option("--seed-file", sc_seed_file, "seed TSV for seed stages");
  sched->add_flag("--family-labels", sc_family);
  sched->add_option("--metadata", sc_metadata,
                    "language metadata TSV (families)");
  sched->add_option("--out", sc_out)->required();

  // ---- corr ----
  auto* corr = app.add_subcommand("corr", "column-wise Spearman correlation");
  std::string corr_a, corr_b, corr_out;
  bool corr_exclude = false;
  corr->add_option("--a", corr_a, "first matrix CSV")->required();
  corr->add_option("--b", corr_b, "second matrix CSV")->required();
  corr->add_flag("--exclude-diagonal", corr_exclude);
  corr->add_option("--out", corr_out)->required();

  // ---- stats ----
  auto* stats = app.add_subcommand("stats", "entropy, bootstrap CI, bucket F1");
  std::string st_manifest, st_lang, st_out, st_hyp, st_ref, st_train_lang,
      st_buckets;
  int st_resamples = 0;
  uint64_t st_seed = 0;
  double st_level = 0.95;
  stats->add_option("--manifest", st_manifest)->required();
  stats->add_option("--lang", st_lang)->required();
  stats->add_option("--bootstrap", st_resamples,
                    "resamples for the entropy confidence interval");
  stats->add_option("--level", st_level);
  stats->add_option("--seed", st_seed, "RNG seed (bootstrap)");
  stats->add_option("--hyp", st_hyp, "hypothesis TSV for bucket F1");
  stats->add_option("--ref", st_ref, "reference TSV for bucket F1");
  stats->add_option("--train-lang", st_train_lang,
                    "language whose frequencies define the buckets");
  stats->add_option("--buckets", st_buckets, "comma-separated bucket list");
  stats->add_option("--out", st_out)->required();

  // ---- replay ----
  auto* replay = app.add_subcommand("replay", "re-run a recorded run.json");
  std::string replay_path;
  replay->add_option("config", replay_path, "run.json to replay")->required();

  try {
    std::vector<const char*> raw;
    raw.push_back("versekit");
    for (const auto& arg : args) raw.push_back(arg.c_str());
    app.parse(static_cast<int>(raw.size()), raw.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e);  // usage errors exit 1, --help exits 0
  }

#ifdef _OPENMP
  if (threads > 0) omp_set_num_threads(threads);
#endif

  std::vector<std::string> argv_echo = args;

  if (*ingest) {
    auto corpus = load_manifest(ingest_manifest);
    save_corpus(corpus, ingest_out);
    json summary;
    for (const auto& lang : corpus.languages)
      summary[lang] = corpus.text(lang).entries.size();
    write_run_header(ingest_out, argv_echo,
                     {{"command", "ingest"}, {"corpus_hash", corpus_hash(corpus)}});
    std::cout << "ingested " << corpus.languages.size() << " languages, "
              << corpus.all_ids().size() << " distinct verses\n";
    for (const auto& lang : corpus.languages)
      std::cout << "  " << lang << ": " << corpus.text(lang).entries.size()
                << " lines\n";
    return 0;
  }

  if (*sim) {
    auto corpus = load_manifest(sim_manifest);
    auto langs = resolve_langs(corpus, sim_langs);
    Metric metric = parse_metric(sim_metric);
    auto matrix = similarity_matrix(corpus, langs, metric);
    if (metric == Metric::CharacTer && !sim_raw) matrix = matrix.as_similarity();
    fs::path out_dir(sim_out);
    std::string name = "similarity_" + metric_name(metric);
    write_file(out_dir / (name + ".csv"), matrix.to_csv());
    if (sim_long) write_file(out_dir / (name + ".tsv"), matrix.to_long_tsv());
    write_run_header(out_dir, argv_echo,
                     {{"command", "sim-matrix"},
                      {"metric", metric_name(metric)},
                      {"corpus_hash", corpus_hash(corpus)}});
    std::cout << "wrote " << (out_dir / (name + ".csv")).string() << " ("
              << langs.size() << "x" << langs.size() << ")\n";
    return 0;
  }

  if (*rank) {
    auto corpus = load_manifest(rank_manifest);
    MonoText target_seed = corpus.text(rank_target);
    if (!rank_seed_file.empty()) {
      auto keep_ids = read_seed_ids(rank_seed_file);
      MonoText sliced;
      sliced.language = target_seed.language;
      for (const auto& id : keep_ids)
        if (target_seed.covers(id))
          sliced.entries.emplace(id, target_seed.sentence(id));
      target_seed = std::move(sliced);
    }
    std::vector<MonoText> sources;
    for (const auto& lang : corpus.languages)
      if (lang != rank_target) sources.push_back(corpus.text(lang));
    LanguageRanking ranking;
    if (rank_method == "famd")
      ranking = famd_rank(target_seed, sources, rank_iterations);
    else if (rank_method == "famp")
      ranking = famp_rank(target_seed, sources, rank_iterations);
    else
      throw UsageError("unknown ranking method: " + rank_method);
    fs::path out_dir(rank_out);
    write_file(out_dir / ("ranking_" + rank_method + ".tsv"), ranking.to_tsv());
    write_run_header(out_dir, argv_echo,
                     {{"command", "rank-langs"},
                      {"method", rank_method},
                      {"corpus_hash", corpus_hash(corpus)}});
    size_t top = std::min<size_t>(5, ranking.entries.size());
    std::cout << "top " << top << " of " << ranking.entries.size()
              << " sources for " << rank_target << " (" << rank_method << "):\n";
    for (size_t i = 0; i < top; ++i)
      std::cout << "  " << (i + 1) << ". " << ranking.entries[i].first << "  "
                << format_double(ranking.entries[i].second) << "\n";
    return 0;
  }

  if (*select) {
    auto corpus = load_manifest(select_manifest);
    auto refs = split_csv(select_ref);
    Method method = Method::parse(select_method);
    if (method.kind != Method::Kind::Rand && select->count("--seed"))
      throw UsageError("--seed only applies to the rand method");
    SelectOptions options;
    options.rng_seed = select_seed;
    options.memoize = select_memoize == "on";
    if (select_memoize != "on" && select_memoize != "off")
      throw UsageError("--memoize takes on|off");
    if (select_budget_words > 0 && !select_budget_ref.empty())
      throw UsageError("--budget-words and --budget-ref are exclusive");
    if (select_budget_words > 0) {
      options.budget.word_count = select_budget_words;
    } else if (!select_budget_ref.empty()) {
      size_t colon = select_budget_ref.find(':');
      if (colon == std::string::npos)
        throw UsageError("--budget-ref wants LANG:BOOK");
      options.budget = reference_budget(corpus,
                                        select_budget_ref.substr(0, colon),
                                        select_budget_ref.substr(colon + 1));
    } else {
      throw UsageError("one of --budget-words or --budget-ref is required");
    }
    LanguageMetadata metadata;
    if (!select_metadata.empty()) {
      metadata = LanguageMetadata::load(select_metadata);
      options.metadata = &metadata;
    }
    auto seed = greedy_select(corpus, refs, method, options);
    fs::path out_dir(select_out);
    write_file(out_dir / "seed.tsv", seed.to_tsv());
    json header = {{"command", "select"},
                   {"method", seed.method},
                   {"budget_words", seed.budget.word_count},
                   {"budget_language", seed.budget_language},
                   {"rng_seed", options.rng_seed},
                   {"memoize", options.memoize},
                   {"selected_lines", seed.steps.size()},
                   {"selected_words", seed.total_words()},
                   {"corpus_hash", corpus_hash(corpus)}};
    if (seed.budget.reference)
      header["budget_ref"] = seed.budget.reference->first + ":" +
                             seed.budget.reference->second;
    write_run_header(out_dir, argv_echo, header);
    std::cout << "selected " << seed.steps.size() << " lines, "
              << seed.total_words() << " words (budget "
              << seed.budget.word_count << ")\n";
    return 0;
  }

  if (*mask_cmd) {
    auto corpus = load_manifest(mask_manifest);
    auto table = LexiconTable::load(mask_lexicon);
    MaskOptions options;
    options.fuzzy_max_edit = mask_fuzzy;
    options.case_fold = mask_fold;
    const MonoText& text = corpus.text(mask_lang);
    std::ostringstream masked_tsv, slots_jsonl;
    uint64_t masked_entities = 0;
    for (const auto& [id, sentence] : text.entries) {
      auto [masked, _] = mask(sentence, mask_lang, table, options);
      masked_tsv << id.str() << '\t' << masked.text << '\n';
      slots_jsonl << slots_record(id, masked).dump() << '\n';
      masked_entities += masked.slots.size();
    }
    fs::path out_dir(mask_out);
    write_file(out_dir / (mask_lang + ".masked.tsv"), masked_tsv.str());
    write_file(out_dir / (mask_lang + ".slots.jsonl"), slots_jsonl.str());
    write_run_header(out_dir, argv_echo,
                     {{"command", "mask"},
                      {"language", mask_lang},
                      {"masked_entities", masked_entities},
                      {"corpus_hash", corpus_hash(corpus)}});
    std::cout << "masked " << masked_entities << " entity mentions in "
              << text.entries.size() << " lines\n";
    return 0;
  }

  if (*unmask_cmd) {
    auto table = LexiconTable::load(un_lexicon);
    auto masked_corpus = load_corpus({{un_target, un_in}}, CorpusFormat::Tsv);
    const MonoText& masked_text = masked_corpus.text(un_target);

    std::ifstream slots_in(un_slots, std::ios::binary);
    if (!slots_in) throw DataError("cannot open slots file: " + un_slots);
    std::map<VerseId, MaskedSentence> slots;
    std::string line;
    while (std::getline(slots_in, line)) {
      if (line.empty()) continue;
      json record = json::parse(line);
      MaskedSentence masked;
      masked.slots = record["slots"].get<std::vector<std::string>>();
      masked.source_spans = record["spans"].get<std::vector<std::string>>();
      slots.emplace(VerseId(record["verse"].get<std::string>()),
                    std::move(masked));
    }

    std::ostringstream unmasked_tsv, audit_tsv;
    for (const auto& [id, sentence] : masked_text.entries) {
      auto it = slots.find(id);
      if (it == slots.end())
        throw DataError("no slots record for verse " + id.str());
      MaskedSentence masked = it->second;
      masked.text = sentence;
      auto decode = build_decode_table(masked, un_target, table);
      unmasked_tsv << id.str() << '\t' << unmask(sentence, decode) << '\n';
      auto audit = audit_mask_coverage(masked, sentence);
      if (!audit.clean()) {
        audit_tsv << id.str() << '\t';
        for (int index : audit.missing) audit_tsv << "missing:" << index << ' ';
        for (int index : audit.duplicated)
          audit_tsv << "duplicated:" << index << ' ';
        audit_tsv << '\n';
      }
    }
    fs::path out_dir(un_out);
    write_file(out_dir / (un_target + ".unmasked.tsv"), unmasked_tsv.str());
    write_file(out_dir / "audit.tsv", audit_tsv.str());
    write_run_header(out_dir, argv_echo, {{"command", "unmask"}});
    std::cout << "unmasked " << masked_text.entries.size() << " lines\n";
    return 0;
  }

  if (*splits_cmd) {
    auto corpus = load_manifest(sp_manifest);
    auto seed_ids = read_seed_ids(sp_seed_file);
    auto splits = build_splits(corpus, seed_ids, sp_fraction);

    std::vector<std::set<VerseId>> all_seeds;
    all_seeds.push_back(splits.train);
    all_seeds.push_back(splits.valid);
    for (const auto& other : sp_intersect) {
      std::set<VerseId> ids;
      for (const auto& id : read_seed_ids(other)) ids.insert(id);
      all_seeds.push_back(std::move(ids));
    }
    auto shared_test = intersection_test_set(corpus.all_ids(), all_seeds);

    auto dump_ids = [](const std::set<VerseId>& ids) {
      std::ostringstream out;
      for (const auto& id : ids) out << id.str() << '\n';
      return out.str();
    };
    fs::path out_dir(sp_out);
    write_file(out_dir / "train.ids", dump_ids(splits.train));
    write_file(out_dir / "valid.ids", dump_ids(splits.valid));
    write_file(out_dir / "test.ids", dump_ids(splits.test));
    write_file(out_dir / "test_intersection.ids", dump_ids(shared_test));
    write_run_header(out_dir, argv_echo,
                     {{"command", "splits"},
                      {"train", splits.train.size()},
                      {"valid", splits.valid.size()},
                      {"test", splits.test.size()},
                      {"test_intersection", shared_test.size()},
                      {"corpus_hash", corpus_hash(corpus)}});
    std::cout << "train " << splits.train.size() << " / valid "
              << splits.valid.size() << " / test " << splits.test.size()
              << " (shared test " << shared_test.size() << ")\n";
    return 0;
  }

  if (*combine_cmd) {
    std::vector<LangFile> files;
    for (const auto& input : cb_inputs)
      files.push_back({fs::path(input).stem().string(), input});
    auto corpus = load_corpus(files, CorpusFormat::Tsv);
    std::vector<MonoText> inputs;
    for (const auto& lang : corpus.languages) inputs.push_back(corpus.text(lang));
    auto result = combine_corpus(inputs, parse_metric(cb_metric));
    std::ostringstream combined_tsv;
    for (const auto& [id, sentence] : result.combined.entries)
      combined_tsv << id.str() << '\t' << sentence << '\n';
    write_file(cb_out, combined_tsv.str());
    if (!cb_log.empty()) write_file(cb_log, result.winners_tsv());
    write_run_header(fs::path(cb_out).parent_path(), argv_echo,
                     {{"command", "combine"},
                      {"metric", cb_metric},
                      {"verses", result.combined.entries.size()}});
    std::cout << "combined " << inputs.size() << " candidates over "
              << result.combined.entries.size() << " verses\n";
    return 0;
  }

  if (*sched) {
    auto corpus = load_manifest(sc_manifest);
    auto schedule = schedule_by_name(sc_name);
    auto sources = split_csv(sc_sources);
    std::set<VerseId> seed_ids;
    if (!sc_seed_file.empty())
      for (const auto& id : read_seed_ids(sc_seed_file)) seed_ids.insert(id);

    LabelOptions label_options;
    std::map<std::string, std::string> families;
    if (sc_family) {
      if (sc_metadata.empty())
        throw UsageError("--family-labels needs --metadata");
      auto metadata = LanguageMetadata::load(sc_metadata);
      for (const auto& row : metadata.rows)
        if (row.family) families[row.language] = *row.family;
      label_options.family_labels = true;
      label_options.families = &families;
    }

    fs::path out_dir(sc_out);
    json plan;
    plan["schedule"] = schedule.name;
    plan["target"] = sc_target;
    plan["stages"] = json::array();
    for (size_t index = 0; index < schedule.stages.size(); ++index) {
      StageKind kind = schedule.stages[index];
      json stage_json;
      stage_json["kind"] = stage_name(kind);
      if (kind == StageKind::Ext) {
        stage_json["external"] = true;  // opaque marker for the trainer
      } else {
        Stage stage;
        stage.kind = kind;
        stage.sources = sources;
        stage.target = sc_target;
        auto records = emit_pairs(corpus, stage, seed_ids, label_options);
        std::string filename = "stage" + std::to_string(index) + "_" +
                               stage_name(kind) + ".tsv";
        write_file(out_dir / filename, pairs_to_tsv(records));
        stage_json["manifest"] = filename;
        stage_json["records"] = records.size();
      }
      plan["stages"].push_back(stage_json);
    }
    write_file(out_dir / "plan.json", plan.dump(2) + "\n");
    write_run_header(out_dir, argv_echo,
                     {{"command", "schedule"},
                      {"schedule", schedule.name},
                      {"corpus_hash", corpus_hash(corpus)}});
    std::cout << "schedule " << schedule.name << ": "
              << schedule.stages.size() << " stages planned\n";
    return 0;
  }

  if (*corr) {
    auto a = read_matrix_csv(corr_a);
    auto b = read_matrix_csv(corr_b);
    auto result = columnwise_spearman(a.values, b.values, corr_exclude);
    json out;
    out["rho"] = result.pooled.rho;
    out["p_value"] = result.pooled.p_value;
    out["n"] = result.pooled.n;
    out["p_approximate"] = result.pooled.p_approximate;
    out["per_column"] = json::array();
    for (size_t j = 0; j < result.per_column.size(); ++j) {
      json column;
      column["language"] = j < a.languages.size() ? a.languages[j] : "";
      if (result.per_column[j]) {
        column["rho"] = result.per_column[j]->rho;
        column["p_value"] = result.per_column[j]->p_value;
      }
      out["per_column"].push_back(column);
    }
    fs::path out_dir(corr_out);
    write_file(out_dir / "correlation.json", out.dump(2) + "\n");
    write_run_header(out_dir, argv_echo, {{"command", "corr"}});
    std::cout << "spearman rho " << format_double(result.pooled.rho) << " (p "
              << format_double(result.pooled.p_value) << ", n "
              << result.pooled.n << ")\n";
    return 0;
  }

  if (*stats) {
    auto corpus = load_manifest(st_manifest);
    const MonoText& text = corpus.text(st_lang);
    std::vector<std::string> tokens;
    for (const auto& [_, sentence] : text.entries)
      for (auto& token : tokenize(sentence)) tokens.push_back(std::move(token));

    json out;
    out["language"] = st_lang;
    out["lines"] = text.entries.size();
    out["words"] = tokens.size();
    out["unigram_entropy_bits"] = unigram_entropy(tokens);
    if (st_resamples > 0) {
      auto [lo, hi] = bootstrap_ci(
          tokens,
          [](const std::vector<std::string>& t) { return unigram_entropy(t); },
          st_resamples, st_level, st_seed);
      out["bootstrap"] = {{"resamples", st_resamples},
                          {"level", st_level},
                          {"seed", st_seed},
                          {"lo", lo},
                          {"hi", hi}};
    } else if (stats->count("--seed")) {
      throw UsageError("--seed only applies with --bootstrap");
    }

    if (!st_hyp.empty() || !st_ref.empty() || !st_buckets.empty()) {
      if (st_hyp.empty() || st_ref.empty() || st_train_lang.empty() ||
          st_buckets.empty())
        throw UsageError("bucket F1 needs --hyp, --ref, --train-lang, --buckets");
      auto pair_corpus = load_corpus(
          {{"hyp", st_hyp}, {"ref", st_ref}}, CorpusFormat::Tsv);
      std::map<std::string, uint64_t> train;
      for (const auto& [_, sentence] : corpus.text(st_train_lang).entries)
        for (const auto& token : tokenize(sentence)) ++train[token];
      out["f1_by_bucket"] = json::object();
      for (const auto& bucket_str : split_csv(st_buckets)) {
        uint64_t bucket = std::stoull(bucket_str);
        auto f1 = f1_by_frequency_bucket(pair_corpus.text("hyp"),
                                         pair_corpus.text("ref"), train,
                                         bucket);
        out["f1_by_bucket"][bucket_str] =
            f1 ? json(*f1) : json(nullptr);
      }
    }

    fs::path out_dir(st_out);
    write_file(out_dir / "stats.json", out.dump(2) + "\n");
    write_run_header(out_dir, argv_echo,
                     {{"command", "stats"}, {"corpus_hash", corpus_hash(corpus)}});
    std::cout << "entropy " << format_double(out["unigram_entropy_bits"].get<double>())
              << " bits over " << tokens.size() << " tokens\n";
    return 0;
  }

  if (*replay) {
    std::ifstream in(replay_path, std::ios::binary);
    if (!in) throw DataError("cannot open run config: " + replay_path);
    json record = json::parse(in);
    if (!record.contains("argv"))
      throw DataError(replay_path + " has no argv to replay");
    return run_argv(record["argv"].get<std::vector<std::string>>());
  }

  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    return run_argv(std::move(args));
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
