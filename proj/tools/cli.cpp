// Copyright 2026 The storyeval Authors
// SPDX-License-Identifier: Apache-2.0

#include "cli.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <set>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "storyeval/aggregate.hpp"
#include "storyeval/bundle.hpp"
#include "storyeval/config.hpp"
#include "storyeval/corpus.hpp"
#include "storyeval/error.hpp"
#include "storyeval/report.hpp"
#include "storyeval/scoring.hpp"
#include "storyeval/store.hpp"

namespace storyeval::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kStoreEnv = "STORYEVAL_STORE";

struct Common
{
  std::string store;
  std::string format = "text";
};

struct MetricFlags
{
  std::string config;
  std::string variant;
  std::optional<double> threshold;
};

void add_store_option(CLI::App* cmd, Common& c)
{
  cmd->add_option("--store", c.store, std::string("Store root (default: $") + kStoreEnv + ")");
}

Store resolve_store(const Common& c)
{
  std::string root = c.store;
  if (root.empty()) {
    if (const char* env = std::getenv(kStoreEnv))
      root = env;
  }
  if (root.empty())
    throw CLI::ValidationError("--store", std::string("no store given and $") + kStoreEnv + " is unset");
  return Store(root);
}

void add_metric_options(CLI::App* cmd, MetricFlags& m)
{
  cmd->add_option("--config", m.config, "Metric config JSON file");
  cmd->add_option("--variant", m.variant, "Grounding variant")->check(CLI::IsMember({"rovist_vg", "groovist"}));
  cmd->add_option("--threshold", m.threshold, "Concept filter threshold for groovist")
    ->check(CLI::Range(0.0, 1.0));
}

MetricConfig resolve_config(const MetricFlags& m)
{
  MetricConfig cfg = m.config.empty() ? MetricConfig{} : load_metric_config(m.config);
  if (!m.variant.empty())
    cfg.grounding.variant = parse_grounding_variant(m.variant);
  if (cfg.grounding.variant == GroundingVariant::Groovist) {
    if (m.threshold)
      cfg.grounding.filter_threshold = *m.threshold;
    else if (!cfg.grounding.filter_threshold)
      cfg.grounding.filter_threshold = kDefaultGroovistThreshold;
  } else {
    if (m.threshold)
      throw Error(ErrorCode::InvalidArgument, "--threshold only applies to the groovist variant");
    cfg.grounding.filter_threshold.reset();
  }
  cfg.validate();
  return cfg;
}

void emit(std::ostream& out, const Common& c, const json& summary, const std::string& text)
{
  if (c.format == "json")
    out << summary.dump(2) << "\n";
  else if (!text.empty())
    out << text << "\n";
}

// Model stories carry no images when the prediction file omits them; they
// share the human story's image sequence.
const std::vector<ImageRef>& story_images(const StorySequence& story, const std::optional<StorySet>& human)
{
  if (story.images.empty() && human) {
    if (auto it = human->stories.find(story.story_id); it != human->stories.end())
      return it->second.images;
  }
  return story.images;
}

std::vector<StorySet> all_story_sets(const Store& store, std::optional<StorySet>& human)
{
  human = store.human_stories();
  std::vector<StorySet> sets;
  if (human)
    sets.push_back(*human);
  for (auto& m : store.model_stories())
    sets.push_back(std::move(m));
  for (auto& set : sets)
    for (auto& [id, story] : set.stories)
      if (story.images.empty())
        story.images = story_images(story, human);
  return sets;
}

// ---------------------------------------------------------------- ingest

struct IngestArgs
{
  Common common;
  std::string sis;
  std::string pred;
  std::string model;
  bool force = false;
};

int cmd_ingest(const IngestArgs& a, std::ostream& out, std::ostream& err)
{
  if (a.sis.empty() == a.pred.empty())
    throw CLI::ValidationError("ingest", "exactly one of --sis or --pred is required");
  if (!a.pred.empty() && a.model.empty())
    throw CLI::ValidationError("ingest", "--pred requires --model");

  const Store store = Store::create(resolve_store(a.common).root());
  StoreLock lock(store);

  StorySet set;
  std::vector<RejectedLine> rejected;
  if (!a.sis.empty()) {
    set = import_vist_sis(a.sis);
  } else {
    auto result = import_predictions(a.pred, a.model);
    set = std::move(result.set);
    rejected = std::move(result.rejected);
  }

  const std::string who = set.author.label();
  if (store.has_story_set(set.author) && !a.force) {
    err << "error: stories for " << who << " are already ingested; pass --force to replace them\n";
    return kDataError;
  }
  if (set.stories.empty()) {
    err << "error: no stories found\n";
    return kDataError;
  }

  json warnings = json::array();
  for (const auto& r : rejected) {
    const auto msg = "line " + std::to_string(r.line) + (r.story_id.empty() ? "" : " (" + r.story_id + ")") +
                     ": rejected: " + r.reason;
    warnings.push_back(msg);
    err << "warning: " << msg << "\n";
  }
  for (const auto& [id, story] : set.stories) {
    if (story.noncanonical_length() && !(story.images.empty() && !set.author.is_human())) {
      const auto msg = "story " + id + " has " + std::to_string(story.sentences.size()) + " sentences and " +
                       std::to_string(story.images.size()) + " images";
      warnings.push_back(msg);
      err << "warning: " << msg << "\n";
    } else if (story.sentences.size() != StorySequence::kCanonicalLength) {
      const auto msg = "story " + id + " has " + std::to_string(story.sentences.size()) + " sentences";
      warnings.push_back(msg);
      err << "warning: " << msg << "\n";
    }
  }

  const bool wrote = store.save_story_set(set);
  emit(out, a.common,
       {{"command", "ingest"},
        {"author", who},
        {"stories", set.size()},
        {"rejected", rejected.size()},
        {"written", wrote},
        {"warnings", warnings}},
       std::to_string(set.size()) + " stories ingested (" + who + ")");
  return kSuccess;
}

// ------------------------------------------------------------- workorder

struct WorkorderArgs
{
  Common common;
  MetricFlags metrics;
  std::string out_path;
};

int cmd_workorder(const WorkorderArgs& a, std::ostream& out, std::ostream&)
{
  const Store store = resolve_store(a.common);
  const MetricConfig cfg = resolve_config(a.metrics);

  std::optional<StorySet> human;
  const auto sets = all_story_sets(store, human);

  std::map<std::string, std::optional<BundleManifest>> manifests;
  auto manifest_for = [&](const std::string& id) -> const std::optional<BundleManifest>& {
    auto it = manifests.find(id);
    if (it == manifests.end()) {
      std::optional<BundleManifest> m;
      try {
        m = store.manifest(id);
      } catch (const Error&) {
        // An unreadable manifest is re-requested in full.
      }
      it = manifests.emplace(id, std::move(m)).first;
    }
    return it->second;
  };

  std::string body;
  std::size_t items = 0;
  for (const auto& set : sets) {
    const std::string who = set.author.label();
    const auto lks = store.likelihoods(set.author);
    for (const auto& [id, story] : set.stories) {
      const auto& manifest = manifest_for(id);
      std::set<std::string> want;

      if (!manifest) {
        want.insert("regions");
      } else {
        for (const auto& img : story.images) {
          const auto regions = manifest->regions();
          if (std::none_of(regions.begin(), regions.end(), [&](const auto* f) { return f->image_id == img.image_id; }))
            want.insert("regions");
        }
      }

      StoryNouns nouns;
      if (cfg.tagger == TaggerKind::Lexicon) {
        nouns = story_nouns(story, LexiconTagger::bundled());
        const ManifestFile* terms = manifest ? manifest->terms_for(who) : nullptr;
        if (!nouns.nouns.empty() && (terms == nullptr || terms->terms != nouns.nouns))
          want.insert("terms");
      } else if (!manifest || !manifest->noun_flags.contains(who)) {
        want.insert("noun_flags");
        want.insert("terms");
      }

      if (story.sentences.size() >= 2 && !lks.contains(id))
        want.insert("likelihoods");
      if (want.empty())
        continue;

      json images = json::array();
      for (const auto& img : story.images)
        images.push_back({{"image_id", img.image_id}, {"uri", img.uri ? json(*img.uri) : json(nullptr)}});
      json item{{"story_id", id},
                {"author", who},
                {"model_id", set.author.is_human() ? json(nullptr) : json(set.author.model_id())},
                {"sentences", story.sentences},
                {"images", images},
                {"want", want}};
      if (cfg.tagger == TaggerKind::Lexicon) {
        item["nouns"] = nouns.nouns;
        item["sentence_index"] = nouns.sentence_index;
      }
      body += item.dump() + "\n";
      ++items;
    }
  }

  const bool wrote = write_file_atomic(a.out_path, body);
  emit(out, a.common,
       {{"command", "workorder"}, {"items", items}, {"out", a.out_path}, {"written", wrote}},
       std::to_string(items) + " work items");
  return kSuccess;
}

// ----------------------------------------------------------------- score

struct ScoreArgs
{
  Common common;
  MetricFlags metrics;
  std::size_t jobs = 0;
};

json failure_json(const FailureRecord& f)
{
  return {{"story_id", f.story_id},
          {"model_id", f.author.is_human() ? json(nullptr) : json(f.author.model_id())},
          {"stage", f.stage},
          {"message", f.message}};
}

int cmd_score(const ScoreArgs& a, std::ostream& out, std::ostream& err)
{
  const Store store = resolve_store(a.common);
  const MetricConfig cfg = resolve_config(a.metrics);
  const std::string hash = config_hash(cfg);
  StoreLock lock(store);

  std::optional<StorySet> human;
  const auto sets = all_story_sets(store, human);
  if (sets.empty()) {
    err << "error: store has no stories\n";
    return kDataError;
  }

  std::vector<ScoreJob> jobs;
  std::vector<FailureRecord> failures;
  std::size_t cached = 0;
  std::map<std::string, std::map<std::string, SentenceLikelihoods>> lks_by_author;

  for (const auto& set : sets) {
    std::set<std::string> done;
    for (const auto& row : store.cached_scores(set.author))
      if (row.config_hash == hash)
        done.insert(row.triple.story_id);
    auto& lks = lks_by_author[set.author.label()];
    try {
      lks = store.likelihoods(set.author);
    } catch (const Error& e) {
      for (const auto& [id, story] : set.stories)
        if (!done.contains(id))
          failures.push_back({id, set.author, "inputs", e.what()});
      cached += done.size();
      continue;
    }

    for (const auto& [id, story] : set.stories) {
      if (done.contains(id)) {
        ++cached;
        continue;
      }
      std::error_code ec;
      if (!fs::is_regular_file(store.manifest_file(id), ec)) {
        failures.push_back({id, set.author, "inputs", "no bundle"});
        continue;
      }
      if (story.sentences.size() >= 2 && !lks.contains(id)) {
        failures.push_back({id, set.author, "inputs", "no likelihoods"});
        continue;
      }
      const std::string who = set.author.label();
      const StorySequence* sp = &story;
      const SentenceLikelihoods* lk = lks.contains(id) ? &lks.at(id) : nullptr;
      jobs.push_back({sp,
                      [&store, id, who] {
                        const auto m = store.manifest(id);
                        if (!m)
                          throw Error(ErrorCode::Integrity, "bundle disappeared");
                        return load_bundle(store.bundle_dir(id), *m, who);
                      },
                      [lk, id] { return lk ? *lk : SentenceLikelihoods{id, {}, ""}; }});
    }
  }

  const auto outcomes = score_batch(jobs, cfg, a.jobs);

  std::map<Author, std::vector<CachedScore>> fresh;
  std::size_t scored = 0;
  for (const auto& o : outcomes) {
    if (const auto* t = std::get_if<ScoreTriple>(&o)) {
      fresh[t->author].push_back({*t, hash});
      ++scored;
    } else {
      failures.push_back(std::get<FailureRecord>(o));
    }
  }
  for (const auto& [author, rows] : fresh)
    store.append_scores(author, rows);

  std::sort(failures.begin(), failures.end(), [](const auto& x, const auto& y) {
    return std::tie(x.author, x.story_id) < std::tie(y.author, y.story_id);
  });
  std::string failure_log;
  json failure_list = json::array();
  for (const auto& f : failures) {
    failure_list.push_back(failure_json(f));
    failure_log += failure_json(f).dump() + "\n";
    err << "failed: " << f.story_id << " (" << f.author.label() << ") [" << f.stage << "] " << f.message << "\n";
  }
  write_file_atomic(store.reports_dir() / ("score_failures." + hash.substr(0, 16) + ".jsonl"), failure_log);

  emit(out, a.common,
       {{"command", "score"},
        {"config_hash", hash},
        {"scored", scored},
        {"cached", cached},
        {"failed", failures.size()},
        {"failures", failure_list}},
       "scored " + std::to_string(scored) + " stories (" + std::to_string(cached) + " cached, " +
         std::to_string(failures.size()) + " failed); config " + hash.substr(0, 16));
  return failures.empty() ? kSuccess : kPartialFailure;
}

// --------------------------------------------------------------- compare

struct CompareArgs
{
  Common common;
  MetricFlags metrics;
  std::string agg = "per-story";
};

int cmd_compare(const CompareArgs& a, std::ostream& out, std::ostream& err)
{
  const Store store = resolve_store(a.common);
  const MetricConfig cfg = resolve_config(a.metrics);
  const std::string hash = config_hash(cfg);
  const auto agg =
    a.agg == "of-means" ? DistanceAggregation::DistanceOfMeans : DistanceAggregation::MeanOfStoryDistances;
  StoreLock lock(store);

  const auto human = store.human_stories();
  if (!human)
    throw Error(ErrorCode::Integrity, "store has no human stories");
  const auto models = store.model_stories();
  const EvaluationSet eval = intersect(*human, models);

  std::vector<ScoreTriple> triples;
  auto collect = [&](const Author& author) {
    std::set<std::string> seen;
    for (const auto& row : store.cached_scores(author)) {
      if (row.config_hash != hash || !std::binary_search(eval.story_ids.begin(), eval.story_ids.end(),
                                                         row.triple.story_id))
        continue;
      // Cache rows are immutable for a given hash; keep the first.
      if (seen.insert(row.triple.story_id).second)
        triples.push_back(row.triple);
    }
  };
  collect(Author::human());
  for (const auto& m : eval.models)
    collect(m.author);

  Leaderboard board = build_leaderboard(eval, triples, agg);
  if (cfg.grounding.variant == GroundingVariant::Groovist) {
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "Visual Grounding: groovist concept filter at threshold %.2f, an engine-defined approximation.",
                  cfg.grounding.filter_threshold.value_or(kDefaultGroovistThreshold));
    board.notes.push_back(buf);
  }
  if (!board.excluded_story_ids.empty())
    err << "warning: " << board.excluded_story_ids.size()
        << " stories lack scores for some author and were excluded for all models\n";

  const std::string suffix = std::string(to_string(agg));
  const auto dir = store.reports_dir();
  write_file_atomic(dir / ("leaderboard." + suffix + ".md"), render_markdown(board));
  write_file_atomic(dir / ("leaderboard." + suffix + ".csv"), render_csv(board));
  write_file_atomic(dir / ("leaderboard." + suffix + ".json"), render_json(board));
  write_file_atomic(dir / ("dhm_series." + suffix + ".csv"), render_distance_series_csv(board));
  write_file_atomic(dir / ("distances." + suffix + ".csv"), render_breakdowns_csv(board));

  if (a.common.format == "csv")
    out << render_csv(board);
  else if (a.common.format == "json")
    out << render_json(board);
  else
    out << render_markdown(board);
  return kSuccess;
}

// -------------------------------------------------------------- validate

struct ValidateArgs
{
  Common common;
  MetricFlags metrics;
};

int cmd_validate(const ValidateArgs& a, std::ostream& out, std::ostream&)
{
  const Store store = resolve_store(a.common);
  const MetricConfig cfg = resolve_config(a.metrics);
  const IntegrityReport report = validate_store(store, cfg);

  json list = json::array();
  std::string text;
  for (const auto& v : report.violations) {
    list.push_back({{"kind", to_string(v.kind)},
                    {"story_id", v.story_id},
                    {"path", v.path},
                    {"message", v.message},
                    {"blocking", v.blocking}});
    text += std::string(v.blocking ? "BLOCKING " : "") + std::string(to_string(v.kind)) + " " +
            (v.story_id.empty() ? "" : v.story_id + " ") + v.path + ": " + v.message + "\n";
  }
  text += std::to_string(report.violations.size()) + " violations (" + std::to_string(report.blocking()) +
          " blocking)";
  emit(out, a.common, {{"command", "validate"}, {"violations", list}, {"blocking", report.blocking()}}, text);
  return report.ok() ? kSuccess : kDataError;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
  CLI::App app{"Reference-free visual storytelling evaluation", "storyeval"};
  app.require_subcommand(1);

  IngestArgs ingest;
  auto* c_ingest = app.add_subcommand("ingest", "Import human (SIS) or model (JSONL) stories into a store");
  add_store_option(c_ingest, ingest.common);
  c_ingest->add_option("--sis", ingest.sis, "VIST SIS JSON file")->check(CLI::ExistingFile);
  c_ingest->add_option("--pred", ingest.pred, "Prediction JSONL file")->check(CLI::ExistingFile);
  c_ingest->add_option("--model", ingest.model, "Model id for --pred");
  c_ingest->add_flag("--force", ingest.force, "Replace an existing story set");
  c_ingest->add_option("--format", ingest.common.format)->check(CLI::IsMember({"text", "json"}));

  WorkorderArgs workorder;
  auto* c_work = app.add_subcommand("workorder", "List the extraction work needed before scoring");
  add_store_option(c_work, workorder.common);
  add_metric_options(c_work, workorder.metrics);
  c_work->add_option("--out", workorder.out_path, "Output JSONL path")->required();
  c_work->add_option("--format", workorder.common.format)->check(CLI::IsMember({"text", "json"}));

  ScoreArgs score;
  auto* c_score = app.add_subcommand("score", "Score every story with complete inputs");
  add_store_option(c_score, score.common);
  add_metric_options(c_score, score.metrics);
  c_score->add_option("--jobs", score.jobs, "Worker threads (0 = all cores)");
  c_score->add_option("--format", score.common.format)->check(CLI::IsMember({"text", "json"}));

  CompareArgs compare;
  compare.common.format = "md";
  auto* c_compare = app.add_subcommand("compare", "Render the human-to-model distance leaderboard");
  add_store_option(c_compare, compare.common);
  add_metric_options(c_compare, compare.metrics);
  c_compare->add_option("--format", compare.common.format)->check(CLI::IsMember({"md", "csv", "json"}));
  c_compare->add_option("--agg", compare.agg, "Distance aggregation")
    ->check(CLI::IsMember({"per-story", "of-means"}));

  ValidateArgs validate;
  auto* c_validate = app.add_subcommand("validate", "Check bundle checksums, dims and scoring inputs");
  add_store_option(c_validate, validate.common);
  add_metric_options(c_validate, validate.metrics);
  c_validate->add_option("--format", validate.common.format)->check(CLI::IsMember({"text", "json"}));

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
    if (c_ingest->parsed())
      return cmd_ingest(ingest, out, err);
    if (c_work->parsed())
      return cmd_workorder(workorder, out, err);
    if (c_score->parsed())
      return cmd_score(score, out, err);
    if (c_compare->parsed())
      return cmd_compare(compare, out, err);
    if (c_validate->parsed())
      return cmd_validate(validate, out, err);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kUsage;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kDataError;
  } catch (const Error& e) {
    err << "error: " << to_string(e.code()) << ": " << e.what() << "\n";
    return e.code() == ErrorCode::InvalidArgument ? kUsage : kDataError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kDataError;
  }
  return kUsage;
}

} // namespace storyeval::cli
