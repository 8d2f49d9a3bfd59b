#pragma once

#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "funscene/arrangement.hpp"
#include "funscene/asset_index.hpp"
#include "funscene/config.hpp"
#include "funscene/layout.hpp"
#include "funscene/layout_check.hpp"
#include "funscene/layout_clauses.hpp"
#include "funscene/llm_client.hpp"
#include "funscene/part_meta.hpp"
#include "funscene/requirement.hpp"
#include "funscene/scene_export.hpp"
#include "funscene/task_parse.hpp"

namespace funscene {

// Everything the generator reads besides the prompts.
struct World {
  AssetCatalog catalog;
  EmbeddingIndex annotated{1};
  EmbeddingIndex unannotated{1};
  QueryEmbeddings queries;
  std::set<std::string> labels = default_functional_labels();
};

inline World load_world(const GenerateConfig& cfg) {
  World w;
  auto need = [](const std::filesystem::path& p, const char* what) {
    if (!std::filesystem::exists(p)) throw ConfigError(std::string(what) + " not found: " + p.string());
  };
  need(cfg.assets_dir, "asset directory");
  need(cfg.annotated_index, "annotated index");
  need(cfg.unannotated_index, "unannotated index");
  w.catalog = load_asset_catalog(cfg.assets_dir);
  w.annotated = EmbeddingIndex::load(cfg.annotated_index);
  w.unannotated = EmbeddingIndex::load(cfg.unannotated_index);
  if (w.annotated.dim() != w.unannotated.dim()) throw ConfigError("index dimensions differ");
  std::optional<EmbeddingIndex> table;
  if (cfg.query_index) {
    need(*cfg.query_index, "query index");
    table = EmbeddingIndex::load(*cfg.query_index);
    if (table->dim() != w.annotated.dim()) throw ConfigError("query index dimension differs from the asset indices");
  }
  w.queries = QueryEmbeddings(std::move(table), cfg.hashed_queries, w.annotated.dim());
  if (cfg.labels_path) w.labels = load_label_list(*cfg.labels_path);
  return w;
}

// The backend named by the config. In record mode `sink` receives the calls.
inline std::shared_ptr<LlmBackend> make_backend(const LlmConfig& cfg, std::shared_ptr<LlmBackend> live,
                                                std::shared_ptr<Cassette>* sink = nullptr) {
  switch (cfg.mode) {
    case LlmMode::replay:
      if (cfg.cassette.empty()) throw ConfigError("replay mode needs a cassette");
      return std::make_shared<ReplayBackend>(Cassette::load(cfg.cassette));
    case LlmMode::record: {
      if (!live) throw ConfigError("record mode needs a live backend");
      auto cassette = std::make_shared<Cassette>();
      if (sink) *sink = cassette;
      return std::make_shared<RecordingBackend>(std::move(live), cassette);
    }
    default:
      if (!live) throw ConfigError("http mode needs a live backend");
      return live;
  }
}

// Base height of wall-mounted objects, by name.
inline double wall_mount_elevation(const std::string& name, double height) {
  const std::string n = to_lower_copy(name);
  double center = 1.5;
  if (n.find("door") != std::string::npos) return 0.0;
  if (n.find("switch") != std::string::npos) center = 1.1;
  else if (n.find("socket") != std::string::npos || n.find("outlet") != std::string::npos) center = 0.3;
  else if (n.find("window") != std::string::npos) return 0.9;
  else if (n.find("thermostat") != std::string::npos) center = 1.4;
  return std::max(0.0, center - height / 2);
}

// Room of random size with one door opening.
inline Room random_room(const RoomConfig& cfg, std::uint64_t seed, bool with_door) {
  Rng rng(seed);
  Room room;
  room.width = std::round(rng.uniform(cfg.width_min, cfg.width_max) * 10.0) / 10.0;
  room.depth = std::round(rng.uniform(cfg.depth_min, cfg.depth_max) * 10.0) / 10.0;
  if (with_door) {
    const Wall wall = std::array{Wall::S, Wall::E, Wall::N, Wall::W}[rng.below(4)];
    const double len = room.wall_length(wall);
    if (len > cfg.door_width + 0.4) {
      const double lo = std::round(rng.uniform(0.2, len - 0.2 - cfg.door_width) * 10.0) / 10.0;
      room.openings.push_back({wall, lo, lo + cfg.door_width, ObjectType::door});
    }
  }
  return room;
}

struct SceneOutcome {
  std::string scene_id;
  bool ok = false;
  std::string error_kind;
  std::string error;
  std::optional<SceneManifest> manifest;
  std::vector<PointingSample> samples;
  ClauseSet clauses;
  json selection_log = json::object();
  json run_log = json::object();
};

namespace detail {

class StageTimer {
 public:
  explicit StageTimer(json& log) : log_(log) {}
  template <class F>
  auto operator()(const char* stage, F&& f) {
    const auto start = std::chrono::steady_clock::now();
    struct Record {
      json& log;
      const char* stage;
      std::chrono::steady_clock::time_point start;
      ~Record() { log[stage] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(); }
    } record{log_, stage, start};
    return f();
  }

 private:
  json& log_;
};

inline const AssetRecord& asset_of(const World& w, const std::string& id) {
  const auto it = w.catalog.find(id);
  if (it == w.catalog.end()) throw ConfigError("index entry " + id + " has no asset record");
  return it->second;
}

}  // namespace detail

// One scene: parse, retrieve, filter, arrange, solve, export.
inline SceneOutcome generate_scene(const World& world, const LlmClient& client, const GenerateConfig& cfg,
                                   const std::string& prompt, std::uint64_t seed, const std::string& scene_id) {
  SceneOutcome out;
  out.scene_id = scene_id;
  json& log = out.run_log;
  log["scene_id"] = scene_id;
  log["prompt"] = prompt;
  log["seed"] = seed;
  json timings = json::object();
  json warnings = json::array();
  detail::StageTimer timed(timings);
  try {
    const TaskDescription task(prompt);

    const TaskParseResult parsed = timed("parse", [&] { return parse_task(client, task); });
    TaskParse parse = parsed.parse;
    for (const auto& w : parsed.warnings) warnings.push_back(w);
    log["task_parse"] = parse;

    const ObjectListResult objects =
        timed("objects", [&] { return object_list_llm(client, parse.layout_prompt, parse.object_name); });
    for (const auto& w : objects.warnings) warnings.push_back(w);

    // Target candidates from the annotated database.
    const auto candidates = timed("retrieve", [&] {
      return retrieve_candidates(world.queries.lookup(parse.object_name), world.annotated, cfg.threshold, cfg.text_weight);
    });
    log["candidates"] = candidates.size();
    if (candidates.empty()) throw Error("retrieval", "no annotated asset scores above the threshold for '" + parse.object_name + "'");

    std::vector<std::vector<FunctionalElement>> per_asset;
    for (const auto& c : candidates) {
      const AssetRecord& a = detail::asset_of(world, c.asset_id);
      per_asset.push_back(a.root_part ? functional_elements(a, world.labels) : std::vector<FunctionalElement>{});
    }
    const auto labels = functional_label_union(per_asset);
    if (labels.empty()) throw Error("requirement", "no candidate carries a functional element");

    Requirement req = timed("requirement", [&] { return infer_requirement_llm(client, parse.context_free_prompt, labels); });
    req.object_name = parse.object_name;
    parse.functional_label = req.functional_label;
    log["task_parse"] = parse;
    log["requirement"] = req.text();

    const auto kept = filter_assets(candidates, world.catalog, req, world.labels);
    log["after_filter"] = kept.size();
    if (kept.empty()) throw Error("requirement", "requirement '" + req.text() + "' filtered out every candidate");

    std::vector<AssetElements> listing;
    for (const auto& c : kept) {
      const AssetRecord& a = detail::asset_of(world, c.asset_id);
      listing.push_back({c.asset_id, elements_matching(functional_elements(a, world.labels), req.functional_label)});
    }

    std::vector<AssetVerdict> verdicts = timed("arrange", [&] {
      if (cfg.arrangement == ArrangementMode::llm)
        return select_parts_llm(client, listing, parse.object_name, req.functional_label, parse.context_free_prompt);
      const SpatialQuery q = parse_spatial_query(parse.context_free_prompt);
      std::vector<AssetVerdict> v;
      for (const auto& a : listing) v.push_back({a.asset_id, select_part(a.elements, q)});
      return v;
    });
    std::vector<MaskSelection> selections;
    json verdict_log = json::array();
    for (const auto& v : verdicts) {
      verdict_log.push_back({{"asset_id", v.asset_id},
                             {"suitable", v.verdict.suitable},
                             {"part_id", v.verdict.part_id},
                             {"reasoning", v.verdict.reasoning}});
      if (v.verdict.suitable) selections.push_back({v.asset_id, v.verdict.part_id, v.verdict.reasoning});
    }
    if (selections.empty()) throw Error("arrangement", "no candidate has a part matching the description");
    const MaskSelection chosen = choose_final(selections, mix_seed(seed, 1));

    json candidate_log = json::array();
    for (const auto& c : candidates) candidate_log.push_back({{"asset_id", c.asset_id}, {"score", c.score}});
    out.selection_log = {{"selection", chosen},      {"requirement", req.text()}, {"functional_label", req.functional_label},
                         {"candidates", candidate_log}, {"verdicts", verdict_log}};

    // Assets for the remaining objects come from the plain database.
    std::vector<SolveObject> required, extras;
    for (const auto& spec : objects.objects) {
      const bool is_target = spec.name == parse.object_name;
      const std::string asset_id =
          is_target ? chosen.asset_id : retrieve_best(world.queries.lookup(spec.name), world.unannotated, cfg.text_weight);
      const AssetRecord& asset = detail::asset_of(world, asset_id);
      SolveObject o;
      o.handle = spec.name;
      o.asset_id = asset_id;
      o.dims = asset.bounds().extent();
      o.front_axis = asset.front_axis;
      o.mount = spec.mount;
      if (is_target && parse.object_type != ObjectType::other) o.mount = Mount::wall;
      if (o.mount == Mount::wall) o.elevation = wall_mount_elevation(spec.name, o.dims.z);
      (spec.required ? required : extras).push_back(std::move(o));
    }

    out.clauses = timed("clauses", [&] { return clauses_from_layout(client, parse.layout_prompt, objects.objects); });
    for (const auto& w : out.clauses.warnings) warnings.push_back(w);
    for (const auto& c : out.clauses.all()) {
      for (auto* group : {&required, &extras})
        for (auto& o : *group)
          if (o.handle == c.subject) o.clauses.push_back(c);
    }

    // Solve and orbit; a fresh room is drawn when either fails.
    const bool room_door = parse.object_type != ObjectType::door;
    std::optional<SceneLayout> layout;
    std::vector<Trajectory> trajectories;
    std::string last_failure;
    const auto solve_start = std::chrono::steady_clock::now();
    for (int attempt = 0; attempt < cfg.room.attempts && !layout; ++attempt) {
      const Room room = random_room(cfg.room, mix_seed(seed, 10 + static_cast<std::uint64_t>(attempt)), room_door);
      SolverOptions sopt = cfg.solver;
      sopt.seed = mix_seed(seed, 20 + static_cast<std::uint64_t>(attempt));
      const SolveResult result = solve(room, required, extras, sopt);
      for (const auto& w : result.warnings) warnings.push_back(w);
      if (!result.ok()) {
        last_failure = "layout " + to_string(result.failure().reason) + ": " + result.failure().detail;
        continue;
      }
      if (const auto v = check_solution(result.layout(), result.enforced, sopt); !v.empty())
        throw Error("layout", "solution failed the independent check: " + v.front());
      const Placement& target = *result.layout().find(parse.object_name);
      const auto geometry = target_geometry(detail::asset_of(world, chosen.asset_id), target, chosen.part_id);
      try {
        trajectories.clear();
        for (int t = 0; t < cfg.trajectories; ++t) {
          const std::uint64_t tseed = mix_seed(seed, 30 + static_cast<std::uint64_t>(attempt) * 64 + t);
          trajectories.push_back({tseed, orbit_trajectory(result.layout(), target, geometry.centroid, cfg.orbit, tseed, cfg.camera)});
        }
        layout = result.layout();
      } catch (const Error& e) {
        last_failure = e.what();
      }
    }
    timings["solve"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - solve_start).count();
    if (!layout) throw Error("layout", last_failure);

    SceneManifest m;
    m.scene_id = scene_id;
    m.task_description = task.text();
    m.seed = seed;
    m.layout = *layout;
    m.instance_ids = assign_instance_ids(m.layout);
    m.selection = chosen;
    m.target = target_geometry(detail::asset_of(world, chosen.asset_id), *m.layout.find(parse.object_name), chosen.part_id);
    m.clauses = out.clauses.all();
    m.trajectories = trajectories;
    m.approximations = default_approximations();

    timed("annotate", [&] {
      for (std::size_t t = 0; t < m.trajectories.size(); ++t) {
        const auto frames = annotate_trajectory(m.trajectories[t].cameras, m.target, m.layout);
        const auto kept_frames = select_frames(frames, cfg.filter, cfg.stride, cfg.top_k, cfg.filter_options);
        auto samples = emit_pointing_samples(kept_frames, task.text(), scene_id, static_cast<int>(t));
        out.samples.insert(out.samples.end(), samples.begin(), samples.end());
      }
      return 0;
    });
    out.manifest = std::move(m);
    out.ok = true;
    log["status"] = "ok";
    log["placed"] = out.manifest->layout.placements.size();
    log["samples"] = out.samples.size();
  } catch (const Error& e) {
    out.error_kind = e.kind();
    out.error = e.what();
    log["status"] = "failed";
    log["error_kind"] = e.kind();
    log["error"] = e.what();
  } catch (const std::exception& e) {
    out.error_kind = "internal";
    out.error = e.what();
    log["status"] = "failed";
    log["error_kind"] = "internal";
    log["error"] = e.what();
  }
  json clause_dump = json::array();
  for (const auto& c : out.clauses.all()) clause_dump.push_back(to_string(c));
  log["clauses"] = clause_dump;
  log["warnings"] = warnings;
  log["timings_s"] = timings;
  return out;
}

inline void write_scene(const SceneOutcome& s, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto write = [&](const std::string& name, const std::string& text) {
    std::ofstream out(dir / name);
    if (!out) throw IoError("cannot write " + (dir / name).string());
    out << text;
  };
  write("run_log.json", s.run_log.dump(2) + "\n");
  if (!s.ok) return;
  write_manifest(*s.manifest, dir / "manifest.json");
  std::string clauses;
  for (const auto& c : s.clauses.all()) clauses += to_string(c) + "\n";
  write("clauses.txt", clauses);
  write("selection.json", s.selection_log.dump(2) + "\n");
  std::string lines;
  for (const auto& p : s.samples) lines += to_json_line(p).dump() + "\n";
  write("pointing.jsonl", lines);
}

struct BatchReport {
  int succeeded = 0;
  int failed = 0;
  std::vector<SceneOutcome> scenes;  // run logs only; heavy payloads dropped after writing
};

inline std::string scene_name(std::size_t prompt_index, int variant) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "p%04zu_v%d", prompt_index, variant);
  return buf;
}

// Generates every (prompt, variant) pair with `cfg.jobs` worker threads. A
// failed scene is logged and the batch continues.
inline BatchReport generate_batch(const World& world, const LlmClient& client, const GenerateConfig& cfg,
                                  const std::vector<std::string>& prompts, const std::filesystem::path& out_dir) {
  struct Job {
    std::size_t prompt;
    int variant;
  };
  std::vector<Job> jobs;
  for (std::size_t p = 0; p < prompts.size(); ++p)
    for (int v = 0; v < cfg.variants; ++v) jobs.push_back({p, v});
  BatchReport report;
  report.scenes.resize(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      const Job& j = jobs[i];
      const std::uint64_t seed = mix_seed(mix_seed(cfg.seed, j.prompt), static_cast<std::uint64_t>(j.variant));
      const std::string id = scene_name(j.prompt, j.variant);
      SceneOutcome s = generate_scene(world, client, cfg, prompts[j.prompt], seed, id);
      try {
        write_scene(s, out_dir / id);
      } catch (const Error& e) {
        s.ok = false;
        s.error_kind = e.kind();
        s.error = e.what();
      }
      s.manifest.reset();
      s.samples.clear();
      report.scenes[i] = std::move(s);
    }
  };
  const int n = std::max(1, std::min<int>(cfg.jobs, static_cast<int>(jobs.size())));
  std::vector<std::thread> threads;
  for (int t = 1; t < n; ++t) threads.emplace_back(worker);
  worker();
  for (auto& t : threads) t.join();

  json summary = json::array();
  for (const auto& s : report.scenes) {
    (s.ok ? report.succeeded : report.failed)++;
    summary.push_back({{"scene_id", s.scene_id}, {"ok", s.ok}, {"error_kind", s.error_kind}, {"error", s.error}});
  }
  std::filesystem::create_directories(out_dir);
  std::ofstream(out_dir / "summary.json") << summary.dump(2) << '\n';
  return report;
}

// Prompt file: one task description per line; blank lines and '#' comments skipped.
inline std::vector<std::string> load_prompts(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open prompt file " + path.string());
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    const auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos || line[b] == '#') continue;
    const auto e = line.find_last_not_of(" \t\r");
    out.push_back(line.substr(b, e - b + 1));
  }
  return out;
}

}  // namespace funscene
