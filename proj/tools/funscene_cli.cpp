// funscene: batch generation and inspection commands.
//
// Exit codes: 0 success, 1 failure (or no scene generated), 2 configuration error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "funscene/asset_index.hpp"
#include "funscene/config.hpp"
#include "funscene/layout.hpp"
#include "funscene/layout_check.hpp"
#include "funscene/llm_http.hpp"
#include "funscene/pipeline.hpp"
#include "funscene/scene_export.hpp"

namespace fs = std::filesystem;
using namespace funscene;

namespace {

constexpr int kOk = 0;
constexpr int kFailed = 1;
constexpr int kConfigError = 2;

std::string read_text(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw IoError("cannot read " + p.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// ---------------------------------------------------------------------------

struct GenerateArgs {
  std::vector<std::string> prompts;
  std::string prompt_file;
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<int> jobs;
  std::optional<int> variants;
  std::string llm_mode;
  std::string arrangement;
};

int cmd_generate(const GenerateArgs& a) {
  GenerateConfig cfg;
  World world;
  std::vector<std::string> prompts = a.prompts;
  try {
    cfg = load_config(a.config);
    if (a.seed) cfg.seed = *a.seed;
    if (a.jobs) cfg.jobs = *a.jobs;
    if (a.variants) cfg.variants = *a.variants;
    if (a.llm_mode == "replay") cfg.llm.mode = LlmMode::replay;
    else if (a.llm_mode == "record") cfg.llm.mode = LlmMode::record;
    else if (a.llm_mode == "http") cfg.llm.mode = LlmMode::http;
    if (a.arrangement == "engine") cfg.arrangement = ArrangementMode::engine;
    else if (a.arrangement == "llm") cfg.arrangement = ArrangementMode::llm;
    if (!a.prompt_file.empty()) {
      const auto more = load_prompts(a.prompt_file);
      prompts.insert(prompts.end(), more.begin(), more.end());
    }
    if (prompts.empty()) throw ConfigError("no prompts given");
    world = load_world(cfg);
  } catch (const Error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  }

  std::shared_ptr<Cassette> recorded;
  std::shared_ptr<LlmBackend> backend;
  try {
    std::shared_ptr<LlmBackend> live;
    if (cfg.llm.mode != LlmMode::replay)
      live = std::make_shared<HttpChatBackend>(
          http_options_from_env({cfg.llm.endpoint, cfg.llm.model, "", 0.0, 120}, cfg.llm.key_env));
    backend = make_backend(cfg.llm, live, &recorded);
  } catch (const Error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  }
  LlmClient client(backend, {cfg.llm.attempts, cfg.llm.max_in_flight});

  const BatchReport report = generate_batch(world, client, cfg, prompts, a.out);
  if (recorded) {
    Cassette merged;
    if (fs::exists(cfg.llm.cassette)) merged = Cassette::load(cfg.llm.cassette);
    for (const auto& [key, r] : recorded->records()) merged.add(r);
    merged.save(cfg.llm.cassette);
  }
  for (const auto& s : report.scenes) {
    if (s.ok) std::cout << s.scene_id << "\tok\n";
    else std::cout << s.scene_id << "\tfailed\t" << s.error_kind << ": " << s.error << '\n';
  }
  std::cout << report.succeeded << " of " << report.scenes.size() << " scenes generated\n";
  return report.succeeded > 0 ? kOk : kFailed;
}

// ---------------------------------------------------------------------------

struct SolveArgs {
  std::string clauses;
  std::string objects;
  std::string room;
  std::string out;
  std::string check;
  std::uint64_t seed = 0;
  double grid_step = 0.1;
  double time_limit = 10.0;
  bool no_shuffle = false;
};

Room parse_room(const std::string& spec) {
  if (spec.empty()) throw ConfigError("--room is required");
  if (fs::exists(spec)) {
    Room r;
    try {
      json::parse(read_text(spec)).get_to(r);
    } catch (const json::exception& e) {
      throw ConfigError("bad room file: " + std::string(e.what()));
    }
    return r;
  }
  Room r;
  char x = 0;
  std::istringstream in(spec);
  if (!(in >> r.width >> x >> r.depth) || (x != 'x' && x != 'X')) throw ConfigError("room must be WxD or a JSON file");
  return r;
}

int cmd_check(const SolveArgs& a) {
  const SceneManifest m = read_manifest(a.check);
  std::vector<Clause> hard;
  for (const auto& c : m.clauses)
    if (c.hardness == Hardness::hard) hard.push_back(c);
  const auto violations = check_solution(m.layout, hard);
  for (const auto& v : violations) std::cout << v << '\n';
  if (violations.empty()) std::cout << "ok: no violations\n";
  return violations.empty() ? kOk : kFailed;
}

int cmd_solve(const SolveArgs& a) {
  if (!a.check.empty()) return cmd_check(a);
  Room room;
  std::vector<Clause> clauses;
  json objects = json::array();
  try {
    room = parse_room(a.room);
    if (a.clauses.empty()) throw ConfigError("--clauses is required");
    clauses = parse_clause_text(read_text(a.clauses));
    if (!a.objects.empty()) objects = json::parse(read_text(a.objects));
  } catch (const json::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const Error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  }

  // Objects not described in the objects file are 1 m cubes; an object is
  // required when it takes part in a hard clause.
  std::vector<std::string> order;
  std::map<std::string, SolveObject> by_handle;
  std::set<std::string> required;
  auto touch = [&](const std::string& h) {
    if (by_handle.contains(h)) return;
    SolveObject o;
    o.handle = h;
    by_handle[h] = o;
    order.push_back(h);
  };
  for (const auto& j : objects) {
    const std::string h = j.at("handle").get<std::string>();
    touch(h);
    SolveObject& o = by_handle[h];
    o.asset_id = j.value("asset_id", "");
    if (j.contains("dims")) j.at("dims").get_to(o.dims);
    if (j.contains("front_axis")) j.at("front_axis").get_to(o.front_axis);
    if (j.contains("mount")) o.mount = mount_from_string(j["mount"].get<std::string>()).value_or(Mount::floor);
    o.elevation = j.value("elevation", 0.0);
    if (j.value("required", false)) required.insert(h);
  }
  for (const auto& c : clauses) {
    touch(c.subject);
    if (c.reference) touch(*c.reference);
    if (c.hardness == Hardness::hard) {
      required.insert(c.subject);
      if (c.reference) required.insert(*c.reference);
    }
    by_handle[c.subject].clauses.push_back(c);
  }
  std::vector<SolveObject> req, extra;
  for (const auto& h : order) (required.contains(h) ? req : extra).push_back(by_handle[h]);

  SolverOptions opt;
  opt.seed = a.seed;
  opt.grid_step = a.grid_step;
  opt.time_limit_s = a.time_limit;
  opt.shuffle = !a.no_shuffle;
  SolveResult result;
  try {
    result = solve(room, req, extra, opt);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  }
  for (const auto& w : result.warnings) std::cerr << "warning: " << w << '\n';
  if (!result.ok()) {
    const auto& f = result.failure();
    std::cout << "infeasible (" << to_string(f.reason) << "): " << f.detail << '\n';
    if (!f.blocking_object.empty()) std::cout << "first exhausted object: " << f.blocking_object << '\n';
    return kFailed;
  }
  SceneManifest m;
  m.scene_id = fs::path(a.clauses).stem().string();
  m.seed = a.seed;
  m.layout = result.layout();
  m.instance_ids = assign_instance_ids(m.layout);
  m.clauses = clauses;
  const auto violations = check_solution(m.layout, result.enforced, opt);
  for (const auto& v : violations) std::cerr << "violation: " << v << '\n';
  if (a.out.empty()) {
    std::cout << manifest_to_json(m).dump(2) << '\n';
  } else {
    write_manifest(m, a.out);
    std::cout << "wrote " << a.out << '\n';
  }
  return violations.empty() ? kOk : kFailed;
}

// ---------------------------------------------------------------------------

struct RetrieveArgs {
  std::string query;
  std::string index;
  std::string query_index;
  std::optional<std::size_t> top_k;
  std::optional<double> threshold;
  double text_weight = 0.5;
};

int cmd_retrieve(const RetrieveArgs& a) {
  EmbeddingIndex index{1};
  QueryVectors q;
  try {
    index = EmbeddingIndex::load(a.index);
    std::optional<EmbeddingIndex> table;
    if (!a.query_index.empty()) table = EmbeddingIndex::load(a.query_index);
    q = QueryEmbeddings(std::move(table), true, index.dim()).lookup(a.query);
  } catch (const Error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  }
  try {
    std::vector<Candidate> rows;
    if (a.threshold) {
      rows = retrieve_candidates(q, index, *a.threshold, a.text_weight);
      if (a.top_k && rows.size() > *a.top_k) rows.resize(*a.top_k);
    } else {
      const std::size_t k = a.top_k.value_or(1);
      if (k == 1) {
        const std::string best = retrieve_best(q, index, a.text_weight);
        rows.push_back({best, ensemble_score(q, index, *index.row_of(best), a.text_weight)});
      } else {
        if (index.empty()) throw InvalidArgument("cannot retrieve from an empty index");
        rows = score_all(q, index, a.text_weight);
        std::sort(rows.begin(), rows.end(), candidate_order);
        if (rows.size() > k) rows.resize(k);
      }
    }
    std::cout << "rank\tasset_id\tscore\n";
    for (std::size_t i = 0; i < rows.size(); ++i) {
      char score[32];
      std::snprintf(score, sizeof score, "%.6f", rows[i].score);
      std::cout << i + 1 << '\t' << rows[i].asset_id << '\t' << score << '\n';
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailed;
  }
  return kOk;
}

// ---------------------------------------------------------------------------

struct AnnotateArgs {
  std::string manifest;
  std::string mode = "synthetic_style";
  int stride = 3;
  int k = 5;
  std::string task;
  std::string out;
};

int cmd_annotate(const AnnotateArgs& a) {
  const auto mode = filter_mode_from_string(a.mode);
  if (!mode) {
    std::cerr << "config error: unknown mode " << a.mode << '\n';
    return kConfigError;
  }
  const SceneManifest m = read_manifest(a.manifest);
  if (m.trajectories.empty()) throw InvalidArgument("manifest has no camera trajectories");
  const std::string task = a.task.empty() ? m.task_description : a.task;
  std::ostringstream lines;
  std::size_t count = 0;
  for (std::size_t t = 0; t < m.trajectories.size(); ++t) {
    const auto frames = annotate_trajectory(m.trajectories[t].cameras, m.target, m.layout);
    const auto kept = select_frames(frames, *mode, a.stride, a.k);
    for (const auto& s : emit_pointing_samples(kept, task, m.scene_id, static_cast<int>(t))) {
      lines << to_json_line(s).dump() << '\n';
      ++count;
    }
  }
  if (a.out.empty()) {
    std::cout << lines.str();
  } else {
    std::ofstream out(a.out);
    if (!out) throw IoError("cannot write " + a.out);
    out << lines.str();
    std::cerr << count << " samples written to " << a.out << '\n';
  }
  return kOk;
}

// ---------------------------------------------------------------------------

int cmd_validate_assets(const std::string& dir) {
  if (!fs::is_directory(dir)) {
    std::cerr << "config error: not a directory: " << dir << '\n';
    return kConfigError;
  }
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.path().extension() == ".json") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::size_t bad = 0;
  std::set<std::string> ids;
  for (const auto& f : files) {
    std::vector<std::string> issues;
    try {
      const AssetRecord a = load_asset_file(f);
      issues = validate_asset(a);
      if (!ids.insert(a.asset_id).second) issues.push_back("duplicate asset id " + a.asset_id);
    } catch (const Error& e) {
      issues.push_back(e.what());
    }
    for (const auto& i : issues) std::cout << f.filename().string() << ": " << i << '\n';
    if (!issues.empty()) ++bad;
  }
  std::cout << files.size() - bad << " of " << files.size() << " asset files valid\n";
  return bad == 0 ? kOk : kFailed;
}

int cmd_import_embeddings(const std::string& input, const std::string& output) {
  std::ifstream in(input);
  if (!in) {
    std::cerr << "config error: cannot open " << input << '\n';
    return kConfigError;
  }
  const EmbeddingIndex index = EmbeddingIndex::import_tabular(in);
  index.save(output);
  std::cout << "imported " << index.size() << " rows of dimension " << index.dim() << " into " << output << '\n';
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Task-conditioned scene generation with functional-element annotations"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* g = app.add_subcommand("generate", "Generate scenes and pointing samples from task descriptions");
  g->add_option("--prompt", gen.prompts, "Task description (repeatable)");
  g->add_option("--prompt-file", gen.prompt_file, "File with one task description per line");
  g->add_option("--config", gen.config, "Configuration file")->required();
  g->add_option("--out", gen.out, "Output directory")->required();
  g->add_option("--seed", gen.seed, "Master seed");
  g->add_option("--jobs", gen.jobs, "Worker threads");
  g->add_option("--variants", gen.variants, "Scenes per prompt");
  g->add_option("--llm-mode", gen.llm_mode, "replay, record or http")->check(CLI::IsMember({"replay", "record", "http"}));
  g->add_option("--arrangement", gen.arrangement, "llm or engine")->check(CLI::IsMember({"llm", "engine"}));

  SolveArgs sol;
  auto* s = app.add_subcommand("solve", "Place objects from a clause file");
  s->add_option("--clauses", sol.clauses, "Clause file");
  s->add_option("--objects", sol.objects, "JSON list of objects with dims");
  s->add_option("--room", sol.room, "Room as WxD meters or a JSON room file");
  s->add_option("--out", sol.out, "Write the manifest here instead of stdout");
  s->add_option("--check", sol.check, "Check an existing manifest instead of solving");
  s->add_option("--seed", sol.seed, "Solver seed");
  s->add_option("--grid-step", sol.grid_step, "Grid step in meters");
  s->add_option("--time-limit", sol.time_limit, "Time limit in seconds");
  s->add_flag("--no-shuffle", sol.no_shuffle, "Try candidates from the room center outwards");

  RetrieveArgs ret;
  auto* r = app.add_subcommand("retrieve", "Rank assets for a text query");
  r->add_option("query", ret.query, "Query text")->required();
  r->add_option("--index", ret.index, "Embedding index")->required();
  r->add_option("--query-index", ret.query_index, "Recorded query embeddings");
  r->add_option("--top-k", ret.top_k, "Number of rows");
  r->add_option("--threshold", ret.threshold, "Keep candidates scoring above this");
  r->add_option("--text-weight", ret.text_weight, "Weight of the text channel");

  AnnotateArgs ann;
  auto* an = app.add_subcommand("annotate", "Emit pointing samples from a manifest");
  an->add_option("--manifest", ann.manifest, "Scene manifest")->required();
  an->add_option("--mode", ann.mode, "real_style or synthetic_style");
  an->add_option("--stride", ann.stride, "Keep every n-th frame");
  an->add_option("--k", ann.k, "Frames kept per trajectory");
  an->add_option("--task", ann.task, "Task description (defaults to the manifest's)");
  an->add_option("--out", ann.out, "Output JSON-lines file");

  std::string asset_dir;
  auto* va = app.add_subcommand("validate-assets", "Check asset metadata files");
  va->add_option("dir", asset_dir, "Asset directory")->required();

  std::string import_in, import_out;
  auto* ie = app.add_subcommand("import-embeddings", "Convert tab-separated embeddings to an index file");
  ie->add_option("--input", import_in, "id<TAB>text floats<TAB>image floats per line")->required();
  ie->add_option("--output", import_out, "Index file")->required();

  CLI11_PARSE(app, argc, argv);
  try {
    if (*g) return cmd_generate(gen);
    if (*s) return cmd_solve(sol);
    if (*r) return cmd_retrieve(ret);
    if (*an) return cmd_annotate(ann);
    if (*va) return cmd_validate_assets(asset_dir);
    if (*ie) return cmd_import_embeddings(import_in, import_out);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailed;
  }
  return kFailed;
}
