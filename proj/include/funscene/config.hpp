#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>

#include "funscene/core_types.hpp"
#include "funscene/layout.hpp"
#include "funscene/scene_export.hpp"

namespace funscene {

enum class LlmMode { replay, record, http };
enum class ArrangementMode { llm, engine };

struct LlmConfig {
  LlmMode mode = LlmMode::replay;
  std::filesystem::path cassette;
  std::string endpoint;
  std::string model;
  std::string key_env = "FUNSCENE_LLM_KEY";
  int attempts = 3;
  int max_in_flight = 4;
};

struct RoomConfig {
  double width_min = 4.0, width_max = 6.0;
  double depth_min = 4.0, depth_max = 6.0;
  double door_width = 0.9;
  int attempts = 3;  // fresh room draws before a scene is given up
};

struct GenerateConfig {
  std::filesystem::path assets_dir;
  std::filesystem::path annotated_index;    // embeddings of the part-annotated assets
  std::filesystem::path unannotated_index;  // embeddings of the plain assets
  std::optional<std::filesystem::path> query_index;
  bool hashed_queries = true;
  std::optional<std::filesystem::path> labels_path;
  double threshold = 0.25;
  double text_weight = 0.5;
  ArrangementMode arrangement = ArrangementMode::llm;
  LlmConfig llm;
  RoomConfig room;
  SolverOptions solver;
  OrbitOptions orbit;
  int trajectories = 1;
  Intrinsics camera;
  FilterMode filter = FilterMode::synthetic_style;
  FilterOptions filter_options;
  int stride = 3;
  int top_k = 5;
  int variants = 1;  // scenes generated per prompt
  std::uint64_t seed = 0;
  int jobs = 1;
};

namespace detail {

template <class T>
void read_opt(const json& j, const char* key, T& out) {
  if (j.contains(key) && !j.at(key).is_null()) out = j.at(key).get<T>();
}

inline std::filesystem::path resolve_path(const std::filesystem::path& base, const std::string& p) {
  const std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

}  // namespace detail

// Relative paths resolve against `base` (the config file's directory).
inline GenerateConfig config_from_json(const json& j, const std::filesystem::path& base = ".") {
  using detail::read_opt;
  GenerateConfig c;
  try {
    auto path = [&](const char* key) { return detail::resolve_path(base, j.at(key).get<std::string>()); };
    c.assets_dir = path("assets_dir");
    c.annotated_index = path("annotated_index");
    c.unannotated_index = path("unannotated_index");
    if (j.contains("query_index") && !j["query_index"].is_null()) c.query_index = path("query_index");
    if (j.contains("labels") && !j["labels"].is_null()) c.labels_path = path("labels");
    read_opt(j, "hashed_queries", c.hashed_queries);
    read_opt(j, "threshold", c.threshold);
    read_opt(j, "text_weight", c.text_weight);
    if (j.contains("arrangement")) {
      const auto a = j["arrangement"].get<std::string>();
      if (a == "llm") c.arrangement = ArrangementMode::llm;
      else if (a == "engine") c.arrangement = ArrangementMode::engine;
      else throw ConfigError("arrangement must be llm or engine");
    }
    if (j.contains("llm")) {
      const auto& l = j["llm"];
      const auto mode = l.value("mode", std::string("replay"));
      if (mode == "replay") c.llm.mode = LlmMode::replay;
      else if (mode == "record") c.llm.mode = LlmMode::record;
      else if (mode == "http") c.llm.mode = LlmMode::http;
      else throw ConfigError("llm.mode must be replay, record or http");
      if (l.contains("cassette")) c.llm.cassette = detail::resolve_path(base, l["cassette"].get<std::string>());
      read_opt(l, "endpoint", c.llm.endpoint);
      read_opt(l, "model", c.llm.model);
      read_opt(l, "key_env", c.llm.key_env);
      read_opt(l, "attempts", c.llm.attempts);
      read_opt(l, "max_in_flight", c.llm.max_in_flight);
    }
    if (j.contains("room")) {
      const auto& r = j["room"];
      if (r.contains("width")) {
        c.room.width_min = r["width"].at(0).get<double>();
        c.room.width_max = r["width"].at(1).get<double>();
      }
      if (r.contains("depth")) {
        c.room.depth_min = r["depth"].at(0).get<double>();
        c.room.depth_max = r["depth"].at(1).get<double>();
      }
      read_opt(r, "door_width", c.room.door_width);
      read_opt(r, "attempts", c.room.attempts);
    }
    if (j.contains("solver")) {
      const auto& s = j["solver"];
      read_opt(s, "grid_step", c.solver.grid_step);
      read_opt(s, "time_limit_s", c.solver.time_limit_s);
      read_opt(s, "snap", c.solver.snap);
      read_opt(s, "near_radius", c.solver.near_radius);
      read_opt(s, "central_band", c.solver.central_band);
      read_opt(s, "door_clearance", c.solver.door_clearance);
    }
    if (j.contains("orbit")) {
      const auto& o = j["orbit"];
      read_opt(o, "n_frames", c.orbit.n_frames);
      read_opt(o, "radius_min", c.orbit.radius_min);
      read_opt(o, "radius_max", c.orbit.radius_max);
      read_opt(o, "height_min", c.orbit.height_min);
      read_opt(o, "height_max", c.orbit.height_max);
      read_opt(o, "half_angle_deg", c.orbit.half_angle_deg);
      read_opt(o, "trajectories", c.trajectories);
    }
    if (j.contains("camera")) {
      const auto& k = j["camera"];
      read_opt(k, "fx", c.camera.fx);
      read_opt(k, "fy", c.camera.fy);
      read_opt(k, "cx", c.camera.cx);
      read_opt(k, "cy", c.camera.cy);
      read_opt(k, "width", c.camera.width);
      read_opt(k, "height", c.camera.height);
    }
    if (j.contains("annotate")) {
      const auto& a = j["annotate"];
      if (a.contains("mode")) {
        const auto m = filter_mode_from_string(a["mode"].get<std::string>());
        if (!m) throw ConfigError("annotate.mode must be real_style or synthetic_style");
        c.filter = *m;
      }
      read_opt(a, "stride", c.stride);
      read_opt(a, "k", c.top_k);
    }
    read_opt(j, "variants", c.variants);
    read_opt(j, "seed", c.seed);
    read_opt(j, "jobs", c.jobs);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad config: ") + e.what());
  }
  if (c.variants < 1 || c.jobs < 1 || c.trajectories < 1) throw ConfigError("variants, jobs and trajectories must be >= 1");
  if (!(c.room.width_min > 0 && c.room.width_min <= c.room.width_max && c.room.depth_min > 0 &&
        c.room.depth_min <= c.room.depth_max))
    throw ConfigError("invalid room size range");
  return c;
}

inline GenerateConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return config_from_json(j, path.parent_path().empty() ? std::filesystem::path(".") : path.parent_path());
}

}  // namespace funscene
