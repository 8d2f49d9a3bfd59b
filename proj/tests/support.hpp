#pragma once

// Generators and independent oracles shared by the unit tests and the
// acceptance binary.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <set>
#include <string>
#include <vector>

#include <sys/wait.h>

#include "funscene/arrangement.hpp"
#include "funscene/asset_index.hpp"
#include "funscene/layout.hpp"
#include "funscene/layout_check.hpp"
#include "funscene/random.hpp"

namespace support {

using namespace funscene;

// ---------------------------------------------------------------------------
// Retrieval

inline std::vector<float> random_vec(Rng& rng, std::uint32_t dim) {
  std::vector<float> v(dim);
  for (;;) {
    double n = 0.0;
    for (auto& f : v) {
      f = static_cast<float>(rng.uniform(-1.0, 1.0));
      n += static_cast<double>(f) * f;
    }
    if (n > 1e-6) return v;
  }
}

inline EmbeddingIndex random_index(Rng& rng, std::size_t entries, std::uint32_t dim) {
  EmbeddingIndex index(dim);
  for (std::size_t i = 0; i < entries; ++i) {
    const auto t = random_vec(rng, dim), im = random_vec(rng, dim);
    char id[16];
    std::snprintf(id, sizeof id, "a%04zu", i);
    index.add(id, t, im);
  }
  return index;
}

// Scalar-loop cosine in long double, written without the library helpers.
inline double oracle_cosine(const std::vector<float>& a, const float* b, std::size_t n) {
  long double ab = 0, aa = 0, bb = 0;
  for (std::size_t i = 0; i < n; ++i) {
    ab += static_cast<long double>(a[i]) * b[i];
    aa += static_cast<long double>(a[i]) * a[i];
    bb += static_cast<long double>(b[i]) * b[i];
  }
  return static_cast<double>(ab / std::sqrt(aa * bb));
}

inline double oracle_ensemble(const QueryVectors& q, const EmbeddingIndex& index, std::size_t row, double w = 0.5) {
  return w * oracle_cosine(q.text, index.text_vec(row).data(), index.dim()) +
         (1.0 - w) * oracle_cosine(q.for_image, index.image_vec(row).data(), index.dim());
}

// Three entries whose ensemble scores against `query` are 0.9, 0.5 and 0.1:
// each entry vector is (s, sqrt(1 - s^2), 0, ...) on both channels, and the
// query is the first basis vector.
struct Engineered {
  EmbeddingIndex index{8};
  QueryVectors query;
};

inline Engineered engineered_index() {
  Engineered e;
  e.query.text.assign(8, 0.0f);
  e.query.text[0] = 1.0f;
  e.query.for_image = e.query.text;
  for (const auto& [id, s] : std::vector<std::pair<std::string, double>>{{"high", 0.9}, {"mid", 0.5}, {"low", 0.1}}) {
    std::vector<float> v(8, 0.0f);
    v[0] = static_cast<float>(s);
    v[1] = static_cast<float>(std::sqrt(1.0 - s * s));
    e.index.add(id, v, v);
  }
  return e;
}

// ---------------------------------------------------------------------------
// Arrangement

// Element sets with a mix of uniform coordinates, coarse values that produce
// exact ties, and jittered 2x2 grids.
inline std::vector<FunctionalElement> random_elements(Rng& rng, std::size_t count) {
  std::vector<FunctionalElement> out;
  const int style = static_cast<int>(rng.below(3));
  for (std::size_t i = 0; i < count; ++i) {
    FunctionalElement e;
    e.part_id = "p" + std::to_string(i);
    e.label = "handle";
    e.enriched_label = "drawer handle";
    if (style == 0) {
      e.centroid2 = {rng.unit(), rng.unit()};
    } else if (style == 1) {
      e.centroid2 = {static_cast<double>(rng.below(5)) / 4.0, static_cast<double>(rng.below(5)) / 4.0};
    } else {
      const double cx = (i % 2) ? 0.25 : 0.75, cy = ((i / 2) % 2) ? 0.25 : 0.75;
      e.centroid2 = {std::clamp(cx + rng.uniform(-0.12, 0.12), 0.0, 1.0), std::clamp(cy + rng.uniform(-0.12, 0.12), 0.0, 1.0)};
    }
    out.push_back(e);
  }
  return out;
}

inline std::vector<SpatialQuery> queries_of_kind(QueryKind kind) {
  std::vector<SpatialQuery> out;
  if (kind == QueryKind::grid_cell) {
    for (GridRow r : {GridRow::top, GridRow::bottom})
      for (GridCol c : {GridCol::left, GridCol::right}) out.push_back({kind, 0, r, c});
  } else if (kind == QueryKind::nth_from_left || kind == QueryKind::nth_from_right || kind == QueryKind::nth_vertical ||
             kind == QueryKind::nth_from_bottom) {
    for (int n = 1; n <= 4; ++n) out.push_back({kind, n});
  } else {
    out.push_back({kind, 0});
  }
  return out;
}

inline const std::vector<QueryKind>& all_query_kinds() {
  static const std::vector<QueryKind> kinds{QueryKind::leftmost,     QueryKind::rightmost,       QueryKind::nth_from_left,
                                            QueryKind::nth_from_right, QueryKind::top,           QueryKind::bottom,
                                            QueryKind::nth_vertical,  QueryKind::nth_from_bottom, QueryKind::grid_cell,
                                            QueryKind::unique};
  return kinds;
}

// Re-derives from scratch whether `chosen` answers `q` unambiguously: for an
// ordinal on one axis, exactly n-1 elements lie strictly beyond it in the
// counting direction and none lies within tie_eps; for a grid cell, some pair
// of cut lines with clearance tie_eps splits the set into four non-empty
// quadrants with `chosen` alone in the requested one.
inline bool oracle_accepts(const std::vector<FunctionalElement>& elements, const SpatialQuery& q,
                           const std::string& chosen_id, double tie_eps) {
  const auto it = std::find_if(elements.begin(), elements.end(), [&](const auto& e) { return e.part_id == chosen_id; });
  if (it == elements.end()) return false;
  const FunctionalElement& c = *it;
  if (q.kind == QueryKind::unique) return elements.size() == 1;
  if (q.kind == QueryKind::grid_cell) {
    std::vector<double> xs, ys;
    for (const auto& e : elements) {
      xs.push_back(e.centroid2.x);
      ys.push_back(e.centroid2.y);
    }
    auto cuts = [&](std::vector<double> v) {
      std::sort(v.begin(), v.end());
      std::vector<double> out;
      for (std::size_t i = 1; i < v.size(); ++i)
        if (v[i] - v[i - 1] > tie_eps) out.push_back((v[i] + v[i - 1]) / 2);
      return out;
    };
    const bool want_top = q.row == GridRow::top, want_left = q.col == GridCol::left;
    for (double tx : cuts(xs)) {
      for (double ty : cuts(ys)) {
        int count[2][2] = {{0, 0}, {0, 0}};
        for (const auto& e : elements) ++count[e.centroid2.y > ty][e.centroid2.x > tx];
        if (!count[0][0] || !count[0][1] || !count[1][0] || !count[1][1]) continue;
        if (count[want_top][want_left] != 1) continue;
        if ((c.centroid2.y > ty) == want_top && (c.centroid2.x > tx) == want_left) return true;
      }
    }
    return false;
  }
  const bool horizontal = q.kind == QueryKind::leftmost || q.kind == QueryKind::rightmost ||
                          q.kind == QueryKind::nth_from_left || q.kind == QueryKind::nth_from_right;
  // +1: counting from the high end (left or top); -1: from the low end.
  const double sign = (q.kind == QueryKind::leftmost || q.kind == QueryKind::nth_from_left || q.kind == QueryKind::top ||
                       q.kind == QueryKind::nth_vertical)
                          ? 1.0
                          : -1.0;
  const std::size_t n = q.is_nth() ? static_cast<std::size_t>(q.n) : 1;
  const double cv = horizontal ? c.centroid2.x : c.centroid2.y;
  std::size_t beyond = 0;
  for (const auto& e : elements) {
    if (e.part_id == c.part_id) continue;
    const double v = horizontal ? e.centroid2.x : e.centroid2.y;
    if (std::abs(v - cv) < tie_eps) return false;
    if (sign * (v - cv) > 0) ++beyond;
  }
  return beyond == n - 1;
}

// ---------------------------------------------------------------------------
// Layout

struct Instance {
  Room room;
  std::vector<SolveObject> required;
  std::vector<SolveObject> extras;
  SolverOptions opt;
};

inline std::vector<SolveObject> all_objects(const Instance& in) {
  auto out = in.required;
  out.insert(out.end(), in.extras.begin(), in.extras.end());
  return out;
}

// Random room 3-8 m with an optional door, 2-6 objects and 1-6 clauses.
// Objects named by a hard clause are required; the rest are extras. An
// object stacked with on-top-of is mounted on top of its reference.
inline Instance random_instance(Rng& rng, std::size_t min_objects = 2, std::size_t max_objects = 6) {
  Instance in;
  in.room.width = std::round(rng.uniform(3.0, 8.0) * 10) / 10;
  in.room.depth = std::round(rng.uniform(3.0, 8.0) * 10) / 10;
  if (rng.below(2)) {
    const Wall w = static_cast<Wall>(rng.below(4));
    const double len = in.room.wall_length(w);
    const double lo = std::round(rng.uniform(0.0, len - 0.9) * 10) / 10;
    in.room.openings.push_back({w, lo, std::min(lo + 0.9, len), ObjectType::door});
  }
  const std::size_t n = min_objects + rng.below(max_objects - min_objects + 1);
  std::vector<SolveObject> objects(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto& o = objects[i];
    o.handle = "obj" + std::to_string(i);
    o.dims = {std::round(rng.uniform(0.3, 1.6) * 10) / 10, std::round(rng.uniform(0.3, 1.2) * 10) / 10,
              std::round(rng.uniform(0.3, 2.0) * 10) / 10};
    if (rng.below(8) == 0) {
      o.mount = Mount::wall;
      o.dims.y = 0.1;
      o.dims.z = 0.3;
      o.elevation = 1.2;
    }
  }
  const std::size_t clauses = 1 + rng.below(6);
  static const ClauseKind kinds[] = {ClauseKind::central,  ClauseKind::corner,      ClauseKind::against_wall,
                                     ClauseKind::left_of,  ClauseKind::right_of,    ClauseKind::in_front_of,
                                     ClauseKind::behind,   ClauseKind::near,        ClauseKind::on_top_of};
  std::set<std::size_t> stacked;
  for (std::size_t k = 0; k < clauses; ++k) {
    Clause c;
    const std::size_t s = rng.below(n);
    c.subject = objects[s].handle;
    c.kind = kinds[rng.below(9)];
    if (n < 2 && is_relative(c.kind)) c.kind = ClauseKind::central;
    if (is_relative(c.kind)) {
      std::size_t r = rng.below(n - 1);
      if (r >= s) ++r;
      c.reference = objects[r].handle;
      if (c.kind == ClauseKind::on_top_of) {
        // Stack only a floor object on a floor object, once, without cycles.
        if (objects[s].mount != Mount::floor || objects[r].mount != Mount::floor || stacked.contains(s) ||
            stacked.contains(r)) {
          c.kind = ClauseKind::near;
        } else {
          objects[s].mount = Mount::top;
          objects[s].dims.x = std::min(objects[s].dims.x, objects[r].dims.x);
          objects[s].dims.y = std::min(objects[s].dims.y, objects[r].dims.y);
          stacked.insert(s);
          stacked.insert(r);
        }
      }
    } else if (c.kind == ClauseKind::against_wall && rng.below(2)) {
      c.wall = static_cast<Wall>(rng.below(4));
    }
    if (rng.below(3) == 0) {
      c.hardness = Hardness::soft;
      c.weight = 1.0 + static_cast<double>(rng.below(3));
    }
    objects[s].clauses.push_back(c);
  }
  std::set<std::string> required;
  for (const auto& o : objects)
    for (const auto& c : o.clauses)
      if (c.hardness == Hardness::hard) {
        required.insert(c.subject);
        if (c.reference) required.insert(*c.reference);
      }
  // A stacked object travels with its host.
  for (const auto& o : objects)
    for (const auto& c : o.clauses)
      if (c.kind == ClauseKind::on_top_of && o.mount == Mount::top && required.contains(o.handle))
        required.insert(*c.reference);
  for (auto& o : objects) (required.contains(o.handle) ? in.required : in.extras).push_back(std::move(o));
  in.opt.time_limit_s = 2.0;
  in.opt.seed = rng.next();
  return in;
}

// Lattice of candidate center coordinates: every multiple of `step` strictly
// inside [lo, hi], plus both ends.
inline std::vector<double> lattice(double lo, double hi, double step) {
  std::vector<double> out;
  if (lo > hi + 1e-9) return out;
  hi = std::max(hi, lo);
  out.push_back(lo);
  for (long long k = static_cast<long long>(std::floor(lo / step)) - 1; static_cast<double>(k) * step < hi + step; ++k) {
    const double v = static_cast<double>(k) * step;
    if (v > lo + 1e-9 && v < hi - 1e-9) out.push_back(v);
  }
  if (hi > lo + 1e-9) out.push_back(hi);
  return out;
}

inline std::vector<Placement> enumerate_poses(const SolveObject& o, const Room& room, double step,
                                              const Placement* host) {
  std::vector<Placement> out;
  auto make = [&](Vec2 c, int yaw, double z, std::optional<Wall> w) {
    out.push_back({o.handle, o.asset_id, c, yaw, o.dims, o.front_axis, z, w});
  };
  if (o.mount == Mount::wall) {
    for (Wall w : {Wall::S, Wall::E, Wall::N, Wall::W}) {
      const double hw = o.dims.x / 2, hd = o.dims.y / 2;
      for (double t : lattice(hw, room.wall_length(w) - hw, step)) {
        if (w == Wall::S) make({t, hd}, 0, o.elevation, w);
        if (w == Wall::E) make({room.width - hd, t}, 90, o.elevation, w);
        if (w == Wall::N) make({t, room.depth - hd}, 180, o.elevation, w);
        if (w == Wall::W) make({hd, t}, 270, o.elevation, w);
      }
    }
    return out;
  }
  Rect area{{0, 0}, {room.width, room.depth}};
  double z = 0.0;
  if (host) {
    area = host->bounds();
    z = host->top();
  }
  for (int yaw : {0, 90, 180, 270}) {
    const bool quarter = yaw % 180 != 0;
    const double hx = (quarter ? o.dims.y : o.dims.x) / 2, hy = (quarter ? o.dims.x : o.dims.y) / 2;
    for (double x : lattice(area.min.x + hx, area.max.x - hx, step))
      for (double y : lattice(area.min.y + hy, area.max.y - hy, step)) make({x, y}, yaw, z, std::nullopt);
  }
  return out;
}

inline std::optional<std::string> host_of(const SolveObject& o) {
  if (o.mount != Mount::top) return std::nullopt;
  for (const auto& c : o.clauses)
    if (c.kind == ClauseKind::on_top_of) return c.reference;
  return std::nullopt;
}

// Exhaustive search over every lattice pose of up to two required objects,
// validated by the independent checker alone. Returns true iff some
// assignment has zero violations.
inline bool exhaustive_feasible(const Instance& in, const std::vector<Clause>& hard) {
  if (in.required.size() > 2) throw InvalidArgument("exhaustive search supports at most two objects");
  SceneLayout layout;
  layout.room = in.room;
  for (const auto& o : in.required) layout.required_set.insert(o.handle);
  if (in.required.empty()) return check_solution(layout, hard, in.opt).empty();

  std::vector<SolveObject> order = in.required;
  if (order.size() == 2 && host_of(order[0]) == order[1].handle) std::swap(order[0], order[1]);
  const auto first = enumerate_poses(order[0], in.room, in.opt.grid_step, nullptr);
  for (const auto& a : first) {
    if (order.size() == 1) {
      layout.placements = {a};
      if (check_solution(layout, hard, in.opt).empty()) return true;
      continue;
    }
    const bool stacked = host_of(order[1]) == order[0].handle;
    for (const auto& b : enumerate_poses(order[1], in.room, in.opt.grid_step, stacked ? &a : nullptr)) {
      layout.placements = {a, b};
      if (check_solution(layout, hard, in.opt).empty()) return true;
    }
  }
  return false;
}

// ---------------------------------------------------------------------------
// Files and processes

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// FNV-1a over the bytes of a file.
inline std::uint64_t file_digest(const std::filesystem::path& p) {
  std::uint64_t h = 1469598103934665603ull;
  for (const unsigned char c : read_file(p)) h = (h ^ c) * 1099511628211ull;
  return h;
}

// Digest of every regular file under `dir` except run logs, which carry timings.
inline std::map<std::string, std::uint64_t> tree_digest(const std::filesystem::path& dir) {
  std::map<std::string, std::uint64_t> out;
  for (const auto& e : std::filesystem::recursive_directory_iterator(dir))
    if (e.is_regular_file() && e.path().filename() != "run_log.json")
      out[std::filesystem::relative(e.path(), dir).string()] = file_digest(e.path());
  return out;
}

inline std::filesystem::path fresh_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("funscene_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

struct RunResult {
  int status = -1;
  std::string out;
};

// Runs a shell command, capturing stdout and stderr together.
inline RunResult run(const std::string& cmd) {
  RunResult r;
  FILE* pipe = popen((cmd + " 2>&1").c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  for (std::size_t n; (n = fread(buf, 1, sizeof buf, pipe)) > 0;) r.out.append(buf, n);
  const int raw = pclose(pipe);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

}  // namespace support
