#pragma once

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "funscene/core_types.hpp"
#include "funscene/random.hpp"

namespace funscene {

// ---------------------------------------------------------------------------
// Room

enum class Wall { N, E, S, W };

inline std::string to_string(Wall w) {
  switch (w) {
    case Wall::N: return "N";
    case Wall::E: return "E";
    case Wall::S: return "S";
    default: return "W";
  }
}
inline std::optional<Wall> wall_from_string(std::string s) {
  s = to_lower_copy(s);
  if (s == "n" || s == "north") return Wall::N;
  if (s == "e" || s == "east") return Wall::E;
  if (s == "s" || s == "south") return Wall::S;
  if (s == "w" || s == "west") return Wall::W;
  return std::nullopt;
}

struct Opening {
  Wall wall = Wall::S;
  double lo = 0.0;  // span along the wall, meters from the wall's low-coordinate end
  double hi = 0.0;
  ObjectType kind = ObjectType::door;

  bool operator==(const Opening&) const = default;
};

// Plan-view room [0, width] x [0, depth]. S is y = 0, N is y = depth,
// W is x = 0, E is x = width.
struct Room {
  double width = 0.0;
  double depth = 0.0;
  std::vector<Opening> openings;

  double wall_length(Wall w) const { return (w == Wall::N || w == Wall::S) ? width : depth; }

  std::vector<std::string> validate() const {
    std::vector<std::string> issues;
    if (!(width > 0.0 && depth > 0.0)) issues.emplace_back("room dimensions must be positive");
    for (std::size_t i = 0; i < openings.size(); ++i) {
      const auto& o = openings[i];
      if (!(o.lo >= 0.0 && o.hi <= wall_length(o.wall) && o.lo < o.hi))
        issues.push_back("opening " + std::to_string(i) + " lies outside wall " + to_string(o.wall));
      if (o.kind == ObjectType::other) issues.push_back("opening " + std::to_string(i) + " must be a door or window");
      for (std::size_t j = 0; j < i; ++j) {
        const auto& p = openings[j];
        if (p.wall == o.wall && o.lo < p.hi && p.lo < o.hi)
          issues.push_back("openings " + std::to_string(j) + " and " + std::to_string(i) + " overlap");
      }
    }
    return issues;
  }

  bool operator==(const Room&) const = default;
};

// ---------------------------------------------------------------------------
// Clauses

enum class ClauseKind { central, corner, against_wall, left_of, right_of, in_front_of, behind, near, on_top_of };
enum class Hardness { hard, soft };

inline bool is_relative(ClauseKind k) {
  return k == ClauseKind::left_of || k == ClauseKind::right_of || k == ClauseKind::in_front_of ||
         k == ClauseKind::behind || k == ClauseKind::near || k == ClauseKind::on_top_of;
}

inline std::string to_string(ClauseKind k) {
  switch (k) {
    case ClauseKind::central: return "central";
    case ClauseKind::corner: return "corner";
    case ClauseKind::against_wall: return "against-wall";
    case ClauseKind::left_of: return "left-of";
    case ClauseKind::right_of: return "right-of";
    case ClauseKind::in_front_of: return "in-front-of";
    case ClauseKind::behind: return "behind";
    case ClauseKind::near: return "near";
    default: return "on-top-of";
  }
}

struct Clause {
  std::string subject;
  ClauseKind kind = ClauseKind::central;
  std::optional<std::string> reference;
  std::optional<Wall> wall;  // against-wall only
  Hardness hardness = Hardness::hard;
  double weight = 1.0;

  bool operator==(const Clause&) const = default;
};

struct ClauseError : Error {
  explicit ClauseError(const std::string& what) : Error("clause", what) {}
};

// "subject [, reference] | kind [| hard|soft [weight]]"
inline std::string to_string(const Clause& c) {
  std::ostringstream out;
  out << c.subject;
  if (c.reference) out << ", " << *c.reference;
  out << " | " << to_string(c.kind);
  if (c.wall) out << ' ' << to_string(*c.wall);
  if (c.hardness == Hardness::hard) {
    out << " | hard";
  } else {
    out << " | soft " << c.weight;
  }
  return out.str();
}

inline Clause parse_clause(const std::string& line) {
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return std::string{};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  };
  std::vector<std::string> fields;
  {
    std::string cur;
    for (char ch : line) {
      if (ch == '|') {
        fields.push_back(trim(cur));
        cur.clear();
      } else {
        cur += ch;
      }
    }
    fields.push_back(trim(cur));
  }
  if (fields.size() < 2 || fields.size() > 3) throw ClauseError("malformed clause '" + line + "'");

  Clause c;
  const auto comma = fields[0].find(',');
  c.subject = trim(fields[0].substr(0, comma));
  if (comma != std::string::npos) c.reference = trim(fields[0].substr(comma + 1));
  if (c.subject.empty() || (c.reference && c.reference->empty())) throw ClauseError("missing object name in '" + line + "'");

  std::string kind = to_lower_copy(fields[1]);
  std::erase(kind, '<');
  std::erase(kind, '>');
  std::replace(kind.begin(), kind.end(), '_', '-');
  std::string wall_token;
  if (const auto colon = kind.find(':'); colon != std::string::npos) {
    wall_token = trim(kind.substr(colon + 1));
    kind = trim(kind.substr(0, colon));
  }
  if (kind.rfind("against-wall", 0) == 0 || kind.rfind("against wall", 0) == 0) {
    if (wall_token.empty()) wall_token = trim(kind.substr(12));
    kind = "against-wall";
  }
  std::replace(kind.begin(), kind.end(), ' ', '-');
  static const std::map<std::string, ClauseKind> kinds{
      {"central", ClauseKind::central},         {"center", ClauseKind::central},
      {"corner", ClauseKind::corner},           {"against-wall", ClauseKind::against_wall},
      {"edge", ClauseKind::against_wall},       {"left-of", ClauseKind::left_of},
      {"right-of", ClauseKind::right_of},       {"in-front-of", ClauseKind::in_front_of},
      {"front-of", ClauseKind::in_front_of},    {"behind", ClauseKind::behind},
      {"near", ClauseKind::near},               {"next-to", ClauseKind::near},
      {"on-top-of", ClauseKind::on_top_of},     {"on", ClauseKind::on_top_of}};
  const auto k = kinds.find(kind);
  if (k == kinds.end()) throw ClauseError("unknown clause kind '" + fields[1] + "'");
  c.kind = k->second;
  if (!wall_token.empty()) {
    if (c.kind != ClauseKind::against_wall) throw ClauseError("only against-wall takes a wall in '" + line + "'");
    c.wall = wall_from_string(wall_token);
    if (!c.wall) throw ClauseError("unknown wall '" + wall_token + "'");
  }
  if (is_relative(c.kind) != c.reference.has_value())
    throw ClauseError(std::string(is_relative(c.kind) ? "relative clause needs a reference: '" : "absolute clause takes no reference: '") +
                      line + "'");

  if (fields.size() == 3) {
    std::istringstream hs(fields[2]);
    std::string hardness;
    hs >> hardness;
    hardness = to_lower_copy(hardness);
    if (hardness == "hard") {
      c.hardness = Hardness::hard;
    } else if (hardness == "soft") {
      c.hardness = Hardness::soft;
      double w = 1.0;
      if (hs >> w) {
        if (!(w > 0.0)) throw ClauseError("soft clause weight must be positive in '" + line + "'");
        c.weight = w;
      } else if (!hs.eof()) {
        throw ClauseError("bad weight in '" + line + "'");
      }
    } else {
      throw ClauseError("expected hard or soft in '" + line + "'");
    }
    std::string rest;
    if (hs >> rest) throw ClauseError("trailing text in '" + line + "'");
  }
  return c;
}

// One clause per line; blank lines and '#' comments skipped.
inline std::vector<Clause> parse_clause_text(const std::string& text) {
  std::vector<Clause> out;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos || line[b] == '#') continue;
    try {
      out.push_back(parse_clause(line));
    } catch (const ClauseError& e) {
      throw ClauseError("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Placements

enum class Mount { floor, wall, top };

inline std::string to_string(Mount m) {
  switch (m) {
    case Mount::floor: return "floor";
    case Mount::wall: return "wall";
    default: return "top";
  }
}
inline std::optional<Mount> mount_from_string(const std::string& s) {
  const auto l = to_lower_copy(s);
  if (l == "floor") return Mount::floor;
  if (l == "wall") return Mount::wall;
  if (l == "top" || l == "on top" || l == "on-top") return Mount::top;
  return std::nullopt;
}

struct Placement {
  std::string handle;
  std::string asset_id;
  Vec2 center;
  int yaw_deg = 0;  // 0, 90, 180 or 270, counter-clockwise
  Vec3 dims{1.0, 1.0, 1.0};
  Vec2 front_axis{0.0, 1.0};  // canonical front, rotated by yaw in the world
  double elevation = 0.0;     // z of the base
  std::optional<Wall> mounted;

  Vec2 world_front() const { return rotate(front_axis, yaw_deg); }
  double top() const { return elevation + dims.z; }

  // Oriented footprint corners, counter-clockwise.
  std::array<Vec2, 4> footprint() const {
    const double hx = dims.x / 2, hy = dims.y / 2;
    return {center + rotate({-hx, -hy}, yaw_deg), center + rotate({hx, -hy}, yaw_deg),
            center + rotate({hx, hy}, yaw_deg), center + rotate({-hx, hy}, yaw_deg)};
  }
  Rect bounds() const {
    const auto c = footprint();
    Rect r{c[0], c[0]};
    for (const auto& p : c) {
      r.min = {std::min(r.min.x, p.x), std::min(r.min.y, p.y)};
      r.max = {std::max(r.max.x, p.x), std::max(r.max.y, p.y)};
    }
    return r;
  }

  bool operator==(const Placement&) const = default;
};

struct SceneLayout {
  Room room;
  std::vector<Placement> placements;
  std::set<std::string> required_set;
  double score = 0.0;

  const Placement* find(const std::string& handle) const {
    for (const auto& p : placements)
      if (p.handle == handle) return &p;
    return nullptr;
  }
  bool operator==(const SceneLayout&) const = default;
};

struct SolverOptions {
  double grid_step = 0.1;
  double time_limit_s = 10.0;
  std::uint64_t seed = 0;
  bool shuffle = true;  // false: candidates ordered center-out
  double snap = 0.05;
  double near_radius = 1.5;
  double central_band = 1.0 / 3.0;  // width of the central band as a fraction of each axis
  double door_clearance = 0.6;      // floor kept free in front of door openings
  double window_depth = 0.05;
  double door_height = 2.1;
  double window_sill = 0.9;
};

// Volumes that keep placements away from openings.
struct Obstacle {
  Rect rect;
  double zlo = 0.0;
  double zhi = 0.0;
  std::string name;
};

inline Rect opening_rect(const Room& room, const Opening& o, double depth) {
  switch (o.wall) {
    case Wall::S: return {{o.lo, 0.0}, {o.hi, depth}};
    case Wall::N: return {{o.lo, room.depth - depth}, {o.hi, room.depth}};
    case Wall::W: return {{0.0, o.lo}, {depth, o.hi}};
    default: return {{room.width - depth, o.lo}, {room.width, o.hi}};
  }
}

inline std::vector<Obstacle> opening_obstacles(const Room& room, const SolverOptions& opt) {
  std::vector<Obstacle> out;
  for (std::size_t i = 0; i < room.openings.size(); ++i) {
    const auto& o = room.openings[i];
    const bool door = o.kind == ObjectType::door;
    out.push_back({opening_rect(room, o, door ? opt.door_clearance : opt.window_depth), door ? 0.0 : opt.window_sill,
                   opt.door_height, std::string(door ? "door" : "window") + " opening " + std::to_string(i)});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Relation predicates

// "Left of B" is judged by an observer standing in front of B and facing it:
// the direction front(B) x up.
inline Vec2 left_direction(const Vec2& front) { return {front.y, -front.x}; }

inline bool satisfies(const Clause& clause, const std::map<std::string, const Placement*>& placed, const Room& room,
                      const SolverOptions& opt) {
  const auto subject_it = placed.find(clause.subject);
  if (subject_it == placed.end()) return false;
  const Placement& a = *subject_it->second;
  const Rect fa = a.bounds();
  const double s = opt.snap;
  switch (clause.kind) {
    case ClauseKind::central: {
      const double lo = (1.0 - opt.central_band) / 2.0, hi = (1.0 + opt.central_band) / 2.0;
      return a.center.x >= lo * room.width - 1e-9 && a.center.x <= hi * room.width + 1e-9 &&
             a.center.y >= lo * room.depth - 1e-9 && a.center.y <= hi * room.depth + 1e-9;
    }
    case ClauseKind::corner: {
      const bool x_wall = fa.min.x <= s || fa.max.x >= room.width - s;
      const bool y_wall = fa.min.y <= s || fa.max.y >= room.depth - s;
      return x_wall && y_wall;
    }
    case ClauseKind::against_wall: {
      const bool n = fa.max.y >= room.depth - s, e = fa.max.x >= room.width - s;
      const bool so = fa.min.y <= s, w = fa.min.x <= s;
      if (!clause.wall) return n || e || so || w;
      switch (*clause.wall) {
        case Wall::N: return n;
        case Wall::E: return e;
        case Wall::S: return so;
        default: return w;
      }
    }
    default: break;
  }
  const auto ref_it = placed.find(clause.reference.value_or(""));
  if (ref_it == placed.end()) return false;
  const Placement& b = *ref_it->second;
  const Vec2 offset = a.center - b.center;
  switch (clause.kind) {
    case ClauseKind::left_of: return dot(offset, left_direction(b.world_front())) > 1e-9;
    case ClauseKind::right_of: return dot(offset, left_direction(b.world_front())) < -1e-9;
    case ClauseKind::in_front_of: return dot(offset, b.world_front()) > 1e-9;
    case ClauseKind::behind: return dot(offset, b.world_front()) < -1e-9;
    case ClauseKind::near: return norm(offset) <= opt.near_radius + 1e-9;
    case ClauseKind::on_top_of:
      return contains(b.bounds(), fa) && std::abs(a.elevation - b.top()) < 1e-6;
    default: return false;
  }
}

// ---------------------------------------------------------------------------
// Solver

struct SolveObject {
  std::string handle;
  std::string asset_id;
  Vec3 dims{1.0, 1.0, 1.0};
  Vec2 front_axis{0.0, 1.0};
  Mount mount = Mount::floor;
  double elevation = 0.0;  // base height for wall mounts
  std::vector<Clause> clauses;
};

struct Infeasible {
  enum class Reason { unsat, timeout };
  Reason reason = Reason::unsat;
  std::string blocking_object;  // first object left with no valid candidate
  std::string detail;
};

inline std::string to_string(Infeasible::Reason r) { return r == Infeasible::Reason::unsat ? "unsat" : "timeout"; }

struct SolveResult {
  std::variant<SceneLayout, Infeasible> outcome;
  std::vector<std::string> warnings;
  std::vector<Clause> enforced;  // hard clauses pass 1 satisfied, after demotions
  std::size_t nodes = 0;         // candidates examined in the hard pass

  bool ok() const { return std::holds_alternative<SceneLayout>(outcome); }
  const SceneLayout& layout() const { return std::get<SceneLayout>(outcome); }
  const Infeasible& failure() const { return std::get<Infeasible>(outcome); }
};

namespace detail {

inline int wall_yaw(Wall w) {
  switch (w) {
    case Wall::S: return 0;
    case Wall::E: return 90;
    case Wall::N: return 180;
    default: return 270;
  }
}

// Grid multiples of `step` in [lo, hi] plus both end points.
inline std::vector<double> grid_positions(double lo, double hi, double step) {
  std::vector<double> out;
  if (lo > hi + 1e-9) return out;
  if (hi < lo) hi = lo;
  out.push_back(lo);
  for (auto k = static_cast<long long>(std::ceil(lo / step - 1e-9)); k * step <= hi + 1e-9; ++k) {
    const double v = static_cast<double>(k) * step;
    if (v > lo + 1e-9 && v < hi - 1e-9) out.push_back(v);
  }
  if (hi > lo + 1e-9) out.push_back(hi);
  return out;
}

inline Placement make_placement(const SolveObject& o, Vec2 center, int yaw, double elevation,
                                std::optional<Wall> wall = std::nullopt) {
  return {o.handle, o.asset_id, center, yaw, o.dims, o.front_axis, elevation, wall};
}

inline std::vector<Placement> floor_candidates(const SolveObject& o, const Rect& area, double elevation, double step) {
  std::vector<Placement> out;
  for (int yaw : {0, 90, 180, 270}) {
    const bool swap = yaw == 90 || yaw == 270;
    const double hx = (swap ? o.dims.y : o.dims.x) / 2, hy = (swap ? o.dims.x : o.dims.y) / 2;
    for (double x : grid_positions(area.min.x + hx, area.max.x - hx, step))
      for (double y : grid_positions(area.min.y + hy, area.max.y - hy, step))
        out.push_back(make_placement(o, {x, y}, yaw, elevation));
  }
  return out;
}

inline std::vector<Placement> wall_candidates(const SolveObject& o, const Room& room, double step) {
  std::vector<Placement> out;
  const double hw = o.dims.x / 2, hd = o.dims.y / 2;
  for (Wall w : {Wall::S, Wall::E, Wall::N, Wall::W}) {
    for (double t : grid_positions(hw, room.wall_length(w) - hw, step)) {
      Vec2 c;
      switch (w) {
        case Wall::S: c = {t, hd}; break;
        case Wall::N: c = {t, room.depth - hd}; break;
        case Wall::W: c = {hd, t}; break;
        default: c = {room.width - hd, t}; break;
      }
      out.push_back(make_placement(o, c, wall_yaw(w), o.elevation, w));
    }
  }
  return out;
}

inline bool vertical_overlap(double alo, double ahi, double blo, double bhi) {
  return alo < bhi - 1e-9 && blo < ahi - 1e-9;
}

inline bool collides(const Placement& a, const Placement& b) {
  return overlaps(a.bounds(), b.bounds()) && vertical_overlap(a.elevation, a.top(), b.elevation, b.top());
}

inline bool blocked(const Placement& p, const std::vector<Obstacle>& obstacles) {
  const Rect r = p.bounds();
  return std::any_of(obstacles.begin(), obstacles.end(), [&](const Obstacle& o) {
    return overlaps(r, o.rect) && vertical_overlap(p.elevation, p.top(), o.zlo, o.zhi);
  });
}

class Solver {
 public:
  Solver(const Room& room, std::vector<SolveObject> required, std::vector<SolveObject> extras, const SolverOptions& opt)
      : room_(room), required_(std::move(required)), extras_(std::move(extras)), opt_(opt) {}

  SolveResult run() {
    using clock = std::chrono::steady_clock;
    start_ = clock::now();
    if (!(opt_.grid_step > 0.0)) throw InvalidArgument("grid_step must be positive");
    if (!(opt_.time_limit_s > 0.0)) throw InvalidArgument("time_limit must be positive");
    if (const auto issues = room_.validate(); !issues.empty()) throw InvalidArgument("invalid room: " + issues.front());
    obstacles_ = opening_obstacles(room_, opt_);
    check_handles();
    order_required();

    // Pass 1: hard constraints over the required objects.
    placed_.assign(order_.size(), std::nullopt);
    candidates_.assign(order_.size(), {});
    for (std::size_t d = 0; d < order_.size(); ++d) {
      const SolveObject& o = required_[order_[d]];
      if (!top_reference(o)) candidates_[d] = unary_filter(o, base_candidates(o, mix_seed(opt_.seed, order_[d])));
    }
    if (const auto why = contradiction()) {
      Infeasible inf;
      inf.blocking_object = why->first;
      inf.detail = why->second;
      return {inf, warnings_, enforced(), nodes_};
    }
    if (const auto emptied = prune_domains()) {
      Infeasible inf;
      inf.blocking_object = *emptied;
      inf.detail = "no placement satisfies the hard constraints; first exhausted object: " + *emptied;
      return {inf, warnings_, enforced(), nodes_};
    }
    const DfsStatus status = order_.empty() ? DfsStatus::found : dfs(0);
    if (status != DfsStatus::found) {
      Infeasible inf;
      inf.reason = status == DfsStatus::timeout ? Infeasible::Reason::timeout : Infeasible::Reason::unsat;
      inf.blocking_object = blocking_;
      inf.detail = status == DfsStatus::timeout
                       ? "time limit of " + std::to_string(opt_.time_limit_s) + " s reached"
                       : "no placement satisfies the hard constraints; first exhausted object: " + blocking_;
      return {inf, warnings_, enforced(), nodes_};
    }

    SceneLayout layout;
    layout.room = room_;
    std::map<std::string, Placement> by_handle;
    for (std::size_t d = 0; d < order_.size(); ++d) by_handle.emplace(placed_[d]->handle, *placed_[d]);
    for (const auto& o : required_) {
      layout.placements.push_back(by_handle.at(o.handle));
      layout.required_set.insert(o.handle);
    }

    // Pass 2: extras, greedily by soft-clause score; unplaceable extras are skipped.
    for (std::size_t i = 0; i < extras_.size(); ++i) {
      const SolveObject& o = extras_[i];
      std::vector<Placement> cands;
      const auto ref = top_reference(o);
      const Placement* host = ref ? layout.find(*ref) : nullptr;
      if (host) {
        cands = floor_candidates(o, host->bounds(), host->top(), opt_.grid_step);
        order_candidates(cands, mix_seed(opt_.seed, required_.size() + i), host->center);
      } else {
        SolveObject as_floor = o;
        if (o.mount == Mount::top) as_floor.mount = Mount::floor;
        cands = base_candidates(as_floor, mix_seed(opt_.seed, required_.size() + i));
      }
      const Placement* best = nullptr;
      double best_score = -1.0;
      for (const auto& c : cands) {
        if (!inside_room(c) || blocked(c, obstacles_)) continue;
        if (std::any_of(layout.placements.begin(), layout.placements.end(),
                        [&](const Placement& p) { return collides(c, p); }))
          continue;
        const double score = soft_score(o, c, layout);
        if (score > best_score) {
          best_score = score;
          best = &c;
        }
      }
      if (best) {
        layout.placements.push_back(*best);
      } else {
        warnings_.push_back("extra object '" + o.handle + "' skipped: no collision-free position");
      }
    }

    layout.score = total_soft_score(layout);
    return {layout, warnings_, enforced(), nodes_};
  }

 private:
  enum class DfsStatus { found, exhausted, timeout };

  void check_handles() {
    std::set<std::string> handles, required_handles;
    for (const auto& o : required_) {
      if (!handles.insert(o.handle).second) throw InvalidArgument("duplicate object handle '" + o.handle + "'");
      required_handles.insert(o.handle);
    }
    for (const auto& o : extras_)
      if (!handles.insert(o.handle).second) throw InvalidArgument("duplicate object handle '" + o.handle + "'");
    auto check = [&](SolveObject& o, bool required) {
      for (auto& c : o.clauses) {
        if (c.subject != o.handle) throw InvalidArgument("clause '" + to_string(c) + "' is attached to '" + o.handle + "'");
        if (c.reference && !handles.contains(*c.reference))
          throw InvalidArgument("clause '" + to_string(c) + "' references unknown object '" + *c.reference + "'");
        if (c.reference && *c.reference == o.handle) throw InvalidArgument("clause '" + to_string(c) + "' references itself");
        if (c.hardness == Hardness::hard && (!required || (c.reference && !required_handles.contains(*c.reference)))) {
          warnings_.push_back("hard clause '" + to_string(c) + "' involves a non-required object; treated as soft");
          c.hardness = Hardness::soft;
        }
      }
    };
    for (auto& o : required_) check(o, true);
    for (auto& o : extras_) check(o, false);
    for (auto& o : required_) {
      const auto host = top_reference(o);
      if (o.mount == Mount::top && (!host || !required_handles.contains(*host))) {
        warnings_.push_back("object '" + o.handle + "' has no required host to rest on; placed on the floor");
        o.mount = Mount::floor;
      }
    }
  }

  // Order the required objects so every hard relative clause's reference comes
  // first; a cycle is broken by demoting its lowest-weight (then latest) clause.
  void order_required() {
    const std::size_t n = required_.size();
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < n; ++i) index[required_[i].handle] = i;
    while (true) {
      std::vector<std::set<std::size_t>> deps(n);
      for (std::size_t i = 0; i < n; ++i)
        for (const auto& c : required_[i].clauses)
          if (c.hardness == Hardness::hard && c.reference) deps[i].insert(index.at(*c.reference));
      for (std::size_t i = 0; i < n; ++i)
        if (const auto host = top_reference(required_[i])) deps[i].insert(index.at(*host));
      std::vector<bool> done(n, false);
      std::vector<std::size_t> order;
      bool progress = true;
      while (progress) {
        progress = false;
        for (std::size_t i = 0; i < n; ++i) {
          if (done[i]) continue;
          if (std::all_of(deps[i].begin(), deps[i].end(), [&](std::size_t d) { return done[d]; })) {
            done[i] = true;
            order.push_back(i);
            progress = true;
            break;  // restart so input order decides among ready objects
          }
        }
      }
      if (order.size() == n) {
        order_ = std::move(order);
        return;
      }
      // reach[a][b]: b is reachable from a along dependencies.
      std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
      for (std::size_t a = 0; a < n; ++a) {
        std::vector<std::size_t> stack(deps[a].begin(), deps[a].end());
        while (!stack.empty()) {
          const std::size_t b = stack.back();
          stack.pop_back();
          if (reach[a][b]) continue;
          reach[a][b] = true;
          stack.insert(stack.end(), deps[b].begin(), deps[b].end());
        }
      }
      auto on_cycle = [&](std::size_t i) { return reach[i][i]; };
      // A stacking clause stays while its host dependency would remain anyway.
      Clause* victim = nullptr;
      for (std::size_t i = 0; i < n; ++i) {
        if (done[i]) continue;
        for (auto& c : required_[i].clauses) {
          if (c.hardness != Hardness::hard || !c.reference) continue;
          if (c.kind == ClauseKind::on_top_of && required_[i].mount == Mount::top) continue;
          const std::size_t r = index.at(*c.reference);
          if (!reach[r][i]) continue;
          if (!victim || c.weight <= victim->weight) victim = &c;
        }
      }
      if (!victim) {
        // Only stacking remains in the cycle: put one stacked object on the floor.
        for (std::size_t i = 0; i < n && !victim; ++i) {
          if (done[i] || !on_cycle(i) || required_[i].mount != Mount::top) continue;
          warnings_.push_back("cyclic stacking; object '" + required_[i].handle + "' placed on the floor");
          required_[i].mount = Mount::floor;
          break;
        }
        continue;
      }
      warnings_.push_back("cyclic hard clauses; demoted '" + to_string(*victim) + "' to soft");
      victim->hardness = Hardness::soft;
    }
  }

  std::vector<Clause> enforced() const {
    std::vector<Clause> out;
    for (const auto& o : required_)
      for (const auto& c : o.clauses)
        if (c.hardness == Hardness::hard) out.push_back(c);
    return out;
  }

  // A pair of hard clauses on the same two objects that no placement can meet.
  std::optional<std::pair<std::string, std::string>> contradiction() const {
    for (const auto& o : required_) {
      for (const auto& a : o.clauses) {
        if (a.hardness != Hardness::hard || !a.reference) continue;
        for (const auto& b : o.clauses) {
          if (b.hardness != Hardness::hard || b.reference != a.reference) continue;
          const bool sides = a.kind == ClauseKind::left_of && b.kind == ClauseKind::right_of;
          const bool depth = a.kind == ClauseKind::in_front_of && b.kind == ClauseKind::behind;
          if (sides || depth)
            return std::pair{o.handle, "contradictory hard clauses '" + to_string(a) + "' and '" + to_string(b) + "'"};
        }
      }
    }
    return std::nullopt;
  }

  // Removes pass-1 candidates that cannot appear in any solution, keeping the
  // order of the rest, so the search visits the same solutions sooner. Returns
  // the object whose candidates ran out, if any.
  std::optional<std::string> prune_domains() {
    std::map<std::string, std::size_t> depth_of;
    for (std::size_t d = 0; d < order_.size(); ++d) depth_of[required_[order_[d]].handle] = d;
    auto domain = [&](const std::string& handle) -> std::vector<Placement>* {
      const auto it = depth_of.find(handle);
      if (it == depth_of.end() || top_reference(required_[order_[it->second]])) return nullptr;
      return &candidates_[it->second];
    };
    for (std::size_t d = 0; d < order_.size(); ++d) {
      const SolveObject& o = required_[order_[d]];
      if (!top_reference(o) && candidates_[d].empty()) return o.handle;
    }

    // Hosts that could never carry their stacked object.
    for (const auto& o : required_) {
      const auto host = top_reference(o);
      if (!host) continue;
      auto* hosts = domain(*host);
      if (!hosts) continue;
      std::erase_if(*hosts, [&](const Placement& h) { return !could_carry(o, h); });
      if (hosts->empty()) return o.handle;
    }

    // Relative clauses: keep a pose only if some pose of the other object supports it.
    for (int round = 0; round < 8; ++round) {
      bool changed = false;
      for (const auto& o : required_) {
        for (const auto& c : o.clauses) {
          if (c.hardness != Hardness::hard || !c.reference || c.kind == ClauseKind::on_top_of) continue;
          auto* subj = domain(c.subject);
          auto* ref = domain(*c.reference);
          if (!subj || !ref) continue;
          const std::size_t before = subj->size() + ref->size();
          prune_subject(c, *subj, *ref);
          if (subj->empty()) return c.subject;
          prune_reference(c, *subj, *ref);
          if (ref->empty()) return *c.reference;
          changed = changed || subj->size() + ref->size() != before;
        }
      }
      if (!changed) break;
    }
    return std::nullopt;
  }

  // Necessary conditions for `o` resting on host pose `h`: it fits on the top,
  // and its absolute hard clauses hold for some footprint inside the host's.
  bool could_carry(const SolveObject& o, const Placement& h) const {
    const Rect b = h.bounds();
    const double w = b.max.x - b.min.x, d = b.max.y - b.min.y;
    // Relative clauses to the host itself need room to shift off its center.
    bool need_x = false, need_y = false;
    for (const auto& c : o.clauses) {
      if (c.hardness != Hardness::hard || c.reference != h.handle || c.kind == ClauseKind::near ||
          c.kind == ClauseKind::on_top_of)
        continue;
      const Vec2 axis = clause_axis(c.kind, h.world_front());
      if (std::abs(axis.y) < 1e-9) need_x = true;
      else if (std::abs(axis.x) < 1e-9) need_y = true;
    }
    auto fits = [&](double a, double e) {
      return a <= w + 1e-9 && e <= d + 1e-9 && (!need_x || w - a > 2e-9) && (!need_y || d - e > 2e-9);
    };
    if (!fits(o.dims.x, o.dims.y) && !fits(o.dims.y, o.dims.x)) return false;
    Placement proxy = h;
    proxy.handle = o.handle;
    const std::map<std::string, const Placement*> self{{o.handle, &proxy}};
    for (const auto& c : o.clauses) {
      if (c.hardness != Hardness::hard || c.reference) continue;
      if (c.kind == ClauseKind::central) {
        const double lo = (1.0 - opt_.central_band) / 2.0, hi = (1.0 + opt_.central_band) / 2.0;
        if (b.max.x < lo * room_.width - 1e-9 || b.min.x > hi * room_.width + 1e-9 || b.max.y < lo * room_.depth - 1e-9 ||
            b.min.y > hi * room_.depth + 1e-9)
          return false;
      } else if (!satisfies(c, self, room_, opt_)) {
        return false;
      }
    }
    return true;
  }

  struct Extent {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    void add(double v) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  };

  static Rect center_box(const std::vector<Placement>& poses) {
    Rect r{poses.front().center, poses.front().center};
    for (const auto& p : poses) {
      r.min = {std::min(r.min.x, p.center.x), std::min(r.min.y, p.center.y)};
      r.max = {std::max(r.max.x, p.center.x), std::max(r.max.y, p.center.y)};
    }
    return r;
  }

  static double distance_to(const Rect& r, Vec2 p) {
    const double dx = std::max({r.min.x - p.x, 0.0, p.x - r.max.x});
    const double dy = std::max({r.min.y - p.y, 0.0, p.y - r.max.y});
    return std::hypot(dx, dy);
  }

  // Axis the clause measures along for a reference facing `front`.
  static Vec2 clause_axis(ClauseKind k, Vec2 front) {
    return k == ClauseKind::left_of || k == ClauseKind::right_of ? left_direction(front) : front;
  }

  // True when the clause asks the subject to lie on the positive side of the axis.
  static bool positive_side(ClauseKind k) { return k == ClauseKind::left_of || k == ClauseKind::in_front_of; }

  void prune_subject(const Clause& c, std::vector<Placement>& subj, const std::vector<Placement>& ref) const {
    if (c.kind == ClauseKind::near) {
      const Rect box = center_box(ref);
      std::erase_if(subj, [&](const Placement& s) { return distance_to(box, s.center) > opt_.near_radius + 1e-6; });
      return;
    }
    std::map<int, std::pair<Vec2, Extent>> by_yaw;
    for (const auto& r : ref) {
      auto& [axis, extent] = by_yaw[r.yaw_deg];
      axis = clause_axis(c.kind, r.world_front());
      extent.add(dot(r.center, axis));
    }
    std::erase_if(subj, [&](const Placement& s) {
      return std::none_of(by_yaw.begin(), by_yaw.end(), [&](const auto& entry) {
        const auto& [axis, extent] = entry.second;
        const double v = dot(s.center, axis);
        return positive_side(c.kind) ? v > extent.lo : v < extent.hi;
      });
    });
  }

  void prune_reference(const Clause& c, const std::vector<Placement>& subj, std::vector<Placement>& ref) const {
    if (c.kind == ClauseKind::near) {
      const Rect box = center_box(subj);
      std::erase_if(ref, [&](const Placement& r) { return distance_to(box, r.center) > opt_.near_radius + 1e-6; });
      return;
    }
    std::map<int, std::pair<Vec2, Extent>> by_yaw;
    for (const auto& r : ref) by_yaw[r.yaw_deg].first = clause_axis(c.kind, r.world_front());
    for (auto& [yaw, entry] : by_yaw)
      for (const auto& s : subj) entry.second.add(dot(s.center, entry.first));
    std::erase_if(ref, [&](const Placement& r) {
      const auto& [axis, extent] = by_yaw.at(r.yaw_deg);
      const double v = dot(r.center, axis);
      return positive_side(c.kind) ? !(extent.hi > v) : !(extent.lo < v);
    });
  }

  static std::optional<std::string> top_reference(const SolveObject& o) {
    if (o.mount != Mount::top) return std::nullopt;
    for (const auto& c : o.clauses)
      if (c.kind == ClauseKind::on_top_of) return c.reference;
    return std::nullopt;
  }

  void order_candidates(std::vector<Placement>& cands, std::uint64_t seed, Vec2 focus) const {
    if (opt_.shuffle) {
      Rng rng(seed);
      rng.shuffle(std::span<Placement>(cands));
      return;
    }
    std::stable_sort(cands.begin(), cands.end(), [&](const Placement& a, const Placement& b) {
      const double da = norm(a.center - focus), db = norm(b.center - focus);
      if (std::abs(da - db) > 1e-12) return da < db;
      if (a.yaw_deg != b.yaw_deg) return a.yaw_deg < b.yaw_deg;
      if (a.center.x != b.center.x) return a.center.x < b.center.x;
      return a.center.y < b.center.y;
    });
  }

  std::vector<Placement> base_candidates(const SolveObject& o, std::uint64_t seed) const {
    std::vector<Placement> cands = o.mount == Mount::wall
                                       ? wall_candidates(o, room_, opt_.grid_step)
                                       : floor_candidates(o, {{0.0, 0.0}, {room_.width, room_.depth}}, 0.0, opt_.grid_step);
    order_candidates(cands, seed, {room_.width / 2, room_.depth / 2});
    return cands;
  }

  bool inside_room(const Placement& p) const { return contains(Rect{{0.0, 0.0}, {room_.width, room_.depth}}, p.bounds()); }

  // Keeps candidates passing containment, openings and the absolute hard clauses.
  std::vector<Placement> unary_filter(const SolveObject& o, std::vector<Placement> cands) const {
    std::erase_if(cands, [&](const Placement& c) {
      if (!inside_room(c) || blocked(c, obstacles_)) return true;
      const std::map<std::string, const Placement*> self{{o.handle, &c}};
      for (const auto& cl : o.clauses)
        if (cl.hardness == Hardness::hard && !cl.reference && !satisfies(cl, self, room_, opt_)) return true;
      return false;
    });
    return cands;
  }

  bool timed_out() {
    if (++nodes_ % 256 != 0) return timeout_hit_;
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    if (elapsed > opt_.time_limit_s) timeout_hit_ = true;
    return timeout_hit_;
  }

  DfsStatus dfs(std::size_t depth) {
    if (depth == order_.size()) return DfsStatus::found;
    const SolveObject& o = required_[order_[depth]];
    std::map<std::string, const Placement*> placed;
    for (std::size_t d = 0; d < depth; ++d) placed[placed_[d]->handle] = &*placed_[d];

    std::vector<Placement> local;
    const std::vector<Placement>* cands = &candidates_[depth];
    if (const auto ref = top_reference(o)) {
      const Placement* host = placed.at(*ref);
      local = unary_filter(o, floor_candidates(o, host->bounds(), host->top(), opt_.grid_step));
      order_candidates(local, mix_seed(opt_.seed, order_[depth]), host->center);
      cands = &local;
    }

    bool any_valid = false;
    for (const auto& c : *cands) {
      if (timed_out()) return DfsStatus::timeout;
      bool ok = true;
      for (std::size_t d = 0; d < depth && ok; ++d) ok = !collides(c, *placed_[d]);
      if (!ok) continue;
      placed[o.handle] = &c;
      for (const auto& cl : o.clauses) {
        if (cl.hardness != Hardness::hard || !cl.reference) continue;
        if (!satisfies(cl, placed, room_, opt_)) {
          ok = false;
          break;
        }
      }
      placed.erase(o.handle);
      if (!ok) continue;
      any_valid = true;
      placed_[depth] = c;
      const DfsStatus s = dfs(depth + 1);
      if (s != DfsStatus::exhausted) return s;
      placed_[depth].reset();
    }
    if (!any_valid && blocking_.empty()) blocking_ = o.handle;
    if (depth == 0 && blocking_.empty()) blocking_ = o.handle;
    return DfsStatus::exhausted;
  }

  double soft_score(const SolveObject& o, const Placement& c, const SceneLayout& layout) const {
    std::map<std::string, const Placement*> placed;
    for (const auto& p : layout.placements) placed[p.handle] = &p;
    placed[o.handle] = &c;
    double score = 0.0;
    for (const auto& cl : o.clauses)
      if (cl.hardness == Hardness::soft && satisfies(cl, placed, room_, opt_)) score += cl.weight;
    return score;
  }

  double total_soft_score(const SceneLayout& layout) const {
    std::map<std::string, const Placement*> placed;
    for (const auto& p : layout.placements) placed[p.handle] = &p;
    double score = 0.0;
    for (const auto* group : {&required_, &extras_})
      for (const auto& o : *group)
        for (const auto& cl : o.clauses)
          if (cl.hardness == Hardness::soft && satisfies(cl, placed, room_, opt_)) score += cl.weight;
    return score;
  }

  Room room_;
  std::vector<SolveObject> required_;
  std::vector<SolveObject> extras_;
  SolverOptions opt_;
  std::vector<Obstacle> obstacles_;
  std::vector<std::size_t> order_;
  std::vector<std::vector<Placement>> candidates_;
  std::vector<std::optional<Placement>> placed_;
  std::vector<std::string> warnings_;
  std::string blocking_;
  std::size_t nodes_ = 0;
  bool timeout_hit_ = false;
  std::chrono::steady_clock::time_point start_;
};

}  // namespace detail

// Two-pass placement search. Pass 1 runs a depth-first search over the required
// objects under their hard clauses; pass 2 adds extras greedily by soft score
// without moving pass-1 objects.
inline SolveResult solve(const Room& room, std::vector<SolveObject> required, std::vector<SolveObject> extras,
                         const SolverOptions& options = {}) {
  return detail::Solver(room, std::move(required), std::move(extras), options).run();
}

// Hard clauses of a set of objects as given, before any demotion by the solver.
inline std::vector<Clause> hard_clauses_of(const std::vector<SolveObject>& objects) {
  std::vector<Clause> out;
  for (const auto& o : objects)
    for (const auto& c : o.clauses)
      if (c.hardness == Hardness::hard) out.push_back(c);
  return out;
}

}  // namespace funscene
