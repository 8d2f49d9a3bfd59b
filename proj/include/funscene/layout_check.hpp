#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "funscene/layout.hpp"

namespace funscene {

// Re-derives every geometric fact from center, yaw and dims using
// trigonometry and separating-axis tests, sharing no predicate code with the
// solver.
namespace check_detail {

using Quad = std::array<Vec2, 4>;

inline Quad corners(const Placement& p) {
  const double t = p.yaw_deg * std::acos(-1.0) / 180.0;
  const double c = std::cos(t), s = std::sin(t);
  const Vec2 ax{c * p.dims.x / 2, s * p.dims.x / 2};
  const Vec2 ay{-s * p.dims.y / 2, c * p.dims.y / 2};
  return {p.center - ax - ay, p.center + ax - ay, p.center + ax + ay, p.center - ax + ay};
}

inline Vec2 front(const Placement& p) {
  const double t = p.yaw_deg * std::acos(-1.0) / 180.0;
  const double c = std::cos(t), s = std::sin(t);
  return {c * p.front_axis.x - s * p.front_axis.y, s * p.front_axis.x + c * p.front_axis.y};
}

inline std::pair<double, double> project(const Quad& q, Vec2 axis) {
  double lo = dot(q[0], axis), hi = lo;
  for (const auto& v : q) {
    lo = std::min(lo, dot(v, axis));
    hi = std::max(hi, dot(v, axis));
  }
  return {lo, hi};
}

// Positive-area intersection of two convex quads.
inline bool sat_overlap(const Quad& a, const Quad& b, double eps = 1e-7) {
  for (const Quad* q : {&a, &b}) {
    for (int i = 0; i < 4; ++i) {
      const Vec2 e = (*q)[(i + 1) % 4] - (*q)[i];
      const double len = norm(e);
      if (len < 1e-12) continue;
      const Vec2 axis{-e.y / len, e.x / len};
      const auto [alo, ahi] = project(a, axis);
      const auto [blo, bhi] = project(b, axis);
      if (ahi <= blo + eps || bhi <= alo + eps) return false;
    }
  }
  return true;
}

inline Quad rect_quad(double x0, double y0, double x1, double y1) { return {Vec2{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}}; }

inline double min_x(const Quad& q) { return std::min({q[0].x, q[1].x, q[2].x, q[3].x}); }
inline double max_x(const Quad& q) { return std::max({q[0].x, q[1].x, q[2].x, q[3].x}); }
inline double min_y(const Quad& q) { return std::min({q[0].y, q[1].y, q[2].y, q[3].y}); }
inline double max_y(const Quad& q) { return std::max({q[0].y, q[1].y, q[2].y, q[3].y}); }

inline bool heights_overlap(double a0, double a1, double b0, double b1) { return std::min(a1, b1) - std::max(a0, b0) > 1e-7; }

inline bool clause_holds(const Clause& c, const std::map<std::string, const Placement*>& by, const Room& room,
                         const SolverOptions& opt) {
  const Placement& a = *by.at(c.subject);
  const Quad qa = corners(a);
  const double tol = opt.snap + 1e-7;
  const double x0 = min_x(qa), x1 = max_x(qa), y0 = min_y(qa), y1 = max_y(qa);
  const bool w = x0 <= tol, e = room.width - x1 <= tol, s = y0 <= tol, n = room.depth - y1 <= tol;
  const Vec2 ca = (qa[0] + qa[1] + qa[2] + qa[3]) * 0.25;
  if (c.kind == ClauseKind::central) {
    const double margin = (1.0 - opt.central_band) / 2.0;
    auto in_band = [&](double v, double len) { return v >= margin * len - 1e-7 && v <= (1.0 - margin) * len + 1e-7; };
    return in_band(ca.x, room.width) && in_band(ca.y, room.depth);
  }
  if (c.kind == ClauseKind::corner) return (w || e) && (s || n);
  if (c.kind == ClauseKind::against_wall) {
    if (!c.wall) return w || e || s || n;
    return (*c.wall == Wall::W && w) || (*c.wall == Wall::E && e) || (*c.wall == Wall::S && s) || (*c.wall == Wall::N && n);
  }
  const Placement& b = *by.at(*c.reference);
  const Quad qb = corners(b);
  const Vec2 cb = (qb[0] + qb[1] + qb[2] + qb[3]) * 0.25;
  const Vec2 f = front(b);
  const Vec3 left3 = cross(Vec3{f.x, f.y, 0.0}, Vec3{0.0, 0.0, 1.0});
  const Vec2 d = ca - cb;
  const double lateral = d.x * left3.x + d.y * left3.y;
  const double ahead = d.x * f.x + d.y * f.y;
  switch (c.kind) {
    case ClauseKind::left_of: return lateral > 1e-7;
    case ClauseKind::right_of: return lateral < -1e-7;
    case ClauseKind::in_front_of: return ahead > 1e-7;
    case ClauseKind::behind: return ahead < -1e-7;
    case ClauseKind::near: return std::hypot(d.x, d.y) <= opt.near_radius + 1e-7;
    case ClauseKind::on_top_of: {
      const bool inside = x0 >= min_x(qb) - 1e-7 && x1 <= max_x(qb) + 1e-7 && y0 >= min_y(qb) - 1e-7 &&
                          y1 <= max_y(qb) + 1e-7;
      return inside && std::abs(a.elevation - (b.elevation + b.dims.z)) <= 1e-6;
    }
    default: return false;
  }
}

}  // namespace check_detail

// Violation messages for a layout against its hard clauses; empty iff valid.
inline std::vector<std::string> check_solution(const SceneLayout& layout, const std::vector<Clause>& hard_clauses,
                                               const SolverOptions& opt = {}) {
  using namespace check_detail;
  std::vector<std::string> out;
  const Room& room = layout.room;
  std::map<std::string, const Placement*> by;
  for (const auto& p : layout.placements) {
    if (!by.emplace(p.handle, &p).second) out.push_back("duplicate placement of " + p.handle);
  }
  for (const auto& h : layout.required_set)
    if (!by.contains(h)) out.push_back("missing required object " + h);

  std::vector<Quad> quads;
  for (const auto& p : layout.placements) {
    if (p.yaw_deg != 0 && p.yaw_deg != 90 && p.yaw_deg != 180 && p.yaw_deg != 270)
      out.push_back("invalid yaw " + std::to_string(p.yaw_deg) + " for " + p.handle);
    const Quad q = corners(p);
    if (min_x(q) < -1e-7 || min_y(q) < -1e-7 || max_x(q) > room.width + 1e-7 || max_y(q) > room.depth + 1e-7)
      out.push_back("out of room: " + p.handle);
    quads.push_back(q);
  }

  for (std::size_t i = 0; i < quads.size(); ++i) {
    const Placement& a = layout.placements[i];
    for (std::size_t j = i + 1; j < quads.size(); ++j) {
      const Placement& b = layout.placements[j];
      if (heights_overlap(a.elevation, a.elevation + a.dims.z, b.elevation, b.elevation + b.dims.z) &&
          sat_overlap(quads[i], quads[j]))
        out.push_back("collision between " + a.handle + " and " + b.handle);
    }
    for (std::size_t k = 0; k < room.openings.size(); ++k) {
      const Opening& o = room.openings[k];
      const bool door = o.kind == ObjectType::door;
      const double depth = door ? opt.door_clearance : opt.window_depth;
      Quad zone;
      if (o.wall == Wall::S) zone = rect_quad(o.lo, 0.0, o.hi, depth);
      else if (o.wall == Wall::N) zone = rect_quad(o.lo, room.depth - depth, o.hi, room.depth);
      else if (o.wall == Wall::W) zone = rect_quad(0.0, o.lo, depth, o.hi);
      else zone = rect_quad(room.width - depth, o.lo, room.width, o.hi);
      if (heights_overlap(a.elevation, a.elevation + a.dims.z, door ? 0.0 : opt.window_sill, opt.door_height) &&
          sat_overlap(quads[i], zone))
        out.push_back("blocks opening " + std::to_string(k) + ": " + a.handle);
    }
  }

  for (const auto& c : hard_clauses) {
    if (!by.contains(c.subject) || (c.reference && !by.contains(*c.reference))) {
      out.push_back("clause violated (object not placed): " + to_string(c));
      continue;
    }
    if (!clause_holds(c, by, room, opt)) out.push_back("clause violated: " + to_string(c));
  }
  return out;
}

}  // namespace funscene
