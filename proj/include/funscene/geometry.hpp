#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <vector>

namespace funscene {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  constexpr Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
  constexpr bool operator==(const Vec2&) const = default;
};

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  constexpr Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  constexpr Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  constexpr Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  constexpr bool operator==(const Vec3&) const = default;
};

constexpr double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }
inline double norm(const Vec2& v) { return std::hypot(v.x, v.y); }

constexpr double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
constexpr Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }
inline Vec3 normalized(const Vec3& v) { return v * (1.0 / norm(v)); }

inline double deg2rad(double deg) { return deg * std::numbers::pi / 180.0; }
inline double rad2deg(double rad) { return rad * 180.0 / std::numbers::pi; }

// Counter-clockwise rotation in the plan view (Z up).
inline Vec2 rotate(const Vec2& v, double yaw_deg) {
  // Exact values for the quarter turns the solver uses.
  const int quarter = static_cast<int>(std::lround(yaw_deg / 90.0));
  if (std::abs(yaw_deg - 90.0 * quarter) < 1e-12) {
    switch (((quarter % 4) + 4) % 4) {
      case 0: return v;
      case 1: return {-v.y, v.x};
      case 2: return {-v.x, -v.y};
      default: return {v.y, -v.x};
    }
  }
  const double c = std::cos(deg2rad(yaw_deg));
  const double s = std::sin(deg2rad(yaw_deg));
  return {c * v.x - s * v.y, s * v.x + c * v.y};
}

struct Aabb3 {
  Vec3 min;
  Vec3 max;

  Vec3 center() const { return (min + max) * 0.5; }
  Vec3 extent() const { return max - min; }
  bool contains(const Vec3& p, double eps = 1e-9) const {
    return p.x >= min.x - eps && p.x <= max.x + eps && p.y >= min.y - eps &&
           p.y <= max.y + eps && p.z >= min.z - eps && p.z <= max.z + eps;
  }
  std::array<Vec3, 8> corners() const {
    return {Vec3{min.x, min.y, min.z}, Vec3{max.x, min.y, min.z}, Vec3{min.x, max.y, min.z},
            Vec3{max.x, max.y, min.z}, Vec3{min.x, min.y, max.z}, Vec3{max.x, min.y, max.z},
            Vec3{min.x, max.y, max.z}, Vec3{max.x, max.y, max.z}};
  }
  bool operator==(const Aabb3&) const = default;
};

// Axis-aligned rectangle in the plan view.
struct Rect {
  Vec2 min;
  Vec2 max;

  double width() const { return max.x - min.x; }
  double depth() const { return max.y - min.y; }
  Vec2 center() const { return (min + max) * 0.5; }
  bool operator==(const Rect&) const = default;
};

// Positive-area overlap; touching edges do not count.
inline bool overlaps(const Rect& a, const Rect& b, double eps = 1e-9) {
  return a.min.x < b.max.x - eps && b.min.x < a.max.x - eps && a.min.y < b.max.y - eps &&
         b.min.y < a.max.y - eps;
}

inline bool contains(const Rect& outer, const Rect& inner, double eps = 1e-9) {
  return inner.min.x >= outer.min.x - eps && inner.max.x <= outer.max.x + eps &&
         inner.min.y >= outer.min.y - eps && inner.max.y <= outer.max.y + eps;
}

using Polygon2 = std::vector<Vec2>;

// Signed shoelace area; positive for counter-clockwise order.
inline double signed_area(const Polygon2& poly) {
  double a = 0.0;
  for (std::size_t i = 0, n = poly.size(); i < n; ++i) a += cross(poly[i], poly[(i + 1) % n]);
  return 0.5 * a;
}

// Area centroid; falls back to the vertex mean for degenerate polygons.
inline Vec2 polygon_centroid(const Polygon2& poly) {
  const double area = signed_area(poly);
  if (poly.empty()) return {};
  if (std::abs(area) < 1e-12) {
    Vec2 sum;
    for (const auto& p : poly) sum = sum + p;
    return sum * (1.0 / static_cast<double>(poly.size()));
  }
  double cx = 0.0, cy = 0.0;
  for (std::size_t i = 0, n = poly.size(); i < n; ++i) {
    const Vec2& p = poly[i];
    const Vec2& q = poly[(i + 1) % n];
    const double c = cross(p, q);
    cx += (p.x + q.x) * c;
    cy += (p.y + q.y) * c;
  }
  return {cx / (6.0 * area), cy / (6.0 * area)};
}

// Andrew's monotone chain; returns counter-clockwise hull without repeats.
inline Polygon2 convex_hull(Polygon2 pts) {
  std::sort(pts.begin(), pts.end(),
            [](const Vec2& a, const Vec2& b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) return pts;
  Polygon2 hull(2 * pts.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    while (k >= 2 && cross(hull[k - 1] - hull[k - 2], pts[i] - hull[k - 2]) <= 0) --k;
    hull[k++] = pts[i];
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i > 0; --i) {
    while (k >= t && cross(hull[k - 1] - hull[k - 2], pts[i - 1] - hull[k - 2]) <= 0) --k;
    hull[k++] = pts[i - 1];
  }
  hull.resize(k - 1);
  return hull;
}

// Sutherland-Hodgman clip of a polygon against an axis-aligned rectangle.
inline Polygon2 clip_to_rect(const Polygon2& poly, const Rect& r) {
  auto clip_edge = [](const Polygon2& in, auto inside, auto intersect) {
    Polygon2 out;
    if (in.empty()) return out;
    Vec2 prev = in.back();
    bool prev_in = inside(prev);
    for (const Vec2& cur : in) {
      const bool cur_in = inside(cur);
      if (cur_in) {
        if (!prev_in) out.push_back(intersect(prev, cur));
        out.push_back(cur);
      } else if (prev_in) {
        out.push_back(intersect(prev, cur));
      }
      prev = cur;
      prev_in = cur_in;
    }
    return out;
  };
  auto at_x = [](double x) {
    return [x](const Vec2& a, const Vec2& b) {
      const double t = (x - a.x) / (b.x - a.x);
      return Vec2{x, a.y + t * (b.y - a.y)};
    };
  };
  auto at_y = [](double y) {
    return [y](const Vec2& a, const Vec2& b) {
      const double t = (y - a.y) / (b.y - a.y);
      return Vec2{a.x + t * (b.x - a.x), y};
    };
  };
  Polygon2 p = poly;
  p = clip_edge(p, [&](const Vec2& v) { return v.x >= r.min.x; }, at_x(r.min.x));
  p = clip_edge(p, [&](const Vec2& v) { return v.x <= r.max.x; }, at_x(r.max.x));
  p = clip_edge(p, [&](const Vec2& v) { return v.y >= r.min.y; }, at_y(r.min.y));
  p = clip_edge(p, [&](const Vec2& v) { return v.y <= r.max.y; }, at_y(r.max.y));
  return p;
}

}  // namespace funscene
