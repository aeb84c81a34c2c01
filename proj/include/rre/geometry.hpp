#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace rre {

struct geometry_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Point {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Point&, const Point&) = default;
};

// Four-vertex polygon in image pixel coordinates (y grows downward).
// Annotations wind clockwise on screen, which makes the raw shoelace sum
// positive under the y-down convention.
struct Quad {
  std::array<Point, 4> v{};
  friend bool operator==(const Quad&, const Quad&) = default;
};

inline Quad make_quad(const std::array<double, 8>& c) {
  return Quad{{Point{c[0], c[1]}, Point{c[2], c[3]}, Point{c[4], c[5]},
               Point{c[6], c[7]}}};
}

namespace geom_detail {

inline constexpr double kEps = 1e-9;

inline double cross(const Point& o, const Point& a, const Point& b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

inline int sign(double d) { return (d > kEps) - (d < -kEps); }

inline double polygon_signed_area(const std::vector<Point>& p) {
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const Point& a = p[i];
    const Point& b = p[(i + 1) % p.size()];
    s += a.x * b.y - a.y * b.x;
  }
  return 0.5 * s;
}

inline Point edge_line_point(const Point& s, const Point& p, double ds, double dp) {
  const double denom = ds - dp;
  if (std::fabs(denom) < kEps) return p;  // grazing edge
  const double t = ds / denom;
  return Point{s.x + t * (p.x - s.x), s.y + t * (p.y - s.y)};
}

// Sutherland-Hodgman. `clip` must be convex with positive raw orientation;
// the subject may be any convex polygon.
inline std::vector<Point> clip_polygon(std::vector<Point> subject,
                                       const std::vector<Point>& clip) {
  std::vector<Point> input;
  for (std::size_t e = 0; e < clip.size() && !subject.empty(); ++e) {
    const Point& c1 = clip[e];
    const Point& c2 = clip[(e + 1) % clip.size()];
    input.swap(subject);
    subject.clear();
    for (std::size_t i = 0; i < input.size(); ++i) {
      const Point& s = input[i == 0 ? input.size() - 1 : i - 1];
      const Point& p = input[i];
      const double ds = cross(c1, c2, s);
      const double dp = cross(c1, c2, p);
      const bool in_s = ds >= -kEps;
      const bool in_p = dp >= -kEps;
      if (in_p) {
        if (!in_s) subject.push_back(edge_line_point(s, p, ds, dp));
        subject.push_back(p);
      } else if (in_s) {
        subject.push_back(edge_line_point(s, p, ds, dp));
      }
    }
  }
  if (subject.size() < 3) subject.clear();
  return subject;
}

inline double clip_area(const std::vector<Point>& subject,
                        const std::vector<Point>& clip) {
  return std::fabs(polygon_signed_area(clip_polygon(subject, clip)));
}

}  // namespace geom_detail

inline double signed_area(const Quad& q) {
  double s = 0.0;
  for (int i = 0; i < 4; ++i) {
    const Point& a = q.v[i];
    const Point& b = q.v[(i + 1) & 3];
    s += a.x * b.y - a.y * b.x;
  }
  return 0.5 * s;
}

inline double quad_area(const Quad& q) { return std::fabs(signed_area(q)); }

// Clockwise in image coordinates. Degenerate quads report false.
inline bool is_clockwise(const Quad& q) { return signed_area(q) > 0.0; }

// A quad is non-simple iff a pair of opposite edges properly crosses;
// adjacent edges share a vertex and cannot cross properly.
inline bool is_self_intersecting(const Quad& q) {
  auto proper = [](const Point& a, const Point& b, const Point& c, const Point& d) {
    using geom_detail::cross;
    using geom_detail::sign;
    const int d1 = sign(cross(c, d, a));
    const int d2 = sign(cross(c, d, b));
    const int d3 = sign(cross(a, b, c));
    const int d4 = sign(cross(a, b, d));
    return d1 * d2 < 0 && d3 * d4 < 0;
  };
  return proper(q.v[0], q.v[1], q.v[2], q.v[3]) ||
         proper(q.v[1], q.v[2], q.v[3], q.v[0]);
}

// Collinear vertices count as convex (no sign change).
inline bool is_convex(const Quad& q) {
  int pos = 0, neg = 0;
  for (int i = 0; i < 4; ++i) {
    const int s = geom_detail::sign(
        geom_detail::cross(q.v[i], q.v[(i + 1) & 3], q.v[(i + 2) & 3]));
    pos += s > 0;
    neg += s < 0;
  }
  return pos == 0 || neg == 0;
}

namespace geom_detail {

inline Quad oriented_positive(const Quad& q) {
  if (signed_area(q) >= 0.0) return q;
  return Quad{{q.v[3], q.v[2], q.v[1], q.v[0]}};
}

inline bool quad_less(const Quad& a, const Quad& b) {
  for (int i = 0; i < 4; ++i) {
    if (a.v[i].x != b.v[i].x) return a.v[i].x < b.v[i].x;
    if (a.v[i].y != b.v[i].y) return a.v[i].y < b.v[i].y;
  }
  return false;
}

// Positive orientation plus the lexicographically smallest rotation: every
// vertex-order representation of the same polygon (either winding, any
// starting vertex) maps to one array, so downstream arithmetic sees
// identical operand order and results are reproducible bit for bit.
inline Quad canonical(const Quad& q) {
  const Quad p = oriented_positive(q);
  Quad best = p;
  for (int s = 1; s < 4; ++s) {
    Quad r;
    for (int i = 0; i < 4; ++i) r.v[i] = p.v[(s + i) & 3];
    if (quad_less(r, best)) best = r;
  }
  return best;
}

inline std::vector<Point> to_polygon(const Quad& q) {
  return {q.v[0], q.v[1], q.v[2], q.v[3]};
}

struct SignedTriangle {
  std::vector<Point> pts;  // positively oriented
  int sign = 0;
};

// Fan decomposition from vertex 0 into signed triangles: for a positively
// oriented simple quad the signed indicator functions sum to the quad's
// indicator, so pairwise signed triangle intersections reproduce the exact
// intersection area even for non-convex quads.
inline void fan_triangles(const Quad& q, std::vector<SignedTriangle>& out) {
  for (int k = 1; k <= 2; ++k) {
    std::vector<Point> t{q.v[0], q.v[k], q.v[k + 1]};
    const double sa = polygon_signed_area(t);
    const int s = sign(sa);
    if (s == 0) continue;
    if (s < 0) std::reverse(t.begin(), t.end());
    out.push_back({std::move(t), s});
  }
}

}  // namespace geom_detail

// Area of the geometric intersection of two simple quads. Convex pairs go
// through half-plane clipping; the signed-triangle fallback covers
// non-convex input. Both quads and the argument order are canonicalized so
// the result is bit-for-bit symmetric and independent of vertex order.
inline double intersection_area(const Quad& a, const Quad& b) {
  using namespace geom_detail;
  if (is_self_intersecting(a) || is_self_intersecting(b))
    throw geometry_error("self-intersecting quad");

  Quad p = canonical(a);
  Quad q = canonical(b);
  if (quad_less(q, p)) std::swap(p, q);

  const double area_p = quad_area(p);
  const double area_q = quad_area(q);
  if (area_p < 1e-12 || area_q < 1e-12) return 0.0;

  double inter = 0.0;
  if (is_convex(p) && is_convex(q)) {
    inter = clip_area(to_polygon(p), to_polygon(q));
  } else {
    std::vector<SignedTriangle> tp, tq;
    fan_triangles(p, tp);
    fan_triangles(q, tq);
    for (const auto& tri_p : tp)
      for (const auto& tri_q : tq)
        inter += tri_p.sign * tri_q.sign * clip_area(tri_p.pts, tri_q.pts);
  }
  return std::clamp(inter, 0.0, std::min(area_p, area_q));
}

// Intersection over union in [0, 1]; 0 when the union is empty. The union
// areas are taken from the canonical forms as well, keeping the quotient
// reproducible for any vertex order of the same two polygons.
inline double iou(const Quad& a, const Quad& b) {
  const Quad p = geom_detail::canonical(a);
  const Quad q = geom_detail::canonical(b);
  const double inter = intersection_area(p, q);
  const double uni = quad_area(p) + quad_area(q) - inter;
  if (uni <= 0.0) return 0.0;
  return std::clamp(inter / uni, 0.0, 1.0);
}

}  // namespace rre
