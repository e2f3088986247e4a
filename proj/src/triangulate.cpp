#include "faceprobe/triangulate.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace fp {

namespace {

struct Tri {
  int a, b, c;
  bool alive = true;
};

double cross(const Point2& o, const Point2& p, const Point2& q) {
  return (p.x - o.x) * (q.y - o.y) - (p.y - o.y) * (q.x - o.x);
}

// > 0 when d lies inside the circumcircle of ccw triangle (a, b, c).
double incircle(const Point2& a, const Point2& b, const Point2& c, const Point2& d) {
  double ax = a.x - d.x, ay = a.y - d.y;
  double bx = b.x - d.x, by = b.y - d.y;
  double cx = c.x - d.x, cy = c.y - d.y;
  double a2 = ax * ax + ay * ay, b2 = bx * bx + by * by, c2 = cx * cx + cy * cy;
  return ax * (by * c2 - b2 * cy) - ay * (bx * c2 - b2 * cx) + a2 * (bx * cy - by * cx);
}

}  // namespace

std::vector<std::array<int, 3>> delaunay_triangulate(const std::vector<Point2>& points) {
  const int n = int(points.size());
  if (n < 3) raise_data("delaunay: need at least 3 points");

  double min_x = points[0].x, max_x = points[0].x;
  double min_y = points[0].y, max_y = points[0].y;
  for (const auto& p : points) {
    min_x = std::min(min_x, p.x);
    max_x = std::max(max_x, p.x);
    min_y = std::min(min_y, p.y);
    max_y = std::max(max_y, p.y);
  }
  double span = std::max({max_x - min_x, max_y - min_y, 1e-9});
  double cx = 0.5 * (min_x + max_x), cy = 0.5 * (min_y + max_y);

  std::vector<Point2> pts(points);
  pts.push_back({cx - 30.0 * span, cy - 10.0 * span});
  pts.push_back({cx + 30.0 * span, cy - 10.0 * span});
  pts.push_back({cx, cy + 30.0 * span});
  int s0 = n, s1 = n + 1, s2 = n + 2;

  std::vector<Tri> tris;
  if (cross(pts[size_t(s0)], pts[size_t(s1)], pts[size_t(s2)]) > 0.0)
    tris.push_back({s0, s1, s2});
  else
    tris.push_back({s0, s2, s1});

  for (int i = 0; i < n; ++i) {
    const Point2& p = pts[size_t(i)];
    // edges of the cavity: edge -> seen count
    std::map<std::pair<int, int>, int> edges;
    auto add_edge = [&edges](int u, int v) {
      auto key = std::minmax(u, v);
      edges[{key.first, key.second}]++;
    };
    bool any = false;
    for (auto& t : tris) {
      if (!t.alive) continue;
      if (incircle(pts[size_t(t.a)], pts[size_t(t.b)], pts[size_t(t.c)], p) > 0.0) {
        t.alive = false;
        any = true;
        add_edge(t.a, t.b);
        add_edge(t.b, t.c);
        add_edge(t.c, t.a);
      }
    }
    if (!any) raise_numeric("delaunay: point insertion failed (duplicate or degenerate points?)");
    // boundary edges appear once; connect them to the new point
    std::vector<std::pair<int, int>> boundary;
    for (const auto& [e, cnt] : edges)
      if (cnt == 1) boundary.push_back(e);
    for (const auto& [u, v] : boundary) {
      double orient = cross(pts[size_t(u)], pts[size_t(v)], p);
      if (std::abs(orient) < 1e-30) continue;  // collinear sliver, skip
      if (orient > 0.0)
        tris.push_back({u, v, i});
      else
        tris.push_back({v, u, i});
    }
    tris.erase(std::remove_if(tris.begin(), tris.end(), [](const Tri& t) { return !t.alive; }),
               tris.end());
  }

  std::vector<std::array<int, 3>> out;
  for (const auto& t : tris) {
    if (t.a >= n || t.b >= n || t.c >= n) continue;  // touches the super-triangle
    out.push_back({t.a, t.b, t.c});
  }
  if (out.empty()) raise_data("delaunay: all points collinear, no triangulation exists");
  return out;
}

}  // namespace fp
