#pragma once

// Convex hulls, facet/vertex enumeration, and exact polytope volumes in low dimension.

#include <algorithm>
#include <array>
#include <cstdint>
#include <deque>
#include <numeric>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "isozonoid/core.hpp"
#include "isozonoid/linalg.hpp"

namespace isozonoid::poly {

/// Halfspace <a, x> <= b with |a| = 1.
struct Halfspace {
  Vec a;
  double b = 0.0;
};

inline double scale_of(const std::vector<Vec>& pts) {
  double s = 0.0;
  for (const auto& p : pts) s = std::max(s, p.cwiseAbs().maxCoeff());
  return std::max(s, 1e-300);
}

// ---------------------------------------------------------------------------
// 2D

inline double cross2(const Vec& o, const Vec& a, const Vec& b) {
  return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
}

/// Counter-clockwise hull (Andrew's monotone chain), collinear points dropped.
inline std::vector<Vec> hull2d(std::vector<Vec> pts) {
  std::sort(pts.begin(), pts.end(), [](const Vec& a, const Vec& b) {
    return a[0] < b[0] || (a[0] == b[0] && a[1] < b[1]);
  });
  if (pts.size() < 3) return pts;
  const double eps = 1e-14 * scale_of(pts) * scale_of(pts);
  std::vector<Vec> h(2 * pts.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    while (k >= 2 && cross2(h[k - 2], h[k - 1], pts[i]) <= eps) --k;
    h[k++] = pts[i];
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross2(h[k - 2], h[k - 1], pts[i]) <= eps) --k;
    h[k++] = pts[i];
  }
  h.resize(k - 1);
  return h;
}

/// Signed shoelace area of an ordered polygon.
inline double polygon_area(const std::vector<Vec>& poly) {
  double s = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Vec& a = poly[i];
    const Vec& b = poly[(i + 1) % poly.size()];
    s += a[0] * b[1] - a[1] * b[0];
  }
  return 0.5 * s;
}

inline double polygon_perimeter(const std::vector<Vec>& poly) {
  double s = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) s += (poly[(i + 1) % poly.size()] - poly[i]).norm();
  return s;
}

/// Sutherland-Hodgman clip of a convex polygon to <a, x> <= b.
inline std::vector<Vec> clip_polygon(const std::vector<Vec>& poly, const Vec& a, double b) {
  std::vector<Vec> out;
  const std::size_t m = poly.size();
  for (std::size_t i = 0; i < m; ++i) {
    const Vec& p = poly[i];
    const Vec& q = poly[(i + 1) % m];
    const double fp = a.dot(p) - b, fq = a.dot(q) - b;
    if (fp <= 0) out.push_back(p);
    if ((fp < 0 && fq > 0) || (fp > 0 && fq < 0)) out.push_back(p + (fp / (fp - fq)) * (q - p));
  }
  return out;
}

/// Intersection of two counter-clockwise convex polygons.
inline std::vector<Vec> intersect_convex(std::vector<Vec> p, const std::vector<Vec>& q) {
  for (std::size_t i = 0; i < q.size() && !p.empty(); ++i) {
    const Vec& a = q[i];
    const Vec& b = q[(i + 1) % q.size()];
    Vec normal(2);
    normal << (b[1] - a[1]), -(b[0] - a[0]);
    p = clip_polygon(p, normal, normal.dot(a));
  }
  return p;
}

// ---------------------------------------------------------------------------
// 3D quickhull

struct Hull3 {
  std::vector<Eigen::Vector3d> points;
  std::vector<std::array<int, 3>> faces;  // outward orientation
};

namespace detail {

struct QFace {
  std::array<int, 3> v;
  Eigen::Vector3d normal;
  double offset = 0.0;
  std::vector<int> outside;
  bool alive = true;
};

inline std::uint64_t edge_key(int a, int b) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) | static_cast<std::uint32_t>(b);
}

}  // namespace detail

/// Quickhull with conflict lists; throws DegenerateBody for flat input.
inline Hull3 hull3d(const std::vector<Vec>& input) {
  using V3 = Eigen::Vector3d;
  Hull3 out;
  for (const auto& p : input) out.points.emplace_back(p[0], p[1], p[2]);
  const auto& P = out.points;
  const int m = static_cast<int>(P.size());
  require(m >= 4, ErrorCode::DegenerateBody, "need at least 4 points for a 3D hull");
  double sc = 0.0;
  for (const auto& p : P) sc = std::max(sc, p.cwiseAbs().maxCoeff());
  const double eps = 1e-11 * std::max(sc, 1e-300);

  // Initial simplex.
  int i0 = 0, i1 = 0;
  for (int i = 0; i < m; ++i) {
    if (P[i][0] < P[i0][0]) i0 = i;
    if (P[i][0] > P[i1][0]) i1 = i;
  }
  if ((P[i1] - P[i0]).norm() < eps) {
    for (int i = 0; i < m; ++i)
      if ((P[i] - P[i0]).norm() > (P[i1] - P[i0]).norm()) i1 = i;
  }
  require((P[i1] - P[i0]).norm() > eps, ErrorCode::DegenerateBody, "points coincide");
  const V3 dir = (P[i1] - P[i0]).normalized();
  int i2 = -1;
  double best = eps;
  for (int i = 0; i < m; ++i) {
    const V3 d = P[i] - P[i0];
    const double dist = (d - d.dot(dir) * dir).norm();
    if (dist > best) {
      best = dist;
      i2 = i;
    }
  }
  require(i2 >= 0, ErrorCode::DegenerateBody, "points are collinear");
  const V3 nrm = (P[i1] - P[i0]).cross(P[i2] - P[i0]).normalized();
  int i3 = -1;
  best = eps;
  for (int i = 0; i < m; ++i) {
    const double dist = std::abs(nrm.dot(P[i] - P[i0]));
    if (dist > best) {
      best = dist;
      i3 = i;
    }
  }
  require(i3 >= 0, ErrorCode::DegenerateBody, "points are coplanar");

  const V3 interior = (P[i0] + P[i1] + P[i2] + P[i3]) / 4.0;
  std::vector<detail::QFace> faces;
  std::unordered_map<std::uint64_t, int> edges;

  auto make_face = [&](int a, int b, int c) {
    detail::QFace f;
    f.v = {a, b, c};
    f.normal = (P[b] - P[a]).cross(P[c] - P[a]);
    if (f.normal.dot(interior - P[a]) > 0) {
      std::swap(f.v[1], f.v[2]);
      f.normal = -f.normal;
    }
    f.normal.normalize();
    f.offset = f.normal.dot(P[f.v[0]]);
    const int id = static_cast<int>(faces.size());
    faces.push_back(std::move(f));
    const auto& v = faces[id].v;
    for (int k = 0; k < 3; ++k) edges[detail::edge_key(v[k], v[(k + 1) % 3])] = id;
    return id;
  };

  std::vector<int> initial = {make_face(i0, i1, i2), make_face(i0, i1, i3), make_face(i0, i2, i3),
                              make_face(i1, i2, i3)};
  for (int i = 0; i < m; ++i) {
    if (i == i0 || i == i1 || i == i2 || i == i3) continue;
    for (int f : initial)
      if (faces[f].normal.dot(P[i]) - faces[f].offset > eps) {
        faces[f].outside.push_back(i);
        break;
      }
  }

  std::deque<int> work(initial.begin(), initial.end());
  while (!work.empty()) {
    const int fid = work.front();
    work.pop_front();
    if (!faces[fid].alive || faces[fid].outside.empty()) continue;

    int apex = -1;
    double far = -1.0;
    for (int i : faces[fid].outside) {
      const double d = faces[fid].normal.dot(P[i]) - faces[fid].offset;
      if (d > far) {
        far = d;
        apex = i;
      }
    }

    // Visible region by flood fill across shared edges.
    std::vector<int> visible = {fid};
    std::unordered_set<int> vis_set = {fid};
    for (std::size_t k = 0; k < visible.size(); ++k) {
      const auto& v = faces[visible[k]].v;
      for (int e = 0; e < 3; ++e) {
        auto it = edges.find(detail::edge_key(v[(e + 1) % 3], v[e]));
        if (it == edges.end()) continue;
        const int nb = it->second;
        if (vis_set.count(nb) || !faces[nb].alive) continue;
        if (faces[nb].normal.dot(P[apex]) - faces[nb].offset > eps) {
          vis_set.insert(nb);
          visible.push_back(nb);
        }
      }
    }

    std::vector<std::pair<int, int>> horizon;
    for (int f : visible) {
      const auto& v = faces[f].v;
      for (int e = 0; e < 3; ++e) {
        auto it = edges.find(detail::edge_key(v[(e + 1) % 3], v[e]));
        if (it == edges.end() || !vis_set.count(it->second)) horizon.emplace_back(v[e], v[(e + 1) % 3]);
      }
    }

    std::vector<int> orphans;
    for (int f : visible) {
      faces[f].alive = false;
      for (int i : faces[f].outside)
        if (i != apex) orphans.push_back(i);
      faces[f].outside.clear();
      const auto& v = faces[f].v;
      for (int e = 0; e < 3; ++e) {
        auto it = edges.find(detail::edge_key(v[e], v[(e + 1) % 3]));
        if (it != edges.end() && it->second == f) edges.erase(it);
      }
    }

    std::vector<int> fresh;
    for (const auto& [a, b] : horizon) {
      detail::QFace f;
      f.v = {a, b, apex};
      f.normal = (P[b] - P[a]).cross(P[apex] - P[a]).normalized();
      f.offset = f.normal.dot(P[a]);
      const int id = static_cast<int>(faces.size());
      faces.push_back(std::move(f));
      for (int k = 0; k < 3; ++k) edges[detail::edge_key(faces[id].v[k], faces[id].v[(k + 1) % 3])] = id;
      fresh.push_back(id);
    }
    for (int i : orphans) {
      for (int f : fresh)
        if (faces[f].normal.dot(P[i]) - faces[f].offset > eps) {
          faces[f].outside.push_back(i);
          break;
        }
    }
    for (int f : fresh) work.push_back(f);
  }

  for (const auto& f : faces)
    if (f.alive) out.faces.push_back(f.v);
  return out;
}

inline double hull3_volume(const Hull3& h) {
  Eigen::Vector3d c = Eigen::Vector3d::Zero();
  for (const auto& f : h.faces) c += h.points[f[0]];
  c /= static_cast<double>(h.faces.size());
  std::vector<double> parts;
  parts.reserve(h.faces.size());
  for (const auto& f : h.faces)
    parts.push_back((h.points[f[0]] - c).dot((h.points[f[1]] - c).cross(h.points[f[2]] - c)) / 6.0);
  return pairwise_sum(parts);
}

inline double hull3_area(const Hull3& h) {
  std::vector<double> parts;
  for (const auto& f : h.faces)
    parts.push_back(0.5 * (h.points[f[1]] - h.points[f[0]]).cross(h.points[f[2]] - h.points[f[0]]).norm());
  return pairwise_sum(parts);
}

// ---------------------------------------------------------------------------
// nD brute force

struct Facet {
  Halfspace h;
  std::vector<int> members;  // indices of points on the facet
};

inline constexpr double kCombinatorialBudget = 2e7;

/// Facets of conv(points) by exhaustive n-subset search (any n >= 2).
inline std::vector<Facet> facets_bruteforce(const std::vector<Vec>& pts) {
  const int m = static_cast<int>(pts.size());
  require(m > 0, ErrorCode::DegenerateBody, "no points");
  const int n = static_cast<int>(pts[0].size());
  require(binomial(m, n) * m <= kCombinatorialBudget, ErrorCode::CombinatorialBudget,
          "too many points for exhaustive facet enumeration");
  const double eps = 1e-10 * scale_of(pts);
  std::vector<Facet> out;
  std::unordered_set<std::string> seen;
  for_each_subset(m, n, [&](const std::vector<int>& idx) {
    Mat d(n - 1, n);
    for (int k = 1; k < n; ++k) d.row(k - 1) = (pts[idx[k]] - pts[idx[0]]).transpose();
    Eigen::FullPivLU<Mat> lu(d);
    lu.setThreshold(1e-10);
    if (lu.rank() < n - 1) return;
    Vec normal = lu.kernel().col(0).normalized();
    double off = normal.dot(pts[idx[0]]);
    int pos = 0, neg = 0;
    for (const auto& p : pts) {
      const double s = normal.dot(p) - off;
      if (s > eps) ++pos;
      if (s < -eps) ++neg;
    }
    if (pos > 0 && neg > 0) return;
    if (pos > 0) {
      normal = -normal;
      off = -off;
    }
    Facet f;
    f.h = {normal, off};
    std::string key;
    for (int i = 0; i < m; ++i)
      if (std::abs(normal.dot(pts[i]) - off) <= eps) {
        f.members.push_back(i);
        key += std::to_string(i) + ",";
      }
    if (seen.insert(key).second) out.push_back(std::move(f));
  });
  return out;
}

/// Orthonormal basis (columns) of the hyperplane orthogonal to unit normal a.
inline Mat hyperplane_basis(const Vec& a) {
  const int n = static_cast<int>(a.size());
  Mat full(n, n);
  full.col(0) = a;
  Eigen::HouseholderQR<Mat> qr(full.leftCols(1));
  const Mat q = qr.householderQ();
  return q.rightCols(n - 1);
}

/// Exact volume of conv(points); 1D, 2D (shoelace), 3D (quickhull) or recursive pyramids.
inline double volume_vrep(const std::vector<Vec>& pts) {
  require(!pts.empty(), ErrorCode::DegenerateBody, "no points");
  const int n = static_cast<int>(pts[0].size());
  if (n == 1) {
    double lo = kInf, hi = -kInf;
    for (const auto& p : pts) {
      lo = std::min(lo, p[0]);
      hi = std::max(hi, p[0]);
    }
    return hi - lo;
  }
  if (n == 2) return std::abs(polygon_area(hull2d(pts)));
  if (n == 3) return hull3_volume(hull3d(pts));
  Vec c = Vec::Zero(n);
  for (const auto& p : pts) c += p;
  c /= static_cast<double>(pts.size());
  std::vector<double> parts;
  for (const auto& f : facets_bruteforce(pts)) {
    const Mat basis = hyperplane_basis(f.h.a);
    std::vector<Vec> proj;
    for (int i : f.members) proj.push_back(basis.transpose() * pts[i]);
    parts.push_back((f.h.b - f.h.a.dot(c)) * volume_vrep(proj) / n);
  }
  return pairwise_sum(parts);
}

/// Facet halfspaces of conv(points).
inline std::vector<Halfspace> facets(const std::vector<Vec>& pts) {
  const int n = static_cast<int>(pts[0].size());
  std::vector<Halfspace> out;
  if (n == 2) {
    const auto h = hull2d(pts);
    require(h.size() >= 3, ErrorCode::DegenerateBody, "points are collinear");
    for (std::size_t i = 0; i < h.size(); ++i) {
      const Vec& a = h[i];
      const Vec& b = h[(i + 1) % h.size()];
      Vec normal(2);
      normal << (b[1] - a[1]), -(b[0] - a[0]);
      normal.normalize();
      out.push_back({normal, normal.dot(a)});
    }
    return out;
  }
  if (n == 3) {
    const auto h = hull3d(pts);
    for (const auto& f : h.faces) {
      const Eigen::Vector3d nv = (h.points[f[1]] - h.points[f[0]]).cross(h.points[f[2]] - h.points[f[0]]).normalized();
      Vec a(3);
      a << nv[0], nv[1], nv[2];
      const double b = nv.dot(h.points[f[0]]);
      bool dup = false;
      for (const auto& e : out)
        if ((e.a - a).norm() < 1e-9 && std::abs(e.b - b) < 1e-9 * std::max(1.0, std::abs(b))) dup = true;
      if (!dup) out.push_back({a, b});
    }
    return out;
  }
  for (const auto& f : facets_bruteforce(pts)) out.push_back(f.h);
  return out;
}

/// Extreme points of conv(points).
inline std::vector<Vec> extreme_points(const std::vector<Vec>& pts) {
  const int n = static_cast<int>(pts[0].size());
  if (n == 2) return hull2d(pts);
  std::vector<int> used(pts.size(), 0);
  if (n == 3) {
    const auto h = hull3d(pts);
    for (const auto& f : h.faces)
      for (int v : f) used[v] = 1;
  } else {
    for (const auto& f : facets_bruteforce(pts))
      for (int v : f.members) used[v] = 1;
  }
  std::vector<Vec> out;
  for (std::size_t i = 0; i < pts.size(); ++i)
    if (used[i]) {
      bool dup = false;
      for (const auto& q : out)
        if ((q - pts[i]).norm() < 1e-12 * std::max(1.0, q.norm())) dup = true;
      if (!dup) out.push_back(pts[i]);
    }
  return out;
}

/// True when the rows of a positively span R^n (the H-polytope {A x <= b} is then bounded).
inline bool positively_spanning(const Mat& a) {
  const int n = static_cast<int>(a.cols());
  const Mat at = a.transpose();
  for (int k = 0; k < n; ++k)
    for (double s : {1.0, -1.0}) {
      const Vec d = s * unit(n, k);
      const Vec lam = linalg::nnls(at, d);
      if ((at * lam - d).norm() > 1e-9) return false;
    }
  return true;
}

/// Vertices of {x : A x <= b}; polar hull when the origin is interior, exhaustive otherwise.
inline std::vector<Vec> hrep_vertices(const Mat& a, const Vec& b) {
  const int n = static_cast<int>(a.cols());
  const int m = static_cast<int>(a.rows());
  require(positively_spanning(a), ErrorCode::UnboundedBody, "halfspaces do not bound a region");
  std::vector<Vec> out;
  if (b.minCoeff() > 0 && n <= 3) {
    std::vector<Vec> polar;
    for (int j = 0; j < m; ++j) polar.push_back(a.row(j).transpose() / b[j]);
    for (const auto& f : facets(polar)) out.push_back(f.a / f.b);
    return out;
  }
  require(binomial(m, n) * m <= kCombinatorialBudget, ErrorCode::CombinatorialBudget,
          "too many halfspaces for exhaustive vertex enumeration");
  const double eps = 1e-10 * std::max(1.0, b.cwiseAbs().maxCoeff());
  for_each_subset(m, n, [&](const std::vector<int>& idx) {
    Mat s(n, n);
    Vec r(n);
    for (int k = 0; k < n; ++k) {
      s.row(k) = a.row(idx[k]);
      r[k] = b[idx[k]];
    }
    Eigen::FullPivLU<Mat> lu(s);
    if (!lu.isInvertible() || std::abs(lu.determinant()) < 1e-12) return;
    const Vec x = lu.solve(r);
    if (((a * x - b).array() > eps).any()) return;
    for (const auto& q : out)
      if ((q - x).norm() < 1e-9 * std::max(1.0, q.norm())) return;
    out.push_back(x);
  });
  require(!out.empty(), ErrorCode::EmptySet, "halfspaces have empty intersection");
  return out;
}

/// Surface area of conv(points) in n = 2 (perimeter) or n = 3.
inline double surface_area(const std::vector<Vec>& pts) {
  const int n = static_cast<int>(pts[0].size());
  if (n == 2) return polygon_perimeter(hull2d(pts));
  require(n == 3, ErrorCode::DimensionUnsupported, "surface area needs n <= 3");
  return hull3_area(hull3d(pts));
}

// ---------------------------------------------------------------------------
// Direction grids

/// Uniform angles k * 2 pi / m on S^1.
inline std::vector<Vec> circle_grid(int m) {
  std::vector<Vec> out;
  for (int k = 0; k < m; ++k) {
    const double t = 2 * kPi * k / m;
    out.push_back(make_vec({std::cos(t), std::sin(t)}));
  }
  return out;
}

/// Subdivided icosahedron; level 5 gives 10242 nodes.
inline std::vector<Vec> icosphere(int level) {
  using V3 = Eigen::Vector3d;
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<V3> v = {{-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t},
                       {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
  for (auto& p : v) p.normalize();
  std::vector<std::array<int, 3>> f = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                                       {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                                       {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                                       {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
  for (int l = 0; l < level; ++l) {
    std::unordered_map<std::uint64_t, int> mid;
    auto midpoint = [&](int a, int b) {
      const auto key = detail::edge_key(std::min(a, b), std::max(a, b));
      auto it = mid.find(key);
      if (it != mid.end()) return it->second;
      v.push_back((v[a] + v[b]).normalized());
      const int id = static_cast<int>(v.size()) - 1;
      mid[key] = id;
      return id;
    };
    std::vector<std::array<int, 3>> g;
    for (const auto& tri : f) {
      const int ab = midpoint(tri[0], tri[1]), bc = midpoint(tri[1], tri[2]), ca = midpoint(tri[2], tri[0]);
      g.push_back({tri[0], ab, ca});
      g.push_back({tri[1], bc, ab});
      g.push_back({tri[2], ca, bc});
      g.push_back({ab, bc, ca});
    }
    f = std::move(g);
  }
  std::vector<Vec> out;
  for (const auto& p : v) out.push_back(make_vec({p[0], p[1], p[2]}));
  return out;
}

}  // namespace isozonoid::poly
