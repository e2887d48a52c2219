#pragma once

// Analytic finite-perimeter test sets: exact indicators, voxel rasterization
// over a box domain, and boundary quadrature (points, outer normals, weights).
// All sets are closed: boundary points belong to the set.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "geometry.hpp"
#include "quadrature.hpp"

namespace nlperim {

/// Open axis-aligned box Omega sampled by cubic voxels. `resolution` is the
/// voxel count along axis 0; the other axes must hold an integer number of voxels.
struct Domain {
  Vec lower;
  Vec upper;
  int resolution = 64;

  int dim() const { return static_cast<int>(lower.size()); }
  double spacing() const { return (upper[0] - lower[0]) / resolution; }

  void validate() const {
    if (lower.size() != upper.size() || lower.size() < 2 || static_cast<int>(lower.size()) > kMaxDim)
      throw std::invalid_argument("domain: corner dimensions invalid");
    for (std::size_t k = 0; k < lower.size(); ++k)
      if (!(lower[k] < upper[k])) throw std::invalid_argument("domain: lower must be < upper componentwise");
    if (resolution < 8) throw std::invalid_argument("domain: resolution must be >= 8");
    (void)counts();
  }

  std::vector<std::size_t> counts() const {
    const double h = spacing();
    std::vector<std::size_t> n(lower.size());
    for (std::size_t k = 0; k < lower.size(); ++k) {
      const double cells = (upper[k] - lower[k]) / h;
      const double rounded = std::round(cells);
      if (std::abs(cells - rounded) > 1e-9 * std::max(1.0, cells) || rounded < 1.0)
        throw std::invalid_argument("domain: axis " + std::to_string(k) + " extent is not a multiple of the voxel size");
      n[k] = static_cast<std::size_t>(rounded);
    }
    return n;
  }

  std::size_t voxel_count() const {
    std::size_t total = 1;
    for (std::size_t n : counts()) total *= n;
    return total;
  }

  double voxel_volume() const { return std::pow(spacing(), dim()); }

  bool contains_open(std::span<const double> x) const {
    for (std::size_t k = 0; k < lower.size(); ++k)
      if (!(x[k] > lower[k] && x[k] < upper[k])) return false;
    return true;
  }
};

struct Ball {
  Vec center;
  double radius = 0.0;
};

/// Closed axis-aligned box.
struct Box {
  Vec lower;
  Vec upper;
};

/// {x : offset_low <= x . normal <= offset_high}, normal a unit vector.
struct Slab {
  Vec normal;
  double offset_low = 0.0;
  double offset_high = 0.0;
};

/// One term amplitude * trig(2 pi k . x), trig = sin or cos.
struct TrigTerm {
  double amplitude = 0.0;
  bool cosine = false;
  Vec wavenumbers;
};

/// Height map base + sum of trig terms, with an exact gradient.
struct TrigSeries {
  double base = 0.0;
  std::vector<TrigTerm> terms;

  double value(std::span<const double> x) const {
    double u = base;
    for (const TrigTerm& t : terms) {
      const double arg = 2.0 * std::numbers::pi * dot(t.wavenumbers, x);
      u += t.amplitude * (t.cosine ? std::cos(arg) : std::sin(arg));
    }
    return u;
  }

  void gradient(std::span<const double> x, std::span<double> out) const {
    std::fill(out.begin(), out.end(), 0.0);
    for (const TrigTerm& t : terms) {
      const double arg = 2.0 * std::numbers::pi * dot(t.wavenumbers, x);
      const double d = t.amplitude * 2.0 * std::numbers::pi * (t.cosine ? -std::sin(arg) : std::cos(arg));
      for (std::size_t k = 0; k < out.size(); ++k) out[k] += d * t.wavenumbers[k];
    }
  }

  /// this + scale * other.
  TrigSeries plus(const TrigSeries& other, double scale) const {
    TrigSeries out = *this;
    out.base += scale * other.base;
    for (TrigTerm t : other.terms) {
      t.amplitude *= scale;
      out.terms.push_back(std::move(t));
    }
    return out;
  }
};

/// {(x, y) : x in closure(D), 0 <= y <= u(x)} with D a rectangle in R^{N-1}.
struct Graph {
  Vec base_lower;
  Vec base_upper;
  std::function<double(std::span<const double>)> height;
  std::function<void(std::span<const double>, std::span<double>)> height_gradient;
  /// Add the floor {y = 0} and the lateral sides to the boundary quadrature.
  bool include_floor_and_sides = false;
};

struct Empty {
  int dim = 2;
};

using Shape = std::variant<Ball, Box, Slab, Graph, Empty>;

inline Graph make_graph(Vec base_lower, Vec base_upper, TrigSeries height, bool include_floor_and_sides = false) {
  Graph g;
  g.base_lower = std::move(base_lower);
  g.base_upper = std::move(base_upper);
  g.height = [height](std::span<const double> x) { return height.value(x); };
  g.height_gradient = [height](std::span<const double> x, std::span<double> out) { height.gradient(x, out); };
  g.include_floor_and_sides = include_floor_and_sides;
  return g;
}

inline int shape_dim(const Shape& shape) {
  return std::visit(
      [](const auto& s) -> int {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, Ball>) return static_cast<int>(s.center.size());
        else if constexpr (std::is_same_v<S, Box>) return static_cast<int>(s.lower.size());
        else if constexpr (std::is_same_v<S, Slab>) return static_cast<int>(s.normal.size());
        else if constexpr (std::is_same_v<S, Graph>) return static_cast<int>(s.base_lower.size()) + 1;
        else return s.dim;
      },
      shape);
}

namespace shapes_detail {

inline bool contains(const Ball& b, std::span<const double> x) {
  double r2 = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) r2 += (x[k] - b.center[k]) * (x[k] - b.center[k]);
  return r2 <= b.radius * b.radius;
}

inline bool contains(const Box& b, std::span<const double> x) {
  for (std::size_t k = 0; k < x.size(); ++k)
    if (x[k] < b.lower[k] || x[k] > b.upper[k]) return false;
  return true;
}

inline bool contains(const Slab& s, std::span<const double> x) {
  const double p = dot(s.normal, x);
  return p >= s.offset_low && p <= s.offset_high;
}

inline bool in_base(const Graph& g, std::span<const double> x) {
  for (std::size_t k = 0; k < g.base_lower.size(); ++k)
    if (x[k] < g.base_lower[k] || x[k] > g.base_upper[k]) return false;
  return true;
}

inline bool contains(const Graph& g, std::span<const double> x) {
  const std::size_t m = g.base_lower.size();
  const std::span<const double> base = x.first(m);
  if (!in_base(g, base)) return false;
  const double y = x[m];
  return y >= 0.0 && y <= g.height(base);
}

inline bool contains(const Empty&, std::span<const double>) { return false; }

}  // namespace shapes_detail

/// Exact membership; boundary points resolve to 1.
inline int indicator(const Shape& shape, std::span<const double> x) {
  return std::visit([&](const auto& s) { return shapes_detail::contains(s, x) ? 1 : 0; }, shape);
}

/// Voxel sampling of chi_{E cap Omega}. `values` holds the fraction of
/// stratified sub-points inside E; `moments[k]` holds the first moment of the
/// inside sub-points about the voxel center along axis k (length units,
/// normalized by the sub-point count). Storage is row-major, last axis fastest.
struct IndicatorField {
  Domain domain;
  std::vector<std::size_t> counts;
  std::vector<double> values;
  std::vector<std::vector<double>> moments;

  std::size_t size() const { return values.size(); }
};

namespace shapes_detail {

template <class S>
void rasterize_impl(const S& shape, const Domain& dom, int ss, IndicatorField& out) {
  const int dim = dom.dim();
  const int m = dim - 1;  // the last axis is swept innermost
  const double h = dom.spacing();
  const std::vector<std::size_t>& n = out.counts;

  std::vector<double> sub(ss);
  for (int j = 0; j < ss; ++j) sub[j] = (j + 0.5) / ss;  // fractional sub-point offsets within a voxel
  std::size_t sub_columns = 1;
  for (int k = 0; k < m; ++k) sub_columns *= ss;
  const double inv_count = 1.0 / (static_cast<double>(sub_columns) * ss);

  std::array<std::size_t, kMaxDim> col{};
  std::vector<double> sub_x(sub_columns * m);     // sub-point coordinates in the column
  std::vector<double> sub_off(sub_columns * m);   // offsets from the voxel center
  std::vector<double> heights(sub_columns, 0.0);
  std::array<double, kMaxDim> point{};
  std::size_t flat = 0;
  while (true) {
    for (std::size_t c = 0; c < sub_columns; ++c) {
      std::size_t rem = c;
      for (int k = m - 1; k >= 0; --k) {
        const int j = static_cast<int>(rem % ss);
        rem /= ss;
        sub_x[c * m + k] = dom.lower[k] + (col[k] + sub[j]) * h;
        sub_off[c * m + k] = (sub[j] - 0.5) * h;
      }
      if constexpr (std::is_same_v<S, Graph>) {
        const std::span<const double> base(&sub_x[c * m], m);
        heights[c] = in_base(shape, base) ? shape.height(base) : -1.0;
      }
    }
    for (std::size_t iy = 0; iy < n[m]; ++iy, ++flat) {
      double count = 0.0;
      std::array<double, kMaxDim> moment{};
      for (std::size_t c = 0; c < sub_columns; ++c) {
        for (int j = 0; j < ss; ++j) {
          const double y = dom.lower[m] + (iy + sub[j]) * h;
          bool inside;
          if constexpr (std::is_same_v<S, Graph>) {
            inside = y >= 0.0 && y <= heights[c];
          } else {
            for (int k = 0; k < m; ++k) point[k] = sub_x[c * m + k];
            point[m] = y;
            inside = contains(shape, std::span<const double>(point.data(), dim));
          }
          if (inside) {
            count += 1.0;
            for (int k = 0; k < m; ++k) moment[k] += sub_off[c * m + k];
            moment[m] += (sub[j] - 0.5) * h;
          }
        }
      }
      out.values[flat] = count * inv_count;
      for (int k = 0; k < dim; ++k) out.moments[k][flat] = moment[k] * inv_count;
    }
    int k = m - 1;
    while (k >= 0) {
      if (++col[k] < n[k]) break;
      col[k] = 0;
      --k;
    }
    if (k < 0) break;
  }
}

}  // namespace shapes_detail

/// Fractional rasterization with supersample^N stratified sub-points per voxel.
inline IndicatorField rasterize(const Shape& shape, const Domain& dom, int supersample = 2) {
  if (supersample < 1) throw std::invalid_argument("rasterize: supersample must be >= 1");
  dom.validate();
  if (shape_dim(shape) != dom.dim()) throw std::invalid_argument("rasterize: shape and domain dimensions differ");
  IndicatorField out;
  out.domain = dom;
  out.counts = dom.counts();
  const std::size_t total = dom.voxel_count();
  out.values.assign(total, 0.0);
  out.moments.assign(dom.dim(), std::vector<double>(total, 0.0));
  std::visit([&](const auto& s) { shapes_detail::rasterize_impl(s, dom, supersample, out); }, shape);
  return out;
}

/// Quadrature for the surface measure on the part of the boundary inside Omega.
struct BoundaryQuadrature {
  std::vector<Vec> points;
  std::vector<Vec> normals;
  std::vector<double> weights;
  std::vector<std::string> flags;

  std::size_t size() const { return weights.size(); }
  double total_weight() const {
    double s = 0.0;
    for (double w : weights) s += w;
    return s;
  }
  void add(Vec p, Vec n, double w) {
    points.push_back(std::move(p));
    normals.push_back(std::move(n));
    weights.push_back(w);
  }
};

namespace shapes_detail {

struct QuadBuilder {
  const Domain& dom;
  BoundaryQuadrature& quad;
  std::size_t dropped = 0;

  void add(Vec p, Vec n, double w) {
    if (!dom.contains_open(p)) {
      ++dropped;
      return;
    }
    quad.add(std::move(p), std::move(n), w);
  }
};

/// Tensor Gauss-Legendre over an axis-aligned rectangle (possibly 1D or 0D).
template <class F>
void tensor_rect(std::span<const double> lo, std::span<const double> hi, int order, F&& emit) {
  const int m = static_cast<int>(lo.size());
  std::vector<Rule1D> rules;
  for (int k = 0; k < m; ++k) rules.push_back(gauss_legendre(order, lo[k], hi[k]));
  std::array<std::size_t, kMaxDim> idx{};
  std::vector<double> x(m);
  while (true) {
    double w = 1.0;
    for (int k = 0; k < m; ++k) {
      x[k] = rules[k].nodes[idx[k]];
      w *= rules[k].weights[idx[k]];
    }
    emit(std::span<const double>(x), w);
    int k = m - 1;
    while (k >= 0) {
      if (++idx[k] < rules[k].size()) break;
      idx[k] = 0;
      --k;
    }
    if (k < 0) break;
  }
}

inline void ball_nodes(const Ball& b, int order, QuadBuilder& qb) {
  const int dim = static_cast<int>(b.center.size());
  if (dim == 2) {
    const double dphi = 2.0 * std::numbers::pi / order;
    for (int j = 0; j < order; ++j) {
      const double phi = j * dphi;
      Vec n{std::cos(phi), std::sin(phi)};
      Vec p{b.center[0] + b.radius * n[0], b.center[1] + b.radius * n[1]};
      qb.add(std::move(p), std::move(n), b.radius * dphi);
    }
    return;
  }
  if (dim == 3) {
    const Rule1D& polar = gauss_legendre(order);
    const int angles = 2 * order;
    const double dphi = 2.0 * std::numbers::pi / angles;
    for (std::size_t i = 0; i < polar.size(); ++i) {
      const double ct = polar.nodes[i];
      const double st = std::sqrt(1.0 - ct * ct);
      for (int j = 0; j < angles; ++j) {
        Vec n{st * std::cos(j * dphi), st * std::sin(j * dphi), ct};
        Vec p(3);
        for (int k = 0; k < 3; ++k) p[k] = b.center[k] + b.radius * n[k];
        qb.add(std::move(p), std::move(n), b.radius * b.radius * polar.weights[i] * dphi);
      }
    }
    return;
  }
  throw std::invalid_argument("boundary_quadrature: balls supported in dimensions 2 and 3");
}

inline void box_nodes(const Box& b, const Domain& dom, int order, QuadBuilder& qb) {
  const int dim = static_cast<int>(b.lower.size());
  for (int axis = 0; axis < dim; ++axis) {
    for (int side = 0; side < 2; ++side) {
      const double c = side == 0 ? b.lower[axis] : b.upper[axis];
      if (!(c > dom.lower[axis] && c < dom.upper[axis])) continue;  // on or outside the boundary of Omega
      Vec lo;
      Vec hi;
      bool empty = false;
      for (int k = 0; k < dim; ++k) {
        if (k == axis) continue;
        lo.push_back(std::max(b.lower[k], dom.lower[k]));
        hi.push_back(std::min(b.upper[k], dom.upper[k]));
        if (!(lo.back() < hi.back())) empty = true;
      }
      if (empty) continue;
      tensor_rect(lo, hi, order, [&](std::span<const double> x, double w) {
        Vec p(dim);
        Vec n(dim, 0.0);
        for (int k = 0, j = 0; k < dim; ++k) p[k] = k == axis ? c : x[j++];
        n[axis] = side == 0 ? -1.0 : 1.0;
        qb.add(std::move(p), std::move(n), w);
      });
    }
  }
}

/// Polygon {x . n = c} intersected with a 3D box, vertices in cyclic order.
inline std::vector<Vec> plane_box_polygon(std::span<const double> n, double c, const Vec& lo, const Vec& hi) {
  std::vector<Vec> pts;
  for (int axis = 0; axis < 3; ++axis) {
    const int a1 = (axis + 1) % 3;
    const int a2 = (axis + 2) % 3;
    for (int s1 = 0; s1 < 2; ++s1) {
      for (int s2 = 0; s2 < 2; ++s2) {
        Vec p(3);
        p[a1] = s1 ? hi[a1] : lo[a1];
        p[a2] = s2 ? hi[a2] : lo[a2];
        if (std::abs(n[axis]) < 1e-15) continue;
        const double t = (c - n[a1] * p[a1] - n[a2] * p[a2]) / n[axis];
        if (t < lo[axis] || t > hi[axis]) continue;
        p[axis] = t;
        bool duplicate = false;
        for (const Vec& q : pts)
          if (std::abs(q[0] - p[0]) + std::abs(q[1] - p[1]) + std::abs(q[2] - p[2]) < 1e-13) duplicate = true;
        if (!duplicate) pts.push_back(std::move(p));
      }
    }
  }
  if (pts.size() < 3) return {};
  Vec centroid(3, 0.0);
  for (const Vec& p : pts)
    for (int k = 0; k < 3; ++k) centroid[k] += p[k] / pts.size();
  // In-plane basis e1, e2 = n x e1.
  Vec e1(3);
  for (int k = 0; k < 3; ++k) e1[k] = pts[0][k] - centroid[k];
  e1 = normalized(e1);
  const Vec e2{n[1] * e1[2] - n[2] * e1[1], n[2] * e1[0] - n[0] * e1[2], n[0] * e1[1] - n[1] * e1[0]};
  std::vector<std::pair<double, Vec>> ordered;
  for (Vec& p : pts) {
    Vec d(3);
    for (int k = 0; k < 3; ++k) d[k] = p[k] - centroid[k];
    ordered.emplace_back(std::atan2(dot(d, e2), dot(d, e1)), std::move(p));
  }
  std::sort(ordered.begin(), ordered.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<Vec> out;
  for (auto& [angle, p] : ordered) out.push_back(std::move(p));
  return out;
}

inline void plane_nodes(const Vec& n, double c, const Vec& outward, const Domain& dom, int order, QuadBuilder& qb) {
  const int dim = static_cast<int>(n.size());
  if (dim == 2) {
    // Line c n + tau n_perp clipped to the closed domain rectangle.
    const Vec perp{-n[1], n[0]};
    double tmin = -1e300;
    double tmax = 1e300;
    for (int k = 0; k < 2; ++k) {
      const double base = c * n[k];
      if (std::abs(perp[k]) < 1e-15) {
        if (base <= dom.lower[k] || base >= dom.upper[k]) return;
        continue;
      }
      double t0 = (dom.lower[k] - base) / perp[k];
      double t1 = (dom.upper[k] - base) / perp[k];
      if (t0 > t1) std::swap(t0, t1);
      tmin = std::max(tmin, t0);
      tmax = std::min(tmax, t1);
    }
    if (!(tmin < tmax)) return;
    const Rule1D rule = gauss_legendre(order, tmin, tmax);
    for (std::size_t i = 0; i < rule.size(); ++i) {
      Vec p{c * n[0] + rule.nodes[i] * perp[0], c * n[1] + rule.nodes[i] * perp[1]};
      qb.add(std::move(p), outward, rule.weights[i]);
    }
    return;
  }
  if (dim != 3) throw std::invalid_argument("boundary_quadrature: slabs supported in dimensions 2 and 3");
  const std::vector<Vec> poly = plane_box_polygon(n, c, dom.lower, dom.upper);
  if (poly.size() < 3) return;
  const Rule1D unit = gauss_legendre(order, 0.0, 1.0);
  // Fan triangulation; each triangle uses the collapsed (Duffy) tensor rule.
  for (std::size_t t = 1; t + 1 < poly.size(); ++t) {
    const Vec& a = poly[0];
    const Vec& b = poly[t];
    const Vec& cc = poly[t + 1];
    Vec ab(3);
    Vec bc(3);
    for (int k = 0; k < 3; ++k) {
      ab[k] = b[k] - a[k];
      bc[k] = cc[k] - b[k];
    }
    const Vec cross{ab[1] * bc[2] - ab[2] * bc[1], ab[2] * bc[0] - ab[0] * bc[2], ab[0] * bc[1] - ab[1] * bc[0]};
    const double twice_area = norm(cross);
    for (std::size_t i = 0; i < unit.size(); ++i) {
      const double s = unit.nodes[i];
      for (std::size_t j = 0; j < unit.size(); ++j) {
        const double tt = unit.nodes[j];
        Vec p(3);
        for (int k = 0; k < 3; ++k) p[k] = a[k] + s * ab[k] + s * tt * bc[k];
        qb.add(std::move(p), outward, twice_area * s * unit.weights[i] * unit.weights[j]);
      }
    }
  }
}

inline void slab_nodes(const Slab& s, const Domain& dom, int order, QuadBuilder& qb) {
  require_unit(s.normal, static_cast<int>(s.normal.size()), "slab");
  Vec inward(s.normal.size());
  for (std::size_t k = 0; k < inward.size(); ++k) inward[k] = -s.normal[k];
  plane_nodes(s.normal, s.offset_low, inward, dom, order, qb);
  plane_nodes(s.normal, s.offset_high, s.normal, dom, order, qb);
}

inline void graph_nodes(const Graph& g, const Domain& dom, int order, QuadBuilder& qb) {
  const int m = static_cast<int>(g.base_lower.size());
  const int dim = m + 1;
  Vec lo(m);
  Vec hi(m);
  for (int k = 0; k < m; ++k) {
    lo[k] = std::max(g.base_lower[k], dom.lower[k]);
    hi[k] = std::min(g.base_upper[k], dom.upper[k]);
    if (!(lo[k] < hi[k])) return;
  }
  std::vector<double> grad(m);
  tensor_rect(lo, hi, order, [&](std::span<const double> x, double w) {
    g.height_gradient(x, grad);
    const double stretch = std::sqrt(1.0 + dot(grad, grad));
    Vec p(dim);
    Vec n(dim);
    for (int k = 0; k < m; ++k) {
      p[k] = x[k];
      n[k] = -grad[k] / stretch;
    }
    p[m] = g.height(x);
    n[m] = 1.0 / stretch;
    qb.add(std::move(p), std::move(n), w * stretch);
  });
  if (!g.include_floor_and_sides) return;

  tensor_rect(lo, hi, order, [&](std::span<const double> x, double w) {
    Vec p(x.begin(), x.end());
    p.push_back(0.0);
    Vec n(dim, 0.0);
    n[m] = -1.0;
    qb.add(std::move(p), std::move(n), w);
  });
  // Lateral faces x_axis = const, parametrized by the remaining base coordinates
  // and y = u(x) tau with tau in [0, 1] (Jacobian u).
  for (int axis = 0; axis < m; ++axis) {
    for (int side = 0; side < 2; ++side) {
      const double c = side == 0 ? g.base_lower[axis] : g.base_upper[axis];
      Vec flo;
      Vec fhi;
      for (int k = 0; k < m; ++k) {
        if (k == axis) continue;
        flo.push_back(lo[k]);
        fhi.push_back(hi[k]);
      }
      flo.push_back(0.0);
      fhi.push_back(1.0);
      tensor_rect(flo, fhi, order, [&](std::span<const double> q, double w) {
        Vec x(m);
        for (int k = 0, j = 0; k < m; ++k) x[k] = k == axis ? c : q[j++];
        const double u = g.height(x);
        Vec p = x;
        p.push_back(u * q[m - 1]);
        Vec n(dim, 0.0);
        n[axis] = side == 0 ? -1.0 : 1.0;
        qb.add(std::move(p), std::move(n), w * u);
      });
    }
  }
}

}  // namespace shapes_detail

/// Boundary nodes of E inside Omega. Nodes falling outside the open domain are
/// dropped (flag "clipped"); orders below 16 on curved variants are flagged "coarse".
inline BoundaryQuadrature boundary_quadrature(const Shape& shape, const Domain& dom, int order) {
  if (order < 4) throw std::invalid_argument("boundary_quadrature: order must be >= 4");
  if (shape_dim(shape) != dom.dim()) throw std::invalid_argument("boundary_quadrature: dimension mismatch");
  BoundaryQuadrature quad;
  shapes_detail::QuadBuilder qb{dom, quad};
  bool curved = false;
  std::visit(
      [&](const auto& s) {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, Ball>) {
          shapes_detail::ball_nodes(s, order, qb);
          curved = true;
        } else if constexpr (std::is_same_v<S, Box>) {
          shapes_detail::box_nodes(s, dom, order, qb);
        } else if constexpr (std::is_same_v<S, Slab>) {
          shapes_detail::slab_nodes(s, dom, order, qb);
        } else if constexpr (std::is_same_v<S, Graph>) {
          shapes_detail::graph_nodes(s, dom, order, qb);
          curved = true;
        }
      },
      shape);
  if (curved && order < 16) quad.flags.push_back("coarse");
  if (qb.dropped > 0) quad.flags.push_back("clipped");
  return quad;
}

}  // namespace nlperim
