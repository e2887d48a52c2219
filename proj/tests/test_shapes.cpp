#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include <nlperim/shapes.hpp>

using namespace nlperim;
using Catch::Approx;

namespace {

// python3 -c "import math; n=10000;
//   print(repr(sum(math.sqrt(1+(0.2*math.pi*math.cos(2*math.pi*i/n))**2) for i in range(n))/n))"
constexpr double kSineGraphLength = 1.092383547331172;

const Domain kUnitSquare{{0.0, 0.0}, {1.0, 1.0}, 64};

Graph sine_graph() {
  TrigSeries u;
  u.base = 0.5;
  u.terms.push_back({0.1, false, {1.0}});
  return make_graph({0.0}, {1.0}, u);
}

double raster_volume(const Shape& s, const Domain& d, int ss) {
  const IndicatorField f = rasterize(s, d, ss);
  double sum = 0.0;
  for (double v : f.values) sum += v;
  return sum * d.voxel_volume();
}

}  // namespace

TEST_CASE("indicator uses closed sets", "[shapes]") {
  const Shape ball = Ball{{0.0, 0.0}, 0.3};
  CHECK(indicator(ball, Vec{0.0, 0.0}) == 1);
  CHECK(indicator(ball, Vec{0.3, 0.0}) == 1);
  CHECK(indicator(ball, Vec{0.3000001, 0.0}) == 0);
  const Shape g = sine_graph();
  const double x = 0.3;
  const double u = 0.5 + 0.1 * std::sin(2.0 * std::numbers::pi * x);
  CHECK(indicator(g, Vec{x, u}) == 1);
  CHECK(indicator(g, Vec{x, u + 1e-9}) == 0);
  CHECK(indicator(g, Vec{x, 0.0}) == 1);
  CHECK(indicator(g, Vec{x, -1e-9}) == 0);
  CHECK(indicator(Shape{Box{{0.1, 0.1}, {0.4, 0.6}}}, Vec{0.4, 0.6}) == 1);
  CHECK(indicator(Shape{Slab{{1.0, 0.0}, 0.25, 0.75}}, Vec{0.25, 0.9}) == 1);
  CHECK(indicator(Shape{Empty{2}}, Vec{0.5, 0.5}) == 0);
}

TEST_CASE("rasterized ball volume converges at first order or better", "[shapes]") {
  const Shape ball = Ball{{0.5, 0.5}, 0.3};
  const double exact = std::numbers::pi * 0.09;
  const double e1 = std::abs(raster_volume(ball, {{0.0, 0.0}, {1.0, 1.0}, 64}, 2) - exact);
  const double e2 = std::abs(raster_volume(ball, {{0.0, 0.0}, {1.0, 1.0}, 128}, 2) - exact);
  CHECK(e2 < e1);
  CHECK(e1 < 1.0 / 64);
}

TEST_CASE("grid-aligned slab rasterizes to an exact 0/1 field", "[shapes]") {
  const IndicatorField f = rasterize(Slab{{1.0, 0.0}, 0.25, 0.75}, kUnitSquare, 1);
  for (double v : f.values) CHECK((v == 0.0 || v == 1.0));
  double sum = 0.0;
  for (double v : f.values) sum += v;
  CHECK(sum * kUnitSquare.voxel_volume() == Approx(0.5).epsilon(1e-14));
}

TEST_CASE("box and ball volumes at resolution 256", "[shapes]") {
  const Domain d{{0.0, 0.0}, {1.0, 1.0}, 256};
  const double box = raster_volume(Box{{0.2, 0.3}, {0.71, 0.66}}, d, 2);
  const double ball = raster_volume(Ball{{0.5, 0.5}, 0.3}, d, 2);
  CHECK(std::abs(box - 0.51 * 0.36) < 0.01 * 0.51 * 0.36);
  CHECK(std::abs(ball - std::numbers::pi * 0.09) < 0.01 * std::numbers::pi * 0.09);
}

TEST_CASE("raster values lie in [0, 1] and moments vanish on full voxels", "[shapes]") {
  const IndicatorField f = rasterize(sine_graph(), kUnitSquare, 4);
  for (std::size_t v = 0; v < f.size(); ++v) {
    CHECK(f.values[v] >= 0.0);
    CHECK(f.values[v] <= 1.0);
    if (f.values[v] == 1.0 || f.values[v] == 0.0) {
      CHECK(f.moments[0][v] == Approx(0.0).margin(1e-15));
      CHECK(f.moments[1][v] == Approx(0.0).margin(1e-15));
    }
  }
}

TEST_CASE("ball boundary quadrature", "[shapes]") {
  const Domain d{{0.0, 0.0}, {1.0, 1.0}, 64};
  const BoundaryQuadrature q = boundary_quadrature(Ball{{0.5, 0.5}, 0.3}, d, 256);
  CHECK(q.total_weight() == Approx(2.0 * std::numbers::pi * 0.3).margin(1e-10));
  CHECK(q.flags.empty());
  for (std::size_t i = 0; i < q.size(); ++i) {
    CHECK(norm(q.normals[i]) == Approx(1.0).margin(1e-14));
    CHECK(q.weights[i] > 0.0);
  }
  CHECK(boundary_quadrature(Ball{{0.5, 0.5}, 0.3}, d, 8).flags == std::vector<std::string>{"coarse"});
  const Domain d3{{0.0, 0.0, 0.0}, {1.0, 1.0, 1.0}, 16};
  const BoundaryQuadrature q3 = boundary_quadrature(Ball{{0.5, 0.5, 0.5}, 0.3}, d3, 64);
  CHECK(q3.total_weight() == Approx(4.0 * std::numbers::pi * 0.09).epsilon(1e-12));
}

TEST_CASE("flat graph has vertical normals and weight |D|", "[shapes]") {
  TrigSeries flat;
  flat.base = 0.4;
  const BoundaryQuadrature q = boundary_quadrature(make_graph({0.0}, {1.0}, flat), kUnitSquare, 32);
  CHECK(q.total_weight() == Approx(1.0).epsilon(1e-14));
  for (const Vec& n : q.normals) {
    CHECK(n[0] == 0.0);
    CHECK(n[1] == 1.0);
  }
}

TEST_CASE("sine graph length matches the trapezoid golden value", "[shapes]") {
  const BoundaryQuadrature q = boundary_quadrature(sine_graph(), kUnitSquare, 256);
  CHECK(q.total_weight() == Approx(kSineGraphLength).margin(1e-10));
  for (const Vec& n : q.normals) {
    CHECK(norm(n) == Approx(1.0).margin(1e-14));
    CHECK(n[1] > 0.0);
  }
}

TEST_CASE("graph perimeter converges at second order or better", "[shapes]") {
  const double e8 = std::abs(boundary_quadrature(sine_graph(), kUnitSquare, 8).total_weight() - kSineGraphLength);
  const double e16 = std::abs(boundary_quadrature(sine_graph(), kUnitSquare, 16).total_weight() - kSineGraphLength);
  CHECK(e16 <= e8 / 4.0 + 1e-14);
}

TEST_CASE("box faces on the domain boundary are excluded", "[shapes]") {
  const BoundaryQuadrature inner = boundary_quadrature(Box{{0.2, 0.3}, {0.7, 0.6}}, kUnitSquare, 8);
  CHECK(inner.total_weight() == Approx(2.0 * (0.5 + 0.3)).epsilon(1e-14));
  const BoundaryQuadrature touching = boundary_quadrature(Box{{0.0, 0.3}, {0.7, 0.6}}, kUnitSquare, 8);
  CHECK(touching.total_weight() == Approx(2.0 * 0.7 + 0.3).epsilon(1e-14));
}

TEST_CASE("slab faces are clipped to the domain", "[shapes]") {
  const BoundaryQuadrature q = boundary_quadrature(Slab{{1.0, 0.0}, 0.25, 0.75}, kUnitSquare, 8);
  CHECK(q.total_weight() == Approx(2.0).epsilon(1e-14));
  const Domain d3{{0.0, 0.0, 0.0}, {1.0, 1.0, 1.0}, 16};
  const Vec n = normalized(Vec{1.0, 1.0, 1.0});
  const BoundaryQuadrature q3 = boundary_quadrature(Slab{n, 0.5, 10.0}, d3, 8);
  // x + y + z = a: triangle of area sqrt(3)/2 * a^2.
  const double a = 0.5 * std::sqrt(3.0);
  CHECK(q3.total_weight() == Approx(std::sqrt(3.0) / 2.0 * a * a).epsilon(1e-12));
}

TEST_CASE("domain validation", "[shapes]") {
  CHECK_THROWS_AS((Domain{{0.0, 0.0}, {1.0, 1.0}, 4}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((Domain{{0.0, 0.0}, {1.0, 0.3}, 8}.validate()), std::invalid_argument);
  CHECK_NOTHROW((Domain{{0.0, 0.0}, {1.0, 0.5}, 8}.validate()));
}
