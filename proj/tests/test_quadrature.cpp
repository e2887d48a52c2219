#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include <nlperim/quadrature.hpp>

using namespace nlperim;
using Catch::Approx;

TEST_CASE("Gauss-Legendre is exact to degree 2n-1", "[quadrature]") {
  for (int n : {1, 2, 5, 16, 64}) {
    const Rule1D& r = gauss_legendre(n);
    REQUIRE(r.size() == static_cast<std::size_t>(n));
    for (int deg = 0; deg <= 2 * n - 1; deg += (n > 8 ? 7 : 1)) {
      double sum = 0.0;
      for (std::size_t i = 0; i < r.size(); ++i) sum += r.weights[i] * std::pow(r.nodes[i], deg);
      const double exact = deg % 2 ? 0.0 : 2.0 / (deg + 1);
      CHECK(sum == Approx(exact).margin(1e-13));
    }
  }
}

TEST_CASE("Gauss-Legendre nodes are symmetric and weights sum to the length", "[quadrature]") {
  const Rule1D& r = gauss_legendre(33);
  double total = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    total += r.weights[i];
    CHECK(r.nodes[i] == Approx(-r.nodes[r.size() - 1 - i]).margin(1e-15));
  }
  CHECK(total == Approx(2.0).epsilon(1e-14));
  const Rule1D s = gauss_legendre(12, 1.0, 4.0);
  double scaled = 0.0;
  for (double w : s.weights) scaled += w;
  CHECK(scaled == Approx(3.0).epsilon(1e-14));
}

TEST_CASE("integrate and integrate_composite on smooth functions", "[quadrature]") {
  CHECK(integrate([](double x) { return std::exp(x); }, 0.0, 1.0, 16) == Approx(std::exp(1.0) - 1.0).epsilon(1e-14));
  CHECK(integrate_composite([](double x) { return std::sin(x); }, 0.0, std::numbers::pi, 8, 8) ==
        Approx(2.0).epsilon(1e-14));
}

TEST_CASE("unit ball volumes and sphere areas", "[quadrature]") {
  CHECK(unit_ball_volume(1) == Approx(2.0));
  CHECK(unit_ball_volume(2) == Approx(std::numbers::pi));
  CHECK(unit_ball_volume(3) == Approx(4.0 * std::numbers::pi / 3.0));
  CHECK(unit_sphere_area(2) == Approx(2.0 * std::numbers::pi));
  CHECK(unit_sphere_area(3) == Approx(4.0 * std::numbers::pi));
  for (int n = 2; n <= 6; ++n) CHECK(unit_sphere_area(n) == Approx(n * unit_ball_volume(n)));
}
