#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include <nlperim/density.hpp>

using namespace nlperim;
using Catch::Approx;

namespace {

// python3 -c "from mpmath import mp,quad,exp; mp.dps=30; phi=lambda r: exp(-1/(1-r*r)) if r<1 else 0;
//   print(quad(lambda r: phi(r)*r*r,[0,0.5,0.9,1])/quad(lambda r: phi(r)*r,[0,0.5,0.9,1]))"
constexpr double kFirstMoment = 0.472751521424204455913882983886;

Kernel aniso_kernel() {
  Eigen::MatrixXd a(2, 2);
  a << 1.6, 0.15, 0.15, 1.2;
  return make_bump_kernel(2, a);
}

Vec random_direction(Rng& rng, int dim) {
  Vec v(dim);
  do rng.in_ball(v); while (norm(v) < 1e-3);
  return normalized(v);
}

}  // namespace

TEST_CASE("zero profile has zero density", "[density]") {
  const DensityContext ctx(make_bump_kernel(2), builtin_profile("zero"));
  CHECK(theta(ctx, unit_axis(2, 0)) == 0.0);
}

TEST_CASE("identity profile matches the closed form", "[density]") {
  for (int dim : {2, 3}) {
    const DensityContext ctx(make_bump_kernel(dim), builtin_profile("identity"));
    CHECK(theta(ctx, unit_axis(dim, 0)) == Approx(closed_form_c_NG(ctx.kernel())).margin(1e-6));
  }
}

TEST_CASE("identity density is half the absolute moment", "[density]") {
  const DensityContext ctx(aniso_kernel(), builtin_profile("identity"));
  Rng rng(8);
  for (int i = 0; i < 5; ++i) {
    const Vec nu = random_direction(rng, 2);
    CHECK(theta(ctx, nu) == Approx(0.5 * absolute_moment_along(ctx.kernel(), nu)).margin(1e-6));
  }
}

TEST_CASE("extension is zero at the origin and one-homogeneous", "[density]") {
  const DensityContext ctx(aniso_kernel(), builtin_profile("power", 2.0));
  CHECK(theta_tilde(ctx, Vec{0.0, 0.0}) == 0.0);
  CHECK(theta_tilde_direct(ctx, Vec{0.0, 0.0}) == 0.0);
  const Vec v{0.3, -0.8};
  const double base = theta_tilde(ctx, v);
  for (double lambda : {0.1, 0.5, 1.7, 3.0}) {
    const Vec w{lambda * v[0], lambda * v[1]};
    CHECK(std::abs(theta_tilde(ctx, w) - lambda * base) <= 1e-10 * std::max(1.0, lambda * base));
  }
  CHECK(theta_tilde_direct(ctx, v) == Approx(base).margin(1e-8));
}

TEST_CASE("radial density is isotropic", "[density]") {
  for (int dim : {2, 3}) {
    const DensityContext ctx(make_bump_kernel(dim), builtin_profile("expm1"));
    const double c = radial_constant(ctx);
    Rng rng(40 + dim);
    for (int i = 0; i < 20; ++i) CHECK(theta(ctx, random_direction(rng, dim)) == Approx(c).margin(1e-8));
  }
  CHECK_THROWS_AS(radial_constant(DensityContext(aniso_kernel(), builtin_profile("identity"))), std::invalid_argument);
  CHECK_THROWS_AS(closed_form_c_NG(aniso_kernel()), std::invalid_argument);
}

TEST_CASE("closed-form prefactors", "[density]") {
  CHECK(closed_form_prefactor(2) == Approx(1.0 / std::numbers::pi).epsilon(1e-15));
  CHECK(closed_form_prefactor(3) == Approx(0.25).epsilon(1e-15));
  CHECK(closed_form_c_NG(make_bump_kernel(2)) == Approx(kFirstMoment / std::numbers::pi).margin(1e-9));
}

TEST_CASE("limit functional of a ball and an anisotropic box", "[density]") {
  const Domain d{{0.0, 0.0}, {1.0, 1.0}, 64};
  const DensityContext radial(make_bump_kernel(2), builtin_profile("identity"));
  const LimitValue ball = limit_functional(radial, Ball{{0.5, 0.5}, 0.3}, d, 256);
  CHECK(ball.value == Approx(radial_constant(radial) * 2.0 * std::numbers::pi * 0.3).epsilon(1e-9));
  const DensityContext aniso(aniso_kernel(), builtin_profile("power", 2.0));
  const LimitValue box = limit_functional(aniso, Box{{0.2, 0.3}, {0.7, 0.6}}, d, 8);
  const double expected = 2.0 * 0.3 * theta(aniso, unit_axis(2, 0)) + 2.0 * 0.5 * theta(aniso, unit_axis(2, 1));
  CHECK(box.value == Approx(expected).epsilon(1e-12));
  CHECK(box.boundary_measure == Approx(1.6).epsilon(1e-14));
}

TEST_CASE("convexity probe", "[density]") {
  const DensityContext ctx(aniso_kernel(), builtin_profile("power", 2.0));
  CHECK(convexity_probe(ctx, 200, 1).empty());
  const Vec v{0.4, 0.9};
  const Vec w{-0.4, -0.9};
  const Vec mid{0.0, 0.0};
  CHECK(theta_tilde(ctx, mid) <= 0.5 * (theta_tilde(ctx, v) + theta_tilde(ctx, w)));
  const auto sat = convexity_probe(ctx.with_profile(builtin_profile("saturating")), 200, 2);
  for (const auto& x : sat) CHECK(x.midpoint_value > x.chord_value);
  CHECK_THROWS_AS(convexity_probe(ctx, 0, 1), std::invalid_argument);
}

TEST_CASE("density bounds and quadrature stability", "[density]") {
  const Profile f = builtin_profile("expm1");
  const DensityContext ctx(aniso_kernel(), f);
  QuadratureConfig fine;
  fine.t_order = 64;
  const DensityContext refined(aniso_kernel(), f, fine);
  Rng rng(21);
  for (int i = 0; i < 5; ++i) {
    const Vec nu = random_direction(rng, 2);
    const double value = theta(ctx, nu);
    CHECK(value >= 0.0);
    CHECK(value <= f(0.5));
    CHECK(std::abs(theta(refined, nu) - value) < 1e-8);
  }
}

TEST_CASE("contexts share the mass cache across profiles", "[density]") {
  const DensityContext a(aniso_kernel(), builtin_profile("identity"));
  (void)theta(a, unit_axis(2, 0));
  (void)theta(a, unit_axis(2, 1));
  const DensityContext b = a.with_profile(builtin_profile("power", 3.0));
  CHECK(b.cached_directions() == 2);
  (void)theta(b, normalized(Vec{1.0, 1.0}));
  CHECK(a.cached_directions() == 3);
  QuadratureConfig low;
  low.t_order = 4;
  CHECK_THROWS_AS(DensityContext(aniso_kernel(), builtin_profile("identity"), low), std::invalid_argument);
}
