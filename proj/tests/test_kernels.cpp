#include <catch_amalgamated.hpp>

#include <cmath>

#include <Eigen/Dense>

#include <nlperim/kernels.hpp>
#include <nlperim/random.hpp>

using namespace nlperim;
using Catch::Approx;

namespace {

// Golden values. Each was produced by the command on the line above it and frozen.

// nlperim oracle mass --dim 2 --n 10000000 --seed 1
constexpr double kRawMass = 0.46633403396599404;
constexpr double kRawMassSe = 0.00012361207240416027;

// nlperim oracle halfspace --dim 2 --nu 1,0 --t 0.5 --n 10000000 --seed 2
constexpr double kHalfspaceAtHalf = 0.092839442032926281;
constexpr double kHalfspaceAtHalfSe = 9.3690849244626532e-05;

// nlperim oracle slice --dim 2 --anisotropy 1.5,1 --nu 1,0 --s 0.5 --n 10000000 --seed 3
constexpr double kAnisoSlice = 0.20333747201001331;
constexpr double kAnisoSliceSe = 0.00010793106719464742;

// nlperim oracle moment --dim 2 --anisotropy 1.5,1 --nu 1,0 --n 10000000 --seed 4
constexpr double kAnisoMoment = 0.20064375503131682;
constexpr double kAnisoMomentSe = 8.463116143671607e-05;

// python3 -c "from mpmath import mp,quad,exp; mp.dps=30; phi=lambda r: exp(-1/(1-r*r)) if r<1 else 0;
//   print(quad(lambda r: phi(r)*r*r,[0,0.5,0.9,1])/quad(lambda r: phi(r)*r,[0,0.5,0.9,1]))"
constexpr double kFirstMoment = 0.472751521424204455913882983886;

Kernel aniso_kernel() {
  Eigen::MatrixXd a(2, 2);
  a << 1.5, 0.0, 0.0, 1.0;
  return make_bump_kernel(2, a);
}

}  // namespace

TEST_CASE("bump kernel has unit mass", "[kernels]") {
  const Kernel k = make_bump_kernel(2);
  CHECK(kernel_total_mass(k, 64) == Approx(1.0).margin(1e-7));
  CHECK(kernel_total_mass(k, 128) == Approx(1.0).margin(1e-10));
  CHECK(std::abs(kernel_total_mass(k, 256) - kernel_total_mass(k, 128)) < 1e-10);
  CHECK(kernel_total_mass(make_bump_kernel(3), 128) == Approx(1.0).margin(1e-10));
  CHECK(kernel_total_mass(aniso_kernel(), 128) == Approx(1.0).margin(1e-10));
  CHECK(k.is_radial());
  CHECK_FALSE(aniso_kernel().is_radial());
}

TEST_CASE("raw bump mass matches the Monte Carlo golden value", "[kernels]") {
  const double raw = kernel_total_mass(make_bump_kernel(2).unnormalized(), 128);
  CHECK(std::abs(raw - kRawMass) < 3.0 * kRawMassSe);
}

TEST_CASE("mass is linear in the multiplier", "[kernels]") {
  const Kernel k = make_bump_kernel(2);
  CHECK(kernel_total_mass(k.scaled(2.0), 96) == Approx(2.0 * kernel_total_mass(k, 96)).epsilon(1e-14));
}

TEST_CASE("anisotropic support is an ellipse inside the unit ball", "[kernels]") {
  const Kernel k = aniso_kernel();
  const Vec inside{0.6, 0.0};
  const Vec outside{0.7, 0.0};
  const Vec tall{0.0, 0.95};
  CHECK(k.eval(inside) > 0.0);
  CHECK(k.eval(outside) == 0.0);
  CHECK(k.eval(tall) > 0.0);
  CHECK(k.support_extent(unit_axis(2, 0)) == Approx(1.0 / 1.5));
}

TEST_CASE("kernel construction rejects bad input", "[kernels]") {
  Eigen::MatrixXd small(2, 2);
  small << 0.9, 0.0, 0.0, 1.2;
  CHECK_THROWS_AS(make_bump_kernel(2, small), std::invalid_argument);
  Eigen::MatrixXd skew(2, 2);
  skew << 1.5, 0.2, 0.0, 1.5;
  CHECK_THROWS_AS(make_bump_kernel(2, skew), std::invalid_argument);
  Eigen::MatrixXd wrong(3, 3);
  wrong.setIdentity();
  CHECK_THROWS_AS(make_bump_kernel(2, wrong), std::invalid_argument);
  CHECK_THROWS_AS(make_bump_kernel(1), std::invalid_argument);
  CHECK_THROWS_AS(make_bump_kernel(kMaxDim + 1), std::invalid_argument);
}

TEST_CASE("kernels are even, nonnegative and vanish outside the unit ball", "[kernels]") {
  const Kernel k3 = make_bump_kernel(3);
  const Kernel ka = aniso_kernel();
  Rng rng(5);
  Vec z(3);
  Vec mz(3);
  Vec w(2);
  Vec mw(2);
  int odd = 0;
  int negative = 0;
  int leaks = 0;
  for (int i = 0; i < 10000; ++i) {
    rng.in_ball(z, 1.3);
    for (int k = 0; k < 3; ++k) mz[k] = -z[k];
    if (k3.eval(z) != k3.eval(mz)) ++odd;
    if (k3.eval(z) < 0.0) ++negative;
    if (norm(z) > 1.0 && k3.eval(z) != 0.0) ++leaks;
    rng.in_ball(w, 1.3);
    mw = {-w[0], -w[1]};
    if (ka.eval(w) != ka.eval(mw)) ++odd;
    if (norm(w) > 1.0 && ka.eval(w) != 0.0) ++leaks;
  }
  CHECK(odd == 0);
  CHECK(negative == 0);
  CHECK(leaks == 0);
}

TEST_CASE("slice integral basics", "[kernels]") {
  const Kernel k = make_bump_kernel(2);
  const Vec e1 = unit_axis(2, 0);
  const Vec e2 = unit_axis(2, 1);
  CHECK(slice_integral(k, e1, 1.0) == 0.0);
  CHECK(slice_integral(k, e1, -1.0) == 0.0);
  CHECK(slice_integral(k, e1, 0.3) == Approx(slice_integral(k, e2, 0.3)).margin(1e-10));
  const Vec not_unit{1.0, 1e-3};
  CHECK_THROWS_AS(slice_integral(k, not_unit, 0.2), std::invalid_argument);
}

TEST_CASE("anisotropic slice matches the thin-slab Monte Carlo golden value", "[kernels]") {
  const double s = slice_integral(aniso_kernel(), unit_axis(2, 0), 0.5);
  CHECK(std::abs(s - kAnisoSlice) < 3.0 * kAnisoSliceSe);
}

TEST_CASE("half-space mass endpoints and monotonicity", "[kernels]") {
  Eigen::MatrixXd a3 = Eigen::MatrixXd::Identity(3, 3);
  a3(0, 0) = 1.6;
  a3(1, 1) = 1.2;
  a3(0, 1) = a3(1, 0) = 0.15;
  const Kernel kernels[] = {make_bump_kernel(2), aniso_kernel(), make_bump_kernel(3), make_bump_kernel(3, a3)};
  for (const Kernel& k : kernels) {
    const int dim = k.dim();
    Vec nu(dim, 1.0);
    nu[0] = -0.4;
    nu = normalized(nu);
    CHECK(halfspace_mass(k, nu, 0.0) == Approx(0.5).margin(1e-8));
    CHECK(halfspace_mass(k, nu, 1.0) == 0.0);
    double prev = 0.5 + 1e-8;
    for (int i = 0; i <= 50; ++i) {
      const double m = halfspace_mass(k, nu, i / 50.0);
      CHECK(m <= prev + 1e-15);
      prev = m;
    }
  }
  CHECK_THROWS_AS(halfspace_mass(make_bump_kernel(2), unit_axis(2, 0), 1.5), std::domain_error);
  CHECK_THROWS_AS(halfspace_mass(make_bump_kernel(2), unit_axis(2, 0), -0.1), std::domain_error);
}

TEST_CASE("half-space mass at t = 1/2 matches the Monte Carlo golden value", "[kernels]") {
  const double m = halfspace_mass(make_bump_kernel(2), unit_axis(2, 0), 0.5);
  CHECK(std::abs(m - kHalfspaceAtHalf) < 3.0 * kHalfspaceAtHalfSe);
}

TEST_CASE("radial kernels are rotation invariant", "[kernels]") {
  for (int dim : {2, 3}) {
    const Kernel k = make_bump_kernel(dim);
    const Vec e = unit_axis(dim, dim - 1);
    Rng rng(17 + dim);
    Vec v(dim);
    for (int i = 0; i < 10; ++i) {
      do rng.in_ball(v); while (norm(v) < 1e-3);
      const Vec nu = normalized(v);
      CHECK(slice_integral(k, nu, 0.4) == Approx(slice_integral(k, e, 0.4)).margin(1e-8));
      CHECK(halfspace_mass(k, nu, 0.3) == Approx(halfspace_mass(k, e, 0.3)).margin(1e-8));
      CHECK(absolute_moment_along(k, nu) == Approx(absolute_moment_along(k, e)).margin(1e-8));
    }
  }
}

TEST_CASE("absolute moment equals twice the one-sided slice moment", "[kernels]") {
  for (const Kernel& k : {make_bump_kernel(2), aniso_kernel()}) {
    const Vec nu = normalized(Vec{0.3, -1.0});
    const Vec neg{-nu[0], -nu[1]};
    const double upper = integrate([&](double s) { return s * slice_integral(k, nu, s); }, 0.0, 1.0, 64);
    const double lower = integrate([&](double s) { return s * slice_integral(k, neg, s); }, 0.0, 1.0, 64);
    CHECK(absolute_moment_along(k, nu) == Approx(2.0 * upper).margin(1e-8));
    CHECK(upper == Approx(lower).margin(1e-12));
  }
}

TEST_CASE("anisotropic absolute moment matches the Monte Carlo golden value", "[kernels]") {
  const double m = absolute_moment_along(aniso_kernel(), unit_axis(2, 0));
  CHECK(std::abs(m - kAnisoMoment) < 3.0 * kAnisoMomentSe);
}

TEST_CASE("first radial moment", "[kernels]") {
  const Kernel k = make_bump_kernel(2);
  const double r = first_radial_moment(k);
  CHECK(r > 0.0);
  CHECK(r <= 1.0);
  CHECK(r == Approx(kFirstMoment).margin(1e-9));
  CHECK(first_radial_moment(make_bump_kernel(3)) == Approx(first_radial_moment(make_bump_kernel(3), {32, 64, 96, 32})).margin(1e-8));
  // Support shrunk by 1/2: A = 2 I.
  const Kernel half = make_bump_kernel(2, Eigen::MatrixXd::Identity(2, 2) * 2.0);
  CHECK(kernel_total_mass(half, 128) == Approx(1.0).margin(1e-10));
  CHECK(first_radial_moment(half) == Approx(0.5 * r).margin(1e-9));
}

TEST_CASE("batched half-space masses match single offsets", "[kernels]") {
  for (const Kernel& k : {make_bump_kernel(2), aniso_kernel(), make_bump_kernel(3)}) {
    const Vec nu = normalized(Vec(k.dim(), 1.0));
    const std::vector<double> ts{0.7, 0.0, 0.95, 0.3, 1.0, 0.3};
    const std::vector<double> m = halfspace_masses(k, nu, ts);
    for (std::size_t i = 0; i < ts.size(); ++i) CHECK(m[i] == Approx(halfspace_mass(k, nu, ts[i])).margin(1e-10));
  }
  const std::vector<double> bad{0.2, 1.2};
  CHECK_THROWS_AS(halfspace_masses(make_bump_kernel(2), unit_axis(2, 0), bad), std::domain_error);
}
