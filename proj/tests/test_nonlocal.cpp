#include <catch_amalgamated.hpp>

#include <cmath>
#include <numeric>

#include <nlperim/nonlocal.hpp>
#include <nlperim/random.hpp>

using namespace nlperim;
using Catch::Approx;

namespace {

const Domain kUnit64{{0.0, 0.0}, {1.0, 1.0}, 64};
const Domain kUnit128{{0.0, 0.0}, {1.0, 1.0}, 128};

IndicatorField constant_field(const Domain& d, double value) {
  IndicatorField f = rasterize(Empty{d.dim()}, d, 1);
  for (double& v : f.values) v = value;
  return f;
}

std::size_t flat_index(const std::vector<std::size_t>& counts, std::size_t i, std::size_t j) { return i * counts[1] + j; }

}  // namespace

TEST_CASE("stencil radius, unit sum and evenness", "[nonlocal]") {
  const Kernel k = make_bump_kernel(2);
  const Stencil st = build_stencil(k, 8.0 / 64.0, kUnit64);
  CHECK(st.radius == 8);
  const double total = std::accumulate(st.weights.begin(), st.weights.end(), 0.0);
  CHECK(std::abs(total - 1.0) < 1e-14);
  for (std::size_t e = 0; e < st.size(); ++e) {
    const auto o = st.offset(e);
    CHECK(std::abs(o[0]) <= st.radius);
    CHECK(std::abs(o[1]) <= st.radius);
    const std::size_t mirror = st.size() - 1 - e;
    CHECK(st.offset(mirror)[0] == -o[0]);
    CHECK(st.offset(mirror)[1] == -o[1]);
    CHECK(st.weights[mirror] == st.weights[e]);
    CHECK(st.gradients[2 * mirror] == -st.gradients[2 * e]);
  }
}

TEST_CASE("stencil rejects eps below four voxels", "[nonlocal]") {
  const Kernel k = make_bump_kernel(2);
  try {
    (void)build_stencil(k, 3.0 / 64.0, kUnit64);
    FAIL("expected ResolutionError");
  } catch (const ResolutionError& e) {
    CHECK(e.required_resolution() == 86);
  }
  CHECK_NOTHROW(build_stencil(k, 4.0 / 64.0, kUnit64));
  CHECK_THROWS_AS(build_stencil(k, -0.1, kUnit64), std::invalid_argument);
  CHECK_THROWS_AS(build_stencil(make_bump_kernel(3), 0.1, kUnit64), std::invalid_argument);
}

TEST_CASE("raw stencil mass converges to the kernel mass", "[nonlocal]") {
  const Kernel k = make_bump_kernel(2);
  const double e4 = std::abs(build_stencil(k, 0.125, Domain{{0.0, 0.0}, {1.0, 1.0}, 32}).raw_mass - 1.0);
  const double e8 = std::abs(build_stencil(k, 0.125, kUnit64).raw_mass - 1.0);
  const double e16 = std::abs(build_stencil(k, 0.125, kUnit128).raw_mass - 1.0);
  CHECK(e8 <= e4 / 4.0);
  CHECK(e16 <= e8 / 4.0 + 1e-15);
}

TEST_CASE("convolution of constant fields", "[nonlocal]") {
  const Stencil st = build_stencil(make_bump_kernel(2), 0.125, kUnit64);
  const IndicatorField ones = constant_field(kUnit64, 1.0);
  const std::vector<double> c = convolve_direct(ones, st);
  for (std::size_t i = 8; i < 56; ++i)
    for (std::size_t j = 8; j < 56; ++j) CHECK(c[flat_index(ones.counts, i, j)] == Approx(1.0).margin(1e-14));
  CHECK(c[flat_index(ones.counts, 0, 0)] < 0.5);
  const std::vector<double> z = convolve_direct(constant_field(kUnit64, 0.0), st);
  for (double v : z) CHECK(v == 0.0);
}

TEST_CASE("convolution is about one half at a flat interface", "[nonlocal]") {
  const double eps = 0.125;
  const Stencil st = build_stencil(make_bump_kernel(2), eps, kUnit64);
  const IndicatorField f = rasterize(Slab{{1.0, 0.0}, 0.5, 2.0}, kUnit64, 1);
  const std::vector<double> c = convolve_direct(f, st);
  const double h = kUnit64.spacing();
  for (std::size_t j = 16; j < 48; ++j) {
    CHECK(std::abs(c[flat_index(f.counts, 31, j)] - 0.5) < h / eps);
    CHECK(std::abs(c[flat_index(f.counts, 32, j)] - 0.5) < h / eps);
  }
}

TEST_CASE("FFT and direct convolution agree", "[nonlocal]") {
  const Stencil st = build_stencil(make_bump_kernel(2), 0.125, kUnit64);
  IndicatorField f = constant_field(kUnit64, 0.0);
  Rng rng(11);
  for (double& v : f.values) v = rng.uniform();
  const std::vector<double> a = convolve_direct(f, st);
  const std::vector<double> b = convolve_fft(f, st);
  double gap = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) gap = std::max(gap, std::abs(a[i] - b[i]));
  CHECK(gap <= 1e-10);
}

TEST_CASE("an impulse reproduces the stencil", "[nonlocal]") {
  const Stencil st = build_stencil(make_bump_kernel(2), 0.125, kUnit64);
  IndicatorField f = constant_field(kUnit64, 0.0);
  f.values[flat_index(f.counts, 32, 32)] = 1.0;
  for (const std::vector<double>& c : {convolve_direct(f, st), convolve_fft(f, st)}) {
    for (std::size_t e = 0; e < st.size(); ++e) {
      const auto o = st.offset(e);
      CHECK(c[flat_index(f.counts, 32 + o[0], 32 + o[1])] == Approx(st.weights[e]).margin(1e-12));
    }
  }
}

TEST_CASE("F_eps of the empty set and the whole domain vanish", "[nonlocal]") {
  const Kernel k = make_bump_kernel(2);
  const Profile f = builtin_profile("identity");
  CHECK(eval_F_eps(Empty{2}, 0.125, f, k, kUnit64) == 0.0);
  CHECK(eval_F_eps(Box{{-1.0, -1.0}, {2.0, 2.0}}, 0.125, f, k, kUnit64) == 0.0);
  FepsOptions threshold;
  threshold.rule = ComplementRule::threshold;
  CHECK(eval_F_eps(Empty{2}, 0.125, f, k, kUnit64, threshold) == 0.0);
  CHECK(eval_F_eps(Box{{-1.0, -1.0}, {2.0, 2.0}}, 0.125, f, k, kUnit64, threshold) == 0.0);
}

TEST_CASE("F_eps is nonnegative and monotone in the profile", "[nonlocal]") {
  const Kernel k = make_bump_kernel(2);
  const Profile id = builtin_profile("identity");
  const Profile sq = builtin_profile("power", 2.0);
  Rng rng(3);
  for (int i = 0; i < 6; ++i) {
    const Shape s = Ball{{rng.uniform(0.3, 0.7), rng.uniform(0.3, 0.7)}, rng.uniform(0.05, 0.3)};
    const double a = eval_F_eps(s, 0.125, id, k, kUnit64);
    const double b = eval_F_eps(s, 0.125, sq, k, kUnit64);
    CHECK(b >= 0.0);
    CHECK(b <= a);
  }
}

TEST_CASE("slab F_eps approaches twice the density", "[nonlocal]") {
  const Kernel k = make_bump_kernel(2);
  const Profile id = builtin_profile("identity");
  const double target = absolute_moment_along(k, unit_axis(2, 0));
  const Shape slab = Slab{{1.0, 0.0}, 0.25, 0.75};
  const double coarse = eval_F_eps(slab, 0.125, id, k, kUnit64);
  const double fine = eval_F_eps(slab, 0.0625, id, k, kUnit128);
  CHECK(std::abs(fine - target) < std::abs(coarse - target));
  CHECK(std::abs(fine - target) < 0.05 * target);
  FepsOptions threshold;
  threshold.rule = ComplementRule::threshold;
  CHECK(std::abs(eval_F_eps(slab, 0.0625, id, k, kUnit128, threshold) - target) < 0.1 * target);
}

TEST_CASE("direct and FFT paths give the same F_eps", "[nonlocal]") {
  const Kernel k = make_bump_kernel(2);
  const Profile f = builtin_profile("power", 2.0);
  const Shape ball = Ball{{0.5, 0.5}, 0.3};
  FepsOptions direct;
  direct.path = ConvolutionPath::direct;
  FepsOptions fft;
  fft.path = ConvolutionPath::fft;
  const double a = eval_F_eps(ball, 0.125, f, k, kUnit64, direct);
  const double b = eval_F_eps(ball, 0.125, f, k, kUnit64, fft);
  CHECK(a == Approx(b).epsilon(1e-10));
}

TEST_CASE("F_eps is deterministic", "[nonlocal]") {
  const Kernel k = make_bump_kernel(2);
  const Profile f = builtin_profile("expm1");
  const Shape ball = Ball{{0.45, 0.5}, 0.27};
  CHECK(eval_F_eps(ball, 0.1, f, k, kUnit64) == eval_F_eps(ball, 0.1, f, k, kUnit64));
}
