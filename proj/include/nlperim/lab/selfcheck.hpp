#pragma once

// Quick invariant suite with a pass/fail table.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "../density.hpp"
#include "../kernels.hpp"
#include "../nonlocal.hpp"
#include "../profiles.hpp"
#include "../random.hpp"
#include "../shapes.hpp"

namespace nlperim::lab {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

struct SelfcheckOptions {
  /// "" or "stencil-rescale" (perturbs the FFT-side stencil by 1e-6 relative).
  std::string inject_fault;
};

namespace selfcheck_detail {

inline std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", x);
  return buf;
}

inline IndicatorField random_field(int n, std::uint64_t seed) {
  Domain dom{{0.0, 0.0}, {1.0, 1.0}, n};
  IndicatorField field;
  field.domain = dom;
  field.counts = dom.counts();
  field.values.resize(dom.voxel_count());
  Rng rng(seed);
  for (double& v : field.values) v = rng.uniform() < 0.5 ? 1.0 : 0.0;
  field.moments.assign(2, std::vector<double>(field.values.size(), 0.0));
  return field;
}

}  // namespace selfcheck_detail

/// Max |fft - direct| over `fields` random n x n fields at eps = 8h.
inline double path_equivalence_gap(int n, int fields, std::uint64_t seed, double fault_scale = 1.0) {
  const Kernel kernel = make_bump_kernel(2);
  const Domain dom{{0.0, 0.0}, {1.0, 1.0}, n};
  const Stencil st = build_stencil(kernel, 8.0 * dom.spacing(), dom);
  Stencil fft_st = st;
  for (double& w : fft_st.weights) w *= fault_scale;
  double gap = 0.0;
  for (int i = 0; i < fields; ++i) {
    const IndicatorField field = selfcheck_detail::random_field(n, seed + i);
    const std::vector<double> a = convolve_direct(field, st);
    const std::vector<double> b = convolve_fft(field, fft_st);
    for (std::size_t v = 0; v < a.size(); ++v) gap = std::max(gap, std::abs(a[v] - b[v]));
  }
  return gap;
}

inline std::vector<CheckResult> run_selfcheck(const SelfcheckOptions& opts = {}) {
  using selfcheck_detail::sci;
  std::vector<CheckResult> out;
  auto run = [&](const std::string& name, const std::function<bool(std::string&)>& body) {
    CheckResult r;
    r.name = name;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      r.pass = body(r.detail);
    } catch (const std::exception& e) {
      r.pass = false;
      r.detail = std::string("exception: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    out.push_back(std::move(r));
  };

  const Kernel k2 = make_bump_kernel(2);
  const Kernel k3 = make_bump_kernel(3);
  Eigen::MatrixXd a(2, 2);
  a << 1.5, 0.0, 0.0, 1.0;
  const Kernel ka = make_bump_kernel(2, a);
  const QuadratureConfig quad;

  run("kernel unit mass (2D, 3D, anisotropic) at order 128", [&](std::string& d) {
    double worst = 0.0;
    for (const Kernel* k : {&k2, &k3, &ka}) worst = std::max(worst, std::abs(kernel_total_mass(*k, 128) - 1.0));
    d = "max |mass - 1| = " + sci(worst);
    return worst < 1e-10;
  });

  run("kernel evenness on random probes", [&](std::string& d) {
    Rng rng(7);
    Vec z(2);
    Vec mz(2);
    int bad = 0;
    for (int i = 0; i < 10000; ++i) {
      rng.in_ball(z, 1.2);
      mz = {-z[0], -z[1]};
      if (k2.eval(z) != k2.eval(mz) || ka.eval(z) != ka.eval(mz)) ++bad;
    }
    d = std::to_string(bad) + " asymmetric probes";
    return bad == 0;
  });

  run("half-space mass at t = 0 and t = 1", [&](std::string& d) {
    const Vec nu = normalized(Vec{0.6, 0.8});
    double worst = 0.0;
    for (const Kernel* k : {&k2, &ka}) {
      worst = std::max(worst, std::abs(halfspace_mass(*k, nu, 0.0, quad) - 0.5));
      worst = std::max(worst, std::abs(halfspace_mass(*k, nu, 1.0, quad)));
    }
    d = "max deviation " + sci(worst);
    return worst <= 1e-8;
  });

  run("closed form: theta, half absolute moment, c_NG", [&](std::string& d) {
    const DensityContext ctx(k2, builtin_profile("identity"), quad);
    const Vec nu = normalized(Vec{1.0, 2.0});
    const double t = theta(ctx, nu);
    const double m = 0.5 * absolute_moment_along(k2, nu, quad);
    const double c = closed_form_c_NG(k2, quad);
    const double worst = std::max({std::abs(t - m), std::abs(t - c), std::abs(m - c)});
    d = "max pairwise gap " + sci(worst);
    return worst < 1e-6;
  });

  run("isotropy over 50 directions", [&](std::string& d) {
    const DensityContext ctx(k2, builtin_profile("power", 2.0), quad);
    const double ref = radial_constant(ctx);
    Rng rng(11);
    Vec v(2);
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
      do rng.in_ball(v); while (norm(v) < 1e-3);
      worst = std::max(worst, std::abs(theta(ctx, normalized(v)) - ref));
    }
    d = "max deviation " + sci(worst);
    return worst < 1e-8;
  });

  run("path equivalence fft vs direct (3 random 64^2 fields)", [&](std::string& d) {
    const double scale = opts.inject_fault == "stencil-rescale" ? 1.0 + 1e-6 : 1.0;
    const double gap = path_equivalence_gap(64, 3, 1234, scale);
    d = "max |fft - direct| = " + sci(gap) + (scale != 1.0 ? " (fault injected)" : "");
    return gap <= 1e-10;
  });

  run("convexity probe (identity, power 2, expm1; 200 trials each)", [&](std::string& d) {
    const DensityContext base(ka, builtin_profile("identity"), quad);
    std::size_t total = 0;
    for (const Profile& f : {builtin_profile("identity"), builtin_profile("power", 2.0), builtin_profile("expm1")})
      total += convexity_probe(base.with_profile(f), 200, 99).size();
    d = std::to_string(total) + " violations";
    return total == 0;
  });

  run("trivial laws: F_eps(empty) = F_eps(domain) = 0, zero profile", [&](std::string& d) {
    const Domain dom{{0.0, 0.0}, {1.0, 1.0}, 64};
    const Profile id = builtin_profile("identity");
    const double e = eval_F_eps(Empty{2}, 1.0 / 8, id, k2, dom);
    const double w = eval_F_eps(Box{{-1.0, -1.0}, {2.0, 2.0}}, 1.0 / 8, id, k2, dom);
    const DensityContext zero(k2, builtin_profile("zero"), quad);
    const double z = theta(zero, unit_axis(2, 0));
    d = "empty " + sci(e) + ", full " + sci(w) + ", zero profile " + sci(z);
    return e == 0.0 && w == 0.0 && z == 0.0;
  });

  run("builtin profiles pass their claimed checks", [&](std::string& d) {
    std::size_t bad = 0;
    for (const char* name : {"identity", "expm1", "saturating", "zero"}) bad += check_profile(builtin_profile(name), 100).size();
    bad += check_profile(builtin_profile("power", 2.0), 100).size();
    d = std::to_string(bad) + " violations";
    return bad == 0;
  });

  return out;
}

inline bool print_selfcheck(const std::vector<CheckResult>& results, std::ostream& os) {
  bool all = true;
  for (const CheckResult& r : results) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%8.3f s", r.seconds);
    os << (r.pass ? "PASS  " : "FAIL  ") << buf << "  " << r.name << "  [" << r.detail << "]\n";
    all = all && r.pass;
  }
  os << (all ? "selfcheck: all checks passed\n" : "selfcheck: FAILED\n");
  return all;
}

}  // namespace nlperim::lab
