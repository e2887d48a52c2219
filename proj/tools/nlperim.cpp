// nlperim: command-line front end for the nonlocal perimeter library.
//
// Exit codes: 0 pass, 1 criteria fail, 2 usage or config error.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlperim/density.hpp>
#include <nlperim/lab/config.hpp>
#include <nlperim/lab/experiments.hpp>
#include <nlperim/lab/oracles.hpp>
#include <nlperim/lab/report.hpp>
#include <nlperim/lab/selfcheck.hpp>
#include <nlperim/nonlocal.hpp>

namespace {

using namespace nlperim;
using namespace nlperim::lab;

constexpr int kPass = 0;
constexpr int kFail = 1;
constexpr int kUsage = 2;

ExperimentConfig load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  return parse_config(in);
}

Vec parse_vector(const std::string& text, int dim, const char* what) {
  Vec v = config_detail::parse_list(text, what);
  if (static_cast<int>(v.size()) != dim)
    throw ConfigError(std::string(what) + ": expected " + std::to_string(dim) + " components");
  return v;
}

std::string num(double x) { return format_number(x); }

void emit(const ExperimentConfig& cfg, const std::string& csv, const std::string& json) {
  if (!cfg.output.csv.empty()) write_text(cfg.output.csv, csv);
  if (!cfg.output.json.empty()) write_text(cfg.output.json, json + "\n");
}

int cmd_theta(const ExperimentConfig& cfg, const std::string& nu_text) {
  const Kernel kernel = build_kernel(cfg.kernel);
  const DensityContext ctx(kernel, build_profile(cfg.profile), cfg.schedule.quadrature);
  const int dim = cfg.kernel.dim;
  const Vec nu = nu_text.empty() ? unit_axis(dim, dim - 1) : normalized(parse_vector(nu_text, dim, "--nu"));
  std::cout << "theta = " << num(theta(ctx, nu)) << "\n";
  std::cout << "half_absolute_moment = " << num(0.5 * absolute_moment_along(kernel, nu, cfg.schedule.quadrature)) << "\n";
  if (kernel.is_radial()) std::cout << "c_NG = " << num(closed_form_c_NG(kernel, cfg.schedule.quadrature)) << "\n";
  return kPass;
}

int cmd_feps(const ExperimentConfig& cfg, std::optional<double> eps) {
  const double e = eps.value_or(cfg.schedule.eps0);
  const Domain dom = domain_for(cfg, e);
  const double value = eval_F_eps(build_shape(cfg.shape, cfg.kernel.dim), e, build_profile(cfg.profile),
                                  build_kernel(cfg.kernel), dom, build_feps_options(cfg.schedule));
  std::cout << "eps = " << num(e) << "\nresolution = " << dom.resolution << "\nF_eps = " << num(value) << "\n";
  return kPass;
}

int cmd_limit(const ExperimentConfig& cfg) {
  const LimitValue v = reference_value(cfg, build_shape(cfg.shape, cfg.kernel.dim));
  std::cout << "F = " << num(v.value) << "\nboundary_measure = " << num(v.boundary_measure) << "\n";
  for (const std::string& f : v.flags) std::cout << "flag: " << f << "\n";
  return kPass;
}

int cmd_converge(const ExperimentConfig& cfg) {
  const ConvergenceReport rep = run_convergence(cfg);
  const std::string csv = convergence_csv(rep, cfg.output.timings);
  emit(cfg, csv, convergence_json(rep, cfg).dump(2));
  std::cout << csv;
  std::cout << "reference = " << num(rep.reference) << "\n";
  std::cout << "rate = " << (rep.rate ? num(*rep.rate) : rep.rate_note) << "\n";
  if (rep.extrapolated) std::cout << "extrapolated = " << num(*rep.extrapolated) << "\n";
  std::cout << "extrapolated_rel_error = " << num(rep.extrapolated_rel_error) << "\n";
  std::cout << "monotone = " << (rep.monotone ? "true" : "false") << "\n";
  std::cout << "pass = " << (rep.pass ? "true" : "false") << "\n";
  return rep.pass ? kPass : kFail;
}

int cmd_lowerbound(const ExperimentConfig& cfg) {
  const LowerBoundReport rep = run_lower_bound(cfg);
  const std::string csv = lower_bound_csv(rep, cfg.output.timings);
  emit(cfg, csv, lower_bound_json(rep, cfg).dump(2));
  std::cout << csv;
  std::cout << "reference = " << num(rep.reference) << "\n";
  if (rep.deficit_trend) std::cout << "deficit_trend = " << num(*rep.deficit_trend) << "\n";
  std::cout << "note = " << rep.note << "\n";
  std::cout << "pass = " << (rep.pass ? (*rep.pass ? "true" : "false") : "not applicable") << "\n";
  return rep.pass.value_or(true) ? kPass : kFail;
}

struct OracleArgs {
  std::string which;
  std::string config;
  int dim = 2;
  std::string anisotropy;
  std::string nu;
  double t = 0.5;
  double s = 0.5;
  long long n = 10000000;
  std::uint64_t seed = 1;
  int strata = 200;
};

int cmd_oracle(const OracleArgs& a) {
  ExperimentConfig cfg;
  if (!a.config.empty()) {
    cfg = load(a.config);
  } else {
    std::string text = "[kernel]\ndim = " + std::to_string(a.dim) + "\n";
    if (!a.anisotropy.empty()) text += "anisotropy = " + a.anisotropy + "\n";
    cfg = parse_config_text(text);
  }
  const Kernel kernel = build_kernel(cfg.kernel);
  const int dim = cfg.kernel.dim;
  const Vec nu = a.nu.empty() ? unit_axis(dim, 0) : normalized(parse_vector(a.nu, dim, "--nu"));
  Estimate e;
  if (a.which == "halfspace") {
    e = mc_halfspace_oracle(kernel, nu, a.t, a.n, a.seed);
  } else if (a.which == "theta") {
    e = mc_theta_oracle(DensityContext(kernel, build_profile(cfg.profile), cfg.schedule.quadrature), nu, a.n, a.seed,
                        a.strata);
  } else if (a.which == "mass") {
    e = mc_mass_oracle(kernel.unnormalized(), a.n, a.seed);
  } else if (a.which == "slice") {
    const SliceEstimate s = mc_slice_oracle(kernel, nu, a.s, a.n, a.seed);
    for (std::size_t i = 0; i < s.raw.size(); ++i)
      std::cout << "thickness " << num(s.thickness[i]) << ": " << num(s.raw[i].value) << " +- "
                << num(s.raw[i].standard_error) << "\n";
    e = s.extrapolated;
  } else if (a.which == "moment") {
    e = mc_absolute_moment_oracle(kernel, nu, a.n, a.seed);
  } else {
    throw ConfigError("oracle: unknown target '" + a.which + "'");
  }
  std::cout << "estimate = " << num(e.value) << "\nstandard_error = " << num(e.standard_error) << "\n";
  return kPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nonlocal perimeter functionals: F_eps, its limit F, and verification experiments"};
  app.set_version_flag("--version", nlperim::lab::version_string());
  app.require_subcommand(1);

  std::string config;
  std::string nu;
  std::optional<double> eps;
  auto* theta = app.add_subcommand("theta", "Surface density theta(nu) and its closed forms");
  theta->add_option("--config,-c", config, "Experiment config file")->required();
  theta->add_option("--nu", nu, "Direction, comma separated (default e_N)");

  auto* feps = app.add_subcommand("feps", "F_eps of the configured shape at one eps");
  feps->add_option("--config,-c", config, "Experiment config file")->required();
  feps->add_option("--eps", eps, "Interaction range (default eps0)");

  auto* limit = app.add_subcommand("limit", "Limit functional F of the configured shape");
  limit->add_option("--config,-c", config, "Experiment config file")->required();

  auto* converge = app.add_subcommand("converge", "eps-sweep of F_eps against F");
  converge->add_option("--config,-c", config, "Experiment config file")->required();

  auto* lowerbound = app.add_subcommand("lowerbound", "Lower-bound study on perturbed graphs");
  lowerbound->add_option("--config,-c", config, "Experiment config file")->required();

  OracleArgs oa;
  auto* oracle = app.add_subcommand("oracle", "Fixed-seed Monte Carlo oracles");
  oracle->add_option("target", oa.which, "halfspace | theta | mass | slice | moment")
      ->required()
      ->check(CLI::IsMember({"halfspace", "theta", "mass", "slice", "moment"}));
  oracle->add_option("--config,-c", oa.config, "Config supplying kernel and profile (optional)");
  oracle->add_option("--dim", oa.dim, "Kernel dimension when no config is given");
  oracle->add_option("--anisotropy", oa.anisotropy, "Diagonal or full matrix, comma separated");
  oracle->add_option("--nu", oa.nu, "Direction, comma separated (default e_1)");
  oracle->add_option("--t", oa.t, "Half-space offset");
  oracle->add_option("--s", oa.s, "Slice offset");
  oracle->add_option("--n", oa.n, "Samples");
  oracle->add_option("--seed", oa.seed, "Seed");
  oracle->add_option("--strata", oa.strata, "Strata in t (theta oracle)");

  std::string fault;
  auto* selfcheck = app.add_subcommand("selfcheck", "Run the invariant suite");
  selfcheck->add_option("--inject-fault", fault, "Deliberate fault: stencil-rescale")
      ->check(CLI::IsMember({"stencil-rescale"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return kUsage;
  }

  try {
    if (*selfcheck) {
      const auto results = run_selfcheck({fault});
      return print_selfcheck(results, std::cout) ? kPass : kFail;
    }
    if (*oracle) return cmd_oracle(oa);
    const ExperimentConfig cfg = load(config);
    if (*theta) return cmd_theta(cfg, nu);
    if (*feps) return cmd_feps(cfg, eps);
    if (*limit) return cmd_limit(cfg);
    if (*converge) return cmd_converge(cfg);
    if (*lowerbound) return cmd_lowerbound(cfg);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kUsage;
  } catch (const ScheduleError& e) {
    std::cerr << "schedule error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
