#pragma once

// Experiment configuration: an INI-style key=value file with sections
// [kernel] [profile] [shape] [domain] [schedule] [output]. Every key has a
// default; unknown sections or keys are errors.

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "../density.hpp"
#include "../kernels.hpp"
#include "../nonlocal.hpp"
#include "../profiles.hpp"
#include "../quadrature.hpp"
#include "../shapes.hpp"

namespace nlperim::lab {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct KernelSettings {
  std::string type = "bump";
  int dim = 2;
  std::vector<double> anisotropy;  // empty, dim (diagonal) or dim*dim entries
};

struct ProfileSettings {
  std::string name = "identity";
  std::optional<double> parameter;
};

struct ShapeSettings {
  std::string type = "ball";
  Vec center;
  double radius = 0.3;
  Vec lower;
  Vec upper;
  Vec normal;
  double offset_low = 0.25;
  double offset_high = 0.75;
  Vec base_lower;
  Vec base_upper;
  double height_base = 0.5;
  std::string height_terms = "0.1 sin 1";
  bool include_floor_and_sides = false;
};

struct DomainSettings {
  Vec lower;
  Vec upper;
  int resolution = 64;
};

struct ScheduleSettings {
  double eps0 = 0.125;
  double ratio = 0.5;
  int count = 4;
  std::string policy = "scaled";  // scaled: h = eps / voxels_per_eps; fixed: domain resolution
  int voxels_per_eps = 8;
  int supersample = 4;
  std::string rule = "moment";  // moment | threshold
  std::string path = "auto";    // auto | direct | fft
  int boundary_order = 256;
  QuadratureConfig quadrature;
  double tolerance = 0.02;
  int richardson_order = 1;
  std::vector<int> h_values{8, 16, 32, 64};
  double eps_scale = 0.125;
  std::string eps_law = "scaled";  // scaled: eps_h = eps_scale / h; fixed: eps_h = eps0
  std::string perturbation = "1 cos 2";
  double amplitude_scale = 1.0;
  double deficit_tolerance = 0.03;
  std::uint64_t seed = 20240601;
};

struct OutputSettings {
  std::string csv;
  std::string json;
  bool timings = false;
};

struct ExperimentConfig {
  KernelSettings kernel;
  ProfileSettings profile;
  ShapeSettings shape;
  DomainSettings domain;
  ScheduleSettings schedule;
  OutputSettings output;
  /// Every key as read (after defaults), for the JSON echo.
  std::map<std::string, std::map<std::string, std::string>> echo;
};

namespace config_detail {

inline std::vector<double> parse_list(const std::string& text, const std::string& key) {
  std::string s = text;
  for (char& c : s)
    if (c == ',') c = ' ';
  std::istringstream in(s);
  std::vector<double> out;
  std::string tok;
  while (in >> tok) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw ConfigError("key '" + key + "': '" + tok + "' is not a number");
    }
  }
  return out;
}

inline double parse_double(const std::string& text, const std::string& key) {
  const std::vector<double> v = parse_list(text, key);
  if (v.size() != 1) throw ConfigError("key '" + key + "': expected one number, got '" + text + "'");
  return v[0];
}

inline long long parse_integer(const std::string& text, const std::string& key) {
  const double v = parse_double(text, key);
  if (v != std::floor(v)) throw ConfigError("key '" + key + "': expected an integer, got '" + text + "'");
  return static_cast<long long>(v);
}

inline bool parse_bool(const std::string& text, const std::string& key) {
  if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
  if (text == "false" || text == "0" || text == "no" || text == "off") return false;
  throw ConfigError("key '" + key + "': expected true or false, got '" + text + "'");
}

inline std::string join(const std::vector<double>& v) {
  std::ostringstream out;
  out.precision(17);
  for (std::size_t i = 0; i < v.size(); ++i) out << (i ? "," : "") << v[i];
  return out.str();
}

inline std::string fmt(double x) {
  std::ostringstream out;
  out.precision(17);
  out << x;
  return out.str();
}

inline const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"kernel", {"type", "dim", "anisotropy"}},
      {"profile", {"name", "parameter"}},
      {"shape",
       {"type", "center", "radius", "lower", "upper", "normal", "offset_low", "offset_high", "base_lower",
        "base_upper", "height_base", "height_terms", "include_floor_and_sides"}},
      {"domain", {"lower", "upper", "resolution"}},
      {"schedule",
       {"eps0", "ratio", "count", "policy", "voxels_per_eps", "supersample", "rule", "path", "boundary_order",
        "t_order", "inner_order", "outer_order", "tensor_order", "tolerance", "richardson_order", "h_values",
        "eps_scale", "eps_law", "perturbation", "amplitude_scale", "deficit_tolerance", "seed"}},
      {"output", {"csv", "json", "timings"}},
  };
  return keys;
}

inline void require_size(const Vec& v, int dim, const std::string& key) {
  if (static_cast<int>(v.size()) != dim)
    throw ConfigError("key '" + key + "': expected " + std::to_string(dim) + " components, got " +
                      std::to_string(v.size()));
}

}  // namespace config_detail

/// Parses "amp sin|cos k1 [k2 ...]" terms separated by ';'.
inline std::vector<TrigTerm> parse_trig_terms(const std::string& text, int base_dim, const std::string& key) {
  std::vector<TrigTerm> out;
  std::istringstream all(text);
  std::string part;
  while (std::getline(all, part, ';')) {
    std::istringstream in(part);
    std::string amp;
    std::string kind;
    if (!(in >> amp)) continue;
    if (!(in >> kind) || (kind != "sin" && kind != "cos"))
      throw ConfigError("key '" + key + "': term '" + part + "' must read 'amplitude sin|cos k1 ...'");
    TrigTerm t;
    t.amplitude = config_detail::parse_double(amp, key);
    t.cosine = kind == "cos";
    std::string k;
    while (in >> k) t.wavenumbers.push_back(config_detail::parse_double(k, key));
    if (static_cast<int>(t.wavenumbers.size()) != base_dim)
      throw ConfigError("key '" + key + "': term '" + part + "' needs " + std::to_string(base_dim) + " wavenumber(s)");
    out.push_back(std::move(t));
  }
  return out;
}

/// Parses a config from a stream. Throws ConfigError on any problem.
inline ExperimentConfig parse_config(std::istream& in) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config syntax: ") + e.what());
  }
  const auto& known = config_detail::known_keys();
  for (const auto& [section, body] : tree) {
    auto it = known.find(section);
    if (it == known.end()) throw ConfigError("unknown section [" + section + "]");
    if (!body.data().empty()) throw ConfigError("key '" + section + "' outside any section");
    for (const auto& [key, value] : body)
      if (!it->second.count(key)) throw ConfigError("unknown key '" + key + "' in [" + section + "]");
  }
  auto get = [&](const std::string& section, const std::string& key) -> std::optional<std::string> {
    auto s = tree.get_child_optional(section);
    if (!s) return std::nullopt;
    auto v = s->get_optional<std::string>(pt::ptree::path_type(key, '\0'));
    if (!v) return std::nullopt;
    return *v;
  };

  ExperimentConfig cfg;
  using namespace config_detail;

  // [kernel]
  if (auto v = get("kernel", "type")) cfg.kernel.type = *v;
  if (cfg.kernel.type != "bump") throw ConfigError("[kernel] type: only 'bump' is available");
  if (auto v = get("kernel", "dim")) cfg.kernel.dim = static_cast<int>(parse_integer(*v, "dim"));
  const int dim = cfg.kernel.dim;
  if (dim < 2 || dim > kMaxDim) throw ConfigError("[kernel] dim must be in [2, " + std::to_string(kMaxDim) + "]");
  if (auto v = get("kernel", "anisotropy")) cfg.kernel.anisotropy = parse_list(*v, "anisotropy");
  {
    const std::size_t n = cfg.kernel.anisotropy.size();
    if (n != 0 && n != static_cast<std::size_t>(dim) && n != static_cast<std::size_t>(dim * dim))
      throw ConfigError("[kernel] anisotropy: give dim (diagonal) or dim*dim numbers");
  }

  // [profile]
  if (auto v = get("profile", "name")) cfg.profile.name = *v;
  if (auto v = get("profile", "parameter")) cfg.profile.parameter = parse_double(*v, "parameter");

  // [domain]
  cfg.domain.lower.assign(dim, 0.0);
  cfg.domain.upper.assign(dim, 1.0);
  if (auto v = get("domain", "lower")) cfg.domain.lower = parse_list(*v, "lower");
  if (auto v = get("domain", "upper")) cfg.domain.upper = parse_list(*v, "upper");
  if (auto v = get("domain", "resolution")) cfg.domain.resolution = static_cast<int>(parse_integer(*v, "resolution"));
  require_size(cfg.domain.lower, dim, "[domain] lower");
  require_size(cfg.domain.upper, dim, "[domain] upper");

  // [shape]
  ShapeSettings& sh = cfg.shape;
  if (auto v = get("shape", "type")) sh.type = *v;
  sh.center.assign(dim, 0.5);
  sh.lower.assign(dim, 0.25);
  sh.upper.assign(dim, 0.75);
  sh.normal = unit_axis(dim, 0);
  sh.base_lower.assign(dim - 1, 0.0);
  sh.base_upper.assign(dim - 1, 1.0);
  if (auto v = get("shape", "center")) sh.center = parse_list(*v, "center");
  if (auto v = get("shape", "radius")) sh.radius = parse_double(*v, "radius");
  if (auto v = get("shape", "lower")) sh.lower = parse_list(*v, "lower");
  if (auto v = get("shape", "upper")) sh.upper = parse_list(*v, "upper");
  if (auto v = get("shape", "normal")) sh.normal = parse_list(*v, "normal");
  if (auto v = get("shape", "offset_low")) sh.offset_low = parse_double(*v, "offset_low");
  if (auto v = get("shape", "offset_high")) sh.offset_high = parse_double(*v, "offset_high");
  if (auto v = get("shape", "base_lower")) sh.base_lower = parse_list(*v, "base_lower");
  if (auto v = get("shape", "base_upper")) sh.base_upper = parse_list(*v, "base_upper");
  if (auto v = get("shape", "height_base")) sh.height_base = parse_double(*v, "height_base");
  if (auto v = get("shape", "height_terms")) sh.height_terms = *v;
  if (auto v = get("shape", "include_floor_and_sides"))
    sh.include_floor_and_sides = parse_bool(*v, "include_floor_and_sides");
  static const std::set<std::string> shape_types{"ball", "box", "slab", "graph", "empty"};
  if (!shape_types.count(sh.type)) throw ConfigError("[shape] type: unknown shape '" + sh.type + "'");
  require_size(sh.center, dim, "[shape] center");
  require_size(sh.lower, dim, "[shape] lower");
  require_size(sh.upper, dim, "[shape] upper");
  require_size(sh.normal, dim, "[shape] normal");
  require_size(sh.base_lower, dim - 1, "[shape] base_lower");
  require_size(sh.base_upper, dim - 1, "[shape] base_upper");
  parse_trig_terms(sh.height_terms, dim - 1, "height_terms");

  // [schedule]
  ScheduleSettings& sc = cfg.schedule;
  if (auto v = get("schedule", "eps0")) sc.eps0 = parse_double(*v, "eps0");
  if (auto v = get("schedule", "ratio")) sc.ratio = parse_double(*v, "ratio");
  if (auto v = get("schedule", "count")) sc.count = static_cast<int>(parse_integer(*v, "count"));
  if (auto v = get("schedule", "policy")) sc.policy = *v;
  if (auto v = get("schedule", "voxels_per_eps")) sc.voxels_per_eps = static_cast<int>(parse_integer(*v, "voxels_per_eps"));
  if (auto v = get("schedule", "supersample")) sc.supersample = static_cast<int>(parse_integer(*v, "supersample"));
  if (auto v = get("schedule", "rule")) sc.rule = *v;
  if (auto v = get("schedule", "path")) sc.path = *v;
  if (auto v = get("schedule", "boundary_order")) sc.boundary_order = static_cast<int>(parse_integer(*v, "boundary_order"));
  if (auto v = get("schedule", "t_order")) sc.quadrature.t_order = static_cast<int>(parse_integer(*v, "t_order"));
  if (auto v = get("schedule", "inner_order")) sc.quadrature.inner_order = static_cast<int>(parse_integer(*v, "inner_order"));
  if (auto v = get("schedule", "outer_order")) sc.quadrature.outer_order = static_cast<int>(parse_integer(*v, "outer_order"));
  if (auto v = get("schedule", "tensor_order")) sc.quadrature.tensor_order = static_cast<int>(parse_integer(*v, "tensor_order"));
  if (auto v = get("schedule", "tolerance")) sc.tolerance = parse_double(*v, "tolerance");
  if (auto v = get("schedule", "richardson_order")) sc.richardson_order = static_cast<int>(parse_integer(*v, "richardson_order"));
  if (auto v = get("schedule", "h_values")) {
    sc.h_values.clear();
    for (double x : parse_list(*v, "h_values")) {
      if (x != std::floor(x) || x < 1) throw ConfigError("key 'h_values': entries must be positive integers");
      sc.h_values.push_back(static_cast<int>(x));
    }
  }
  if (auto v = get("schedule", "eps_scale")) sc.eps_scale = parse_double(*v, "eps_scale");
  if (auto v = get("schedule", "eps_law")) sc.eps_law = *v;
  if (auto v = get("schedule", "perturbation")) sc.perturbation = *v;
  if (auto v = get("schedule", "amplitude_scale")) sc.amplitude_scale = parse_double(*v, "amplitude_scale");
  if (auto v = get("schedule", "deficit_tolerance")) sc.deficit_tolerance = parse_double(*v, "deficit_tolerance");
  if (auto v = get("schedule", "seed")) {
    const long long s = parse_integer(*v, "seed");
    if (s < 0) throw ConfigError("key 'seed': must be nonnegative");
    sc.seed = static_cast<std::uint64_t>(s);
  }
  if (!(sc.eps0 > 0.0)) throw ConfigError("[schedule] eps0 must be positive");
  if (!(sc.ratio > 0.0 && sc.ratio < 1.0)) throw ConfigError("[schedule] ratio must lie in (0, 1) so eps decreases");
  if (sc.count < 1) throw ConfigError("[schedule] count must be >= 1");
  if (sc.policy != "scaled" && sc.policy != "fixed") throw ConfigError("[schedule] policy must be 'scaled' or 'fixed'");
  if (sc.voxels_per_eps < 4) throw ConfigError("[schedule] voxels_per_eps must be >= 4 (eps >= 4h)");
  if (sc.supersample < 1) throw ConfigError("[schedule] supersample must be >= 1");
  if (sc.rule != "moment" && sc.rule != "threshold") throw ConfigError("[schedule] rule must be 'moment' or 'threshold'");
  if (sc.path != "auto" && sc.path != "direct" && sc.path != "fft")
    throw ConfigError("[schedule] path must be 'auto', 'direct' or 'fft'");
  if (sc.boundary_order < 4) throw ConfigError("[schedule] boundary_order must be >= 4");
  if (sc.quadrature.t_order < 8 || sc.quadrature.inner_order < 8 || sc.quadrature.outer_order < 8 ||
      sc.quadrature.tensor_order < 8)
    throw ConfigError("[schedule] quadrature orders must be >= 8");
  if (sc.richardson_order < 1) throw ConfigError("[schedule] richardson_order must be >= 1");
  if (sc.eps_law != "scaled" && sc.eps_law != "fixed") throw ConfigError("[schedule] eps_law must be 'scaled' or 'fixed'");
  if (!(sc.tolerance > 0.0) || !(sc.deficit_tolerance > 0.0)) throw ConfigError("[schedule] tolerances must be positive");
  for (std::size_t i = 1; i < sc.h_values.size(); ++i)
    if (sc.h_values[i] <= sc.h_values[i - 1]) throw ConfigError("[schedule] h_values must be increasing");
  parse_trig_terms(sc.perturbation, dim - 1, "perturbation");

  // [output]
  if (auto v = get("output", "csv")) cfg.output.csv = *v;
  if (auto v = get("output", "json")) cfg.output.json = *v;
  if (auto v = get("output", "timings")) cfg.output.timings = parse_bool(*v, "timings");

  auto& e = cfg.echo;
  e["kernel"] = {{"type", cfg.kernel.type}, {"dim", std::to_string(dim)}, {"anisotropy", join(cfg.kernel.anisotropy)}};
  e["profile"] = {{"name", cfg.profile.name},
                  {"parameter", cfg.profile.parameter ? fmt(*cfg.profile.parameter) : std::string()}};
  e["shape"] = {{"type", sh.type},
                {"center", join(sh.center)},
                {"radius", fmt(sh.radius)},
                {"lower", join(sh.lower)},
                {"upper", join(sh.upper)},
                {"normal", join(sh.normal)},
                {"offset_low", fmt(sh.offset_low)},
                {"offset_high", fmt(sh.offset_high)},
                {"base_lower", join(sh.base_lower)},
                {"base_upper", join(sh.base_upper)},
                {"height_base", fmt(sh.height_base)},
                {"height_terms", sh.height_terms},
                {"include_floor_and_sides", sh.include_floor_and_sides ? "true" : "false"}};
  e["domain"] = {{"lower", join(cfg.domain.lower)},
                 {"upper", join(cfg.domain.upper)},
                 {"resolution", std::to_string(cfg.domain.resolution)}};
  std::vector<double> hs(sc.h_values.begin(), sc.h_values.end());
  e["schedule"] = {{"eps0", fmt(sc.eps0)},
                   {"ratio", fmt(sc.ratio)},
                   {"count", std::to_string(sc.count)},
                   {"policy", sc.policy},
                   {"voxels_per_eps", std::to_string(sc.voxels_per_eps)},
                   {"supersample", std::to_string(sc.supersample)},
                   {"rule", sc.rule},
                   {"path", sc.path},
                   {"boundary_order", std::to_string(sc.boundary_order)},
                   {"t_order", std::to_string(sc.quadrature.t_order)},
                   {"inner_order", std::to_string(sc.quadrature.inner_order)},
                   {"outer_order", std::to_string(sc.quadrature.outer_order)},
                   {"tensor_order", std::to_string(sc.quadrature.tensor_order)},
                   {"tolerance", fmt(sc.tolerance)},
                   {"richardson_order", std::to_string(sc.richardson_order)},
                   {"h_values", join(hs)},
                   {"eps_scale", fmt(sc.eps_scale)},
                   {"eps_law", sc.eps_law},
                   {"perturbation", sc.perturbation},
                   {"amplitude_scale", fmt(sc.amplitude_scale)},
                   {"deficit_tolerance", fmt(sc.deficit_tolerance)},
                   {"seed", std::to_string(sc.seed)}};
  e["output"] = {{"csv", cfg.output.csv}, {"json", cfg.output.json}, {"timings", cfg.output.timings ? "true" : "false"}};
  return cfg;
}

inline ExperimentConfig parse_config_text(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

// ---- builders -------------------------------------------------------------

inline Kernel build_kernel(const KernelSettings& settings) {
  const int dim = settings.dim;
  try {
    if (settings.anisotropy.empty()) return make_bump_kernel(dim);
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(dim, dim);
    if (settings.anisotropy.size() == static_cast<std::size_t>(dim)) {
      for (int i = 0; i < dim; ++i) a(i, i) = settings.anisotropy[i];
    } else {
      for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) a(i, j) = settings.anisotropy[i * dim + j];
    }
    return make_bump_kernel(dim, a);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("[kernel] ") + e.what());
  }
}

inline Profile build_profile(const ProfileSettings& settings) {
  try {
    return builtin_profile(settings.name, settings.parameter);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("[profile] ") + e.what());
  }
}

inline TrigSeries build_height(const ShapeSettings& settings) {
  TrigSeries u;
  u.base = settings.height_base;
  u.terms = parse_trig_terms(settings.height_terms, static_cast<int>(settings.base_lower.size()), "height_terms");
  return u;
}

inline Shape build_shape(const ShapeSettings& settings, int dim) {
  if (settings.type == "ball") {
    if (!(settings.radius > 0.0)) throw ConfigError("[shape] radius must be positive");
    return Ball{settings.center, settings.radius};
  }
  if (settings.type == "box") {
    for (int k = 0; k < dim; ++k)
      if (!(settings.lower[k] < settings.upper[k])) throw ConfigError("[shape] box needs lower < upper");
    return Box{settings.lower, settings.upper};
  }
  if (settings.type == "slab") {
    if (std::abs(norm(settings.normal) - 1.0) > 1e-12) throw ConfigError("[shape] slab normal must be a unit vector");
    if (!(settings.offset_low < settings.offset_high)) throw ConfigError("[shape] slab needs offset_low < offset_high");
    return Slab{settings.normal, settings.offset_low, settings.offset_high};
  }
  if (settings.type == "graph") {
    for (int k = 0; k + 1 < dim; ++k)
      if (!(settings.base_lower[k] < settings.base_upper[k])) throw ConfigError("[shape] graph needs base_lower < base_upper");
    return make_graph(settings.base_lower, settings.base_upper, build_height(settings), settings.include_floor_and_sides);
  }
  return Empty{dim};
}

inline Domain build_domain(const DomainSettings& settings) {
  Domain d{settings.lower, settings.upper, settings.resolution};
  try {
    d.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("[domain] ") + e.what());
  }
  return d;
}

inline FepsOptions build_feps_options(const ScheduleSettings& sc) {
  FepsOptions o;
  o.supersample = sc.supersample;
  o.rule = sc.rule == "threshold" ? ComplementRule::threshold : ComplementRule::moment_corrected;
  o.path = sc.path == "direct" ? ConvolutionPath::direct
           : sc.path == "fft"  ? ConvolutionPath::fft
                               : ConvolutionPath::automatic;
  return o;
}

/// Domain at the resolution the schedule prescribes for `epsilon`.
inline Domain domain_for(const ExperimentConfig& cfg, double epsilon) {
  Domain d = build_domain(cfg.domain);
  if (cfg.schedule.policy == "scaled") {
    const double extent = d.upper[0] - d.lower[0];
    d.resolution = static_cast<int>(std::lround(extent * cfg.schedule.voxels_per_eps / epsilon));
  }
  return d;
}

}  // namespace nlperim::lab
