#pragma once

// CSV and JSON emission for experiment reports.
//
// Convergence CSV columns: eps,resolution,F_eps,reference,abs_error,rel_error
// Lower-bound CSV columns: h,eps,amplitude,resolution,F_eps,reference,deficit,rel_deficit,delta
// A trailing "seconds" column is added only when [output] timings = true.

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "config.hpp"
#include "experiments.hpp"

#ifndef NLPERIM_VERSION
#define NLPERIM_VERSION "0.1.0"
#endif

namespace nlperim::lab {

inline std::string version_string() { return NLPERIM_VERSION; }

/// Shortest round-trip decimal with '.' separator.
inline std::string format_number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

/// RFC 4180 field quoting.
inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline std::string csv_line(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) out += (i ? "," : "") + csv_field(fields[i]);
  return out + "\r\n";
}

inline std::string convergence_csv(const ConvergenceReport& rep, bool timings) {
  std::vector<std::string> head{"eps", "resolution", "F_eps", "reference", "abs_error", "rel_error"};
  if (timings) head.push_back("seconds");
  std::string out = csv_line(head);
  for (const ConvergenceRow& r : rep.rows) {
    std::vector<std::string> f{format_number(r.epsilon), std::to_string(r.resolution), format_number(r.value),
                               format_number(rep.reference), format_number(r.abs_error), format_number(r.rel_error)};
    if (timings) f.push_back(format_number(r.seconds));
    out += csv_line(f);
  }
  return out;
}

inline std::string lower_bound_csv(const LowerBoundReport& rep, bool timings) {
  std::vector<std::string> head{"h",      "eps",       "amplitude",   "resolution", "F_eps",
                                "reference", "deficit", "rel_deficit", "delta"};
  if (timings) head.push_back("seconds");
  std::string out = csv_line(head);
  for (const LowerBoundRow& r : rep.rows) {
    std::vector<std::string> f{std::to_string(r.h),       format_number(r.epsilon),     format_number(r.amplitude),
                               std::to_string(r.resolution), format_number(r.value),    format_number(rep.reference),
                               format_number(r.deficit),  format_number(r.rel_deficit), format_number(r.delta)};
    if (timings) f.push_back(format_number(r.seconds));
    out += csv_line(f);
  }
  return out;
}

inline nlohmann::ordered_json config_echo(const ExperimentConfig& cfg) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const auto& [section, keys] : cfg.echo) {
    nlohmann::ordered_json s = nlohmann::ordered_json::object();
    for (const auto& [k, v] : keys) s[k] = v;
    j[section] = s;
  }
  return j;
}

inline nlohmann::ordered_json convergence_json(const ConvergenceReport& rep, const ExperimentConfig& cfg) {
  const bool timings = cfg.output.timings;
  nlohmann::ordered_json j;
  j["kind"] = "convergence";
  j["version"] = version_string();
  j["config"] = config_echo(cfg);
  j["reference"] = rep.reference;
  j["reference_flags"] = rep.reference_flags;
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const ConvergenceRow& r : rep.rows) {
    nlohmann::ordered_json row;
    row["eps"] = r.epsilon;
    row["resolution"] = r.resolution;
    row["F_eps"] = r.value;
    row["reference"] = rep.reference;
    row["abs_error"] = r.abs_error;
    row["rel_error"] = r.rel_error;
    if (timings) row["seconds"] = r.seconds;
    rows.push_back(row);
  }
  j["rows"] = rows;
  j["rate"] = rep.rate ? nlohmann::ordered_json(*rep.rate) : nlohmann::ordered_json("insufficient data");
  j["rate_note"] = rep.rate_note;
  j["extrapolated"] = rep.extrapolated ? nlohmann::ordered_json(*rep.extrapolated) : nlohmann::ordered_json();
  j["extrapolated_rel_error"] = rep.extrapolated_rel_error;
  j["final_rel_error"] = rep.final_rel_error;
  j["monotone"] = rep.monotone;
  j["tolerance"] = rep.tolerance;
  j["pass"] = rep.pass;
  return j;
}

inline nlohmann::ordered_json lower_bound_json(const LowerBoundReport& rep, const ExperimentConfig& cfg) {
  const bool timings = cfg.output.timings;
  nlohmann::ordered_json j;
  j["kind"] = "lower_bound";
  j["version"] = version_string();
  j["config"] = config_echo(cfg);
  j["reference"] = rep.reference;
  j["reference_flags"] = rep.reference_flags;
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const LowerBoundRow& r : rep.rows) {
    nlohmann::ordered_json row;
    row["h"] = r.h;
    row["eps"] = r.epsilon;
    row["amplitude"] = r.amplitude;
    row["resolution"] = r.resolution;
    row["F_eps"] = r.value;
    row["reference"] = rep.reference;
    row["deficit"] = r.deficit;
    row["rel_deficit"] = r.rel_deficit;
    row["delta"] = r.delta;
    if (timings) row["seconds"] = r.seconds;
    rows.push_back(row);
  }
  j["rows"] = rows;
  j["deficit_trend"] = rep.deficit_trend ? nlohmann::ordered_json(*rep.deficit_trend) : nlohmann::ordered_json();
  j["no_limit_schedule"] = rep.no_limit_schedule;
  j["pass"] = rep.pass ? nlohmann::ordered_json(*rep.pass) : nlohmann::ordered_json("not applicable");
  j["tolerance"] = rep.tolerance;
  j["note"] = rep.note;
  return j;
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << text;
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

}  // namespace nlperim::lab
