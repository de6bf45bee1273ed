#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <json.hpp>

#include "nlwlab/initial_data.hpp"
#include "nlwlab/model.hpp"

namespace nlwlab {

inline constexpr int kSchemaVersion = 1;

struct GridConfig {
  double dr = 0.05;
  double r_max = 120.0;
  double T = 100.0;
  double cfl = 0.5;
  std::size_t record_every = 4;
  std::size_t record_stride = 2;
  double causal_margin = -1.0;  // negative: max(1, 20 dr)
  std::vector<double> snapshots;
};

// Knobs of the diagnose suites. Windows are recorded in every report.
struct DiagnosticsConfig {
  std::string suite = "full";
  double energy_tol = 1e-4;
  double audit_tol = 1e-2;
  double iled_tol = 0.01;
  double fit_lo = 2.0;
  double fit_hi = 32.0;
  double fit_step = 1.0;
  double min_r_squared = 0.98;
  double decay_slack = 0.1;
  double exterior_lo = -32.0;
  double exterior_hi = -2.0;
  double exterior_slack = 0.2;
  std::vector<double> plateau_times = {25.0, 50.0, 100.0};
  double plateau_tol = 0.02;
  double flux_u_lo = -1.0;
  double flux_u_hi = 40.0;
  double spacetime_ratio = 4.0;
  std::vector<double> cauchy_times = {10.0, 20.0, 40.0};
  double cauchy_tol = 1e-2;  // relative to sqrt(E0)
};

// Cartesian grid of overrides. An empty list keeps the base value.
struct SweepConfig {
  std::vector<double> p;
  std::vector<double> gamma0;
  std::vector<double> amplitude;
  std::vector<double> dr;
  std::size_t workers = 0;  // 0: hardware concurrency
};

struct OutputConfig {
  bool record_csv = true;
  bool record_bin = true;
  bool checkpoint = true;
};

struct RunConfig {
  ModelParams model;
  Mode mode = Mode::none;
  InitialDataSpec data;
  GridConfig grid;
  DiagnosticsConfig diagnostics;
  SweepConfig sweep;
  OutputConfig output;
};

// INI text with sections [model] [data] [grid] [diagnostics] [sweep] [output].
// Unknown sections or keys, malformed numbers and missing values are
// InvalidArgument errors naming "section.key".
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

// Checks the model window for the mode plus grid sanity.
void validate(const RunConfig& c);

nlohmann::json to_json(const RunConfig& c);
RunConfig config_from_json(const nlohmann::json& j);

// SHA-256 of the canonical JSON dump of the resolved config.
std::string config_hash(const RunConfig& c);
std::string sha256_hex(const std::string& bytes);

// Worker count: NLWLAB_WORKERS if set, else the configured value, else the
// hardware concurrency.
std::size_t resolve_workers(std::size_t configured);

}  // namespace nlwlab
