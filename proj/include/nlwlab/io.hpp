#pragma once

#include <string>

#include <json.hpp>

#include "nlwlab/functionals.hpp"
#include "nlwlab/multipliers.hpp"
#include "nlwlab/record.hpp"

namespace nlwlab {

// Text checkpoint of a SolverState:
//   # nlwlab checkpoint
//   schema_version 1
//   d <int>  p <double>  t <double>  dr <double>  r_max <double>  nodes <n>
//   then n lines "phi pi"
// All doubles in shortest round-trip form.
void write_checkpoint(const std::string& path, const SolverState& s, const ModelParams& m);
struct Checkpoint {
  SolverState state;
  int d = 3;
  double p = 3.0;
};
Checkpoint read_checkpoint(const std::string& path);

// Binary record: magic "NLWREC01", uint64 header length, JSON header, then
// little-endian float64 arrays phi, dphi_dt, dphi_dr, residual (if any) and
// per snapshot phi, pi.
void write_record_bin(const std::string& path, const SpacetimeRecord& rec);
SpacetimeRecord read_record_bin(const std::string& path);

nlohmann::json record_metadata(const SpacetimeRecord& rec);

// "# {json}" then "t,r,phi,dphi_dt,dphi_dr", one row per record node.
void write_record_csv(const std::string& path, const SpacetimeRecord& rec);

// "# {json}" then "<parameter>,value".
void write_series_csv(const std::string& path, const FunctionalSeries& s, const nlohmann::json& extra = {});
FunctionalSeries read_series_csv(const std::string& path);

nlohmann::json to_json(const CurrentEvaluation& ev);
nlohmann::json to_json(const ModelParams& m);

void write_text(const std::string& path, const std::string& text);
std::string read_text(const std::string& path);

}  // namespace nlwlab
