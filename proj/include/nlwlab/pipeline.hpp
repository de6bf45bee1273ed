#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "nlwlab/config.hpp"
#include "nlwlab/record.hpp"

namespace nlwlab {

// Runs the solver for a validated config and writes into out_dir:
//   manifest.json  config, hash, grid, E0 and E_gamma0, file list
//   record.bin     full record (see io.hpp)
//   record.csv     t,r,phi,dphi_dt,dphi_dr
//   checkpoint.txt final state
// Returns the manifest.
nlohmann::json solve(const RunConfig& c, const std::string& out_dir);

struct LoadedRun {
  RunConfig config;
  nlohmann::json manifest;
  SpacetimeRecord record;
};
LoadedRun load_run(const std::string& dir);

// Suite names: none, energy, audits, iled, decay, rweighted, exterior,
// spacetime, scattering, full; or a comma separated list of them.
std::vector<std::string> expand_suite(const std::string& suite);

// Runs the suite on an in-memory run. Each item becomes one entry of
// "items" with status pass|fail|error; an error in one item never stops the
// others. Series CSVs go to series_dir when it is non-empty.
nlohmann::json diagnose_run(const LoadedRun& run, const std::string& suite, const std::string& series_dir);

// diagnose_run on <dir>, writing <dir>/report.json and <dir>/series/*.csv.
nlohmann::json diagnose(const std::string& dir, const std::string& suite);

// Cartesian sweep over the [sweep] lists. Cell k goes to out_dir/cell_k;
// cells failing validation are skipped with the reason. Writes and returns
// out_dir/sweep_report.json.
nlohmann::json sweep(const RunConfig& c, const std::string& out_dir);

// report.json (or sweep_report.json) in dir rendered as "json" or "csv".
std::string render_report(const std::string& dir, const std::string& format);

}  // namespace nlwlab
