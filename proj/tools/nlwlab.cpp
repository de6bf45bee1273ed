// nlwlab command line: solve, diagnose, sweep, report.
#include <fmt/format.h>

#include <CLI11.hpp>
#include <chrono>
#include <iostream>

#include "nlwlab/config.hpp"
#include "nlwlab/pipeline.hpp"

using namespace nlwlab;

namespace {

int fail(const std::string& what) {
  fmt::print(stderr, "nlwlab: {}\n", what);
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical lab for the radial defocusing semilinear wave equation"};
  app.require_subcommand(1);

  std::string config_path, out_dir = "run", record_dir, suite, in_dir, format = "json", sweep_out = "sweep_out";

  auto* solve_cmd = app.add_subcommand("solve", "run the solver and write record, checkpoint and manifest");
  solve_cmd->add_option("--config", config_path, "INI config file")->required()->check(CLI::ExistingFile);
  solve_cmd->add_option("--out", out_dir, "output directory")->capture_default_str();

  auto* diag_cmd = app.add_subcommand("diagnose", "evaluate functionals and verdicts on a solved run");
  diag_cmd->add_option("--record", record_dir, "directory written by solve")->required();
  diag_cmd->add_option("--suite", suite, "none|energy|audits|iled|decay|rweighted|exterior|spacetime|scattering|full "
                                         "or a comma list (default: the config's suite)");

  auto* sweep_cmd = app.add_subcommand("sweep", "Cartesian sweep over the [sweep] lists");
  sweep_cmd->add_option("--config", config_path, "INI config file")->required()->check(CLI::ExistingFile);
  sweep_cmd->add_option("--out", sweep_out, "output directory")->capture_default_str();

  auto* report_cmd = app.add_subcommand("report", "print a report as json or csv");
  report_cmd->add_option("--in", in_dir, "run or sweep directory")->required();
  report_cmd->add_option("--format", format, "json|csv")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // --help and friends exit 0; bad arguments share the invalid-input code
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (*solve_cmd) {
      RunConfig c = load_config(config_path);
      try {
        validate(c);
      } catch (const InvalidArgument& e) {
        return fail(fmt::format("invalid config: {}", e.what()));
      }
      const auto t0 = std::chrono::steady_clock::now();
      const auto m = solve(c, out_dir);
      const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      fmt::print("solved {} in {:.1f} s: E0 = {}, E_gamma0 = {}, record {} x {} -> {}\n",
                 m["record_id"].get<std::string>(), sec, m["energies"]["E0"].get<double>(),
                 m["energies"]["E_gamma0"].get<double>(), m["grid"]["nt"].get<std::size_t>(),
                 m["grid"]["nr"].get<std::size_t>(), out_dir);
      return 0;
    }
    if (*diag_cmd) {
      if (suite.empty()) suite = load_run(record_dir).config.diagnostics.suite;
      const auto r = diagnose(record_dir, suite);
      for (const auto& it : r["items"])
        fmt::print("{:<11} {:<5} {}\n", it["name"].get<std::string>(), it["status"].get<std::string>(),
                   it.value("message", ""));
      fmt::print("pass {} fail {} error {} -> {}/report.json\n", r["summary"]["pass"].get<int>(),
                 r["summary"]["fail"].get<int>(), r["summary"]["error"].get<int>(), record_dir);
      return 0;
    }
    if (*sweep_cmd) {
      const RunConfig c = load_config(config_path);
      const auto r = sweep(c, sweep_out);
      for (const auto& cell : r["cells"])
        fmt::print("cell {:<3} p={} gamma0={} A={} dr={}: {}{}\n", cell["cell"].get<int>(), cell["p"].get<double>(),
                   cell["gamma0"].get<double>(), cell["amplitude"].get<double>(), cell["dr"].get<double>(),
                   cell["status"].get<std::string>(),
                   cell.contains("reason") ? " (" + cell["reason"].get<std::string>() + ")" : std::string());
      fmt::print("{} workers -> {}/sweep_report.json\n", r["workers"].get<int>(), sweep_out);
      return 0;
    }
    if (*report_cmd) {
      std::cout << render_report(in_dir, format);
      return 0;
    }
  } catch (const InvalidArgument& e) {
    return fail(e.what());
  } catch (const std::exception& e) {
    fmt::print(stderr, "nlwlab: {}\n", e.what());
    return 1;
  }
  return 0;
}
