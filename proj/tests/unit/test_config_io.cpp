#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "helpers.hpp"
#include "nlwlab/config.hpp"
#include "nlwlab/io.hpp"
#include "nlwlab/pipeline.hpp"

using namespace nlwlab;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("nlwlab_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

const char* kSmall = R"(
[model]
p = 3
mode = flux_decay
[grid]
dr = 0.1
r_max = 20
T = 4
[diagnostics]
suite = energy
[output]
record_csv = false
)";

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("reference config parses") {
    const auto c = load_config(NLWLAB_SOURCE_DIR "/configs/reference.ini");
    CHECK(c.model.p == 3.0);
    CHECK(c.mode == Mode::flux_decay);
    CHECK(c.grid.r_max == 120.0);
    CHECK(c.diagnostics.plateau_times == std::vector<double>{25, 50, 100});
    CHECK_NOTHROW(validate(c));
  }

  TEST_CASE("bad input names the key") {
    auto msg = [](const std::string& text) {
      try {
        parse_config(text);
      } catch (const InvalidArgument& e) {
        return std::string(e.what());
      }
      return std::string();
    };
    CHECK(msg("[model]\nq = 3\n").find("model.q") != std::string::npos);
    CHECK(msg("[modle]\np = 3\n").find("modle") != std::string::npos);
    CHECK(msg("[grid]\ndr = 0.1x\n").find("grid.dr") != std::string::npos);
    CHECK(msg("[output]\ncheckpoint = maybe\n").find("output.checkpoint") != std::string::npos);
  }

  TEST_CASE("energy critical power is the upper edge") {
    auto c = parse_config("[model]\np = 5\n");
    CHECK_NOTHROW(validate(c));
    c = parse_config("[model]\np = 5.1\n");
    CHECK_THROWS_AS(validate(c), InvalidArgument);
    c = parse_config("[grid]\ncfl = 0.9\n");
    CHECK_THROWS_AS(validate(c), InvalidArgument);
  }

  TEST_CASE("json round trip and hash") {
    const auto c = load_config(NLWLAB_SOURCE_DIR "/configs/scattering.ini");
    const auto back = config_from_json(to_json(c));
    CHECK(to_json(back) == to_json(c));
    CHECK(config_hash(back) == config_hash(c));
    auto d = c;
    d.grid.dr = 0.025;
    CHECK(config_hash(d) != config_hash(c));
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  }

  TEST_CASE("worker override") {
    ::setenv("NLWLAB_WORKERS", "3", 1);
    CHECK(resolve_workers(8) == 3);
    ::setenv("NLWLAB_WORKERS", "0", 1);
    CHECK_THROWS_AS(resolve_workers(8), InvalidArgument);
    ::unsetenv("NLWLAB_WORKERS");
    CHECK(resolve_workers(5) == 5);
    CHECK(resolve_workers(0) >= 1);
  }

  TEST_CASE("checkpoint and record round trips") {
    const auto dir = scratch("io");
    const auto r = testing::run_gaussian(3.0, 0.1, 20.0, 4.0, true, 0.5, {2.0});
    ModelParams m;
    write_checkpoint((dir / "c.txt").string(), r.state, m);
    const auto c = read_checkpoint((dir / "c.txt").string());
    CHECK(c.state.phi == r.state.phi);
    CHECK(c.state.pi == r.state.pi);
    CHECK(c.state.t == r.state.t);
    CHECK(c.p == 3.0);

    write_record_bin((dir / "r.bin").string(), r.record);
    const auto rec = read_record_bin((dir / "r.bin").string());
    CHECK(rec.phi == r.record.phi);
    CHECK(rec.dphi_dr == r.record.dphi_dr);
    CHECK(rec.residual == r.record.residual);
    CHECK(rec.snapshots.size() == 1);
    CHECK(rec.snapshots[0].pi == r.record.snapshots[0].pi);
    CHECK(rec.nt == r.record.nt);

    std::ofstream((dir / "r.bin").string(), std::ios::app) << "x";
    CHECK_THROWS(read_record_bin((dir / "r.bin").string()));

    FunctionalSeries s;
    s.label = "flux";
    s.pairs = {{0.0, 1.0 / 3.0}, {1.0, 0.1}};
    write_series_csv((dir / "s.csv").string(), s);
    const auto b = read_series_csv((dir / "s.csv").string());
    CHECK(b.pairs == s.pairs);
    CHECK(b.label == "flux");
  }

  TEST_CASE("zero amplitude solves to zero energy") {
    auto c = parse_config(kSmall);
    c.data.amplitude = 0.0;
    const auto dir = scratch("zero");
    const auto m = solve(c, dir.string());
    CHECK(m["energies"]["E0"].get<double>() == 0.0);
    CHECK(fs::exists(dir / "manifest.json"));
    CHECK(fs::exists(dir / "record.bin"));
    CHECK_FALSE(fs::exists(dir / "record.csv"));
  }

  TEST_CASE("solve is deterministic and diagnose reports per item") {
    const auto c = parse_config(kSmall);
    const auto a = scratch("det_a"), b = scratch("det_b");
    solve(c, a.string());
    solve(c, b.string());
    CHECK(read_text((a / "record.bin").string()) == read_text((b / "record.bin").string()));
    CHECK(read_text((a / "manifest.json").string()) == read_text((b / "manifest.json").string()));

    const auto none = diagnose(a.string(), "none");
    CHECK(none["items"].empty());
    const auto r = diagnose(a.string(), "energy,scattering");
    REQUIRE(r["items"].size() == 2);
    CHECK(r["items"][0]["name"] == "energy");
    // p = 3 is below the scattering window: an error entry, not an abort
    CHECK(r["items"][1]["status"] == "error");
    CHECK(fs::exists(a / "report.json"));
    CHECK_THROWS_AS(diagnose(a.string(), "energy,bogus"), InvalidArgument);
    CHECK(render_report(a.string(), "csv").find("energy") != std::string::npos);
  }

  TEST_CASE("gamma0 outside the window fails validation") {
    auto c = parse_config(kSmall);
    c.model.gamma0 = 2.5;
    CHECK_THROWS_AS(validate(c), InvalidArgument);
  }

  TEST_CASE("sweep runs valid cells and skips the rest") {
    auto c = parse_config(kSmall);
    c.sweep.p = {3.0, 6.0};
    c.sweep.workers = 2;
    const auto dir = scratch("sweep");
    const auto r = sweep(c, dir.string());
    REQUIRE(r["cells"].size() == 2);
    CHECK(r["cells"][0]["status"] == "done");
    CHECK(r["cells"][1]["status"] == "skipped");
    CHECK(r["cells"][1]["reason"].get<std::string>().find("p") != std::string::npos);
    CHECK(fs::exists(dir / "sweep_report.json"));
  }
}
