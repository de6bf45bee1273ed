#include "nlwlab/io.hpp"

#include <fmt/format.h>

#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>

namespace nlwlab {

static_assert(std::endian::native == std::endian::little, "record.bin is written in host order");

namespace {

constexpr char kMagic[8] = {'N', 'L', 'W', 'R', 'E', 'C', '0', '1'};

struct FileCloser {
  void operator()(std::FILE* f) const { std::fclose(f); }
};
using File = std::unique_ptr<std::FILE, FileCloser>;

File open_file(const std::string& path, const char* mode) {
  File f(std::fopen(path.c_str(), mode));
  if (!f) throw Error(fmt::format("cannot open '{}'", path));
  return f;
}

void put(std::FILE* f, const void* data, std::size_t bytes, const std::string& path) {
  if (bytes && std::fwrite(data, 1, bytes, f) != bytes) throw Error(fmt::format("write to '{}' failed", path));
}

void get(std::FILE* f, void* data, std::size_t bytes, const std::string& path) {
  if (bytes && std::fread(data, 1, bytes, f) != bytes)
    throw InvalidArgument(fmt::format("'{}': truncated file", path));
}

void put_array(std::FILE* f, const std::vector<double>& v, const std::string& path) {
  put(f, v.data(), v.size() * sizeof(double), path);
}

std::vector<double> get_array(std::FILE* f, std::size_t n, const std::string& path) {
  std::vector<double> v(n);
  get(f, v.data(), n * sizeof(double), path);
  return v;
}

double to_double(const std::string& s, const std::string& where) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (s.empty() || ec != std::errc() || ptr != end)
    throw InvalidArgument(fmt::format("{}: '{}' is not a number", where, s));
  return v;
}

}  // namespace

void write_text(const std::string& path, const std::string& text) {
  auto f = open_file(path, "wb");
  put(f.get(), text.data(), text.size(), path);
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument(fmt::format("cannot open '{}'", path));
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_checkpoint(const std::string& path, const SolverState& s, const ModelParams& m) {
  s.check();
  fmt::memory_buffer b;
  fmt::format_to(std::back_inserter(b), "# nlwlab checkpoint\nschema_version 1\n");
  fmt::format_to(std::back_inserter(b), "d {}\np {}\nt {}\ndr {}\nr_max {}\nnodes {}\n", m.d, m.p, s.t, s.dr,
                 s.r_max, s.nodes());
  for (std::size_t i = 0; i < s.nodes(); ++i) fmt::format_to(std::back_inserter(b), "{} {}\n", s.phi[i], s.pi[i]);
  write_text(path, fmt::to_string(b));
}

Checkpoint read_checkpoint(const std::string& path) {
  std::istringstream in(read_text(path));
  std::string line;
  if (!std::getline(in, line) || line != "# nlwlab checkpoint")
    throw InvalidArgument(fmt::format("'{}': not a checkpoint (bad first line)", path));
  Checkpoint c;
  std::size_t n = 0;
  const char* keys[] = {"schema_version", "d", "p", "t", "dr", "r_max", "nodes"};
  for (const char* key : keys) {
    std::string k, v;
    if (!(in >> k >> v) || k != key)
      throw InvalidArgument(fmt::format("'{}': expected header field '{}', got '{}'", path, key, k));
    const std::string where = fmt::format("'{}' field {}", path, key);
    const double x = to_double(v, where);
    if (k == "schema_version" && x != 1.0)
      throw InvalidArgument(fmt::format("'{}': unsupported schema_version {}", path, v));
    if (k == "d") c.d = static_cast<int>(x);
    if (k == "p") c.p = x;
    if (k == "t") c.state.t = x;
    if (k == "dr") c.state.dr = x;
    if (k == "r_max") c.state.r_max = x;
    if (k == "nodes") n = static_cast<std::size_t>(x);
  }
  c.state.phi.resize(n);
  c.state.pi.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::string a, b;
    if (!(in >> a >> b)) throw InvalidArgument(fmt::format("'{}': truncated at node {}", path, i));
    c.state.phi[i] = to_double(a, fmt::format("'{}' node {}", path, i));
    c.state.pi[i] = to_double(b, fmt::format("'{}' node {}", path, i));
  }
  c.state.check();
  return c;
}

nlohmann::json to_json(const ModelParams& m) {
  return {{"d", m.d}, {"p", m.p}, {"gamma0", m.gamma0}, {"epsilon", m.epsilon}};
}

nlohmann::json record_metadata(const SpacetimeRecord& rec) {
  nlohmann::json snaps = nlohmann::json::array();
  for (const auto& s : rec.snapshots)
    snaps.push_back({{"t", s.t}, {"dr", s.dr}, {"r_max", s.r_max}, {"nodes", s.nodes()}});
  return {{"schema_version", 1},
          {"kind", "spacetime_record"},
          {"id", rec.id},
          {"model", to_json(rec.model)},
          {"nonlinear", rec.nonlinear},
          {"t0", rec.t0},
          {"dr_solver", rec.dr_solver},
          {"dt_solver", rec.dt_solver},
          {"r_max", rec.r_max},
          {"record_every", rec.record_every},
          {"record_stride", rec.record_stride},
          {"dt_rec", rec.dt_rec},
          {"dr_rec", rec.dr_rec},
          {"nt", rec.nt},
          {"nr", rec.nr},
          {"support_radius", rec.support_radius},
          {"causal_margin", rec.causal_margin},
          {"has_residual", !rec.residual.empty()},
          {"snapshots", snaps}};
}

void write_record_bin(const std::string& path, const SpacetimeRecord& rec) {
  const std::string header = record_metadata(rec).dump();
  auto f = open_file(path, "wb");
  put(f.get(), kMagic, sizeof kMagic, path);
  const std::uint64_t len = header.size();
  put(f.get(), &len, sizeof len, path);
  put(f.get(), header.data(), header.size(), path);
  put_array(f.get(), rec.phi, path);
  put_array(f.get(), rec.dphi_dt, path);
  put_array(f.get(), rec.dphi_dr, path);
  put_array(f.get(), rec.residual, path);
  for (const auto& s : rec.snapshots) {
    put_array(f.get(), s.phi, path);
    put_array(f.get(), s.pi, path);
  }
}

SpacetimeRecord read_record_bin(const std::string& path) {
  auto f = open_file(path, "rb");
  char magic[8];
  get(f.get(), magic, sizeof magic, path);
  if (!std::equal(magic, magic + 8, kMagic)) throw InvalidArgument(fmt::format("'{}': not a record file", path));
  std::uint64_t len = 0;
  get(f.get(), &len, sizeof len, path);
  if (len > (1u << 26)) throw InvalidArgument(fmt::format("'{}': implausible header length {}", path, len));
  std::string header(len, '\0');
  get(f.get(), header.data(), len, path);
  nlohmann::json h;
  try {
    h = nlohmann::json::parse(header);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(fmt::format("'{}': bad header: {}", path, e.what()));
  }
  if (h.value("schema_version", 0) != 1)
    throw InvalidArgument(fmt::format("'{}': unsupported schema_version", path));
  SpacetimeRecord rec;
  try {
    const auto& m = h.at("model");
    rec.model.d = m.at("d").get<int>();
    rec.model.p = m.at("p").get<double>();
    rec.model.gamma0 = m.at("gamma0").get<double>();
    rec.model.epsilon = m.at("epsilon").get<double>();
    rec.nonlinear = h.at("nonlinear").get<bool>();
    rec.id = h.at("id").get<std::string>();
    rec.t0 = h.at("t0").get<double>();
    rec.dr_solver = h.at("dr_solver").get<double>();
    rec.dt_solver = h.at("dt_solver").get<double>();
    rec.r_max = h.at("r_max").get<double>();
    rec.record_every = h.at("record_every").get<std::size_t>();
    rec.record_stride = h.at("record_stride").get<std::size_t>();
    rec.dt_rec = h.at("dt_rec").get<double>();
    rec.dr_rec = h.at("dr_rec").get<double>();
    rec.nt = h.at("nt").get<std::size_t>();
    rec.nr = h.at("nr").get<std::size_t>();
    rec.support_radius = h.at("support_radius").get<double>();
    rec.causal_margin = h.at("causal_margin").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(fmt::format("'{}': bad header: {}", path, e.what()));
  }
  const std::size_t n = rec.nt * rec.nr;
  rec.phi = get_array(f.get(), n, path);
  rec.dphi_dt = get_array(f.get(), n, path);
  rec.dphi_dr = get_array(f.get(), n, path);
  if (h.value("has_residual", false)) rec.residual = get_array(f.get(), n, path);
  for (const auto& s : h.at("snapshots")) {
    SolverState st;
    st.t = s.at("t").get<double>();
    st.dr = s.at("dr").get<double>();
    st.r_max = s.at("r_max").get<double>();
    const auto nodes = s.at("nodes").get<std::size_t>();
    st.phi = get_array(f.get(), nodes, path);
    st.pi = get_array(f.get(), nodes, path);
    rec.snapshots.push_back(std::move(st));
  }
  if (std::fgetc(f.get()) != EOF) throw InvalidArgument(fmt::format("'{}': trailing bytes", path));
  return rec;
}

void write_record_csv(const std::string& path, const SpacetimeRecord& rec) {
  auto f = open_file(path, "wb");
  fmt::memory_buffer b;
  fmt::format_to(std::back_inserter(b), "# {}\nt,r,phi,dphi_dt,dphi_dr\n", record_metadata(rec).dump());
  for (std::size_t j = 0; j < rec.nt; ++j) {
    for (std::size_t i = 0; i < rec.nr; ++i) {
      const auto k = rec.index(j, i);
      fmt::format_to(std::back_inserter(b), "{},{},{},{},{}\n", rec.time(j), rec.radius(i), rec.phi[k],
                     rec.dphi_dt[k], rec.dphi_dr[k]);
    }
    if (b.size() > (1u << 22)) {
      put(f.get(), b.data(), b.size(), path);
      b.clear();
    }
  }
  put(f.get(), b.data(), b.size(), path);
}

void write_series_csv(const std::string& path, const FunctionalSeries& s, const nlohmann::json& extra) {
  nlohmann::json meta = {{"schema_version", 1},
                         {"kind", "functional_series"},
                         {"label", s.label},
                         {"parameter", s.parameter},
                         {"params", to_json(s.params)},
                         {"record_id", s.provenance}};
  if (extra.is_object())
    for (const auto& [k, v] : extra.items()) meta[k] = v;
  fmt::memory_buffer b;
  fmt::format_to(std::back_inserter(b), "# {}\n{},value\n", meta.dump(), s.parameter);
  for (const auto& [x, v] : s.pairs) fmt::format_to(std::back_inserter(b), "{},{}\n", x, v);
  write_text(path, fmt::to_string(b));
}

FunctionalSeries read_series_csv(const std::string& path) {
  std::istringstream in(read_text(path));
  std::string line;
  if (!std::getline(in, line) || line.rfind("# ", 0) != 0)
    throw InvalidArgument(fmt::format("'{}': missing '# {{json}}' header", path));
  nlohmann::json meta;
  try {
    meta = nlohmann::json::parse(line.substr(2));
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(fmt::format("'{}': bad header: {}", path, e.what()));
  }
  FunctionalSeries s;
  s.label = meta.value("label", "");
  s.parameter = meta.value("parameter", "u");
  s.provenance = meta.value("record_id", "");
  if (meta.contains("params")) {
    const auto& m = meta["params"];
    s.params.d = m.value("d", 3);
    s.params.p = m.value("p", 3.0);
    s.params.gamma0 = m.value("gamma0", 1.5);
    s.params.epsilon = m.value("epsilon", 0.1);
  }
  if (!std::getline(in, line) || line != s.parameter + ",value")
    throw InvalidArgument(fmt::format("'{}': expected column header '{},value'", path, s.parameter));
  std::size_t row = 2;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw InvalidArgument(fmt::format("'{}' line {}: expected 2 columns", path, row));
    const std::string where = fmt::format("'{}' line {}", path, row);
    s.pairs.emplace_back(to_double(line.substr(0, comma), where), to_double(line.substr(comma + 1), where));
  }
  return s;
}

nlohmann::json to_json(const CurrentEvaluation& ev) {
  return {{"region", ev.region},
          {"spec", ev.spec},
          {"bulk", ev.bulk},
          {"source", ev.source},
          {"boundary_terms", ev.boundary_terms},
          {"boundary_sum", ev.boundary_sum()},
          {"residual", ev.residual},
          {"scale", ev.scale()},
          {"relative_residual", ev.relative_residual()}};
}

}  // namespace nlwlab
