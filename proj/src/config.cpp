#include "nlwlab/config.hpp"

#include <fmt/format.h>
#include <openssl/evp.h>

#include <boost/algorithm/string/trim.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include "nlwlab/solver.hpp"

namespace nlwlab {

namespace {

using Setter = std::function<void(RunConfig&, const std::string&)>;

double parse_double(const std::string& key, const std::string& raw) {
  const std::string s = boost::algorithm::trim_copy(raw);
  double v = 0.0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (s.empty() || ec != std::errc() || ptr != end || !std::isfinite(v))
    throw InvalidArgument(fmt::format("{} = '{}': not a finite number", key, raw));
  return v;
}

long parse_int(const std::string& key, const std::string& raw) {
  const std::string s = boost::algorithm::trim_copy(raw);
  long v = 0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (s.empty() || ec != std::errc() || ptr != end)
    throw InvalidArgument(fmt::format("{} = '{}': not an integer", key, raw));
  return v;
}

std::size_t parse_count(const std::string& key, const std::string& raw) {
  const long v = parse_int(key, raw);
  if (v < 0) throw InvalidArgument(fmt::format("{} = {}: must be >= 0", key, v));
  return static_cast<std::size_t>(v);
}

bool parse_bool(const std::string& key, const std::string& raw) {
  const std::string s = boost::algorithm::trim_copy(raw);
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw InvalidArgument(fmt::format("{} = '{}': expected true|false", key, raw));
}

std::vector<double> parse_list(const std::string& key, const std::string& raw) {
  std::vector<double> out;
  if (boost::algorithm::trim_copy(raw).empty()) return out;
  std::stringstream ss(raw);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_double(key, item));
  return out;
}

std::string parse_word(const std::string& raw) { return boost::algorithm::trim_copy(raw); }

#define NUM(sec, field, target) \
  {sec "." #field, [](RunConfig& c, const std::string& v) { c.target = parse_double(sec "." #field, v); }}
#define CNT(sec, field, target) \
  {sec "." #field, [](RunConfig& c, const std::string& v) { c.target = parse_count(sec "." #field, v); }}
#define LST(sec, field, target) \
  {sec "." #field, [](RunConfig& c, const std::string& v) { c.target = parse_list(sec "." #field, v); }}
#define BOOL(sec, field, target) \
  {sec "." #field, [](RunConfig& c, const std::string& v) { c.target = parse_bool(sec "." #field, v); }}

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"model.d",
       [](RunConfig& c, const std::string& v) {
         const long d = parse_int("model.d", v);
         if (d < 3 || d > 64) throw InvalidArgument(fmt::format("model.d = {}: need 3 <= d <= 64", d));
         c.model.d = static_cast<int>(d);
       }},
      NUM("model", p, model.p),
      NUM("model", gamma0, model.gamma0),
      NUM("model", epsilon, model.epsilon),
      {"model.mode", [](RunConfig& c, const std::string& v) { c.mode = parse_mode(parse_word(v)); }},
      {"data.family", [](RunConfig& c, const std::string& v) { c.data.family = parse_family(parse_word(v)); }},
      NUM("data", amplitude, data.amplitude),
      NUM("data", width, data.width),
      NUM("data", center, data.center),
      NUM("data", tail_exponent, data.tail_exponent),
      {"data.velocity",
       [](RunConfig& c, const std::string& v) { c.data.velocity = parse_velocity(parse_word(v)); }},
      NUM("grid", dr, grid.dr),
      NUM("grid", r_max, grid.r_max),
      NUM("grid", T, grid.T),
      NUM("grid", cfl, grid.cfl),
      CNT("grid", record_every, grid.record_every),
      CNT("grid", record_stride, grid.record_stride),
      NUM("grid", causal_margin, grid.causal_margin),
      LST("grid", snapshots, grid.snapshots),
      {"diagnostics.suite", [](RunConfig& c, const std::string& v) { c.diagnostics.suite = parse_word(v); }},
      NUM("diagnostics", energy_tol, diagnostics.energy_tol),
      NUM("diagnostics", audit_tol, diagnostics.audit_tol),
      NUM("diagnostics", iled_tol, diagnostics.iled_tol),
      NUM("diagnostics", fit_lo, diagnostics.fit_lo),
      NUM("diagnostics", fit_hi, diagnostics.fit_hi),
      NUM("diagnostics", fit_step, diagnostics.fit_step),
      NUM("diagnostics", min_r_squared, diagnostics.min_r_squared),
      NUM("diagnostics", decay_slack, diagnostics.decay_slack),
      NUM("diagnostics", exterior_lo, diagnostics.exterior_lo),
      NUM("diagnostics", exterior_hi, diagnostics.exterior_hi),
      NUM("diagnostics", exterior_slack, diagnostics.exterior_slack),
      LST("diagnostics", plateau_times, diagnostics.plateau_times),
      NUM("diagnostics", plateau_tol, diagnostics.plateau_tol),
      NUM("diagnostics", flux_u_lo, diagnostics.flux_u_lo),
      NUM("diagnostics", flux_u_hi, diagnostics.flux_u_hi),
      NUM("diagnostics", spacetime_ratio, diagnostics.spacetime_ratio),
      LST("diagnostics", cauchy_times, diagnostics.cauchy_times),
      NUM("diagnostics", cauchy_tol, diagnostics.cauchy_tol),
      LST("sweep", p, sweep.p),
      LST("sweep", gamma0, sweep.gamma0),
      LST("sweep", amplitude, sweep.amplitude),
      LST("sweep", dr, sweep.dr),
      CNT("sweep", workers, sweep.workers),
      BOOL("output", record_csv, output.record_csv),
      BOOL("output", record_bin, output.record_bin),
      BOOL("output", checkpoint, output.checkpoint),
  };
  return table;
}

#undef NUM
#undef CNT
#undef LST
#undef BOOL

std::string join(const std::vector<double>& v) {
  std::string out;
  for (std::size_t k = 0; k < v.size(); ++k) out += (k ? "," : "") + fmt::format("{}", v[k]);
  return out;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  // property_tree only knows ';' comments
  std::string cleaned;
  {
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
      const auto t = boost::algorithm::trim_left_copy(line);
      cleaned += (!t.empty() && t[0] == '#') ? std::string() : line;
      cleaned += '\n';
    }
  }
  boost::property_tree::ptree tree;
  try {
    std::istringstream in(cleaned);
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw InvalidArgument(fmt::format("config: {} (line {})", e.message(), e.line()));
  }
  RunConfig c;
  const auto& table = setters();
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty())
      throw InvalidArgument(fmt::format("config: key '{}' outside any section", section));
    static const std::set<std::string> sections = {"model", "data", "grid", "diagnostics", "sweep", "output"};
    if (!sections.count(section)) throw InvalidArgument(fmt::format("config: unknown section [{}]", section));
    for (const auto& [key, value] : body) {
      const std::string name = section + "." + key;
      const auto it = table.find(name);
      if (it == table.end()) throw InvalidArgument(fmt::format("{}: unknown key", name));
      it->second(c, value.data());
    }
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument(fmt::format("config: cannot open '{}'", path));
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void validate(const RunConfig& c) {
  validate(c.model, c.mode);
  const auto& g = c.grid;
  if (!(g.dr > 0.0)) throw InvalidArgument(fmt::format("grid.dr = {}: must be positive", g.dr));
  if (!(g.r_max > 10.0 * g.dr))
    throw InvalidArgument(fmt::format("grid.r_max = {}: need at least 10 cells of dr = {}", g.r_max, g.dr));
  if (!(g.T > 0.0)) throw InvalidArgument(fmt::format("grid.T = {}: must be positive", g.T));
  if (!(g.cfl > 0.0) || g.cfl > max_cfl(c.model.d))
    throw InvalidArgument(fmt::format("grid.cfl = {}: need 0 < cfl <= {}", g.cfl, max_cfl(c.model.d)));
  if (g.record_every == 0) throw InvalidArgument("grid.record_every: must be >= 1");
  if (g.record_stride == 0) throw InvalidArgument("grid.record_stride: must be >= 1");
  for (double t : g.snapshots)
    if (t < 0.0 || t > g.T) throw InvalidArgument(fmt::format("grid.snapshots: {} outside [0, T = {}]", t, g.T));
  if (c.data.amplitude < 0.0)
    throw InvalidArgument(fmt::format("data.amplitude = {}: must be >= 0", c.data.amplitude));
  const auto& d = c.diagnostics;
  if (!(d.fit_lo < d.fit_hi))
    throw InvalidArgument(fmt::format("diagnostics.fit_lo = {} must be below fit_hi = {}", d.fit_lo, d.fit_hi));
  if (!(d.exterior_lo < d.exterior_hi) || d.exterior_hi > -1.0)
    throw InvalidArgument(fmt::format("diagnostics.exterior_lo/hi = {}, {}: need lo < hi <= -1", d.exterior_lo,
                                      d.exterior_hi));
  if (!(d.fit_step > 0.0)) throw InvalidArgument("diagnostics.fit_step: must be positive");
}

nlohmann::json to_json(const RunConfig& c) {
  nlohmann::json j;
  j["model"] = {{"d", c.model.d},
                {"p", c.model.p},
                {"gamma0", c.model.gamma0},
                {"epsilon", c.model.epsilon},
                {"mode", to_string(c.mode)}};
  j["data"] = {{"family", to_string(c.data.family)},
               {"amplitude", c.data.amplitude},
               {"width", c.data.width},
               {"center", c.data.center},
               {"tail_exponent", c.data.tail_exponent},
               {"velocity", to_string(c.data.velocity)}};
  j["grid"] = {{"dr", c.grid.dr},
               {"r_max", c.grid.r_max},
               {"T", c.grid.T},
               {"cfl", c.grid.cfl},
               {"record_every", c.grid.record_every},
               {"record_stride", c.grid.record_stride},
               {"causal_margin", c.grid.causal_margin},
               {"snapshots", c.grid.snapshots}};
  const auto& d = c.diagnostics;
  j["diagnostics"] = {{"suite", d.suite},
                      {"energy_tol", d.energy_tol},
                      {"audit_tol", d.audit_tol},
                      {"iled_tol", d.iled_tol},
                      {"fit_lo", d.fit_lo},
                      {"fit_hi", d.fit_hi},
                      {"fit_step", d.fit_step},
                      {"min_r_squared", d.min_r_squared},
                      {"decay_slack", d.decay_slack},
                      {"exterior_lo", d.exterior_lo},
                      {"exterior_hi", d.exterior_hi},
                      {"exterior_slack", d.exterior_slack},
                      {"plateau_times", d.plateau_times},
                      {"plateau_tol", d.plateau_tol},
                      {"flux_u_lo", d.flux_u_lo},
                      {"flux_u_hi", d.flux_u_hi},
                      {"spacetime_ratio", d.spacetime_ratio},
                      {"cauchy_times", d.cauchy_times},
                      {"cauchy_tol", d.cauchy_tol}};
  j["sweep"] = {{"p", c.sweep.p},
                {"gamma0", c.sweep.gamma0},
                {"amplitude", c.sweep.amplitude},
                {"dr", c.sweep.dr},
                {"workers", c.sweep.workers}};
  j["output"] = {{"record_csv", c.output.record_csv},
                 {"record_bin", c.output.record_bin},
                 {"checkpoint", c.output.checkpoint}};
  return j;
}

RunConfig config_from_json(const nlohmann::json& j) {
  // Round trip through the INI setters so both paths share one validation.
  std::string text;
  for (const auto& [section, body] : j.items()) {
    if (!body.is_object()) throw InvalidArgument(fmt::format("config json: section '{}' is not an object", section));
    text += "[" + section + "]\n";
    for (const auto& [key, v] : body.items()) {
      std::string s;
      if (v.is_array()) {
        s = join(v.get<std::vector<double>>());
      } else if (v.is_string()) {
        s = v.get<std::string>();
      } else if (v.is_boolean()) {
        s = v.get<bool>() ? "true" : "false";
      } else if (v.is_number_integer() || v.is_number_unsigned()) {
        s = fmt::format("{}", v.get<long>());
      } else if (v.is_number()) {
        s = fmt::format("{}", v.get<double>());
      } else {
        throw InvalidArgument(fmt::format("config json: {}.{} has unsupported type", section, key));
      }
      text += key + " = " + s + "\n";
    }
  }
  return parse_config(text);
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw Error("sha256: digest failed");
  std::string out;
  for (unsigned int k = 0; k < len; ++k) out += fmt::format("{:02x}", md[k]);
  return out;
}

std::string config_hash(const RunConfig& c) { return sha256_hex(to_json(c).dump()); }

std::size_t resolve_workers(std::size_t configured) {
  if (const char* env = std::getenv("NLWLAB_WORKERS"); env && *env) {
    const long v = parse_int("NLWLAB_WORKERS", env);
    if (v < 1) throw InvalidArgument(fmt::format("NLWLAB_WORKERS = {}: must be >= 1", v));
    return static_cast<std::size_t>(v);
  }
  if (configured > 0) return configured;
  return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

}  // namespace nlwlab
