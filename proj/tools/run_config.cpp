#include "run_config.hpp"

#include <set>

#include "hypervekua/io.hpp"

namespace hypervekua::cli {

namespace {

using nlohmann::json;

void reject_unknown(const json& j, const std::set<std::string>& known, const std::string& where) {
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) throw ConfigInvalid("unknown key '" + key + "' in " + where);
  }
}

template <typename T>
T get(const json& j, const char* key, const std::string& where) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigInvalid(where + "." + key + ": " + e.what());
  } catch (const FormatError& e) {
    throw ConfigInvalid(where + "." + key + ": " + e.what());
  }
}

std::pair<double, double> get_range(const json& j, const char* key, const std::string& where) {
  const auto v = get<std::vector<double>>(j, key, where);
  if (v.size() != 2) throw ConfigInvalid(where + "." + key + " must be [lo, hi]");
  return {v[0], v[1]};
}

std::complex<double> get_complex(const json& j, const char* key, const std::string& where) {
  const hnum z = get<hnum>(j, key, where);
  return {z.re, z.im};
}

json complex_json(const std::complex<double>& c) { return json::array({c.real(), c.imag()}); }

}  // namespace

RunConfig RunConfig::from_json(const json& j, const std::filesystem::path& base_dir) {
  if (!j.is_object()) throw ConfigInvalid("configuration must be a JSON object");
  reject_unknown(j,
                 {"potential", "domain", "center", "coefficient", "m", "exponents", "path",
                  "fd_step", "tolerances", "spectral", "out"},
                 "config");
  RunConfig c;
  c.base_dir = base_dir;
  if (j.contains("potential")) c.potential = get<std::string>(j, "potential", "config");
  if (j.contains("domain")) {
    const json& d = j.at("domain");
    reject_unknown(d, {"x", "t", "nx", "nt", "time_like"}, "domain");
    GridDomain g = c.domain;
    if (d.contains("x")) std::tie(g.x_min, g.x_max) = get_range(d, "x", "domain");
    if (d.contains("t")) std::tie(g.t_min, g.t_max) = get_range(d, "t", "domain");
    if (d.contains("nx")) g.nx = get<int>(d, "nx", "domain");
    if (d.contains("nt")) g.nt = get<int>(d, "nt", "domain");
    if (d.contains("time_like")) g.time_like = get<bool>(d, "time_like", "domain");
    try {
      c.domain = GridDomain::make(g.x_min, g.x_max, g.t_min, g.t_max, g.nx, g.nt, g.time_like);
    } catch (const InvalidArgument& e) {
      throw ConfigInvalid(std::string("domain: ") + e.what());
    }
  }
  if (j.contains("center")) c.center = get<hnum>(j, "center", "config");
  if (j.contains("coefficient")) c.coefficient = get<hnum>(j, "coefficient", "config");
  if (j.contains("m")) c.m = get<int>(j, "m", "config");
  if (j.contains("exponents")) {
    const auto e = get<std::vector<int>>(j, "exponents", "config");
    if (e.size() != 2) throw ConfigInvalid("config.exponents must be [n_min, n_max]");
    c.n_min = e[0];
    c.n_max = e[1];
  }
  if (j.contains("path")) {
    const auto p = get<std::string>(j, "path", "config");
    if (p == "straight") {
      c.path = PathKind::straight;
    } else if (p == "l_path") {
      c.path = PathKind::l_path;
    } else {
      throw ConfigInvalid("config.path must be \"straight\" or \"l_path\"");
    }
  }
  if (j.contains("fd_step")) c.fd_step = get<double>(j, "fd_step", "config");
  if (j.contains("tolerances")) {
    const json& t = j.at("tolerances");
    reject_unknown(t, {"residual", "closed_form", "integration", "drift"}, "tolerances");
    if (t.contains("residual")) c.tol.residual = get<double>(t, "residual", "tolerances");
    if (t.contains("closed_form")) c.tol.closed_form = get<double>(t, "closed_form", "tolerances");
    if (t.contains("integration")) c.tol.integration = get<double>(t, "integration", "tolerances");
    if (t.contains("drift")) c.tol.drift = get<double>(t, "drift", "tolerances");
  }
  if (j.contains("spectral")) {
    const json& s = j.at("spectral");
    reject_unknown(s, {"k", "x", "step", "n1", "n2"}, "spectral");
    if (s.contains("k")) c.spectral.k = get<std::vector<double>>(s, "k", "spectral");
    if (s.contains("x")) std::tie(c.spectral.x_min, c.spectral.x_max) = get_range(s, "x", "spectral");
    if (s.contains("step")) c.spectral.step = get<double>(s, "step", "spectral");
    if (s.contains("n1")) c.spectral.n1 = get_complex(s, "n1", "spectral");
    if (s.contains("n2")) c.spectral.n2 = get_complex(s, "n2", "spectral");
  }
  if (j.contains("out")) c.out = base_dir / get<std::string>(j, "out", "config");
  return c;
}

RunConfig RunConfig::load(const std::filesystem::path& file) {
  std::string text;
  try {
    text = read_file(file);
  } catch (const std::exception& e) {
    throw ConfigInvalid("cannot read config '" + file.string() + "': " + e.what());
  }
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigInvalid("config '" + file.string() + "' is not valid JSON: " + e.what());
  }
  const auto dir = file.has_parent_path() ? file.parent_path() : std::filesystem::path(".");
  return from_json(j, dir);
}

json RunConfig::to_json() const {
  return {
      {"potential", potential},
      {"domain",
       {{"x", {domain.x_min, domain.x_max}},
        {"t", {domain.t_min, domain.t_max}},
        {"nx", domain.nx},
        {"nt", domain.nt},
        {"time_like", domain.time_like}}},
      {"center", center},
      {"coefficient", coefficient},
      {"m", m},
      {"exponents", {n_min, n_max}},
      {"path", path == PathKind::straight ? "straight" : "l_path"},
      {"fd_step", fd_step},
      {"tolerances",
       {{"residual", tol.residual},
        {"closed_form", tol.closed_form},
        {"integration", tol.integration},
        {"drift", tol.drift}}},
      {"spectral",
       {{"k", spectral.k},
        {"x", {spectral.x_min, spectral.x_max}},
        {"step", spectral.step},
        {"n1", complex_json(spectral.n1)},
        {"n2", complex_json(spectral.n2)}}},
      {"out", out.string()},
  };
}

void RunConfig::validate() const {
  for (const auto& [name, v] : {std::pair{"residual", tol.residual}, {"closed_form", tol.closed_form},
                                {"integration", tol.integration}, {"drift", tol.drift},
                                {"fd_step", fd_step}, {"spectral.step", spectral.step}}) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw ConfigInvalid(std::string(name) + " must be positive, got " + format_real(v));
    }
  }
  if (n_min < 0 || n_max < n_min) throw ConfigInvalid("exponents must satisfy 0 <= n_min <= n_max");
  if (!(spectral.x_min < spectral.x_max)) throw ConfigInvalid("spectral.x must satisfy lo < hi");
  if (potential.empty()) throw ConfigInvalid("potential must be non-empty");
}

FormalPowerOptions RunConfig::power_options() const {
  FormalPowerOptions o;
  o.path = path;
  o.tol = tol.integration;
  return o;
}

}  // namespace hypervekua::cli
