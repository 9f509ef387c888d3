#include "commands.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <iostream>
#include <optional>
#include <sstream>

#include "hypervekua/io.hpp"
#include "hypervekua/parallel.hpp"
#include "hypervekua/zakharov_shabat.hpp"
#include "suite.hpp"

namespace hypervekua::cli {

namespace {

using nlohmann::json;

constexpr double kSuccessorTolerance = 1e-10;
constexpr double kPeriodTolerance = 1e-12;

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string cell(double v) { return std::isfinite(v) ? format_real(v) : std::string(); }

/// Rows of comma-separated cells under a fixed header.
class Csv {
 public:
  explicit Csv(std::string header) : text_(std::move(header) + "\n") {}
  void row(std::initializer_list<double> values) {
    bool first = true;
    for (double v : values) {
      if (!first) text_ += ',';
      text_ += cell(v);
      first = false;
    }
    text_ += '\n';
  }
  const std::string& text() const { return text_; }

 private:
  std::string text_;
};

Potential load_potential(const RunConfig& c) { return Potential::parse(c.potential, c.base_dir); }

json input_hashes(const RunConfig& c) {
  json h = {{"config", git_blob_hash(c.to_json().dump())}};
  constexpr std::string_view kTable = "table:";
  if (c.potential.rfind(kTable, 0) == 0) {
    std::filesystem::path table(c.potential.substr(kTable.size()));
    if (table.is_relative()) table = c.base_dir / table;
    h["potential_table"] = git_blob_hash(read_file(table));
  }
  return h;
}

void write_summary(const RunConfig& c, const std::string& command, json results, bool passed) {
  json summary = {
      {"command", command},
      {"config", c.to_json()},
      {"input_hash", input_hashes(c)},
      {"timestamp", utc_timestamp()},
      {"results", std::move(results)},
      {"passed", passed},
  };
  write_file_atomic(c.out / "summary.json", summary.dump(2) + "\n");
  std::cout << (passed ? "all checks passed" : "CHECKS FAILED") << "; summary: "
            << (c.out / "summary.json").string() << "\n";
}

void require_center(const RunConfig& c) {
  if (!c.domain.contains(c.center)) {
    std::ostringstream msg;
    msg << "center " << c.center << " lies outside the domain [" << c.domain.x_min << ", "
        << c.domain.x_max << "] x [" << c.domain.t_min << ", " << c.domain.t_max << "]";
    throw CenterOutOfDomain(msg.str());
  }
}

std::string stem(const char* kind, int m, int n) {
  return std::string(kind) + "_m" + std::to_string(m) + "_n" + std::to_string(n);
}

bool has_closed_form(int m, int n) { return m % 2 == 0 ? n <= 2 : n <= 1; }

json grid_json(const GridDomain& g) {
  return {{"x", {g.x_min, g.x_max}}, {"t", {g.t_min, g.t_max}}, {"nx", g.nx}, {"nt", g.nt},
          {"time_like", g.time_like}};
}

std::string k_label(double k) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", k);
  return buf;
}

}  // namespace

bool cmd_powers(const Context& ctx) {
  const RunConfig& c = ctx.config;
  require_center(c);
  const Potential p = load_potential(c);
  const auto seq = zs_sequence(p, c.domain);
  const auto opts = c.power_options();
  const GridDomain& grid = c.domain;

  bool passed = true;
  json results = json::array();
  for (int n = c.n_min; n <= c.n_max; ++n) {
    const FormalPowerSpec spec{c.m, n, c.coefficient, c.center};
    const auto values = formal_power_table(spec, grid, seq, opts, ctx.threads);
    const auto field = formal_power_field(spec, seq, opts, c.fd_step);
    const bool closed = has_closed_form(c.m, n);

    std::vector<hnum> closed_values(grid.size(), hnum{NAN, NAN});
    std::vector<double> residual(grid.size());
    std::vector<double> rederived(grid.size(), 0.0);
    parallel_for(grid.size(), ctx.threads, [&](std::size_t i) {
      const hnum z = grid.node(i);
      residual[i] = max_norm(vekua_residual(field, seq.pair(c.m), z));
      if (!closed) return;
      try {
        closed_values[i] = closed_form_power(p, c.m, n, c.coefficient, c.center, z);
      } catch (const CenterSingular&) {
      }
      if (n == 2) {
        rederived[i] = max_norm(
            closed_form_power(p, c.m, n, c.coefficient, c.center, z, ClosedFormVariant::rederived) -
            values[i]);
      }
    });

    Csv csv("x,t,re,im,closed_re,closed_im,residual");
    double max_residual = 0, max_closed = 0, max_rederived = 0;
    int singular = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const hnum z = grid.node(i);
      csv.row({z.re, z.im, values[i].re, values[i].im, closed_values[i].re, closed_values[i].im,
               residual[i]});
      max_residual = std::max(max_residual, residual[i]);
      if (closed) {
        if (std::isfinite(closed_values[i].re)) {
          max_closed = std::max(max_closed, max_norm(closed_values[i] - values[i]));
        } else {
          ++singular;
        }
        max_rederived = std::max(max_rederived, rederived[i]);
      }
    }
    const std::string name = stem("powers", c.m, n);
    write_file_atomic(c.out / (name + ".csv"), csv.text());
    write_file_atomic(c.out / (name + ".json"),
                      json{{"m", c.m},
                           {"n", n},
                           {"a", c.coefficient},
                           {"z0", c.center},
                           {"potential", c.potential},
                           {"path", c.to_json()["path"]},
                           {"tolerances", c.to_json()["tolerances"]},
                           {"fd_step", c.fd_step},
                           {"domain", grid_json(grid)},
                           {"table", name + ".csv"}}
                              .dump(2) + "\n");

    const bool residual_ok = max_residual <= c.tol.residual;
    json entry = {{"m", c.m}, {"n", n}, {"file", name + ".csv"}, {"max_residual", max_residual},
                  {"residual_pass", residual_ok}};
    bool entry_ok = residual_ok;
    if (closed) {
      json cf = {{"variant", "as_printed"}, {"max_discrepancy", max_closed}};
      if (n <= 1) {
        cf["checked"] = true;
        cf["pass"] = max_closed <= c.tol.closed_form;
        entry_ok = entry_ok && max_closed <= c.tol.closed_form;
      } else {
        cf["checked"] = false;
        cf["singular_nodes"] = singular;
        cf["rederived_max_discrepancy"] = max_rederived;
      }
      entry["closed_form"] = cf;
    }
    passed = passed && entry_ok;
    results.push_back(entry);
    std::printf("powers m=%d n=%d: max residual %.3e (tol %.1e)", c.m, n, max_residual,
                c.tol.residual);
    if (closed && n <= 1) std::printf(", closed-form discrepancy %.3e", max_closed);
    if (closed && n == 2) {
      std::printf(", printed closed form differs by %.3e (reported, not checked), rederived %.1e",
                  max_closed, max_rederived);
    }
    std::printf(" -> %s\n", entry_ok ? "ok" : "FAIL");
  }
  write_summary(c, "powers", results, passed);
  return passed;
}

bool cmd_modes(const Context& ctx) {
  const RunConfig& c = ctx.config;
  require_center(c);
  const Potential p = load_potential(c);
  const auto seq = zs_sequence(p, c.domain);
  const auto opts = c.power_options();
  const GridDomain& grid = c.domain;
  // Odd-index powers solve the transport system with s replaced by -s.
  const Potential residual_potential =
      c.m % 2 == 0 ? p
                   : Potential::custom([p](double x) { return -p.s(x); }, grid.x_min - 1.0,
                                       grid.x_max + 1.0, "-(" + p.description() + ")");

  bool passed = true;
  json results = json::array();
  for (int n = c.n_min; n <= c.n_max; ++n) {
    const FormalPowerSpec spec{c.m, n, c.coefficient, c.center};
    const ModeField modes = W_to_modes(formal_power_field(spec, seq, opts, c.fd_step));
    std::vector<std::array<double, 4>> rows(grid.size());
    parallel_for(grid.size(), ctx.threads, [&](std::size_t i) {
      const hnum z = grid.node(i);
      const auto r = zs_residual(modes, residual_potential, z, c.fd_step);
      rows[i] = {modes.n_plus(z.re, z.im), modes.n_minus(z.re, z.im), r.r1, r.r2};
    });
    Csv csv("x,t,n_plus,n_minus,r1,r2");
    double max_residual = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const hnum z = grid.node(i);
      csv.row({z.re, z.im, rows[i][0], rows[i][1], rows[i][2], rows[i][3]});
      max_residual = std::max({max_residual, std::abs(rows[i][2]), std::abs(rows[i][3])});
    }
    const std::string name = stem("modes", c.m, n);
    write_file_atomic(c.out / (name + ".csv"), csv.text());
    const bool ok = max_residual <= c.tol.residual;
    passed = passed && ok;
    results.push_back({{"m", c.m}, {"n", n}, {"file", name + ".csv"},
                       {"max_residual", max_residual}, {"pass", ok}});
    std::printf("modes m=%d n=%d: max transport residual %.3e (tol %.1e) -> %s\n", c.m, n,
                max_residual, c.tol.residual, ok ? "ok" : "FAIL");
  }
  write_summary(c, "modes", results, passed);
  return passed;
}

bool cmd_spectral(const Context& ctx) {
  const RunConfig& c = ctx.config;
  const auto& sc = c.spectral;
  if (sc.k.empty()) throw ConfigInvalid("spectral.k must list at least one wave number");
  const GridDomain& grid = c.domain;
  if (grid.x_min - c.fd_step < sc.x_min || grid.x_max + c.fd_step > sc.x_max) {
    throw ConfigInvalid("domain x-range (plus one difference step) must lie inside spectral.x");
  }
  const Potential p = load_potential(c);
  SpectralOptions so;
  so.step = sc.step;
  so.drift_tolerance = c.tol.drift;

  const std::size_t count = sc.k.size();
  std::vector<std::optional<SpectralState>> states(count);
  std::vector<std::optional<DetailedError>> errors(count);
  parallel_for(count, ctx.threads, [&](std::size_t i) {
    try {
      states[i] = spectral_solve(p, sc.k[i], sc.x_min, sc.x_max, sc.n1, sc.n2, so);
    } catch (const Error& e) {
      errors[i].emplace(e, json{{"k", sc.k[i]}});
    }
  });
  for (auto& e : errors) {
    if (e) throw *e;
  }

  bool passed = true;
  json results = json::array();
  for (std::size_t i = 0; i < count; ++i) {
    const SpectralState& st = *states[i];
    const std::string label = "spectral_k" + k_label(sc.k[i]);

    Csv profile("x,n1_re,n1_im,n2_re,n2_im,abs_n1,abs_n2,energy");
    for (std::size_t q = 0; q < st.x.size(); ++q) {
      profile.row({st.x[q], st.n1[q].real(), st.n1[q].imag(), st.n2[q].real(), st.n2[q].imag(),
                   std::abs(st.n1[q]), std::abs(st.n2[q]),
                   std::norm(st.n1[q]) + std::norm(st.n2[q])});
    }
    write_file_atomic(c.out / (label + ".csv"), profile.text());

    const ModeField modes = st.lift();
    std::vector<ZsResidual> r(grid.size());
    parallel_for(grid.size(), ctx.threads,
                 [&](std::size_t q) { r[q] = zs_residual(modes, p, grid.node(q), c.fd_step); });
    Csv bridge("x,t,r1,r2");
    double max_bridge = 0;
    for (std::size_t q = 0; q < grid.size(); ++q) {
      const hnum z = grid.node(q);
      bridge.row({z.re, z.im, r[q].r1, r[q].r2});
      max_bridge = std::max({max_bridge, std::abs(r[q].r1), std::abs(r[q].r2)});
    }
    write_file_atomic(c.out / (label + "_bridge.csv"), bridge.text());

    const bool ok = max_bridge <= c.tol.residual && st.drift_per_unit_x <= c.tol.drift;
    passed = passed && ok;
    results.push_back({{"k", sc.k[i]},
                       {"profile", label + ".csv"},
                       {"bridge", label + "_bridge.csv"},
                       {"drift_per_unit_x", st.drift_per_unit_x},
                       {"max_bridge_residual", max_bridge},
                       {"pass", ok}});
    std::printf("spectral k=%s: drift %.3e per unit x, bridge residual %.3e (tol %.1e) -> %s\n",
                k_label(sc.k[i]).c_str(), st.drift_per_unit_x, max_bridge, c.tol.residual,
                ok ? "ok" : "FAIL");
  }
  write_summary(c, "spectral", results, passed);
  return passed;
}

bool cmd_sequence(const Context& ctx) {
  const RunConfig& c = ctx.config;
  const Potential p = load_potential(c);
  const auto seq = zs_sequence(p, c.domain);
  const GridDomain& grid = c.domain;

  bool passed = true;
  json results = json::array();
  for (int m = c.m; m < c.m + 2; ++m) {
    const GeneratingPair& pair = seq.pair(m);
    const std::string name = "pair_m" + std::to_string(m);
    std::ostringstream f_csv, g_csv;
    write_field_csv(f_csv, pair.F(), grid);
    write_field_csv(g_csv, pair.G(), grid);
    write_file_atomic(c.out / (name + "_F.csv"), f_csv.str());
    write_file_atomic(c.out / (name + "_G.csv"), g_csv.str());

    std::vector<CoefficientValues> coeff(grid.size());
    parallel_for(grid.size(), ctx.threads,
                 [&](std::size_t i) { coeff[i] = pair.coefficients(grid.node(i)); });
    Csv csv("x,t,a_re,a_im,b_re,b_im,A_re,A_im,B_re,B_im");
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const hnum z = grid.node(i);
      const auto& k = coeff[i];
      csv.row({z.re, z.im, k.a.re, k.a.im, k.b.re, k.b.im, k.A.re, k.A.im, k.B.re, k.B.im});
    }
    write_file_atomic(c.out / (name + "_coefficients.csv"), csv.text());
    write_file_atomic(c.out / (name + ".json"),
                      json{{"pair", pair.label()},
                           {"m", m},
                           {"potential", c.potential},
                           {"domain", grid_json(grid)},
                           {"F", name + "_F.csv"},
                           {"G", name + "_G.csv"},
                           {"coefficients", name + "_coefficients.csv"}}
                              .dump(2) + "\n");

    const bool successor = is_successor(pair, seq.pair(m + 1), kSuccessorTolerance);
    const bool period = check_period(seq, m, kPeriodTolerance);
    passed = passed && successor && period;
    results.push_back({{"m", m},
                       {"manifest", name + ".json"},
                       {"successor_of_next", successor},
                       {"successor_tolerance", kSuccessorTolerance},
                       {"period_2", period},
                       {"period_tolerance", kPeriodTolerance}});
    std::printf("sequence m=%d: successor %s, period-2 %s\n", m, successor ? "ok" : "FAIL",
                period ? "ok" : "FAIL");
  }
  write_summary(c, "sequence", results, passed);
  return passed;
}

bool cmd_check(const Context& ctx) {
  const RunConfig& c = ctx.config;
  json results = json::array();
  bool passed = true;
  suite::run_all([&](const suite::Result& r) {
    std::printf("%s\n", suite::format_line(r).c_str());
    std::fflush(stdout);
    passed = passed && r.pass;
    results.push_back({{"criterion", r.id},
                       {"title", r.title},
                       {"pass", r.pass},
                       {"detail", r.detail},
                       {"seconds", r.seconds},
                       {"limit_seconds", r.limit_seconds}});
  });
  write_summary(c, "check", results, passed);
  return passed;
}

}  // namespace hypervekua::cli
