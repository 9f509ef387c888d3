#include "suite.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>

#include "hypervekua/formal_powers.hpp"
#include "hypervekua/zakharov_shabat.hpp"

namespace hypervekua::suite {

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Shared fixture: coefficient and center used wherever a criterion leaves them open.
const hnum kA{0.7, -0.4};
const hnum kZ0{0.3, 0.6};

std::string fmt(const char* format, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, format, a, b, c, d);
  return buf;
}

std::vector<hnum> grid_points(double lo_x, double hi_x, double lo_t, double hi_t, int n) {
  std::vector<hnum> pts;
  const GridDomain g = GridDomain::make(lo_x, hi_x, lo_t, hi_t, n, n);
  for (std::size_t k = 0; k < g.size(); ++k) pts.push_back(g.node(k));
  return pts;
}

// Residual fixture for criterion 4: interior points away from the center.
const std::vector<hnum> kResidualPoints{{0.7, 1.1}, {0.5, 0.9}, {0.9, 0.4}, {0.1, 1.3}};

Outcome classical_degeneration() {
  const auto seq = zs_sequence(Potential::zero());
  const GridDomain grid = GridDomain::make(0.1, 1.0, 0.1, 1.0, 41, 41);
  double worst = 0;
  for (int n = 0; n <= 5; ++n) {
    const auto values = formal_power_table({0, n, hnum{1.0}, {}}, grid, seq);
    for (std::size_t k = 0; k < grid.size(); ++k) {
      worst = std::max(worst, max_norm(values[k] - pow(grid.node(k), n)));
    }
  }
  return {worst <= 1e-8, fmt("max |Z^(n) - z^n| = %.2e (tol 1e-8)", worst)};
}

Outcome pair_identities() {
  double identity = 0, coeff = 0;
  for (const char* spec : {"const:1", "sech:1:1"}) {
    const Potential p = Potential::parse(spec);
    const auto pair = zs_pair(p, 0);
    for (int i = 0; i < 101; ++i) {
      const hnum z{-0.9 + 2.8 * i / 100.0, 1.9 - 2.8 * i / 100.0};
      const hnum F = pair.F()(z), G = pair.G()(z);
      identity = std::max({identity, std::abs((conj(F) * G).im - 1.0),
                           max_norm(F * F + G * G - hnum{2.0}),
                           max_norm(F * conj(F) + G * conj(G))});
      const auto c = pair.coefficients(z);
      const hnum half_sj{0.0, p.s(z.re) / 2};
      coeff = std::max({coeff, max_norm(c.A), max_norm(c.B + half_sj)});
    }
  }
  return {identity <= 1e-12 && coeff <= 1e-12,
          fmt("identities %.2e, |A|,|B+sj/2| %.2e (tol 1e-12)", identity, coeff)};
}

Outcome successor_period() {
  const Potential p = Potential::sech(1, 1);
  const auto seq = zs_sequence(p);
  bool successors = true;
  for (int m = 0; m <= 3; ++m) successors = successors && is_successor(seq.pair(m), seq.pair(m + 1), 1e-10);
  double period = 0;
  for (int m = 0; m <= 3; ++m) {
    for (const hnum& z : seq.pair(m).domain().interior_lattice(9)) {
      const auto c1 = seq.pair(m).coefficients(z);
      const auto c2 = seq.pair(m + 2).coefficients(z);
      period = std::max({period, max_norm(c1.a - c2.a), max_norm(c1.b - c2.b),
                         max_norm(c1.A - c2.A), max_norm(c1.B - c2.B)});
    }
  }
  return {successors && period <= 1e-12,
          std::string("successors m=0..3 ") + (successors ? "hold" : "FAIL") +
              fmt(", period mismatch %.2e (tol 1e-12)", period)};
}

Outcome residual_convergence() {
  const Potential p = Potential::sech(1, 1);
  const auto seq = zs_sequence(p);
  bool ok = true;
  std::string detail;
  for (int n : {1, 2}) {
    std::vector<double> res;
    for (double h : {4e-3, 2e-3, 1e-3}) {
      const auto W = formal_power_field({0, n, kA, kZ0}, seq, {}, h);
      double r = 0;
      for (const hnum& z : kResidualPoints) r = std::max(r, max_norm(vekua_zs_residual(W, p, z)));
      res.push_back(r);
    }
    const double q1 = res[0] / res[1], q2 = res[1] / res[2];
    ok = ok && q1 >= 3.5 && q1 <= 4.5 && q2 >= 3.5 && q2 <= 4.5 && res[2] <= 5e-5;
    detail += fmt("Z^(%g): ratios %.3f %.3f, r(1e-3) %.2e; ", n, q1, q2, res[2]);
  }
  return {ok, detail + "(band [3.5,4.5], tol 5e-5)"};
}

Outcome closed_form_crosscheck() {
  bool ok = true;
  std::string detail;
  for (const char* spec : {"const:1", "sech:1:1"}) {
    const Potential p = Potential::parse(spec);
    const auto seq = zs_sequence(p);
    double d0 = 0, d1 = 0, d2_printed = 0, d2_rederived = 0;
    int singular = 0;
    for (const hnum& z : grid_points(0.0, 1.0, 0.0, 1.0, 21)) {
      for (int m : {0, 1}) {
        d0 = std::max(d0, max_norm(closed_form_power(p, m, 0, kA, kZ0, z) -
                                   formal_power({m, 0, kA, kZ0}, z, seq)));
        d1 = std::max(d1, max_norm(closed_form_power(p, m, 1, kA, kZ0, z) -
                                   formal_power({m, 1, kA, kZ0}, z, seq)));
      }
      const hnum generic2 = formal_power({0, 2, kA, kZ0}, z, seq);
      d2_rederived = std::max(
          d2_rederived,
          max_norm(closed_form_power(p, 0, 2, kA, kZ0, z, ClosedFormVariant::rederived) - generic2));
      try {
        d2_printed = std::max(d2_printed, max_norm(closed_form_power(p, 0, 2, kA, kZ0, z) - generic2));
      } catch (const CenterSingular&) {
        ++singular;
      }
    }
    ok = ok && d0 <= 1e-12 && d1 <= 1e-6;
    detail += std::string(spec) +
              fmt(": Z0 %.1e, Z1 %.1e, Z2 printed %.3f / rederived %.1e", d0, d1, d2_printed,
                  d2_rederived) +
              " (" + std::to_string(singular) + " nodes on x = x0); ";
  }
  return {ok, detail + "(tol Z0 1e-12, Z1 1e-6; Z2 reported)"};
}

// Sup of the normalized deviation over the max-norm circle |z - z0|_max = r.
double deviation_at_radius(int n, double r, const GeneratingSequence& seq) {
  double worst = 0;
  constexpr int kPerSide = 16;
  for (int side = 0; side < 4; ++side) {
    for (int i = 0; i < kPerSide; ++i) {
      const double s = -1.0 + 2.0 * i / kPerSide;
      const hnum dir = side == 0 ? hnum{1.0, s} : side == 1 ? hnum{-s, 1.0}
                     : side == 2 ? hnum{-1.0, -s} : hnum{s, -1.0};
      worst = std::max(worst, asymptotic_deviation({0, n, kA, kZ0}, kZ0 + r * dir, seq));
    }
  }
  return worst;
}

Outcome formal_power_properties() {
  const Potential p = Potential::sech(1, 1);
  const auto seq = zs_sequence(p);
  const auto points = grid_points(0.0, 1.0, 0.2, 1.2, 5);

  double linearity = 0;
  for (int n : {0, 1, 2, 3}) {
    for (const hnum& z : points) {
      const hnum lhs = formal_power({0, n, kA, kZ0}, z, seq);
      const hnum rhs = kA.re * formal_power({0, n, hnum{1.0}, kZ0}, z, seq) +
                       kA.im * formal_power({0, n, hnum::j(), kZ0}, z, seq);
      linearity = std::max(linearity, max_norm(lhs - rhs));
    }
  }

  double relation = 0;
  for (int n : {1, 2, 3}) {
    const auto Z = formal_power_field({0, n, kA, kZ0}, seq, {}, 1e-3);
    for (const hnum& z : kResidualPoints) {
      relation = std::max(relation, max_norm(fg_derivative(Z, seq.pair(0), z) -
                                             double(n) * formal_power({1, n - 1, kA, kZ0}, z, seq)));
    }
  }

  double worst_ratio = 0;
  for (int n : {1, 2}) {
    worst_ratio =
        std::max(worst_ratio, deviation_at_radius(n, 1e-2, seq) / deviation_at_radius(n, 1e-1, seq));
  }
  return {linearity <= 1e-10 && relation <= 5e-5 && worst_ratio <= 0.1,
          fmt("(ii) %.1e (tol 1e-10), (iii) %.1e (tol 5e-5), (iv) ratio %.4f (max 0.1)", linearity,
              relation, worst_ratio)};
}

Outcome integral_theorems() {
  const Potential p = Potential::sech(1, 1);
  const auto seq = zs_sequence(p);
  const auto Z1 = formal_power_field({0, 1, kA, kZ0}, seq, {}, 1e-4);

  // Z_0^(1) solves the Vekua equation of pair 0, so it is integrable with respect to
  // the predecessor pair -1 = pair 1.
  const auto loop = Polyline::rectangle({0.1, 0.3}, 0.7, 0.6);
  const double closed = max_norm(fg_integral(Z1, loop, seq.pair(-1)));
  const double closed_tol = 1e-6 * loop.length();

  const auto& pair = seq.pair(0);
  const auto wdot = [&](const hnum& z) { return fg_derivative(Z1, pair, z); };
  std::mt19937_64 rng(20240917);
  std::uniform_real_distribution<double> coord(-0.5, 1.5);
  double identity = 0;
  for (int i = 0; i < 10; ++i) {
    const hnum z0{coord(rng), coord(rng)};
    const hnum z1{coord(rng), coord(rng)};
    const auto d = decompose(Z1, pair, z0);
    const hnum lhs = fg_integral(wdot, Polyline::segment(z0, z1), pair) + d.phi * pair.F()(z1) +
                     d.psi * pair.G()(z1);
    identity = std::max(identity, max_norm(lhs - Z1(z1)));
  }
  return {closed <= closed_tol && identity <= 1e-6,
          fmt("closed loop %.2e (tol %.1e), antiderivative identity %.2e (tol 1e-6)", closed,
              closed_tol, identity)};
}

Outcome fourier_bridge() {
  const Potential p = Potential::sech(1, 1);
  double residual = 0, drift = 0;
  for (double k : {0.5, 1.0, 2.0}) {
    const auto st = spectral_solve(p, k, -1.0, 2.0, {1.0, 0.2}, {-0.3, 0.8});
    drift = std::max(drift, st.drift_per_unit_x);
    const ModeField modes = st.lift();
    for (const hnum& z : grid_points(-0.9, 1.9, -1.0, 1.0, 9)) {
      const auto r = zs_residual(modes, p, z, 1e-3);
      residual = std::max({residual, std::abs(r.r1), std::abs(r.r2)});
    }
  }
  return {residual <= 1e-4 && drift <= 1e-8,
          fmt("residual %.2e (tol 1e-4), drift %.2e per unit x (tol 1e-8)", residual, drift)};
}

Outcome mode_round_trip() {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> d(-2.0, 2.0);
  double round_trip = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const double c1 = d(rng), c2 = d(rng), c3 = d(rng), c4 = d(rng);
    const ModeField modes{[=](double x, double t) { return c1 * std::sin(c2 * x + t); },
                          [=](double x, double t) { return c3 * std::exp(-x * x) + c4 * t; }};
    const ModeField back = W_to_modes(modes_to_W(modes));
    for (int i = 0; i < 25; ++i) {
      const double x = d(rng), t = d(rng);
      round_trip = std::max({round_trip, std::abs(back.n_plus(x, t) - modes.n_plus(x, t)),
                             std::abs(back.n_minus(x, t) - modes.n_minus(x, t))});
    }
  }

  const Potential p = Potential::sech(1, 1);
  const auto seq = zs_sequence(p);
  const auto W = formal_power_field({0, 1, kA, kZ0}, seq, {}, 1e-3);
  const ModeField modes = W_to_modes(W);
  double agreement = 0;
  for (const hnum& z : grid_points(-0.5, 1.5, -0.5, 1.5, 7)) {
    agreement = std::max(
        agreement, max_norm(recombine(zs_residual(modes, p, z, 1e-3)) - vekua_zs_residual(W, p, z)));
  }
  return {round_trip <= 1e-15 && agreement <= 1e-12,
          fmt("round trip %.1e (tol 1e-15), residual recombination %.1e (tol 1e-12)", round_trip,
              agreement)};
}

struct Criterion {
  int id;
  const char* title;
  double limit_seconds;
  Outcome (*run)();
};

constexpr Criterion kCriteria[] = {
    {1, "classical degeneration", 5, classical_degeneration},
    {2, "pair identities", 1, pair_identities},
    {3, "successor and period", 1, successor_period},
    {4, "Vekua residual convergence", 30, residual_convergence},
    {5, "closed-form cross-check", 20, closed_form_crosscheck},
    {6, "formal-power properties", 20, formal_power_properties},
    {7, "integral theorems", 10, integral_theorems},
    {8, "Fourier bridge", 5, fourier_bridge},
    {9, "mode round trip", 2, mode_round_trip},
};

}  // namespace

std::vector<Result> run_all(const std::function<void(const Result&)>& on_result) {
  std::vector<Result> results;
  for (const Criterion& c : kCriteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const Error& e) {
      out = {false, e.code() + ": " + e.what()};
    } catch (const std::exception& e) {
      out = {false, e.what()};
    }
    Result r;
    r.id = c.id;
    r.title = c.title;
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    r.limit_seconds = c.limit_seconds;
    r.pass = out.pass && r.seconds < c.limit_seconds;
    r.detail = out.detail;
    if (on_result) on_result(r);
    results.push_back(std::move(r));
  }
  return results;
}

std::string format_line(const Result& r) {
  char head[96];
  std::snprintf(head, sizeof head, "%s  %d. %-28s ", r.pass ? "PASS" : "FAIL", r.id, r.title.c_str());
  char tail[64];
  std::snprintf(tail, sizeof tail, " [%.2f s, limit %.0f s]", r.seconds, r.limit_seconds);
  return head + r.detail + tail;
}

}  // namespace hypervekua::suite
