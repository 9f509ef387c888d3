#include "hypervekua/formal_powers.hpp"

#include <cmath>
#include <sstream>

#include "hypervekua/parallel.hpp"

namespace hypervekua {

Decomposition z0_coefficients(const hnum& a, const hnum& z0, const GeneratingPair& pair) {
  return decompose(a, pair, z0);
}

namespace {

Polyline power_path(const hnum& z0, const hnum& z, PathKind kind) {
  return kind == PathKind::straight ? Polyline::segment(z0, z) : Polyline::l_path(z0, z);
}

// One evaluation of the recursion on a fixed node set.
hnum evaluate_on(const PathDiscretization& disc, const FormalPowerSpec& spec, const hnum& z,
                 const GeneratingSequence& seq) {
  const std::size_t count = disc.size();
  const auto nodes = disc.nodes();
  std::vector<hnum> values(count), g_star(count), f_star(count), c1(count), c2(count);
  std::vector<hnum> F(count), G(count);

  auto load_pair = [&](const GeneratingPair& pair) {
    for (std::size_t i = 0; i < count; ++i) {
      F[i] = pair.F()(nodes[i]);
      G[i] = pair.G()(nodes[i]);
    }
  };

  // Level 0 lives on pair m + n.
  {
    const GeneratingPair& pair = seq.pair(spec.m + spec.n);
    const Decomposition lm = z0_coefficients(spec.a, spec.z0, pair);
    load_pair(pair);
    for (std::size_t i = 0; i < count; ++i) values[i] = lm.phi * F[i] + lm.psi * G[i];
  }

  for (int k = 1; k <= spec.n; ++k) {
    const GeneratingPair& pair = seq.pair(spec.m + spec.n - k);
    load_pair(pair);
    for (std::size_t i = 0; i < count; ++i) {
      const hnum Dinv = inverse(F[i] * conj(G[i]) - conj(F[i]) * G[i]);
      g_star[i] = 2.0 * conj(G[i]) * Dinv * values[i];
      f_star[i] = -2.0 * conj(F[i]) * Dinv * values[i];
    }
    if (k < spec.n) {
      disc.cumulative(g_star, c1);
      disc.cumulative(f_star, c2);
      for (std::size_t i = 0; i < count; ++i) {
        values[i] = double(k) * (c1[i].re * F[i] + c2[i].re * G[i]);
      }
    } else {
      const double t1 = disc.total(g_star).re;
      const double t2 = disc.total(f_star).re;
      return double(k) * (t1 * pair.F()(z) + t2 * pair.G()(z));
    }
  }
  return values.front();  // unreachable for n >= 1
}

}  // namespace

hnum formal_power(const FormalPowerSpec& spec, const hnum& z, const GeneratingSequence& seq,
                  const FormalPowerOptions& opts) {
  if (spec.n < 0) throw InvalidArgument("formal power exponent must be non-negative");
  if (spec.n > opts.max_exponent) {
    std::ostringstream msg;
    msg << "exponent " << spec.n << " exceeds the configured maximum " << opts.max_exponent;
    throw DepthExceeded(msg.str());
  }
  if (spec.n == 0) {
    const GeneratingPair& pair = seq.pair(spec.m);
    const Decomposition lm = z0_coefficients(spec.a, spec.z0, pair);
    return lm.phi * pair.F()(z) + lm.psi * pair.G()(z);
  }
  if (z == spec.z0) return {};

  const Polyline path = power_path(spec.z0, z, opts.path);
  int refine = 1;
  hnum coarse = evaluate_on(
      PathDiscretization::uniform(path, opts.max_panel_length, opts.order, refine), spec, z, seq);
  for (int level = 0; level < opts.max_refinements; ++level) {
    refine *= 2;
    const hnum fine = evaluate_on(
        PathDiscretization::uniform(path, opts.max_panel_length, opts.order, refine), spec, z, seq);
    if (max_norm(fine - coarse) <= opts.tol * std::max(1.0, max_norm(fine))) return fine;
    coarse = fine;
  }
  std::ostringstream msg;
  msg << "formal power Z_" << spec.m << "^(" << spec.n << ") at " << z
      << " did not converge under panel refinement";
  throw NoConvergence(msg.str());
}

HyperField formal_power_field(const FormalPowerSpec& spec, const GeneratingSequence& seq,
                              const FormalPowerOptions& opts, double fd_step) {
  return HyperField::analytic(
      [spec, seq, opts](const hnum& z) { return formal_power(spec, z, seq, opts); }, fd_step);
}

std::vector<hnum> formal_power_table(const FormalPowerSpec& spec, const GridDomain& grid,
                                     const GeneratingSequence& seq, const FormalPowerOptions& opts,
                                     int threads) {
  // Realize the pairs up front so workers only read the sequence cache.
  for (int k = 0; k <= spec.n; ++k) seq.pair(spec.m + k);
  std::vector<hnum> out(grid.size());
  parallel_for(grid.size(), threads,
               [&](std::size_t i) { out[i] = formal_power(spec, grid.node(i), seq, opts); });
  return out;
}

double asymptotic_deviation(const FormalPowerSpec& spec, const hnum& z,
                            const GeneratingSequence& seq, const FormalPowerOptions& opts) {
  const hnum dz = z - spec.z0;
  const hnum leading = spec.a * pow(dz, static_cast<unsigned>(spec.n));
  const hnum value = formal_power(spec, z, seq, opts);
  return max_norm(value - leading) / std::pow(max_norm(dz), spec.n);
}

}  // namespace hypervekua
