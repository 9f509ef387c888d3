#pragma once

// Formal powers Z_m^(n)(a, z0; z) of a generating sequence:
//
//   Z_m^(0) = lambda F_m + mu G_m  with  lambda F_m(z0) + mu G_m(z0) = a
//   Z_m^(n) = n * (F_m, G_m)-integral from z0 to z of Z_{m+1}^(n-1)
//
// Every inner power is evaluated along a prefix of the outer path, so the
// whole recursion lives on one Gauss-Legendre node set and costs
// O(n * nodes) instead of growing exponentially in n.

#include <vector>

#include "hypervekua/pseudoanalytic.hpp"

namespace hypervekua {

struct FormalPowerSpec {
  int m = 0;       ///< sequence index
  int n = 0;       ///< exponent
  hnum a{1.0};     ///< coefficient
  hnum z0{};       ///< center
};

enum class PathKind {
  straight,  ///< segment z0 -> z
  l_path,    ///< x-leg then t-leg
};

struct FormalPowerOptions {
  PathKind path = PathKind::straight;
  /// Agreement required between two successive panel refinements, relative
  /// to max(1, |value|).
  double tol = 1e-12;
  int order = 16;
  double max_panel_length = 0.25;
  int max_refinements = 6;
  int max_exponent = 8;
};

/// Real lambda, mu with lambda F(z0) + mu G(z0) = a (Cramer's rule).
Decomposition z0_coefficients(const hnum& a, const hnum& z0, const GeneratingPair& pair);

/// Z_m^(n)(a, z0; z). Throws DepthExceeded for n > opts.max_exponent.
hnum formal_power(const FormalPowerSpec& spec, const hnum& z, const GeneratingSequence& seq,
                  const FormalPowerOptions& opts = {});

/// The formal power as a field; derivatives by central differences.
HyperField formal_power_field(const FormalPowerSpec& spec, const GeneratingSequence& seq,
                              const FormalPowerOptions& opts = {},
                              double fd_step = kDefaultFdStep);

/// Values at every node of `grid` in row-major order. `threads` <= 1 runs
/// serially; results do not depend on the thread count.
std::vector<hnum> formal_power_table(const FormalPowerSpec& spec, const GridDomain& grid,
                                     const GeneratingSequence& seq,
                                     const FormalPowerOptions& opts = {}, int threads = 1);

/// Normalized deviation max_norm(Z - a (z - z0)^n) / max_norm(z - z0)^n.
double asymptotic_deviation(const FormalPowerSpec& spec, const hnum& z,
                            const GeneratingSequence& seq, const FormalPowerOptions& opts = {});

}  // namespace hypervekua
