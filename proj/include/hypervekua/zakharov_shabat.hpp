#pragma once

// Zakharov-Shabat coupling modes and the hyperbolic Vekua equation
//
//   W_zbar = -(s(x) j / 2) conj(W),   W = u + j v,  u = n- + n+,  v = n- - n+
//
// whose generating sequence is explicit in terms of an antiderivative S of s:
//
//   F_m = cos S + (-1)^(m+1) j sin S,   G_m = (-1)^m sin S + j cos S.

#include <complex>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hypervekua/formal_powers.hpp"
#include "hypervekua/pseudoanalytic.hpp"

namespace hypervekua {

/// Real potential s(x) with an antiderivative S(x).
///
/// Builtin families carry exact S with S(0) = 0 (tables: S = 0 at the first
/// abscissa). Without an exact formula S is accumulated by adaptive quadrature
/// from the left end of the working interval, with checkpoints every 1/64 of
/// the interval.
class Potential {
 public:
  enum class Kind { zero, constant, sech, gauss, table, custom };

  static Potential zero();
  static Potential constant(double c);
  /// amplitude * sech(rate * x)
  static Potential sech(double amplitude, double rate);
  /// amplitude * exp(-x^2 / (2 sigma^2))
  static Potential gauss(double amplitude, double sigma);
  /// Piecewise-linear interpolation of (xs, values); xs strictly increasing.
  static Potential table(std::vector<double> xs, std::vector<double> values);
  /// Arbitrary continuous s on [lo, hi]; S by quadrature.
  static Potential custom(std::function<double(double)> s, double lo, double hi,
                          std::string name = "custom");

  /// "zero", "const:<c>", "sech:<amp>:<rate>", "gauss:<amp>:<sigma>",
  /// "table:<path.csv>" (columns x, s; relative paths resolve against
  /// `base_dir`). Throws PotentialParse.
  static Potential parse(std::string_view spec, const std::filesystem::path& base_dir = {});

  /// Same s, S rebuilt by quadrature on [lo, hi] with S(lo) = 0.
  Potential with_quadrature_antiderivative(double lo, double hi) const;

  double s(double x) const;
  double S(double x) const;

  Kind kind() const;
  bool has_exact_antiderivative() const;
  /// Spec string for builtin kinds; a descriptive name otherwise.
  const std::string& description() const;

  struct Impl;

 private:
  explicit Potential(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<const Impl> impl_;
};

/// S(x) for potential p; see Potential.
double antiderivative_S(const Potential& p, double x);

/// Domain used when a ZS pair is built without one: x, t in [-1, 2], 33 x 33.
GridDomain default_zs_domain();

/// The closed-form pair (F_m, G_m) with exact derivatives (t-derivatives vanish).
GeneratingPair zs_pair(const Potential& p, int m, const GridDomain& domain = default_zs_domain());

/// Period-2 sequence m -> zs_pair(p, m).
GeneratingSequence zs_sequence(const Potential& p, const GridDomain& domain = default_zs_domain());

// ---------------------------------------------------------------------------
// Time-domain modes

using RealFn = std::function<double(double x, double t)>;

struct ModeField {
  RealFn n_plus;
  RealFn n_minus;
};

/// W = (n- + n+) + j (n- - n+). `fd_step` sets W's difference step.
HyperField modes_to_W(const ModeField& modes, double fd_step = kDefaultFdStep);
/// n+ = (u - v) / 2, n- = (u + v) / 2.
ModeField W_to_modes(const HyperField& W);

struct ZsResidual {
  double r1;  ///< d_x n+ + d_t n+ - s n-
  double r2;  ///< d_x n- - d_t n- + s n+
};

/// Central-difference residuals of the transport system with step h.
ZsResidual zs_residual(const ModeField& modes, const Potential& p, const hnum& z,
                       double h = kDefaultFdStep);

/// W_zbar + (s j / 2) conj(W), using W's derivatives. For W = modes_to_W(m)
/// this equals ((r1 + r2) + j (r2 - r1)) / 2.
hnum vekua_zs_residual(const HyperField& W, const Potential& p, const hnum& z);

/// The recombination ((r1 + r2) + j (r2 - r1)) / 2.
hnum recombine(const ZsResidual& r);

// ---------------------------------------------------------------------------
// Spectral problem d_x n1 + i k n1 = s n2, d_x n2 - i k n2 = -s n1 (real k)

struct SpectralOptions {
  double step = 1e-3;
  /// Largest allowed relative drift of |n1|^2 + |n2|^2 per unit x.
  double drift_tolerance = 1e-8;
};

struct SpectralState {
  double k = 0.0;
  std::vector<double> x;
  std::vector<std::complex<double>> n1;
  std::vector<std::complex<double>> n2;
  std::vector<std::complex<double>> dn1;  // d/dx at the mesh nodes
  std::vector<std::complex<double>> dn2;
  /// max |E(x) - E(x_0)| / E(x_0) / (x_end - x_0), E = |n1|^2 + |n2|^2
  double drift_per_unit_x = 0.0;

  /// Cubic Hermite dense output; throws OutOfDomain outside the mesh.
  std::pair<std::complex<double>, std::complex<double>> at(double x) const;
  /// n+ = Re(n1 e^(ikt)), n- = Re(n2 e^(ikt)).
  ModeField lift() const;
};

/// Classical RK4 on a uniform mesh. Throws StepTooLarge when the
/// conservation drift exceeds opts.drift_tolerance.
SpectralState spectral_solve(const Potential& p, double k, double x_begin, double x_end,
                             std::complex<double> n1_init, std::complex<double> n2_init,
                             const SpectralOptions& opts = {});

// ---------------------------------------------------------------------------
// Recursive integral family

/// Values at (x0, x) of the integrals X, Y, X~, Y~, I, I~ for levels 0..n:
///   X^(k) = k int X^(k-1) cos 2S,  Y^(k) = k int Y^(k-1) sin 2S,
///   X~^(k) = k int Y^(k-1) cos 2S, Y~^(k) = k int X^(k-1) sin 2S,
///   I^(k) = k int X^(k-1),         I~^(k) = k int Y^(k-1),
/// all from x0 to x, with every level-0 value equal to 1.
struct RecursiveIntegrals {
  std::vector<double> X, Y, Xt, Yt, I, It;
  int levels() const { return static_cast<int>(X.size()) - 1; }
};

RecursiveIntegrals recursive_integrals(const Potential& p, int n, double x0, double x,
                                       const FormalPowerOptions& opts = {});

// ---------------------------------------------------------------------------
// Closed-form formal powers

enum class ClosedFormVariant {
  as_printed,  ///< the published expressions, term for term
  rederived,   ///< n = 2 rederived along the straight segment z0 -> z
};

/// Z_m^(n)(a, z0; z) from the explicit expressions. Supported: even m with
/// n in {0, 1, 2}; odd m with n in {0, 1}. The printed n = 2 formula divides
/// by x - x0 and throws CenterSingular when |x - x0| < 1e-6.
hnum closed_form_power(const Potential& p, int m, int n, const hnum& a, const hnum& z0,
                       const hnum& z, ClosedFormVariant variant = ClosedFormVariant::as_printed);

}  // namespace hypervekua
