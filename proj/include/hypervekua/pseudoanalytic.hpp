#pragma once

// Generating pairs (F, G), their characteristic coefficients, the
// (F, G)-derivative and (F, G)-integral, and generating sequences.
//
// For a pair with F conj(G) - conj(F) G =: D the coefficients are
//
//   a = -(conj(F) G_zbar - F_zbar conj(G)) / D    b = (F G_zbar - F_zbar G) / D
//   A = -(conj(F) G_z    - F_z    conj(G)) / D    B = (F G_z    - F_z    G) / D
//
// and w is (F, G)-pseudoanalytic iff w_zbar = a w + b conj(w); its
// derivative is then w_z - A w - B conj(w).

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hypervekua/fields.hpp"
#include "hypervekua/quadrature.hpp"

namespace hypervekua {

inline constexpr double kDefaultPairTolerance = 1e-10;

/// Values of the four characteristic coefficients at one point.
struct CoefficientValues {
  hnum a;
  hnum b;
  hnum A;
  hnum B;
};

class GeneratingPair {
 public:
  /// Validates Im(conj(F) G) at every node of `domain` (see check_generating).
  GeneratingPair(HyperField F, HyperField G, GridDomain domain,
                 double pair_tolerance = kDefaultPairTolerance, std::string label = {});

  const HyperField& F() const { return F_; }
  const HyperField& G() const { return G_; }
  const GridDomain& domain() const { return domain_; }
  const std::string& label() const { return label_; }

  /// Im(conj(F) G) at z.
  double determinant(const hnum& z) const;
  /// Characteristic coefficients at z; memoized per point.
  CoefficientValues coefficients(const hnum& z) const;

 private:
  struct Cache;
  HyperField F_;
  HyperField G_;
  GridDomain domain_;
  double pair_tolerance_;
  std::string label_;
  std::shared_ptr<Cache> cache_;
};

/// Throws DegeneratePair listing the nodes where |Im(conj(F) G)| <= tolerance.
GeneratingPair check_generating(const HyperField& F, const HyperField& G, const GridDomain& domain,
                                double pair_tolerance = kDefaultPairTolerance);

struct Decomposition {
  double phi;
  double psi;
};

/// Unique real phi, psi with w = phi F + psi G at z.
Decomposition decompose(const hnum& w, const GeneratingPair& pair, const hnum& z);
Decomposition decompose(const HyperField& w, const GeneratingPair& pair, const hnum& z);

/// The coefficient fields a, b, A, B of a pair.
struct CharCoefficients {
  HyperField a;
  HyperField b;
  HyperField A;
  HyperField B;
};

CharCoefficients characteristic_coefficients(const GeneratingPair& pair);

/// w_z - A w - B conj(w)
hnum fg_derivative(const HyperField& w, const GeneratingPair& pair, const hnum& z);

/// w_zbar - a w - b conj(w)
hnum vekua_residual(const HyperField& w, const GeneratingPair& pair, const hnum& z);

/// Max over an interior lattice of |a_succ - a_pred| and |b_succ + B_pred|
/// is at most `tol`. Throws DomainMismatch when the domains differ.
bool is_successor(const GeneratingPair& pred, const GeneratingPair& succ, double tol,
                  int lattice = 9);

/// F* = -2 conj(F) / D, G* = 2 conj(G) / D.
GeneratingPair adjoint(const GeneratingPair& pair);

/// F(z1) Re int G* W dz + G(z1) Re int F* W dz along `path` (z1 its end).
hnum fg_integral(const HyperFn& W, const Polyline& path, const GeneratingPair& pair,
                 PathIntegralOptions opts = {});
hnum fg_integral(const HyperField& W, const Polyline& path, const GeneratingPair& pair,
                 PathIntegralOptions opts = {});

/// Family m -> (F_m, G_m), realized lazily, with an optional period.
class GeneratingSequence {
 public:
  using Factory = std::function<GeneratingPair(int)>;

  GeneratingSequence(Factory factory, std::optional<int> period = std::nullopt);
  /// Sequence repeating `pairs` with period pairs.size().
  static GeneratingSequence periodic(std::vector<GeneratingPair> pairs);

  const GeneratingPair& pair(int m) const;
  std::optional<int> period() const { return period_; }

 private:
  struct Store;
  Factory factory_;
  std::optional<int> period_;
  std::shared_ptr<Store> store_;
};

/// Pairs m and m + 1 are successor-linked for every m in [first, last).
bool check_successor_chain(const GeneratingSequence& seq, int first, int last, double tol,
                           int lattice = 9);

/// Characteristic coefficients of pairs m and m + period agree within tol on
/// an interior lattice. Throws InvalidArgument if the sequence has no period.
bool check_period(const GeneratingSequence& seq, int m, double tol, int lattice = 9);

struct HigherDerivativeOptions {
  /// Points where each intermediate w^[k] must satisfy the Vekua equation of
  /// pair k; empty disables the check.
  std::vector<hnum> check_points;
  double residual_tolerance = 1e-4;
};

/// w^[0] = w, w^[k+1] = (F_k, G_k)-derivative of w^[k]; returns w^[order].
/// Intermediate derivatives use central differences with w's step.
HyperField higher_derivative(const HyperField& w, const GeneratingSequence& seq, int order,
                             const HigherDerivativeOptions& opts = {});

}  // namespace hypervekua
