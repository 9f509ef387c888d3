#pragma once

#include <Eigen/Dense>

#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hypervekua/hyperbolic.hpp"

namespace hypervekua {

/// Uniform rectangular grid over x in [x_min, x_max], t in [t_min, t_max].
/// Node (ix, it) sits at x_min + ix * hx, t_min + it * ht.
struct GridDomain {
  double x_min = 0.0;
  double x_max = 1.0;
  double t_min = 0.0;
  double t_max = 1.0;
  int nx = 3;
  int nt = 3;
  /// Restrict `contains` to the time-like wedge 0 < x < t.
  bool time_like = false;

  /// Validating constructor; throws InvalidArgument.
  static GridDomain make(double x_min, double x_max, double t_min, double t_max,
                         int nx, int nt, bool time_like = false);

  double hx() const { return (x_max - x_min) / (nx - 1); }
  double ht() const { return (t_max - t_min) / (nt - 1); }
  std::size_t size() const { return static_cast<std::size_t>(nx) * nt; }

  hnum node(int ix, int it) const { return {x_min + ix * hx(), t_min + it * ht()}; }
  /// Row-major node ordering: x index outer, t index inner.
  hnum node(std::size_t flat) const {
    return node(static_cast<int>(flat / nt), static_cast<int>(flat % nt));
  }

  bool contains(const hnum& z) const;
  /// At least `margin` grid steps away from every edge of the rectangle.
  bool is_interior(const hnum& z, double margin = 1.0) const;

  /// An `n x n` lattice of points strictly inside the rectangle.
  std::vector<hnum> interior_lattice(int n) const;

  friend bool operator==(const GridDomain&, const GridDomain&) = default;
};

using HyperFn = std::function<hnum(const hnum&)>;

/// First partial derivatives of a hyperbolic-valued function.
struct Partials {
  hnum fx;
  hnum ft;
};

inline constexpr double kDefaultFdStep = 1e-3;

/// A hyperbolic-valued function f(z) = u(z) + v(z) j of z = x + j t.
///
/// Either a callable (optionally with exact partials) or grid samples with
/// bilinear interpolation between nodes. Immutable and cheap to copy.
class HyperField {
 public:
  HyperField() = default;

  /// Callable without exact derivatives; derivatives use central
  /// differences with step `fd_step` in both x and t.
  static HyperField analytic(HyperFn f, double fd_step = kDefaultFdStep);
  /// Callable with exact partials f_x, f_t.
  static HyperField with_partials(HyperFn f, HyperFn fx, HyperFn ft);
  /// Callable with exact formal derivatives f_z, f_zbar.
  static HyperField with_derivatives(HyperFn f, HyperFn dz, HyperFn dzbar);
  /// Samples at every node of `grid`; `re`, `im` have shape (nx, nt).
  static HyperField sampled(const GridDomain& grid, Eigen::ArrayXXd re, Eigen::ArrayXXd im);
  /// Samples `f` at every node of `grid`.
  static HyperField sample(const GridDomain& grid, const HyperFn& f);
  static HyperField constant(const hnum& c);

  hnum operator()(const hnum& z) const;
  double u(const hnum& z) const { return (*this)(z).re; }
  double v(const hnum& z) const { return (*this)(z).im; }

  /// Exact partials when available, else second-order central differences.
  /// Throws OutOfDomain when the stencil leaves a sampled grid.
  Partials partials(const hnum& z) const;

  bool has_exact_derivatives() const;
  bool is_sampled() const;
  /// Central-difference steps (hx, ht); zero for exact fields.
  std::pair<double, double> fd_steps() const;
  /// Same callable, new central-difference step. Exact partials are dropped.
  HyperField with_fd_step(double h) const;
  /// Attach a domain to a callable field so evaluation outside it throws.
  HyperField restricted_to(const GridDomain& grid) const;

  const std::optional<GridDomain>& domain() const;
  /// Grid samples (sampled fields only).
  const Eigen::ArrayXXd& samples_re() const;
  const Eigen::ArrayXXd& samples_im() const;

  /// Evaluation callable, usable where a plain HyperFn is wanted.
  HyperFn function() const;

 private:
  struct Impl;
  explicit HyperField(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<const Impl> impl_;
};

// Pointwise algebra. Exact partials propagate when both operands carry them.
HyperField operator+(const HyperField& f, const HyperField& g);
HyperField operator-(const HyperField& f, const HyperField& g);
HyperField operator*(const HyperField& f, const HyperField& g);
HyperField operator*(const hnum& c, const HyperField& f);
HyperField conj(const HyperField& f);

/// d/dzbar = (d/dx - j d/dt) / 2
hnum d_zbar(const HyperField& f, const hnum& z);
/// d/dz = (d/dx + j d/dt) / 2
hnum d_z(const HyperField& f, const hnum& z);

struct HyperbolicDerivative {
  hnum value;           ///< f'(z0) = f_z(z0)
  bool invertible;      ///< det of the (u, v) Jacobian is nonzero
  double jacobian_det;  ///< u_x v_t - u_t v_x
};

/// Derivative of a hyperbolic-analytic function via the f_zbar = 0 criterion.
///
/// `tolerance` bounds max_norm(f_zbar(z0)); by default it is
/// 10 h^2 max(1, |f(z0)|) with h the field's difference step (1e-12 for
/// exact fields). Throws NotHyperbolicAnalytic when the test fails.
HyperbolicDerivative hyperbolic_derivative(const HyperField& f, const hnum& z0,
                                           std::optional<double> tolerance = std::nullopt);

// CSV: header "x,t,re,im", one row per node in row-major order.
void write_field_csv(std::ostream& os, const HyperField& f, const GridDomain& grid);
HyperField read_field_csv(std::istream& is);

// JSON: {"grid": {...}, "re": [...], "im": [...]} with row-major flattening.
std::string field_to_json(const HyperField& f, const GridDomain& grid);
HyperField field_from_json(const std::string& text);

}  // namespace hypervekua
