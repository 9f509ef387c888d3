#pragma once

#include <Eigen/Dense>

#include <functional>
#include <span>
#include <vector>

#include "hypervekua/fields.hpp"

namespace hypervekua {

// ---------------------------------------------------------------------------
// Scalar integration

struct IntegrateOptions {
  double tol = 1e-10;
  int max_depth = 40;
};

/// Adaptive Simpson with Richardson correction. Swapping the limits negates
/// the result. Throws NoConvergence when the depth limit is reached with the
/// local error still above its share of `tol`.
double integrate(const std::function<double(double)>& f, double x0, double x1,
                 IntegrateOptions opts = {});

// ---------------------------------------------------------------------------
// Gauss-Legendre panels

/// q-point Gauss-Legendre rule on [-1, 1] plus the cumulative integration
/// matrix: (cumulative * g)(i) = integral from -1 to node i of the degree q-1
/// interpolant of g.
struct GaussLegendreRule {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;
  Eigen::MatrixXd cumulative;

  static const GaussLegendreRule& get(int order);
};

// ---------------------------------------------------------------------------
// Paths

/// Polyline in the (x, t) plane. Consecutive vertices must differ.
class Polyline {
 public:
  explicit Polyline(std::vector<hnum> vertices);

  static Polyline segment(const hnum& a, const hnum& b) { return Polyline({a, b}); }
  /// x-leg first, then t-leg; zero-length legs are dropped.
  static Polyline l_path(const hnum& a, const hnum& b);
  /// Closed axis-aligned rectangle traversed counter-clockwise from `corner`.
  static Polyline rectangle(const hnum& corner, double width, double height);

  const std::vector<hnum>& vertices() const { return vertices_; }
  const hnum& front() const { return vertices_.front(); }
  const hnum& back() const { return vertices_.back(); }
  std::size_t segments() const { return vertices_.size() - 1; }
  bool closed() const { return vertices_.front() == vertices_.back(); }
  /// Euclidean length in the (x, t) plane.
  double length() const;

  Polyline reversed() const;
  /// this followed by `next`; requires back() == next.front().
  Polyline then(const Polyline& next) const;

 private:
  std::vector<hnum> vertices_;
};

struct PathIntegralOptions {
  double tol = 1e-10;
  int order = 8;
  int max_refinements = 16;
};

/// Integral of W dz along the path with dz = dx + j dt. Each segment uses
/// composite Gauss-Legendre panels, doubled until two successive estimates
/// agree within tol * max(1, |estimate|).
hnum path_integral(const HyperFn& w, const Polyline& path, PathIntegralOptions opts = {});
hnum path_integral(const HyperField& w, const Polyline& path, PathIntegralOptions opts = {});

/// Panelled discretization of a path supporting prefix (cumulative)
/// integrals at its own nodes. Nested integrals whose inner paths are
/// prefixes of the outer path reuse one node set.
class PathDiscretization {
 public:
  /// `panels_per_segment[s]` Gauss-Legendre panels of `order` points on
  /// segment s.
  PathDiscretization(const Polyline& path, std::vector<int> panels_per_segment, int order);
  /// Panels sized to at most `max_panel_length` (Euclidean), times `refine`.
  static PathDiscretization uniform(const Polyline& path, double max_panel_length, int order,
                                    int refine = 1);

  std::span<const hnum> nodes() const { return nodes_; }
  std::size_t size() const { return nodes_.size(); }

  /// prefix[i] = integral of g dz from the path start to node i, with g given
  /// at the nodes; returns the full-path integral.
  hnum cumulative(std::span<const hnum> g, std::span<hnum> prefix) const;
  /// Full-path integral only.
  hnum total(std::span<const hnum> g) const;

 private:
  struct Panel {
    std::size_t first;  // index of the panel's first node
    hnum half_step;     // (segment direction) * (panel parameter width) / 2
  };
  const GaussLegendreRule* rule_;
  std::vector<Panel> panels_;
  std::vector<hnum> nodes_;
};

}  // namespace hypervekua
