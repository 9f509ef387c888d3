#include "hypervekua/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>

namespace hypervekua {

namespace {

struct SimpsonState {
  const std::function<double(double)>& f;
  int max_depth;
};

double simpson_recurse(const SimpsonState& st, double a, double b, double fa, double fm,
                       double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = st.f(lm);
  const double frm = st.f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  if (depth >= st.max_depth) {
    std::ostringstream msg;
    msg << "adaptive Simpson did not converge on [" << a << ", " << b << "] (error estimate "
        << std::abs(delta) / 15.0 << ")";
    throw NoConvergence(msg.str());
  }
  return simpson_recurse(st, a, m, fa, flm, fm, left, 0.5 * tol, depth + 1) +
         simpson_recurse(st, m, b, fm, frm, fb, right, 0.5 * tol, depth + 1);
}

}  // namespace

double integrate(const std::function<double(double)>& f, double x0, double x1,
                 IntegrateOptions opts) {
  if (!(opts.tol > 0.0)) throw InvalidArgument("integration tolerance must be positive");
  if (x0 == x1) return 0.0;
  if (x1 < x0) return -integrate(f, x1, x0, opts);
  const SimpsonState st{f, opts.max_depth};
  // Start from four panels so that symmetric integrands cannot fool the
  // first error estimate.
  double sum = 0.0;
  constexpr int kStart = 4;
  const double h = (x1 - x0) / kStart;
  for (int k = 0; k < kStart; ++k) {
    const double a = x0 + k * h;
    const double b = k + 1 == kStart ? x1 : x0 + (k + 1) * h;
    const double fa = f(a);
    const double fb = f(b);
    const double fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    sum += simpson_recurse(st, a, b, fa, fm, fb, whole, opts.tol / kStart, 0);
  }
  return sum;
}

// ---------------------------------------------------------------------------

namespace {

GaussLegendreRule build_rule(int q) {
  GaussLegendreRule rule;
  rule.nodes.resize(q);
  rule.weights.resize(q);
  for (int i = 0; i < q; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (q + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= q; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = q * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // ascending order
    rule.nodes(q - 1 - i) = x;
    rule.weights(q - 1 - i) = 2.0 / ((1.0 - x * x) * dp * dp);
  }

  // legendre(j, i) = P_j(x_i) for j = 0..q
  Eigen::MatrixXd legendre(q + 1, q);
  for (int i = 0; i < q; ++i) {
    const double x = rule.nodes(i);
    legendre(0, i) = 1.0;
    if (q >= 1) legendre(1, i) = x;
    for (int k = 2; k <= q; ++k) {
      legendre(k, i) = ((2.0 * k - 1.0) * x * legendre(k - 1, i) - (k - 1.0) * legendre(k - 2, i)) / k;
    }
  }
  // Lagrange basis l_k = sum_j coeff(j, k) P_j with coeff(j, k) = (2j+1)/2 w_k P_j(x_k).
  Eigen::MatrixXd coeff(q, q);
  for (int j = 0; j < q; ++j) {
    coeff.row(j) = (0.5 * (2.0 * j + 1.0)) * legendre.row(j).cwiseProduct(rule.weights.transpose());
  }
  // antider(i, j) = integral of P_j from -1 to x_i
  Eigen::MatrixXd antider(q, q);
  for (int i = 0; i < q; ++i) {
    antider(i, 0) = rule.nodes(i) + 1.0;
    for (int j = 1; j < q; ++j) {
      antider(i, j) = (legendre(j + 1, i) - legendre(j - 1, i)) / (2.0 * j + 1.0);
    }
  }
  rule.cumulative = antider * coeff;
  return rule;
}

}  // namespace

const GaussLegendreRule& GaussLegendreRule::get(int order) {
  if (order < 1 || order > 128) throw InvalidArgument("Gauss-Legendre order must be in [1, 128]");
  static std::mutex mutex;
  static std::map<int, GaussLegendreRule> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(order);
  if (it == cache.end()) it = cache.emplace(order, build_rule(order)).first;
  return it->second;
}

// ---------------------------------------------------------------------------

Polyline::Polyline(std::vector<hnum> vertices) : vertices_(std::move(vertices)) {
  if (vertices_.size() < 2) throw InvalidArgument("a polyline needs at least two vertices");
  for (std::size_t i = 1; i < vertices_.size(); ++i) {
    if (vertices_[i] == vertices_[i - 1]) {
      throw InvalidArgument("consecutive polyline vertices must be distinct");
    }
  }
}

Polyline Polyline::l_path(const hnum& a, const hnum& b) {
  std::vector<hnum> v{a};
  const hnum corner{b.re, a.im};
  if (corner != a) v.push_back(corner);
  if (b != corner) v.push_back(b);
  if (v.size() < 2) throw InvalidArgument("L-path endpoints coincide");
  return Polyline(std::move(v));
}

Polyline Polyline::rectangle(const hnum& corner, double width, double height) {
  if (!(width > 0.0) || !(height > 0.0)) throw InvalidArgument("rectangle sides must be positive");
  return Polyline({corner,
                   {corner.re + width, corner.im},
                   {corner.re + width, corner.im + height},
                   {corner.re, corner.im + height},
                   corner});
}

double Polyline::length() const {
  double len = 0.0;
  for (std::size_t i = 1; i < vertices_.size(); ++i) {
    const hnum d = vertices_[i] - vertices_[i - 1];
    len += std::hypot(d.re, d.im);
  }
  return len;
}

Polyline Polyline::reversed() const {
  return Polyline(std::vector<hnum>(vertices_.rbegin(), vertices_.rend()));
}

Polyline Polyline::then(const Polyline& next) const {
  if (back() != next.front()) throw InvalidArgument("paths do not join");
  std::vector<hnum> v = vertices_;
  v.insert(v.end(), next.vertices_.begin() + 1, next.vertices_.end());
  return Polyline(std::move(v));
}

// ---------------------------------------------------------------------------

namespace {

hnum segment_composite(const HyperFn& w, const hnum& a, const hnum& b, int panels,
                       const GaussLegendreRule& rule) {
  const hnum dir = b - a;
  hnum sum{};
  const double width = 1.0 / panels;
  for (int p = 0; p < panels; ++p) {
    const double mid = (p + 0.5) * width;
    hnum panel{};
    for (Eigen::Index k = 0; k < rule.nodes.size(); ++k) {
      const double tau = mid + 0.5 * width * rule.nodes(k);
      panel += rule.weights(k) * w(a + tau * dir);
    }
    sum += (0.5 * width) * panel;
  }
  return sum * dir;
}

}  // namespace

hnum path_integral(const HyperFn& w, const Polyline& path, PathIntegralOptions opts) {
  const GaussLegendreRule& rule = GaussLegendreRule::get(opts.order);
  hnum total{};
  const auto& v = path.vertices();
  for (std::size_t s = 1; s < v.size(); ++s) {
    int panels = 1;
    hnum coarse = segment_composite(w, v[s - 1], v[s], panels, rule);
    for (int level = 0;; ++level) {
      const hnum fine = segment_composite(w, v[s - 1], v[s], 2 * panels, rule);
      panels *= 2;
      if (max_norm(fine - coarse) <= opts.tol * std::max(1.0, max_norm(fine))) {
        total += fine;
        break;
      }
      if (level + 1 >= opts.max_refinements) {
        throw NoConvergence("path integral panel refinement did not converge");
      }
      coarse = fine;
    }
  }
  return total;
}

hnum path_integral(const HyperField& w, const Polyline& path, PathIntegralOptions opts) {
  return path_integral(w.function(), path, opts);
}

// ---------------------------------------------------------------------------

PathDiscretization::PathDiscretization(const Polyline& path, std::vector<int> panels_per_segment,
                                       int order)
    : rule_(&GaussLegendreRule::get(order)) {
  if (panels_per_segment.size() != path.segments()) {
    throw InvalidArgument("one panel count per segment required");
  }
  const auto& v = path.vertices();
  const auto q = static_cast<std::size_t>(order);
  for (std::size_t s = 0; s < path.segments(); ++s) {
    const int panels = panels_per_segment[s];
    if (panels < 1) throw InvalidArgument("panel count must be positive");
    const hnum dir = v[s + 1] - v[s];
    const double width = 1.0 / panels;
    for (int p = 0; p < panels; ++p) {
      panels_.push_back({nodes_.size(), (0.5 * width) * dir});
      const double mid = (p + 0.5) * width;
      for (std::size_t k = 0; k < q; ++k) {
        nodes_.push_back(v[s] + (mid + 0.5 * width * rule_->nodes(static_cast<Eigen::Index>(k))) * dir);
      }
    }
  }
}

PathDiscretization PathDiscretization::uniform(const Polyline& path, double max_panel_length,
                                               int order, int refine) {
  std::vector<int> counts;
  const auto& v = path.vertices();
  for (std::size_t s = 1; s < v.size(); ++s) {
    const hnum d = v[s] - v[s - 1];
    const int base = std::max(1, static_cast<int>(std::ceil(std::hypot(d.re, d.im) / max_panel_length)));
    counts.push_back(base * refine);
  }
  return PathDiscretization(path, std::move(counts), order);
}

hnum PathDiscretization::cumulative(std::span<const hnum> g, std::span<hnum> prefix) const {
  if (g.size() != nodes_.size() || prefix.size() != nodes_.size()) {
    throw InvalidArgument("node value count mismatch");
  }
  const auto q = static_cast<std::size_t>(rule_->nodes.size());
  const Eigen::MatrixXd& cum = rule_->cumulative;
  Eigen::VectorXd gre(q), gim(q);
  hnum offset{};
  for (const Panel& panel : panels_) {
    for (std::size_t k = 0; k < q; ++k) {
      gre(k) = g[panel.first + k].re;
      gim(k) = g[panel.first + k].im;
    }
    const Eigen::VectorXd cre = cum * gre;
    const Eigen::VectorXd cim = cum * gim;
    for (std::size_t i = 0; i < q; ++i) {
      prefix[panel.first + i] = offset + hnum{cre(i), cim(i)} * panel.half_step;
    }
    offset += hnum{rule_->weights.dot(gre), rule_->weights.dot(gim)} * panel.half_step;
  }
  return offset;
}

hnum PathDiscretization::total(std::span<const hnum> g) const {
  if (g.size() != nodes_.size()) throw InvalidArgument("node value count mismatch");
  const auto q = static_cast<std::size_t>(rule_->nodes.size());
  hnum sum{};
  for (const Panel& panel : panels_) {
    hnum acc{};
    for (std::size_t k = 0; k < q; ++k) acc += rule_->weights(static_cast<Eigen::Index>(k)) * g[panel.first + k];
    sum += acc * panel.half_step;
  }
  return sum;
}

}  // namespace hypervekua
