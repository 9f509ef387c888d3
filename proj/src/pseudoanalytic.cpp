#include "hypervekua/pseudoanalytic.hpp"

#include <bit>
#include <cmath>
#include <mutex>
#include <sstream>
#include <unordered_map>

namespace hypervekua {

namespace {

struct PointKey {
  std::uint64_t x;
  std::uint64_t t;
  bool operator==(const PointKey&) const = default;
};

struct PointKeyHash {
  std::size_t operator()(const PointKey& k) const noexcept {
    return std::hash<std::uint64_t>{}(k.x * 0x9E3779B97F4A7C15ull ^ k.t);
  }
};

PointKey key_of(const hnum& z) { return {std::bit_cast<std::uint64_t>(z.re), std::bit_cast<std::uint64_t>(z.im)}; }

// F conj(G) - conj(F) G; always a pure-j element 2j Im(F conj(G)).
hnum pair_denominator(const hnum& F, const hnum& G) { return F * conj(G) - conj(F) * G; }

std::string format_point(const hnum& z) {
  std::ostringstream os;
  os << '(' << z.re << ", " << z.im << ')';
  return os.str();
}

}  // namespace

struct GeneratingPair::Cache {
  std::mutex mutex;
  std::unordered_map<PointKey, CoefficientValues, PointKeyHash> values;
};

GeneratingPair::GeneratingPair(HyperField F, HyperField G, GridDomain domain,
                               double pair_tolerance, std::string label)
    : F_(std::move(F)),
      G_(std::move(G)),
      domain_(domain),
      pair_tolerance_(pair_tolerance),
      label_(std::move(label)),
      cache_(std::make_shared<Cache>()) {
  std::vector<hnum> bad;
  for (std::size_t k = 0; k < domain_.size(); ++k) {
    const hnum z = domain_.node(k);
    if (!(std::abs(determinant(z)) > pair_tolerance_)) bad.push_back(z);
  }
  if (!bad.empty()) {
    std::ostringstream msg;
    msg << "Im(conj(F) G) vanishes at " << bad.size() << " node(s):";
    for (std::size_t i = 0; i < std::min<std::size_t>(bad.size(), 8); ++i) {
      msg << ' ' << format_point(bad[i]);
    }
    if (bad.size() > 8) msg << " ...";
    throw DegeneratePair(msg.str());
  }
}

double GeneratingPair::determinant(const hnum& z) const { return (conj(F_(z)) * G_(z)).im; }

CoefficientValues GeneratingPair::coefficients(const hnum& z) const {
  const PointKey key = key_of(z);
  {
    std::lock_guard lock(cache_->mutex);
    if (auto it = cache_->values.find(key); it != cache_->values.end()) return it->second;
  }
  const hnum F = F_(z);
  const hnum G = G_(z);
  const hnum D = pair_denominator(F, G);
  if (!(std::abs(D.im) > 2.0 * pair_tolerance_)) {
    throw DegeneratePair("pair denominator vanishes at " + format_point(z));
  }
  const hnum Dinv = inverse(D);
  const hnum Fz = d_z(F_, z);
  const hnum Fzb = d_zbar(F_, z);
  const hnum Gz = d_z(G_, z);
  const hnum Gzb = d_zbar(G_, z);
  const CoefficientValues c{
      -(conj(F) * Gzb - Fzb * conj(G)) * Dinv,
      (F * Gzb - Fzb * G) * Dinv,
      -(conj(F) * Gz - Fz * conj(G)) * Dinv,
      (F * Gz - Fz * G) * Dinv,
  };
  std::lock_guard lock(cache_->mutex);
  cache_->values.emplace(key, c);
  return c;
}

GeneratingPair check_generating(const HyperField& F, const HyperField& G, const GridDomain& domain,
                                double pair_tolerance) {
  return GeneratingPair(F, G, domain, pair_tolerance);
}

Decomposition decompose(const hnum& w, const GeneratingPair& pair, const hnum& z) {
  const hnum F = pair.F()(z);
  const hnum G = pair.G()(z);
  const double det = (conj(F) * G).im;
  if (det == 0.0) throw DegeneratePair("Im(conj(F) G) = 0 at " + format_point(z));
  return {(conj(w) * G).im / det, -(conj(w) * F).im / det};
}

Decomposition decompose(const HyperField& w, const GeneratingPair& pair, const hnum& z) {
  return decompose(w(z), pair, z);
}

CharCoefficients characteristic_coefficients(const GeneratingPair& pair) {
  auto field = [pair](hnum CoefficientValues::*member) {
    return HyperField::analytic(
        [pair, member](const hnum& z) { return pair.coefficients(z).*member; });
  };
  return {field(&CoefficientValues::a), field(&CoefficientValues::b), field(&CoefficientValues::A),
          field(&CoefficientValues::B)};
}

hnum fg_derivative(const HyperField& w, const GeneratingPair& pair, const hnum& z) {
  const CoefficientValues c = pair.coefficients(z);
  const hnum value = w(z);
  return d_z(w, z) - c.A * value - c.B * conj(value);
}

hnum vekua_residual(const HyperField& w, const GeneratingPair& pair, const hnum& z) {
  const CoefficientValues c = pair.coefficients(z);
  const hnum value = w(z);
  return d_zbar(w, z) - c.a * value - c.b * conj(value);
}

bool is_successor(const GeneratingPair& pred, const GeneratingPair& succ, double tol, int lattice) {
  if (!(pred.domain() == succ.domain())) {
    throw DomainMismatch("successor check needs pairs on a common domain");
  }
  for (const hnum& z : pred.domain().interior_lattice(lattice)) {
    const CoefficientValues p = pred.coefficients(z);
    const CoefficientValues s = succ.coefficients(z);
    if (max_norm(s.a - p.a) > tol || max_norm(s.b + p.B) > tol) return false;
  }
  return true;
}

namespace {

// -2 conj(F) / D (sign = -1) or 2 conj(G) / D (sign = +1) for the adjoint.
HyperField adjoint_member(const HyperField& F, const HyperField& G, const HyperField& X,
                          double sign) {
  auto value = [=](const hnum& z) {
    return (2.0 * sign) * conj(X(z)) * inverse(pair_denominator(F(z), G(z)));
  };
  if (!(F.has_exact_derivatives() && G.has_exact_derivatives())) {
    const auto [fx, ft] = F.fd_steps();
    const auto [gx, gt] = G.fd_steps();
    const double h = std::max({fx, ft, gx, gt});
    return HyperField::analytic(value, h > 0.0 ? h : kDefaultFdStep);
  }
  // Quotient rule with D' = F' conj(G) + F conj(G') - conj(F') G - conj(F) G'.
  auto partial = [=](const hnum& z, bool along_x) {
    const Partials pF = F.partials(z);
    const Partials pG = G.partials(z);
    const Partials pX = X.partials(z);
    const hnum dF = along_x ? pF.fx : pF.ft;
    const hnum dG = along_x ? pG.fx : pG.ft;
    const hnum dX = along_x ? pX.fx : pX.ft;
    const hnum Fv = F(z), Gv = G(z);
    const hnum D = pair_denominator(Fv, Gv);
    const hnum dD = dF * conj(Gv) + Fv * conj(dG) - conj(dF) * Gv - conj(Fv) * dG;
    const hnum Dinv = inverse(D);
    return (2.0 * sign) * (conj(dX) * Dinv - conj(X(z)) * dD * Dinv * Dinv);
  };
  return HyperField::with_partials(value, [=](const hnum& z) { return partial(z, true); },
                                   [=](const hnum& z) { return partial(z, false); });
}

}  // namespace

GeneratingPair adjoint(const GeneratingPair& pair) {
  const HyperField& F = pair.F();
  const HyperField& G = pair.G();
  std::string label = pair.label().empty() ? std::string{} : pair.label() + "*";
  return GeneratingPair(adjoint_member(F, G, F, -1.0), adjoint_member(F, G, G, 1.0),
                        pair.domain(), kDefaultPairTolerance, std::move(label));
}

hnum fg_integral(const HyperFn& W, const Polyline& path, const GeneratingPair& pair,
                 PathIntegralOptions opts) {
  const HyperField& F = pair.F();
  const HyperField& G = pair.G();
  // G* W = 2 conj(G) W / D, F* W = -2 conj(F) W / D
  const hnum int_g_star = path_integral(
      [&](const hnum& z) {
        const hnum Fv = F(z), Gv = G(z);
        return 2.0 * conj(Gv) * W(z) * inverse(pair_denominator(Fv, Gv));
      },
      path, opts);
  const hnum int_f_star = path_integral(
      [&](const hnum& z) {
        const hnum Fv = F(z), Gv = G(z);
        return -2.0 * conj(Fv) * W(z) * inverse(pair_denominator(Fv, Gv));
      },
      path, opts);
  const hnum z1 = path.back();
  return int_g_star.re * F(z1) + int_f_star.re * G(z1);
}

hnum fg_integral(const HyperField& W, const Polyline& path, const GeneratingPair& pair,
                 PathIntegralOptions opts) {
  return fg_integral(W.function(), path, pair, opts);
}

// ---------------------------------------------------------------------------

struct GeneratingSequence::Store {
  std::mutex mutex;
  std::unordered_map<int, std::unique_ptr<GeneratingPair>> pairs;
};

GeneratingSequence::GeneratingSequence(Factory factory, std::optional<int> period)
    : factory_(std::move(factory)), period_(period), store_(std::make_shared<Store>()) {
  if (period_ && *period_ <= 0) throw InvalidArgument("sequence period must be positive");
}

GeneratingSequence GeneratingSequence::periodic(std::vector<GeneratingPair> pairs) {
  if (pairs.empty()) throw InvalidArgument("periodic sequence needs at least one pair");
  const int n = static_cast<int>(pairs.size());
  auto shared = std::make_shared<std::vector<GeneratingPair>>(std::move(pairs));
  return GeneratingSequence(
      [shared, n](int m) { return (*shared)[static_cast<std::size_t>(((m % n) + n) % n)]; }, n);
}

const GeneratingPair& GeneratingSequence::pair(int m) const {
  std::lock_guard lock(store_->mutex);
  auto& slot = store_->pairs[m];
  if (!slot) slot = std::make_unique<GeneratingPair>(factory_(m));
  return *slot;
}

bool check_successor_chain(const GeneratingSequence& seq, int first, int last, double tol,
                           int lattice) {
  for (int m = first; m < last; ++m) {
    if (!is_successor(seq.pair(m), seq.pair(m + 1), tol, lattice)) return false;
  }
  return true;
}

bool check_period(const GeneratingSequence& seq, int m, double tol, int lattice) {
  if (!seq.period()) throw InvalidArgument("sequence has no declared period");
  const GeneratingPair& p = seq.pair(m);
  const GeneratingPair& q = seq.pair(m + *seq.period());
  for (const hnum& z : p.domain().interior_lattice(lattice)) {
    const CoefficientValues c1 = p.coefficients(z);
    const CoefficientValues c2 = q.coefficients(z);
    if (max_norm(c1.a - c2.a) > tol || max_norm(c1.b - c2.b) > tol ||
        max_norm(c1.A - c2.A) > tol || max_norm(c1.B - c2.B) > tol) {
      return false;
    }
  }
  return true;
}

HyperField higher_derivative(const HyperField& w, const GeneratingSequence& seq, int order,
                             const HigherDerivativeOptions& opts) {
  if (order < 0) throw InvalidArgument("derivative order must be non-negative");
  const auto [hx, ht] = w.fd_steps();
  const double h = std::max(hx, ht) > 0.0 ? std::max(hx, ht) : kDefaultFdStep;
  HyperField current = w;
  for (int k = 0; k < order; ++k) {
    const GeneratingPair& pair = seq.pair(k);
    for (const hnum& z : opts.check_points) {
      const double r = max_norm(vekua_residual(current, pair, z));
      if (r > opts.residual_tolerance) {
        std::ostringstream msg;
        msg << "derivative of order " << k << " has Vekua residual " << r << " at "
            << format_point(z) << " (tolerance " << opts.residual_tolerance << ")";
        throw ResidualTooLarge(msg.str());
      }
    }
    current = HyperField::analytic(
        [current, pair](const hnum& z) { return fg_derivative(current, pair, z); }, h);
  }
  return current;
}

}  // namespace hypervekua
