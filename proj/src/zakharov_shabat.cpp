#include "hypervekua/zakharov_shabat.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <mutex>
#include <numbers>
#include <sstream>

#include "hypervekua/io.hpp"
#include "hypervekua/quadrature.hpp"

namespace hypervekua {

// ---------------------------------------------------------------------------
// Potential

struct Potential::Impl {
  Kind kind = Kind::zero;
  std::string description;
  std::function<double(double)> s;
  std::function<double(double)> S_exact;  // empty => quadrature

  // quadrature antiderivative on [lo, hi]
  double lo = 0.0;
  double hi = 0.0;
  static constexpr int kCheckpoints = 64;
  mutable std::once_flag checkpoints_once;
  mutable std::vector<double> checkpoints;  // S at lo + k (hi - lo) / 64

  double quadrature_S(double x) const {
    const double span = hi - lo;
    if (x < lo - 1e-12 * span || x > hi + 1e-12 * span) {
      std::ostringstream msg;
      msg << "x = " << x << " is outside the potential's working interval [" << lo << ", " << hi
          << "]";
      throw OutOfDomain(msg.str());
    }
    const IntegrateOptions opts{1e-13, 40};
    std::call_once(checkpoints_once, [&] {
      checkpoints.assign(kCheckpoints + 1, 0.0);
      for (int k = 1; k <= kCheckpoints; ++k) {
        checkpoints[k] = checkpoints[k - 1] +
                         integrate(s, lo + span * (k - 1) / kCheckpoints, lo + span * k / kCheckpoints, opts);
      }
    });
    const double pos = std::clamp((x - lo) / span * kCheckpoints, 0.0, double(kCheckpoints));
    const int k = static_cast<int>(std::lround(pos));
    const double anchor = lo + span * k / kCheckpoints;
    return checkpoints[k] + integrate(s, anchor, x, opts);
  }
};

namespace {

std::shared_ptr<Potential::Impl> make_impl(Potential::Kind kind, std::string description,
                                           std::function<double(double)> s,
                                           std::function<double(double)> S) {
  auto impl = std::make_shared<Potential::Impl>();
  impl->kind = kind;
  impl->description = std::move(description);
  impl->s = std::move(s);
  impl->S_exact = std::move(S);
  return impl;
}

std::string spec_number(double v) { return format_real(v); }

}  // namespace

Potential Potential::zero() {
  return Potential(make_impl(
      Kind::zero, "zero", [](double) { return 0.0; }, [](double) { return 0.0; }));
}

Potential Potential::constant(double c) {
  return Potential(make_impl(
      Kind::constant, "const:" + spec_number(c), [c](double) { return c; },
      [c](double x) { return c * x; }));
}

Potential Potential::sech(double amplitude, double rate) {
  if (!(rate != 0.0)) throw InvalidArgument("sech rate must be nonzero");
  return Potential(make_impl(
      Kind::sech, "sech:" + spec_number(amplitude) + ":" + spec_number(rate),
      [amplitude, rate](double x) { return amplitude / std::cosh(rate * x); },
      // (amplitude / rate) gd(rate x), gd(y) = 2 atan(tanh(y / 2))
      [amplitude, rate](double x) {
        return amplitude / rate * 2.0 * std::atan(std::tanh(0.5 * rate * x));
      }));
}

Potential Potential::gauss(double amplitude, double sigma) {
  if (!(sigma > 0.0)) throw InvalidArgument("gauss sigma must be positive");
  return Potential(make_impl(
      Kind::gauss, "gauss:" + spec_number(amplitude) + ":" + spec_number(sigma),
      [amplitude, sigma](double x) { return amplitude * std::exp(-x * x / (2.0 * sigma * sigma)); },
      [amplitude, sigma](double x) {
        return amplitude * sigma * std::sqrt(std::numbers::pi / 2.0) *
               std::erf(x / (sigma * std::numbers::sqrt2));
      }));
}

Potential Potential::table(std::vector<double> xs, std::vector<double> values) {
  if (xs.size() < 2 || xs.size() != values.size()) {
    throw InvalidArgument("potential table needs at least two (x, s) rows");
  }
  for (std::size_t i = 1; i < xs.size(); ++i) {
    if (!(xs[i] > xs[i - 1])) throw InvalidArgument("potential table abscissae must increase");
  }
  // Cumulative trapezoid sums are the exact antiderivative of the interpolant.
  std::vector<double> cumulative(xs.size(), 0.0);
  for (std::size_t i = 1; i < xs.size(); ++i) {
    cumulative[i] = cumulative[i - 1] + 0.5 * (xs[i] - xs[i - 1]) * (values[i] + values[i - 1]);
  }
  auto data = std::make_shared<std::tuple<std::vector<double>, std::vector<double>, std::vector<double>>>(
      std::move(xs), std::move(values), std::move(cumulative));
  auto locate = [data](double x) {
    const auto& [X, V, C] = *data;
    const double span = X.back() - X.front();
    if (x < X.front() - 1e-12 * span || x > X.back() + 1e-12 * span) {
      std::ostringstream msg;
      msg << "x = " << x << " is outside the potential table [" << X.front() << ", " << X.back()
          << "]";
      throw OutOfDomain(msg.str());
    }
    const auto it = std::upper_bound(X.begin(), X.end(), x);
    std::size_t i = static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, (it - X.begin()) - 1));
    i = std::min(i, X.size() - 2);
    return i;
  };
  auto s = [data, locate](double x) {
    const auto& [X, V, C] = *data;
    const std::size_t i = locate(x);
    const double w = (x - X[i]) / (X[i + 1] - X[i]);
    return (1.0 - w) * V[i] + w * V[i + 1];
  };
  auto S = [data, locate](double x) {
    const auto& [X, V, C] = *data;
    const std::size_t i = locate(x);
    const double d = x - X[i];
    const double slope = (V[i + 1] - V[i]) / (X[i + 1] - X[i]);
    return C[i] + V[i] * d + 0.5 * slope * d * d;
  };
  return Potential(make_impl(Kind::table, "table", s, S));
}

Potential Potential::custom(std::function<double(double)> s, double lo, double hi, std::string name) {
  if (!(lo < hi)) throw InvalidArgument("custom potential needs lo < hi");
  auto impl = make_impl(Kind::custom, std::move(name), std::move(s), {});
  impl->lo = lo;
  impl->hi = hi;
  return Potential(std::move(impl));
}

Potential Potential::with_quadrature_antiderivative(double lo, double hi) const {
  if (!(lo < hi)) throw InvalidArgument("quadrature interval needs lo < hi");
  auto impl = make_impl(impl_->kind, impl_->description, impl_->s, {});
  impl->lo = lo;
  impl->hi = hi;
  return Potential(std::move(impl));
}

namespace {

std::vector<std::string> split(std::string_view text, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    parts.emplace_back(text.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

double spec_real(const std::string& text, std::string_view spec) {
  try {
    return parse_real(text);
  } catch (const FormatError&) {
    throw PotentialParse("invalid number '" + text + "' in potential spec '" + std::string(spec) + "'");
  }
}

Potential read_table(const std::filesystem::path& path, std::string_view spec) {
  std::ifstream in(path);
  if (!in) throw PotentialParse("cannot open potential table '" + path.string() + "'");
  std::vector<double> xs, ss;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    if (first) {
      first = false;
      if (cells.size() == 2 && cells[0] == "x" && cells[1] == "s") continue;
    }
    if (cells.size() != 2) throw PotentialParse("potential table rows must have two columns: " + line);
    xs.push_back(spec_real(cells[0], spec));
    ss.push_back(spec_real(cells[1], spec));
  }
  try {
    Potential p = Potential::table(std::move(xs), std::move(ss));
    return p;
  } catch (const InvalidArgument& e) {
    throw PotentialParse(std::string("potential table '") + path.string() + "': " + e.what());
  }
}

}  // namespace

Potential Potential::parse(std::string_view spec, const std::filesystem::path& base_dir) {
  if (spec == "zero") return zero();
  const auto colon = spec.find(':');
  if (colon == std::string_view::npos) {
    throw PotentialParse("unknown potential spec '" + std::string(spec) + "'");
  }
  const std::string head(spec.substr(0, colon));
  if (head == "table") {
    std::filesystem::path path(std::string(spec.substr(colon + 1)));
    if (path.empty()) throw PotentialParse("table potential needs a path");
    if (path.is_relative() && !base_dir.empty()) path = base_dir / path;
    return read_table(path, spec);
  }
  const auto parts = split(spec, ':');
  try {
    if (head == "const" && parts.size() == 2) return constant(spec_real(parts[1], spec));
    if (head == "sech" && parts.size() == 3) {
      return sech(spec_real(parts[1], spec), spec_real(parts[2], spec));
    }
    if (head == "gauss" && parts.size() == 3) {
      return gauss(spec_real(parts[1], spec), spec_real(parts[2], spec));
    }
  } catch (const InvalidArgument& e) {
    throw PotentialParse("potential spec '" + std::string(spec) + "': " + e.what());
  }
  throw PotentialParse("unknown potential spec '" + std::string(spec) + "'");
}

double Potential::s(double x) const { return impl_->s(x); }

double Potential::S(double x) const {
  return impl_->S_exact ? impl_->S_exact(x) : impl_->quadrature_S(x);
}

Potential::Kind Potential::kind() const { return impl_->kind; }
bool Potential::has_exact_antiderivative() const { return static_cast<bool>(impl_->S_exact); }
const std::string& Potential::description() const { return impl_->description; }

double antiderivative_S(const Potential& p, double x) { return p.S(x); }

// ---------------------------------------------------------------------------
// Generating sequence

GridDomain default_zs_domain() { return GridDomain::make(-1.0, 2.0, -1.0, 2.0, 33, 33); }

namespace {

// (F_m, G_m) at x, or their x-derivatives when `derivative` is set.
std::pair<hnum, hnum> zs_generators(const Potential& p, int m, double x, bool derivative = false) {
  const double sign = (m % 2 == 0) ? 1.0 : -1.0;  // (-1)^m
  const double S = p.S(x);
  const double c = std::cos(S), sn = std::sin(S);
  if (!derivative) return {hnum{c, -sign * sn}, hnum{sign * sn, c}};
  const double s = p.s(x);
  return {hnum{-s * sn, -sign * s * c}, hnum{sign * s * c, -s * sn}};
}

}  // namespace

GeneratingPair zs_pair(const Potential& p, int m, const GridDomain& domain) {
  auto zero = [](const hnum&) { return hnum{}; };
  auto F = [p, m](const hnum& z) { return zs_generators(p, m, z.re).first; };
  auto G = [p, m](const hnum& z) { return zs_generators(p, m, z.re).second; };
  auto Fx = [p, m](const hnum& z) { return zs_generators(p, m, z.re, true).first; };
  auto Gx = [p, m](const hnum& z) { return zs_generators(p, m, z.re, true).second; };
  return GeneratingPair(HyperField::with_partials(F, Fx, zero),
                        HyperField::with_partials(G, Gx, zero), domain, kDefaultPairTolerance,
                        "zs[" + std::to_string(((m % 2) + 2) % 2) + "]");
}

GeneratingSequence zs_sequence(const Potential& p, const GridDomain& domain) {
  return GeneratingSequence([p, domain](int m) { return zs_pair(p, m, domain); }, 2);
}

// ---------------------------------------------------------------------------
// Modes

HyperField modes_to_W(const ModeField& modes, double fd_step) {
  return HyperField::analytic(
      [modes](const hnum& z) {
        const double np = modes.n_plus(z.re, z.im);
        const double nm = modes.n_minus(z.re, z.im);
        return hnum{nm + np, nm - np};
      },
      fd_step);
}

ModeField W_to_modes(const HyperField& W) {
  return {[W](double x, double t) {
            const hnum w = W({x, t});
            return 0.5 * (w.re - w.im);
          },
          [W](double x, double t) {
            const hnum w = W({x, t});
            return 0.5 * (w.re + w.im);
          }};
}

ZsResidual zs_residual(const ModeField& modes, const Potential& p, const hnum& z, double h) {
  if (!(h > 0.0)) throw InvalidArgument("difference step must be positive");
  const double x = z.re, t = z.im;
  auto dx = [&](const RealFn& f) { return (f(x + h, t) - f(x - h, t)) / (2.0 * h); };
  auto dt = [&](const RealFn& f) { return (f(x, t + h) - f(x, t - h)) / (2.0 * h); };
  const double s = p.s(x);
  return {dx(modes.n_plus) + dt(modes.n_plus) - s * modes.n_minus(x, t),
          dx(modes.n_minus) - dt(modes.n_minus) + s * modes.n_plus(x, t)};
}

hnum vekua_zs_residual(const HyperField& W, const Potential& p, const hnum& z) {
  return d_zbar(W, z) + (0.5 * p.s(z.re)) * hnum::j() * conj(W(z));
}

hnum recombine(const ZsResidual& r) { return {0.5 * (r.r1 + r.r2), 0.5 * (r.r2 - r.r1)}; }

// ---------------------------------------------------------------------------
// Spectral problem

std::pair<std::complex<double>, std::complex<double>> SpectralState::at(double xq) const {
  if (x.empty()) throw OutOfDomain("empty spectral state");
  const double span = x.back() - x.front();
  if (xq < x.front() - 1e-12 * std::abs(span) || xq > x.back() + 1e-12 * std::abs(span)) {
    std::ostringstream msg;
    msg << "x = " << xq << " is outside the spectral mesh [" << x.front() << ", " << x.back() << "]";
    throw OutOfDomain(msg.str());
  }
  const double h = (x.back() - x.front()) / static_cast<double>(x.size() - 1);
  const double pos = std::clamp((xq - x.front()) / h, 0.0, double(x.size() - 1));
  const std::size_t i = std::min(static_cast<std::size_t>(pos), x.size() - 2);
  const double u = pos - static_cast<double>(i);
  const double h00 = (1 + 2 * u) * (1 - u) * (1 - u);
  const double h10 = u * (1 - u) * (1 - u);
  const double h01 = u * u * (3 - 2 * u);
  const double h11 = u * u * (u - 1);
  auto hermite = [&](const std::vector<std::complex<double>>& v,
                     const std::vector<std::complex<double>>& dv) {
    return h00 * v[i] + h10 * h * dv[i] + h01 * v[i + 1] + h11 * h * dv[i + 1];
  };
  return {hermite(n1, dn1), hermite(n2, dn2)};
}

ModeField SpectralState::lift() const {
  auto self = std::make_shared<const SpectralState>(*this);
  return {[self](double xq, double t) {
            return std::real(self->at(xq).first * std::exp(std::complex<double>(0.0, self->k * t)));
          },
          [self](double xq, double t) {
            return std::real(self->at(xq).second * std::exp(std::complex<double>(0.0, self->k * t)));
          }};
}

SpectralState spectral_solve(const Potential& p, double k, double x_begin, double x_end,
                             std::complex<double> n1_init, std::complex<double> n2_init,
                             const SpectralOptions& opts) {
  if (!(x_end > x_begin)) throw InvalidArgument("spectral range needs x_begin < x_end");
  if (!(opts.step > 0.0)) throw InvalidArgument("spectral step must be positive");
  using cd = std::complex<double>;
  const cd ik(0.0, k);
  auto rhs = [&](double x, const cd& a, const cd& b) {
    const double s = p.s(x);
    return std::pair<cd, cd>{-ik * a + s * b, ik * b - s * a};
  };

  const auto steps = static_cast<std::size_t>(std::ceil((x_end - x_begin) / opts.step - 1e-9));
  const double h = (x_end - x_begin) / static_cast<double>(steps);
  SpectralState st;
  st.k = k;
  st.x.resize(steps + 1);
  st.n1.resize(steps + 1);
  st.n2.resize(steps + 1);
  st.dn1.resize(steps + 1);
  st.dn2.resize(steps + 1);
  st.x[0] = x_begin;
  st.n1[0] = n1_init;
  st.n2[0] = n2_init;
  for (std::size_t i = 0; i < steps; ++i) {
    const double x = st.x[i];
    const cd a = st.n1[i], b = st.n2[i];
    const auto [k1a, k1b] = rhs(x, a, b);
    st.dn1[i] = k1a;
    st.dn2[i] = k1b;
    const auto [k2a, k2b] = rhs(x + 0.5 * h, a + 0.5 * h * k1a, b + 0.5 * h * k1b);
    const auto [k3a, k3b] = rhs(x + 0.5 * h, a + 0.5 * h * k2a, b + 0.5 * h * k2b);
    const auto [k4a, k4b] = rhs(x + h, a + h * k3a, b + h * k3b);
    st.n1[i + 1] = a + (h / 6.0) * (k1a + 2.0 * k2a + 2.0 * k3a + k4a);
    st.n2[i + 1] = b + (h / 6.0) * (k1b + 2.0 * k2b + 2.0 * k3b + k4b);
    st.x[i + 1] = i + 1 == steps ? x_end : x_begin + static_cast<double>(i + 1) * h;
  }
  const auto [da, db] = rhs(st.x[steps], st.n1[steps], st.n2[steps]);
  st.dn1[steps] = da;
  st.dn2[steps] = db;

  const double e0 = std::norm(n1_init) + std::norm(n2_init);
  if (!(e0 > 0.0)) throw InvalidArgument("spectral initial state must be nonzero");
  double worst = 0.0;
  for (std::size_t i = 0; i <= steps; ++i) {
    worst = std::max(worst, std::abs(std::norm(st.n1[i]) + std::norm(st.n2[i]) - e0) / e0);
  }
  st.drift_per_unit_x = worst / (x_end - x_begin);
  if (st.drift_per_unit_x > opts.drift_tolerance) {
    std::ostringstream msg;
    msg << "conservation drift " << st.drift_per_unit_x << " per unit x at k = " << k
        << " exceeds " << opts.drift_tolerance << " (step " << h << ")";
    throw StepTooLarge(msg.str());
  }
  return st;
}

// ---------------------------------------------------------------------------
// Recursive integrals

namespace {

RecursiveIntegrals recursive_on(const PathDiscretization& disc, const Potential& p, int n) {
  const std::size_t count = disc.size();
  const auto nodes = disc.nodes();
  std::vector<double> c2(count), s2(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double S = p.S(nodes[i].re);
    c2[i] = std::cos(2.0 * S);
    s2[i] = std::sin(2.0 * S);
  }
  RecursiveIntegrals out;
  for (auto* v : {&out.X, &out.Y, &out.Xt, &out.Yt, &out.I, &out.It}) v->assign(n + 1, 0.0);
  out.X[0] = out.Y[0] = out.Xt[0] = out.Yt[0] = out.I[0] = out.It[0] = 1.0;

  std::vector<double> X(count, 1.0), Y(count, 1.0);
  std::vector<hnum> g(count), prefix(count);
  auto integral = [&](auto&& integrand, bool keep_prefix) {
    for (std::size_t i = 0; i < count; ++i) g[i] = hnum{integrand(i)};
    return keep_prefix ? disc.cumulative(g, prefix).re : disc.total(g).re;
  };
  for (int k = 1; k <= n; ++k) {
    out.Xt[k] = k * integral([&](std::size_t i) { return Y[i] * c2[i]; }, false);
    out.Yt[k] = k * integral([&](std::size_t i) { return X[i] * s2[i]; }, false);
    out.I[k] = k * integral([&](std::size_t i) { return X[i]; }, false);
    out.It[k] = k * integral([&](std::size_t i) { return Y[i]; }, false);
    const bool more = k < n;
    out.X[k] = k * integral([&](std::size_t i) { return X[i] * c2[i]; }, more);
    std::vector<double> nextX(count);
    if (more) {
      for (std::size_t i = 0; i < count; ++i) nextX[i] = k * prefix[i].re;
    }
    out.Y[k] = k * integral([&](std::size_t i) { return Y[i] * s2[i]; }, more);
    if (more) {
      for (std::size_t i = 0; i < count; ++i) Y[i] = k * prefix[i].re;
      X = std::move(nextX);
    }
  }
  return out;
}

}  // namespace

RecursiveIntegrals recursive_integrals(const Potential& p, int n, double x0, double x,
                                       const FormalPowerOptions& opts) {
  if (n < 0) throw InvalidArgument("recursive integral level must be non-negative");
  if (n == 0 || x == x0) {
    RecursiveIntegrals out;
    for (auto* v : {&out.X, &out.Y, &out.Xt, &out.Yt, &out.I, &out.It}) v->assign(n + 1, 0.0);
    out.X[0] = out.Y[0] = out.Xt[0] = out.Yt[0] = out.I[0] = out.It[0] = 1.0;
    return out;
  }
  const Polyline path = Polyline::segment(hnum{x0}, hnum{x});
  auto run = [&](int refine) {
    return recursive_on(PathDiscretization::uniform(path, opts.max_panel_length, opts.order, refine),
                        p, n);
  };
  auto distance = [](const RecursiveIntegrals& a, const RecursiveIntegrals& b) {
    double d = 0.0, scale = 1.0;
    for (int k = 0; k <= a.levels(); ++k) {
      for (auto m : {&RecursiveIntegrals::X, &RecursiveIntegrals::Y, &RecursiveIntegrals::Xt,
                     &RecursiveIntegrals::Yt, &RecursiveIntegrals::I, &RecursiveIntegrals::It}) {
        d = std::max(d, std::abs((a.*m)[k] - (b.*m)[k]));
        scale = std::max(scale, std::abs((b.*m)[k]));
      }
    }
    return d / scale;
  };
  int refine = 1;
  RecursiveIntegrals coarse = run(refine);
  for (int level = 0; level < opts.max_refinements; ++level) {
    refine *= 2;
    RecursiveIntegrals fine = run(refine);
    if (distance(coarse, fine) <= opts.tol) return fine;
    coarse = std::move(fine);
  }
  throw NoConvergence("recursive integrals did not converge under panel refinement");
}

// ---------------------------------------------------------------------------
// Closed forms

hnum closed_form_power(const Potential& p, int m, int n, const hnum& a, const hnum& z0,
                       const hnum& z, ClosedFormVariant variant) {
  const bool even = m % 2 == 0;
  if (n < 0 || n > 2 || (!even && n > 1)) {
    std::ostringstream msg;
    msg << "no closed form for Z_" << m << "^(" << n << ")";
    throw InvalidArgument(msg.str());
  }
  const double a1 = a.re, a2 = a.im;
  const double alpha = std::cos(p.S(z0.re));
  const double beta = std::sin(p.S(z0.re));
  const auto [F, G] = zs_generators(p, m, z.re);
  const double dt = z.im - z0.im;
  const double dx = z.re - z0.re;

  if (!even) {
    if (n == 0) return (a1 * alpha + a2 * beta) * F + (-a1 * beta + a2 * alpha) * G;
    const RecursiveIntegrals r = recursive_integrals(p, 1, z0.re, z.re);
    const double lam = a1 * alpha - a2 * beta;
    const double mu = a1 * beta + a2 * alpha;
    return (lam * r.X[1] + mu * r.Y[1] + dt * mu) * F +
           (mu * r.X[1] - lam * r.Y[1] + dt * lam) * G;
  }

  const double lam = a1 * alpha - a2 * beta;
  const double mu = a1 * beta + a2 * alpha;
  if (n == 0) return lam * F + mu * G;
  if (n == 1) {
    const RecursiveIntegrals r = recursive_integrals(p, 1, z0.re, z.re);
    const double c1 = a1 * alpha + a2 * beta;
    const double c2 = -a1 * beta + a2 * alpha;
    return (c1 * r.X[1] + (a1 * beta - a2 * alpha) * r.Y[1] + dt * c2) * F +
           (c2 * r.X[1] + c1 * r.Y[1] + dt * c1) * G;
  }

  const RecursiveIntegrals r = recursive_integrals(p, 2, z0.re, z.re);
  if (variant == ClosedFormVariant::rederived) {
    const double f = lam * r.X[2] + mu * r.Xt[2] + 2 * dt * mu * r.X[1] - mu * r.Yt[2] +
                     lam * r.Y[2] - 2 * dt * lam * r.Y[1] + lam * dt * dt;
    const double g = mu * r.X[2] - lam * r.Xt[2] + 2 * dt * lam * r.X[1] + lam * r.Yt[2] +
                     mu * r.Y[2] + 2 * dt * mu * r.Y[1] + mu * dt * dt;
    return f * F + g * G;
  }
  if (std::abs(dx) < 1e-6) {
    std::ostringstream msg;
    msg << "printed Z^(2) closed form divides by x - x0 = " << dx;
    throw CenterSingular(msg.str());
  }
  const double ratio = dt / dx;
  const double f = lam * r.X[2] + mu * r.Xt[2] + 2 * dt * mu * r.X[1] + (-mu) * r.Yt[2] +
                   lam * r.Y[2] + 2 * dt * (-lam) * r.Y[1] + ratio * mu * r.I[2] +
                   ratio * (-lam) * r.It[2] + 2 * dt * dt * lam;
  const double g = mu * r.X[2] + (-lam) * r.Xt[2] + 2 * dt * lam * r.X[1] + lam * r.Yt[2] +
                   mu * r.Y[2] + 2 * dt * mu * r.Y[1] + ratio * lam * r.I[2] + ratio * mu * r.It[2] +
                   2 * dt * dt * mu;
  return f * F + g * G;
}

}  // namespace hypervekua
