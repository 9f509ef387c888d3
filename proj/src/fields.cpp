#include "hypervekua/fields.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "hypervekua/io.hpp"

namespace hypervekua {

GridDomain GridDomain::make(double x_min, double x_max, double t_min, double t_max, int nx,
                            int nt, bool time_like) {
  if (!(x_min < x_max) || !(t_min < t_max)) {
    throw InvalidArgument("grid bounds must satisfy x_min < x_max and t_min < t_max");
  }
  if (nx < 3 || nt < 3) throw InvalidArgument("grid needs at least 3 nodes per axis");
  return GridDomain{x_min, x_max, t_min, t_max, nx, nt, time_like};
}

bool GridDomain::contains(const hnum& z) const {
  // Relative slack absorbs rounding in node coordinates.
  const double ex = 1e-12 * (x_max - x_min);
  const double et = 1e-12 * (t_max - t_min);
  const bool in_rect = z.re >= x_min - ex && z.re <= x_max + ex && z.im >= t_min - et &&
                       z.im <= t_max + et;
  if (!in_rect) return false;
  return !time_like || (0.0 < z.re && z.re < z.im);
}

bool GridDomain::is_interior(const hnum& z, double margin) const {
  const double mx = margin * hx() * (1.0 - 1e-9);
  const double mt = margin * ht() * (1.0 - 1e-9);
  return z.re >= x_min + mx && z.re <= x_max - mx && z.im >= t_min + mt && z.im <= t_max - mt;
}

std::vector<hnum> GridDomain::interior_lattice(int n) const {
  std::vector<hnum> pts;
  pts.reserve(static_cast<std::size_t>(n) * n);
  for (int i = 1; i <= n; ++i) {
    for (int k = 1; k <= n; ++k) {
      pts.push_back({x_min + (x_max - x_min) * i / (n + 1), t_min + (t_max - t_min) * k / (n + 1)});
    }
  }
  return pts;
}

struct HyperField::Impl {
  HyperFn f;
  HyperFn fx;  // exact partials, both set or both empty
  HyperFn ft;
  double fd_step = kDefaultFdStep;
  std::optional<GridDomain> grid;
  // sampled storage, shape (nx, nt)
  Eigen::ArrayXXd re;
  Eigen::ArrayXXd im;
  bool sampled = false;

  hnum eval(const hnum& z) const {
    if (grid && !grid->contains(z)) {
      std::ostringstream msg;
      msg << "point " << z << " is outside the field's domain";
      throw OutOfDomain(msg.str());
    }
    if (!sampled) return f(z);
    return interpolate(z);
  }

  hnum interpolate(const hnum& z) const {
    const GridDomain& g = *grid;
    const double sx = std::clamp((z.re - g.x_min) / g.hx(), 0.0, double(g.nx - 1));
    const double st = std::clamp((z.im - g.t_min) / g.ht(), 0.0, double(g.nt - 1));
    const int ix = std::min(static_cast<int>(sx), g.nx - 2);
    const int it = std::min(static_cast<int>(st), g.nt - 2);
    const double wx = sx - ix;
    const double wt = st - it;
    auto lerp2 = [&](const Eigen::ArrayXXd& a) {
      return (1 - wx) * ((1 - wt) * a(ix, it) + wt * a(ix, it + 1)) +
             wx * ((1 - wt) * a(ix + 1, it) + wt * a(ix + 1, it + 1));
    };
    return {lerp2(re), lerp2(im)};
  }
};

HyperField HyperField::analytic(HyperFn f, double fd_step) {
  if (!(fd_step > 0.0)) throw InvalidArgument("fd_step must be positive");
  auto impl = std::make_shared<Impl>();
  impl->f = std::move(f);
  impl->fd_step = fd_step;
  return HyperField(std::move(impl));
}

HyperField HyperField::with_partials(HyperFn f, HyperFn fx, HyperFn ft) {
  auto impl = std::make_shared<Impl>();
  impl->f = std::move(f);
  impl->fx = std::move(fx);
  impl->ft = std::move(ft);
  return HyperField(std::move(impl));
}

HyperField HyperField::with_derivatives(HyperFn f, HyperFn dz, HyperFn dzbar) {
  // f_x = f_z + f_zbar, j f_t = f_z - f_zbar  =>  f_t = j (f_z - f_zbar)
  auto fx = [dz, dzbar](const hnum& z) { return dz(z) + dzbar(z); };
  auto ft = [dz, dzbar](const hnum& z) { return hnum::j() * (dz(z) - dzbar(z)); };
  return with_partials(std::move(f), fx, ft);
}

HyperField HyperField::sampled(const GridDomain& grid, Eigen::ArrayXXd re, Eigen::ArrayXXd im) {
  if (re.rows() != grid.nx || re.cols() != grid.nt || im.rows() != grid.nx ||
      im.cols() != grid.nt) {
    throw InvalidArgument("sample arrays must have shape (nx, nt)");
  }
  auto impl = std::make_shared<Impl>();
  impl->grid = grid;
  impl->re = std::move(re);
  impl->im = std::move(im);
  impl->sampled = true;
  return HyperField(std::move(impl));
}

HyperField HyperField::sample(const GridDomain& grid, const HyperFn& f) {
  Eigen::ArrayXXd re(grid.nx, grid.nt);
  Eigen::ArrayXXd im(grid.nx, grid.nt);
  for (int ix = 0; ix < grid.nx; ++ix) {
    for (int it = 0; it < grid.nt; ++it) {
      const hnum v = f(grid.node(ix, it));
      re(ix, it) = v.re;
      im(ix, it) = v.im;
    }
  }
  return sampled(grid, std::move(re), std::move(im));
}

HyperField HyperField::constant(const hnum& c) {
  auto zero = [](const hnum&) { return hnum{}; };
  return with_partials([c](const hnum&) { return c; }, zero, zero);
}

hnum HyperField::operator()(const hnum& z) const { return impl_->eval(z); }

Partials HyperField::partials(const hnum& z) const {
  const Impl& m = *impl_;
  if (m.fx) {
    if (m.grid && !m.grid->contains(z)) {
      std::ostringstream msg;
      msg << "point " << z << " is outside the field's domain";
      throw OutOfDomain(msg.str());
    }
    return {m.fx(z), m.ft(z)};
  }
  const auto [hx, ht] = fd_steps();
  if (m.grid) {
    const GridDomain& g = *m.grid;
    const bool fits = z.re - hx >= g.x_min - 1e-12 * hx && z.re + hx <= g.x_max + 1e-12 * hx &&
                      z.im - ht >= g.t_min - 1e-12 * ht && z.im + ht <= g.t_max + 1e-12 * ht;
    if (!fits) {
      std::ostringstream msg;
      msg << "difference stencil at " << z << " leaves the grid";
      throw OutOfDomain(msg.str());
    }
  }
  const hnum fx = (m.eval({z.re + hx, z.im}) - m.eval({z.re - hx, z.im})) / (2.0 * hx);
  const hnum ft = (m.eval({z.re, z.im + ht}) - m.eval({z.re, z.im - ht})) / (2.0 * ht);
  return {fx, ft};
}

bool HyperField::has_exact_derivatives() const { return static_cast<bool>(impl_->fx); }
bool HyperField::is_sampled() const { return impl_->sampled; }

std::pair<double, double> HyperField::fd_steps() const {
  if (impl_->fx) return {0.0, 0.0};
  if (impl_->sampled) return {impl_->grid->hx(), impl_->grid->ht()};
  return {impl_->fd_step, impl_->fd_step};
}

HyperField HyperField::with_fd_step(double h) const {
  if (impl_->sampled) throw InvalidArgument("sampled fields use their grid steps");
  auto self = *this;
  HyperField out = analytic([self](const hnum& z) { return self.impl_->f(z); }, h);
  if (impl_->grid) out = out.restricted_to(*impl_->grid);
  return out;
}

HyperField HyperField::restricted_to(const GridDomain& grid) const {
  if (impl_->sampled) throw InvalidArgument("sampled fields already carry a grid");
  auto impl = std::make_shared<Impl>(*impl_);
  impl->grid = grid;
  return HyperField(std::move(impl));
}

const std::optional<GridDomain>& HyperField::domain() const { return impl_->grid; }

const Eigen::ArrayXXd& HyperField::samples_re() const {
  if (!impl_->sampled) throw InvalidArgument("field is not sampled");
  return impl_->re;
}
const Eigen::ArrayXXd& HyperField::samples_im() const {
  if (!impl_->sampled) throw InvalidArgument("field is not sampled");
  return impl_->im;
}

HyperFn HyperField::function() const {
  return [self = *this](const hnum& z) { return self(z); };
}

namespace {

double combined_step(const HyperField& f, const HyperField& g) {
  const auto [fx, ft] = f.fd_steps();
  const auto [gx, gt] = g.fd_steps();
  const double h = std::max({fx, ft, gx, gt});
  return h > 0.0 ? h : kDefaultFdStep;
}

template <typename Value, typename Dx>
HyperField combine(const HyperField& f, const HyperField& g, Value value, Dx deriv) {
  if (f.has_exact_derivatives() && g.has_exact_derivatives()) {
    return HyperField::with_partials(
        [=](const hnum& z) { return value(f(z), g(z)); },
        [=](const hnum& z) {
          const Partials pf = f.partials(z);
          const Partials pg = g.partials(z);
          return deriv(f(z), g(z), pf.fx, pg.fx);
        },
        [=](const hnum& z) {
          const Partials pf = f.partials(z);
          const Partials pg = g.partials(z);
          return deriv(f(z), g(z), pf.ft, pg.ft);
        });
  }
  return HyperField::analytic([=](const hnum& z) { return value(f(z), g(z)); },
                              combined_step(f, g));
}

}  // namespace

HyperField operator+(const HyperField& f, const HyperField& g) {
  return combine(
      f, g, [](hnum a, hnum b) { return a + b; },
      [](hnum, hnum, hnum da, hnum db) { return da + db; });
}

HyperField operator-(const HyperField& f, const HyperField& g) {
  return combine(
      f, g, [](hnum a, hnum b) { return a - b; },
      [](hnum, hnum, hnum da, hnum db) { return da - db; });
}

HyperField operator*(const HyperField& f, const HyperField& g) {
  return combine(
      f, g, [](hnum a, hnum b) { return a * b; },
      [](hnum a, hnum b, hnum da, hnum db) { return da * b + a * db; });
}

HyperField operator*(const hnum& c, const HyperField& f) {
  return HyperField::constant(c) * f;
}

HyperField conj(const HyperField& f) {
  if (f.has_exact_derivatives()) {
    return HyperField::with_partials([f](const hnum& z) { return conj(f(z)); },
                                     [f](const hnum& z) { return conj(f.partials(z).fx); },
                                     [f](const hnum& z) { return conj(f.partials(z).ft); });
  }
  const auto [hx, ht] = f.fd_steps();
  return HyperField::analytic([f](const hnum& z) { return conj(f(z)); }, std::max(hx, ht));
}

hnum d_zbar(const HyperField& f, const hnum& z) {
  const Partials p = f.partials(z);
  return 0.5 * (p.fx - hnum::j() * p.ft);
}

hnum d_z(const HyperField& f, const hnum& z) {
  const Partials p = f.partials(z);
  return 0.5 * (p.fx + hnum::j() * p.ft);
}

HyperbolicDerivative hyperbolic_derivative(const HyperField& f, const hnum& z0,
                                           std::optional<double> tolerance) {
  const Partials p = f.partials(z0);
  const hnum dzbar = 0.5 * (p.fx - hnum::j() * p.ft);
  const hnum dz = 0.5 * (p.fx + hnum::j() * p.ft);
  double tol = 0.0;
  if (tolerance) {
    tol = *tolerance;
  } else {
    const auto [hx, ht] = f.fd_steps();
    const double h = std::max(hx, ht);
    const double scale = std::max(1.0, max_norm(f(z0)));
    tol = h > 0.0 ? 10.0 * h * h * scale : 1e-12 * scale;
  }
  if (max_norm(dzbar) > tol) {
    std::ostringstream msg;
    msg << "f_zbar(" << z0 << ") = " << dzbar << " exceeds tolerance " << tol;
    throw NotHyperbolicAnalytic(msg.str());
  }
  const double det = p.fx.re * p.ft.im - p.ft.re * p.fx.im;
  return {dz, !is_zero_divisor(dz) && det != 0.0, det};
}

void write_field_csv(std::ostream& os, const HyperField& f, const GridDomain& grid) {
  os << "x,t,re,im\n";
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const hnum z = grid.node(k);
    os << format_csv_pair(z) << ',' << format_csv_pair(f(z)) << '\n';
  }
}

namespace {

std::vector<double> unique_sorted(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  std::vector<double> out;
  for (double x : v) {
    if (out.empty() || std::abs(x - out.back()) > 1e-12 * std::max(1.0, std::abs(x))) {
      out.push_back(x);
    }
  }
  return out;
}

}  // namespace

HyperField read_field_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw FormatError("empty field CSV");
  if (line.rfind("x,t,re,im", 0) != 0) throw FormatError("field CSV header must be x,t,re,im");
  std::vector<std::array<double, 4>> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::array<double, 4> r{};
    std::stringstream ss(line);
    std::string cell;
    for (int c = 0; c < 4; ++c) {
      if (!std::getline(ss, cell, ',')) throw FormatError("short CSV row: " + line);
      r[c] = parse_real(cell);
    }
    rows.push_back(r);
  }
  std::vector<double> xs, ts;
  for (const auto& r : rows) {
    xs.push_back(r[0]);
    ts.push_back(r[1]);
  }
  xs = unique_sorted(xs);
  ts = unique_sorted(ts);
  if (xs.size() < 3 || ts.size() < 3 || rows.size() != xs.size() * ts.size()) {
    throw FormatError("field CSV does not cover a full grid");
  }
  const GridDomain grid = GridDomain::make(xs.front(), xs.back(), ts.front(), ts.back(),
                                           static_cast<int>(xs.size()), static_cast<int>(ts.size()));
  Eigen::ArrayXXd re(grid.nx, grid.nt), im(grid.nx, grid.nt);
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const hnum node = grid.node(k);
    if (std::abs(node.re - rows[k][0]) > 1e-9 * std::max(1.0, std::abs(node.re)) ||
        std::abs(node.im - rows[k][1]) > 1e-9 * std::max(1.0, std::abs(node.im))) {
      throw FormatError("field CSV rows are not in row-major grid order");
    }
    re(k / grid.nt, k % grid.nt) = rows[k][2];
    im(k / grid.nt, k % grid.nt) = rows[k][3];
  }
  return HyperField::sampled(grid, std::move(re), std::move(im));
}

std::string field_to_json(const HyperField& f, const GridDomain& grid) {
  nlohmann::json j;
  j["grid"] = {{"x_min", grid.x_min}, {"x_max", grid.x_max}, {"t_min", grid.t_min},
               {"t_max", grid.t_max}, {"nx", grid.nx},       {"nt", grid.nt},
               {"time_like", grid.time_like}};
  std::vector<double> re, im;
  re.reserve(grid.size());
  im.reserve(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const hnum v = f(grid.node(k));
    re.push_back(v.re);
    im.push_back(v.im);
  }
  j["re"] = re;
  j["im"] = im;
  return j.dump();
}

HyperField field_from_json(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    const auto& g = j.at("grid");
    const GridDomain grid = GridDomain::make(
        g.at("x_min").get<double>(), g.at("x_max").get<double>(), g.at("t_min").get<double>(),
        g.at("t_max").get<double>(), g.at("nx").get<int>(), g.at("nt").get<int>(),
        g.value("time_like", false));
    const auto re = j.at("re").get<std::vector<double>>();
    const auto im = j.at("im").get<std::vector<double>>();
    if (re.size() != grid.size() || im.size() != grid.size()) {
      throw FormatError("field JSON value count does not match grid");
    }
    Eigen::ArrayXXd are(grid.nx, grid.nt), aim(grid.nx, grid.nt);
    for (std::size_t k = 0; k < grid.size(); ++k) {
      are(k / grid.nt, k % grid.nt) = re[k];
      aim(k / grid.nt, k % grid.nt) = im[k];
    }
    return HyperField::sampled(grid, std::move(are), std::move(aim));
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("field JSON: ") + e.what());
  }
}

}  // namespace hypervekua
