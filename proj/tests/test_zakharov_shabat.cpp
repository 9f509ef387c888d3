#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "hypervekua/quadrature.hpp"
#include "hypervekua/zakharov_shabat.hpp"

using namespace hypervekua;
using cd = std::complex<double>;

namespace {

void check_close(const hnum& a, const hnum& b, double tol) {
  CHECK(max_norm(a - b) <= tol);
}

double gd(double x) { return 2.0 * std::atan(std::tanh(x / 2.0)); }

// Independent oracle: the recursive family by nested adaptive Simpson.
struct NestedOracle {
  const Potential& p;
  double x0;

  double c2(double x) const { return std::cos(2 * p.S(x)); }
  double s2(double x) const { return std::sin(2 * p.S(x)); }
  double X1(double x) const { return integrate([&](double u) { return c2(u); }, x0, x, {1e-13}); }
  double Y1(double x) const { return integrate([&](double u) { return s2(u); }, x0, x, {1e-13}); }
  double level2(double x, bool inner_x, int weight) const {
    return 2 * integrate(
                   [&](double u) {
                     const double inner = inner_x ? X1(u) : Y1(u);
                     return inner * (weight == 0 ? c2(u) : weight == 1 ? s2(u) : 1.0);
                   },
                   x0, x, {1e-11});
  }
};

}  // namespace

TEST_CASE("potential antiderivatives") {
  CHECK(antiderivative_S(Potential::zero(), 0.7) == 0.0);
  CHECK(antiderivative_S(Potential::constant(2.5), 0.4) == doctest::Approx(1.0));
  const Potential sech = Potential::sech(1, 1);
  for (double x : {-0.9, 0.0, 0.3, 1.7}) CHECK(sech.S(x) == doctest::Approx(gd(x)).epsilon(1e-15));

  const Potential quad = sech.with_quadrature_antiderivative(-1, 2);
  CHECK_FALSE(quad.has_exact_antiderivative());
  for (double x : {-0.9, 0.0, 0.3, 1.7, 2.0}) {
    CHECK(std::abs((quad.S(x) - quad.S(0.0)) - gd(x)) <= 1e-9);
  }
  CHECK_THROWS_AS(quad.S(2.5), OutOfDomain);

  const Potential g = Potential::gauss(0.5, 0.3);
  CHECK(std::abs(g.S(0.8) - integrate([&](double u) { return g.s(u); }, 0, 0.8, {1e-13})) <= 1e-12);

  const Potential t = Potential::table({0, 1, 3}, {1, 3, -1});
  CHECK(t.s(0.5) == 2.0);
  CHECK(t.S(0.0) == 0.0);
  CHECK(t.S(1.0) == doctest::Approx(2.0));
  CHECK(t.S(2.0) == doctest::Approx(4.0));
  CHECK_THROWS_AS(t.s(3.5), OutOfDomain);
}

TEST_CASE("potential spec parsing") {
  CHECK(Potential::parse("zero").kind() == Potential::Kind::zero);
  CHECK(Potential::parse("const:1.5").s(3.0) == 1.5);
  CHECK(Potential::parse("sech:2:0.5").s(0.0) == 2.0);
  CHECK(Potential::parse("gauss:1:0.5").s(0.5) == doctest::Approx(std::exp(-0.5)));
  for (auto bad : {"", "sech:1", "const:x", "wave:1", "gauss:1:-1", "table:"}) {
    CHECK_THROWS_AS(Potential::parse(bad), PotentialParse);
  }

  const auto dir = std::filesystem::temp_directory_path() / "hypervekua_test_table";
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "s.csv") << "x,s\n-1,0\n0,1\n2,1\n";
  const Potential t = Potential::parse("table:s.csv", dir);
  CHECK(t.kind() == Potential::Kind::table);
  CHECK(t.s(-0.5) == 0.5);
  CHECK_THROWS_AS(Potential::parse("table:missing.csv", dir), PotentialParse);
  std::filesystem::remove_all(dir);
}

TEST_CASE("pair closed forms") {
  const Potential p = Potential::sech(1, 1);
  const double x = 0.8, S = gd(x);
  const auto p0 = zs_pair(p, 0);
  const auto p1 = zs_pair(p, 1);
  const hnum z{x, 0.3};
  check_close(p0.F()(z), hnum{std::cos(S), -std::sin(S)}, 1e-15);
  check_close(p0.G()(z), hnum{std::sin(S), std::cos(S)}, 1e-15);
  check_close(p1.F()(z), hnum{std::cos(S), std::sin(S)}, 1e-15);
  check_close(p1.G()(z), hnum{-std::sin(S), std::cos(S)}, 1e-15);
  const auto p2 = zs_pair(p, 2);
  const auto pm1 = zs_pair(p, -1);
  for (std::size_t k = 0; k < p0.domain().size(); k += 13) {
    const hnum w = p0.domain().node(k);
    CHECK(p2.F()(w) == p0.F()(w));
    CHECK(p2.G()(w) == p0.G()(w));
    CHECK(pm1.F()(w) == p1.F()(w));
  }
}

TEST_CASE("pair identities and exact derivatives") {
  for (const auto& spec : {"const:1", "sech:1:1", "gauss:0.7:0.4"}) {
    const Potential p = Potential::parse(spec);
    for (int m : {0, 1}) {
      const auto pair = zs_pair(p, m);
      for (hnum z : {hnum{-0.7, 0.2}, hnum{0.4, 1.5}, hnum{1.9, -0.9}}) {
        const hnum F = pair.F()(z), G = pair.G()(z);
        CHECK(std::abs((conj(F) * G).im - 1.0) <= 1e-12);
        CHECK(max_norm(F * F + G * G - hnum{2.0}) <= 1e-12);
        CHECK(max_norm(F * conj(F) + G * conj(G)) <= 1e-12);
        // derivative signs alternate with m
        const double half_s = (m % 2 == 0 ? 1.0 : -1.0) * p.s(z.re) / 2;
        check_close(d_zbar(pair.F(), z), -half_s * G, 1e-12);
        check_close(d_z(pair.F(), z), -half_s * G, 1e-12);
        check_close(d_zbar(pair.G(), z), half_s * F, 1e-12);
        check_close(d_z(pair.G(), z), half_s * F, 1e-12);
      }
    }
  }
}

TEST_CASE("sequence coefficients alternate with period two") {
  const Potential p = Potential::sech(1, 1);
  const auto seq = zs_sequence(p);
  REQUIRE(seq.period() == 2);
  for (int m = 0; m < 4; ++m) {
    const double sign = m % 2 == 0 ? -1.0 : 1.0;
    const hnum z{0.3, 0.7};
    const auto c = seq.pair(m).coefficients(z);
    CHECK(max_norm(c.a) <= 1e-15);
    CHECK(max_norm(c.A) <= 1e-15);
    check_close(c.b, sign * (p.s(z.re) / 2) * hnum::j(), 1e-15);
  }
  CHECK(check_successor_chain(seq, 0, 4, 1e-12));
  CHECK(check_period(seq, 0, 1e-12));
  CHECK(check_period(seq, 1, 1e-12));
}

TEST_CASE("mode translation") {
  const ModeField constant{[](double, double) { return 0.0; }, [](double, double) { return 1.0; }};
  check_close(modes_to_W(constant)({0.1, 0.2}), hnum{1, 1}, 0.0);

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> d(-2, 2);
  const double c1 = d(rng), c2 = d(rng), c3 = d(rng);
  const ModeField random{[=](double x, double t) { return c1 * std::sin(x + c2 * t); },
                         [=](double x, double t) { return c3 * x * t - c2; }};
  const ModeField back = W_to_modes(modes_to_W(random));
  for (int i = 0; i < 50; ++i) {
    const double x = d(rng), t = d(rng);
    CHECK(std::abs(back.n_plus(x, t) - random.n_plus(x, t)) <= 1e-15);
    CHECK(std::abs(back.n_minus(x, t) - random.n_minus(x, t)) <= 1e-15);
  }
}

TEST_CASE("transport residuals") {
  const Potential zero = Potential::zero();
  const ModeField transport{[](double x, double t) { return std::sin(x - t); },
                            [](double x, double t) { return std::exp(-(x + t) * (x + t)); }};
  const auto r = zs_residual(transport, zero, {0.3, 0.4}, 1e-3);
  CHECK(std::abs(r.r1) <= 1e-6);
  CHECK(std::abs(r.r2) <= 1e-6);

  const Potential one = Potential::constant(1);
  // W = 1: W_zbar = 0, residual (j/2) conj(1)
  check_close(vekua_zs_residual(HyperField::constant(hnum{1.0}), one, {0.5, 0.5}), hnum{0, 0.5},
              1e-15);

  const Potential sech = Potential::sech(1, 1);
  const auto pair = zs_pair(sech, 0);
  CHECK(max_norm(vekua_zs_residual(pair.F(), sech, {0.2, 0.6})) <= 1e-10);
  CHECK(max_norm(vekua_zs_residual(pair.G(), sech, {0.2, 0.6})) <= 1e-10);
}

TEST_CASE("ZS and generic Vekua residuals agree") {
  const Potential p = Potential::sech(1, 1);
  const auto seq = zs_sequence(p);
  const auto W = formal_power_field({0, 2, hnum{0.3, 1.0}, {0.1, 0.5}}, seq, {}, 1e-3);
  for (hnum z : {hnum{0.4, 0.9}, hnum{-0.3, 0.2}}) {
    check_close(vekua_zs_residual(W, p, z), vekua_residual(W, seq.pair(0), z), 1e-12);
    CHECK(max_norm(vekua_zs_residual(W, p, z)) <= 5e-6);

    const auto modes = W_to_modes(W);
    check_close(recombine(zs_residual(modes, p, z, 1e-3)), vekua_zs_residual(W, p, z), 1e-12);
  }
}

TEST_CASE("spectral solver without potential") {
  const Potential zero = Potential::zero();
  const double k = 1.3;
  const cd n1{0.4, -0.2}, n2{1.0, 0.5};
  const auto st = spectral_solve(zero, k, 0.0, 2.0, n1, n2);
  for (double x : {0.0, 0.77, 1.3333, 2.0}) {
    const auto [a, b] = st.at(x);
    CHECK(std::abs(a - n1 * std::exp(cd(0, -k * x))) <= 1e-11);
    CHECK(std::abs(b - n2 * std::exp(cd(0, k * x))) <= 1e-11);
  }
  CHECK_THROWS_AS(st.at(2.5), OutOfDomain);
  CHECK_THROWS_AS(spectral_solve(zero, k, 1.0, 0.0, n1, n2), InvalidArgument);
}

TEST_CASE("spectral conservation and step control") {
  const Potential sech = Potential::sech(1, 1);
  const auto st = spectral_solve(sech, 1.0, -1.0, 2.0, {1.0, 0.0}, {0.0, 0.5});
  CHECK(st.drift_per_unit_x <= 1e-8);
  SpectralOptions coarse;
  coarse.step = 0.5;
  CHECK_THROWS_AS((spectral_solve(sech, 40.0, -1.0, 2.0, {1.0, 0.0}, {0.0, 0.5}, coarse)),
                  StepTooLarge);
}

TEST_CASE("Fourier bridge") {
  const Potential sech = Potential::sech(1, 1);
  for (double k : {0.5, 1.0, 2.0}) {
    const auto st = spectral_solve(sech, k, -1.0, 2.0, {1.0, 0.2}, {-0.3, 0.8});
    const ModeField modes = st.lift();
    for (hnum z : {hnum{0.0, 0.0}, hnum{0.5, 1.3}, hnum{1.5, -0.7}}) {
      const auto r = zs_residual(modes, sech, z, 1e-3);
      CHECK(std::abs(r.r1) <= 1e-5);
      CHECK(std::abs(r.r2) <= 1e-5);
    }
  }
}

TEST_CASE("recursive integrals") {
  const auto r0 = recursive_integrals(Potential::sech(1, 1), 0, 0.1, 0.9);
  CHECK(r0.levels() == 0);
  for (const auto* v : {&r0.X, &r0.Y, &r0.Xt, &r0.Yt, &r0.I, &r0.It}) CHECK((*v)[0] == 1.0);

  const auto z = recursive_integrals(Potential::zero(), 2, 0.2, 0.9);
  CHECK(z.X[1] == doctest::Approx(0.7).epsilon(1e-14));
  CHECK(std::abs(z.Y[1]) <= 1e-15);
  CHECK(z.X[2] == doctest::Approx(0.49).epsilon(1e-14));

  const double c = 1.0, x0 = 0.2, x = 0.9;
  const auto r = recursive_integrals(Potential::constant(c), 1, x0, x);
  CHECK(r.X[1] == doctest::Approx((std::sin(2 * c * x) - std::sin(2 * c * x0)) / (2 * c)).epsilon(1e-13));
  CHECK(r.Y[1] == doctest::Approx((std::cos(2 * c * x0) - std::cos(2 * c * x)) / (2 * c)).epsilon(1e-13));

  const Potential sech = Potential::sech(1, 1);
  for (auto [a, b] : {std::pair{0.3, 1.1}, std::pair{0.8, -0.4}}) {
    const auto got = recursive_integrals(sech, 2, a, b);
    const NestedOracle oracle{sech, a};
    CHECK(std::abs(got.X[1] - oracle.X1(b)) <= 1e-10);
    CHECK(std::abs(got.Y[1] - oracle.Y1(b)) <= 1e-10);
    CHECK(std::abs(got.X[2] - oracle.level2(b, true, 0)) <= 1e-9);
    CHECK(std::abs(got.Y[2] - oracle.level2(b, false, 1)) <= 1e-9);
    CHECK(std::abs(got.Xt[2] - oracle.level2(b, false, 0)) <= 1e-9);
    CHECK(std::abs(got.Yt[2] - oracle.level2(b, true, 1)) <= 1e-9);
    CHECK(std::abs(got.I[2] - oracle.level2(b, true, 2)) <= 1e-9);
    CHECK(std::abs(got.It[2] - oracle.level2(b, false, 2)) <= 1e-9);
  }
  const auto same = recursive_integrals(sech, 3, 0.5, 0.5);
  CHECK(same.X[3] == 0.0);
  CHECK(same.I[0] == 1.0);
}

TEST_CASE("closed forms against the generic construction") {
  const hnum a{0.7, -0.4}, z0{0.3, 0.6};
  check_close(closed_form_power(Potential::zero(), 0, 1, hnum{1.0}, {}, {0.4, 0.9}), hnum{0.4, 0.9},
              1e-15);
  for (const auto& spec : {"const:1", "sech:1:1"}) {
    const Potential p = Potential::parse(spec);
    const auto seq = zs_sequence(p);
    check_close(closed_form_power(p, 0, 0, a, z0, z0), a, 1e-15);
    for (hnum z : {hnum{0.9, 1.2}, hnum{-0.4, 0.1}, hnum{0.3, 1.5}}) {
      check_close(closed_form_power(p, 0, 0, a, z0, z), formal_power({0, 0, a, z0}, z, seq), 1e-12);
      check_close(closed_form_power(p, 1, 0, a, z0, z), formal_power({1, 0, a, z0}, z, seq), 1e-12);
      check_close(closed_form_power(p, 0, 1, a, z0, z), formal_power({0, 1, a, z0}, z, seq), 1e-10);
      check_close(closed_form_power(p, 1, 1, a, z0, z), formal_power({1, 1, a, z0}, z, seq), 1e-10);
      check_close(closed_form_power(p, 2, 1, a, z0, z), formal_power({2, 1, a, z0}, z, seq), 1e-10);
      check_close(closed_form_power(p, 0, 2, a, z0, z, ClosedFormVariant::rederived),
                  formal_power({0, 2, a, z0}, z, seq), 1e-10);
    }
  }
}

TEST_CASE("printed second-order closed form") {
  const Potential zero = Potential::zero();
  // With s = 0 the printed expression does not reduce to z^2.
  const hnum z{0.5, 0.2};
  const hnum printed = closed_form_power(zero, 0, 2, hnum{1.0}, {}, z);
  check_close(printed, hnum{0.25 + 2 * 0.04, 3 * 0.1}, 1e-14);
  check_close(closed_form_power(zero, 0, 2, hnum{1.0}, {}, z, ClosedFormVariant::rederived), z * z,
              1e-14);
  CHECK_THROWS_AS((closed_form_power(zero, 0, 2, hnum{1.0}, {0.5, 0.0}, {0.5, 1.0})), CenterSingular);
  CHECK_NOTHROW((closed_form_power(zero, 0, 2, hnum{1.0}, {0.5, 0.0}, {0.5, 1.0},
                                  ClosedFormVariant::rederived)));
  CHECK_THROWS_AS((closed_form_power(zero, 1, 2, hnum{1.0}, {}, z)), InvalidArgument);
  CHECK_THROWS_AS((closed_form_power(zero, 0, 3, hnum{1.0}, {}, z)), InvalidArgument);
}
