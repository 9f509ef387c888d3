#include "doctest.h"

#include <cmath>

#include "hypervekua/formal_powers.hpp"
#include "hypervekua/zakharov_shabat.hpp"

using namespace hypervekua;

namespace {

GeneratingSequence classical_sequence() {
  const GridDomain domain = GridDomain::make(-2, 2, -2, 2, 9, 9);
  return GeneratingSequence::periodic({GeneratingPair(
      HyperField::constant(hnum{1.0}), HyperField::constant(hnum::j()), domain)});
}

void check_close(const hnum& a, const hnum& b, double tol) {
  CHECK(max_norm(a - b) <= tol);
}

}  // namespace

TEST_CASE("z0 coefficients") {
  const auto classical = classical_sequence();
  auto c = z0_coefficients({0.3, -0.8}, {0.1, 0.1}, classical.pair(0));
  CHECK(c.phi == 0.3);
  CHECK(c.psi == -0.8);

  const Potential p = Potential::sech(1, 1);
  const hnum z0{0.7, 0.2}, a{1.5, -0.4};
  const double alpha = std::cos(p.S(z0.re)), beta = std::sin(p.S(z0.re));
  c = z0_coefficients(a, z0, zs_pair(p, 0));
  CHECK(c.phi == doctest::Approx(a.re * alpha - a.im * beta).epsilon(1e-14));
  CHECK(c.psi == doctest::Approx(a.re * beta + a.im * alpha).epsilon(1e-14));

  c = z0_coefficients(a, {0.0, 0.5}, zs_pair(p, 0));
  CHECK(c.phi == doctest::Approx(a.re).epsilon(1e-15));
  CHECK(c.psi == doctest::Approx(a.im).epsilon(1e-15));
}

TEST_CASE("classical powers") {
  const auto seq = classical_sequence();
  for (int n = 0; n <= 6; ++n) {
    for (hnum z : {hnum{0.3, 0.9}, hnum{-1.1, 0.4}, hnum{0.5, 0.5}}) {
      check_close(formal_power({0, n, hnum{1.0}, {}}, z, seq), pow(z, n), 1e-12);
    }
  }
  const hnum z0{0.2, -0.3}, a{0.4, 1.1};
  check_close(formal_power({0, 3, a, z0}, {0.9, 0.6}, seq), a * pow(hnum{0.7, 0.9}, 3), 1e-12);
}

TEST_CASE("normalization and degenerate arguments") {
  const auto seq = zs_sequence(Potential::gauss(1, 0.7));
  const hnum a{0.4, -0.9}, z0{0.3, 0.2};
  check_close(formal_power({0, 0, a, z0}, z0, seq), a, 1e-15);
  check_close(formal_power({1, 0, a, z0}, z0, seq), a, 1e-15);
  CHECK(formal_power({0, 3, a, z0}, z0, seq) == hnum{});
  CHECK_THROWS_AS((formal_power({0, 9, a, z0}, {0.5, 0.5}, seq)), DepthExceeded);
  CHECK_THROWS_AS((formal_power({0, -1, a, z0}, {0.5, 0.5}, seq)), InvalidArgument);
  FormalPowerOptions deep;
  deep.max_exponent = 10;
  CHECK_NOTHROW((formal_power({0, 9, a, z0}, {0.5, 0.5}, seq, deep)));
}

TEST_CASE("property (i): formal powers solve their Vekua equation") {
  const Potential p = Potential::sech(1, 1);
  const auto seq = zs_sequence(p);
  for (int m : {0, 1}) {
    for (int n : {1, 2, 3}) {
      const auto Z = formal_power_field({m, n, hnum{0.6, 0.8}, {0.2, 0.4}}, seq, {}, 1e-3);
      for (hnum z : {hnum{0.7, 0.9}, hnum{-0.1, 0.1}}) {
        CHECK(max_norm(vekua_residual(Z, seq.pair(m), z)) <= 5e-6);
      }
    }
  }
}

TEST_CASE("property (ii): real-linearity in the coefficient") {
  const auto seq = zs_sequence(Potential::sech(1, 1));
  const hnum z0{0.3, 0.6};
  const double a1 = 0.8, a2 = -1.7;
  for (int n : {0, 1, 2, 3}) {
    for (hnum z : {hnum{0.9, 1.2}, hnum{-0.2, 0.1}}) {
      const hnum lhs = formal_power({0, n, hnum{a1, a2}, z0}, z, seq);
      const hnum rhs = a1 * formal_power({0, n, hnum{1.0}, z0}, z, seq) +
                       a2 * formal_power({0, n, hnum::j(), z0}, z, seq);
      check_close(lhs, rhs, 1e-10);
    }
  }
}

TEST_CASE("property (iii): differential relation") {
  const auto seq = zs_sequence(Potential::sech(1, 1));
  const hnum a{0.5, 0.5}, z0{0.3, 0.6};
  for (int n : {1, 2, 3}) {
    const auto Z = formal_power_field({0, n, a, z0}, seq, {}, 1e-3);
    for (hnum z : {hnum{0.7, 1.1}, hnum{0.1, 0.3}}) {
      const hnum lower = formal_power({1, n - 1, a, z0}, z, seq);
      check_close(fg_derivative(Z, seq.pair(0), z), double(n) * lower, 5e-5);
    }
  }
}

TEST_CASE("property (iv): asymptotics near the center") {
  const auto seq = zs_sequence(Potential::constant(1.0));
  const hnum a{1.0, 0.3}, z0{0.3, 0.6};
  for (int n : {1, 2, 3}) {
    for (hnum dir : {hnum{1, 0.5}, hnum{-0.4, 1}, hnum{1, -1}}) {
      const double d1 = asymptotic_deviation({0, n, a, z0}, z0 + 1e-1 * dir, seq);
      const double d2 = asymptotic_deviation({0, n, a, z0}, z0 + 1e-2 * dir, seq);
      const double d3 = asymptotic_deviation({0, n, a, z0}, z0 + 1e-3 * dir, seq);
      // the normalized deviation is O(r)
      CHECK(d2 < 0.2 * d1);
      CHECK(d3 < 0.2 * d2);
      CHECK(d3 < 1e-2);
    }
  }
  // along the t-direction the pair is constant and Z^(1) = a (z - z0) exactly
  CHECK(asymptotic_deviation({0, 1, a, z0}, z0 + hnum{0, 0.1}, seq) <= 1e-14);
}

TEST_CASE("path independence") {
  const auto seq = zs_sequence(Potential::sech(1, 1));
  FormalPowerOptions l_path;
  l_path.path = PathKind::l_path;
  const hnum a{0.2, 0.9}, z0{0.3, 0.6};
  for (int n : {1, 2, 3, 4}) {
    for (hnum z : {hnum{0.9, 1.4}, hnum{-0.5, 0.1}, hnum{0.3, 1.0}}) {
      check_close(formal_power({1, n, a, z0}, z, seq), formal_power({1, n, a, z0}, z, seq, l_path),
                  2e-12);
    }
  }
}

TEST_CASE("grid tables are thread-count independent") {
  const auto seq = zs_sequence(Potential::sech(1, 1));
  const GridDomain grid = GridDomain::make(0, 1, 0, 1, 9, 7);
  const FormalPowerSpec spec{0, 3, hnum{1.0}, {0.5, 0.5}};
  const auto serial = formal_power_table(spec, grid, seq, {}, 1);
  const auto threaded = formal_power_table(spec, grid, seq, {}, 4);
  REQUIRE(serial.size() == grid.size());
  for (std::size_t i = 0; i < serial.size(); ++i) {
    CHECK(serial[i] == threaded[i]);
    CHECK(serial[i] == formal_power(spec, grid.node(i), seq));
  }
}
