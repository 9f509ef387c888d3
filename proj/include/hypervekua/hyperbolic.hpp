#pragma once

// Split-complex (hyperbolic, duplex) numbers x + j t with j^2 = 1.
//
// The ring has zero divisors on the light cone |x| = |t|. In the idempotent
// basis e+ = (1+j)/2, e- = (1-j)/2 the ring is R (+) R, so multiplication
// and inversion act componentwise on p = x + t and q = x - t.

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "hypervekua/errors.hpp"

namespace hypervekua {

template <typename Scalar>
struct Hyperbolic {
  Scalar re{0};  ///< x component
  Scalar im{0};  ///< t component, coefficient of j

  constexpr Hyperbolic() = default;
  constexpr Hyperbolic(Scalar real) : re(real), im(0) {}  // NOLINT(implicit)
  constexpr Hyperbolic(Scalar real, Scalar imag) : re(real), im(imag) {}

  static constexpr Hyperbolic j() { return {Scalar(0), Scalar(1)}; }

  constexpr Hyperbolic& operator+=(const Hyperbolic& o) {
    re += o.re;
    im += o.im;
    return *this;
  }
  constexpr Hyperbolic& operator-=(const Hyperbolic& o) {
    re -= o.re;
    im -= o.im;
    return *this;
  }
  constexpr Hyperbolic& operator*=(const Hyperbolic& o) {
    const Scalar r = re * o.re + im * o.im;
    const Scalar i = re * o.im + im * o.re;
    re = r;
    im = i;
    return *this;
  }
  constexpr Hyperbolic& operator*=(Scalar s) {
    re *= s;
    im *= s;
    return *this;
  }
  constexpr Hyperbolic& operator/=(Scalar s) {
    re /= s;
    im /= s;
    return *this;
  }

  friend constexpr bool operator==(const Hyperbolic&, const Hyperbolic&) = default;
};

using hnum = Hyperbolic<double>;

/// Coordinates in the idempotent basis: value = p e+ + q e-.
template <typename Scalar>
struct IdempotentCoords {
  Scalar p{0};
  Scalar q{0};
};

template <typename S>
constexpr Hyperbolic<S> operator+(Hyperbolic<S> a, const Hyperbolic<S>& b) {
  return a += b;
}
template <typename S>
constexpr Hyperbolic<S> operator-(Hyperbolic<S> a, const Hyperbolic<S>& b) {
  return a -= b;
}
template <typename S>
constexpr Hyperbolic<S> operator-(const Hyperbolic<S>& a) {
  return {-a.re, -a.im};
}
template <typename S>
constexpr Hyperbolic<S> operator*(Hyperbolic<S> a, const Hyperbolic<S>& b) {
  return a *= b;
}
template <typename S>
constexpr Hyperbolic<S> operator*(Hyperbolic<S> a, S s) {
  return a *= s;
}
template <typename S>
constexpr Hyperbolic<S> operator*(S s, Hyperbolic<S> a) {
  return a *= s;
}
template <typename S>
constexpr Hyperbolic<S> operator/(Hyperbolic<S> a, S s) {
  return a /= s;
}

template <typename S>
constexpr Hyperbolic<S> mul(const Hyperbolic<S>& a, const Hyperbolic<S>& b) {
  return a * b;
}

template <typename S>
constexpr Hyperbolic<S> conj(const Hyperbolic<S>& a) {
  return {a.re, -a.im};
}

/// z conj(z) = re^2 - im^2 (a real number; may be negative or zero).
template <typename S>
constexpr S modulus_squared(const Hyperbolic<S>& a) {
  return a.re * a.re - a.im * a.im;
}

/// Componentwise max norm. Unlike the hyperbolic modulus this never
/// vanishes for a nonzero element.
template <typename S>
S max_norm(const Hyperbolic<S>& a) {
  return std::max(std::abs(a.re), std::abs(a.im));
}

template <typename S>
constexpr IdempotentCoords<S> to_idempotent(const Hyperbolic<S>& a) {
  return {a.re + a.im, a.re - a.im};
}

template <typename S>
constexpr Hyperbolic<S> from_idempotent(const IdempotentCoords<S>& c) {
  return {(c.p + c.q) / S(2), (c.p - c.q) / S(2)};
}

/// Light-cone test: exact |re| == |im| or within 1e-14 relative.
template <typename S>
bool is_zero_divisor(const Hyperbolic<S>& a) {
  const S ar = std::abs(a.re);
  const S ai = std::abs(a.im);
  if (ar == ai) return true;
  return std::abs(ar - ai) <= S(1e-14) * std::max(ar, ai);
}

template <typename S>
bool is_invertible(const Hyperbolic<S>& a) {
  return !is_zero_divisor(a);
}

template <typename S>
std::ostream& operator<<(std::ostream& os, const Hyperbolic<S>& a) {
  return os << a.re << (a.im < 0 ? " - " : " + ") << std::abs(a.im) << "j";
}

/// conj(a) / (re^2 - im^2). Throws ZeroDivisor on the light cone.
template <typename S>
Hyperbolic<S> inverse(const Hyperbolic<S>& a) {
  if (is_zero_divisor(a)) {
    std::ostringstream msg;
    msg << "element " << a << " lies on the light cone and has no inverse";
    throw ZeroDivisor(msg.str());
  }
  return conj(a) / modulus_squared(a);
}

template <typename S>
Hyperbolic<S> operator/(const Hyperbolic<S>& a, const Hyperbolic<S>& b) {
  return a * inverse(b);
}

/// Non-negative integer power by repeated squaring.
template <typename S>
constexpr Hyperbolic<S> pow(Hyperbolic<S> base, unsigned n) {
  Hyperbolic<S> result{S(1), S(0)};
  while (n > 0) {
    if (n & 1u) result *= base;
    base *= base;
    n >>= 1u;
  }
  return result;
}

}  // namespace hypervekua
