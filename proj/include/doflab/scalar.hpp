#pragma once

// Scalar types used throughout doflab: double, exact rationals (GMP) and a
// 61-bit Mersenne prime field used for large exact rank computations.

#include <gmpxx.h>

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace doflab {

using Rational = mpq_class;

/// Parses "p/q" or "p" into a canonical rational. Throws on malformed input
/// or a zero denominator.
inline Rational parse_rational(std::string_view text) {
  std::string s(text);
  if (s.empty()) throw std::invalid_argument("empty rational literal");
  auto slash = s.find('/');
  mpz_class num, den(1);
  try {
    if (slash == std::string::npos) {
      num = mpz_class(s, 10);
    } else {
      num = mpz_class(s.substr(0, slash), 10);
      den = mpz_class(s.substr(slash + 1), 10);
    }
  } catch (const std::invalid_argument&) {
    throw std::invalid_argument("malformed rational literal '" + s + "'");
  }
  if (den == 0) throw std::invalid_argument("zero denominator in '" + s + "'");
  Rational r(num, den);
  r.canonicalize();
  return r;
}

/// num/den in lowest terms. mpq_class(num, den) alone leaves the pair
/// unreduced, which breaks equality and later arithmetic.
inline Rational make_rational(long num, long den) {
  if (den == 0) throw std::invalid_argument("zero denominator");
  Rational r(num, den);
  r.canonicalize();
  return r;
}

/// Always emits "p/q", including integers ("3/1").
inline std::string format_rational(const Rational& r) {
  return r.get_num().get_str() + "/" + r.get_den().get_str();
}

/// Element of GF(2^61 - 1).
struct ModP {
  static constexpr std::uint64_t kPrime = (std::uint64_t{1} << 61) - 1;
  std::uint64_t v = 0;

  constexpr ModP() = default;
  constexpr explicit ModP(std::uint64_t x) : v(x % kPrime) {}

  static constexpr std::uint64_t reduce(unsigned __int128 x) {
    std::uint64_t lo = static_cast<std::uint64_t>(x & kPrime);
    std::uint64_t hi = static_cast<std::uint64_t>(x >> 61);
    std::uint64_t s = lo + hi;
    return s >= kPrime ? s - kPrime : s;
  }

  friend constexpr ModP operator+(ModP a, ModP b) {
    std::uint64_t s = a.v + b.v;
    ModP r;
    r.v = s >= kPrime ? s - kPrime : s;
    return r;
  }
  friend constexpr ModP operator-(ModP a, ModP b) {
    ModP r;
    r.v = a.v >= b.v ? a.v - b.v : a.v + kPrime - b.v;
    return r;
  }
  friend constexpr ModP operator-(ModP a) { return ModP{} - a; }
  friend constexpr ModP operator*(ModP a, ModP b) {
    ModP r;
    r.v = reduce(static_cast<unsigned __int128>(a.v) * b.v);
    return r;
  }
  ModP& operator+=(ModP b) { return *this = *this + b; }
  ModP& operator-=(ModP b) { return *this = *this - b; }
  ModP& operator*=(ModP b) { return *this = *this * b; }

  constexpr ModP pow(std::uint64_t e) const {
    ModP base = *this, acc(1);
    while (e) {
      if (e & 1) acc = acc * base;
      base = base * base;
      e >>= 1;
    }
    return acc;
  }
  ModP inverse() const {
    if (v == 0) throw std::domain_error("inverse of zero in GF(p)");
    return pow(kPrime - 2);
  }
  friend ModP operator/(ModP a, ModP b) { return a * b.inverse(); }
  ModP& operator/=(ModP b) { return *this = *this / b; }

  friend constexpr bool operator==(ModP a, ModP b) { return a.v == b.v; }
  friend constexpr bool operator!=(ModP a, ModP b) { return a.v != b.v; }

  static ModP from_integer(const mpz_class& z) {
    return ModP(static_cast<std::uint64_t>(mpz_fdiv_ui(z.get_mpz_t(), kPrime)));
  }
  /// Homomorphic image of a rational; its denominator must be a unit mod p.
  static ModP from_rational(const Rational& r) {
    ModP den = from_integer(r.get_den());
    if (den.v == 0) throw std::domain_error("denominator divisible by the field prime");
    return from_integer(r.get_num()) * den.inverse();
  }
};

// Uniform per-type helpers so the templated algorithms can ask for zero tests
// and conversions without caring which scalar they run on.
template <class T>
struct ScalarTraits;

template <>
struct ScalarTraits<double> {
  static constexpr bool exact = false;
  static double zero() { return 0.0; }
  static double one() { return 1.0; }
  static double to_double(double x) { return x; }
  static double from_rational(const Rational& r) { return r.get_d(); }
  static bool is_zero(double x, double tol) { return std::abs(x) <= tol; }
  static double magnitude(double x) { return std::abs(x); }
  static std::string name() { return "float64"; }
};

template <>
struct ScalarTraits<Rational> {
  static constexpr bool exact = true;
  static Rational zero() { return Rational(0); }
  static Rational one() { return Rational(1); }
  static double to_double(const Rational& x) { return x.get_d(); }
  static Rational from_rational(const Rational& r) { return r; }
  static bool is_zero(const Rational& x, double /*tol*/) { return sgn(x) == 0; }
  static double magnitude(const Rational& x) { return std::abs(x.get_d()); }
  static std::string name() { return "Q"; }
};

template <>
struct ScalarTraits<ModP> {
  static constexpr bool exact = true;
  static ModP zero() { return ModP(0); }
  static ModP one() { return ModP(1); }
  static double to_double(ModP x) { return static_cast<double>(x.v); }
  static ModP from_rational(const Rational& r) { return ModP::from_rational(r); }
  static bool is_zero(ModP x, double /*tol*/) { return x.v == 0; }
  static double magnitude(ModP x) { return x.v == 0 ? 0.0 : 1.0; }
  static std::string name() { return "GF(2^61-1)"; }
};

template <class T>
double to_double(const T& x) {
  return ScalarTraits<T>::to_double(x);
}

}  // namespace doflab
