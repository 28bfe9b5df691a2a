// Exact rational arithmetic for edge lengths and exponent bookkeeping.
// Exponents of the secular exponential polynomial are integer combinations of
// the edge lengths; keeping them exact is what makes cancellation detection
// and the effective-size computation reliable.
#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>

namespace qgr {

class Rational {
 public:
  Rational() : num_(0), den_(1) {}
  Rational(long long n) : num_(n), den_(1) {}
  Rational(long long n, long long d) : num_(n), den_(d) { normalize(); }

  long long num() const { return num_; }
  long long den() const { return den_; }

  double to_double() const {
    return static_cast<double>(num_) / static_cast<double>(den_);
  }

  Rational operator-() const { return Rational(-num_, den_, tag{}); }

  friend Rational operator+(const Rational& a, const Rational& b) {
    return from_i128(i128(a.num_) * b.den_ + i128(b.num_) * a.den_,
                     i128(a.den_) * b.den_);
  }
  friend Rational operator-(const Rational& a, const Rational& b) {
    return a + (-b);
  }
  friend Rational operator*(const Rational& a, const Rational& b) {
    return from_i128(i128(a.num_) * b.num_, i128(a.den_) * b.den_);
  }
  friend Rational operator/(const Rational& a, const Rational& b) {
    if (b.num_ == 0) throw std::domain_error("rational division by zero");
    return from_i128(i128(a.num_) * b.den_, i128(a.den_) * b.num_);
  }

  Rational& operator+=(const Rational& o) { return *this = *this + o; }
  Rational& operator-=(const Rational& o) { return *this = *this - o; }
  Rational& operator*=(const Rational& o) { return *this = *this * o; }
  Rational& operator/=(const Rational& o) { return *this = *this / o; }

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend bool operator!=(const Rational& a, const Rational& b) {
    return !(a == b);
  }
  friend bool operator<(const Rational& a, const Rational& b) {
    return i128(a.num_) * b.den_ < i128(b.num_) * a.den_;
  }
  friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
  friend bool operator<=(const Rational& a, const Rational& b) {
    return !(b < a);
  }
  friend bool operator>=(const Rational& a, const Rational& b) {
    return !(a < b);
  }

  std::string str() const {
    if (den_ == 1) return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(den_);
  }

  // Parses "p" or "p/q". Returns nullopt on malformed input.
  static std::optional<Rational> parse(const std::string& s) {
    try {
      auto slash = s.find('/');
      std::size_t pos = 0;
      if (slash == std::string::npos) {
        long long n = std::stoll(s, &pos);
        if (pos != s.size()) return std::nullopt;
        return Rational(n);
      }
      long long n = std::stoll(s.substr(0, slash), &pos);
      if (pos != slash) return std::nullopt;
      long long d = std::stoll(s.substr(slash + 1), &pos);
      if (pos != s.size() - slash - 1 || d == 0) return std::nullopt;
      return Rational(n, d);
    } catch (const std::exception&) {
      return std::nullopt;
    }
  }

  // Best rational approximation with denominator <= max_den (continued
  // fractions). Returns nullopt when the result misses x by more than
  // rel_tol * |x|; used to decide whether a floating weight is "exactly"
  // rational for the symbolic engine.
  static std::optional<Rational> from_double(double x, long long max_den = 1000000,
                                             double rel_tol = 1e-12) {
    if (!(x == x) || x > 9e15 || x < -9e15) return std::nullopt;
    long long p0 = 0, q0 = 1, p1 = 1, q1 = 0;
    double v = x;
    for (int it = 0; it < 64; ++it) {
      double fl = std::floor(v);
      if (fl > 9e15 || fl < -9e15) break;
      long long a = static_cast<long long>(fl);
      i128 p2 = i128(a) * p1 + p0;
      i128 q2 = i128(a) * q1 + q0;
      if (q2 > max_den) break;
      p0 = p1; q0 = q1;
      p1 = static_cast<long long>(p2);
      q1 = static_cast<long long>(q2);
      double rem = v - fl;
      if (rem < 1e-15) break;
      v = 1.0 / rem;
    }
    if (q1 == 0) return std::nullopt;
    Rational r(p1, q1);
    double err = std::abs(r.to_double() - x);
    if (err > rel_tol * std::max(1.0, std::abs(x))) return std::nullopt;
    return r;
  }

 private:
  struct tag {};
  Rational(long long n, long long d, tag) : num_(n), den_(d) {}
  using i128 = __int128;

  static Rational from_i128(i128 n, i128 d) {
    if (d < 0) { n = -n; d = -d; }
    i128 g = gcd128(n < 0 ? -n : n, d);
    if (g > 1) { n /= g; d /= g; }
    constexpr i128 lim = 0x7fffffffffffffffLL;
    if (n > lim || n < -lim || d > lim)
      throw std::overflow_error("rational overflow");
    return Rational(static_cast<long long>(n), static_cast<long long>(d), tag{});
  }

  static i128 gcd128(i128 a, i128 b) {
    while (b != 0) { i128 t = a % b; a = b; b = t; }
    return a == 0 ? 1 : a;
  }

  void normalize() {
    if (den_ == 0) throw std::domain_error("zero denominator");
    if (den_ < 0) { num_ = -num_; den_ = -den_; }
    long long g = std::gcd(num_ < 0 ? -num_ : num_, den_);
    if (g > 1) { num_ /= g; den_ /= g; }
  }

  long long num_;
  long long den_;
};

}  // namespace qgr
