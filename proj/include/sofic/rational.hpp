#pragma once

#include <concepts>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace sofic {

/// Exact rational on int64, always stored reduced with positive denominator.
///
/// Every distance in this library is a count over a known denominator
/// (n, n*r, or n(n-1)/2), so int64 with 128-bit intermediates never
/// overflows at the degrees we enumerate. Arithmetic throws on overflow
/// instead of wrapping.
class Rat {
public:
  constexpr Rat() : num_(0), den_(1) {}
  Rat(long long num, long long den) { assign(num, den); }
  // NOLINTNEXTLINE(google-explicit-constructor) integers convert freely
  template <std::integral T>
  Rat(T num) : num_(checked_int(num)), den_(1) {}

  long long num() const { return num_; }
  long long den() const { return den_; }

  bool is_zero() const { return num_ == 0; }
  bool is_integer() const { return den_ == 1; }

  double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }
  long double to_long_double() const {
    return static_cast<long double>(num_) / static_cast<long double>(den_);
  }

  /// Canonical "p/q" form, reduced, q >= 1 (so Rat(0) prints "0/1").
  std::string str() const { return std::to_string(num_) + "/" + std::to_string(den_); }

  /// Parses "p/q", plain integers, and exact decimal strings ("0.1" -> 1/10).
  static Rat parse(const std::string& s) {
    if (s.empty()) throw std::invalid_argument("Rat::parse: empty string");
    auto slash = s.find('/');
    if (slash != std::string::npos) {
      long long p = std::stoll(s.substr(0, slash));
      long long q = std::stoll(s.substr(slash + 1));
      return Rat(p, q);
    }
    auto dot = s.find('.');
    if (dot == std::string::npos) return Rat(std::stoll(s));
    std::string head = s.substr(0, dot), tail = s.substr(dot + 1);
    if (tail.empty()) return Rat(std::stoll(head));
    long long den = 1;
    for (size_t i = 0; i < tail.size(); ++i) den = mul_checked(den, 10);
    bool neg = !head.empty() && head[0] == '-';
    long long whole = head.empty() || head == "-" ? 0 : std::stoll(head);
    long long frac = std::stoll(tail);
    long long num = mul_checked(whole, den);
    num = neg ? num - frac : num + frac;
    return Rat(num, den);
  }

  friend Rat operator+(const Rat& a, const Rat& b) {
    return Rat::from128(i128(a.num_) * b.den_ + i128(b.num_) * a.den_, i128(a.den_) * b.den_);
  }
  friend Rat operator-(const Rat& a, const Rat& b) {
    return Rat::from128(i128(a.num_) * b.den_ - i128(b.num_) * a.den_, i128(a.den_) * b.den_);
  }
  friend Rat operator*(const Rat& a, const Rat& b) {
    return Rat::from128(i128(a.num_) * b.num_, i128(a.den_) * b.den_);
  }
  friend Rat operator/(const Rat& a, const Rat& b) {
    if (b.num_ == 0) throw std::domain_error("Rat: division by zero");
    return Rat::from128(i128(a.num_) * b.den_, i128(a.den_) * b.num_);
  }
  Rat operator-() const { return Rat(-num_, den_); }
  Rat& operator+=(const Rat& o) { return *this = *this + o; }
  Rat& operator-=(const Rat& o) { return *this = *this - o; }
  Rat& operator*=(const Rat& o) { return *this = *this * o; }

  friend bool operator==(const Rat& a, const Rat& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend bool operator!=(const Rat& a, const Rat& b) { return !(a == b); }
  friend bool operator<(const Rat& a, const Rat& b) {
    return i128(a.num_) * b.den_ < i128(b.num_) * a.den_;
  }
  friend bool operator>(const Rat& a, const Rat& b) { return b < a; }
  friend bool operator<=(const Rat& a, const Rat& b) { return !(b < a); }
  friend bool operator>=(const Rat& a, const Rat& b) { return !(a < b); }

private:
  using i128 = __int128;

  void assign(long long num, long long den) {
    if (den == 0) throw std::domain_error("Rat: zero denominator");
    if (den < 0) { num = -num; den = -den; }
    long long g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) { num /= g; den /= g; }
    num_ = num;
    den_ = den;
  }

  static Rat from128(i128 num, i128 den) {
    if (den == 0) throw std::domain_error("Rat: zero denominator");
    if (den < 0) { num = -num; den = -den; }
    i128 a = num < 0 ? -num : num, b = den;
    while (b) { i128 t = a % b; a = b; b = t; }
    if (a > 1) { num /= a; den /= a; }
    constexpr i128 lo = INT64_MIN, hi = INT64_MAX;
    if (num < lo || num > hi || den > hi)
      throw std::overflow_error("Rat: value out of int64 range");
    Rat r;
    r.num_ = static_cast<long long>(num);
    r.den_ = static_cast<long long>(den);
    return r;
  }

  static long long mul_checked(long long a, long long b) {
    i128 p = i128(a) * b;
    if (p < INT64_MIN || p > INT64_MAX) throw std::overflow_error("Rat: overflow");
    return static_cast<long long>(p);
  }

  template <std::integral T>
  static long long checked_int(T v) {
    if constexpr (std::is_unsigned_v<T>) {
      if (static_cast<std::uint64_t>(v) >
          static_cast<std::uint64_t>(std::numeric_limits<long long>::max()))
        throw std::overflow_error("Rat: integer out of int64 range");
    }
    return static_cast<long long>(v);
  }

  long long num_;
  long long den_;
};

}  // namespace sofic
