#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <cstdlib>
#include <optional>
#include <string>
#include <string_view>
#include <type_traits>

#include "hardy_rellich/error.hpp"

namespace hardy_rellich {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

template <class T>
inline constexpr bool is_exact_v = std::is_same_v<T, Rational>;

template <class T>
double to_double(const T& v) {
  if constexpr (is_exact_v<T>) {
    return v.template convert_to<double>();
  } else {
    return static_cast<double>(v);
  }
}

template <class T>
T from_int(long long n) {
  return T(n);
}

template <class T>
T ratio(long long p, long long q) {
  return T(p) / T(q);
}

template <class T>
T abs_value(const T& v) {
  return v < T(0) ? T(-v) : v;
}

// Tolerance used when deciding whether two spectral values coincide.
template <class T>
T equality_tolerance() {
  if constexpr (is_exact_v<T>) return T(0);
  else return T(1e-7);
}

template <class T>
bool nearly_equal(const T& a, const T& b) {
  return abs_value(T(a - b)) <= equality_tolerance<T>();
}

inline std::string format_exact(const Rational& r) {
  return numerator(r).str() + "/" + denominator(r).str();
}

namespace detail {

inline BigInt pow10(unsigned e) {
  BigInt p = 1;
  for (unsigned i = 0; i < e; ++i) p *= 10;
  return p;
}

inline bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (c < '0' || c > '9') return false;
  return true;
}

// Decimal literal such as "-12.5e-3" to an exact rational.
inline std::optional<Rational> parse_decimal(std::string_view s) {
  bool neg = false;
  if (!s.empty() && (s[0] == '+' || s[0] == '-')) {
    neg = s[0] == '-';
    s.remove_prefix(1);
  }
  long long exponent = 0;
  auto epos = s.find_first_of("eE");
  if (epos != std::string_view::npos) {
    std::string_view es = s.substr(epos + 1);
    bool eneg = false;
    if (!es.empty() && (es[0] == '+' || es[0] == '-')) {
      eneg = es[0] == '-';
      es.remove_prefix(1);
    }
    if (!all_digits(es) || es.size() > 6) return std::nullopt;
    exponent = std::stoll(std::string(es));
    if (eneg) exponent = -exponent;
    s = s.substr(0, epos);
  }
  std::string digits;
  auto dot = s.find('.');
  std::string_view ip = s.substr(0, dot);
  std::string_view fp = dot == std::string_view::npos ? std::string_view{} : s.substr(dot + 1);
  if (ip.empty() && fp.empty()) return std::nullopt;
  if (!ip.empty() && !all_digits(ip)) return std::nullopt;
  if (!fp.empty() && !all_digits(fp)) return std::nullopt;
  digits.append(ip);
  digits.append(fp);
  exponent -= static_cast<long long>(fp.size());
  BigInt n(digits);
  Rational r(n);
  if (exponent > 0) r *= Rational(pow10(static_cast<unsigned>(exponent)));
  if (exponent < 0) r /= Rational(pow10(static_cast<unsigned>(-exponent)));
  return neg ? Rational(-r) : r;
}

}  // namespace detail

// Accepts "p/q", integers and decimal literals; everything converts exactly.
inline Rational parse_rational(std::string_view text) {
  auto slash = text.find('/');
  if (slash != std::string_view::npos) {
    auto p = detail::parse_decimal(text.substr(0, slash));
    auto q = detail::parse_decimal(text.substr(slash + 1));
    if (!p || !q || *q == 0) throw InvalidArgument("not a rational number: " + std::string(text));
    return *p / *q;
  }
  auto v = detail::parse_decimal(text);
  if (!v) throw InvalidArgument("not a number: " + std::string(text));
  return *v;
}

}  // namespace hardy_rellich
