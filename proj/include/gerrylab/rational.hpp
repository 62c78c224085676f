#pragma once

#include <cstdint>
#include <string>

#include <boost/rational.hpp>

namespace boost {

// Boost 1.74's mixed rational/integer operator== recurses forever under C++20
// rewritten comparisons. Exact non-template overloads take precedence.
inline bool operator==(const rational<std::int64_t>& r, int i) {
  return r.denominator() == 1 && r.numerator() == i;
}
inline bool operator==(const rational<std::int64_t>& r, long i) {
  return r.denominator() == 1 && r.numerator() == i;
}
inline bool operator==(const rational<std::int64_t>& r, long long i) {
  return r.denominator() == 1 && r.numerator() == i;
}

}  // namespace boost

namespace gerrylab {

/// Exact rational used for areas, perimeters, shares and the efficiency gap.
using Rational = boost::rational<std::int64_t>;

inline double to_double(const Rational& r) {
  return boost::rational_cast<double>(r);
}

inline long double to_long_double(const Rational& r) {
  return static_cast<long double>(r.numerator()) /
         static_cast<long double>(r.denominator());
}

inline Rational abs(const Rational& r) { return r < 0 ? -r : r; }

inline std::string to_string(const Rational& r) {
  if (r.denominator() == 1) return std::to_string(r.numerator());
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

// floor/ceil division for a nonnegative divisor
constexpr std::int64_t floor_div(std::int64_t num, std::int64_t den) {
  std::int64_t q = num / den;
  if ((num % den != 0) && (num < 0)) --q;
  return q;
}

constexpr std::int64_t ceil_div(std::int64_t num, std::int64_t den) {
  std::int64_t q = num / den;
  if ((num % den != 0) && (num > 0)) ++q;
  return q;
}

}  // namespace gerrylab
