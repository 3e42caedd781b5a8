#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>
#include <vector>

namespace cbar {

/// Exact scalar used everywhere in the library. GMP keeps it canonical
/// (gcd 1, positive denominator) after every arithmetic operation.
using Rational = mpq_class;
using Vec = std::vector<Rational>;
using Mat = std::vector<Vec>;

Rational frac(long numerator, long denominator = 1);

/// Accepts "p/q", "p", and finite decimals such as "-0.25".
Rational parse_rational(std::string_view text);

/// "p/q", or "p" when the denominator is one.
std::string to_string(const Rational& value);
std::string to_string(const Vec& values);

Rational dot(const Vec& a, const Vec& b);
Vec zeros(std::size_t n);
Mat identity(std::size_t n);
Vec mat_vec(const Mat& a, const Vec& x);
Mat mat_mul(const Mat& a, const Mat& b);

Rational floor_of(const Rational& value);
Rational ceil_of(const Rational& value);

/// Reduced row echelon form in place; returns the pivot columns. Zero rows
/// end up at the bottom.
std::vector<std::size_t> row_reduce(Mat& m);

/// Scales a nonzero vector to a primitive integer vector with the same direction.
void make_primitive(Vec& v);

}  // namespace cbar
