#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>
#include <string_view>

namespace pw {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

// Parses "n/d", plain integers, or decimal strings ("0.25", "-1.5").
// Decimals are scaled-integer exact; binary floating point is never involved.
Rational parse_rational(std::string_view text);

// Canonical "n/d" form, denominator always printed ("2/1", "0/1").
std::string format_rational(const Rational& value);

Rational rational_abs(const Rational& value);

}  // namespace pw
