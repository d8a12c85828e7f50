#include "pw/rational.hpp"

#include <cctype>

#include "pw/errors.hpp"

namespace pw {

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

BigInt parse_digits(std::string_view s) {
  return BigInt(std::string(s));
}

}  // namespace

Rational parse_rational(std::string_view text) {
  std::string_view s = text;
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
    s.remove_prefix(1);
  }
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
    s.remove_suffix(1);
  }
  if (s.empty()) fail(ErrorCode::ParseError, "empty probability string");

  bool negative = false;
  if (s.front() == '+' || s.front() == '-') {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  if (s.empty()) fail(ErrorCode::ParseError, "sign without digits");

  auto slash = s.find('/');
  if (slash != std::string_view::npos) {
    std::string_view num = s.substr(0, slash);
    std::string_view den = s.substr(slash + 1);
    if (!all_digits(num) || !all_digits(den)) {
      fail(ErrorCode::ParseError,
           "bad rational '" + std::string(text) + "' (want n/d)");
    }
    BigInt d = parse_digits(den);
    if (d == 0) fail(ErrorCode::ParseError, "zero denominator");
    Rational r(parse_digits(num), d);
    return negative ? -r : r;
  }

  auto dot = s.find('.');
  std::string_view int_part = dot == std::string_view::npos ? s : s.substr(0, dot);
  std::string_view frac_part =
      dot == std::string_view::npos ? std::string_view{} : s.substr(dot + 1);
  if (int_part.empty() && frac_part.empty()) {
    fail(ErrorCode::ParseError, "bad number '" + std::string(text) + "'");
  }
  if ((!int_part.empty() && !all_digits(int_part)) ||
      (!frac_part.empty() && !all_digits(frac_part))) {
    fail(ErrorCode::ParseError, "bad number '" + std::string(text) + "'");
  }

  BigInt scaled = int_part.empty() ? BigInt(0) : parse_digits(int_part);
  BigInt denom = 1;
  for (char c : frac_part) {
    scaled *= 10;
    scaled += c - '0';
    denom *= 10;
  }
  Rational r(scaled, denom);
  return negative ? -r : r;
}

std::string format_rational(const Rational& value) {
  return numerator(value).str() + "/" + denominator(value).str();
}

Rational rational_abs(const Rational& value) {
  return value < 0 ? Rational(-value) : value;
}

}  // namespace pw
