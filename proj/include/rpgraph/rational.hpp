#pragma once

// Exact rational numbers backed by GMP. Every quantity the library touches
// (prices, quantities, arc lengths, cycle means, epsilons) is a Rational;
// verdicts are sign tests and must not depend on rounding.

#include <gmpxx.h>

#include <compare>
#include <cstdint>
#include <functional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rpgraph/error.hpp"

namespace rpgraph {

class Rational {
 public:
  Rational() = default;
  Rational(long value) : value_(value) {}  // NOLINT(google-explicit-constructor)
  Rational(int value) : value_(value) {}   // NOLINT(google-explicit-constructor)
  Rational(long num, long den) : value_(num, den) {
    if (den == 0) fail(ErrorCode::invalid_argument, "zero denominator");
    value_.canonicalize();
  }
  Rational(const mpz_class& num, const mpz_class& den) : value_(num, den) {
    if (den == 0) fail(ErrorCode::invalid_argument, "zero denominator");
    value_.canonicalize();
  }
  explicit Rational(const mpz_class& integer) : value_(integer) {}
  explicit Rational(mpq_class value) : value_(std::move(value)) { value_.canonicalize(); }

  /// Accepts "12", "-0.25", "1.5e3", "3/4". Throws ParseError otherwise.
  static Rational parse(std::string_view text);

  const mpq_class& mpq() const noexcept { return value_; }
  mpz_class num() const { return value_.get_num(); }
  mpz_class den() const { return value_.get_den(); }

  int sign() const noexcept { return sgn(value_); }
  bool is_zero() const noexcept { return sign() == 0; }
  bool is_integer() const { return value_.get_den() == 1; }

  /// Canonical exact rendering: "n" or "n/d".
  std::string str() const { return value_.get_str(); }
  /// Decimal approximation rounded half away from zero, trailing zeros trimmed.
  std::string decimal(unsigned places = 6) const;
  double to_double() const { return value_.get_d(); }

  Rational abs() const { return Rational(mpq_class(::abs(value_))); }

  Rational& operator+=(const Rational& o) { value_ += o.value_; return *this; }
  Rational& operator-=(const Rational& o) { value_ -= o.value_; return *this; }
  Rational& operator*=(const Rational& o) { value_ *= o.value_; return *this; }
  Rational& operator/=(const Rational& o) {
    if (o.is_zero()) fail(ErrorCode::invalid_argument, "division by zero");
    value_ /= o.value_;
    return *this;
  }

  friend Rational operator+(Rational a, const Rational& b) { return a += b; }
  friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
  friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
  friend Rational operator/(Rational a, const Rational& b) { return a /= b; }
  friend Rational operator-(const Rational& a) { return Rational(mpq_class(-a.value_)); }

  friend bool operator==(const Rational& a, const Rational& b) { return cmp(a.value_, b.value_) == 0; }
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    const int c = cmp(a.value_, b.value_);
    return c < 0 ? std::strong_ordering::less
                 : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
  }

  friend std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

 private:
  mpq_class value_;
};

inline Rational Rational::parse(std::string_view text) {
  auto bad = [&]() -> ParseError { return ParseError(0, "not a decimal number: '" + std::string(text) + "'"); };
  if (text.empty()) throw bad();
  std::size_t i = 0;
  bool negative = false;
  if (text[i] == '+' || text[i] == '-') {
    negative = text[i] == '-';
    ++i;
  }
  auto digits = [&](std::size_t from) {
    std::size_t j = from;
    while (j < text.size() && text[j] >= '0' && text[j] <= '9') ++j;
    return j;
  };

  const std::size_t int_end = digits(i);
  std::string mantissa(text.substr(i, int_end - i));

  if (int_end < text.size() && text[int_end] == '/') {
    const std::size_t den_end = digits(int_end + 1);
    if (mantissa.empty() || den_end == int_end + 1 || den_end != text.size()) throw bad();
    mpz_class num(mantissa, 10);
    mpz_class den(std::string(text.substr(int_end + 1)), 10);
    if (den == 0) throw bad();
    if (negative) num = -num;
    return Rational(num, den);
  }

  std::size_t pos = int_end;
  std::size_t frac_digits = 0;
  if (pos < text.size() && text[pos] == '.') {
    const std::size_t frac_end = digits(pos + 1);
    frac_digits = frac_end - pos - 1;
    mantissa += text.substr(pos + 1, frac_digits);
    pos = frac_end;
  }
  if (mantissa.empty()) throw bad();

  long exponent = 0;
  if (pos < text.size() && (text[pos] == 'e' || text[pos] == 'E')) {
    std::size_t j = pos + 1;
    bool exp_negative = false;
    if (j < text.size() && (text[j] == '+' || text[j] == '-')) {
      exp_negative = text[j] == '-';
      ++j;
    }
    const std::size_t exp_end = digits(j);
    if (exp_end == j || exp_end - j > 6) throw bad();
    exponent = std::stol(std::string(text.substr(j, exp_end - j)));
    if (exp_negative) exponent = -exponent;
    pos = exp_end;
  }
  if (pos != text.size()) throw bad();

  mpz_class num(mantissa, 10);
  if (negative) num = -num;
  const long shift = exponent - static_cast<long>(frac_digits);
  mpz_class scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(shift < 0 ? -shift : shift));
  if (shift >= 0) return Rational(mpz_class(num * scale));
  return Rational(num, scale);
}

inline std::string Rational::decimal(unsigned places) const {
  mpz_class scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, places);
  mpz_class num = ::abs(value_.get_num()) * scale * 2 + value_.get_den();
  mpz_class den = value_.get_den() * 2;
  mpz_class rounded;
  mpz_fdiv_q(rounded.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());

  std::string digits = rounded.get_str();
  if (digits.size() <= places) digits.insert(0, places + 1 - digits.size(), '0');
  std::string out = digits.substr(0, digits.size() - places);
  std::string frac = digits.substr(digits.size() - places);
  while (!frac.empty() && frac.back() == '0') frac.pop_back();
  if (!frac.empty()) out += "." + frac;
  if (sign() < 0 && out != "0") out.insert(0, "-");
  return out;
}

using Vector = std::vector<Rational>;

inline Rational dot(std::span<const Rational> a, std::span<const Rational> b) {
  if (a.size() != b.size()) fail(ErrorCode::dimension_mismatch, "dot product of unequal lengths");
  mpq_class acc;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i].mpq() * b[i].mpq();
  return Rational(std::move(acc));
}

inline Rational min_of(const Rational& a, const Rational& b) { return b < a ? b : a; }
inline Rational max_of(const Rational& a, const Rational& b) { return a < b ? b : a; }

}  // namespace rpgraph

template <>
struct std::hash<rpgraph::Rational> {
  std::size_t operator()(const rpgraph::Rational& r) const noexcept {
    return std::hash<std::string>{}(r.str());
  }
};
