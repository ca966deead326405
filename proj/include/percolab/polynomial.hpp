#pragma once

#include <gmpxx.h>

#include <string>
#include <vector>

#include "json.hpp"

namespace percolab {

using Rational = mpq_class;

/// Parses "7/10", "0.7", "3", "-1.25e-2" into an exact rational.
/// Throws ParameterError on malformed input.
Rational parse_rational(const std::string& text);

/// Nearest double.
double to_double(const Rational& q);

/// Univariate polynomial in p with exact rational coefficients; index i
/// holds the coefficient of p^i. Trailing zeros are trimmed, so the zero
/// polynomial has no coefficients and equality is coefficientwise.
class PolynomialInP {
 public:
  PolynomialInP() = default;
  explicit PolynomialInP(std::vector<Rational> coefficients);

  static PolynomialInP constant(const Rational& c);
  static PolynomialInP p();
  static PolynomialInP one_minus_p();
  /// p^a (1-p)^b with binomial coefficients expanded exactly.
  static PolynomialInP monomial_weight(unsigned a, unsigned b);

  const std::vector<Rational>& coefficients() const noexcept { return c_; }
  int degree() const noexcept { return static_cast<int>(c_.size()) - 1; }
  bool is_zero() const noexcept { return c_.empty(); }

  Rational operator()(const Rational& p) const;
  double operator()(double p) const;

  PolynomialInP derivative() const;

  PolynomialInP& operator+=(const PolynomialInP& o);
  PolynomialInP& operator-=(const PolynomialInP& o);
  PolynomialInP& operator*=(const Rational& s);
  friend PolynomialInP operator+(PolynomialInP a, const PolynomialInP& b) { return a += b; }
  friend PolynomialInP operator-(PolynomialInP a, const PolynomialInP& b) { return a -= b; }
  friend PolynomialInP operator*(PolynomialInP a, const Rational& s) { return a *= s; }
  friend PolynomialInP operator*(const PolynomialInP& a, const PolynomialInP& b);
  friend bool operator==(const PolynomialInP& a, const PolynomialInP& b) { return a.c_ == b.c_; }

  /// {"num": [...], "den": [...]} with decimal strings.
  nlohmann::json to_json() const;
  static PolynomialInP from_json(const nlohmann::json& doc);

 private:
  void trim();
  std::vector<Rational> c_;
};

}  // namespace percolab
