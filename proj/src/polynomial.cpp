#include "percolab/polynomial.hpp"

#include <cctype>
#include <regex>

#include "percolab/errors.hpp"

namespace percolab {

Rational parse_rational(const std::string& text) {
  static const std::regex fraction(R"(\s*([+-]?\d+)\s*/\s*(\d+)\s*)");
  static const std::regex decimal(R"(\s*([+-]?)(\d*)(?:\.(\d*))?(?:[eE]([+-]?\d+))?\s*)");
  std::smatch m;
  if (std::regex_match(text, m, fraction)) {
    mpz_class num(m[1].str()), den(m[2].str());
    if (den == 0) throw ParameterError("zero denominator in '" + text + "'");
    Rational q(num, den);
    q.canonicalize();
    return q;
  }
  if (std::regex_match(text, m, decimal) && (m[2].length() + m[3].length()) > 0) {
    const std::string digits = m[2].str() + m[3].str();
    long exponent = -static_cast<long>(m[3].length());
    if (m[4].matched) exponent += std::stol(m[4].str());
    mpz_class num(digits.empty() ? "0" : digits);
    mpz_class scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(std::labs(exponent)));
    Rational q = exponent >= 0 ? Rational(num * scale) : Rational(num, scale);
    q.canonicalize();
    if (m[1] == "-") q = -q;
    return q;
  }
  throw ParameterError("cannot parse '" + text + "' as a rational number");
}

double to_double(const Rational& q) { return q.get_d(); }

PolynomialInP::PolynomialInP(std::vector<Rational> coefficients) : c_(std::move(coefficients)) {
  trim();
}

PolynomialInP PolynomialInP::constant(const Rational& c) { return PolynomialInP({c}); }
PolynomialInP PolynomialInP::p() { return PolynomialInP({0, 1}); }
PolynomialInP PolynomialInP::one_minus_p() { return PolynomialInP({1, -1}); }

PolynomialInP PolynomialInP::monomial_weight(unsigned a, unsigned b) {
  // p^a (1-p)^b = sum_j C(b, j) (-1)^j p^{a+j}
  std::vector<Rational> c(a + b + 1);
  mpz_class binom = 1;
  for (unsigned j = 0; j <= b; ++j) {
    c[a + j] = (j % 2 ? -binom : binom);
    binom = binom * (b - j) / (j + 1);
  }
  return PolynomialInP(std::move(c));
}

void PolynomialInP::trim() {
  while (!c_.empty() && c_.back() == 0) c_.pop_back();
}

Rational PolynomialInP::operator()(const Rational& p) const {
  Rational acc = 0;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * p + *it;
  return acc;
}

double PolynomialInP::operator()(double p) const {
  Rational exact(p);
  return (*this)(exact).get_d();
}

PolynomialInP PolynomialInP::derivative() const {
  if (c_.size() <= 1) return {};
  std::vector<Rational> d(c_.size() - 1);
  for (std::size_t i = 1; i < c_.size(); ++i) d[i - 1] = c_[i] * static_cast<long>(i);
  return PolynomialInP(std::move(d));
}

PolynomialInP& PolynomialInP::operator+=(const PolynomialInP& o) {
  if (o.c_.size() > c_.size()) c_.resize(o.c_.size());
  for (std::size_t i = 0; i < o.c_.size(); ++i) c_[i] += o.c_[i];
  trim();
  return *this;
}

PolynomialInP& PolynomialInP::operator-=(const PolynomialInP& o) {
  if (o.c_.size() > c_.size()) c_.resize(o.c_.size());
  for (std::size_t i = 0; i < o.c_.size(); ++i) c_[i] -= o.c_[i];
  trim();
  return *this;
}

PolynomialInP& PolynomialInP::operator*=(const Rational& s) {
  for (auto& x : c_) x *= s;
  trim();
  return *this;
}

PolynomialInP operator*(const PolynomialInP& a, const PolynomialInP& b) {
  if (a.is_zero() || b.is_zero()) return {};
  std::vector<Rational> c(a.c_.size() + b.c_.size() - 1);
  for (std::size_t i = 0; i < a.c_.size(); ++i) {
    for (std::size_t j = 0; j < b.c_.size(); ++j) c[i + j] += a.c_[i] * b.c_[j];
  }
  return PolynomialInP(std::move(c));
}

nlohmann::json PolynomialInP::to_json() const {
  nlohmann::json num = nlohmann::json::array(), den = nlohmann::json::array();
  for (const auto& x : c_) {
    num.push_back(x.get_num().get_str());
    den.push_back(x.get_den().get_str());
  }
  return {{"num", num}, {"den", den}};
}

PolynomialInP PolynomialInP::from_json(const nlohmann::json& doc) {
  const auto& num = doc.at("num");
  const auto& den = doc.at("den");
  if (num.size() != den.size()) throw FormatError("polynomial num/den length mismatch");
  std::vector<Rational> c;
  for (std::size_t i = 0; i < num.size(); ++i) {
    Rational q{mpz_class(num[i].get<std::string>()), mpz_class(den[i].get<std::string>())};
    q.canonicalize();
    c.push_back(q);
  }
  return PolynomialInP(std::move(c));
}

}  // namespace percolab
