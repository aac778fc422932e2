#pragma once

// Surface syntax for polynomials:
//   expr   := [sign] term (('+'|'-') term)*
//   term   := factor ('*' factor)*
//   factor := atom ('^' natural)*
//   atom   := rational | coordinate | '(' expr ')'
// Products are evaluated left to right, so odd factors keep their written order.

#include "qclass/grassmann.hpp"

#include <cctype>
#include <sstream>

namespace qclass {

class parse_error : public std::runtime_error {
 public:
  parse_error(const std::string& what, std::size_t line, std::size_t column)
      : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what),
        line_(line),
        column_(column) {}
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_, column_;
};

namespace detail {

class ExpressionParser {
 public:
  ExpressionParser(std::string_view src, ChartPtr chart) : src_(src), chart_(std::move(chart)) {}

  SuperPolynomial parse() {
    skip_space();
    auto r = expr();
    skip_space();
    if (pos_ < src_.size()) fail("unexpected '" + std::string(1, src_[pos_]) + "'");
    return r;
  }

 private:
  SuperPolynomial expr() {
    skip_space();
    bool negate = false;
    if (peek('+') || peek('-')) negate = src_[pos_++] == '-';
    auto r = term();
    if (negate) r = -r;
    while (true) {
      skip_space();
      if (peek('+')) {
        ++pos_;
        r += term();
      } else if (peek('-')) {
        ++pos_;
        r -= term();
      } else {
        return r;
      }
    }
  }

  SuperPolynomial term() {
    auto r = factor();
    while (true) {
      skip_space();
      if (!peek('*')) return r;
      ++pos_;
      r = r * factor();
    }
  }

  SuperPolynomial factor() {
    skip_space();
    const std::size_t start = pos_;
    auto base = atom();
    while (true) {
      skip_space();
      if (!peek('^')) return base;
      ++pos_;
      skip_space();
      const std::size_t exp_at = pos_;
      const auto e = natural();
      if (e > 1 && poly_parity(base) != Parity::even)
        fail_at(start, "only even coordinates or even subexpressions may be raised to a power above 1");
      if (e > 0xFFFF) fail_at(exp_at, "exponent too large");
      SuperPolynomial p(chart_, 1);
      for (unsigned long k = 0; k < e; ++k) p = p * base;
      base = std::move(p);
    }
  }

  SuperPolynomial atom() {
    skip_space();
    if (pos_ >= src_.size()) fail("unexpected end of expression");
    const char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      auto r = expr();
      skip_space();
      if (!peek(')')) fail("expected ')'");
      ++pos_;
      return r;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) return SuperPolynomial(chart_, rational());
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::size_t start = pos_;
      while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) ++pos_;
      const std::string name(src_.substr(start, pos_ - start));
      const auto idx = chart_->index_of(name);
      if (!idx) fail_at(start, "unknown identifier '" + name + "'");
      return SuperPolynomial::coordinate(chart_, *idx);
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  Rational rational() {
    const std::size_t start = pos_;
    std::string digits = digit_run();
    skip_space();
    if (peek('/')) {
      ++pos_;
      skip_space();
      const std::size_t den_at = pos_;
      if (pos_ >= src_.size() || !std::isdigit(static_cast<unsigned char>(src_[pos_]))) fail("expected denominator");
      std::string den = digit_run();
      Rational d(den);
      if (d == 0) fail_at(den_at, "zero denominator");
      Rational r(digits);
      r /= d;
      return r;
    }
    if (peek('.')) fail_at(start, "decimal literals are not allowed; write a fraction");
    return Rational(digits);
  }

  unsigned long natural() {
    if (pos_ >= src_.size() || !std::isdigit(static_cast<unsigned char>(src_[pos_]))) fail("expected a natural exponent");
    const std::size_t start = pos_;
    const auto digits = digit_run();
    if (digits.size() > 6) fail_at(start, "exponent too large");
    return std::stoul(digits);
  }

  std::string digit_run() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    return std::string(src_.substr(start, pos_ - start));
  }

  bool peek(char c) const { return pos_ < src_.size() && src_[pos_] == c; }

  void skip_space() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  [[noreturn]] void fail(const std::string& what) const { fail_at(pos_, what); }

  [[noreturn]] void fail_at(std::size_t at, const std::string& what) const {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < at && i < src_.size(); ++i) {
      if (src_[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw parse_error(what, line, col);
  }

  std::string_view src_;
  ChartPtr chart_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline SuperPolynomial parse_expression(std::string_view src, const ChartPtr& chart) {
  return detail::ExpressionParser(src, chart).parse();
}

/// Canonical text of a polynomial: terms in normal-form order, odd coordinates
/// ascending within a monomial. parse_expression(to_expression(f)) == f.
inline std::string to_expression(const SuperPolynomial& f) {
  if (f.is_zero()) return "0";
  const Chart& ch = *f.chart();
  std::ostringstream os;
  bool first = true;
  for (const auto& [m, c] : f.terms()) {
    const bool neg = sgn(c) < 0;
    const Rational mag = neg ? Rational(-c) : c;
    if (first) {
      if (neg) os << "-";
    } else {
      os << (neg ? " - " : " + ");
    }
    first = false;
    std::vector<std::string> factors;
    for (std::size_t i = 0; i < ch.dim(); ++i) {
      if (m.exp[i] == 1) factors.push_back(ch[i].name);
      if (m.exp[i] > 1) factors.push_back(ch[i].name + "^" + std::to_string(m.exp[i]));
      if ((m.odd >> i) & 1u) factors.push_back(ch[i].name);
    }
    if (factors.empty() || mag != 1) factors.insert(factors.begin(), mag.get_str());
    for (std::size_t k = 0; k < factors.size(); ++k) os << (k ? "*" : "") << factors[k];
  }
  return os.str();
}

}  // namespace qclass
