#pragma once

// Exact arithmetic in the supercommutative polynomial algebra
// Q[x_1..x_p] (x) Lambda[theta_1..theta_q] attached to a coordinate chart.

#include <gmpxx.h>

#include <algorithm>
#include <array>
#include <bit>
#include <compare>
#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace qclass {

using Rational = mpq_class;

/// Z_2 grading. Addition is Z_2 addition.
enum class Parity : std::uint8_t { even = 0, odd = 1 };

constexpr Parity operator+(Parity a, Parity b) {
  return static_cast<Parity>(static_cast<std::uint8_t>(a) ^ static_cast<std::uint8_t>(b));
}
constexpr Parity& operator+=(Parity& a, Parity b) { return a = a + b; }
constexpr int bit(Parity p) { return static_cast<int>(p); }
constexpr Parity parity_of(int k) { return (k & 1) ? Parity::odd : Parity::even; }
/// (-1)^{a b}
constexpr int koszul(Parity a, Parity b) { return (bit(a) & bit(b)) ? -1 : 1; }

inline std::string to_string(Parity p) { return p == Parity::even ? "even" : "odd"; }

class algebra_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Hard limit on chart size; monomials are fixed-width.
inline constexpr std::size_t kMaxCoordinates = 16;

struct Coordinate {
  std::string name;
  Parity parity = Parity::even;
  bool operator==(const Coordinate&) const = default;
};

/// Ordered coordinates with parities. The order fixes the monomial normal form
/// and the component index order of every tensor on the chart.
class Chart {
 public:
  explicit Chart(std::vector<Coordinate> coords) : coords_(std::move(coords)) {
    if (coords_.size() > kMaxCoordinates)
      throw algebra_error("chart has " + std::to_string(coords_.size()) +
                          " coordinates; at most " + std::to_string(kMaxCoordinates) +
                          " are supported");
    for (std::size_t i = 0; i < coords_.size(); ++i) {
      for (std::size_t j = 0; j < i; ++j)
        if (coords_[i].name == coords_[j].name)
          throw algebra_error("duplicate coordinate name '" + coords_[i].name + "'");
      if (coords_[i].parity == Parity::odd) odd_mask_ |= (1u << i);
    }
  }

  std::size_t dim() const { return coords_.size(); }
  const Coordinate& operator[](std::size_t i) const { return coords_.at(i); }
  const std::vector<Coordinate>& coordinates() const { return coords_; }
  Parity parity(std::size_t i) const { return coords_[i].parity; }
  std::uint32_t odd_mask() const { return odd_mask_; }

  std::size_t even_count() const { return dim() - std::popcount(odd_mask_); }
  std::size_t odd_count() const { return std::popcount(odd_mask_); }

  std::optional<std::size_t> index_of(std::string_view name) const {
    for (std::size_t i = 0; i < coords_.size(); ++i)
      if (coords_[i].name == name) return i;
    return std::nullopt;
  }

  bool operator==(const Chart& other) const { return coords_ == other.coords_; }

 private:
  std::vector<Coordinate> coords_;
  std::uint32_t odd_mask_ = 0;
};

using ChartPtr = std::shared_ptr<const Chart>;

inline ChartPtr make_chart(std::vector<Coordinate> coords) {
  return std::make_shared<const Chart>(std::move(coords));
}

inline bool same_chart(const ChartPtr& a, const ChartPtr& b) {
  return a == b || (a && b && *a == *b);
}

/// Power product of coordinates. Even coordinates carry exponents, odd ones
/// appear at most once and are implicitly ordered by chart position.
struct Monomial {
  std::array<std::uint16_t, kMaxCoordinates> exp{};
  std::uint32_t odd = 0;

  auto operator<=>(const Monomial&) const = default;
  bool operator==(const Monomial&) const = default;

  Parity parity() const { return parity_of(std::popcount(odd)); }
  unsigned odd_degree() const { return static_cast<unsigned>(std::popcount(odd)); }
  unsigned even_degree() const {
    unsigned d = 0;
    for (auto e : exp) d += e;
    return d;
  }
  bool is_one() const { return odd == 0 && even_degree() == 0; }
};

/// Sign of concatenating odd factor sets a then b into ascending order, or 0
/// if they share a factor.
inline int odd_merge_sign(std::uint32_t a, std::uint32_t b) {
  if (a & b) return 0;
  int inversions = 0;
  while (b) {
    const int k = std::countr_zero(b);
    b &= b - 1;
    inversions += std::popcount(a >> (k + 1));
  }
  return (inversions & 1) ? -1 : 1;
}

/// Product of monomials: returns the sign (0 when an odd factor repeats).
inline int multiply(const Monomial& a, const Monomial& b, Monomial& out) {
  const int s = odd_merge_sign(a.odd, b.odd);
  if (s == 0) return 0;
  for (std::size_t i = 0; i < kMaxCoordinates; ++i) {
    const unsigned e = unsigned(a.exp[i]) + b.exp[i];
    if (e > 0xffffu) throw algebra_error("exponent overflow in monomial product");
    out.exp[i] = static_cast<std::uint16_t>(e);
  }
  out.odd = a.odd | b.odd;
  return s;
}

/// Exact-rational element of the supercommutative algebra on a chart. Terms
/// are kept sorted by monomial with no zero coefficients, so equality is
/// term-list equality.
class SuperPolynomial {
 public:
  using Term = std::pair<Monomial, Rational>;

  SuperPolynomial() = default;
  explicit SuperPolynomial(ChartPtr chart) : chart_(std::move(chart)) {}
  SuperPolynomial(ChartPtr chart, const Rational& c) : chart_(std::move(chart)) {
    if (c != 0) terms_.emplace_back(Monomial{}, c);
  }

  static SuperPolynomial coordinate(const ChartPtr& chart, std::size_t i) {
    if (i >= chart->dim()) throw algebra_error("coordinate index out of range");
    Monomial m;
    if (chart->parity(i) == Parity::odd)
      m.odd = 1u << i;
    else
      m.exp[i] = 1;
    SuperPolynomial p(chart);
    p.terms_.emplace_back(m, Rational(1));
    return p;
  }

  static SuperPolynomial monomial(const ChartPtr& chart, const Monomial& m, const Rational& c) {
    SuperPolynomial p(chart);
    if (c != 0) p.terms_.emplace_back(m, c);
    return p;
  }

  /// Builds from arbitrary (possibly repeated, unsorted) terms.
  static SuperPolynomial from_terms(ChartPtr chart, std::vector<Term> terms) {
    SuperPolynomial p(std::move(chart));
    p.terms_ = std::move(terms);
    p.normalize();
    return p;
  }

  const ChartPtr& chart() const { return chart_; }
  const std::vector<Term>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }

  /// Parity when homogeneous; zero counts as even; nullopt when mixed.
  std::optional<Parity> parity() const {
    if (terms_.empty()) return Parity::even;
    const Parity p = terms_.front().first.parity();
    for (const auto& [m, c] : terms_)
      if (m.parity() != p) return std::nullopt;
    return p;
  }

  Rational constant_term() const {
    if (!terms_.empty() && terms_.front().first.is_one()) return terms_.front().second;
    return 0;
  }

  bool operator==(const SuperPolynomial& o) const { return terms_ == o.terms_; }

  SuperPolynomial operator-() const {
    SuperPolynomial r = *this;
    for (auto& t : r.terms_) t.second = -t.second;
    return r;
  }

  SuperPolynomial& operator+=(const SuperPolynomial& o) {
    if (o.terms_.empty()) return *this;
    adopt_chart(o);
    std::vector<Term> out;
    out.reserve(terms_.size() + o.terms_.size());
    auto a = terms_.begin();
    auto b = o.terms_.begin();
    while (a != terms_.end() && b != o.terms_.end()) {
      if (a->first < b->first) {
        out.push_back(std::move(*a++));
      } else if (b->first < a->first) {
        out.push_back(*b++);
      } else {
        Rational c = a->second + b->second;
        if (c != 0) out.emplace_back(a->first, std::move(c));
        ++a;
        ++b;
      }
    }
    for (; a != terms_.end(); ++a) out.push_back(std::move(*a));
    for (; b != o.terms_.end(); ++b) out.push_back(*b);
    terms_ = std::move(out);
    return *this;
  }

  SuperPolynomial& operator-=(const SuperPolynomial& o) { return *this += -o; }

  SuperPolynomial& operator*=(const Rational& c) {
    if (c == 0) {
      terms_.clear();
    } else {
      for (auto& t : terms_) t.second *= c;
    }
    return *this;
  }

  friend SuperPolynomial operator+(SuperPolynomial a, const SuperPolynomial& b) { return a += b; }
  friend SuperPolynomial operator-(SuperPolynomial a, const SuperPolynomial& b) { return a -= b; }
  friend SuperPolynomial operator*(SuperPolynomial a, const Rational& c) { return a *= c; }
  friend SuperPolynomial operator*(const Rational& c, SuperPolynomial a) { return a *= c; }

  friend SuperPolynomial operator*(const SuperPolynomial& a, const SuperPolynomial& b) {
    SuperPolynomial r(a.chart_ ? a.chart_ : b.chart_);
    if (a.terms_.empty() || b.terms_.empty()) {
      if (a.chart_ && b.chart_ && !same_chart(a.chart_, b.chart_))
        throw algebra_error("chart mismatch in product");
      return r;
    }
    if (!same_chart(a.chart_, b.chart_)) throw algebra_error("chart mismatch in product");
    r.terms_.reserve(a.terms_.size() * b.terms_.size());
    Monomial m;
    for (const auto& [ma, ca] : a.terms_)
      for (const auto& [mb, cb] : b.terms_) {
        const int s = multiply(ma, mb, m);
        if (s == 0) continue;
        Rational c = ca * cb;
        if (s < 0) c = -c;
        r.terms_.emplace_back(m, std::move(c));
      }
    r.normalize();
    return r;
  }

  /// Left partial derivative: an odd coordinate is moved to the front
  /// (collecting the sign) and struck.
  SuperPolynomial partial(std::size_t coord) const {
    if (!chart_) return *this;
    if (coord >= chart_->dim()) throw algebra_error("unknown coordinate in derivative");
    SuperPolynomial r(chart_);
    const bool odd = chart_->parity(coord) == Parity::odd;
    const std::uint32_t bitmask = 1u << coord;
    for (const auto& [m, c] : terms_) {
      if (odd) {
        if (!(m.odd & bitmask)) continue;
        Monomial d = m;
        d.odd &= ~bitmask;
        const int before = std::popcount(m.odd & (bitmask - 1));
        r.terms_.emplace_back(d, (before & 1) ? Rational(-c) : c);
      } else {
        if (m.exp[coord] == 0) continue;
        Monomial d = m;
        d.exp[coord] -= 1;
        r.terms_.emplace_back(d, c * m.exp[coord]);
      }
    }
    // Striking one variable preserves the relative order of distinct terms.
    std::sort(r.terms_.begin(), r.terms_.end(),
              [](const Term& x, const Term& y) { return x.first < y.first; });
    return r;
  }

  /// Part of the polynomial whose monomials satisfy pred.
  template <class Pred>
  SuperPolynomial filter(Pred pred) const {
    SuperPolynomial r(chart_);
    for (const auto& t : terms_)
      if (pred(t.first)) r.terms_.push_back(t);
    return r;
  }

 private:
  void adopt_chart(const SuperPolynomial& o) {
    if (!chart_) {
      chart_ = o.chart_;
    } else if (o.chart_ && !same_chart(chart_, o.chart_)) {
      throw algebra_error("chart mismatch in sum");
    }
  }

  void normalize() {
    std::sort(terms_.begin(), terms_.end(),
              [](const Term& x, const Term& y) { return x.first < y.first; });
    std::size_t w = 0;
    for (std::size_t r = 0; r < terms_.size();) {
      Monomial m = terms_[r].first;
      Rational c = std::move(terms_[r].second);
      ++r;
      while (r < terms_.size() && terms_[r].first == m) c += terms_[r++].second;
      if (c != 0) terms_[w++] = Term(m, std::move(c));
    }
    terms_.resize(w);
  }

  ChartPtr chart_;
  std::vector<Term> terms_;
};

inline SuperPolynomial poly_add(const SuperPolynomial& a, const SuperPolynomial& b) { return a + b; }
inline SuperPolynomial poly_mul(const SuperPolynomial& a, const SuperPolynomial& b) { return a * b; }
inline SuperPolynomial poly_partial(const SuperPolynomial& f, std::size_t coord) {
  return f.partial(coord);
}
inline std::optional<Parity> poly_parity(const SuperPolynomial& f) { return f.parity(); }

inline Parity require_parity(const SuperPolynomial& f, std::string_view what) {
  auto p = f.parity();
  if (!p) throw algebra_error(std::string(what) + ": mixed-parity polynomial");
  return *p;
}

}  // namespace qclass
