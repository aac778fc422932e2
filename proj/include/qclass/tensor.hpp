#pragma once

// (n,m)-tensor fields with SuperPolynomial components.
//
// A tensor of type (n,m) is stored as
//
//   t = sum  t^{i_1..i_n}_{j_1..j_m}  d_{i_1} (x) .. (x) d_{i_n} (x) dz^{j_1} (x) .. (x) dz^{j_m}
//
// with every coefficient written to the LEFT of its basis word and upper
// slots preceding lower slots. All signs in products, contractions and
// derivations come from moving basis elements and coefficients past one
// another with the Koszul rule, and from the single pairing
// <dz^j, d_k> = delta^j_k applied to an adjacent "dz^j d_k" pair placed
// directly after the coefficient.

#include "qclass/grassmann.hpp"

#include <functional>
#include <map>
#include <span>

namespace qclass {

using IndexKey = std::vector<std::uint8_t>;

class TensorField {
 public:
  using Components = std::map<IndexKey, SuperPolynomial>;

  TensorField() = default;
  TensorField(ChartPtr chart, unsigned n_upper, unsigned m_lower, Parity parity)
      : chart_(std::move(chart)), n_(n_upper), m_(m_lower), parity_(parity) {}

  /// Validating constructor: every nonzero component must have parity
  /// intrinsic + sum of index parities.
  TensorField(ChartPtr chart, unsigned n_upper, unsigned m_lower, Parity parity,
              Components comps)
      : TensorField(std::move(chart), n_upper, m_lower, parity) {
    for (auto& [k, v] : comps) set(k, std::move(v));
  }

  static TensorField scalar(const SuperPolynomial& f) {
    TensorField t(f.chart(), 0, 0, require_parity(f, "scalar tensor"));
    t.set({}, f);
    return t;
  }

  static TensorField coordinate_vector(const ChartPtr& chart, std::size_t i) {
    TensorField t(chart, 1, 0, chart->parity(i));
    t.set({static_cast<std::uint8_t>(i)}, SuperPolynomial(chart, 1));
    return t;
  }

  static TensorField coordinate_covector(const ChartPtr& chart, std::size_t i) {
    TensorField t(chart, 0, 1, chart->parity(i));
    t.set({static_cast<std::uint8_t>(i)}, SuperPolynomial(chart, 1));
    return t;
  }

  const ChartPtr& chart() const { return chart_; }
  unsigned n_upper() const { return n_; }
  unsigned m_lower() const { return m_; }
  unsigned rank() const { return n_ + m_; }
  Parity parity() const { return parity_; }
  const Components& components() const { return comps_; }
  bool is_zero() const { return comps_.empty(); }
  std::size_t dim() const { return chart_ ? chart_->dim() : 0; }

  Parity index_parity(std::span<const std::uint8_t> key) const {
    Parity p = Parity::even;
    for (auto i : key) p += chart_->parity(i);
    return p;
  }

  /// Parity a component at key must carry.
  Parity component_parity(std::span<const std::uint8_t> key) const {
    return parity_ + index_parity(key);
  }

  SuperPolynomial get(const IndexKey& key) const {
    auto it = comps_.find(key);
    if (it == comps_.end()) return SuperPolynomial(chart_);
    return it->second;
  }

  void set(const IndexKey& key, SuperPolynomial v) {
    check_key(key);
    if (v.is_zero()) {
      comps_.erase(key);
      return;
    }
    check_component(key, v);
    comps_[key] = std::move(v);
  }

  /// Accumulates into a component without the parity check (internal hot path;
  /// callers guarantee homogeneity by construction).
  void accumulate(const IndexKey& key, const SuperPolynomial& v) {
    if (v.is_zero()) return;
    auto [it, inserted] = comps_.try_emplace(key, v);
    if (!inserted) {
      it->second += v;
      if (it->second.is_zero()) comps_.erase(it);
    }
  }

  /// Asserts the component parity rule over all stored entries.
  void validate() const {
    for (const auto& [k, v] : comps_) check_component(k, v);
  }

  bool same_shape(const TensorField& o) const {
    return same_chart(chart_, o.chart_) && n_ == o.n_ && m_ == o.m_;
  }

  bool operator==(const TensorField& o) const {
    if (!same_shape(o)) return false;
    if (comps_.empty() && o.comps_.empty()) return true;
    return parity_ == o.parity_ && comps_ == o.comps_;
  }

  TensorField& operator+=(const TensorField& o) {
    check_compatible(o, "sum");
    if (comps_.empty()) parity_ = o.parity_;
    for (const auto& [k, v] : o.comps_) accumulate(k, v);
    return *this;
  }
  TensorField& operator-=(const TensorField& o) {
    check_compatible(o, "difference");
    if (comps_.empty()) parity_ = o.parity_;
    for (const auto& [k, v] : o.comps_) accumulate(k, -v);
    return *this;
  }
  TensorField& operator*=(const Rational& c) {
    if (c == 0) {
      comps_.clear();
      return *this;
    }
    for (auto& [k, v] : comps_) v *= c;
    return *this;
  }
  TensorField operator-() const {
    TensorField r = *this;
    for (auto& [k, v] : r.comps_) v = -v;
    return r;
  }
  friend TensorField operator+(TensorField a, const TensorField& b) { return a += b; }
  friend TensorField operator-(TensorField a, const TensorField& b) { return a -= b; }
  friend TensorField operator*(TensorField a, const Rational& c) { return a *= c; }
  friend TensorField operator*(const Rational& c, TensorField a) { return a *= c; }

  /// Applies f to every component (f must preserve parity and linear structure).
  template <class F>
  TensorField map_components(F&& f) const {
    TensorField r(chart_, n_, m_, parity_);
    for (const auto& [k, v] : comps_) {
      auto w = f(k, v);
      if (!w.is_zero()) r.comps_.emplace(k, std::move(w));
    }
    return r;
  }

  /// Overrides the recorded intrinsic parity; only meaningful when the
  /// components are consistent with it (used for zero tensors).
  TensorField with_parity(Parity p) const {
    TensorField r = *this;
    r.parity_ = p;
    r.validate();
    return r;
  }

 private:
  void check_key(const IndexKey& key) const {
    if (key.size() != n_ + m_) throw algebra_error("tensor index tuple has wrong length");
    for (auto i : key)
      if (i >= dim()) throw algebra_error("tensor index out of range");
  }

  void check_component(const IndexKey& key, const SuperPolynomial& v) const {
    if (!same_chart(v.chart(), chart_)) throw algebra_error("component on a different chart");
    auto p = v.parity();
    if (!p) throw algebra_error("mixed-parity tensor component");
    if (*p != component_parity(key))
      throw algebra_error("tensor component violates the parity rule");
  }

  void check_compatible(const TensorField& o, const char* what) const {
    if (!same_shape(o)) throw algebra_error(std::string("tensor shape mismatch in ") + what);
    if (!comps_.empty() && !o.comps_.empty() && parity_ != o.parity_)
      throw algebra_error(std::string("tensor parity mismatch in ") + what);
  }

  ChartPtr chart_;
  unsigned n_ = 0, m_ = 0;
  Parity parity_ = Parity::even;
  Components comps_;
};

namespace detail {

inline Parity sum_parity(const Chart& chart, std::span<const std::uint8_t> idx) {
  Parity p = Parity::even;
  for (auto i : idx) p += chart.parity(i);
  return p;
}

inline void require_same_chart(const TensorField& a, const TensorField& b, const char* what) {
  if (!same_chart(a.chart(), b.chart())) throw algebra_error(std::string("chart mismatch in ") + what);
}

}  // namespace detail

/// a (x) b with upper slots (I_a, I_b) and lower slots (J_a, J_b).
inline TensorField tensor_product(const TensorField& a, const TensorField& b) {
  detail::require_same_chart(a, b, "tensor_product");
  const Chart& ch = *a.chart();
  TensorField r(a.chart(), a.n_upper() + b.n_upper(), a.m_lower() + b.m_lower(),
                a.parity() + b.parity());
  const unsigned na = a.n_upper(), nb = b.n_upper();
  for (const auto& [ka, fa] : a.components()) {
    std::span<const std::uint8_t> Ia(ka.data(), na), Ja(ka.data() + na, ka.size() - na);
    const Parity word_a = detail::sum_parity(ch, ka);
    const Parity pJa = detail::sum_parity(ch, Ja);
    for (const auto& [kb, fb] : b.components()) {
      std::span<const std::uint8_t> Ib(kb.data(), nb), Jb(kb.data() + nb, kb.size() - nb);
      const Parity pIb = detail::sum_parity(ch, Ib);
      const Parity pfb = b.component_parity(kb);
      const int sign = koszul(word_a, pfb) * koszul(pJa, pIb);
      IndexKey key;
      key.reserve(ka.size() + kb.size());
      key.insert(key.end(), Ia.begin(), Ia.end());
      key.insert(key.end(), Ib.begin(), Ib.end());
      key.insert(key.end(), Ja.begin(), Ja.end());
      key.insert(key.end(), Jb.begin(), Jb.end());
      auto prod = fa * fb;
      if (sign < 0) prod = -prod;
      r.accumulate(key, prod);
    }
  }
  return r;
}

/// Contraction of upper slot u with lower slot l.
inline TensorField contract(const TensorField& t, unsigned upper_slot, unsigned lower_slot) {
  if (upper_slot >= t.n_upper() || lower_slot >= t.m_lower())
    throw algebra_error("contraction slot out of range");
  const Chart& ch = *t.chart();
  const unsigned n = t.n_upper();
  TensorField r(t.chart(), n - 1, t.m_lower() - 1, t.parity());
  for (const auto& [k, f] : t.components()) {
    const std::uint8_t j = k[n + lower_slot];
    if (k[upper_slot] != j) continue;
    Parity e = detail::sum_parity(ch, std::span(k.data(), n));
    e += detail::sum_parity(ch, std::span(k.data() + n, lower_slot));
    e += detail::sum_parity(ch, std::span(k.data(), upper_slot));
    const int sign = koszul(ch.parity(j), e);
    IndexKey key;
    key.reserve(k.size() - 2);
    for (unsigned s = 0; s < k.size(); ++s)
      if (s != upper_slot && s != n + lower_slot) key.push_back(k[s]);
    r.accumulate(key, sign < 0 ? -f : f);
  }
  return r;
}

/// Pairing of X with lower slot `slot` of t, X placed to the left:
/// contract(X (x) t). Left-linear in X.
inline TensorField insert_vector(const TensorField& x, const TensorField& t, unsigned slot) {
  if (x.n_upper() != 1 || x.m_lower() != 0) throw algebra_error("insert_vector expects a vector field");
  return contract(tensor_product(x, t), 0, slot);
}

// ---------------------------------------------------------------------------
// Endomorphisms: (1,1)-tensors acting on vector fields from the left.

inline bool is_endomorphism(const TensorField& a) { return a.n_upper() == 1 && a.m_lower() == 1; }
inline bool is_vector_field(const TensorField& a) { return a.n_upper() == 1 && a.m_lower() == 0; }

inline TensorField identity_endo(const ChartPtr& chart) {
  TensorField id(chart, 1, 1, Parity::even);
  for (std::size_t i = 0; i < chart->dim(); ++i) {
    auto u = static_cast<std::uint8_t>(i);
    id.set({u, u}, SuperPolynomial(chart, 1));
  }
  return id;
}

/// (a o b)^i_l = sum_k (-1)^{(e_i+e_k)(|b|+e_k+e_l)} a^i_k b^k_l, i.e.
/// contract(a (x) b, 1, 0) evaluated directly.
inline TensorField endo_compose(const TensorField& a, const TensorField& b) {
  if (!is_endomorphism(a) || !is_endomorphism(b)) throw algebra_error("endo_compose expects endomorphisms");
  detail::require_same_chart(a, b, "endo_compose");
  const Chart& ch = *a.chart();
  const std::size_t d = ch.dim();
  // Row-organize b for the sum over the middle index.
  std::vector<std::vector<std::pair<std::uint8_t, const SuperPolynomial*>>> brow(d);
  for (const auto& [k, f] : b.components()) brow[k[0]].emplace_back(k[1], &f);
  std::map<IndexKey, std::vector<SuperPolynomial::Term>> acc;
  TensorField r(a.chart(), 1, 1, a.parity() + b.parity());
  for (const auto& [ka, fa] : a.components()) {
    const std::uint8_t i = ka[0], kk = ka[1];
    for (const auto& [l, fb] : brow[kk]) {
      const Parity e = b.parity() + ch.parity(kk) + ch.parity(l);
      const int sign = koszul(ch.parity(i) + ch.parity(kk), e);
      auto prod = fa * *fb;
      auto& bucket = acc[IndexKey{i, l}];
      for (auto& t : prod.terms()) bucket.emplace_back(t.first, sign < 0 ? Rational(-t.second) : t.second);
    }
  }
  for (auto& [k, terms] : acc) {
    auto v = SuperPolynomial::from_terms(a.chart(), std::move(terms));
    if (!v.is_zero()) r.accumulate(k, v);
  }
  return r;
}

/// [a,b] = a o b - (-1)^{|a||b|} b o a
inline TensorField endo_commutator(const TensorField& a, const TensorField& b) {
  auto ab = endo_compose(a, b);
  auto ba = endo_compose(b, a);
  if (koszul(a.parity(), b.parity()) > 0)
    return ab - ba;
  return ab + ba;
}

/// Str(a) = sum_i (-1)^{e_i} a^i_i, the canonical contraction of the
/// endomorphism; vanishes on supercommutators.
inline SuperPolynomial supertrace(const TensorField& a) {
  if (!is_endomorphism(a)) throw algebra_error("supertrace expects an endomorphism");
  const Chart& ch = *a.chart();
  SuperPolynomial s(a.chart());
  for (const auto& [k, f] : a.components()) {
    if (k[0] != k[1]) continue;
    if (ch.parity(k[0]) == Parity::odd)
      s -= f;
    else
      s += f;
  }
  return s;
}

/// a(X) = contract(a (x) X, 1, 0):  a(X)^i = sum_j (-1)^{(e_i+e_j)(|X|+e_j)} a^i_j X^j.
inline TensorField endo_apply(const TensorField& a, const TensorField& x) {
  if (!is_endomorphism(a) || !is_vector_field(x)) throw algebra_error("endo_apply expects (endomorphism, vector)");
  detail::require_same_chart(a, x, "endo_apply");
  const Chart& ch = *a.chart();
  TensorField r(a.chart(), 1, 0, a.parity() + x.parity());
  for (const auto& [ka, fa] : a.components()) {
    const std::uint8_t i = ka[0], j = ka[1];
    auto it = x.components().find(IndexKey{j});
    if (it == x.components().end()) continue;
    const int sign = koszul(ch.parity(i) + ch.parity(j), x.parity() + ch.parity(j));
    auto prod = fa * it->second;
    r.accumulate({i}, sign < 0 ? -prod : prod);
  }
  return r;
}

/// The endomorphism A with A(d_j) = images[j] for each coordinate field.
inline TensorField endo_from_images(const ChartPtr& chart, Parity parity,
                                    const std::vector<TensorField>& images) {
  TensorField a(chart, 1, 1, parity);
  for (std::size_t j = 0; j < images.size(); ++j)
    for (const auto& [k, f] : images[j].components())
      a.set({k[0], static_cast<std::uint8_t>(j)}, f);
  return a;
}

/// Left multiplication by a function: f * t (components f t^I_J).
inline TensorField scale(const SuperPolynomial& f, const TensorField& t) {
  const Parity pf = require_parity(f, "scale");
  TensorField r(t.chart(), t.n_upper(), t.m_lower(), pf + t.parity());
  if (f.is_zero()) return r;
  for (const auto& [k, v] : t.components()) r.accumulate(k, f * v);
  return r;
}

// ---------------------------------------------------------------------------
// Derivations of the tensor algebra.

/// An even or odd derivation D of the tensor algebra, fixed by its action on
/// functions and on coordinate vector fields (D d_k = sum_i images[k][i] d_i).
/// Its action on coordinate 1-forms follows from D commuting with the
/// pairing: D dz^j = sum_k W^j_k dz^k with W^j_k = -(-1)^{e_j(e_k+1)} images[k][j].
struct Derivation {
  Parity parity = Parity::even;
  std::function<SuperPolynomial(const SuperPolynomial&)> on_function;
  std::vector<std::vector<SuperPolynomial>> on_basis;  // [k][i]
};

namespace detail {

inline std::vector<std::vector<SuperPolynomial>> dual_action(const Chart& ch, const Derivation& d) {
  const std::size_t n = ch.dim();
  std::vector<std::vector<SuperPolynomial>> w(n, std::vector<SuperPolynomial>(n));
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = 0; k < n; ++k) {
      const auto& v = d.on_basis[k][j];
      if (v.is_zero()) continue;
      const bool flip = bit(ch.parity(j)) & (bit(ch.parity(k)) ^ 1);
      w[j][k] = flip ? v : -v;
    }
  return w;
}

}  // namespace detail

/// Applies D to t via the graded Leibniz rule over coefficient and basis word.
inline TensorField apply_derivation(const Derivation& d, const TensorField& t) {
  const Chart& ch = *t.chart();
  const std::size_t dim = ch.dim();
  const unsigned n = t.n_upper();
  TensorField r(t.chart(), n, t.m_lower(), d.parity + t.parity());
  if (t.is_zero()) return r;
  auto w = detail::dual_action(ch, d);
  std::map<IndexKey, std::vector<SuperPolynomial::Term>> acc;
  auto push = [&](const IndexKey& key, const SuperPolynomial& v, bool negate) {
    auto& bucket = acc[key];
    for (const auto& tm : v.terms()) bucket.emplace_back(tm.first, negate ? Rational(-tm.second) : tm.second);
  };
  for (const auto& [key, c] : t.components()) {
    push(key, d.on_function(c), false);
    const Parity pc = t.component_parity(key);
    Parity before = Parity::even;  // parity of basis elements left of slot s
    for (unsigned s = 0; s < key.size(); ++s) {
      const std::uint8_t old = key[s];
      const bool upper = s < n;
      for (std::size_t nw = 0; nw < dim; ++nw) {
        const SuperPolynomial& g = upper ? d.on_basis[old][nw] : w[old][nw];
        if (g.is_zero()) continue;
        // sign exponent: |D||c| + P_<s (e_old + e_new)
        Parity expo = Parity::even;
        if (d.parity == Parity::odd) expo += pc;
        if (before == Parity::odd) expo += ch.parity(old) + ch.parity(nw);
        IndexKey nk = key;
        nk[s] = static_cast<std::uint8_t>(nw);
        push(nk, c * g, expo == Parity::odd);
      }
      before += ch.parity(old);
    }
  }
  for (auto& [k, terms] : acc) {
    auto v = SuperPolynomial::from_terms(t.chart(), std::move(terms));
    if (!v.is_zero()) r.accumulate(k, v);
  }
  return r;
}

}  // namespace qclass
