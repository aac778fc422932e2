#pragma once

// Vector fields as derivations, the graded bracket, Lie derivatives of
// arbitrary tensors and the coboundary delta = L_Q.

#include "qclass/tensor.hpp"

namespace qclass {

/// X(f) = sum_i X^i d_i f  (left derivatives, components on the left).
inline SuperPolynomial apply_vector(const TensorField& x, const SuperPolynomial& f) {
  if (!is_vector_field(x)) throw algebra_error("apply_vector expects a vector field");
  if (f.is_zero()) return SuperPolynomial(x.chart());
  if (!same_chart(x.chart(), f.chart())) throw algebra_error("chart mismatch in apply_vector");
  SuperPolynomial r(x.chart());
  for (const auto& [k, xi] : x.components()) {
    auto df = f.partial(k[0]);
    if (!df.is_zero()) r += xi * df;
  }
  return r;
}

/// [X,Y]^k = X(Y^k) - (-1)^{|X||Y|} Y(X^k)
inline TensorField bracket(const TensorField& x, const TensorField& y) {
  if (!is_vector_field(x) || !is_vector_field(y)) throw algebra_error("bracket expects vector fields");
  detail::require_same_chart(x, y, "bracket");
  TensorField r(x.chart(), 1, 0, x.parity() + y.parity());
  const bool minus = koszul(x.parity(), y.parity()) > 0;
  for (std::size_t k = 0; k < x.dim(); ++k) {
    const IndexKey key{static_cast<std::uint8_t>(k)};
    auto v = apply_vector(x, y.get(key));
    auto w = apply_vector(y, x.get(key));
    r.accumulate(key, minus ? v - w : v + w);
  }
  return r;
}

/// L_X as a derivation of the tensor algebra: L_X f = X(f), L_X d_k = [X, d_k].
inline Derivation lie_derivation(const TensorField& x) {
  if (!is_vector_field(x)) throw algebra_error("lie_derivative expects a vector field");
  const Chart& ch = *x.chart();
  const std::size_t n = ch.dim();
  Derivation d;
  d.parity = x.parity();
  d.on_function = [x](const SuperPolynomial& f) { return apply_vector(x, f); };
  d.on_basis.assign(n, std::vector<SuperPolynomial>(n, SuperPolynomial(x.chart())));
  // [X, d_k]^i = -(-1)^{|X| e_k} d_k X^i
  for (std::size_t k = 0; k < n; ++k)
    for (const auto& [key, xi] : x.components()) {
      auto v = xi.partial(k);
      if (v.is_zero()) continue;
      d.on_basis[k][key[0]] = koszul(x.parity(), ch.parity(k)) > 0 ? -v : v;
    }
  return d;
}

inline TensorField lie_derivative(const TensorField& x, const TensorField& t) {
  detail::require_same_chart(x, t, "lie_derivative");
  return apply_derivation(lie_derivation(x), t);
}

struct HomologicalCheck;
HomologicalCheck check_homological(const TensorField& x);

/// An odd vector field certified to satisfy [Q,Q] = 0. Only obtainable from
/// check_homological / certify_homological.
class HomologicalField {
 public:
  const TensorField& field() const { return q_; }
  const ChartPtr& chart() const { return q_.chart(); }
  /// Cached L_Q derivation.
  const Derivation& derivation() const { return *delta_; }

 private:
  explicit HomologicalField(TensorField q)
      : q_(std::move(q)), delta_(std::make_shared<const Derivation>(lie_derivation(q_))) {}
  friend struct HomologicalCheck;
  friend HomologicalCheck check_homological(const TensorField& x);

  TensorField q_;
  std::shared_ptr<const Derivation> delta_;
};

/// Outcome of the [Q,Q] = 0 test: either a certified field or the nonzero
/// components of the self-bracket.
struct HomologicalCheck {
  std::optional<HomologicalField> field;
  TensorField self_bracket;

  bool ok() const { return field.has_value(); }
};

class homological_error : public algebra_error {
 public:
  homological_error(const std::string& what, TensorField witness)
      : algebra_error(what), witness_(std::move(witness)) {}
  const TensorField& witness() const { return witness_; }

 private:
  TensorField witness_;
};

inline HomologicalCheck check_homological(const TensorField& x) {
  if (!is_vector_field(x)) throw algebra_error("check_homological expects a vector field");
  if (x.parity() != Parity::odd) throw algebra_error("homological field must be odd");
  x.validate();
  HomologicalCheck r;
  r.self_bracket = bracket(x, x);
  if (r.self_bracket.is_zero()) r.field = HomologicalField(x);
  return r;
}

inline HomologicalField certify_homological(const TensorField& x) {
  auto r = check_homological(x);
  if (!r.ok())
    throw homological_error("[Q,Q] does not vanish (" + std::to_string(r.self_bracket.components().size()) +
                                " nonzero components)",
                            r.self_bracket);
  return *r.field;
}

/// delta t = L_Q t
inline TensorField delta(const HomologicalField& q, const TensorField& t) {
  detail::require_same_chart(q.field(), t, "delta");
  return apply_derivation(q.derivation(), t);
}

inline SuperPolynomial delta(const HomologicalField& q, const SuperPolynomial& f) {
  return apply_vector(q.field(), f);
}

}  // namespace qclass
