#pragma once

// Universal cocycles: the endomorphism-valued 1-form Omega, the B and C
// series built from it, the flat A series, Pontryagin characters and the
// tensor powers of Q.

#include "qclass/connection.hpp"

namespace qclass {

/// Inconsistency that can only come from a broken sign convention, never from
/// user input.
class internal_inconsistency : public algebra_error {
 public:
  using algebra_error::algebra_error;
};

/// Omega_X = nabla_X Lambda - R_{XQ}, stored both per coordinate direction
/// and as the odd (1,2)-tensor T with insert_vector(X, T, 0) = Omega_X.
/// Lower slot 0 is the form slot, lower slot 1 the endomorphism slot.
struct OmegaForm {
  ChartPtr chart;
  std::vector<TensorField> by_direction;  // Omega_{d_a}, parity e_a + 1
  TensorField tensor;
};

/// Contraction of the last lower slot of s with the upper slot of t: the
/// composition of endomorphism parts of two endomorphism-valued forms.
/// Lower slots of the result: s's form slots, then all of t's lower slots.
inline TensorField compose_forms(const TensorField& s, const TensorField& t) {
  if (s.n_upper() != 1 || s.m_lower() < 1 || t.n_upper() != 1 || t.m_lower() < 1)
    throw algebra_error("compose_forms expects endomorphism-valued forms");
  detail::require_same_chart(s, t, "compose_forms");
  const Chart& ch = *s.chart();
  const std::size_t d = ch.dim();
  // contract(s (x) t, 1, m_s - 1) evaluated on matching index pairs only.
  std::vector<std::vector<std::pair<const IndexKey*, const SuperPolynomial*>>> by_upper(d);
  for (const auto& [k, f] : t.components()) by_upper[k[0]].emplace_back(&k, &f);
  TensorField r(s.chart(), 1, s.m_lower() + t.m_lower() - 1, s.parity() + t.parity());
  std::map<IndexKey, std::vector<SuperPolynomial::Term>> acc;
  for (const auto& [ks, fs] : s.components()) {
    const std::uint8_t j = ks.back();
    const Parity word_s = detail::sum_parity(ch, ks);
    const Parity js = word_s + ch.parity(ks[0]);  // lower part of s
    const Parity js_before = js + ch.parity(j);
    for (const auto& [kt, ft] : by_upper[j]) {
      const Parity pft = t.component_parity(*kt);
      // tensor product: coefficient of t past s's word; s's lowers past t's upper
      Parity e = Parity::even;
      if (koszul(word_s, pft) < 0) e += Parity::odd;
      if (koszul(js, ch.parity(j)) < 0) e += Parity::odd;
      // contraction of upper slot 1 (t's) with lower slot m_s-1 (s's last)
      const Parity uppers = ch.parity(ks[0]) + ch.parity(j);
      if (koszul(ch.parity(j), uppers + js_before + ch.parity(ks[0])) < 0) e += Parity::odd;
      IndexKey key;
      key.reserve(ks.size() + kt->size() - 2);
      key.push_back(ks[0]);
      key.insert(key.end(), ks.begin() + 1, ks.end() - 1);
      key.insert(key.end(), kt->begin() + 1, kt->end());
      auto prod = fs * *ft;
      auto& bucket = acc[key];
      for (const auto& tm : prod.terms())
        bucket.emplace_back(tm.first, e == Parity::odd ? Rational(-tm.second) : tm.second);
    }
  }
  for (auto& [k, terms] : acc) {
    auto v = SuperPolynomial::from_terms(s.chart(), std::move(terms));
    if (!v.is_zero()) r.accumulate(k, v);
  }
  return r;
}

/// Omega for (nabla, Q); throws internal_inconsistency unless delta Omega = 0.
inline OmegaForm omega_form(const Connection& c, const HomologicalField& q) {
  if (!same_chart(c.chart(), q.chart())) throw algebra_error("chart mismatch in omega_form");
  const auto& chart = q.chart();
  const auto lambda = lambda_endo(c, q);
  OmegaForm om{chart, {}, {}};
  for (std::size_t a = 0; a < chart->dim(); ++a) {
    const auto x = TensorField::coordinate_vector(chart, a);
    auto v = covariant_derivative(c, x, lambda);
    v -= curvature_from_table(c, x, q.field());
    if (v.is_zero()) v = TensorField(chart, 1, 1, chart->parity(a) + Parity::odd);
    om.by_direction.push_back(std::move(v));
  }
  om.tensor = assemble_first_lower(chart, 1, 1, Parity::odd, om.by_direction);
  if (!delta(q, om.tensor).is_zero())
    throw internal_inconsistency("delta Omega does not vanish: sign conventions are inconsistent");
  return om;
}

/// B_n: the (1, n+1) tensor composing n copies of Omega; B_0 = identity.
inline TensorField b_series(const OmegaForm& om, unsigned n) {
  if (n == 0) return identity_endo(om.chart);
  TensorField b = om.tensor;
  for (unsigned k = 1; k < n; ++k) b = compose_forms(b, om.tensor);
  return b;
}

/// C_n = Str B_n, a (0, n) tensor (n >= 1).
inline TensorField c_series(const OmegaForm& om, unsigned n) {
  if (n == 0) throw algebra_error("C_0 is the constant superdimension; the C series starts at n = 1");
  const auto b = b_series(om, n);
  return contract(b, 0, b.m_lower() - 1);
}

/// Sequential insertion of coordinate fields into the form slots of a
/// B-series or C-series tensor, multiplied by (-1)^{sum_k e(a_k)(k-1)} so that
///   evaluate_form(B_n, a) = Omega_{a_1} o ... o Omega_{a_n}
///   evaluate_form(C_n, a) = Str(Omega_{a_1} ... Omega_{a_n}).
inline TensorField evaluate_form(const TensorField& t, const std::vector<std::size_t>& args) {
  const Chart& ch = *t.chart();
  const unsigned endo_slot = t.n_upper() == 1 ? 1u : 0u;
  if (t.m_lower() != args.size() + endo_slot) throw algebra_error("evaluate_form: wrong number of arguments");
  TensorField r = t;
  Parity sign = Parity::even;
  for (std::size_t k = args.size(); k-- > 0;) {
    r = insert_vector(TensorField::coordinate_vector(t.chart(), args[k]), r, static_cast<unsigned>(k));
    if (k % 2 == 1) sign += ch.parity(args[k]);
  }
  return sign == Parity::odd ? -r : r;
}

/// Omega_{a_1} o ... o Omega_{a_n}, straight from the definition.
inline TensorField omega_product(const OmegaForm& om, const std::vector<std::size_t>& args) {
  TensorField r = identity_endo(om.chart);
  for (auto a : args) r = endo_compose(r, om.by_direction.at(a));
  return r;
}

class flatness_error : public algebra_error {
 public:
  using algebra_error::algebra_error;
};

/// A_n = Str(Lambda^{2n+1}) for a flat connection. The curvature completion
/// for general connections is not provided.
inline SuperPolynomial a_series_flat(const Connection& c, const HomologicalField& q, unsigned n) {
  if (!c.is_flat())
    throw flatness_error("the A series is only available for flat connections; this connection has nonzero curvature");
  const auto lambda = lambda_endo(c, q);
  return supertrace(endo_power(lambda, 2 * n + 1));
}

/// P_n = Str((R_QQ)^{2n}), n >= 1.
inline SuperPolynomial pontryagin_char(const Connection& c, const HomologicalField& q, unsigned n) {
  if (n == 0) throw algebra_error("Pontryagin characters start at n = 1");
  const auto rqq = curvature_from_table(c, q.field(), q.field());
  if (rqq.is_zero()) return SuperPolynomial(q.chart());
  return supertrace(endo_power(rqq, 2 * n));
}

/// Q (x) ... (x) Q, n >= 1 factors.
inline TensorField q_power(const HomologicalField& q, unsigned n) {
  if (n == 0) throw algebra_error("Q^n requires n >= 1");
  TensorField r = q.field();
  for (unsigned k = 1; k < n; ++k) r = tensor_product(r, q.field());
  return r;
}

enum class Series { A, B, C, P, Qpow };

inline std::string to_string(Series s) {
  switch (s) {
    case Series::A: return "A";
    case Series::B: return "B";
    case Series::C: return "C";
    case Series::P: return "P";
    case Series::Qpow: return "Qpow";
  }
  return "?";
}

inline std::optional<Series> parse_series(std::string_view s) {
  if (s == "A") return Series::A;
  if (s == "B") return Series::B;
  if (s == "C") return Series::C;
  if (s == "P") return Series::P;
  if (s == "Qpow" || s == "Q") return Series::Qpow;
  return std::nullopt;
}

/// Evaluates one series member as a tensor ((0,0) for A and P).
inline TensorField compute_cocycle(Series s, unsigned order, const Connection& c, const HomologicalField& q) {
  switch (s) {
    case Series::A: return TensorField::scalar(a_series_flat(c, q, order)).with_parity(Parity::odd);
    case Series::B: return b_series(omega_form(c, q), order);
    case Series::C: return c_series(omega_form(c, q), order);
    case Series::P: return TensorField::scalar(pontryagin_char(c, q, order));
    case Series::Qpow: return q_power(q, order);
  }
  throw algebra_error("unknown series");
}

/// Record of a computed cocycle; the residual is the recomputed delta of the value.
struct CocycleReport {
  Series series = Series::C;
  unsigned order = 0;
  TensorField value;
  TensorField closedness_residual;
  std::string connection;
  std::string model;

  bool closed() const { return closedness_residual.is_zero(); }
};

inline CocycleReport make_cocycle_report(Series s, unsigned order, const Connection& c, const HomologicalField& q,
                                         std::string connection_name = {}, std::string model_name = {}) {
  CocycleReport r;
  r.series = s;
  r.order = order;
  r.value = compute_cocycle(s, order, c, q);
  r.closedness_residual = delta(q, r.value);
  r.connection = std::move(connection_name);
  r.model = std::move(model_name);
  return r;
}

}  // namespace qclass
