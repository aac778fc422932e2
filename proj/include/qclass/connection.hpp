#pragma once

// Symmetric connections on a chart: covariant derivatives of arbitrary
// tensors, curvature endomorphisms, the odd endomorphism Lambda and residual
// checks of the structural relations between them.

#include "qclass/lie.hpp"

#include <mutex>

namespace qclass {

class connection_error : public algebra_error {
 public:
  using algebra_error::algebra_error;
};

/// Christoffel symbols with nabla_{d_i} d_j = sum_k Gamma^k_{ij} d_k
/// (coefficients on the left). Graded symmetric: Gamma^k_{ij} = (-1)^{e_i e_j} Gamma^k_{ji}.
class Connection {
 public:
  using Table = std::vector<std::vector<std::vector<SuperPolynomial>>>;  // [k][i][j]

  explicit Connection(ChartPtr chart) : chart_(std::move(chart)) {
    const std::size_t n = chart_->dim();
    gamma_.assign(n, std::vector<std::vector<SuperPolynomial>>(n, std::vector<SuperPolynomial>(n, SuperPolynomial(chart_))));
  }

  Connection(ChartPtr chart, Table gamma) : chart_(std::move(chart)), gamma_(std::move(gamma)) { validate(); }

  static Connection trivial(const ChartPtr& chart) { return Connection(chart); }

  const ChartPtr& chart() const { return chart_; }
  const SuperPolynomial& gamma(std::size_t k, std::size_t i, std::size_t j) const { return gamma_[k][i][j]; }
  const Table& table() const { return gamma_; }

  bool is_trivial() const {
    for (const auto& a : gamma_)
      for (const auto& b : a)
        for (const auto& c : b)
          if (!c.is_zero()) return false;
    return true;
  }

  /// Curvature component table R^i_{abj} := (R_{d_a d_b})^i_j, memoized.
  const TensorField& curvature_table() const;

  /// (R_{d_a d_b}) as an endomorphism, from the memoized table.
  TensorField curvature(std::size_t a, std::size_t b) const;

  /// True iff every curvature component vanishes.
  bool is_flat() const { return curvature_table().is_zero(); }

 private:
  void validate() const {
    const std::size_t n = chart_->dim();
    if (gamma_.size() != n) throw connection_error("Christoffel table has wrong size");
    for (std::size_t k = 0; k < n; ++k) {
      if (gamma_[k].size() != n) throw connection_error("Christoffel table has wrong size");
      for (std::size_t i = 0; i < n; ++i) {
        if (gamma_[k][i].size() != n) throw connection_error("Christoffel table has wrong size");
        for (std::size_t j = 0; j < n; ++j) {
          const auto& g = gamma_[k][i][j];
          const std::string where = "(" + (*chart_)[k].name + "," + (*chart_)[i].name + "," + (*chart_)[j].name + ")";
          if (g.is_zero()) {
            if (!gamma_[k][j][i].is_zero())
              throw connection_error("Christoffel symbol " + where + " violates graded symmetry");
            continue;
          }
          if (!same_chart(g.chart(), chart_)) throw connection_error("Christoffel symbol " + where + " on another chart");
          auto p = g.parity();
          if (!p || *p != chart_->parity(k) + chart_->parity(i) + chart_->parity(j))
            throw connection_error("Christoffel symbol " + where + " violates the parity rule");
          const auto& t = gamma_[k][j][i];
          const bool ok = koszul(chart_->parity(i), chart_->parity(j)) > 0 ? t == g : t == -g;
          if (!ok) throw connection_error("Christoffel symbol " + where + " violates graded symmetry");
        }
      }
    }
  }

  struct Cache {
    std::once_flag once;
    TensorField curvature;
  };

  ChartPtr chart_;
  Table gamma_;
  std::shared_ptr<Cache> cache_ = std::make_shared<Cache>();
};

/// nabla_X as a derivation: nabla_X f = X(f), nabla_X d_k = sum_a X^a Gamma^i_{ak} d_i.
inline Derivation covariant_derivation(const Connection& c, const TensorField& x) {
  if (!is_vector_field(x)) throw algebra_error("covariant derivative direction must be a vector field");
  if (!same_chart(c.chart(), x.chart())) throw algebra_error("chart mismatch in covariant derivative");
  const std::size_t n = x.dim();
  Derivation d;
  d.parity = x.parity();
  d.on_function = [x](const SuperPolynomial& f) { return apply_vector(x, f); };
  d.on_basis.assign(n, std::vector<SuperPolynomial>(n, SuperPolynomial(x.chart())));
  for (const auto& [key, xa] : x.components()) {
    const std::size_t a = key[0];
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t i = 0; i < n; ++i) {
        const auto& g = c.gamma(i, a, k);
        if (!g.is_zero()) d.on_basis[k][i] += xa * g;
      }
  }
  return d;
}

/// Directional covariant derivative nabla_X t.
inline TensorField covariant_derivative(const Connection& c, const TensorField& x, const TensorField& t) {
  detail::require_same_chart(x, t, "covariant_derivative");
  return apply_derivation(covariant_derivation(c, x), t);
}

/// The (n, m+1) tensor T with a new FIRST lower slot such that
/// insert_vector(d_a, T, 0) = values[a]; `parity` is the intrinsic parity of
/// T, values[a] has parity `parity + e_a`. Component rule:
/// T^I_{aJ} = (-1)^{e_a (parity + e(J))} values[a]^I_J.
inline TensorField assemble_first_lower(const ChartPtr& chart, unsigned n, unsigned m, Parity parity,
                                        const std::vector<TensorField>& values) {
  const Chart& ch = *chart;
  TensorField t(chart, n, m + 1, parity);
  for (std::size_t a = 0; a < values.size(); ++a) {
    const auto& v = values[a];
    if (v.n_upper() != n || v.m_lower() != m) throw algebra_error("assemble_first_lower: value has wrong type");
    for (const auto& [k, f] : v.components()) {
      Parity pj = parity;
      for (std::size_t s = n; s < k.size(); ++s) pj += ch.parity(k[s]);
      IndexKey key;
      key.reserve(k.size() + 1);
      key.insert(key.end(), k.begin(), k.begin() + n);
      key.push_back(static_cast<std::uint8_t>(a));
      key.insert(key.end(), k.begin() + n, k.end());
      t.accumulate(key, koszul(ch.parity(a), pj) < 0 ? -f : f);
    }
  }
  return t;
}

/// Full covariant derivative: (n, m+1) tensor with insert_vector(X, nabla t, 0) = nabla_X t.
inline TensorField covariant_derivative(const Connection& c, const TensorField& t) {
  std::vector<TensorField> values;
  for (std::size_t a = 0; a < t.dim(); ++a)
    values.push_back(covariant_derivative(c, TensorField::coordinate_vector(t.chart(), a), t));
  return assemble_first_lower(t.chart(), t.n_upper(), t.m_lower(), t.parity(), values);
}

/// R_{XY} = [nabla_X, nabla_Y] - nabla_{[X,Y]}, assembled from its action on
/// coordinate vector fields.
inline TensorField curvature_endo(const Connection& c, const TensorField& x, const TensorField& y) {
  const auto dx = covariant_derivation(c, x);
  const auto dy = covariant_derivation(c, y);
  const auto dxy = covariant_derivation(c, bracket(x, y));
  const bool minus = koszul(x.parity(), y.parity()) > 0;
  std::vector<TensorField> images;
  for (std::size_t j = 0; j < x.dim(); ++j) {
    const auto e = TensorField::coordinate_vector(x.chart(), j);
    auto xy = apply_derivation(dx, apply_derivation(dy, e));
    auto yx = apply_derivation(dy, apply_derivation(dx, e));
    auto v = minus ? xy - yx : xy + yx;
    v -= apply_derivation(dxy, e);
    images.push_back(std::move(v));
  }
  return endo_from_images(x.chart(), x.parity() + y.parity(), images);
}

inline const TensorField& Connection::curvature_table() const {
  std::call_once(cache_->once, [this] {
    const std::size_t n = chart_->dim();
    TensorField r(chart_, 1, 3, Parity::even);
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b) {
        auto e = curvature_endo(*this, TensorField::coordinate_vector(chart_, a), TensorField::coordinate_vector(chart_, b));
        for (const auto& [k, f] : e.components())
          r.accumulate({k[0], static_cast<std::uint8_t>(a), static_cast<std::uint8_t>(b), k[1]}, f);
      }
    cache_->curvature = std::move(r);
  });
  return cache_->curvature;
}

inline TensorField Connection::curvature(std::size_t a, std::size_t b) const {
  const auto& r = curvature_table();
  TensorField e(chart_, 1, 1, chart_->parity(a) + chart_->parity(b));
  for (const auto& [k, f] : r.components())
    if (k[1] == a && k[2] == b) e.accumulate({k[0], k[3]}, f);
  return e;
}

/// R_{XY} = sum_{a,b} (-1)^{e_a |Y^b|} X^a Y^b R_{d_a d_b}, from the memoized table.
inline TensorField curvature_from_table(const Connection& c, const TensorField& x, const TensorField& y) {
  const Chart& ch = *c.chart();
  TensorField r(c.chart(), 1, 1, x.parity() + y.parity());
  for (const auto& [ka, xa] : x.components())
    for (const auto& [kb, yb] : y.components()) {
      const auto rab = c.curvature(ka[0], kb[0]);
      if (rab.is_zero()) continue;
      const int sign = koszul(ch.parity(ka[0]), y.component_parity(kb));
      auto term = scale(xa * yb, rab);
      r += sign < 0 ? -term : term;
    }
  return r;
}

/// Lambda = nabla_Q - L_Q restricted to vector fields, i.e. the odd
/// endomorphism Lambda(Y) = (-1)^{|Y|} nabla_Y Q.
inline TensorField lambda_endo(const Connection& c, const HomologicalField& q) {
  if (!same_chart(c.chart(), q.chart())) throw algebra_error("chart mismatch in lambda_endo");
  const auto cov = covariant_derivation(c, q.field());
  const auto& lie = q.derivation();
  const std::size_t n = q.field().dim();
  TensorField l(q.chart(), 1, 1, Parity::odd);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i)
      l.accumulate({static_cast<std::uint8_t>(i), static_cast<std::uint8_t>(j)}, cov.on_basis[j][i] - lie.on_basis[j][i]);
  l.validate();
  return l;
}

/// Named residual tensors; every entry must vanish for consistent input.
struct ResidualReport {
  struct Entry {
    std::string name;
    TensorField residual;
  };
  std::vector<Entry> entries;

  bool all_zero() const {
    for (const auto& e : entries)
      if (!e.residual.is_zero()) return false;
    return true;
  }
};

inline TensorField endo_power(const TensorField& a, unsigned k) {
  TensorField r = identity_endo(a.chart());
  for (unsigned i = 0; i < k; ++i) r = endo_compose(r, a);
  return r;
}

/// Residuals of
///   nabla_Q Q = 0,
///   nabla_Q Lambda = 1/2 R_QQ + Lambda^2,
///   nabla_X R_QQ = 2 (R_{[X,Q]Q} - nabla_Q R_QX)   for every coordinate field X.
inline ResidualReport verify_structural_relations(const Connection& c, const HomologicalField& q) {
  const auto& Q = q.field();
  ResidualReport rep;
  const auto covQ = covariant_derivation(c, Q);
  rep.entries.push_back({"nabla_Q Q", apply_derivation(covQ, Q)});

  const auto lambda = lambda_endo(c, q);
  const auto rqq = curvature_endo(c, Q, Q);
  auto second = apply_derivation(covQ, lambda) - rqq * Rational(1, 2) - endo_compose(lambda, lambda);
  rep.entries.push_back({"nabla_Q Lambda - R_QQ/2 - Lambda^2", std::move(second)});

  for (std::size_t a = 0; a < Q.dim(); ++a) {
    const auto x = TensorField::coordinate_vector(Q.chart(), a);
    auto lhs = covariant_derivative(c, x, rqq);
    auto rhs = curvature_endo(c, bracket(x, Q), Q) - apply_derivation(covQ, curvature_endo(c, Q, x));
    rep.entries.push_back({"nabla_X R_QQ - 2(R_[X,Q]Q - nabla_Q R_QX), X = d_" + (*Q.chart())[a].name,
                           lhs - rhs * Rational(2)});
  }
  return rep;
}

/// Residual of nabla_Q A = L_Q A + [Lambda, A].
inline ResidualReport verify_cov_lie_relation(const Connection& c, const HomologicalField& q, const TensorField& a) {
  if (!is_endomorphism(a)) throw algebra_error("verify_cov_lie_relation expects an endomorphism");
  const auto lambda = lambda_endo(c, q);
  auto r = covariant_derivative(c, q.field(), a) - delta(q, a) - endo_commutator(lambda, a);
  ResidualReport rep;
  rep.entries.push_back({"nabla_Q A - L_Q A - [Lambda, A]", std::move(r)});
  return rep;
}

}  // namespace qclass
