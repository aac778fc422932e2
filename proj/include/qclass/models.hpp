#pragma once

// Builders for standard Q-manifolds: odd tangent bundles, Chevalley-Eilenberg
// fields of Lie algebras, Lie algebroids, and the product with R^{1|1} used by
// the transgression construction.

#include "qclass/lie.hpp"

#include <tuple>

namespace qclass {

class model_error : public algebra_error {
 public:
  model_error(const std::string& what, TensorField witness = {})
      : algebra_error(what), witness_(std::move(witness)) {}
  const TensorField& witness() const { return witness_; }

 private:
  TensorField witness_;
};

enum class ModelKind { odd_tangent, chevalley_eilenberg, lie_algebroid, custom, extended };

inline std::string to_string(ModelKind k) {
  switch (k) {
    case ModelKind::odd_tangent: return "odd-tangent";
    case ModelKind::chevalley_eilenberg: return "chevalley-eilenberg";
    case ModelKind::lie_algebroid: return "lie-algebroid";
    case ModelKind::custom: return "custom";
    case ModelKind::extended: return "extended";
  }
  return "?";
}

struct ModelDescriptor {
  ModelKind kind;
  std::string description;
  HomologicalField q;

  const ChartPtr& chart() const { return q.chart(); }
};

/// Reserved names of the R^{1|1} coordinates appended by extend_with_R11.
/// User charts may not use the "__" prefix.
inline constexpr std::string_view kReservedPrefix = "__";
inline constexpr std::string_view kExtensionEven = "__t";
inline constexpr std::string_view kExtensionOdd = "__theta";

inline bool is_reserved_name(std::string_view name) { return name.starts_with(kReservedPrefix); }

/// Certifies a field, turning a nonzero [Q,Q] into a model_error.
inline HomologicalField certify_model_field(const TensorField& q, const std::string& what) {
  auto r = check_homological(q);
  if (!r.ok()) {
    std::string msg = what + ": [Q,Q] does not vanish; nonzero components at";
    for (const auto& [k, v] : r.self_bracket.components()) msg += " " + (*q.chart())[k[0]].name;
    throw model_error(msg, r.self_bracket);
  }
  return *r.field;
}

/// Pi T R^n: coordinates x1..xn (even), dx1..dxn (odd); Q = sum dx_i d/dx_i.
inline ModelDescriptor build_odd_tangent(unsigned base_dim) {
  if (base_dim == 0) throw model_error("odd tangent bundle needs base dimension >= 1");
  std::vector<Coordinate> coords;
  for (unsigned i = 1; i <= base_dim; ++i) coords.push_back({"x" + std::to_string(i), Parity::even});
  for (unsigned i = 1; i <= base_dim; ++i) coords.push_back({"dx" + std::to_string(i), Parity::odd});
  auto chart = make_chart(std::move(coords));
  TensorField q(chart, 1, 0, Parity::odd);
  for (unsigned i = 0; i < base_dim; ++i)
    q.set({static_cast<std::uint8_t>(i)}, SuperPolynomial::coordinate(chart, base_dim + i));
  return {ModelKind::odd_tangent, "odd tangent bundle of R^" + std::to_string(base_dim),
          certify_model_field(q, "odd tangent bundle")};
}

/// c^k_{ij}, indices zero-based.
struct StructureConstant {
  std::size_t k, i, j;
  Rational value;
};

using ConstantTable = std::vector<std::vector<std::vector<Rational>>>;  // [k][i][j]

/// Completes the table by antisymmetry; rejects inconsistent entries.
inline ConstantTable antisymmetric_table(std::size_t dim, const std::vector<StructureConstant>& entries) {
  ConstantTable c(dim, std::vector<std::vector<Rational>>(dim, std::vector<Rational>(dim, Rational(0))));
  std::vector<std::vector<std::vector<bool>>> given(dim, std::vector<std::vector<bool>>(dim, std::vector<bool>(dim, false)));
  auto where = [](const StructureConstant& s) {
    return "c^" + std::to_string(s.k + 1) + "_{" + std::to_string(s.i + 1) + std::to_string(s.j + 1) + "}";
  };
  for (const auto& s : entries) {
    if (s.k >= dim || s.i >= dim || s.j >= dim) throw model_error("structure constant index out of range: " + where(s));
    if (s.i == s.j && s.value != 0) throw model_error("antisymmetry violated: " + where(s) + " must vanish");
    if (given[s.k][s.i][s.j] && c[s.k][s.i][s.j] != s.value)
      throw model_error("antisymmetry violated: conflicting values for " + where(s));
    if (given[s.k][s.j][s.i] && c[s.k][s.j][s.i] != -s.value)
      throw model_error("antisymmetry violated: " + where(s) + " is not minus its transpose");
    c[s.k][s.i][s.j] = s.value;
    c[s.k][s.j][s.i] = -s.value;
    given[s.k][s.i][s.j] = given[s.k][s.j][s.i] = true;
  }
  return c;
}

/// First triple (i<j<k) on which the Jacobi identity fails, if any.
inline std::optional<std::tuple<std::size_t, std::size_t, std::size_t>> jacobi_violation(const ConstantTable& c) {
  const std::size_t n = c.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      for (std::size_t k = j + 1; k < n; ++k)
        for (std::size_t m = 0; m < n; ++m) {
          Rational s = 0;
          for (std::size_t l = 0; l < n; ++l)
            s += c[l][i][j] * c[m][l][k] + c[l][j][k] * c[m][l][i] + c[l][k][i] * c[m][l][j];
          if (s != 0) return std::make_tuple(i, j, k);
        }
  return std::nullopt;
}

/// Chart t1..tq (odd) with Q^k = -1/2 sum c^k_{ij} t_i t_j.
inline ModelDescriptor build_chevalley_eilenberg(std::size_t dim, const std::vector<StructureConstant>& constants) {
  const auto c = antisymmetric_table(dim, constants);
  std::vector<Coordinate> coords;
  for (std::size_t i = 1; i <= dim; ++i) coords.push_back({"t" + std::to_string(i), Parity::odd});
  auto chart = make_chart(std::move(coords));
  TensorField q(chart, 1, 0, Parity::odd);
  for (std::size_t k = 0; k < dim; ++k) {
    SuperPolynomial qk(chart);
    for (std::size_t i = 0; i < dim; ++i)
      for (std::size_t j = 0; j < dim; ++j)
        if (c[k][i][j] != 0)
          qk -= SuperPolynomial::coordinate(chart, i) * SuperPolynomial::coordinate(chart, j) * Rational(c[k][i][j] / 2);
    q.set({static_cast<std::uint8_t>(k)}, qk);
  }
  auto check = check_homological(q);
  if (!check.ok()) {
    std::string msg = "Jacobi identity fails";
    if (auto t = jacobi_violation(c))
      msg += " on the triple (" + std::to_string(std::get<0>(*t) + 1) + "," + std::to_string(std::get<1>(*t) + 1) + "," +
             std::to_string(std::get<2>(*t) + 1) + ")";
    throw model_error(msg, check.self_bracket);
  }
  return {ModelKind::chevalley_eilenberg, "Chevalley-Eilenberg field of a " + std::to_string(dim) + "-dimensional Lie algebra",
          *check.field};
}

/// Chart for a Lie algebroid: x1..xn even, t1..tq odd.
inline ChartPtr lie_algebroid_chart(std::size_t base_dim, std::size_t fiber_dim) {
  std::vector<Coordinate> coords;
  for (std::size_t i = 1; i <= base_dim; ++i) coords.push_back({"x" + std::to_string(i), Parity::even});
  for (std::size_t a = 1; a <= fiber_dim; ++a) coords.push_back({"t" + std::to_string(a), Parity::odd});
  return make_chart(std::move(coords));
}

/// Q = sum t^a rho^i_a(x) d/dx^i - 1/2 sum C^c_{ab}(x) t^a t^b d/dt^c on a
/// chart from lie_algebroid_chart. anchor[a][i] = rho^i_a, structure[c][a][b] = C^c_{ab}.
inline ModelDescriptor build_lie_algebroid(const ChartPtr& chart, std::size_t base_dim,
                                           const std::vector<std::vector<SuperPolynomial>>& anchor,
                                           const std::vector<std::vector<std::vector<SuperPolynomial>>>& structure) {
  const std::size_t q_dim = chart->dim() - base_dim;
  auto base_only = [&](const SuperPolynomial& f, const std::string& what) {
    if (!f.is_zero() && !same_chart(f.chart(), chart)) throw model_error(what + " is on a different chart");
    for (const auto& [m, c] : f.terms()) {
      if (m.odd != 0) throw model_error(what + " must depend on base coordinates only");
    }
  };
  if (anchor.size() != q_dim || structure.size() != q_dim) throw model_error("algebroid tables have wrong size");
  TensorField q(chart, 1, 0, Parity::odd);
  for (std::size_t a = 0; a < q_dim; ++a) {
    if (anchor[a].size() != base_dim) throw model_error("anchor table has wrong size");
    const auto ta = SuperPolynomial::coordinate(chart, base_dim + a);
    for (std::size_t i = 0; i < base_dim; ++i) {
      base_only(anchor[a][i], "anchor component");
      if (anchor[a][i].is_zero()) continue;
      q.accumulate({static_cast<std::uint8_t>(i)}, ta * anchor[a][i]);
    }
  }
  for (std::size_t c = 0; c < q_dim; ++c) {
    if (structure[c].size() != q_dim) throw model_error("structure function table has wrong size");
    for (std::size_t a = 0; a < q_dim; ++a) {
      if (structure[c][a].size() != q_dim) throw model_error("structure function table has wrong size");
      for (std::size_t b = 0; b < q_dim; ++b) {
        const auto& v = structure[c][a][b];
        base_only(v, "structure function");
        if (!(v == -structure[c][b][a]))
          throw model_error("antisymmetry violated: C^" + std::to_string(c + 1) + "_{" + std::to_string(a + 1) +
                            std::to_string(b + 1) + "}");
        if (v.is_zero()) continue;
        auto term = SuperPolynomial::coordinate(chart, base_dim + a) * SuperPolynomial::coordinate(chart, base_dim + b) * v;
        q.accumulate({static_cast<std::uint8_t>(base_dim + c)}, term * Rational(-1, 2));
      }
    }
  }
  return {ModelKind::lie_algebroid, "Lie algebroid of rank " + std::to_string(q_dim) + " over R^" + std::to_string(base_dim),
          certify_model_field(q, "Lie algebroid")};
}

/// Model from explicit components on a user chart.
inline ModelDescriptor build_custom(const TensorField& q, std::string description = "custom") {
  return {ModelKind::custom, std::move(description), certify_model_field(q, "custom field")};
}

// ---------------------------------------------------------------------------
// Product with R^{1|1}.

/// The chart with (__t even, __theta odd) appended.
inline ChartPtr extend_chart(const Chart& chart) {
  for (const auto& c : chart.coordinates())
    if (is_reserved_name(c.name))
      throw model_error("coordinate name '" + c.name + "' collides with the reserved prefix '__'");
  auto coords = chart.coordinates();
  coords.push_back({std::string(kExtensionEven), Parity::even});
  coords.push_back({std::string(kExtensionOdd), Parity::odd});
  return make_chart(std::move(coords));
}

/// Re-reads a polynomial on another chart with the same leading coordinates.
inline SuperPolynomial rechart(const SuperPolynomial& f, const ChartPtr& target) {
  for (const auto& [m, c] : f.terms()) {
    for (std::size_t i = target->dim(); i < kMaxCoordinates; ++i)
      if (m.exp[i] != 0 || (m.odd >> i) & 1u) throw algebra_error("polynomial uses coordinates outside the target chart");
  }
  return SuperPolynomial::from_terms(target, f.terms());
}

inline TensorField rechart(const TensorField& t, const ChartPtr& target) {
  TensorField r(target, t.n_upper(), t.m_lower(), t.parity());
  for (const auto& [k, v] : t.components()) {
    for (auto i : k)
      if (i >= target->dim()) throw algebra_error("tensor index outside the target chart");
    r.set(k, rechart(v, target));
  }
  return r;
}

/// M x R^{1|1} with Q~ = Q + __theta d/d__t.
inline ModelDescriptor extend_with_R11(const ModelDescriptor& m) {
  auto chart = extend_chart(*m.chart());
  const std::size_t n = m.chart()->dim();
  auto q = rechart(m.q.field(), chart);
  q.set({static_cast<std::uint8_t>(n)}, SuperPolynomial::coordinate(chart, n + 1));
  return {ModelKind::extended, m.description + " x R^{1|1}", certify_model_field(q, "extended field")};
}

}  // namespace qclass
