#pragma once

// Shared fixtures for the unit tests.

#include "qclass/cohomology.hpp"

#include <gtest/gtest.h>

#include <ostream>

namespace qclass {

inline void PrintTo(const SuperPolynomial& f, std::ostream* os) {
  if (f.is_zero()) {
    *os << "0";
    return;
  }
  bool first = true;
  for (const auto& [m, c] : f.terms()) {
    *os << (first ? "" : " + ") << c.get_str();
    for (std::size_t i = 0; i < f.chart()->dim(); ++i) {
      if (m.exp[i]) *os << "*" << (*f.chart())[i].name << "^" << m.exp[i];
      if ((m.odd >> i) & 1u) *os << "*" << (*f.chart())[i].name;
    }
    first = false;
  }
}

inline void PrintTo(const TensorField& t, std::ostream* os) {
  *os << "(" << t.n_upper() << "," << t.m_lower() << ") " << to_string(t.parity()) << " {";
  for (const auto& [k, f] : t.components()) {
    *os << " [";
    for (auto i : k) *os << (*t.chart())[i].name << ",";
    *os << "]: ";
    PrintTo(f, os);
  }
  *os << " }";
}

}  // namespace qclass

namespace qclass::test {

struct NamedModel {
  std::string name;
  ModelDescriptor model;
};

inline ModelDescriptor affine_line_ce() { return build_chevalley_eilenberg(2, {{1, 0, 1, Rational(1)}}); }

inline ModelDescriptor sl2_ce() {
  // e1 = h, e2 = e, e3 = f
  return build_chevalley_eilenberg(3, {{1, 0, 1, Rational(2)}, {2, 0, 2, Rational(-2)}, {0, 1, 2, Rational(1)}});
}

/// Action algebroid of the affine Lie algebra on R: rho(e1) = -x d_x, rho(e2) = d_x, [e1,e2] = e2.
inline ModelDescriptor affine_action_algebroid() {
  auto chart = lie_algebroid_chart(1, 2);
  const SuperPolynomial zero(chart);
  const auto x = SuperPolynomial::coordinate(chart, 0);
  std::vector<std::vector<SuperPolynomial>> anchor{{-x}, {SuperPolynomial(chart, 1)}};
  std::vector<std::vector<std::vector<SuperPolynomial>>> structure(
      2, std::vector<std::vector<SuperPolynomial>>(2, std::vector<SuperPolynomial>(2, zero)));
  structure[1][0][1] = SuperPolynomial(chart, 1);
  structure[1][1][0] = SuperPolynomial(chart, -1);
  return build_lie_algebroid(chart, 1, anchor, structure);
}

inline std::vector<NamedModel> sample_models() {
  return {{"odd_tangent_1", build_odd_tangent(1)},
          {"odd_tangent_2", build_odd_tangent(2)},
          {"affine_ce", affine_line_ce()},
          {"sl2_ce", sl2_ce()},
          {"action_algebroid", affine_action_algebroid()}};
}

inline Parity random_parity(Rng& rng) { return parity_of(rng.uniform(0, 1)); }

inline TensorField random_vector(Rng& rng, const ChartPtr& chart, Parity p) {
  return random_tensor(rng, chart, 1, 0, p, {2, 2, 2}, 2, 3);
}

inline TensorField random_endo(Rng& rng, const ChartPtr& chart, Parity p) {
  return random_tensor(rng, chart, 1, 1, p, {2, 2, 2}, 1, 3);
}

}  // namespace qclass::test
