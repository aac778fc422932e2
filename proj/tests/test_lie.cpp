#include "support.hpp"

using namespace qclass;
using namespace qclass::test;

namespace {

TensorField signed_if(bool negate, const TensorField& t) { return negate ? -t : t; }

}  // namespace

TEST(Lie, ApplyVectorExamples) {
  auto m = build_odd_tangent(1);
  const auto& chart = m.chart();
  auto x = SuperPolynomial::coordinate(chart, 0), dx = SuperPolynomial::coordinate(chart, 1);
  EXPECT_EQ(delta(m.q, x), dx);
  EXPECT_TRUE(delta(m.q, dx).is_zero());
  EXPECT_EQ(delta(m.q, x * x), x * dx * Rational(2));
}

TEST(Lie, AffineCeField) {
  auto m = affine_line_ce();
  const auto& chart = m.chart();
  auto t1 = SuperPolynomial::coordinate(chart, 0), t2 = SuperPolynomial::coordinate(chart, 1);
  EXPECT_TRUE(m.q.field().get({0}).is_zero());
  EXPECT_EQ(m.q.field().get({1}), -(t1 * t2));
  EXPECT_TRUE(delta(m.q, t1).is_zero());
  EXPECT_EQ(delta(m.q, t2), -(t1 * t2));
}

TEST(Lie, BracketExamples) {
  auto chart = make_chart({{"x", Parity::even}, {"th", Parity::odd}});
  auto dx = TensorField::coordinate_vector(chart, 0);
  auto dth = TensorField::coordinate_vector(chart, 1);
  auto x = SuperPolynomial::coordinate(chart, 0), th = SuperPolynomial::coordinate(chart, 1);
  EXPECT_TRUE(bracket(dx, dth).is_zero());
  // [th d_x, th d_x] = 0 but [th d_th, d_th] = -d_th ... checked through the formula
  auto q = scale(th, dx);
  EXPECT_TRUE(bracket(q, q).is_zero());
  auto e = scale(x, dx);
  EXPECT_EQ(bracket(e, dx), -dx);
  auto n = scale(th, dth);
  EXPECT_EQ(bracket(dth, n), dth);
}

TEST(Lie, BracketGradedAntisymmetry) {
  auto chart = build_odd_tangent(2).chart();
  Rng rng(41);
  for (int trial = 0; trial < 30; ++trial) {
    auto x = random_vector(rng, chart, random_parity(rng));
    auto y = random_vector(rng, chart, random_parity(rng));
    EXPECT_EQ(bracket(x, y), signed_if(koszul(x.parity(), y.parity()) > 0, bracket(y, x)));
  }
}

TEST(Lie, GradedJacobi) {
  auto chart = build_odd_tangent(2).chart();
  Rng rng(42);
  for (int trial = 0; trial < 20; ++trial) {
    auto x = random_vector(rng, chart, random_parity(rng));
    auto y = random_vector(rng, chart, random_parity(rng));
    auto z = random_vector(rng, chart, random_parity(rng));
    // [X,[Y,Z]] = [[X,Y],Z] + (-1)^{|X||Y|} [Y,[X,Z]]
    auto lhs = bracket(x, bracket(y, z));
    auto rhs = bracket(bracket(x, y), z) + signed_if(koszul(x.parity(), y.parity()) < 0, bracket(y, bracket(x, z)));
    EXPECT_EQ(lhs, rhs);
  }
}

TEST(Lie, LieDerivativeOfVectorIsBracket) {
  auto chart = affine_action_algebroid().chart();
  Rng rng(43);
  for (int trial = 0; trial < 20; ++trial) {
    auto x = random_vector(rng, chart, random_parity(rng));
    auto y = random_vector(rng, chart, random_parity(rng));
    EXPECT_EQ(lie_derivative(x, y), bracket(x, y));
  }
}

TEST(Lie, LieDerivativeRepresentsBracket) {
  auto chart = build_odd_tangent(2).chart();
  Rng rng(44);
  for (int trial = 0; trial < 15; ++trial) {
    auto x = random_vector(rng, chart, random_parity(rng));
    auto y = random_vector(rng, chart, random_parity(rng));
    auto t = random_tensor(rng, chart, 1, 1, random_parity(rng), {2, 2, 2}, 1, 3);
    auto lhs = lie_derivative(bracket(x, y), t);
    auto rhs = lie_derivative(x, lie_derivative(y, t)) -
               signed_if(koszul(x.parity(), y.parity()) < 0, lie_derivative(y, lie_derivative(x, t)));
    EXPECT_EQ(lhs, rhs);
  }
}

TEST(Lie, LieDerivativeCommutesWithContraction) {
  auto chart = affine_action_algebroid().chart();
  Rng rng(45);
  for (int trial = 0; trial < 15; ++trial) {
    auto x = random_vector(rng, chart, random_parity(rng));
    auto t = random_tensor(rng, chart, 1, 2, random_parity(rng), {2, 2, 2}, 1, 3);
    EXPECT_EQ(lie_derivative(x, contract(t, 0, 1)), contract(lie_derivative(x, t), 0, 1));
    EXPECT_EQ(lie_derivative(x, contract(t, 0, 0)), contract(lie_derivative(x, t), 0, 0));
  }
}

TEST(Lie, DeltaSquaredVanishes) {
  Rng rng(46);
  for (const auto& [name, m] : sample_models()) {
    for (int trial = 0; trial < 6; ++trial) {
      const unsigned n = rng.uniform(0, 2), k = rng.uniform(0, 2);
      auto t = random_tensor(rng, m.chart(), n, k, random_parity(rng), {2, 2, 2}, 1, 3);
      EXPECT_TRUE(delta(m.q, delta(m.q, t)).is_zero()) << name;
    }
    auto f = random_polynomial(rng, m.chart(), Parity::even, {3, 4, 2});
    EXPECT_TRUE(delta(m.q, delta(m.q, f)).is_zero()) << name;
  }
}

TEST(Lie, DeltaLeibniz) {
  Rng rng(47);
  for (const auto& [name, m] : sample_models()) {
    for (int trial = 0; trial < 5; ++trial) {
      auto a = random_tensor(rng, m.chart(), rng.uniform(0, 1), rng.uniform(0, 1), random_parity(rng), {2, 2, 2}, 1, 3);
      auto b = random_tensor(rng, m.chart(), rng.uniform(0, 1), rng.uniform(0, 1), random_parity(rng), {2, 2, 2}, 1, 3);
      auto lhs = delta(m.q, tensor_product(a, b));
      auto rhs = tensor_product(delta(m.q, a), b) +
                 signed_if(a.parity() == Parity::odd, tensor_product(a, delta(m.q, b)));
      EXPECT_EQ(lhs, rhs) << name;
    }
  }
}

TEST(Lie, DeltaOnFunctionsIsDerivation) {
  Rng rng(48);
  for (const auto& [name, m] : sample_models()) {
    auto f = random_polynomial(rng, m.chart(), Parity::odd, {3, 3, 2});
    auto g = random_polynomial(rng, m.chart(), Parity::even, {3, 3, 2});
    EXPECT_EQ(delta(m.q, f * g), delta(m.q, f) * g - f * delta(m.q, g)) << name;
    auto dt = delta(m.q, TensorField::scalar(f));
    EXPECT_EQ(dt.get({}), delta(m.q, f)) << name;
  }
}

TEST(Lie, NonHomologicalFieldIsRejectedWithWitness) {
  auto chart = make_chart({{"x", Parity::even}, {"th", Parity::odd}});
  TensorField q(chart, 1, 0, Parity::odd);
  q.set({1}, SuperPolynomial::coordinate(chart, 0));  // x d_th: [Q,Q] = 0 trivially
  EXPECT_TRUE(check_homological(q).ok());
  TensorField bad(chart, 1, 0, Parity::odd);
  bad.set({0}, SuperPolynomial::coordinate(chart, 1));
  bad.set({1}, SuperPolynomial::coordinate(chart, 0));  // th d_x + x d_th
  auto r = check_homological(bad);
  EXPECT_FALSE(r.ok());
  EXPECT_FALSE(r.self_bracket.is_zero());
  try {
    certify_homological(bad);
    FAIL() << "expected homological_error";
  } catch (const homological_error& e) {
    EXPECT_EQ(e.witness(), r.self_bracket);
    EXPECT_EQ(e.witness().get({0}), SuperPolynomial::coordinate(chart, 0) * Rational(2));
  }
  EXPECT_THROW(check_homological(TensorField::coordinate_vector(chart, 0)), algebra_error);
}
