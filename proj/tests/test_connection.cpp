#include "support.hpp"

using namespace qclass;
using namespace qclass::test;

namespace {

TensorField signed_if(bool negate, const TensorField& t) { return negate ? -t : t; }

Connection flat_line_connection(const ChartPtr& chart) {
  // Only Gamma^x_{xx} = 1 + x^2 is nonzero: flat, since R is built from
  // d_x Gamma and Gamma Gamma in a single even direction.
  Connection::Table g(chart->dim(), std::vector<std::vector<SuperPolynomial>>(
                                        chart->dim(), std::vector<SuperPolynomial>(chart->dim(), SuperPolynomial(chart))));
  const auto x = SuperPolynomial::coordinate(chart, 0);
  g[0][0][0] = SuperPolynomial(chart, 1) + x * x;
  return Connection(chart, g);
}

}  // namespace

TEST(Connection, TrivialConnectionIsFlat) {
  for (const auto& [name, m] : sample_models()) {
    auto c = Connection::trivial(m.chart());
    EXPECT_TRUE(c.is_trivial());
    EXPECT_TRUE(c.is_flat()) << name;
    auto x = TensorField::coordinate_vector(m.chart(), 0);
    EXPECT_TRUE(covariant_derivative(c, x, x).is_zero());
  }
}

TEST(Connection, NontrivialFlatExample) {
  auto m = build_odd_tangent(1);
  auto c = flat_line_connection(m.chart());
  EXPECT_FALSE(c.is_trivial());
  EXPECT_TRUE(c.is_flat());
  auto dx = TensorField::coordinate_vector(m.chart(), 0);
  EXPECT_EQ(covariant_derivative(c, dx, dx), scale(c.gamma(0, 0, 0), dx));
}

TEST(Connection, AsymmetricChristoffelRejected) {
  auto chart = make_chart({{"x", Parity::even}, {"y", Parity::even}});
  Connection::Table g(2, std::vector<std::vector<SuperPolynomial>>(2, std::vector<SuperPolynomial>(2, SuperPolynomial(chart))));
  g[0][0][1] = SuperPolynomial(chart, 1);
  try {
    Connection c(chart, g);
    FAIL() << "expected connection_error";
  } catch (const connection_error& e) {
    EXPECT_NE(std::string(e.what()).find("(x,x,y)"), std::string::npos) << e.what();
  }
  g[0][1][0] = SuperPolynomial(chart, 1);
  EXPECT_NO_THROW(Connection(chart, g));
}

TEST(Connection, OddSymbolsAreGradedSymmetric) {
  auto chart = make_chart({{"x", Parity::even}, {"a", Parity::odd}, {"b", Parity::odd}});
  Connection::Table g(3, std::vector<std::vector<SuperPolynomial>>(3, std::vector<SuperPolynomial>(3, SuperPolynomial(chart))));
  g[0][1][2] = SuperPolynomial(chart, 1);
  g[0][2][1] = SuperPolynomial(chart, 1);
  EXPECT_THROW(Connection(chart, g), connection_error);
  g[0][2][1] = SuperPolynomial(chart, -1);
  EXPECT_NO_THROW(Connection(chart, g));
  auto bad = g;
  bad[1][0][0] = SuperPolynomial(chart, 1);  // even value for an odd symbol
  EXPECT_THROW(Connection(chart, bad), connection_error);
}

TEST(Connection, TorsionFree) {
  Rng rng(51);
  for (const auto& [name, m] : sample_models()) {
    auto c = random_connection(m.chart(), 100 + rng.uniform(0, 1000));
    for (int trial = 0; trial < 4; ++trial) {
      auto x = random_vector(rng, m.chart(), random_parity(rng));
      auto y = random_vector(rng, m.chart(), random_parity(rng));
      auto torsion = covariant_derivative(c, x, y) -
                     signed_if(koszul(x.parity(), y.parity()) < 0, covariant_derivative(c, y, x)) - bracket(x, y);
      EXPECT_TRUE(torsion.is_zero()) << name;
    }
  }
}

TEST(Connection, CovariantDerivativeIsFunctionLinearInDirection) {
  Rng rng(52);
  auto m = affine_action_algebroid();
  auto c = random_connection(m.chart(), 5);
  for (int trial = 0; trial < 8; ++trial) {
    auto x = random_vector(rng, m.chart(), random_parity(rng));
    auto f = random_polynomial(rng, m.chart(), random_parity(rng));
    auto t = random_tensor(rng, m.chart(), 1, 1, random_parity(rng), {2, 2, 2}, 1, 3);
    EXPECT_EQ(covariant_derivative(c, scale(f, x), t), scale(f, covariant_derivative(c, x, t)));
  }
}

TEST(Connection, CovariantDerivativeCommutesWithContraction) {
  Rng rng(53);
  auto m = build_odd_tangent(2);
  auto c = random_connection(m.chart(), 9);
  for (int trial = 0; trial < 8; ++trial) {
    auto x = random_vector(rng, m.chart(), random_parity(rng));
    auto t = random_tensor(rng, m.chart(), 1, 2, random_parity(rng), {2, 2, 2}, 1, 3);
    EXPECT_EQ(covariant_derivative(c, x, contract(t, 0, 1)), contract(covariant_derivative(c, x, t), 0, 1));
  }
}

TEST(Connection, FullCovariantDerivativeInsertion) {
  Rng rng(54);
  auto m = affine_action_algebroid();
  auto c = random_connection(m.chart(), 13);
  auto t = random_tensor(rng, m.chart(), 1, 1, Parity::odd, {2, 2, 2}, 1, 3);
  auto nt = covariant_derivative(c, t);
  for (int trial = 0; trial < 6; ++trial) {
    auto x = random_vector(rng, m.chart(), random_parity(rng));
    EXPECT_EQ(insert_vector(x, nt, 0), covariant_derivative(c, x, t));
  }
}

TEST(Connection, CurvatureTableMatchesDirectFormula) {
  Rng rng(55);
  for (const auto& [name, m] : sample_models()) {
    auto c = random_connection(m.chart(), 200 + rng.uniform(0, 1000));
    for (int trial = 0; trial < 3; ++trial) {
      auto x = random_vector(rng, m.chart(), random_parity(rng));
      auto y = random_vector(rng, m.chart(), random_parity(rng));
      EXPECT_EQ(curvature_from_table(c, x, y), curvature_endo(c, x, y)) << name;
      EXPECT_EQ(curvature_endo(c, x, y), signed_if(koszul(x.parity(), y.parity()) > 0, curvature_endo(c, y, x))) << name;
    }
  }
}

TEST(Connection, LambdaWorkedExample) {
  auto m = affine_line_ce();
  auto c = Connection::trivial(m.chart());
  auto l = lambda_endo(c, m.q);
  auto t1 = SuperPolynomial::coordinate(m.chart(), 0), t2 = SuperPolynomial::coordinate(m.chart(), 1);
  EXPECT_EQ(l.get({1, 1}), -t1);
  EXPECT_EQ(l.get({1, 0}), t2);
  EXPECT_TRUE(l.get({0, 0}).is_zero());
  EXPECT_TRUE(l.get({0, 1}).is_zero());
  EXPECT_EQ(supertrace(l), t1);
}

TEST(Connection, LambdaEqualsCovariantMinusLie) {
  Rng rng(56);
  for (const auto& [name, m] : sample_models()) {
    auto c = random_connection(m.chart(), 300 + rng.uniform(0, 1000));
    auto l = lambda_endo(c, m.q);
    for (int trial = 0; trial < 3; ++trial) {
      auto y = random_vector(rng, m.chart(), random_parity(rng));
      EXPECT_EQ(endo_apply(l, y), covariant_derivative(c, m.q.field(), y) - delta(m.q, y)) << name;
      EXPECT_EQ(endo_apply(l, y), signed_if(y.parity() == Parity::odd, covariant_derivative(c, y, m.q.field()))) << name;
    }
  }
}

TEST(Connection, StructuralRelations) {
  for (const auto& [name, m] : sample_models()) {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
      auto c = random_connection(m.chart(), seed);
      auto rep = verify_structural_relations(c, m.q);
      ASSERT_EQ(rep.entries.size(), 2 + m.chart()->dim());
      for (const auto& e : rep.entries) EXPECT_TRUE(e.residual.is_zero()) << name << " seed " << seed << ": " << e.name;
    }
  }
}

TEST(Connection, CovariantLieRelation) {
  Rng rng(57);
  for (const auto& [name, m] : sample_models()) {
    auto c = random_connection(m.chart(), 400 + rng.uniform(0, 1000));
    for (int trial = 0; trial < 3; ++trial) {
      auto a = random_endo(rng, m.chart(), random_parity(rng));
      EXPECT_TRUE(verify_cov_lie_relation(c, m.q, a).all_zero()) << name;
    }
  }
}

TEST(Connection, EndoPower) {
  Rng rng(58);
  auto chart = build_odd_tangent(1).chart();
  auto a = random_endo(rng, chart, Parity::even);
  EXPECT_EQ(endo_power(a, 0), identity_endo(chart));
  EXPECT_EQ(endo_power(a, 3), endo_compose(a, endo_compose(a, a)));
}
