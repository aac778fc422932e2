#include "qclass/cohomology.hpp"

#include <gtest/gtest.h>

using namespace qclass;

namespace {

ChartPtr mixed_chart() {
  return make_chart({{"x", Parity::even}, {"y", Parity::even}, {"t1", Parity::odd}, {"t2", Parity::odd}});
}

Parity word_parity(const Chart& chart, IndexKey::const_iterator b, IndexKey::const_iterator e) {
  Parity p = Parity::even;
  for (; b != e; ++b) p += chart.parity(*b);
  return p;
}

/// Moves the slots of a product b (x) a into the order of a (x) b, with the
/// sign of permuting the basis symbols.
TensorField swap_product(const TensorField& ba, unsigned na, unsigned ma, unsigned nb, unsigned mb) {
  // ba has uppers (Ib, Ia), lowers (Jb, Ja). Result has uppers (Ia, Ib), lowers (Ja, Jb).
  TensorField r(ba.chart(), ba.n_upper(), ba.m_lower(), ba.parity());
  for (const auto& [k, f] : ba.components()) {
    IndexKey key;
    key.insert(key.end(), k.begin() + nb, k.begin() + nb + na);
    key.insert(key.end(), k.begin(), k.begin() + nb);
    const unsigned off = nb + na;
    key.insert(key.end(), k.begin() + off + mb, k.end());
    key.insert(key.end(), k.begin() + off, k.begin() + off + mb);
    const auto& ch = *ba.chart();
    const int s = koszul(word_parity(ch, k.begin(), k.begin() + nb), word_parity(ch, k.begin() + nb, k.begin() + off)) *
                  koszul(word_parity(ch, k.begin() + off, k.begin() + off + mb), word_parity(ch, k.begin() + off + mb, k.end()));
    r.set(key, s > 0 ? f : -f);
  }
  return r;
}

}  // namespace

TEST(Tensor, ProductExamples) {
  auto chart = mixed_chart();
  auto dx = TensorField::coordinate_vector(chart, 0);
  auto form = TensorField::coordinate_covector(chart, 0);
  auto p = tensor_product(dx, form);
  EXPECT_EQ(p.n_upper(), 1u);
  EXPECT_EQ(p.m_lower(), 1u);
  ASSERT_EQ(p.components().size(), 1u);
  EXPECT_EQ(p.get({0, 0}), SuperPolynomial(chart, 1));

  auto f = SuperPolynomial::coordinate(chart, 2);
  auto v = TensorField::coordinate_vector(chart, 3);  // odd basis vector
  auto vf = tensor_product(v, TensorField::scalar(f));
  // d_{t2} (x) t1 = -t1 d_{t2}
  EXPECT_EQ(vf.get({3}), -f);
  EXPECT_EQ(tensor_product(TensorField::scalar(f), v).get({3}), f);
}

TEST(Tensor, ProductSwapKoszul) {
  // Independent oracle: a (x) b expanded term by term as words
  // (c_a w_a)(c_b w_b); sign of rearranging to uppers-first is computed by
  // counting odd transpositions of a word permutation.
  auto chart = mixed_chart();
  Rng rng(21);
  auto word_sign = [&](const std::vector<std::pair<bool, std::uint8_t>>& word) {
    // stable partition uppers first; count odd-odd inversions
    int inv = 0;
    for (std::size_t i = 0; i < word.size(); ++i)
      for (std::size_t j = i + 1; j < word.size(); ++j)
        if (!word[i].first && word[j].first && chart->parity(word[i].second) == Parity::odd &&
            chart->parity(word[j].second) == Parity::odd)
          ++inv;
    return (inv & 1) ? -1 : 1;
  };
  for (int trial = 0; trial < 30; ++trial) {
    const unsigned na = rng.uniform(0, 1), ma = rng.uniform(0, 2), nb = rng.uniform(0, 1), mb = rng.uniform(0, 1);
    auto a = random_tensor(rng, chart, na, ma, parity_of(rng.uniform(0, 1)), {2, 2, 2}, 1, 3);
    auto b = random_tensor(rng, chart, nb, mb, parity_of(rng.uniform(0, 1)), {2, 2, 2}, 1, 3);
    auto ab = tensor_product(a, b);
    // oracle expansion
    TensorField expect(chart, na + nb, ma + mb, a.parity() + b.parity());
    for (const auto& [ka, fa] : a.components())
      for (const auto& [kb, fb] : b.components()) {
        Parity wa = Parity::even;
        for (auto i : ka) wa += chart->parity(i);
        int s = koszul(wa, b.component_parity(kb));
        std::vector<std::pair<bool, std::uint8_t>> word;
        for (unsigned i = 0; i < ka.size(); ++i) word.emplace_back(i < na, ka[i]);
        for (unsigned i = 0; i < kb.size(); ++i) word.emplace_back(i < nb, kb[i]);
        s *= word_sign(word);
        IndexKey key;
        for (auto& [up, i] : word)
          if (up) key.push_back(i);
        for (auto& [up, i] : word)
          if (!up) key.push_back(i);
        auto prod = fa * fb;
        expect.accumulate(key, s > 0 ? prod : -prod);
      }
    EXPECT_EQ(ab, expect);
    // a (x) b = (-1)^{|a||b|} swap(b (x) a)
    auto ba = swap_product(tensor_product(b, a), na, ma, nb, mb);
    EXPECT_EQ(ab, koszul(a.parity(), b.parity()) > 0 ? ba : -ba);
  }
}

TEST(Tensor, ContractExamples) {
  auto chart = mixed_chart();
  Rng rng(22);
  for (int trial = 0; trial < 20; ++trial) {
    auto x = random_tensor(rng, chart, 1, 0, parity_of(rng.uniform(0, 1)), {2, 2, 2}, 2, 3);
    auto w = random_tensor(rng, chart, 0, 1, parity_of(rng.uniform(0, 1)), {2, 2, 2}, 2, 3);
    // omega(X) via the pairing <dz^j, d_k> with omega on the left.
    SuperPolynomial pairing(chart);
    for (const auto& [kw, fw] : w.components()) {
      auto xj = x.get(kw);
      const Parity ej = chart->parity(kw[0]);
      auto term = fw * xj;
      pairing += koszul(ej, x.component_parity(kw)) > 0 ? term : -term;
    }
    auto c = contract(tensor_product(w, x), 0, 0);
    EXPECT_EQ(c.get({}), pairing);
  }
  TensorField zero(chart, 1, 1, Parity::even);
  EXPECT_TRUE(contract(zero, 0, 0).is_zero());
  EXPECT_THROW(contract(zero, 1, 0), algebra_error);
}

TEST(Tensor, ContractCommutesWithProduct) {
  auto chart = mixed_chart();
  Rng rng(23);
  for (int trial = 0; trial < 15; ++trial) {
    auto a = random_tensor(rng, chart, 1, 1, parity_of(rng.uniform(0, 1)), {2, 2, 2}, 1, 2);
    auto b = random_tensor(rng, chart, 1, 1, parity_of(rng.uniform(0, 1)), {2, 2, 2}, 1, 2);
    EXPECT_EQ(contract(tensor_product(a, b), 0, 0), tensor_product(contract(a, 0, 0), b));
    EXPECT_EQ(contract(tensor_product(a, b), 1, 1), tensor_product(a, contract(b, 0, 0)));
  }
}

TEST(Tensor, ComposeMatchesGenericContraction) {
  auto chart = mixed_chart();
  Rng rng(24);
  for (int trial = 0; trial < 30; ++trial) {
    auto a = random_tensor(rng, chart, 1, 1, parity_of(rng.uniform(0, 1)), {2, 2, 2}, 1, 2);
    auto b = random_tensor(rng, chart, 1, 1, parity_of(rng.uniform(0, 1)), {2, 2, 2}, 1, 2);
    EXPECT_EQ(endo_compose(a, b), contract(tensor_product(a, b), 1, 0));
    auto x = random_tensor(rng, chart, 1, 0, parity_of(rng.uniform(0, 1)), {2, 2, 2}, 2, 3);
    EXPECT_EQ(endo_apply(a, x), contract(tensor_product(a, x), 1, 0));
    EXPECT_EQ(endo_apply(endo_compose(a, b), x), endo_apply(a, endo_apply(b, x)));
  }
}

TEST(Tensor, ComposeExamples) {
  auto chart = mixed_chart();
  Rng rng(25);
  auto id = identity_endo(chart);
  auto a = random_tensor(rng, chart, 1, 1, Parity::odd, {2, 2, 2});
  EXPECT_EQ(endo_compose(id, a), a);
  EXPECT_EQ(endo_compose(a, id), a);

  // On R^{1|1}: a maps d_theta to d_x and kills d_x.
  auto r11 = make_chart({{"x", Parity::even}, {"th", Parity::odd}});
  TensorField shift(r11, 1, 1, Parity::odd);
  shift.set({0, 1}, SuperPolynomial(r11, 1));
  auto img = endo_apply(shift, TensorField::coordinate_vector(r11, 1));
  EXPECT_EQ(img, TensorField::coordinate_vector(r11, 0).with_parity(Parity::even) * Rational(1));
  EXPECT_TRUE(endo_apply(shift, TensorField::coordinate_vector(r11, 0)).is_zero());
  EXPECT_TRUE(endo_compose(shift, shift).is_zero());
}

TEST(Tensor, ComposeAssociative) {
  auto chart = mixed_chart();
  Rng rng(26);
  for (int trial = 0; trial < 15; ++trial) {
    auto a = random_tensor(rng, chart, 1, 1, parity_of(rng.uniform(0, 1)), {2, 2, 2}, 1, 2);
    auto b = random_tensor(rng, chart, 1, 1, parity_of(rng.uniform(0, 1)), {2, 2, 2}, 1, 2);
    auto c = random_tensor(rng, chart, 1, 1, parity_of(rng.uniform(0, 1)), {2, 2, 2}, 1, 2);
    EXPECT_EQ(endo_compose(endo_compose(a, b), c), endo_compose(a, endo_compose(b, c)));
  }
}

TEST(Tensor, CommutatorExamples) {
  auto chart = mixed_chart();
  Rng rng(27);
  auto a = random_tensor(rng, chart, 1, 1, Parity::even, {2, 2, 2});
  EXPECT_TRUE(endo_commutator(a, a).is_zero());
  auto b = random_tensor(rng, chart, 1, 1, Parity::odd, {2, 2, 2});
  EXPECT_TRUE(endo_commutator(identity_endo(chart), b).is_zero());
  auto c = random_tensor(rng, chart, 1, 1, Parity::odd, {2, 2, 2});
  EXPECT_EQ(endo_commutator(b, c), endo_compose(b, c) + endo_compose(c, b));
}

TEST(Tensor, SupertraceVanishesOnSupercommutators) {
  auto chart = mixed_chart();
  Rng rng(28);
  for (int trial = 0; trial < 60; ++trial) {
    auto a = random_tensor(rng, chart, 1, 1, parity_of(rng.uniform(0, 1)), {3, 3, 3}, 2, 3);
    auto b = random_tensor(rng, chart, 1, 1, parity_of(rng.uniform(0, 1)), {3, 3, 3}, 2, 3);
    EXPECT_TRUE(supertrace(endo_commutator(a, b)).is_zero()) << "trial " << trial;
  }
}

TEST(Tensor, SupertraceExamples) {
  for (auto [p, q] : {std::pair{1, 1}, std::pair{2, 3}, std::pair{0, 2}}) {
    std::vector<Coordinate> coords;
    for (int i = 0; i < p; ++i) coords.push_back({"x" + std::to_string(i), Parity::even});
    for (int i = 0; i < q; ++i) coords.push_back({"t" + std::to_string(i), Parity::odd});
    auto chart = make_chart(coords);
    EXPECT_EQ(supertrace(identity_endo(chart)), SuperPolynomial(chart, p - q));
  }
}

TEST(Tensor, SupertraceLinearOverEvenFunctions) {
  auto chart = mixed_chart();
  Rng rng(29);
  for (int trial = 0; trial < 20; ++trial) {
    auto a = random_tensor(rng, chart, 1, 1, parity_of(rng.uniform(0, 1)), {2, 2, 2});
    auto f = random_polynomial(rng, chart, Parity::even);
    EXPECT_EQ(supertrace(scale(f, a)), f * supertrace(a));
  }
}

TEST(Tensor, ParityRuleEnforced) {
  auto chart = mixed_chart();
  TensorField t(chart, 1, 0, Parity::even);
  EXPECT_THROW(t.set({2}, SuperPolynomial(chart, 1)), algebra_error);  // d_t1 with even coefficient is odd
  EXPECT_NO_THROW(t.set({0}, SuperPolynomial(chart, 1)));
  EXPECT_THROW(t.set({0, 1}, SuperPolynomial(chart, 1)), algebra_error);
}

TEST(Tensor, InsertVectorIsLeftLinear) {
  auto chart = mixed_chart();
  Rng rng(30);
  for (int trial = 0; trial < 20; ++trial) {
    auto t = random_tensor(rng, chart, 1, 2, parity_of(rng.uniform(0, 1)), {2, 2, 2}, 1, 3);
    auto x = random_tensor(rng, chart, 1, 0, parity_of(rng.uniform(0, 1)), {2, 2, 2}, 2, 3);
    auto f = random_polynomial(rng, chart, parity_of(rng.uniform(0, 1)));
    EXPECT_EQ(insert_vector(scale(f, x), t, 0), scale(f, insert_vector(x, t, 0)));
  }
}

TEST(Tensor, AssembleFirstLowerRoundTrip) {
  auto chart = mixed_chart();
  Rng rng(31);
  for (const Parity p : {Parity::even, Parity::odd}) {
    std::vector<TensorField> values;
    for (std::size_t a = 0; a < chart->dim(); ++a)
      values.push_back(random_tensor(rng, chart, 1, 1, p + chart->parity(a), {2, 2, 2}, 1, 2));
    auto t = assemble_first_lower(chart, 1, 1, p, values);
    t.validate();
    for (std::size_t a = 0; a < chart->dim(); ++a)
      EXPECT_EQ(insert_vector(TensorField::coordinate_vector(chart, a), t, 0), values[a]);
  }
}
