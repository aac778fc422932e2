#pragma once

// Seeded generators for polynomials, tensors and connections. Draws use raw
// mt19937_64 output reduced by modulo so sequences are identical across
// standard libraries.

#include "qclass/connection.hpp"

#include <random>

namespace qclass {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  /// Uniform integer in [lo, hi].
  int uniform(int lo, int hi) { return lo + static_cast<int>(next() % static_cast<std::uint64_t>(hi - lo + 1)); }
  /// True with probability num/den.
  bool chance(int num, int den) { return static_cast<int>(next() % static_cast<std::uint64_t>(den)) < num; }

 private:
  std::mt19937_64 engine_;
};

struct RandomPolyOptions {
  unsigned max_degree = 2;  // total degree, odd factors included
  unsigned max_terms = 2;
  int max_coeff = 2;
};

inline std::optional<Monomial> random_monomial(Rng& rng, const Chart& chart, Parity parity, unsigned max_degree) {
  if (chart.dim() == 0) return parity == Parity::even ? std::optional<Monomial>(Monomial{}) : std::nullopt;
  for (int attempt = 0; attempt < 64; ++attempt) {
    Monomial m;
    const int d = rng.uniform(0, static_cast<int>(max_degree));
    bool ok = true;
    for (int s = 0; s < d && ok; ++s) {
      const auto i = static_cast<std::size_t>(rng.uniform(0, static_cast<int>(chart.dim()) - 1));
      if (chart.parity(i) == Parity::odd) {
        if (m.odd & (1u << i)) ok = false;
        m.odd |= 1u << i;
      } else {
        m.exp[i] += 1;
      }
    }
    if (ok && m.parity() == parity) return m;
  }
  return std::nullopt;
}

inline SuperPolynomial random_polynomial(Rng& rng, const ChartPtr& chart, Parity parity,
                                         const RandomPolyOptions& opt = {}) {
  std::vector<SuperPolynomial::Term> terms;
  const int count = rng.uniform(1, static_cast<int>(opt.max_terms));
  for (int t = 0; t < count; ++t) {
    auto m = random_monomial(rng, *chart, parity, opt.max_degree);
    if (!m) continue;
    int c = 0;
    while (c == 0) c = rng.uniform(-opt.max_coeff, opt.max_coeff);
    terms.emplace_back(*m, Rational(c));
  }
  return SuperPolynomial::from_terms(chart, std::move(terms));
}

inline void for_each_key(std::size_t dim, unsigned len, const std::function<void(const IndexKey&)>& f) {
  IndexKey key(len, 0);
  if (dim == 0 && len > 0) return;
  while (true) {
    f(key);
    unsigned s = len;
    while (s > 0) {
      --s;
      if (++key[s] < dim) break;
      key[s] = 0;
      if (s == 0) return;
    }
    if (len == 0) return;
  }
}

/// Random homogeneous tensor; each component is present with probability
/// density_num/density_den.
inline TensorField random_tensor(Rng& rng, const ChartPtr& chart, unsigned n, unsigned m, Parity parity,
                                 const RandomPolyOptions& opt = {}, int density_num = 1, int density_den = 2) {
  TensorField t(chart, n, m, parity);
  for_each_key(chart->dim(), n + m, [&](const IndexKey& key) {
    if (!rng.chance(density_num, density_den)) return;
    t.set(key, random_polynomial(rng, chart, t.component_parity(key), opt));
  });
  return t;
}

struct RandomConnectionOptions {
  unsigned max_degree = 2;
  unsigned max_terms = 2;
  int max_coeff = 2;
  int density_num = 1;  // probability an independent symbol is nonzero
  int density_den = 3;
};

/// Sparse graded-symmetric Christoffel symbols with small integer coefficients.
inline Connection random_connection(const ChartPtr& chart, std::uint64_t seed, const RandomConnectionOptions& opt = {}) {
  Rng rng(seed);
  const std::size_t n = chart->dim();
  Connection::Table g(n, std::vector<std::vector<SuperPolynomial>>(n, std::vector<SuperPolynomial>(n, SuperPolynomial(chart))));
  const RandomPolyOptions popt{opt.max_degree, opt.max_terms, opt.max_coeff};
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j) {
        if (!rng.chance(opt.density_num, opt.density_den)) continue;
        if (i == j && chart->parity(i) == Parity::odd) continue;  // forced to vanish
        const Parity p = chart->parity(k) + chart->parity(i) + chart->parity(j);
        auto v = random_polynomial(rng, chart, p, popt);
        g[k][i][j] = v;
        g[k][j][i] = koszul(chart->parity(i), chart->parity(j)) > 0 ? v : -v;
      }
  return Connection(chart, std::move(g));
}

}  // namespace qclass
