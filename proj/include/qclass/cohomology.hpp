#pragma once

// delta-cohomology tools: closedness, degree-bounded exactness over Q,
// function cohomology of purely odd charts, and the connection-independence
// transgression on M x R^{1|1}.

#include "qclass/cocycles.hpp"
#include "qclass/linalg.hpp"
#include "qclass/models.hpp"
#include "qclass/random.hpp"

namespace qclass {

inline TensorField is_closed(const HomologicalField& q, const TensorField& t) { return delta(q, t); }

struct ExactnessVerdict {
  enum class Status { exact_with_witness, not_exact_within_bound, not_closed, resource_cap_exceeded };
  Status status = Status::not_closed;
  std::optional<TensorField> witness;
  unsigned bound = 0;
  /// True when the chart has no even coordinates: the search space is the
  /// whole finite-dimensional tensor space and a negative verdict is final.
  bool conclusive = false;
  std::size_t unknowns = 0;
};

inline std::string to_string(ExactnessVerdict::Status s) {
  switch (s) {
    case ExactnessVerdict::Status::exact_with_witness: return "exact-with-witness";
    case ExactnessVerdict::Status::not_exact_within_bound: return "not-exact-within-bound";
    case ExactnessVerdict::Status::not_closed: return "not-closed";
    case ExactnessVerdict::Status::resource_cap_exceeded: return "resource-cap-exceeded";
  }
  return "?";
}

/// All monomials of the chart with even-coordinate degree <= bound and the
/// given parity.
inline std::vector<Monomial> monomial_basis(const Chart& chart, unsigned bound, Parity parity) {
  std::vector<std::size_t> evens, odds;
  for (std::size_t i = 0; i < chart.dim(); ++i) (chart.parity(i) == Parity::odd ? odds : evens).push_back(i);
  std::vector<Monomial> even_part{Monomial{}};
  for (auto i : evens) {
    std::vector<Monomial> next;
    for (const auto& m : even_part) {
      const unsigned used = m.even_degree();
      for (unsigned e = 0; used + e <= bound; ++e) {
        Monomial x = m;
        x.exp[i] = static_cast<std::uint16_t>(e);
        next.push_back(x);
      }
    }
    even_part = std::move(next);
  }
  std::vector<Monomial> out;
  for (std::uint32_t subset = 0; subset < (1u << odds.size()); ++subset) {
    std::uint32_t mask = 0;
    for (std::size_t b = 0; b < odds.size(); ++b)
      if (subset & (1u << b)) mask |= 1u << odds[b];
    if (parity_of(std::popcount(mask)) != parity) continue;
    for (auto m : even_part) {
      m.odd = mask;
      out.push_back(m);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

namespace detail {

class CoordinateIndex {
 public:
  std::size_t of(const IndexKey& k, const Monomial& m) {
    auto [it, inserted] = ids_.try_emplace({k, m}, ids_.size());
    return it->second;
  }
  SparseVector flatten(const TensorField& t) {
    SparseVector v;
    for (const auto& [k, f] : t.components())
      for (const auto& [m, c] : f.terms()) v.emplace_back(of(k, m), c);
    std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    return v;
  }

 private:
  std::map<std::pair<IndexKey, Monomial>, std::size_t> ids_;
};

}  // namespace detail

/// Searches S of t's type and opposite parity, with even-coordinate degree
/// <= degree_bound in every component, solving delta S = t exactly.
inline ExactnessVerdict exactness_witness(const HomologicalField& q, const TensorField& t, unsigned degree_bound,
                                          std::size_t max_unknowns = 200000) {
  ExactnessVerdict v;
  v.bound = degree_bound;
  const auto& chart = q.chart();
  v.conclusive = chart->even_count() == 0;
  if (!delta(q, t).is_zero()) {
    v.status = ExactnessVerdict::Status::not_closed;
    return v;
  }
  const Parity ps = t.parity() + Parity::odd;
  if (t.is_zero()) {
    v.status = ExactnessVerdict::Status::exact_with_witness;
    v.witness = TensorField(chart, t.n_upper(), t.m_lower(), ps);
    return v;
  }
  const auto basis_even = monomial_basis(*chart, degree_bound, Parity::even);
  const auto basis_odd = monomial_basis(*chart, degree_bound, Parity::odd);
  std::vector<std::pair<IndexKey, const Monomial*>> unknowns;
  std::size_t count = 0;
  TensorField shape(chart, t.n_upper(), t.m_lower(), ps);
  bool capped = false;
  for_each_key(chart->dim(), t.rank(), [&](const IndexKey& key) {
    const auto& mons = shape.component_parity(key) == Parity::even ? basis_even : basis_odd;
    count += mons.size();
    if (count > max_unknowns) {
      capped = true;
      return;
    }
    for (const auto& m : mons) unknowns.emplace_back(key, &m);
  });
  v.unknowns = count;
  if (capped) {
    v.status = ExactnessVerdict::Status::resource_cap_exceeded;
    return v;
  }
  detail::CoordinateIndex index;
  Echelon ech;
  for (std::size_t u = 0; u < unknowns.size(); ++u) {
    TensorField e(chart, t.n_upper(), t.m_lower(), ps);
    e.set(unknowns[u].first, SuperPolynomial::monomial(chart, *unknowns[u].second, 1));
    ech.insert(index.flatten(delta(q, e)), SparseVector{{u, Rational(1)}});
  }
  auto combo = ech.express(index.flatten(t));
  if (!combo) {
    v.status = ExactnessVerdict::Status::not_exact_within_bound;
    return v;
  }
  TensorField w(chart, t.n_upper(), t.m_lower(), ps);
  for (const auto& [u, c] : *combo) w.accumulate(unknowns[u].first, SuperPolynomial::monomial(chart, *unknowns[u].second, c));
  if (!(delta(q, w) == t)) throw internal_inconsistency("exactness witness does not re-verify");
  v.status = ExactnessVerdict::Status::exact_with_witness;
  v.witness = std::move(w);
  return v;
}

struct FunctionCohomology {
  std::vector<std::size_t> dims;         // dim H^k by odd degree k
  std::vector<std::size_t> space_dims;   // dim of degree-k functions
  std::vector<std::size_t> ranks;        // rank of delta on degree k
  int shift = 1;                         // delta raises odd degree by this amount
};

/// dim H^k(delta) on functions of a chart with no even coordinates. Requires
/// delta to shift odd degree uniformly.
inline FunctionCohomology function_cohomology_dims(const HomologicalField& q) {
  const auto& chart = q.chart();
  if (chart->even_count() != 0) throw algebra_error("function_cohomology_dims requires a chart without even coordinates");
  const std::size_t n = chart->dim();
  FunctionCohomology r;
  r.space_dims.assign(n + 1, 0);
  r.ranks.assign(n + 1, 0);
  std::optional<int> shift;
  std::vector<std::vector<SparseVector>> images(n + 1);
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    const int deg = std::popcount(mask);
    r.space_dims[deg] += 1;
    Monomial m;
    m.odd = mask;
    auto img = delta(q, SuperPolynomial::monomial(chart, m, 1));
    SparseVector vec;
    for (const auto& [mm, c] : img.terms()) {
      const int s = static_cast<int>(mm.odd_degree()) - deg;
      if (shift && *shift != s) throw algebra_error("delta does not shift odd degree uniformly");
      shift = s;
      vec.emplace_back(mm.odd, c);
    }
    images[deg].push_back(std::move(vec));
  }
  r.shift = shift.value_or(1);
  for (std::size_t k = 0; k <= n; ++k) {
    Echelon ech;
    for (auto& v : images[k]) ech.insert(v, {});
    r.ranks[k] = ech.rank();
  }
  r.dims.assign(n + 1, 0);
  for (std::size_t k = 0; k <= n; ++k) {
    std::size_t kernel = r.space_dims[k] - r.ranks[k];
    const long src = static_cast<long>(k) - r.shift;
    const std::size_t incoming = (src >= 0 && src <= static_cast<long>(n)) ? r.ranks[src] : 0;
    r.dims[k] = kernel - incoming;
  }
  return r;
}

struct TransgressionResult {
  TensorField psi;
  TensorField difference;  // cocycle(c1) - cocycle(c0)
  TensorField residual;    // delta psi - difference
  bool ok() const { return residual.is_zero(); }
};

/// Integral over t in [0,1] of a polynomial in the even coordinate t_index.
inline SuperPolynomial integrate_unit_interval(const SuperPolynomial& f, std::size_t t_index) {
  std::vector<SuperPolynomial::Term> terms;
  for (const auto& [m, c] : f.terms()) {
    Monomial mm = m;
    const unsigned e = mm.exp[t_index];
    mm.exp[t_index] = 0;
    terms.emplace_back(mm, c / Rational(e + 1));
  }
  return SuperPolynomial::from_terms(f.chart(), std::move(terms));
}

/// The interpolating connection t Gamma1 + (1-t) Gamma0 on M x R^{1|1}, flat
/// in the R^{1|1} directions.
inline Connection interpolating_connection(const ChartPtr& ext, const Connection& c0, const Connection& c1) {
  const std::size_t n = c0.chart()->dim();
  const std::size_t t_index = n;
  const auto t = SuperPolynomial::coordinate(ext, t_index);
  const auto one_minus_t = SuperPolynomial(ext, 1) - t;
  Connection::Table g(ext->dim(), std::vector<std::vector<SuperPolynomial>>(ext->dim(), std::vector<SuperPolynomial>(ext->dim(), SuperPolynomial(ext))));
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        g[k][i][j] = t * rechart(c1.gamma(k, i, j), ext) + one_minus_t * rechart(c0.gamma(k, i, j), ext);
  return Connection(ext, std::move(g));
}

/// Psi with delta Psi = C[nabla_1] - C[nabla_0], built by evaluating the
/// cocycle on M x R^{1|1} with Q~ = Q + theta d/dt and the interpolating
/// connection, extracting the theta-linear part of the M-components and
/// integrating it over t in [0,1].
inline TransgressionResult transgression(Series series, unsigned order, const HomologicalField& q, const Connection& c0,
                                         const Connection& c1) {
  if (!same_chart(c0.chart(), q.chart()) || !same_chart(c1.chart(), q.chart()))
    throw algebra_error("transgression: connections must live on the chart of Q");
  if (series == Series::A) throw algebra_error("transgression: the A series is defined for flat connections only");
  const auto& chart = q.chart();
  const std::size_t n = chart->dim();
  TransgressionResult r;
  const auto v1 = compute_cocycle(series, order, c1, q);
  const auto v0 = compute_cocycle(series, order, c0, q);
  r.difference = v1 - v0;
  if (series == Series::Qpow) {
    r.psi = TensorField(chart, v0.n_upper(), v0.m_lower(), v0.parity() + Parity::odd);
    r.residual = delta(q, r.psi) - r.difference;
    return r;
  }
  ModelDescriptor base{ModelKind::custom, "", q};
  const auto ext = extend_with_R11(base);
  const auto& ext_chart = ext.chart();
  const auto conn = interpolating_connection(ext_chart, c0, c1);
  const auto lifted = compute_cocycle(series, order, conn, ext.q);
  const std::size_t t_index = n, theta_index = n + 1;
  TensorField psi(chart, lifted.n_upper(), lifted.m_lower(), lifted.parity() + Parity::odd);
  for (const auto& [k, f] : lifted.components()) {
    if (std::any_of(k.begin(), k.end(), [&](auto i) { return i >= n; })) continue;
    auto part = integrate_unit_interval(f.partial(theta_index), t_index);
    psi.set(k, rechart(part, chart));
  }
  r.psi = std::move(psi);
  r.residual = delta(q, r.psi) - r.difference;
  return r;
}

}  // namespace qclass
