#pragma once

// Exact sparse row echelon form over Q, used for rank computations and for
// solving delta S = t.

#include "qclass/grassmann.hpp"

#include <map>

namespace qclass {

using SparseVector = std::vector<std::pair<std::size_t, Rational>>;  // sorted by index, no zeros

inline void axpy(SparseVector& y, const Rational& a, const SparseVector& x) {
  // y <- y + a x
  SparseVector out;
  out.reserve(y.size() + x.size());
  auto i = y.begin();
  auto j = x.begin();
  while (i != y.end() || j != x.end()) {
    if (j == x.end() || (i != y.end() && i->first < j->first)) {
      out.push_back(std::move(*i++));
    } else if (i == y.end() || j->first < i->first) {
      out.emplace_back(j->first, a * j->second);
      ++j;
    } else {
      Rational v = i->second + a * j->second;
      if (v != 0) out.emplace_back(i->first, std::move(v));
      ++i;
      ++j;
    }
  }
  y = std::move(out);
}

/// Incremental echelon basis. Each stored row has leading coefficient 1 and
/// remembers the combination of inserted vectors that produced it.
class Echelon {
 public:
  /// Inserts v (tagged by combination `combo`); returns true if independent.
  bool insert(SparseVector v, SparseVector combo) {
    reduce(v, combo);
    if (v.empty()) return false;
    const Rational inv = 1 / v.front().second;
    for (auto& e : v) e.second *= inv;
    for (auto& e : combo) e.second *= inv;
    pivots_.emplace(v.front().first, rows_.size());
    rows_.push_back(std::move(v));
    combos_.push_back(std::move(combo));
    return true;
  }

  /// Combination of inserted vectors equal to target, if it lies in the span.
  std::optional<SparseVector> express(SparseVector target) const {
    SparseVector combo;
    reduce(target, combo);
    if (!target.empty()) return std::nullopt;
    for (auto& e : combo) e.second = -e.second;
    return combo;
  }

  std::size_t rank() const { return rows_.size(); }

 private:
  void reduce(SparseVector& v, SparseVector& combo) const {
    while (!v.empty()) {
      auto it = pivots_.find(v.front().first);
      if (it == pivots_.end()) return;
      const Rational f = -v.front().second;
      axpy(v, f, rows_[it->second]);
      axpy(combo, f, combos_[it->second]);
    }
  }

  std::vector<SparseVector> rows_;
  std::vector<SparseVector> combos_;
  std::map<std::size_t, std::size_t> pivots_;
};

}  // namespace qclass
