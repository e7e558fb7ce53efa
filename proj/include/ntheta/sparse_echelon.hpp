#pragma once

#include <algorithm>
#include <map>
#include <utility>
#include <vector>

#include "ntheta/rational.hpp"

namespace ntheta::linalg {

/// Incremental fraction-free row echelon basis for sparse integer rows keyed
/// by an ordered column type. Each stored row is primitive with a positive
/// leading entry, and no two stored rows share a leading column, so the number
/// of stored rows is the rank of everything inserted.
template <class Key>
class SparseEchelon {
public:
  using Row = std::vector<std::pair<Key, Integer>>;  // sorted by key, no zeros

  /// Clears denominators of a rational row and sorts it.
  static Row from_rational(std::vector<std::pair<Key, Rational>> entries) {
    std::sort(entries.begin(), entries.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    Integer lcm_den = 1;
    for (const auto& [k, q] : entries) mpz_lcm(lcm_den.get_mpz_t(), lcm_den.get_mpz_t(), q.get_den_mpz_t());
    Row row;
    for (auto& [k, q] : entries) {
      if (q == 0) continue;
      if (!row.empty() && row.back().first == k) {
        row.back().second += q.get_num() * (lcm_den / q.get_den());
        if (row.back().second == 0) row.pop_back();
      } else {
        row.emplace_back(k, q.get_num() * (lcm_den / q.get_den()));
      }
    }
    return row;
  }

  /// Reduces `row` against the basis; returns the remainder (empty if the row
  /// lies in the span).
  Row reduce(Row row) const {
    while (!row.empty()) {
      auto it = pivots_.find(row.front().first);
      if (it == pivots_.end()) break;
      row = combine(row, it->second);
    }
    return row;
  }

  /// Returns true when the row was independent of the basis.
  bool insert(Row row) {
    row = reduce(std::move(row));
    if (row.empty()) return false;
    normalize(row);
    const Key lead = row.front().first;
    pivots_.emplace(lead, std::move(row));
    return true;
  }

  bool contains(Row row) const { return reduce(std::move(row)).empty(); }

  std::size_t rank() const noexcept { return pivots_.size(); }

private:
  // a * row - b * pivot, with a, b chosen so the leading entries cancel.
  static Row combine(const Row& row, const Row& pivot) {
    Integer g;
    mpz_gcd(g.get_mpz_t(), row.front().second.get_mpz_t(), pivot.front().second.get_mpz_t());
    const Integer a = pivot.front().second / g;
    const Integer b = row.front().second / g;
    Row out;
    out.reserve(row.size() + pivot.size());
    std::size_t i = 0, j = 0;
    while (i < row.size() || j < pivot.size()) {
      if (j == pivot.size() || (i < row.size() && row[i].first < pivot[j].first)) {
        out.emplace_back(row[i].first, a * row[i].second);
        ++i;
      } else if (i == row.size() || pivot[j].first < row[i].first) {
        out.emplace_back(pivot[j].first, -b * pivot[j].second);
        ++j;
      } else {
        Integer v = a * row[i].second - b * pivot[j].second;
        if (v != 0) out.emplace_back(row[i].first, std::move(v));
        ++i;
        ++j;
      }
    }
    normalize(out);
    return out;
  }

  static void normalize(Row& row) {
    if (row.empty()) return;
    Integer g = 0;
    for (const auto& [k, v] : row) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), v.get_mpz_t());
    if (row.front().second < 0) g = -g;
    if (g != 1)
      for (auto& [k, v] : row) mpz_divexact(v.get_mpz_t(), v.get_mpz_t(), g.get_mpz_t());
  }

  std::map<Key, Row> pivots_;
};

} // namespace ntheta::linalg
