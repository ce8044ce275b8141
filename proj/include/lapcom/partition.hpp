#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include "lapcom/common.hpp"

namespace lapcom {

/// Relabels to contiguous 0-based labels in order of first appearance.
inline std::vector<int> canonicalize_labels(const std::vector<int>& labels) {
  std::map<int, int> remap;
  std::vector<int> out(labels.size());
  int next = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    auto [it, inserted] = remap.emplace(labels[i], next);
    if (inserted) ++next;
    out[i] = it->second;
  }
  return out;
}

inline int count_distinct_labels(const std::vector<int>& labels) {
  std::vector<int> sorted = labels;
  std::sort(sorted.begin(), sorted.end());
  return static_cast<int>(std::unique(sorted.begin(), sorted.end()) - sorted.begin());
}

inline std::vector<std::vector<long>> contingency_table(const std::vector<int>& a,
                                                        const std::vector<int>& b) {
  require(a.size() == b.size(), "contingency_table: length mismatch");
  const std::vector<int> ca = canonicalize_labels(a);
  const std::vector<int> cb = canonicalize_labels(b);
  const int ra = ca.empty() ? 0 : *std::max_element(ca.begin(), ca.end()) + 1;
  const int rb = cb.empty() ? 0 : *std::max_element(cb.begin(), cb.end()) + 1;
  std::vector<std::vector<long>> table(ra, std::vector<long>(rb, 0));
  for (std::size_t i = 0; i < ca.size(); ++i) ++table[ca[i]][cb[i]];
  return table;
}

/// Hubert-Arabie adjusted Rand index. Identical partitions give 1 even in
/// the degenerate cases where the adjustment denominator vanishes.
inline double ari(const std::vector<int>& a, const std::vector<int>& b) {
  require(a.size() == b.size(), "ari: length mismatch");
  const auto table = contingency_table(a, b);
  auto choose2 = [](long n) { return 0.5 * static_cast<double>(n) * static_cast<double>(n - 1); };
  const long n = static_cast<long>(a.size());
  double sum_cells = 0.0, sum_rows = 0.0, sum_cols = 0.0;
  std::vector<long> col_totals(table.empty() ? 0 : table.front().size(), 0);
  for (const auto& row : table) {
    long row_total = 0;
    for (std::size_t j = 0; j < row.size(); ++j) {
      sum_cells += choose2(row[j]);
      row_total += row[j];
      col_totals[j] += row[j];
    }
    sum_rows += choose2(row_total);
  }
  for (long c : col_totals) sum_cols += choose2(c);
  const double total_pairs = choose2(n);
  const double expected = total_pairs > 0.0 ? sum_rows * sum_cols / total_pairs : 0.0;
  const double maximum = 0.5 * (sum_rows + sum_cols);
  if (std::abs(maximum - expected) < 1e-12)
    return canonicalize_labels(a) == canonicalize_labels(b) ? 1.0 : 0.0;
  return (sum_cells - expected) / (maximum - expected);
}

namespace detail {

/// Exact assignment (rows -> distinct columns) maximizing the selected
/// cross-tabulation mass; bitmask DP over columns, reconstruction prefers
/// the lexicographically smallest optimal assignment.
inline std::vector<int> max_assignment(const std::vector<std::vector<long>>& score) {
  const int rows = static_cast<int>(score.size());
  const int cols = rows == 0 ? 0 : static_cast<int>(score.front().size());
  require(rows <= cols, "max_assignment: more rows than columns");
  const int full = 1 << cols;
  std::vector<double> dp(full, -1.0);
  dp[0] = 0.0;
  std::vector<int> popcount(full, 0);
  for (int mask = 1; mask < full; ++mask) popcount[mask] = popcount[mask >> 1] + (mask & 1);
  for (int mask = 0; mask < full; ++mask) {
    if (dp[mask] < 0.0) continue;
    const int r = popcount[mask];
    if (r >= rows) continue;
    for (int c = 0; c < cols; ++c) {
      if (mask & (1 << c)) continue;
      const int next = mask | (1 << c);
      const double v = dp[mask] + static_cast<double>(score[r][c]);
      if (v > dp[next]) dp[next] = v;
    }
  }
  double best = -1.0;
  for (int mask = 0; mask < full; ++mask)
    if (popcount[mask] == rows) best = std::max(best, dp[mask]);

  // Greedy reconstruction: smallest feasible column first.
  std::vector<double> suffix_best(full, -1.0);
  // suffix_best[mask]: best achievable for rows popcount(mask)..rows-1 given used columns mask.
  std::vector<int> order(full);
  for (int mask = 0; mask < full; ++mask) order[mask] = mask;
  std::sort(order.begin(), order.end(),
            [&](int x, int y2) { return popcount[x] > popcount[y2]; });
  for (int mask : order) {
    const int r = popcount[mask];
    if (r >= rows) {
      suffix_best[mask] = 0.0;
      continue;
    }
    for (int c = 0; c < cols; ++c) {
      if (mask & (1 << c)) continue;
      const double rest = suffix_best[mask | (1 << c)];
      if (rest < 0.0) continue;
      suffix_best[mask] = std::max(suffix_best[mask], rest + static_cast<double>(score[r][c]));
    }
  }
  std::vector<int> assign(rows, -1);
  int mask = 0;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      if (mask & (1 << c)) continue;
      if (suffix_best[mask | (1 << c)] < 0.0) continue;
      if (static_cast<double>(score[r][c]) + suffix_best[mask | (1 << c)] >=
          suffix_best[mask] - 1e-9) {
        assign[r] = c;
        mask |= 1 << c;
        break;
      }
    }
  }
  return assign;
}

}  // namespace detail

/// Injective map from (canonicalized) estimated labels to reference label
/// values, maximizing the number of correctly matched cases; exact
/// assignment-problem solution. Estimated clusters beyond the reference's
/// count map to fresh labels.
inline std::vector<int> match_labels(const std::vector<int>& estimated,
                                     const std::vector<int>& reference) {
  require(estimated.size() == reference.size(), "match_labels: length mismatch");
  const std::vector<int> ce = canonicalize_labels(estimated);
  const int ke = ce.empty() ? 0 : *std::max_element(ce.begin(), ce.end()) + 1;
  std::vector<int> ref_values = reference;
  std::sort(ref_values.begin(), ref_values.end());
  ref_values.erase(std::unique(ref_values.begin(), ref_values.end()), ref_values.end());
  std::map<int, int> ref_index;
  for (std::size_t j = 0; j < ref_values.size(); ++j) ref_index[ref_values[j]] = static_cast<int>(j);
  const int kr = static_cast<int>(ref_values.size());
  const int k = std::max(ke, kr);
  std::vector<std::vector<long>> score(k, std::vector<long>(k, 0));
  for (std::size_t i = 0; i < ce.size(); ++i) ++score[ce[i]][ref_index[reference[i]]];
  const std::vector<int> assign = detail::max_assignment(score);
  const int fresh_base = ref_values.empty() ? 0 : ref_values.back() + 1;
  std::vector<int> map(ke);
  for (int e = 0; e < ke; ++e)
    map[e] = assign[e] < kr ? ref_values[assign[e]] : fresh_base + (assign[e] - kr);
  return map;
}

/// Applies a label map produced by match_labels.
inline std::vector<int> apply_label_map(const std::vector<int>& labels,
                                        const std::vector<int>& map) {
  std::vector<int> out(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) out[i] = map.at(labels[i]);
  return out;
}

}  // namespace lapcom
