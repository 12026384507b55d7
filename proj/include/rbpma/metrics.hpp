#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "rbpma/sbm.hpp"

namespace rbpma {

/// Joint label counts: counts[a][b] = #{i : pred_i = a, truth_i = b}.
struct ContingencyTable {
  std::vector<std::vector<long>> counts;
  long n = 0;

  size_t k_pred() const { return counts.size(); }
  size_t k_truth() const { return counts.empty() ? 0 : counts.front().size(); }
};

namespace detail {

inline void require_valid_pair(const LabelVector& pred,
                               const LabelVector& truth) {
  if (pred.size() != truth.size())
    throw std::invalid_argument("labels: length mismatch");
  if (pred.empty()) throw std::invalid_argument("labels: empty input");
  for (int v : pred)
    if (v < 0) throw std::invalid_argument("labels: negative label");
  for (int v : truth)
    if (v < 0) throw std::invalid_argument("labels: negative label");
}

// Assignment minimizing total cost on a square matrix (potentials plus
// augmenting paths, O(n^3)). Returns col matched to each row.
inline std::vector<int> min_cost_assignment(
    const std::vector<std::vector<double>>& cost) {
  const int n = static_cast<int>(cost.size());
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(static_cast<size_t>(n) + 1, 0.0);
  std::vector<double> v(static_cast<size_t>(n) + 1, 0.0);
  std::vector<int> match(static_cast<size_t>(n) + 1, 0);
  std::vector<int> way(static_cast<size_t>(n) + 1, 0);
  for (int i = 1; i <= n; ++i) {
    match[0] = i;
    int j0 = 0;
    std::vector<double> minv(static_cast<size_t>(n) + 1, inf);
    std::vector<bool> used(static_cast<size_t>(n) + 1, false);
    do {
      used[static_cast<size_t>(j0)] = true;
      const int i0 = match[static_cast<size_t>(j0)];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[static_cast<size_t>(j)]) continue;
        const double cur = cost[static_cast<size_t>(i0 - 1)]
                               [static_cast<size_t>(j - 1)] -
                           u[static_cast<size_t>(i0)] - v[static_cast<size_t>(j)];
        if (cur < minv[static_cast<size_t>(j)]) {
          minv[static_cast<size_t>(j)] = cur;
          way[static_cast<size_t>(j)] = j0;
        }
        if (minv[static_cast<size_t>(j)] < delta) {
          delta = minv[static_cast<size_t>(j)];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[static_cast<size_t>(j)]) {
          u[static_cast<size_t>(match[static_cast<size_t>(j)])] += delta;
          v[static_cast<size_t>(j)] -= delta;
        } else {
          minv[static_cast<size_t>(j)] -= delta;
        }
      }
      j0 = j1;
    } while (match[static_cast<size_t>(j0)] != 0);
    do {
      const int j1 = way[static_cast<size_t>(j0)];
      match[static_cast<size_t>(j0)] = match[static_cast<size_t>(j1)];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> row_to_col(static_cast<size_t>(n), -1);
  for (int j = 1; j <= n; ++j)
    if (match[static_cast<size_t>(j)] != 0)
      row_to_col[static_cast<size_t>(match[static_cast<size_t>(j)] - 1)] = j - 1;
  return row_to_col;
}

}  // namespace detail

inline ContingencyTable contingency(const LabelVector& pred,
                                    const LabelVector& truth) {
  detail::require_valid_pair(pred, truth);
  const int kp = *std::max_element(pred.begin(), pred.end()) + 1;
  const int kt = *std::max_element(truth.begin(), truth.end()) + 1;
  ContingencyTable table;
  table.n = static_cast<long>(pred.size());
  table.counts.assign(static_cast<size_t>(kp),
                      std::vector<long>(static_cast<size_t>(kt), 0));
  for (size_t i = 0; i < pred.size(); ++i)
    ++table.counts[static_cast<size_t>(pred[i])][static_cast<size_t>(truth[i])];
  return table;
}

/// Permutation-matched accuracy: the best fraction of agreements over all
/// injective relabelings of pred onto truth, found by optimal assignment
/// on the contingency table.
inline double accuracy(const LabelVector& pred, const LabelVector& truth) {
  const ContingencyTable table = contingency(pred, truth);
  const size_t dim = std::max(table.k_pred(), table.k_truth());
  std::vector<std::vector<double>> cost(dim, std::vector<double>(dim, 0.0));
  for (size_t a = 0; a < table.k_pred(); ++a)
    for (size_t b = 0; b < table.k_truth(); ++b)
      cost[a][b] = -static_cast<double>(table.counts[a][b]);
  const std::vector<int> row_to_col = detail::min_cost_assignment(cost);
  long matched = 0;
  for (size_t a = 0; a < table.k_pred(); ++a) {
    const int b = row_to_col[a];
    if (b >= 0 && static_cast<size_t>(b) < table.k_truth())
      matched += table.counts[a][static_cast<size_t>(b)];
  }
  return static_cast<double>(matched) / static_cast<double>(table.n);
}

enum class NmiNormalization {
  geometric,   // I / sqrt(H(P) H(T))
  arithmetic,  // 2 I / (H(P) + H(T))
};

/// Normalized mutual information with natural logarithms and 0 log 0 = 0.
/// Two constant labelings score 1; a constant against a non-constant
/// labeling scores 0.
inline double nmi(const LabelVector& pred, const LabelVector& truth,
                  NmiNormalization norm = NmiNormalization::geometric) {
  const ContingencyTable table = contingency(pred, truth);
  const double n = static_cast<double>(table.n);

  std::vector<long> row(table.k_pred(), 0);
  std::vector<long> col(table.k_truth(), 0);
  for (size_t a = 0; a < table.k_pred(); ++a)
    for (size_t b = 0; b < table.k_truth(); ++b) {
      row[a] += table.counts[a][b];
      col[b] += table.counts[a][b];
    }

  // Coincident partitions (no row or column splits a cluster) score exactly
  // 1; evaluating the ratio would round the mathematical value away from it.
  bool coincident = true;
  for (size_t a = 0; a < table.k_pred() && coincident; ++a) {
    int nonzero = 0;
    for (size_t b = 0; b < table.k_truth(); ++b)
      if (table.counts[a][b] != 0) ++nonzero;
    coincident = nonzero <= 1;
  }
  for (size_t b = 0; b < table.k_truth() && coincident; ++b) {
    int nonzero = 0;
    for (size_t a = 0; a < table.k_pred(); ++a)
      if (table.counts[a][b] != 0) ++nonzero;
    coincident = nonzero <= 1;
  }
  if (coincident) return 1.0;

  auto entropy = [n](const std::vector<long>& marginal) {
    double h = 0.0;
    for (long c : marginal) {
      if (c == 0) continue;
      const double p = static_cast<double>(c) / n;
      h -= p * std::log(p);
    }
    return h;
  };
  const double hp = entropy(row);
  const double ht = entropy(col);
  if (hp == 0.0 && ht == 0.0) return 1.0;
  if (hp == 0.0 || ht == 0.0) return 0.0;

  double mi = 0.0;
  for (size_t a = 0; a < table.k_pred(); ++a)
    for (size_t b = 0; b < table.k_truth(); ++b) {
      const long c = table.counts[a][b];
      if (c == 0) continue;
      const double p = static_cast<double>(c) / n;
      mi += p * std::log((n * static_cast<double>(c)) /
                         (static_cast<double>(row[a]) *
                          static_cast<double>(col[b])));
    }

  const double denom = norm == NmiNormalization::geometric
                           ? std::sqrt(hp * ht)
                           : 0.5 * (hp + ht);
  return std::clamp(mi / denom, 0.0, 1.0);
}

}  // namespace rbpma
