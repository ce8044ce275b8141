#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "lapcom/common.hpp"
#include "lapcom/linalg.hpp"
#include "lapcom/rng.hpp"

namespace lapcom {

struct KmeansResult {
  std::vector<int> labels;
  std::vector<std::vector<double>> centers;
  double inertia = 0.0;
};

namespace detail {

inline double sq_dist(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

}  // namespace detail

/// Lloyd k-means with squared-Euclidean cost, 25 seeded restarts, and
/// convergence at 1e-8 relative inertia change. Empty clusters are refilled
/// with the point farthest from its centre, so the returned partition always
/// has k non-empty groups when n >= k (ties broken by index).
inline KmeansResult kmeans(const std::vector<std::vector<double>>& points, int k, Rng& rng,
                           int restarts = 25) {
  const int n = static_cast<int>(points.size());
  require(n >= 1 && k >= 1, "kmeans: need points and k >= 1");
  const int k_eff = std::min(k, n);

  KmeansResult best;
  best.inertia = std::numeric_limits<double>::infinity();

  for (int attempt = 0; attempt < restarts; ++attempt) {
    // Distinct random points as initial centres.
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    for (int i = 0; i < k_eff; ++i) {
      const int j = i + static_cast<int>(rng.uniform_index(n - i));
      std::swap(order[i], order[j]);
    }
    std::vector<std::vector<double>> centers(k_eff);
    for (int c = 0; c < k_eff; ++c) centers[c] = points[order[c]];

    std::vector<int> labels(n, 0);
    double prev_inertia = std::numeric_limits<double>::infinity();
    double inertia = 0.0;
    for (int iter = 0; iter < 200; ++iter) {
      inertia = 0.0;
      for (int i = 0; i < n; ++i) {
        double bd = std::numeric_limits<double>::infinity();
        int bc = 0;
        for (int c = 0; c < k_eff; ++c) {
          const double d = detail::sq_dist(points[i], centers[c]);
          if (d < bd) {
            bd = d;
            bc = c;
          }
        }
        labels[i] = bc;
        inertia += bd;
      }
      std::vector<int> counts(k_eff, 0);
      std::vector<std::vector<double>> sums(k_eff,
                                            std::vector<double>(points.front().size(), 0.0));
      for (int i = 0; i < n; ++i) {
        ++counts[labels[i]];
        for (std::size_t d = 0; d < points[i].size(); ++d) sums[labels[i]][d] += points[i][d];
      }
      for (int c = 0; c < k_eff; ++c) {
        if (counts[c] == 0) {
          // Refill with the point farthest from its own centre.
          int far = 0;
          double fd = -1.0;
          for (int i = 0; i < n; ++i) {
            if (counts[labels[i]] <= 1) continue;
            const double d = detail::sq_dist(points[i], centers[labels[i]]);
            if (d > fd) {
              fd = d;
              far = i;
            }
          }
          --counts[labels[far]];
          labels[far] = c;
          counts[c] = 1;
          centers[c] = points[far];
        } else {
          for (std::size_t d = 0; d < sums[c].size(); ++d)
            centers[c][d] = sums[c][d] / static_cast<double>(counts[c]);
        }
      }
      if (std::abs(prev_inertia - inertia) <= 1e-8 * (1.0 + inertia)) break;
      prev_inertia = inertia;
    }
    if (inertia < best.inertia) {
      best.labels = labels;
      best.centers = centers;
      best.inertia = inertia;
    }
  }

  if (k_eff < k) {
    // Fewer points than requested groups: pad with duplicate centres so the
    // label range stays meaningful.
    while (static_cast<int>(best.centers.size()) < k) best.centers.push_back(best.centers.back());
  }
  return best;
}

/// EM for a k-component full-covariance bivariate Gaussian mixture.
/// Initialized from k-means; at most 100 iterations. Returns hard labels.
inline std::vector<int> gmm_cluster_2d(const std::vector<Vec2>& points, int k, Rng& rng) {
  const int n = static_cast<int>(points.size());
  require(n >= 1 && k >= 1, "gmm_cluster_2d: need points and k >= 1");
  std::vector<std::vector<double>> flat(n);
  for (int i = 0; i < n; ++i) flat[i] = {points[i].x, points[i].y};
  KmeansResult init = kmeans(flat, k, rng);
  const int k_eff = std::min(k, n);

  std::vector<double> weight(k_eff, 1.0 / k_eff);
  std::vector<Vec2> mean(k_eff);
  std::vector<std::array<double, 3>> cov(k_eff);  // (xx, xy, yy)
  for (int c = 0; c < k_eff; ++c) {
    mean[c] = {init.centers[c][0], init.centers[c][1]};
    cov[c] = {0.5, 0.0, 0.5};
  }

  std::vector<std::vector<double>> resp(n, std::vector<double>(k_eff, 0.0));
  double prev_ll = -std::numeric_limits<double>::infinity();
  for (int iter = 0; iter < 100; ++iter) {
    double ll = 0.0;
    for (int i = 0; i < n; ++i) {
      std::vector<double> logp(k_eff);
      for (int c = 0; c < k_eff; ++c) {
        const double det = cov[c][0] * cov[c][2] - cov[c][1] * cov[c][1];
        const double dx = points[i].x - mean[c].x, dy = points[i].y - mean[c].y;
        const double quad =
            (cov[c][2] * dx * dx - 2.0 * cov[c][1] * dx * dy + cov[c][0] * dy * dy) / det;
        logp[c] = std::log(weight[c]) - kLogTwoPi - 0.5 * std::log(det) - 0.5 * quad;
      }
      const double lse = log_sum_exp(logp);
      ll += lse;
      for (int c = 0; c < k_eff; ++c) resp[i][c] = std::exp(logp[c] - lse);
    }
    for (int c = 0; c < k_eff; ++c) {
      double rsum = 0.0;
      Vec2 msum{0.0, 0.0};
      for (int i = 0; i < n; ++i) {
        rsum += resp[i][c];
        msum += points[i] * resp[i][c];
      }
      rsum = std::max(rsum, 1e-12);
      weight[c] = rsum / n;
      mean[c] = msum * (1.0 / rsum);
      double sxx = 0.0, sxy = 0.0, syy = 0.0;
      for (int i = 0; i < n; ++i) {
        const double dx = points[i].x - mean[c].x, dy = points[i].y - mean[c].y;
        sxx += resp[i][c] * dx * dx;
        sxy += resp[i][c] * dx * dy;
        syy += resp[i][c] * dy * dy;
      }
      cov[c] = {sxx / rsum + 1e-6, sxy / rsum, syy / rsum + 1e-6};
    }
    if (std::abs(ll - prev_ll) < 1e-8 * (1.0 + std::abs(ll))) break;
    prev_ll = ll;
  }

  std::vector<int> labels(n, 0);
  for (int i = 0; i < n; ++i)
    labels[i] = static_cast<int>(std::max_element(resp[i].begin(), resp[i].end()) -
                                 resp[i].begin());
  return labels;
}

/// Average-linkage agglomeration of a dissimilarity matrix. Returns the
/// partition at every level: result[j] has n-j clusters (result[0] is all
/// singletons). Merge ties break on the lowest index pair.
inline std::vector<std::vector<int>> average_linkage_partitions(const Matrix& dist) {
  const int n = static_cast<int>(dist.rows());
  std::vector<std::vector<int>> members(n);
  std::vector<int> alive(n, 1);
  Matrix d = dist;
  for (int i = 0; i < n; ++i) members[i] = {i};

  std::vector<std::vector<int>> levels;
  std::vector<int> labels(n);
  auto snapshot = [&]() {
    std::vector<int> lab(n, -1);
    int next = 0;
    for (int c = 0; c < n; ++c) {
      if (!alive[c]) continue;
      for (int i : members[c]) lab[i] = next;
      ++next;
    }
    levels.push_back(lab);
  };
  snapshot();

  for (int step = 0; step + 1 < n; ++step) {
    int bi = -1, bj = -1;
    double bd = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
      if (!alive[i]) continue;
      for (int j = i + 1; j < n; ++j) {
        if (!alive[j]) continue;
        if (d(i, j) < bd) {
          bd = d(i, j);
          bi = i;
          bj = j;
        }
      }
    }
    const double ni = static_cast<double>(members[bi].size());
    const double nj = static_cast<double>(members[bj].size());
    for (int k = 0; k < n; ++k) {
      if (!alive[k] || k == bi || k == bj) continue;
      const double merged = (ni * d(bi, k) + nj * d(bj, k)) / (ni + nj);
      d(bi, k) = merged;
      d(k, bi) = merged;
    }
    members[bi].insert(members[bi].end(), members[bj].begin(), members[bj].end());
    alive[bj] = 0;
    snapshot();
  }
  return levels;
}

}  // namespace lapcom
