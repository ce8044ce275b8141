#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "lapcom/common.hpp"
#include "lapcom/linalg.hpp"
#include "lapcom/multiplex.hpp"

namespace lapcom {

/// Weights of the three dissimilarity terms: distance-distribution
/// divergence, node-dispersion difference, and the alpha-centrality terms
/// on the graphs and their complements.
struct SchieberWeights {
  double w1 = 0.45;
  double w2 = 0.45;
  double w3 = 0.10;
};

namespace detail {

inline double entropy(std::span<const double> p) {
  double h = 0.0;
  for (double v : p)
    if (v > 0.0) h -= v * std::log(v);
  return h;
}

inline double jensen_shannon(std::span<const double> p, std::span<const double> q) {
  const std::size_t n = std::max(p.size(), q.size());
  std::vector<double> mix(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double pi = i < p.size() ? p[i] : 0.0;
    const double qi = i < q.size() ? q[i] : 0.0;
    mix[i] = 0.5 * (pi + qi);
  }
  double hp = entropy(p), hq = entropy(q);
  return std::max(0.0, entropy(mix) - 0.5 * (hp + hq));
}

/// Binarized, symmetrized adjacency: directed ties count in either
/// direction. The dissimilarity is defined on simple undirected graphs.
inline std::vector<int> undirected_support(const Network& net) {
  const int n = net.n_nodes;
  std::vector<int> adj(static_cast<std::size_t>(n) * n, 0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j && (net.at(i, j) > 0 || net.at(j, i) > 0)) {
        adj[static_cast<std::size_t>(i) * n + j] = 1;
        adj[static_cast<std::size_t>(j) * n + i] = 1;
      }
  return adj;
}

/// Alpha-centrality profile, sorted and normalized to a probability vector.
/// x solves (I - A^T / n) x = deg / (n - 1); an all-zero solution (empty
/// graph) falls back to the uniform profile.
inline std::vector<double> alpha_centrality_profile(const std::vector<int>& adj, int n) {
  Matrix a(n, n);
  std::vector<double> exo(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double deg = 0.0;
    for (int j = 0; j < n; ++j) {
      a(i, j) = (i == j ? 1.0 : 0.0) -
                static_cast<double>(adj[static_cast<std::size_t>(j) * n + i]) / n;
      deg += adj[static_cast<std::size_t>(i) * n + j];
    }
    exo[i] = n > 1 ? deg / (n - 1.0) : 0.0;
  }
  std::vector<double> x = solve_linear(a, exo);
  std::sort(x.begin(), x.end());
  double total = 0.0;
  for (double v : x) total += std::max(v, 0.0);
  std::vector<double> profile(n, 1.0 / n);
  if (total > 1e-12)
    for (int i = 0; i < n; ++i) profile[i] = std::max(x[i], 0.0) / total;
  return profile;
}

}  // namespace detail

/// Per-graph quantities entering the dissimilarity, computed once so that
/// pairwise distances over a multiplex reuse them.
struct GraphSummary {
  std::vector<double> mean_distance_distribution;  // bins 1..n, disconnected -> bin n
  double nnd = 0.0;
  std::vector<double> alpha_profile;
  std::vector<double> alpha_profile_complement;
};

inline GraphSummary summarize_graph(const Network& net) {
  const int n = net.n_nodes;
  GraphSummary out;
  if (n == 1) {
    out.mean_distance_distribution = {1.0};
    out.alpha_profile = {1.0};
    out.alpha_profile_complement = {1.0};
    return out;
  }
  const std::vector<int> adj = detail::undirected_support(net);
  std::vector<std::vector<int>> neighbors(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (adj[static_cast<std::size_t>(i) * n + j]) neighbors[i].push_back(j);

  // Hop counts per node; unreachable pairs land in bin n, the convention
  // the dissimilarity uses for disconnected graphs.
  double diameter = 1.0;
  std::vector<std::vector<double>> node_dist(n, std::vector<double>(n, 0.0));
  std::vector<int> hops(n), frontier;
  for (int s = 0; s < n; ++s) {
    hops.assign(n, -1);
    hops[s] = 0;
    frontier.assign(1, s);
    for (std::size_t head = 0; head < frontier.size(); ++head)
      for (int v : neighbors[frontier[head]])
        if (hops[v] < 0) {
          hops[v] = hops[frontier[head]] + 1;
          frontier.push_back(v);
        }
    for (int t = 0; t < n; ++t) {
      if (t == s) continue;
      const int d = hops[t] >= 0 ? hops[t] : n;
      diameter = std::max(diameter, static_cast<double>(d));
      node_dist[s][d - 1] += 1.0 / (n - 1.0);
    }
  }
  out.mean_distance_distribution.assign(n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int b = 0; b < n; ++b) out.mean_distance_distribution[b] += node_dist[i][b] / n;

  double mean_entropy = 0.0;
  for (int i = 0; i < n; ++i) mean_entropy += detail::entropy(node_dist[i]) / n;
  const double jsd_all = std::max(0.0, detail::entropy(out.mean_distance_distribution) - mean_entropy);
  out.nnd = jsd_all / std::log(diameter + 1.0);

  std::vector<int> comp(static_cast<std::size_t>(n) * n, 0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j) comp[static_cast<std::size_t>(i) * n + j] = 1 - adj[static_cast<std::size_t>(i) * n + j];
  out.alpha_profile = detail::alpha_centrality_profile(adj, n);
  out.alpha_profile_complement = detail::alpha_centrality_profile(comp, n);
  return out;
}

inline double schieber_distance(const GraphSummary& a, const GraphSummary& b,
                                const SchieberWeights& w = {}) {
  const double log2 = std::log(2.0);
  double total = 0.0;
  if (w.w1 > 0.0 || w.w2 > 0.0) {
    const double first = std::sqrt(
        detail::jensen_shannon(a.mean_distance_distribution, b.mean_distance_distribution) / log2);
    const double second = std::abs(std::sqrt(a.nnd) - std::sqrt(b.nnd));
    total += w.w1 * first + w.w2 * second;
  }
  if (w.w3 > 0.0) {
    const double third =
        0.5 * (std::sqrt(detail::jensen_shannon(a.alpha_profile, b.alpha_profile) / log2) +
               std::sqrt(detail::jensen_shannon(a.alpha_profile_complement,
                                                b.alpha_profile_complement) /
                         log2));
    total += w.w3 * third;
  }
  return total;
}

/// Structural dissimilarity in [0, 1]; 0 for identical graphs. Graphs on
/// fewer nodes are padded with isolated nodes to the larger size.
inline double schieber_distance(const Network& a, const Network& b,
                                const SchieberWeights& w = {}) {
  auto pad = [](const Network& net, int n) {
    if (net.n_nodes == n) return net;
    Network out;
    out.n_nodes = n;
    out.directed = net.directed;
    out.family = net.family;
    out.weights.assign(static_cast<std::size_t>(n) * n, 0);
    for (int i = 0; i < net.n_nodes; ++i)
      for (int j = 0; j < net.n_nodes; ++j) out.at(i, j) = net.at(i, j);
    return out;
  };
  const int n = std::max(a.n_nodes, b.n_nodes);
  return schieber_distance(summarize_graph(pad(a, n)), summarize_graph(pad(b, n)), w);
}

/// Pairwise dissimilarity matrix across the layers of a multiplex.
inline Matrix pairwise_schieber_matrix(const Multiplex& mx, const SchieberWeights& w = {}) {
  const int m = mx.n_networks();
  std::vector<GraphSummary> summaries(m);
  for (int i = 0; i < m; ++i) summaries[i] = summarize_graph(mx.networks[i]);
  Matrix dist(m, m, 0.0);
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) {
      const double d = schieber_distance(summaries[i], summaries[j], w);
      dist(i, j) = d;
      dist(j, i) = d;
    }
  return dist;
}

}  // namespace lapcom
