#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lapcom/clustering.hpp"
#include "lapcom/linalg.hpp"
#include "lapcom/partition.hpp"
#include "lapcom/sampler.hpp"

namespace lapcom {

/// Posterior co-clustering frequencies: entry (i,j) is the fraction of
/// draws allocating items i and j together. Symmetric with unit diagonal.
inline Matrix posterior_similarity_matrix(const std::vector<std::vector<int>>& draws) {
  require(!draws.empty(), "posterior_similarity_matrix: need at least one draw");
  const std::size_t n = draws.front().size();
  Matrix psm(n, n, 0.0);
  for (const std::vector<int>& draw : draws) {
    require(draw.size() == n, "posterior_similarity_matrix: ragged draws");
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j)
        if (draw[i] == draw[j]) {
          psm(i, j) += 1.0;
          if (i != j) psm(j, i) += 1.0;
        }
  }
  for (double& v : psm.data()) v /= static_cast<double>(draws.size());
  return psm;
}

namespace detail {

/// Jensen lower bound to the posterior expected variation of information of
/// a candidate partition, computed from the PSM (base-2 logs).
inline double vi_lower_bound(const std::vector<int>& labels, const Matrix& psm) {
  const std::size_t n = labels.size();
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double size_own = 0.0, psm_row = 0.0, psm_own = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      psm_row += psm(i, j);
      if (labels[j] == labels[i]) {
        size_own += 1.0;
        psm_own += psm(i, j);
      }
    }
    total += std::log2(size_own) + std::log2(psm_row) - 2.0 * std::log2(psm_own);
  }
  return total / static_cast<double>(n);
}

}  // namespace detail

struct MinViResult {
  std::vector<int> labels;  // canonical 0-based
  int n_clusters = 0;
  double vi_bound = 0.0;
};

/// Optimal partition minimizing the VI lower bound over the sampled draws
/// plus all average-linkage cuts of 1 - PSM. Ties prefer fewer clusters,
/// then the earlier candidate.
inline MinViResult minvi_partition(const std::vector<std::vector<int>>& draws, const Matrix& psm) {
  require(!draws.empty(), "minvi_partition: need at least one draw");
  std::vector<std::vector<int>> candidates;
  candidates.reserve(draws.size() + psm.rows());
  for (const std::vector<int>& d : draws) candidates.push_back(canonicalize_labels(d));
  Matrix dissim = psm;
  for (std::size_t i = 0; i < dissim.rows(); ++i)
    for (std::size_t j = 0; j < dissim.cols(); ++j) dissim(i, j) = 1.0 - psm(i, j);
  for (std::vector<int>& cut : average_linkage_partitions(dissim))
    candidates.push_back(canonicalize_labels(cut));

  MinViResult best;
  bool have = false;
  for (const std::vector<int>& cand : candidates) {
    const double bound = detail::vi_lower_bound(cand, psm);
    const int k = count_distinct_labels(cand);
    if (!have || bound < best.vi_bound - 1e-12 ||
        (std::abs(bound - best.vi_bound) <= 1e-12 && k < best.n_clusters)) {
      best.labels = cand;
      best.n_clusters = k;
      best.vi_bound = bound;
      have = true;
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// Label-switching correction.
// ---------------------------------------------------------------------------

/// Relabels the network-level components of every retained iteration by
/// k-means on the pooled vectorised latent spaces. Iterations whose
/// classification sequence is not a permutation of 1..target_k are marked
/// invalid. Valid iterations get components, tau and C permuted coherently.
inline std::vector<char> kmeans_relabel_networks(Trace& trace, int target_k, Rng& rng) {
  require(target_k >= 1, "kmeans_relabel_networks: target_k must be positive");
  require(!trace.samples.empty(), "kmeans_relabel_networks: empty trace");
  std::vector<char> valid(trace.samples.size(), 0);

  std::vector<std::vector<double>> pooled;
  std::vector<std::size_t> owner;
  for (std::size_t t = 0; t < trace.samples.size(); ++t) {
    const ModelState& st = trace.samples[t];
    if (st.G_plus != target_k) continue;
    valid[t] = 1;
    for (int g = 0; g < target_k; ++g) {
      std::vector<double> flat;
      flat.reserve(st.comps[g].Z.size() * 2);
      for (const Vec2& z : st.comps[g].Z) {
        flat.push_back(z.x);
        flat.push_back(z.y);
      }
      pooled.push_back(std::move(flat));
      owner.push_back(t);
    }
  }
  if (pooled.empty()) return valid;
  if (target_k == 1) return valid;  // identity relabelling

  const KmeansResult km = kmeans(pooled, target_k, rng);

  std::size_t cursor = 0;
  for (std::size_t t = 0; t < trace.samples.size(); ++t) {
    if (!valid[t]) continue;
    std::vector<int> seq(target_k);
    for (int g = 0; g < target_k; ++g) seq[g] = km.labels[cursor + g];
    cursor += target_k;

    std::vector<int> seen(target_k, 0);
    bool is_perm = true;
    for (int lbl : seq) {
      if (lbl < 0 || lbl >= target_k || seen[lbl]) {
        is_perm = false;
        break;
      }
      seen[lbl] = 1;
    }
    if (!is_perm) {
      valid[t] = 0;
      continue;
    }

    ModelState& st = trace.samples[t];
    std::vector<LatentComponent> comps(st.comps.size());
    std::vector<double> tau(st.tau.size());
    for (int g = 0; g < st.G; ++g) {
      const int dest = g < target_k ? seq[g] : g;
      comps[dest] = std::move(st.comps[g]);
      tau[dest] = st.tau[g];
    }
    st.comps = std::move(comps);
    st.tau = std::move(tau);
    for (int& c : st.C) c = c < target_k ? seq[c] : c;
  }
  return valid;
}

/// Node-level analogue within network-level cluster g, using the component
/// means as the classifying parameter. Only iterations already valid at the
/// network level participate.
inline std::vector<char> kmeans_relabel_nodes(Trace& trace, int g, int target_k,
                                              const std::vector<char>& base_valid, Rng& rng) {
  require(target_k >= 1, "kmeans_relabel_nodes: target_k must be positive");
  std::vector<char> valid(trace.samples.size(), 0);

  std::vector<std::vector<double>> pooled;
  for (std::size_t t = 0; t < trace.samples.size(); ++t) {
    if (!base_valid[t]) continue;
    const LatentComponent& comp = trace.samples[t].comps[g];
    if (comp.K_plus != target_k) continue;
    valid[t] = 1;
    for (int k = 0; k < target_k; ++k) pooled.push_back({comp.mu[k].x, comp.mu[k].y});
  }
  if (pooled.empty()) return valid;
  if (target_k == 1) return valid;

  const KmeansResult km = kmeans(pooled, target_k, rng);

  std::size_t cursor = 0;
  for (std::size_t t = 0; t < trace.samples.size(); ++t) {
    if (!valid[t]) continue;
    std::vector<int> seq(target_k);
    for (int k = 0; k < target_k; ++k) seq[k] = km.labels[cursor + k];
    cursor += target_k;

    std::vector<int> seen(target_k, 0);
    bool is_perm = true;
    for (int lbl : seq) {
      if (lbl < 0 || lbl >= target_k || seen[lbl]) {
        is_perm = false;
        break;
      }
      seen[lbl] = 1;
    }
    if (!is_perm) {
      valid[t] = 0;
      continue;
    }

    LatentComponent& comp = trace.samples[t].comps[g];
    std::vector<Vec2> mu(comp.mu.size());
    std::vector<double> sigma2(comp.sigma2.size()), pi(comp.pi.size());
    for (int k = 0; k < comp.K; ++k) {
      const int dest = k < target_k ? seq[k] : k;
      mu[dest] = comp.mu[k];
      sigma2[dest] = comp.sigma2[k];
      pi[dest] = comp.pi[k];
    }
    comp.mu = std::move(mu);
    comp.sigma2 = std::move(sigma2);
    comp.pi = std::move(pi);
    for (int& s : comp.S) s = s < target_k ? seq[s] : s;
  }
  return valid;
}

// ---------------------------------------------------------------------------
// Reference-partition alignment.
// ---------------------------------------------------------------------------

struct AlignmentResult {
  std::vector<int> aligned;  // the permuted reference partition
  std::vector<int> label_map;
  bool tie = false;
};

/// Aligns the optimal partition with the relabelled draws: each iteration
/// contributes the label map maximizing cross-tab mass (per reference
/// label, the relabelled label it co-occurs with most; ties take the
/// smaller label). The modal map across iterations is applied to the
/// reference. Modal ties pick the lexicographically smallest map.
inline AlignmentResult align_reference_partition(const std::vector<int>& reference,
                                                 const std::vector<std::vector<int>>& draws) {
  require(!draws.empty(), "align_reference_partition: need draws");
  const int k_ref = count_distinct_labels(reference);
  int k_draw = k_ref;
  for (const std::vector<int>& d : draws) {
    require(d.size() == reference.size(), "align_reference_partition: length mismatch");
    for (int lbl : d) k_draw = std::max(k_draw, lbl + 1);
  }

  std::map<std::vector<int>, int> votes;
  for (const std::vector<int>& d : draws) {
    std::vector<std::vector<long>> tab(k_ref, std::vector<long>(k_draw, 0));
    for (std::size_t i = 0; i < d.size(); ++i) ++tab[reference[i]][d[i]];
    std::vector<int> map(k_ref, 0);
    for (int a = 0; a < k_ref; ++a) {
      long best = -1;
      for (int b = 0; b < k_draw; ++b)
        if (tab[a][b] > best) {
          best = tab[a][b];
          map[a] = b;
        }
    }
    ++votes[map];
  }
  AlignmentResult out;
  int best_count = -1;
  for (const auto& [map, count] : votes) {
    if (count > best_count) {
      best_count = count;
      out.label_map = map;
      out.tie = false;
    } else if (count == best_count) {
      out.tie = true;  // std::map iterates keys ascending, first winner is smallest
    }
  }
  out.aligned.resize(reference.size());
  for (std::size_t i = 0; i < reference.size(); ++i)
    out.aligned[i] = out.label_map[reference[i]];
  return out;
}

// ---------------------------------------------------------------------------
// Procrustes alignment.
// ---------------------------------------------------------------------------

struct ProcrustesTransform {
  double scale = 1.0;
  double rot[2][2] = {{1.0, 0.0}, {0.0, 1.0}};  // applied as row-vector times R
  Vec2 translation{0.0, 0.0};
  bool degenerate = false;

  Vec2 apply(const Vec2& p) const {
    return {scale * (p.x * rot[0][0] + p.y * rot[1][0]) + translation.x,
            scale * (p.x * rot[0][1] + p.y * rot[1][1]) + translation.y};
  }
};

/// Optimal translation + rotation/reflection + isotropic scaling taking
/// `source` onto `reference` in least squares. Rank-0 sources yield the
/// identity transform flagged degenerate.
inline ProcrustesTransform fit_procrustes(const std::vector<Vec2>& source,
                                          const std::vector<Vec2>& reference) {
  require(source.size() == reference.size() && !source.empty(),
          "fit_procrustes: shape mismatch");
  const double n = static_cast<double>(source.size());
  Vec2 ms{0.0, 0.0}, mr{0.0, 0.0};
  for (std::size_t i = 0; i < source.size(); ++i) {
    ms += source[i];
    mr += reference[i];
  }
  ms = ms * (1.0 / n);
  mr = mr * (1.0 / n);

  double cross[2][2] = {{0.0, 0.0}, {0.0, 0.0}};
  double source_ss = 0.0;
  for (std::size_t i = 0; i < source.size(); ++i) {
    const Vec2 s = source[i] - ms;
    const Vec2 r = reference[i] - mr;
    cross[0][0] += s.x * r.x;
    cross[0][1] += s.x * r.y;
    cross[1][0] += s.y * r.x;
    cross[1][1] += s.y * r.y;
    source_ss += s.squared_norm();
  }

  ProcrustesTransform tf;
  if (source_ss < 1e-14) {
    tf.degenerate = true;
    return tf;
  }
  const Svd2 svd = svd_2x2(cross);
  // R = U V^T for X^T Y = U S V^T with row-vector convention y ~ x R.
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      tf.rot[i][j] = svd.u[i][0] * svd.v[j][0] + svd.u[i][1] * svd.v[j][1];
  tf.scale = (svd.s[0] + svd.s[1]) / source_ss;
  const Vec2 rotated{ms.x * tf.rot[0][0] + ms.y * tf.rot[1][0],
                     ms.x * tf.rot[0][1] + ms.y * tf.rot[1][1]};
  tf.translation = mr - rotated * tf.scale;
  return tf;
}

/// Aligns each draw to the reference configuration; returns the aligned
/// draws and the per-draw transforms (to be reused on means and variances).
inline std::pair<std::vector<std::vector<Vec2>>, std::vector<ProcrustesTransform>>
procrustes_align(const std::vector<std::vector<Vec2>>& z_draws,
                 const std::vector<Vec2>& reference) {
  std::vector<std::vector<Vec2>> aligned;
  std::vector<ProcrustesTransform> transforms;
  aligned.reserve(z_draws.size());
  transforms.reserve(z_draws.size());
  for (const std::vector<Vec2>& draw : z_draws) {
    const ProcrustesTransform tf = fit_procrustes(draw, reference);
    std::vector<Vec2> out(draw.size());
    for (std::size_t i = 0; i < draw.size(); ++i) out[i] = tf.apply(draw[i]);
    aligned.push_back(std::move(out));
    transforms.push_back(tf);
  }
  return {std::move(aligned), std::move(transforms)};
}

// ---------------------------------------------------------------------------
// Whole-chain pipeline and cross-chain reconciliation.
// ---------------------------------------------------------------------------

/// Identified point estimates for one chain, plus the masks and transforms
/// that produced them.
struct ClusteringSolution {
  bool ok = false;
  std::string failure;

  std::vector<int> c_hat_star;  // aligned network partition, 0-based labels
  int g_hat_plus = 0;           // minVI estimate of the number of network clusters
  std::vector<std::vector<int>> s_hat_star;  // per cluster, aligned node partition
  std::vector<int> k_hat_plus_pre;           // minVI node-cluster counts
  std::vector<int> k_hat_plus_post;          // distinct labels after alignment
  std::vector<std::vector<Vec2>> z_hat;      // posterior-mean aligned latent spaces
  std::vector<std::vector<Vec2>> mu_hat;
  std::vector<std::vector<double>> sigma2_hat;
  double alpha_hat = 0.0;
  double e_hat = 1.0;
  std::vector<double> tau_hat;
  std::vector<double> w_hat;

  std::vector<char> valid_mask;               // network-level permutation check
  std::vector<std::vector<char>> node_valid;  // per cluster
  std::vector<std::vector<ProcrustesTransform>> transforms;  // per cluster, per valid draw
  double log_posterior_at_estimate = kNegInf;
};

/// Runs the full identification pipeline on one chain, in the fixed order
/// minVI -> k-means relabelling -> reference alignment -> Procrustes.
/// Mutates the trace in place (relabelled draws). mono variants skip the
/// node level.
inline ClusteringSolution postprocess_chain(Trace& trace, Rng& rng) {
  ClusteringSolution sol;
  if (trace.samples.empty()) {
    sol.failure = "empty trace";
    return sol;
  }
  const bool mono = trace.config.variant == Variant::mono_lapcm;
  const int n_nodes = static_cast<int>(trace.samples.front().comps.front().Z.size());

  // Network level: optimal partition from the co-clustering draws.
  std::vector<std::vector<int>> c_draws;
  c_draws.reserve(trace.samples.size());
  for (const ModelState& st : trace.samples) c_draws.push_back(st.C);
  const Matrix psm = posterior_similarity_matrix(c_draws);
  const MinViResult opt = minvi_partition(c_draws, psm);
  sol.g_hat_plus = opt.n_clusters;

  sol.valid_mask = kmeans_relabel_networks(trace, opt.n_clusters, rng);
  std::vector<std::size_t> valid_idx;
  for (std::size_t t = 0; t < sol.valid_mask.size(); ++t)
    if (sol.valid_mask[t]) valid_idx.push_back(t);
  if (valid_idx.empty()) {
    sol.failure = "no iteration passed the network-level permutation check";
    return sol;
  }

  std::vector<std::vector<int>> relabelled_c;
  relabelled_c.reserve(valid_idx.size());
  for (std::size_t t : valid_idx) relabelled_c.push_back(trace.samples[t].C);
  const AlignmentResult c_align = align_reference_partition(opt.labels, relabelled_c);
  sol.c_hat_star = c_align.aligned;

  const int g_hat = opt.n_clusters;
  sol.s_hat_star.resize(g_hat);
  sol.k_hat_plus_pre.assign(g_hat, 1);
  sol.k_hat_plus_post.assign(g_hat, 1);
  sol.z_hat.resize(g_hat);
  sol.mu_hat.resize(g_hat);
  sol.sigma2_hat.resize(g_hat);
  sol.node_valid.assign(g_hat, std::vector<char>(trace.samples.size(), 0));
  sol.transforms.resize(g_hat);
  sol.w_hat.assign(g_hat, 1.0);

  // Node level within each network cluster, then Procrustes.
  for (int g = 0; g < g_hat; ++g) {
    std::vector<char>& node_valid = sol.node_valid[g];
    if (mono) {
      node_valid = sol.valid_mask;
      sol.s_hat_star[g].assign(n_nodes, 0);
    } else {
      std::vector<std::vector<int>> s_draws;
      s_draws.reserve(valid_idx.size());
      for (std::size_t t : valid_idx) s_draws.push_back(trace.samples[t].comps[g].S);
      const Matrix node_psm = posterior_similarity_matrix(s_draws);
      const MinViResult node_opt = minvi_partition(s_draws, node_psm);
      sol.k_hat_plus_pre[g] = node_opt.n_clusters;

      node_valid = kmeans_relabel_nodes(trace, g, node_opt.n_clusters, sol.valid_mask, rng);
      std::vector<std::vector<int>> node_relabelled;
      for (std::size_t t = 0; t < node_valid.size(); ++t)
        if (node_valid[t]) node_relabelled.push_back(trace.samples[t].comps[g].S);
      if (node_relabelled.empty()) {
        sol.failure = "no iteration passed the node-level permutation check (cluster " +
                      std::to_string(g + 1) + ")";
        return sol;
      }
      const AlignmentResult s_align = align_reference_partition(node_opt.labels, node_relabelled);
      sol.s_hat_star[g] = s_align.aligned;
      sol.k_hat_plus_post[g] = count_distinct_labels(s_align.aligned);
    }

    // Procrustes: align every network-valid draw of Z_g to the first
    // retained sample, apply the same transform to means and the squared
    // scale to variances, then average.
    const std::vector<Vec2>& reference = trace.samples[valid_idx.front()].comps[g].Z;
    sol.z_hat[g].assign(n_nodes, Vec2{0.0, 0.0});
    double count = 0.0;
    for (std::size_t t : valid_idx) {
      LatentComponent& comp = trace.samples[t].comps[g];
      const ProcrustesTransform tf = fit_procrustes(comp.Z, reference);
      sol.transforms[g].push_back(tf);
      for (Vec2& z : comp.Z) z = tf.apply(z);
      for (Vec2& m : comp.mu) m = tf.apply(m);
      for (double& s2 : comp.sigma2) s2 *= tf.scale * tf.scale;
      for (int i = 0; i < n_nodes; ++i) sol.z_hat[g][i] += comp.Z[i];
      count += 1.0;
    }
    for (Vec2& z : sol.z_hat[g]) z = z * (1.0 / count);

    // Posterior means of the node-level parameters over node-valid draws.
    const int k_slots = mono ? 1 : sol.k_hat_plus_pre[g];
    sol.mu_hat[g].assign(k_slots, Vec2{0.0, 0.0});
    sol.sigma2_hat[g].assign(k_slots, 0.0);
    double w_sum = 0.0, node_count = 0.0;
    for (std::size_t t = 0; t < node_valid.size(); ++t) {
      if (!node_valid[t]) continue;
      const LatentComponent& comp = trace.samples[t].comps[g];
      for (int k = 0; k < k_slots && k < comp.K; ++k) {
        sol.mu_hat[g][k] += comp.mu[k];
        sol.sigma2_hat[g][k] += comp.sigma2[k];
      }
      w_sum += comp.w;
      node_count += 1.0;
    }
    for (Vec2& m : sol.mu_hat[g]) m = m * (1.0 / node_count);
    for (double& s2 : sol.sigma2_hat[g]) s2 /= node_count;
    sol.w_hat[g] = w_sum / node_count;
  }

  // Scalar posterior means over valid draws.
  sol.tau_hat.assign(g_hat, 0.0);
  double alpha_sum = 0.0, e_sum = 0.0;
  for (std::size_t t : valid_idx) {
    const ModelState& st = trace.samples[t];
    alpha_sum += st.alpha;
    e_sum += st.e;
    for (int g = 0; g < g_hat; ++g) sol.tau_hat[g] += st.tau[g];
  }
  const double nv = static_cast<double>(valid_idx.size());
  sol.alpha_hat = alpha_sum / nv;
  sol.e_hat = e_sum / nv;
  double tau_total = 0.0;
  for (double& t : sol.tau_hat) tau_total += t / nv;
  for (double& t : sol.tau_hat) t = (t / nv) / tau_total;

  sol.ok = true;
  return sol;
}

/// Builds a coherent state from the point estimates for log-posterior
/// ranking across chains.
inline ModelState solution_to_state(const ClusteringSolution& sol, int n_nodes) {
  ModelState st;
  const std::vector<int> c_canon = canonicalize_labels(sol.c_hat_star);
  const int g_used = count_distinct_labels(c_canon);
  // Map canonical labels back to the solution's cluster indices.
  std::vector<int> cluster_of(g_used, 0);
  for (std::size_t m = 0; m < c_canon.size(); ++m) cluster_of[c_canon[m]] = sol.c_hat_star[m];

  st.G = g_used;
  st.G_plus = g_used;
  st.C = c_canon;
  st.alpha = sol.alpha_hat;
  st.e = sol.e_hat;
  st.tau.assign(g_used, 0.0);
  double tau_total = 0.0;
  for (int g = 0; g < g_used; ++g) tau_total += sol.tau_hat[cluster_of[g]];
  for (int g = 0; g < g_used; ++g) st.tau[g] = sol.tau_hat[cluster_of[g]] / tau_total;

  st.comps.resize(g_used);
  for (int g = 0; g < g_used; ++g) {
    const int src = cluster_of[g];
    LatentComponent& comp = st.comps[g];
    comp.Z = sol.z_hat[src];
    const std::vector<int> s_canon = canonicalize_labels(sol.s_hat_star[src]);
    comp.S = s_canon;
    comp.K = count_distinct_labels(s_canon);
    comp.K_plus = comp.K;
    comp.w = sol.w_hat[src];
    comp.mu.assign(comp.K, Vec2{0.0, 0.0});
    comp.sigma2.assign(comp.K, 1.0);
    comp.pi.assign(comp.K, 0.0);
    std::vector<int> label_of(comp.K, 0);
    for (std::size_t i = 0; i < s_canon.size(); ++i)
      label_of[s_canon[i]] = sol.s_hat_star[src][i];
    std::vector<int> counts(comp.K, 0);
    for (int s : s_canon) ++counts[s];
    for (int k = 0; k < comp.K; ++k) {
      const int kk = std::min<int>(label_of[k], static_cast<int>(sol.mu_hat[src].size()) - 1);
      comp.mu[k] = sol.mu_hat[src][kk];
      comp.sigma2[k] = sol.sigma2_hat[src][kk];
      comp.pi[k] = static_cast<double>(counts[k]) / static_cast<double>(n_nodes);
    }
  }
  return st;
}

struct ReconcileResult {
  int selected_chain = -1;
  ClusteringSolution solution;
  std::vector<double> cross_chain_ari;
  std::vector<int> retained_chains;
  std::vector<int> discarded_chains;
  int modal_g_plus = 0;
};

/// Cross-chain reconciliation: keep chains whose estimated number of
/// network clusters matches the cross-chain mode (smaller mode on ties),
/// rank the survivors by log-posterior at their point estimates, and report
/// the agreement of the winner with every other retained chain.
inline ReconcileResult reconcile_chains(std::vector<Trace>& traces, const Multiplex& y,
                                        Rng& rng) {
  require(!traces.empty(), "reconcile_chains: need at least one chain");
  std::vector<ClusteringSolution> solutions(traces.size());
  for (std::size_t c = 0; c < traces.size(); ++c)
    solutions[c] = postprocess_chain(traces[c], rng);

  ReconcileResult out;
  std::map<int, int> mode_votes;
  for (std::size_t c = 0; c < traces.size(); ++c) {
    if (solutions[c].ok)
      ++mode_votes[solutions[c].g_hat_plus];
    else
      out.discarded_chains.push_back(static_cast<int>(c));
  }
  if (mode_votes.empty()) throw std::runtime_error("reconcile_chains: all chains discarded");
  int modal = 0, best_votes = -1;
  for (const auto& [g, votes] : mode_votes)  // ascending keys: ties keep the smaller mode
    if (votes > best_votes) {
      best_votes = votes;
      modal = g;
    }
  out.modal_g_plus = modal;

  const int n_nodes = y.n_nodes();
  int best_chain = -1;
  double best_lp = kNegInf;
  for (std::size_t c = 0; c < traces.size(); ++c) {
    if (!solutions[c].ok) continue;
    if (solutions[c].g_hat_plus != modal) {
      out.discarded_chains.push_back(static_cast<int>(c));
      continue;
    }
    out.retained_chains.push_back(static_cast<int>(c));
    const ModelState est = solution_to_state(solutions[c], n_nodes);
    solutions[c].log_posterior_at_estimate =
        log_posterior(est, y, traces[c].config.hyper,
                      traces[c].config.variant == Variant::mono_lapcm);
    if (solutions[c].log_posterior_at_estimate > best_lp) {
      best_lp = solutions[c].log_posterior_at_estimate;
      best_chain = static_cast<int>(c);
    }
  }
  out.selected_chain = best_chain;
  out.solution = solutions[best_chain];
  for (int c : out.retained_chains)
    if (c != best_chain)
      out.cross_chain_ari.push_back(ari(out.solution.c_hat_star, solutions[c].c_hat_star));
  return out;
}

}  // namespace lapcom
