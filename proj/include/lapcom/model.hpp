#pragma once

#include <cmath>
#include <numeric>
#include <utility>
#include <vector>

#include "lapcom/common.hpp"
#include "lapcom/distributions.hpp"
#include "lapcom/multiplex.hpp"
#include "lapcom/rng.hpp"

namespace lapcom {

/// Fixed prior constants plus proposal scales and component bounds.
/// defaults_for derives the recommended values from (M, N).
struct Hyperparams {
  double m_alpha = 0.0;
  double s_alpha = 1.0;
  Vec2 mu0{0.0, 0.0};
  double sigma_mu = 1.0;  // prior covariance of mu is sigma_mu * I
  double u_sigma2 = 11.0;
  double v_sigma2 = 2.0;
  BnbParams bnb_G{8.0, 18.0, 10.0};
  BnbParams bnb_K{8.0, 18.0, 10.0};
  double l_G = 6.0;
  double r_G = 3.0;
  double l_K = 6.0;
  double r_K = 3.0;
  int G0 = 2;
  int K0 = 2;
  int G_max = 5;
  int K_max = 8;
  int n_min = 5;
  double delta_Z = 0.1;      // latent position proposal scale factor
  double delta_alpha = 0.05; // intercept proposal scale factor
  double s_e = 1.0;          // log-walk sd for e
  double s_w = 1.0;          // log-walk sd for w_g

  static Hyperparams defaults_for(int n_networks, int n_nodes, int n_min_override = 0) {
    require(n_networks >= 1 && n_nodes >= 1, "defaults_for: need M >= 1 and N >= 1");
    Hyperparams h;
    h.u_sigma2 = n_nodes < 60 ? 11.0 : 21.0;
    h.v_sigma2 = 2.0;
    h.G_max = n_networks < 60 ? 5 : 10;
    h.n_min = n_min_override > 0 ? n_min_override : (n_nodes < 60 ? 5 : 10);
    h.K_max = static_cast<int>(std::lround(static_cast<double>(n_nodes) / h.n_min)) + 2;
    h.K_max = std::min(h.K_max, n_nodes);
    h.K_max = std::max(h.K_max, 1);
    h.G_max = std::min(h.G_max, n_networks);
    h.G0 = std::min(2, h.G_max);
    h.K0 = std::min(2, h.K_max);
    return h;
  }

  void validate() const {
    require(s_alpha > 0.0 && sigma_mu > 0.0, "hyperparams: scales must be positive");
    require(u_sigma2 > 0.0 && v_sigma2 > 0.0, "hyperparams: IG parameters must be positive");
    require(l_G > 0.0 && r_G > 0.0 && l_K > 0.0 && r_K > 0.0, "hyperparams: F dof must be positive");
    require(G0 >= 1 && G0 <= G_max, "hyperparams: need 1 <= G0 <= G_max");
    require(K0 >= 1 && K0 <= K_max, "hyperparams: need 1 <= K0 <= K_max");
    require(delta_Z > 0.0 && delta_alpha > 0.0 && s_e > 0.0 && s_w > 0.0,
            "hyperparams: proposal scales must be positive");
    require(n_min >= 1, "hyperparams: n_min must be positive");
  }
};

/// One network-level mixture component: its node-level mixture and the
/// shared latent space. sigma2 holds one scalar per node-level component,
/// shared by both coordinates.
struct LatentComponent {
  int K = 1;
  int K_plus = 1;
  double w = 1.0;
  std::vector<double> pi;
  std::vector<int> S;
  std::vector<Vec2> mu;
  std::vector<double> sigma2;
  std::vector<Vec2> Z;

  std::vector<int> node_counts() const {
    std::vector<int> counts(K, 0);
    for (int s : S) ++counts[s];
    return counts;
  }
};

/// Full MCMC state. Components are kept actives-first: indices
/// 0..G_plus-1 have at least one allocated network, the rest are empty.
struct ModelState {
  int G = 1;
  int G_plus = 1;
  std::vector<double> tau;
  double e = 1.0;
  std::vector<int> C;
  double alpha = 0.0;
  std::vector<LatentComponent> comps;

  std::vector<int> network_counts() const {
    std::vector<int> counts(G, 0);
    for (int c : C) ++counts[c];
    return counts;
  }
};

struct SufficientStats {
  std::vector<int> M_g;
  std::vector<std::vector<int>> N_gk;
  std::vector<double> zeta;              // e/G + M_g
  std::vector<std::vector<double>> psi;  // w_g/K_g + N_gk
};

inline SufficientStats compute_sufficient_stats(const ModelState& state) {
  SufficientStats s;
  s.M_g = state.network_counts();
  s.zeta.resize(state.G);
  for (int g = 0; g < state.G; ++g)
    s.zeta[g] = state.e / state.G + static_cast<double>(s.M_g[g]);
  for (const LatentComponent& comp : state.comps) {
    s.N_gk.push_back(comp.node_counts());
    std::vector<double> psi_g(comp.K);
    for (int k = 0; k < comp.K; ++k)
      psi_g[k] = comp.w / comp.K + static_cast<double>(s.N_gk.back()[k]);
    s.psi.push_back(std::move(psi_g));
  }
  return s;
}

/// Throws when a state violates the structural invariants (dimension
/// agreement, actives-first ordering, simplex validity, positive scales).
inline void validate_state(const ModelState& state, int n_networks, int n_nodes,
                           const Hyperparams& h) {
  require(state.G >= 1 && state.G <= h.G_max, "state: G out of range");
  require(state.G_plus >= 1 && state.G_plus <= state.G, "state: G_plus out of range");
  require(static_cast<int>(state.tau.size()) == state.G, "state: tau size");
  require(static_cast<int>(state.comps.size()) == state.G, "state: component count");
  require(static_cast<int>(state.C.size()) == n_networks, "state: C size");
  require(state.e > 0.0 && std::isfinite(state.e), "state: e must be positive finite");
  require(std::isfinite(state.alpha), "state: alpha must be finite");
  double tau_sum = 0.0;
  for (double t : state.tau) {
    require(t >= 0.0, "state: tau entries non-negative");
    tau_sum += t;
  }
  require(std::abs(tau_sum - 1.0) < 1e-9, "state: tau must sum to 1");
  const std::vector<int> m_g = state.network_counts();
  for (int g = 0; g < state.G; ++g) {
    if (g < state.G_plus)
      require(m_g[g] >= 1, "state: active network component is empty");
    else
      require(m_g[g] == 0, "state: empty network component holds networks");
  }
  for (const LatentComponent& comp : state.comps) {
    require(comp.K >= 1 && comp.K <= h.K_max, "state: K out of range");
    require(comp.K_plus >= 1 && comp.K_plus <= comp.K, "state: K_plus out of range");
    require(static_cast<int>(comp.pi.size()) == comp.K, "state: pi size");
    require(static_cast<int>(comp.mu.size()) == comp.K, "state: mu size");
    require(static_cast<int>(comp.sigma2.size()) == comp.K, "state: sigma2 size");
    require(static_cast<int>(comp.S.size()) == n_nodes, "state: S size");
    require(static_cast<int>(comp.Z.size()) == n_nodes, "state: Z size");
    double pi_sum = 0.0;
    for (double p : comp.pi) {
      require(p >= 0.0, "state: pi entries non-negative");
      pi_sum += p;
    }
    require(std::abs(pi_sum - 1.0) < 1e-9, "state: pi must sum to 1");
    for (double s2 : comp.sigma2)
      require(s2 > 0.0 && std::isfinite(s2), "state: sigma2 must be positive finite");
    const std::vector<int> n_k = comp.node_counts();
    for (int k = 0; k < comp.K; ++k) {
      if (k < comp.K_plus)
        require(n_k[k] >= 1, "state: active node component is empty");
      else
        require(n_k[k] == 0, "state: empty node component holds nodes");
    }
    for (const Vec2& z : comp.Z)
      require(std::isfinite(z.x) && std::isfinite(z.y), "state: non-finite latent position");
  }
}

// ---------------------------------------------------------------------------
// Likelihood.
// ---------------------------------------------------------------------------

/// Reference log-likelihood of one network under latent positions Z and
/// intercept alpha: sum over the dyad set of edge log-pmfs at
/// eta = alpha - ||z_i - z_j||^2.
inline double network_loglik(const Network& y, const std::vector<Vec2>& z, double alpha,
                             EdgeFamily family) {
  require(static_cast<int>(z.size()) == y.n_nodes, "network_loglik: dimension mismatch");
  double total = 0.0;
  for (int i = 0; i < y.n_nodes; ++i) {
    for (int j = y.directed ? 0 : i + 1; j < y.n_nodes; ++j) {
      if (i == j) continue;
      total += edge_logpmf(y.at(i, j), alpha - squared_distance(z[i], z[j]), family);
    }
  }
  return total;
}

/// Per-(m,g) log-likelihood table factored through dyad sufficient
/// statistics, so a sweep re-touches only components whose latent space
/// changed and intercept moves cost O(M*G) (count family) or one pass over
/// the dyad distances per component (binary family):
///   count:  ll(m,g) = alpha*T1_m - Q(m,g) - exp(alpha)*E_g - C_m
///   binary: ll(m,g) = alpha*T1_m - Q(m,g) - R_g(alpha)
/// with Q(m,g) = sum_d y_md * d2_gd, E_g = sum_d exp(-d2_gd),
/// R_g(a) = sum_d log(1 + exp(a - d2_gd)).
class LikelihoodCache {
 public:
  LikelihoodCache() = default;

  LikelihoodCache(const Multiplex& y, double alpha) {
    family_ = y.family();
    pairs_ = dyad_pairs(y.networks.front());
    n_networks_ = y.n_networks();
    ys_.resize(n_networks_);
    t1_.assign(n_networks_, 0.0);
    log_norm_.assign(n_networks_, 0.0);
    for (int m = 0; m < n_networks_; ++m) {
      ys_[m].resize(pairs_.size());
      for (std::size_t d = 0; d < pairs_.size(); ++d) {
        const long w = y.networks[m].at(pairs_[d].first, pairs_[d].second);
        ys_[m][d] = static_cast<double>(w);
        t1_[m] += static_cast<double>(w);
        if (family_ == EdgeFamily::poisson_log)
          log_norm_[m] += std::lgamma(static_cast<double>(w) + 1.0);
      }
    }
    alpha_ = alpha;
  }

  struct ComponentStats {
    std::vector<double> d2;      // squared dyad distances
    double e_sum = 0.0;          // count family
    double r_sum = 0.0;          // binary family, at the cache's alpha
    std::vector<double> q;       // per network
    std::vector<char> q_filled;  // which q entries are valid
  };

  int n_components() const { return static_cast<int>(comp_.size()); }
  double alpha() const { return alpha_; }
  std::size_t n_dyads() const { return pairs_.size(); }

  /// Builds the dyad statistics of a latent configuration. `networks` limits
  /// the Q entries computed (empty means all).
  ComponentStats stats_for(const std::vector<Vec2>& z, std::span<const int> networks) const {
    ComponentStats st;
    st.d2.resize(pairs_.size());
    for (std::size_t d = 0; d < pairs_.size(); ++d)
      st.d2[d] = squared_distance(z[pairs_[d].first], z[pairs_[d].second]);
    if (family_ == EdgeFamily::poisson_log) {
      for (double v : st.d2) st.e_sum += std::exp(-v);
    } else {
      st.r_sum = r_for(st.d2, alpha_);
    }
    st.q.assign(n_networks_, 0.0);
    st.q_filled.assign(n_networks_, 0);
    if (networks.empty()) {
      for (int m = 0; m < n_networks_; ++m) {
        st.q[m] = dot(ys_[m], st.d2);
        st.q_filled[m] = 1;
      }
    } else {
      for (int m : networks) {
        st.q[m] = dot(ys_[m], st.d2);
        st.q_filled[m] = 1;
      }
    }
    return st;
  }

  /// Fills any Q entries stats_for skipped.
  void complete_q(ComponentStats& st) const {
    for (int m = 0; m < n_networks_; ++m)
      if (!st.q_filled[m]) {
        st.q[m] = dot(ys_[m], st.d2);
        st.q_filled[m] = 1;
      }
  }

  /// Replaces component g's statistics (resizing the table as needed).
  /// Q must be complete; pass networks = {} to stats_for before committing.
  void set_component(int g, ComponentStats st) {
    if (g >= n_components()) comp_.resize(g + 1);
    comp_[g] = std::move(st);
  }

  void resize_components(int n_comps) { comp_.resize(n_comps); }

  void permute_components(const std::vector<int>& new_from_old) {
    std::vector<ComponentStats> next(comp_.size());
    for (std::size_t g = 0; g < comp_.size(); ++g) next[new_from_old[g]] = std::move(comp_[g]);
    comp_ = std::move(next);
  }

  void set_alpha(double alpha) {
    alpha_ = alpha;
    if (family_ == EdgeFamily::bernoulli_logit)
      for (ComponentStats& st : comp_) st.r_sum = r_for(st.d2, alpha_);
  }

  /// Binary-family helper for intercept proposals: R_g at another alpha.
  double r_at(int g, double alpha) const { return r_for(comp_[g].d2, alpha); }

  double loglik(int m, int g) const {
    const ComponentStats& st = comp_[g];
    if (family_ == EdgeFamily::poisson_log)
      return alpha_ * t1_[m] - st.q[m] - std::exp(alpha_) * st.e_sum - log_norm_[m];
    return alpha_ * t1_[m] - st.q[m] - st.r_sum;
  }

  /// Likelihood difference for replacing component g's statistics with
  /// `prop`, summed over the given networks.
  double loglik_delta(int g, const ComponentStats& prop, std::span<const int> networks) const {
    const ComponentStats& cur = comp_[g];
    double delta = 0.0;
    for (int m : networks) delta += cur.q[m] - prop.q[m];
    if (family_ == EdgeFamily::poisson_log)
      delta += static_cast<double>(networks.size()) * std::exp(alpha_) * (cur.e_sum - prop.e_sum);
    else
      delta += static_cast<double>(networks.size()) * (cur.r_sum - prop.r_sum);
    return delta;
  }

  double t1(int m) const { return t1_[m]; }
  double e_sum(int g) const { return comp_[g].e_sum; }
  double r_sum(int g) const { return comp_[g].r_sum; }
  EdgeFamily family() const { return family_; }

 private:
  static double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
  }

  double r_for(const std::vector<double>& d2, double alpha) const {
    double s = 0.0;
    for (double v : d2) {
      const double eta = alpha - v;
      s += eta <= 0.0 ? std::log1p(std::exp(eta)) : eta + std::log1p(std::exp(-eta));
    }
    return s;
  }

  EdgeFamily family_ = EdgeFamily::poisson_log;
  std::vector<std::pair<int, int>> pairs_;
  int n_networks_ = 0;
  std::vector<std::vector<double>> ys_;
  std::vector<double> t1_;
  std::vector<double> log_norm_;
  double alpha_ = 0.0;
  std::vector<ComponentStats> comp_;
};

// ---------------------------------------------------------------------------
// Full conditionals and Metropolis-Hastings log-ratios.
// ---------------------------------------------------------------------------

/// log Pr(C^(m) = g | ...) over g = 1..G (empty components included),
/// normalized to a proper log-simplex.
inline std::vector<double> network_alloc_logprobs(const Network& y, const ModelState& state) {
  std::vector<double> logp(state.G);
  for (int g = 0; g < state.G; ++g) {
    const double lt = state.tau[g] > 0.0 ? std::log(state.tau[g]) : kNegInf;
    logp[g] = lt + network_loglik(y, state.comps[g].Z, state.alpha, y.family);
  }
  normalize_log_probs(logp);
  return logp;
}

/// log Pr(S^(i) = k | ...) over the component's K node-level components.
inline std::vector<double> node_alloc_logprobs(const Vec2& z, const LatentComponent& comp) {
  std::vector<double> logp(comp.K);
  for (int k = 0; k < comp.K; ++k) {
    const double lp = comp.pi[k] > 0.0 ? std::log(comp.pi[k]) : kNegInf;
    logp[k] = lp + logpdf_mvn_spherical(z, comp.mu[k], comp.sigma2[k]);
  }
  normalize_log_probs(logp);
  return logp;
}

/// Conjugate posterior of mu_gk given assigned positions; the prior is
/// MVN(mu0, sigma_mu I). Caller handles empty components with prior draws.
inline std::pair<Vec2, Vec2> mu_full_conditional(const std::vector<Vec2>& z,
                                                 const std::vector<int>& s, int k, double sigma2,
                                                 const Hyperparams& h) {
  Vec2 sum{0.0, 0.0};
  int n_k = 0;
  for (std::size_t i = 0; i < z.size(); ++i)
    if (s[i] == k) {
      sum += z[i];
      ++n_k;
    }
  const double precision = static_cast<double>(n_k) / sigma2 + 1.0 / h.sigma_mu;
  const double var = 1.0 / precision;
  Vec2 mean{var * (sum.x / sigma2 + h.mu0.x / h.sigma_mu),
            var * (sum.y / sigma2 + h.mu0.y / h.sigma_mu)};
  return {mean, Vec2{var, var}};
}

/// Conjugate posterior parameters of the component variance:
/// u* = N_gk/2 + u, v* = v + (1/2) sum of full 2-D quadratic forms. One
/// scalar is drawn per component and shared by both coordinates.
inline std::pair<double, double> sigma2_full_conditional(const std::vector<Vec2>& z,
                                                         const std::vector<int>& s, const Vec2& mu,
                                                         int k, const Hyperparams& h) {
  double ss = 0.0;
  int n_k = 0;
  for (std::size_t i = 0; i < z.size(); ++i)
    if (s[i] == k) {
      ss += squared_distance(z[i], mu);
      ++n_k;
    }
  return {h.u_sigma2 + 0.5 * static_cast<double>(n_k), h.v_sigma2 + 0.5 * ss};
}

/// Log prior of a latent configuration under the node-level mixture with
/// fixed allocations (or the standard normal prior in mono mode).
inline double latent_prior_logpdf(const std::vector<Vec2>& z, const LatentComponent& comp,
                                  bool mono) {
  double total = 0.0;
  if (mono) {
    for (const Vec2& zi : z) total += logpdf_mvn_spherical(zi, {0.0, 0.0}, 1.0);
  } else {
    for (std::size_t i = 0; i < z.size(); ++i)
      total += logpdf_mvn_spherical(z[i], comp.mu[comp.S[i]], comp.sigma2[comp.S[i]]);
  }
  return total;
}

/// Block-update log-ratio for Z_g. The proposal (per-node normal centred at
/// the current position with fixed component covariance) is symmetric, so
/// only likelihood and prior terms remain.
inline double mh_logratio_Z(const std::vector<const Network*>& allocated,
                            const std::vector<Vec2>& z_cur, const std::vector<Vec2>& z_prop,
                            const LatentComponent& comp, double alpha, EdgeFamily family,
                            bool mono) {
  double ratio = 0.0;
  for (const Network* y : allocated)
    ratio += network_loglik(*y, z_prop, alpha, family) - network_loglik(*y, z_cur, alpha, family);
  ratio += latent_prior_logpdf(z_prop, comp, mono) - latent_prior_logpdf(z_cur, comp, mono);
  return ratio;
}

/// Intercept log-ratio: total likelihood difference across all networks
/// under their allocated components plus the normal prior ratio.
inline double mh_logratio_alpha(const Multiplex& y, const ModelState& state, double alpha_cur,
                                double alpha_prop, const Hyperparams& h) {
  double ratio = 0.0;
  for (int m = 0; m < y.n_networks(); ++m) {
    const std::vector<Vec2>& z = state.comps[state.C[m]].Z;
    ratio += network_loglik(y.networks[m], z, alpha_prop, y.family()) -
             network_loglik(y.networks[m], z, alpha_cur, y.family());
  }
  ratio += logpdf_normal(alpha_prop, h.m_alpha, h.s_alpha) -
           logpdf_normal(alpha_cur, h.m_alpha, h.s_alpha);
  return ratio;
}

/// Unnormalized log target of a Dirichlet concentration parameter given the
/// occupancy of active components, with the mixing proportions integrated
/// out (same form at network and node level).
inline double concentration_log_target(double x, std::span<const int> counts, int k_total,
                                       int n_items, double l, double r) {
  require(x > 0.0, "concentration_log_target: x must be positive");
  const int k_plus = static_cast<int>(counts.size());
  double t = logpdf_fisher_f(x, l, r) + static_cast<double>(k_plus) * std::log(x) +
             std::lgamma(x) - std::lgamma(static_cast<double>(n_items) + x);
  const double frac = x / static_cast<double>(k_total);
  for (int c : counts)
    t += std::lgamma(static_cast<double>(c) + frac) - std::lgamma(1.0 + frac);
  return t;
}

/// Log-ratio for the log-normal random walk on a concentration parameter,
/// including the Jacobian of the log-scale move.
inline double mh_logratio_concentration(double x_cur, double x_prop, std::span<const int> counts,
                                        int k_total, int n_items, double l, double r) {
  require(x_cur > 0.0 && x_prop > 0.0, "mh_logratio_concentration: values must be positive");
  return concentration_log_target(x_prop, counts, k_total, n_items, l, r) -
         concentration_log_target(x_cur, counts, k_total, n_items, l, r) +
         std::log(x_prop) - std::log(x_cur);
}

/// Telescoping weights for the number of components, normalized over
/// k* = K_plus..k_max. Used for K_g and, with network occupancy, for G.
inline std::vector<double> component_count_logweights(int k_plus, std::span<const int> counts,
                                                      double conc, int k_max,
                                                      const BnbParams& bnb) {
  require(k_plus >= 1, "component_count_logweights: K_plus must be at least 1");
  require(k_plus <= k_max, "component_count_logweights: K_plus exceeds k_max");
  require(static_cast<int>(counts.size()) == k_plus,
          "component_count_logweights: counts must cover active components");
  std::vector<double> logw(k_max - k_plus + 1);
  for (int k = k_plus; k <= k_max; ++k) {
    const double kd = static_cast<double>(k);
    double lw = logpmf_translated_bnb(k, bnb) + static_cast<double>(k_plus) * std::log(conc) +
                std::lgamma(kd + 1.0) - std::lgamma(kd - k_plus + 1.0) -
                static_cast<double>(k_plus) * std::log(kd);
    const double frac = conc / kd;
    for (int c : counts)
      lw += std::lgamma(static_cast<double>(c) + frac) - std::lgamma(1.0 + frac);
    logw[k - k_plus] = lw;
  }
  normalize_log_probs(logw);
  return logw;
}

namespace detail {
inline double safe_log(double x) { return std::log(std::max(x, 1e-300)); }

inline double log_dirichlet_density(std::span<const double> values, double conc_each) {
  const int k = static_cast<int>(values.size());
  double t = std::lgamma(conc_each * k) - k * std::lgamma(conc_each);
  for (double v : values) t += (conc_each - 1.0) * safe_log(v);
  return t;
}
}  // namespace detail

/// Joint log-posterior up to the data normalization constant. Used for
/// trace diagnostics and cross-chain selection.
inline double log_posterior(const ModelState& state, const Multiplex& y, const Hyperparams& h,
                            bool mono = false) {
  double lp = 0.0;
  for (int m = 0; m < y.n_networks(); ++m) {
    lp += network_loglik(y.networks[m], state.comps[state.C[m]].Z, state.alpha, y.family());
    lp += detail::safe_log(state.tau[state.C[m]]);
  }
  lp += detail::log_dirichlet_density(state.tau, state.e / state.G);
  lp += logpmf_translated_bnb(state.G, h.bnb_G);
  lp += logpdf_fisher_f(state.e, h.l_G, h.r_G);
  lp += logpdf_normal(state.alpha, h.m_alpha, h.s_alpha);
  for (const LatentComponent& comp : state.comps) {
    lp += latent_prior_logpdf(comp.Z, comp, mono);
    if (mono) continue;
    for (int i = 0; i < static_cast<int>(comp.S.size()); ++i)
      lp += detail::safe_log(comp.pi[comp.S[i]]);
    lp += detail::log_dirichlet_density(comp.pi, comp.w / comp.K);
    lp += logpmf_translated_bnb(comp.K, h.bnb_K);
    lp += logpdf_fisher_f(comp.w, h.l_K, h.r_K);
    for (int k = 0; k < comp.K; ++k) {
      lp += logpdf_mvn_diag(comp.mu[k], h.mu0, {h.sigma_mu, h.sigma_mu});
      lp += logpdf_invgamma(comp.sigma2[k], h.u_sigma2, h.v_sigma2);
    }
  }
  return lp;
}

// ---------------------------------------------------------------------------
// Prior diagnostics.
// ---------------------------------------------------------------------------

/// Monte Carlo distribution of the number of active components induced by
/// the generative prior: K ~ translated BNB (optionally truncated), the
/// concentration from F(l, r), weights from the symmetric Dirichlet, and
/// n_items multinomial allocations. Returns probabilities indexed by K_plus.
inline std::vector<double> simulate_prior_active_components(int n_items, const BnbParams& bnb,
                                                            double l, double r, int n_draws,
                                                            Rng& rng, int truncate_at = 0) {
  std::vector<double> hist(static_cast<std::size_t>(n_items) + 1, 0.0);
  std::vector<int> seen;
  for (int draw = 0; draw < n_draws; ++draw) {
    const long k = sample_translated_bnb(bnb, rng, truncate_at);
    const double e = rng.fisher_f(l, r);
    const std::vector<double> conc(static_cast<std::size_t>(k), e / static_cast<double>(k));
    const std::vector<double> weights = sample_dirichlet(conc, rng);
    seen.assign(static_cast<std::size_t>(k), 0);
    int k_plus = 0;
    for (int item = 0; item < n_items; ++item) {
      const int c = rng.categorical(weights);
      if (!seen[c]) {
        seen[c] = 1;
        ++k_plus;
      }
    }
    hist[std::min<std::size_t>(k_plus, hist.size() - 1)] += 1.0;
  }
  for (double& hcount : hist) hcount /= static_cast<double>(n_draws);
  return hist;
}

}  // namespace lapcom
