#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <map>
#include <numeric>
#include <string>
#include <thread>
#include <vector>

#include <filesystem>
#include <fstream>

#include "lapcom/clustering.hpp"
#include "lapcom/common.hpp"
#include "lapcom/graph_distance.hpp"
#include "lapcom/model.hpp"
#include "lapcom/model_io.hpp"
#include "lapcom/multiplex.hpp"
#include "lapcom/rng.hpp"

namespace lapcom {

enum class Variant { lapcom, mono_lapcm };
enum class InitMethod { kmeans, gmm };

inline std::string variant_name(Variant v) {
  return v == Variant::lapcom ? "lapcom" : "mono-lapcm";
}
inline Variant variant_from_name(const std::string& s) {
  if (s == "lapcom") return Variant::lapcom;
  if (s == "mono-lapcm") return Variant::mono_lapcm;
  throw std::invalid_argument("unknown variant: " + s);
}
inline std::string init_method_name(InitMethod m) {
  return m == InitMethod::kmeans ? "kmeans" : "gmm";
}
inline InitMethod init_method_from_name(const std::string& s) {
  if (s == "kmeans") return InitMethod::kmeans;
  if (s == "gmm") return InitMethod::gmm;
  throw std::invalid_argument("unknown init method: " + s);
}

/// Run-length convention: the chain executes burn_in + n_iter sweeps and
/// keeps every thin-th post-burn-in state, so n_iter/thin samples are stored.
struct SamplerConfig {
  long n_iter = 30000;
  long burn_in = 9000;
  long thin = 30;
  std::uint64_t seed = 1;
  Variant variant = Variant::lapcom;
  InitMethod init_method = InitMethod::kmeans;
  Hyperparams hyper;
  bool adapt = true;             // burn-in-only Robbins-Monro proposal tuning
  bool data_free = false;        // constant likelihood; prior-reproduction checks
  bool validate_each_sweep = false;
  long checkpoint_every = 0;     // sweeps between checkpoints; 0 disables
  std::string checkpoint_path;   // file used when checkpoint_every > 0

  long n_samples() const { return n_iter / thin; }

  void validate() const {
    require(n_iter >= 1 && burn_in >= 0 && thin >= 1, "config: bad iteration counts");
    require(n_iter % thin == 0, "config: n_iter must be a multiple of thin");
    hyper.validate();
  }
};

inline void to_json(nlohmann::json& j, const SamplerConfig& c) {
  j = nlohmann::json{{"n_iter", c.n_iter},
                     {"burn_in", c.burn_in},
                     {"thin", c.thin},
                     {"seed", c.seed},
                     {"variant", variant_name(c.variant)},
                     {"init_method", init_method_name(c.init_method)},
                     {"hyper", c.hyper},
                     {"adapt", c.adapt},
                     {"data_free", c.data_free},
                     {"checkpoint_every", c.checkpoint_every}};
}
inline void from_json(const nlohmann::json& j, SamplerConfig& c) {
  j.at("n_iter").get_to(c.n_iter);
  j.at("burn_in").get_to(c.burn_in);
  j.at("thin").get_to(c.thin);
  j.at("seed").get_to(c.seed);
  c.variant = variant_from_name(j.at("variant").get<std::string>());
  c.init_method = init_method_from_name(j.at("init_method").get<std::string>());
  j.at("hyper").get_to(c.hyper);
  if (j.contains("adapt")) j.at("adapt").get_to(c.adapt);
  if (j.contains("data_free")) j.at("data_free").get_to(c.data_free);
  if (j.contains("checkpoint_every")) j.at("checkpoint_every").get_to(c.checkpoint_every);
}

struct Trace {
  std::vector<ModelState> samples;
  std::vector<double> log_posterior;
  std::map<std::string, double> acceptance_rates;
  SamplerConfig config;
};

namespace detail {

/// Reassigns items so every label in 0..k-1 is used; missing labels steal
/// the lowest-index member of the currently largest cluster.
inline void ensure_full_partition(std::vector<int>& labels, int k) {
  for (int missing = 0; missing < k; ++missing) {
    std::vector<int> counts(k, 0);
    for (int l : labels) ++counts[l];
    if (counts[missing] > 0) continue;
    const int donor =
        static_cast<int>(std::max_element(counts.begin(), counts.end()) - counts.begin());
    for (int i = 0; i < static_cast<int>(labels.size()); ++i)
      if (labels[i] == donor) {
        labels[i] = missing;
        break;
      }
  }
}

}  // namespace detail

/// Deterministic initialization: network allocations from clustering an MDS
/// embedding of pairwise structural distances, latent spaces from MDS of
/// within-cluster averaged geodesics, the intercept from the mean-degree
/// formula, and node-level structure from k-means plus prior draws.
inline ModelState init_chain(const Multiplex& y, const SamplerConfig& cfg, Rng& rng) {
  cfg.validate();
  y.validate();
  const Hyperparams& h = cfg.hyper;
  const int n_networks = y.n_networks();
  const int n_nodes = y.n_nodes();
  const bool mono = cfg.variant == Variant::mono_lapcm;
  const int g0 = std::min(h.G0, n_networks);

  ModelState state;
  state.G = g0;
  state.G_plus = g0;
  state.tau.assign(g0, 1.0 / g0);
  state.e = 1e-5;

  if (g0 == 1) {
    state.C.assign(n_networks, 0);
  } else {
    const Matrix dist = pairwise_schieber_matrix(y);
    const std::vector<Vec2> embed = classical_mds_2d(dist);
    if (cfg.init_method == InitMethod::kmeans) {
      std::vector<std::vector<double>> pts(n_networks);
      for (int m = 0; m < n_networks; ++m) pts[m] = {embed[m].x, embed[m].y};
      state.C = kmeans(pts, g0, rng).labels;
    } else {
      state.C = gmm_cluster_2d(embed, g0, rng);
    }
    detail::ensure_full_partition(state.C, g0);
  }

  std::vector<Matrix> geodesics(n_networks);
  for (int m = 0; m < n_networks; ++m) geodesics[m] = geodesic_distance_matrix(y.networks[m]);

  state.comps.resize(g0);
  for (int g = 0; g < g0; ++g) {
    Matrix avg(n_nodes, n_nodes, 0.0);
    int count = 0;
    for (int m = 0; m < n_networks; ++m) {
      if (state.C[m] != g) continue;
      ++count;
      for (std::size_t i = 0; i < avg.data().size(); ++i) avg.data()[i] += geodesics[m].data()[i];
    }
    for (double& v : avg.data()) v /= static_cast<double>(std::max(count, 1));
    state.comps[g].Z = classical_mds_2d(avg);
  }

  // Intercept: moment-style estimate per (network, cluster) from the mean
  // dyad value and the mean squared distance of the initial embedding,
  // averaged over networks and clusters. All-zero layers floor the mean at
  // 1/N^2 so the log stays finite.
  const auto dyads = dyad_pairs(y.networks.front());
  double alpha_sum = 0.0;
  for (int g = 0; g < g0; ++g) {
    double pair_term = 0.0;
    for (const auto& [i, j] : dyads)
      pair_term += squared_distance(state.comps[g].Z[i], state.comps[g].Z[j]);
    pair_term /= static_cast<double>(dyads.size());
    for (int m = 0; m < n_networks; ++m) {
      double total = 0.0;
      for (const auto& [i, j] : dyads) total += static_cast<double>(y.networks[m].at(i, j));
      const double mean_value =
          std::max(total / static_cast<double>(dyads.size()),
                   1.0 / (static_cast<double>(n_nodes) * n_nodes));
      alpha_sum += std::log(mean_value) + pair_term;
    }
  }
  state.alpha = alpha_sum / (static_cast<double>(g0) * n_networks);

  for (int g = 0; g < g0; ++g) {
    LatentComponent& comp = state.comps[g];
    if (mono) {
      comp.K = 1;
      comp.K_plus = 1;
      comp.w = 1.0;
      comp.pi = {1.0};
      comp.S.assign(n_nodes, 0);
      comp.mu = {Vec2{0.0, 0.0}};
      comp.sigma2 = {1.0};
      continue;
    }
    const int k0 = std::min({h.K0, h.K_max, n_nodes});
    comp.K = k0;
    comp.K_plus = k0;
    comp.w = rng.fisher_f(h.l_K, h.r_K);
    comp.pi.assign(k0, 1.0 / k0);
    std::vector<std::vector<double>> pts(n_nodes);
    for (int i = 0; i < n_nodes; ++i) pts[i] = {comp.Z[i].x, comp.Z[i].y};
    KmeansResult km = kmeans(pts, k0, rng);
    detail::ensure_full_partition(km.labels, k0);
    comp.S = km.labels;
    comp.mu.resize(k0);
    comp.sigma2.resize(k0);
    for (int k = 0; k < k0; ++k) {
      comp.mu[k] = {km.centers[k][0], km.centers[k][1]};
      comp.sigma2[k] = sample_invgamma(h.u_sigma2, h.v_sigma2, rng);
    }
  }
  return state;
}

/// One MCMC chain: owns the state, the per-(m,g) likelihood cache, proposal
/// scales, and acceptance bookkeeping. Sweeps follow the fixed update order:
/// network allocations, relabel, per-active-component node-level blocks,
/// intercept, telescoping G, concentration e, empty-component refresh, tau.
class Sampler {
 public:
  Sampler(const Multiplex& y, const SamplerConfig& cfg)
      : y_(&y),
        cfg_(cfg),
        mono_(cfg.variant == Variant::mono_lapcm),
        delta_z_(cfg.hyper.delta_Z),
        delta_alpha_(cfg.hyper.delta_alpha),
        s_e_(cfg.hyper.s_e),
        s_w_(cfg.hyper.s_w) {
    cfg.validate();
  }

  void set_state(ModelState state) {
    state_ = std::move(state);
    if (!cfg_.data_free) rebuild_cache();
  }

  const ModelState& state() const { return state_; }
  ModelState& mutable_state() { return state_; }

  double delta_z() const { return delta_z_; }
  double delta_alpha() const { return delta_alpha_; }
  double s_e() const { return s_e_; }
  double s_w() const { return s_w_; }
  void set_scales(double dz, double da, double se, double sw) {
    delta_z_ = dz;
    delta_alpha_ = da;
    s_e_ = se;
    s_w_ = sw;
  }

  double cached_total_loglik() const {
    if (cfg_.data_free) return 0.0;
    double total = 0.0;
    for (int m = 0; m < y_->n_networks(); ++m) total += cache_.loglik(m, state_.C[m]);
    return total;
  }

  /// Executes one full sweep. Proposals producing non-finite log-targets
  /// are rejected outright.
  void sweep(Rng& rng) {
    const Hyperparams& h = cfg_.hyper;
    const int n_networks = y_->n_networks();
    const int n_nodes = y_->n_nodes();

    // 1. Network allocations. The actives-first ordering is restored by
    // the relabel in step 2, so no invariant check in between.
    std::vector<double> logp(state_.G);
    for (int m = 0; m < n_networks; ++m) {
      for (int g = 0; g < state_.G; ++g) {
        const double lt = state_.tau[g] > 0.0 ? std::log(state_.tau[g]) : kNegInf;
        logp[g] = lt + (cfg_.data_free ? 0.0 : cache_.loglik(m, g));
      }
      state_.C[m] = rng.categorical_from_log(logp);
    }

    // 2. Counts, G_plus, actives-first relabel.
    std::vector<int> m_g = state_.network_counts();
    relabel_networks_active_first(m_g);
    check_step();

    // 3. Per active component.
    for (int g = 0; g < state_.G_plus; ++g) {
      LatentComponent& comp = state_.comps[g];
      std::vector<int> allocated;
      for (int m = 0; m < n_networks; ++m)
        if (state_.C[m] == g) allocated.push_back(m);

      update_latent_positions(g, allocated, rng);
      check_step();
      if (mono_) continue;

      // 3b. Node allocations.
      std::vector<double> logk(comp.K);
      for (int i = 0; i < n_nodes; ++i) {
        for (int k = 0; k < comp.K; ++k) {
          const double lpk = comp.pi[k] > 0.0 ? std::log(comp.pi[k]) : kNegInf;
          logk[k] = lpk + logpdf_mvn_spherical(comp.Z[i], comp.mu[k], comp.sigma2[k]);
        }
        comp.S[i] = rng.categorical_from_log(logk);
      }

      // 3c. Counts, K_plus, actives-first relabel.
      std::vector<int> n_k = comp.node_counts();
      relabel_nodes_active_first(comp, n_k);
      check_step();

      // 3d. Conjugate mean and variance updates for active components.
      for (int k = 0; k < comp.K_plus; ++k) {
        const auto [mean, var] = mu_full_conditional(comp.Z, comp.S, k, comp.sigma2[k], h);
        comp.mu[k] = rng.normal2(mean, std::sqrt(var.x), std::sqrt(var.y));
        const auto [u_star, v_star] = sigma2_full_conditional(comp.Z, comp.S, comp.mu[k], k, h);
        comp.sigma2[k] = sample_invgamma(u_star, v_star, rng);
      }

      // 3e. Telescoping draw of K_g.
      const std::span<const int> active_counts(n_k.data(), comp.K_plus);
      const std::vector<double> logw =
          component_count_logweights(comp.K_plus, active_counts, comp.w, h.K_max, h.bnb_K);
      const int k_new = comp.K_plus + rng.categorical_from_log(logw);

      // 3f. Concentration w_g via log-normal walk.
      {
        const double prop = comp.w * std::exp(s_w_ * rng.normal());
        const double ratio =
            mh_logratio_concentration(comp.w, prop, active_counts, k_new, n_nodes, h.l_K, h.r_K);
        ++w_proposed_;
        if (std::isfinite(ratio) && std::log(rng.uniform()) < ratio) {
          comp.w = prop;
          ++w_accepted_;
        }
      }

      // 3g. Fresh empty node components from the priors.
      comp.K = k_new;
      comp.mu.resize(k_new);
      comp.sigma2.resize(k_new);
      for (int k = comp.K_plus; k < k_new; ++k) {
        comp.mu[k] = rng.normal2(h.mu0, std::sqrt(h.sigma_mu), std::sqrt(h.sigma_mu));
        comp.sigma2[k] = sample_invgamma(h.u_sigma2, h.v_sigma2, rng);
      }

      // 3h. Node-level mixing proportions.
      n_k.resize(k_new, 0);
      std::vector<double> psi(k_new);
      for (int k = 0; k < k_new; ++k)
        psi[k] = comp.w / k_new + static_cast<double>(n_k[k]);
      comp.pi = sample_dirichlet(psi, rng);
      check_step();
    }

    // 4. Intercept.
    update_alpha(rng);
    check_step();

    // 5. Telescoping draw of G.
    m_g = state_.network_counts();
    const std::span<const int> active_m(m_g.data(), state_.G_plus);
    const std::vector<double> logw_g =
        component_count_logweights(state_.G_plus, active_m, state_.e, h.G_max, h.bnb_G);
    const int g_new = state_.G_plus + rng.categorical_from_log(logw_g);

    // 6. Concentration e via log-normal walk.
    {
      const double prop = state_.e * std::exp(s_e_ * rng.normal());
      const double ratio =
          mh_logratio_concentration(state_.e, prop, active_m, g_new, n_networks, h.l_G, h.r_G);
      ++e_proposed_;
      if (std::isfinite(ratio) && std::log(rng.uniform()) < ratio) {
        state_.e = prop;
        ++e_accepted_;
      }
    }

    // 7. Fresh empty network components, single node-level component each.
    state_.comps.resize(state_.G_plus);
    if (!cfg_.data_free) cache_.resize_components(state_.G_plus);
    for (int g = state_.G_plus; g < g_new; ++g) {
      LatentComponent comp;
      comp.K = 1;
      comp.K_plus = 1;
      comp.S.assign(n_nodes, 0);
      comp.pi = {1.0};
      if (mono_) {
        comp.w = 1.0;
        comp.mu = {Vec2{0.0, 0.0}};
        comp.sigma2 = {1.0};
      } else {
        comp.w = rng.fisher_f(h.l_K, h.r_K);
        comp.mu = {rng.normal2(h.mu0, std::sqrt(h.sigma_mu), std::sqrt(h.sigma_mu))};
        comp.sigma2 = {sample_invgamma(h.u_sigma2, h.v_sigma2, rng)};
      }
      comp.Z.resize(n_nodes);
      for (int i = 0; i < n_nodes; ++i)
        comp.Z[i] = sample_mvn_spherical(comp.mu[0], comp.sigma2[0], rng);
      state_.comps.push_back(std::move(comp));
      if (!cfg_.data_free)
        cache_.set_component(g, cache_.stats_for(state_.comps[g].Z, {}));
    }
    state_.G = g_new;

    // 8. Network-level mixing proportions.
    m_g.resize(g_new, 0);
    std::vector<double> zeta(g_new);
    for (int g = 0; g < g_new; ++g)
      zeta[g] = state_.e / g_new + static_cast<double>(m_g[g]);
    state_.tau = sample_dirichlet(zeta, rng);
    check_step();

    ++sweeps_done_;
    if (cfg_.adapt && sweeps_done_ <= cfg_.burn_in) adapt_scales();
  }

  std::map<std::string, double> acceptance_rates() const {
    auto rate = [](long acc, long prop) {
      return prop > 0 ? static_cast<double>(acc) / static_cast<double>(prop) : 0.0;
    };
    return {{"Z", rate(z_accepted_, z_proposed_)},
            {"alpha", rate(alpha_accepted_, alpha_proposed_)},
            {"e", rate(e_accepted_, e_proposed_)},
            {"w", rate(w_accepted_, w_proposed_)}};
  }

  void reset_acceptance_counters() {
    z_proposed_ = z_accepted_ = alpha_proposed_ = alpha_accepted_ = 0;
    e_proposed_ = e_accepted_ = w_proposed_ = w_accepted_ = 0;
    z_prop_mark_ = z_acc_mark_ = alpha_prop_mark_ = alpha_acc_mark_ = 0;
    e_prop_mark_ = e_acc_mark_ = w_prop_mark_ = w_acc_mark_ = 0;
  }

  long sweeps_done() const { return sweeps_done_; }
  void set_sweeps_done(long n) { sweeps_done_ = n; }

  struct Counters {
    long z_prop = 0, z_acc = 0, alpha_prop = 0, alpha_acc = 0;
    long e_prop = 0, e_acc = 0, w_prop = 0, w_acc = 0;
  };
  Counters counters() const {
    return {z_proposed_, z_accepted_, alpha_proposed_, alpha_accepted_,
            e_proposed_, e_accepted_, w_proposed_,     w_accepted_};
  }
  void set_counters(const Counters& c) {
    z_proposed_ = z_prop_mark_ = c.z_prop;
    z_accepted_ = z_acc_mark_ = c.z_acc;
    alpha_proposed_ = alpha_prop_mark_ = c.alpha_prop;
    alpha_accepted_ = alpha_acc_mark_ = c.alpha_acc;
    e_proposed_ = e_prop_mark_ = c.e_prop;
    e_accepted_ = e_acc_mark_ = c.e_acc;
    w_proposed_ = w_prop_mark_ = c.w_prop;
    w_accepted_ = w_acc_mark_ = c.w_acc;
  }

 private:
  void rebuild_cache() {
    cache_ = LikelihoodCache(*y_, state_.alpha);
    for (int g = 0; g < state_.G; ++g)
      cache_.set_component(g, cache_.stats_for(state_.comps[g].Z, {}));
  }

  void check_step() const {
    if (!cfg_.validate_each_sweep) return;
    validate_state(state_, y_->n_networks(), y_->n_nodes(), cfg_.hyper);
  }

  void relabel_networks_active_first(std::vector<int>& m_g) {
    const int g_total = state_.G;
    std::vector<int> new_from_old(g_total);
    int next = 0;
    for (int g = 0; g < g_total; ++g)
      if (m_g[g] > 0) new_from_old[g] = next++;
    state_.G_plus = next;
    for (int g = 0; g < g_total; ++g)
      if (m_g[g] == 0) new_from_old[g] = next++;

    std::vector<LatentComponent> comps(g_total);
    std::vector<double> tau(g_total);
    std::vector<int> counts(g_total);
    for (int g = 0; g < g_total; ++g) {
      comps[new_from_old[g]] = std::move(state_.comps[g]);
      tau[new_from_old[g]] = state_.tau[g];
      counts[new_from_old[g]] = m_g[g];
    }
    state_.comps = std::move(comps);
    state_.tau = std::move(tau);
    m_g = std::move(counts);
    for (int& c : state_.C) c = new_from_old[c];
    if (!cfg_.data_free) cache_.permute_components(new_from_old);
  }

  static void relabel_nodes_active_first(LatentComponent& comp, std::vector<int>& n_k) {
    const int k_total = comp.K;
    std::vector<int> new_from_old(k_total);
    int next = 0;
    for (int k = 0; k < k_total; ++k)
      if (n_k[k] > 0) new_from_old[k] = next++;
    comp.K_plus = next;
    for (int k = 0; k < k_total; ++k)
      if (n_k[k] == 0) new_from_old[k] = next++;

    std::vector<Vec2> mu(k_total);
    std::vector<double> sigma2(k_total), pi(k_total);
    std::vector<int> counts(k_total);
    for (int k = 0; k < k_total; ++k) {
      mu[new_from_old[k]] = comp.mu[k];
      sigma2[new_from_old[k]] = comp.sigma2[k];
      pi[new_from_old[k]] = comp.pi[k];
      counts[new_from_old[k]] = n_k[k];
    }
    comp.mu = std::move(mu);
    comp.sigma2 = std::move(sigma2);
    comp.pi = std::move(pi);
    n_k = std::move(counts);
    for (int& s : comp.S) s = new_from_old[s];
  }

  /// 3a. Block Metropolis update of Z_g with per-node proposal covariance
  /// delta_Z^2 times the node's current component covariance.
  void update_latent_positions(int g, const std::vector<int>& allocated, Rng& rng) {
    LatentComponent& comp = state_.comps[g];
    const int n_nodes = static_cast<int>(comp.Z.size());
    std::vector<Vec2> proposal(n_nodes);
    for (int i = 0; i < n_nodes; ++i) {
      const double sd =
          delta_z_ * std::sqrt(mono_ ? 1.0 : comp.sigma2[comp.S[i]]);
      proposal[i] = rng.normal2(comp.Z[i], sd, sd);
    }
    double ratio =
        latent_prior_logpdf(proposal, comp, mono_) - latent_prior_logpdf(comp.Z, comp, mono_);
    LikelihoodCache::ComponentStats prop_stats;
    if (!cfg_.data_free) {
      prop_stats = cache_.stats_for(proposal, allocated);
      if (!allocated.empty()) ratio += cache_.loglik_delta(g, prop_stats, allocated);
    }
    ++z_proposed_;
    if (std::isfinite(ratio) && std::log(rng.uniform()) < ratio) {
      comp.Z = std::move(proposal);
      if (!cfg_.data_free) {
        cache_.complete_q(prop_stats);
        cache_.set_component(g, std::move(prop_stats));
      }
      ++z_accepted_;
    }
  }

  /// 4. Intercept update; likelihood deltas come from the cached dyad
  /// statistics, so no per-dyad work is needed for the count family.
  void update_alpha(Rng& rng) {
    const Hyperparams& h = cfg_.hyper;
    const double cur = state_.alpha;
    const double prop = cur + delta_alpha_ * h.s_alpha * rng.normal();
    double ratio = logpdf_normal(prop, h.m_alpha, h.s_alpha) -
                   logpdf_normal(cur, h.m_alpha, h.s_alpha);
    if (!cfg_.data_free) {
      if (cache_.family() == EdgeFamily::poisson_log) {
        const double de = std::exp(prop) - std::exp(cur);
        for (int m = 0; m < y_->n_networks(); ++m)
          ratio += (prop - cur) * cache_.t1(m) - de * cache_.e_sum(state_.C[m]);
      } else {
        std::vector<int> m_g = state_.network_counts();
        for (int m = 0; m < y_->n_networks(); ++m) ratio += (prop - cur) * cache_.t1(m);
        for (int g = 0; g < state_.G; ++g) {
          if (m_g[g] == 0) continue;
          ratio -= m_g[g] * (cache_.r_at(g, prop) - cache_.r_sum(g));
        }
      }
    }
    ++alpha_proposed_;
    if (std::isfinite(ratio) && std::log(rng.uniform()) < ratio) {
      state_.alpha = prop;
      if (!cfg_.data_free) cache_.set_alpha(prop);
      ++alpha_accepted_;
    }
  }

  /// Robbins-Monro step on the log proposal scales, targeting 25% for the
  /// block update and 44% for the scalar walks. Burn-in only.
  void adapt_scales() {
    const double t = static_cast<double>(sweeps_done_);
    const double gain = 1.0 / std::pow(t, 0.6);
    auto nudge = [&](double& scale, long acc, long prop, long& prev_acc, long& prev_prop,
                     double target) {
      const long dp = prop - prev_prop;
      if (dp <= 0) return;
      const double rate = static_cast<double>(acc - prev_acc) / static_cast<double>(dp);
      scale = std::clamp(scale * std::exp(gain * (rate - target)), 1e-4, 1e4);
      prev_acc = acc;
      prev_prop = prop;
    };
    nudge(delta_z_, z_accepted_, z_proposed_, z_acc_mark_, z_prop_mark_, 0.25);
    nudge(delta_alpha_, alpha_accepted_, alpha_proposed_, alpha_acc_mark_, alpha_prop_mark_, 0.44);
    nudge(s_e_, e_accepted_, e_proposed_, e_acc_mark_, e_prop_mark_, 0.44);
    nudge(s_w_, w_accepted_, w_proposed_, w_acc_mark_, w_prop_mark_, 0.44);
  }

  const Multiplex* y_;
  SamplerConfig cfg_;
  bool mono_;
  ModelState state_;
  LikelihoodCache cache_;

  double delta_z_, delta_alpha_, s_e_, s_w_;
  long sweeps_done_ = 0;
  long z_proposed_ = 0, z_accepted_ = 0;
  long alpha_proposed_ = 0, alpha_accepted_ = 0;
  long e_proposed_ = 0, e_accepted_ = 0;
  long w_proposed_ = 0, w_accepted_ = 0;
  long z_prop_mark_ = 0, z_acc_mark_ = 0;
  long alpha_prop_mark_ = 0, alpha_acc_mark_ = 0;
  long e_prop_mark_ = 0, e_acc_mark_ = 0;
  long w_prop_mark_ = 0, w_acc_mark_ = 0;
};

/// Single-sweep convenience wrapper around the stateful sampler.
inline ModelState sweep(ModelState state, const Multiplex& y, const SamplerConfig& cfg, Rng& rng) {
  Sampler sampler(y, cfg);
  sampler.set_state(std::move(state));
  sampler.sweep(rng);
  return sampler.state();
}

/// Adds zero-mean Gaussian noise to the initial latent spaces (scale 0.1
/// times the coordinate-wise spread) and to the intercept. Used for
/// replicate chains.
inline void perturb_initial_state(ModelState& state, Rng& rng) {
  for (LatentComponent& comp : state.comps) {
    const int n = static_cast<int>(comp.Z.size());
    Vec2 mean{0.0, 0.0}, var{0.0, 0.0};
    for (const Vec2& z : comp.Z) mean += z;
    mean = mean * (1.0 / n);
    for (const Vec2& z : comp.Z) {
      var.x += (z.x - mean.x) * (z.x - mean.x) / n;
      var.y += (z.y - mean.y) * (z.y - mean.y) / n;
    }
    const double sx = 0.1 * std::sqrt(var.x), sy = 0.1 * std::sqrt(var.y);
    for (Vec2& z : comp.Z) z = rng.normal2(z, sx, sy);
  }
  state.alpha += 0.1 * rng.normal();
}

namespace detail {

inline void save_checkpoint(const SamplerConfig& cfg, const Sampler& sampler, const Rng& rng,
                            long t, const Trace& trace) {
  nlohmann::json ck;
  ck["config"] = cfg;
  ck["sweeps_done"] = t;
  ck["rng"] = rng.serialize();
  ck["scales"] = {sampler.delta_z(), sampler.delta_alpha(), sampler.s_e(), sampler.s_w()};
  const Sampler::Counters c = sampler.counters();
  ck["counters"] = {c.z_prop, c.z_acc, c.alpha_prop, c.alpha_acc,
                    c.e_prop, c.e_acc, c.w_prop,     c.w_acc};
  ck["state"] = sampler.state();
  ck["samples"] = trace.samples;
  ck["logpost"] = trace.log_posterior;
  const std::filesystem::path path(cfg.checkpoint_path);
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp);
    out << ck.dump();
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace detail

/// Runs one chain to completion: deterministic given (data, config), and a
/// resumed run replays identically to an uninterrupted one. Checkpoints are
/// written every cfg.checkpoint_every sweeps when a path is configured.
inline Trace run_chain(const Multiplex& y, const SamplerConfig& cfg, bool perturb_init = false) {
  cfg.validate();
  Rng rng(cfg.seed);
  Sampler sampler(y, cfg);
  Trace trace;
  trace.config = cfg;
  long start_t = 0;

  const bool checkpointing = cfg.checkpoint_every > 0 && !cfg.checkpoint_path.empty();
  if (checkpointing && std::filesystem::exists(cfg.checkpoint_path)) {
    std::ifstream in(cfg.checkpoint_path);
    nlohmann::json ck = nlohmann::json::parse(in);
    nlohmann::json current;
    to_json(current, cfg);
    if (ck.at("config") != current)
      throw std::runtime_error("checkpoint was written by a different configuration: " +
                               cfg.checkpoint_path);
    start_t = ck.at("sweeps_done").get<long>();
    rng.deserialize(ck.at("rng").get<std::string>());
    sampler.set_state(ck.at("state").get<ModelState>());
    const auto scales = ck.at("scales").get<std::vector<double>>();
    sampler.set_scales(scales[0], scales[1], scales[2], scales[3]);
    const auto raw = ck.at("counters").get<std::vector<long>>();
    sampler.set_counters({raw[0], raw[1], raw[2], raw[3], raw[4], raw[5], raw[6], raw[7]});
    sampler.set_sweeps_done(start_t);
    trace.samples = ck.at("samples").get<std::vector<ModelState>>();
    trace.log_posterior = ck.at("logpost").get<std::vector<double>>();
  } else {
    ModelState init = init_chain(y, cfg, rng);
    if (perturb_init) perturb_initial_state(init, rng);
    sampler.set_state(std::move(init));
  }

  trace.samples.reserve(cfg.n_samples());
  trace.log_posterior.reserve(cfg.n_samples());

  const long total = cfg.burn_in + cfg.n_iter;
  for (long t = start_t + 1; t <= total; ++t) {
    sampler.sweep(rng);
    if (t == cfg.burn_in) sampler.reset_acceptance_counters();
    if (t > cfg.burn_in && (t - cfg.burn_in) % cfg.thin == 0) {
      trace.samples.push_back(sampler.state());
      trace.log_posterior.push_back(
          log_posterior(sampler.state(), y, cfg.hyper, cfg.variant == Variant::mono_lapcm));
    }
    if (checkpointing && t % cfg.checkpoint_every == 0 && t < total)
      detail::save_checkpoint(cfg, sampler, rng, t, trace);
  }
  trace.acceptance_rates = sampler.acceptance_rates();
  if (checkpointing && std::filesystem::exists(cfg.checkpoint_path))
    std::filesystem::remove(cfg.checkpoint_path);
  return trace;
}

inline int thread_cap_from_env() {
  if (const char* env = std::getenv("LAPCOM_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Independent chains with derived seeds seed+i. Chain 0 keeps the
/// deterministic initialization; later chains perturb it when requested.
inline std::vector<Trace> run_multichain(const Multiplex& y, const SamplerConfig& cfg,
                                         int n_chains, bool perturb, int jobs = 0) {
  require(n_chains >= 1, "run_multichain: need at least one chain");
  const int workers = std::max(1, std::min({n_chains, jobs > 0 ? jobs : thread_cap_from_env(),
                                            thread_cap_from_env()}));
  std::vector<Trace> traces(n_chains);
  std::vector<std::thread> pool;
  std::atomic<int> next{0};
  auto work = [&]() {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= n_chains) return;
      SamplerConfig chain_cfg = cfg;
      chain_cfg.seed = cfg.seed + static_cast<std::uint64_t>(i);
      traces[i] = run_chain(y, chain_cfg, perturb && i > 0);
    }
  };
  if (workers == 1) {
    work();
  } else {
    pool.reserve(workers);
    for (int wk = 0; wk < workers; ++wk) pool.emplace_back(work);
    for (std::thread& th : pool) th.join();
  }
  return traces;
}

}  // namespace lapcom
