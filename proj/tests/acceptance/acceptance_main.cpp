// Acceptance suite: end-to-end recovery, prior-validity, oracle and
// magnitude checks, one pass/fail line per criterion. Protocols and
// tolerances are pinned here; seeds make every criterion deterministic.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "lapcom/cli.hpp"
#include "lapcom/evaluation.hpp"
#include "lapcom/postprocess.hpp"
#include "lapcom/sampler.hpp"
#include "test_oracles.hpp"

using namespace lapcom;

namespace {

int g_failures = 0;

void report(int criterion, const std::string& what, bool pass, const std::string& detail) {
  std::printf("[%s] criterion %2d: %s (%s)\n", pass ? "PASS" : "FAIL", criterion, what.c_str(),
              detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

struct RecoveryResult {
  int g_hat = 0;
  double network_ari = 0.0;
  double mean_pc = 0.0;
  std::map<int, double> node_ari_by_true_cluster;
};

/// One replicate: generate the scenario, run chains, reconcile, score
/// against the truth.
RecoveryResult run_replicate(const std::string& preset, std::uint64_t data_seed,
                             std::uint64_t chain_seed, int n_chains, Variant variant) {
  ScenarioSpec spec = scenario_preset(preset);
  spec.seed = data_seed;
  const GeneratedScenario gen = generate_scenario(spec);

  SamplerConfig cfg;
  cfg.n_iter = 30000;
  cfg.burn_in = 9000;
  cfg.thin = 30;
  cfg.seed = chain_seed;
  cfg.variant = variant;
  cfg.hyper = Hyperparams::defaults_for(spec.n_networks, spec.n_nodes);
  std::vector<Trace> traces = run_multichain(gen.multiplex, cfg, n_chains, true);

  Rng post_rng(chain_seed ^ 0x5eedf00dULL);
  const ReconcileResult rec = reconcile_chains(traces, gen.multiplex, post_rng);

  RecoveryResult out;
  out.g_hat = rec.solution.g_hat_plus;
  out.network_ari = ari(rec.solution.c_hat_star, gen.truth.c_star);

  const std::vector<int> est_canon = canonicalize_labels(rec.solution.c_hat_star);
  const std::vector<int> map = match_labels(est_canon, gen.truth.c_star);
  std::vector<int> slot_of(count_distinct_labels(est_canon), -1);
  for (std::size_t m = 0; m < est_canon.size(); ++m)
    slot_of[est_canon[m]] = rec.solution.c_hat_star[m];
  double pc_sum = 0.0;
  int pc_count = 0;
  for (std::size_t c = 0; c < slot_of.size(); ++c) {
    const int true_g = map[c];
    if (true_g >= static_cast<int>(gen.truth.z_star.size())) continue;
    const int slot = slot_of[c];
    pc_sum += procrustes_correlation(rec.solution.z_hat[slot], gen.truth.z_star[true_g]);
    ++pc_count;
    out.node_ari_by_true_cluster[true_g] =
        ari(rec.solution.s_hat_star[slot], gen.truth.s_star[true_g]);
  }
  out.mean_pc = pc_count > 0 ? pc_sum / pc_count : 0.0;
  return out;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// ---------------------------------------------------------------------------

void criterion_1_and_10() {
  // Scenario A recovery, 10 seeded replicates, 4 chains each. The first
  // replicate's fit is reused for the PPC magnitude check (criterion 10).
  int recovered = 0;
  double pc_sum = 0.0;
  Trace ppc_trace;
  Multiplex ppc_data;
  for (int r = 0; r < 10; ++r) {
    const std::uint64_t data_seed = 101 + r;
    RecoveryResult res = run_replicate("A", data_seed, 1000 + 10 * r, 4, Variant::lapcom);
    if (res.g_hat == 2 && res.network_ari == 1.0) ++recovered;
    pc_sum += res.mean_pc;
    if (r == 0) {
      // Regenerate the first replicate's best chain for criterion 10.
      ScenarioSpec spec = scenario_preset("A");
      spec.seed = data_seed;
      const GeneratedScenario gen = generate_scenario(spec);
      ppc_data = gen.multiplex;
      SamplerConfig cfg;
      cfg.n_iter = 30000;
      cfg.burn_in = 9000;
      cfg.thin = 30;
      cfg.seed = 1000;
      cfg.hyper = Hyperparams::defaults_for(spec.n_networks, spec.n_nodes);
      ppc_trace = run_chain(ppc_data, cfg);
    }
  }
  const double mean_pc = pc_sum / 10.0;
  char detail[160];
  std::snprintf(detail, sizeof(detail),
                "G_hat=2 with ARI 1.0 in %d/10 replicates (need >=9), mean PC %.4f (need >=0.95)",
                recovered, mean_pc);
  report(1, "scenario A recovery", recovered >= 9 && mean_pc >= 0.95, detail);

  // Criterion 10: replicate MAD and TNR magnitudes on the scenario-A fit.
  Rng rng(4242);
  const PpcReport ppc = run_ppc(ppc_trace.samples, ppc_data, 500, rng, false);
  double mad_sum = 0.0, tnr_sum = 0.0;
  long count = 0;
  for (const auto& vals : ppc.values) {
    for (double v : vals.at("mad")) mad_sum += v;
    for (double v : vals.at("tnr")) tnr_sum += v;
    count += static_cast<long>(vals.at("mad").size());
  }
  const double mean_mad = mad_sum / count;
  const double mean_tnr = tnr_sum / count;

  // Baseline: the same metrics for replicates drawn from the true
  // generating parameters of this data set. A fitted model cannot be
  // expected to beat this reference.
  double base_tnr = 0.0, base_mad = 0.0;
  {
    ScenarioSpec spec = scenario_preset("A");
    spec.seed = 101;
    const GeneratedScenario gen = generate_scenario(spec);
    ModelState truth;
    truth.G = 2;
    truth.G_plus = 2;
    truth.tau = spec.tau;
    truth.e = 1.0;
    truth.alpha = spec.alpha;
    truth.C = gen.truth.c_star;
    truth.comps.resize(2);
    for (int g = 0; g < 2; ++g) {
      LatentComponent& comp = truth.comps[g];
      comp.K = 1;
      comp.K_plus = 1;
      comp.pi = {1.0};
      comp.S.assign(spec.n_nodes, 0);
      comp.mu = {spec.mu[g][0]};
      comp.sigma2 = {spec.sigma2};
      comp.Z = gen.truth.z_star[g];
    }
    Rng base_rng(4243);
    long base_count = 0;
    for (int r = 0; r < 200; ++r)
      for (int m = 0; m < spec.n_networks; ++m) {
        const Network rep = simulate_network(truth, m, gen.multiplex.networks[m], base_rng);
        const CountMetrics cm = metric_count(gen.multiplex.networks[m], rep);
        base_tnr += cm.tnr;
        base_mad += cm.mad;
        ++base_count;
      }
    base_tnr /= base_count;
    base_mad /= base_count;
  }
  char long_detail[320];
  std::snprintf(long_detail, sizeof(long_detail),
                "mean replicate MAD %.4f (need <=1.0), mean TNR %.4f (need >=0.8), R=500; "
                "true-generative-model baseline on this data: MAD %.4f, TNR %.4f -- the TNR "
                "threshold is unattainable on this dense scenario",
                mean_mad, mean_tnr, base_mad, base_tnr);
  report(10, "PPC magnitudes on a scenario-A fit", mean_mad <= 1.0 && mean_tnr >= 0.8,
         long_detail);
}

void criterion_2() {
  // Scenario C node-level clustering, 10 replicates, 2 chains each.
  std::vector<double> space1, space2;
  for (int r = 0; r < 10; ++r) {
    RecoveryResult res = run_replicate("C", 201 + r, 2000 + 10 * r, 2, Variant::lapcom);
    space1.push_back(res.node_ari_by_true_cluster.count(0) ? res.node_ari_by_true_cluster[0]
                                                           : 0.0);
    space2.push_back(res.node_ari_by_true_cluster.count(1) ? res.node_ari_by_true_cluster[1]
                                                           : 0.0);
  }
  const double med1 = median(space1), med2 = median(space2);
  char detail[160];
  std::snprintf(detail, sizeof(detail),
                "median node ARI space1 %.3f (need >=0.9), space2 %.3f (need >=0.8)", med1,
                med2);
  report(2, "scenario C node-level clustering", med1 >= 0.9 && med2 >= 0.8, detail);
}

void criterion_3() {
  // Scenario I binary recovery, 10 replicates, 2 chains each.
  int modal_hits = 0;
  double ari_sum = 0.0;
  for (int r = 0; r < 10; ++r) {
    RecoveryResult res = run_replicate("I", 301 + r, 3000 + 10 * r, 2, Variant::lapcom);
    if (res.g_hat == 2) ++modal_hits;
    ari_sum += res.network_ari;
  }
  const double mean_ari = ari_sum / 10.0;
  char detail[160];
  std::snprintf(detail, sizeof(detail),
                "modal G_hat=2 in %d/10 replicates (need >=8), mean ARI %.3f (need >=0.85)",
                modal_hits, mean_ari);
  report(3, "scenario I binary recovery", modal_hits >= 8 && mean_ari >= 0.85, detail);
}

void criterion_4() {
  // mono variant parity on scenario A.
  int recovered = 0;
  for (int r = 0; r < 10; ++r) {
    RecoveryResult res = run_replicate("A", 401 + r, 4000 + 10 * r, 2, Variant::mono_lapcm);
    if (res.g_hat == 2 && res.network_ari == 1.0) ++recovered;
  }
  char detail[96];
  std::snprintf(detail, sizeof(detail), "G_hat=2 with ARI 1.0 in %d/10 replicates (need >=9)",
                recovered);
  report(4, "mono variant parity on scenario A", recovered >= 9, detail);
}

void criterion_5() {
  // Induced prior mass on 2-4 active components, M = 20, untruncated BNB.
  Rng rng(555);
  const std::vector<double> hist =
      simulate_prior_active_components(20, BnbParams{8, 18, 10}, 6, 3, 100000, rng, 0);
  const double mass = hist[2] + hist[3] + hist[4];
  char detail[96];
  std::snprintf(detail, sizeof(detail), "P(G_plus in {2,3,4}) = %.4f (need >=0.45 over 1e5 draws)",
                mass);
  report(5, "induced prior concentrates on 2-4 clusters", mass >= 0.45, detail);
}

void criterion_6() {
  // Data-free sweep marginal of G_plus vs direct prior simulation.
  ScenarioSpec spec = scenario_preset("A");
  spec.n_networks = 20;
  spec.n_nodes = 8;
  spec.seed = 5;
  const Multiplex y = generate_scenario(spec).multiplex;
  SamplerConfig cfg;
  cfg.hyper = Hyperparams::defaults_for(20, 8);
  cfg.data_free = true;
  Sampler sampler(y, cfg);
  Rng rng(606);
  sampler.set_state(init_chain(y, cfg, rng));
  for (int t = 0; t < 2000; ++t) sampler.sweep(rng);
  const int n = 100000;
  std::vector<double> chain_hist(cfg.hyper.G_max + 1, 0.0);
  for (int t = 0; t < n; ++t) {
    sampler.sweep(rng);
    chain_hist[sampler.state().G_plus] += 1.0 / n;
  }
  Rng rng2(707);
  const std::vector<double> direct = simulate_prior_active_components(
      20, cfg.hyper.bnb_G, cfg.hyper.l_G, cfg.hyper.r_G, 500000, rng2, cfg.hyper.G_max);
  double tv = 0.0;
  for (int g = 1; g <= cfg.hyper.G_max; ++g) tv += std::abs(chain_hist[g] - direct[g]);
  tv /= 2.0;
  char detail[96];
  std::snprintf(detail, sizeof(detail), "TV distance %.4f over 1e5 sweeps (need <=0.02)", tv);
  report(6, "telescoping validity in data-free mode", tv <= 0.02, detail);
}

void criterion_7() {
  const Hyperparams h = Hyperparams::defaults_for(20, 30);
  bool pass = true;
  std::string why = "closed forms exact at 1e-10; Gibbs vs grid within 3 SE";

  // Closed forms on fixtures.
  {
    const std::vector<Vec2> z{{2.0, 0.0}};
    const std::vector<int> s{0};
    const auto [mean, var] = mu_full_conditional(z, s, 0, 1.0, h);
    pass &= std::abs(var.x - 0.5) < 1e-10 && std::abs(mean.x - 1.0) < 1e-10 &&
            std::abs(mean.y) < 1e-10;
    const auto [u1, v1] = sigma2_full_conditional(z, s, {2.0, 0.0}, 0, h);
    pass &= std::abs(u1 - (h.u_sigma2 + 0.5)) < 1e-10 && std::abs(v1 - h.v_sigma2) < 1e-10;
    const std::vector<Vec2> z4{{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    const std::vector<int> s4{0, 0, 0, 0};
    const auto [u4, v4] = sigma2_full_conditional(z4, s4, {0, 0}, 0, h);
    pass &= std::abs(u4 - (h.u_sigma2 + 2.0)) < 1e-10 && std::abs(v4 - (h.v_sigma2 + 2.0)) < 1e-10;
  }

  // Long-run Gibbs draws against grid-posterior oracles on a fixed tiny
  // data set (N = 4, allocations known).
  {
    const std::vector<Vec2> z{{0.6, -0.2}, {0.9, 0.1}, {0.4, -0.5}, {0.7, 0.0}};
    const std::vector<int> s{0, 0, 0, 0};
    const double sigma2 = 0.4;
    const auto [mean, var] = mu_full_conditional(z, s, 0, sigma2, h);
    Rng rng(717);
    const int n = 100000;
    double mc_x = 0.0;
    for (int i = 0; i < n; ++i) mc_x += rng.normal(mean.x, std::sqrt(var.x));
    mc_x /= n;
    // Grid posterior for the x coordinate.
    long double total = 0.0L, ex = 0.0L;
    for (int a = 0; a <= 4000; ++a) {
      const long double mx = -2.0L + a * 1e-3L;
      long double lp = -mx * mx / 2.0L;
      for (const Vec2& zi : z) lp += -(zi.x - mx) * (zi.x - mx) / (2.0L * sigma2);
      const long double w = std::exp(lp);
      total += w;
      ex += w * mx;
    }
    const double grid_mean = static_cast<double>(ex / total);
    pass &= std::abs(mean.x - grid_mean) < 1e-4;
    pass &= std::abs(mc_x - grid_mean) < 3.0 * std::sqrt(var.x / n);

    const auto [u_star, v_star] = sigma2_full_conditional(z, s, mean, 0, h);
    double mc_s = 0.0;
    for (int i = 0; i < n; ++i) mc_s += sample_invgamma(u_star, v_star, rng);
    mc_s /= n;
    // 1-D grid for the variance conditional.
    long double s_total = 0.0L, s_ex = 0.0L;
    for (int a = 1; a <= 200000; ++a) {
      const long double x = 1.5L * a / 200000.0L;
      const long double w = std::exp(-(u_star + 1.0L) * std::log(x) - v_star / x);
      s_total += w;
      s_ex += w * x;
    }
    const double s_grid = static_cast<double>(s_ex / s_total);
    const double s_sd =
        std::sqrt(v_star * v_star / ((u_star - 1) * (u_star - 1) * (u_star - 2)));
    pass &= std::abs(mc_s - s_grid) < 3.0 * s_sd / std::sqrt(static_cast<double>(n));
  }
  report(7, "conjugate-update oracles", pass, why);
}

void criterion_8() {
  bool pass = true;
  // Constructed trace with known per-iteration permutations.
  Trace trace;
  trace.config.variant = Variant::lapcom;
  Rng build(808);
  const int n_nodes = 6, n_networks = 8, n_iter = 60;
  std::vector<LatentComponent> base(2);
  for (int g = 0; g < 2; ++g) {
    base[g].K = 1;
    base[g].K_plus = 1;
    base[g].w = 1.0;
    base[g].pi = {1.0};
    base[g].S.assign(n_nodes, 0);
    base[g].mu = {Vec2{g ? 3.0 : -3.0, 0.0}};
    base[g].sigma2 = {0.2};
    base[g].Z.resize(n_nodes);
    for (int i = 0; i < n_nodes; ++i) base[g].Z[i] = Vec2{(g ? 3.0 : -3.0) + 0.05 * i, 0.2 * i};
  }
  std::vector<int> base_c(n_networks);
  for (int m = 0; m < n_networks; ++m) base_c[m] = m % 2;
  for (int t = 0; t < n_iter; ++t) {
    const bool swap = build.uniform() < 0.5;
    ModelState st;
    st.G = 2;
    st.G_plus = 2;
    st.e = 1.0;
    st.alpha = 0.0;
    st.tau = {0.5, 0.5};
    st.comps = swap ? std::vector<LatentComponent>{base[1], base[0]} : base;
    st.C.resize(n_networks);
    for (int m = 0; m < n_networks; ++m) st.C[m] = swap ? 1 - base_c[m] : base_c[m];
    for (LatentComponent& comp : st.comps)
      for (Vec2& z : comp.Z) z = build.normal2(z, 0.005, 0.005);
    trace.samples.push_back(std::move(st));
    trace.log_posterior.push_back(0.0);
  }
  Rng rng(818);
  const std::vector<char> valid = kmeans_relabel_networks(trace, 2, rng);
  int n_valid = 0;
  for (char v : valid) n_valid += v;
  pass &= n_valid == n_iter;
  const std::vector<int> reference = trace.samples[0].C;
  for (const ModelState& st : trace.samples) pass &= st.C == reference;
  // Cross-tab alignment maps the reference partition onto the recovered
  // labelling exactly.
  std::vector<std::vector<int>> draws;
  for (const ModelState& st : trace.samples) draws.push_back(st.C);
  const AlignmentResult align = align_reference_partition(canonicalize_labels(base_c), draws);
  pass &= canonicalize_labels(align.aligned) == canonicalize_labels(reference);

  // Procrustes: planted similarity transform recovered below 1e-8.
  Rng prng(828);
  std::vector<Vec2> ref(12), moved(12);
  for (Vec2& p : ref) p = prng.normal2({0, 0}, 1, 1);
  const double theta = 0.7, scale = 2.5;
  for (int i = 0; i < 12; ++i) {
    const double c = std::cos(theta), s = std::sin(theta);
    moved[i] = {scale * (c * ref[i].x - s * ref[i].y) + 3.0,
                scale * (s * ref[i].x + c * ref[i].y) - 1.0};
  }
  const ProcrustesTransform tf = fit_procrustes(moved, ref);
  double err = 0.0;
  for (int i = 0; i < 12; ++i) err += squared_distance(tf.apply(moved[i]), ref[i]);
  pass &= err < 1e-8;
  pass &= std::abs(tf.scale - 1.0 / scale) < 1e-8;

  char detail[128];
  std::snprintf(detail, sizeof(detail),
                "relabelling recovered %d/%d iterations; Procrustes error %.2e", n_valid, n_iter,
                err);
  report(8, "post-processing round trip", pass, detail);
}

void criterion_9() {
  Rng rng(909);
  bool pass = true;
  int fixtures = 0;
  auto random_binary = [&](int n, double p) {
    Network net;
    net.n_nodes = n;
    net.directed = false;
    net.family = EdgeFamily::bernoulli_logit;
    net.weights.assign(static_cast<std::size_t>(n) * n, 0);
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        const long y = rng.bernoulli(p);
        net.at(i, j) = y;
        net.at(j, i) = y;
      }
    return net;
  };
  for (int rep = 0; rep < 25; ++rep) {
    ++fixtures;
    const int n = 5 + static_cast<int>(rng.uniform_index(4));
    // ARI vs pair counting.
    std::vector<int> pa(n), pb(n);
    for (int i = 0; i < n; ++i) {
      pa[i] = static_cast<int>(rng.uniform_index(3));
      pb[i] = static_cast<int>(rng.uniform_index(3));
    }
    pass &= std::abs(ari(pa, pb) - oracle::ari_pairs(pa, pb)) < 1e-10;

    // Binary metrics vs direct recount and threshold sweep.
    const Network obs = random_binary(n, 0.45);
    const Network rep_net = random_binary(n, 0.45);
    const auto dyads = dyad_pairs(obs);
    std::vector<double> probs(dyads.size());
    std::vector<char> labels(dyads.size());
    for (std::size_t d = 0; d < dyads.size(); ++d) {
      probs[d] = std::round(rng.uniform() * 20.0) / 20.0;
      labels[d] = obs.at(dyads[d].first, dyads[d].second) > 0;
    }
    const BinaryMetrics bm = metric_binary(obs, rep_net, probs);
    long tp = 0, fp = 0, fn = 0, mism = 0;
    for (const auto& [i, j] : dyads) {
      const bool o = obs.at(i, j) > 0, r = rep_net.at(i, j) > 0;
      tp += o && r;
      fp += !o && r;
      fn += o && !r;
      mism += o != r;
    }
    const double f1_direct =
        (2 * tp + fp + fn) == 0 ? 1.0 : 2.0 * tp / static_cast<double>(2 * tp + fp + fn);
    pass &= std::abs(bm.f1 - f1_direct) < 1e-10;
    pass &= std::abs(bm.hamming - static_cast<double>(mism) / dyads.size()) < 1e-10;
    const double auc_oracle = oracle::pr_auc_sweep(probs, labels);
    if (std::isnan(auc_oracle))
      pass &= std::isnan(bm.pr_auc);
    else
      pass &= std::abs(bm.pr_auc - auc_oracle) < 1e-8;

    // Count metrics vs direct enumeration.
    Network obs_c = obs, rep_c = rep_net;
    obs_c.family = rep_c.family = EdgeFamily::poisson_log;
    for (long& w : rep_c.weights) w *= 1 + static_cast<long>(rng.uniform_index(3));
    const CountMetrics cm = metric_count(obs_c, rep_c);
    double mad = 0.0;
    long zeros = 0, both = 0;
    for (const auto& [i, j] : dyads) {
      mad += std::abs(static_cast<double>(obs_c.at(i, j) - rep_c.at(i, j)));
      if (obs_c.at(i, j) == 0) {
        ++zeros;
        both += rep_c.at(i, j) == 0;
      }
    }
    pass &= std::abs(cm.mad - mad / dyads.size()) < 1e-10;
    pass &= std::abs(cm.tnr - (zeros ? static_cast<double>(both) / zeros : 1.0)) < 1e-10;

    // Structural distance vs the independent term-by-term oracle.
    const double d_ab = schieber_distance(obs, rep_net);
    pass &= std::abs(d_ab - oracle::schieber(obs, rep_net)) < 1e-8;
    pass &= std::abs(d_ab - schieber_distance(rep_net, obs)) < 1e-10;
    pass &= schieber_distance(obs, obs) < 1e-10;
  }
  char detail[96];
  std::snprintf(detail, sizeof(detail), "%d randomized fixtures, all metrics within 1e-8",
                fixtures);
  report(9, "metric suite matches brute-force oracles", pass, detail);
}

}  // namespace

int main() {
  std::printf("LaPCoM acceptance suite\n");
  criterion_1_and_10();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9();
  if (g_failures == 0) {
    std::printf("all criteria passed\n");
    return 0;
  }
  std::printf("%d criterion(s) failed\n", g_failures);
  return 1;
}
