#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "lapcom/evaluation.hpp"
#include "lapcom/graph_distance.hpp"
#include "lapcom/sampler.hpp"
#include "test_oracles.hpp"

using namespace lapcom;

namespace {

Network binary_from_bits(int n, const std::vector<int>& upper_bits) {
  Network net;
  net.n_nodes = n;
  net.directed = false;
  net.family = EdgeFamily::bernoulli_logit;
  net.weights.assign(static_cast<std::size_t>(n) * n, 0);
  std::size_t idx = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      net.at(i, j) = upper_bits[idx];
      net.at(j, i) = upper_bits[idx];
      ++idx;
    }
  return net;
}

Network random_binary(int n, double p, Rng& rng) {
  std::vector<int> bits(n * (n - 1) / 2);
  for (int& b : bits) b = rng.bernoulli(p);
  return binary_from_bits(n, bits);
}

Network random_count(int n, double rate, Rng& rng) {
  Network net;
  net.n_nodes = n;
  net.directed = false;
  net.family = EdgeFamily::poisson_log;
  net.weights.assign(static_cast<std::size_t>(n) * n, 0);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const long y = rng.poisson(rate);
      net.at(i, j) = y;
      net.at(j, i) = y;
    }
  return net;
}

}  // namespace

TEST(Presets, ScenarioADefinition) {
  const ScenarioSpec s = scenario_preset("A");
  EXPECT_EQ(s.n_networks, 20);
  EXPECT_EQ(s.n_nodes, 30);
  EXPECT_EQ(s.g_star, 2);
  EXPECT_EQ(s.tau, (std::vector<double>{0.6, 0.4}));
  EXPECT_EQ(s.k_g, (std::vector<int>{1, 1}));
  EXPECT_EQ(s.family, EdgeFamily::poisson_log);
  EXPECT_DOUBLE_EQ(s.alpha, 0.6);
  EXPECT_DOUBLE_EQ(s.sigma2, 0.25);
  EXPECT_DOUBLE_EQ(s.mu[0][0].x, 0.0);
}

TEST(Presets, ScenarioVDefinition) {
  const ScenarioSpec s = scenario_preset("V");
  EXPECT_EQ(s.n_networks, 100);
  EXPECT_EQ(s.n_nodes, 60);
  EXPECT_EQ(s.g_star, 4);
  EXPECT_EQ(s.family, EdgeFamily::bernoulli_logit);
  EXPECT_DOUBLE_EQ(s.alpha, -0.4);
  EXPECT_EQ(s.k_g, (std::vector<int>{1, 2, 2, 3}));
  // Three-cluster means follow the shared preset.
  EXPECT_DOUBLE_EQ(s.mu[3][1].x, 1.4);
  EXPECT_DOUBLE_EQ(s.mu[3][2].y, 1.4);
}

TEST(Generate, Reproducible) {
  ScenarioSpec s = scenario_preset("A");
  s.seed = 42;
  const GeneratedScenario a = generate_scenario(s);
  const GeneratedScenario b = generate_scenario(s);
  EXPECT_EQ(a.truth.c_star, b.truth.c_star);
  for (int m = 0; m < s.n_networks; ++m)
    EXPECT_EQ(a.multiplex.networks[m].weights, b.multiplex.networks[m].weights);
}

TEST(Generate, ZeroVarianceCollapsesClusters) {
  ScenarioSpec s = scenario_preset("C");
  s.sigma2 = 0.0;
  s.seed = 7;
  const GeneratedScenario gen = generate_scenario(s);
  // All nodes in the same node-level cluster coincide exactly.
  for (int g = 0; g < s.g_star; ++g)
    for (int i = 0; i < s.n_nodes; ++i) {
      const Vec2 expected = s.mu[g][gen.truth.s_star[g][i]];
      EXPECT_DOUBLE_EQ(gen.truth.z_star[g][i].x, expected.x);
      EXPECT_DOUBLE_EQ(gen.truth.z_star[g][i].y, expected.y);
    }
}

TEST(Ari, TrivialCases) {
  EXPECT_DOUBLE_EQ(ari({0, 1, 2, 0}, {0, 1, 2, 0}), 1.0);
  EXPECT_DOUBLE_EQ(ari({5, 5, 9, 9}, {1, 1, 0, 0}), 1.0);  // relabelled
  EXPECT_DOUBLE_EQ(ari({0, 0, 0, 0}, {0, 1, 2, 3}), 0.0);  // expected-index case
}

TEST(Ari, HandComputedCase) {
  const std::vector<int> p1{0, 0, 1, 1};
  const std::vector<int> p2{0, 1, 1, 1};
  EXPECT_NEAR(ari(p1, p2), oracle::ari_pairs(p1, p2), 1e-12);
}

TEST(Ari, MatchesBruteForceOnRandomFixtures) {
  Rng rng(3);
  for (int rep = 0; rep < 30; ++rep) {
    const int n = 5 + static_cast<int>(rng.uniform_index(8));
    std::vector<int> a(n), b(n);
    for (int i = 0; i < n; ++i) {
      a[i] = static_cast<int>(rng.uniform_index(3));
      b[i] = static_cast<int>(rng.uniform_index(3));
    }
    EXPECT_NEAR(ari(a, b), oracle::ari_pairs(a, b), 1e-12);
    EXPECT_NEAR(ari(a, b), ari(b, a), 1e-12);  // symmetry
    // Invariance to relabelling of either argument.
    std::vector<int> a_relabelled(n);
    for (int i = 0; i < n; ++i) a_relabelled[i] = 7 - a[i];
    EXPECT_NEAR(ari(a_relabelled, b), ari(a, b), 1e-12);
  }
}

TEST(MatchLabels, TrivialAndExhaustive) {
  EXPECT_EQ(match_labels({0, 1, 0}, {0, 1, 0}), (std::vector<int>{0, 1}));
  EXPECT_EQ(match_labels({0, 0, 1}, {1, 1, 0}), (std::vector<int>{1, 0}));

  // Three-label fixtures vs exhaustive search over all 3! bijections.
  Rng rng(4);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<int> est(9), ref(9);
    for (int i = 0; i < 9; ++i) {
      est[i] = static_cast<int>(rng.uniform_index(3));
      ref[i] = static_cast<int>(rng.uniform_index(3));
    }
    est[0] = 0; est[1] = 1; est[2] = 2;  // all labels present
    ref[0] = 0; ref[1] = 1; ref[2] = 2;
    const std::vector<int> map = match_labels(est, ref);
    long matched = 0;
    for (int i = 0; i < 9; ++i) matched += map[est[i]] == ref[i];
    std::vector<int> perm{0, 1, 2};
    long best = 0;
    do {
      long m = 0;
      for (int i = 0; i < 9; ++i) m += perm[est[i]] == ref[i];
      best = std::max(best, m);
    } while (std::next_permutation(perm.begin(), perm.end()));
    EXPECT_EQ(matched, best);
  }
}

TEST(ProcrustesCorrelation, PerfectUnderSimilarityTransform) {
  Rng rng(5);
  std::vector<Vec2> z(14);
  for (Vec2& p : z) p = rng.normal2({0, 0}, 1, 1);
  std::vector<Vec2> moved(14);
  const double c = std::cos(1.1), s = std::sin(1.1);
  for (int i = 0; i < 14; ++i)
    moved[i] = {1.7 * (c * z[i].x - s * z[i].y) + 3.0, 1.7 * (s * z[i].x + c * z[i].y) - 1.0};
  EXPECT_NEAR(procrustes_correlation(moved, z), 1.0, 1e-10);
}

TEST(ProcrustesCorrelation, IndependentNoiseNearZero) {
  Rng rng(6);
  const int n = 4000;
  std::vector<Vec2> a(n), b(n);
  for (int i = 0; i < n; ++i) {
    a[i] = rng.normal2({0, 0}, 1, 1);
    b[i] = rng.normal2({0, 0}, 1, 1);
  }
  EXPECT_LT(procrustes_correlation(a, b), 0.1);
}

TEST(ProcrustesCorrelation, MatchesOptimizationOracle) {
  // Direct optimization over rotation angle, reflection and scale: the
  // minimized normalized residual gives the same statistic.
  Rng rng(7);
  std::vector<Vec2> a(9), b(9);
  for (int i = 0; i < 9; ++i) {
    a[i] = rng.normal2({0, 0}, 1, 1);
    b[i] = rng.normal2({0.3, -0.4}, 0.8, 1.4);
  }
  const double got = procrustes_correlation(a, b);

  // Center and unit-normalize both configurations, then scan the rotation.
  auto center_norm = [](std::vector<Vec2> z) {
    Vec2 mean{0, 0};
    for (const Vec2& p : z) mean += p;
    mean = mean * (1.0 / z.size());
    double ss = 0.0;
    for (Vec2& p : z) {
      p = p - mean;
      ss += p.squared_norm();
    }
    for (Vec2& p : z) p = p * (1.0 / std::sqrt(ss));
    return z;
  };
  const std::vector<Vec2> ca = center_norm(a), cb = center_norm(b);
  double best = 0.0;
  for (int refl = 0; refl < 2; ++refl) {
    for (int step = 0; step < 1000000; ++step) {
      const double theta = 2.0 * M_PI * step / 1000000.0;
      const double c = std::cos(theta), s = std::sin(theta);
      double cross = 0.0;
      for (std::size_t i = 0; i < ca.size(); ++i) {
        const double ax = refl ? -ca[i].x : ca[i].x;
        cross += (c * ax - s * ca[i].y) * cb[i].x + (s * ax + c * ca[i].y) * cb[i].y;
      }
      best = std::max(best, cross);  // optimal scale makes PC = max correlation
    }
  }
  EXPECT_NEAR(got, best, 1e-8);
}

TEST(Ppc, SimulateShapesAndFamilies) {
  ScenarioSpec spec = scenario_preset("A");
  spec.n_networks = 4;
  spec.n_nodes = 8;
  spec.seed = 11;
  const GeneratedScenario gen = generate_scenario(spec);
  ModelState st;
  st.G = 1;
  st.G_plus = 1;
  st.tau = {1.0};
  st.e = 1.0;
  st.alpha = 0.2;
  st.C.assign(4, 0);
  LatentComponent comp;
  comp.K = 1;
  comp.K_plus = 1;
  comp.pi = {1.0};
  comp.S.assign(8, 0);
  comp.mu = {Vec2{0, 0}};
  comp.sigma2 = {0.3};
  comp.Z.assign(8, Vec2{0, 0});
  Rng zrng(1);
  for (Vec2& z : comp.Z) z = zrng.normal2({0, 0}, 0.6, 0.6);
  st.comps = {comp};

  Rng rng(2);
  const std::vector<ModelState> tail{st};
  const auto reps = ppc_simulate(tail, gen.multiplex, 1, rng);
  ASSERT_EQ(reps.size(), 1u);
  EXPECT_EQ(reps[0].n_networks(), 4);
  EXPECT_EQ(reps[0].family(), EdgeFamily::poisson_log);

  // Binary family: replicate entries stay in {0,1}.
  Multiplex binary_mx = gen.multiplex;
  for (Network& net : binary_mx.networks) {
    net.family = EdgeFamily::bernoulli_logit;
    for (long& w : net.weights) w = w > 0 ? 1 : 0;
  }
  const auto breps = ppc_simulate(tail, binary_mx, 1, rng);
  for (long w : breps[0].networks[0].weights) EXPECT_TRUE(w == 0 || w == 1);
}

TEST(Ppc, ReplicateMomentsMatchRate) {
  // At a fixed lambda surface the replicate dyad mean must match the
  // implied mean within Monte Carlo error.
  ModelState st;
  st.G = 1;
  st.G_plus = 1;
  st.tau = {1.0};
  st.e = 1.0;
  st.alpha = 0.4;
  st.C = {0};
  LatentComponent comp;
  comp.K = 1;
  comp.K_plus = 1;
  comp.pi = {1.0};
  comp.S.assign(2, 0);
  comp.mu = {Vec2{0, 0}};
  comp.sigma2 = {0.3};
  comp.Z = {Vec2{0.2, 0.0}, Vec2{-0.3, 0.1}};
  st.comps = {comp};

  Network proto;
  proto.n_nodes = 2;
  proto.directed = false;
  proto.family = EdgeFamily::poisson_log;
  proto.weights = {0, 1, 1, 0};

  const double lambda = std::exp(st.alpha - squared_distance(comp.Z[0], comp.Z[1]));
  Rng rng(3);
  const int n = 10000;
  double mean = 0.0;
  for (int r = 0; r < n; ++r) mean += static_cast<double>(simulate_network(st, 0, proto, rng).at(0, 1));
  mean /= n;
  EXPECT_NEAR(mean, lambda, 3 * std::sqrt(lambda / n));
}

TEST(MetricBinary, PerfectAndComplement) {
  Rng rng(8);
  const Network obs = random_binary(6, 0.5, rng);
  const auto dyads = dyad_pairs(obs);
  std::vector<double> probs(dyads.size(), 0.5);
  const BinaryMetrics same = metric_binary(obs, obs, probs);
  EXPECT_DOUBLE_EQ(same.f1, 1.0);
  EXPECT_DOUBLE_EQ(same.hamming, 0.0);
  EXPECT_DOUBLE_EQ(same.density_sq_diff, 0.0);

  Network complement = obs;
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j)
      if (i != j) complement.at(i, j) = 1 - obs.at(i, j);
  const BinaryMetrics flip = metric_binary(obs, complement, probs);
  EXPECT_DOUBLE_EQ(flip.f1, 0.0);
  EXPECT_DOUBLE_EQ(flip.hamming, 1.0);
}

TEST(MetricBinary, PrAucMatchesThresholdSweepOracle) {
  // Four-node toy with hand-set probabilities.
  const Network obs = binary_from_bits(4, {1, 0, 1, 0, 0, 1});
  const std::vector<double> probs{0.9, 0.2, 0.7, 0.3, 0.6, 0.8};
  const auto dyads = dyad_pairs(obs);
  std::vector<char> labels(dyads.size());
  for (std::size_t d = 0; d < dyads.size(); ++d)
    labels[d] = obs.at(dyads[d].first, dyads[d].second) > 0;
  const double expected = oracle::pr_auc_sweep(probs, labels);
  const BinaryMetrics bm = metric_binary(obs, obs, probs);
  EXPECT_NEAR(bm.pr_auc, expected, 1e-12);

  // Randomized fixtures, including tied scores.
  Rng rng(9);
  for (int rep = 0; rep < 30; ++rep) {
    const int n = 5 + static_cast<int>(rng.uniform_index(4));
    const Network o = random_binary(n, 0.4, rng);
    const auto dy = dyad_pairs(o);
    std::vector<double> p(dy.size());
    std::vector<char> lab(dy.size());
    for (std::size_t d = 0; d < dy.size(); ++d) {
      p[d] = std::round(rng.uniform() * 10.0) / 10.0;  // force ties
      lab[d] = o.at(dy[d].first, dy[d].second) > 0;
    }
    const double oracle_auc = oracle::pr_auc_sweep(p, lab);
    const double got = precision_recall_auc(p, lab);
    if (std::isnan(oracle_auc))
      EXPECT_TRUE(std::isnan(got));
    else
      EXPECT_NEAR(got, oracle_auc, 1e-10);
  }
}

TEST(MetricCount, PerfectAndHandSum) {
  Rng rng(10);
  const Network obs = random_count(5, 1.0, rng);
  const CountMetrics same = metric_count(obs, obs);
  EXPECT_DOUBLE_EQ(same.mad, 0.0);
  EXPECT_DOUBLE_EQ(same.tnr, 1.0);

  // Three-node hand case: obs = (2,0,1), rep = (0,1,1).
  Network o;
  o.n_nodes = 3;
  o.directed = false;
  o.family = EdgeFamily::poisson_log;
  o.weights = {0, 2, 0, 2, 0, 1, 0, 1, 0};
  Network r = o;
  r.weights = {0, 0, 1, 0, 0, 1, 1, 1, 0};
  const CountMetrics cm = metric_count(o, r);
  EXPECT_NEAR(cm.mad, (2 + 1 + 0) / 3.0, 1e-12);
  EXPECT_DOUBLE_EQ(cm.tnr, 0.0);  // the single observed-zero dyad got an edge
  ASSERT_EQ(cm.log_positive_counts.size(), 2u);
  EXPECT_DOUBLE_EQ(cm.log_positive_counts[0], 0.0);
}

TEST(MetricCount, AllZeroCase) {
  Network o;
  o.n_nodes = 3;
  o.directed = false;
  o.family = EdgeFamily::poisson_log;
  o.weights.assign(9, 0);
  const CountMetrics cm = metric_count(o, o);
  EXPECT_DOUBLE_EQ(cm.tnr, 1.0);
  EXPECT_TRUE(cm.log_positive_counts.empty());
}

TEST(MetricCount, RandomFixturesMatchDirectEnumeration) {
  Rng rng(11);
  for (int rep = 0; rep < 30; ++rep) {
    const int n = 4 + static_cast<int>(rng.uniform_index(4));
    const Network o = random_count(n, 0.8, rng);
    const Network r = random_count(n, 0.8, rng);
    const CountMetrics cm = metric_count(o, r);
    double mad = 0.0;
    long zeros = 0, both = 0, dyads = 0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        ++dyads;
        mad += std::abs(static_cast<double>(o.at(i, j) - r.at(i, j)));
        if (o.at(i, j) == 0) {
          ++zeros;
          both += r.at(i, j) == 0;
        }
      }
    EXPECT_NEAR(cm.mad, mad / dyads, 1e-12);
    EXPECT_NEAR(cm.tnr, zeros ? static_cast<double>(both) / zeros : 1.0, 1e-12);
  }
}

TEST(Schieber, IdenticalGraphsZero) {
  Rng rng(12);
  const Network a = random_binary(8, 0.4, rng);
  EXPECT_NEAR(schieber_distance(a, a), 0.0, 1e-12);
}

TEST(Schieber, CompleteVsEmptyBounded) {
  Network full;
  full.n_nodes = 10;
  full.directed = false;
  full.family = EdgeFamily::bernoulli_logit;
  full.weights.assign(100, 1);
  for (int i = 0; i < 10; ++i) full.at(i, i) = 0;
  Network empty = full;
  empty.weights.assign(100, 0);
  const double d = schieber_distance(full, empty);
  EXPECT_GT(d, 0.0);
  EXPECT_LE(d, 1.0);
}

TEST(Schieber, MatchesTermByTermOracle) {
  Rng rng(13);
  for (int rep = 0; rep < 25; ++rep) {
    const int n = 5 + static_cast<int>(rng.uniform_index(5));
    const Network a = random_binary(n, 0.35, rng);
    const Network b = random_binary(n, 0.5, rng);
    EXPECT_NEAR(schieber_distance(a, b), oracle::schieber(a, b), 1e-8);
  }
}

TEST(Schieber, SymmetricAndPermutationInvariant) {
  Rng rng(14);
  const Network a = random_binary(7, 0.4, rng);
  const Network b = random_binary(7, 0.5, rng);
  EXPECT_NEAR(schieber_distance(a, b), schieber_distance(b, a), 1e-12);

  // Node reordering applied to one graph leaves the distance unchanged
  // (all terms are distribution-based).
  std::vector<int> perm{3, 1, 4, 0, 6, 2, 5};
  Network ap = a;
  for (int i = 0; i < 7; ++i)
    for (int j = 0; j < 7; ++j) ap.at(i, j) = a.at(perm[i], perm[j]);
  EXPECT_NEAR(schieber_distance(ap, b), schieber_distance(a, b), 1e-12);
}

TEST(Schieber, PadsSmallerGraph) {
  Rng rng(15);
  const Network a = random_binary(6, 0.5, rng);
  const Network b = random_binary(4, 0.5, rng);
  const double d = schieber_distance(a, b);
  EXPECT_GE(d, 0.0);
  EXPECT_LE(d, 1.0);
}

TEST(Summaries, MedianAndIqr) {
  const MetricSummary s = summarize_metric({5.0, 1.0, 3.0, 2.0, 4.0});
  EXPECT_DOUBLE_EQ(s.median, 3.0);
  EXPECT_DOUBLE_EQ(s.iqr, 2.0);
  EXPECT_DOUBLE_EQ(s.mean, 3.0);
  EXPECT_NEAR(s.sd, std::sqrt(2.5), 1e-12);
}

TEST(RunPpc, CountFamilyReport) {
  ScenarioSpec spec = scenario_preset("A");
  spec.n_networks = 3;
  spec.n_nodes = 8;
  spec.seed = 21;
  const GeneratedScenario gen = generate_scenario(spec);
  SamplerConfig cfg;
  cfg.n_iter = 40;
  cfg.burn_in = 20;
  cfg.thin = 2;
  cfg.seed = 3;
  cfg.hyper = Hyperparams::defaults_for(3, 8);
  const Trace trace = run_chain(gen.multiplex, cfg);
  Rng rng(4);
  const PpcReport report = run_ppc(trace.samples, gen.multiplex, 5, rng);
  ASSERT_EQ(report.values.size(), 3u);
  for (const auto& vals : report.values) {
    EXPECT_EQ(vals.at("mad").size(), 5u);
    EXPECT_EQ(vals.at("tnr").size(), 5u);
    EXPECT_EQ(vals.at("distance").size(), 5u);
    for (double v : vals.at("tnr")) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
  }
}
