#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "lapcom/graph_distance.hpp"
#include "lapcom/model.hpp"
#include "lapcom/multiplex.hpp"
#include "lapcom/partition.hpp"
#include "lapcom/rng.hpp"

namespace lapcom {

// ---------------------------------------------------------------------------
// Synthetic multiplex generation.
// ---------------------------------------------------------------------------

/// Generative settings for one synthetic multiplex. The built-in presets
/// (A-H count-valued, I-V binary) share the node-level means and variances:
/// one cluster sits at the origin, two clusters at (-0.8, 0.8)/(0.8, -0.8),
/// three at (-0.9, -0.9)/(1.4, 0.4)/(-0.9, 1.4), all with variance 0.25;
/// the intercept is 0.6 for N = 30 and -0.4 for larger networks.
struct ScenarioSpec {
  std::string name;
  int n_networks = 20;
  int n_nodes = 30;
  int g_star = 2;
  std::vector<double> tau;
  std::vector<int> k_g;
  std::vector<std::vector<double>> pi_g;
  std::vector<std::vector<Vec2>> mu;
  double sigma2 = 0.25;
  double alpha = 0.6;
  EdgeFamily family = EdgeFamily::poisson_log;
  std::uint64_t seed = 1;

  void validate() const {
    require(n_networks >= 1 && n_nodes >= 1, "scenario: need M >= 1 and N >= 1");
    require(g_star >= 1, "scenario: need at least one cluster");
    require(static_cast<int>(tau.size()) == g_star, "scenario: tau size mismatch");
    require(static_cast<int>(k_g.size()) == g_star, "scenario: K_g size mismatch");
    require(static_cast<int>(pi_g.size()) == g_star, "scenario: pi size mismatch");
    require(static_cast<int>(mu.size()) == g_star, "scenario: mu size mismatch");
    require(sigma2 >= 0.0, "scenario: variance must be non-negative");
    double tau_sum = 0.0;
    for (double t : tau) tau_sum += t;
    require(std::abs(tau_sum - 1.0) < 1e-9, "scenario: tau must sum to 1");
    for (int g = 0; g < g_star; ++g) {
      require(static_cast<int>(pi_g[g].size()) == k_g[g], "scenario: pi_g size mismatch");
      require(static_cast<int>(mu[g].size()) == k_g[g], "scenario: mu size mismatch");
      double pi_sum = 0.0;
      for (double p : pi_g[g]) pi_sum += p;
      require(std::abs(pi_sum - 1.0) < 1e-9, "scenario: pi_g must sum to 1");
    }
  }
};

inline void to_json(nlohmann::json& j, const ScenarioSpec& s) {
  std::vector<std::vector<std::vector<double>>> mu;
  for (const auto& row : s.mu) {
    std::vector<std::vector<double>> flat;
    for (const Vec2& v : row) flat.push_back({v.x, v.y});
    mu.push_back(std::move(flat));
  }
  j = nlohmann::json{{"name", s.name},       {"n_networks", s.n_networks},
                     {"n_nodes", s.n_nodes}, {"g_star", s.g_star},
                     {"tau", s.tau},         {"k_g", s.k_g},
                     {"pi_g", s.pi_g},       {"mu", mu},
                     {"sigma2", s.sigma2},   {"alpha", s.alpha},
                     {"family", family_name(s.family)},
                     {"seed", s.seed}};
}

inline void from_json(const nlohmann::json& j, ScenarioSpec& s) {
  j.at("name").get_to(s.name);
  j.at("n_networks").get_to(s.n_networks);
  j.at("n_nodes").get_to(s.n_nodes);
  j.at("g_star").get_to(s.g_star);
  j.at("tau").get_to(s.tau);
  j.at("k_g").get_to(s.k_g);
  j.at("pi_g").get_to(s.pi_g);
  s.mu.clear();
  for (const auto& row : j.at("mu")) {
    std::vector<Vec2> vrow;
    for (const auto& v : row) vrow.emplace_back(v.at(0).get<double>(), v.at(1).get<double>());
    s.mu.push_back(std::move(vrow));
  }
  j.at("sigma2").get_to(s.sigma2);
  j.at("alpha").get_to(s.alpha);
  s.family = family_from_name(j.at("family").get<std::string>());
  j.at("seed").get_to(s.seed);
}

namespace detail {

inline std::vector<Vec2> preset_means(int k) {
  switch (k) {
    case 1:
      return {{0.0, 0.0}};
    case 2:
      return {{-0.8, 0.8}, {0.8, -0.8}};
    case 3:
      return {{-0.9, -0.9}, {1.4, 0.4}, {-0.9, 1.4}};
    default:
      throw std::invalid_argument("preset means defined for 1-3 node clusters");
  }
}

inline ScenarioSpec make_preset(const std::string& name, int m, int n, std::vector<double> tau,
                                std::vector<int> k_g, std::vector<std::vector<double>> pi_g,
                                EdgeFamily family) {
  ScenarioSpec s;
  s.name = name;
  s.n_networks = m;
  s.n_nodes = n;
  s.g_star = static_cast<int>(tau.size());
  s.tau = std::move(tau);
  s.k_g = k_g;
  s.pi_g = std::move(pi_g);
  s.mu.reserve(k_g.size());
  for (int k : k_g) s.mu.push_back(preset_means(k));
  s.sigma2 = 0.25;
  s.alpha = n == 30 ? 0.6 : -0.4;
  s.family = family;
  return s;
}

}  // namespace detail

/// Built-in presets: A-H reproduce simulation study 1 (count family),
/// I-V study 2 (binary family).
inline ScenarioSpec scenario_preset(const std::string& name) {
  using detail::make_preset;
  const auto count = EdgeFamily::poisson_log;
  const auto binary = EdgeFamily::bernoulli_logit;
  const std::vector<double> tau64{0.6, 0.4};
  const std::vector<std::vector<double>> pi11{{1.0}, {1.0}};
  const std::vector<std::vector<double>> pi12{{1.0}, {0.5, 0.5}};
  const std::vector<std::vector<double>> pi23{{0.7, 0.3}, {0.4, 0.3, 0.3}};

  if (name == "A") return make_preset("A", 20, 30, tau64, {1, 1}, pi11, count);
  if (name == "B") return make_preset("B", 20, 50, tau64, {1, 1}, pi11, count);
  if (name == "C") return make_preset("C", 20, 30, tau64, {1, 2}, pi12, count);
  if (name == "D") return make_preset("D", 20, 50, tau64, {1, 2}, pi12, count);
  if (name == "E") return make_preset("E", 20, 30, tau64, {2, 3}, pi23, count);
  if (name == "F") return make_preset("F", 20, 60, tau64, {2, 3}, pi23, count);
  if (name == "G") return make_preset("G", 50, 30, tau64, {2, 3}, pi23, count);
  if (name == "H") return make_preset("H", 50, 60, tau64, {2, 3}, pi23, count);
  if (name == "I") return make_preset("I", 20, 50, tau64, {1, 1}, pi11, binary);
  if (name == "II") return make_preset("II", 50, 30, tau64, {2, 3}, pi23, binary);
  if (name == "III")
    return make_preset("III", 50, 30, {0.4, 0.3, 0.3}, {1, 2, 3},
                       {{1.0}, {0.7, 0.3}, {0.4, 0.3, 0.3}}, binary);
  if (name == "IV")
    return make_preset("IV", 50, 60, {0.3, 0.3, 0.2, 0.2}, {1, 2, 2, 3},
                       {{1.0}, {0.5, 0.5}, {0.7, 0.3}, {0.4, 0.3, 0.3}}, binary);
  if (name == "V")
    return make_preset("V", 100, 60, {0.3, 0.3, 0.2, 0.2}, {1, 2, 2, 3},
                       {{1.0}, {0.5, 0.5}, {0.7, 0.3}, {0.4, 0.3, 0.3}}, binary);
  throw std::invalid_argument("unknown scenario preset: " + name);
}

struct ScenarioTruth {
  std::vector<int> c_star;
  std::vector<std::vector<int>> s_star;
  std::vector<std::vector<Vec2>> z_star;
};

struct GeneratedScenario {
  Multiplex multiplex;
  ScenarioTruth truth;
};

/// Samples a multiplex from the generative model: network allocations from
/// tau, per-cluster latent spaces from the node mixture, and undirected
/// edges from the family at eta = alpha - squared distance. Bit-exactly
/// reproducible from the scenario seed.
inline GeneratedScenario generate_scenario(const ScenarioSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  GeneratedScenario out;

  out.truth.c_star.resize(spec.n_networks);
  for (int m = 0; m < spec.n_networks; ++m)
    out.truth.c_star[m] = rng.categorical(spec.tau);

  out.truth.s_star.resize(spec.g_star);
  out.truth.z_star.resize(spec.g_star);
  for (int g = 0; g < spec.g_star; ++g) {
    out.truth.s_star[g].resize(spec.n_nodes);
    out.truth.z_star[g].resize(spec.n_nodes);
    for (int i = 0; i < spec.n_nodes; ++i) {
      const int k = rng.categorical(spec.pi_g[g]);
      out.truth.s_star[g][i] = k;
      out.truth.z_star[g][i] = sample_mvn_spherical(spec.mu[g][k], spec.sigma2, rng);
    }
  }

  out.multiplex.networks.resize(spec.n_networks);
  out.multiplex.labels.resize(spec.n_networks);
  for (int m = 0; m < spec.n_networks; ++m) {
    Network& net = out.multiplex.networks[m];
    net.n_nodes = spec.n_nodes;
    net.directed = false;
    net.family = spec.family;
    net.weights.assign(static_cast<std::size_t>(spec.n_nodes) * spec.n_nodes, 0);
    const std::vector<Vec2>& z = out.truth.z_star[out.truth.c_star[m]];
    for (int i = 0; i < spec.n_nodes; ++i) {
      for (int j = i + 1; j < spec.n_nodes; ++j) {
        const double eta = spec.alpha - squared_distance(z[i], z[j]);
        long y = 0;
        if (spec.family == EdgeFamily::poisson_log) {
          y = rng.poisson(std::exp(eta));
        } else {
          y = rng.bernoulli(1.0 / (1.0 + std::exp(-eta)));
        }
        net.at(i, j) = y;
        net.at(j, i) = y;
      }
    }
    char label[16];
    std::snprintf(label, sizeof(label), "net_%02d", m + 1);
    out.multiplex.labels[m] = label;
  }
  out.multiplex.validate();
  return out;
}

// ---------------------------------------------------------------------------
// Recovery metrics.
// ---------------------------------------------------------------------------

/// Correlation statistic of the symmetric Procrustes superimposition:
/// 1 means perfect recovery up to translation, rotation/reflection and
/// scaling. Degenerate configurations return 0.
inline double procrustes_correlation(const std::vector<Vec2>& z_est,
                                     const std::vector<Vec2>& z_true) {
  require(z_est.size() == z_true.size() && !z_est.empty(),
          "procrustes_correlation: shape mismatch");
  const double n = static_cast<double>(z_est.size());
  Vec2 me{0.0, 0.0}, mt{0.0, 0.0};
  for (std::size_t i = 0; i < z_est.size(); ++i) {
    me += z_est[i];
    mt += z_true[i];
  }
  me = me * (1.0 / n);
  mt = mt * (1.0 / n);
  double cross[2][2] = {{0.0, 0.0}, {0.0, 0.0}};
  double ss_e = 0.0, ss_t = 0.0;
  for (std::size_t i = 0; i < z_est.size(); ++i) {
    const Vec2 a = z_est[i] - me;
    const Vec2 b = z_true[i] - mt;
    cross[0][0] += a.x * b.x;
    cross[0][1] += a.x * b.y;
    cross[1][0] += a.y * b.x;
    cross[1][1] += a.y * b.y;
    ss_e += a.squared_norm();
    ss_t += b.squared_norm();
  }
  if (ss_e < 1e-14 || ss_t < 1e-14) return 0.0;
  const Svd2 svd = svd_2x2(cross);
  return std::clamp((svd.s[0] + svd.s[1]) / std::sqrt(ss_e * ss_t), 0.0, 1.0);
}

// ---------------------------------------------------------------------------
// Posterior predictive checks.
// ---------------------------------------------------------------------------

/// Tie probabilities P(y > 0) for network m under one posterior sample,
/// in dyad order.
inline std::vector<double> tie_probabilities(const ModelState& state, int m,
                                             const std::vector<std::pair<int, int>>& dyads,
                                             EdgeFamily family) {
  const std::vector<Vec2>& z = state.comps[state.C[m]].Z;
  std::vector<double> probs(dyads.size());
  for (std::size_t d = 0; d < dyads.size(); ++d) {
    const double eta = state.alpha - squared_distance(z[dyads[d].first], z[dyads[d].second]);
    probs[d] = family == EdgeFamily::poisson_log ? -std::expm1(-std::exp(eta))
                                                 : 1.0 / (1.0 + std::exp(-eta));
  }
  return probs;
}

/// Regenerates network m from its allocated component's rate surface.
inline Network simulate_network(const ModelState& state, int m, const Network& proto, Rng& rng) {
  Network rep;
  rep.n_nodes = proto.n_nodes;
  rep.directed = proto.directed;
  rep.family = proto.family;
  rep.weights.assign(proto.weights.size(), 0);
  const std::vector<Vec2>& z = state.comps[state.C[m]].Z;
  for (int i = 0; i < proto.n_nodes; ++i) {
    for (int j = proto.directed ? 0 : i + 1; j < proto.n_nodes; ++j) {
      if (i == j) continue;
      const double eta = state.alpha - squared_distance(z[i], z[j]);
      const long y = proto.family == EdgeFamily::poisson_log
                         ? rng.poisson(std::exp(eta))
                         : rng.bernoulli(1.0 / (1.0 + std::exp(-eta)));
      rep.at(i, j) = y;
      if (!proto.directed) rep.at(j, i) = y;
    }
  }
  return rep;
}

/// One replicate multiplex per retained posterior sample.
inline std::vector<Multiplex> ppc_simulate(const std::vector<ModelState>& tail,
                                           const Multiplex& y, int n_replicates, Rng& rng) {
  require(n_replicates >= 1 && n_replicates <= static_cast<int>(tail.size()),
          "ppc_simulate: R must not exceed the trace length");
  std::vector<Multiplex> out;
  out.reserve(n_replicates);
  const std::size_t offset = tail.size() - static_cast<std::size_t>(n_replicates);
  for (int r = 0; r < n_replicates; ++r) {
    Multiplex rep;
    rep.labels = y.labels;
    rep.networks.reserve(y.n_networks());
    for (int m = 0; m < y.n_networks(); ++m)
      rep.networks.push_back(simulate_network(tail[offset + r], m, y.networks[m], rng));
    out.push_back(std::move(rep));
  }
  return out;
}

struct BinaryMetrics {
  double pr_auc = 0.0;
  double f1 = 0.0;
  double density_sq_diff = 0.0;
  double hamming = 0.0;
};

/// Area under the precision-recall curve by trapezoidal integration over
/// the recall grid, sweeping every distinct score threshold. NaN when the
/// observed network has no positive dyad.
inline double precision_recall_auc(std::span<const double> scores, std::span<const char> labels) {
  require(scores.size() == labels.size(), "precision_recall_auc: length mismatch");
  long positives = 0;
  for (char l : labels) positives += l ? 1 : 0;
  if (positives == 0) return std::numeric_limits<double>::quiet_NaN();

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  double auc = 0.0;
  double prev_recall = 0.0, prev_precision = 1.0;
  long tp = 0, predicted = 0;
  std::size_t idx = 0;
  while (idx < order.size()) {
    const double threshold = scores[order[idx]];
    while (idx < order.size() && scores[order[idx]] == threshold) {
      ++predicted;
      if (labels[order[idx]]) ++tp;
      ++idx;
    }
    const double recall = static_cast<double>(tp) / static_cast<double>(positives);
    const double precision = static_cast<double>(tp) / static_cast<double>(predicted);
    auc += (recall - prev_recall) * 0.5 * (precision + prev_precision);
    prev_recall = recall;
    prev_precision = precision;
  }
  return auc;
}

/// Binary-family fit metrics for one observed/replicate pair; tie
/// probabilities (dyad order) feed the PR curve.
inline BinaryMetrics metric_binary(const Network& obs, const Network& rep,
                                   std::span<const double> tie_probs) {
  require(obs.family == EdgeFamily::bernoulli_logit, "metric_binary: binary family required");
  require(rep.n_nodes == obs.n_nodes, "metric_binary: node count mismatch");
  const auto dyads = dyad_pairs(obs);
  require(tie_probs.size() == dyads.size(), "metric_binary: tie probability length mismatch");

  BinaryMetrics out;
  long tp = 0, fp = 0, fn = 0, mismatched = 0, obs_edges = 0, rep_edges = 0;
  std::vector<char> labels(dyads.size());
  for (std::size_t d = 0; d < dyads.size(); ++d) {
    const bool o = obs.at(dyads[d].first, dyads[d].second) > 0;
    const bool r = rep.at(dyads[d].first, dyads[d].second) > 0;
    labels[d] = o ? 1 : 0;
    obs_edges += o;
    rep_edges += r;
    tp += (o && r);
    fp += (!o && r);
    fn += (o && !r);
    mismatched += (o != r);
  }
  const double n_dyads = static_cast<double>(dyads.size());
  out.pr_auc = precision_recall_auc(tie_probs, labels);
  out.f1 = (2 * tp + fp + fn) == 0
               ? 1.0
               : 2.0 * static_cast<double>(tp) / static_cast<double>(2 * tp + fp + fn);
  const double d_obs = static_cast<double>(obs_edges) / n_dyads;
  const double d_rep = static_cast<double>(rep_edges) / n_dyads;
  out.density_sq_diff = (d_rep - d_obs) * (d_rep - d_obs);
  out.hamming = static_cast<double>(mismatched) / n_dyads;
  return out;
}

struct CountMetrics {
  double mad = 0.0;
  double tnr = 1.0;
  std::vector<double> log_positive_counts;  // sorted, replicate side
};

inline CountMetrics metric_count(const Network& obs, const Network& rep) {
  require(obs.family == EdgeFamily::poisson_log, "metric_count: count family required");
  require(rep.n_nodes == obs.n_nodes, "metric_count: node count mismatch");
  const auto dyads = dyad_pairs(obs);
  CountMetrics out;
  double abs_sum = 0.0;
  long obs_zero = 0, both_zero = 0;
  for (const auto& [i, j] : dyads) {
    const long o = obs.at(i, j), r = rep.at(i, j);
    abs_sum += std::abs(static_cast<double>(o - r));
    if (o == 0) {
      ++obs_zero;
      if (r == 0) ++both_zero;
    }
    if (r > 0) out.log_positive_counts.push_back(std::log(static_cast<double>(r)));
  }
  out.mad = abs_sum / static_cast<double>(dyads.size());
  out.tnr = obs_zero == 0 ? 1.0
                          : static_cast<double>(both_zero) / static_cast<double>(obs_zero);
  std::sort(out.log_positive_counts.begin(), out.log_positive_counts.end());
  return out;
}

/// Long-format PPC results: per network and replicate metric values, with
/// empty (edge-free) replicates flagged rather than excluded.
struct PpcReport {
  std::vector<std::string> network_labels;
  std::vector<std::map<std::string, std::vector<double>>> values;  // per network
  std::vector<int> empty_replicates;
  std::vector<std::vector<std::pair<int, double>>> ecdf_rows;  // count family
  std::vector<std::vector<double>> observed_log_counts;        // count family
  int n_replicates = 0;
};

/// Streams R replicates from the tail of a chain and accumulates the
/// family-appropriate metric set (plus the structural distance) per network.
inline PpcReport run_ppc(const std::vector<ModelState>& tail, const Multiplex& y,
                         int n_replicates, Rng& rng, bool with_distance = true) {
  require(n_replicates >= 1 && n_replicates <= static_cast<int>(tail.size()),
          "run_ppc: R must not exceed the trace length");
  const int n_networks = y.n_networks();
  const bool binary = y.family() == EdgeFamily::bernoulli_logit;
  const auto dyads = dyad_pairs(y.networks.front());

  PpcReport report;
  report.network_labels = y.labels;
  report.values.resize(n_networks);
  report.empty_replicates.assign(n_networks, 0);
  report.n_replicates = n_replicates;
  if (!binary) {
    report.ecdf_rows.resize(n_networks);
    report.observed_log_counts.resize(n_networks);
    for (int m = 0; m < n_networks; ++m) {
      for (const auto& [i, j] : dyads)
        if (y.networks[m].at(i, j) > 0)
          report.observed_log_counts[m].push_back(
              std::log(static_cast<double>(y.networks[m].at(i, j))));
      std::sort(report.observed_log_counts[m].begin(), report.observed_log_counts[m].end());
    }
  }

  std::vector<GraphSummary> obs_summary(n_networks);
  if (with_distance)
    for (int m = 0; m < n_networks; ++m) obs_summary[m] = summarize_graph(y.networks[m]);

  const std::size_t offset = tail.size() - static_cast<std::size_t>(n_replicates);
  for (int r = 0; r < n_replicates; ++r) {
    const ModelState& sample = tail[offset + r];
    for (int m = 0; m < n_networks; ++m) {
      const Network rep = simulate_network(sample, m, y.networks[m], rng);
      bool empty = true;
      for (long wv : rep.weights)
        if (wv > 0) {
          empty = false;
          break;
        }
      if (empty) ++report.empty_replicates[m];

      auto& vals = report.values[m];
      if (binary) {
        const std::vector<double> probs = tie_probabilities(sample, m, dyads, y.family());
        const BinaryMetrics bm = metric_binary(y.networks[m], rep, probs);
        vals["pr_auc"].push_back(bm.pr_auc);
        vals["f1"].push_back(bm.f1);
        vals["density_sq_diff"].push_back(bm.density_sq_diff);
        vals["hamming"].push_back(bm.hamming);
      } else {
        const CountMetrics cm = metric_count(y.networks[m], rep);
        vals["mad"].push_back(cm.mad);
        vals["tnr"].push_back(cm.tnr);
        for (double v : cm.log_positive_counts) report.ecdf_rows[m].emplace_back(r + 1, v);
      }
      if (with_distance)
        vals["distance"].push_back(
            schieber_distance(obs_summary[m], summarize_graph(rep)));
    }
  }
  return report;
}

struct MetricSummary {
  double median = 0.0;
  double iqr = 0.0;
  double mean = 0.0;
  double sd = 0.0;
};

inline MetricSummary summarize_metric(std::vector<double> values) {
  MetricSummary s;
  values.erase(std::remove_if(values.begin(), values.end(),
                              [](double v) { return !std::isfinite(v); }),
               values.end());
  if (values.empty()) return s;
  std::sort(values.begin(), values.end());
  auto quantile = [&](double q) {
    const double pos = q * (values.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (pos - lo) * (values[hi] - values[lo]);
  };
  s.median = quantile(0.5);
  s.iqr = quantile(0.75) - quantile(0.25);
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / values.size();
  double ss = 0.0;
  for (double v : values) ss += (v - s.mean) * (v - s.mean);
  s.sd = values.size() > 1 ? std::sqrt(ss / (values.size() - 1)) : 0.0;
  return s;
}

}  // namespace lapcom
