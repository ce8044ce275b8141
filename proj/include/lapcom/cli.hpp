#pragma once

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "lapcom/evaluation.hpp"
#include "lapcom/manifest.hpp"
#include "lapcom/postprocess.hpp"
#include "lapcom/trace_io.hpp"

namespace lapcom::cli {

namespace fs = std::filesystem;

inline nlohmann::json read_json_file(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw std::runtime_error("cannot open " + p.string());
  return nlohmann::json::parse(in);
}

// ---------------------------------------------------------------------------
// Configuration resolution: Table-style defaults computed from (M, N), then
// config-file values, then command-line flags.
// ---------------------------------------------------------------------------

struct FitSettings {
  SamplerConfig cfg;
  int n_chains = 1;
  int jobs = 0;
  bool perturb = true;
};

struct ConfigOverrides {
  std::optional<long> iters, burnin, thin;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> variant, init;
  std::optional<int> n_min, n_chains, jobs;
};

inline FitSettings resolve_fit_settings(int n_networks, int n_nodes,
                                        const std::optional<nlohmann::json>& file,
                                        const ConfigOverrides& cli) {
  FitSettings out;
  int n_min_override = 0;
  if (file && file->contains("n_min")) n_min_override = file->at("n_min").get<int>();
  if (cli.n_min) n_min_override = *cli.n_min;

  out.cfg.hyper = Hyperparams::defaults_for(n_networks, n_nodes, n_min_override);
  out.cfg.checkpoint_every = 10000;  // long runs resume from here
  if (file) {
    const nlohmann::json& j = *file;
    if (j.contains("iters")) out.cfg.n_iter = j.at("iters").get<long>();
    if (j.contains("burnin")) out.cfg.burn_in = j.at("burnin").get<long>();
    if (j.contains("thin")) out.cfg.thin = j.at("thin").get<long>();
    if (j.contains("seed")) out.cfg.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("variant")) out.cfg.variant = variant_from_name(j.at("variant"));
    if (j.contains("init")) out.cfg.init_method = init_method_from_name(j.at("init"));
    if (j.contains("adapt")) out.cfg.adapt = j.at("adapt").get<bool>();
    if (j.contains("n_chains")) out.n_chains = j.at("n_chains").get<int>();
    if (j.contains("jobs")) out.jobs = j.at("jobs").get<int>();
    if (j.contains("perturb")) out.perturb = j.at("perturb").get<bool>();
    if (j.contains("checkpoint_every"))
      out.cfg.checkpoint_every = j.at("checkpoint_every").get<long>();
    if (j.contains("hyper")) {
      // Partial override on top of the data-derived defaults.
      nlohmann::json merged;
      to_json(merged, out.cfg.hyper);
      merged.update(j.at("hyper"));
      from_json(merged, out.cfg.hyper);
    }
  }
  if (cli.iters) out.cfg.n_iter = *cli.iters;
  if (cli.burnin) out.cfg.burn_in = *cli.burnin;
  if (cli.thin) out.cfg.thin = *cli.thin;
  if (cli.seed) out.cfg.seed = *cli.seed;
  if (cli.variant) out.cfg.variant = variant_from_name(*cli.variant);
  if (cli.init) out.cfg.init_method = init_method_from_name(*cli.init);
  if (cli.n_chains) out.n_chains = *cli.n_chains;
  if (cli.jobs) out.jobs = *cli.jobs;
  out.cfg.validate();
  return out;
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

struct SimulateOptions {
  std::string preset;     // one of A-H, I-V
  std::string spec_file;  // or an explicit ScenarioSpec JSON
  std::uint64_t seed = 1;
  std::string out_dir;
};

inline void write_truth(const ScenarioTruth& truth, const fs::path& dir) {
  {
    auto out = detail::open_out(dir / "truth_C.csv");
    out << "m,label\n";
    for (std::size_t m = 0; m < truth.c_star.size(); ++m)
      out << (m + 1) << ',' << (truth.c_star[m] + 1) << '\n';
  }
  {
    auto out = detail::open_out(dir / "truth_S.csv");
    out << "g,i,label\n";
    for (std::size_t g = 0; g < truth.s_star.size(); ++g)
      for (std::size_t i = 0; i < truth.s_star[g].size(); ++i)
        out << (g + 1) << ',' << (i + 1) << ',' << (truth.s_star[g][i] + 1) << '\n';
  }
  {
    auto out = detail::open_out(dir / "truth_Z.csv");
    out << "g,i,x,y\n";
    for (std::size_t g = 0; g < truth.z_star.size(); ++g)
      for (std::size_t i = 0; i < truth.z_star[g].size(); ++i)
        out << (g + 1) << ',' << (i + 1) << ',' << detail::fmt_double(truth.z_star[g][i].x)
            << ',' << detail::fmt_double(truth.z_star[g][i].y) << '\n';
  }
}

struct LoadedTruth {
  std::vector<int> c_star;
  std::vector<std::vector<int>> s_star;
  std::vector<std::vector<Vec2>> z_star;
};

inline LoadedTruth load_truth(const fs::path& dir) {
  LoadedTruth t;
  detail::for_each_csv_row(dir / "truth_C.csv", [&](const std::vector<std::string>& f) {
    t.c_star.push_back(std::stoi(f.at(1)) - 1);
  });
  detail::for_each_csv_row(dir / "truth_S.csv", [&](const std::vector<std::string>& f) {
    const std::size_t g = std::stoul(f.at(0));
    if (t.s_star.size() < g) t.s_star.resize(g);
    t.s_star[g - 1].push_back(std::stoi(f.at(2)) - 1);
  });
  detail::for_each_csv_row(dir / "truth_Z.csv", [&](const std::vector<std::string>& f) {
    const std::size_t g = std::stoul(f.at(0));
    if (t.z_star.size() < g) t.z_star.resize(g);
    t.z_star[g - 1].emplace_back(std::stod(f.at(2)), std::stod(f.at(3)));
  });
  return t;
}

inline void cmd_simulate(const SimulateOptions& opt) {
  const auto start = std::chrono::steady_clock::now();
  ScenarioSpec spec;
  if (!opt.preset.empty()) {
    spec = scenario_preset(opt.preset);
  } else if (!opt.spec_file.empty()) {
    from_json(read_json_file(opt.spec_file), spec);
  } else {
    throw std::invalid_argument("simulate: provide --preset or --spec");
  }
  spec.seed = opt.seed;

  const GeneratedScenario gen = generate_scenario(spec);
  const fs::path out(opt.out_dir);
  fs::create_directories(out);
  save_multiplex(gen.multiplex, out);
  write_truth(gen.truth, out);
  {
    nlohmann::json j;
    to_json(j, spec);
    detail::open_out(out / "scenario.json") << j.dump(2) << '\n';
  }

  RunManifest manifest;
  manifest.command = "simulate";
  manifest.seed = opt.seed;
  nlohmann::json spec_json;
  to_json(spec_json, spec);
  manifest.config_digest = digest_bytes(spec_json.dump());
  manifest.data_digest = digest_directory(out);
  for (const std::string& label : gen.multiplex.labels) manifest.artifacts.push_back(label + ".csv");
  manifest.artifacts.insert(manifest.artifacts.end(),
                            {"multiplex.json", "truth_C.csv", "truth_S.csv", "truth_Z.csv"});
  manifest.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  save_manifest(manifest, out);
}

// ---------------------------------------------------------------------------
// fit
// ---------------------------------------------------------------------------

struct FitOptions {
  std::string data_dir;
  std::string config_file;
  std::string out_dir;
  ConfigOverrides overrides;
  bool quiet = false;
};

inline void cmd_fit(const FitOptions& opt) {
  const auto start = std::chrono::steady_clock::now();
  const Multiplex y = load_multiplex(opt.data_dir);
  std::optional<nlohmann::json> file;
  if (!opt.config_file.empty()) file = read_json_file(opt.config_file);
  FitSettings settings = resolve_fit_settings(y.n_networks(), y.n_nodes(), file, opt.overrides);

  const fs::path out(opt.out_dir);
  fs::create_directories(out);
  if (settings.cfg.checkpoint_every > 0) settings.cfg.checkpoint_path = "";  // set per chain

  std::vector<Trace> traces(settings.n_chains);
  {
    const int workers =
        std::max(1, std::min({settings.n_chains,
                              settings.jobs > 0 ? settings.jobs : thread_cap_from_env(),
                              thread_cap_from_env()}));
    std::atomic<int> next{0};
    std::mutex log_mutex;
    auto work = [&]() {
      for (;;) {
        const int c = next.fetch_add(1);
        if (c >= settings.n_chains) return;
        SamplerConfig cfg = settings.cfg;
        cfg.seed = settings.cfg.seed + static_cast<std::uint64_t>(c);
        if (cfg.checkpoint_every > 0) {
          char name[32];
          std::snprintf(name, sizeof(name), "chain_%02d.checkpoint", c);
          cfg.checkpoint_path = (out / name).string();
        }
        traces[c] = run_chain(y, cfg, settings.perturb && c > 0);
        if (!opt.quiet) {
          std::lock_guard<std::mutex> lock(log_mutex);
          std::cerr << "chain " << c << " finished: ";
          for (const auto& [block, rate] : traces[c].acceptance_rates)
            std::cerr << block << '=' << rate << ' ';
          std::cerr << '\n';
        }
      }
    };
    if (workers == 1) {
      work();
    } else {
      std::vector<std::thread> pool;
      for (int wk = 0; wk < workers; ++wk) pool.emplace_back(work);
      for (std::thread& th : pool) th.join();
    }
  }

  RunManifest manifest;
  manifest.command = "fit";
  manifest.seed = settings.cfg.seed;
  {
    nlohmann::json cfg_json;
    to_json(cfg_json, settings.cfg);
    manifest.config_digest = digest_bytes(cfg_json.dump());
  }
  manifest.data_digest = digest_directory(opt.data_dir);
  try {
    const RunManifest upstream = load_manifest(opt.data_dir);
    manifest.inputs["data_manifest_digest"] = digest_file(fs::path(opt.data_dir) / "manifest.json");
    manifest.inputs["data_command"] = upstream.command;
    if (upstream.data_digest != manifest.data_digest)
      throw std::runtime_error("data digest mismatch: directory was modified after simulate");
  } catch (const std::runtime_error& e) {
    if (std::string(e.what()).find("missing manifest") == std::string::npos) throw;
  }
  for (int c = 0; c < settings.n_chains; ++c) {
    char name[24];
    std::snprintf(name, sizeof(name), "chain_%02d", c);
    save_trace(traces[c], out / name);
    manifest.artifacts.push_back(name);
  }
  manifest.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  save_manifest(manifest, out);
}

// ---------------------------------------------------------------------------
// postprocess
// ---------------------------------------------------------------------------

struct PostprocessOptions {
  std::vector<std::string> trace_dirs;  // directories holding chain_XX bundles
  std::string data_dir;
  std::string out_dir;
  std::uint64_t seed = 17;  // drives the relabelling k-means restarts
};

inline std::vector<fs::path> find_chain_dirs(const std::vector<std::string>& trace_dirs) {
  std::vector<fs::path> chains;
  for (const std::string& dir : trace_dirs) {
    std::vector<fs::path> local;
    for (const auto& entry : fs::directory_iterator(dir))
      if (entry.is_directory() && entry.path().filename().string().rfind("chain_", 0) == 0)
        local.push_back(entry.path());
    std::sort(local.begin(), local.end());
    if (local.empty() && fs::exists(fs::path(dir) / "config.json"))
      local.push_back(dir);  // a bare chain bundle
    chains.insert(chains.end(), local.begin(), local.end());
  }
  if (chains.empty()) throw std::runtime_error("postprocess: no chain bundles found");
  return chains;
}

inline void save_solution(const ReconcileResult& rec, const std::vector<fs::path>& chain_dirs,
                          const fs::path& out) {
  fs::create_directories(out);
  const ClusteringSolution& sol = rec.solution;
  nlohmann::json j;
  j["selected_chain"] = rec.selected_chain;
  j["selected_chain_dir"] = chain_dirs[rec.selected_chain].string();
  j["modal_G_plus"] = rec.modal_g_plus;
  j["G_hat_plus"] = sol.g_hat_plus;
  std::vector<int> c1(sol.c_hat_star.size());
  for (std::size_t m = 0; m < c1.size(); ++m) c1[m] = sol.c_hat_star[m] + 1;
  j["C_hat_star"] = c1;
  j["K_hat_plus_pre"] = sol.k_hat_plus_pre;
  j["K_hat_plus_post"] = sol.k_hat_plus_post;
  nlohmann::json s_json = nlohmann::json::array();
  for (const auto& s : sol.s_hat_star) {
    std::vector<int> s1(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) s1[i] = s[i] + 1;
    s_json.push_back(s1);
  }
  j["S_hat_star"] = s_json;
  j["cross_chain_ari"] = rec.cross_chain_ari;
  j["retained_chains"] = rec.retained_chains;
  j["discarded_chains"] = rec.discarded_chains;
  j["alpha_hat"] = sol.alpha_hat;
  j["e_hat"] = sol.e_hat;
  j["tau_hat"] = sol.tau_hat;
  j["w_hat"] = sol.w_hat;
  j["log_posterior_at_estimate"] = sol.log_posterior_at_estimate;
  long valid = 0;
  for (char v : sol.valid_mask) valid += v;
  j["valid_iterations"] = valid;
  detail::open_out(out / "solution.json") << j.dump(2) << '\n';

  for (std::size_t g = 0; g < sol.z_hat.size(); ++g) {
    char name[32];
    std::snprintf(name, sizeof(name), "Z_hat_%zu.csv", g + 1);
    auto zout = detail::open_out(out / name);
    zout << "i,x,y\n";
    for (std::size_t i = 0; i < sol.z_hat[g].size(); ++i)
      zout << (i + 1) << ',' << detail::fmt_double(sol.z_hat[g][i].x) << ','
           << detail::fmt_double(sol.z_hat[g][i].y) << '\n';
  }
  {
    auto tout = detail::open_out(out / "transforms.csv");
    tout << "cluster,draw,scale,r11,r12,r21,r22,tx,ty\n";
    for (std::size_t g = 0; g < sol.transforms.size(); ++g)
      for (std::size_t t = 0; t < sol.transforms[g].size(); ++t) {
        const ProcrustesTransform& tf = sol.transforms[g][t];
        tout << (g + 1) << ',' << (t + 1) << ',' << detail::fmt_double(tf.scale) << ','
             << detail::fmt_double(tf.rot[0][0]) << ',' << detail::fmt_double(tf.rot[0][1])
             << ',' << detail::fmt_double(tf.rot[1][0]) << ','
             << detail::fmt_double(tf.rot[1][1]) << ',' << detail::fmt_double(tf.translation.x)
             << ',' << detail::fmt_double(tf.translation.y) << '\n';
      }
  }
}

struct SolutionBundle {
  int selected_chain = 0;
  std::string selected_chain_dir;
  int g_hat_plus = 0;
  std::vector<int> c_hat_star;
  std::vector<std::vector<int>> s_hat_star;
  std::vector<int> k_hat_plus_pre, k_hat_plus_post;
  std::vector<std::vector<Vec2>> z_hat;
};

inline SolutionBundle load_solution(const fs::path& dir) {
  SolutionBundle b;
  const nlohmann::json j = read_json_file(dir / "solution.json");
  b.selected_chain = j.at("selected_chain").get<int>();
  b.selected_chain_dir = j.value("selected_chain_dir", "");
  b.g_hat_plus = j.at("G_hat_plus").get<int>();
  for (int v : j.at("C_hat_star").get<std::vector<int>>()) b.c_hat_star.push_back(v - 1);
  for (const auto& row : j.at("S_hat_star")) {
    std::vector<int> s;
    for (int v : row.get<std::vector<int>>()) s.push_back(v - 1);
    b.s_hat_star.push_back(std::move(s));
  }
  j.at("K_hat_plus_pre").get_to(b.k_hat_plus_pre);
  j.at("K_hat_plus_post").get_to(b.k_hat_plus_post);
  for (std::size_t g = 1;; ++g) {
    char name[32];
    std::snprintf(name, sizeof(name), "Z_hat_%zu.csv", g);
    if (!fs::exists(dir / name)) break;
    std::vector<Vec2> z;
    detail::for_each_csv_row(dir / name, [&](const std::vector<std::string>& f) {
      z.emplace_back(std::stod(f.at(1)), std::stod(f.at(2)));
    });
    b.z_hat.push_back(std::move(z));
  }
  return b;
}

inline void cmd_postprocess(const PostprocessOptions& opt) {
  const auto start = std::chrono::steady_clock::now();
  const std::vector<fs::path> chain_dirs = find_chain_dirs(opt.trace_dirs);
  const Multiplex y = load_multiplex(opt.data_dir);
  std::vector<Trace> traces;
  traces.reserve(chain_dirs.size());
  for (const fs::path& dir : chain_dirs) traces.push_back(load_trace(dir));

  Rng rng(opt.seed);
  const ReconcileResult rec = reconcile_chains(traces, y, rng);
  const fs::path out(opt.out_dir);
  save_solution(rec, chain_dirs, out);
  {
    auto log = detail::open_out(out / "discarded.log");
    for (int c : rec.discarded_chains)
      log << "chain " << c << " (" << chain_dirs[c].string() << ") discarded\n";
  }

  RunManifest manifest;
  manifest.command = "postprocess";
  manifest.seed = opt.seed;
  manifest.data_digest = digest_directory(opt.data_dir);
  manifest.config_digest = digest_bytes(std::to_string(opt.seed));
  for (const fs::path& dir : chain_dirs) {
    try {
      manifest.inputs[dir.string()] = digest_file(dir.parent_path() / "manifest.json");
    } catch (const std::runtime_error&) {
    }
  }
  manifest.artifacts = {"solution.json", "transforms.csv", "discarded.log"};
  manifest.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  save_manifest(manifest, out);
}

// ---------------------------------------------------------------------------
// ppc
// ---------------------------------------------------------------------------

struct PpcOptions {
  std::string solution_dir;
  std::string trace_dir;  // optional; defaults to the solution's recorded chain
  std::string data_dir;
  int n_replicates = 500;
  std::uint64_t seed = 23;
  std::string out_dir;
};

inline void save_ppc_report(const PpcReport& report, const fs::path& out) {
  fs::create_directories(out);
  {
    auto csv = detail::open_out(out / "ppc_report.csv");
    csv << "network,replicate,metric,value\n";
    for (std::size_t m = 0; m < report.values.size(); ++m)
      for (const auto& [metric, vals] : report.values[m])
        for (std::size_t r = 0; r < vals.size(); ++r)
          csv << report.network_labels[m] << ',' << (r + 1) << ',' << metric << ','
              << detail::fmt_double(vals[r]) << '\n';
  }
  {
    nlohmann::json j;
    j["n_replicates"] = report.n_replicates;
    for (std::size_t m = 0; m < report.values.size(); ++m) {
      nlohmann::json net;
      for (const auto& [metric, vals] : report.values[m]) {
        const MetricSummary s = summarize_metric(vals);
        net[metric] = {{"median", s.median}, {"iqr", s.iqr}, {"mean", s.mean}, {"sd", s.sd}};
      }
      net["empty_replicates"] = report.empty_replicates[m];
      j["networks"][report.network_labels[m]] = net;
    }
    detail::open_out(out / "ppc_summary.json") << j.dump(2) << '\n';
  }
  if (!report.ecdf_rows.empty()) {
    fs::create_directories(out / "ecdf");
    for (std::size_t m = 0; m < report.ecdf_rows.size(); ++m) {
      auto csv = detail::open_out(out / "ecdf" / (report.network_labels[m] + ".csv"));
      csv << "replicate,log_count\n";  // replicate 0 is the observed network
      for (double v : report.observed_log_counts[m]) csv << "0," << detail::fmt_double(v) << '\n';
      for (const auto& [r, v] : report.ecdf_rows[m])
        csv << r << ',' << detail::fmt_double(v) << '\n';
    }
  }
}

inline void cmd_ppc(const PpcOptions& opt) {
  const auto start = std::chrono::steady_clock::now();
  const SolutionBundle sol = load_solution(opt.solution_dir);
  const Multiplex y = load_multiplex(opt.data_dir);

  fs::path chain_dir;
  if (!opt.trace_dir.empty()) {
    const std::vector<fs::path> chains = find_chain_dirs({opt.trace_dir});
    chain_dir = chains.at(static_cast<std::size_t>(sol.selected_chain) < chains.size()
                              ? sol.selected_chain
                              : 0);
  } else if (!sol.selected_chain_dir.empty()) {
    chain_dir = sol.selected_chain_dir;
  } else {
    throw std::invalid_argument("ppc: no trace directory available");
  }
  const Trace trace = load_trace(chain_dir);
  if (opt.n_replicates > static_cast<int>(trace.samples.size()))
    throw std::invalid_argument("ppc: R exceeds the trace length");

  Rng rng(opt.seed);
  const PpcReport report = run_ppc(trace.samples, y, opt.n_replicates, rng);
  const fs::path out(opt.out_dir);
  save_ppc_report(report, out);

  RunManifest manifest;
  manifest.command = "ppc";
  manifest.seed = opt.seed;
  manifest.data_digest = digest_directory(opt.data_dir);
  manifest.config_digest = digest_bytes(std::to_string(opt.n_replicates));
  try {
    manifest.inputs["solution_manifest_digest"] =
        digest_file(fs::path(opt.solution_dir) / "manifest.json");
  } catch (const std::runtime_error&) {
  }
  try {
    manifest.inputs["trace_manifest_digest"] =
        digest_file(chain_dir.parent_path() / "manifest.json");
  } catch (const std::runtime_error&) {
  }
  manifest.artifacts = {"ppc_report.csv", "ppc_summary.json"};
  manifest.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  save_manifest(manifest, out);
}

// ---------------------------------------------------------------------------
// evaluate
// ---------------------------------------------------------------------------

struct EvaluateOptions {
  std::string solution_dir;
  std::string truth_dir;
  std::string out_dir;
};

/// Network ARI plus matched per-cluster node ARIs and Procrustes
/// correlations against the simulation truth.
inline nlohmann::json evaluate_solution(const SolutionBundle& sol, const LoadedTruth& truth) {
  nlohmann::json j;
  j["network_ari"] = ari(sol.c_hat_star, truth.c_star);
  const std::vector<int> est_canon = canonicalize_labels(sol.c_hat_star);
  const std::vector<int> map = match_labels(est_canon, truth.c_star);

  nlohmann::json clusters = nlohmann::json::array();
  // Estimated cluster slots are the labels appearing in C_hat_star.
  std::vector<int> slot_of_canon(count_distinct_labels(est_canon), -1);
  for (std::size_t m = 0; m < est_canon.size(); ++m)
    slot_of_canon[est_canon[m]] = sol.c_hat_star[m];
  for (std::size_t canon = 0; canon < slot_of_canon.size(); ++canon) {
    const int slot = slot_of_canon[canon];
    const int true_g = map[canon];
    nlohmann::json c;
    c["estimated_cluster"] = slot + 1;
    c["matched_true_cluster"] = true_g + 1;
    if (true_g < static_cast<int>(truth.s_star.size()) && slot >= 0 &&
        slot < static_cast<int>(sol.s_hat_star.size())) {
      c["node_ari"] = ari(sol.s_hat_star[slot], truth.s_star[true_g]);
      if (slot < static_cast<int>(sol.z_hat.size()))
        c["procrustes_correlation"] =
            procrustes_correlation(sol.z_hat[slot], truth.z_star[true_g]);
    }
    clusters.push_back(c);
  }
  j["clusters"] = clusters;
  return j;
}

inline void cmd_evaluate(const EvaluateOptions& opt) {
  const SolutionBundle sol = load_solution(opt.solution_dir);
  if (!fs::exists(fs::path(opt.truth_dir) / "truth_C.csv"))
    throw std::invalid_argument("evaluate: truth labels not found in " + opt.truth_dir);
  const LoadedTruth truth = load_truth(opt.truth_dir);
  const nlohmann::json metrics = evaluate_solution(sol, truth);
  fs::create_directories(opt.out_dir);
  detail::open_out(fs::path(opt.out_dir) / "metrics.json") << metrics.dump(2) << '\n';
}

}  // namespace lapcom::cli
