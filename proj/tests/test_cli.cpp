#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "lapcom/cli.hpp"

using namespace lapcom;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("lapcom_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

/// Writes a small scenario spec file for fast end-to-end runs.
fs::path write_tiny_spec(const fs::path& dir, EdgeFamily family) {
  ScenarioSpec spec = scenario_preset(family == EdgeFamily::poisson_log ? "A" : "I");
  spec.n_networks = 6;
  spec.n_nodes = 10;
  spec.alpha = 0.6;
  const fs::path file = dir / "spec.json";
  nlohmann::json j;
  to_json(j, spec);
  std::ofstream(file) << j.dump();
  return file;
}

void compare_dirs_excluding_manifest(const fs::path& a, const fs::path& b) {
  for (const auto& entry : fs::recursive_directory_iterator(a)) {
    if (!entry.is_regular_file()) continue;
    if (entry.path().filename() == "manifest.json") continue;
    const fs::path rel = fs::relative(entry.path(), a);
    EXPECT_EQ(slurp(entry.path()), slurp(b / rel)) << rel;
  }
}

}  // namespace

TEST(CmdSimulate, PresetWritesExpectedShape) {
  const fs::path out = temp_dir("sim_a");
  cli::cmd_simulate({.preset = "A", .spec_file = "", .seed = 7, .out_dir = out.string()});
  const Multiplex mx = load_multiplex(out);
  EXPECT_EQ(mx.n_networks(), 20);
  EXPECT_EQ(mx.n_nodes(), 30);
  EXPECT_EQ(mx.family(), EdgeFamily::poisson_log);
  EXPECT_TRUE(fs::exists(out / "truth_C.csv"));
  EXPECT_TRUE(fs::exists(out / "manifest.json"));
  const RunManifest manifest = load_manifest(out);
  EXPECT_EQ(manifest.command, "simulate");
  EXPECT_EQ(manifest.data_digest, digest_directory(out));
}

TEST(CmdSimulate, BinaryPresetFamily) {
  const fs::path out = temp_dir("sim_i");
  cli::cmd_simulate({.preset = "I", .spec_file = "", .seed = 7, .out_dir = out.string()});
  EXPECT_EQ(load_multiplex(out).family(), EdgeFamily::bernoulli_logit);
}

TEST(CmdSimulate, DeterministicAcrossRuns) {
  const fs::path out1 = temp_dir("sim_det1");
  const fs::path out2 = temp_dir("sim_det2");
  cli::cmd_simulate({.preset = "C", .spec_file = "", .seed = 11, .out_dir = out1.string()});
  cli::cmd_simulate({.preset = "C", .spec_file = "", .seed = 11, .out_dir = out2.string()});
  compare_dirs_excluding_manifest(out1, out2);
}

TEST(CmdSimulate, UnknownPresetIsUsageError) {
  EXPECT_THROW(
      cli::cmd_simulate({.preset = "Z", .spec_file = "", .seed = 1, .out_dir = "/tmp/x"}),
      std::invalid_argument);
}

TEST(ConfigResolution, TableDefaultsFromData) {
  // Preset A data: N=30 < 60 so u = 11; M=20 < 60 so G_max = 5.
  const cli::FitSettings s = cli::resolve_fit_settings(20, 30, std::nullopt, {});
  EXPECT_DOUBLE_EQ(s.cfg.hyper.u_sigma2, 11.0);
  EXPECT_EQ(s.cfg.hyper.G_max, 5);
  EXPECT_EQ(s.cfg.hyper.K_max, 8);
}

TEST(ConfigResolution, FileAndFlagsOverride) {
  nlohmann::json file{{"iters", 500},  {"burnin", 100},  {"thin", 5},
                      {"seed", 99},    {"n_chains", 3},  {"variant", "mono-lapcm"},
                      {"hyper", {{"delta_Z", 0.37}}}};
  cli::ConfigOverrides flags;
  flags.iters = 600;
  flags.variant = "lapcom";
  const cli::FitSettings s = cli::resolve_fit_settings(20, 30, file, flags);
  EXPECT_EQ(s.cfg.n_iter, 600);          // flag beats file
  EXPECT_EQ(s.cfg.burn_in, 100);         // file value kept
  EXPECT_EQ(s.cfg.seed, 99u);
  EXPECT_EQ(s.n_chains, 3);
  EXPECT_EQ(s.cfg.variant, Variant::lapcom);
  EXPECT_DOUBLE_EQ(s.cfg.hyper.delta_Z, 0.37);   // partial hyper override
  EXPECT_DOUBLE_EQ(s.cfg.hyper.u_sigma2, 11.0);  // untouched default
}

TEST(Pipeline, EndToEndTinyRun) {
  const fs::path base = temp_dir("pipeline");
  const fs::path spec = write_tiny_spec(base, EdgeFamily::poisson_log);

  const fs::path data = base / "data";
  cli::cmd_simulate({.preset = "", .spec_file = spec.string(), .seed = 5,
                     .out_dir = data.string()});

  cli::FitOptions fit;
  fit.data_dir = data.string();
  fit.out_dir = (base / "fit").string();
  fit.quiet = true;
  fit.overrides.iters = 300;
  fit.overrides.burnin = 150;
  fit.overrides.thin = 10;
  fit.overrides.seed = 42;
  fit.overrides.n_chains = 2;
  cli::cmd_fit(fit);
  EXPECT_TRUE(fs::exists(base / "fit" / "chain_00" / "states" / "Z.csv"));
  EXPECT_TRUE(fs::exists(base / "fit" / "chain_01" / "logpost.csv"));

  // Manifests chain together: fit recorded the data manifest digest.
  const RunManifest fit_manifest = load_manifest(base / "fit");
  EXPECT_EQ(fit_manifest.command, "fit");
  EXPECT_EQ(fit_manifest.inputs.at("data_manifest_digest").get<std::string>(),
            digest_file(data / "manifest.json"));

  cli::PostprocessOptions post;
  post.trace_dirs = {(base / "fit").string()};
  post.data_dir = data.string();
  post.out_dir = (base / "solution").string();
  cli::cmd_postprocess(post);
  EXPECT_TRUE(fs::exists(base / "solution" / "solution.json"));
  EXPECT_TRUE(fs::exists(base / "solution" / "Z_hat_1.csv"));
  EXPECT_TRUE(fs::exists(base / "solution" / "transforms.csv"));

  cli::PpcOptions ppc;
  ppc.solution_dir = (base / "solution").string();
  ppc.trace_dir = (base / "fit").string();
  ppc.data_dir = data.string();
  ppc.n_replicates = 3;
  ppc.out_dir = (base / "ppc").string();
  cli::cmd_ppc(ppc);
  EXPECT_TRUE(fs::exists(base / "ppc" / "ppc_report.csv"));
  EXPECT_TRUE(fs::exists(base / "ppc" / "ppc_summary.json"));
  EXPECT_TRUE(fs::exists(base / "ppc" / "ecdf"));  // count family

  cli::EvaluateOptions ev;
  ev.solution_dir = (base / "solution").string();
  ev.truth_dir = data.string();
  ev.out_dir = (base / "metrics").string();
  cli::cmd_evaluate(ev);
  const nlohmann::json metrics = cli::read_json_file(base / "metrics" / "metrics.json");
  EXPECT_TRUE(metrics.contains("network_ari"));
  EXPECT_TRUE(metrics.contains("clusters"));
}

TEST(Pipeline, FitIsIdempotent) {
  const fs::path base = temp_dir("idempotent");
  const fs::path spec = write_tiny_spec(base, EdgeFamily::poisson_log);
  const fs::path data = base / "data";
  cli::cmd_simulate({.preset = "", .spec_file = spec.string(), .seed = 5,
                     .out_dir = data.string()});
  cli::FitOptions fit;
  fit.data_dir = data.string();
  fit.quiet = true;
  fit.overrides.iters = 100;
  fit.overrides.burnin = 50;
  fit.overrides.thin = 10;
  fit.overrides.seed = 9;
  fit.overrides.n_chains = 1;
  fit.out_dir = (base / "fit1").string();
  cli::cmd_fit(fit);
  fit.out_dir = (base / "fit2").string();
  cli::cmd_fit(fit);
  compare_dirs_excluding_manifest(base / "fit1", base / "fit2");
}

TEST(Pipeline, MonoVariantFlagDisablesNodeLevel) {
  const fs::path base = temp_dir("mono");
  const fs::path spec = write_tiny_spec(base, EdgeFamily::poisson_log);
  const fs::path data = base / "data";
  cli::cmd_simulate({.preset = "", .spec_file = spec.string(), .seed = 5,
                     .out_dir = data.string()});
  cli::FitOptions fit;
  fit.data_dir = data.string();
  fit.out_dir = (base / "fit").string();
  fit.quiet = true;
  fit.overrides.iters = 100;
  fit.overrides.burnin = 50;
  fit.overrides.thin = 10;
  fit.overrides.n_chains = 1;
  fit.overrides.variant = "mono-lapcm";
  cli::cmd_fit(fit);
  const Trace trace = load_trace(base / "fit" / "chain_00");
  EXPECT_EQ(trace.config.variant, Variant::mono_lapcm);
  for (const ModelState& st : trace.samples)
    for (const LatentComponent& comp : st.comps) EXPECT_EQ(comp.K, 1);
}

TEST(Evaluate, PerfectAndLabelSwappedRecovery) {
  // A solution bundle constructed directly from the truth must score 1.0,
  // and so must a label-swapped copy of it.
  ScenarioSpec spec = scenario_preset("C");
  spec.n_networks = 8;
  spec.n_nodes = 10;
  spec.seed = 31;
  const GeneratedScenario gen = generate_scenario(spec);

  cli::SolutionBundle sol;
  sol.g_hat_plus = 2;
  sol.c_hat_star = gen.truth.c_star;
  sol.s_hat_star = gen.truth.s_star;
  sol.z_hat = gen.truth.z_star;
  cli::LoadedTruth truth;
  truth.c_star = gen.truth.c_star;
  truth.s_star = gen.truth.s_star;
  truth.z_star = gen.truth.z_star;

  nlohmann::json metrics = cli::evaluate_solution(sol, truth);
  EXPECT_DOUBLE_EQ(metrics.at("network_ari").get<double>(), 1.0);
  for (const auto& c : metrics.at("clusters")) {
    EXPECT_DOUBLE_EQ(c.at("node_ari").get<double>(), 1.0);
    EXPECT_NEAR(c.at("procrustes_correlation").get<double>(), 1.0, 1e-10);
  }

  // Swap the estimated labels: ARI and matching are label-free.
  cli::SolutionBundle swapped = sol;
  for (int& c : swapped.c_hat_star) c = 1 - c;
  std::swap(swapped.s_hat_star[0], swapped.s_hat_star[1]);
  std::swap(swapped.z_hat[0], swapped.z_hat[1]);
  metrics = cli::evaluate_solution(swapped, truth);
  EXPECT_DOUBLE_EQ(metrics.at("network_ari").get<double>(), 1.0);
  for (const auto& c : metrics.at("clusters"))
    EXPECT_DOUBLE_EQ(c.at("node_ari").get<double>(), 1.0);
}

TEST(Evaluate, MissingTruthIsUsageError) {
  const fs::path base = temp_dir("no_truth");
  fs::create_directories(base / "sol");
  std::ofstream(base / "sol" / "solution.json")
      << R"({"selected_chain":0,"G_hat_plus":1,"C_hat_star":[1],"S_hat_star":[[1]],)"
      << R"("K_hat_plus_pre":[1],"K_hat_plus_post":[1]})";
  cli::EvaluateOptions ev;
  ev.solution_dir = (base / "sol").string();
  ev.truth_dir = (base / "nowhere").string();
  ev.out_dir = (base / "out").string();
  EXPECT_THROW(cli::cmd_evaluate(ev), std::invalid_argument);
}

TEST(Ppc, SummaryMatchesReportRecomputation) {
  // Aggregates in ppc_summary.json must equal direct recomputation from
  // the long-format ppc_report.csv.
  const fs::path base = temp_dir("ppc_agg");
  const fs::path spec = write_tiny_spec(base, EdgeFamily::poisson_log);
  const fs::path data = base / "data";
  cli::cmd_simulate({.preset = "", .spec_file = spec.string(), .seed = 5,
                     .out_dir = data.string()});
  cli::FitOptions fit;
  fit.data_dir = data.string();
  fit.out_dir = (base / "fit").string();
  fit.quiet = true;
  fit.overrides.iters = 200;
  fit.overrides.burnin = 100;
  fit.overrides.thin = 10;
  fit.overrides.n_chains = 1;
  cli::cmd_fit(fit);
  cli::PostprocessOptions post;
  post.trace_dirs = {(base / "fit").string()};
  post.data_dir = data.string();
  post.out_dir = (base / "solution").string();
  cli::cmd_postprocess(post);
  cli::PpcOptions ppc;
  ppc.solution_dir = (base / "solution").string();
  ppc.trace_dir = (base / "fit").string();
  ppc.data_dir = data.string();
  ppc.n_replicates = 10;
  ppc.out_dir = (base / "ppc").string();
  cli::cmd_ppc(ppc);

  // Recompute per-network medians and means from the CSV.
  std::map<std::string, std::map<std::string, std::vector<double>>> rows;
  lapcom::detail::for_each_csv_row(base / "ppc" / "ppc_report.csv",
                                   [&](const std::vector<std::string>& f) {
                                     rows[f.at(0)][f.at(2)].push_back(std::stod(f.at(3)));
                                   });
  const nlohmann::json summary = cli::read_json_file(base / "ppc" / "ppc_summary.json");
  ASSERT_FALSE(rows.empty());
  for (const auto& [network, metrics] : rows) {
    for (const auto& [metric, values] : metrics) {
      ASSERT_EQ(values.size(), 10u);
      std::vector<double> sorted = values;
      std::sort(sorted.begin(), sorted.end());
      const double median = 0.5 * (sorted[4] + sorted[5]);
      double mean = 0.0;
      for (double v : values) mean += v;
      mean /= values.size();
      const nlohmann::json& cell = summary.at("networks").at(network).at(metric);
      EXPECT_NEAR(cell.at("median").get<double>(), median, 1e-12) << network << "/" << metric;
      EXPECT_NEAR(cell.at("mean").get<double>(), mean, 1e-12) << network << "/" << metric;
    }
  }
}

TEST(Ppc, ReplicateCountValidated) {
  const fs::path base = temp_dir("ppc_r");
  const fs::path spec = write_tiny_spec(base, EdgeFamily::poisson_log);
  const fs::path data = base / "data";
  cli::cmd_simulate({.preset = "", .spec_file = spec.string(), .seed = 5,
                     .out_dir = data.string()});
  cli::FitOptions fit;
  fit.data_dir = data.string();
  fit.out_dir = (base / "fit").string();
  fit.quiet = true;
  fit.overrides.iters = 50;
  fit.overrides.burnin = 20;
  fit.overrides.thin = 10;
  fit.overrides.n_chains = 1;
  cli::cmd_fit(fit);
  cli::PostprocessOptions post;
  post.trace_dirs = {(base / "fit").string()};
  post.data_dir = data.string();
  post.out_dir = (base / "solution").string();
  cli::cmd_postprocess(post);

  cli::PpcOptions ppc;
  ppc.solution_dir = (base / "solution").string();
  ppc.trace_dir = (base / "fit").string();
  ppc.data_dir = data.string();
  ppc.n_replicates = 999;  // exceeds the 5 retained samples
  ppc.out_dir = (base / "ppc").string();
  EXPECT_THROW(cli::cmd_ppc(ppc), std::invalid_argument);
}
