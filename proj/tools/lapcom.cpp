// Command-line frontend wiring data, sampler, post-processing and
// posterior predictive checks into reproducible batch runs.

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lapcom/cli.hpp"

namespace {

struct CommonFlags {
  long iters = -1, burnin = -1, thin = -1;
  std::int64_t seed = -1;
  std::string variant, init;
  int n_min = -1, n_chains = -1, jobs = -1;

  lapcom::cli::ConfigOverrides to_overrides() const {
    lapcom::cli::ConfigOverrides o;
    if (iters >= 0) o.iters = iters;
    if (burnin >= 0) o.burnin = burnin;
    if (thin >= 0) o.thin = thin;
    if (seed >= 0) o.seed = static_cast<std::uint64_t>(seed);
    if (!variant.empty()) o.variant = variant;
    if (!init.empty()) o.init = init;
    if (n_min >= 0) o.n_min = n_min;
    if (n_chains >= 0) o.n_chains = n_chains;
    if (jobs >= 0) o.jobs = jobs;
    return o;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"LaPCoM: Bayesian co-clustering of multiplex networks"};
  app.require_subcommand(1);

  // simulate
  auto* simulate = app.add_subcommand("simulate", "generate a synthetic multiplex");
  lapcom::cli::SimulateOptions sim_opt;
  std::int64_t sim_seed = 1;
  simulate->add_option("--preset", sim_opt.preset, "built-in scenario (A-H, I-V)");
  simulate->add_option("--spec", sim_opt.spec_file, "scenario spec JSON file");
  simulate->add_option("--seed", sim_seed, "generation seed");
  simulate->add_option("--out", sim_opt.out_dir, "output directory")->required();

  // fit
  auto* fit = app.add_subcommand("fit", "run MCMC chains on a multiplex");
  lapcom::cli::FitOptions fit_opt;
  CommonFlags fit_flags;
  fit->add_option("--data", fit_opt.data_dir, "multiplex directory")->required();
  fit->add_option("--config", fit_opt.config_file, "config JSON file");
  fit->add_option("--out", fit_opt.out_dir, "output directory")->required();
  fit->add_option("--iters", fit_flags.iters, "post-burn-in iterations");
  fit->add_option("--burnin", fit_flags.burnin, "burn-in iterations");
  fit->add_option("--thin", fit_flags.thin, "thinning interval");
  fit->add_option("--seed", fit_flags.seed, "base seed; chain i uses seed + i");
  fit->add_option("--n-chains", fit_flags.n_chains, "number of chains");
  fit->add_option("--jobs", fit_flags.jobs, "parallel chain workers");
  fit->add_option("--variant", fit_flags.variant, "lapcom or mono-lapcm");
  fit->add_option("--init", fit_flags.init, "kmeans or gmm");
  fit->add_option("--n-min", fit_flags.n_min, "minimum average node-cluster size");
  fit->add_flag("--quiet", fit_opt.quiet, "suppress progress output");

  // postprocess
  auto* post = app.add_subcommand("postprocess", "identify point estimates from traces");
  lapcom::cli::PostprocessOptions post_opt;
  std::int64_t post_seed = 17;
  post->add_option("--trace", post_opt.trace_dirs, "trace directories")->required();
  post->add_option("--data", post_opt.data_dir, "multiplex directory")->required();
  post->add_option("--out", post_opt.out_dir, "output directory")->required();
  post->add_option("--seed", post_seed, "relabelling seed");

  // ppc
  auto* ppc = app.add_subcommand("ppc", "posterior predictive checks");
  lapcom::cli::PpcOptions ppc_opt;
  std::int64_t ppc_seed = 23;
  ppc->add_option("--solution", ppc_opt.solution_dir, "solution directory")->required();
  ppc->add_option("--trace", ppc_opt.trace_dir, "trace directory (defaults to the solution's)");
  ppc->add_option("--data", ppc_opt.data_dir, "multiplex directory")->required();
  ppc->add_option("-R,--replicates", ppc_opt.n_replicates, "number of replicates");
  ppc->add_option("--seed", ppc_seed, "replicate seed");
  ppc->add_option("--out", ppc_opt.out_dir, "output directory")->required();

  // evaluate
  auto* eval = app.add_subcommand("evaluate", "compare a solution against simulation truth");
  lapcom::cli::EvaluateOptions eval_opt;
  eval->add_option("--solution", eval_opt.solution_dir, "solution directory")->required();
  eval->add_option("--truth", eval_opt.truth_dir, "directory with truth_*.csv")->required();
  eval->add_option("--out", eval_opt.out_dir, "output directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed()) {
      sim_opt.seed = static_cast<std::uint64_t>(sim_seed);
      lapcom::cli::cmd_simulate(sim_opt);
    } else if (fit->parsed()) {
      fit_opt.overrides = fit_flags.to_overrides();
      lapcom::cli::cmd_fit(fit_opt);
    } else if (post->parsed()) {
      post_opt.seed = static_cast<std::uint64_t>(post_seed);
      lapcom::cli::cmd_postprocess(post_opt);
    } else if (ppc->parsed()) {
      ppc_opt.seed = static_cast<std::uint64_t>(ppc_seed);
      lapcom::cli::cmd_ppc(ppc_opt);
    } else if (eval->parsed()) {
      lapcom::cli::cmd_evaluate(eval_opt);
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
