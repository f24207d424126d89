/*
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tmcmc/tmcmc.hpp"

namespace fs = std::filesystem;

namespace {

std::string resolve_out_dir(const std::string& flag_value) {
  if (!flag_value.empty()) return flag_value;
  if (const char* env = std::getenv("TMCMC_OUT_DIR")) return env;
  return "out";
}

tmcmc::KernelKind parse_kernel(const std::string& s) {
  if (s == "tmcmc") return tmcmc::KernelKind::TMCMC;
  if (s == "rwm") return tmcmc::KernelKind::RWM;
  throw CLI::ValidationError("--kernel must be tmcmc or rwm");
}

tmcmc::ScalingFamily parse_family(const std::string& variant, double I,
                                  double c, double xi) {
  tmcmc::ScalingFamily fam;
  if (variant == "iid") fam.variant = tmcmc::ScalingVariant::IID;
  else if (variant == "iid-gibbs") fam.variant = tmcmc::ScalingVariant::IID_GIBBS;
  else if (variant == "non-iid") fam.variant = tmcmc::ScalingVariant::NONIID;
  else if (variant == "non-iid-gibbs")
    fam.variant = tmcmc::ScalingVariant::NONIID_GIBBS;
  else if (variant == "dependent")
    fam.variant = tmcmc::ScalingVariant::DEPENDENT;
  else if (variant == "dependent-gibbs")
    fam.variant = tmcmc::ScalingVariant::DEPENDENT_GIBBS;
  else
    throw CLI::ValidationError("unknown scaling variant: " + variant);
  fam.information = I;
  fam.c = c;
  fam.xi = xi;
  return fam;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Additive transformation-based MCMC and random-walk Metropolis: "
               "samplers, optimal-scaling theory, diagnostics and benchmarks"};
  app.require_subcommand(1);

  std::string out_flag;
  std::string target_file;
  long long iters = 100000;
  double burn_in = 0.25;
  int chains = 1;
  std::uint64_t seed = 20260810;
  int threads = static_cast<int>(std::thread::hardware_concurrency());
  double gibbs_c = 1.0;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--out", out_flag,
                    "output directory (default: $TMCMC_OUT_DIR or ./out)");
    cmd->add_option("--iters", iters, "iterations per chain");
    cmd->add_option("--burn-in-frac", burn_in, "burn-in fraction");
    cmd->add_option("--chains", chains, "chains per cell");
    cmd->add_option("--seed", seed, "master seed");
    cmd->add_option("--threads", threads, "worker threads");
    cmd->add_option("--gibbs-c", gibbs_c,
                    "per-coordinate update probability (1 = full update)");
    cmd->add_option("--target", target_file, "target spec file (key = value)");
  };

  // table1: the benchmark grid over dimensions x scales x kernels.
  auto* t1 = app.add_subcommand(
      "table1", "run the benchmark grid and report acc/IACT/IPACT/AJS/K-S");
  std::vector<int> t1_dims = {2, 5, 10, 100, 200};
  std::vector<double> t1_scales = {2.4, 6.0};
  std::vector<std::string> t1_kernels = {"tmcmc", "rwm"};
  t1->add_option("--dim", t1_dims, "dimensions");
  t1->add_option("--scale", t1_scales, "proposal scales");
  t1->add_option("--kernel", t1_kernels, "kernels (tmcmc, rwm)");
  add_common(t1);

  // curves: theoretical speed/acceptance curves on an ell grid.
  auto* cv = app.add_subcommand(
      "curves", "emit diffusion speed and acceptance curves over ell");
  std::string cv_variant = "iid";
  double cv_I = 1.0, cv_c = 1.0, cv_xi = 1.0;
  double cv_lmax = 8.0;
  int cv_n = 400;
  std::vector<std::string> cv_kernels = {"tmcmc", "rwm"};
  cv->add_option("--variant", cv_variant,
                 "iid | iid-gibbs | non-iid | non-iid-gibbs | dependent | "
                 "dependent-gibbs");
  cv->add_option("--information", cv_I, "information constant I");
  cv->add_option("--c", cv_c, "update probability c");
  cv->add_option("--xi", cv_xi, "aggregate scale xi");
  cv->add_option("--ell-max", cv_lmax, "grid upper end");
  cv->add_option("--ell-points", cv_n, "grid size");
  cv->add_option("--kernel", cv_kernels, "kernels");
  add_common(cv);

  // timing: wall-clock comparison of the two kernels.
  auto* tm = app.add_subcommand(
      "timing", "wall-clock benchmark of tmcmc vs rwm per iteration");
  std::vector<int> tm_dims = {2, 5, 10, 20, 50, 100};
  int tm_reps = 5;
  tm->add_option("--dim", tm_dims, "dimensions");
  tm->add_option("--reps", tm_reps, "replications");
  add_common(tm);

  // limit: chain ensembles against the limiting diffusion.
  auto* lm = app.add_subcommand(
      "limit", "compare sped-up chains against the Euler diffusion ensemble");
  std::vector<int> lm_dims = {5, 20, 200};
  double lm_ell = 2.4264;
  double lm_tmax = 25.0, lm_tstep = 0.5, lm_dt = 1e-3;
  lm->add_option("--dim", lm_dims, "dimensions");
  lm->add_option("--scale", lm_ell, "proposal scale ell");
  lm->add_option("--t-max", lm_tmax, "diffusion-time horizon");
  lm->add_option("--t-step", lm_tstep, "grid spacing");
  lm->add_option("--sde-dt", lm_dt, "Euler step");
  add_common(lm);

  // chain: single-run escape hatch.
  auto* ch = app.add_subcommand("chain", "run one chain and export its trace");
  int ch_dim = 10;
  double ch_scale = 2.4;
  std::string ch_kernel = "tmcmc";
  std::vector<int> ch_coords = {0};
  ch->add_option("--dim", ch_dim, "dimension");
  ch->add_option("--scale", ch_scale, "proposal scale ell");
  ch->add_option("--kernel", ch_kernel, "tmcmc or rwm");
  ch->add_option("--record-coords", ch_coords, "coordinates to record");
  add_common(ch);

  CLI11_PARSE(app, argc, argv);

  try {
    const std::string out_dir = resolve_out_dir(out_flag);
    fs::create_directories(out_dir);
    tmcmc::TargetSpec target;
    if (!target_file.empty()) target = tmcmc::parse_target_file(target_file);

    if (t1->parsed()) {
      tmcmc::ExperimentConfig cfg;
      cfg.target = target;
      cfg.dims = t1_dims;
      cfg.scales = t1_scales;
      cfg.kernels.clear();
      for (const auto& k : t1_kernels) cfg.kernels.push_back(parse_kernel(k));
      cfg.n_iters = iters;
      cfg.n_chains = chains;
      cfg.burn_in_frac = burn_in;
      cfg.gibbs_c = gibbs_c;
      cfg.master_seed = seed;
      cfg.n_threads = threads;
      tmcmc::RunManifest manifest("table1");
      const auto report = tmcmc::reproduce_table1(cfg, &manifest);
      const std::string csv = out_dir + "/table1.csv";
      tmcmc::write_table1_csv(report, csv);
      manifest.add_output(csv);
      manifest.write(out_dir + "/table1_manifest.json");
      manifest.add_output(out_dir + "/table1_manifest.json");
      for (const auto& r : report.rows) {
        std::cout << "d=" << r.dim << " ell=" << r.scale << " "
                  << tmcmc::to_string(r.kernel) << ": ";
        if (r.failed)
          std::cout << "FAILED (" << r.error << ")\n";
        else
          std::cout << "acc=" << r.diag.acceptance_rate
                    << " iact=" << r.diag.iact << " ipact=" << r.diag.ipact
                    << " ajs=" << r.diag.ajs << " avg_ks=" << r.diag.avg_ks
                    << "\n";
      }
      return report.any_failed ? 2 : 0;
    }

    if (cv->parsed()) {
      const auto fam = parse_family(cv_variant, cv_I, cv_c, cv_xi);
      std::vector<tmcmc::KernelKind> kinds;
      for (const auto& k : cv_kernels) kinds.push_back(parse_kernel(k));
      std::vector<double> grid;
      for (int i = 1; i <= cv_n; ++i) grid.push_back(cv_lmax * i / cv_n);
      const auto rows = tmcmc::speed_curves(kinds, fam, grid);
      const std::string csv = out_dir + "/curves_" + cv_variant + ".csv";
      tmcmc::write_curves_csv(rows, csv);
      tmcmc::RunManifest manifest("curves");
      manifest.add_output(csv);
      manifest.write(out_dir + "/curves_manifest.json");
      std::cout << "wrote " << csv << "\n";
      for (const auto& r : rows)
        if (r.is_argmax)
          std::cout << tmcmc::to_string(r.kind) << " argmax: ell=" << r.ell
                    << " speed=" << r.speed << " acceptance=" << r.acceptance
                    << "\n";
      return 0;
    }

    if (tm->parsed()) {
      const auto rows = tmcmc::timing_benchmark(tm_dims, iters, tm_reps, 2.4,
                                                seed);
      const std::string csv = out_dir + "/timing.csv";
      tmcmc::write_timing_csv(rows, csv);
      tmcmc::RunManifest manifest("timing");
      manifest.add_output(csv);
      manifest.write(out_dir + "/timing_manifest.json");
      std::cout << "wrote " << csv << "\n";
      for (const auto& r : rows)
        std::cout << "d=" << r.dim << " " << tmcmc::to_string(r.kernel)
                  << ": mean " << r.mean_seconds << " s\n";
      return 0;
    }

    if (lm->parsed()) {
      tmcmc::LimitStudyConfig cfg;
      cfg.dims = lm_dims;
      cfg.n_chains = chains >= 2 ? chains : 100;
      cfg.ell = lm_ell;
      cfg.t_max = lm_tmax;
      cfg.t_step = lm_tstep;
      cfg.sde_dt = lm_dt;
      cfg.master_seed = seed;
      cfg.n_threads = threads;
      const auto res = tmcmc::run_limit_study(cfg);
      tmcmc::RunManifest manifest("limit");
      for (std::size_t i = 0; i < res.dims.size(); ++i) {
        const std::string csv =
            out_dir + "/limit_d" + std::to_string(res.dims[i]) + ".csv";
        tmcmc::write_limit_csv(res.reports[i], csv);
        manifest.add_output(csv);
        std::cout << "d=" << res.dims[i] << ": median K-S "
                  << res.median_ks[i] << " -> " << csv << "\n";
      }
      manifest.write(out_dir + "/limit_manifest.json");
      return 0;
    }

    if (ch->parsed()) {
      const tmcmc::TargetModel model = tmcmc::make_target(target, ch_dim);
      tmcmc::KernelConfig kc;
      kc.kind = parse_kernel(ch_kernel);
      kc.ell = ch_scale;
      kc.d = ch_dim;
      kc.gibbs_c = gibbs_c;
      tmcmc::RandomStream init_rng(tmcmc::split_seed(seed, 0, 1));
      const tmcmc::StateVector init = tmcmc::uniform_init(ch_dim, init_rng);
      tmcmc::RecordPolicy rec;
      rec.coords = ch_coords;
      const auto trace = tmcmc::run_chain(model, kc, init, iters,
                                          tmcmc::split_seed(seed, 0, 0), rec);
      const std::string csv = out_dir + "/chain.csv";
      tmcmc::write_trace_csv(trace, csv);
      auto summary = tmcmc::trace_summary_json(trace, kc, burn_in);
      summary["diagnostics"] =
          tmcmc::to_json(tmcmc::diagnose(trace, ch_coords.front(), burn_in));
      std::ofstream js(out_dir + "/chain_summary.json");
      js << summary.dump(2) << "\n";
      tmcmc::RunManifest manifest("chain");
      manifest.add_output(csv);
      manifest.add_output(out_dir + "/chain_summary.json");
      manifest.write(out_dir + "/chain_manifest.json");
      std::cout << "wrote " << csv << " (acceptance "
                << tmcmc::acceptance_rate(trace, burn_in) << ")\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
