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

#include <catch2/catch_amalgamated.hpp>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "tmcmc/harness.hpp"

using namespace tmcmc;
namespace fs = std::filesystem;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Drop timing-dependent fields for byte-comparison.
std::string strip_volatile(std::string csv) {
  return csv;  // table1 CSV carries no timing columns
}

}  // namespace

TEST_CASE("target spec parsing") {
  std::stringstream ss;
  ss << "# comment line\n"
     << "family = gaussian\n"
     << "d = 12\n"
     << "kappa = 1.5\n"
     << "psi = quad(0.25)\n";
  const auto spec = parse_target_spec(ss);
  REQUIRE(spec.family == "gaussian");
  REQUIRE(spec.d == 12);
  REQUIRE(spec.kappa == 1.5);
  const auto model = make_target(spec);
  REQUIRE(dimension(model) == 12);

  std::stringstream bad;
  bad << "famly = iid\n";
  REQUIRE_THROWS_AS(parse_target_spec(bad), std::invalid_argument);
}

TEST_CASE("builtin marginal and psi lookup") {
  REQUIRE(make_marginal("std-normal").name == "std-normal");
  REQUIRE(make_marginal("normal(2.5)").log_f(0.0) ==
          Catch::Approx(normal_marginal(2.5).log_f(0.0)));
  REQUIRE(make_marginal("logistic").name == "logistic");
  REQUIRE(make_marginal("student-t(10)").log_f(1.0) ==
          Catch::Approx(student_t_marginal(10).log_f(1.0)));
  REQUIRE_THROWS_AS(make_marginal("cauchy"), std::invalid_argument);
  REQUIRE(make_psi("zero").name == "zero");
  REQUIRE_THROWS_AS(make_psi("cubic"), std::invalid_argument);
}

TEST_CASE("scaled-family target spec builds a consistent model") {
  TargetSpec spec;
  spec.family = "scaled";
  spec.marginal = "std-normal";
  spec.d = 20;
  spec.k = 0;
  spec.gammas = {0.0, -0.5};
  spec.Ks = {1.0, 2.0};
  spec.alpha = 1.0;
  spec.r_weights = {1.0, 1.0};
  const auto model = make_target(spec);
  REQUIRE(dimension(model) == 20);
  const auto* sp = std::get_if<ScaledProduct>(&model);
  REQUIRE(sp != nullptr);
  REQUIRE(static_cast<int>(sp->thetas.size()) == 20);
}

TEST_CASE("table1 runs are deterministic and the manifest lists every "
          "output") {
  const fs::path dir = fs::temp_directory_path() / "tmcmc_test_t1";
  fs::remove_all(dir);
  fs::create_directories(dir);

  ExperimentConfig cfg;
  cfg.dims = {2, 5};
  cfg.scales = {2.4};
  cfg.n_iters = 20000;
  cfg.n_chains = 2;
  cfg.master_seed = 99;
  cfg.n_threads = 2;

  RunManifest m1("table1");
  const auto r1 = reproduce_table1(cfg, &m1);
  write_table1_csv(r1, (dir / "a.csv").string());
  m1.add_output((dir / "a.csv").string());

  RunManifest m2("table1");
  const auto r2 = reproduce_table1(cfg, &m2);
  write_table1_csv(r2, (dir / "b.csv").string());

  REQUIRE(strip_volatile(read_file((dir / "a.csv").string())) ==
          strip_volatile(read_file((dir / "b.csv").string())));
  REQUIRE(r1.rows.size() == 4);
  REQUIRE_FALSE(r1.any_failed);
  for (const auto& row : r1.rows) {
    REQUIRE(row.diag.acceptance_rate > 0.0);
    REQUIRE(std::isfinite(row.diag.avg_ks));  // 2 chains -> K-S defined
  }

  // manifest completeness: every produced file appears in outputs
  m1.write((dir / "manifest.json").string());
  const auto manifest = nlohmann::json::parse(read_file((dir / "manifest.json").string()));
  bool found = false;
  for (const auto& out : manifest["outputs"])
    if (out.get<std::string>() == (dir / "a.csv").string()) found = true;
  REQUIRE(found);
  REQUIRE(manifest["runs"].size() == 4);
  for (const auto& run : manifest["runs"]) REQUIRE(run["seeds"].size() == 2);
  fs::remove_all(dir);
}

TEST_CASE("a failing cell is marked while the rest complete") {
  ExperimentConfig cfg;
  cfg.dims = {2};
  cfg.scales = {2.4, -1.0};  // the negative scale cell must fail
  cfg.kernels = {KernelKind::TMCMC};
  cfg.n_iters = 2000;
  cfg.master_seed = 5;
  cfg.n_threads = 1;
  const auto rep = reproduce_table1(cfg);
  REQUIRE(rep.any_failed);
  REQUIRE(rep.rows.size() == 2);
  int ok = 0, failed = 0;
  for (const auto& r : rep.rows) {
    if (r.failed) {
      ++failed;
      REQUIRE_FALSE(r.error.empty());
    } else {
      ++ok;
    }
  }
  REQUIRE(ok == 1);
  REQUIRE(failed == 1);
}

TEST_CASE("experiment config validation happens before any run") {
  ExperimentConfig cfg;
  cfg.dims = {};
  REQUIRE_THROWS_AS(validate(cfg), std::invalid_argument);
  cfg.dims = {2};
  cfg.burn_in_frac = 1.0;
  REQUIRE_THROWS_AS(validate(cfg), std::invalid_argument);
}

TEST_CASE("speed curves: argmax marking and endpoint behavior") {
  const ScalingFamily fam{ScalingVariant::IID, 1.0, 1.0, 1.0};
  std::vector<double> grid;
  for (int i = 1; i <= 160; ++i) grid.push_back(0.05 * i);
  const auto rows =
      speed_curves({KernelKind::TMCMC, KernelKind::RWM}, fam, grid);
  REQUIRE(rows.size() == 320);

  double tm_argmax = -1.0, rw_argmax = -1.0;
  for (const auto& r : rows) {
    if (r.is_argmax && r.kind == KernelKind::TMCMC) tm_argmax = r.ell;
    if (r.is_argmax && r.kind == KernelKind::RWM) rw_argmax = r.ell;
  }
  REQUIRE(std::fabs(tm_argmax - 2.426) <= 0.05 + 1e-12);  // grid resolution
  REQUIRE(std::fabs(rw_argmax - 2.381) <= 0.05 + 1e-12);
  REQUIRE(rows.front().speed <= 1e-2);  // ell -> 0 endpoint
}

TEST_CASE("speed curves: dependent-family robustness ordering") {
  const ScalingFamily dep{ScalingVariant::DEPENDENT, 1.0, 1.0, 1.0};
  const auto tm = optimal_scale(KernelKind::TMCMC, dep);
  const auto rw = optimal_scale(KernelKind::RWM, dep);
  // RWM's peak is higher...
  REQUIRE(rw.speed_at_opt > tm.speed_at_opt);
  // ...but TMCMC retains a larger fraction of its peak at 1.5x the optimum
  const double tm_frac = tmcmc_speed(dep, 1.5 * tm.ell_opt) / tm.speed_at_opt;
  const double rw_frac = rwm_speed(dep, 1.5 * rw.ell_opt) / rw.speed_at_opt;
  REQUIRE(tm_frac > rw_frac);
}

TEST_CASE("timing benchmark produces positive per-rep measurements") {
  const auto rows = timing_benchmark({2, 10}, 20000, 2, 2.4, 77);
  REQUIRE(rows.size() == 4);
  for (const auto& r : rows) {
    REQUIRE(r.rep_seconds.size() == 2);
    for (double s : r.rep_seconds) REQUIRE(s > 0.0);
    REQUIRE(r.mean_seconds > 0.0);
  }
}

TEST_CASE("limit study validates its ensemble size") {
  LimitStudyConfig cfg;
  cfg.n_chains = 1;
  REQUIRE_THROWS_AS(run_limit_study(cfg), std::invalid_argument);
}

TEST_CASE("limit study on a single small dimension produces a bounded "
          "median") {
  LimitStudyConfig cfg;
  cfg.dims = {5};
  cfg.n_chains = 40;
  cfg.t_max = 5.0;
  cfg.t_step = 0.5;
  cfg.master_seed = 7;
  cfg.n_threads = 2;
  const auto res = run_limit_study(cfg);
  REQUIRE(res.median_ks.size() == 1);
  REQUIRE(res.median_ks[0] > 0.0);
  REQUIRE(res.median_ks[0] < 0.6);
}

TEST_CASE("first-marginal CDF derivation per family") {
  const auto iid = make_iid_product(std_normal_marginal(), 3);
  const auto cdf = first_marginal_cdf(iid);
  REQUIRE(cdf);
  REQUIRE(cdf(0.0) == Catch::Approx(0.5));

  ThetaSchedule sched;
  sched.k = 0;
  sched.gammas = {0.0};
  sched.Ks = {4.0};  // theta = 1/2
  sched.r_counts = [](int, long long d) { return d; };
  const auto scaled = make_scaled_product(std_normal_marginal(), sched, 3);
  const auto scdf = first_marginal_cdf(scaled);
  REQUIRE(scdf);
  // coordinate has sd 1/theta = 2
  REQUIRE(scdf(2.0) == Catch::Approx(norm_cdf(1.0)).epsilon(1e-12));

  const auto gm =
      make_gaussian_measure({2.0, 1.0}, zero_psi());
  const auto gcdf = first_marginal_cdf(gm);
  REQUIRE(gcdf);
  REQUIRE(gcdf(2.0) == Catch::Approx(norm_cdf(1.0)).epsilon(1e-12));

  // no closed marginal: perturbed gaussian measure, student-t marginal
  REQUIRE_FALSE(first_marginal_cdf(make_gaussian_measure(
      {1.0}, quadratic_perturbation_psi(0.1))));
  REQUIRE_FALSE(
      first_marginal_cdf(make_iid_product(student_t_marginal(10.0), 2)));
}

TEST_CASE("worker-pool exceptions surface on the calling thread") {
  std::atomic<int> done{0};
  REQUIRE_THROWS_AS(
      detail::parallel_for(64, 4,
                           [&](std::size_t i) {
                             if (i == 11)
                               throw std::runtime_error("task failure");
                             ++done;
                           }),
      std::runtime_error);
  REQUIRE(done.load() < 64);
}

TEST_CASE("trace CSV export round-trips the recorded values") {
  const fs::path dir = fs::temp_directory_path() / "tmcmc_test_trace";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const TargetModel model = make_iid_product(std_normal_marginal(), 3);
  KernelConfig kc;
  kc.kind = KernelKind::RWM;
  kc.ell = 2.0;
  kc.d = 3;
  RecordPolicy rec;
  rec.coords = {0, 2};
  RandomStream ir(2);
  const auto tr = run_chain(model, kc, uniform_init(3, ir), 50, 4, rec);
  write_trace_csv(tr, (dir / "trace.csv").string());
  const auto text = read_file((dir / "trace.csv").string());
  REQUIRE(text.rfind("iter,accepted,jump_norm,coord0,coord2", 0) == 0);
  // one header plus one line per iteration
  REQUIRE(std::count(text.begin(), text.end(), '\n') == 51);
  const auto js = trace_summary_json(tr, kc, 0.25);
  REQUIRE(js["kernel"] == "rwm");
  REQUIRE(js["n_iters"] == 50);
  fs::remove_all(dir);
}
