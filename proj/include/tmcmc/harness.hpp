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

#pragma once

#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "tmcmc/diagnostics.hpp"
#include "tmcmc/kernels.hpp"
#include "tmcmc/scaling.hpp"
#include "tmcmc/sde.hpp"
#include "tmcmc/targets.hpp"

namespace tmcmc {

inline constexpr const char* kVersion = "0.1.0";

namespace detail {

// Shortest decimal form that round-trips exactly, so CSV payloads are
// byte-identical across reruns.
inline std::string fmt(double v) {
  char buf[40];
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

inline std::string iso8601_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t tt = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Run fn(i) for i in [0,n) on up to n_threads workers; results land in a
// caller-owned array indexed by i, so merge order never depends on
// completion order. The first exception thrown by any task is rethrown on
// the calling thread after all workers have joined.
template <typename Fn>
void parallel_for(std::size_t n, int n_threads, Fn fn) {
  if (n == 0) return;
  const int workers =
      std::max(1, std::min<int>(n_threads, static_cast<int>(n)));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&]() {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n || failed.load()) return;
        try {
          fn(i);
        } catch (...) {
          const std::scoped_lock lock(error_mutex);
          if (!error) error = std::current_exception();
          failed.store(true);
          return;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Target specification (config-file format)
// ---------------------------------------------------------------------------

// Parsed key-value model description. Format: one `key = value` pair per
// line, `#` starts a comment. Keys:
//   family    iid | scaled | gaussian
//   marginal  std-normal | normal(sigma) | logistic | student-t(nu)
//   d         dimension
//   kappa     spectrum decay for gaussian, lambda_j = j^-kappa (default 1)
//   psi       zero | quad(eps)
//   k, lambdas, gammas, Ks, alpha, r_weights   scaled-family schedule
struct TargetSpec {
  std::string family = "iid";
  std::string marginal = "std-normal";
  int d = 1;
  double kappa = 1.0;
  std::string psi = "zero";
  int k = 0;
  std::vector<double> lambda_exps;
  std::vector<double> gammas;
  std::vector<double> Ks;
  double alpha = 1.0;
  std::vector<double> r_weights;
};

namespace detail {

inline std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (!tok.empty()) out.push_back(std::stod(tok));
  }
  return out;
}

}  // namespace detail

inline TargetSpec parse_target_spec(std::istream& in) {
  TargetSpec spec;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key == "family") spec.family = val;
    else if (key == "marginal") spec.marginal = val;
    else if (key == "d") spec.d = std::stoi(val);
    else if (key == "kappa") spec.kappa = std::stod(val);
    else if (key == "psi") spec.psi = val;
    else if (key == "k") spec.k = std::stoi(val);
    else if (key == "lambdas") spec.lambda_exps = detail::parse_list(val);
    else if (key == "gammas") spec.gammas = detail::parse_list(val);
    else if (key == "Ks") spec.Ks = detail::parse_list(val);
    else if (key == "alpha") spec.alpha = std::stod(val);
    else if (key == "r_weights") spec.r_weights = detail::parse_list(val);
    else throw std::invalid_argument("target spec: unknown key '" + key + "'");
  }
  return spec;
}

inline TargetSpec parse_target_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open target spec: " + path);
  return parse_target_spec(in);
}

inline MarginalDensity make_marginal(const std::string& name) {
  if (name == "std-normal") return std_normal_marginal();
  if (name.rfind("normal(", 0) == 0 && name.back() == ')')
    return normal_marginal(std::stod(name.substr(7, name.size() - 8)));
  if (name == "logistic") return logistic_marginal();
  if (name.rfind("student-t(", 0) == 0 && name.back() == ')')
    return student_t_marginal(std::stod(name.substr(10, name.size() - 11)));
  throw std::invalid_argument("unknown marginal: " + name);
}

inline PsiFunctional make_psi(const std::string& name) {
  if (name == "zero") return zero_psi();
  if (name.rfind("quad(", 0) == 0 && name.back() == ')')
    return quadratic_perturbation_psi(
        std::stod(name.substr(5, name.size() - 6)));
  throw std::invalid_argument("unknown psi: " + name);
}

inline TargetModel make_target(const TargetSpec& spec, int d_override = -1) {
  const int d = d_override > 0 ? d_override : spec.d;
  if (spec.family == "iid") return make_iid_product(make_marginal(spec.marginal), d);
  if (spec.family == "gaussian")
    return make_gaussian_measure(power_decay_lambdas(d, spec.kappa),
                                 make_psi(spec.psi));
  if (spec.family == "scaled") {
    ThetaSchedule sched;
    sched.k = spec.k;
    sched.lambda_exps = spec.lambda_exps;
    sched.gammas = spec.gammas;
    sched.Ks = spec.Ks;
    sched.alpha = spec.alpha;
    const std::vector<double> w = spec.r_weights;
    const int k = spec.k;
    sched.r_counts = [w, k](int i, long long dd) -> long long {
      double total = 0.0;
      for (double v : w) total += v;
      const long long budget = dd - k;
      long long assigned = 0;
      for (int j = 0; j + 1 < static_cast<int>(w.size()); ++j) {
        const auto r = static_cast<long long>(
            std::floor(w[j] / total * static_cast<double>(budget)));
        if (j + 1 == i) return r;
        assigned += r;
      }
      return budget - assigned;  // last class absorbs the remainder
    };
    return make_scaled_product(make_marginal(spec.marginal), sched, d);
  }
  throw std::invalid_argument("unknown family: " + spec.family);
}

// CDF of coordinate 1's marginal, where one is available: iid and scaled
// products with a builtin marginal CDF, and the Gaussian-measure family with
// psi == zero. Returns an empty function otherwise.
inline std::function<double(double)> first_marginal_cdf(
    const TargetModel& model) {
  if (const auto* iid = std::get_if<IidProduct>(&model)) {
    return iid->marginal.cdf;
  }
  if (const auto* sp = std::get_if<ScaledProduct>(&model)) {
    if (!sp->marginal.cdf) return nullptr;
    const double theta = sp->thetas.front();
    const auto cdf = sp->marginal.cdf;
    return [cdf, theta](double x) { return cdf(theta * x); };
  }
  if (const auto* gm = std::get_if<GaussianMeasure>(&model)) {
    if (gm->psi.name != "zero") return nullptr;
    const double lam = gm->lambdas.front();
    return [lam](double x) { return norm_cdf(x / lam); };
  }
  return nullptr;
}

// Exact stationary draw, available for iid products with samplable marginals
// and for the Gaussian-measure family with psi == zero.
inline StateVector exact_target_sample(const TargetModel& model,
                                       RandomStream& rng) {
  if (const auto* iid = std::get_if<IidProduct>(&model)) {
    if (!iid->marginal.sampler)
      throw std::invalid_argument("exact_target_sample: marginal not samplable");
    StateVector x(iid->d);
    for (auto& v : x) v = iid->marginal.sampler(rng);
    return x;
  }
  if (const auto* gm = std::get_if<GaussianMeasure>(&model)) {
    if (gm->psi.name != "zero")
      throw std::invalid_argument(
          "exact_target_sample: gaussian family needs psi == zero");
    StateVector x(gm->d);
    for (int j = 0; j < gm->d; ++j) x[j] = gm->lambdas[j] * rng.normal();
    return x;
  }
  throw std::invalid_argument("exact_target_sample: no exact sampler");
}

// ---------------------------------------------------------------------------
// Experiment orchestration
// ---------------------------------------------------------------------------

struct ExperimentConfig {
  TargetSpec target;
  std::vector<KernelKind> kernels = {KernelKind::TMCMC, KernelKind::RWM};
  std::vector<int> dims = {2, 5, 10, 100, 200};
  std::vector<double> scales = {2.4, 6.0};
  long long n_iters = 100000;
  int n_chains = 1;
  double burn_in_frac = 0.25;
  double gibbs_c = 1.0;
  std::uint64_t master_seed = 20260810;
  std::string output_dir = "out";
  int n_threads = static_cast<int>(std::thread::hardware_concurrency());
  RecordPolicy record = RecordPolicy{};
};

inline void validate(const ExperimentConfig& cfg) {
  if (cfg.kernels.empty() || cfg.dims.empty() || cfg.scales.empty())
    throw std::invalid_argument("ExperimentConfig: empty kernel/dim/scale list");
  for (int d : cfg.dims)
    if (d < 1) throw std::invalid_argument("ExperimentConfig: dim < 1");
  if (cfg.n_iters < 1) throw std::invalid_argument("ExperimentConfig: n_iters < 1");
  if (cfg.n_chains < 1) throw std::invalid_argument("ExperimentConfig: n_chains < 1");
  if (!(cfg.burn_in_frac >= 0 && cfg.burn_in_frac < 1))
    throw std::invalid_argument("ExperimentConfig: burn_in_frac outside [0,1)");
}

struct RunManifest {
  nlohmann::json j;

  explicit RunManifest(const std::string& command) {
    j["command"] = command;
    j["version"] = kVersion;
    j["timestamp"] = detail::iso8601_now();
    j["outputs"] = nlohmann::json::array();
    j["runs"] = nlohmann::json::array();
  }
  void add_output(const std::string& path) { j["outputs"].push_back(path); }
  void add_run(nlohmann::json run) { j["runs"].push_back(std::move(run)); }
  void write(const std::string& path) const {
    std::ofstream out(path);
    out << j.dump(2) << "\n";
  }
};

struct Table1Row {
  int dim = 0;
  double scale = 0.0;
  KernelKind kernel = KernelKind::TMCMC;
  bool failed = false;
  std::string error;
  DiagnosticsReport diag;
};

struct Table1Report {
  std::vector<Table1Row> rows;
  bool any_failed = false;
};

// Initial point with iid U(-2,2) coordinates.
inline StateVector uniform_init(int d, RandomStream& rng) {
  StateVector x(d);
  for (auto& v : x) v = -2.0 + 4.0 * rng.uniform01();
  return x;
}

// One cell of the benchmark table: n_chains chains of the given kernel at
// (dim, scale); chain j uses seed split(master, cell_index, j). Acceptance,
// IACT, IPACT and AJS come from chain 0; the across-chain K-S needs
// n_chains >= 2 and a target with a known first-marginal CDF, and is NaN
// otherwise. With one chain per cell the cells run in parallel; with chain
// ensembles the cells run one at a time (chains in parallel), so only one
// ensemble of traces is resident at once.
inline Table1Report reproduce_table1(const ExperimentConfig& cfg,
                                     RunManifest* manifest = nullptr) {
  validate(cfg);
  struct Cell {
    int dim;
    double scale;
    KernelKind kernel;
  };
  std::vector<Cell> cells;
  for (int d : cfg.dims)
    for (double s : cfg.scales)
      for (KernelKind k : cfg.kernels) cells.push_back({d, s, k});

  Table1Report report;
  report.rows.resize(cells.size());
  std::vector<long long> wall_ns(cells.size(), 0);

  auto process_cell = [&](std::size_t ci, int chain_threads) {
    const auto& cell = cells[ci];
    auto& row = report.rows[ci];
    row.dim = cell.dim;
    row.scale = cell.scale;
    row.kernel = cell.kernel;
    std::vector<ChainTrace> traces(cfg.n_chains);
    std::vector<std::string> errors(cfg.n_chains);
    detail::parallel_for(cfg.n_chains, chain_threads, [&](std::size_t j) {
      try {
        const TargetModel model = make_target(cfg.target, cell.dim);
        KernelConfig kc;
        kc.kind = cell.kernel;
        kc.ell = cell.scale;
        kc.d = cell.dim;
        kc.gibbs_c = cfg.gibbs_c;
        const std::uint64_t seed = split_seed(cfg.master_seed, ci, j);
        RandomStream init_rng(split_seed(cfg.master_seed, ci, 1000000 + j));
        const StateVector init = uniform_init(cell.dim, init_rng);
        traces[j] =
            run_chain(model, kc, init, cfg.n_iters, seed, cfg.record);
      } catch (const std::exception& e) {
        errors[j] = e.what();
      }
    });
    for (const auto& err : errors) {
      if (!err.empty()) {
        row.failed = true;
        row.error = err;
        return;
      }
    }
    try {
      row.diag = diagnose(traces[0], 0, cfg.burn_in_frac);
      wall_ns[ci] = traces[0].wall_clock_ns;
      if (cfg.n_chains >= 2) {
        const auto cdf =
            first_marginal_cdf(make_target(cfg.target, cell.dim));
        if (cdf)
          row.diag.avg_ks = average_ks(traces, 0, cdf, cfg.burn_in_frac);
      }
    } catch (const std::exception& e) {
      row.failed = true;
      row.error = e.what();
    }
  };

  if (cfg.n_chains > 1) {
    for (std::size_t ci = 0; ci < cells.size(); ++ci)
      process_cell(ci, cfg.n_threads);
  } else {
    detail::parallel_for(cells.size(), cfg.n_threads,
                         [&](std::size_t ci) { process_cell(ci, 1); });
  }

  for (std::size_t ci = 0; ci < cells.size(); ++ci) {
    const auto& row = report.rows[ci];
    if (row.failed) report.any_failed = true;
    if (manifest) {
      nlohmann::json run;
      run["dim"] = row.dim;
      run["scale"] = row.scale;
      run["kernel"] = to_string(row.kernel);
      run["n_chains"] = cfg.n_chains;
      run["seeds"] = nlohmann::json::array();
      for (int j = 0; j < cfg.n_chains; ++j)
        run["seeds"].push_back(split_seed(cfg.master_seed, ci, j));
      run["wall_clock_ns"] = wall_ns[ci];
      if (row.failed) run["error"] = row.error;
      manifest->add_run(std::move(run));
    }
  }
  return report;
}

inline void write_table1_csv(const Table1Report& report,
                             const std::string& path) {
  std::ofstream out(path);
  out << "dimension,scaling,kernel,acc,iact,ipact,ajs,avg_ks,status\n";
  for (const auto& r : report.rows) {
    out << r.dim << ',' << detail::fmt(r.scale) << ',' << to_string(r.kernel)
        << ',';
    if (r.failed) {
      out << ",,,,,failed:" << r.error << "\n";
    } else {
      out << detail::fmt(r.diag.acceptance_rate) << ','
          << detail::fmt(r.diag.iact) << ',' << detail::fmt(r.diag.ipact)
          << ',' << detail::fmt(r.diag.ajs) << ','
          << detail::fmt(r.diag.avg_ks) << ",ok\n";
    }
  }
}

// ---------------------------------------------------------------------------
// Speed curves (the data behind the diffusion-speed comparison figures)
// ---------------------------------------------------------------------------

struct CurveRow {
  KernelKind kind;
  double ell;
  double speed;
  double acceptance;
  bool is_argmax;
};

inline std::vector<CurveRow> speed_curves(const std::vector<KernelKind>& kinds,
                                          const ScalingFamily& fam,
                                          std::span<const double> ell_grid) {
  if (ell_grid.empty())
    throw std::invalid_argument("speed_curves: empty grid");
  std::vector<CurveRow> rows;
  for (KernelKind kind : kinds) {
    std::size_t best = 0;
    double best_speed = -1.0;
    const std::size_t base = rows.size();
    for (std::size_t i = 0; i < ell_grid.size(); ++i) {
      const double ell = ell_grid[i];
      const double sp = ell > 0 ? speed(kind, fam, ell) : 0.0;
      const double ac = ell > 0 ? theoretical_acceptance(kind, fam, ell) : 1.0;
      rows.push_back({kind, ell, sp, ac, false});
      if (sp > best_speed) {
        best_speed = sp;
        best = i;
      }
    }
    rows[base + best].is_argmax = true;
  }
  return rows;
}

inline void write_curves_csv(const std::vector<CurveRow>& rows,
                             const std::string& path) {
  std::ofstream out(path);
  out << "kind,ell,speed,acceptance,argmax\n";
  for (const auto& r : rows)
    out << to_string(r.kind) << ',' << detail::fmt(r.ell) << ','
        << detail::fmt(r.speed) << ',' << detail::fmt(r.acceptance) << ','
        << (r.is_argmax ? 1 : 0) << "\n";
}

// ---------------------------------------------------------------------------
// Timing benchmark
// ---------------------------------------------------------------------------

struct TimingRow {
  int dim;
  KernelKind kernel;
  std::vector<double> rep_seconds;
  double mean_seconds;
};

// Mean wall-clock of n_iters iterations per (dim, kernel) over n_reps
// replications on the iid standard-normal target. No state recording; each
// measurement runs single-threaded.
inline std::vector<TimingRow> timing_benchmark(const std::vector<int>& dims,
                                               long long n_iters, int n_reps,
                                               double ell = 2.4,
                                               std::uint64_t seed = 1) {
  std::vector<TimingRow> rows;
  for (int d : dims) {
    for (KernelKind kind : {KernelKind::TMCMC, KernelKind::RWM}) {
      const TargetModel model = make_iid_product(std_normal_marginal(), d);
      KernelConfig kc;
      kc.kind = kind;
      kc.ell = ell;
      kc.d = d;
      TimingRow row{d, kind, {}, 0.0};
      {
        // unmeasured warmup so the first replication pays no cold-start cost
        RandomStream warm_rng(split_seed(seed, d, 999));
        const StateVector init = uniform_init(d, warm_rng);
        run_chain(model, kc, init, std::min<long long>(n_iters, 2000),
                  split_seed(seed, d, 998), RecordPolicy::none());
      }
      for (int rep = 0; rep < n_reps; ++rep) {
        RandomStream init_rng(split_seed(seed, d, rep));
        const StateVector init = uniform_init(d, init_rng);
        const ChainTrace tr =
            run_chain(model, kc, init, n_iters,
                      split_seed(seed, d * 2 + (kind == KernelKind::RWM), rep),
                      RecordPolicy::none());
        row.rep_seconds.push_back(static_cast<double>(tr.wall_clock_ns) * 1e-9);
      }
      for (double s : row.rep_seconds) row.mean_seconds += s;
      row.mean_seconds /= static_cast<double>(n_reps);
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

inline void write_timing_csv(const std::vector<TimingRow>& rows,
                             const std::string& path) {
  std::ofstream out(path);
  out << "dimension,kernel,rep,seconds,mean_seconds\n";
  for (const auto& r : rows)
    for (std::size_t rep = 0; rep < r.rep_seconds.size(); ++rep)
      out << r.dim << ',' << to_string(r.kernel) << ',' << rep << ','
          << detail::fmt(r.rep_seconds[rep]) << ','
          << detail::fmt(r.mean_seconds) << "\n";
}

// ---------------------------------------------------------------------------
// Diffusion-limit study
// ---------------------------------------------------------------------------

struct LimitStudyConfig {
  std::vector<int> dims = {5, 20, 200};
  int n_chains = 100;
  double ell = 2.4264;
  double t_max = 25.0;
  double t_step = 0.5;
  double sde_dt = 1e-3;
  std::uint64_t master_seed = 20260810;
  int n_threads = static_cast<int>(std::thread::hardware_concurrency());
};

struct LimitStudyResult {
  std::vector<int> dims;
  std::vector<LimitReport> reports;
  std::vector<double> median_ks;
};

// For each dimension: run an ensemble of chains started at stationarity on
// the iid standard-normal target, view coordinate 1 on the diffusion time
// scale, and compare against an Euler ensemble of the limiting SDE with
// g = tmcmc_speed(IID, ell).
inline LimitStudyResult run_limit_study(const LimitStudyConfig& cfg) {
  if (cfg.n_chains < 2)
    throw std::invalid_argument("run_limit_study: need at least 2 chains");
  std::vector<double> t_grid;
  for (double t = cfg.t_step; t <= cfg.t_max + 1e-12; t += cfg.t_step)
    t_grid.push_back(t);

  const ScalingFamily fam{ScalingVariant::IID, 1.0, 1.0, 1.0};
  const double g = tmcmc_speed(fam, cfg.ell);
  LangevinSpec1D spec{
      g, [](double u) { return -u; },
      [](RandomStream& rng) { return rng.normal(); }};

  LimitStudyResult result;
  result.dims = cfg.dims;
  result.reports.resize(cfg.dims.size());

  for (std::size_t di = 0; di < cfg.dims.size(); ++di) {
    const int d = cfg.dims[di];
    const TargetModel model = make_iid_product(std_normal_marginal(), d);
    KernelConfig kc;
    kc.kind = KernelKind::TMCMC;
    kc.ell = cfg.ell;
    kc.d = d;
    const auto n_iters =
        static_cast<long long>(std::floor(d * cfg.t_max)) + 2;
    std::vector<ChainTrace> chains(cfg.n_chains);
    detail::parallel_for(cfg.n_chains, cfg.n_threads, [&](std::size_t j) {
      RandomStream init_rng(split_seed(cfg.master_seed, 7000 + d, j));
      const StateVector init = exact_target_sample(model, init_rng);
      chains[j] = run_chain(model, kc, init, n_iters,
                            split_seed(cfg.master_seed, d, j));
    });
    result.reports[di] = limit_check(chains, d, spec, t_grid, cfg.sde_dt,
                                     split_seed(cfg.master_seed, 9999, di));
    result.median_ks.push_back(result.reports[di].median_ks());
  }
  return result;
}

inline void write_limit_csv(const LimitReport& rep, const std::string& path) {
  std::ofstream out(path);
  out << "t,ks_stat,acf_delta_lag1,acf_delta_lag2,acf_delta_lag3,"
         "acf_delta_lag4,acf_delta_lag5\n";
  for (std::size_t i = 0; i < rep.t.size(); ++i) {
    out << detail::fmt(rep.t[i]) << ',' << detail::fmt(rep.ks[i]);
    for (double v : rep.acf_delta[i]) out << ',' << detail::fmt(v);
    out << "\n";
  }
}

// Trace export: CSV with iteration, acceptance flag, jump norm and the
// recorded coordinates.
inline void write_trace_csv(const ChainTrace& trace, const std::string& path) {
  std::ofstream out(path);
  out << "iter,accepted,jump_norm";
  for (int c : trace.recorded_coords) out << ",coord" << c;
  out << "\n";
  for (long long k = 0; k < trace.n_iters; ++k) {
    out << k << ',' << static_cast<int>(trace.accepted[k]) << ','
        << detail::fmt(trace.jump_norms[k]);
    for (std::size_t c = 0; c < trace.recorded_coords.size(); ++c)
      out << ',' << detail::fmt(trace.state_at(k, static_cast<int>(c)));
    out << "\n";
  }
}

inline nlohmann::json to_json(const DiagnosticsReport& rep) {
  nlohmann::json j;
  j["acceptance_rate"] = rep.acceptance_rate;
  j["ajs"] = rep.ajs;
  j["iact"] = rep.iact;
  j["ipact"] = rep.ipact;
  if (std::isfinite(rep.avg_ks)) j["avg_ks"] = rep.avg_ks;
  j["burn_in_frac"] = rep.burn_in_frac;
  j["n_lags"] = rep.n_lags;
  return j;
}

inline nlohmann::json trace_summary_json(const ChainTrace& trace,
                                         const KernelConfig& cfg,
                                         double burn_in_frac) {
  nlohmann::json j;
  j["kernel"] = to_string(cfg.kind);
  j["ell"] = cfg.ell;
  j["d"] = cfg.d;
  j["gibbs_c"] = cfg.gibbs_c;
  j["variance_exponent"] = cfg.variance_exponent;
  j["n_iters"] = trace.n_iters;
  j["seed"] = trace.seed;
  j["acceptance_rate"] = acceptance_rate(trace, burn_in_frac);
  j["wall_clock_ns"] = trace.wall_clock_ns;
  j["version"] = kVersion;
  return j;
}

}  // namespace tmcmc
