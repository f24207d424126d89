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

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "tmcmc/kernels.hpp"

namespace tmcmc {

struct DiagnosticsReport {
  double acceptance_rate = 0.0;
  double ajs = 0.0;
  double iact = 0.0;
  double ipact = 0.0;
  double avg_ks = std::numeric_limits<double>::quiet_NaN();
  double burn_in_frac = 0.25;
  int n_lags = 25;
};

namespace detail {

inline std::size_t burn_in_start(std::size_t n, double burn_in_frac,
                                 const char* op) {
  if (!(burn_in_frac >= 0.0 && burn_in_frac < 1.0))
    throw std::invalid_argument(std::string(op) +
                                ": burn_in_frac outside [0,1)");
  const auto start = static_cast<std::size_t>(
      std::floor(burn_in_frac * static_cast<double>(n)));
  if (start >= n)
    throw std::invalid_argument(std::string(op) +
                                ": empty post-burn-in window");
  return start;
}

}  // namespace detail

// Fraction of accepted proposals among post-burn-in iterations.
inline double acceptance_rate(const ChainTrace& trace, double burn_in_frac) {
  const std::size_t n = trace.accepted.size();
  const std::size_t start = detail::burn_in_start(n, burn_in_frac,
                                                  "acceptance_rate");
  long long acc = 0;
  for (std::size_t k = start; k < n; ++k) acc += trace.accepted[k];
  return static_cast<double>(acc) / static_cast<double>(n - start);
}

// Mean Euclidean jump per post-burn-in transition; rejections contribute 0.
inline double average_jump_size(const ChainTrace& trace, double burn_in_frac) {
  const std::size_t n = trace.jump_norms.size();
  const std::size_t start = detail::burn_in_start(n, burn_in_frac,
                                                  "average_jump_size");
  double s = 0.0;
  for (std::size_t k = start; k < n; ++k) s += trace.jump_norms[k];
  return s / static_cast<double>(n - start);
}

// rho_k = c_k / c_0 with the standard biased autocovariance estimator;
// returns lags 0..max_lag, rho_0 = 1.
inline std::vector<double> autocorrelation(std::span<const double> series,
                                           int max_lag) {
  const std::size_t n = series.size();
  if (max_lag < 0) throw std::invalid_argument("autocorrelation: max_lag < 0");
  if (n <= static_cast<std::size_t>(max_lag))
    throw std::invalid_argument("autocorrelation: series too short");
  double mean = 0.0;
  for (double v : series) mean += v;
  mean /= static_cast<double>(n);
  double c0 = 0.0;
  for (double v : series) c0 += (v - mean) * (v - mean);
  c0 /= static_cast<double>(n);
  if (c0 <= 0.0)
    throw std::domain_error("autocorrelation: zero-variance series");
  std::vector<double> rho(max_lag + 1);
  rho[0] = 1.0;
  for (int k = 1; k <= max_lag; ++k) {
    double ck = 0.0;
    for (std::size_t t = 0; t + k < n; ++t)
      ck += (series[t] - mean) * (series[t + k] - mean);
    rho[k] = ck / static_cast<double>(n) / c0;
  }
  return rho;
}

// Integrated autocorrelation time with a hard lag cap:
// 1 + 2 * sum_{k=1..max_lag} rho_k.
inline double iact(std::span<const double> series, int max_lag = 25) {
  const auto rho = autocorrelation(series, max_lag);
  double s = 0.0;
  for (int k = 1; k <= max_lag; ++k) s += rho[k];
  return 1.0 + 2.0 * s;
}

// Partial autocorrelations via the Durbin-Levinson recursion on rho_1..K.
inline std::vector<double> pacf_from_acf(const std::vector<double>& rho) {
  const int K = static_cast<int>(rho.size()) - 1;
  std::vector<double> pacf(K + 1, 0.0);
  std::vector<double> phi(K + 1, 0.0), prev(K + 1, 0.0);
  if (K >= 1) {
    if (std::fabs(rho[1]) >= 1.0)
      throw std::domain_error("ipact: Durbin-Levinson recursion breakdown");
    phi[1] = rho[1];
    pacf[1] = rho[1];
  }
  for (int k = 2; k <= K; ++k) {
    prev = phi;
    double num = rho[k];
    double den = 1.0;
    for (int j = 1; j < k; ++j) {
      num -= prev[j] * rho[k - j];
      den -= prev[j] * rho[j];
    }
    if (den <= 0.0 || !std::isfinite(num / den) ||
        std::fabs(num / den) >= 1.0)
      throw std::domain_error("ipact: Durbin-Levinson recursion breakdown");
    phi[k] = num / den;
    pacf[k] = phi[k];
    for (int j = 1; j < k; ++j) phi[j] = prev[j] - phi[k] * prev[k - j];
  }
  return pacf;
}

// Integrated partial autocorrelation time: 1 + 2 * sum pacf_k.
inline double ipact(std::span<const double> series, int max_lag = 25) {
  const auto rho = autocorrelation(series, max_lag);
  const auto pacf = pacf_from_acf(rho);
  double s = 0.0;
  for (int k = 1; k <= max_lag; ++k) s += pacf[k];
  return 1.0 + 2.0 * s;
}

// Exact one-sample Kolmogorov-Smirnov statistic against a reference CDF.
inline double ks_statistic(std::span<const double> sample,
                           const std::function<double(double)>& cdf) {
  if (sample.empty()) throw std::invalid_argument("ks_statistic: empty sample");
  std::vector<double> sorted(sample.begin(), sample.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  double sup = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double F = cdf(sorted[i]);
    const double hi = std::fabs((static_cast<double>(i) + 1.0) / n - F);
    const double lo = std::fabs(static_cast<double>(i) / n - F);
    sup = std::max(sup, std::max(hi, lo));
  }
  return sup;
}

// Two-sample Kolmogorov-Smirnov statistic.
inline double ks_statistic_two_sample(std::span<const double> a,
                                      std::span<const double> b) {
  if (a.empty() || b.empty())
    throw std::invalid_argument("ks_statistic_two_sample: empty sample");
  std::vector<double> sa(a.begin(), a.end()), sb(b.begin(), b.end());
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  const double na = static_cast<double>(sa.size());
  const double nb = static_cast<double>(sb.size());
  double sup = 0.0;
  std::size_t i = 0, j = 0;
  while (i < sa.size() && j < sb.size()) {
    const double x = std::min(sa[i], sb[j]);
    while (i < sa.size() && sa[i] <= x) ++i;
    while (j < sb.size() && sb[j] <= x) ++j;
    sup = std::max(sup, std::fabs(static_cast<double>(i) / na -
                                  static_cast<double>(j) / nb));
  }
  return sup;
}

// Mean over post-burn-in time points of the across-chain one-sample K-S
// statistic for the given recorded coordinate.
inline double average_ks(const std::vector<ChainTrace>& ensemble,
                         int coordinate,
                         const std::function<double(double)>& cdf,
                         double burn_in_frac) {
  if (ensemble.size() < 2)
    throw std::invalid_argument("average_ks: need at least 2 chains");
  const long long n = ensemble.front().n_iters;
  int col = -1;
  for (std::size_t c = 0; c < ensemble.front().recorded_coords.size(); ++c)
    if (ensemble.front().recorded_coords[c] == coordinate) col = static_cast<int>(c);
  if (col < 0)
    throw std::invalid_argument("average_ks: coordinate not recorded");
  for (const auto& tr : ensemble) {
    if (tr.n_iters != n)
      throw std::invalid_argument("average_ks: ragged ensemble");
    if (tr.recorded_coords != ensemble.front().recorded_coords)
      throw std::invalid_argument("average_ks: inconsistent record policies");
  }
  const std::size_t start = detail::burn_in_start(
      static_cast<std::size_t>(n), burn_in_frac, "average_ks");
  std::vector<double> cross(ensemble.size());
  double total = 0.0;
  for (std::size_t t = start; t < static_cast<std::size_t>(n); ++t) {
    for (std::size_t j = 0; j < ensemble.size(); ++j)
      cross[j] = ensemble[j].state_at(static_cast<long long>(t), col);
    total += ks_statistic(cross, cdf);
  }
  return total / static_cast<double>(n - start);
}

inline DiagnosticsReport diagnose(const ChainTrace& trace, int coordinate = 0,
                                  double burn_in_frac = 0.25,
                                  int n_lags = 25) {
  int col = -1;
  for (std::size_t c = 0; c < trace.recorded_coords.size(); ++c)
    if (trace.recorded_coords[c] == coordinate) col = static_cast<int>(c);
  if (col < 0)
    throw std::invalid_argument("diagnose: coordinate not recorded");
  const std::size_t n = static_cast<std::size_t>(trace.n_iters);
  const std::size_t start = detail::burn_in_start(n, burn_in_frac, "diagnose");
  std::vector<double> series(n - start);
  for (std::size_t t = start; t < n; ++t)
    series[t - start] = trace.state_at(static_cast<long long>(t), col);
  DiagnosticsReport rep;
  rep.acceptance_rate = acceptance_rate(trace, burn_in_frac);
  rep.ajs = average_jump_size(trace, burn_in_frac);
  rep.iact = iact(series, n_lags);
  rep.ipact = ipact(series, n_lags);
  rep.burn_in_frac = burn_in_frac;
  rep.n_lags = n_lags;
  return rep;
}

}  // namespace tmcmc
