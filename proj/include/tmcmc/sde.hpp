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
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "tmcmc/diagnostics.hpp"
#include "tmcmc/kernels.hpp"
#include "tmcmc/random.hpp"

namespace tmcmc {

// One-dimensional Langevin limit: dU = sqrt(g) dB + (g/2) (log f(U))' dt.
struct LangevinSpec1D {
  double speed = 1.0;  // g
  std::function<double(double)> dlog_f;
  std::function<double(RandomStream&)> u0_sampler;
};

// Hilbert-space limit in the eigenbasis:
// dz = -g (z + diag(lambda^2) grad_psi(z)) dt + sqrt(2g) dW, W with
// coordinate-wise variance lambda_j^2.
struct LangevinSpecHilbert {
  double speed = 1.0;
  std::vector<double> lambdas;
  std::function<StateVector(const StateVector&)> grad_psi;
  std::function<StateVector(RandomStream&)> z0_sampler;
};

// Euler-Maruyama path of the 1-D Langevin SDE; returns n_steps+1 values
// including U_0.
inline std::vector<double> euler_langevin_1d(const LangevinSpec1D& spec,
                                             double dt, long long n_steps,
                                             std::uint64_t seed) {
  if (!(dt > 0)) throw std::invalid_argument("euler_langevin_1d: dt <= 0");
  if (!(spec.speed >= 0))
    throw std::invalid_argument("euler_langevin_1d: negative speed");
  RandomStream rng(seed);
  std::vector<double> path(n_steps + 1);
  double u = spec.u0_sampler(rng);
  path[0] = u;
  const double noise = std::sqrt(spec.speed * dt);
  for (long long k = 0; k < n_steps; ++k) {
    const double drift = spec.dlog_f(u);
    if (!std::isfinite(drift))
      throw std::runtime_error("euler_langevin_1d: non-finite drift at step " +
                               std::to_string(k));
    u += 0.5 * spec.speed * drift * dt + noise * rng.normal();
    path[k + 1] = u;
  }
  return path;
}

// Euler-Maruyama path of the Hilbert-space SDE in coordinates.
inline std::vector<StateVector> euler_langevin_hilbert(
    const LangevinSpecHilbert& spec, double dt, long long n_steps,
    std::uint64_t seed) {
  if (!(dt > 0))
    throw std::invalid_argument("euler_langevin_hilbert: dt <= 0");
  RandomStream rng(seed);
  const std::size_t d = spec.lambdas.size();
  std::vector<StateVector> path(n_steps + 1);
  StateVector z = spec.z0_sampler(rng);
  if (z.size() != d)
    throw std::invalid_argument("euler_langevin_hilbert: z0 dimension");
  path[0] = z;
  const double g = spec.speed;
  const double noise = std::sqrt(2.0 * g * dt);
  for (long long k = 0; k < n_steps; ++k) {
    const StateVector gp = spec.grad_psi(z);
    for (std::size_t j = 0; j < d; ++j) {
      const double drift = z[j] + spec.lambdas[j] * spec.lambdas[j] * gp[j];
      if (!std::isfinite(drift))
        throw std::runtime_error(
            "euler_langevin_hilbert: non-finite drift at step " +
            std::to_string(k));
      z[j] += -g * drift * dt + noise * spec.lambdas[j] * rng.normal();
    }
    path[k + 1] = z;
  }
  return path;
}

enum class SpeedupMode { Stepwise, Interpolated };

// The chain coordinate viewed on the diffusion time scale: value at
// iteration [d*t] (Stepwise, the product-family convention) or the
// piecewise-linear interpolant (dt-k) X_{k+1} + (k+1-dt) X_k (Interpolated,
// the dependent-family convention).
inline std::vector<double> sped_up_coordinate(
    const ChainTrace& trace, int d, std::span<const double> t_grid,
    SpeedupMode mode = SpeedupMode::Stepwise, int coordinate = 0) {
  int col = -1;
  for (std::size_t c = 0; c < trace.recorded_coords.size(); ++c)
    if (trace.recorded_coords[c] == coordinate) col = static_cast<int>(c);
  if (col < 0)
    throw std::invalid_argument("sped_up_coordinate: coordinate not recorded");
  std::vector<double> out(t_grid.size());
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    const double dt = static_cast<double>(d) * t_grid[i];
    const auto k = static_cast<long long>(std::floor(dt));
    if (mode == SpeedupMode::Stepwise) {
      if (k + 1 > trace.n_iters)
        throw std::invalid_argument("sped_up_coordinate: trace too short");
      out[i] = trace.state_at(k, col);
    } else {
      if (k + 2 > trace.n_iters)
        throw std::invalid_argument("sped_up_coordinate: trace too short");
      const double w = dt - static_cast<double>(k);
      out[i] = w * trace.state_at(k + 1, col) +
               (1.0 - w) * trace.state_at(k, col);
    }
  }
  return out;
}

// Per-time-point comparison of a chain ensemble against an SDE ensemble:
// two-sample K-S at each t plus the gap in ensemble lag correlations
// (lags 1..5 on the t grid; NaN where the lagged column runs off the grid).
struct LimitReport {
  std::vector<double> t;
  std::vector<double> ks;
  std::vector<std::array<double, 5>> acf_delta;

  double median_ks() const {
    std::vector<double> v = ks;
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
  }
};

namespace detail {

// Pearson correlation across ensemble members between columns t0 and t1.
inline double ensemble_corr(const std::vector<std::vector<double>>& vals,
                            std::size_t t0, std::size_t t1) {
  const std::size_t n = vals.size();
  double m0 = 0, m1 = 0;
  for (const auto& row : vals) {
    m0 += row[t0];
    m1 += row[t1];
  }
  m0 /= static_cast<double>(n);
  m1 /= static_cast<double>(n);
  double c01 = 0, c00 = 0, c11 = 0;
  for (const auto& row : vals) {
    c01 += (row[t0] - m0) * (row[t1] - m1);
    c00 += (row[t0] - m0) * (row[t0] - m0);
    c11 += (row[t1] - m1) * (row[t1] - m1);
  }
  return c01 / std::sqrt(c00 * c11);
}

}  // namespace detail

// Core comparison on pre-extracted ensembles: vals[member][t_index].
inline LimitReport limit_check(
    const std::vector<std::vector<double>>& chain_vals,
    const std::vector<std::vector<double>>& sde_vals,
    std::span<const double> t_grid) {
  if (chain_vals.size() != sde_vals.size())
    throw std::invalid_argument("limit_check: mismatched ensemble sizes");
  if (chain_vals.size() < 2)
    throw std::invalid_argument("limit_check: ensemble too small");
  const std::size_t nt = t_grid.size();
  for (const auto& row : chain_vals)
    if (row.size() != nt)
      throw std::invalid_argument("limit_check: chain row length != t grid");
  for (const auto& row : sde_vals)
    if (row.size() != nt)
      throw std::invalid_argument("limit_check: sde row length != t grid");

  LimitReport rep;
  rep.t.assign(t_grid.begin(), t_grid.end());
  rep.ks.resize(nt);
  rep.acf_delta.resize(nt);
  std::vector<double> a(chain_vals.size()), b(sde_vals.size());
  for (std::size_t i = 0; i < nt; ++i) {
    for (std::size_t j = 0; j < chain_vals.size(); ++j) a[j] = chain_vals[j][i];
    for (std::size_t j = 0; j < sde_vals.size(); ++j) b[j] = sde_vals[j][i];
    rep.ks[i] = ks_statistic_two_sample(a, b);
    for (int lag = 1; lag <= 5; ++lag) {
      if (i + lag < nt) {
        const double rc = detail::ensemble_corr(chain_vals, i, i + lag);
        const double rs = detail::ensemble_corr(sde_vals, i, i + lag);
        rep.acf_delta[i][lag - 1] = std::fabs(rc - rs);
      } else {
        rep.acf_delta[i][lag - 1] = std::numeric_limits<double>::quiet_NaN();
      }
    }
  }
  return rep;
}

// Convenience: extract the sped-up coordinate from each trace and simulate a
// matched-count 1-D SDE ensemble on the same grid.
inline LimitReport limit_check(const std::vector<ChainTrace>& chains, int d,
                               const LangevinSpec1D& spec,
                               std::span<const double> t_grid, double sde_dt,
                               std::uint64_t sde_seed,
                               SpeedupMode mode = SpeedupMode::Stepwise) {
  if (chains.size() < 2)
    throw std::invalid_argument("limit_check: ensemble too small");
  std::vector<std::vector<double>> chain_vals(chains.size());
  for (std::size_t j = 0; j < chains.size(); ++j)
    chain_vals[j] = sped_up_coordinate(chains[j], d, t_grid, mode);

  const double t_max = *std::max_element(t_grid.begin(), t_grid.end());
  const auto n_steps = static_cast<long long>(std::ceil(t_max / sde_dt));
  std::vector<std::vector<double>> sde_vals(chains.size());
  for (std::size_t j = 0; j < chains.size(); ++j) {
    const auto path =
        euler_langevin_1d(spec, sde_dt, n_steps, split_seed(sde_seed, j));
    std::vector<double> row(t_grid.size());
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
      auto k = static_cast<long long>(std::llround(t_grid[i] / sde_dt));
      if (k > n_steps) k = n_steps;
      row[i] = path[k];
    }
    sde_vals[j] = std::move(row);
  }
  return limit_check(chain_vals, sde_vals, t_grid);
}

}  // namespace tmcmc
