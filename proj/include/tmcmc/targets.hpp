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

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "tmcmc/marginals.hpp"

namespace tmcmc {

using StateVector = std::vector<double>;

// Per-class scaling exponents for product targets with non-identical
// components. The first k coordinates carry individual scales
// 1/theta_i^2 = K_i / d^{lambda_i}; the remaining d-k coordinates fall into
// m classes, class i replicated r_counts(i,d) times with
// 1/theta^2 = K_{k+i} / d^{gamma_i}.
struct ThetaSchedule {
  int k = 0;
  std::vector<double> lambda_exps;            // size k, decreasing
  std::vector<double> gammas;                 // size m, decreasing
  std::vector<double> Ks;                     // size k + m, positive
  std::function<long long(int, long long)> r_counts;  // (i, d) -> count, i in 1..m
  double alpha = 1.0;                         // proposal-variance exponent
};

inline void validate(const ThetaSchedule& s) {
  const int m = static_cast<int>(s.gammas.size());
  if (static_cast<int>(s.lambda_exps.size()) != s.k)
    throw std::invalid_argument("ThetaSchedule: need k lambda exponents");
  if (static_cast<int>(s.Ks.size()) != s.k + m)
    throw std::invalid_argument("ThetaSchedule: need k+m constants");
  for (double K : s.Ks)
    if (!(K > 0)) throw std::invalid_argument("ThetaSchedule: K <= 0");
  for (std::size_t i = 1; i < s.gammas.size(); ++i)
    if (s.gammas[i] > s.gammas[i - 1])
      throw std::invalid_argument("ThetaSchedule: gammas must be decreasing");
  for (std::size_t i = 1; i < s.lambda_exps.size(); ++i)
    if (s.lambda_exps[i] > s.lambda_exps[i - 1])
      throw std::invalid_argument("ThetaSchedule: lambdas must be decreasing");
  if (m > 0 && !s.r_counts)
    throw std::invalid_argument("ThetaSchedule: r_counts missing");
}

// Finite-d aggregate scaling factor
//   xi_d = sqrt( sum_i d^{gamma_i} r(i,d) / (K_{k+i} d^alpha) ).
// The per-class terms must stay bounded as d grows; this is checked
// numerically on a geometric grid of dimensions. Growth of 10%+ per decade
// sustained across the top of the grid is treated as a violation.
inline double xi_constant(const ThetaSchedule& s, long long d) {
  validate(s);
  const int m = static_cast<int>(s.gammas.size());
  if (m == 0) return 1.0;
  auto total = [&](long long dd) {
    double sum = 0.0;
    for (int i = 0; i < m; ++i) {
      const double term = std::pow(static_cast<double>(dd), s.gammas[i]) *
                          static_cast<double>(s.r_counts(i + 1, dd)) /
                          (s.Ks[s.k + i] * std::pow(static_cast<double>(dd), s.alpha));
      sum += term;
    }
    return sum;
  };
  double prev2 = total(10000), prev1 = total(100000), last = total(1000000);
  if (last > 1.1 * prev1 && prev1 > 1.1 * prev2)
    throw std::domain_error(
        "xi_constant: schedule terms grow without bound on the test grid");
  const double v = total(d);
  if (!(v > 0) || !std::isfinite(v))
    throw std::domain_error("xi_constant: non-positive or non-finite sum");
  return std::sqrt(v);
}

// Change of measure against a Gaussian reference: the target carries an extra
// log-density term -psi(x). grad must match finite differences of psi.
struct PsiFunctional {
  std::string name;
  std::function<double(const StateVector&)> psi;
  std::function<StateVector(const StateVector&)> grad_psi;
};

inline PsiFunctional zero_psi() {
  return PsiFunctional{"zero",
                       [](const StateVector&) { return 0.0; },
                       [](const StateVector& x) {
                         return StateVector(x.size(), 0.0);
                       }};
}

// Bounded smooth perturbation: psi(x) = eps * sum_j x_j^2 / (1 + x_j^2).
inline PsiFunctional quadratic_perturbation_psi(double eps) {
  return PsiFunctional{
      "quadratic-perturbation(" + std::to_string(eps) + ")",
      [eps](const StateVector& x) {
        double s = 0.0;
        for (double v : x) s += v * v / (1.0 + v * v);
        return eps * s;
      },
      [eps](const StateVector& x) {
        StateVector g(x.size());
        for (std::size_t j = 0; j < x.size(); ++j) {
          const double w = 1.0 + x[j] * x[j];
          g[j] = eps * 2.0 * x[j] / (w * w);
        }
        return g;
      }};
}

struct IidProduct {
  MarginalDensity marginal;
  int d = 0;
};

struct ScaledProduct {
  MarginalDensity marginal;
  ThetaSchedule schedule;
  int d = 0;
  std::vector<double> thetas;  // per-coordinate scales, filled at construction
};

struct GaussianMeasure {
  std::vector<double> lambdas;  // eigenvalue square roots, decreasing, > 0
  PsiFunctional psi;
  int d = 0;
};

using TargetModel = std::variant<IidProduct, ScaledProduct, GaussianMeasure>;

inline IidProduct make_iid_product(MarginalDensity marginal, int d) {
  if (d < 1) throw std::invalid_argument("make_iid_product: d < 1");
  return IidProduct{std::move(marginal), d};
}

// Coordinate layout: the k individually-scaled coordinates first, then the m
// replication classes as contiguous blocks. Requires k + sum_i r(i,d) == d.
inline ScaledProduct make_scaled_product(MarginalDensity marginal,
                                         ThetaSchedule schedule, int d) {
  if (d < 1) throw std::invalid_argument("make_scaled_product: d < 1");
  validate(schedule);
  const int m = static_cast<int>(schedule.gammas.size());
  std::vector<double> thetas;
  thetas.reserve(d);
  for (int i = 0; i < schedule.k; ++i) {
    thetas.push_back(std::sqrt(std::pow(static_cast<double>(d),
                                        schedule.lambda_exps[i]) /
                               schedule.Ks[i]));
  }
  for (int i = 0; i < m; ++i) {
    const long long r = schedule.r_counts(i + 1, d);
    if (r < 0) throw std::invalid_argument("make_scaled_product: r(i,d) < 0");
    const double theta = std::sqrt(
        std::pow(static_cast<double>(d), schedule.gammas[i]) /
        schedule.Ks[schedule.k + i]);
    for (long long j = 0; j < r; ++j) thetas.push_back(theta);
  }
  if (static_cast<int>(thetas.size()) != d)
    throw std::invalid_argument(
        "make_scaled_product: k + sum r(i,d) != d for this schedule");
  for (double t : thetas)
    if (!(t > 0) || !std::isfinite(t))
      throw std::invalid_argument("make_scaled_product: theta_j(d) <= 0");
  return ScaledProduct{std::move(marginal), std::move(schedule), d,
                       std::move(thetas)};
}

inline GaussianMeasure make_gaussian_measure(std::vector<double> lambdas,
                                             PsiFunctional psi) {
  if (lambdas.empty())
    throw std::invalid_argument("make_gaussian_measure: empty spectrum");
  for (std::size_t j = 0; j < lambdas.size(); ++j) {
    if (!(lambdas[j] > 0))
      throw std::invalid_argument("make_gaussian_measure: lambda_j <= 0");
    if (j > 0 && lambdas[j] > lambdas[j - 1])
      throw std::invalid_argument(
          "make_gaussian_measure: lambdas must be non-increasing");
  }
  const int d = static_cast<int>(lambdas.size());
  return GaussianMeasure{std::move(lambdas), std::move(psi), d};
}

// Default spectrum for experiments: lambda_j = j^{-kappa}.
inline std::vector<double> power_decay_lambdas(int d, double kappa = 1.0) {
  std::vector<double> l(d);
  for (int j = 0; j < d; ++j) l[j] = std::pow(static_cast<double>(j + 1), -kappa);
  return l;
}

inline int dimension(const TargetModel& model) {
  return std::visit([](const auto& m) { return m.d; }, model);
}

namespace detail {

inline void check_state(const TargetModel& model, const StateVector& x,
                        const char* op) {
  if (static_cast<int>(x.size()) != dimension(model))
    throw std::invalid_argument(std::string(op) + ": dimension mismatch");
  for (double v : x)
    if (std::isnan(v))
      throw std::invalid_argument(std::string(op) + ": NaN coordinate");
}

}  // namespace detail

// Unnormalized log target density. For the Gaussian-measure family the
// normalizing constant is omitted throughout; only ratios are ever used.
inline double log_density(const TargetModel& model, const StateVector& x) {
  detail::check_state(model, x, "log_density");
  return std::visit(
      [&x](const auto& m) -> double {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, IidProduct>) {
          double s = 0.0;
          for (double v : x) s += m.marginal.log_f(v);
          return s;
        } else if constexpr (std::is_same_v<T, ScaledProduct>) {
          double s = 0.0;
          for (int j = 0; j < m.d; ++j)
            s += std::log(m.thetas[j]) + m.marginal.log_f(m.thetas[j] * x[j]);
          return s;
        } else {
          double q = 0.0;
          for (int j = 0; j < m.d; ++j) {
            const double z = x[j] / m.lambdas[j];
            q += z * z;
          }
          return -m.psi.psi(x) - 0.5 * q;
        }
      },
      model);
}

// log pi(y) - log pi(x); normalizing constants never enter. Antisymmetric by
// construction. Requires log_density(x) > -inf.
inline double log_ratio(const TargetModel& model, const StateVector& x,
                        const StateVector& y) {
  const double lx = log_density(model, x);
  if (lx == -std::numeric_limits<double>::infinity())
    throw std::domain_error("log_ratio: current point has zero density");
  return log_density(model, y) - lx;
}

inline StateVector grad_log_density(const TargetModel& model,
                                    const StateVector& x) {
  detail::check_state(model, x, "grad_log_density");
  return std::visit(
      [&x](const auto& m) -> StateVector {
        using T = std::decay_t<decltype(m)>;
        StateVector g(x.size());
        if constexpr (std::is_same_v<T, IidProduct>) {
          for (std::size_t j = 0; j < x.size(); ++j)
            g[j] = m.marginal.dlog_f(x[j]);
        } else if constexpr (std::is_same_v<T, ScaledProduct>) {
          for (std::size_t j = 0; j < x.size(); ++j)
            g[j] = m.thetas[j] * m.marginal.dlog_f(m.thetas[j] * x[j]);
        } else {
          StateVector gp = m.psi.grad_psi(x);
          for (std::size_t j = 0; j < x.size(); ++j)
            g[j] = -x[j] / (m.lambdas[j] * m.lambdas[j]) - gp[j];
        }
        for (double v : g)
          if (!std::isfinite(v))
            throw std::domain_error(
                "grad_log_density: non-differentiable or non-finite point");
        return g;
      },
      model);
}

}  // namespace tmcmc
