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
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>

#include "tmcmc/math.hpp"
#include "tmcmc/random.hpp"

namespace tmcmc {

// One-dimensional marginal density in log form, with the derivative of the
// log density supplied analytically. `sampler` (exact draw from f) and `cdf`
// are present for the builtins that admit cheap ones; the sampler initializes
// chains at stationarity, the cdf feeds the K-S diagnostics.
struct MarginalDensity {
  std::string name;
  std::function<double(double)> log_f;
  std::function<double(double)> dlog_f;
  std::function<double(RandomStream&)> sampler;  // may be empty
  std::function<double(double)> cdf;             // may be empty
};

inline MarginalDensity std_normal_marginal() {
  return MarginalDensity{
      "std-normal",
      [](double x) { return -0.5 * x * x - 0.5 * kLog2Pi; },
      [](double x) { return -x; },
      [](RandomStream& rng) { return rng.normal(); },
      [](double x) { return norm_cdf(x); }};
}

inline MarginalDensity normal_marginal(double sigma) {
  if (!(sigma > 0)) throw std::invalid_argument("normal_marginal: sigma <= 0");
  const double ls = std::log(sigma);
  return MarginalDensity{
      "normal(" + std::to_string(sigma) + ")",
      [sigma, ls](double x) {
        const double z = x / sigma;
        return -0.5 * z * z - 0.5 * kLog2Pi - ls;
      },
      [sigma](double x) { return -x / (sigma * sigma); },
      [sigma](RandomStream& rng) { return sigma * rng.normal(); },
      [sigma](double x) { return norm_cdf(x / sigma); }};
}

// Standard logistic: f(x) = e^{-x} / (1 + e^{-x})^2.
inline MarginalDensity logistic_marginal() {
  return MarginalDensity{
      "logistic",
      [](double x) {
        const double ax = std::fabs(x);
        return -ax - 2.0 * std::log1p(std::exp(-ax));
      },
      [](double x) { return -std::tanh(0.5 * x); },
      [](RandomStream& rng) {
        const double u = rng.uniform01();
        return std::log(u) - std::log1p(-u);
      },
      [](double x) { return 1.0 / (1.0 + std::exp(-x)); }};
}

inline MarginalDensity student_t_marginal(double nu) {
  if (!(nu > 0)) throw std::invalid_argument("student_t_marginal: nu <= 0");
  const double lc = std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu) -
                    0.5 * std::log(nu * std::numbers::pi);
  return MarginalDensity{
      "student-t(" + std::to_string(nu) + ")",
      [nu, lc](double x) { return lc - 0.5 * (nu + 1.0) * std::log1p(x * x / nu); },
      [nu](double x) { return -(nu + 1.0) * x / (nu + x * x); },
      nullptr,
      nullptr};
}

// Fisher-type information constant I = E_f[(f'/f)^2], computed by adaptive
// quadrature after the substitution x = tan(t); the transformed integrand
// lives on (-pi/2, pi/2). Throws when the quadrature cannot converge (the
// integral diverges or the integrand is too rough).
inline double information_constant(const MarginalDensity& marginal,
                                   double abs_tol = 1e-8) {
  auto integrand = [&](double t) {
    const double ct = std::cos(t);
    if (ct <= 0.0) return 0.0;
    const double x = std::tan(t);
    const double lf = marginal.log_f(x);
    if (lf == -std::numeric_limits<double>::infinity())
      return 0.0;  // outside the support
    const double d = marginal.dlog_f(x);
    const double fx = std::exp(lf);
    if (fx == 0.0) return 0.0;  // tail underflow: (dlog f)^2 grows at most
                                // polynomially for admissible marginals
    return d * d * fx / (ct * ct);
  };
  const double half_pi = 0.5 * std::numbers::pi;
  const double value =
      adaptive_simpson(integrand, -half_pi, half_pi, abs_tol);
  if (!(value > 0.0) || !std::isfinite(value))
    throw std::runtime_error("information_constant: non-positive result");
  return value;
}

}  // namespace tmcmc
