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
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

namespace tmcmc {

inline constexpr double kLog2Pi = 1.8378770664093454836;  // log(2*pi)

inline double norm_pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

inline double norm_cdf(double x) {
  return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

// log Phi(x), stable far into the left tail where Phi underflows.
inline double log_norm_cdf(double x) {
  if (x > -36.0) {
    const double p = 0.5 * std::erfc(-x / std::numbers::sqrt2);
    return std::log(p);
  }
  // Asymptotic expansion: Phi(x) ~ phi(x)/(-x) * (1 - 1/x^2 + 3/x^4 - 15/x^6)
  const double x2 = x * x;
  const double corr = std::log1p(-1.0 / x2 + 3.0 / (x2 * x2) -
                                 15.0 / (x2 * x2 * x2));
  return -0.5 * x2 - 0.5 * kLog2Pi - std::log(-x) + corr;
}

// Gauss-Legendre nodes/weights on [-1,1], Newton iteration on the
// three-term recurrence.
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;

  explicit GaussLegendre(int n) : nodes(n), weights(n) {
    const double pi = std::numbers::pi;
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
      double x = std::cos(pi * (i + 0.75) / (n + 0.5));
      double pp = 0.0;
      for (int iter = 0; iter < 100; ++iter) {
        double p0 = 1.0, p1 = 0.0;
        for (int j = 0; j < n; ++j) {
          const double p2 = p1;
          p1 = p0;
          p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
        }
        pp = n * (x * p0 - p1) / (x * x - 1.0);
        const double dx = p0 / pp;
        x -= dx;
        if (std::fabs(dx) < 1e-15) break;
      }
      nodes[i] = -x;
      nodes[n - 1 - i] = x;
      weights[i] = 2.0 / ((1.0 - x * x) * pp * pp);
      weights[n - 1 - i] = weights[i];
    }
  }
};

// Integrate f over [a,b] with an n-node Gauss-Legendre rule.
template <typename F>
double integrate_gl(F&& f, double a, double b, const GaussLegendre& rule) {
  const double h = 0.5 * (b - a);
  const double c = 0.5 * (b + a);
  double s = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    s += rule.weights[i] * f(c + h * rule.nodes[i]);
  }
  return s * h;
}

namespace detail {

template <typename F>
double adaptive_simpson_rec(F& f, double a, double b, double fa, double fm,
                            double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (std::fabs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  if (depth <= 0)
    throw std::runtime_error(
        "adaptive_simpson: failed to converge (divergent or too rough "
        "integrand)");
  return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol,
                              depth - 1) +
         adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol,
                              depth - 1);
}

}  // namespace detail

// Adaptive Simpson quadrature with absolute tolerance. Throws if the
// recursion depth is exhausted before the tolerance is met.
template <typename F>
double adaptive_simpson(F f, double a, double b, double tol,
                        int max_depth = 48) {
  const double m = 0.5 * (a + b);
  const double fa = f(a), fm = f(m), fb = f(b);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return detail::adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, tol,
                                      max_depth);
}

// Golden-section search for the maximum of a unimodal function on [a,b],
// refined until the bracket width is at most xtol.
template <typename F>
double golden_section_max(F f, double a, double b, double xtol) {
  constexpr double invphi = 0.6180339887498949;
  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > xtol) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace tmcmc
