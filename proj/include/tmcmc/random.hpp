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
#include <random>
#include <stdexcept>

namespace tmcmc {

namespace detail {

// splitmix64 finalizer, used for seed derivation only.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Wichura's AS 241 (PPND16): inverse of the standard normal CDF,
// accurate to ~1e-16 relative error over (0,1).
inline double inverse_normal_cdf(double p) {
  const double q = p - 0.5;
  if (std::fabs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    return q *
           (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
                 6.7265770927008700853e4) *
                    r +
                4.5921953931549871457e4) *
                   r +
               1.3731693765509461125e4) *
                  r +
              1.9715909503065514427e3) *
                 r +
             1.3314166789178437745e2) *
                r +
            3.3871328727963666080e0) /
           (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r +
                 3.9307895800092710610e4) *
                    r +
                2.1213794301586595867e4) *
                   r +
               5.3941960214247511077e3) *
                  r +
              6.8718700749205790830e2) *
                 r +
             4.2313330701600911252e1) *
                r +
            1.0);
  }
  double r = (q < 0) ? p : 1.0 - p;
  if (r <= 0.0) throw std::domain_error("inverse_normal_cdf: p out of (0,1)");
  r = std::sqrt(-std::log(r));
  double v;
  if (r <= 5.0) {
    r -= 1.6;
    v = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
              2.41780725177450611770e-1) *
                 r +
             1.27045825245236838258e0) *
                r +
            3.64784832476320460504e0) *
               r +
           5.76949722146069140550e0) *
              r +
          4.63033784615654529590e0) *
             r +
         1.42343711074968357734e0) /
        (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
              1.51986665636164571966e-2) *
                 r +
             1.48103976427480074590e-1) *
                r +
            6.89767334985100004550e-1) *
               r +
           1.67638483018380384940e0) *
              r +
          2.05319162663775882187e0) *
             r +
         1.0);
  } else {
    r -= 5.0;
    v = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
              1.24266094738807843860e-3) *
                 r +
             2.65321895265761230930e-2) *
                r +
            2.96560571828504891230e-1) *
               r +
           1.78482653991729133580e0) *
              r +
          5.46378491116411436990e0) *
             r +
         6.65790464350110377720e0) /
        (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) *
                  r +
              1.84631831751005468180e-5) *
                 r +
             7.86869131145613259100e-4) *
                r +
            1.48753612908506148525e-2) *
               r +
           1.36929880922735805310e-1) *
              r +
          5.99832206555887937690e-1) *
             r +
         1.0);
  }
  return (q < 0) ? -v : v;
}

}  // namespace detail

// Deterministic random stream with a fixed, documented draw layout.
// Every primitive below consumes exactly one engine word:
//   next_u64 / bit        -> 1 word
//   uniform01             -> 1 word, value strictly inside (0,1)
//   normal                -> 1 word (inverse-CDF transform)
// This makes the per-step consumption of the samplers reproducible and
// auditable: callers can predict exactly how many words any operation eats.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on the open interval (0,1); 53-bit resolution, never 0 or 1.
  double uniform01() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Single fair bit (top bit of one engine word).
  bool bit() { return (next_u64() >> 63) != 0; }

  // Standard normal via inverse CDF; exactly one word per draw.
  double normal() { return detail::inverse_normal_cdf(uniform01()); }

 private:
  std::mt19937_64 engine_;
};

// Counter-based seed derivation: chain `substream` of task `stream` under a
// master seed gets an independent stream. Documented so runs can be replayed
// per-chain: seed = mix(mix(master ^ mix(stream+1)) ^ mix(substream+1)).
inline std::uint64_t split_seed(std::uint64_t master, std::uint64_t stream,
                                std::uint64_t substream = 0) {
  std::uint64_t s = detail::mix64(master ^ detail::mix64(stream + 1));
  return detail::mix64(s ^ detail::mix64(substream + 1));
}

}  // namespace tmcmc
