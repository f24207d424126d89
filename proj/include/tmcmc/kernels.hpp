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

#include <bit>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "tmcmc/random.hpp"
#include "tmcmc/targets.hpp"

namespace tmcmc {

enum class KernelKind { TMCMC, RWM };

inline const char* to_string(KernelKind k) {
  return k == KernelKind::TMCMC ? "tmcmc" : "rwm";
}

// Proposal configuration. Without a preconditioner the per-coordinate scale
// is ell / d^{alpha/2}. With a preconditioner (the dependent-family
// convention) the scale is sqrt(2 ell^2 / d) * lambda_i; the sqrt(2) factor
// is part of that convention and is deliberately not folded into ell.
struct KernelConfig {
  KernelKind kind = KernelKind::TMCMC;
  double ell = 1.0;
  int d = 1;
  double gibbs_c = 1.0;  // per-coordinate update probability; 1 = full update
  std::optional<std::vector<double>> preconditioner;
  double variance_exponent = 1.0;  // alpha
};

inline void validate(const KernelConfig& cfg) {
  if (!(cfg.ell > 0)) throw std::invalid_argument("KernelConfig: ell <= 0");
  if (cfg.d < 1) throw std::invalid_argument("KernelConfig: d < 1");
  if (!(cfg.gibbs_c > 0.0 && cfg.gibbs_c <= 1.0))
    throw std::invalid_argument("KernelConfig: gibbs_c outside (0,1]");
  if (cfg.preconditioner &&
      static_cast<int>(cfg.preconditioner->size()) != cfg.d)
    throw std::invalid_argument("KernelConfig: preconditioner length != d");
}

struct StepResult {
  StateVector next;
  bool accepted = false;
  double log_alpha = 0.0;  // log acceptance probability before capping at 0
  double jump_norm = 0.0;
};

// How much of the chain to keep. Coordinates listed in `coords` are recorded
// at every iteration; acceptance flags and jump norms are always kept.
struct RecordPolicy {
  std::vector<int> coords = {0};
  bool record_states = true;

  static RecordPolicy none() { return RecordPolicy{{}, false}; }
};

// Recorded chain. states is row-major with one row per iteration holding the
// recorded coordinates of X_k, the state at the *start* of iteration k
// (X_0 is the initial point). accepted[k] and jump_norms[k] describe the
// transition X_k -> X_{k+1}; rejected iterations repeat the state.
struct ChainTrace {
  std::vector<double> states;
  std::vector<int> recorded_coords;
  std::vector<std::uint8_t> accepted;
  std::vector<double> jump_norms;
  long long n_iters = 0;
  std::uint64_t seed = 0;
  long long wall_clock_ns = 0;
  StateVector final_state;
  int d = 0;

  double state_at(long long iter, int coord_index = 0) const {
    return states[static_cast<std::size_t>(iter) * recorded_coords.size() +
                  coord_index];
  }
};

// |Z| * scale for a standard normal Z: the zero-truncated centered normal.
// Consumes exactly one stream word.
inline double sample_half_normal(double scale, RandomStream& rng) {
  if (!(scale > 0)) throw std::invalid_argument("sample_half_normal: scale <= 0");
  return std::fabs(rng.normal()) * scale;
}

namespace detail {

// Per-step stream layout (fixed; see also RandomStream):
//   TMCMC: 1 word (epsilon), then d words (sign bits), then d words (mask
//          uniforms, only when gibbs_c < 1), then 1 word (accept uniform).
//   RWM:   d words (normals), then d words (mask uniforms, only when
//          gibbs_c < 1), then 1 word (accept uniform).
// When gibbs_c == 1 the mask draws are skipped entirely, so the full-update
// kernel and the Gibbs kernel with c = 1 produce bit-identical traces.
inline void propose_into(const KernelConfig& cfg, const StateVector& x,
                         RandomStream& rng, StateVector& y,
                         std::vector<std::uint8_t>& mask) {
  const int d = cfg.d;
  const bool masked = cfg.gibbs_c < 1.0;
  y.resize(d);
  mask.resize(d);

  const double* lam =
      cfg.preconditioner ? cfg.preconditioner->data() : nullptr;

  if (cfg.kind == KernelKind::TMCMC) {
    double eps;
    if (lam) {
      eps = sample_half_normal(1.0, rng) *
            std::sqrt(2.0 * cfg.ell * cfg.ell / d);
    } else {
      eps = sample_half_normal(
          cfg.ell / std::pow(static_cast<double>(d),
                             0.5 * cfg.variance_exponent),
          rng);
    }
    // Branchless sign: b_i = -1 exactly when the drawn word's top bit is
    // set; the bit is XORed into the sign of the displacement.
    const std::uint64_t eps_bits = std::bit_cast<std::uint64_t>(eps);
    for (int i = 0; i < d; ++i) {
      const std::uint64_t sign = rng.next_u64() & 0x8000000000000000ULL;
      const double disp = std::bit_cast<double>(eps_bits ^ sign);
      y[i] = lam ? lam[i] * disp : disp;
    }
  } else {
    const double scale =
        lam ? std::sqrt(2.0 * cfg.ell * cfg.ell / d)
            : cfg.ell / std::pow(static_cast<double>(d),
                                 0.5 * cfg.variance_exponent);
    for (int i = 0; i < d; ++i) {
      const double l = lam ? lam[i] : 1.0;
      y[i] = scale * l * rng.normal();
    }
  }

  if (masked) {
    for (int i = 0; i < d; ++i)
      mask[i] = rng.uniform01() < cfg.gibbs_c ? 1 : 0;
    for (int i = 0; i < d; ++i) y[i] = x[i] + y[i] * mask[i];
  } else {
    for (int i = 0; i < d; ++i) mask[i] = 1;
    for (int i = 0; i < d; ++i) y[i] = x[i] + y[i];
  }
}

}  // namespace detail

// One proposal draw: returns the proposed point and the per-coordinate
// update mask (all ones when gibbs_c == 1).
inline std::pair<StateVector, std::vector<std::uint8_t>> propose(
    const KernelConfig& cfg, const StateVector& x, RandomStream& rng) {
  validate(cfg);
  if (static_cast<int>(x.size()) != cfg.d)
    throw std::invalid_argument("propose: dimension mismatch");
  StateVector y;
  std::vector<std::uint8_t> mask;
  detail::propose_into(cfg, x, rng, y, mask);
  return {std::move(y), std::move(mask)};
}

// Single Metropolis step: propose, accept with probability
// exp(min(0, log_ratio)). The accept uniform is always drawn, keeping the
// stream layout independent of the realized ratio.
inline StepResult step(const TargetModel& model, const KernelConfig& cfg,
                       const StateVector& x, RandomStream& rng) {
  validate(cfg);
  if (static_cast<int>(x.size()) != cfg.d)
    throw std::invalid_argument("step: dimension mismatch");
  StateVector y;
  std::vector<std::uint8_t> mask;
  detail::propose_into(cfg, x, rng, y, mask);
  const double la = log_ratio(model, x, y);
  const double u = rng.uniform01();
  StepResult out;
  out.log_alpha = la;
  if (std::log(u) < la) {
    double q = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
      const double dd = y[i] - x[i];
      q += dd * dd;
    }
    out.next = std::move(y);
    out.accepted = true;
    out.jump_norm = std::sqrt(q);
  } else {
    out.next = x;
    out.accepted = false;
    out.jump_norm = 0.0;
  }
  return out;
}

// Run a chain for n_iters steps. Deterministic given (seed, config, model,
// init); the wall clock covers the iteration loop only.
inline ChainTrace run_chain(const TargetModel& model, const KernelConfig& cfg,
                            const StateVector& init, long long n_iters,
                            std::uint64_t seed,
                            const RecordPolicy& record = RecordPolicy{}) {
  validate(cfg);
  if (n_iters < 1) throw std::invalid_argument("run_chain: n_iters < 1");
  if (static_cast<int>(init.size()) != cfg.d)
    throw std::invalid_argument("run_chain: init dimension mismatch");
  if (dimension(model) != cfg.d)
    throw std::invalid_argument("run_chain: model dimension mismatch");
  for (int c : record.coords)
    if (c < 0 || c >= cfg.d)
      throw std::invalid_argument("run_chain: recorded coordinate out of range");

  ChainTrace trace;
  trace.n_iters = n_iters;
  trace.seed = seed;
  trace.d = cfg.d;
  trace.recorded_coords = record.record_states ? record.coords
                                               : std::vector<int>{};
  trace.accepted.resize(n_iters);
  trace.jump_norms.resize(n_iters);
  if (!trace.recorded_coords.empty())
    trace.states.resize(static_cast<std::size_t>(n_iters) *
                        trace.recorded_coords.size());

  RandomStream rng(seed);
  StateVector x = init;
  StateVector y;
  std::vector<std::uint8_t> mask;
  double log_pi_x = log_density(model, x);
  if (log_pi_x == -std::numeric_limits<double>::infinity())
    throw std::domain_error("run_chain: init has zero target density");

  const auto t0 = std::chrono::steady_clock::now();
  for (long long k = 0; k < n_iters; ++k) {
    if (!trace.recorded_coords.empty()) {
      double* row = trace.states.data() +
                    static_cast<std::size_t>(k) * trace.recorded_coords.size();
      for (std::size_t c = 0; c < trace.recorded_coords.size(); ++c)
        row[c] = x[trace.recorded_coords[c]];
    }
    detail::propose_into(cfg, x, rng, y, mask);
    const double log_pi_y = log_density(model, y);
    const double la = log_pi_y - log_pi_x;
    const double u = rng.uniform01();
    if (std::log(u) < la) {
      double q = 0.0;
      for (int i = 0; i < cfg.d; ++i) {
        const double dd = y[i] - x[i];
        q += dd * dd;
      }
      trace.accepted[k] = 1;
      trace.jump_norms[k] = std::sqrt(q);
      x.swap(y);
      log_pi_x = log_pi_y;
    } else {
      trace.accepted[k] = 0;
      trace.jump_norms[k] = 0.0;
    }
  }
  const auto t1 = std::chrono::steady_clock::now();
  trace.wall_clock_ns =
      std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0).count();
  trace.final_state = std::move(x);
  return trace;
}

}  // namespace tmcmc
