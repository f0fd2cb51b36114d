#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <thread>
#include <unordered_map>
#include <utility>
#include <vector>

#include "qwalk/coin.hpp"
#include "qwalk/lattice.hpp"
#include "qwalk/state.hpp"

namespace qwalk {

// Fermion exclusion variants for a move source -> destination:
//   equal: forbidden iff n_dest == n_source (top modes collide exactly)
//   geq:   forbidden iff n_dest >= n_source
enum class FermionRule { equal, geq };

inline std::string to_string(FermionRule r) {
  return r == FermionRule::equal ? "equal" : "geq";
}

inline FermionRule fermion_rule_from_string(const std::string& s) {
  if (s == "equal") return FermionRule::equal;
  if (s == "geq") return FermionRule::geq;
  throw std::invalid_argument("unknown fermion rule '" + s + "' (expected equal|geq)");
}

// Amplitude factor for moving one particle from a vertex holding n_source to a
// vertex holding n_dest. Bosons get the ladder product sqrt(n_source)*
// sqrt(n_dest+1); fermions get 1 when the move is allowed, nullopt otherwise.
inline std::optional<double> ladder_factor(Statistics statistics, FermionRule rule,
                                           int n_source, int n_dest) {
  if (n_source < 1) throw std::logic_error("ladder_factor requires an occupied source");
  if (statistics == Statistics::boson) {
    return std::sqrt(static_cast<double>(n_source)) *
           std::sqrt(static_cast<double>(n_dest) + 1.0);
  }
  const bool forbidden =
      rule == FermionRule::equal ? n_dest == n_source : n_dest >= n_source;
  if (forbidden) return std::nullopt;
  return 1.0;
}

struct StepOptions {
  double prune_eps = 1e-12;
  FermionRule fermion_rule = FermionRule::equal;
  int threads = 1;
};

struct StepReport {
  int step = 0;           // step index of the produced state
  double pre_norm = 0.0;  // norm^2 before renormalization (boundary loss)
  long entries_in = 0;
  long entries_out = 0;
  long forbidden_moves = 0;
  long pruned = 0;
};

namespace detail {

using Accumulator = std::unordered_map<Configuration, ChiralityAmps, ConfigHash>;

// Expands the entries in [begin, end) of `inputs` into `acc`. Iteration order
// is the canonical (sorted-configuration, chirality-ascending, vertex-
// ascending) order, so accumulation per key is deterministic.
inline void expand_range(
    const std::vector<const std::pair<const Configuration, ChiralityAmps>*>& inputs,
    std::size_t begin, std::size_t end, const Lattice& lattice, Statistics statistics,
    FermionRule rule, Accumulator& acc, long& forbidden) {
  std::vector<int> occupied;
  for (std::size_t idx = begin; idx < end; ++idx) {
    const auto& [cfg, amps] = *inputs[idx];
    occupied.clear();
    for (int v = 1; v <= static_cast<int>(cfg.occ.size()); ++v) {
      if (cfg.occ[v - 1] > 0) occupied.push_back(v);
    }
    Configuration scratch = cfg;
    for (int k = 1; k <= 4; ++k) {
      const Complex c = amps[k - 1];
      if (c == Complex{}) continue;
      for (const int mu : occupied) {
        const int nu = lattice.neighbor(mu, k);
        if (nu == 0) continue;  // boundary: this component's amplitude is dropped
        const auto factor =
            ladder_factor(statistics, rule, cfg.occ[mu - 1], cfg.occ[nu - 1]);
        if (!factor) {
          ++forbidden;
          continue;
        }
        scratch.occ[mu - 1] -= 1;
        scratch.occ[nu - 1] += 1;
        auto& out = acc[scratch];
        const Complex moved = c * *factor;
        for (int j = 1; j <= 4; ++j) out[j - 1] += coin_entry(j, k) * moved;
        scratch.occ[mu - 1] += 1;
        scratch.occ[nu - 1] -= 1;
      }
    }
  }
}

}  // namespace detail

// One application of the conditional shift operator: coin mixing, single-
// particle moves along the chirality directions, boundary loss, prune and
// renormalize. With threads > 1 the input entries are sharded and the shard
// results merged in shard order; amplitudes agree with the single-threaded
// kernel within accumulation tolerance, and threads == 1 is bit-exact.
inline std::pair<GmpState, StepReport> step(const GmpState& state, const Lattice& lattice,
                                            const StepOptions& options = {}) {
  if (state.amps.empty()) throw std::runtime_error("step on an empty state");
  if (state.vertex_count != lattice.vertex_count()) {
    throw std::invalid_argument("state and lattice dimensions disagree");
  }

  StepReport report;
  report.step = state.step + 1;
  report.entries_in = static_cast<long>(state.amps.size());

  std::vector<const std::pair<const Configuration, ChiralityAmps>*> inputs;
  inputs.reserve(state.amps.size());
  for (const auto& entry : state.amps) inputs.push_back(&entry);

  detail::Accumulator acc;
  acc.reserve(inputs.size() * 4);
  const int threads = std::max(1, options.threads);
  if (threads == 1 || inputs.size() < 64) {
    detail::expand_range(inputs, 0, inputs.size(), lattice, state.statistics,
                         options.fermion_rule, acc, report.forbidden_moves);
  } else {
    std::vector<detail::Accumulator> partial(threads);
    std::vector<long> forbidden(threads, 0);
    std::vector<std::thread> workers;
    const std::size_t chunk = (inputs.size() + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
      const std::size_t begin = std::min(inputs.size(), t * chunk);
      const std::size_t end = std::min(inputs.size(), begin + chunk);
      workers.emplace_back([&, t, begin, end] {
        detail::expand_range(inputs, begin, end, lattice, state.statistics,
                             options.fermion_rule, partial[t], forbidden[t]);
      });
    }
    for (auto& w : workers) w.join();
    for (int t = 0; t < threads; ++t) {
      report.forbidden_moves += forbidden[t];
      for (auto& [cfg, a] : partial[t]) {
        auto& out = acc[cfg];
        for (int i = 0; i < 4; ++i) out[i] += a[i];
      }
    }
  }

  GmpState next;
  next.step = report.step;
  next.statistics = state.statistics;
  next.particle_count = state.particle_count;
  next.vertex_count = state.vertex_count;
  next.amps = std::map<Configuration, ChiralityAmps>(acc.begin(), acc.end());

  report.pre_norm = norm_squared(next);
  if (report.pre_norm <= 0.0) {
    throw std::runtime_error("numerical collapse: every amplitude was annihilated at step " +
                             std::to_string(report.step));
  }
  report.pruned = prune(next, options.prune_eps);
  renormalize(next);
  report.entries_out = static_cast<long>(next.amps.size());
  return {std::move(next), report};
}

using StepSink = std::function<void(const GmpState&, const StepReport&)>;

// Applies `step` repeatedly. The sink sees the state at step 0 (with an empty
// report), every observe_every-th step, and the final step.
inline GmpState run(GmpState state, const Lattice& lattice, int steps, int observe_every,
                    const StepSink& sink, const StepOptions& options = {}) {
  if (steps < 1) throw std::invalid_argument("steps must be >= 1");
  if (observe_every < 1) throw std::invalid_argument("observe_every must be >= 1");
  if (sink && state.step == 0) sink(state, StepReport{});
  const int target = state.step + steps;
  while (state.step < target) {
    auto [next, report] = step(state, lattice, options);
    state = std::move(next);
    if (sink && (state.step % observe_every == 0 || state.step == target)) {
      sink(state, report);
    }
  }
  return state;
}

}  // namespace qwalk
