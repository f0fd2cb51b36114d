#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <vector>

#include "qwalk/state.hpp"

namespace qwalk {

// Fourier mode grid over the vertex labels: phases phi_eta = 2*pi*(eta-1)/M^2,
// coordinates x_alpha = alpha-1.
struct ModeSet {
  int mode_count;

  explicit ModeSet(int m2) : mode_count(m2) {}

  double phase(int eta) const {
    return 2.0 * std::numbers::pi * (eta - 1) / mode_count;
  }
  double coordinate(int alpha) const { return alpha - 1.0; }
};

// <n_alpha(r)> = sum_l sum_j |C_jl/K|^2 * n_l,alpha. Computed against the
// current norm so the value is invariant under amplitude rescaling.
inline double vertex_density(const GmpState& state, int alpha) {
  const double n2 = norm_squared(state);
  double density = 0.0;
  for (const auto& [cfg, a] : state.amps) {
    const int n = cfg.at(alpha);
    if (n == 0) continue;
    double w = 0.0;
    for (const auto& c : a) w += std::norm(c);
    density += w * n;
  }
  return density / n2;
}

inline std::vector<double> vertex_densities(const GmpState& state) {
  const double n2 = norm_squared(state);
  std::vector<double> density(state.vertex_count, 0.0);
  for (const auto& [cfg, a] : state.amps) {
    double w = 0.0;
    for (const auto& c : a) w += std::norm(c);
    w /= n2;
    for (int v = 0; v < state.vertex_count; ++v) {
      if (cfg.occ[v] > 0) density[v] += w * cfg.occ[v];
    }
  }
  return density;
}

// P^r_{n,alpha}: probability mass of configurations holding exactly n
// particles at alpha, weighted by the combinatoric detection factor
// D(N-n, M^2-1) / (M^2 * D(N, M^2)).
inline double counting_statistics(const GmpState& state, int n, int alpha) {
  if (n < 0 || n > state.particle_count) {
    throw std::invalid_argument("counting statistics n out of [0, N]");
  }
  const double n2 = norm_squared(state);
  double mass = 0.0;
  for (const auto& [cfg, a] : state.amps) {
    if (cfg.at(alpha) != n) continue;
    for (const auto& c : a) mass += std::norm(c);
  }
  mass /= n2;
  const int m2 = state.vertex_count;
  const double numer = static_cast<double>(
      config_space_dimension(state.particle_count - n, m2 - 1, state.statistics));
  const double denom = static_cast<double>(
      config_space_dimension(state.particle_count, m2, state.statistics));
  return mass * numer / (m2 * denom);
}

// Von Neumann entropy of one configuration's chirality distribution,
// S = -sum_k p_k log p_k with p_k = |C_k/K|^2, k_B = 1. Zero when the
// configuration is absent.
inline double configuration_entropy(const GmpState& state, const Configuration& config) {
  const auto it = state.amps.find(config);
  if (it == state.amps.end()) return 0.0;
  const double n2 = norm_squared(state);
  double entropy = 0.0;
  for (const auto& c : it->second) {
    const double p = std::norm(c) / n2;
    if (p > 0.0) entropy -= p * std::log(p);
  }
  return entropy;
}

// <E_eta> = sum_l sum_j |C_jl/K|^2 sum_alpha (n_l,alpha/N) *
//           (n_l,alpha + 1/2 - cos(2 phi_eta x_alpha)).
inline double mode_energy(const GmpState& state, int eta, const ModeSet& modes) {
  const double n2 = norm_squared(state);
  const double phi = modes.phase(eta);
  double energy = 0.0;
  for (const auto& [cfg, a] : state.amps) {
    double w = 0.0;
    for (const auto& c : a) w += std::norm(c);
    w /= n2;
    for (int v = 1; v <= state.vertex_count; ++v) {
      const int n = cfg.occ[v - 1];
      if (n == 0) continue;
      energy += w * (static_cast<double>(n) / state.particle_count) *
                (n + 0.5 - std::cos(2.0 * phi * modes.coordinate(v)));
    }
  }
  return energy;
}

// Sum of mode_energy over all modes, with the eta-sum folded into a
// state-independent per-vertex cosine total.
inline double total_energy(const GmpState& state, const ModeSet& modes) {
  std::vector<double> cos_total(state.vertex_count, 0.0);
  for (int v = 1; v <= state.vertex_count; ++v) {
    for (int eta = 1; eta <= modes.mode_count; ++eta) {
      cos_total[v - 1] += std::cos(2.0 * modes.phase(eta) * modes.coordinate(v));
    }
  }
  const double n2 = norm_squared(state);
  double energy = 0.0;
  for (const auto& [cfg, a] : state.amps) {
    double w = 0.0;
    for (const auto& c : a) w += std::norm(c);
    w /= n2;
    for (int v = 1; v <= state.vertex_count; ++v) {
      const int n = cfg.occ[v - 1];
      if (n == 0) continue;
      energy += w * (static_cast<double>(n) / state.particle_count) *
                (modes.mode_count * (n + 0.5) - cos_total[v - 1]);
    }
  }
  return energy;
}

// T = (sum_eta <E_eta>) / S(config). Empty optional when the entropy is zero
// (configuration absent or concentrated on one chirality); the time series
// records the gap instead of fabricating a value.
inline std::optional<double> configuration_temperature(const GmpState& state,
                                                       const Configuration& config,
                                                       const ModeSet& modes) {
  const double entropy = configuration_entropy(state, config);
  if (entropy <= 0.0) return std::nullopt;
  return total_energy(state, modes) / entropy;
}

}  // namespace qwalk
