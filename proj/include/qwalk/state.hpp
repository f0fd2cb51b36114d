#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "qwalk/coin.hpp"
#include "qwalk/lattice.hpp"

namespace qwalk {

enum class Statistics { boson, fermion };

inline std::string to_string(Statistics s) {
  return s == Statistics::boson ? "boson" : "fermion";
}

inline Statistics statistics_from_string(const std::string& s) {
  if (s == "boson") return Statistics::boson;
  if (s == "fermion") return Statistics::fermion;
  throw std::invalid_argument("unknown statistics '" + s + "' (expected boson|fermion)");
}

// Occupation-number vector over the lattice vertices; the deduplication key of
// the sparse state. Ordering and equality are element-wise on occupations.
struct Configuration {
  std::vector<std::uint8_t> occ;

  int total() const { return std::accumulate(occ.begin(), occ.end(), 0); }
  int at(int vertex) const { return occ[vertex - 1]; }

  auto operator<=>(const Configuration&) const = default;
};

struct ConfigHash {
  std::size_t operator()(const Configuration& c) const {
    // FNV-1a over the occupation bytes.
    std::size_t h = 1469598103934665603ull;
    for (const std::uint8_t b : c.occ) {
      h ^= b;
      h *= 1099511628211ull;
    }
    return h;
  }
};

using ChiralityAmps = std::array<Complex, 4>;

// Sparse GMP state: configuration -> four chirality amplitudes, ordered map so
// iteration (and hence floating-point accumulation and serialization) is
// canonical. Amplitudes are kept renormalized at the end of each step; the
// most recent normalization constant K_r is retained for the time series.
struct GmpState {
  std::map<Configuration, ChiralityAmps> amps;
  int step = 0;
  Statistics statistics = Statistics::boson;
  int particle_count = 0;
  int vertex_count = 0;
  double norm_constant = 1.0;  // K_r of the last renormalization
};

inline double norm_squared(const GmpState& state) {
  double sum = 0.0;
  for (const auto& [cfg, a] : state.amps) {
    for (const auto& c : a) sum += std::norm(c);
  }
  return sum;
}

// Divides every amplitude by K_r = sqrt(norm_squared) and records K_r.
inline void renormalize(GmpState& state) {
  const double n2 = norm_squared(state);
  if (n2 <= 0.0) throw std::runtime_error("numerical collapse: state norm is zero");
  const double k = std::sqrt(n2);
  for (auto& [cfg, a] : state.amps) {
    for (auto& c : a) c /= k;
  }
  state.norm_constant = k;
}

// Removes amplitudes with |C| <= eps; drops configurations left with no
// amplitude. Does not renormalize.
inline int prune(GmpState& state, double eps) {
  if (eps < 0.0) throw std::invalid_argument("prune eps must be >= 0");
  int removed = 0;
  for (auto it = state.amps.begin(); it != state.amps.end();) {
    bool any = false;
    for (auto& c : it->second) {
      if (c != Complex{} && std::abs(c) <= eps) {
        c = Complex{};
        ++removed;
      }
      any = any || c != Complex{};
    }
    it = any ? std::next(it) : state.amps.erase(it);
  }
  return removed;
}

// Number of distinct configurations carrying at least one amplitude with
// magnitude above eps: dim of the effective configurations space.
inline int effective_dimension(const GmpState& state, double eps) {
  int count = 0;
  for (const auto& [cfg, a] : state.amps) {
    for (const auto& c : a) {
      if (std::abs(c) > eps) {
        ++count;
        break;
      }
    }
  }
  return count;
}

inline std::uint64_t binomial_checked(int n, int k) {
  if (k < 0 || n < 0 || k > n) return 0;
  if (k > n - k) k = n - k;
  std::uint64_t result = 1;
  for (int i = 1; i <= k; ++i) {
    const auto factor = static_cast<unsigned __int128>(result) *
                        static_cast<std::uint64_t>(n - k + i);
    if (factor > static_cast<unsigned __int128>(UINT64_MAX)) {
      throw std::overflow_error("binomial(" + std::to_string(n) + "," +
                                std::to_string(k) + ") exceeds 64-bit range");
    }
    result = static_cast<std::uint64_t>(factor) / i;
  }
  return result;
}

// Number of occupation vectors of length M^2 summing to N. The multimode
// fermion model stacks modes per vertex, so both statistics share the bosonic
// count binomial(M^2+N-1, N).
inline std::uint64_t config_space_dimension(int n_particles, int m2, Statistics) {
  if (n_particles < 0 || m2 < 1) throw std::invalid_argument("bad config space arguments");
  return binomial_checked(m2 + n_particles - 1, n_particles);
}

// Step-0 state: N particles stacked on `vertex`, the four coin amplitudes
// normalized to unit total norm.
inline GmpState make_initial(const Lattice& lattice, int n_particles, int vertex,
                             const CoinVector& coin_amps, Statistics statistics) {
  if (n_particles < 1) throw std::invalid_argument("particle count must be >= 1");
  if (vertex < 1 || vertex > lattice.vertex_count()) {
    throw std::invalid_argument("initial vertex out of range");
  }
  double n2 = 0.0;
  for (const auto& c : coin_amps) n2 += std::norm(c);
  if (n2 <= 0.0) throw std::invalid_argument("coin amplitudes must not all be zero");

  GmpState state;
  state.statistics = statistics;
  state.particle_count = n_particles;
  state.vertex_count = lattice.vertex_count();
  state.norm_constant = std::sqrt(n2);

  Configuration cfg;
  cfg.occ.assign(lattice.vertex_count(), 0);
  cfg.occ[vertex - 1] = static_cast<std::uint8_t>(n_particles);
  ChiralityAmps a{};
  for (int i = 0; i < 4; ++i) a[i] = coin_amps[i] / state.norm_constant;
  state.amps.emplace(std::move(cfg), a);
  return state;
}

}  // namespace qwalk
