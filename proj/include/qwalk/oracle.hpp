#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "qwalk/evolve.hpp"
#include "qwalk/lattice.hpp"
#include "qwalk/state.hpp"

// Dense brute-force reference over the complete (chirality x configuration)
// basis. Coin entries and ladder factors are re-derived here from their
// defining formulas, independently of coin.hpp / evolve.hpp, so transcription
// errors in either side show up as sparse/dense disagreement.

namespace qwalk::oracle {

inline Complex oracle_coin(int j, int k) {
  return 0.5 * std::polar(1.0, std::numbers::pi / 2.0 * (k - 1) * (j - 1));
}

inline double oracle_ladder(Statistics statistics, FermionRule rule, int n_src, int n_dst) {
  if (statistics == Statistics::boson) {
    return std::sqrt(static_cast<double>(n_src) * (n_dst + 1.0));
  }
  if (rule == FermionRule::equal ? n_dst == n_src : n_dst >= n_src) return 0.0;
  return 1.0;
}

struct DenseBasis {
  int particle_count = 0;
  int vertex_count = 0;
  std::vector<Configuration> configs;  // lexicographically decreasing
  std::unordered_map<Configuration, int, ConfigHash> index;

  int dimension() const { return static_cast<int>(configs.size()); }
  int state_dimension() const { return 4 * dimension(); }
};

// Exhaustive configuration list, ordered lexicographically decreasing on
// occupation vectors: first (N,0,...,0), last (0,...,0,N).
inline DenseBasis enumerate_basis(int n_particles, int m2, Statistics statistics) {
  const auto dim = config_space_dimension(n_particles, m2, statistics);
  if (4 * dim > 1000000ull) {
    throw std::runtime_error("oracle basis too large: 4*" + std::to_string(dim) +
                             " states exceeds the desk-scale guard");
  }
  DenseBasis basis;
  basis.particle_count = n_particles;
  basis.vertex_count = m2;
  Configuration cfg;
  cfg.occ.assign(m2, 0);
  const auto recurse = [&](auto&& self, int vertex, int remaining) -> void {
    if (vertex == m2 - 1) {
      cfg.occ[vertex] = static_cast<std::uint8_t>(remaining);
      basis.index.emplace(cfg, static_cast<int>(basis.configs.size()));
      basis.configs.push_back(cfg);
      cfg.occ[vertex] = 0;
      return;
    }
    for (int n = remaining; n >= 0; --n) {
      cfg.occ[vertex] = static_cast<std::uint8_t>(n);
      self(self, vertex + 1, remaining - n);
    }
    cfg.occ[vertex] = 0;
  };
  recurse(recurse, 0, n_particles);
  return basis;
}

// Dense step operator: column (k,l), row (j,l') where l' is l with one
// particle moved along direction k. Row/column index is (chirality-1)*D + l.
inline std::vector<Complex> build_step_matrix(const DenseBasis& basis, const Lattice& lattice,
                                              Statistics statistics, FermionRule rule) {
  const int dim = basis.dimension();
  const std::size_t n = static_cast<std::size_t>(basis.state_dimension());
  if (n > 2048) {
    throw std::runtime_error("oracle matrix too large: " + std::to_string(n) +
                             "^2 dense entries exceeds the desk-scale guard; "
                             "use a smaller instance");
  }
  std::vector<Complex> matrix(n * n, Complex{});
  for (int l = 0; l < dim; ++l) {
    const Configuration& cfg = basis.configs[l];
    Configuration scratch = cfg;
    for (int k = 1; k <= 4; ++k) {
      const std::size_t col = static_cast<std::size_t>(k - 1) * dim + l;
      for (int mu = 1; mu <= basis.vertex_count; ++mu) {
        if (cfg.occ[mu - 1] == 0) continue;
        const int nu = lattice.neighbor(mu, k);
        if (nu == 0) continue;
        const double f = oracle_ladder(statistics, rule, cfg.occ[mu - 1], cfg.occ[nu - 1]);
        if (f == 0.0) continue;
        scratch.occ[mu - 1] -= 1;
        scratch.occ[nu - 1] += 1;
        const int lp = basis.index.at(scratch);
        scratch.occ[mu - 1] += 1;
        scratch.occ[nu - 1] -= 1;
        for (int j = 1; j <= 4; ++j) {
          const std::size_t row = static_cast<std::size_t>(j - 1) * dim + lp;
          matrix[row * n + col] += oracle_coin(j, k) * f;
        }
      }
    }
  }
  return matrix;
}

inline std::vector<Complex> to_dense(const GmpState& state, const DenseBasis& basis) {
  std::vector<Complex> v(basis.state_dimension(), Complex{});
  for (const auto& [cfg, a] : state.amps) {
    const int l = basis.index.at(cfg);
    for (int j = 0; j < 4; ++j) v[static_cast<std::size_t>(j) * basis.dimension() + l] = a[j];
  }
  return v;
}

// Matrix-vector walk with the same prune/renormalize schedule as the sparse
// step. Returns the normalized dense vector after each step, 1..steps.
inline std::vector<std::vector<Complex>> oracle_run(const GmpState& initial,
                                                    const Lattice& lattice, int steps,
                                                    double prune_eps, FermionRule rule) {
  const DenseBasis basis =
      enumerate_basis(initial.particle_count, lattice.vertex_count(), initial.statistics);
  const auto matrix = build_step_matrix(basis, lattice, initial.statistics, rule);
  const std::size_t n = static_cast<std::size_t>(basis.state_dimension());

  std::vector<Complex> v = to_dense(initial, basis);
  std::vector<std::vector<Complex>> history;
  std::vector<Complex> next(n);
  for (int s = 0; s < steps; ++s) {
    for (std::size_t row = 0; row < n; ++row) {
      Complex sum{};
      const Complex* m = &matrix[row * n];
      for (std::size_t col = 0; col < n; ++col) sum += m[col] * v[col];
      next[row] = sum;
    }
    double n2 = 0.0;
    for (auto& c : next) {
      if (c != Complex{} && std::abs(c) <= prune_eps) c = Complex{};
      n2 += std::norm(c);
    }
    if (n2 <= 0.0) throw std::runtime_error("oracle: state collapsed at step " + std::to_string(s + 1));
    const double k = std::sqrt(n2);
    for (auto& c : next) c /= k;
    v = next;
    history.push_back(v);
  }
  return history;
}

}  // namespace qwalk::oracle
