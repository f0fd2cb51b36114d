#include <doctest.h>

#include <random>

#include "qwalk/evolve.hpp"
#include "qwalk/observables.hpp"

using namespace qwalk;
using doctest::Approx;

namespace {
const double kInvSqrt2 = 0.7071067811865476;
const CoinVector kDefaultAmps = {Complex{}, Complex{kInvSqrt2, 0}, Complex{kInvSqrt2, 0},
                               Complex{}};

GmpState random_walk_state(int seed, int steps = 6) {
  const auto g3 = Lattice::full_grid(3);
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  CoinVector amps;
  for (auto& c : amps) c = Complex{dist(rng), dist(rng)};
  auto state = make_initial(g3, 3, 1 + static_cast<int>(rng() % 9), amps, Statistics::boson);
  for (int s = 0; s < steps; ++s) state = step(state, g3).first;
  return state;
}
}  // namespace

TEST_CASE("vertex_density on the initial state") {
  const auto g5 = Lattice::full_grid(5);
  const auto state = make_initial(g5, 5, 1, kDefaultAmps, Statistics::boson);
  CHECK(vertex_density(state, 1) == Approx(5.0).epsilon(1e-15));
  for (int v = 2; v <= 25; ++v) CHECK(vertex_density(state, v) == 0.0);

  const auto s1 = step(state, g5).first;
  CHECK(vertex_density(s1, 1) == Approx(4.0).epsilon(1e-13));
  // Split between vertices 2 and 6 proportional to |c2|^2 : |c3|^2 = 1 : 1.
  CHECK(vertex_density(s1, 2) == Approx(0.5).epsilon(1e-13));
  CHECK(vertex_density(s1, 6) == Approx(0.5).epsilon(1e-13));
}

TEST_CASE("densities sum to N and match the bulk helper") {
  for (int seed : {1, 2, 3}) {
    const auto state = random_walk_state(seed);
    const auto bulk = vertex_densities(state);
    double total = 0.0;
    for (int v = 1; v <= 9; ++v) {
      CHECK(bulk[v - 1] == Approx(vertex_density(state, v)).epsilon(1e-12));
      CHECK(bulk[v - 1] >= 0.0);
      total += bulk[v - 1];
    }
    CHECK(total == Approx(3.0).epsilon(1e-9));
  }
}

TEST_CASE("counting_statistics") {
  const auto g5 = Lattice::full_grid(5);
  const auto state = make_initial(g5, 5, 1, kDefaultAmps, Statistics::boson);
  CHECK(counting_statistics(state, 5, 1) == Approx(1.0 / (25.0 * 118755.0)).epsilon(1e-12));
  CHECK(counting_statistics(state, 5, 2) == 0.0);
  CHECK_THROWS_AS(counting_statistics(state, 6, 1), std::invalid_argument);

  // For each vertex the n-match classes partition the configurations, so the
  // bracketed probabilities sum to 1 per vertex.
  const auto evolved = random_walk_state(11);
  const double denom = static_cast<double>(config_space_dimension(3, 9, Statistics::boson));
  for (int v = 1; v <= 9; ++v) {
    double sum = 0.0;
    for (int n = 0; n <= 3; ++n) {
      const double detect = static_cast<double>(
                                config_space_dimension(3 - n, 8, Statistics::boson)) /
                            (9.0 * denom);
      sum += counting_statistics(evolved, n, v) / detect;
    }
    CHECK(sum == Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("configuration_entropy") {
  const auto g5 = Lattice::full_grid(5);
  const auto state = make_initial(g5, 5, 1, kDefaultAmps, Statistics::boson);
  Configuration l0;
  l0.occ.assign(25, 0);
  l0.occ[0] = 5;
  CHECK(configuration_entropy(state, l0) == Approx(std::log(2.0)).epsilon(1e-14));

  Configuration absent = l0;
  absent.occ[0] = 4;
  absent.occ[1] = 1;
  CHECK(configuration_entropy(state, absent) == 0.0);

  const auto pure = make_initial(g5, 5, 1, {Complex{1, 0}, {}, {}, {}}, Statistics::boson);
  CHECK(configuration_entropy(pure, l0) == 0.0);

  // Entropy stays within [0, log 4] along a walk.
  for (int seed : {5, 6}) {
    const auto evolved = random_walk_state(seed);
    for (const auto& [cfg, a] : evolved.amps) {
      const double s = configuration_entropy(evolved, cfg);
      CHECK(s >= 0.0);
      CHECK(s <= std::log(4.0) + 1e-12);
    }
  }
}

TEST_CASE("mode_energy") {
  const auto g1 = Lattice::full_grid(1);
  const auto state = make_initial(g1, 1, 1, {Complex{1, 0}, {}, {}, {}}, Statistics::boson);
  const ModeSet modes(1);
  // Single particle at x = 0: every mode gives 1*(1 + 1/2 - cos 0) = 1/2.
  CHECK(mode_energy(state, 1, modes) == Approx(0.5).epsilon(1e-14));

  // Brute-force double sum over modes and vertices as an independent route.
  const auto evolved = random_walk_state(21);
  const ModeSet m9(9);
  double direct = 0.0;
  const double n2 = norm_squared(evolved);
  for (int eta = 1; eta <= 9; ++eta) {
    for (const auto& [cfg, a] : evolved.amps) {
      double w = 0.0;
      for (const auto& c : a) w += std::norm(c);
      for (int v = 1; v <= 9; ++v) {
        const int n = cfg.occ[v - 1];
        if (n == 0) continue;
        direct += (w / n2) * (n / 3.0) *
                  (n + 0.5 - std::cos(2.0 * m9.phase(eta) * m9.coordinate(v)));
      }
    }
  }
  double summed = 0.0;
  for (int eta = 1; eta <= 9; ++eta) summed += mode_energy(evolved, eta, m9);
  CHECK(summed == Approx(direct).epsilon(1e-12));
  CHECK(total_energy(evolved, m9) == Approx(direct).epsilon(1e-12));
}

TEST_CASE("configuration_temperature") {
  const auto g5 = Lattice::full_grid(5);
  const ModeSet modes(25);
  const auto pure = make_initial(g5, 5, 1, {Complex{1, 0}, {}, {}, {}}, Statistics::boson);
  Configuration l0;
  l0.occ.assign(25, 0);
  l0.occ[0] = 5;
  CHECK(!configuration_temperature(pure, l0, modes));  // zero entropy -> undefined

  const auto mixed = make_initial(g5, 5, 1, kDefaultAmps, Statistics::boson);
  const auto t = configuration_temperature(mixed, l0, modes);
  REQUIRE(t.has_value());
  CHECK(*t == Approx(total_energy(mixed, modes) / std::log(2.0)).epsilon(1e-13));
}

TEST_CASE("observables are invariant under amplitude rescaling") {
  auto state = random_walk_state(33);
  auto scaled = state;
  const Complex scale{-1.7, 2.4};
  for (auto& [cfg, a] : scaled.amps) {
    for (auto& c : a) c *= scale;
  }
  const ModeSet modes(9);
  const auto& tracked = state.amps.begin()->first;
  CHECK(vertex_density(scaled, 3) == Approx(vertex_density(state, 3)).epsilon(1e-12));
  CHECK(counting_statistics(scaled, 1, 2) ==
        Approx(counting_statistics(state, 1, 2)).epsilon(1e-12));
  CHECK(configuration_entropy(scaled, tracked) ==
        Approx(configuration_entropy(state, tracked)).epsilon(1e-12));
  CHECK(total_energy(scaled, modes) == Approx(total_energy(state, modes)).epsilon(1e-12));
}
