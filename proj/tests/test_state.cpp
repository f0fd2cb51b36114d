#include <doctest.h>

#include <random>

#include "qwalk/evolve.hpp"
#include "qwalk/state.hpp"

using namespace qwalk;
using doctest::Approx;

namespace {
const double kInvSqrt2 = 0.7071067811865476;

GmpState reference_initial(int n_particles = 5) {
  return make_initial(Lattice::full_grid(5), n_particles, 1,
                      {Complex{}, Complex{kInvSqrt2, 0}, Complex{kInvSqrt2, 0}, Complex{}},
                      Statistics::boson);
}
}  // namespace

TEST_CASE("make_initial") {
  const auto state = reference_initial();
  CHECK(state.amps.size() == 1);
  CHECK(state.step == 0);
  const auto& [cfg, amps] = *state.amps.begin();
  CHECK(cfg.at(1) == 5);
  CHECK(cfg.total() == 5);
  int nonzero = 0;
  for (const auto& c : amps) nonzero += c != Complex{};
  CHECK(nonzero == 2);
  CHECK(norm_squared(state) == Approx(1.0).epsilon(1e-15));

  const auto single = make_initial(Lattice::full_grid(2), 1, 3,
                                   {Complex{1, 0}, {}, {}, {}}, Statistics::fermion);
  CHECK(single.amps.begin()->first.at(3) == 1);
  CHECK(single.amps.begin()->second[0] == Complex{1.0, 0.0});

  CHECK_THROWS_AS(make_initial(Lattice::full_grid(2), 1, 1, CoinVector{},
                               Statistics::boson),
                  std::invalid_argument);
  CHECK_THROWS_AS(make_initial(Lattice::full_grid(2), 1, 5, {Complex{1, 0}, {}, {}, {}},
                               Statistics::boson),
                  std::invalid_argument);
}

TEST_CASE("norm_squared and renormalize") {
  auto state = reference_initial();
  CHECK(norm_squared(state) == Approx(1.0).epsilon(1e-15));

  // Four equal entries of 1/2 sum to unit norm.
  GmpState half;
  half.particle_count = 1;
  half.vertex_count = 4;
  Configuration cfg;
  cfg.occ = {1, 0, 0, 0};
  half.amps[cfg] = {Complex{0.5, 0}, Complex{0.5, 0}, Complex{0.5, 0}, Complex{0.5, 0}};
  CHECK(norm_squared(half) == Approx(1.0).epsilon(1e-15));

  // One step of a four-component walker at the 2x2 corner loses the off-grid
  // components: hand expansion keeps only the right and down branches, each
  // carrying 1/4 of the norm.
  auto [stepped, report] = step(half, Lattice::full_grid(2));
  CHECK(report.pre_norm == Approx(0.5).epsilon(1e-13));
  CHECK(report.pre_norm < 1.0);
  CHECK(norm_squared(stepped) == Approx(1.0).epsilon(1e-12));

  for (auto& [c, a] : half.amps) {
    for (auto& amp : a) amp *= 2.0;
  }
  CHECK(norm_squared(half) == Approx(4.0).epsilon(1e-14));
  renormalize(half);
  CHECK(half.norm_constant == Approx(2.0).epsilon(1e-15));
  CHECK(norm_squared(half) == Approx(1.0).epsilon(1e-14));
  const auto before = half.amps;
  renormalize(half);  // idempotent on a normalized state
  for (const auto& [c, a] : half.amps) {
    const auto& prev = before.at(c);
    for (int i = 0; i < 4; ++i) CHECK(std::abs(a[i] - prev[i]) < 1e-15);
  }

  GmpState zero = half;
  for (auto& [c, a] : zero.amps) a = {};
  CHECK_THROWS_AS(renormalize(zero), std::runtime_error);
}

TEST_CASE("prune") {
  GmpState state;
  state.particle_count = 1;
  state.vertex_count = 2;
  Configuration a, b;
  a.occ = {1, 0};
  b.occ = {0, 1};
  state.amps[a] = {Complex{1e-15, 0}, {}, {}, {}};
  state.amps[b] = {Complex{0.9, 0}, Complex{0.0, 0.0}, {}, {}};

  auto copy = state;
  CHECK(prune(copy, 0.0) == 0);  // exact zeros are already unstored
  CHECK(copy.amps.size() == 2);

  CHECK(prune(state, 1e-12) == 1);
  CHECK(state.amps.size() == 1);
  CHECK(state.amps.count(b) == 1);
  CHECK(prune(state, 1e-12) == 0);  // idempotent
  CHECK_THROWS_AS(prune(state, -1.0), std::invalid_argument);
}

TEST_CASE("effective_dimension") {
  auto state = reference_initial();
  CHECK(effective_dimension(state, 1e-12) == 1);
  const auto g5 = Lattice::full_grid(5);
  auto [s1, r1] = step(state, g5);
  CHECK(effective_dimension(s1, 1e-12) == 2);  // configurations l1 and l2
}

TEST_CASE("config_space_dimension") {
  CHECK(config_space_dimension(5, 25, Statistics::boson) == 118755);
  CHECK(config_space_dimension(2, 4, Statistics::boson) == 10);
  CHECK(config_space_dimension(0, 7, Statistics::boson) == 1);
  CHECK(config_space_dimension(0, 7, Statistics::fermion) == 1);
  CHECK(config_space_dimension(5, 25, Statistics::fermion) == 118755);
  CHECK(config_space_dimension(12, 36, Statistics::boson) == binomial_checked(47, 12));
  CHECK_THROWS_AS(config_space_dimension(80, 1000, Statistics::boson), std::overflow_error);
  CHECK_THROWS_AS(config_space_dimension(-1, 4, Statistics::boson), std::invalid_argument);
}

TEST_CASE("stored configurations always conserve particle number") {
  const auto g3 = Lattice::full_grid(3);
  auto state = make_initial(g3, 3, 1,
                            {Complex{0.5, 0}, Complex{0.5, 0}, Complex{0.5, 0}, Complex{0.5, 0}},
                            Statistics::boson);
  for (int s = 0; s < 15; ++s) {
    auto [next, report] = step(state, g3);
    state = std::move(next);
    for (const auto& [cfg, a] : state.amps) CHECK(cfg.total() == 3);
    CHECK(effective_dimension(state, 1e-12) <=
          static_cast<int>(config_space_dimension(3, 9, Statistics::boson)));
    CHECK(norm_squared(state) == Approx(1.0).epsilon(1e-12));
  }
}
