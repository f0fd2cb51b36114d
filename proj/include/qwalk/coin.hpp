#pragma once

#include <array>
#include <complex>
#include <stdexcept>

namespace qwalk {

using Complex = std::complex<double>;
using CoinVector = std::array<Complex, 4>;

// DFT-4 coin: entry(j,k) = (1/2) * exp(i*(pi/2)*(k-1)*(j-1)). Entries are
// drawn from the exact quarter-turn phase table {1, i, -1, -i}, never from
// floating-point trigonometry, so step evolution is bit-for-bit reproducible.
inline Complex coin_entry(int j, int k) {
  if (j < 1 || j > 4 || k < 1 || k > 4) throw std::invalid_argument("coin index out of range");
  static constexpr std::array<Complex, 4> quarter_turns = {
      Complex{1.0, 0.0}, Complex{0.0, 1.0}, Complex{-1.0, 0.0}, Complex{0.0, -1.0}};
  return 0.5 * quarter_turns[((j - 1) * (k - 1)) % 4];
}

inline CoinVector coin_apply(const CoinVector& in) {
  CoinVector out{};
  for (int j = 1; j <= 4; ++j) {
    for (int k = 1; k <= 4; ++k) out[j - 1] += coin_entry(j, k) * in[k - 1];
  }
  return out;
}

}  // namespace qwalk
