#pragma once

#include <algorithm>
#include <array>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace qwalk {

// Chirality indices. 1 = left (v-1), 2 = right (v+1), 3 = down (v+M), 4 = up (v-M).
enum Chirality : int { kLeft = 1, kRight = 2, kDown = 3, kUp = 4 };

inline int opposite_direction(int chirality) {
  switch (chirality) {
    case kLeft: return kRight;
    case kRight: return kLeft;
    case kDown: return kUp;
    case kUp: return kDown;
  }
  throw std::invalid_argument("chirality out of range");
}

// A grid-subgraph lattice: M x M vertices labelled 1..M^2 row-major, edges
// restricted to horizontal (|u-v| = 1, same row) and vertical (|u-v| = M)
// nearest-neighbor pairs. Immutable after construction.
class Lattice {
 public:
  static Lattice full_grid(int side) {
    if (side < 1) throw std::invalid_argument("grid side must be >= 1");
    std::vector<std::pair<int, int>> edges;
    for (int row = 0; row < side; ++row) {
      for (int col = 0; col < side; ++col) {
        const int v = row * side + col + 1;
        if (col + 1 < side) edges.emplace_back(v, v + 1);
        if (row + 1 < side) edges.emplace_back(v, v + side);
      }
    }
    return Lattice(side, std::move(edges));
  }

  // Line-oriented text format: "M <int>" then "E <u> <v>" lines, '#' comments.
  static Lattice parse(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string line;
    int line_no = 0;
    int side = 0;
    std::vector<std::pair<int, int>> edges;
    bool have_side = false;
    while (std::getline(in, line)) {
      ++line_no;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      std::istringstream ls(line);
      std::string tag;
      if (!(ls >> tag)) continue;
      if (!have_side) {
        if (tag != "M") {
          throw std::runtime_error("lattice parse error at line " +
                                   std::to_string(line_no) + ": expected 'M <int>'");
        }
        if (!(ls >> side) || side < 1) {
          throw std::runtime_error("lattice parse error at line " +
                                   std::to_string(line_no) + ": bad lattice side");
        }
        have_side = true;
      } else if (tag == "E") {
        int u = 0, v = 0;
        if (!(ls >> u >> v)) {
          throw std::runtime_error("lattice parse error at line " +
                                   std::to_string(line_no) + ": expected 'E <u> <v>'");
        }
        edges.emplace_back(u, v);
      } else {
        throw std::runtime_error("lattice parse error at line " +
                                 std::to_string(line_no) + ": unknown tag '" + tag + "'");
      }
      std::string trailing;
      if (ls >> trailing) {
        throw std::runtime_error("lattice parse error at line " +
                                 std::to_string(line_no) + ": trailing tokens");
      }
    }
    if (!have_side) throw std::runtime_error("lattice parse error: missing 'M <int>' line");
    return Lattice(side, std::move(edges));
  }

  int side() const { return side_; }
  int vertex_count() const { return side_ * side_; }
  const std::vector<std::pair<int, int>>& edges() const { return edges_; }

  // Neighbor of `vertex` in direction `chirality`, or 0 when the edge is absent.
  int neighbor(int vertex, int chirality) const {
    return nbr_[chirality - 1][vertex - 1];
  }

  std::string serialize() const {
    std::ostringstream out;
    out << "M " << side_ << "\n";
    for (const auto& [u, v] : edges_) out << "E " << u << " " << v << "\n";
    return out.str();
  }

  bool operator==(const Lattice& other) const {
    return side_ == other.side_ && nbr_ == other.nbr_;
  }

  // Left-right mirror: same edge set reflected through the vertical axis, with
  // the direction tables conjugated by the reflection. Running a walk on the
  // mirrored lattice from the mirrored initial vertex reproduces the mirror
  // image of the original walk, amplitude for amplitude.
  friend Lattice mirrored_lr(const Lattice& lat) {
    Lattice out;
    out.side_ = lat.side_;
    const auto reflect = [&](int v) {
      if (v == 0) return 0;
      const int row = (v - 1) / lat.side_;
      const int col = (v - 1) % lat.side_;
      return row * lat.side_ + (lat.side_ - 1 - col) + 1;
    };
    for (const auto& [u, v] : lat.edges_) {
      const int ru = reflect(u), rv = reflect(v);
      out.edges_.emplace_back(std::min(ru, rv), std::max(ru, rv));
    }
    std::sort(out.edges_.begin(), out.edges_.end());
    for (int d = 0; d < 4; ++d) {
      out.nbr_[d].assign(lat.vertex_count(), 0);
      for (int v = 1; v <= lat.vertex_count(); ++v) {
        out.nbr_[d][v - 1] = reflect(lat.nbr_[d][reflect(v) - 1]);
      }
    }
    return out;
  }

 private:
  Lattice() = default;

  Lattice(int side, std::vector<std::pair<int, int>> edges) : side_(side) {
    const int n = side * side;
    for (auto& [u, v] : edges) {
      if (u > v) std::swap(u, v);
    }
    std::sort(edges.begin(), edges.end());
    std::set<std::pair<int, int>> seen;
    for (int d = 0; d < 4; ++d) nbr_[d].assign(n, 0);
    for (const auto& [u, v] : edges) {
      if (u < 1 || v > n) {
        throw std::runtime_error("lattice edge (" + std::to_string(u) + "," +
                                 std::to_string(v) + ") out of vertex range [1," +
                                 std::to_string(n) + "]");
      }
      if (!seen.insert({u, v}).second) {
        throw std::runtime_error("duplicate lattice edge (" + std::to_string(u) + "," +
                                 std::to_string(v) + ")");
      }
      const bool same_row = (u - 1) / side == (v - 1) / side;
      if (v - u == 1 && same_row) {
        nbr_[kRight - 1][u - 1] = v;
        nbr_[kLeft - 1][v - 1] = u;
      } else if (v - u == side) {
        nbr_[kDown - 1][u - 1] = v;
        nbr_[kUp - 1][v - 1] = u;
      } else {
        throw std::runtime_error("edge (" + std::to_string(u) + "," + std::to_string(v) +
                                 ") violates the grid-subgraph constraint");
      }
    }
    edges_ = std::move(edges);
  }

  int side_ = 1;
  std::vector<std::pair<int, int>> edges_;  // sorted (min,max) pairs
  std::array<std::vector<int>, 4> nbr_;     // [direction][vertex-1] -> label or 0
};

}  // namespace qwalk
