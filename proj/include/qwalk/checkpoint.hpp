#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "qwalk/state.hpp"

namespace qwalk {

// Formats a double with 17 significant digits, enough to round-trip exactly.
inline std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

// Line-oriented JSON checkpoint: a header record followed by one record per
// stored (chirality, configuration) amplitude in canonical state order.
inline void write_checkpoint(std::ostream& out, const GmpState& state, int side) {
  out << "{\"version\":1,\"M\":" << side << ",\"N\":" << state.particle_count
      << ",\"statistics\":\"" << to_string(state.statistics) << "\",\"step\":" << state.step
      << ",\"K_r\":" << format_double(state.norm_constant) << "}\n";
  for (const auto& [cfg, amps] : state.amps) {
    for (int k = 1; k <= 4; ++k) {
      const Complex c = amps[k - 1];
      if (c == Complex{}) continue;
      out << "{\"chirality\":" << k << ",\"occupations\":[";
      for (std::size_t v = 0; v < cfg.occ.size(); ++v) {
        if (v) out << ",";
        out << static_cast<int>(cfg.occ[v]);
      }
      out << "],\"re\":" << format_double(c.real()) << ",\"im\":" << format_double(c.imag())
          << "}\n";
    }
  }
}

inline void write_checkpoint_file(const std::filesystem::path& path, const GmpState& state,
                                  int side) {
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open checkpoint file " + tmp);
    write_checkpoint(out, state, side);
    if (!out.flush()) throw std::runtime_error("checkpoint write failed: " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

struct CheckpointData {
  GmpState state;
  int side = 0;
};

inline CheckpointData read_checkpoint(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("checkpoint is empty");
  const auto header = nlohmann::json::parse(line);
  if (header.value("version", 0) != 1) throw std::runtime_error("unsupported checkpoint version");

  CheckpointData data;
  data.side = header.at("M").get<int>();
  data.state.particle_count = header.at("N").get<int>();
  data.state.vertex_count = data.side * data.side;
  data.state.statistics = statistics_from_string(header.at("statistics").get<std::string>());
  data.state.step = header.at("step").get<int>();
  data.state.norm_constant = header.at("K_r").get<double>();

  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto record = nlohmann::json::parse(line);
    const int k = record.at("chirality").get<int>();
    if (k < 1 || k > 4) throw std::runtime_error("checkpoint chirality out of range");
    Configuration cfg;
    for (const auto& n : record.at("occupations")) {
      cfg.occ.push_back(static_cast<std::uint8_t>(n.get<int>()));
    }
    if (static_cast<int>(cfg.occ.size()) != data.state.vertex_count ||
        cfg.total() != data.state.particle_count) {
      throw std::runtime_error("checkpoint configuration violates particle conservation");
    }
    data.state.amps[cfg][k - 1] =
        Complex{record.at("re").get<double>(), record.at("im").get<double>()};
  }
  return data;
}

inline CheckpointData read_checkpoint_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open checkpoint file " + path.string());
  return read_checkpoint(in);
}

}  // namespace qwalk
