#pragma once

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qwalk/checkpoint.hpp"
#include "qwalk/evolve.hpp"
#include "qwalk/lattice.hpp"
#include "qwalk/observables.hpp"
#include "qwalk/oracle.hpp"
#include "qwalk/state.hpp"

namespace qwalk {

// Best-effort reconstruction of the partially connected 25-vertex lattice:
// an 8-vertex sub-lattice (7 vertices plus the joining central vertex 13),
// a 13-vertex sub-lattice attached to vertex 13 by the single edge 13-14,
// and four isolated vertices 5, 10, 21, 22. Also shipped as data/lattice2.lat
// so the edge set can be edited without rebuilding.
inline constexpr const char* kLattice2Text =
    "# 5x5 grid subgraph: 8-vertex and 13-vertex sub-lattices joined through\n"
    "# the central vertex 13; vertices 5, 10, 21, 22 are isolated.\n"
    "M 5\n"
    "E 1 2\nE 1 6\nE 2 7\nE 3 4\nE 3 8\nE 4 9\nE 6 7\nE 6 11\nE 7 12\n"
    "E 8 9\nE 9 14\nE 11 12\nE 11 16\nE 12 13\nE 13 14\nE 14 15\nE 14 19\n"
    "E 15 20\nE 17 18\nE 18 19\nE 18 23\nE 19 20\nE 19 24\nE 20 25\n"
    "E 23 24\nE 24 25\n";

inline Lattice load_lattice(const std::string& name_or_path) {
  if (name_or_path == "grid5") return Lattice::full_grid(5);
  if (name_or_path == "lattice2") return Lattice::parse(kLattice2Text);
  std::ifstream in(name_or_path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open lattice file " + name_or_path);
  std::ostringstream text;
  text << in.rdbuf();
  return Lattice::parse(text.str());
}

struct ExperimentConfig {
  std::string lattice = "grid5";  // builtin name or file path
  int particles = 5;
  Statistics statistics = Statistics::boson;
  int initial_vertex = 1;
  CoinVector coin_amps = {Complex{0.0, 0.0}, Complex{0.7071067811865476, 0.0},
                          Complex{0.7071067811865476, 0.0}, Complex{0.0, 0.0}};
  int steps = 200;
  int observe_every = 1;
  double prune_eps = 1e-12;
  FermionRule fermion_rule = FermionRule::equal;
  std::vector<std::pair<int, int>> tracked_configuration;  // (vertex, count); empty = initial
  std::vector<int> counting_n;                             // empty = {2, N} clamped to N
  std::string out = "out";
  int checkpoint_every = 50;
  int threads = 1;
  bool deterministic = false;

  void validate() const {
    if (particles < 1) throw std::invalid_argument("particles must be >= 1");
    if (steps < 1) throw std::invalid_argument("steps must be >= 1");
    if (observe_every < 1) throw std::invalid_argument("observe_every must be >= 1");
    if (prune_eps < 0.0) throw std::invalid_argument("prune_eps must be >= 0");
    if (checkpoint_every < 0) throw std::invalid_argument("checkpoint_every must be >= 0");
    double n2 = 0.0;
    for (const auto& c : coin_amps) n2 += std::norm(c);
    if (n2 <= 0.0) throw std::invalid_argument("coin_amps must not all be zero");
    for (const int n : counting_n) {
      if (n < 0 || n > particles) throw std::invalid_argument("counting_n value out of [0, N]");
    }
  }
};

namespace detail {

inline CoinVector parse_coin_amps(const std::string& text) {
  CoinVector amps{};
  std::istringstream in(text);
  std::string part;
  int i = 0;
  while (std::getline(in, part, ';')) {
    if (i >= 4) throw std::invalid_argument("coin_amps needs exactly 4 re,im pairs");
    double re = 0.0, im = 0.0;
    char comma = 0;
    std::istringstream ps(part);
    if (!(ps >> re >> comma >> im) || comma != ',') {
      throw std::invalid_argument("coin_amps entry '" + part + "' is not 're,im'");
    }
    amps[i++] = Complex{re, im};
  }
  if (i != 4) throw std::invalid_argument("coin_amps needs exactly 4 re,im pairs");
  return amps;
}

inline std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> values;
  std::istringstream in(text);
  std::string part;
  while (std::getline(in, part, ',')) values.push_back(std::stoi(part));
  return values;
}

inline std::vector<std::pair<int, int>> parse_tracked(const std::string& text) {
  std::vector<std::pair<int, int>> pairs;
  std::istringstream in(text);
  std::string part;
  while (std::getline(in, part, ',')) {
    const auto colon = part.find(':');
    if (colon == std::string::npos) {
      throw std::invalid_argument("tracked_configuration entry '" + part +
                                  "' is not 'vertex:count'");
    }
    pairs.emplace_back(std::stoi(part.substr(0, colon)), std::stoi(part.substr(colon + 1)));
  }
  return pairs;
}

inline bool parse_bool(const std::string& text) {
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  throw std::invalid_argument("expected true|false, got '" + text + "'");
}

}  // namespace detail

// key=value configuration, '#' comments. Unknown keys and malformed values
// are reported with the offending key and line number.
inline ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig cfg;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto strip = [](std::string s) {
      const auto a = s.find_first_not_of(" \t\r");
      if (a == std::string::npos) return std::string{};
      const auto b = s.find_last_not_of(" \t\r");
      return s.substr(a, b - a + 1);
    };
    if (strip(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::runtime_error("config line " + std::to_string(line_no) + ": expected key=value");
    }
    const std::string key = strip(line.substr(0, eq));
    const std::string value = strip(line.substr(eq + 1));
    try {
      if (key == "lattice") cfg.lattice = value;
      else if (key == "particles") cfg.particles = std::stoi(value);
      else if (key == "statistics") cfg.statistics = statistics_from_string(value);
      else if (key == "initial_vertex") cfg.initial_vertex = std::stoi(value);
      else if (key == "coin_amps") cfg.coin_amps = detail::parse_coin_amps(value);
      else if (key == "steps") cfg.steps = std::stoi(value);
      else if (key == "observe_every") cfg.observe_every = std::stoi(value);
      else if (key == "prune_eps") cfg.prune_eps = std::stod(value);
      else if (key == "fermion_rule") cfg.fermion_rule = fermion_rule_from_string(value);
      else if (key == "tracked_configuration") cfg.tracked_configuration = detail::parse_tracked(value);
      else if (key == "counting_n") cfg.counting_n = detail::parse_int_list(value);
      else if (key == "out") cfg.out = value;
      else if (key == "checkpoint_every") cfg.checkpoint_every = std::stoi(value);
      else if (key == "threads") cfg.threads = std::stoi(value);
      else if (key == "deterministic") cfg.deterministic = detail::parse_bool(value);
      else throw std::runtime_error("config line " + std::to_string(line_no) +
                                    ": unknown key '" + key + "'");
    } catch (const std::runtime_error&) {
      throw;
    } catch (const std::exception& e) {
      throw std::runtime_error("config line " + std::to_string(line_no) + ", key '" + key +
                               "': " + e.what());
    }
  }
  cfg.validate();
  return cfg;
}

inline std::vector<int> effective_counting_n(const ExperimentConfig& cfg) {
  if (!cfg.counting_n.empty()) return cfg.counting_n;
  std::vector<int> values;
  if (cfg.particles > 2) values.push_back(2);
  values.push_back(cfg.particles);
  return values;
}

inline Configuration tracked_configuration(const ExperimentConfig& cfg, int vertex_count) {
  Configuration tracked;
  tracked.occ.assign(vertex_count, 0);
  if (cfg.tracked_configuration.empty()) {
    tracked.occ[cfg.initial_vertex - 1] = static_cast<std::uint8_t>(cfg.particles);
  } else {
    for (const auto& [vertex, count] : cfg.tracked_configuration) {
      if (vertex < 1 || vertex > vertex_count) {
        throw std::invalid_argument("tracked_configuration vertex out of range");
      }
      tracked.occ[vertex - 1] = static_cast<std::uint8_t>(count);
    }
    if (tracked.total() != cfg.particles) {
      throw std::invalid_argument("tracked_configuration does not sum to the particle count");
    }
  }
  return tracked;
}

inline nlohmann::json config_to_json(const ExperimentConfig& cfg) {
  nlohmann::json amps = nlohmann::json::array();
  for (const auto& c : cfg.coin_amps) amps.push_back({c.real(), c.imag()});
  nlohmann::json tracked = nlohmann::json::array();
  for (const auto& [v, n] : cfg.tracked_configuration) tracked.push_back({v, n});
  return {
      {"lattice", cfg.lattice},
      {"particles", cfg.particles},
      {"statistics", to_string(cfg.statistics)},
      {"initial_vertex", cfg.initial_vertex},
      {"coin_amps", amps},
      {"steps", cfg.steps},
      {"observe_every", cfg.observe_every},
      {"prune_eps", cfg.prune_eps},
      {"fermion_rule", to_string(cfg.fermion_rule)},
      {"tracked_configuration", tracked},
      {"counting_n", cfg.counting_n},
      {"out", cfg.out},
      {"checkpoint_every", cfg.checkpoint_every},
      {"threads", cfg.threads},
      {"deterministic", cfg.deterministic},
  };
}

namespace detail {

// Rewrites a CSV keeping the header and rows whose leading step field is
// <= max_step; used when resuming past a partially written tail.
inline void truncate_csv(const std::filesystem::path& path, int max_step) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("resume: missing CSV " + path.string());
  std::string line;
  std::vector<std::string> kept;
  bool header = true;
  while (std::getline(in, line)) {
    if (header) {
      kept.push_back(line);
      header = false;
      continue;
    }
    if (line.empty()) continue;
    const int step = std::stoi(line.substr(0, line.find(',')));
    if (step <= max_step) kept.push_back(line);
  }
  in.close();
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  for (const auto& l : kept) out << l << "\n";
}

class RecordWriter {
 public:
  RecordWriter(const std::filesystem::path& dir, int vertex_count,
               const std::vector<int>& counting_n, bool append)
      : counting_n_(counting_n) {
    const auto mode = std::ios::binary | (append ? std::ios::app : std::ios::trunc);
    timeseries_.open(dir / "timeseries.csv", mode);
    densities_.open(dir / "densities.csv", mode);
    counting_.open(dir / "counting.csv", mode);
    if (!timeseries_ || !densities_ || !counting_) {
      throw std::runtime_error("cannot open output CSVs in " + dir.string());
    }
    if (!append) {
      timeseries_ << "step,K_r,effective_dimension,entropy,temperature,"
                     "forbidden_moves,pruned,entries\n";
      densities_ << "step";
      counting_ << "step,n";
      for (int v = 1; v <= vertex_count; ++v) {
        densities_ << ",v" << v;
        counting_ << ",v" << v;
      }
      densities_ << "\n";
      counting_ << "\n";
    }
  }

  void emit(const GmpState& state, const StepReport& report, const Configuration& tracked,
            const ModeSet& modes, double eps) {
    const double entropy = configuration_entropy(state, tracked);
    const auto temperature = configuration_temperature(state, tracked, modes);
    timeseries_ << state.step << "," << format_double(state.norm_constant) << ","
                << effective_dimension(state, eps) << "," << format_double(entropy) << ",";
    if (temperature) timeseries_ << format_double(*temperature);
    timeseries_ << "," << report.forbidden_moves << "," << report.pruned << ","
                << state.amps.size() << "\n";

    const auto density = vertex_densities(state);
    densities_ << state.step;
    for (const double d : density) densities_ << "," << format_double(d);
    densities_ << "\n";

    for (const int n : counting_n_) {
      counting_ << state.step << "," << n;
      for (int v = 1; v <= state.vertex_count; ++v) {
        counting_ << "," << format_double(counting_statistics(state, n, v));
      }
      counting_ << "\n";
    }
    timeseries_.flush();
    densities_.flush();
    counting_.flush();
    if (!timeseries_ || !densities_ || !counting_) {
      throw std::runtime_error("CSV write failure");
    }
  }

 private:
  std::ofstream timeseries_;
  std::ofstream densities_;
  std::ofstream counting_;
  std::vector<int> counting_n_;
};

}  // namespace detail

// Runs the configured experiment, writing timeseries.csv, densities.csv,
// counting.csv, final_state.jsonl and meta.json under cfg.out. With
// resume=true the state is restored from checkpoint.jsonl and the CSVs are
// truncated to the checkpoint step before continuing.
inline int run_experiment(const ExperimentConfig& cfg, bool resume = false) {
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();
  const Lattice lattice = load_lattice(cfg.lattice);
  const std::filesystem::path dir(cfg.out);
  std::filesystem::create_directories(dir);

  StepOptions options;
  options.prune_eps = cfg.prune_eps;
  options.fermion_rule = cfg.fermion_rule;
  options.threads = cfg.deterministic ? 1 : cfg.threads;

  const Configuration tracked = tracked_configuration(cfg, lattice.vertex_count());
  const ModeSet modes(lattice.vertex_count());

  GmpState state;
  if (resume) {
    auto data = read_checkpoint_file(dir / "checkpoint.jsonl");
    if (data.side != lattice.side() || data.state.particle_count != cfg.particles ||
        data.state.statistics != cfg.statistics) {
      throw std::runtime_error("checkpoint does not match the experiment config");
    }
    state = std::move(data.state);
    detail::truncate_csv(dir / "timeseries.csv", state.step);
    detail::truncate_csv(dir / "densities.csv", state.step);
    detail::truncate_csv(dir / "counting.csv", state.step);
  } else {
    state = make_initial(lattice, cfg.particles, cfg.initial_vertex, cfg.coin_amps,
                         cfg.statistics);
  }

  const auto write_meta = [&](double wall_seconds) {
    nlohmann::json meta = {
        {"config", config_to_json(cfg)},
        {"format_version", 1},
        {"final_step", state.step},
        {"wall_time_seconds", wall_seconds},
    };
    std::ofstream meta_out(dir / "meta.json", std::ios::binary | std::ios::trunc);
    meta_out << meta.dump(2) << "\n";
  };
  write_meta(0.0);  // keeps an interrupted run resumable from its artifacts

  detail::RecordWriter writer(dir, lattice.vertex_count(), effective_counting_n(cfg), resume);
  try {
    if (state.step == 0) writer.emit(state, StepReport{}, tracked, modes, cfg.prune_eps);
    while (state.step < cfg.steps) {
      auto [next, report] = step(state, lattice, options);
      state = std::move(next);
      if (state.step % cfg.observe_every == 0 || state.step == cfg.steps) {
        writer.emit(state, report, tracked, modes, cfg.prune_eps);
      }
      if (cfg.checkpoint_every > 0 && state.step % cfg.checkpoint_every == 0 &&
          state.step != cfg.steps) {
        write_checkpoint_file(dir / "checkpoint.jsonl", state, lattice.side());
      }
    }
  } catch (...) {
    // Leave a resumable checkpoint behind before propagating the failure.
    write_checkpoint_file(dir / "checkpoint.jsonl", state, lattice.side());
    throw;
  }

  write_checkpoint_file(dir / "checkpoint.jsonl", state, lattice.side());
  write_checkpoint_file(dir / "final_state.jsonl", state, lattice.side());

  const auto wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0);
  write_meta(wall.count());
  return 0;
}

struct OracleCheckReport {
  int steps = 0;
  double max_deviation = 0.0;
  bool passed = false;
};

// Runs the sparse engine and the dense oracle side by side on the configured
// instance and reports the max per-step amplitude deviation.
inline OracleCheckReport oracle_check(const ExperimentConfig& cfg, std::ostream& log,
                                      double tolerance = 1e-10) {
  cfg.validate();
  const Lattice lattice = load_lattice(cfg.lattice);
  const auto basis =
      oracle::enumerate_basis(cfg.particles, lattice.vertex_count(), cfg.statistics);

  GmpState sparse = make_initial(lattice, cfg.particles, cfg.initial_vertex, cfg.coin_amps,
                                 cfg.statistics);
  const auto dense_history =
      oracle::oracle_run(sparse, lattice, cfg.steps, cfg.prune_eps, cfg.fermion_rule);

  StepOptions options;
  options.prune_eps = cfg.prune_eps;
  options.fermion_rule = cfg.fermion_rule;

  OracleCheckReport report;
  report.steps = cfg.steps;
  for (int s = 0; s < cfg.steps; ++s) {
    auto [next, step_report] = step(sparse, lattice, options);
    sparse = std::move(next);
    const auto dense = oracle::to_dense(sparse, basis);
    double dev = 0.0;
    for (std::size_t i = 0; i < dense.size(); ++i) {
      dev = std::max(dev, std::abs(dense[i] - dense_history[s][i]));
    }
    report.max_deviation = std::max(report.max_deviation, dev);
    log << "step " << (s + 1) << " max deviation " << format_double(dev) << "\n";
  }
  report.passed = report.max_deviation <= tolerance;
  return report;
}

}  // namespace qwalk
