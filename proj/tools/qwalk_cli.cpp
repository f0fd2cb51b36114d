#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "qwalk/experiment.hpp"

namespace {

struct CliOverrides {
  std::string config_path;
  std::string lattice;
  int particles = -1;
  std::string statistics;
  int initial_vertex = -1;
  int steps = -1;
  int observe_every = -1;
  double prune_eps = -1.0;
  std::string fermion_rule;
  std::string out;
  int checkpoint_every = -1;
  int threads = -1;
  bool deterministic = false;
};

void add_experiment_flags(CLI::App* cmd, CliOverrides& o) {
  cmd->add_option("--config", o.config_path, "key=value configuration file");
  cmd->add_option("--lattice", o.lattice, "builtin lattice (grid5, lattice2) or file path");
  cmd->add_option("--particles", o.particles, "number of walkers N");
  cmd->add_option("--statistics", o.statistics, "boson|fermion");
  cmd->add_option("--initial-vertex", o.initial_vertex, "vertex carrying all walkers at step 0");
  cmd->add_option("--steps", o.steps, "number of walk steps");
  cmd->add_option("--observe-every", o.observe_every, "observation cadence");
  cmd->add_option("--prune-eps", o.prune_eps, "zero-amplitude threshold");
  cmd->add_option("--fermion-rule", o.fermion_rule, "equal|geq");
  cmd->add_option("--out", o.out, "output directory");
  cmd->add_option("--checkpoint-every", o.checkpoint_every, "checkpoint cadence (0 = off)");
  cmd->add_option("--threads", o.threads, "step-kernel worker threads");
  cmd->add_flag("--deterministic", o.deterministic, "force canonical-order reduction");
}

qwalk::ExperimentConfig build_config(const CliOverrides& o) {
  qwalk::ExperimentConfig cfg;
  if (!o.config_path.empty()) {
    std::ifstream in(o.config_path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open config file " + o.config_path);
    std::ostringstream text;
    text << in.rdbuf();
    cfg = qwalk::parse_config(text.str());
  }
  if (!o.lattice.empty()) cfg.lattice = o.lattice;
  if (o.particles >= 0) cfg.particles = o.particles;
  if (!o.statistics.empty()) cfg.statistics = qwalk::statistics_from_string(o.statistics);
  if (o.initial_vertex >= 0) cfg.initial_vertex = o.initial_vertex;
  if (o.steps >= 0) cfg.steps = o.steps;
  if (o.observe_every >= 0) cfg.observe_every = o.observe_every;
  if (o.prune_eps >= 0.0) cfg.prune_eps = o.prune_eps;
  if (!o.fermion_rule.empty()) cfg.fermion_rule = qwalk::fermion_rule_from_string(o.fermion_rule);
  if (!o.out.empty()) cfg.out = o.out;
  if (o.checkpoint_every >= 0) cfg.checkpoint_every = o.checkpoint_every;
  if (o.threads >= 0) cfg.threads = o.threads;
  if (o.deterministic) cfg.deterministic = true;
  cfg.validate();
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coined many-particle quantum walk simulator on grid-subgraph lattices"};
  app.require_subcommand(1);

  CliOverrides run_opts;
  auto* run_cmd = app.add_subcommand("run", "run an experiment and write CSV artifacts");
  add_experiment_flags(run_cmd, run_opts);

  CliOverrides oracle_opts;
  auto* oracle_cmd =
      app.add_subcommand("oracle-check", "compare the sparse engine against the dense oracle");
  add_experiment_flags(oracle_cmd, oracle_opts);

  auto* lattice_cmd = app.add_subcommand("lattice", "lattice file utilities");
  std::string lattice_path;
  auto* validate_cmd = lattice_cmd->add_subcommand("validate", "parse and validate a lattice file");
  validate_cmd->add_option("path", lattice_path, "lattice file")->required();

  std::string resume_dir;
  int resume_steps = -1;
  auto* resume_cmd = app.add_subcommand("resume", "continue a run from its checkpoint");
  resume_cmd->add_option("--out", resume_dir, "output directory of the interrupted run")
      ->required();
  resume_cmd->add_option("--steps", resume_steps, "override total step count");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) {
      return qwalk::run_experiment(build_config(run_opts));
    }
    if (oracle_cmd->parsed()) {
      const auto cfg = build_config(oracle_opts);
      const auto report = qwalk::oracle_check(cfg, std::cout);
      std::cout << (report.passed ? "PASS" : "FAIL") << ": max deviation "
                << qwalk::format_double(report.max_deviation) << " over " << report.steps
                << " steps\n";
      return report.passed ? 0 : 1;
    }
    if (validate_cmd->parsed()) {
      const auto lattice = qwalk::load_lattice(lattice_path);
      std::cout << "valid lattice: M=" << lattice.side() << ", " << lattice.vertex_count()
                << " vertices, " << lattice.edges().size() << " edges\n";
      return 0;
    }
    if (resume_cmd->parsed()) {
      std::ifstream meta_in(std::filesystem::path(resume_dir) / "meta.json");
      qwalk::ExperimentConfig cfg;
      if (meta_in) {
        // A finished or checkpointed run echoes its config in meta.json.
        const auto meta = nlohmann::json::parse(meta_in);
        std::ostringstream text;
        const auto& c = meta.at("config");
        text << "lattice=" << c.at("lattice").get<std::string>() << "\n"
             << "particles=" << c.at("particles").get<int>() << "\n"
             << "statistics=" << c.at("statistics").get<std::string>() << "\n"
             << "initial_vertex=" << c.at("initial_vertex").get<int>() << "\n"
             << "steps=" << c.at("steps").get<int>() << "\n"
             << "observe_every=" << c.at("observe_every").get<int>() << "\n"
             << "prune_eps=" << qwalk::format_double(c.at("prune_eps").get<double>()) << "\n"
             << "fermion_rule=" << c.at("fermion_rule").get<std::string>() << "\n"
             << "checkpoint_every=" << c.at("checkpoint_every").get<int>() << "\n"
             << "threads=" << c.at("threads").get<int>() << "\n"
             << "deterministic=" << (c.at("deterministic").get<bool>() ? "true" : "false")
             << "\n";
        cfg = qwalk::parse_config(text.str());
        std::ostringstream amps;
        bool first = true;
        for (const auto& pair : c.at("coin_amps")) {
          if (!first) amps << ";";
          amps << qwalk::format_double(pair[0].get<double>()) << ","
               << qwalk::format_double(pair[1].get<double>());
          first = false;
        }
        cfg.coin_amps = qwalk::detail::parse_coin_amps(amps.str());
        cfg.counting_n = c.at("counting_n").get<std::vector<int>>();
        for (const auto& pair : c.at("tracked_configuration")) {
          cfg.tracked_configuration.emplace_back(pair[0].get<int>(), pair[1].get<int>());
        }
      } else {
        throw std::runtime_error("resume: no meta.json in " + resume_dir);
      }
      cfg.out = resume_dir;
      if (resume_steps > 0) cfg.steps = resume_steps;
      return qwalk::run_experiment(cfg, /*resume=*/true);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
