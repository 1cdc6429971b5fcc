#include <CLI11.hpp>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>

#include "delayfb/bench.hpp"
#include "delayfb/config.hpp"
#include "delayfb/integrate.hpp"
#include "delayfb/json_io.hpp"
#include "delayfb/sensitivity.hpp"

namespace fs = std::filesystem;
using namespace delayfb;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;   // operational failure
constexpr int kExitNegative = 2;  // command ran, result is negative

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config \"" + path + "\"");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write \"" + path.string() + "\"");
  out << content;
  if (!out) throw ConfigError("write failed for \"" + path.string() + "\"");
}

fs::path prepare_out_dir(const std::string& dir) {
  fs::path path(dir);
  std::error_code ec;
  fs::create_directories(path, ec);
  if (ec) throw ConfigError("cannot create output directory \"" + dir + "\"");
  // probe writability up front so failures surface as one clean error
  const fs::path probe = path / ".write_probe";
  {
    std::ofstream out(probe);
    if (!out) throw ConfigError("output directory \"" + dir + "\" is not writable");
  }
  fs::remove(probe, ec);
  return path;
}

struct CommonFlags {
  std::string config_path;
  std::string out_dir;
  bool has_out = false;
  std::uint64_t seed = 0;
  bool has_seed = false;
};

RunConfig load_run_config(const CommonFlags& flags, bool require_system) {
  if (flags.config_path.empty()) {
    throw ConfigError("missing-required: --config <path> is needed");
  }
  RunConfig cfg = require_system
                      ? parse_config(read_file(flags.config_path))
                      : parse_config_without_system(read_file(flags.config_path));
  if (flags.has_out) cfg.out_dir = flags.out_dir;
  if (flags.has_seed) cfg.train.seed = flags.seed;
  return cfg;
}

int cmd_simulate(const CommonFlags& flags) {
  RunConfig cfg = load_run_config(flags, /*require_system=*/true);
  const DelaySystem sys = load_system(cfg);
  const Gain gain = load_gain(cfg, sys);
  const InitialFunction phi = cfg.sim.phi.build(sys.n(), sys.h);
  const fs::path out = prepare_out_dir(cfg.out_dir);
  try {
    const Trajectory traj = simulate(sys, gain, phi, cfg.sim.T, cfg.sim.r);
    std::ofstream file(out / "trajectory.csv");
    if (!file) throw ConfigError("cannot write trajectory.csv");
    write_trajectory_csv(traj, file);
  } catch (const NonfiniteState& err) {
    std::cerr << "simulation overflowed: " << err.what() << "\n";
    return kExitNegative;
  }
  std::cout << (out / "trajectory.csv").string() << "\n";
  return kExitOk;
}

int cmd_verify(const CommonFlags& flags) {
  RunConfig cfg = load_run_config(flags, /*require_system=*/true);
  const DelaySystem sys = load_system(cfg);
  const Gain gain = load_gain(cfg, sys);
  const StabilityCheck check = is_stable(sys, gain, cfg.train.verify_margin);
  std::cout << spectral_report_to_json(check.report).dump(2) << "\n";
  return check.stable ? kExitOk : kExitNegative;
}

int cmd_synthesize(const CommonFlags& flags) {
  RunConfig cfg = load_run_config(flags, /*require_system=*/true);
  const DelaySystem sys = load_system(cfg);
  const fs::path out = prepare_out_dir(cfg.out_dir);

  const TrainReport report = synthesize(sys, cfg.train);

  write_file(out / "report.json",
             train_report_to_json(report, /*include_timing=*/false).dump(2) + "\n");
  write_file(out / "gain.json", gain_to_json(report.final_gain).dump(2) + "\n");

  std::ostringstream timing;
  for (const auto& stage : report.stages) {
    timing << "stage " << stage.stage << " seconds " << stage.seconds << "\n";
  }
  timing << "total seconds " << report.total_seconds << "\n";
  write_file(out / "timing.log", timing.str());

  // Per-stage closed-loop trajectory with the first sampled history, the
  // same one for every stage so the curves are comparable.
  const std::vector<InitialFunction> samples = sample_initial_functions(
      sys.n(), sys.h, cfg.train.J, cfg.train.seed, cfg.train.sampler);
  for (const auto& stage : report.stages) {
    char name[32];
    std::snprintf(name, sizeof(name), "stage_%02d_traj.csv", stage.stage);
    try {
      const Trajectory traj = simulate(sys, Gain{stage.gain}, samples.front(),
                                       cfg.train.T, cfg.train.r);
      std::ofstream file(out / name);
      if (!file) throw ConfigError(std::string("cannot write ") + name);
      write_trajectory_csv(traj, file);
    } catch (const NonfiniteState&) {
      if (cfg.verbosity > 0) {
        std::cerr << "stage " << stage.stage
                  << ": trajectory overflowed, no CSV written\n";
      }
    }
  }

  if (cfg.verbosity > 0) {
    for (const auto& stage : report.stages) {
      std::cerr << "stage " << stage.stage << " horizon " << stage.horizon
                << " loss " << stage.final_loss << " abscissa "
                << stage.abscissa << (stage.verified ? " verified" : "")
                << "\n";
    }
  }
  std::cout << train_report_to_json(report, /*include_timing=*/true)["success"]
            << " stage " << report.terminated_at_stage << "\n";
  return report.success ? kExitOk : kExitNegative;
}

int cmd_grad_check(const CommonFlags& flags, int count, int r) {
  if (!flags.config_path.empty()) {
    const RunConfig cfg = load_run_config(flags, /*require_system=*/false);
    r = cfg.train.r;
  }
  const std::uint64_t seed = flags.has_seed ? flags.seed : 0;
  std::mt19937_64 engine(seed);
  std::uniform_int_distribution<int> dim_n(1, 4);
  std::uniform_int_distribution<int> dim_mp(1, 2);
  std::uniform_real_distribution<double> delay(0.1, 1.0);
  std::uniform_real_distribution<double> horizon(0.5, 3.0);
  std::uniform_real_distribution<double> entry(-1.0, 1.0);

  constexpr double kFdStep = 1e-5;
  double max_rel_error = 0.0;
  int done = 0;
  int attempts = 0;
  while (done < count && attempts < 20 * count) {
    ++attempts;
    const int n = dim_n(engine);
    const int m = dim_mp(engine);
    const int p = dim_mp(engine);
    const double h = delay(engine);
    const double T = horizon(engine);
    const DelaySystem sys = random_system(n, m, p, h, engine());
    Gain gain{Eigen::MatrixXd::NullaryExpr(m, p, [&] { return entry(engine); })};
    const InitialFunction phi =
        sample_initial_functions(n, h, 1, engine(), SamplerKind::constant_sphere)
            .front();

    const GradientResult result = loss_and_gradient(sys, gain, phi, T, r);
    if (result.aborted > 0 || result.loss < 1e-3) continue;

    Eigen::MatrixXd fd(m, p);
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < p; ++j) {
        Gain plus = gain, minus = gain;
        plus.K(i, j) += kFdStep;
        minus.K(i, j) -= kFdStep;
        fd(i, j) = (loss_and_gradient(sys, plus, phi, T, r).loss -
                    loss_and_gradient(sys, minus, phi, T, r).loss) /
                   (2.0 * kFdStep);
      }
    }
    const double rel = (result.grad - fd).cwiseAbs().maxCoeff() /
                       std::max(fd.cwiseAbs().maxCoeff(), 1e-12);
    max_rel_error = std::max(max_rel_error, rel);
    ++done;
  }

  nlohmann::json out{{"cases", done}, {"max_rel_error", max_rel_error}};
  std::cout << out.dump(2) << "\n";
  if (done < count) {
    std::cerr << "only " << done << " of " << count << " cases were usable\n";
    return kExitFailure;
  }
  return max_rel_error < 1e-4 ? kExitOk : kExitNegative;
}

int cmd_benchmark(const CommonFlags& flags, int scenario_id, int count) {
  TrainConfig train;
  std::string out_dir = ".";
  if (!flags.config_path.empty()) {
    const RunConfig cfg = load_run_config(flags, /*require_system=*/false);
    train = cfg.train;
    out_dir = cfg.out_dir;
  } else if (flags.has_out) {
    out_dir = flags.out_dir;
  }
  const std::uint64_t base_seed = flags.has_seed ? flags.seed : 0;

  Scenario sc;
  sc.count = count;
  sc.h = 0.1;
  sc.n = 4;
  if (scenario_id == 1) {
    sc.m = 1;
    sc.p = 2;
  } else if (scenario_id == 2) {
    sc.m = 2;
    sc.p = 1;
  } else {
    throw ConfigError("--scenario must be 1 or 2");
  }

  const fs::path out = prepare_out_dir(out_dir);
  const ScenarioResult result = run_scenario(sc, train, base_seed);

  std::ostringstream csv;
  write_benchmark_csv(result.records, csv);
  write_file(out / "records.csv", csv.str());
  write_file(out / "benchmark.json",
             benchmark_to_json(result, /*include_timing=*/false).dump(2) + "\n");

  std::cout << benchmark_to_json(result, /*include_timing=*/true)["summary"].dump(2)
            << "\n";
  return result.summary.successes > 0 ? kExitOk : kExitNegative;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Static output-feedback gain synthesis for linear systems with an "
      "input delay: differentiable simulation, staged gradient descent, and "
      "spectral stability verification."};
  app.require_subcommand(1);

  CommonFlags flags;
  int count = 0;
  int scenario_id = 0;
  int grad_r = 32;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", flags.config_path, "JSON config file");
    sub->add_option("--out", flags.out_dir, "output directory")
        ->each([&](const std::string&) { flags.has_out = true; });
    sub->add_option("--seed", flags.seed, "seed override")
        ->each([&](const std::string&) { flags.has_seed = true; });
  };

  CLI::App* sim = app.add_subcommand("simulate", "integrate the closed loop, write CSV");
  add_common(sim);
  CLI::App* ver = app.add_subcommand("verify", "spectral stability check of a gain");
  add_common(ver);
  CLI::App* syn = app.add_subcommand("synthesize", "staged gain synthesis");
  add_common(syn);
  CLI::App* grd = app.add_subcommand("grad-check",
                                     "finite-difference check of the gradient");
  add_common(grd);
  grd->add_option("--count", count, "number of random systems")->default_val(20);
  grd->add_option("--r", grad_r, "integrator steps per delay")->default_val(32);
  CLI::App* ben = app.add_subcommand("benchmark", "random-system scenario sweep");
  add_common(ben);
  ben->add_option("--scenario", scenario_id, "scenario id (1 or 2)")->required();
  ben->add_option("--count", count, "systems in the sweep")->default_val(100);

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) return cmd_simulate(flags);
    if (ver->parsed()) return cmd_verify(flags);
    if (syn->parsed()) return cmd_synthesize(flags);
    if (grd->parsed()) return cmd_grad_check(flags, count, grad_r);
    if (ben->parsed()) return cmd_benchmark(flags, scenario_id, count);
  } catch (const ConfigError& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kExitFailure;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kExitFailure;
  }
  return kExitFailure;
}
