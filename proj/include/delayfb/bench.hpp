#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "delayfb/train.hpp"

namespace delayfb {

struct Scenario {
  int n = 4;
  int m = 1;
  int p = 2;
  double h = 0.1;
  int count = 100;
};

struct BenchmarkRecord {
  std::uint64_t seed = 0;
  double openloop_abscissa = 0.0;
  bool success = false;
  int stages = 0;
  double seconds = 0.0;
  Eigen::MatrixXd final_gain;
  double final_abscissa = 0.0;
};

struct ScenarioSummary {
  int count = 0;
  int successes = 0;
  double frequency = 0.0;
  double mean_seconds = 0.0;
  double median_seconds = 0.0;
  double mean_stages_success = 0.0;  // 0 when there are no successes
};

struct ScenarioResult {
  std::vector<BenchmarkRecord> records;
  ScenarioSummary summary;
};

// A, B, C entries i.i.d. standard normal from a generator seeded with `seed`
// (fill order: A row-major, then B, then C).
DelaySystem random_system(int n, int m, int p, double h, std::uint64_t seed);

// Synthesis sweep over explicitly provided (seed, system) pairs; the seam the
// scenario runner is built on, also usable with hand-picked systems. Success
// requires the synthesized gain to re-pass an independent stability check.
ScenarioResult run_scenario_on(
    const std::vector<std::pair<std::uint64_t, DelaySystem>>& systems,
    const TrainConfig& cfg);

// Generates sc.count systems with seeds base_seed + i and sweeps them.
ScenarioResult run_scenario(const Scenario& sc, const TrainConfig& cfg,
                            std::uint64_t base_seed);

// `seed,openloop_abscissa,success,stages,seconds,final_abscissa`
void write_benchmark_csv(const std::vector<BenchmarkRecord>& records,
                         std::ostream& out);

}  // namespace delayfb
