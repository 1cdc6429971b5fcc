#include "delayfb/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ostream>
#include <random>

namespace delayfb {

DelaySystem random_system(int n, int m, int p, double h, std::uint64_t seed) {
  if (n < 1 || m < 1 || p < 1) throw std::invalid_argument("dims must be >= 1");
  std::mt19937_64 engine(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  auto fill = [&](int rows, int cols) {
    Eigen::MatrixXd mat(rows, cols);
    for (int i = 0; i < rows; ++i) {
      for (int j = 0; j < cols; ++j) mat(i, j) = normal(engine);
    }
    return mat;
  };
  DelaySystem sys;
  sys.A = fill(n, n);
  sys.B = fill(n, m);
  sys.C = fill(p, n);
  sys.h = h;
  return sys;
}

ScenarioResult run_scenario_on(
    const std::vector<std::pair<std::uint64_t, DelaySystem>>& systems,
    const TrainConfig& cfg) {
  ScenarioResult result;
  result.records.reserve(systems.size());

  for (const auto& [seed, sys] : systems) {
    const auto start = std::chrono::steady_clock::now();
    BenchmarkRecord record;
    record.seed = seed;

    const Gain zero{Eigen::MatrixXd::Zero(sys.m(), sys.p())};
    record.openloop_abscissa =
        is_stable(sys, zero, cfg.verify_margin).report.abscissa;

    const TrainReport report = synthesize(sys, cfg);
    record.stages = report.terminated_at_stage;
    record.final_gain = report.final_gain.K;

    // independent re-check of the synthesized gain
    const StabilityCheck recheck =
        is_stable(sys, report.final_gain, cfg.verify_margin);
    record.success = report.success && recheck.stable;
    record.final_abscissa = recheck.report.abscissa;
    record.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    result.records.push_back(std::move(record));
  }

  ScenarioSummary& summary = result.summary;
  summary.count = static_cast<int>(result.records.size());
  std::vector<double> seconds;
  double stage_sum = 0.0;
  for (const auto& record : result.records) {
    if (record.success) {
      ++summary.successes;
      stage_sum += record.stages;
    }
    summary.mean_seconds += record.seconds;
    seconds.push_back(record.seconds);
  }
  if (summary.count > 0) {
    summary.frequency =
        static_cast<double>(summary.successes) / summary.count;
    summary.mean_seconds /= summary.count;
    std::sort(seconds.begin(), seconds.end());
    const size_t mid = seconds.size() / 2;
    summary.median_seconds = (seconds.size() % 2 == 1)
                                 ? seconds[mid]
                                 : 0.5 * (seconds[mid - 1] + seconds[mid]);
  }
  if (summary.successes > 0) {
    summary.mean_stages_success = stage_sum / summary.successes;
  }
  return result;
}

ScenarioResult run_scenario(const Scenario& sc, const TrainConfig& cfg,
                            std::uint64_t base_seed) {
  if (sc.count < 1) throw std::invalid_argument("scenario count must be >= 1");
  if (!(sc.h > 0.0)) throw std::invalid_argument("scenario delay must be positive");
  std::vector<std::pair<std::uint64_t, DelaySystem>> systems;
  systems.reserve(static_cast<size_t>(sc.count));
  for (int i = 0; i < sc.count; ++i) {
    const std::uint64_t seed = base_seed + static_cast<std::uint64_t>(i);
    systems.emplace_back(seed, random_system(sc.n, sc.m, sc.p, sc.h, seed));
  }
  return run_scenario_on(systems, cfg);
}

void write_benchmark_csv(const std::vector<BenchmarkRecord>& records,
                         std::ostream& out) {
  out << "seed,openloop_abscissa,success,stages,seconds,final_abscissa\n";
  char buf[32];
  for (const auto& record : records) {
    out << record.seed << ',';
    std::snprintf(buf, sizeof(buf), "%.17g", record.openloop_abscissa);
    out << buf << ',' << (record.success ? 1 : 0) << ',' << record.stages << ',';
    std::snprintf(buf, sizeof(buf), "%.6f", record.seconds);
    out << buf << ',';
    std::snprintf(buf, sizeof(buf), "%.17g", record.final_abscissa);
    out << buf << '\n';
  }
}

}  // namespace delayfb
