#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "delayfb/spectral.hpp"
#include "delayfb/system.hpp"

namespace delayfb {

enum class SamplerKind { constant_sphere, sampled_path };

struct InitialGainChoice {
  enum class Mode { zero, random } mode = Mode::zero;
  double scale = 0.0;  // entries uniform in [-scale, scale] for random
};

struct TrainConfig {
  double T = 20.0;           // total horizon
  int M = 20;                // curriculum stages
  int J = 10;                // sampled initial histories
  int batch_size = 0;        // 0 means full batch (J)
  int epochs_per_stage = 50;
  int r = 32;                // integrator steps per delay
  std::uint64_t seed = 0;
  double lr = 0.1;
  InitialGainChoice initial_gain;
  SamplerKind sampler = SamplerKind::constant_sphere;
  double verify_margin = 1e-3;

  int resolved_batch_size() const { return batch_size > 0 ? batch_size : J; }
  void check() const;  // throws std::invalid_argument on a bad combination
};

struct StageRecord {
  int stage = 0;          // 1-based
  double horizon = 0.0;   // stage * T / M
  double final_loss = 0.0;
  Eigen::MatrixXd gain;   // snapshot after the stage's epochs
  double abscissa = 0.0;
  bool verified = false;
  double seconds = 0.0;
};

struct TrainReport {
  std::vector<StageRecord> stages;
  Gain final_gain;
  int terminated_at_stage = 0;  // stage that verified, or M if none did
  bool success = false;
  double total_seconds = 0.0;
};

// Deterministic draw of J initial histories. constant_sphere gives constant
// functions uniform on the unit sphere; sampled_path gives sampled-grid
// functions from smoothed standard-normal node values, scaled to sup-norm 1.
std::vector<InitialFunction> sample_initial_functions(int n, double h, int J,
                                                      std::uint64_t seed,
                                                      SamplerKind kind);

using Verifier = std::function<StabilityCheck(const DelaySystem&, const Gain&)>;

Verifier make_default_verifier(double margin);

// Staged gain synthesis: Adam descent on the mean terminal cost over the
// sampled histories at horizon k*T/M for k = 1..M, stopping at the first
// stage whose gain the verifier certifies. Never throws on non-convergence;
// success = false reports the final gain after all M stages.
TrainReport synthesize(const DelaySystem& sys, const TrainConfig& cfg,
                       const Verifier& verifier);
TrainReport synthesize(const DelaySystem& sys, const TrainConfig& cfg);

}  // namespace delayfb
