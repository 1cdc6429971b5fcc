#include "delayfb/train.hpp"

#include <algorithm>
#include <chrono>
#include <numeric>
#include <random>

#include "delayfb/adam.hpp"
#include "delayfb/sensitivity.hpp"

namespace delayfb {

void TrainConfig::check() const {
  if (!(T > 0.0)) throw std::invalid_argument("T must be positive");
  if (M < 1) throw std::invalid_argument("M must be >= 1");
  if (J < 1) throw std::invalid_argument("J must be >= 1");
  if (batch_size < 0 || resolved_batch_size() > J) {
    throw std::invalid_argument("batch_size must be in [1, J]");
  }
  if (epochs_per_stage < 1) throw std::invalid_argument("epochs_per_stage must be >= 1");
  if (r < 1) throw std::invalid_argument("r must be >= 1");
  if (!(lr > 0.0)) throw std::invalid_argument("lr must be positive");
  if (!(verify_margin > 0.0)) throw std::invalid_argument("verify_margin must be positive");
  if (initial_gain.mode == InitialGainChoice::Mode::random &&
      !(initial_gain.scale > 0.0)) {
    throw std::invalid_argument("random initial gain needs a positive scale");
  }
}

namespace {

constexpr int kPathNodes = 9;

Eigen::VectorXd unit_sphere_draw(int n, std::mt19937_64& engine) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd v(n);
  do {
    for (int i = 0; i < n; ++i) v[i] = normal(engine);
  } while (v.norm() < 1e-12);
  return v / v.norm();
}

InitialFunction sampled_path_draw(int n, double h, std::mt19937_64& engine) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd raw(n, kPathNodes);
  for (int c = 0; c < kPathNodes; ++c) {
    for (int i = 0; i < n; ++i) raw(i, c) = normal(engine);
  }
  // one cubic B-spline smoothing pass (weights 1/6, 2/3, 1/6, edges clamped)
  Eigen::MatrixXd smooth(n, kPathNodes);
  for (int c = 0; c < kPathNodes; ++c) {
    const int left = std::max(c - 1, 0);
    const int right = std::min(c + 1, kPathNodes - 1);
    smooth.col(c) =
        (raw.col(left) + 4.0 * raw.col(c) + raw.col(right)) / 6.0;
  }
  InitialFunction phi = InitialFunction::sampled(smooth, h);
  // sup of the pointwise Euclidean norm over a dense sample of [-h, 0]
  double sup = 0.0;
  const int probes = 20 * kPathNodes;
  for (int i = 0; i <= probes; ++i) {
    const double theta = -h + h * static_cast<double>(i) / probes;
    sup = std::max(sup, phi.eval(theta).norm());
  }
  if (sup < 1e-12) return sampled_path_draw(n, h, engine);
  return InitialFunction::sampled(smooth / sup, h);
}

}  // namespace

std::vector<InitialFunction> sample_initial_functions(int n, double h, int J,
                                                      std::uint64_t seed,
                                                      SamplerKind kind) {
  if (n < 1) throw std::invalid_argument("dimension must be >= 1");
  if (J < 0) throw std::invalid_argument("sample count must be >= 0");
  std::mt19937_64 engine(seed);
  std::vector<InitialFunction> phis;
  phis.reserve(static_cast<size_t>(J));
  for (int j = 0; j < J; ++j) {
    if (kind == SamplerKind::constant_sphere) {
      phis.push_back(InitialFunction::constant(unit_sphere_draw(n, engine), h));
    } else {
      phis.push_back(sampled_path_draw(n, h, engine));
    }
  }
  return phis;
}

Verifier make_default_verifier(double margin) {
  return [margin](const DelaySystem& sys, const Gain& gain) {
    return is_stable(sys, gain, margin);
  };
}

TrainReport synthesize(const DelaySystem& sys, const TrainConfig& cfg,
                       const Verifier& verifier) {
  require_valid(sys);
  cfg.check();
  const auto t_start = std::chrono::steady_clock::now();

  Gain gain{Eigen::MatrixXd::Zero(sys.m(), sys.p())};
  if (cfg.initial_gain.mode == InitialGainChoice::Mode::random) {
    std::mt19937_64 engine(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
    std::uniform_real_distribution<double> uniform(-cfg.initial_gain.scale,
                                                   cfg.initial_gain.scale);
    for (int i = 0; i < gain.K.rows(); ++i) {
      for (int j = 0; j < gain.K.cols(); ++j) gain.K(i, j) = uniform(engine);
    }
  }

  // histories are drawn once and reused across every stage
  const std::vector<InitialFunction> samples =
      sample_initial_functions(sys.n(), sys.h, cfg.J, cfg.seed, cfg.sampler);
  std::mt19937_64 shuffle_engine(cfg.seed ^ 0xd1b54a32d192ed03ULL);

  TrainReport report;
  report.stages.reserve(static_cast<size_t>(cfg.M));
  AdamState adam = AdamState::init(sys.m(), sys.p(), cfg.lr);
  const int batch = cfg.resolved_batch_size();
  std::vector<int> order(static_cast<size_t>(cfg.J));
  std::iota(order.begin(), order.end(), 0);
  std::vector<InitialFunction> minibatch;

  for (int stage = 1; stage <= cfg.M; ++stage) {
    const auto stage_start = std::chrono::steady_clock::now();
    const double horizon = static_cast<double>(stage) * cfg.T / cfg.M;

    for (int epoch = 0; epoch < cfg.epochs_per_stage; ++epoch) {
      std::shuffle(order.begin(), order.end(), shuffle_engine);
      for (size_t offset = 0; offset < order.size();
           offset += static_cast<size_t>(batch)) {
        const size_t end = std::min(order.size(), offset + batch);
        minibatch.clear();
        for (size_t i = offset; i < end; ++i) minibatch.push_back(samples[order[i]]);
        const GradientResult batch_grad =
            batch_loss_and_gradient(sys, gain, minibatch, horizon, cfg.r);
        std::tie(adam, gain) = adam_step(adam, gain, batch_grad.grad);
      }
    }

    StageRecord record;
    record.stage = stage;
    record.horizon = horizon;
    record.final_loss =
        batch_loss_and_gradient(sys, gain, samples, horizon, cfg.r).loss;
    record.gain = gain.K;
    const StabilityCheck check = verifier(sys, gain);
    record.abscissa = check.report.abscissa;
    record.verified = check.stable;
    record.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                      stage_start)
            .count();
    report.stages.push_back(std::move(record));

    if (check.stable) {
      report.success = true;
      report.terminated_at_stage = stage;
      break;
    }
  }

  if (!report.success) report.terminated_at_stage = cfg.M;
  report.final_gain = gain;
  report.total_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
          .count();
  return report;
}

TrainReport synthesize(const DelaySystem& sys, const TrainConfig& cfg) {
  return synthesize(sys, cfg, make_default_verifier(cfg.verify_margin));
}

}  // namespace delayfb
