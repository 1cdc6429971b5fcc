#pragma once

#include <nlohmann/json.hpp>

#include "delayfb/bench.hpp"
#include "delayfb/spectral.hpp"
#include "delayfb/system.hpp"
#include "delayfb/train.hpp"

namespace delayfb {

// Errors in user-supplied JSON (configs, system/gain files); messages carry
// the offending key or path.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

nlohmann::json matrix_to_json(const Eigen::MatrixXd& mat);
Eigen::MatrixXd matrix_from_json(const nlohmann::json& j, const std::string& what);

// Shared matrix document: {"A": [[..]], "B": [[..]], "C": [[..]], "h": ..}
// and {"K": [[..]]}, row-major nested arrays.
nlohmann::json system_to_json(const DelaySystem& sys);
DelaySystem system_from_json(const nlohmann::json& j);
nlohmann::json gain_to_json(const Gain& gain);
Gain gain_from_json(const nlohmann::json& j);

nlohmann::json spectral_report_to_json(const SpectralReport& report);

// Wall-clock fields go to a separate timing log when include_timing is
// false, so rerunning a seeded command reproduces the JSON byte for byte.
nlohmann::json train_report_to_json(const TrainReport& report,
                                    bool include_timing);
nlohmann::json benchmark_to_json(const ScenarioResult& result,
                                 bool include_timing);

}  // namespace delayfb
