#include "delayfb/json_io.hpp"

namespace delayfb {

using nlohmann::json;

json matrix_to_json(const Eigen::MatrixXd& mat) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < mat.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < mat.cols(); ++j) row.push_back(mat(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const json& j, const std::string& what) {
  if (!j.is_array() || j.empty()) {
    throw ConfigError(what + " must be a non-empty array of rows");
  }
  const size_t rows = j.size();
  if (!j[0].is_array() || j[0].empty()) {
    throw ConfigError(what + " rows must be non-empty arrays");
  }
  const size_t cols = j[0].size();
  Eigen::MatrixXd mat(rows, cols);
  for (size_t i = 0; i < rows; ++i) {
    if (!j[i].is_array() || j[i].size() != cols) {
      throw ConfigError(what + " rows must all have length " +
                        std::to_string(cols));
    }
    for (size_t c = 0; c < cols; ++c) {
      if (!j[i][c].is_number()) {
        throw ConfigError(what + " entries must be numbers");
      }
      mat(i, c) = j[i][c].get<double>();
    }
  }
  return mat;
}

json system_to_json(const DelaySystem& sys) {
  return json{{"A", matrix_to_json(sys.A)},
              {"B", matrix_to_json(sys.B)},
              {"C", matrix_to_json(sys.C)},
              {"h", sys.h}};
}

DelaySystem system_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("system must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (key != "A" && key != "B" && key != "C" && key != "h") {
      throw ConfigError("unknown key \"" + key + "\" in system");
    }
  }
  for (const char* key : {"A", "B", "C", "h"}) {
    if (!j.contains(key)) {
      throw ConfigError(std::string("system is missing key \"") + key + "\"");
    }
  }
  if (!j["h"].is_number()) throw ConfigError("system key \"h\" must be a number");
  DelaySystem sys;
  sys.A = matrix_from_json(j["A"], "system matrix A");
  sys.B = matrix_from_json(j["B"], "system matrix B");
  sys.C = matrix_from_json(j["C"], "system matrix C");
  sys.h = j["h"].get<double>();
  const ValidateCode code = validate(sys);
  if (code != ValidateCode::ok) {
    throw ConfigError(std::string("invalid system: ") + to_string(code));
  }
  return sys;
}

json gain_to_json(const Gain& gain) { return json{{"K", matrix_to_json(gain.K)}}; }

Gain gain_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("gain must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (key != "K") throw ConfigError("unknown key \"" + key + "\" in gain");
  }
  if (!j.contains("K")) throw ConfigError("gain is missing key \"K\"");
  Gain gain;
  gain.K = matrix_from_json(j["K"], "gain matrix K");
  if (!gain.K.allFinite()) throw ConfigError("gain entries must be finite");
  return gain;
}

json spectral_report_to_json(const SpectralReport& report) {
  json roots = json::array();
  for (const auto& root : report.rightmost_roots) {
    roots.push_back(json::array({root.real(), root.imag()}));
  }
  return json{{"order", report.order},
              {"roots", std::move(roots)},
              {"abscissa", report.abscissa},
              {"converged", report.converged},
              {"stable", report.stable}};
}

json train_report_to_json(const TrainReport& report, bool include_timing) {
  json stages = json::array();
  for (const auto& stage : report.stages) {
    json record{{"stage", stage.stage},
                {"horizon", stage.horizon},
                {"final_loss", stage.final_loss},
                {"gain", matrix_to_json(stage.gain)},
                {"abscissa", stage.abscissa},
                {"verified", stage.verified}};
    if (include_timing) record["seconds"] = stage.seconds;
    stages.push_back(std::move(record));
  }
  json out{{"success", report.success},
           {"terminated_at_stage", report.terminated_at_stage},
           {"final_gain", matrix_to_json(report.final_gain.K)},
           {"stages", std::move(stages)}};
  if (include_timing) out["total_seconds"] = report.total_seconds;
  return out;
}

json benchmark_to_json(const ScenarioResult& result, bool include_timing) {
  json records = json::array();
  for (const auto& record : result.records) {
    json row{{"seed", record.seed},
             {"openloop_abscissa", record.openloop_abscissa},
             {"success", record.success},
             {"stages", record.stages},
             {"final_gain", matrix_to_json(record.final_gain)},
             {"final_abscissa", record.final_abscissa}};
    if (include_timing) row["seconds"] = record.seconds;
    records.push_back(std::move(row));
  }
  json summary{{"count", result.summary.count},
               {"successes", result.summary.successes},
               {"frequency", result.summary.frequency},
               {"mean_stages_success", result.summary.mean_stages_success}};
  if (include_timing) {
    summary["mean_seconds"] = result.summary.mean_seconds;
    summary["median_seconds"] = result.summary.median_seconds;
  }
  return json{{"records", std::move(records)}, {"summary", std::move(summary)}};
}

}  // namespace delayfb
