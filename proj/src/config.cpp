#include "delayfb/config.hpp"

#include <fstream>
#include <sstream>

namespace delayfb {

using nlohmann::json;

namespace {

void reject_unknown_keys(const json& obj, std::initializer_list<const char*> allowed,
                         const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    bool known = false;
    for (const char* name : allowed) {
      if (key == name) {
        known = true;
        break;
      }
    }
    if (!known) {
      throw ConfigError("unknown key \"" + key + "\" in " + where);
    }
  }
}

double number_at(const json& obj, const char* key, const std::string& where) {
  if (!obj[key].is_number()) {
    throw ConfigError("key \"" + std::string(key) + "\" in " + where +
                      " must be a number");
  }
  return obj[key].get<double>();
}

int int_at(const json& obj, const char* key, const std::string& where) {
  if (!obj[key].is_number_integer()) {
    throw ConfigError("key \"" + std::string(key) + "\" in " + where +
                      " must be an integer");
  }
  return obj[key].get<int>();
}

Eigen::VectorXd vector_at(const json& j, const std::string& what) {
  if (!j.is_array() || j.empty()) {
    throw ConfigError(what + " must be a non-empty array of numbers");
  }
  Eigen::VectorXd v(j.size());
  for (size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw ConfigError(what + " entries must be numbers");
    v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  }
  return v;
}

PhiSpec parse_phi(const json& obj) {
  if (!obj.is_object() || !obj.contains("kind") || !obj["kind"].is_string()) {
    throw ConfigError("\"phi\" must be an object with a \"kind\" string");
  }
  const std::string kind = obj["kind"].get<std::string>();
  PhiSpec spec;
  if (kind == "constant") {
    reject_unknown_keys(obj, {"kind", "value"}, "phi");
    if (!obj.contains("value")) throw ConfigError("constant phi needs \"value\"");
    spec.kind = PhiSpec::Kind::constant;
    spec.value = vector_at(obj["value"], "phi value");
  } else if (kind == "linear") {
    reject_unknown_keys(obj, {"kind", "value", "slope"}, "phi");
    if (!obj.contains("value") || !obj.contains("slope")) {
      throw ConfigError("linear phi needs \"value\" and \"slope\"");
    }
    spec.kind = PhiSpec::Kind::linear;
    spec.value = vector_at(obj["value"], "phi value");
    spec.slope = vector_at(obj["slope"], "phi slope");
  } else if (kind == "sampled") {
    reject_unknown_keys(obj, {"kind", "nodes"}, "phi");
    if (!obj.contains("nodes")) throw ConfigError("sampled phi needs \"nodes\"");
    // rows are grid points from theta = -h to 0; transpose to n x count
    spec.kind = PhiSpec::Kind::sampled;
    spec.nodes = matrix_from_json(obj["nodes"], "phi nodes").transpose();
  } else {
    throw ConfigError("unknown phi kind \"" + kind + "\"");
  }
  return spec;
}

TrainConfig parse_train(const json& obj) {
  reject_unknown_keys(obj,
                      {"T", "M", "J", "batch_size", "epochs_per_stage", "r",
                       "seed", "lr", "initial_gain", "sampler", "verify_margin"},
                      "train");
  TrainConfig cfg;
  if (obj.contains("T")) cfg.T = number_at(obj, "T", "train");
  if (obj.contains("M")) cfg.M = int_at(obj, "M", "train");
  if (obj.contains("J")) cfg.J = int_at(obj, "J", "train");
  if (obj.contains("batch_size")) cfg.batch_size = int_at(obj, "batch_size", "train");
  if (obj.contains("epochs_per_stage")) {
    cfg.epochs_per_stage = int_at(obj, "epochs_per_stage", "train");
  }
  if (obj.contains("r")) cfg.r = int_at(obj, "r", "train");
  if (obj.contains("seed")) {
    if (!obj["seed"].is_number_unsigned() && !obj["seed"].is_number_integer()) {
      throw ConfigError("key \"seed\" in train must be an unsigned integer");
    }
    cfg.seed = obj["seed"].get<std::uint64_t>();
  }
  if (obj.contains("lr")) cfg.lr = number_at(obj, "lr", "train");
  if (obj.contains("initial_gain")) {
    const json& ig = obj["initial_gain"];
    if (ig.is_string() && ig.get<std::string>() == "zero") {
      cfg.initial_gain.mode = InitialGainChoice::Mode::zero;
    } else if (ig.is_object() && ig.contains("random") && ig.size() == 1 &&
               ig["random"].is_number()) {
      cfg.initial_gain.mode = InitialGainChoice::Mode::random;
      cfg.initial_gain.scale = ig["random"].get<double>();
    } else {
      throw ConfigError("\"initial_gain\" must be \"zero\" or {\"random\": scale}");
    }
  }
  if (obj.contains("sampler")) {
    const std::string kind = obj["sampler"].is_string()
                                 ? obj["sampler"].get<std::string>()
                                 : std::string();
    if (kind == "constant-sphere") {
      cfg.sampler = SamplerKind::constant_sphere;
    } else if (kind == "sampled-path") {
      cfg.sampler = SamplerKind::sampled_path;
    } else {
      throw ConfigError("\"sampler\" must be \"constant-sphere\" or \"sampled-path\"");
    }
  }
  if (obj.contains("verify_margin")) {
    cfg.verify_margin = number_at(obj, "verify_margin", "train");
  }
  cfg.check();
  return cfg;
}

RunConfig parse_config_impl(const std::string& text, bool require_system) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& err) {
    throw ConfigError(std::string("parse-error: ") + err.what());
  }
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  reject_unknown_keys(doc,
                      {"system", "system_path", "gain", "gain_path", "train",
                       "simulate", "out_dir", "verbosity"},
                      "config");

  RunConfig cfg;
  const bool has_inline = doc.contains("system");
  const bool has_path = doc.contains("system_path");
  if (require_system && !has_inline && !has_path) {
    throw ConfigError(
        "missing-required: config needs \"system\" or \"system_path\"");
  }
  if (has_inline && has_path) {
    throw ConfigError("config must have exactly one of \"system\" / \"system_path\"");
  }
  if (has_inline) cfg.system = system_from_json(doc["system"]);
  if (has_path) {
    if (!doc["system_path"].is_string()) {
      throw ConfigError("\"system_path\" must be a string");
    }
    cfg.system_path = doc["system_path"].get<std::string>();
  }

  if (doc.contains("gain") && doc.contains("gain_path")) {
    throw ConfigError("config may have at most one of \"gain\" / \"gain_path\"");
  }
  if (doc.contains("gain")) cfg.gain = gain_from_json(doc["gain"]);
  if (doc.contains("gain_path")) {
    if (!doc["gain_path"].is_string()) {
      throw ConfigError("\"gain_path\" must be a string");
    }
    cfg.gain_path = doc["gain_path"].get<std::string>();
  }

  if (doc.contains("train")) {
    if (!doc["train"].is_object()) throw ConfigError("\"train\" must be an object");
    cfg.train = parse_train(doc["train"]);
  }
  if (doc.contains("simulate")) {
    const json& sim = doc["simulate"];
    if (!sim.is_object()) throw ConfigError("\"simulate\" must be an object");
    reject_unknown_keys(sim, {"T", "r", "phi"}, "simulate");
    if (sim.contains("T")) cfg.sim.T = number_at(sim, "T", "simulate");
    if (sim.contains("r")) cfg.sim.r = int_at(sim, "r", "simulate");
    if (sim.contains("phi")) cfg.sim.phi = parse_phi(sim["phi"]);
    if (!(cfg.sim.T > 0.0)) throw ConfigError("simulate horizon T must be positive");
    if (cfg.sim.r < 1) throw ConfigError("simulate r must be >= 1");
  }
  if (doc.contains("out_dir")) {
    if (!doc["out_dir"].is_string()) throw ConfigError("\"out_dir\" must be a string");
    cfg.out_dir = doc["out_dir"].get<std::string>();
  }
  if (doc.contains("verbosity")) cfg.verbosity = int_at(doc, "verbosity", "config");
  return cfg;
}

}  // namespace

InitialFunction PhiSpec::build(int n, double h) const {
  switch (kind) {
    case Kind::default_ones:
      return InitialFunction::constant(Eigen::VectorXd::Ones(n), h);
    case Kind::constant:
      if (value.size() != n) {
        throw ConfigError("phi value has dimension " +
                          std::to_string(value.size()) + ", system has " +
                          std::to_string(n));
      }
      return InitialFunction::constant(value, h);
    case Kind::linear:
      if (value.size() != n || slope.size() != n) {
        throw ConfigError("linear phi dimensions do not match the system");
      }
      return InitialFunction::linear(value, slope, h);
    case Kind::sampled:
      if (nodes.rows() != n) {
        throw ConfigError("sampled phi rows must match the system dimension");
      }
      return InitialFunction::sampled(nodes, h);
  }
  throw ConfigError("unreachable phi kind");
}

RunConfig parse_config(const std::string& text) {
  return parse_config_impl(text, /*require_system=*/true);
}

RunConfig parse_config_without_system(const std::string& text) {
  return parse_config_impl(text, /*require_system=*/false);
}

namespace {

json parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open \"" + path + "\"");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  try {
    return json::parse(buffer.str());
  } catch (const json::parse_error& err) {
    throw ConfigError("parse-error in \"" + path + "\": " + err.what());
  }
}

}  // namespace

DelaySystem load_system(const RunConfig& cfg) {
  if (cfg.system) return *cfg.system;
  if (cfg.system_path.empty()) {
    throw ConfigError("missing-required: config needs \"system\" or \"system_path\"");
  }
  return system_from_json(parse_file(cfg.system_path));
}

Gain load_gain(const RunConfig& cfg, const DelaySystem& sys) {
  Gain gain;
  if (cfg.gain) {
    gain = *cfg.gain;
  } else if (!cfg.gain_path.empty()) {
    gain = gain_from_json(parse_file(cfg.gain_path));
  } else {
    gain.K = Eigen::MatrixXd::Zero(sys.m(), sys.p());
    return gain;
  }
  if (gain.K.rows() != sys.m() || gain.K.cols() != sys.p()) {
    throw ConfigError("gain is " + std::to_string(gain.K.rows()) + "x" +
                      std::to_string(gain.K.cols()) + ", system needs " +
                      std::to_string(sys.m()) + "x" + std::to_string(sys.p()));
  }
  return gain;
}

}  // namespace delayfb
