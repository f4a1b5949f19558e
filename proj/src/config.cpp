#include "smartjam/config.hpp"

#include "smartjam/error.hpp"

#include <cmath>
#include <fstream>
#include <limits>

namespace smartjam {

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& msg) {
  throw Error(ErrorKind::Config, (where.empty() ? "/" : where) + ": " + msg);
}

const Json& require(const Json& j, const std::string& key, const std::string& where) {
  if (!j.is_object()) fail(where, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) fail(where + "/" + key, "missing required key");
  return *it;
}

int get_int(const Json& j, const std::string& where, int min_value) {
  if (!j.is_number_integer()) fail(where, "expected an integer");
  const auto v = j.get<long long>();
  if (v < min_value) fail(where, "must be >= " + std::to_string(min_value));
  return static_cast<int>(v);
}

double get_number(const Json& j, const std::string& where) {
  if (!j.is_number()) fail(where, "expected a number");
  return j.get<double>();
}

std::string get_string(const Json& j, const std::string& where) {
  if (!j.is_string()) fail(where, "expected a string");
  return j.get<std::string>();
}

template <typename F>
auto optional_field(const Json& j, const std::string& key, const std::string& where, F&& parse)
    -> std::optional<decltype(parse(j, where))> {
  if (!j.is_object()) return std::nullopt;
  auto it = j.find(key);
  if (it == j.end()) return std::nullopt;
  return parse(*it, where + "/" + key);
}

}  // namespace

Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Config, "cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorKind::Config, "'" + path + "': " + e.what());
  }
}

double parse_db(const Json& j, const std::string& where) {
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
    fail(where, "expected a number or \"-inf\" / \"inf\"");
  }
  return get_number(j, where);
}

SystemConfig parse_system_config(const Json& j, const std::string& where) {
  SystemConfig cfg;
  cfg.B = get_int(require(j, "b", where), where + "/b", 1);
  cfg.U = get_int(require(j, "u", where), where + "/u", 1);
  cfg.K = get_int(require(j, "k", where), where + "/k", 2);
  cfg.T = get_int(require(j, "t", where), where + "/t", 1);
  cfg.D = get_int(require(j, "d", where), where + "/d", 1);
  try {
    cfg.constellation = constellation_from_string(get_string(require(j, "constellation", where), where + "/constellation"));
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Config) throw;
    fail(where + "/constellation", e.what());
  }
  if (auto snr = optional_field(j, "snr_db", where, parse_db)) cfg.snr_db = *snr;
  if (auto seed = optional_field(j, "seed", where, [](const Json& v, const std::string& w) {
        if (!v.is_number_unsigned() && !v.is_number_integer()) fail(w, "expected an integer seed");
        return v.get<std::uint64_t>();
      }))
    cfg.seed = *seed;
  if (auto pilots = optional_field(j, "pilots", where, get_string)) {
    if (*pilots == "HADAMARD") cfg.pilots = PilotMode::Hadamard;
    else if (*pilots == "HAAR") cfg.pilots = PilotMode::Haar;
    else fail(where + "/pilots", "expected \"HADAMARD\" or \"HAAR\"");
  }
  if (cfg.K != cfg.T + cfg.D) fail(where + "/k", "must equal t + d");
  if (cfg.T < cfg.U) fail(where + "/t", "must be >= u");
  if (cfg.B <= cfg.U) fail(where + "/b", "must exceed u");
  if (cfg.pilots == PilotMode::Hadamard && (cfg.T & (cfg.T - 1)) != 0) {
    fail(where + "/t", "Hadamard pilots need t to be a power of two");
  }
  return cfg;
}

Json to_json(const SystemConfig& cfg) {
  Json j;
  j["b"] = cfg.B;
  j["u"] = cfg.U;
  j["k"] = cfg.K;
  j["t"] = cfg.T;
  j["d"] = cfg.D;
  j["constellation"] = to_string(cfg.constellation);
  if (std::isinf(cfg.snr_db)) j["snr_db"] = cfg.snr_db > 0 ? "inf" : "-inf";
  else j["snr_db"] = cfg.snr_db;
  j["seed"] = cfg.seed;
  j["pilots"] = cfg.pilots == PilotMode::Hadamard ? "HADAMARD" : "HAAR";
  return j;
}

JammerProfile parse_jammer_profile(const Json& j, const std::string& where) {
  JammerProfile p;
  auto wrap = [&](const std::string& key, auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::Config) throw;
      fail(where + "/" + key, e.what());
    }
  };
  wrap("kind", [&] { p.kind = jammer_kind_from_string(get_string(require(j, "kind", where), where + "/kind")); });
  if (auto law = optional_field(j, "symbol_law", where, get_string)) {
    wrap("symbol_law", [&] { p.law = symbol_law_from_string(*law); });
  }
  if (j.contains("power")) {
    const Json& pw = j["power"];
    const std::string pw_where = where + "/power";
    if (auto mode = optional_field(pw, "mode", pw_where, get_string)) {
      if (*mode == "RHO_E") p.power.mode = PowerMode::RhoE;
      else if (*mode == "RHO_P") p.power.mode = PowerMode::RhoP;
      else fail(pw_where + "/mode", "expected \"RHO_E\" or \"RHO_P\"");
    }
    p.power.value_db = parse_db(require(pw, "value_db", pw_where), pw_where + "/value_db");
  } else if (p.kind != JammerKind::None) {
    fail(where + "/power", "missing required key");
  }
  if (auto a = optional_field(j, "sparse_alpha", where, get_number)) {
    if (!(*a > 0.0 && *a <= 1.0)) fail(where + "/sparse_alpha", "must lie in (0, 1]");
    if (p.kind != JammerKind::Sparse) fail(where + "/sparse_alpha", "only valid for kind SPARSE");
    p.sparse_alpha = *a;
  }
  if (auto u = optional_field(j, "ue_index", where, [](const Json& v, const std::string& w) { return get_int(v, w, 0); })) {
    p.ue_index = *u;
  }
  p.active_in_estimation = p.kind == JammerKind::Barrage;
  if (auto act = optional_field(j, "active_in_estimation", where, [](const Json& v, const std::string& w) {
        if (!v.is_boolean()) fail(w, "expected a boolean");
        return v.get<bool>();
      }))
    p.active_in_estimation = *act;
  return p;
}

Json to_json(const JammerProfile& p) {
  Json j;
  j["kind"] = to_string(p.kind);
  j["symbol_law"] = to_string(p.law);
  j["power"]["mode"] = p.power.mode == PowerMode::RhoE ? "RHO_E" : "RHO_P";
  if (std::isinf(p.power.value_db)) j["power"]["value_db"] = p.power.value_db > 0 ? "inf" : "-inf";
  else j["power"]["value_db"] = p.power.value_db;
  if (p.kind == JammerKind::Sparse) j["sparse_alpha"] = p.sparse_alpha;
  if (p.kind == JammerKind::Impersonate) j["ue_index"] = p.ue_index;
  j["active_in_estimation"] = p.active_in_estimation;
  return j;
}

MaedConfig parse_maed_config(const Json& j, const std::string& where) {
  MaedConfig m;
  if (auto t = optional_field(j, "t_max", where, [](const Json& v, const std::string& w) { return get_int(v, w, 1); })) m.t_max = *t;
  if (auto tau = optional_field(j, "tau0", where, get_number)) {
    if (!(*tau > 0.0)) fail(where + "/tau0", "must be > 0");
    m.tau0 = *tau;
  }
  if (auto g = optional_field(j, "gamma_reg_scale", where, get_number)) m.gamma_reg_scale = *g;
  return m;
}

TrainingSetSpec parse_training_set_spec(const Json& j, const std::string& where) {
  TrainingSetSpec s;
  if (auto n = optional_field(j, "samples", where, [](const Json& v, const std::string& w) { return get_int(v, w, 1); })) s.samples = *n;
  auto number_list = [](const Json& v, const std::string& w) {
    if (!v.is_array() || v.empty()) fail(w, "expected a nonempty array");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(parse_db(v[i], w + "/" + std::to_string(i)));
    return out;
  };
  if (auto g = optional_field(j, "snr_db", where, number_list)) s.snr_db = *g;
  if (auto g = optional_field(j, "jammer_power_db", where, number_list)) s.jammer_power_db = *g;
  if (auto mode = optional_field(j, "power_mode", where, get_string)) {
    if (*mode == "RHO_E") s.power_mode = PowerMode::RhoE;
    else if (*mode == "RHO_P") s.power_mode = PowerMode::RhoP;
    else fail(where + "/power_mode", "expected \"RHO_E\" or \"RHO_P\"");
  }
  return s;
}

TrainOptions parse_train_options(const Json& j, const std::string& where) {
  TrainOptions o;
  auto positive = [](const Json& v, const std::string& w) {
    const double x = get_number(v, w);
    if (!(x >= 0.0)) fail(w, "must be >= 0");
    return x;
  };
  auto count = [](const Json& v, const std::string& w) { return get_int(v, w, 1); };
  if (auto v = optional_field(j, "epochs", where, count)) o.epochs = *v;
  if (auto v = optional_field(j, "learning_rate", where, positive)) o.learning_rate = *v;
  if (auto v = optional_field(j, "perturbation", where, positive)) o.perturbation = *v;
  if (auto v = optional_field(j, "patience", where, count)) o.patience = *v;
  if (auto v = optional_field(j, "estimator", where, get_string)) {
    if (*v == "SPSA") o.estimator = GradientEstimator::Spsa;
    else if (*v == "CENTRAL_DIFFERENCES") o.estimator = GradientEstimator::CentralDifferences;
    else fail(where + "/estimator", "expected \"SPSA\" or \"CENTRAL_DIFFERENCES\"");
  }
  if (j.is_object() && j.contains("batch_schedule")) {
    const Json& b = j["batch_schedule"];
    if (!b.is_array() || b.empty()) fail(where + "/batch_schedule", "expected a nonempty array");
    o.batch_schedule.clear();
    for (std::size_t i = 0; i < b.size(); ++i) o.batch_schedule.push_back(count(b[i], where + "/batch_schedule/" + std::to_string(i)));
  }
  return o;
}

void save_parameter_file(const std::string& path, const ParameterFile& file) {
  file.params.validate();
  nlohmann::ordered_json j;
  j["format"] = "smartjam-params";
  j["version"] = 1;
  j["constellation"] = to_string(file.constellation);
  j["b"] = file.B;
  j["u"] = file.U;
  j["k"] = file.K;
  j["iterations"] = nlohmann::ordered_json::array();
  for (int t = 0; t < file.params.t_max(); ++t) {
    const auto i = static_cast<std::size_t>(t);
    nlohmann::ordered_json r;
    r["tau"] = file.params.tau[i];
    r["gamma"] = file.params.gamma[i];
    r["alpha"] = file.params.alpha[i];
    r["rho"] = file.params.rho[i];
    j["iterations"].push_back(r);
  }
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw Error(ErrorKind::Runtime, "cannot write parameter file '" + path + "'");
  os << j.dump(2) << "\n";
}

ParameterFile load_parameter_file(const std::string& path) {
  const Json j = load_json_file(path);
  const std::string where;
  if (get_string(require(j, "format", where), "/format") != "smartjam-params") fail("/format", "not a smartjam parameter file");
  if (get_int(require(j, "version", where), "/version", 1) != 1) fail("/version", "unsupported version");
  ParameterFile f;
  try {
    f.constellation = constellation_from_string(get_string(require(j, "constellation", where), "/constellation"));
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Config) throw;
    fail("/constellation", e.what());
  }
  f.B = get_int(require(j, "b", where), "/b", 1);
  f.U = get_int(require(j, "u", where), "/u", 1);
  f.K = get_int(require(j, "k", where), "/k", 1);
  const Json& it = require(j, "iterations", where);
  if (!it.is_array() || it.empty()) fail("/iterations", "expected a nonempty array");
  for (std::size_t t = 0; t < it.size(); ++t) {
    const std::string w = "/iterations/" + std::to_string(t);
    f.params.tau.push_back(get_number(require(it[t], "tau", w), w + "/tau"));
    f.params.gamma.push_back(get_number(require(it[t], "gamma", w), w + "/gamma"));
    f.params.alpha.push_back(get_number(require(it[t], "alpha", w), w + "/alpha"));
    f.params.rho.push_back(get_number(require(it[t], "rho", w), w + "/rho"));
  }
  try {
    f.params.validate();
  } catch (const Error& e) {
    fail("/iterations", e.what());
  }
  return f;
}

}  // namespace smartjam
