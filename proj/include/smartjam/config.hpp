#pragma once

#include "smartjam/jammer.hpp"
#include "smartjam/maed.hpp"
#include "smartjam/scenario.hpp"
#include "smartjam/somaed.hpp"
#include "smartjam/unfolding.hpp"

#include <json.hpp>

#include <string>

namespace smartjam {

using Json = nlohmann::json;

/// Reads a JSON file. Throws Config on I/O or syntax errors.
Json load_json_file(const std::string& path);

// Parsers throw Config with a JSON pointer to the offending value, e.g.
// "/system/b: expected a positive integer". `where` is the pointer of `j`.

/// Keys: b, u, k, t, d, constellation, snr_db, seed, and optional pilots
/// ("HADAMARD" | "HAAR").
SystemConfig parse_system_config(const Json& j, const std::string& where = "");
Json to_json(const SystemConfig& cfg);

/// Keys: kind, symbol_law, power {mode: "RHO_E" | "RHO_P", value_db}, sparse_alpha,
/// ue_index, active_in_estimation. value_db may be the string "-inf".
JammerProfile parse_jammer_profile(const Json& j, const std::string& where = "");
Json to_json(const JammerProfile& p);

MaedConfig parse_maed_config(const Json& j, const std::string& where = "");

TrainingSetSpec parse_training_set_spec(const Json& j, const std::string& where = "");
TrainOptions parse_train_options(const Json& j, const std::string& where = "");

/// Parameter file:
///   {"format": "smartjam-params", "version": 1, "constellation": "QPSK",
///    "b": 32, "u": 8, "k": 40, "iterations": [{"tau", "gamma", "alpha", "rho"}, ...]}
struct ParameterFile {
  ParameterSet params;
  ConstellationKind constellation = ConstellationKind::QPSK;
  int B = 0, U = 0, K = 0;
};

void save_parameter_file(const std::string& path, const ParameterFile& file);
ParameterFile load_parameter_file(const std::string& path);

/// Parses a dB value that may be a number or one of the strings "-inf" / "inf".
double parse_db(const Json& j, const std::string& where);

}  // namespace smartjam
