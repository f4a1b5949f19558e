#pragma once

#include "smartjam/config.hpp"
#include "smartjam/jammer.hpp"
#include "smartjam/maed.hpp"
#include "smartjam/scenario.hpp"
#include "smartjam/somaed.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace smartjam {

enum class Detector {
  Lmmse,     // LS + LMMSE on the jammed receive signal
  JlLmmse,   // LS + LMMSE on the same realization without the jammer
  Pos,       // projection onto the complement of the subspace estimated from UE-silent slots
  GeniePos,  // projection onto the complement of the true jammer channel
  JlSimo,    // jammerless single-user MRC with perfect CSI
  Maed,
  Somaed,
};

std::string to_string(Detector d);
Detector detector_from_string(const std::string& name);

struct Experiment {
  SystemConfig system;
  JammerProfile jammer;
  std::vector<Detector> detectors;
  std::vector<double> snr_db;
  int trials = 1;
  std::string params_path;
  std::optional<ParameterSet> params;  // loaded from params_path when SOMAED is listed
  MaedConfig maed;
  double somaed_gamma_reg_scale = 0.1;
  int pos_slots = 10;
  std::string channel_file;
  std::optional<double> power_control_db;
  std::string output = "results.csv";
  bool timing = false;
  int threads = 1;

  void validate() const;
};

/// Parses an experiment config. Keys:
///   system (see parse_system_config), jammer (see parse_jammer_profile),
///   detectors: ["LMMSE", "JLLMMSE", "POS", "GENIEPOS", "JLSIMO", "MAED", "SOMAED"],
///   snr_db: [...], trials, params, maed {t_max, tau0}, somaed {gamma_reg_scale},
///   pos_slots, channel_file, power_control_db, output, timing, threads.
/// Relative paths in `params` and `channel_file` are resolved against `base_dir`.
/// The SOMAED parameter file is loaded here; a missing file is a Config error.
Experiment parse_experiment(const Json& j, const std::string& base_dir = "");
Experiment load_experiment(const std::string& path);

struct MetricRow {
  std::string detector;
  double snr_db = 0.0;
  std::string jammer;
  double ber = 0.0;
  double ser = 0.0;
  int trials = 0;
  std::uint64_t bit_count = 0;
  std::uint64_t bit_errors = 0;
  std::optional<double> wall_ms;
};

/// Called once per (trial, SNR index, detector) with a hash of the realization
/// the detector saw. Calls are serialized but arrive in scheduling order.
struct ProbeEvent {
  int trial = 0;
  std::size_t snr_index = 0;
  Detector detector = Detector::Lmmse;
  std::uint64_t channel_hash = 0;
  std::uint64_t frame_hash = 0;
};
using Probe = std::function<void(const ProbeEvent&)>;

/// Rows are ordered by detector (as listed), then SNR.
std::vector<MetricRow> run_experiment(const Experiment& exp, const Probe& probe = {});

/// FNV-1a over the raw bytes of a matrix.
std::uint64_t matrix_hash(const CMat& A);

/// Columns: detector,snr_db,jammer,ber,ser,trials,bit_count,bit_errors[,wall_ms].
/// The wall_ms column is present iff any row carries a timing.
std::string format_csv(const std::vector<MetricRow>& rows);
void emit_csv(const std::vector<MetricRow>& rows, const std::string& path);
std::vector<MetricRow> parse_csv(const std::string& text);

/// Six significant digits in general format with a dot separator, independent of locale.
std::string format_number(double v);

}  // namespace smartjam
