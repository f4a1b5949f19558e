#include "smartjam/harness.hpp"

#include "smartjam/baselines.hpp"
#include "smartjam/channel.hpp"
#include "smartjam/error.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

namespace smartjam {

namespace {

constexpr std::pair<Detector, const char*> kDetectorNames[] = {
    {Detector::Lmmse, "LMMSE"}, {Detector::JlLmmse, "JLLMMSE"}, {Detector::Pos, "POS"},
    {Detector::GeniePos, "GENIEPOS"}, {Detector::JlSimo, "JLSIMO"}, {Detector::Maed, "MAED"},
    {Detector::Somaed, "SOMAED"},
};

[[noreturn]] void config_fail(const std::string& where, const std::string& msg) {
  throw Error(ErrorKind::Config, where + ": " + msg);
}

std::string resolve(const std::string& path, const std::string& base_dir) {
  if (path.empty() || base_dir.empty()) return path;
  std::filesystem::path p(path);
  if (p.is_absolute()) return path;
  return (std::filesystem::path(base_dir) / p).string();
}

}  // namespace

std::string to_string(Detector d) {
  for (auto [k, name] : kDetectorNames) {
    if (k == d) return name;
  }
  return "?";
}

Detector detector_from_string(const std::string& name) {
  for (auto [k, n] : kDetectorNames) {
    if (name == n) return k;
  }
  throw Error(ErrorKind::Config, "unknown detector '" + name + "'");
}

void Experiment::validate() const {
  system.validate();
  if (trials < 1) throw Error(ErrorKind::Config, "/trials: must be >= 1");
  if (detectors.empty()) throw Error(ErrorKind::Config, "/detectors: must be nonempty");
  if (snr_db.empty()) throw Error(ErrorKind::Config, "/snr_db: must be nonempty");
  if (pos_slots < 1) throw Error(ErrorKind::Config, "/pos_slots: must be >= 1");
  if (threads < 1) throw Error(ErrorKind::Config, "/threads: must be >= 1");
  for (Detector d : detectors) {
    if (d == Detector::Somaed && !params) {
      throw Error(ErrorKind::Config, "/params: SOMAED requires a parameter file");
    }
  }
  maed.validate();
}

Experiment parse_experiment(const Json& j, const std::string& base_dir) {
  if (!j.is_object()) config_fail("/", "expected an object");
  Experiment e;
  if (!j.contains("system")) config_fail("/system", "missing required key");
  e.system = parse_system_config(j["system"], "/system");
  if (j.contains("jammer")) {
    e.jammer = parse_jammer_profile(j["jammer"], "/jammer");
  } else {
    e.jammer.kind = JammerKind::None;
  }
  if (!j.contains("detectors")) config_fail("/detectors", "missing required key");
  const Json& dets = j["detectors"];
  if (!dets.is_array() || dets.empty()) config_fail("/detectors", "expected a nonempty array");
  for (std::size_t i = 0; i < dets.size(); ++i) {
    const std::string where = "/detectors/" + std::to_string(i);
    if (!dets[i].is_string()) config_fail(where, "expected a string");
    try {
      e.detectors.push_back(detector_from_string(dets[i].get<std::string>()));
    } catch (const Error& err) {
      config_fail(where, err.what());
    }
  }
  if (j.contains("snr_db")) {
    const Json& g = j["snr_db"];
    if (!g.is_array() || g.empty()) config_fail("/snr_db", "expected a nonempty array");
    for (std::size_t i = 0; i < g.size(); ++i) e.snr_db.push_back(parse_db(g[i], "/snr_db/" + std::to_string(i)));
  } else {
    e.snr_db = {e.system.snr_db};
  }
  auto get_int = [&](const char* key, int min_value, int& out) {
    if (!j.contains(key)) return;
    const std::string where = std::string("/") + key;
    if (!j[key].is_number_integer() || j[key].get<long long>() < min_value) {
      config_fail(where, "expected an integer >= " + std::to_string(min_value));
    }
    out = j[key].get<int>();
  };
  get_int("trials", 1, e.trials);
  get_int("pos_slots", 1, e.pos_slots);
  get_int("threads", 1, e.threads);
  if (j.contains("maed")) e.maed = parse_maed_config(j["maed"], "/maed");
  if (j.contains("somaed")) {
    const Json& s = j["somaed"];
    if (s.contains("gamma_reg_scale")) {
      if (!s["gamma_reg_scale"].is_number()) config_fail("/somaed/gamma_reg_scale", "expected a number");
      e.somaed_gamma_reg_scale = s["gamma_reg_scale"].get<double>();
    }
  }
  if (j.contains("channel_file")) {
    if (!j["channel_file"].is_string()) config_fail("/channel_file", "expected a string");
    e.channel_file = resolve(j["channel_file"].get<std::string>(), base_dir);
  }
  if (j.contains("power_control_db")) {
    if (!j["power_control_db"].is_number() || j["power_control_db"].get<double>() < 0) {
      config_fail("/power_control_db", "expected a number >= 0");
    }
    e.power_control_db = j["power_control_db"].get<double>();
  }
  if (j.contains("output")) {
    if (!j["output"].is_string()) config_fail("/output", "expected a string");
    e.output = j["output"].get<std::string>();
  }
  if (j.contains("timing")) {
    if (!j["timing"].is_boolean()) config_fail("/timing", "expected a boolean");
    e.timing = j["timing"].get<bool>();
  }
  if (j.contains("params")) {
    if (!j["params"].is_string()) config_fail("/params", "expected a string");
    e.params_path = resolve(j["params"].get<std::string>(), base_dir);
  }
  const bool wants_somaed = std::find(e.detectors.begin(), e.detectors.end(), Detector::Somaed) != e.detectors.end();
  if (wants_somaed) {
    if (e.params_path.empty()) config_fail("/params", "SOMAED requires a parameter file");
    if (!std::filesystem::exists(e.params_path)) {
      config_fail("/params", "parameter file '" + e.params_path + "' does not exist");
    }
    ParameterFile pf = load_parameter_file(e.params_path);
    if (pf.constellation != e.system.constellation) {
      config_fail("/params", "parameter file was trained for " + to_string(pf.constellation));
    }
    e.params = std::move(pf.params);
  }
  e.validate();
  return e;
}

Experiment load_experiment(const std::string& path) {
  const Json j = load_json_file(path);
  return parse_experiment(j, std::filesystem::path(path).parent_path().string());
}

std::uint64_t matrix_hash(const CMat& A) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto feed = [&](const void* data, std::size_t n) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= bytes[i];
      h *= 0x100000001b3ULL;
    }
  };
  const std::int64_t dims[2] = {A.rows(), A.cols()};
  feed(dims, sizeof(dims));
  feed(A.data(), sizeof(cplx) * static_cast<std::size_t>(A.size()));
  return h;
}

namespace {

struct TrialData {
  ChannelRealization ch;
  Frame frame;
  JamSequence jam;
  CMat Y0;     // H [S_T, S_D]
  CMat Z;      // unit-variance receive noise, B x K
  CMat w_est;  // jammer in the UE-silent slots, 1 x pos_slots (already scaled)
  CMat Z_est;  // unit-variance noise in the UE-silent slots
};

enum StreamTag : std::uint64_t {
  kChannel = hash_tag("channel"),
  kPilots = hash_tag("pilots"),
  kFrame = hash_tag("frame"),
  kJammer = hash_tag("jammer"),
  kNoise = hash_tag("noise"),
  kEstimation = hash_tag("estimation"),
  kSimo = hash_tag("jl-simo"),
};

CMat unit_noise(Rng& rng, int rows, int cols) {
  CMat Z(rows, cols);
  for (int c = 0; c < cols; ++c) {
    for (int r = 0; r < rows; ++r) Z(r, c) = rng.cnormal();
  }
  return Z;
}

TrialData draw_trial(const Experiment& exp, const Constellation& c, const std::vector<ChannelRealization>& channels,
                     int trial) {
  const SystemConfig& cfg = exp.system;
  const std::uint64_t master = cfg.seed;
  const auto t = static_cast<std::uint64_t>(trial);
  TrialData d;
  if (!channels.empty()) {
    d.ch = channels[t % channels.size()];
  } else {
    Rng rng(derive_seed(master, t, kChannel));
    d.ch = rayleigh(cfg, rng);
  }
  if (exp.power_control_db) d.ch = power_control(d.ch, *exp.power_control_db);

  CMat pilots;
  if (cfg.pilots == PilotMode::Haar) {
    Rng rng(derive_seed(master, t, kPilots));
    pilots = make_pilots(cfg, &rng);
  } else {
    pilots = make_pilots(cfg);
  }
  {
    Rng rng(derive_seed(master, t, kFrame));
    d.frame = draw_frame(cfg, c, pilots, rng);
  }
  {
    Rng rng(derive_seed(master, t, kJammer));
    d.jam = synthesize(exp.jammer, cfg, c, d.frame, rng);
  }
  d.Y0 = d.ch.H * d.frame.full();
  {
    Rng rng(derive_seed(master, t, kNoise));
    d.Z = unit_noise(rng, cfg.B, cfg.K);
  }
  {
    Rng rng(derive_seed(master, t, kEstimation));
    d.w_est = CMat::Zero(1, exp.pos_slots);
    if (exp.jammer.kind != JammerKind::None && exp.jammer.active_in_estimation) {
      for (int k = 0; k < exp.pos_slots; ++k) d.w_est(0, k) = d.jam.gain * draw_symbol(exp.jammer.law, c, rng);
    }
    d.Z_est = unit_noise(rng, cfg.B, exp.pos_slots);
  }
  return d;
}

DetectionResult run_detector(Detector det, const Experiment& exp, const Constellation& c, const TrialData& d,
                             const CMat& Y, double N0, double noise_amp, int trial, std::size_t snr_index) {
  const CMat& S_T = d.frame.S_T;
  switch (det) {
    case Detector::Lmmse: return lmmse_receiver(Y, S_T, N0, c);
    case Detector::JlLmmse: return lmmse_receiver(d.Y0 + noise_amp * d.Z, S_T, N0, c);
    case Detector::Pos: {
      const CMat Y_J = d.ch.j * d.w_est + noise_amp * d.Z_est;
      return pos_detect(Y, Y_J, S_T, N0, c);
    }
    case Detector::GeniePos: return genie_pos_detect(Y, d.ch.j, S_T, N0, c);
    case Detector::JlSimo: {
      Rng rng(derive_seed(exp.system.seed, static_cast<std::uint64_t>(trial), kSimo, snr_index));
      return simo_mrc_detect(d.ch.H, d.frame.S_D, N0, c, rng);
    }
    case Detector::Maed: return run_maed(Y, S_T, c, exp.maed).detection;
    case Detector::Somaed: return run_somaed(Y, S_T, *exp.params, c, {}, exp.somaed_gamma_reg_scale).detection;
  }
  throw Error(ErrorKind::InvalidArgument, "unknown detector");
}

}  // namespace

std::vector<MetricRow> run_experiment(const Experiment& exp, const Probe& probe) {
  exp.validate();
  const Constellation c = make_constellation(exp.system.constellation);
  std::vector<ChannelRealization> channels;
  if (!exp.channel_file.empty()) {
    channels = import_channels(exp.channel_file);
    if (channels.empty()) throw Error(ErrorKind::Runtime, "channel file '" + exp.channel_file + "' has no usable records");
    if (channels.front().H.rows() != exp.system.B || channels.front().H.cols() != exp.system.U) {
      throw Error(ErrorKind::Shape, "channel file dimensions do not match the system config");
    }
  }

  const std::size_t n_det = exp.detectors.size();
  const std::size_t n_snr = exp.snr_db.size();
  const auto n_trials = static_cast<std::size_t>(exp.trials);
  // tallies[(det * n_snr + snr) * n_trials + trial]
  std::vector<ErrorTally> tallies(n_det * n_snr * n_trials);
  std::vector<double> elapsed_ms(tallies.size(), 0.0);

  std::mutex probe_mutex;
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr first_error;

  auto worker = [&] {
    for (;;) {
      const std::size_t trial = next.fetch_add(1);
      if (trial >= n_trials) return;
      try {
        const TrialData d = draw_trial(exp, c, channels, static_cast<int>(trial));
        const CMat Y_jam = apply_jammer(d.Y0, d.ch.j, d.jam.w);
        for (std::size_t s = 0; s < n_snr; ++s) {
          const double N0 = noise_variance(exp.system.U, exp.snr_db[s]);
          const double amp = std::sqrt(N0);
          const CMat Y = Y_jam + amp * d.Z;
          for (std::size_t k = 0; k < n_det; ++k) {
            const Detector det = exp.detectors[k];
            if (probe) {
              std::lock_guard lock(probe_mutex);
              probe({static_cast<int>(trial), s, det, matrix_hash(d.ch.H), matrix_hash(d.frame.full())});
            }
            const auto start = std::chrono::steady_clock::now();
            const DetectionResult r = run_detector(det, exp, c, d, Y, N0, amp, static_cast<int>(trial), s);
            const std::size_t idx = (k * n_snr + s) * n_trials + trial;
            elapsed_ms[idx] = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
            tallies[idx] = count_errors(r, d.frame.bits, d.frame.labels);
          }
        }
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        next.store(n_trials);
        return;
      }
    }
  };

  const int n_threads = std::max(1, std::min<int>(exp.threads, exp.trials));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(static_cast<std::size_t>(n_threads));
    for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
  }
  if (first_error) std::rethrow_exception(first_error);

  const std::string jammer = exp.jammer.describe();
  std::vector<MetricRow> rows;
  rows.reserve(n_det * n_snr);
  for (std::size_t k = 0; k < n_det; ++k) {
    for (std::size_t s = 0; s < n_snr; ++s) {
      ErrorTally total;
      double ms = 0.0;
      for (std::size_t t = 0; t < n_trials; ++t) {
        const std::size_t idx = (k * n_snr + s) * n_trials + t;
        total += tallies[idx];
        ms += elapsed_ms[idx];
      }
      MetricRow row;
      row.detector = to_string(exp.detectors[k]);
      row.snr_db = exp.snr_db[s];
      row.jammer = jammer;
      row.ber = total.ber();
      row.ser = total.ser();
      row.trials = exp.trials;
      row.bit_count = total.bits;
      row.bit_errors = total.bit_errors;
      if (exp.timing) row.wall_ms = ms;
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 6);
  return std::string(buf, res.ptr);
}

std::string format_csv(const std::vector<MetricRow>& rows) {
  bool timed = false;
  for (const auto& r : rows) timed = timed || r.wall_ms.has_value();
  std::string out = "detector,snr_db,jammer,ber,ser,trials,bit_count,bit_errors";
  if (timed) out += ",wall_ms";
  out += "\n";
  for (const auto& r : rows) {
    out += r.detector + "," + format_number(r.snr_db) + "," + r.jammer + "," + format_number(r.ber) + "," +
           format_number(r.ser) + "," + std::to_string(r.trials) + "," + std::to_string(r.bit_count) + "," +
           std::to_string(r.bit_errors);
    if (timed) out += "," + (r.wall_ms ? format_number(*r.wall_ms) : std::string());
    out += "\n";
  }
  return out;
}

void emit_csv(const std::vector<MetricRow>& rows, const std::string& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw Error(ErrorKind::Runtime, "cannot open '" + path + "' for writing");
  os << format_csv(rows);
  os.flush();
  if (!os) throw Error(ErrorKind::Runtime, "write to '" + path + "' failed");
}

namespace {

double parse_double(const std::string& s) {
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw Error(ErrorKind::Parse, "bad number '" + s + "' in CSV");
  }
  return v;
}

std::uint64_t parse_u64(const std::string& s) {
  std::uint64_t v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw Error(ErrorKind::Parse, "bad integer '" + s + "' in CSV");
  }
  return v;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream is(line);
  while (std::getline(is, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

std::vector<MetricRow> parse_csv(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line)) throw Error(ErrorKind::Parse, "empty CSV");
  const auto header = split(line);
  const bool timed = header.size() == 9 && header[8] == "wall_ms";
  if (header.size() != (timed ? 9u : 8u) || header[0] != "detector") {
    throw Error(ErrorKind::Parse, "unexpected CSV header '" + line + "'");
  }
  std::vector<MetricRow> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto f = split(line);
    if (f.size() != header.size()) throw Error(ErrorKind::Parse, "wrong field count in CSV line '" + line + "'");
    MetricRow r;
    r.detector = f[0];
    r.snr_db = parse_double(f[1]);
    r.jammer = f[2];
    r.ber = parse_double(f[3]);
    r.ser = parse_double(f[4]);
    r.trials = static_cast<int>(parse_u64(f[5]));
    r.bit_count = parse_u64(f[6]);
    r.bit_errors = parse_u64(f[7]);
    if (timed && !f[8].empty()) r.wall_ms = parse_double(f[8]);
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace smartjam
