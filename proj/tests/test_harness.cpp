#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "smartjam/error.hpp"
#include "smartjam/harness.hpp"

#include <clocale>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <set>

using namespace smartjam;

namespace {

Experiment small_experiment() {
  Experiment e;
  e.system.B = 16;
  e.system.U = 4;
  e.system.T = 4;
  e.system.D = 12;
  e.system.K = 16;
  e.system.seed = 42;
  e.jammer.kind = JammerKind::Pilot;
  e.jammer.active_in_estimation = false;
  e.detectors = {Detector::Lmmse, Detector::Pos, Detector::GeniePos, Detector::JlSimo, Detector::Maed,
                 Detector::Somaed};
  e.params = ParameterSet::defaults(20);
  e.snr_db = {0.0, 10.0};
  e.trials = 12;
  return e;
}

std::string config_error(const Json& j) {
  try {
    parse_experiment(j);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Config);
    return e.what();
  }
  return "";
}

Json base_config() {
  return Json::parse(R"({
    "system": {"b": 16, "u": 4, "k": 16, "t": 4, "d": 12, "constellation": "QPSK", "seed": 1},
    "jammer": {"kind": "BARRAGE", "symbol_law": "GAUSSIAN", "power": {"mode": "RHO_E", "value_db": 30}},
    "detectors": ["LMMSE", "MAED"],
    "snr_db": [0, 5],
    "trials": 3
  })");
}

}  // namespace

TEST_CASE("number formatting") {
  CHECK(format_number(0.0) == "0");
  CHECK(format_number(0.125) == "0.125");
  CHECK(format_number(1.0 / 3.0) == "0.333333");
  CHECK(format_number(123456789.0) == "1.23457e+08");
  CHECK(format_number(2.5e-7) == "2.5e-07");
  CHECK(format_number(-12.0) == "-12");
  CHECK(format_number(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(format_number(-std::numeric_limits<double>::infinity()) == "-inf");
  CHECK(format_number(std::nan("")) == "nan");
  // a comma-decimal locale must not leak into the output
  if (std::setlocale(LC_NUMERIC, "de_DE.UTF-8")) {
    CHECK(format_number(0.5) == "0.5");
    std::setlocale(LC_NUMERIC, "C");
  }
}

TEST_CASE("CSV emission") {
  SUBCASE("empty rows give a header-only file") {
    CHECK(format_csv({}) == "detector,snr_db,jammer,ber,ser,trials,bit_count,bit_errors\n");
    const auto path = std::filesystem::temp_directory_path() / "smartjam_empty.csv";
    emit_csv({}, path.string());
    std::ifstream in(path);
    std::string all((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    CHECK(all == "detector,snr_db,jammer,ber,ser,trials,bit_count,bit_errors\n");
    std::filesystem::remove(path);
  }
  SUBCASE("roundtrip") {
    std::vector<MetricRow> rows(2);
    rows[0] = {"MAED", 2.5, "PILOT/GAUSSIAN/rhoE=30dB", 0.0123457, 0.0245, 100, 51200, 632, std::nullopt};
    rows[1] = {"LMMSE", -3.0, "NONE", 0.5, 0.75, 1, 8, 4, std::nullopt};
    const auto back = parse_csv(format_csv(rows));
    REQUIRE(back.size() == 2);
    for (std::size_t i = 0; i < 2; ++i) {
      CHECK(back[i].detector == rows[i].detector);
      CHECK(back[i].snr_db == rows[i].snr_db);
      CHECK(back[i].jammer == rows[i].jammer);
      CHECK(back[i].ber == rows[i].ber);
      CHECK(back[i].ser == rows[i].ser);
      CHECK(back[i].trials == rows[i].trials);
      CHECK(back[i].bit_count == rows[i].bit_count);
      CHECK(back[i].bit_errors == rows[i].bit_errors);
      CHECK_FALSE(back[i].wall_ms);
    }
  }
  SUBCASE("timing column") {
    std::vector<MetricRow> rows(1);
    rows[0] = {"POS", 0.0, "NONE", 0.1, 0.2, 1, 10, 1, 12.5};
    const std::string text = format_csv(rows);
    CHECK(text.rfind("detector,snr_db,jammer,ber,ser,trials,bit_count,bit_errors,wall_ms\n", 0) == 0);
    const auto back = parse_csv(text);
    REQUIRE(back[0].wall_ms);
    CHECK(*back[0].wall_ms == 12.5);
  }
}

TEST_CASE("experiment rows") {
  const Experiment e = small_experiment();
  const auto rows = run_experiment(e);
  REQUIRE(rows.size() == e.detectors.size() * e.snr_db.size());
  const auto bits_per_trial = static_cast<std::uint64_t>(e.system.U * e.system.D * 2);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    CHECK(r.detector == to_string(e.detectors[i / e.snr_db.size()]));
    CHECK(r.snr_db == e.snr_db[i % e.snr_db.size()]);
    CHECK(r.trials == e.trials);
    CHECK(r.bit_count == bits_per_trial * static_cast<std::uint64_t>(e.trials));
    CHECK(r.ber == static_cast<double>(r.bit_errors) / static_cast<double>(r.bit_count));
    CHECK(r.ber >= 0.0);
    CHECK(r.ber <= 1.0);
    CHECK(r.ser >= r.ber / 2.0);
    CHECK(r.jammer == e.jammer.describe());
  }
}

TEST_CASE("determinism across thread counts") {
  Experiment e = small_experiment();
  e.threads = 1;
  const std::string a = format_csv(run_experiment(e));
  e.threads = 5;
  const std::string b = format_csv(run_experiment(e));
  e.threads = 8;
  const std::string c = format_csv(run_experiment(e));
  CHECK(a == b);
  CHECK(a == c);
}

TEST_CASE("all detectors see the same realization per trial") {
  Experiment e = small_experiment();
  e.threads = 3;
  std::map<std::pair<int, std::size_t>, std::set<std::pair<std::uint64_t, std::uint64_t>>> seen;
  std::map<std::pair<int, std::size_t>, int> calls;
  std::set<std::uint64_t> channels;
  run_experiment(e, [&](const ProbeEvent& ev) {
    seen[{ev.trial, ev.snr_index}].insert({ev.channel_hash, ev.frame_hash});
    ++calls[{ev.trial, ev.snr_index}];
    channels.insert(ev.channel_hash);
  });
  CHECK(seen.size() == static_cast<std::size_t>(e.trials) * e.snr_db.size());
  for (const auto& [key, hashes] : seen) {
    CHECK(hashes.size() == 1);
    CHECK(calls[key] == static_cast<int>(e.detectors.size()));
  }
  // the channel depends on the trial only, not on the SNR point
  CHECK(channels.size() == static_cast<std::size_t>(e.trials));
}

TEST_CASE("JL-SIMO rows do not depend on the jammer") {
  Experiment e = small_experiment();
  e.detectors = {Detector::JlSimo, Detector::GeniePos};
  const auto a = run_experiment(e);
  e.jammer.kind = JammerKind::Barrage;
  e.jammer.power.value_db = 60.0;
  e.jammer.active_in_estimation = true;
  const auto b = run_experiment(e);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].bit_errors == b[i].bit_errors);
    CHECK(a[i].ser == b[i].ser);
  }
}

// Without a jammer the zero set is not unique (an inactive jammer is always
// eclipsed), so the tiny-instance check runs with a barrage jammer.
TEST_CASE("noiseless MAED on a tiny instance") {
  Experiment e;
  e.system.B = 8;
  e.system.U = 2;
  e.system.T = 2;
  e.system.D = 16;
  e.system.K = 18;
  e.system.seed = 3;
  e.jammer.kind = JammerKind::Barrage;
  e.detectors = {Detector::Maed};
  e.snr_db = {std::numeric_limits<double>::infinity()};
  e.trials = 1;
  const auto rows = run_experiment(e);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].ber == 0.0);
  CHECK(rows[0].bit_count == 64);
}

TEST_CASE("experiment config parsing") {
  SUBCASE("valid") {
    const Experiment e = parse_experiment(base_config());
    CHECK(e.system.B == 16);
    CHECK(e.detectors == std::vector<Detector>{Detector::Lmmse, Detector::Maed});
    CHECK(e.snr_db == std::vector<double>{0.0, 5.0});
    CHECK(e.trials == 3);
    CHECK(e.jammer.kind == JammerKind::Barrage);
  }
  SUBCASE("errors carry JSON pointers") {
    Json j = base_config();
    j["system"]["b"] = "sixteen";
    CHECK(config_error(j).find("/system/b") != std::string::npos);
    j = base_config();
    j["detectors"] = Json::array({"LMMSE", "ML"});
    CHECK(config_error(j).find("/detectors/1") != std::string::npos);
    j = base_config();
    j["trials"] = 0;
    CHECK(config_error(j).find("/trials") != std::string::npos);
    j = base_config();
    j["jammer"]["power"]["mode"] = "RHO_X";
    CHECK(config_error(j).find("/jammer/power/mode") != std::string::npos);
    j = base_config();
    j["system"]["k"] = 17;
    CHECK(config_error(j).find("/system") != std::string::npos);
    j = base_config();
    j.erase("detectors");
    CHECK(config_error(j).find("/detectors") != std::string::npos);
  }
  SUBCASE("SOMAED needs a parameter file") {
    Json j = base_config();
    j["detectors"] = Json::array({"SOMAED"});
    CHECK(config_error(j).find("/params") != std::string::npos);
    j["params"] = "does/not/exist.json";
    CHECK(config_error(j).find("/params") != std::string::npos);
  }
  SUBCASE("parameter file roundtrip and constellation check") {
    const auto dir = std::filesystem::temp_directory_path();
    ParameterFile pf;
    pf.params = ParameterSet::defaults(5);
    pf.params.gamma[1] = 0.25;
    pf.constellation = ConstellationKind::QPSK;
    pf.B = 16;
    pf.U = 4;
    pf.K = 16;
    save_parameter_file((dir / "smartjam_params.json").string(), pf);
    const ParameterFile back = load_parameter_file((dir / "smartjam_params.json").string());
    CHECK(back.params.tau == pf.params.tau);
    CHECK(back.params.gamma == pf.params.gamma);
    CHECK(back.params.rho == pf.params.rho);
    CHECK(back.B == 16);

    Json j = base_config();
    j["detectors"] = Json::array({"SOMAED"});
    j["params"] = "smartjam_params.json";
    const Experiment e = parse_experiment(j, dir.string());
    REQUIRE(e.params);
    CHECK(e.params->t_max() == 5);
    j["system"]["constellation"] = "QAM16";
    CHECK(config_error(j).find("/params") != std::string::npos);  // relative path resolves against base_dir
    CHECK_THROWS_AS(parse_experiment(j, dir.string()), Error);
    std::filesystem::remove(dir / "smartjam_params.json");
  }
}
