// smartjam: command-line front end for simulations, training, theory checks and
// channel file handling. Exit codes: 0 success, 2 config/usage error, 3 runtime failure.

#include "smartjam/channel.hpp"
#include "smartjam/config.hpp"
#include "smartjam/error.hpp"
#include "smartjam/harness.hpp"
#include "smartjam/theory.hpp"
#include "smartjam/unfolding.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

using namespace smartjam;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct CommonFlags {
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::string out;
};

int cmd_simulate(const std::string& config_path, const CommonFlags& flags) {
  Experiment exp = load_experiment(config_path);
  if (flags.seed) exp.system.seed = *flags.seed;
  if (flags.threads) exp.threads = *flags.threads;
  if (!flags.out.empty()) exp.output = flags.out;
  exp.validate();
  const auto rows = run_experiment(exp);
  emit_csv(rows, exp.output);
  for (const auto& r : rows) {
    std::cout << r.detector << " snr=" << format_number(r.snr_db) << " ber=" << format_number(r.ber) << "\n";
  }
  std::cout << "wrote " << exp.output << "\n";
  return 0;
}

// Training config:
//   {"system": {...}, "training_set": {...}, "train": {...}, "validation_fraction": 0.2,
//    "init": "params.json", "output": "trained.json", "history": "history.csv", "threads": 1}
int cmd_train(const std::string& config_path, const CommonFlags& flags) {
  const Json j = load_json_file(config_path);
  const std::string base = std::filesystem::path(config_path).parent_path().string();
  if (!j.contains("system")) throw Error(ErrorKind::Config, "/system: missing required key");
  SystemConfig cfg = parse_system_config(j["system"], "/system");
  TrainingSetSpec spec = j.contains("training_set") ? parse_training_set_spec(j["training_set"], "/training_set")
                                                    : TrainingSetSpec{};
  TrainOptions opts = j.contains("train") ? parse_train_options(j["train"], "/train") : TrainOptions{};
  if (flags.seed) {
    spec.seed = *flags.seed;
    opts.seed = derive_seed(*flags.seed, hash_tag("train"));
  }
  int threads = j.value("threads", 1);
  if (flags.threads) threads = *flags.threads;
  if (threads < 1) throw Error(ErrorKind::Config, "/threads: must be >= 1");
  opts.threads = threads;
  double validation_fraction = j.value("validation_fraction", 0.2);
  if (!(validation_fraction >= 0.0 && validation_fraction < 1.0)) {
    throw Error(ErrorKind::Config, "/validation_fraction: must lie in [0, 1)");
  }
  int t_max = 20;
  if (j.contains("t_max")) {
    if (!j["t_max"].is_number_integer() || j["t_max"].get<int>() < 2) {
      throw Error(ErrorKind::Config, "/t_max: expected an integer >= 2");
    }
    t_max = j["t_max"].get<int>();
  }
  ParameterSet init = ParameterSet::defaults(t_max);
  if (j.contains("init")) {
    const std::string init_path = (std::filesystem::path(base) / j["init"].get<std::string>()).string();
    if (!std::filesystem::exists(init_path)) {
      throw Error(ErrorKind::Config, "/init: parameter file '" + init_path + "' does not exist");
    }
    init = load_parameter_file(init_path).params;
  }
  std::string output = j.value("output", std::string("trained_params.json"));
  if (!flags.out.empty()) output = flags.out;
  std::string history = j.value("history", output + ".history.csv");

  const Constellation c = make_constellation(cfg.constellation);
  std::cout << "generating " << spec.samples << " training samples\n";
  auto all = make_training_set(cfg, spec, init, threads);
  const auto n_val = static_cast<std::size_t>(std::floor(validation_fraction * static_cast<double>(all.size())));
  std::vector<TrainingSample> validation(all.end() - static_cast<std::ptrdiff_t>(n_val), all.end());
  all.resize(all.size() - n_val);

  std::ofstream hist(history, std::ios::trunc);
  if (!hist) throw Error(ErrorKind::Runtime, "cannot write '" + history + "'");
  hist << "epoch,batch_size,train_loss,best_loss,validation_loss\n";
  opts.on_epoch = [&](const EpochLog& e) {
    hist << e.epoch << "," << e.batch_size << "," << format_number(e.train_loss) << "," << format_number(e.best_loss)
         << "," << format_number(e.validation_loss) << "\n";
    std::cout << "epoch " << e.epoch << " batch " << e.batch_size << " loss " << format_number(e.train_loss)
              << " best " << format_number(e.best_loss) << "\n";
  };
  const TrainRun run = train(init, all, validation, c, opts);
  ParameterFile pf;
  pf.params = run.best;
  pf.constellation = cfg.constellation;
  pf.B = cfg.B;
  pf.U = cfg.U;
  pf.K = cfg.K;
  save_parameter_file(output, pf);
  std::cout << "initial loss " << format_number(run.init_loss) << ", best " << format_number(run.best_loss)
            << "\nwrote " << output << " and " << history << "\n";
  return 0;
}

// Theory config:
//   {"system": {...}, "jammer": {...}, "trials": 100, "eclipse_trials": 200}
int cmd_verify_theory(const std::string& config_path, const CommonFlags& flags) {
  const Json j = load_json_file(config_path);
  if (!j.contains("system")) throw Error(ErrorKind::Config, "/system: missing required key");
  SystemConfig cfg = parse_system_config(j["system"], "/system");
  if (flags.seed) cfg.seed = *flags.seed;
  JammerProfile jammer;
  if (j.contains("jammer")) jammer = parse_jammer_profile(j["jammer"], "/jammer");
  const int trials = j.value("trials", 100);
  const int eclipse_trials = j.value("eclipse_trials", 200);
  if (trials < 1 || eclipse_trials < 0) throw Error(ErrorKind::Config, "/trials: must be >= 1");

  Rng rng1(derive_seed(cfg.seed, hash_tag("theorem1")));
  const Theorem1Report t1 = verify_theorem1(cfg, jammer, trials, rng1);
  Rng rng2(derive_seed(cfg.seed, hash_tag("eclipse")));
  const EclipseStats es = eclipse_statistics(cfg, jammer, eclipse_trials, rng2);
  const Constellation c = make_constellation(cfg.constellation);
  const double bound = eclipse_bound_log10(c.size(), cfg.U, cfg.D);

  nlohmann::ordered_json out;
  out["system"] = to_json(cfg);
  out["jammer"] = jammer.describe();
  out["theorem1"] = nlohmann::ordered_json::parse(t1.to_json());
  out["theorem2"]["constellation_size"] = c.size();
  out["theorem2"]["bound_log10"] = bound;
  out["theorem2"]["bound"] = std::pow(10.0, bound);
  out["eclipse"]["trials"] = es.trials;
  out["eclipse"]["eclipsed"] = es.eclipsed;
  out["eclipse"]["candidates_per_trial"] = es.candidates_per_trial;
  const std::string text = out.dump(2) + "\n";
  if (!flags.out.empty()) {
    std::ofstream os(flags.out, std::ios::trunc);
    if (!os) throw Error(ErrorKind::Runtime, "cannot write '" + flags.out + "'");
    os << text;
  }
  std::cout << text;
  return t1.all_passed() ? 0 : kExitRuntime;
}

// Export config: {"system": {...}, "power_control_db": 3}. Record i is the channel
// that `simulate` with the same system seed would draw for trial i.
int cmd_export(const std::string& config_path, int count, const CommonFlags& flags) {
  const Json j = load_json_file(config_path);
  if (!j.contains("system")) throw Error(ErrorKind::Config, "/system: missing required key");
  SystemConfig cfg = parse_system_config(j["system"], "/system");
  if (flags.seed) cfg.seed = *flags.seed;
  std::optional<double> pc;
  if (j.contains("power_control_db")) pc = j["power_control_db"].get<double>();
  const std::string out = flags.out.empty() ? std::string("channels.chn") : flags.out;
  std::vector<ChannelRealization> records;
  records.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    Rng rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(i), hash_tag("channel")));
    ChannelRealization ch = rayleigh(cfg, rng);
    if (pc) ch = power_control(ch, *pc);
    records.push_back(std::move(ch));
  }
  export_channels(out, records);
  std::cout << "wrote " << count << " records to " << out << "\n";
  return 0;
}

int cmd_import(const std::string& path, const CommonFlags& flags) {
  std::vector<std::uint64_t> skipped;
  const auto records = import_channels(path, &skipped);
  for (auto r : skipped) std::cerr << "warning: record " << r << " violates channel invariants, skipped\n";
  nlohmann::ordered_json out;
  out["file"] = path;
  out["records"] = records.size();
  out["skipped"] = skipped;
  if (!records.empty()) {
    out["b"] = records.front().H.rows();
    out["u"] = records.front().H.cols();
    double ue = 0.0, jam = 0.0;
    for (const auto& r : records) {
      ue += r.H.squaredNorm() / static_cast<double>(r.H.size());
      jam += r.j.squaredNorm() / static_cast<double>(r.j.size());
    }
    out["mean_ue_gain"] = ue / static_cast<double>(records.size());
    out["mean_jammer_gain"] = jam / static_cast<double>(records.size());
  }
  const std::string text = out.dump(2) + "\n";
  if (!flags.out.empty()) {
    std::ofstream os(flags.out, std::ios::trunc);
    os << text;
  }
  std::cout << text;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"smartjam: jammer-resilient massive MU-MIMO detection simulator"};
  app.require_subcommand(1);
  CommonFlags flags;
  std::uint64_t seed = 0;
  int threads = 1;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--seed", seed, "override the master seed");
    sub->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--out", flags.out, "output path");
  };

  std::string config, channel_file;
  int count = 100;
  auto* sim = app.add_subcommand("simulate", "run a Monte Carlo BER sweep and write CSV");
  sim->add_option("config", config, "experiment JSON")->required();
  add_common(sim);
  auto* tr = app.add_subcommand("train", "train SO-MAED parameters");
  tr->add_option("config", config, "training JSON")->required();
  add_common(tr);
  auto* th = app.add_subcommand("verify-theory", "exhaustive uniqueness and eclipsing checks");
  th->add_option("config", config, "theory JSON")->required();
  add_common(th);
  auto* ex = app.add_subcommand("export-channels", "write Rayleigh channel draws to a .chn file");
  ex->add_option("config", config, "JSON with a system block")->required();
  ex->add_option("--count", count, "number of records")->check(CLI::PositiveNumber);
  add_common(ex);
  auto* im = app.add_subcommand("import-channels", "validate a .chn file and summarize it");
  im->add_option("file", channel_file, ".chn file")->required();
  add_common(im);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  CLI::App* active = app.get_subcommands().front();
  if (active->count("--seed")) flags.seed = seed;
  if (active->count("--threads")) flags.threads = threads;

  try {
    if (active == sim) return cmd_simulate(config, flags);
    if (active == tr) return cmd_train(config, flags);
    if (active == th) return cmd_verify_theory(config, flags);
    if (active == ex) return cmd_export(config, count, flags);
    return cmd_import(channel_file, flags);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.kind() == ErrorKind::Config ? kExitConfig : kExitRuntime;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}
