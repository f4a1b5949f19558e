#include "smartjam/unfolding.hpp"

#include "smartjam/channel.hpp"
#include "smartjam/error.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <sstream>
#include <thread>

namespace smartjam {

double bce_bits(const std::vector<std::uint8_t>& bits, const std::vector<double>& probs) {
  double loss = 0.0;
  for (std::size_t i = 0; i < bits.size(); ++i) {
    const double p = std::clamp(probs[i], kProbClip, 1.0 - kProbClip);
    loss -= bits[i] ? std::log2(p) : std::log2(1.0 - p);
  }
  return loss;
}

double sample_bce(const ParameterSet& params, const TrainingSample& sample, const Constellation& c) {
  const SoftDetection det = run_somaed(sample.Y, sample.S_T, params, c);
  return bce_bits(sample.bits, det.soft.bit_probs);
}

namespace {

// Runs f(i) for i in [0, n) on up to `threads` workers; results land by index.
template <typename F>
void parallel_for(std::size_t n, int threads, F&& f) {
  const auto workers = static_cast<std::size_t>(std::max(1, threads));
  if (workers == 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  for (std::size_t w = 0; w < std::min(workers, n); ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) f(i);
    });
  }
}

}  // namespace

double bce_loss(const ParameterSet& params, const std::vector<const TrainingSample*>& batch, const Constellation& c,
                int threads) {
  std::vector<double> terms(batch.size());
  parallel_for(batch.size(), threads, [&](std::size_t i) {
    terms[i] = batch[i]->weight * sample_bce(params, *batch[i], c);
  });
  // Summed in index order so the result does not depend on scheduling.
  return std::accumulate(terms.begin(), terms.end(), 0.0);
}

std::vector<double> default_training_powers_db() {
  return {-std::numeric_limits<double>::infinity(), 0.0, 10.0, 20.0, 40.0, 80.0};
}

std::vector<TrainingSample> make_training_set(const SystemConfig& cfg, const TrainingSetSpec& spec,
                                              const ParameterSet& baseline, int threads) {
  cfg.validate();
  if (spec.samples < 1 || spec.snr_db.empty() || spec.jammer_power_db.empty()) {
    throw Error(ErrorKind::Config, "make_training_set: need samples >= 1 and nonempty SNR / power grids");
  }
  const Constellation c = make_constellation(cfg.constellation);
  std::vector<TrainingSample> set(static_cast<std::size_t>(spec.samples));
  parallel_for(set.size(), threads, [&](std::size_t n) {
    Rng rng(derive_seed(spec.seed, hash_tag("train-sample"), n));
    const double power_db = spec.jammer_power_db[n % spec.jammer_power_db.size()];
    const double snr_db = spec.snr_db[(n / spec.jammer_power_db.size()) % spec.snr_db.size()];
    SystemConfig scfg = cfg;
    scfg.snr_db = snr_db;
    const CMat pilots = make_pilots(scfg, &rng);
    const Frame frame = draw_frame(scfg, c, pilots, rng);
    const ChannelRealization ch = rayleigh(scfg, rng);
    JammerProfile jp;
    jp.kind = JammerKind::Pilot;
    jp.law = SymbolLaw::Gaussian;
    jp.power.mode = spec.power_mode;
    jp.power.value_db = power_db;
    const JamSequence js = synthesize(jp, scfg, c, frame, rng);
    const double N0 = noise_variance(scfg);
    CMat Y = ch.H * frame.full();
    for (Eigen::Index k = 0; k < Y.cols(); ++k)
      for (Eigen::Index b = 0; b < Y.rows(); ++b) Y(b, k) += rng.cnormal(N0);
    TrainingSample& s = set[n];
    s.Y = apply_jammer(Y, ch.j, js.w);
    s.S_T = frame.S_T;
    s.bits = frame.bits;
    s.jammer = jp.describe();
    s.snr_db = snr_db;
    // Floor at one bit so that samples the baseline already decodes perfectly
    // cannot take weights of order 1e12.
    const double base = sample_bce(baseline, s, c);
    s.weight = 1.0 / std::max(base, kMinBaselineBce);
  });
  return set;
}

std::vector<double> pack_parameters(const ParameterSet& p) {
  const auto n = static_cast<std::size_t>(p.t_max());
  std::vector<double> theta(4 * n);
  for (std::size_t t = 0; t < n; ++t) {
    theta[4 * t + 0] = std::log(p.tau[t]);
    theta[4 * t + 1] = p.gamma[t];
    theta[4 * t + 2] = p.alpha[t];
    theta[4 * t + 3] = std::log(p.rho[t]);
  }
  return theta;
}

ParameterSet unpack_parameters(const std::vector<double>& theta) {
  const std::size_t n = theta.size() / 4;
  ParameterSet p;
  p.tau.resize(n);
  p.gamma.resize(n);
  p.alpha.resize(n);
  p.rho.resize(n);
  for (std::size_t t = 0; t < n; ++t) {
    p.tau[t] = std::exp(theta[4 * t + 0]);
    p.gamma[t] = theta[4 * t + 1];
    p.alpha[t] = theta[4 * t + 2];
    p.rho[t] = std::exp(theta[4 * t + 3]);
  }
  return p;
}

std::vector<double> spsa_gradient(const std::function<double(const std::vector<double>&)>& loss,
                                  const std::vector<double>& theta, double perturbation, Rng& rng,
                                  int repetitions) {
  const std::size_t n = theta.size();
  std::vector<double> g(n, 0.0);
  std::vector<double> plus(n), minus(n), delta(n);
  for (int r = 0; r < repetitions; ++r) {
    for (std::size_t i = 0; i < n; ++i) {
      delta[i] = rng.bit() ? 1.0 : -1.0;
      plus[i] = theta[i] + perturbation * delta[i];
      minus[i] = theta[i] - perturbation * delta[i];
    }
    const double diff = loss(plus) - loss(minus);
    for (std::size_t i = 0; i < n; ++i) g[i] += diff / (2.0 * perturbation * delta[i]);
  }
  for (double& v : g) v /= repetitions;
  return g;
}

std::vector<double> central_difference_gradient(const std::function<double(const std::vector<double>&)>& loss,
                                                const std::vector<double>& theta, double perturbation) {
  std::vector<double> g(theta.size());
  std::vector<double> x = theta;
  for (std::size_t i = 0; i < theta.size(); ++i) {
    x[i] = theta[i] + perturbation;
    const double fp = loss(x);
    x[i] = theta[i] - perturbation;
    const double fm = loss(x);
    x[i] = theta[i];
    g[i] = (fp - fm) / (2.0 * perturbation);
  }
  return g;
}

namespace {

double mean_loss(const ParameterSet& p, const std::vector<const TrainingSample*>& set, const Constellation& c,
                 int threads) {
  if (set.empty()) return std::numeric_limits<double>::quiet_NaN();
  return bce_loss(p, set, c, threads) / static_cast<double>(set.size());
}

std::vector<const TrainingSample*> pointers(const std::vector<TrainingSample>& v) {
  std::vector<const TrainingSample*> out;
  out.reserve(v.size());
  for (const auto& s : v) out.push_back(&s);
  return out;
}

}  // namespace

TrainRun train(const ParameterSet& init, const std::vector<TrainingSample>& train_set,
               const std::vector<TrainingSample>& validation_set, const Constellation& c, const TrainOptions& opts) {
  init.validate();
  if (train_set.size() < 20) throw Error(ErrorKind::Config, "train: need at least 20 training samples");
  if (opts.batch_schedule.empty()) throw Error(ErrorKind::Config, "train: empty batch schedule");

  const auto all = pointers(train_set);
  const auto val = pointers(validation_set);
  Rng rng(opts.seed);

  // The starting point is the init as seen through the log parameterization.
  std::vector<double> theta = pack_parameters(init);
  TrainRun run;
  run.best = unpack_parameters(theta);
  run.init_loss = mean_loss(run.best, all, c, opts.threads);
  run.best_loss = run.init_loss;

  const std::size_t n = theta.size();
  std::vector<double> m(n, 0.0), v(n, 0.0);
  std::uint64_t step = 0;
  std::size_t schedule_pos = 0;
  int stagnant = 0;
  double last_epoch_best = run.init_loss;

  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), 0);

  for (int epoch = 0; epoch < opts.epochs; ++epoch) {
    const auto batch_size = static_cast<std::size_t>(opts.batch_schedule[schedule_pos]);
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);

    for (std::size_t start = 0; start + batch_size <= order.size(); start += batch_size) {
      std::vector<const TrainingSample*> batch;
      for (std::size_t b = 0; b < batch_size; ++b) batch.push_back(all[order[start + b]]);
      auto loss = [&](const std::vector<double>& th) {
        return bce_loss(unpack_parameters(th), batch, c, opts.threads) / static_cast<double>(batch.size());
      };
      const std::vector<double> g = opts.estimator == GradientEstimator::Spsa
                                        ? spsa_gradient(loss, theta, opts.perturbation, rng)
                                        : central_difference_gradient(loss, theta, opts.perturbation);
      ++step;
      const double bc1 = 1.0 - std::pow(opts.beta1, static_cast<double>(step));
      const double bc2 = 1.0 - std::pow(opts.beta2, static_cast<double>(step));
      for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(g[i])) {
          std::ostringstream os;
          os << "train: non-finite gradient at epoch " << epoch << ", step " << step << ", coordinate " << i;
          throw Error(ErrorKind::Runtime, os.str());
        }
        m[i] = opts.beta1 * m[i] + (1.0 - opts.beta1) * g[i];
        v[i] = opts.beta2 * v[i] + (1.0 - opts.beta2) * g[i] * g[i];
        theta[i] -= opts.learning_rate * (m[i] / bc1) / (std::sqrt(v[i] / bc2) + opts.epsilon);
      }
    }

    const ParameterSet current = unpack_parameters(theta);
    const double epoch_loss = mean_loss(current, all, c, opts.threads);
    if (!std::isfinite(epoch_loss)) {
      throw Error(ErrorKind::Runtime, "train: loss became non-finite at epoch " + std::to_string(epoch));
    }
    if (epoch_loss < run.best_loss) {
      run.best_loss = epoch_loss;
      run.best = current;
    }
    EpochLog log;
    log.epoch = epoch;
    log.batch_size = static_cast<int>(batch_size);
    log.train_loss = epoch_loss;
    log.best_loss = run.best_loss;
    log.validation_loss = mean_loss(current, val, c, opts.threads);
    run.history.push_back(log);
    if (opts.on_epoch) opts.on_epoch(log);

    if (epoch_loss < last_epoch_best) {
      last_epoch_best = epoch_loss;
      stagnant = 0;
    } else if (++stagnant >= opts.patience) {
      stagnant = 0;
      if (schedule_pos + 1 < opts.batch_schedule.size()) ++schedule_pos;
    }
  }
  return run;
}

}  // namespace smartjam
