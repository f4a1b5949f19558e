#pragma once

#include "smartjam/jammer.hpp"
#include "smartjam/numerics.hpp"
#include "smartjam/rng.hpp"
#include "smartjam/scenario.hpp"
#include "smartjam/somaed.hpp"

#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace smartjam {

struct TrainingSample {
  CMat Y;
  CMat S_T;
  std::vector<std::uint8_t> bits;
  std::string jammer;
  double snr_db = 0.0;
  double weight = 1.0;  // 1 / (baseline BCE of this sample)
};

/// Negated binary cross-entropy (in bits) of the final SO-MAED bit
/// probabilities against the true bits, summed over all data bits. The BCE
/// log-likelihood is <= 0 and is maximized; this returns its negation.
double sample_bce(const ParameterSet& params, const TrainingSample& sample, const Constellation& c);

/// Negated BCE from probabilities directly.
double bce_bits(const std::vector<std::uint8_t>& bits, const std::vector<double>& probs);

/// Weighted loss sum_d beta_d * sample_bce(d).
double bce_loss(const ParameterSet& params, const std::vector<const TrainingSample*>& batch, const Constellation& c,
                int threads = 1);

struct TrainingSetSpec {
  int samples = 60;
  std::vector<double> snr_db = {0.0, 5.0, 10.0, 15.0};
  std::vector<double> jammer_power_db = {-std::numeric_limits<double>::infinity(), 0.0, 10.0, 20.0, 40.0, 80.0};
  PowerMode power_mode = PowerMode::RhoP;
  std::uint64_t seed = 7;
};

/// Lower bound on the baseline BCE used for the sample weights, in bits.
inline constexpr double kMinBaselineBce = 1.0;

/// The six pilot-jammer strengths relative to the average UE used for training.
std::vector<double> default_training_powers_db();

/// Pilot-jammer samples cycling over the power and SNR grids; weights come
/// from running `baseline` SO-MAED on each sample.
std::vector<TrainingSample> make_training_set(const SystemConfig& cfg, const TrainingSetSpec& spec,
                                              const ParameterSet& baseline, int threads = 1);

enum class GradientEstimator { Spsa, CentralDifferences };

struct EpochLog {
  int epoch = 0;
  int batch_size = 1;
  double train_loss = 0.0;  // mean weighted loss over the training split
  double best_loss = 0.0;
  double validation_loss = std::numeric_limits<double>::quiet_NaN();
};

struct TrainOptions {
  int epochs = 30;
  double learning_rate = 0.02;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double perturbation = 0.05;  // SPSA / finite-difference step in parameter space
  GradientEstimator estimator = GradientEstimator::Spsa;
  std::vector<int> batch_schedule = {1, 5, 10, 20};
  int patience = 2;  // stagnant epochs before moving to the next batch size
  std::uint64_t seed = 11;
  int threads = 1;
  std::function<void(const EpochLog&)> on_epoch;
};

struct TrainRun {
  std::vector<EpochLog> history;
  ParameterSet best;
  double init_loss = 0.0;
  double best_loss = 0.0;
};

/// Flat optimization vector: [log tau, gamma, alpha, log rho] per iteration.
std::vector<double> pack_parameters(const ParameterSet& p);
ParameterSet unpack_parameters(const std::vector<double>& theta);

/// Averaged SPSA estimate of the gradient of `loss` at theta.
std::vector<double> spsa_gradient(const std::function<double(const std::vector<double>&)>& loss,
                                  const std::vector<double>& theta, double perturbation, Rng& rng,
                                  int repetitions = 1);

/// Central-difference gradient, one coordinate at a time.
std::vector<double> central_difference_gradient(const std::function<double(const std::vector<double>&)>& loss,
                                                const std::vector<double>& theta, double perturbation);

/// Derivative-free Adam training of the SO-MAED weights. Requires >= 20 samples
/// in `train_set`. `validation_set` may be empty. Throws Runtime on a NaN loss.
TrainRun train(const ParameterSet& init, const std::vector<TrainingSample>& train_set,
               const std::vector<TrainingSample>& validation_set, const Constellation& c, const TrainOptions& opts);

}  // namespace smartjam
