#pragma once

#include "vsd/oracles.hpp"
#include "vsd/rng.hpp"
#include "vsd/schedule.hpp"
#include "vsd/score_network.hpp"

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace vsd {

// How the guidance weight depends on k and lambda.
//   constant: zeta = c0 + c1 lambda at every step
//   bayes:    zeta_k = (c0 + c1 lambda) (1 - alpha_k) / (2 sqrt(alpha_k) sigma_n^2)
// With c0 = 1, c1 = 0 the bayes form makes the guidance term equal the exact
// likelihood score of a Gaussian measurement evaluated at the Tweedie estimate.
enum class ZetaFormula { constant, bayes };

struct ZetaSchedule {
  ZetaFormula formula = ZetaFormula::constant;
  double c0 = 1.0;
  double c1 = 1.0;
  double multiplier = 1.0;  // global factor, swept by the zeta ablation

  double value(int k, double lambda, const NoiseSchedule& schedule, double noise_std) const;
};

enum class SigmaTilde { beta, posterior, exact_ck };
enum class NoiseScaling { sqrt_lambda, literal_alg1 };
enum class Guidance { oracle_score, dps };

std::string to_string(ZetaFormula v);
std::string to_string(SigmaTilde v);
std::string to_string(NoiseScaling v);
std::string to_string(Guidance v);
ZetaFormula parse_zeta_formula(const std::string& s);
SigmaTilde parse_sigma_tilde(const std::string& s);
NoiseScaling parse_noise_scaling(const std::string& s);
Guidance parse_guidance(const std::string& s);

struct SamplerConfig {
  double lambda = 1.0;
  ZetaSchedule zeta;
  SigmaTilde sigma_tilde = SigmaTilde::beta;
  NoiseScaling noise_scaling = NoiseScaling::sqrt_lambda;
  Guidance guidance = Guidance::oracle_score;
  std::uint64_t seed = 0;
  // DPS only: clamp each coordinate of x0_hat to [-x0_clip, x0_clip] before the
  // residual is taken (0 = off). Clipped coordinates carry no guidance.
  double x0_clip = 0.0;

  void validate() const;
  // Multiplies sigma_tilde_k to give the noise std of one reverse step.
  double noise_factor() const;
};

/// Exact conditional score of p(x_k | y) for a Gaussian posterior.
struct OracleGaussian {
  GaussianPosterior posterior;
};

/// Exact conditional score for the 1D mixture posterior.
struct OracleMixture {
  MixturePosterior posterior;
};

/// Learned prior score plus DPS guidance from a linear measurement.
struct LearnedDps {
  const ScoreNetwork* net = nullptr;
  MeasurementModel model;
};

using ScoreSource = std::variant<OracleGaussian, OracleMixture, LearnedDps>;

int data_dim(const ScoreSource& source);
Guidance natural_guidance(const ScoreSource& source);

/// x0_hat = (x_k + (1 - abar_k) score) / sqrt(abar_k).
Vector tweedie_x0(const Vector& score, const Vector& x_k, const NoiseSchedule& schedule, int k);
Samples tweedie_x0(const Samples& score, const Samples& x_k, const NoiseSchedule& schedule, int k);

struct GuidedScore {
  Samples score;     // network prior score
  Samples guidance;  // c_hat = -(sqrt(alpha_k) / (1 - alpha_k)) grad ||y - A x0_hat||^2
};

/// Prior score and DPS guidance at step k. `ys` holds one measurement per row
/// of x, or a single row shared by all. `clip` > 0 clamps x0_hat coordinatewise.
GuidedScore dps_guidance(const ScoreNetwork& net, const Samples& x_k, int k, const Samples& ys,
                         const MeasurementModel& model, const NoiseSchedule& schedule, double clip = 0.0);
Vector dps_guidance(const ScoreNetwork& net, const Vector& x_k, int k, const Vector& y, const MeasurementModel& model,
                    const NoiseSchedule& schedule, double clip = 0.0);

/// One reverse step k -> k-1 for a batch of chains. `noise` holds the
/// standard normal draws (one row per chain); pass zeros for the mean update.
Samples reverse_step(const Samples& x_k, int k, const SamplerConfig& config, const ScoreSource& source,
                     const Samples& ys, const NoiseSchedule& schedule, const Samples& noise);
Vector reverse_step(const Vector& x_k, int k, const SamplerConfig& config, const ScoreSource& source,
                    const Vector& y, const NoiseSchedule& schedule, Rng& rng);

/// Divergence guard threshold on the sup norm of any chain state.
inline constexpr double kDivergenceBound = 1e6;

struct SampleBatch {
  Samples x0;                      // n x d endpoints
  std::vector<Samples> trajectory;  // if recorded: element k holds x_k for all chains
};

/// Runs n independent chains from k = T to 0. Chain i draws x_T and all of its
/// noise from derive_seed(config.seed, {i}), so results depend neither on the
/// thread count nor on how chains are grouped.
SampleBatch sample_many(int n, const SamplerConfig& config, const ScoreSource& source, const Samples& ys,
                        const NoiseSchedule& schedule, bool record = false, int threads = 1);

struct Trajectory {
  std::vector<int> steps;  // T, T-1, ..., 0
  Samples states;          // row j is the state at steps[j]
  Vector x0;
  SamplerConfig config;
  std::uint64_t seed = 0;
};

/// Single chain (chain index 0 of sample_many).
Trajectory sample(const Vector& y, const SamplerConfig& config, const ScoreSource& source,
                  const NoiseSchedule& schedule, bool record = true);

struct DPPoint {
  double lambda = 0.0;
  double zeta_multiplier = 1.0;
  double mse = 0.0;
  double w2 = 0.0;
  double kl = 0.0;
  bool has_kl = false;
  bool kl_parametric = false;  // Gaussian-fit KL (multivariate data)
  bool degenerate = false;     // fewer than two samples: perception is not meaningful
  int n_samples = 0;
  std::uint64_t seed = 0;
};

// Observations for a sweep. Fixed mode: every chain sees the same y and the
// reconstructions are compared with independent draws from the true posterior.
// Paired mode: chain i sees ys.row(i) and is compared with the clean xs.row(i).
struct YSource {
  Samples ys;
  Samples references;
  bool paired = false;

  static YSource fixed(const Vector& y, Samples posterior_draws);
  static YSource pairs(Samples xs, Samples ys);
};

struct MetricOptions {
  int kl_bins = 100;
  int w2_exact_max = 1024;  // multivariate W2 uses the first this-many points
  bool compute_kl = true;
};

struct SweepResult {
  DPPoint point;
  Samples samples;
  std::string error;  // set when the sampler diverged; point is then unset
};

DPPoint evaluate_point(const Samples& reconstructions, const YSource& ysrc, const MetricOptions& metrics);

/// Samples and scores one configuration.
SweepResult run_point(const SamplerConfig& config, const YSource& ysrc, int n_samples, const ScoreSource& source,
                      const NoiseSchedule& schedule, const MetricOptions& metrics, int threads = 1);

/// Runs the template config at each lambda. Every lambda reuses the template
/// seed, so chains share their random numbers across lambda and repeated
/// lambdas give identical points. Divergence at one lambda is recorded in that
/// entry and the sweep continues.
std::vector<SweepResult> sweep_lambda(const std::vector<double>& lambdas, const YSource& ysrc, int n_samples,
                                      const SamplerConfig& config_template, const ScoreSource& source,
                                      const NoiseSchedule& schedule, const MetricOptions& metrics, int threads = 1);

}  // namespace vsd
