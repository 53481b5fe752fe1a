#pragma once

#include "vsd/datasets.hpp"
#include "vsd/sampler.hpp"
#include "vsd/score_network.hpp"
#include "vsd/trainer.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace vsd {

enum class SourceKind { gaussian_oracle, mixture_oracle, learned };
std::string to_string(SourceKind k);

/// Fully resolved run configuration. Every field has a default; a config file
/// only lists what it changes. Unknown keys are rejected.
struct RunConfig {
  std::uint64_t seed = 0;
  std::string output_dir = "out";  // not part of the embedded config
  int threads = 1;                 // not part of the embedded config

  struct Schedule {
    int T = 1000;
    double beta_min = 1e-4;
    double beta_max = 0.02;
  } schedule;

  SourceKind source = SourceKind::mixture_oracle;
  std::vector<double> y;  // observation for fixed-y runs

  DatasetSpec dataset;
  // Linear channel y = a x + N(0, noise_std^2). Also defines the mixture
  // oracle's a and sigma0.
  struct Measurement {
    double a = 1.0;
    double noise_std = 0.5;
  } measurement;

  // Gaussian oracle: either a posterior given directly, or a prior that is
  // conditioned on `y` through the measurement channel.
  struct Gaussian {
    std::vector<double> posterior_mean;
    std::vector<std::vector<double>> posterior_cov;
    std::vector<double> prior_mean;
    std::vector<std::vector<double>> prior_cov;
  } gaussian;

  NetworkShape network;
  Parameterization parameterization = Parameterization::epsilon;

  struct Train {
    long steps = 20000;
    int batch_size = 256;
    AdamConfig adam;
    long log_every = 100;
    long checkpoint_every = 0;
    int dataset_size = 0;      // 0: fresh samples every step
    bool log_wall_time = false;
  } train;

  std::string checkpoint;  // network for learned runs

  struct Sampler {
    double lambda = 1.0;
    ZetaSchedule zeta;
    SigmaTilde sigma_tilde = SigmaTilde::beta;
    NoiseScaling noise_scaling = NoiseScaling::sqrt_lambda;
    double x0_clip = 0.0;
    int n_samples = 1000;
  } sampler;

  struct Sweep {
    std::vector<double> lambdas{0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
    std::vector<double> zeta_multipliers{0.25, 0.5, 1.0, 2.0, 4.0};
    bool paired = false;
    int n_samples = 1000;
    int n_references = 0;  // fixed mode; 0 means n_samples
    int kl_bins = 100;
    int w2_exact_max = 1024;
    bool write_samples = true;
  } sweep;

  struct Trajectories {
    std::vector<double> lambdas{0.0, 0.3, 0.8, 1.0};
    int n_trajectories = 10;
    int n_endpoints = 1000;
    bool record = true;
  } trajectories;

  struct OracleReport {
    std::vector<double> lambdas{0.0, 0.25, 0.5, 0.75, 1.0};
    double rel_tol = 1e-6;
    int mc_samples = 2000;
  } oracle_report;

  struct Curve {
    double trace_sigma = 1.0;
    std::vector<double> p_values{0.0, 0.25, 0.5, 0.75, 1.0, 1.25, 1.5};
  } curve;

  /// Throws ConfigError on inconsistent values.
  void validate() const;

  /// Canonical JSON of everything except output_dir and threads.
  std::string embedded_json() const;

  NoiseSchedule build_schedule() const;
  MeasurementModel measurement_model() const;
  MixtureModel mixture_model() const;
  GaussianPosterior gaussian_posterior() const;
  SamplerConfig sampler_config() const;
  TrainConfig train_config() const;
};

/// Parses JSON text. Syntax errors and schema violations raise ConfigError
/// with a "<name>:<line>:<col>:" prefix.
RunConfig parse_config(const std::string& text, const std::string& name = "config");
RunConfig load_config(const std::string& path);

}  // namespace vsd
