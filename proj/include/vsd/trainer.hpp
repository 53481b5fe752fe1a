#pragma once

#include "vsd/schedule.hpp"
#include "vsd/score_network.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace vsd {

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamState {
  Vector m;
  Vector v;
  long t = 0;

  static AdamState zeros(std::size_t n);
};

// One bias-corrected Adam update of `params` in place.
void adam_update(Vector& params, const Vector& grad, AdamState& state, const AdamConfig& cfg);

struct TrainConfig {
  long steps = 20000;
  int batch_size = 256;
  AdamConfig adam;
  std::uint64_t seed = 0;
  std::string checkpoint_path;   // empty: no checkpoint files
  long checkpoint_every = 0;     // 0: only at the end
  long log_every = 100;
  std::string config_json;       // embedded verbatim in checkpoints

  void validate() const;
};

// Produces a batch of clean samples (rows) for the given derived seed.
using BatchSource = std::function<Samples(std::uint64_t seed, int batch_size)>;

// Resamples rows of a fixed dataset uniformly with replacement.
BatchSource batches_from(Samples data);

struct TrainLogRow {
  long step = 0;
  double loss = 0.0;
  double wall_ms = 0.0;
};

struct TrainResult {
  ScoreNetwork net;
  AdamState adam;
  long step = 0;
  std::vector<double> losses;       // one entry per step run in this call
  std::vector<TrainLogRow> log;
};

/// Runs denoising score matching with Adam from `net` (and `adam`, if
/// resuming) up to config.steps total steps. Step s draws its batch from
/// derive_seed(seed, {1, s}) and its noise from derive_seed(seed, {2, s}), so a
/// resumed run replays an uninterrupted one exactly.
TrainResult train(const TrainConfig& config, const BatchSource& source, const NoiseSchedule& schedule,
                  ScoreNetwork net, std::optional<AdamState> adam = std::nullopt, long start_step = 0);

}  // namespace vsd
