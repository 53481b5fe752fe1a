#include "vsd/trainer.hpp"

#include "vsd/checkpoint.hpp"

#include <chrono>
#include <cmath>

namespace vsd {

AdamState AdamState::zeros(std::size_t n) {
  const auto size = static_cast<Eigen::Index>(n);
  return {Vector::Zero(size), Vector::Zero(size), 0};
}

void adam_update(Vector& params, const Vector& grad, AdamState& state, const AdamConfig& cfg) {
  if (grad.size() != params.size() || state.m.size() != params.size() || state.v.size() != params.size())
    throw InvalidArgument("optimizer state does not match parameter count");
  state.t += 1;
  state.m = cfg.beta1 * state.m + (1.0 - cfg.beta1) * grad;
  state.v = cfg.beta2 * state.v + (1.0 - cfg.beta2) * grad.cwiseAbs2();
  const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.t));
  const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.t));
  params.array() -= cfg.learning_rate * (state.m.array() / c1) / ((state.v.array() / c2).sqrt() + cfg.epsilon);
}

void TrainConfig::validate() const {
  if (steps < 0) throw InvalidArgument("train.steps must be nonnegative");
  if (batch_size <= 0) throw InvalidArgument("train.batch_size must be positive");
  if (!(adam.learning_rate > 0.0)) throw InvalidArgument("train.learning_rate must be positive");
  if (!(adam.beta1 >= 0.0 && adam.beta1 < 1.0 && adam.beta2 >= 0.0 && adam.beta2 < 1.0))
    throw InvalidArgument("Adam decay rates must lie in [0, 1)");
  if (!(adam.epsilon > 0.0)) throw InvalidArgument("Adam epsilon must be positive");
  if (checkpoint_every < 0 || log_every < 0) throw InvalidArgument("intervals must be nonnegative");
}

BatchSource batches_from(Samples data) {
  if (data.rows() == 0) throw InvalidArgument("empty dataset");
  return [data = std::move(data)](std::uint64_t seed, int batch_size) {
    Rng rng(seed);
    Samples out(batch_size, data.cols());
    const int n = static_cast<int>(data.rows());
    for (int r = 0; r < batch_size; ++r) out.row(r) = data.row(rng.uniform_int(0, n - 1));
    return out;
  };
}

TrainResult train(const TrainConfig& config, const BatchSource& source, const NoiseSchedule& schedule,
                  ScoreNetwork net, std::optional<AdamState> adam, long start_step) {
  config.validate();
  if (start_step < 0 || start_step > config.steps) throw InvalidArgument("resume step outside the training range");
  AdamState state = adam ? std::move(*adam) : AdamState::zeros(net.parameter_count());

  TrainResult result{std::move(net), {}, start_step, {}, {}};
  const auto t0 = std::chrono::steady_clock::now();

  auto write_checkpoint = [&](long step) {
    if (config.checkpoint_path.empty()) return;
    save_checkpoint(config.checkpoint_path, {result.net, state, config.seed, step, config.config_json});
  };

  for (long s = start_step; s < config.steps; ++s) {
    const auto step = static_cast<std::uint64_t>(s);
    Samples batch = source(derive_seed(config.seed, {1, step}), config.batch_size);
    Rng noise(derive_seed(config.seed, {2, step}));
    LossAndGrad lg = dsm_loss_and_grad(result.net, batch, schedule, noise);
    if (!std::isfinite(lg.loss) || !lg.grad.allFinite())
      throw DivergenceError("training loss became non-finite", s + 1);
    adam_update(result.net.parameters(), lg.grad, state, config.adam);
    result.losses.push_back(lg.loss);

    const long done = s + 1;
    if ((config.log_every > 0 && done % config.log_every == 0) || done == config.steps) {
      const double ms =
          std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
      result.log.push_back({done, lg.loss, ms});
    }
    if (config.checkpoint_every > 0 && done % config.checkpoint_every == 0 && done != config.steps)
      write_checkpoint(done);
  }
  result.step = config.steps;
  write_checkpoint(config.steps);
  result.adam = std::move(state);
  return result;
}

}  // namespace vsd
