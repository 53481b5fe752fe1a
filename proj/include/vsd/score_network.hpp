#pragma once

#include "vsd/rng.hpp"
#include "vsd/schedule.hpp"
#include "vsd/types.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace vsd {

enum class Parameterization { epsilon, score };
enum class Activation { silu, identity };

std::string to_string(Parameterization p);
std::string to_string(Activation a);
Parameterization parse_parameterization(const std::string& s);
Activation parse_activation(const std::string& s);

/// Layer widths of the three-block score network: an encoder on x, an encoder
/// on the sinusoidal time embedding, and a decoder on their concatenation.
/// The defaults give 26498 parameters for data_dim = 2.
struct NetworkShape {
  int data_dim = 2;
  int embed_dim = 16;
  std::vector<int> encoder_layers{16};
  int encoding_dim = 32;
  std::vector<int> decoder_layers{128, 128};
  Activation activation = Activation::silu;

  void validate() const;
  bool operator==(const NetworkShape&) const = default;
};

struct DenseLayer {
  int in = 0;
  int out = 0;
  std::size_t weight_offset = 0;  // column-major out x in block
  std::size_t bias_offset = 0;
};

/// Time-conditioned MLP approximating the score of the diffused data
/// distribution. All parameters live in one flat buffer in declared layer
/// order (x encoder, time encoder, decoder; weight then bias per layer).
class ScoreNetwork {
 public:
  ScoreNetwork(NetworkShape shape, Parameterization parameterization);

  // Glorot-uniform weights, zero biases.
  static ScoreNetwork initialized(NetworkShape shape, Parameterization parameterization, std::uint64_t seed);

  const NetworkShape& shape() const { return shape_; }
  Parameterization parameterization() const { return parameterization_; }
  int data_dim() const { return shape_.data_dim; }
  std::size_t parameter_count() const { return static_cast<std::size_t>(params_.size()); }

  const Vector& parameters() const { return params_; }
  Vector& parameters() { return params_; }

  const std::vector<DenseLayer>& x_encoder() const { return x_encoder_; }
  const std::vector<DenseLayer>& t_encoder() const { return t_encoder_; }
  const std::vector<DenseLayer>& decoder() const { return decoder_; }

  Eigen::Map<const Matrix> weight(const DenseLayer& l) const;
  Eigen::Map<const Vector> bias(const DenseLayer& l) const;
  Eigen::Map<Matrix> weight(const DenseLayer& l);
  Eigen::Map<Vector> bias(const DenseLayer& l);

 private:
  NetworkShape shape_;
  Parameterization parameterization_;
  std::vector<DenseLayer> x_encoder_;
  std::vector<DenseLayer> t_encoder_;
  std::vector<DenseLayer> decoder_;
  Vector params_;
};

/// Sinusoidal embedding of k / T, one column per entry of `steps`.
Matrix time_embedding(std::span<const int> steps, int T, int embed_dim);

/// Raw network output (epsilon or score, depending on parameterization) for a
/// column-major batch x (d x B) with per-column steps.
Matrix network_forward(const ScoreNetwork& net, const Matrix& x_cols, std::span<const int> steps, int T);

/// Score estimate for samples stored as rows (n x d) at a common step k.
Samples score_eval(const ScoreNetwork& net, const Samples& x, int k, const NoiseSchedule& schedule);
Vector score_eval(const ScoreNetwork& net, const Vector& x, int k, const NoiseSchedule& schedule);

/// Row-wise v^T (d score / d x) for samples and cotangents stored as rows.
Samples score_vjp(const ScoreNetwork& net, const Samples& x, int k, const Samples& cotangent,
                  const NoiseSchedule& schedule);
Vector score_vjp(const ScoreNetwork& net, const Vector& x, int k, const Vector& cotangent,
                 const NoiseSchedule& schedule);

/// Score estimate together with the row-wise VJP against `cotangent`, sharing
/// one forward pass.
struct ScoreWithVjp {
  Samples score;
  Samples vjp;
};
ScoreWithVjp score_eval_with_vjp(const ScoreNetwork& net, const Samples& x, int k, const Samples& cotangent,
                                 const NoiseSchedule& schedule);

/// As above, but the cotangent is computed from the score itself (needed when
/// differentiating a function of the Tweedie estimate).
ScoreWithVjp score_eval_with_vjp(const ScoreNetwork& net, const Samples& x, int k,
                                 const std::function<Samples(const Samples& score)>& cotangent,
                                 const NoiseSchedule& schedule);

struct LossAndGrad {
  double loss = 0.0;
  Vector grad;
};

/// Denoising score matching on a batch of clean rows. For every row a step
/// k ~ U{1..T} is drawn, then the noise vector, in row order from `rng`.
/// Loss is the mean over rows of ||eps_hat - eps||^2.
LossAndGrad dsm_loss_and_grad(const ScoreNetwork& net, const Samples& batch, const NoiseSchedule& schedule,
                              Rng& rng);

}  // namespace vsd
