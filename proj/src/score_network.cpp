#include "vsd/score_network.hpp"

#include <cmath>

namespace vsd {

std::string to_string(Parameterization p) { return p == Parameterization::epsilon ? "epsilon" : "score"; }
std::string to_string(Activation a) { return a == Activation::silu ? "silu" : "identity"; }

Parameterization parse_parameterization(const std::string& s) {
  if (s == "epsilon") return Parameterization::epsilon;
  if (s == "score") return Parameterization::score;
  throw InvalidArgument("unknown parameterization '" + s + "'");
}

Activation parse_activation(const std::string& s) {
  if (s == "silu") return Activation::silu;
  if (s == "identity") return Activation::identity;
  throw InvalidArgument("unknown activation '" + s + "'");
}

void NetworkShape::validate() const {
  auto positive = [](int v) { return v > 0; };
  if (!positive(data_dim) || !positive(encoding_dim)) throw InvalidArgument("network dims must be positive");
  if (embed_dim < 4 || embed_dim % 2 != 0) throw InvalidArgument("embed_dim must be even and at least 4");
  for (int w : encoder_layers)
    if (!positive(w)) throw InvalidArgument("encoder widths must be positive");
  for (int w : decoder_layers)
    if (!positive(w)) throw InvalidArgument("decoder widths must be positive");
}

namespace {

std::vector<DenseLayer> chain(int in, const std::vector<int>& hidden, int out, std::size_t& offset) {
  std::vector<DenseLayer> layers;
  int prev = in;
  auto push = [&](int next) {
    DenseLayer l;
    l.in = prev;
    l.out = next;
    l.weight_offset = offset;
    offset += static_cast<std::size_t>(prev) * next;
    l.bias_offset = offset;
    offset += next;
    layers.push_back(l);
    prev = next;
  };
  for (int w : hidden) push(w);
  push(out);
  return layers;
}

}  // namespace

ScoreNetwork::ScoreNetwork(NetworkShape shape, Parameterization parameterization)
    : shape_(std::move(shape)), parameterization_(parameterization) {
  shape_.validate();
  std::size_t offset = 0;
  x_encoder_ = chain(shape_.data_dim, shape_.encoder_layers, shape_.encoding_dim, offset);
  t_encoder_ = chain(shape_.embed_dim, shape_.encoder_layers, shape_.encoding_dim, offset);
  decoder_ = chain(2 * shape_.encoding_dim, shape_.decoder_layers, shape_.data_dim, offset);
  params_ = Vector::Zero(static_cast<Eigen::Index>(offset));
}

ScoreNetwork ScoreNetwork::initialized(NetworkShape shape, Parameterization parameterization, std::uint64_t seed) {
  ScoreNetwork net(std::move(shape), parameterization);
  Rng rng(seed);
  auto init = [&](const std::vector<DenseLayer>& layers) {
    for (const auto& l : layers) {
      const double limit = std::sqrt(6.0 / (l.in + l.out));
      auto w = net.weight(l);
      for (Eigen::Index j = 0; j < w.cols(); ++j)
        for (Eigen::Index i = 0; i < w.rows(); ++i) w(i, j) = limit * (2.0 * rng.uniform() - 1.0);
    }
  };
  init(net.x_encoder_);
  init(net.t_encoder_);
  init(net.decoder_);
  return net;
}

Eigen::Map<const Matrix> ScoreNetwork::weight(const DenseLayer& l) const {
  return {params_.data() + l.weight_offset, l.out, l.in};
}
Eigen::Map<const Vector> ScoreNetwork::bias(const DenseLayer& l) const {
  return {params_.data() + l.bias_offset, l.out};
}
Eigen::Map<Matrix> ScoreNetwork::weight(const DenseLayer& l) { return {params_.data() + l.weight_offset, l.out, l.in}; }
Eigen::Map<Vector> ScoreNetwork::bias(const DenseLayer& l) { return {params_.data() + l.bias_offset, l.out}; }

Matrix time_embedding(std::span<const int> steps, int T, int embed_dim) {
  const int half = embed_dim / 2;
  Matrix e(embed_dim, static_cast<Eigen::Index>(steps.size()));
  for (std::size_t c = 0; c < steps.size(); ++c) {
    const double t = 1000.0 * steps[c] / T;
    for (int i = 0; i < half; ++i) {
      const double f = std::exp(-std::log(10000.0) * i / (half - 1));
      e(i, static_cast<Eigen::Index>(c)) = std::sin(t * f);
      e(half + i, static_cast<Eigen::Index>(c)) = std::cos(t * f);
    }
  }
  return e;
}

namespace {

// Per-layer inputs and pre-activations of one block, kept for the backward pass.
struct BlockTape {
  std::vector<Matrix> input;
  std::vector<Matrix> pre;
};

inline double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

Matrix activate(const Matrix& z, Activation a) {
  if (a == Activation::identity) return z;
  return z.unaryExpr([](double v) { return v * sigmoid(v); });
}

Matrix activation_grad(const Matrix& z, Activation a) {
  if (a == Activation::identity) return Matrix::Ones(z.rows(), z.cols());
  return z.unaryExpr([](double v) {
    const double s = sigmoid(v);
    return s * (1.0 + v * (1.0 - s));
  });
}

Matrix block_forward(const ScoreNetwork& net, const std::vector<DenseLayer>& layers, Matrix h, BlockTape* tape) {
  const Activation act = net.shape().activation;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    Matrix z = net.weight(layers[i]) * h;
    z.colwise() += net.bias(layers[i]);
    if (tape) tape->input.push_back(std::move(h));
    if (i + 1 < layers.size()) {
      h = activate(z, act);
      if (tape) tape->pre.push_back(std::move(z));
    } else {
      if (tape) tape->pre.push_back(z);
      h = std::move(z);
    }
  }
  return h;
}

// Propagates g (gradient w.r.t. block output) back to the block input. When
// `grad` is non-null, parameter gradients are accumulated into it.
Matrix block_backward(const ScoreNetwork& net, const std::vector<DenseLayer>& layers, const BlockTape& tape,
                      Matrix g, Vector* grad) {
  const Activation act = net.shape().activation;
  for (std::size_t i = layers.size(); i-- > 0;) {
    if (i + 1 < layers.size()) g = g.cwiseProduct(activation_grad(tape.pre[i], act));
    const DenseLayer& l = layers[i];
    if (grad) {
      Eigen::Map<Matrix>(grad->data() + l.weight_offset, l.out, l.in).noalias() += g * tape.input[i].transpose();
      Eigen::Map<Vector>(grad->data() + l.bias_offset, l.out) += g.rowwise().sum();
    }
    g = net.weight(l).transpose() * g;
  }
  return g;
}

struct NetTape {
  BlockTape x, t, dec;
};

Matrix forward_impl(const ScoreNetwork& net, const Matrix& x_cols, std::span<const int> steps, int T, NetTape* tape) {
  if (x_cols.rows() != net.data_dim()) throw InvalidArgument("input dimension does not match network");
  if (static_cast<Eigen::Index>(steps.size()) != x_cols.cols()) throw InvalidArgument("one step per column required");
  const int e = net.shape().encoding_dim;
  Matrix hx = block_forward(net, net.x_encoder(), x_cols, tape ? &tape->x : nullptr);
  Matrix ht = block_forward(net, net.t_encoder(), time_embedding(steps, T, net.shape().embed_dim),
                            tape ? &tape->t : nullptr);
  Matrix cat(2 * e, x_cols.cols());
  cat.topRows(e) = hx;
  cat.bottomRows(e) = ht;
  return block_forward(net, net.decoder(), std::move(cat), tape ? &tape->dec : nullptr);
}

// d(score)/d(raw output) is a scalar per column.
double output_to_score(const ScoreNetwork& net, int k, const NoiseSchedule& schedule) {
  schedule.check_index(k);
  if (net.parameterization() == Parameterization::score) return 1.0;
  if (k == 0) throw InvalidArgument("score is undefined at k = 0 under epsilon parameterization");
  return -1.0 / std::sqrt(1.0 - schedule.alpha_bar[k]);
}

}  // namespace

Matrix network_forward(const ScoreNetwork& net, const Matrix& x_cols, std::span<const int> steps, int T) {
  return forward_impl(net, x_cols, steps, T, nullptr);
}

Samples score_eval(const ScoreNetwork& net, const Samples& x, int k, const NoiseSchedule& schedule) {
  const double c = output_to_score(net, k, schedule);
  std::vector<int> steps(static_cast<std::size_t>(x.rows()), k);
  return (c * forward_impl(net, x.transpose(), steps, schedule.T, nullptr)).transpose();
}

Vector score_eval(const ScoreNetwork& net, const Vector& x, int k, const NoiseSchedule& schedule) {
  const double c = output_to_score(net, k, schedule);
  const int steps[1] = {k};
  return c * forward_impl(net, Matrix(x), steps, schedule.T, nullptr).col(0);
}

ScoreWithVjp score_eval_with_vjp(const ScoreNetwork& net, const Samples& x, int k,
                                 const std::function<Samples(const Samples& score)>& cotangent,
                                 const NoiseSchedule& schedule) {
  const double c = output_to_score(net, k, schedule);
  std::vector<int> steps(static_cast<std::size_t>(x.rows()), k);
  NetTape tape;
  ScoreWithVjp out;
  out.score = (c * forward_impl(net, x.transpose(), steps, schedule.T, &tape)).transpose();
  const Samples v = cotangent(out.score);
  if (v.rows() != x.rows() || v.cols() != x.cols()) throw InvalidArgument("cotangent shape does not match input");
  Matrix g = block_backward(net, net.decoder(), tape.dec, c * v.transpose(), nullptr);
  out.vjp = block_backward(net, net.x_encoder(), tape.x, g.topRows(net.shape().encoding_dim), nullptr).transpose();
  return out;
}

ScoreWithVjp score_eval_with_vjp(const ScoreNetwork& net, const Samples& x, int k, const Samples& cotangent,
                                 const NoiseSchedule& schedule) {
  return score_eval_with_vjp(net, x, k, [&](const Samples&) { return cotangent; }, schedule);
}

Samples score_vjp(const ScoreNetwork& net, const Samples& x, int k, const Samples& cotangent,
                  const NoiseSchedule& schedule) {
  return score_eval_with_vjp(net, x, k, cotangent, schedule).vjp;
}

Vector score_vjp(const ScoreNetwork& net, const Vector& x, int k, const Vector& cotangent,
                 const NoiseSchedule& schedule) {
  return score_vjp(net, Samples(x.transpose()), k, Samples(cotangent.transpose()), schedule).row(0).transpose();
}

LossAndGrad dsm_loss_and_grad(const ScoreNetwork& net, const Samples& batch, const NoiseSchedule& schedule,
                              Rng& rng) {
  const Eigen::Index n = batch.rows();
  const int d = net.data_dim();
  if (n == 0) throw InvalidArgument("empty training batch");
  if (batch.cols() != d) throw InvalidArgument("batch dimension does not match network");
  if (!batch.allFinite()) throw InvalidArgument("training batch has non-finite entries");

  std::vector<int> steps(static_cast<std::size_t>(n));
  Matrix eps(d, n);
  Matrix xk(d, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const int k = rng.uniform_int(1, schedule.T);
    steps[static_cast<std::size_t>(r)] = k;
    for (int j = 0; j < d; ++j) eps(j, r) = rng.normal();
    const double ab = schedule.alpha_bar[k];
    xk.col(r) = std::sqrt(ab) * batch.row(r).transpose() + std::sqrt(1.0 - ab) * eps.col(r);
  }

  NetTape tape;
  Matrix out = forward_impl(net, xk, steps, schedule.T, &tape);

  // Noise estimate and its derivative with respect to the raw output, per column.
  Vector scale = Vector::Ones(n);
  if (net.parameterization() == Parameterization::score)
    for (Eigen::Index r = 0; r < n; ++r) scale(r) = -std::sqrt(1.0 - schedule.alpha_bar[steps[static_cast<std::size_t>(r)]]);
  Matrix resid = out * scale.asDiagonal() - eps;

  LossAndGrad result;
  result.loss = resid.squaredNorm() / static_cast<double>(n);
  result.grad = Vector::Zero(static_cast<Eigen::Index>(net.parameter_count()));
  Matrix g = (2.0 / static_cast<double>(n)) * resid * scale.asDiagonal();
  Matrix gcat = block_backward(net, net.decoder(), tape.dec, std::move(g), &result.grad);
  const int e = net.shape().encoding_dim;
  block_backward(net, net.x_encoder(), tape.x, gcat.topRows(e), &result.grad);
  block_backward(net, net.t_encoder(), tape.t, gcat.bottomRows(e), &result.grad);
  return result;
}

}  // namespace vsd
