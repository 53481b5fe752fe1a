#include "vsd/sampler.hpp"

#include "vsd/linalg.hpp"
#include "vsd/metrics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <thread>

namespace vsd {

double ZetaSchedule::value(int k, double lambda, const NoiseSchedule& schedule, double noise_std) const {
  const double base = multiplier * (c0 + c1 * lambda);
  if (formula == ZetaFormula::constant) return base;
  schedule.check_index(k);
  const double a = schedule.alpha[k];
  return base * (1.0 - a) / (2.0 * std::sqrt(a) * noise_std * noise_std);
}

std::string to_string(ZetaFormula v) { return v == ZetaFormula::constant ? "constant" : "bayes"; }
std::string to_string(SigmaTilde v) {
  switch (v) {
    case SigmaTilde::beta: return "beta";
    case SigmaTilde::posterior: return "posterior";
    case SigmaTilde::exact_ck: return "exact_ck";
  }
  return "";
}
std::string to_string(NoiseScaling v) { return v == NoiseScaling::sqrt_lambda ? "sqrt_lambda" : "literal_alg1"; }
std::string to_string(Guidance v) { return v == Guidance::oracle_score ? "oracle_score" : "dps"; }

ZetaFormula parse_zeta_formula(const std::string& s) {
  if (s == "constant") return ZetaFormula::constant;
  if (s == "bayes") return ZetaFormula::bayes;
  throw InvalidArgument("unknown zeta formula '" + s + "'");
}
SigmaTilde parse_sigma_tilde(const std::string& s) {
  if (s == "beta") return SigmaTilde::beta;
  if (s == "posterior") return SigmaTilde::posterior;
  if (s == "exact_ck") return SigmaTilde::exact_ck;
  throw InvalidArgument("unknown sigma_tilde '" + s + "'");
}
NoiseScaling parse_noise_scaling(const std::string& s) {
  if (s == "sqrt_lambda") return NoiseScaling::sqrt_lambda;
  if (s == "literal_alg1") return NoiseScaling::literal_alg1;
  throw InvalidArgument("unknown noise_scaling '" + s + "'");
}
Guidance parse_guidance(const std::string& s) {
  if (s == "oracle_score") return Guidance::oracle_score;
  if (s == "dps") return Guidance::dps;
  throw InvalidArgument("unknown guidance '" + s + "'");
}

void SamplerConfig::validate() const {
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw InvalidArgument("lambda must lie in [0, 1]");
  if (!(x0_clip >= 0.0)) throw InvalidArgument("x0_clip must be nonnegative");
  if (!(zeta.multiplier >= 0.0) || !(zeta.c0 + zeta.c1 * lambda >= 0.0) || !std::isfinite(zeta.c0 + zeta.c1))
    throw InvalidArgument("zeta must be nonnegative");
}

double SamplerConfig::noise_factor() const {
  return noise_scaling == NoiseScaling::sqrt_lambda ? std::sqrt(lambda) : lambda;
}

int data_dim(const ScoreSource& source) {
  return std::visit(
      [](const auto& s) -> int {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, OracleGaussian>) return s.posterior.dim();
        else if constexpr (std::is_same_v<S, OracleMixture>) return 1;
        else return s.net->data_dim();
      },
      source);
}

Guidance natural_guidance(const ScoreSource& source) {
  return std::holds_alternative<LearnedDps>(source) ? Guidance::dps : Guidance::oracle_score;
}

Vector tweedie_x0(const Vector& score, const Vector& x_k, const NoiseSchedule& schedule, int k) {
  schedule.check_index(k);
  const double ab = schedule.alpha_bar[k];
  return (x_k + (1.0 - ab) * score) / std::sqrt(ab);
}

Samples tweedie_x0(const Samples& score, const Samples& x_k, const NoiseSchedule& schedule, int k) {
  schedule.check_index(k);
  const double ab = schedule.alpha_bar[k];
  return (x_k + (1.0 - ab) * score) / std::sqrt(ab);
}

GuidedScore dps_guidance(const ScoreNetwork& net, const Samples& x_k, int k, const Samples& ys,
                         const MeasurementModel& model, const NoiseSchedule& schedule, double clip) {
  if (k < 1) throw InvalidArgument("guidance needs k >= 1");
  if (model.data_dim() != x_k.cols()) throw InvalidArgument("measurement operator does not match data dimension");
  if (ys.cols() != model.measurement_dim() || (ys.rows() != 1 && ys.rows() != x_k.rows()))
    throw InvalidArgument("observations must be one row or one row per chain");
  const double ab = schedule.alpha_bar[k];
  // d/dx0 ||y - A x0||^2 = -2 A^T (y - A x0), row-wise.
  auto residual_grad = [&](const Samples& score) -> Samples {
    Samples x0 = tweedie_x0(score, x_k, schedule, k);
    Samples inside;
    if (clip > 0.0) {
      inside = (x0.array().abs() <= clip).cast<double>();
      x0 = x0.cwiseMax(-clip).cwiseMin(clip);
    }
    Samples r = -(x0 * model.A.transpose());
    if (ys.rows() == 1) r.rowwise() += ys.row(0);
    else r += ys;
    Samples g = -2.0 * r * model.A;
    if (clip > 0.0) g = g.cwiseProduct(inside);
    return g;
  };
  Samples g0;
  ScoreWithVjp sv = score_eval_with_vjp(
      net, x_k, k,
      [&](const Samples& s) {
        g0 = residual_grad(s);
        return g0;
      },
      schedule);
  // Jacobian of x0_hat with respect to x_k is (I + (1 - abar) ds/dx) / sqrt(abar).
  const Samples grad = (g0 + (1.0 - ab) * sv.vjp) / std::sqrt(ab);
  const double a = schedule.alpha[k];
  return {std::move(sv.score), -(std::sqrt(a) / (1.0 - a)) * grad};
}

Vector dps_guidance(const ScoreNetwork& net, const Vector& x_k, int k, const Vector& y, const MeasurementModel& model,
                    const NoiseSchedule& schedule, double clip) {
  return dps_guidance(net, Samples(x_k.transpose()), k, Samples(y.transpose()), model, schedule, clip)
      .guidance.row(0)
      .transpose();
}

namespace {

void check_config_for_source(const SamplerConfig& config, const ScoreSource& source) {
  config.validate();
  if (config.guidance != natural_guidance(source))
    throw InvalidArgument("guidance '" + to_string(config.guidance) + "' does not match the score source");
  if (config.sigma_tilde == SigmaTilde::exact_ck && !std::holds_alternative<OracleGaussian>(source))
    throw InvalidArgument("sigma_tilde exact_ck needs a Gaussian oracle");
}

// Symmetric square roots of C_{k-1}, indexed by k (entry 0 unused).
std::vector<Matrix> exact_noise_factors(const GaussianPosterior& post, const NoiseSchedule& schedule) {
  std::vector<Matrix> out(static_cast<std::size_t>(schedule.T) + 1);
  for (int k = 1; k <= schedule.T; ++k)
    out[static_cast<std::size_t>(k)] = linalg::sqrt_psd(reverse_kernel_params(post, schedule, k - 1).C);
  return out;
}

Samples step_impl(const Samples& x, int k, const SamplerConfig& config, const ScoreSource& source, const Samples& ys,
                  const NoiseSchedule& schedule, const Samples& noise, const Matrix* exact_factor) {
  if (k < 1 || k > schedule.T) throw InvalidArgument("reverse step needs 1 <= k <= T");
  const double a = schedule.alpha[k];
  const double b = schedule.beta[k];
  Samples drift_score;
  if (const auto* g = std::get_if<OracleGaussian>(&source)) {
    drift_score = gaussian_diffused_score(g->posterior, schedule, k, x);
  } else if (const auto* m = std::get_if<OracleMixture>(&source)) {
    drift_score = x.unaryExpr([&](double v) { return diffused_mixture_score(m->posterior, schedule, k, v); });
  } else {
    const auto& l = std::get<LearnedDps>(source);
    GuidedScore gs = dps_guidance(*l.net, x, k, ys, l.model, schedule, config.x0_clip);
    const double zeta = config.zeta.value(k, config.lambda, schedule, l.model.noise_std);
    drift_score = gs.score + zeta * gs.guidance;
  }
  Samples out = (x + b * drift_score) / std::sqrt(a);

  const double f = config.noise_factor();
  switch (config.sigma_tilde) {
    case SigmaTilde::beta:
      out += (f * std::sqrt(b)) * noise;
      break;
    case SigmaTilde::posterior:
      out += (f * std::sqrt(b * (1.0 - schedule.alpha_bar[k - 1]) / (1.0 - schedule.alpha_bar[k]))) * noise;
      break;
    case SigmaTilde::exact_ck: {
      Matrix factor;
      if (!exact_factor) {
        const auto& post = std::get<OracleGaussian>(source).posterior;
        factor = linalg::sqrt_psd(reverse_kernel_params(post, schedule, k - 1).C);
        exact_factor = &factor;
      }
      out += f * (noise * *exact_factor);
      break;
    }
  }
  return out;
}

}  // namespace

Samples reverse_step(const Samples& x_k, int k, const SamplerConfig& config, const ScoreSource& source,
                     const Samples& ys, const NoiseSchedule& schedule, const Samples& noise) {
  check_config_for_source(config, source);
  if (x_k.cols() != data_dim(source) || noise.rows() != x_k.rows() || noise.cols() != x_k.cols())
    throw InvalidArgument("state and noise shapes do not match the score source");
  return step_impl(x_k, k, config, source, ys, schedule, noise, nullptr);
}

Vector reverse_step(const Vector& x_k, int k, const SamplerConfig& config, const ScoreSource& source, const Vector& y,
                    const NoiseSchedule& schedule, Rng& rng) {
  Samples noise(1, x_k.size());
  for (Eigen::Index j = 0; j < x_k.size(); ++j) noise(0, j) = rng.normal();
  return reverse_step(Samples(x_k.transpose()), k, config, source, Samples(y.transpose()), schedule, noise)
      .row(0)
      .transpose();
}

SampleBatch sample_many(int n, const SamplerConfig& config, const ScoreSource& source, const Samples& ys,
                        const NoiseSchedule& schedule, bool record, int threads) {
  if (n < 1) throw InvalidArgument("need at least one chain");
  check_config_for_source(config, source);
  const int d = data_dim(source);
  if (std::holds_alternative<LearnedDps>(source) && ys.rows() != 1 && ys.rows() != n)
    throw InvalidArgument("observations must be one row or one row per chain");

  std::vector<Matrix> factors;
  if (config.sigma_tilde == SigmaTilde::exact_ck)
    factors = exact_noise_factors(std::get<OracleGaussian>(source).posterior, schedule);

  const int T = schedule.T;
  SampleBatch batch;
  batch.x0.resize(n, d);
  if (record) batch.trajectory.assign(static_cast<std::size_t>(T) + 1, Samples(n, d));

  // Fixed block size keeps every floating-point reduction independent of the thread count.
  constexpr int kBlock = 256;
  const int blocks = (n + kBlock - 1) / kBlock;
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(blocks));
  std::atomic<int> next{0};

  auto run_block = [&](int bi) {
    const int start = bi * kBlock;
    const int len = std::min(kBlock, n - start);
    std::vector<Rng> rngs;
    rngs.reserve(static_cast<std::size_t>(len));
    for (int i = 0; i < len; ++i)
      rngs.emplace_back(derive_seed(config.seed, {static_cast<std::uint64_t>(start + i)}));
    Samples x(len, d);
    for (int i = 0; i < len; ++i)
      for (int j = 0; j < d; ++j) x(i, j) = rngs[static_cast<std::size_t>(i)].normal();
    const Samples block_ys = ys.rows() == n && n > 1 ? Samples(ys.middleRows(start, len)) : ys;
    Samples noise(len, d);
    for (int k = T; k >= 1; --k) {
      if (record) batch.trajectory[static_cast<std::size_t>(k)].middleRows(start, len) = x;
      for (int i = 0; i < len; ++i)
        for (int j = 0; j < d; ++j) noise(i, j) = rngs[static_cast<std::size_t>(i)].normal();
      x = step_impl(x, k, config, source, block_ys, schedule, noise,
                    factors.empty() ? nullptr : &factors[static_cast<std::size_t>(k)]);
      if (!x.allFinite() || x.cwiseAbs().maxCoeff() > kDivergenceBound)
        throw DivergenceError("sampler state diverged at step " + std::to_string(k), k);
    }
    if (record) batch.trajectory[0].middleRows(start, len) = x;
    batch.x0.middleRows(start, len) = x;
  };

  auto worker = [&] {
    for (int bi = next++; bi < blocks; bi = next++) {
      try {
        run_block(bi);
      } catch (...) {
        errors[static_cast<std::size_t>(bi)] = std::current_exception();
      }
    }
  };
  const int nthreads = std::clamp(threads, 1, blocks);
  std::vector<std::thread> pool;
  for (int t = 1; t < nthreads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return batch;
}

Trajectory sample(const Vector& y, const SamplerConfig& config, const ScoreSource& source,
                  const NoiseSchedule& schedule, bool record) {
  SampleBatch b = sample_many(1, config, source, Samples(y.transpose()), schedule, record, 1);
  Trajectory t;
  t.config = config;
  t.seed = config.seed;
  t.x0 = b.x0.row(0).transpose();
  if (record) {
    t.states.resize(schedule.T + 1, b.x0.cols());
    for (int k = schedule.T; k >= 0; --k) {
      t.steps.push_back(k);
      t.states.row(schedule.T - k) = b.trajectory[static_cast<std::size_t>(k)].row(0);
    }
  }
  return t;
}

YSource YSource::fixed(const Vector& y, Samples posterior_draws) {
  return {Samples(y.transpose()), std::move(posterior_draws), false};
}

YSource YSource::pairs(Samples xs, Samples ys) {
  if (xs.rows() != ys.rows()) throw InvalidArgument("paired observations need as many rows as clean samples");
  return {std::move(ys), std::move(xs), true};
}

DPPoint evaluate_point(const Samples& recon, const YSource& ysrc, const MetricOptions& metrics) {
  const Eigen::Index n = recon.rows();
  const Samples& refs = ysrc.references;
  if (refs.cols() != recon.cols()) throw InvalidArgument("reference dimension does not match reconstructions");
  if (refs.rows() < n) throw InvalidArgument("fewer reference samples than reconstructions");
  DPPoint p;
  p.n_samples = static_cast<int>(n);
  p.degenerate = n < 2;
  p.mse = mse_paired(recon, refs.topRows(n));
  if (recon.cols() == 1) {
    p.w2 = w2_empirical_1d(recon.col(0), refs.col(0));
    if (metrics.compute_kl) {
      p.kl = kl_estimate_1d(refs.col(0), recon.col(0), metrics.kl_bins);
      p.has_kl = true;
    }
  } else {
    const Eigen::Index m = std::min<Eigen::Index>(n, metrics.w2_exact_max);
    p.w2 = w2_exact_small(recon.topRows(m), refs.topRows(m));
    if (metrics.compute_kl && n >= 2) {
      try {
        p.kl = kl_gaussian_fit(refs, recon);
        p.has_kl = true;
        p.kl_parametric = true;
      } catch (const LinalgError&) {
        // Collapsed reconstructions have no Gaussian fit.
      }
    }
  }
  return p;
}

SweepResult run_point(const SamplerConfig& config, const YSource& ysrc, int n_samples, const ScoreSource& source,
                      const NoiseSchedule& schedule, const MetricOptions& metrics, int threads) {
  if (n_samples < 1) throw InvalidArgument("n_samples must be at least 1");
  if (ysrc.paired && ysrc.ys.rows() < n_samples) throw InvalidArgument("fewer observations than requested samples");
  const Samples ys = ysrc.paired ? Samples(ysrc.ys.topRows(n_samples)) : ysrc.ys;
  SweepResult r;
  try {
    r.samples = sample_many(n_samples, config, source, ys, schedule, false, threads).x0;
  } catch (const DivergenceError& e) {
    r.error = e.what();
    r.point.lambda = config.lambda;
    r.point.zeta_multiplier = config.zeta.multiplier;
    r.point.seed = config.seed;
    return r;
  }
  r.point = evaluate_point(r.samples, ysrc, metrics);
  r.point.lambda = config.lambda;
  r.point.zeta_multiplier = config.zeta.multiplier;
  r.point.seed = config.seed;
  return r;
}

std::vector<SweepResult> sweep_lambda(const std::vector<double>& lambdas, const YSource& ysrc, int n_samples,
                                      const SamplerConfig& config_template, const ScoreSource& source,
                                      const NoiseSchedule& schedule, const MetricOptions& metrics, int threads) {
  std::vector<SweepResult> out;
  for (double l : lambdas) {
    SamplerConfig c = config_template;
    c.lambda = l;
    out.push_back(run_point(c, ysrc, n_samples, source, schedule, metrics, threads));
  }
  return out;
}

}  // namespace vsd
