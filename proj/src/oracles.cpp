#include "vsd/oracles.hpp"

#include "vsd/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <limits>

namespace vsd {

namespace {

double log_normal_pdf(double x, double mean, double var) {
  const double r = x - mean;
  return -0.5 * (std::log(2.0 * std::numbers::pi * var) + r * r / var);
}

double log_sum_exp(const std::vector<double>& v) {
  const double m = *std::max_element(v.begin(), v.end());
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

void check_lambda(double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw InvalidArgument("lambda must lie in [0, 1]");
}

}  // namespace

void GaussianPosterior::validate() const {
  if (mean.size() == 0 || cov.rows() != mean.size() || cov.cols() != mean.size())
    throw InvalidArgument("posterior mean and covariance dimensions disagree");
  if (!mean.allFinite() || !cov.allFinite()) throw InvalidArgument("posterior has non-finite entries");
  if ((cov - cov.transpose()).cwiseAbs().maxCoeff() > 1e-9 * (1.0 + cov.cwiseAbs().maxCoeff()))
    throw InvalidArgument("posterior covariance is not symmetric");
  if (!linalg::is_psd(cov)) throw InvalidArgument("posterior covariance is not positive semi-definite");
}

GaussianPosterior gaussian_posterior(const Vector& prior_mean, const Matrix& prior_cov, const MeasurementModel& model,
                                     const Vector& y) {
  model.validate();
  GaussianPosterior prior{prior_mean, prior_cov};
  prior.validate();
  if (model.data_dim() != prior.dim() || y.size() != model.measurement_dim())
    throw InvalidArgument("measurement model dimensions do not match prior and observation");
  // Gain form: needs only the innovation covariance to be invertible, so
  // degenerate priors are allowed.
  const Matrix& A = model.A;
  const Matrix S = A * prior_cov * A.transpose() +
                   model.noise_std * model.noise_std * Matrix::Identity(A.rows(), A.rows());
  const Matrix gain_t = linalg::solve_spd(S, A * prior_cov);  // K^T
  GaussianPosterior post;
  post.mean = prior_mean + gain_t.transpose() * (y - A * prior_mean);
  post.cov = linalg::symmetrize(prior_cov - gain_t.transpose() * A * prior_cov);
  return post;
}

void MixtureModel::validate() const {
  if (weights.empty() || means.size() != weights.size() || stds.size() != weights.size())
    throw InvalidArgument("mixture needs equally many weights, means and stds");
  double total = 0.0;
  for (std::size_t i = 0; i < size(); ++i) {
    if (!(weights[i] >= 0.0)) throw InvalidArgument("mixture weights must be nonnegative");
    if (!(stds[i] > 0.0)) throw InvalidArgument("mixture stds must be positive");
    if (!std::isfinite(means[i])) throw InvalidArgument("mixture means must be finite");
    total += weights[i];
  }
  if (std::abs(total - 1.0) > 1e-12) throw InvalidArgument("mixture weights must sum to 1");
  if (!(sigma0 > 0.0)) throw InvalidArgument("measurement noise std must be positive");
  if (!std::isfinite(a)) throw InvalidArgument("measurement scale must be finite");
}

MixtureModel MixtureModel::canonical() { return {{0.5, 0.5}, {-1.0, 1.0}, {0.5, 0.5}, 1.0, 0.5}; }

MixturePosterior mixture_posterior(const MixtureModel& model, double y) {
  model.validate();
  const std::size_t n = model.size();
  const double s0 = model.sigma0 * model.sigma0;
  MixturePosterior post;
  std::vector<double> logw(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double vi = model.stds[i] * model.stds[i];
    logw[i] = model.weights[i] > 0.0
                  ? std::log(model.weights[i]) + log_normal_pdf(y, model.a * model.means[i], model.a * model.a * vi + s0)
                  : -std::numeric_limits<double>::infinity();
    const double precision = model.a * model.a / s0 + 1.0 / vi;
    post.vars.push_back(1.0 / precision);
    post.means.push_back((model.means[i] / vi + model.a * y / s0) / precision);
  }
  const double z = log_sum_exp(logw);
  for (double lw : logw) post.resp.push_back(std::exp(lw - z));
  return post;
}

double MixturePosterior::mean() const {
  double m = 0.0;
  for (std::size_t i = 0; i < resp.size(); ++i) m += resp[i] * means[i];
  return m;
}

double MixturePosterior::variance() const {
  const double m = mean();
  double v = 0.0;
  for (std::size_t i = 0; i < resp.size(); ++i) v += resp[i] * (vars[i] + (means[i] - m) * (means[i] - m));
  return v;
}

double MixturePosterior::log_density(double x) const {
  std::vector<double> terms;
  for (std::size_t i = 0; i < resp.size(); ++i)
    terms.push_back(resp[i] > 0.0 ? std::log(resp[i]) + log_normal_pdf(x, means[i], vars[i])
                                  : -std::numeric_limits<double>::infinity());
  return log_sum_exp(terms);
}

Vector MixturePosterior::sample(int n, Rng& rng) const {
  Vector out(n);
  for (int s = 0; s < n; ++s) {
    double u = rng.uniform();
    std::size_t i = 0;
    while (i + 1 < resp.size() && u >= resp[i]) u -= resp[i++];
    out[s] = means[i] + std::sqrt(vars[i]) * rng.normal();
  }
  return out;
}

Vector mmse_estimate(const GaussianPosterior& posterior) { return posterior.mean; }
double mmse_estimate(const MixturePosterior& posterior) { return posterior.mean(); }

MarginalMoments diffused_conditional_moments(const GaussianPosterior& posterior, const NoiseSchedule& schedule, int k) {
  schedule.check_index(k);
  const double ab = schedule.alpha_bar[k];
  MarginalMoments m;
  m.k = k;
  m.mu = std::sqrt(ab) * posterior.mean;
  m.sigma = (1.0 - ab) * Matrix::Identity(posterior.dim(), posterior.dim()) + ab * posterior.cov;
  return m;
}

Samples gaussian_diffused_score(const GaussianPosterior& posterior, const NoiseSchedule& schedule, int k,
                                const Samples& x) {
  if (x.cols() != posterior.dim()) throw InvalidArgument("sample dimension does not match posterior");
  const MarginalMoments m = diffused_conditional_moments(posterior, schedule, k);
  Matrix centered = (x.rowwise() - m.mu.transpose()).transpose();
  return -linalg::solve_spd(m.sigma, centered).transpose();
}

namespace {

// Log of each weighted component of p(x_k | y) and the component's variance.
void mixture_terms(const MixturePosterior& p, const NoiseSchedule& schedule, int k, double x, std::vector<double>& logt,
                   std::vector<double>& var, std::vector<double>& mean) {
  schedule.check_index(k);
  const double ab = schedule.alpha_bar[k];
  const std::size_t n = p.resp.size();
  logt.resize(n);
  var.resize(n);
  mean.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    mean[i] = std::sqrt(ab) * p.means[i];
    var[i] = ab * p.vars[i] + 1.0 - ab;
    logt[i] = p.resp[i] > 0.0 ? std::log(p.resp[i]) + log_normal_pdf(x, mean[i], var[i])
                              : -std::numeric_limits<double>::infinity();
  }
}

}  // namespace

double diffused_mixture_log_density(const MixturePosterior& posterior, const NoiseSchedule& schedule, int k, double x) {
  std::vector<double> logt, var, mean;
  mixture_terms(posterior, schedule, k, x, logt, var, mean);
  return log_sum_exp(logt);
}

double diffused_mixture_score(const MixturePosterior& posterior, const NoiseSchedule& schedule, int k, double x) {
  std::vector<double> logt, var, mean;
  mixture_terms(posterior, schedule, k, x, logt, var, mean);
  const double z = log_sum_exp(logt);
  double s = 0.0;
  for (std::size_t i = 0; i < logt.size(); ++i) s += std::exp(logt[i] - z) * (-(x - mean[i]) / var[i]);
  return s;
}

double diffused_mixture_score(const MixtureModel& model, double y, const NoiseSchedule& schedule, int k, double x) {
  return diffused_mixture_score(mixture_posterior(model, y), schedule, k, x);
}

double mixture_tweedie_mean(const MixturePosterior& posterior, const NoiseSchedule& schedule, int k, double x) {
  const double ab = schedule.alpha_bar[k];
  return (x + (1.0 - ab) * diffused_mixture_score(posterior, schedule, k, x)) / std::sqrt(ab);
}

ReverseKernelParams reverse_kernel_params(const GaussianPosterior& posterior, const NoiseSchedule& schedule, int k,
                                          KernelForm form) {
  if (k < 0 || k > schedule.T - 1) throw InvalidArgument("reverse kernel step must lie in [0, T-1]");
  const int d = posterior.dim();
  const Matrix I = Matrix::Identity(d, d);
  const double b = schedule.beta[k + 1];
  const Matrix sigma_k = diffused_conditional_moments(posterior, schedule, k).sigma;
  const Matrix next = (1.0 - b) * sigma_k + b * I;
  // Sigma_k and `next` commute, so Sigma_k next^{-1} = next^{-1} Sigma_k.
  const Matrix ratio = linalg::solve_spd(next, sigma_k);
  const double u_scale = form == KernelForm::exact ? std::sqrt(schedule.alpha[k + 1]) : 1.0 - 0.5 * b;
  ReverseKernelParams p;
  p.k = k;
  p.U = u_scale * ratio;
  p.V = b * std::sqrt(schedule.alpha_bar[k]) * linalg::solve_spd(next, I);
  p.C = linalg::symmetrize(b * ratio);
  return p;
}

MarginalMoments theorem1_moments_closed_form(const GaussianPosterior& posterior, const NoiseSchedule& schedule,
                                             double lambda, int k) {
  check_lambda(lambda);
  schedule.check_index(k);
  const int d = posterior.dim();
  const Matrix I = Matrix::Identity(d, d);
  MarginalMoments m = diffused_conditional_moments(posterior, schedule, k);
  const Matrix sigma_T = diffused_conditional_moments(posterior, schedule, schedule.T).sigma;
  const Matrix sigma_Tm1 = diffused_conditional_moments(posterior, schedule, schedule.T - 1).sigma;
  const double pi = schedule.tail_product[k];
  m.mu_lambda = std::sqrt(schedule.alpha_bar[k]) * (1.0 - pi) * linalg::solve_spd(sigma_T, posterior.mean);
  m.sigma_lambda = linalg::symmetrize(m.sigma * (lambda * I + (1.0 - lambda) * pi * linalg::solve_spd(sigma_Tm1, m.sigma)));
  return m;
}

std::vector<MarginalMoments> theorem1_moments_recursion(const GaussianPosterior& posterior,
                                                        const NoiseSchedule& schedule, double lambda,
                                                        RecursionStart start, KernelForm form) {
  check_lambda(lambda);
  posterior.validate();
  const int T = schedule.T;
  const int d = posterior.dim();
  std::vector<MarginalMoments> out(static_cast<std::size_t>(T) + 1);
  MarginalMoments& last = out[static_cast<std::size_t>(T)];
  last = diffused_conditional_moments(posterior, schedule, T);
  last.mu_lambda = Vector::Zero(d);
  last.sigma_lambda = start == RecursionStart::standard_normal
                          ? Matrix::Identity(d, d)
                          : theorem1_moments_closed_form(posterior, schedule, lambda, T).sigma_lambda;
  for (int k = T - 1; k >= 0; --k) {
    const ReverseKernelParams p = reverse_kernel_params(posterior, schedule, k, form);
    const MarginalMoments& prev = out[static_cast<std::size_t>(k) + 1];
    MarginalMoments& cur = out[static_cast<std::size_t>(k)];
    cur = diffused_conditional_moments(posterior, schedule, k);
    cur.mu_lambda = p.U * prev.mu_lambda + p.V * posterior.mean;
    cur.sigma_lambda = linalg::symmetrize(lambda * p.C + p.U * prev.sigma_lambda * p.U.transpose());
  }
  return out;
}

}  // namespace vsd
