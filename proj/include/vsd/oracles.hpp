#pragma once

#include "vsd/rng.hpp"
#include "vsd/schedule.hpp"
#include "vsd/types.hpp"

#include <vector>

namespace vsd {

struct GaussianPosterior {
  Vector mean;  // E[X0 | y]
  Matrix cov;   // Cov[X0 | y]

  int dim() const { return static_cast<int>(mean.size()); }
  void validate() const;
};

/// Exact posterior of a Gaussian prior under a linear Gaussian measurement.
GaussianPosterior gaussian_posterior(const Vector& prior_mean, const Matrix& prior_cov, const MeasurementModel& model,
                                     const Vector& y);

/// 1D prior sum_i w_i N(mu_i, sigma_i^2) observed through y = a x + N(0, sigma0^2).
struct MixtureModel {
  std::vector<double> weights;
  std::vector<double> means;
  std::vector<double> stds;
  double a = 1.0;
  double sigma0 = 0.5;

  std::size_t size() const { return weights.size(); }
  void validate() const;

  // Reference two-component model used throughout the tests.
  static MixtureModel canonical();
};

struct MixturePosterior {
  std::vector<double> resp;   // a_i(y), sums to one
  std::vector<double> means;  // per-component posterior means
  std::vector<double> vars;   // per-component posterior variances

  double mean() const;
  double variance() const;
  double log_density(double x) const;
  Vector sample(int n, Rng& rng) const;
};

MixturePosterior mixture_posterior(const MixtureModel& model, double y);

Vector mmse_estimate(const GaussianPosterior& posterior);
double mmse_estimate(const MixturePosterior& posterior);

/// Moments at step k. The unscaled pair (mu, sigma) describes p(x_k | y); the
/// lambda pair describes the variance-scaled reverse chain.
struct MarginalMoments {
  int k = 0;
  Vector mu;
  Matrix sigma;
  Vector mu_lambda;
  Matrix sigma_lambda;
};

/// mu_k = sqrt(abar_k) mu_y, Sigma_k = (1 - abar_k) I + abar_k Sigma_y.
MarginalMoments diffused_conditional_moments(const GaussianPosterior& posterior, const NoiseSchedule& schedule, int k);

/// grad_x log p(x_k | y) = -Sigma_k^{-1} (x - mu_k), one sample per row.
Samples gaussian_diffused_score(const GaussianPosterior& posterior, const NoiseSchedule& schedule, int k,
                                const Samples& x);

/// p(x_k | y) for the mixture is sum_i a_i N(sqrt(abar_k) m_i, abar_k v_i + 1 - abar_k).
double diffused_mixture_log_density(const MixturePosterior& posterior, const NoiseSchedule& schedule, int k, double x);
double diffused_mixture_score(const MixturePosterior& posterior, const NoiseSchedule& schedule, int k, double x);
double diffused_mixture_score(const MixtureModel& model, double y, const NoiseSchedule& schedule, int k, double x);

/// E[x_0 | x_k, y] for the mixture posterior (Tweedie on the exact score).
double mixture_tweedie_mean(const MixturePosterior& posterior, const NoiseSchedule& schedule, int k, double x);

// Which algebraic form of U_k to use. `exact` carries sqrt(alpha_{k+1});
// `half_beta` replaces it by 1 - beta_{k+1}/2. V_k and C_k do not depend on it.
enum class KernelForm { exact, half_beta };

struct ReverseKernelParams {
  int k = 0;
  Matrix U;
  Matrix V;
  Matrix C;
};

/// Mean U_k x_{k+1} + V_k mu_y and covariance C_k of p(x_k | x_{k+1}, y).
ReverseKernelParams reverse_kernel_params(const GaussianPosterior& posterior, const NoiseSchedule& schedule, int k,
                                          KernelForm form = KernelForm::exact);

// Initial law of x_T for the moment recursion. `standard_normal` is N(0, I);
// `matched` keeps the zero mean but takes the covariance the closed form
// assigns to step T, which makes recursion and closed form agree identically.
enum class RecursionStart { standard_normal, matched };

/// Propagates moments of the lambda-scaled reverse chain from k = T to 0.
/// Element k of the result holds the moments at step k.
std::vector<MarginalMoments> theorem1_moments_recursion(const GaussianPosterior& posterior,
                                                        const NoiseSchedule& schedule, double lambda,
                                                        RecursionStart start = RecursionStart::standard_normal,
                                                        KernelForm form = KernelForm::exact);

/// Closed-form scaled moments at step k in [0, T]:
/// mu_k^l = sqrt(abar_k)(1 - pi_{k+1}) Sigma_T^{-1} mu_y,
/// Sigma_k^l = Sigma_k (l I + (1 - l) pi_{k+1} Sigma_{T-1}^{-1} Sigma_k),
/// with pi_{k+1} = alpha_{k+1} ... alpha_T.
MarginalMoments theorem1_moments_closed_form(const GaussianPosterior& posterior, const NoiseSchedule& schedule,
                                             double lambda, int k);

}  // namespace vsd
