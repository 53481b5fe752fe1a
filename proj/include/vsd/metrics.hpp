#pragma once

#include "vsd/types.hpp"

#include <vector>

namespace vsd {

/// Mean squared Euclidean distance between paired rows.
double mse_paired(const Samples& reconstructions, const Samples& references);

/// W2 between N(mu1, cov1) and N(mu2, cov2).
double w2_gaussian(const Vector& mu1, const Matrix& cov1, const Vector& mu2, const Matrix& cov2);

/// Quantile-coupling W2 in 1D. Sample sizes may differ: both empirical
/// quantile functions are evaluated on the midpoint grid of the larger size.
double w2_empirical_1d(const Vector& a, const Vector& b);

/// W2 under the exact optimal coupling of two equally sized point sets.
inline constexpr int kMaxExactW2 = 4096;
double w2_exact_small(const Samples& a, const Samples& b);

/// Histogram estimate of KL(p || q) on a shared range, 0.5 pseudo-count per bin.
double kl_estimate_1d(const Vector& p, const Vector& q, int bins);

/// KL between Gaussians fitted to each sample set (a parametric approximation).
double kl_gaussian_fit(const Samples& p, const Samples& q);

struct CurvePoint {
  double P = 0.0;
  double D = 0.0;
};

/// Minimum MSE at W2 budget P for a Gaussian posterior with trace t.
double optimal_distortion(double trace_sigma, double P);
std::vector<CurvePoint> optimal_dp_curve(double trace_sigma, const std::vector<double>& p_values);

struct AchievablePoint {
  double lambda = 0.0;
  double D = 0.0;
  double P = 0.0;
};

/// D = (1 + l) t, P = (1 - sqrt l) sqrt t; each point is checked against the
/// optimal curve to 1e-12.
std::vector<AchievablePoint> achievability_curve(double trace_sigma, const std::vector<double>& lambdas);

}  // namespace vsd
