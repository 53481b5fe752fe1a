#pragma once

#include "vsd/rng.hpp"
#include "vsd/types.hpp"

#include <vector>

namespace vsd {

/// Discrete variance-preserving noise schedule.
///
/// Index 0 is clean data. Arrays have length T+1 and beta[0] = 0 is a
/// sentinel: the transition k-1 -> k uses beta[k], so beta[0] never enters a
/// transition. alpha_bar is accumulated left to right in double precision.
struct NoiseSchedule {
  int T = 0;
  std::vector<double> beta;
  std::vector<double> alpha;
  std::vector<double> alpha_bar;

  // alpha[k+1] * ... * alpha[T], i.e. alpha_bar[T] / alpha_bar[k] computed as
  // an explicit suffix product. tail_product[T] = 1.
  std::vector<double> tail_product;

  void check_index(int k) const;
};

NoiseSchedule build_schedule(int T, double beta_min, double beta_max);

/// Reference schedule: T = 1000, beta linear from 1e-4 to 0.02.
NoiseSchedule default_schedule();

/// Draws x_k ~ N(sqrt(abar_k) x0, (1 - abar_k) I).
Vector forward_sample(const NoiseSchedule& schedule, const Vector& x0, int k, Rng& rng);

/// Linear measurement y = A x + N(0, noise_std^2 I).
struct MeasurementModel {
  Matrix A;
  double noise_std = 1.0;

  static MeasurementModel scaled_identity(int dim, double scale, double noise_std);

  int data_dim() const { return static_cast<int>(A.cols()); }
  int measurement_dim() const { return static_cast<int>(A.rows()); }
  Vector apply(const Vector& x) const;
  void validate() const;
};

}  // namespace vsd
