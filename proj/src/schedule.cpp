#include "vsd/schedule.hpp"

#include <cmath>
#include <string>

namespace vsd {

void NoiseSchedule::check_index(int k) const {
  if (k < 0 || k > T)
    throw InvalidArgument("diffusion step " + std::to_string(k) + " outside [0, " + std::to_string(T) + "]");
}

NoiseSchedule build_schedule(int T, double beta_min, double beta_max) {
  if (T < 2) throw InvalidArgument("schedule needs T >= 2");
  if (!(beta_min > 0.0) || !(beta_min <= beta_max) || !(beta_max < 1.0))
    throw InvalidArgument("schedule needs 0 < beta_min <= beta_max < 1");

  NoiseSchedule s;
  s.T = T;
  s.beta.assign(T + 1, 0.0);
  s.alpha.assign(T + 1, 1.0);
  s.alpha_bar.assign(T + 1, 1.0);
  s.tail_product.assign(T + 1, 1.0);

  for (int k = 1; k <= T; ++k) {
    double frac = static_cast<double>(k - 1) / static_cast<double>(T - 1);
    s.beta[k] = beta_min + frac * (beta_max - beta_min);
  }
  s.beta[T] = beta_max;
  for (int k = 0; k <= T; ++k) s.alpha[k] = 1.0 - s.beta[k];
  for (int k = 1; k <= T; ++k) s.alpha_bar[k] = s.alpha_bar[k - 1] * s.alpha[k];
  for (int k = T - 1; k >= 0; --k) s.tail_product[k] = s.tail_product[k + 1] * s.alpha[k + 1];
  return s;
}

NoiseSchedule default_schedule() { return build_schedule(1000, 1e-4, 0.02); }

Vector forward_sample(const NoiseSchedule& schedule, const Vector& x0, int k, Rng& rng) {
  schedule.check_index(k);
  const double ab = schedule.alpha_bar[k];
  if (k == 0) return x0;
  Vector out(x0.size());
  const double mean_scale = std::sqrt(ab);
  const double noise_scale = std::sqrt(1.0 - ab);
  for (Eigen::Index i = 0; i < x0.size(); ++i) out[i] = mean_scale * x0[i] + noise_scale * rng.normal();
  return out;
}

MeasurementModel MeasurementModel::scaled_identity(int dim, double scale, double noise_std) {
  MeasurementModel m;
  m.A = scale * Matrix::Identity(dim, dim);
  m.noise_std = noise_std;
  m.validate();
  return m;
}

Vector MeasurementModel::apply(const Vector& x) const {
  if (x.size() != A.cols()) throw InvalidArgument("measurement operator dimension mismatch");
  return A * x;
}

void MeasurementModel::validate() const {
  if (A.size() == 0) throw InvalidArgument("measurement operator is empty");
  if (!(noise_std > 0.0) || !std::isfinite(noise_std)) throw InvalidArgument("measurement noise_std must be > 0");
  if (!A.allFinite()) throw InvalidArgument("measurement operator has non-finite entries");
}

}  // namespace vsd
