#include "vsd/metrics.hpp"

#include "vsd/assignment.hpp"
#include "vsd/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace vsd {

double mse_paired(const Samples& reconstructions, const Samples& references) {
  if (reconstructions.rows() == 0) throw InvalidArgument("mse of empty sample set");
  if (reconstructions.rows() != references.rows() || reconstructions.cols() != references.cols())
    throw InvalidArgument("mse needs equally shaped sample sets");
  return (reconstructions - references).rowwise().squaredNorm().mean();
}

double w2_gaussian(const Vector& mu1, const Matrix& cov1, const Vector& mu2, const Matrix& cov2) {
  const Matrix r1 = linalg::sqrt_psd(cov1);
  const Matrix cross = linalg::sqrt_psd(linalg::symmetrize(r1 * cov2 * r1));
  const double sq = (mu1 - mu2).squaredNorm() + cov1.trace() + cov2.trace() - 2.0 * cross.trace();
  return std::sqrt(std::max(sq, 0.0));
}

namespace {

std::vector<double> sorted(const Vector& v) {
  std::vector<double> s(v.data(), v.data() + v.size());
  std::sort(s.begin(), s.end());
  return s;
}

// Empirical quantile at level u with linear interpolation between order statistics.
double quantile(const std::vector<double>& s, double u) {
  const double pos = std::clamp(u * static_cast<double>(s.size()) - 0.5, 0.0, static_cast<double>(s.size() - 1));
  const auto lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, s.size() - 1);
  const double f = pos - static_cast<double>(lo);
  return s[lo] + f * (s[hi] - s[lo]);
}

}  // namespace

double w2_empirical_1d(const Vector& a, const Vector& b) {
  if (a.size() == 0 || b.size() == 0) throw InvalidArgument("w2 of empty sample set");
  const auto sa = sorted(a);
  const auto sb = sorted(b);
  const std::size_t n = std::max(sa.size(), sb.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double u = (static_cast<double>(i) + 0.5) / static_cast<double>(n);
    const double d = quantile(sa, u) - quantile(sb, u);
    acc += d * d;
  }
  return std::sqrt(acc / static_cast<double>(n));
}

double w2_exact_small(const Samples& a, const Samples& b) {
  if (a.rows() == 0) throw InvalidArgument("w2 of empty sample set");
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw InvalidArgument("exact w2 needs equally shaped sample sets");
  if (a.rows() > kMaxExactW2)
    throw InvalidArgument("exact w2 supports at most " + std::to_string(kMaxExactW2) + " points");
  const Eigen::Index n = a.rows();
  Matrix cost(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i) cost(i, j) = (a.row(i) - b.row(j)).squaredNorm();
  const std::vector<int> col = solve_assignment(cost);
  double total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) total += cost(i, col[static_cast<std::size_t>(i)]);
  return std::sqrt(total / static_cast<double>(n));
}

double kl_estimate_1d(const Vector& p, const Vector& q, int bins) {
  if (p.size() == 0 || q.size() == 0) throw InvalidArgument("kl of empty sample set");
  if (bins < 2) throw InvalidArgument("kl needs at least two bins");
  const double lo = std::min(p.minCoeff(), q.minCoeff());
  const double hi = std::max(p.maxCoeff(), q.maxCoeff());
  const double width = hi > lo ? (hi - lo) / bins : 1.0;
  auto histogram = [&](const Vector& v) {
    std::vector<double> h(static_cast<std::size_t>(bins), 0.5);
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      const int b = std::clamp(static_cast<int>((v[i] - lo) / width), 0, bins - 1);
      h[static_cast<std::size_t>(b)] += 1.0;
    }
    const double total = static_cast<double>(v.size()) + 0.5 * bins;
    for (double& x : h) x /= total;
    return h;
  };
  const auto hp = histogram(p);
  const auto hq = histogram(q);
  double kl = 0.0;
  for (std::size_t i = 0; i < hp.size(); ++i) kl += hp[i] * std::log(hp[i] / hq[i]);
  return kl;
}

double kl_gaussian_fit(const Samples& p, const Samples& q) {
  if (p.rows() < 2 || q.rows() < 2) throw InvalidArgument("gaussian-fit kl needs at least two samples per set");
  if (p.cols() != q.cols()) throw InvalidArgument("gaussian-fit kl needs equal dimensions");
  auto fit = [](const Samples& s, Vector& mu, Matrix& cov) {
    mu = s.colwise().mean().transpose();
    const Matrix c = s.rowwise() - mu.transpose();
    cov = (c.transpose() * c) / static_cast<double>(s.rows() - 1);
  };
  Vector m0, m1;
  Matrix s0, s1;
  fit(p, m0, s0);
  fit(q, m1, s1);
  const auto d = static_cast<double>(p.cols());
  const Eigen::LLT<Matrix> l0(s0), l1(s1);
  if (l0.info() != Eigen::Success || l1.info() != Eigen::Success)
    throw LinalgError("fitted covariance is not positive definite");
  const double logdet0 = 2.0 * l0.matrixL().toDenseMatrix().diagonal().array().log().sum();
  const double logdet1 = 2.0 * l1.matrixL().toDenseMatrix().diagonal().array().log().sum();
  const Vector dm = m1 - m0;
  return 0.5 * (l1.solve(s0).trace() + dm.dot(l1.solve(dm)) - d + logdet1 - logdet0);
}

double optimal_distortion(double trace_sigma, double P) {
  if (!(trace_sigma > 0.0)) throw InvalidArgument("trace must be positive");
  if (!(P >= 0.0)) throw InvalidArgument("perception budget must be nonnegative");
  const double r = std::sqrt(trace_sigma);
  return P <= r ? trace_sigma + (r - P) * (r - P) : trace_sigma;
}

std::vector<CurvePoint> optimal_dp_curve(double trace_sigma, const std::vector<double>& p_values) {
  std::vector<CurvePoint> out;
  out.reserve(p_values.size());
  for (double P : p_values) out.push_back({P, optimal_distortion(trace_sigma, P)});
  return out;
}

std::vector<AchievablePoint> achievability_curve(double trace_sigma, const std::vector<double>& lambdas) {
  std::vector<AchievablePoint> out;
  for (double l : lambdas) {
    if (!(l >= 0.0 && l <= 1.0)) throw InvalidArgument("lambda must lie in [0, 1]");
    AchievablePoint a{l, (1.0 + l) * trace_sigma, (1.0 - std::sqrt(l)) * std::sqrt(trace_sigma)};
    if (std::abs(optimal_distortion(trace_sigma, a.P) - a.D) > 1e-12 * std::max(1.0, a.D))
      throw Error("achievable point off the optimal curve at lambda " + std::to_string(l));
    out.push_back(a);
  }
  return out;
}

}  // namespace vsd
