#include "vsd/datasets.hpp"

#include "vsd/linalg.hpp"
#include "vsd/rng.hpp"

#include <cmath>
#include <numbers>

namespace vsd {

std::string to_string(DatasetKind k) {
  switch (k) {
    case DatasetKind::mixture1d: return "mixture1d";
    case DatasetKind::pinwheel: return "pinwheel";
    case DatasetKind::scurve: return "scurve";
    case DatasetKind::moon: return "moon";
    case DatasetKind::gaussian: return "gaussian";
  }
  return "";
}

DatasetKind parse_dataset_kind(const std::string& s) {
  for (auto k : {DatasetKind::mixture1d, DatasetKind::pinwheel, DatasetKind::scurve, DatasetKind::moon,
                 DatasetKind::gaussian})
    if (to_string(k) == s) return k;
  throw InvalidArgument("unknown dataset kind '" + s + "'");
}

int DatasetSpec::dim() const {
  switch (kind) {
    case DatasetKind::mixture1d: return 1;
    case DatasetKind::gaussian: return static_cast<int>(mean.size());
    default: return 2;
  }
}

void DatasetSpec::validate() const {
  switch (kind) {
    case DatasetKind::mixture1d:
      mixture.validate();
      break;
    case DatasetKind::pinwheel:
      if (arms < 1 || !(radial_std >= 0.0) || !(tangential_std >= 0.0) || !std::isfinite(rate) || !(scale > 0.0))
        throw InvalidArgument("invalid pinwheel parameters");
      break;
    case DatasetKind::scurve:
    case DatasetKind::moon:
      if (!(noise >= 0.0)) throw InvalidArgument("dataset noise must be nonnegative");
      break;
    case DatasetKind::gaussian:
      if (mean.size() == 0 || cov.rows() != mean.size() || cov.cols() != mean.size())
        throw InvalidArgument("gaussian dataset needs matching mean and covariance");
      if (!linalg::is_psd(cov)) throw InvalidArgument("gaussian dataset covariance must be PSD");
      break;
  }
}

Samples generate(const DatasetSpec& spec, int n, std::uint64_t seed) {
  if (n < 1) throw InvalidArgument("need at least one sample");
  spec.validate();
  Rng rng(seed);
  Samples out(n, spec.dim());
  const double pi = std::numbers::pi;
  switch (spec.kind) {
    case DatasetKind::mixture1d: {
      MixturePosterior prior{spec.mixture.weights, spec.mixture.means, {}};
      for (double s : spec.mixture.stds) prior.vars.push_back(s * s);
      out.col(0) = prior.sample(n, rng);
      break;
    }
    case DatasetKind::pinwheel:
      for (int i = 0; i < n; ++i) {
        const double r = 1.0 + spec.radial_std * rng.normal();
        const double t = spec.tangential_std * rng.normal();
        const int arm = rng.uniform_int(0, spec.arms - 1);
        const double ang = 2.0 * pi * arm / spec.arms + spec.rate * std::exp(r);
        const double c = std::cos(ang), s = std::sin(ang);
        out(i, 0) = spec.scale * (r * c - t * s);
        out(i, 1) = spec.scale * (r * s + t * c);
      }
      break;
    case DatasetKind::scurve:
      for (int i = 0; i < n; ++i) {
        const double t = 3.0 * pi * (rng.uniform() - 0.5);
        out(i, 0) = std::sin(t) + spec.noise * rng.normal();
        out(i, 1) = (t > 0 ? 1.0 : (t < 0 ? -1.0 : 0.0)) * (std::cos(t) - 1.0) + spec.noise * rng.normal();
      }
      break;
    case DatasetKind::moon:
      for (int i = 0; i < n; ++i) {
        const double t = pi * rng.uniform();
        const bool upper = rng.uniform() < 0.5;
        const double x = upper ? std::cos(t) : 1.0 - std::cos(t);
        const double y = upper ? std::sin(t) : 0.5 - std::sin(t);
        out(i, 0) = x - 0.5 + spec.noise * rng.normal();
        out(i, 1) = y - 0.25 + spec.noise * rng.normal();
      }
      break;
    case DatasetKind::gaussian: {
      const Matrix root = linalg::sqrt_psd(spec.cov);
      for (int i = 0; i < n; ++i) {
        Vector z(spec.dim());
        for (Eigen::Index j = 0; j < z.size(); ++j) z[j] = rng.normal();
        out.row(i) = (spec.mean + root * z).transpose();
      }
      break;
    }
  }
  return out;
}

Samples degrade(const Samples& x, double a, double sigma_n, std::uint64_t seed) {
  if (!(sigma_n >= 0.0) || !std::isfinite(a)) throw InvalidArgument("degradation needs finite a and sigma_n >= 0");
  Rng rng(seed);
  Samples y = a * x;
  for (Eigen::Index i = 0; i < y.rows(); ++i)
    for (Eigen::Index j = 0; j < y.cols(); ++j) y(i, j) += sigma_n * rng.normal();
  return y;
}

}  // namespace vsd
