#pragma once

#include "vsd/oracles.hpp"
#include "vsd/types.hpp"

#include <cstdint>
#include <string>

namespace vsd {

enum class DatasetKind { mixture1d, pinwheel, scurve, moon, gaussian };

std::string to_string(DatasetKind k);
DatasetKind parse_dataset_kind(const std::string& s);

// Recipes (all 2D sets are centred at the origin):
//   pinwheel: r ~ 1 + radial_std N, t ~ tangential_std N, arm j of `arms`,
//             angle = 2 pi j / arms + rate exp(r); point = scale * R(angle) (r, t)
//   scurve:   t = 3 pi (U - 1/2); (sin t, sign(t) (cos t - 1)) + noise N
//   moon:     two interleaved half circles, shifted by (-1/2, -1/4), + noise N
//   gaussian: N(mean, cov) in any dimension
struct DatasetSpec {
  DatasetKind kind = DatasetKind::pinwheel;
  MixtureModel mixture = MixtureModel::canonical();  // weights, means, stds for mixture1d
  int arms = 5;
  double radial_std = 0.3;
  double tangential_std = 0.1;
  double rate = 0.25;
  double scale = 2.0;
  double noise = 0.1;
  Vector mean = Vector::Zero(1);
  Matrix cov = Matrix::Identity(1, 1);

  int dim() const;
  void validate() const;
};

/// n i.i.d. rows, deterministic in seed.
Samples generate(const DatasetSpec& spec, int n, std::uint64_t seed);

/// y = a x + sigma_n N(0, I), row-wise.
Samples degrade(const Samples& x, double a, double sigma_n, std::uint64_t seed);

}  // namespace vsd
