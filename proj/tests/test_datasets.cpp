#include "vsd/datasets.hpp"

#include <doctest.h>

#include <cmath>

using namespace vsd;

namespace {

DatasetSpec of(DatasetKind k) {
  DatasetSpec s;
  s.kind = k;
  return s;
}

// 2 E|X - Y| - E|X - X'| - E|Y - Y'|
double energy_distance(const Samples& a, const Samples& b) {
  auto mean_dist = [](const Samples& p, const Samples& q) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < p.rows(); ++i)
      for (Eigen::Index j = 0; j < q.rows(); ++j) acc += (p.row(i) - q.row(j)).norm();
    return acc / static_cast<double>(p.rows() * q.rows());
  };
  return 2.0 * mean_dist(a, b) - mean_dist(a, a) - mean_dist(b, b);
}

}  // namespace

TEST_CASE("single component mixture data") {
  DatasetSpec s = of(DatasetKind::mixture1d);
  s.mixture.weights = {1.0, 0.0};
  const int n = 100000;
  const Samples x = generate(s, n, 3);
  REQUIRE(x.cols() == 1);
  const double mean = x.col(0).mean();
  const double var = (x.col(0).array() - mean).square().sum() / (n - 1);
  const double mu = s.mixture.means[0], sd = s.mixture.stds[0];
  CHECK(std::abs(mean - mu) < 3.0 * sd / std::sqrt(n));
  CHECK(std::abs(std::sqrt(var) - sd) < 3.0 * sd / std::sqrt(2.0 * n));
}

TEST_CASE("canonical mixture data") {
  const Samples x = generate(of(DatasetKind::mixture1d), 100000, 4);
  const double frac_left = (x.col(0).array() < 0.0).cast<double>().mean();
  CHECK(frac_left == doctest::Approx(0.5).epsilon(0.02));
  // Var = 0.25 + 1
  const double mean = x.col(0).mean();
  CHECK(std::abs(mean) < 3.0 * std::sqrt(1.25 / 100000));
}

TEST_CASE("generators are deterministic and have the declared dimension") {
  for (auto k : {DatasetKind::mixture1d, DatasetKind::pinwheel, DatasetKind::scurve, DatasetKind::moon,
                 DatasetKind::gaussian}) {
    const DatasetSpec s = of(k);
    const Samples a = generate(s, 500, 11);
    CHECK(a.rows() == 500);
    CHECK(a.cols() == s.dim());
    CHECK(a == generate(s, 500, 11));
    CHECK(a != generate(s, 500, 12));
    CHECK(parse_dataset_kind(to_string(k)) == k);
  }
  CHECK(of(DatasetKind::mixture1d).dim() == 1);
  CHECK(of(DatasetKind::moon).dim() == 2);
  CHECK_THROWS_AS(parse_dataset_kind("swissroll"), InvalidArgument);
  CHECK_THROWS_AS(generate(of(DatasetKind::moon), 0, 1), InvalidArgument);
}

TEST_CASE("two dimensional sets are centred") {
  const int n = 10000;
  for (auto k : {DatasetKind::pinwheel, DatasetKind::scurve, DatasetKind::moon}) {
    const Samples x = generate(of(k), n, 5);
    for (int j = 0; j < 2; ++j) {
      const double m = x.col(j).mean();
      const double sd = std::sqrt((x.col(j).array() - m).square().sum() / (n - 1));
      CHECK(std::abs(m) < 3.0 * sd / std::sqrt(n));
    }
  }
}

TEST_CASE("gaussian dataset") {
  DatasetSpec s = of(DatasetKind::gaussian);
  s.mean = Vector::Constant(3, 1.0);
  s.cov = Matrix::Identity(3, 3) * 0.5;
  CHECK(s.dim() == 3);
  const Samples x = generate(s, 20000, 9);
  CHECK(x.cols() == 3);
  CHECK((x.colwise().mean().array() - 1.0).abs().maxCoeff() < 3.0 * std::sqrt(0.5 / 20000));
  s.cov(0, 0) = -1.0;
  CHECK_THROWS_AS(s.validate(), InvalidArgument);
}

TEST_CASE("invalid specs") {
  DatasetSpec p = of(DatasetKind::pinwheel);
  p.arms = 0;
  CHECK_THROWS_AS(p.validate(), InvalidArgument);
  DatasetSpec m = of(DatasetKind::mixture1d);
  m.mixture.weights = {0.7, 0.7};
  CHECK_THROWS(m.validate());
  DatasetSpec c = of(DatasetKind::scurve);
  c.noise = -0.1;
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
}

TEST_CASE("degradation channel") {
  const Samples x = generate(of(DatasetKind::pinwheel), 100000, 1);
  CHECK(degrade(x, 0.8, 0.0, 3) == 0.8 * x);
  const Samples y = degrade(x, 1.0, 0.5, 7);
  CHECK(y == degrade(x, 1.0, 0.5, 7));
  const Samples r = y - x;
  for (int j = 0; j < 2; ++j) {
    const double m = r.col(j).mean();
    const double var = (r.col(j).array() - m).square().sum() / (r.rows() - 1);
    CHECK(var == doctest::Approx(0.25).epsilon(0.02));
  }
  CHECK_THROWS_AS(degrade(x, 1.0, -1.0, 1), InvalidArgument);
}

TEST_CASE("disjoint seeds give matching distributions") {
  // loose smoke check on 2000-point subsets
  for (auto k : {DatasetKind::pinwheel, DatasetKind::scurve, DatasetKind::moon}) {
    const Samples a = generate(of(k), 2000, 100);
    const Samples b = generate(of(k), 2000, 200);
    CHECK(energy_distance(a, b) < 0.02);
  }
  const double between = energy_distance(generate(of(DatasetKind::moon), 2000, 1),
                                         generate(of(DatasetKind::pinwheel), 2000, 1));
  CHECK(between > 0.1);
}
