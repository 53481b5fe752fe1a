#include "vsd/commands.hpp"

#include "vsd/checkpoint.hpp"
#include "vsd/csv.hpp"
#include "vsd/linalg.hpp"
#include "vsd/metrics.hpp"
#include "vsd/svg.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <ostream>

namespace vsd::cli {

namespace fs = std::filesystem;
using csv::format;

namespace {

// Stream ids under the master seed.
constexpr std::uint64_t kTestData = 10;
constexpr std::uint64_t kTestNoise = 11;
constexpr std::uint64_t kReferences = 12;
constexpr std::uint64_t kTrainData = 5;
constexpr std::uint64_t kInit = 31;

std::string short_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::string out_path(const RunConfig& c, const std::string& name) { return (fs::path(c.output_dir) / name).string(); }

void make_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir + ": " + ec.message());
}

Vector y_vector(const RunConfig& c) {
  return Eigen::Map<const Vector>(c.y.data(), static_cast<Eigen::Index>(c.y.size()));
}

// Keeps a loaded network alive alongside the score source that points to it.
struct Source {
  std::unique_ptr<ScoreNetwork> net;
  ScoreSource score;
};

Source make_source(const RunConfig& c) {
  Source s;
  switch (c.source) {
    case SourceKind::gaussian_oracle:
      s.score = OracleGaussian{c.gaussian_posterior()};
      break;
    case SourceKind::mixture_oracle:
      if (c.y.size() != 1) throw ConfigError("mixture_oracle needs a scalar y");
      s.score = OracleMixture{mixture_posterior(c.mixture_model(), c.y.at(0))};
      break;
    case SourceKind::learned: {
      if (c.checkpoint.empty()) throw ConfigError("learned source needs 'checkpoint'");
      s.net = std::make_unique<ScoreNetwork>(load_checkpoint(c.checkpoint).net);
      if (s.net->data_dim() != c.dataset.dim()) throw ConfigError("checkpoint dimension does not match dataset");
      s.score = LearnedDps{s.net.get(), c.measurement_model()};
      break;
    }
  }
  return s;
}

// Draws from the true posterior p(x0 | y) when it is available in closed form.
Samples posterior_draws(const RunConfig& c, int n) {
  Rng rng(derive_seed(c.seed, {kReferences}));
  auto gaussian_draws = [&](const GaussianPosterior& p) {
    const Matrix root = linalg::sqrt_psd(p.cov);
    Samples out(n, p.dim());
    for (int i = 0; i < n; ++i) {
      Vector z(p.dim());
      for (int j = 0; j < p.dim(); ++j) z[j] = rng.normal();
      out.row(i) = (p.mean + root * z).transpose();
    }
    return out;
  };
  if (c.source == SourceKind::gaussian_oracle) return gaussian_draws(c.gaussian_posterior());
  if (c.source == SourceKind::mixture_oracle || c.dataset.kind == DatasetKind::mixture1d) {
    if (c.y.size() != 1) throw ConfigError("mixture posterior needs a scalar y");
    return Samples(mixture_posterior(c.mixture_model(), c.y[0]).sample(n, rng));
  }
  if (c.dataset.kind == DatasetKind::gaussian) {
    if (static_cast<int>(c.y.size()) != c.dataset.dim()) throw ConfigError("y must match the dataset dimension");
    return gaussian_draws(vsd::gaussian_posterior(c.dataset.mean, c.dataset.cov, c.measurement_model(), y_vector(c)));
  }
  throw ConfigError("fixed-y runs need an analytic posterior (gaussian or mixture1d data); use sweep.paired");
}

YSource make_ysource(const RunConfig& c, int n) {
  if (c.sweep.paired) {
    if (c.source != SourceKind::learned) throw ConfigError("paired runs need the learned source");
    Samples xs = generate(c.dataset, n, derive_seed(c.seed, {kTestData}));
    Samples ys = degrade(xs, c.measurement.a, c.measurement.noise_std, derive_seed(c.seed, {kTestNoise}));
    return YSource::pairs(std::move(xs), std::move(ys));
  }
  if (c.y.empty()) throw ConfigError("fixed-y runs need 'y'");
  const int refs = c.sweep.n_references > 0 ? std::max(c.sweep.n_references, n) : n;
  return YSource::fixed(y_vector(c), posterior_draws(c, refs));
}

MetricOptions metric_options(const RunConfig& c) {
  MetricOptions m;
  m.kl_bins = c.sweep.kl_bins;
  m.w2_exact_max = c.sweep.w2_exact_max;
  return m;
}

std::vector<std::string> point_row_tail(const SweepResult& r) {
  if (!r.error.empty()) return {"", "", "", std::to_string(r.point.n_samples), std::to_string(r.point.seed)};
  return {format(r.point.mse), format(r.point.w2), r.point.has_kl ? format(r.point.kl) : "",
          std::to_string(r.point.n_samples), std::to_string(r.point.seed)};
}

void report_errors(const std::vector<SweepResult>& results, std::ostream& out) {
  for (const auto& r : results)
    if (!r.error.empty())
      out << "warning: lambda " << short_num(r.point.lambda) << " zeta x" << short_num(r.point.zeta_multiplier)
          << " diverged: " << r.error << "\n";
}

// --- train -----------------------------------------------------------------

int cmd_train(const RunConfig& c, std::ostream& out) {
  const NoiseSchedule schedule = c.build_schedule();
  NetworkShape shape = c.network;
  shape.data_dim = c.dataset.dim();
  ScoreNetwork net = ScoreNetwork::initialized(shape, c.parameterization, derive_seed(c.seed, {kInit}));

  BatchSource source;
  if (c.train.dataset_size > 0) {
    source = batches_from(generate(c.dataset, c.train.dataset_size, derive_seed(c.seed, {kTrainData})));
  } else {
    source = [spec = c.dataset](std::uint64_t seed, int b) { return generate(spec, b, seed); };
  }
  TrainConfig tc = c.train_config();
  tc.checkpoint_path = out_path(c, "checkpoint.bin");
  out << "training " << net.parameter_count() << " parameters for " << tc.steps << " steps\n";
  TrainResult r = train(tc, source, schedule, std::move(net));

  csv::Table log;
  log.config = c.embedded_json();
  log.header = {"step", "loss", "wall_ms"};
  for (const auto& row : r.log)
    log.add_row({std::to_string(row.step), format(row.loss), c.train.log_wall_time ? format(row.wall_ms) : ""});
  csv::write(out_path(c, "train_log.csv"), log);
  if (!r.losses.empty()) out << "final loss " << format(r.losses.back()) << "\n";
  out << "wrote " << tc.checkpoint_path << "\n";
  return kExitOk;
}

// --- sample ----------------------------------------------------------------

int cmd_sample(const RunConfig& c, std::ostream& out) {
  const NoiseSchedule schedule = c.build_schedule();
  Source src = make_source(c);
  const int n = c.sampler.n_samples;
  Samples ys;
  if (c.sweep.paired) {
    ys = make_ysource(c, n).ys;
  } else {
    if (c.y.empty()) throw ConfigError("sample needs 'y' unless sweep.paired is set");
    ys = Samples(y_vector(c).transpose());
  }
  SampleBatch b = sample_many(n, c.sampler_config(), src.score, ys, schedule, false, c.threads);
  csv::write(out_path(c, "samples.csv"), csv::samples_table(b.x0, c.embedded_json()));
  out << "endpoint mean";
  for (Eigen::Index j = 0; j < b.x0.cols(); ++j) out << " " << format(b.x0.col(j).mean());
  out << "\n";
  return kExitOk;
}

// --- sweep / zeta-sweep -----------------------------------------------------

void write_dp_plot(const RunConfig& c, const std::vector<SweepResult>& results, const std::string& file,
                   const std::string& title) {
  svg::Plot p;
  p.title = title;
  p.x_label = "perception (W2)";
  p.y_label = "distortion (MSE)";
  svg::Series pts{"sampled", "#1f77b4", {}, {}, false, 3.0};
  for (const auto& r : results)
    if (r.error.empty()) {
      pts.x.push_back(r.point.w2);
      pts.y.push_back(r.point.mse);
    }
  p.series.push_back(pts);
  if (c.source == SourceKind::gaussian_oracle) {
    const double t = c.gaussian_posterior().cov.trace();
    svg::Series curve{"optimal D(P)", "#d62728", {}, {}, true, 0.0};
    for (int i = 0; i <= 50; ++i) {
      const double P = std::sqrt(t) * i / 50.0;
      curve.x.push_back(P);
      curve.y.push_back(optimal_distortion(t, P));
    }
    p.series.push_back(curve);
  }
  svg::write(out_path(c, file), p);
}

void write_samples_dir(const RunConfig& c, const std::vector<SweepResult>& results, const std::string& prefix,
                       bool by_zeta) {
  if (!c.sweep.write_samples) return;
  make_dir(out_path(c, "samples"));
  for (std::size_t i = 0; i < results.size(); ++i) {
    if (!results[i].error.empty()) continue;
    const double key = by_zeta ? results[i].point.zeta_multiplier : results[i].point.lambda;
    const std::string name = "samples/" + prefix + "_" + std::to_string(i) + "_" + short_num(key) + ".csv";
    csv::write(out_path(c, name), csv::samples_table(results[i].samples, c.embedded_json()));
  }
}

int cmd_sweep(const RunConfig& c, std::ostream& out) {
  if (c.sweep.lambdas.empty()) throw ConfigError("sweep.lambdas is empty");
  const NoiseSchedule schedule = c.build_schedule();
  Source src = make_source(c);
  const int n = c.sweep.n_samples;
  const YSource ysrc = make_ysource(c, n);
  auto results = sweep_lambda(c.sweep.lambdas, ysrc, n, c.sampler_config(), src.score, schedule, metric_options(c),
                              c.threads);
  csv::Table t;
  t.config = c.embedded_json();
  t.header = {"lambda", "mse", "w2", "kl", "n_samples", "seed"};
  for (const auto& r : results) {
    std::vector<std::string> row{format(r.point.lambda)};
    for (auto& cell : point_row_tail(r)) row.push_back(cell);
    t.add_row(row);
    if (r.error.empty())
      out << "lambda " << short_num(r.point.lambda) << "  mse " << format(r.point.mse) << "  w2 " << format(r.point.w2)
          << (r.point.degenerate ? "  (single sample: perception degenerate)" : "") << "\n";
  }
  csv::write(out_path(c, "dp_curve.csv"), t);
  write_dp_plot(c, results, "dp_curve.svg", "distortion-perception sweep over lambda");
  write_samples_dir(c, results, "lambda", false);
  report_errors(results, out);
  return kExitOk;
}

int cmd_zeta_sweep(const RunConfig& c, std::ostream& out) {
  if (c.sweep.zeta_multipliers.empty()) throw ConfigError("sweep.zeta_multipliers is empty");
  if (c.source != SourceKind::learned) throw ConfigError("zeta-sweep needs the learned source");
  const NoiseSchedule schedule = c.build_schedule();
  Source src = make_source(c);
  const int n = c.sweep.n_samples;
  const YSource ysrc = make_ysource(c, n);
  std::vector<SweepResult> results;
  for (double m : c.sweep.zeta_multipliers) {
    SamplerConfig sc = c.sampler_config();
    sc.zeta.multiplier = c.sampler.zeta.multiplier * m;
    results.push_back(run_point(sc, ysrc, n, src.score, schedule, metric_options(c), c.threads));
    results.back().point.zeta_multiplier = m;
  }
  csv::Table t;
  t.config = c.embedded_json();
  t.header = {"zeta_multiplier", "lambda", "mse", "w2", "kl", "n_samples", "seed"};
  for (const auto& r : results) {
    std::vector<std::string> row{format(r.point.zeta_multiplier), format(r.point.lambda)};
    for (auto& cell : point_row_tail(r)) row.push_back(cell);
    t.add_row(row);
    if (r.error.empty())
      out << "zeta x" << short_num(r.point.zeta_multiplier) << "  mse " << format(r.point.mse) << "  w2 "
          << format(r.point.w2) << "\n";
  }
  csv::write(out_path(c, "zeta_sweep.csv"), t);
  write_dp_plot(c, results, "zeta_sweep.svg", "distortion-perception over zeta at fixed lambda");
  write_samples_dir(c, results, "zeta", true);
  report_errors(results, out);
  return kExitOk;
}

// --- oracle ----------------------------------------------------------------

double rel_err(const Matrix& a, const Matrix& b) {
  const double den = b.norm();
  const double num = (a - b).norm();
  return den > 0.0 ? num / den : num;
}

int cmd_oracle(const RunConfig& c, std::ostream& out) {
  if (c.source == SourceKind::learned) throw ConfigError("oracle needs gaussian_oracle or mixture_oracle");
  const NoiseSchedule schedule = c.build_schedule();
  csv::Table t;
  t.config = c.embedded_json();
  t.header = {"lambda", "check", "k", "value", "reference", "error", "tolerance", "status"};
  bool all_pass = true;
  auto add = [&](double l, const std::string& check, int k, double v, double ref, double err, double tol) {
    const bool pass = err <= tol;
    all_pass = all_pass && pass;
    t.add_row({format(l), check, std::to_string(k), format(v), format(ref), format(err), format(tol),
               pass ? "PASS" : "FAIL"});
    out << (pass ? "PASS " : "FAIL ") << "lambda " << short_num(l) << " " << check << " error " << format(err)
        << " tol " << format(tol) << "\n";
  };
  auto info = [&](double l, const std::string& check, double v) {
    t.add_row({format(l), check, "0", format(v), "", "", "", "INFO"});
    out << "INFO lambda " << short_num(l) << " " << check << " " << format(v) << "\n";
  };
  Source src = make_source(c);
  const Samples none;

  for (std::size_t li = 0; li < c.oracle_report.lambdas.size(); ++li) {
    const double l = c.oracle_report.lambdas[li];
    SamplerConfig sc = c.sampler_config();
    sc.lambda = l;
    if (c.source == SourceKind::gaussian_oracle) {
      const GaussianPosterior post = c.gaussian_posterior();
      const auto rec = theorem1_moments_recursion(post, schedule, l, RecursionStart::matched);
      double worst_mu = 0.0, worst_sigma = 0.0;
      int k_mu = 0, k_sigma = 0;
      for (int k = 0; k <= schedule.T; ++k) {
        const MarginalMoments cf = theorem1_moments_closed_form(post, schedule, l, k);
        const auto& r = rec[static_cast<std::size_t>(k)];
        const double em = rel_err(r.mu_lambda, cf.mu_lambda), es = rel_err(r.sigma_lambda, cf.sigma_lambda);
        if (em > worst_mu) worst_mu = em, k_mu = k;
        if (es > worst_sigma) worst_sigma = es, k_sigma = k;
      }
      add(l, "recursion_vs_closed_form_mean", k_mu, worst_mu, 0.0, worst_mu, c.oracle_report.rel_tol);
      add(l, "recursion_vs_closed_form_cov", k_sigma, worst_sigma, 0.0, worst_sigma, c.oracle_report.rel_tol);

      const auto std_rec = theorem1_moments_recursion(post, schedule, l, RecursionStart::standard_normal);
      const MarginalMoments& m0 = std_rec[0];
      const Matrix target = l * post.cov;
      const double cov_err = target.norm() > 0 ? rel_err(m0.sigma_lambda, target) : m0.sigma_lambda.norm();
      add(l, "limit_cov_vs_lambda_sigma_y", 0, m0.sigma_lambda.trace(), target.trace(), cov_err, 1e-2);
      const double mu_err = (m0.mu_lambda - post.mean).cwiseAbs().maxCoeff();
      add(l, "limit_mean_vs_mu_y", 0, m0.mu_lambda.norm(), post.mean.norm(), mu_err, 1e-3);

      // Monte Carlo endpoints under the exact reverse kernel.
      sc.sigma_tilde = SigmaTilde::exact_ck;
      sc.noise_scaling = NoiseScaling::sqrt_lambda;
      sc.seed = derive_seed(c.seed, {40, li});
      const int n = c.oracle_report.mc_samples;
      const Samples x = sample_many(n, sc, src.score, none, schedule, false, c.threads).x0;
      const Vector mean = x.colwise().mean().transpose();
      const Matrix centered = x.rowwise() - mean.transpose();
      const Matrix cov = centered.transpose() * centered / static_cast<double>(n - 1);
      const Matrix& S = m0.sigma_lambda;
      double worst_mean_z = 0.0, worst_cov_ratio = 0.0;
      for (int i = 0; i < post.dim(); ++i) {
        const double se = std::sqrt(std::max(S(i, i), 0.0) / n);
        const double dev = std::abs(mean[i] - m0.mu_lambda[i]);
        worst_mean_z = std::max(worst_mean_z, se > 0 ? dev / se : (dev > 1e-12 ? 1e300 : 0.0));
        for (int j = 0; j < post.dim(); ++j) {
          const double se_c = std::sqrt((S(i, i) * S(j, j) + S(i, j) * S(i, j)) / n);
          const double tol = std::max(3.0 * se_c, 2e-2 * S.cwiseAbs().maxCoeff());
          const double dc = std::abs(cov(i, j) - S(i, j));
          worst_cov_ratio = std::max(worst_cov_ratio, tol > 0 ? dc / tol : (dc > 1e-12 ? 1e300 : 0.0));
        }
      }
      add(l, "mc_mean_in_standard_errors", 0, mean.norm(), m0.mu_lambda.norm(), worst_mean_z, 3.0);
      add(l, "mc_cov_over_tolerance", 0, cov.trace(), S.trace(), worst_cov_ratio, 1.0);
    } else {
      const MixturePosterior post = std::get<OracleMixture>(src.score).posterior;
      const int n = c.oracle_report.mc_samples;
      sc.seed = derive_seed(c.seed, {40, li});
      const Samples x = sample_many(n, sc, src.score, none, schedule, false, c.threads).x0;
      if (l == 0.0) {
        const double dev = (x.array() - post.mean()).abs().maxCoeff();
        add(l, "max_endpoint_deviation_from_mmse", 0, x.col(0).mean(), post.mean(), dev, 2e-2);
      } else {
        Rng rng(derive_seed(c.seed, {kReferences, li}));
        const Vector ref = post.sample(n, rng);
        const double w2 = w2_empirical_1d(x.col(0), ref);
        // Only lambda = 1 has a known target; other lambdas are reported without a verdict.
        if (l == 1.0) add(l, "w2_to_posterior", 0, w2, 0.0, w2, 0.05);
        else info(l, "w2_to_posterior", w2);
      }
    }
  }
  csv::write(out_path(c, "oracle_report.csv"), t);
  out << (all_pass ? "all checks PASS\n" : "some checks FAIL\n");
  return all_pass ? kExitOk : kExitOther;
}

// --- trajectories ------------------------------------------------------------

int cmd_trajectories(const RunConfig& c, std::ostream& out) {
  if (c.trajectories.lambdas.empty()) throw ConfigError("trajectories.lambdas is empty");
  if (c.y.empty()) throw ConfigError("trajectories need 'y'");
  const NoiseSchedule schedule = c.build_schedule();
  Source src = make_source(c);
  const Samples ys(y_vector(c).transpose());
  double mmse = std::numeric_limits<double>::quiet_NaN();
  if (const auto* m = std::get_if<OracleMixture>(&src.score)) mmse = m->posterior.mean();
  if (const auto* g = std::get_if<OracleGaussian>(&src.score)) mmse = g->posterior.mean[0];

  csv::Table summary;
  summary.config = c.embedded_json();
  summary.header = {"lambda", "n_endpoints", "mean_x0", "var_x0", "mmse_x0", "max_abs_dev_from_mmse"};
  svg::Plot plot;
  plot.title = "reverse trajectories";
  plot.x_label = "step k";
  plot.y_label = "first coordinate of x_k";
  const char* colors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b"};

  for (std::size_t li = 0; li < c.trajectories.lambdas.size(); ++li) {
    SamplerConfig sc = c.sampler_config();
    sc.lambda = c.trajectories.lambdas[li];
    const std::string tag = std::to_string(li) + "_" + short_num(sc.lambda);
    if (c.trajectories.record) {
      SampleBatch b = sample_many(c.trajectories.n_trajectories, sc, src.score, ys, schedule, true, c.threads);
      csv::Table t;
      t.config = c.embedded_json();
      t.header = {"k", "chain"};
      for (Eigen::Index j = 0; j < b.x0.cols(); ++j) t.header.push_back("x" + std::to_string(j));
      for (int k = schedule.T; k >= 0; --k) {
        const Samples& s = b.trajectory[static_cast<std::size_t>(k)];
        for (Eigen::Index i = 0; i < s.rows(); ++i) {
          std::vector<std::string> row{std::to_string(k), std::to_string(i)};
          for (Eigen::Index j = 0; j < s.cols(); ++j) row.push_back(format(s(i, j)));
          t.add_row(row);
        }
      }
      csv::write(out_path(c, "trajectories_" + tag + ".csv"), t);
      for (Eigen::Index i = 0; i < b.x0.rows(); ++i) {
        svg::Series s{i == 0 ? "lambda " + short_num(sc.lambda) : "", colors[li % 6], {}, {}, true, 0.0};
        for (int k = schedule.T; k >= 0; --k) {
          s.x.push_back(static_cast<double>(k));
          s.y.push_back(b.trajectory[static_cast<std::size_t>(k)](i, 0));
        }
        plot.series.push_back(std::move(s));
      }
    }
    const Samples e = sample_many(c.trajectories.n_endpoints, sc, src.score, ys, schedule, false, c.threads).x0;
    csv::write(out_path(c, "endpoints_" + tag + ".csv"), csv::samples_table(e, c.embedded_json()));
    const double mean = e.col(0).mean();
    const double var = e.rows() > 1 ? (e.col(0).array() - mean).square().sum() / static_cast<double>(e.rows() - 1) : 0.0;
    const double dev = std::isnan(mmse) ? std::numeric_limits<double>::quiet_NaN() : (e.col(0).array() - mmse).abs().maxCoeff();
    summary.add_row({format(sc.lambda), std::to_string(e.rows()), format(mean), format(var),
                     std::isnan(mmse) ? "" : format(mmse), std::isnan(dev) ? "" : format(dev)});
    out << "lambda " << short_num(sc.lambda) << "  endpoint mean " << format(mean) << "  var " << format(var) << "\n";
  }
  csv::write(out_path(c, "endpoints_summary.csv"), summary);
  if (c.trajectories.record) svg::write(out_path(c, "trajectories.svg"), plot);
  return kExitOk;
}

// --- curve -----------------------------------------------------------------

int cmd_curve(const RunConfig& c, std::ostream& out) {
  csv::Table t;
  t.config = c.embedded_json();
  t.header = {"P", "D"};
  out << "P D\n";
  for (const auto& p : optimal_dp_curve(c.curve.trace_sigma, c.curve.p_values)) {
    t.add_row({format(p.P), format(p.D)});
    out << format(p.P) << " " << format(p.D) << "\n";
  }
  csv::write(out_path(c, "curve.csv"), t);
  return kExitOk;
}

using Handler = int (*)(const RunConfig&, std::ostream&);

const std::map<std::string, Handler>& handlers() {
  static const std::map<std::string, Handler> h{
      {"train", cmd_train},   {"sample", cmd_sample},       {"sweep", cmd_sweep},
      {"oracle", cmd_oracle}, {"zeta-sweep", cmd_zeta_sweep}, {"trajectories", cmd_trajectories},
      {"curve", cmd_curve}};
  return h;
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"train", "sample", "sweep", "oracle", "zeta-sweep", "trajectories",
                                              "curve"};
  return names;
}

int dispatch(const std::string& command, const RunConfig& config, std::ostream& out) {
  auto it = handlers().find(command);
  if (it == handlers().end()) throw ConfigError("unknown command '" + command + "'");
  make_dir(config.output_dir);
  return it->second(config, out);
}

int run_command(const std::string& command, const std::string& config_path, const Overrides& overrides,
                std::ostream& out, std::ostream& err) {
  try {
    RunConfig c = load_config(config_path);
    if (overrides.out) c.output_dir = *overrides.out;
    if (overrides.seed) c.seed = *overrides.seed;
    if (overrides.threads) c.threads = *overrides.threads;
    c.validate();
    return dispatch(command, c, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const InvalidArgument& e) {
    err << "invalid setting: " << e.what() << "\n";
    return kExitConfig;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << "\n";
    return kExitIo;
  } catch (const DivergenceError& e) {
    err << "diverged at step " << e.step() << ": " << e.what() << "\n";
    return kExitDivergence;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitOther;
  }
}

}  // namespace vsd::cli
