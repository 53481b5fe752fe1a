#include "vsd/config.hpp"

#include "vsd/metrics.hpp"

#include <json.hpp>

#include <fstream>
#include <set>
#include <sstream>

namespace vsd {

using nlohmann::json;

std::string to_string(SourceKind k) {
  switch (k) {
    case SourceKind::gaussian_oracle: return "gaussian_oracle";
    case SourceKind::mixture_oracle: return "mixture_oracle";
    case SourceKind::learned: return "learned";
  }
  return "";
}

namespace {

SourceKind parse_source(const std::string& s) {
  for (auto k : {SourceKind::gaussian_oracle, SourceKind::mixture_oracle, SourceKind::learned})
    if (to_string(k) == s) return k;
  throw InvalidArgument("unknown source '" + s + "'");
}

std::string line_col(const std::string& text, std::size_t offset) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return std::to_string(line) + ":" + std::to_string(col);
}

// Walks one JSON object, remembering which keys were read so leftovers can be
// reported as unknown.
class Reader {
 public:
  Reader(const json& j, std::string path, const std::string& text, const std::string& name)
      : j_(j), path_(std::move(path)), text_(text), name_(name) {
    if (!j_.is_object()) fail(path_.empty() ? "top level" : path_, "expected an object");
  }

  [[noreturn]] void fail(const std::string& key, const std::string& msg) const {
    // Anchor to the first occurrence of the key in the source text.
    const std::string leaf = key.substr(key.rfind('.') == std::string::npos ? 0 : key.rfind('.') + 1);
    const std::size_t at = text_.find("\"" + leaf + "\"");
    throw ConfigError(name_ + ":" + line_col(text_, at == std::string::npos ? 0 : at) + ": " + key + ": " + msg);
  }

  std::string key(const std::string& k) const { return path_.empty() ? k : path_ + "." + k; }

  const json* find(const std::string& k) {
    seen_.insert(k);
    auto it = j_.find(k);
    return it == j_.end() ? nullptr : &*it;
  }

  template <class T>
  void get(const std::string& k, T& out) {
    const json* v = find(k);
    if (!v) return;
    try {
      if constexpr (std::is_same_v<T, double>) {
        if (!v->is_number()) fail(key(k), "expected a number");
      } else if constexpr (std::is_integral_v<T> && !std::is_same_v<T, bool>) {
        if (!v->is_number_integer()) fail(key(k), "expected an integer");
        if constexpr (std::is_unsigned_v<T>) {
          if (v->is_number_integer() && !v->is_number_unsigned()) fail(key(k), "expected a nonnegative integer");
        }
      } else if constexpr (std::is_same_v<T, bool>) {
        if (!v->is_boolean()) fail(key(k), "expected true or false");
      } else if constexpr (std::is_same_v<T, std::string>) {
        if (!v->is_string()) fail(key(k), "expected a string");
      }
      out = v->get<T>();
    } catch (const json::exception& e) {
      fail(key(k), std::string("wrong type (") + e.what() + ")");
    }
  }

  template <class E, class Parse>
  void get_enum(const std::string& k, E& out, Parse parse) {
    std::string s;
    const json* v = find(k);
    if (!v) return;
    get(k, s);
    try {
      out = parse(s);
    } catch (const InvalidArgument& e) {
      fail(key(k), e.what());
    }
  }

  Reader child(const std::string& k, const json& fallback) {
    const json* v = find(k);
    return Reader(v ? *v : fallback, key(k), text_, name_);
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) fail(key(it.key()), "unknown key");
  }

 private:
  const json& j_;
  std::string path_;
  const std::string& text_;
  const std::string& name_;
  std::set<std::string> seen_;
};

const json& empty_object() {
  static const json e = json::object();
  return e;
}

Matrix to_matrix(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) return {};
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows[0].size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows[0].size()) throw ConfigError("ragged matrix in config");
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  }
  return m;
}

std::vector<std::vector<double>> from_matrix(const Matrix& m) {
  std::vector<std::vector<double>> rows(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) rows[static_cast<std::size_t>(i)].push_back(m(i, j));
  return rows;
}

Vector to_vector(const std::vector<double>& v) { return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size())); }

}  // namespace

RunConfig parse_config(const std::string& text, const std::string& name) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(name + ":" + line_col(text, e.byte > 0 ? e.byte - 1 : 0) + ": " + e.what());
  }
  RunConfig c;
  Reader r(root, "", text, name);
  r.get("seed", c.seed);
  r.get("output_dir", c.output_dir);
  r.get("threads", c.threads);
  r.get_enum("source", c.source, parse_source);
  r.get("y", c.y);
  r.get("checkpoint", c.checkpoint);

  {
    Reader s = r.child("schedule", empty_object());
    s.get("T", c.schedule.T);
    s.get("beta_min", c.schedule.beta_min);
    s.get("beta_max", c.schedule.beta_max);
    s.finish();
  }
  {
    Reader d = r.child("dataset", empty_object());
    d.get_enum("kind", c.dataset.kind, parse_dataset_kind);
    d.get("weights", c.dataset.mixture.weights);
    d.get("means", c.dataset.mixture.means);
    d.get("stds", c.dataset.mixture.stds);
    d.get("arms", c.dataset.arms);
    d.get("radial_std", c.dataset.radial_std);
    d.get("tangential_std", c.dataset.tangential_std);
    d.get("rate", c.dataset.rate);
    d.get("scale", c.dataset.scale);
    d.get("noise", c.dataset.noise);
    std::vector<double> mean(c.dataset.mean.data(), c.dataset.mean.data() + c.dataset.mean.size());
    std::vector<std::vector<double>> cov = from_matrix(c.dataset.cov);
    d.get("mean", mean);
    d.get("cov", cov);
    c.dataset.mean = to_vector(mean);
    c.dataset.cov = to_matrix(cov);
    d.finish();
  }
  {
    Reader m = r.child("measurement", empty_object());
    m.get("a", c.measurement.a);
    m.get("noise_std", c.measurement.noise_std);
    m.finish();
  }
  {
    Reader g = r.child("gaussian", empty_object());
    g.get("posterior_mean", c.gaussian.posterior_mean);
    g.get("posterior_cov", c.gaussian.posterior_cov);
    g.get("prior_mean", c.gaussian.prior_mean);
    g.get("prior_cov", c.gaussian.prior_cov);
    g.finish();
  }
  {
    Reader n = r.child("network", empty_object());
    n.get("embed_dim", c.network.embed_dim);
    n.get("encoder_layers", c.network.encoder_layers);
    n.get("encoding_dim", c.network.encoding_dim);
    n.get("decoder_layers", c.network.decoder_layers);
    n.get_enum("activation", c.network.activation, parse_activation);
    n.get_enum("parameterization", c.parameterization, parse_parameterization);
    n.finish();
  }
  {
    Reader t = r.child("train", empty_object());
    t.get("steps", c.train.steps);
    t.get("batch_size", c.train.batch_size);
    t.get("learning_rate", c.train.adam.learning_rate);
    t.get("beta1", c.train.adam.beta1);
    t.get("beta2", c.train.adam.beta2);
    t.get("epsilon", c.train.adam.epsilon);
    t.get("log_every", c.train.log_every);
    t.get("checkpoint_every", c.train.checkpoint_every);
    t.get("dataset_size", c.train.dataset_size);
    t.get("log_wall_time", c.train.log_wall_time);
    t.finish();
  }
  {
    Reader s = r.child("sampler", empty_object());
    s.get("lambda", c.sampler.lambda);
    {
      Reader z = s.child("zeta", empty_object());
      z.get_enum("formula", c.sampler.zeta.formula, parse_zeta_formula);
      z.get("c0", c.sampler.zeta.c0);
      z.get("c1", c.sampler.zeta.c1);
      z.get("multiplier", c.sampler.zeta.multiplier);
      z.finish();
    }
    s.get_enum("sigma_tilde", c.sampler.sigma_tilde, parse_sigma_tilde);
    s.get_enum("noise_scaling", c.sampler.noise_scaling, parse_noise_scaling);
    s.get("x0_clip", c.sampler.x0_clip);
    s.get("n_samples", c.sampler.n_samples);
    s.finish();
  }
  {
    Reader s = r.child("sweep", empty_object());
    s.get("lambdas", c.sweep.lambdas);
    s.get("zeta_multipliers", c.sweep.zeta_multipliers);
    s.get("paired", c.sweep.paired);
    s.get("n_samples", c.sweep.n_samples);
    s.get("n_references", c.sweep.n_references);
    s.get("kl_bins", c.sweep.kl_bins);
    s.get("w2_exact_max", c.sweep.w2_exact_max);
    s.get("write_samples", c.sweep.write_samples);
    s.finish();
  }
  {
    Reader t = r.child("trajectories", empty_object());
    t.get("lambdas", c.trajectories.lambdas);
    t.get("n_trajectories", c.trajectories.n_trajectories);
    t.get("n_endpoints", c.trajectories.n_endpoints);
    t.get("record", c.trajectories.record);
    t.finish();
  }
  {
    Reader o = r.child("oracle_report", empty_object());
    o.get("lambdas", c.oracle_report.lambdas);
    o.get("rel_tol", c.oracle_report.rel_tol);
    o.get("mc_samples", c.oracle_report.mc_samples);
    o.finish();
  }
  {
    Reader v = r.child("curve", empty_object());
    v.get("trace_sigma", c.curve.trace_sigma);
    v.get("p_values", c.curve.p_values);
    v.finish();
  }
  r.finish();
  try {
    c.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(name + ": " + e.what());
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open config: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str(), path);
}

void RunConfig::validate() const {
  auto check = [](bool ok, const std::string& msg) {
    if (!ok) throw ConfigError(msg);
  };
  auto lambdas_ok = [](const std::vector<double>& ls) {
    for (double l : ls)
      if (!(l >= 0.0 && l <= 1.0)) return false;
    return true;
  };
  check(threads >= 1, "threads must be at least 1");
  check(schedule.T >= 2, "schedule.T must be at least 2");
  check(schedule.beta_min > 0.0 && schedule.beta_min <= schedule.beta_max && schedule.beta_max < 1.0,
        "schedule needs 0 < beta_min <= beta_max < 1");
  check(measurement.noise_std > 0.0, "measurement.noise_std must be positive");
  try {
    dataset.validate();
    network.validate();
    train_config().validate();
    sampler_config().validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
  check(sampler.n_samples >= 1, "sampler.n_samples must be at least 1");
  check(train.dataset_size >= 0, "train.dataset_size must be nonnegative");
  check(lambdas_ok(sweep.lambdas), "sweep.lambdas must lie in [0, 1]");
  check(lambdas_ok(trajectories.lambdas), "trajectories.lambdas must lie in [0, 1]");
  check(lambdas_ok(oracle_report.lambdas), "oracle_report.lambdas must lie in [0, 1]");
  for (double m : sweep.zeta_multipliers) check(m >= 0.0, "sweep.zeta_multipliers must be nonnegative");
  check(sweep.n_samples >= 1 && sweep.n_references >= 0, "sweep sample counts must be positive");
  check(sweep.kl_bins >= 2, "sweep.kl_bins must be at least 2");
  check(sweep.w2_exact_max >= 1 && sweep.w2_exact_max <= kMaxExactW2, "sweep.w2_exact_max out of range");
  check(trajectories.n_trajectories >= 1 && trajectories.n_endpoints >= 1, "trajectory counts must be positive");
  check(oracle_report.rel_tol > 0.0 && oracle_report.mc_samples >= 2, "oracle_report settings out of range");
  check(curve.trace_sigma > 0.0, "curve.trace_sigma must be positive");
  for (double p : curve.p_values) check(p >= 0.0, "curve.p_values must be nonnegative");
  if (source == SourceKind::gaussian_oracle) {
    const bool direct = !gaussian.posterior_mean.empty();
    const bool prior = !gaussian.prior_mean.empty();
    check(direct != prior, "gaussian: give either posterior_mean/posterior_cov or prior_mean/prior_cov");
    if (prior) check(y.size() == gaussian.prior_mean.size(), "y must match the prior dimension");
    try {
      gaussian_posterior().validate();
    } catch (const Error& e) {
      throw ConfigError(std::string("gaussian: ") + e.what());
    }
  }
  if (source == SourceKind::mixture_oracle) {
    check(y.size() <= 1, "mixture_oracle needs a scalar y");
  }
}

std::string RunConfig::embedded_json() const {
  json j;
  j["seed"] = seed;
  j["source"] = to_string(source);
  j["y"] = y;
  j["checkpoint"] = checkpoint;
  j["schedule"] = {{"T", schedule.T}, {"beta_min", schedule.beta_min}, {"beta_max", schedule.beta_max}};
  j["dataset"] = {{"kind", to_string(dataset.kind)},
                  {"weights", dataset.mixture.weights},
                  {"means", dataset.mixture.means},
                  {"stds", dataset.mixture.stds},
                  {"arms", dataset.arms},
                  {"radial_std", dataset.radial_std},
                  {"tangential_std", dataset.tangential_std},
                  {"rate", dataset.rate},
                  {"scale", dataset.scale},
                  {"noise", dataset.noise},
                  {"mean", std::vector<double>(dataset.mean.data(), dataset.mean.data() + dataset.mean.size())},
                  {"cov", from_matrix(dataset.cov)}};
  j["measurement"] = {{"a", measurement.a}, {"noise_std", measurement.noise_std}};
  j["gaussian"] = {{"posterior_mean", gaussian.posterior_mean},
                   {"posterior_cov", gaussian.posterior_cov},
                   {"prior_mean", gaussian.prior_mean},
                   {"prior_cov", gaussian.prior_cov}};
  j["network"] = {{"embed_dim", network.embed_dim},
                  {"encoder_layers", network.encoder_layers},
                  {"encoding_dim", network.encoding_dim},
                  {"decoder_layers", network.decoder_layers},
                  {"activation", to_string(network.activation)},
                  {"parameterization", to_string(parameterization)}};
  j["train"] = {{"steps", train.steps},
                {"batch_size", train.batch_size},
                {"learning_rate", train.adam.learning_rate},
                {"beta1", train.adam.beta1},
                {"beta2", train.adam.beta2},
                {"epsilon", train.adam.epsilon},
                {"log_every", train.log_every},
                {"checkpoint_every", train.checkpoint_every},
                {"dataset_size", train.dataset_size},
                {"log_wall_time", train.log_wall_time}};
  j["sampler"] = {{"lambda", sampler.lambda},
                  {"zeta",
                   {{"formula", to_string(sampler.zeta.formula)},
                    {"c0", sampler.zeta.c0},
                    {"c1", sampler.zeta.c1},
                    {"multiplier", sampler.zeta.multiplier}}},
                  {"sigma_tilde", to_string(sampler.sigma_tilde)},
                  {"noise_scaling", to_string(sampler.noise_scaling)},
                  {"x0_clip", sampler.x0_clip},
                  {"n_samples", sampler.n_samples}};
  j["sweep"] = {{"lambdas", sweep.lambdas},
                {"zeta_multipliers", sweep.zeta_multipliers},
                {"paired", sweep.paired},
                {"n_samples", sweep.n_samples},
                {"n_references", sweep.n_references},
                {"kl_bins", sweep.kl_bins},
                {"w2_exact_max", sweep.w2_exact_max},
                {"write_samples", sweep.write_samples}};
  j["trajectories"] = {{"lambdas", trajectories.lambdas},
                       {"n_trajectories", trajectories.n_trajectories},
                       {"n_endpoints", trajectories.n_endpoints},
                       {"record", trajectories.record}};
  j["oracle_report"] = {{"lambdas", oracle_report.lambdas},
                        {"rel_tol", oracle_report.rel_tol},
                        {"mc_samples", oracle_report.mc_samples}};
  j["curve"] = {{"trace_sigma", curve.trace_sigma}, {"p_values", curve.p_values}};
  return j.dump();
}

NoiseSchedule RunConfig::build_schedule() const {
  return vsd::build_schedule(schedule.T, schedule.beta_min, schedule.beta_max);
}

MeasurementModel RunConfig::measurement_model() const {
  return MeasurementModel::scaled_identity(dataset.dim(), measurement.a, measurement.noise_std);
}

MixtureModel RunConfig::mixture_model() const {
  MixtureModel m = dataset.mixture;
  m.a = measurement.a;
  m.sigma0 = measurement.noise_std;
  return m;
}

GaussianPosterior RunConfig::gaussian_posterior() const {
  if (!gaussian.posterior_mean.empty())
    return {to_vector(gaussian.posterior_mean), to_matrix(gaussian.posterior_cov)};
  const Vector mean = to_vector(gaussian.prior_mean);
  const auto d = static_cast<int>(mean.size());
  return vsd::gaussian_posterior(mean, to_matrix(gaussian.prior_cov),
                                 MeasurementModel::scaled_identity(d, measurement.a, measurement.noise_std),
                                 to_vector(y));
}

SamplerConfig RunConfig::sampler_config() const {
  SamplerConfig s;
  s.lambda = sampler.lambda;
  s.zeta = sampler.zeta;
  s.sigma_tilde = sampler.sigma_tilde;
  s.noise_scaling = sampler.noise_scaling;
  s.x0_clip = sampler.x0_clip;
  s.guidance = source == SourceKind::learned ? Guidance::dps : Guidance::oracle_score;
  s.seed = derive_seed(seed, {20});
  return s;
}

TrainConfig RunConfig::train_config() const {
  TrainConfig t;
  t.steps = train.steps;
  t.batch_size = train.batch_size;
  t.adam = train.adam;
  t.seed = derive_seed(seed, {30});
  t.log_every = train.log_every;
  t.checkpoint_every = train.checkpoint_every;
  t.config_json = embedded_json();
  return t;
}

}  // namespace vsd
