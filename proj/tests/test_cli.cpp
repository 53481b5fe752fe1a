#include "vsd/checkpoint.hpp"
#include "vsd/commands.hpp"
#include "vsd/csv.hpp"
#include "vsd/svg.hpp"

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

using namespace vsd;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("vsd_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void spit(const fs::path& p, const std::string& s) {
  std::ofstream f(p, std::ios::binary);
  f << s;
}

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(const std::string& cmd, const fs::path& config, const cli::Overrides& o = {}) {
  std::ostringstream out, err;
  const int code = cli::run_command(cmd, config.string(), o, out, err);
  return {code, out.str(), err.str()};
}

int shell(const std::string& args) {
  const int status = std::system((std::string(VSDIFF_BINARY) + " " + args + " >/dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

const char* kGaussian = R"({
  "seed": 3,
  "source": "gaussian_oracle",
  "schedule": {"T": 60, "beta_min": 0.001, "beta_max": 0.2},
  "gaussian": {"posterior_mean": [0.5, -1.0], "posterior_cov": [[0.6, 0.0], [0.0, 0.4]]},
  "sampler": {"sigma_tilde": "exact_ck", "n_samples": 50},
  "sweep": {"lambdas": [0.0, 0.5, 1.0], "n_samples": 64},
  "oracle_report": {"lambdas": [0.0, 1.0], "mc_samples": 200},
  "trajectories": {"lambdas": [0.0, 1.0], "n_trajectories": 3, "n_endpoints": 20},
  "y": [0.0, 0.0]
})";

}  // namespace

TEST_CASE("config defaults and overrides") {
  const RunConfig c = parse_config("{}");
  CHECK(c.schedule.T == 1000);
  CHECK(c.sweep.lambdas.size() == 11);
  CHECK(c.sampler.sigma_tilde == SigmaTilde::beta);
  CHECK(c.sampler.noise_scaling == NoiseScaling::sqrt_lambda);
  CHECK(c.measurement.noise_std == 0.5);

  const RunConfig g = parse_config(kGaussian);
  CHECK(g.source == SourceKind::gaussian_oracle);
  CHECK(g.gaussian_posterior().cov(1, 1) == 0.4);
  CHECK(g.sampler_config().seed == derive_seed(3, {20}));
  // embedded config parses back to the same config
  CHECK(parse_config(g.embedded_json()).embedded_json() == g.embedded_json());
}

TEST_CASE("config errors are line anchored") {
  try {
    parse_config("{\n  \"seed\": 1,\n  \"sampler\": {\"lambda\": 0.5,\n    \"bogus\": 1}\n}", "cfg.json");
    FAIL("expected error");
  } catch (const ConfigError& e) {
    const std::string m = e.what();
    CHECK(m.find("cfg.json:4:") == 0);
    CHECK(m.find("sampler.bogus") != std::string::npos);
    CHECK(m.find("unknown key") != std::string::npos);
  }
  try {
    parse_config("{\n  \"seed\": 1,\n  \"schedule\": {\"T\": }\n}", "broken.json");
    FAIL("expected error");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("broken.json:3:") == 0);
  }
  CHECK_THROWS_AS(parse_config(R"({"schedule": {"T": "ten"}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"sampler": {"lambda": 1.5}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"sampler": {"sigma_tilde": "wide"}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"sweep": {"lambdas": [0.0, -0.1]}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"seed": -4})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"source": "gaussian_oracle"})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"oracle_report": {"lambdas": [2.0]}})"), ConfigError);
}

TEST_CASE("csv format round trips doubles") {
  for (double v : {0.1, -1.0 / 3.0, 1e-300, 6.02214076e23, -0.0, 4.9e-324}) {
    const std::string s = csv::format(v);
    CHECK(std::strtod(s.c_str(), nullptr) == v);
  }
  const fs::path dir = scratch("csv");
  Samples s(3, 2);
  s << 0.1, 0.2, -1.0 / 3.0, 1e-17, 5.0, 6.0;
  csv::write((dir / "s.csv").string(), csv::samples_table(s, "{\"a\":1}"));
  const std::string text = slurp(dir / "s.csv");
  CHECK(text.rfind("# config: {\"a\":1}\nx0,x1\n", 0) == 0);
  CHECK(text.find('\r') == std::string::npos);
  CHECK(csv::to_samples(csv::read((dir / "s.csv").string())) == s);
  CHECK(csv::embedded_config((dir / "s.csv").string()) == "{\"a\":1}");
}

TEST_CASE("svg output is deterministic") {
  svg::Plot p;
  p.title = "t";
  p.series.push_back({"pts", "#000000", {0.0, 1.0, 2.0}, {1.0, 0.5, 0.25}, false, 2.0});
  p.series.push_back({"line", "#ff0000", {0.0, 2.0}, {1.0, 0.0}, true, 0.0});
  const std::string a = svg::render(p);
  CHECK(a == svg::render(p));
  CHECK(a.find("<svg") != std::string::npos);
  CHECK(a.find("polyline") != std::string::npos);
  svg::Plot empty;
  CHECK(svg::render(empty).find("</svg>") != std::string::npos);
}

TEST_CASE("exit codes") {
  const fs::path dir = scratch("exit");
  CHECK(run("curve", dir / "missing.json").code == cli::kExitIo);

  spit(dir / "bad.json", "{\n \"seed\": 1,,\n}");
  const Run bad = run("curve", dir / "bad.json");
  CHECK(bad.code == cli::kExitConfig);
  CHECK(bad.err.find("bad.json:2:") != std::string::npos);

  spit(dir / "lam.json", R"({"oracle_report": {"lambdas": [0.5, 1.2]}})");
  CHECK(run("oracle", dir / "lam.json").code == cli::kExitConfig);

  spit(dir / "zeta.json", R"({"source": "learned", "checkpoint": "x.bin", "sweep": {"zeta_multipliers": []}})");
  CHECK(run("zeta-sweep", dir / "zeta.json").code == cli::kExitConfig);

  // output directory blocked by a regular file
  spit(dir / "blocker", "x");
  spit(dir / "curve.json", "{}");
  cli::Overrides o;
  o.out = (dir / "blocker" / "sub").string();
  CHECK(run("curve", dir / "curve.json", o).code == cli::kExitIo);

  // learned source that blows up on the first step
  ScoreNetwork bad_net(NetworkShape{}, Parameterization::score);
  bad_net.parameters().setZero();
  bad_net.bias(bad_net.decoder().back()).setConstant(1e12);
  save_checkpoint((dir / "bad.bin").string(), Checkpoint{bad_net, std::nullopt, 0, 0, "{}"});
  spit(dir / "div.json", "{\"source\": \"learned\", \"checkpoint\": \"" + (dir / "bad.bin").string() +
                             "\", \"dataset\": {\"kind\": \"moon\"}, \"y\": [0.0, 0.0], \"schedule\": {\"T\": 20},"
                             " \"sampler\": {\"n_samples\": 4}}");
  o.out = (dir / "div").string();
  CHECK(run("sample", dir / "div.json", o).code == cli::kExitDivergence);

  // the binary itself
  CHECK(shell("") == cli::kExitConfig);
  CHECK(shell("curve") == cli::kExitConfig);
  CHECK(shell("nosuch --config x") == cli::kExitConfig);
  CHECK(shell("curve --config " + (dir / "curve.json").string() + " --out " + (dir / "bin").string()) == 0);
  CHECK(fs::exists(dir / "bin" / "curve.csv"));
  CHECK(shell("curve --config " + (dir / "missing.json").string()) == cli::kExitIo);
  CHECK(shell("sweep --config " + (dir / "lam.json").string() + " --threads 0") == cli::kExitConfig);
}

TEST_CASE("curve command table") {
  const fs::path dir = scratch("curve");
  spit(dir / "c.json", R"({"curve": {"trace_sigma": 1.0, "p_values": [0.0, 0.5, 2.0]}})");
  cli::Overrides o;
  o.out = (dir / "o").string();
  REQUIRE(run("curve", dir / "c.json", o).code == 0);
  const csv::Table t = csv::read((dir / "o" / "curve.csv").string());
  REQUIRE(t.rows.size() == 3);
  CHECK(t.header == std::vector<std::string>{"P", "D"});
  CHECK(std::stod(t.rows[0][1]) == 2.0);
  CHECK(std::stod(t.rows[1][1]) == 1.25);
  CHECK(std::stod(t.rows[2][1]) == 1.0);
}

TEST_CASE("gaussian oracle commands and replay") {
  const fs::path dir = scratch("gauss");
  spit(dir / "g.json", kGaussian);
  cli::Overrides o;
  o.out = (dir / "a").string();
  for (const std::string cmd : {"sweep", "oracle", "trajectories", "sample"}) {
    const Run r = run(cmd, dir / "g.json", o);
    INFO(cmd, " ", r.err, r.out);
    CHECK(r.code == 0);
  }
  const csv::Table dp = csv::read((dir / "a" / "dp_curve.csv").string());
  CHECK(dp.header == std::vector<std::string>{"lambda", "mse", "w2", "kl", "n_samples", "seed"});
  CHECK(dp.rows.size() == 3);
  CHECK(fs::exists(dir / "a" / "dp_curve.svg"));
  CHECK(slurp(dir / "a" / "dp_curve.svg").find("optimal D(P)") != std::string::npos);
  CHECK(fs::exists(dir / "a" / "samples" / "lambda_0_0.csv"));
  CHECK(fs::exists(dir / "a" / "trajectories_1_1.csv"));
  CHECK(fs::exists(dir / "a" / "trajectories.svg"));

  const csv::Table rep = csv::read((dir / "a" / "oracle_report.csv").string());
  for (const auto& row : rep.rows) CHECK(row.back() == "PASS");

  // rerun from the embedded config with another thread count
  const std::string embedded = csv::embedded_config((dir / "a" / "dp_curve.csv").string());
  spit(dir / "replay.json", embedded);
  o.out = (dir / "b").string();
  o.threads = 2;
  for (const std::string cmd : {"sweep", "oracle", "trajectories", "sample"}) CHECK(run(cmd, dir / "replay.json", o).code == 0);
  for (const auto& e : fs::recursive_directory_iterator(dir / "a")) {
    if (!e.is_regular_file()) continue;
    const fs::path rel = fs::relative(e.path(), dir / "a");
    INFO(rel.string());
    CHECK(slurp(e.path()) == slurp(dir / "b" / rel));
  }
}

TEST_CASE("oracle command rejects learned source and single lambda sweep writes one row") {
  const fs::path dir = scratch("single");
  RunConfig c = parse_config(kGaussian);
  c.sweep.lambdas = {0.0};
  c.output_dir = (dir / "o").string();
  std::ostringstream out;
  CHECK(cli::dispatch("sweep", c, out) == 0);
  CHECK(csv::read((dir / "o" / "dp_curve.csv").string()).rows.size() == 1);
  c.source = SourceKind::learned;
  CHECK_THROWS_AS(cli::dispatch("oracle", c, out), ConfigError);
  CHECK_THROWS_AS(cli::dispatch("nosuch", c, out), ConfigError);
}

TEST_CASE("trajectories without recording") {
  const fs::path dir = scratch("norec");
  RunConfig c = parse_config(kGaussian);
  c.trajectories.record = false;
  c.output_dir = (dir / "o").string();
  std::ostringstream out;
  CHECK(cli::dispatch("trajectories", c, out) == 0);
  CHECK(!fs::exists(dir / "o" / "trajectories_0_0.csv"));
  CHECK(!fs::exists(dir / "o" / "trajectories.svg"));
  CHECK(fs::exists(dir / "o" / "endpoints_0_0.csv"));
  CHECK(fs::exists(dir / "o" / "endpoints_summary.csv"));
}

TEST_CASE("train, reload and sample a learned model") {
  const fs::path dir = scratch("train");
  const std::string cfg = R"({
    "seed": 9,
    "source": "learned",
    "dataset": {"kind": "mixture1d"},
    "schedule": {"T": 50, "beta_min": 0.001, "beta_max": 0.2},
    "network": {"embed_dim": 4, "encoder_layers": [8], "encoding_dim": 4, "decoder_layers": [16]},
    "train": {"steps": 40, "batch_size": 16, "log_every": 10},
    "checkpoint": ")" + (dir / "a" / "checkpoint.bin").string() + R"(",
    "y": [0.3],
    "sampler": {"n_samples": 20, "zeta": {"formula": "constant", "c0": 0.02, "c1": 0.0}},
    "sweep": {"lambdas": [0.0, 1.0], "n_samples": 30, "zeta_multipliers": [0.5, 1.0]}
  })";
  spit(dir / "t.json", cfg);
  cli::Overrides o;
  o.out = (dir / "a").string();
  REQUIRE(run("train", dir / "t.json", o).code == 0);
  const Checkpoint ck = load_checkpoint((dir / "a" / "checkpoint.bin").string());
  CHECK(ck.step == 40);
  CHECK(ck.net.data_dim() == 1);
  const csv::Table log = csv::read((dir / "a" / "train_log.csv").string());
  CHECK(log.header == std::vector<std::string>{"step", "loss", "wall_ms"});
  CHECK(log.rows.size() == 4);

  o.out = (dir / "b").string();
  REQUIRE(run("train", dir / "t.json", o).code == 0);
  CHECK(slurp(dir / "a" / "checkpoint.bin") == slurp(dir / "b" / "checkpoint.bin"));
  CHECK(slurp(dir / "a" / "train_log.csv") == slurp(dir / "b" / "train_log.csv"));

  o.out = (dir / "a").string();
  CHECK(run("sample", dir / "t.json", o).code == 0);
  CHECK(csv::to_samples(csv::read((dir / "a" / "samples.csv").string())).rows() == 20);
  CHECK(run("sweep", dir / "t.json", o).code == 0);
  CHECK(run("zeta-sweep", dir / "t.json", o).code == 0);
  const csv::Table z = csv::read((dir / "a" / "zeta_sweep.csv").string());
  CHECK(z.header.front() == "zeta_multiplier");
  CHECK(z.rows.size() == 2);
  // the multiplier-1 row equals the lambda-1 sweep row: same seed and same config
  const csv::Table dp = csv::read((dir / "a" / "dp_curve.csv").string());
  CHECK(z.rows[1][2] == dp.rows[1][1]);
  CHECK(z.rows[1][3] == dp.rows[1][2]);
}
