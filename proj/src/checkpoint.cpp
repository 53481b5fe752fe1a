#include "vsd/checkpoint.hpp"

#include <bit>
#include <fstream>
#include <map>
#include <sstream>

namespace vsd {

namespace {

void put_doubles(std::string& out, const Vector& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const auto bits = std::bit_cast<std::uint64_t>(v[i]);
    for (int b = 0; b < 8; ++b) out.push_back(static_cast<char>((bits >> (8 * b)) & 0xffu));
  }
}

Vector get_doubles(const std::string& in, std::size_t& pos, std::size_t n) {
  if (in.size() < pos + 8 * n) throw IoError("checkpoint payload is truncated");
  Vector v(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    std::uint64_t bits = 0;
    for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(in[pos + b])) << (8 * b);
    v[static_cast<Eigen::Index>(i)] = std::bit_cast<double>(bits);
    pos += 8;
  }
  return v;
}

std::string join(const std::vector<int>& xs) {
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? " " : "") + std::to_string(xs[i]);
  return s.empty() ? "-" : s;
}

std::vector<int> split_ints(const std::string& s) {
  std::vector<int> out;
  if (s == "-") return out;
  std::istringstream is(s);
  int v;
  while (is >> v) out.push_back(v);
  return out;
}

}  // namespace

std::string serialize_checkpoint(const Checkpoint& c) {
  const NetworkShape& sh = c.net.shape();
  std::ostringstream m;
  m << "vsd-checkpoint " << kCheckpointVersion << '\n'
    << "data_dim " << sh.data_dim << '\n'
    << "embed_dim " << sh.embed_dim << '\n'
    << "encoder_layers " << join(sh.encoder_layers) << '\n'
    << "encoding_dim " << sh.encoding_dim << '\n'
    << "decoder_layers " << join(sh.decoder_layers) << '\n'
    << "activation " << to_string(sh.activation) << '\n'
    << "parameterization " << to_string(c.net.parameterization()) << '\n'
    << "optimizer adam\n"
    << "optimizer_state " << (c.adam ? 1 : 0) << '\n'
    << "optimizer_t " << (c.adam ? c.adam->t : 0) << '\n'
    << "seed " << c.seed << '\n'
    << "step " << c.step << '\n'
    << "parameter_count " << c.net.parameter_count() << '\n'
    << "config " << (c.config_json.empty() ? "{}" : c.config_json) << '\n'
    << "end_manifest\n";
  std::string out = m.str();
  put_doubles(out, c.net.parameters());
  if (c.adam) {
    put_doubles(out, c.adam->m);
    put_doubles(out, c.adam->v);
  }
  return out;
}

Checkpoint parse_checkpoint(const std::string& bytes) {
  std::map<std::string, std::string> kv;
  std::size_t pos = 0;
  bool terminated = false;
  while (pos < bytes.size()) {
    const std::size_t nl = bytes.find('\n', pos);
    if (nl == std::string::npos) break;
    const std::string line = bytes.substr(pos, nl - pos);
    pos = nl + 1;
    if (line == "end_manifest") {
      terminated = true;
      break;
    }
    const std::size_t sp = line.find(' ');
    if (sp == std::string::npos) throw IoError("malformed checkpoint manifest line: " + line);
    kv[line.substr(0, sp)] = line.substr(sp + 1);
  }
  if (!terminated) throw IoError("checkpoint manifest is not terminated");

  auto need = [&](const std::string& key) -> const std::string& {
    auto it = kv.find(key);
    if (it == kv.end()) throw IoError("checkpoint manifest lacks '" + key + "'");
    return it->second;
  };
  if (std::stoi(need("vsd-checkpoint")) != kCheckpointVersion) throw IoError("unsupported checkpoint version");

  try {
    NetworkShape sh;
    sh.data_dim = std::stoi(need("data_dim"));
    sh.embed_dim = std::stoi(need("embed_dim"));
    sh.encoder_layers = split_ints(need("encoder_layers"));
    sh.encoding_dim = std::stoi(need("encoding_dim"));
    sh.decoder_layers = split_ints(need("decoder_layers"));
    sh.activation = parse_activation(need("activation"));
    ScoreNetwork net(sh, parse_parameterization(need("parameterization")));
    const std::size_t count = std::stoull(need("parameter_count"));
    if (count != net.parameter_count()) throw IoError("checkpoint parameter count does not match architecture");

    Checkpoint c{std::move(net), std::nullopt, std::stoull(need("seed")), std::stol(need("step")), need("config")};
    c.net.parameters() = get_doubles(bytes, pos, count);
    if (need("optimizer_state") == "1") {
      AdamState a;
      a.t = std::stol(need("optimizer_t"));
      a.m = get_doubles(bytes, pos, count);
      a.v = get_doubles(bytes, pos, count);
      c.adam = std::move(a);
    }
    if (pos != bytes.size()) throw IoError("checkpoint has trailing bytes");
    return c;
  } catch (const std::logic_error& e) {
    throw IoError(std::string("malformed checkpoint manifest: ") + e.what());
  } catch (const InvalidArgument& e) {
    throw IoError(std::string("malformed checkpoint manifest: ") + e.what());
  }
}

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
  const std::string bytes = serialize_checkpoint(ckpt);
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open checkpoint for writing: " + path);
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw IoError("failed writing checkpoint: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open checkpoint: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_checkpoint(ss.str());
}

}  // namespace vsd
