#pragma once

#include "vsd/score_network.hpp"
#include "vsd/trainer.hpp"

#include <cstdint>
#include <optional>
#include <string>

namespace vsd {

inline constexpr int kCheckpointVersion = 1;

struct Checkpoint {
  ScoreNetwork net;
  std::optional<AdamState> adam;
  std::uint64_t seed = 0;
  long step = 0;
  std::string config_json;
};

// Text manifest terminated by an "end_manifest" line, then little-endian
// doubles: parameters, followed by Adam first and second moments if present.
void save_checkpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::string& path);

std::string serialize_checkpoint(const Checkpoint& ckpt);
Checkpoint parse_checkpoint(const std::string& bytes);

}  // namespace vsd
