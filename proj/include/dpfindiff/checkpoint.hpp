#pragma once

#include <string>

#include "dpfindiff/train.hpp"

namespace dpfd {

// Self-describing checkpoint: text manifest (config echo, counters, RNG
// stream, schema) followed by little-endian f64 sections for parameters,
// Adam state and scaler. load(save(x)) restores training bit-exactly.
void save_checkpoint(const std::string& path, const TrainerState& state);
TrainerState load_checkpoint(const std::string& path);

std::string serialize_checkpoint(const TrainerState& state);
TrainerState deserialize_checkpoint(const std::string& bytes);

} // namespace dpfd
