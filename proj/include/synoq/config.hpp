#pragma once

#include <string>

#include "synoq/common.hpp"

namespace synoq {

// Engine-wide knobs. Bin counts are global so every relation partitions an
// attribute the same way; cost weights instantiate the planner's model.
struct EngineConfig {
  size_t bins = 8;              // engine.bins
  u64 join_cap = 2'000'000;     // engine.join_cap (max materialized tuples)
  double w_io = 1.0;            // cost.w_io
  double w_ev = 10.0;           // cost.w_ev
  double epsilon = 1.5;         // privacy.epsilon (per mechanism)
  double delta = 5e-5;          // privacy.delta
};

// Key-value config file, one `key=value` per line; '#' starts a comment.
EngineConfig load_config(const std::string& path);
void apply_config_line(EngineConfig& config, const std::string& line);

}  // namespace synoq
