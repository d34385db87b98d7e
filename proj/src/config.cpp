#include "synoq/config.hpp"

#include <fstream>

namespace synoq {

void apply_config_line(EngineConfig& config, const std::string& raw) {
  std::string line = raw;
  if (auto p = line.find('#'); p != std::string::npos) line.erase(p);
  while (!line.empty() && (line.back() == ' ' || line.back() == '\t' ||
                           line.back() == '\r')) {
    line.pop_back();
  }
  if (line.empty()) return;
  const auto eq = line.find('=');
  if (eq == std::string::npos) {
    throw InvalidParameter("malformed config line: " + raw);
  }
  const std::string key = line.substr(0, eq);
  const std::string value = line.substr(eq + 1);
  if (key == "engine.bins") {
    config.bins = static_cast<size_t>(std::stoull(value));
  } else if (key == "engine.join_cap") {
    config.join_cap = std::stoull(value);
  } else if (key == "cost.w_io") {
    config.w_io = std::stod(value);
  } else if (key == "cost.w_ev") {
    config.w_ev = std::stod(value);
  } else if (key == "privacy.epsilon") {
    config.epsilon = std::stod(value);
  } else if (key == "privacy.delta") {
    config.delta = std::stod(value);
  } else {
    throw InvalidParameter("unknown config key: " + key);
  }
}

EngineConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidParameter("cannot open config file: " + path);
  EngineConfig config;
  std::string line;
  while (std::getline(in, line)) apply_config_line(config, line);
  return config;
}

}  // namespace synoq
