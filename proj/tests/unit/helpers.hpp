#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "pdr/sim.hpp"

namespace pdr::test {

inline NoiseSpec mems_noise() { return {0.02, 0.002, 0.05, 0.003}; }

inline GaitSpec walk(std::vector<Vec2> route, NoiseSpec noise = {}, std::uint64_t seed = 1) {
  GaitSpec s;
  s.route = std::move(route);
  s.noise = noise;
  s.seed = seed;
  return s;
}

/// Noiseless out-and-back walk of about 60 s.
inline const SimResult& clean_walk() {
  static const SimResult sim = generate(walk(straight_route(22.0)));
  return sim;
}

/// Same route with MEMS-grade noise.
inline const SimResult& noisy_walk() {
  static const SimResult sim = generate(walk(straight_route(22.0), mems_noise(), 3));
  return sim;
}

/// Short walk for tests that only need a valid closed-protocol log.
inline const SimResult& short_walk() {
  static const SimResult sim = generate(walk(straight_route(4.0)));
  return sim;
}

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("pdr_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace pdr::test
