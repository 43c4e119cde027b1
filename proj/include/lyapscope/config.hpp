#pragma once

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include "lyapscope/rational.hpp"
#include "lyapscope/types.hpp"

namespace lyap {

inline constexpr const char* kToolVersion = "lyapscope 0.1.0";

inline std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

struct ExperimentConfig {
  std::string experiment;
  nlohmann::json raw;  // full config document (canonical key order)
  std::uint64_t seed = 1;
  int workers = 1;
  std::filesystem::path out_dir = "runs/out";

  std::string hash() const {
    nlohmann::json canonical = raw;
    canonical["seed"] = seed;  // CLI overrides participate in the hash
    return hex64(fnv1a(canonical.dump()));
  }

  static ExperimentConfig from_json(const nlohmann::json& j) {
    ExperimentConfig c;
    c.raw = j;
    if (!j.contains("experiment")) throw ConfigError("config: missing field 'experiment'");
    c.experiment = j.at("experiment").get<std::string>();
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("workers")) c.workers = j.at("workers").get<int>();
    if (j.contains("out")) c.out_dir = j.at("out").get<std::string>();
    return c;
  }

  static ExperimentConfig load(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("config: cannot open " + path.string());
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(f);
    } catch (const nlohmann::json::parse_error& e) {
      throw ConfigError("config: parse error in " + path.string() + ": " + e.what());
    }
    try {
      return from_json(j);
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("config: bad field in " + path.string() + ": " + e.what());
    }
  }
};

// field accessors with config-error reporting
inline const nlohmann::json& cfg_field(const nlohmann::json& j, const std::string& key) {
  if (!j.contains(key)) throw ConfigError("config: missing field '" + key + "'");
  return j.at(key);
}

template <class T>
T cfg_get(const nlohmann::json& j, const std::string& key, const T& fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError("config: field '" + key + "' has the wrong type");
  }
}

template <class T>
T cfg_require(const nlohmann::json& j, const std::string& key) {
  try {
    return cfg_field(j, key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError("config: field '" + key + "' has the wrong type");
  }
}

// alphas appear as "1/5" strings or [num, den] pairs
inline Rational parse_rational(const nlohmann::json& j, const std::string& field) {
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    const auto slash = s.find('/');
    try {
      if (slash == std::string::npos) return Rational(std::stoll(s));
      return Rational(std::stoll(s.substr(0, slash)), std::stoll(s.substr(slash + 1)));
    } catch (const std::exception&) {
      throw ConfigError("config: field '" + field + "': cannot parse rational '" + s + "'");
    }
  }
  if (j.is_array() && j.size() == 2)
    return Rational(j.at(0).get<std::int64_t>(), j.at(1).get<std::int64_t>());
  if (j.is_number_integer()) return Rational(j.get<std::int64_t>());
  throw ConfigError("config: field '" + field + "': expected \"p/q\" or [p, q]");
}

// deterministic uniform doubles in [0,1) from the seeded engine
inline double uniform01(std::mt19937_64& rng) { return (rng() >> 11) * 0x1.0p-53; }

}  // namespace lyap
