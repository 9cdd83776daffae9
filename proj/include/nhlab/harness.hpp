#pragma once

// Scenario driver. Every trial runs on its own rng stream, so reports depend
// only on (config, seed) and never on the thread count.

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "nhlab/backdoor.hpp"
#include "nhlab/protocol.hpp"

namespace nhlab {

inline constexpr const char* kArtifactVersion = "1.0.0";

/// Seed used when neither --seed nor NHLAB_SEED is given: bytes 00 01 .. 1f.
Seed default_seed();

enum class Scenario { honest, backdoor, uniform_control, cached_a, mitm, sweep, verify_claims };
const char* scenario_name(Scenario s);

struct SweepGrid {
  std::vector<std::uint32_t> p_values{67};
  std::vector<std::size_t> weights{1, 2, 4, 8, 16, 24, 32, 48};
  std::vector<std::uint32_t> k_values{16};
};

struct ScenarioConfig {
  Scenario scenario = Scenario::honest;
  std::uint32_t trials = 1000;
  ParamPtr param = default_params();
  Backend backend = Backend::peikert;
  std::uint32_t p = 67;
  std::size_t weight = 2;
  std::uint32_t ttl = 5;
  /// One trapdoor for the whole backdoor batch instead of one per trial.
  bool reuse_trapdoor = false;
  Seed seed = default_seed();
  unsigned threads = 1;  // parallelism hint; never changes results
  SweepGrid grid;

  /// Throws ParameterError on invalid combinations.
  void validate() const;
  nlohmann::json to_json() const;
};

struct Rate {
  std::size_t successes = 0;
  std::size_t trials = 0;
  double value() const { return trials ? static_cast<double>(successes) / trials : 0.0; }
  /// Wilson score interval at 95%.
  std::pair<double, double> wilson95() const;
  nlohmann::json to_json() const;
};

struct TrialRecord {
  std::size_t index = 0;
  bool agreed = false;
  std::optional<bool> matched;
  std::int64_t noise_gap = 0;
  std::string guarantee = "n/a";  // guaranteed | probabilistic | n/a
  std::optional<bool> attacker_key_equal;
  // cached_a
  std::optional<std::size_t> window;
  // mitm
  std::optional<bool> oscar_knows_alice_key;
  std::optional<bool> oscar_knows_bob_key;
  std::optional<bool> alice_bob_keys_differ;
  std::optional<bool> bob_secret_recovered;

  nlohmann::json to_json() const;
};

struct Report {
  std::string scenario;
  nlohmann::json config;
  nlohmann::json aggregates = nlohmann::json::object();
  std::vector<TrialRecord> records;
  nlohmann::json extra = nlohmann::json::object();  // tables, windows, claims
  double wall_clock_seconds = 0.0;
  bool passed = true;  // verify-claims verdict; true for plain scenarios

  /// Full report. With include_wall_clock = false the output is a pure
  /// function of (config, seed).
  nlohmann::json to_json(bool include_wall_clock = true) const;
};

Report run_honest_batch(const ScenarioConfig& cfg);
Report run_backdoor_batch(const ScenarioConfig& cfg);
Report run_uniform_control_batch(const ScenarioConfig& cfg);
Report run_cached_a(const ScenarioConfig& cfg);
Report run_mitm(const ScenarioConfig& cfg);
Report sweep(const ScenarioConfig& cfg);
Report verify_claims(const ScenarioConfig& cfg);

/// Dispatch on cfg.scenario.
Report run_scenario(const ScenarioConfig& cfg);

/// Runs fn(i) for i in [0, count) on up to `threads` workers and returns the
/// results in index order.
template <typename T>
std::vector<T> parallel_map(std::size_t count, unsigned threads,
                            const std::function<T(std::size_t)>& fn);

/// Parses line-based "key = value" text. Blank lines and lines starting with
/// '#' are skipped. Throws ParameterError on a malformed line.
std::map<std::string, std::string> parse_config_text(const std::string& text);

/// Stream index for trial `trial` of scenario tag `tag` (sub distinguishes
/// grid points or roles).
std::uint64_t trial_stream(std::uint32_t tag, std::uint32_t sub, std::uint32_t trial);

}  // namespace nhlab

#include "nhlab/parallel.ipp"
