#pragma once

// Unauthenticated NewHope-style exchange. Alice (server) publishes (a, b),
// Bob (client) answers (u, r), both derive KeyBits. Transport is in-process.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "nhlab/reconcile.hpp"
#include "nhlab/ring.hpp"
#include "nhlab/sampling.hpp"

namespace nhlab {

enum class GeneratorPolicyKind : std::uint8_t { fresh_per_session, cached, externally_supplied };

struct GeneratorPolicy {
  GeneratorPolicyKind kind = GeneratorPolicyKind::fresh_per_session;
  std::uint32_t ttl = 0;  // sessions per cached generator

  static GeneratorPolicy fresh() { return {}; }
  static GeneratorPolicy cached(std::uint32_t ttl) { return {GeneratorPolicyKind::cached, ttl}; }
  static GeneratorPolicy external() { return {GeneratorPolicyKind::externally_supplied, 0}; }
  friend bool operator==(const GeneratorPolicy&, const GeneratorPolicy&) = default;
};

const char* policy_name(GeneratorPolicyKind k);

struct ProtocolConfig {
  ParamPtr param = default_params();
  Backend backend = Backend::peikert;
  GeneratorPolicy policy;
  DoublingMode doubling = DoublingMode::randomized;
  /// Test knob: e, e', e'' are zero (secrets s, s' are still sampled).
  bool zero_errors = false;

  /// Throws ParameterError on incompatible settings (d4 with n % 4 != 0,
  /// cached policy with ttl 0).
  void validate() const;

  friend bool operator==(const ProtocolConfig& x, const ProtocolConfig& y) {
    return x.param->id() == y.param->id() && x.param->same_ring(*y.param) &&
           x.backend == y.backend && x.policy == y.policy && x.doubling == y.doubling &&
           x.zero_errors == y.zero_errors;
  }
};

/// Supplies Alice's generator according to the policy. Holds the cache for
/// the cached policy; one instance is shared by the sessions of a batch.
class GeneratorSource {
 public:
  struct Draw {
    RingElement a;
    std::optional<Seed> seed;  // set when a is derived from a seed
    bool rotated = false;      // cache refreshed for this draw
  };

  static GeneratorSource fresh();
  static GeneratorSource cached(std::uint32_t ttl);
  /// Explicit generator, sent in the clear.
  static GeneratorSource external(RingElement a);
  /// Seed-derived generator, sent as its 32-byte seed.
  static GeneratorSource external_seed(Seed seed, ParamPtr param);

  /// Install `a` as the cached generator with a fresh use count.
  void prime(RingElement a);

  Draw next(const ParamPtr& param, SeededRng& rng);

  GeneratorPolicy policy() const { return policy_; }
  std::uint64_t draws() const { return draws_; }
  /// Draw indices at which the cache was (re)filled.
  const std::vector<std::uint64_t>& rotation_log() const { return rotations_; }

 private:
  explicit GeneratorSource(GeneratorPolicy p) : policy_(p) {}

  GeneratorPolicy policy_;
  std::optional<RingElement> a_;
  std::optional<Seed> seed_;
  std::uint32_t uses_ = 0;
  std::uint64_t draws_ = 0;
  std::vector<std::uint64_t> rotations_;
};

/// Uniform generator expanded from a 32-byte seed (stream 0 of that seed).
RingElement expand_generator(const Seed& seed, ParamPtr param);

struct AliceState {
  RingElement a;
  NoisePoly s;
  NoisePoly e;
  RingElement b;
};

struct BobState {
  NoisePoly s1;  // s'
  NoisePoly e1;  // e'
  NoisePoly e2;  // e''
  RingElement u;
  RingElement v;
  HelpBits r;
  KeyBits key;
};

struct Message1 {
  std::uint8_t param_id = 0;
  Backend backend = Backend::peikert;
  RingElement a;
  std::optional<Seed> a_seed;  // present: a travels as a seed
  RingElement b;
  friend bool operator==(const Message1&, const Message1&) = default;
};

struct Message2 {
  std::uint8_t param_id = 0;
  Backend backend = Backend::peikert;
  RingElement u;
  HelpBits r;
  friend bool operator==(const Message2&, const Message2&) = default;
};

std::pair<AliceState, Message1> alice_init(const ProtocolConfig& config, GeneratorSource& generator,
                                           SeededRng& rng);
/// Alice's step with an explicitly given generator.
std::pair<AliceState, Message1> alice_init_with(const ProtocolConfig& config, RingElement a,
                                                std::optional<Seed> a_seed, SeededRng& rng);
std::pair<BobState, Message2> bob_respond(const Message1& msg1, const ProtocolConfig& config,
                                          SeededRng& rng);
KeyBits alice_finish(const AliceState& state, const Message2& msg2, const ProtocolConfig& config);

struct Transcript {
  ProtocolConfig config;
  AliceState alice;
  BobState bob;
  Message1 msg1;
  Message2 msg2;
  KeyBits alice_key;
  KeyBits bob_key;
  std::int64_t noise_gap = 0;  // max |centered(v - u s)|
  bool agreed = false;
  bool generator_rotated = false;
};

Transcript run_session(const ProtocolConfig& config, GeneratorSource& generator, SeededRng& rng);

// --- wire format -------------------------------------------------------------

enum class DecodeErrorKind {
  bad_magic,
  bad_version,
  truncated,
  unknown_param,
  unknown_backend,
  wrong_message_type,
  bad_a_mode,
  coefficient_range,
  bad_help_length,
  trailing_bytes,
};

const char* decode_error_name(DecodeErrorKind k);

class DecodeError : public std::runtime_error {
 public:
  DecodeError(DecodeErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(decode_error_name(kind)) + ": " + what), kind_(kind) {}
  DecodeErrorKind kind() const { return kind_; }

 private:
  DecodeErrorKind kind_;
};

inline constexpr std::uint8_t kWireVersion = 1;

std::vector<std::uint8_t> serialize(const Message1& m);
std::vector<std::uint8_t> serialize(const Message2& m);
Message1 deserialize_message1(std::span<const std::uint8_t> bytes);
Message2 deserialize_message2(std::span<const std::uint8_t> bytes);

// --- JSON export -------------------------------------------------------------

nlohmann::json config_to_json(const ProtocolConfig& c);
ProtocolConfig config_from_json(const nlohmann::json& j);

/// Public projection of a transcript: {config, msg1_hex, msg2_hex,
/// alice_key_hex, bob_key_hex, noise_gap, agreed}.
struct TranscriptExport {
  ProtocolConfig config;
  Message1 msg1;
  Message2 msg2;
  KeyBits alice_key;
  KeyBits bob_key;
  std::int64_t noise_gap = 0;
  bool agreed = false;

  static TranscriptExport of(const Transcript& t);
  nlohmann::json to_json() const;
  static TranscriptExport from_json(const nlohmann::json& j);
};

}  // namespace nhlab
