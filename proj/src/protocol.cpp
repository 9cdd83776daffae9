#include "nhlab/protocol.hpp"

#include <algorithm>

namespace nhlab {

const char* policy_name(GeneratorPolicyKind k) {
  switch (k) {
    case GeneratorPolicyKind::fresh_per_session: return "fresh_per_session";
    case GeneratorPolicyKind::cached: return "cached";
    case GeneratorPolicyKind::externally_supplied: return "externally_supplied";
  }
  return "?";
}

void ProtocolConfig::validate() const {
  if (!param) throw ParameterError("ProtocolConfig: missing parameter set");
  if (backend == Backend::d4 && param->n() % 4 != 0)
    throw ParameterError("ProtocolConfig: d4 backend needs n divisible by 4");
  if (policy.kind == GeneratorPolicyKind::cached && policy.ttl == 0)
    throw ParameterError("ProtocolConfig: cached policy needs ttl >= 1");
}

// --- generator source --------------------------------------------------------

GeneratorSource GeneratorSource::fresh() { return GeneratorSource(GeneratorPolicy::fresh()); }

GeneratorSource GeneratorSource::cached(std::uint32_t ttl) {
  if (ttl == 0) throw ParameterError("GeneratorSource: ttl must be >= 1");
  return GeneratorSource(GeneratorPolicy::cached(ttl));
}

GeneratorSource GeneratorSource::external(RingElement a) {
  GeneratorSource g(GeneratorPolicy::external());
  g.a_ = std::move(a);
  return g;
}

GeneratorSource GeneratorSource::external_seed(Seed seed, ParamPtr param) {
  GeneratorSource g(GeneratorPolicy::external());
  g.a_ = expand_generator(seed, std::move(param));
  g.seed_ = seed;
  return g;
}

void GeneratorSource::prime(RingElement a) {
  a_ = std::move(a);
  seed_.reset();
  uses_ = 0;
}

GeneratorSource::Draw GeneratorSource::next(const ParamPtr& param, SeededRng& rng) {
  const std::uint64_t index = draws_++;
  switch (policy_.kind) {
    case GeneratorPolicyKind::fresh_per_session:
      return {sample_uniform_ring(rng, param), std::nullopt, false};
    case GeneratorPolicyKind::cached: {
      bool rotated = false;
      if (!a_ || uses_ >= policy_.ttl || !a_->param().same_ring(*param)) {
        a_ = sample_uniform_ring(rng, param);
        uses_ = 0;
        rotated = true;
      }
      if (uses_ == 0) rotations_.push_back(index);
      ++uses_;
      return {*a_, std::nullopt, rotated};
    }
    case GeneratorPolicyKind::externally_supplied:
      if (!a_) throw ParameterError("GeneratorSource: no external generator supplied");
      if (!a_->param().same_ring(*param))
        throw ParameterError("GeneratorSource: external generator is in a different ring");
      return {*a_, seed_, false};
  }
  throw ParameterError("GeneratorSource: unknown policy");
}

RingElement expand_generator(const Seed& seed, ParamPtr param) {
  SeededRng rng(seed, 0);
  return sample_uniform_ring(rng, std::move(param));
}

// --- state machines ----------------------------------------------------------

namespace {

NoisePoly sample_error(const ProtocolConfig& config, SeededRng& rng) {
  if (config.zero_errors)
    return NoisePoly(CenteredPoly(std::vector<std::int64_t>(config.param->n(), 0)),
                     config.param->k_noise());
  return sample_psi_k(rng, *config.param);
}

void require_param(const ProtocolConfig& config, std::uint8_t param_id, Backend backend) {
  if (param_id != config.param->id())
    throw ParameterError("message parameter id does not match the session configuration");
  if (backend != config.backend)
    throw ParameterError("message backend does not match the session configuration");
}

}  // namespace

std::pair<AliceState, Message1> alice_init_with(const ProtocolConfig& config, RingElement a,
                                                std::optional<Seed> a_seed, SeededRng& rng) {
  config.validate();
  if (!a.param().same_ring(*config.param))
    throw ParameterError("alice_init: generator is in a different ring");
  NoisePoly s = sample_psi_k(rng, *config.param);
  NoisePoly e = sample_error(config, rng);
  RingElement b = a * s.to_ring(config.param) + e.to_ring(config.param);
  Message1 msg{config.param->id(), config.backend, a, a_seed, b};
  return {AliceState{std::move(a), std::move(s), std::move(e), std::move(b)}, std::move(msg)};
}

std::pair<AliceState, Message1> alice_init(const ProtocolConfig& config, GeneratorSource& generator,
                                           SeededRng& rng) {
  auto draw = generator.next(config.param, rng);
  return alice_init_with(config, std::move(draw.a), draw.seed, rng);
}

std::pair<BobState, Message2> bob_respond(const Message1& msg1, const ProtocolConfig& config,
                                          SeededRng& rng) {
  config.validate();
  require_param(config, msg1.param_id, msg1.backend);
  const ParamPtr& P = config.param;
  NoisePoly s1 = sample_psi_k(rng, *P);
  NoisePoly e1 = sample_error(config, rng);
  NoisePoly e2 = sample_error(config, rng);
  const RingElement s1r = s1.to_ring(P);
  RingElement u = msg1.a * s1r + e1.to_ring(P);
  RingElement v = msg1.b * s1r + e2.to_ring(P);
  auto [help, key] = reconcile_bob(config.backend, v, rng, config.doubling);
  Message2 msg{P->id(), config.backend, u, help};
  return {BobState{std::move(s1), std::move(e1), std::move(e2), std::move(u), std::move(v),
                   std::move(help), std::move(key)},
          std::move(msg)};
}

KeyBits alice_finish(const AliceState& state, const Message2& msg2, const ProtocolConfig& config) {
  require_param(config, msg2.param_id, msg2.backend);
  const RingElement w = msg2.u * state.s.to_ring(config.param);
  return reconcile_alice(w, msg2.r);
}

Transcript run_session(const ProtocolConfig& config, GeneratorSource& generator, SeededRng& rng) {
  auto draw = generator.next(config.param, rng);
  const bool rotated = draw.rotated;
  auto [alice, msg1] = alice_init_with(config, std::move(draw.a), draw.seed, rng);
  auto [bob, msg2] = bob_respond(msg1, config, rng);
  KeyBits alice_key = alice_finish(alice, msg2, config);
  const RingElement w = msg2.u * alice.s.to_ring(config.param);
  const std::int64_t gap = centered_lift(bob.v - w).max_abs();
  KeyBits bob_key = bob.key;
  const bool agreed = alice_key == bob_key;
  return Transcript{config,      std::move(alice), std::move(bob), std::move(msg1),
                    std::move(msg2), std::move(alice_key), std::move(bob_key), gap,
                    agreed,      rotated};
}

// --- wire format -------------------------------------------------------------

const char* decode_error_name(DecodeErrorKind k) {
  switch (k) {
    case DecodeErrorKind::bad_magic: return "bad_magic";
    case DecodeErrorKind::bad_version: return "bad_version";
    case DecodeErrorKind::truncated: return "truncated";
    case DecodeErrorKind::unknown_param: return "unknown_param";
    case DecodeErrorKind::unknown_backend: return "unknown_backend";
    case DecodeErrorKind::wrong_message_type: return "wrong_message_type";
    case DecodeErrorKind::bad_a_mode: return "bad_a_mode";
    case DecodeErrorKind::coefficient_range: return "coefficient_range";
    case DecodeErrorKind::bad_help_length: return "bad_help_length";
    case DecodeErrorKind::trailing_bytes: return "trailing_bytes";
  }
  return "?";
}

namespace {

constexpr std::uint8_t kMagic[4] = {'N', 'H', 'K', 'X'};

void put_header(std::vector<std::uint8_t>& out, std::uint8_t param_id, Backend backend,
                std::uint8_t type) {
  out.insert(out.end(), std::begin(kMagic), std::end(kMagic));
  out.push_back(kWireVersion);
  out.push_back(param_id);
  out.push_back(static_cast<std::uint8_t>(backend));
  out.push_back(type);
}

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> b) : bytes_(b) {}

  std::span<const std::uint8_t> take(std::size_t n, const char* what) {
    if (bytes_.size() - pos_ < n)
      throw DecodeError(DecodeErrorKind::truncated, std::string("while reading ") + what);
    auto s = bytes_.subspan(pos_, n);
    pos_ += n;
    return s;
  }
  std::uint8_t u8(const char* what) { return take(1, what)[0]; }
  std::uint32_t u32(const char* what) {
    auto s = take(4, what);
    return std::uint32_t{s[0]} | std::uint32_t{s[1]} << 8 | std::uint32_t{s[2]} << 16 |
           std::uint32_t{s[3]} << 24;
  }
  RingElement ring(const ParamPtr& P, const char* what) {
    auto s = take(2 * std::size_t{P->n()}, what);
    std::vector<std::uint32_t> c(P->n());
    for (std::size_t i = 0; i < c.size(); ++i) {
      c[i] = std::uint32_t{s[2 * i]} | std::uint32_t{s[2 * i + 1]} << 8;
      if (c[i] >= P->q())
        throw DecodeError(DecodeErrorKind::coefficient_range,
                          std::string(what) + " coefficient " + std::to_string(i) + " >= q");
    }
    return RingElement(P, std::move(c));
  }
  void finish() const {
    if (pos_ != bytes_.size())
      throw DecodeError(DecodeErrorKind::trailing_bytes,
                        std::to_string(bytes_.size() - pos_) + " unread bytes");
  }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

struct Header {
  ParamPtr param;
  Backend backend;
};

Header read_header(Reader& r, std::uint8_t expected_type) {
  auto magic = r.take(4, "magic");
  if (!std::equal(magic.begin(), magic.end(), std::begin(kMagic)))
    throw DecodeError(DecodeErrorKind::bad_magic, "expected \"NHKX\"");
  const std::uint8_t version = r.u8("version");
  if (version != kWireVersion)
    throw DecodeError(DecodeErrorKind::bad_version, "version " + std::to_string(version));
  const std::uint8_t param_id = r.u8("param id");
  ParamPtr P;
  try {
    P = param_by_id(param_id);
  } catch (const ParameterError&) {
    throw DecodeError(DecodeErrorKind::unknown_param, "param id " + std::to_string(param_id));
  }
  const std::uint8_t backend = r.u8("backend id");
  if (backend > 1)
    throw DecodeError(DecodeErrorKind::unknown_backend, "backend id " + std::to_string(backend));
  const std::uint8_t type = r.u8("message type");
  if (type != expected_type)
    throw DecodeError(DecodeErrorKind::wrong_message_type,
                      "got type " + std::to_string(type) + ", expected " +
                          std::to_string(expected_type));
  return {P, static_cast<Backend>(backend)};
}

}  // namespace

std::vector<std::uint8_t> serialize(const Message1& m) {
  std::vector<std::uint8_t> out;
  put_header(out, m.param_id, m.backend, 1);
  if (m.a_seed) {
    out.push_back(1);
    out.insert(out.end(), m.a_seed->begin(), m.a_seed->end());
  } else {
    out.push_back(0);
    encode_ring(m.a, out);
  }
  encode_ring(m.b, out);
  return out;
}

std::vector<std::uint8_t> serialize(const Message2& m) {
  std::vector<std::uint8_t> out;
  put_header(out, m.param_id, m.backend, 2);
  encode_ring(m.u, out);
  const std::uint32_t nbits = static_cast<std::uint32_t>(m.r.bits.size());
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(nbits >> (8 * i)));
  const auto packed = m.r.bits.pack();
  out.insert(out.end(), packed.begin(), packed.end());
  return out;
}

Message1 deserialize_message1(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  const Header h = read_header(r, 1);
  const std::uint8_t mode = r.u8("a-mode flag");
  std::optional<Seed> seed;
  std::optional<RingElement> a;
  if (mode == 0) {
    a = r.ring(h.param, "a");
  } else if (mode == 1) {
    Seed s;
    auto raw = r.take(32, "a seed");
    std::copy(raw.begin(), raw.end(), s.begin());
    seed = s;
    a = expand_generator(s, h.param);
  } else {
    throw DecodeError(DecodeErrorKind::bad_a_mode, "flag " + std::to_string(mode));
  }
  RingElement b = r.ring(h.param, "b");
  r.finish();
  return Message1{h.param->id(), h.backend, std::move(*a), seed, std::move(b)};
}

Message2 deserialize_message2(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  const Header h = read_header(r, 2);
  RingElement u = r.ring(h.param, "u");
  const std::uint32_t nbits = r.u32("help length");
  if (nbits != help_length(h.backend, h.param->n()))
    throw DecodeError(DecodeErrorKind::bad_help_length,
                      std::to_string(nbits) + " help bits for backend " + backend_name(h.backend));
  auto packed = r.take((nbits + 7) / 8, "help bits");
  r.finish();
  return Message2{h.param->id(), h.backend, std::move(u),
                  HelpBits{h.backend, BitString::unpack(packed, nbits)}};
}

// --- JSON --------------------------------------------------------------------

nlohmann::json config_to_json(const ProtocolConfig& c) {
  return {
      {"param", c.param->name()},
      {"param_id", c.param->id()},
      {"n", c.param->n()},
      {"q", c.param->q()},
      {"k", c.param->k_noise()},
      {"backend", backend_name(c.backend)},
      {"generator_policy", policy_name(c.policy.kind)},
      {"ttl", c.policy.ttl},
      {"doubling", c.doubling == DoublingMode::randomized ? "randomized" : "deterministic"},
      {"zero_errors", c.zero_errors},
  };
}

ProtocolConfig config_from_json(const nlohmann::json& j) {
  ProtocolConfig c;
  c.param = param_by_id(j.at("param_id").get<std::uint8_t>());
  c.backend = parse_backend(j.at("backend").get<std::string>());
  const auto policy = j.at("generator_policy").get<std::string>();
  const auto ttl = j.value("ttl", 0u);
  if (policy == "fresh_per_session")
    c.policy = GeneratorPolicy::fresh();
  else if (policy == "cached")
    c.policy = GeneratorPolicy::cached(ttl);
  else if (policy == "externally_supplied")
    c.policy = GeneratorPolicy::external();
  else
    throw ParameterError("unknown generator policy '" + policy + "'");
  c.doubling = j.value("doubling", std::string("randomized")) == "deterministic"
                   ? DoublingMode::deterministic
                   : DoublingMode::randomized;
  c.zero_errors = j.value("zero_errors", false);
  return c;
}

TranscriptExport TranscriptExport::of(const Transcript& t) {
  return {t.config, t.msg1, t.msg2, t.alice_key, t.bob_key, t.noise_gap, t.agreed};
}

nlohmann::json TranscriptExport::to_json() const {
  return {
      {"config", config_to_json(config)},
      {"msg1_hex", to_hex(serialize(msg1))},
      {"msg2_hex", to_hex(serialize(msg2))},
      {"alice_key_hex", alice_key.hex()},
      {"bob_key_hex", bob_key.hex()},
      {"noise_gap", noise_gap},
      {"agreed", agreed},
  };
}

TranscriptExport TranscriptExport::from_json(const nlohmann::json& j) {
  ProtocolConfig config = config_from_json(j.at("config"));
  Message1 m1 = deserialize_message1(nhlab::from_hex(j.at("msg1_hex").get<std::string>()));
  Message2 m2 = deserialize_message2(nhlab::from_hex(j.at("msg2_hex").get<std::string>()));
  const std::size_t klen = key_length(config.backend, config.param->n());
  KeyBits ka{BitString::from_hex(j.at("alice_key_hex").get<std::string>(), klen)};
  KeyBits kb{BitString::from_hex(j.at("bob_key_hex").get<std::string>(), klen)};
  return {std::move(config), std::move(m1), std::move(m2), std::move(ka), std::move(kb),
          j.at("noise_gap").get<std::int64_t>(), j.at("agreed").get<bool>()};
}

}  // namespace nhlab
