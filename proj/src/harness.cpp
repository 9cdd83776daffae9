#include "nhlab/harness.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

namespace nhlab {

Seed default_seed() {
  Seed s;
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = static_cast<std::uint8_t>(i);
  return s;
}

const char* scenario_name(Scenario s) {
  switch (s) {
    case Scenario::honest: return "honest";
    case Scenario::backdoor: return "backdoor";
    case Scenario::uniform_control: return "uniform_control";
    case Scenario::cached_a: return "cached_a";
    case Scenario::mitm: return "mitm";
    case Scenario::sweep: return "sweep";
    case Scenario::verify_claims: return "verify_claims";
  }
  return "?";
}

std::uint64_t trial_stream(std::uint32_t tag, std::uint32_t sub, std::uint32_t trial) {
  return std::uint64_t{tag} << 48 | std::uint64_t{sub & 0xffffu} << 32 | trial;
}

void ScenarioConfig::validate() const {
  if (trials < 1) throw ParameterError("trials must be >= 1");
  if (!param) throw ParameterError("missing parameter set");
  if (backend == Backend::d4 && param->n() % 4 != 0)
    throw ParameterError("d4 backend needs n divisible by 4");
  const bool needs_trapdoor = scenario == Scenario::backdoor ||
                              scenario == Scenario::uniform_control ||
                              scenario == Scenario::cached_a || scenario == Scenario::mitm;
  if (needs_trapdoor) {
    if (!is_prime(p) || p < 4 * param->k_noise() + 1)
      throw ParameterError("trapdoor prime p must be a prime >= 4k + 1");
    if (weight == 0 || weight > param->n()) throw ParameterError("weight must be in [1, n]");
  }
  if (scenario == Scenario::cached_a && ttl == 0) throw ParameterError("ttl must be >= 1");
  if (scenario == Scenario::sweep &&
      (grid.p_values.empty() || grid.weights.empty() || grid.k_values.empty()))
    throw ParameterError("sweep grid must be nonempty");
}

nlohmann::json ScenarioConfig::to_json() const {
  nlohmann::json j = {
      {"scenario", scenario_name(scenario)},
      {"trials", trials},
      {"param", param->name()},
      {"param_id", param->id()},
      {"n", param->n()},
      {"q", param->q()},
      {"k", param->k_noise()},
      {"backend", backend_name(backend)},
      {"seed", seed_to_hex(seed)},
  };
  switch (scenario) {
    case Scenario::backdoor:
      j["reuse_trapdoor"] = reuse_trapdoor;
      [[fallthrough]];
    case Scenario::uniform_control:
    case Scenario::mitm:
      j["p"] = p;
      j["weight"] = weight;
      break;
    case Scenario::cached_a:
      j["p"] = p;
      j["weight"] = weight;
      j["ttl"] = ttl;
      break;
    case Scenario::sweep:
      j["grid"] = {{"p_values", grid.p_values}, {"weights", grid.weights}, {"k_values", grid.k_values}};
      break;
    default:
      break;
  }
  return j;
}

std::pair<double, double> Rate::wilson95() const {
  if (trials == 0) return {0.0, 1.0};
  constexpr double z = 1.959963984540054;
  const double n = static_cast<double>(trials);
  const double phat = value();
  const double denom = 1.0 + z * z / n;
  const double centre = (phat + z * z / (2 * n)) / denom;
  const double half = z * std::sqrt(phat * (1 - phat) / n + z * z / (4 * n * n)) / denom;
  const double lo = successes == 0 ? 0.0 : std::max(0.0, centre - half);
  const double hi = successes == trials ? 1.0 : std::min(1.0, centre + half);
  return {lo, hi};
}

nlohmann::json Rate::to_json() const {
  const auto [lo, hi] = wilson95();
  return {{"successes", successes}, {"trials", trials}, {"rate", value()}, {"wilson95", {lo, hi}}};
}

nlohmann::json TrialRecord::to_json() const {
  nlohmann::json j = {{"trial", index}, {"agreed", agreed}, {"noise_gap", noise_gap},
                      {"guarantee", guarantee}};
  auto opt = [&](const char* key, const std::optional<bool>& v) {
    j[key] = v ? nlohmann::json(*v) : nlohmann::json("n/a");
  };
  opt("matched", matched);
  opt("attacker_key_equal", attacker_key_equal);
  if (window) j["window"] = *window;
  if (oscar_knows_alice_key) {
    j["oscar_knows_alice_key"] = *oscar_knows_alice_key;
    j["oscar_knows_bob_key"] = *oscar_knows_bob_key;
    j["alice_bob_keys_differ"] = *alice_bob_keys_differ;
    j["bob_secret_recovered"] = *bob_secret_recovered;
  }
  return j;
}

nlohmann::json Report::to_json(bool include_wall_clock) const {
  nlohmann::json records_json = nlohmann::json::array();
  for (const auto& r : records) records_json.push_back(r.to_json());
  nlohmann::json j = {
      {"artifact", "nhlab"},
      {"version", kArtifactVersion},
      {"scenario", scenario},
      {"config", config},
      {"aggregates", aggregates},
      {"records", records_json},
  };
  for (auto it = extra.begin(); it != extra.end(); ++it) j[it.key()] = it.value();
  if (include_wall_clock) j["wall_clock_seconds"] = wall_clock_seconds;
  return j;
}

std::map<std::string, std::string> parse_config_text(const std::string& text) {
  std::map<std::string, std::string> out;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return std::string();
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ParameterError("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(t.substr(0, eq));
    if (key.empty()) throw ParameterError("config line " + std::to_string(lineno) + ": empty key");
    out[key] = trim(t.substr(eq + 1));
  }
  return out;
}

// --- scenarios ---------------------------------------------------------------

namespace {

enum Tag : std::uint32_t { kHonest = 1, kBackdoor = 2, kControl = 3, kCached = 4, kMitm = 5, kSweep = 6 };

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

ProtocolConfig protocol_config(const ScenarioConfig& cfg, GeneratorPolicy policy) {
  ProtocolConfig pc;
  pc.param = cfg.param;
  pc.backend = cfg.backend;
  pc.policy = policy;
  return pc;
}

Rate count(const std::vector<TrialRecord>& recs, bool (*pred)(const TrialRecord&)) {
  Rate r;
  for (const auto& x : recs) {
    ++r.trials;
    r.successes += pred(x) ? 1 : 0;
  }
  return r;
}

std::int64_t max_gap(const std::vector<TrialRecord>& recs) {
  std::int64_t m = 0;
  for (const auto& r : recs) m = std::max(m, r.noise_gap);
  return m;
}

/// Largest |v - w| per coefficient for which peikert reconciliation is
/// guaranteed, given tolerance T = floor(q/4) - 1 on the doubled value.
std::int64_t peikert_safe_gap(const ParamSet& P) {
  const std::int64_t T = P.q() / 4 - 1;
  return T / 2 - 1;
}

Report make_report(const ScenarioConfig& cfg, std::vector<TrialRecord> recs) {
  Report rep;
  rep.scenario = scenario_name(cfg.scenario);
  rep.config = cfg.to_json();
  rep.records = std::move(recs);
  return rep;
}

// One honest-or-injected session plus optional recovery against `key`.
TrialRecord recovery_trial(const ScenarioConfig& cfg, std::size_t i, const RingElement& a,
                           const TrapdoorKey& key, bool record_guarantee, SeededRng& rng) {
  const ProtocolConfig pc = protocol_config(cfg, GeneratorPolicy::external());
  GeneratorSource gen = GeneratorSource::external(a);
  const Transcript tr = run_session(pc, gen, rng);
  TrialRecord rec;
  rec.index = i;
  rec.agreed = tr.agreed;
  rec.noise_gap = tr.noise_gap;
  const auto outcome = recover_full(tr, key);
  if (outcome) {
    rec.matched = outcome->matched;
    rec.attacker_key_equal = attacker_key(tr, outcome->s_rec) == tr.alice_key;
    if (record_guarantee) rec.guarantee = outcome->guaranteed ? "guaranteed" : "probabilistic";
  } else {
    rec.matched = false;
    rec.attacker_key_equal = false;
  }
  return rec;
}

}  // namespace

Report run_honest_batch(const ScenarioConfig& cfg) {
  cfg.validate();
  const auto start = Clock::now();
  const ProtocolConfig pc = protocol_config(cfg, GeneratorPolicy::fresh());
  auto recs = parallel_map<TrialRecord>(cfg.trials, cfg.threads, [&](std::size_t i) {
    SeededRng rng(cfg.seed, trial_stream(kHonest, 0, static_cast<std::uint32_t>(i)));
    GeneratorSource gen = GeneratorSource::fresh();
    const Transcript tr = run_session(pc, gen, rng);
    TrialRecord rec;
    rec.index = i;
    rec.agreed = tr.agreed;
    rec.noise_gap = tr.noise_gap;
    return rec;
  });
  Report rep = make_report(cfg, std::move(recs));
  rep.aggregates["agreement"] = count(rep.records, [](const TrialRecord& r) { return r.agreed; }).to_json();
  rep.aggregates["max_noise_gap"] = max_gap(rep.records);
  if (cfg.backend == Backend::peikert) {
    const std::int64_t safe = peikert_safe_gap(*cfg.param);
    std::size_t within = 0;
    for (const auto& r : rep.records) within += r.noise_gap <= safe;
    rep.aggregates["guaranteed_gap"] = safe;
    rep.aggregates["trials_within_guaranteed_gap"] = within;
  }
  rep.wall_clock_seconds = seconds_since(start);
  return rep;
}

Report run_backdoor_batch(const ScenarioConfig& cfg) {
  cfg.validate();
  const auto start = Clock::now();
  std::optional<TrapdoorKey> shared;
  if (cfg.reuse_trapdoor) {
    SeededRng krng(cfg.seed, trial_stream(kBackdoor, 1, 0));
    shared = gen_trapdoor(cfg.param, cfg.p, cfg.weight, krng);
  }
  auto recs = parallel_map<TrialRecord>(cfg.trials, cfg.threads, [&](std::size_t i) {
    SeededRng rng(cfg.seed, trial_stream(kBackdoor, 0, static_cast<std::uint32_t>(i)));
    const TrapdoorKey key = shared ? *shared : gen_trapdoor(cfg.param, cfg.p, cfg.weight, rng);
    return recovery_trial(cfg, i, key.a, key, true, rng);
  });
  Report rep = make_report(cfg, std::move(recs));
  const auto bound = worst_case_bound(*cfg.param, cfg.p, cfg.weight);
  rep.aggregates["worst_case_bound"] = bound;
  rep.aggregates["half_q"] = cfg.param->q() / 2;
  rep.aggregates["guaranteed"] = recovery_guaranteed(*cfg.param, cfg.p, cfg.weight);
  rep.aggregates["recovery"] = count(rep.records, [](const TrialRecord& r) { return *r.matched; }).to_json();
  rep.aggregates["attacker_key_equal"] =
      count(rep.records, [](const TrialRecord& r) { return *r.attacker_key_equal; }).to_json();
  rep.aggregates["agreement"] = count(rep.records, [](const TrialRecord& r) { return r.agreed; }).to_json();
  rep.aggregates["max_noise_gap"] = max_gap(rep.records);
  rep.wall_clock_seconds = seconds_since(start);
  return rep;
}

Report run_uniform_control_batch(const ScenarioConfig& cfg) {
  cfg.validate();
  const auto start = Clock::now();
  auto recs = parallel_map<TrialRecord>(cfg.trials, cfg.threads, [&](std::size_t i) {
    SeededRng rng(cfg.seed, trial_stream(kControl, 0, static_cast<std::uint32_t>(i)));
    const TrapdoorKey unrelated = gen_trapdoor(cfg.param, cfg.p, cfg.weight, rng);
    const RingElement a = sample_uniform_ring(rng, cfg.param);
    return recovery_trial(cfg, i, a, unrelated, false, rng);
  });
  Report rep = make_report(cfg, std::move(recs));
  rep.aggregates["recovery"] = count(rep.records, [](const TrialRecord& r) { return *r.matched; }).to_json();
  rep.aggregates["attacker_key_equal"] =
      count(rep.records, [](const TrialRecord& r) { return *r.attacker_key_equal; }).to_json();
  rep.aggregates["agreement"] = count(rep.records, [](const TrialRecord& r) { return r.agreed; }).to_json();
  rep.aggregates["max_noise_gap"] = max_gap(rep.records);
  rep.wall_clock_seconds = seconds_since(start);
  return rep;
}

Report run_cached_a(const ScenarioConfig& cfg) {
  cfg.validate();
  const auto start = Clock::now();
  SeededRng krng(cfg.seed, trial_stream(kCached, 1, 0));
  const TrapdoorKey key = gen_trapdoor(cfg.param, cfg.p, cfg.weight, krng);

  // Generator assignment is sequential: Alice caches Oscar's a for ttl
  // sessions, then rotates to fresh uniform generators.
  GeneratorSource cache = GeneratorSource::cached(cfg.ttl);
  cache.prime(key.a);
  SeededRng grng(cfg.seed, trial_stream(kCached, 2, 0));
  std::vector<RingElement> generators;
  generators.reserve(cfg.trials);
  for (std::uint32_t i = 0; i < cfg.trials; ++i) generators.push_back(cache.next(cfg.param, grng).a);

  auto recs = parallel_map<TrialRecord>(cfg.trials, cfg.threads, [&](std::size_t i) {
    SeededRng rng(cfg.seed, trial_stream(kCached, 0, static_cast<std::uint32_t>(i)));
    TrialRecord rec = recovery_trial(cfg, i, generators[i], key, i < cfg.ttl, rng);
    rec.window = i / cfg.ttl;
    return rec;
  });
  Report rep = make_report(cfg, std::move(recs));

  Rate within, after;
  nlohmann::json windows = nlohmann::json::array();
  std::map<std::size_t, Rate> per_window;
  for (const auto& r : rep.records) {
    Rate& target = *r.window == 0 ? within : after;
    ++target.trials;
    target.successes += *r.matched;
    auto& w = per_window[*r.window];
    ++w.trials;
    w.successes += *r.matched;
  }
  for (const auto& [w, rate] : per_window) {
    const std::size_t first = w * cfg.ttl;
    windows.push_back({{"window", w},
                       {"first_session", first},
                       {"last_session", first + rate.trials - 1},
                       {"trapdoored", w == 0},
                       {"recovery", rate.to_json()}});
  }
  rep.aggregates["within_ttl_recovery"] = within.to_json();
  rep.aggregates["post_rotation_recovery"] = after.to_json();
  rep.aggregates["rotation_sessions"] = cache.rotation_log();
  rep.extra["windows"] = windows;
  rep.wall_clock_seconds = seconds_since(start);
  return rep;
}

Report run_mitm(const ScenarioConfig& cfg) {
  cfg.validate();
  const auto start = Clock::now();
  auto recs = parallel_map<TrialRecord>(cfg.trials, cfg.threads, [&](std::size_t i) {
    SeededRng rng(cfg.seed, trial_stream(kMitm, 0, static_cast<std::uint32_t>(i)));
    const ProtocolConfig honest = protocol_config(cfg, GeneratorPolicy::fresh());
    const ProtocolConfig injected = protocol_config(cfg, GeneratorPolicy::external());

    // Alice <-> Oscar: Oscar answers Alice's Message1 in Bob's role.
    GeneratorSource alice_gen = GeneratorSource::fresh();
    auto [alice, msg1] = alice_init(honest, alice_gen, rng);
    auto [oscar_as_bob, msg2_to_alice] = bob_respond(msg1, honest, rng);
    const KeyBits alice_key = alice_finish(alice, msg2_to_alice, honest);

    // Oscar <-> Bob: Oscar replaces Message1 with his trapdoored a' and b'.
    const TrapdoorKey key = gen_trapdoor(cfg.param, cfg.p, cfg.weight, rng);
    auto [oscar_as_alice, msg1_to_bob] = alice_init_with(injected, key.a, std::nullopt, rng);
    auto [bob, msg2] = bob_respond(msg1_to_bob, injected, rng);
    const KeyBits oscar_bob_key = alice_finish(oscar_as_alice, msg2, injected);

    // u = a' s' + e' has the same shape as b, so the trapdoor opens s'.
    const TRecovery tr = recover_t(msg2.u, key);
    const auto s1 = recover_s(msg2.u, tr.t, key.a);

    TrialRecord rec;
    rec.index = i;
    rec.oscar_knows_alice_key = oscar_as_bob.key == alice_key;
    rec.oscar_knows_bob_key = oscar_bob_key == bob.key;
    rec.alice_bob_keys_differ = !(alice_key == bob.key);
    rec.bob_secret_recovered = s1 && *s1 == bob.s1.to_ring(cfg.param);
    rec.agreed = *rec.oscar_knows_alice_key && *rec.oscar_knows_bob_key;
    rec.noise_gap = std::max(centered_lift(oscar_as_bob.v - msg2_to_alice.u * alice.s.to_ring(cfg.param)).max_abs(),
                             centered_lift(bob.v - msg2.u * oscar_as_alice.s.to_ring(cfg.param)).max_abs());
    return rec;
  });
  Report rep = make_report(cfg, std::move(recs));
  rep.aggregates["oscar_knows_alice_key"] =
      count(rep.records, [](const TrialRecord& r) { return *r.oscar_knows_alice_key; }).to_json();
  rep.aggregates["oscar_knows_bob_key"] =
      count(rep.records, [](const TrialRecord& r) { return *r.oscar_knows_bob_key; }).to_json();
  rep.aggregates["alice_bob_keys_differ"] =
      count(rep.records, [](const TrialRecord& r) { return *r.alice_bob_keys_differ; }).to_json();
  rep.aggregates["bob_secret_recovered"] =
      count(rep.records, [](const TrialRecord& r) { return *r.bob_secret_recovered; }).to_json();
  rep.aggregates["substitution_detected_in_protocol"] = false;
  rep.extra["lesson"] =
      "The exchange carries no authentication: neither party can tell that Message1 or "
      "Message2 was replaced, so Oscar holds a session key with each side.";
  rep.wall_clock_seconds = seconds_since(start);
  return rep;
}

Report sweep(const ScenarioConfig& cfg) {
  cfg.validate();
  const auto start = Clock::now();
  nlohmann::json table = nlohmann::json::array();
  std::uint32_t point = 0;
  for (auto k : cfg.grid.k_values) {
    const ParamPtr P = ParamSet::make(cfg.param->id(), cfg.param->name(), cfg.param->n(),
                                      cfg.param->q(), k, std::sqrt(k / 2.0),
                                      next_prime(4 * k + 1));
    for (auto p : cfg.grid.p_values) {
      for (auto weight : cfg.grid.weights) {
        const std::uint32_t sub = point++;
        nlohmann::json row = {{"k", k}, {"p", p}, {"weight", weight}};
        if (!is_prime(p) || p < 4 * k + 1 || weight == 0 || weight > P->n()) {
          row["valid"] = false;
          row["bound"] = nullptr;
          row["guaranteed"] = false;
          row["recovery"] = nullptr;
          table.push_back(row);
          continue;
        }
        const auto matched = parallel_map<int>(cfg.trials, cfg.threads, [&](std::size_t i) {
          SeededRng rng(cfg.seed, trial_stream(kSweep, sub, static_cast<std::uint32_t>(i)));
          const TrapdoorKey key = gen_trapdoor(P, p, weight, rng);
          ProtocolConfig pc;
          pc.param = P;
          pc.backend = cfg.backend;
          pc.policy = GeneratorPolicy::external();
          GeneratorSource gen = GeneratorSource::external(key.a);
          const Transcript tr = run_session(pc, gen, rng);
          const auto out = recover_full(tr, key);
          return out && out->matched ? 1 : 0;
        });
        Rate r;
        r.trials = matched.size();
        for (int m : matched) r.successes += m;
        row["valid"] = true;
        row["bound"] = worst_case_bound(*P, p, weight);
        row["guaranteed"] = recovery_guaranteed(*P, p, weight);
        row["recovery"] = r.to_json();
        table.push_back(row);
      }
    }
  }
  Report rep = make_report(cfg, {});
  rep.aggregates["grid_points"] = table.size();
  rep.extra["table"] = table;
  rep.wall_clock_seconds = seconds_since(start);
  return rep;
}

Report run_scenario(const ScenarioConfig& cfg) {
  switch (cfg.scenario) {
    case Scenario::honest: return run_honest_batch(cfg);
    case Scenario::backdoor: return run_backdoor_batch(cfg);
    case Scenario::uniform_control: return run_uniform_control_batch(cfg);
    case Scenario::cached_a: return run_cached_a(cfg);
    case Scenario::mitm: return run_mitm(cfg);
    case Scenario::sweep: return sweep(cfg);
    case Scenario::verify_claims: return verify_claims(cfg);
  }
  throw ParameterError("unknown scenario");
}

}  // namespace nhlab
