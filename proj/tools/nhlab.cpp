// nhlab: command-line driver for the key-exchange lab.
//
// Exit codes: 0 success, 2 configuration error, 3 decode error,
// 4 claim failure.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "nhlab/harness.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitDecode = 3;
constexpr int kExitClaims = 4;

struct Options {
  std::string seed_hex;
  std::uint32_t trials = 1000;
  std::string backend = "peikert";
  std::string param = "newhope1024";
  std::string out;
  bool quiet = false;
  std::string config_path;
  unsigned threads = 1;
  std::uint32_t p = 67;
  std::size_t weight = 2;
  std::uint32_t ttl = 5;
  bool reuse_trapdoor = false;
  std::vector<std::uint32_t> p_values{67};
  std::vector<std::size_t> weights{1, 2, 4, 8, 16, 24, 32, 48};
  std::vector<std::uint32_t> k_values{16};
  std::vector<std::string> point;  // decode-d4
  std::string transcript_out;      // exchange
  std::string trapdoor_out;        // backdoor
};

template <typename T>
std::vector<T> parse_list(const std::string& s) {
  std::vector<T> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    const auto b = item.find_first_not_of(' ');
    if (b == std::string::npos) continue;
    out.push_back(static_cast<T>(std::stoull(item.substr(b))));
  }
  if (out.empty()) throw nhlab::ParameterError("empty list value '" + s + "'");
  return out;
}

// Values from --config apply only where the flag was not given explicitly.
void apply_config_file(CLI::App& app, Options& o) {
  std::ifstream in(o.config_path);
  if (!in) throw nhlab::ParameterError("cannot read config file '" + o.config_path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  const auto kv = nhlab::parse_config_text(buf.str());
  auto unset = [&](const std::string& flag) {
    for (const CLI::App* a : {&app, app.get_subcommands().empty() ? &app : app.get_subcommands().front()}) {
      try {
        if (a->get_option("--" + flag)->count() > 0) return false;
      } catch (const CLI::OptionNotFound&) {
      }
    }
    return true;
  };
  for (const auto& [key, value] : kv) {
    if (!unset(key)) continue;
    try {
      if (key == "seed") o.seed_hex = value;
      else if (key == "trials") o.trials = static_cast<std::uint32_t>(std::stoul(value));
      else if (key == "backend") o.backend = value;
      else if (key == "param") o.param = value;
      else if (key == "out") o.out = value;
      else if (key == "quiet") o.quiet = value == "true" || value == "1";
      else if (key == "threads") o.threads = static_cast<unsigned>(std::stoul(value));
      else if (key == "p") o.p = static_cast<std::uint32_t>(std::stoul(value));
      else if (key == "weight") o.weight = std::stoul(value);
      else if (key == "ttl") o.ttl = static_cast<std::uint32_t>(std::stoul(value));
      else if (key == "reuse-trapdoor") o.reuse_trapdoor = value == "true" || value == "1";
      else if (key == "p-values") o.p_values = parse_list<std::uint32_t>(value);
      else if (key == "weights") o.weights = parse_list<std::size_t>(value);
      else if (key == "k-values") o.k_values = parse_list<std::uint32_t>(value);
      else throw nhlab::ParameterError("unknown config key '" + key + "'");
    } catch (const std::logic_error& e) {
      if (dynamic_cast<const nhlab::ParameterError*>(&e)) throw;
      throw nhlab::ParameterError("bad value for config key '" + key + "': " + value);
    }
  }
}

nhlab::ScenarioConfig scenario_config(const Options& o, nhlab::Scenario s) {
  nhlab::ScenarioConfig c;
  c.scenario = s;
  c.trials = o.trials;
  c.param = nhlab::param_by_name(o.param);
  c.backend = nhlab::parse_backend(o.backend);
  c.p = o.p;
  c.weight = o.weight;
  c.ttl = o.ttl;
  c.reuse_trapdoor = o.reuse_trapdoor;
  c.threads = o.threads;
  c.grid.p_values = o.p_values;
  c.grid.weights = o.weights;
  c.grid.k_values = o.k_values;
  std::string seed = o.seed_hex;
  if (seed.empty()) {
    if (const char* env = std::getenv("NHLAB_SEED")) seed = env;
  }
  c.seed = seed.empty() ? nhlab::default_seed() : nhlab::parse_seed_hex(seed);
  c.validate();
  return c;
}

void emit(const Options& o, const nlohmann::json& j, const std::string& summary) {
  const std::string text = j.dump(2) + "\n";
  if (!o.out.empty()) {
    std::ofstream f(o.out, std::ios::binary);
    if (!f) throw nhlab::ParameterError("cannot write '" + o.out + "'");
    f << text;
  } else if (!o.quiet) {
    std::cout << text;
  }
  if (!o.quiet && !o.out.empty()) std::cout << summary << "\n";
}

std::string rate_line(const nlohmann::json& agg, const char* key) {
  if (!agg.contains(key)) return "";
  const auto& r = agg.at(key);
  std::ostringstream s;
  s << key << " " << r.at("successes") << "/" << r.at("trials");
  return s.str();
}

// "a/b", "a" or a decimal such as "0.6".
std::pair<std::int64_t, std::int64_t> parse_rational(const std::string& s) {
  const auto slash = s.find('/');
  if (slash != std::string::npos) {
    const std::int64_t num = std::stoll(s.substr(0, slash));
    const std::int64_t den = std::stoll(s.substr(slash + 1));
    if (den <= 0) throw nhlab::ParameterError("denominator must be positive in '" + s + "'");
    return {num, den};
  }
  const auto dot = s.find('.');
  if (dot == std::string::npos) return {std::stoll(s), 1};
  const std::string frac = s.substr(dot + 1);
  std::int64_t den = 1;
  for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
  const bool neg = !s.empty() && s[0] == '-';
  const std::int64_t whole = dot == 0 || s.substr(0, dot) == "-" ? 0 : std::llabs(std::stoll(s.substr(0, dot)));
  const std::int64_t num = whole * den + (frac.empty() ? 0 : std::stoll(frac));
  return {neg ? -num : num, den};
}

int run_decode_d4(const Options& o) {
  if (o.point.size() != 4) throw nhlab::ParameterError("decode-d4 needs exactly 4 coordinates");
  std::array<std::pair<std::int64_t, std::int64_t>, 4> parts{};
  std::int64_t den = 1;
  for (int i = 0; i < 4; ++i) {
    parts[i] = parse_rational(o.point[i]);
    den = std::lcm(den, parts[i].second);
  }
  std::array<std::int64_t, 4> num{};
  for (int i = 0; i < 4; ++i) num[i] = parts[i].first * (den / parts[i].second);
  const nhlab::RationalPoint4 y(num, den);
  const nhlab::LatticePoint4 d4 = nhlab::d4_decode(y);
  const nhlab::LatticePoint4 dt = nhlab::dtilde4_decode(y);
  auto coords = [](const nhlab::LatticePoint4& p) {
    nlohmann::json a = nlohmann::json::array();
    for (auto h : p.half_coords) {
      if (h % 2 == 0)
        a.push_back(std::to_string(h / 2));
      else
        a.push_back(std::to_string(h) + "/2");
    }
    return a;
  };
  const nlohmann::json j = {
      {"point", {{"numerators", num}, {"denominator", den}}},
      {"d4_nearest", coords(d4)},
      {"d4_squared_distance", {{"numerator", nhlab::squared_distance_num(y, d4)}, {"denominator", 4 * den * den}}},
      {"dtilde4_nearest", coords(dt)},
      {"dtilde4_coset_bit", dt.is_integer() ? 0 : 1},
      {"voronoi", nhlab::voronoi_class_name(nhlab::voronoi_contains(y))},
  };
  emit(o, j, "decoded");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"nhlab - Ring-LWE key exchange and trapdoored-generator lab"};
  app.require_subcommand(1);
  app.fallthrough();
  Options o;
  app.add_option("--seed", o.seed_hex, "64 hex characters (fallback: NHLAB_SEED)");
  app.add_option("--trials", o.trials, "trials per batch");
  app.add_option("--backend", o.backend, "peikert | d4");
  app.add_option("--param", o.param, "parameter set name or id");
  app.add_option("--out", o.out, "write the JSON report here");
  app.add_flag("--quiet", o.quiet, "no stdout output");
  app.add_option("--config", o.config_path, "key = value file; flags override it");
  app.add_option("--threads", o.threads, "worker threads (results do not depend on it)");

  auto* exchange = app.add_subcommand("exchange", "honest sessions with fresh generators");
  exchange->add_option("--transcript", o.transcript_out, "also write the first session transcript (JSON)");
  auto* backdoor = app.add_subcommand("backdoor", "sessions on a trapdoored generator, with recovery");
  auto* control = app.add_subcommand("control", "recovery attempts against honest uniform generators");
  auto* cached = app.add_subcommand("cached", "trapdoored generator cached for ttl sessions, then rotated");
  auto* mitm = app.add_subcommand("mitm", "active man-in-the-middle with a substituted generator");
  auto* sweep = app.add_subcommand("sweep", "recovery rate over a (p, weight, k) grid");
  auto* verify = app.add_subcommand("verify-claims", "run every acceptance check and print verdicts");
  auto* decode = app.add_subcommand("decode-d4", "decode a rational 4-point and classify it against the 24-cell");

  for (auto* sc : {backdoor, control, cached, mitm}) {
    sc->add_option("--p", o.p, "trapdoor prime");
    sc->add_option("--weight", o.weight, "sparse weight of f_hat and g_hat");
  }
  backdoor->add_flag("--reuse-trapdoor", o.reuse_trapdoor, "one trapdoor for the whole batch");
  backdoor->add_option("--trapdoor-out", o.trapdoor_out, "export the trapdoor of trial 0 (JSON)");
  cached->add_option("--ttl", o.ttl, "sessions per cached generator");
  verify->add_option("--ttl", o.ttl, "ttl for the cached-generator check");
  std::string p_values, weights, k_values;
  sweep->add_option("--p-values", p_values, "comma-separated primes");
  sweep->add_option("--weights", weights, "comma-separated weights");
  sweep->add_option("--k-values", k_values, "comma-separated noise parameters");
  decode->add_option("coords", o.point, "four coordinates: integers, decimals or a/b")->expected(4);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (!o.config_path.empty()) apply_config_file(app, o);
    if (!p_values.empty()) o.p_values = parse_list<std::uint32_t>(p_values);
    if (!weights.empty()) o.weights = parse_list<std::size_t>(weights);
    if (!k_values.empty()) o.k_values = parse_list<std::uint32_t>(k_values);

    if (decode->parsed()) return run_decode_d4(o);

    nhlab::Scenario s = nhlab::Scenario::honest;
    if (backdoor->parsed()) s = nhlab::Scenario::backdoor;
    else if (control->parsed()) s = nhlab::Scenario::uniform_control;
    else if (cached->parsed()) s = nhlab::Scenario::cached_a;
    else if (mitm->parsed()) s = nhlab::Scenario::mitm;
    else if (sweep->parsed()) s = nhlab::Scenario::sweep;
    else if (verify->parsed()) s = nhlab::Scenario::verify_claims;

    const nhlab::ScenarioConfig cfg = scenario_config(o, s);

    if (exchange->parsed() && !o.transcript_out.empty()) {
      nhlab::ProtocolConfig pc;
      pc.param = cfg.param;
      pc.backend = cfg.backend;
      nhlab::SeededRng rng(cfg.seed, nhlab::trial_stream(1, 0, 0));
      nhlab::GeneratorSource gen = nhlab::GeneratorSource::fresh();
      const auto t = nhlab::run_session(pc, gen, rng);
      std::ofstream f(o.transcript_out);
      f << nhlab::TranscriptExport::of(t).to_json().dump(2) << "\n";
    }
    if (backdoor->parsed() && !o.trapdoor_out.empty()) {
      nhlab::SeededRng rng(cfg.seed, nhlab::trial_stream(2, 0, 0));
      const auto key = nhlab::gen_trapdoor(cfg.param, cfg.p, cfg.weight, rng);
      std::ofstream f(o.trapdoor_out);
      f << key.to_json().dump(2) << "\n";
    }

    const nhlab::Report rep = nhlab::run_scenario(cfg);
    std::ostringstream summary;
    summary << rep.scenario << ":";
    for (const char* k : {"agreement", "recovery", "attacker_key_equal", "within_ttl_recovery",
                          "post_rotation_recovery", "oscar_knows_alice_key", "oscar_knows_bob_key"}) {
      const auto line = rate_line(rep.aggregates, k);
      if (!line.empty()) summary << " " << line;
    }
    if (s == nhlab::Scenario::verify_claims) {
      summary.str("");
      for (const auto& c : rep.extra["claims"])
        summary << (c["passed"].get<bool>() ? "PASS " : "FAIL ") << c["id"].get<std::string>() << "  "
                << c["title"].get<std::string>() << "\n";
    }
    emit(o, rep.to_json(), summary.str());
    if (s == nhlab::Scenario::verify_claims && !rep.passed) {
      if (!o.quiet) {
        std::cerr << "claim failure:";
        for (const auto& id : rep.aggregates["failed"]) std::cerr << " " << id.get<std::string>();
        std::cerr << "\n";
      }
      return kExitClaims;
    }
    return 0;
  } catch (const nhlab::DecodeError& e) {
    std::cerr << "decode error: " << e.what() << "\n";
    return kExitDecode;
  } catch (const nhlab::ParameterError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
}
