#include "nhlab/params.hpp"

#include <cmath>
#include <map>
#include <mutex>

namespace nhlab {

bool is_prime(std::uint64_t x) {
  if (x < 2) return false;
  if (x % 2 == 0) return x == 2;
  for (std::uint64_t d = 3; d * d <= x; d += 2) {
    if (x % d == 0) return false;
  }
  return true;
}

std::uint32_t next_prime(std::uint32_t lo) {
  while (!is_prime(lo)) ++lo;
  return lo;
}

std::uint32_t pow_mod(std::uint64_t base, std::uint64_t exp, std::uint32_t q) {
  std::uint64_t result = 1 % q;
  base %= q;
  while (exp) {
    if (exp & 1) result = result * base % q;
    base = base * base % q;
    exp >>= 1;
  }
  return static_cast<std::uint32_t>(result);
}

std::uint32_t smallest_generator(std::uint32_t q) {
  if (!is_prime(q)) throw ParameterError("smallest_generator: modulus is not prime");
  if (q == 2) return 1;
  std::vector<std::uint32_t> factors;
  std::uint32_t m = q - 1;
  for (std::uint32_t d = 2; d * d <= m; ++d) {
    if (m % d == 0) {
      factors.push_back(d);
      while (m % d == 0) m /= d;
    }
  }
  if (m > 1) factors.push_back(m);
  for (std::uint32_t g = 2; g < q; ++g) {
    bool ok = true;
    for (auto f : factors) {
      if (pow_mod(g, (q - 1) / f, q) == 1) {
        ok = false;
        break;
      }
    }
    if (ok) return g;
  }
  throw ParameterError("smallest_generator: none found");
}

namespace {

std::uint32_t bit_reverse(std::uint32_t x, unsigned bits) {
  std::uint32_t r = 0;
  for (unsigned i = 0; i < bits; ++i) {
    r = (r << 1) | (x & 1);
    x >>= 1;
  }
  return r;
}

NttTables build_ntt(std::uint32_t n, std::uint32_t q) {
  NttTables t;
  const std::uint32_t g = smallest_generator(q);
  t.psi = pow_mod(g, (q - 1) / (2 * static_cast<std::uint64_t>(n)), q);
  t.psi_inv = pow_mod(t.psi, q - 2, q);
  t.n_inv = pow_mod(n, q - 2, q);
  unsigned logn = 0;
  while ((1u << logn) < n) ++logn;
  t.psi_rev.resize(n);
  t.psi_inv_rev.resize(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    const std::uint32_t r = bit_reverse(i, logn);
    t.psi_rev[r] = pow_mod(t.psi, i, q);
    t.psi_inv_rev[r] = pow_mod(t.psi_inv, i, q);
  }
  return t;
}

}  // namespace

ParamPtr ParamSet::make(std::uint8_t id, std::string name, std::uint32_t n,
                        std::uint32_t q, std::uint32_t k_noise, double sigma,
                        std::uint32_t p_trapdoor) {
  if (n == 0 || (n & (n - 1)) != 0)
    throw ParameterError("ParamSet: n must be a power of two");
  if (q < 3 || !is_prime(q)) throw ParameterError("ParamSet: q must be an odd prime");
  if (q >= (1u << 16)) throw ParameterError("ParamSet: q must be below 2^16");
  if (!is_prime(p_trapdoor) || p_trapdoor < 4 * k_noise + 1)
    throw ParameterError("ParamSet: p_trapdoor must be a prime >= 4k+1");
  if (!(sigma >= 0.0)) throw ParameterError("ParamSet: sigma must be non-negative");

  auto ps = std::shared_ptr<ParamSet>(new ParamSet());
  ps->id_ = id;
  ps->name_ = std::move(name);
  ps->n_ = n;
  ps->q_ = q;
  ps->k_noise_ = k_noise;
  ps->sigma_ = sigma;
  ps->p_trapdoor_ = p_trapdoor;
  if ((q - 1) % (2 * static_cast<std::uint64_t>(n)) == 0) ps->ntt_ = build_ntt(n, q);
  return ps;
}

const NttTables& ParamSet::ntt() const {
  if (!ntt_) throw UnsupportedParameter("parameter set lacks q = 1 mod 2n");
  return *ntt_;
}

namespace {

const std::vector<ParamPtr>& registry() {
  static const std::vector<ParamPtr> sets = [] {
    std::vector<ParamPtr> v;
    v.push_back(ParamSet::make(0, "newhope1024", 1024, 12289, 16, std::sqrt(8.0), 67));
    v.push_back(ParamSet::make(1, "newhope512", 512, 12289, 16, std::sqrt(8.0), 67));
    v.push_back(ParamSet::make(2, "toy2-17", 2, 17, 1, std::sqrt(0.5), 5));
    v.push_back(ParamSet::make(3, "toy4-17", 4, 17, 1, std::sqrt(0.5), 5));
    v.push_back(ParamSet::make(4, "toy8-97", 8, 97, 1, std::sqrt(0.5), 5));
    v.push_back(ParamSet::make(5, "toy8-257", 8, 257, 2, 1.0, 11));
    v.push_back(ParamSet::make(6, "toy16-257", 16, 257, 2, 1.0, 11));
    return v;
  }();
  return sets;
}

}  // namespace

ParamPtr param_by_id(std::uint8_t id) {
  for (const auto& p : registry())
    if (p->id() == id) return p;
  throw ParameterError("unknown parameter id " + std::to_string(id));
}

ParamPtr param_by_name(const std::string& name) {
  for (const auto& p : registry())
    if (p->name() == name) return p;
  // numeric ids are accepted too
  try {
    std::size_t pos = 0;
    const int id = std::stoi(name, &pos);
    if (pos == name.size() && id >= 0 && id < 256) return param_by_id(static_cast<std::uint8_t>(id));
  } catch (const std::logic_error&) {
  }
  throw ParameterError("unknown parameter set '" + name + "'");
}

std::vector<ParamPtr> all_params() { return registry(); }

ParamPtr default_params() { return registry().front(); }

}  // namespace nhlab
