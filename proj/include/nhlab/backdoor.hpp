#pragma once

// Trapdoored generator a = g f^-1 with f = 1 + p f_hat, g = 1 + p g_hat.
// For b = a s + e:  b f = g s + f e (mod q). When g s + f e has no
// wraparound its centered lift is exact over Z, and reducing mod p gives
// t = s + e exactly (|s + e| <= 2k < p/2). Then s = (b - t)(a - 1)^-1.

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include "nhlab/protocol.hpp"
#include "nhlab/ring.hpp"
#include "nhlab/sampling.hpp"

namespace nhlab {

class GenerationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TrapdoorKey {
  std::uint32_t p = 0;
  std::size_t weight = 0;
  CenteredPoly f_hat;
  CenteredPoly g_hat;
  RingElement f;
  RingElement g;
  RingElement a;

  nlohmann::json to_json() const;
  static TrapdoorKey from_json(const nlohmann::json& j, ParamPtr param);
};

/// Samples f_hat, g_hat sparse ternary of the given weight until f and g - f
/// are both invertible and f_hat's support generates Z_n (f not in any
/// subring Z_q[X^d], d > 1). Throws ParameterError for a non-prime p, p < 4k + 1,
/// or weight 0 (f = g = 1 gives a - 1 = 0); GenerationError when the retry
/// budget runs out.
TrapdoorKey gen_trapdoor(ParamPtr param, std::uint32_t p, std::size_t weight, SeededRng& rng,
                         int max_attempts = 64);

/// Triangle-inequality bound on max |g s + f e| over Z:
/// 2k + p (2 weight) k.
std::int64_t worst_case_bound(const ParamSet& param, std::uint32_t p, std::size_t weight);
/// bound < q/2, i.e. the centered lift of b f is guaranteed exact.
bool recovery_guaranteed(const ParamSet& param, std::uint32_t p, std::size_t weight);

struct TRecovery {
  CenteredPoly t;                // centered(b f) mod p, centered
  std::int64_t lifted_max_abs;   // max |centered(b f)|, diagnostic
};

TRecovery recover_t(const RingElement& b, const TrapdoorKey& key);

/// (b - t)(a - 1)^-1, or nullopt when a - 1 is not invertible.
std::optional<RingElement> recover_s(const RingElement& b, const CenteredPoly& t,
                                     const RingElement& a);

struct RecoveryOutcome {
  CenteredPoly t;
  RingElement s_rec;
  RingElement e_rec;
  bool guaranteed;  // worst-case bound below q/2 for this key
  bool overflow;    // recovery failed outside the guaranteed regime
  bool matched;     // s_rec == s and e_rec == e
};

/// Chains recover_t and recover_s on the transcript's b, then checks the
/// result against Alice's secrets held in the transcript. Returns nullopt if
/// a - 1 is not invertible for the transcript's generator.
std::optional<RecoveryOutcome> recover_full(const Transcript& transcript, const TrapdoorKey& key);

/// Recomputes Alice's side with a recovered secret: w = u s_rec reconciled
/// against r.
KeyBits attacker_key(const Transcript& transcript, const RingElement& s_rec);

// --- NTRU pseudo-inverse and Mol-Yung decomposition (cyclic ring) ------------

struct PseudoInverseWitness {
  CyclicRingElement P;
  CyclicRingElement p_poly;
};

/// P with P p s = s for every s with s(1) = 0 in Z_q[X]/(X^N - 1).
/// Equivalent to P p = 1 modulo (X^N - 1)/(X - 1); nullopt when p is not
/// invertible there. Intended for toy sizes.
std::optional<PseudoInverseWitness> pseudo_inverse_find(const CyclicRingElement& p_poly);

/// Randomized check of P p s = s on `trials` random s projected to s(1) = 0.
bool pseudo_inverse_check(const PseudoInverseWitness& w, int trials, SeededRng& rng);

struct MolYungInstance {
  CyclicRingElement h;
  CyclicRingElement t;
  CyclicRingElement v;  // binary
  CyclicRingElement w;  // binary
};

/// t == h v + w (mod q). Throws ParameterError if v or w is not binary.
bool molyung_decomposition_check(const MolYungInstance& inst);

}  // namespace nhlab
