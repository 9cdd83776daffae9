#pragma once
#include <cstdint>
#include <vector>

#include "nhlab/ring.hpp"
#include "nhlab/sampling.hpp"

namespace testutil {

inline nhlab::Seed seed_of(std::uint8_t tag) {
  nhlab::Seed s{};
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = static_cast<std::uint8_t>(tag * 31 + i);
  return s;
}

inline nhlab::RingElement ring(const nhlab::ParamPtr& p, std::vector<std::uint32_t> c) {
  return nhlab::RingElement(p, std::move(c));
}

inline std::vector<std::int64_t> as_i64(const nhlab::RingElement& x) {
  return {x.coeffs().begin(), x.coeffs().end()};
}

inline nhlab::ParamPtr toy2() { return nhlab::param_by_name("toy2-17"); }

}  // namespace testutil
