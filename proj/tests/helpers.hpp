#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "forge/block.hpp"
#include "forge/config.hpp"
#include "forge/sequence.hpp"

namespace forge::testutil {

// Independent Mobius oracle by trial division; quadratic but obviously
// correct, which is the point.
inline int mobius_trial_division(std::uint64_t n) {
  if (n == 1) return 1;
  int factors = 0;
  for (std::uint64_t p = 2; p * p <= n; ++p) {
    if (n % p == 0) {
      n /= p;
      if (n % p == 0) return 0;
      ++factors;
    }
  }
  if (n > 1) ++factors;
  return factors % 2 == 0 ? 1 : -1;
}

inline Block block_from_string(const std::string& digits, std::uint32_t N = 2) {
  return Block::parse_digits(digits, N);
}

inline TestSequence constant_sequence(double v, std::size_t n) {
  return TestSequence(std::vector<double>(n, v), SequenceSource::synthetic);
}

inline TestSequence alternating_sequence(std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = (i % 2 == 0) ? 1.0 : -1.0;
  return TestSequence(std::move(v), SequenceSource::synthetic);
}

// A small feasible end-to-end configuration; correlation bounds are loose
// enough for Mobius data to admit passers at every level.
inline RunConfig small_run_config() {
  return parse_run_config(R"({
    "N": 2, "M": 6,
    "alpha": "const:1.0",
    "eps_rule": "log3_log", "c_eps": 0.225, "c_delta": 0.225,
    "jump_rule": "b_prime",
    "r": [1.5],
    "desk_jumps": {"6": 2, "7": 3},
    "desk_ue": {"1": {"p": 1, "K": 3}},
    "caps": {"max_level": 3, "max_family": 400, "max_candidates": 20000},
    "sequence": {"source": "mobius", "length": 25000},
    "seed": 42, "mode": "desk"
  })");
}

}  // namespace forge::testutil
