#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "forge/schedule.hpp"
#include "forge/sequence.hpp"

namespace forge {

struct SequenceSpec {
  enum class Kind { mobius, file, synthetic };
  Kind kind = Kind::mobius;
  std::size_t length = 100000;  // mobius / synthetic
  std::string path;             // file
  std::uint64_t noise_seed = 1; // synthetic
};

struct RunConfig {
  ScheduleConfig schedule;
  SequenceSpec sequence;
  // Window schedule w_k for the code families; steps not listed use the
  // largest listed key below them, or 1.
  std::map<std::uint64_t, std::uint32_t> code_windows;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  bool faithful = false;  // faithful mode gates the paper-side inequalities

  std::uint32_t window_at(std::uint64_t k) const;
};

// JSON config file. Top-level fields:
//   N, M, alpha ("const:<v>" or {"<m>": v, ...}), c_eps, c_delta,
//   eps_rule ("inv_log" | "log3_log"), jump_rule ("b" | "b_prime"),
//   r (list of reals), desk_jumps ({"<m>": K}), desk_ue ({"<j>": {p, K}}),
//   caps ({max_level, max_family, max_candidates}),
//   sequence ({source: "mobius"|"file"|"synthetic", length, path, seed}),
//   code_windows ({"<k>": w}), seed, threads, mode ("desk" | "faithful").
// Unknown fields and constraint violations raise ConfigError with the
// offending field named.
RunConfig load_run_config(const std::string& path);
RunConfig parse_run_config(const std::string& json_text);

// Canonical serialization (sorted keys, fixed float format) and its FNV-1a
// fingerprint; artifacts embed the hash so verify can refuse mismatches.
std::string canonical_config(const RunConfig& config);
std::uint64_t config_hash(const RunConfig& config);

TestSequence make_sequence(const SequenceSpec& spec);

}  // namespace forge
