#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "forge/common.hpp"

namespace forge {

enum class JumpRule { b, b_prime };  // decay base 8/9 vs 8.5/9

// eps_k / delta_k decay shapes; both slowly decreasing and positive.
struct DecayRule {
  enum class Kind {
    inv_log,   // c / ln(k + e)
    log3_log,  // c * ln(3) / ln(k + 2)
  };
  Kind kind = Kind::inv_log;
  double c = 0.05;

  double operator()(std::uint64_t k) const;
};

struct Caps {
  std::uint64_t max_level = 3;
  std::uint64_t max_family = 400;
  std::uint64_t max_candidates = 20000;
};

struct DeskUEOverride {
  std::uint64_t p = 0;  // forced reference step
  std::uint64_t K = 0;  // forced Bernstein step K_{m(j)}
};

struct ScheduleConfig {
  std::uint32_t N = 2;
  std::uint32_t M = 6;
  double alpha_const = 1.0;
  std::map<std::uint64_t, double> alpha_table;  // optional per-m override
  DecayRule eps;
  DecayRule delta;
  JumpRule rule = JumpRule::b_prime;
  std::vector<double> r;                              // target measure diameters r(j)
  std::map<std::uint64_t, std::uint64_t> desk_jumps;  // m -> K_m, replaces the derived map
  std::map<int, DeskUEOverride> desk_ue;              // j -> forced (p, K)
  Caps caps;

  double alpha(std::uint64_t m) const;
};

// One unique-ergodicity level: the chain r -> (n, theta) -> beta -> p -> m -> K.
struct UELevel {
  int j = 0;
  double r = 0.0;
  std::uint32_t n = 0;
  double theta = 0.0;
  double beta = 0.0;        // theta^2 / 128
  std::uint64_t p = 0;        // reference step
  std::uint64_t m = 0;        // p + M
  std::uint64_t K = 0;        // Bernstein step
  std::uint64_t m_p = 0;      // multiplier at step p, frozen at build time
  long double log_Np = 0.0L;  // log N_p, frozen at build time
  bool overridden = false;    // p/K forced by a desk override
};

struct CheckRecord {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
  bool gating = true;
  std::string note;
};

struct ValidationReport {
  std::vector<CheckRecord> checks;
  bool gating_ok() const;
  bool all_ok() const;
};

class Schedule {
public:
  ScheduleConfig config;
  std::map<std::uint64_t, std::uint64_t> jumps;  // m -> step at which m_k moves past m
  std::vector<UELevel> ue_levels;
  std::uint64_t horizon = 0;  // largest step the schedule covers

  std::uint64_t multiplier(std::uint64_t k) const;    // m_k
  std::uint64_t reference_index(std::uint64_t k) const { return multiplier(k) - config.M; }
  std::uint64_t block_length(std::uint64_t k) const;  // N_k, exact (throws on overflow)
  long double log_block_length(std::uint64_t k) const;
  double eps(std::uint64_t k) const { return config.eps(k); }
  double delta(std::uint64_t k) const { return config.delta(k); }
  // 2*(eps_k + delta_k), the correlation-test bound at step k.
  double correlation_bound(std::uint64_t k) const { return 2.0 * (eps(k) + delta(k)); }

  std::optional<UELevel> ue_at_step(std::uint64_t k) const;

  ValidationReport validate(bool desk_mode) const;
};

// Smallest n with 2^(1-n) < r/2, and theta = r / (2 N^n). Guarantees
// N^n * theta + 2^(1-n) < r, so cylinder closeness at depth n within theta
// forces measure distance below r.
std::pair<std::uint32_t, double> closeness_params(std::uint32_t N, double r);

// Minimal K with 9 * alpha_m * base^(K-1) < 2^-(m+2), forced above
// lower_bound to keep the jump map strictly increasing.
std::uint64_t jump_index(std::uint64_t m, double alpha_m, JumpRule rule,
                         std::uint64_t lower_bound = 0);

// The double-exponential-vs-exponential trade: evaluated in log space so a
// huge exponent degrades to -inf instead of overflowing.
bool requirement_E(const UELevel& level, std::uint32_t N, double alpha_m,
                   std::uint64_t m_p, std::uint64_t K_candidate);

Schedule build_schedule(const ScheduleConfig& config);

struct APrimeResult {
  bool holds = false;      // the summed inequality
  double sum = 0.0;        // sum of (1 - gamma'_s)
  double half_delta = 0.0; // delta_k / 2
  std::vector<CheckRecord> per_gamma;  // each gamma'_s against (C')
};

// Checks sum_{s=p_k+1}^{k-1} (1 - gamma'_s) < delta_k / 2, and each supplied
// gamma'_s against its per-step lower bound 1 - alpha(m_s) (8.5/9)^(s-1).
APrimeResult verify_A_prime(const Schedule& schedule,
                            const std::map<std::uint64_t, double>& gammas,
                            std::uint64_t k);

}  // namespace forge
