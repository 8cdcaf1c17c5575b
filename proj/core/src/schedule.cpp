#include "forge/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace forge {

namespace {

constexpr double kE = 2.718281828459045;

long double log_base(JumpRule rule) {
  return rule == JumpRule::b ? std::log(8.0L / 9.0L) : std::log(8.5L / 9.0L);
}

// log of 9 * alpha * base^(K-1) - log of 2^-(m+2)
long double jump_margin(std::uint64_t m, double alpha_m, JumpRule rule, std::uint64_t K) {
  return std::log(9.0L * alpha_m) + static_cast<long double>(K - 1) * log_base(rule) +
         static_cast<long double>(m + 2) * std::log(2.0L);
}

}  // namespace

double DecayRule::operator()(std::uint64_t k) const {
  switch (kind) {
    case Kind::inv_log:
      return c / std::log(static_cast<double>(k) + kE);
    case Kind::log3_log:
      return c * std::log(3.0) / std::log(static_cast<double>(k) + 2.0);
  }
  return 0.0;
}

double ScheduleConfig::alpha(std::uint64_t m) const {
  auto it = alpha_table.find(m);
  return it == alpha_table.end() ? alpha_const : it->second;
}

bool ValidationReport::gating_ok() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const CheckRecord& c) { return c.holds || !c.gating; });
}

bool ValidationReport::all_ok() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const CheckRecord& c) { return c.holds; });
}

std::pair<std::uint32_t, double> closeness_params(std::uint32_t N, double r) {
  if (!(r > 0.0) || r > 2.0)
    throw std::invalid_argument("closeness_params: r must lie in (0, 2]");
  std::uint32_t n = 1;
  while (!(std::exp2(1.0 - static_cast<double>(n)) < r / 2.0)) {
    ++n;
    if (n > 64) throw CapacityError("closeness_params: depth n exceeds 64");
  }
  const double theta = r / (2.0 * std::pow(static_cast<double>(N), n));
  return {n, theta};
}

std::uint64_t jump_index(std::uint64_t m, double alpha_m, JumpRule rule,
                         std::uint64_t lower_bound) {
  if (!(alpha_m > 0.0)) throw std::invalid_argument("jump_index: alpha(m) must be > 0");
  // Closed-form start, then exact strict-inequality adjustment in log space.
  const long double x =
      (std::log(9.0L * alpha_m) + static_cast<long double>(m + 2) * std::log(2.0L)) /
      (-log_base(rule));
  std::uint64_t K = x < 0 ? 1 : static_cast<std::uint64_t>(std::floor(x)) + 2;
  while (K > 1 && jump_margin(m, alpha_m, rule, K - 1) < 0.0L) --K;
  while (jump_margin(m, alpha_m, rule, K) >= 0.0L) ++K;
  return std::max(K, lower_bound + 1);
}

bool requirement_E(const UELevel& level, std::uint32_t N, double alpha_m,
                   std::uint64_t m_p, std::uint64_t K_candidate) {
  if (K_candidate <= level.p)
    throw std::invalid_argument("requirement_E: K_candidate must exceed p");
  if (m_p < 2) throw std::invalid_argument("requirement_E: m_p must be >= 2");
  // lhs = 2 N^n exp(-beta * m_p^(K-p)); the ratio N_K/N_p is bounded below
  // by m_p^(K-p), so this is the conservative side.
  const long double exponent = static_cast<long double>(K_candidate - level.p) *
                               std::log(static_cast<long double>(m_p));
  long double decay;  // beta * m_p^(K-p), saturating to +inf
  if (exponent > 11000.0L)
    decay = std::numeric_limits<long double>::infinity();
  else
    decay = static_cast<long double>(level.beta) * std::exp(exponent);
  const long double lhs_log = std::log(2.0L) +
                              static_cast<long double>(level.n) *
                                  std::log(static_cast<long double>(N)) -
                              decay;
  // rhs = alpha(m) * ((8.5/9)^(K-1) - (8/9)^(K-1)), in log space:
  const long double k1 = static_cast<long double>(K_candidate - 1);
  const long double ratio = k1 * std::log(16.0L / 17.0L);  // (8/9)/(8.5/9) = 16/17
  const long double rhs_log = std::log(static_cast<long double>(alpha_m)) +
                              k1 * std::log(8.5L / 9.0L) +
                              std::log1p(-std::exp(ratio));
  return lhs_log < rhs_log;
}

std::uint64_t Schedule::multiplier(std::uint64_t k) const {
  if (k == 0) throw std::invalid_argument("multiplier: k must be >= 1");
  std::uint64_t count = 0;
  for (const auto& [m, K] : jumps)
    if (K <= k) ++count;
  return config.M + count;
}

std::uint64_t Schedule::block_length(std::uint64_t k) const {
  std::uint64_t n = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    const std::uint64_t m = multiplier(i);
    if (n > std::numeric_limits<std::uint64_t>::max() / m)
      throw CapacityError("block_length: N_k overflows 64 bits; use log_block_length");
    n *= m;
  }
  return n;
}

long double Schedule::log_block_length(std::uint64_t k) const {
  long double s = 0.0L;
  for (std::uint64_t i = 1; i <= k; ++i)
    s += std::log(static_cast<long double>(multiplier(i)));
  return s;
}

std::optional<UELevel> Schedule::ue_at_step(std::uint64_t k) const {
  for (const UELevel& ue : ue_levels)
    if (ue.K == k) return ue;
  return std::nullopt;
}

namespace {

// Jump chain K_M, K_{M+1}, ..., each forced strictly above its predecessor.
// Walks step counts and cumulative log block lengths without materializing
// the (possibly enormous) per-step arrays.
class JumpChain {
public:
  JumpChain(const ScheduleConfig& cfg) : cfg_(cfg) {}

  // K_m for m >= M.
  std::uint64_t K(std::uint64_t m) {
    while (cfg_.M + ks_.size() <= m) {
      const std::uint64_t next_m = cfg_.M + ks_.size();
      const std::uint64_t prev = ks_.empty() ? 0 : ks_.back();
      ks_.push_back(jump_index(next_m, cfg_.alpha(next_m), cfg_.rule, prev));
      if (ks_.size() > kGuard)
        throw CapacityError("schedule: jump chain exceeds guard; use desk overrides");
    }
    return ks_[m - cfg_.M];
  }

  // First step k with m_k = m (the multiplier reaches m at the jump past m-1).
  std::uint64_t first_step_with_multiplier(std::uint64_t m) {
    if (m <= cfg_.M) return 1;
    return K(m - 1);
  }

  std::uint64_t multiplier_at(std::uint64_t k) {
    std::uint64_t m = cfg_.M;
    while (K(m) <= k) ++m;
    return m;
  }

  long double log_block_length(std::uint64_t p) {
    long double sum = 0.0L;
    std::uint64_t k = 1;
    std::uint64_t m = cfg_.M;
    while (k <= p) {
      const std::uint64_t interval_end = std::min<std::uint64_t>(K(m) - 1, p);
      sum += static_cast<long double>(interval_end - k + 1) *
             std::log(static_cast<long double>(m));
      k = interval_end + 1;
      ++m;
    }
    return sum;
  }

private:
  static constexpr std::size_t kGuard = 10'000'000;
  const ScheduleConfig& cfg_;
  std::vector<std::uint64_t> ks_;
};

UELevel make_ue_level(const ScheduleConfig& cfg, int j, double r, JumpChain& chain,
                      std::uint64_t prev_ue_K) {
  UELevel ue;
  ue.j = j;
  ue.r = r;
  auto [n, theta] = closeness_params(cfg.N, r);
  ue.n = n;
  ue.theta = theta;
  ue.beta = theta * theta / 128.0;

  auto ov = cfg.desk_ue.find(j);
  if (ov != cfg.desk_ue.end()) {
    ue.overridden = true;
    ue.p = ov->second.p;
    ue.K = ov->second.K;
    if (ue.p < 1 || ue.K <= ue.p)
      throw ConfigError("schedule: desk_ue override needs 1 <= p < K (level j=" +
                        std::to_string(j) + ")");
  } else {
    // Smallest p with log2/(m_p - 1) < beta and n/N_p < theta/4; both
    // conditions are monotone in p, so take the max of the two minima.
    const double v = 1.0 + std::log(2.0) / ue.beta;
    std::uint64_t m_star = static_cast<std::uint64_t>(std::floor(v)) + 1;
    while (std::log(2.0) / static_cast<double>(m_star - 1) >= ue.beta) ++m_star;
    const std::uint64_t p_entropy = chain.first_step_with_multiplier(m_star);

    const long double target = std::log(4.0L * ue.n / static_cast<long double>(ue.theta));
    std::uint64_t lo = 1, hi = 1;
    while (chain.log_block_length(hi) <= target) hi *= 2;
    while (lo < hi) {
      const std::uint64_t mid = lo + (hi - lo) / 2;
      if (chain.log_block_length(mid) > target)
        hi = mid;
      else
        lo = mid + 1;
    }
    const std::uint64_t p_length = lo;

    ue.p = std::max(p_entropy, p_length);
    ue.m = ue.p + cfg.M;
    std::uint64_t K = std::max(chain.K(ue.m), prev_ue_K + 1);
    UELevel probe = ue;
    probe.m_p = chain.multiplier_at(ue.p);
    while (!requirement_E(probe, cfg.N, cfg.alpha(ue.m), probe.m_p, K)) {
      ++K;
      if (K > chain.K(ue.m) + 100'000'000ULL)
        throw CapacityError("schedule: requirement (E) scan exceeds guard");
    }
    ue.K = K;
  }
  ue.m = ue.p + cfg.M;
  ue.m_p = chain.multiplier_at(ue.p);
  ue.log_Np = chain.log_block_length(ue.p);
  return ue;
}

}  // namespace

Schedule build_schedule(const ScheduleConfig& config) {
  if (config.N < 2) throw ConfigError("schedule: alphabet size N must be >= 2");
  if (config.M < 3) throw ConfigError("schedule: initial multiplier M must be >= 3");
  for (std::size_t i = 1; i < config.r.size(); ++i)
    if (config.r[i] > config.r[i - 1])
      throw ConfigError("schedule: r(j) must be nonincreasing");
  for (double r : config.r)
    if (!(r > 0.0) || r > 2.0) throw ConfigError("schedule: r(j) must lie in (0, 2]");

  Schedule sched;
  sched.config = config;
  sched.horizon = config.caps.max_level;

  JumpChain chain(config);
  if (!config.desk_jumps.empty()) {
    std::uint64_t expected_m = config.M;
    std::uint64_t prev_K = 0;
    for (const auto& [m, K] : config.desk_jumps) {
      if (m != expected_m)
        throw ConfigError("schedule: desk_jumps keys must be consecutive from M");
      if (K <= prev_K)
        throw ConfigError("schedule: desk_jumps values must be strictly increasing");
      ++expected_m;
      prev_K = K;
    }
    sched.jumps = config.desk_jumps;
  } else {
    // Materialize jump entries a little past the horizon so the first few
    // are always visible in the artifact.
    std::uint64_t m = config.M;
    std::size_t entries = 0;
    for (;;) {
      const std::uint64_t K = chain.K(m);
      sched.jumps[m] = K;
      ++entries;
      if (K > sched.horizon && entries >= 4) break;
      if (entries >= 64) break;
      ++m;
    }
  }

  std::uint64_t prev_ue_K = 0;
  for (std::size_t idx = 0; idx < config.r.size(); ++idx) {
    const int j = static_cast<int>(idx) + 1;
    UELevel ue = [&] {
      if (!config.desk_jumps.empty() && config.desk_ue.find(j) == config.desk_ue.end())
        throw ConfigError(
            "schedule: desk_jumps given but no desk_ue override for level j=" +
            std::to_string(j));
      if (config.desk_ue.find(j) != config.desk_ue.end()) {
        // Overridden levels resolve m_p and N_p against the desk jump map.
        UELevel u;
        u.j = j;
        u.r = config.r[idx];
        auto [n, theta] = closeness_params(config.N, u.r);
        u.n = n;
        u.theta = theta;
        u.beta = theta * theta / 128.0;
        u.overridden = true;
        u.p = config.desk_ue.at(j).p;
        u.K = config.desk_ue.at(j).K;
        if (u.p < 1 || u.K <= u.p)
          throw ConfigError("schedule: desk_ue override needs 1 <= p < K");
        u.m = u.p + config.M;
        return u;
      }
      return make_ue_level(config, j, config.r[idx], chain, prev_ue_K);
    }();
    if (ue.overridden) {
      Schedule probe = sched;  // m_p / N_p against the already-fixed jump map
      ue.m_p = probe.multiplier(ue.p);
      ue.log_Np = probe.log_block_length(ue.p);
      if (ue.K > sched.horizon)
        throw ConfigError("schedule: desk_ue K exceeds caps.max_level horizon");
      if (ue.p >= ue.K)
        throw ConfigError("schedule: reference step p must precede the Bernstein step");
    }
    if (ue.K <= prev_ue_K)
      throw ConfigError("schedule: Bernstein steps K_{m(j)} must be strictly increasing in j");
    prev_ue_K = ue.K;
    sched.ue_levels.push_back(ue);
  }
  return sched;
}

ValidationReport Schedule::validate(bool desk_mode) const {
  ValidationReport rep;
  const auto& cfg = config;

  auto add = [&rep](std::string name, double lhs, double rhs, bool holds, bool gating,
                    std::string note = "") {
    rep.checks.push_back({std::move(name), lhs, rhs, holds, gating, std::move(note)});
  };

  // Jump map shape.
  {
    bool increasing = true;
    std::uint64_t prev = 0;
    for (const auto& [m, K] : jumps) {
      if (K <= prev) increasing = false;
      prev = K;
    }
    add("jumps_strictly_increasing", 0, 0, increasing, true);
  }

  // Rule (b)/(b') at every materialized jump.
  for (const auto& [m, K] : jumps) {
    const long double margin = jump_margin(m, cfg.alpha(m), cfg.rule, K);
    const double lhs = static_cast<double>(
        std::exp(std::log(9.0L * cfg.alpha(m)) + static_cast<long double>(K - 1) *
                                                     log_base(cfg.rule)));
    const double rhs = std::exp2(-static_cast<double>(m) - 2.0);
    add((cfg.rule == JumpRule::b ? "rule_b(m=" : "rule_b_prime(m=") + std::to_string(m) +
            ")",
        lhs, rhs, margin < 0.0L, !desk_mode,
        desk_mode ? "informational under desk overrides" : "");
  }

  // Multiplier reconstruction: nondecreasing, unit jumps, p_k < k.
  {
    bool ok = true;
    std::uint64_t prev_m = cfg.M;
    bool p_ok = true;
    const std::uint64_t probe_limit = std::min<std::uint64_t>(horizon, 100000);
    for (std::uint64_t k = 1; k <= probe_limit; ++k) {
      const std::uint64_t m = multiplier(k);
      if (m < prev_m || m > prev_m + 1) ok = false;
      if (m - cfg.M >= k) p_ok = false;
      prev_m = m;
    }
    add("multiplier_unit_jumps", 0, 0, ok, true);
    add("reference_index_below_step", 0, 0, p_ok, true,
        "p_k = m_k - M < k for all probed k");
  }

  // eps/delta decay shape.
  {
    bool ok = true;
    double prev_e = cfg.eps(1), prev_d = cfg.delta(1);
    if (!(prev_e > 0.0) || !(prev_d > 0.0)) ok = false;
    for (std::uint64_t k = 2; k <= horizon + 100; ++k) {
      const double e = cfg.eps(k), d = cfg.delta(k);
      if (!(e > 0.0) || !(d > 0.0) || e > prev_e || d > prev_d) ok = false;
      prev_e = e;
      prev_d = d;
    }
    add("eps_delta_positive_nonincreasing", 0, 0, ok, true);
  }

  add("initial_multiplier_paper_regime", static_cast<double>(cfg.M), 81.0, cfg.M >= 81,
      false, "desk runs use much smaller M by design");

  // Unique-ergodicity levels.
  for (const UELevel& ue : ue_levels) {
    const std::string tag = "(j=" + std::to_string(ue.j) + ")";
    {
      const double lhs = std::sqrt(8.0 * ue.beta);
      const double rhs = ue.theta / 4.0;
      const bool holds = std::fabs(lhs - rhs) <=
                         2.0 * std::numeric_limits<double>::epsilon() * std::fabs(rhs);
      add("bernstein_threshold_identity" + tag, lhs, rhs, holds, true,
          "sqrt(8 beta) == theta/4");
    }
    {
      const double lhs =
          std::pow(static_cast<double>(cfg.N), ue.n) * ue.theta +
          std::exp2(1.0 - static_cast<double>(ue.n));
      add("closeness_contract" + tag, lhs, ue.r, lhs < ue.r, true,
          "N^n theta + 2^(1-n) < r");
    }
    {
      const double lhs = std::log(2.0) / static_cast<double>(ue.m_p - 1);
      add("ent1_entropy_gap" + tag, lhs, ue.beta, lhs < ue.beta, !desk_mode,
          desk_mode ? "paper-faithful choice of p; desk overrides fail this" : "");
      const long double rhs_len = std::log(static_cast<long double>(ue.theta) / 4.0L);
      const long double lhs_len = std::log(static_cast<long double>(ue.n)) - ue.log_Np;
      add("ent1_length_gap" + tag, static_cast<double>(lhs_len),
          static_cast<double>(rhs_len), lhs_len < rhs_len, !desk_mode,
          "log(n/N_p) < log(theta/4)");
    }
    add("requirement_E" + tag, 0, 0,
        requirement_E(ue, cfg.N, cfg.alpha(ue.m), ue.m_p, ue.K), !desk_mode,
        desk_mode ? "informational under desk overrides" : "");
    add("bernstein_step_after_reference" + tag, static_cast<double>(ue.p),
        static_cast<double>(ue.K), ue.p < ue.K, true);
  }
  return rep;
}

APrimeResult verify_A_prime(const Schedule& schedule,
                            const std::map<std::uint64_t, double>& gammas,
                            std::uint64_t k) {
  APrimeResult res;
  const std::uint64_t p_k = schedule.reference_index(k);
  res.half_delta = schedule.delta(k) / 2.0;
  for (std::uint64_t s = p_k + 1; s + 1 <= k; ++s) {
    auto it = gammas.find(s);
    if (it == gammas.end())
      throw std::invalid_argument("verify_A_prime: missing gamma for step " +
                                  std::to_string(s));
    res.sum += 1.0 - it->second;
    const double bound =
        1.0 - schedule.config.alpha(schedule.multiplier(s)) *
                  std::pow(8.5 / 9.0, static_cast<double>(s) - 1.0);
    res.per_gamma.push_back({"C_prime(s=" + std::to_string(s) + ")", it->second, bound,
                             it->second > bound, false, ""});
  }
  res.holds = res.sum < res.half_delta;
  return res;
}

}  // namespace forge

