#pragma once

#include <cstdint>
#include <optional>
#include <unordered_set>
#include <vector>

#include "forge/block.hpp"
#include "forge/code.hpp"
#include "forge/schedule.hpp"
#include "forge/sequence.hpp"

namespace forge {

enum class BuildMode { exhaustive, sampled };

struct GammaInfo {
  BuildMode mode = BuildMode::exhaustive;
  Rational exact{0, 1};  // meaningful in exhaustive mode only
  double estimate = 0.0;
  double ci_low = 0.0;  // 95% interval, sampled mode
  double ci_high = 0.0;
  std::uint64_t draws = 0;
  std::uint64_t passers = 0;

  double value() const {
    return mode == BuildMode::exhaustive ? exact.value() : estimate;
  }
};

// Mean short-block frequency profile over a reference family G'_p.
struct BernsteinStats {
  std::uint64_t p = 0;            // reference step
  std::uint32_t n = 0;            // short-block length
  std::uint32_t alphabet = 0;
  std::vector<double> xbar;       // indexed by the packed base-N value of D
  double threshold = 0.0;         // sqrt(8 beta) = theta/4
};

struct BernsteinLevelReport {
  double gamma_bar = 0.0;       // empirical pass rate of the correlation test
  double p_fail_given_r = 0.0;  // empirical P(fail Bernstein | passed correlation)
  std::uint64_t q = 0;          // N_k / N_p
  // Paper-side probability bounds, flagged against the desk-scale
  // empirical proxies (note records which proxy was used, or "vacuous").
  std::vector<CheckRecord> bounds;
};

struct FamilyLevel {
  std::uint64_t k = 0;
  std::uint64_t block_len = 1;   // N_k
  std::uint64_t multiplier = 0;  // m_k (0 for the root level)
  std::uint32_t alphabet = 0;
  std::vector<Block> blocks;
  GammaInfo gamma;  // for Bernstein levels this is gamma'_k
  bool bernstein_tested = false;
  std::optional<BernsteinLevelReport> bernstein;
  std::optional<BernsteinStats> stats;
  std::uint64_t seed = 0;

  std::unordered_set<Block, BlockHash> block_set() const;
};

// G_0 = the alphabet itself, one block per symbol.
FamilyLevel make_root_level(std::uint32_t alphabet_size);

// Length of y needed to evaluate the correlation test at (m, N_k):
// windows of length N_k starting at every j <= (m^2 - 1) N_k.
std::uint64_t correlation_required_length(std::uint64_t m, std::uint64_t N_k);

// The correlation test: for every window start j <= (m^2-1) N_k and every
// code f, |corr(f(B), y_j..)| < 2(eps_k + delta_k). The coded image is
// shorter than the window by w-1; it is correlated against the window's
// prefix of matching length. When max_abs_out is supplied the scan is
// exhaustive (no early exit) and records the largest |correlation| seen.
bool correlation_test(const Block& B, const TestSequence& y, const CodeFamily& F,
                      double eps_plus_delta, std::uint64_t m, std::uint64_t N_k,
                      double* max_abs_out = nullptr);

struct BuildOptions {
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

// One correlation-tested construction step: all (or sampled) concatenations
// of m_k parent blocks that pass the correlation test.
FamilyLevel build_level_R(const FamilyLevel& parent, const Schedule& schedule,
                          const TestSequence& y, const CodeFamily& F_k,
                          std::uint64_t k, const BuildOptions& opts);

BernsteinStats bernstein_stats(const FamilyLevel& reference, std::uint32_t n,
                               double threshold);

// Pass iff the averaged short-block frequency profile of B's medium-block
// decomposition stays within stats.threshold of xbar for every D. Equality
// at the threshold passes (the failure condition is strict).
bool bernstein_test(const Block& B, const BernsteinStats& stats,
                    const FamilyLevel& reference);

// Correlation test followed by the Bernstein test against the reference
// family at step ue.p. Records gamma_bar, the conditional failure rate, and
// the paper-side probability bounds.
FamilyLevel build_level_F(const FamilyLevel& parent, const Schedule& schedule,
                          const UELevel& ue, const FamilyLevel& reference,
                          const TestSequence& y, const CodeFamily& F_k,
                          std::uint64_t k, const BuildOptions& opts);

struct GammaChainReport {
  std::vector<CheckRecord> checks;
};

// Per-level (C)/(C')/(C-bar) checks, (A'), and the closing product
// inequality, evaluated against the configured alpha. Diagnostic only:
// desk-scale runs may legitimately fail paper-faithful bounds.
GammaChainReport check_gamma_chain(const std::vector<FamilyLevel>& levels,
                                   const Schedule& schedule);

}  // namespace forge
