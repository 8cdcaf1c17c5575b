#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "forge/hierarchy.hpp"

namespace forge {

// Truncated cylinder-frequency table: for every short block D with
// |D| <= depth, the frequency of D in the source block (count / |source|,
// the paper's convention, so depth-n' rows sum to slightly below 1: the
// last n'-1 window positions are missing).
class EmpiricalMeasure {
public:
  EmpiricalMeasure() = default;
  EmpiricalMeasure(std::uint32_t alphabet, std::uint32_t depth);

  std::uint32_t depth() const { return depth_; }
  std::uint32_t alphabet() const { return alphabet_; }
  std::size_t source_len() const { return source_len_; }

  double at(const Block& D) const;
  double at(std::uint32_t len, std::uint64_t packed) const {
    return by_len_[len - 1][packed];
  }
  void set(std::uint32_t len, std::uint64_t packed, double v) {
    by_len_[len - 1][packed] = v;
  }
  std::size_t row_size(std::uint32_t len) const { return by_len_[len - 1].size(); }

  // Largest per-row deviation from summing to one; the paper's frequency
  // convention makes this (n'-1)/len at depth n'.
  double boundary_slack(std::uint32_t len) const;

  friend EmpiricalMeasure empirical_measure(const Block& C, std::uint32_t L);

private:
  std::uint32_t alphabet_ = 0;
  std::uint32_t depth_ = 0;
  std::size_t source_len_ = 0;
  std::vector<std::vector<double>> by_len_;  // [n'-1][packed base-N value of D]
};

EmpiricalMeasure empirical_measure(const Block& C, std::uint32_t L);

// d(mu, nu) truncated at n_max: sum over n' <= n_max of
// 2^{-n'} * sum_{D in Lambda^{n'}} |mu(D) - nu(D)|. The discarded tail is
// at most 2 * 2^{-n_max} (each inner sum is at most 2).
struct MeasureDistance {
  double value = 0.0;
  double tail_bound = 0.0;
};
MeasureDistance measure_distance(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu,
                                 std::uint32_t n_max);

struct EntropyLevel {
  std::uint64_t k = 0;
  double h = 0.0;            // (1/N_k) log #G_k
  double telescoped = 0.0;   // log N + sum_{i<=k} log(gamma_i)/N_i
  bool exact = true;         // false when any gamma along the chain is sampled
};

struct EntropyReport {
  std::vector<EntropyLevel> levels;
  std::vector<CheckRecord> checks;
  bool all_gammas_at_least_half = true;
};

// Entropy accounting: per-level h, the telescoping identity (asserted only
// on exhaustive chains), the log N - log2/(M-1) lower bound when every
// gamma is >= 1/2, and the inter-level gap bound for each UE level.
EntropyReport entropy_report(const std::vector<FamilyLevel>& levels,
                             const Schedule& schedule);

struct FreqSpread {
  double max_spread = 0.0;
  Block worst_D;
  std::size_t worst_i = 0, worst_j = 0;  // indices of the extremal pair
  std::string note;
};

// Max over D in Lambda^n of (max - min over family blocks) of freq(B, D).
FreqSpread freq_spread(const FamilyLevel& level, std::uint32_t n);

// Seeded iid concatenation of family blocks, cut at a seeded offset in
// [0, N_level) to emulate a shifted orbit point.
Block sample_point(const FamilyLevel& level, std::size_t length, std::uint64_t seed);

struct UncorrelationEntry {
  std::size_t n = 0;
  double a_n = 0.0;       // (1/n) sum_i f(x_i..) y_i
  double bound = 0.0;     // Fact-1 bound at the resolved step
  std::uint64_t k = 0;    // resolved step: smallest k with n < m_k^2 N_k
  bool applicable = true; // false when f is not in F_k or no k resolves
  bool holds = false;
  std::string note;
};

struct UncorrelationReport {
  std::vector<UncorrelationEntry> entries;
  bool all_applicable_hold() const;
};

// |A(n)| against the Fact-1 bound 2/(m_k-2) + ((m_k-4)/(m_k-2)) * 2(eps+delta)
// for each n. Needs the code families to decide membership of f in F_k.
UncorrelationReport uncorrelation_check(const Block& x, const TestSequence& y,
                                        const Code& f, const std::vector<std::size_t>& n_list,
                                        const Schedule& schedule,
                                        const std::vector<CodeFamily>& code_families);

struct DiameterReport {
  std::size_t samples = 0;
  std::size_t point_len = 0;
  double max_distance = 0.0;  // max pairwise truncated measure_distance
  double tail_bound = 0.0;
  double r_target = 0.0;
  bool within_r = false;
  FreqSpread spread;
  double theta = 0.0;
  std::vector<CheckRecord> checks;
};

// Estimated diameter of the invariant-measure set: max pairwise distance of
// empirical measures of sampled orbit points, at depth ue.n, against ue.r.
// point_len == 0 picks a default of 200 * N_level.
DiameterReport diameter_report(const FamilyLevel& level, const UELevel& ue,
                               std::size_t samples, std::uint64_t seed,
                               std::size_t point_len = 0);

}  // namespace forge
