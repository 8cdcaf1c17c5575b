#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "forge/common.hpp"

namespace forge {

enum class SequenceSource { mobius, file, synthetic };

// A bounded real sequence y_1, y_2, ... with |y_i| <= 1, indexed from 1.
class TestSequence {
public:
  TestSequence(std::vector<double> values, SequenceSource source);

  // 1-based access, matching the usual y_1, y_2, ... indexing.
  double at(std::size_t i) const { return values_[i - 1]; }
  std::size_t length() const { return values_.size(); }
  SequenceSource source() const { return source_; }

  // True when every value is an exact integer (e.g. Mobius, +/-1 noise);
  // lets correlation sums be evaluated in exact integer arithmetic.
  bool integer_valued() const { return integer_valued_; }
  // Only valid when integer_valued(); 1-based.
  int at_int(std::size_t i) const { return static_cast<int>(values_[i - 1]); }

  const std::vector<double>& raw() const { return values_; }

private:
  std::vector<double> values_;
  SequenceSource source_;
  bool integer_valued_ = false;
};

// Mobius function mu(1..n_max) via a smallest-prime-factor sieve.
TestSequence mobius(std::size_t n_max);

// (1/n) * sum_{i=1..n} y_{i*t+l}.
double ap_average(const TestSequence& y, std::size_t t, std::size_t l, std::size_t n);

// Largest n such that n*t+l <= length.
std::size_t max_ap_terms(const TestSequence& y, std::size_t t, std::size_t l);

struct ApTriple {
  std::size_t t = 0;
  std::size_t l = 0;
  std::size_t n = 0;
  double average = 0.0;
};

struct AperiodicityReport {
  std::size_t t_max = 0;
  double tol = 0.0;
  std::vector<ApTriple> evaluated;
  std::vector<ApTriple> flagged;  // |average| > tol
  double max_abs_average = 0.0;
  ApTriple worst;
  // A finite screen can only falsify aperiodicity, never establish it.
  static constexpr const char* kCaveat =
      "finite check: can falsify aperiodicity, never prove it";
};

// Evaluates ap_average at the maximal admissible n for every t <= t_max,
// 0 <= l < t, flagging triples whose |average| exceeds tol.
AperiodicityReport verify_aperiodic(const TestSequence& y, std::size_t t_max, double tol);

// Newline-separated reals, one per line, line i = y_i. Values outside
// [-1,1] are a parse error (reported with the line number).
TestSequence load_sequence(const std::string& path);

// Seeded uniform +/-1 noise. Aperiodic only almost surely; callers are
// expected to screen it with verify_aperiodic.
TestSequence synthetic_pm1(std::uint64_t seed, std::size_t n);

void save_sequence(const TestSequence& y, const std::string& path);

}  // namespace forge
