#pragma once

#include <string>
#include <vector>

#include "forge/hierarchy.hpp"

namespace forge {

struct VerifyIssue {
  std::uint64_t level = 0;
  std::size_t block_index = 0;  // meaningful for per-block issues
  std::string what;
};

struct VerifyReport {
  bool ok = true;
  std::uint64_t levels_checked = 0;
  std::uint64_t blocks_checked = 0;
  std::vector<VerifyIssue> issues;
  std::vector<CheckRecord> checks;  // non-fatal diagnostics (gamma chain etc.)
};

// Independent re-check of a stored construction. Deliberately naive: every
// block is re-tested with the plain double-precision correlation loop and a
// freshly recomputed Bernstein profile, and every block is re-cut at the
// parent and reference block lengths. Shares no code path with the builder's
// accelerated candidate tester.
VerifyReport verify_construction(const std::vector<FamilyLevel>& levels,
                                 const Schedule& schedule, const TestSequence& y,
                                 const std::vector<CodeFamily>& code_families);

}  // namespace forge
