#pragma once

#include <string>
#include <vector>

#include "forge/config.hpp"
#include "forge/hierarchy.hpp"
#include "forge/measure.hpp"
#include "forge/verify.hpp"

namespace forge {

// Artifact directory layout:
//   config.json            canonical config + its fingerprint
//   schedule.json          jumps, UE levels, validation report
//   level_<k>/meta.json    k, N_k, m_k, gamma, seed, test metadata
//   level_<k>/blocks.txt   one block per line, base-N digits
//   verify_report.json     written by the verify command
// All JSON is emitted with sorted keys so identical runs are byte-identical.

void save_config_artifact(const std::string& dir, const RunConfig& config);
// Returns the stored canonical config text; throws VerificationError when
// the stored fingerprint does not match the text.
RunConfig load_config_artifact(const std::string& dir);

void save_schedule_artifact(const std::string& dir, const Schedule& schedule,
                            const ValidationReport& report, std::uint64_t config_hash);

void save_level(const std::string& dir, const FamilyLevel& level,
                std::uint64_t config_hash);
FamilyLevel load_level(const std::string& dir, std::uint32_t alphabet,
                       std::uint64_t expected_config_hash);

// Levels present on disk under dir/level_<k>, in ascending k; stops at the
// first gap. Used both for resume and for verification.
std::vector<FamilyLevel> load_levels(const std::string& dir, std::uint32_t alphabet,
                                     std::uint64_t expected_config_hash);

struct AggregateReport {
  VerifyReport verify;
  EntropyReport entropy;
  std::vector<CheckRecord> extra;  // diameter / spread / uncorrelation records
  bool gating_ok = true;
};

void save_verify_report(const std::string& dir, const AggregateReport& report);

}  // namespace forge
