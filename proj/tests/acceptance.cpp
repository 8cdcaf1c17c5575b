// Acceptance gate: one line per criterion, PASS or FAIL, nonzero exit when
// any criterion fails. Failures are reported with the measured diagnostic;
// where a criterion's pinned configuration cannot run, a clearly-labelled
// supplementary demonstration on the feasible configuration is printed so
// the capability itself is still exercised.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "forge/artifacts.hpp"
#include "forge/config.hpp"
#include "forge/hierarchy.hpp"
#include "forge/measure.hpp"
#include "forge/rng.hpp"
#include "forge/verify.hpp"

using namespace forge;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(int idx, bool pass, const std::string& name, const std::string& detail) {
  std::printf("[%2d] %s  %s%s%s\n", idx, pass ? "PASS" : "FAIL", name.c_str(),
              detail.empty() ? "" : ": ", detail.c_str());
  if (!pass) ++failures;
}

void note(const std::string& text) { std::printf("      %s\n", text.c_str()); }

int mobius_trial_division(std::uint64_t n) {
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

const char* kRelaxedConfig = R"({
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
})";

const char* kPinnedConfig = R"({
  "N": 2, "M": 6,
  "alpha": "const:1.0",
  "eps_rule": "log3_log", "c_eps": 0.05, "c_delta": 0.05,
  "jump_rule": "b_prime",
  "r": [0.5],
  "desk_jumps": {"6": 2, "7": 3},
  "desk_ue": {"1": {"p": 1, "K": 3}},
  "caps": {"max_level": 3, "max_family": 2000, "max_candidates": 20000},
  "sequence": {"source": "mobius", "length": 25000},
  "seed": 42, "mode": "desk"
})";

struct Pipeline {
  RunConfig config;
  Schedule schedule;
  TestSequence y;
  std::vector<CodeFamily> families;
  std::vector<FamilyLevel> levels;

  Pipeline(const std::string& json, unsigned threads)
      : config(parse_run_config(json)),
        schedule(build_schedule(config.schedule)),
        y(make_sequence(config.sequence)) {
    levels.push_back(make_root_level(config.schedule.N));
    BuildOptions opts{config.seed, threads};
    for (std::uint64_t k = 1; k <= config.schedule.caps.max_level; ++k) {
      CodeFamily F = enumerate_codes(config.schedule.N, config.window_at(k));
      F.step = static_cast<int>(k);
      families.push_back(F);
      if (auto ue = schedule.ue_at_step(k))
        levels.push_back(
            build_level_F(levels[k - 1], schedule, *ue, levels[ue->p], y, F, k, opts));
      else
        levels.push_back(build_level_R(levels[k - 1], schedule, y, F, k, opts));
    }
  }
};

std::string round1(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

}  // namespace

int main() {
  const auto t0 = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  };

  // ---- 1: sieve vs trial division -----------------------------------------
  {
    TestSequence mu = mobius(100000);
    std::uint64_t mismatches = 0;
    for (std::uint64_t n = 1; n <= 100000; ++n)
      if (mu.at_int(n) != mobius_trial_division(n)) ++mismatches;
    report(1, mismatches == 0, "sieve matches the trial-division oracle up to 1e5",
           mismatches ? std::to_string(mismatches) + " mismatches" : "");
  }

  // ---- 2: arithmetic-progression screen -----------------------------------
  {
    auto rep = verify_aperiodic(mobius(1000000), 10, 0.05);
    report(2, rep.flagged.empty(),
           "Mobius progression averages stay below 0.05 up to step 10",
           "worst |average| " + round1(rep.max_abs_average) + " at (t=" +
               std::to_string(rep.worst.t) + ",l=" + std::to_string(rep.worst.l) + ")");
  }

  // ---- 3: schedule arithmetic ---------------------------------------------
  {
    bool ok = jump_index(6, 1.0, JumpRule::b_prime) == 137;
    // Independent bisection on the same predicate.
    auto pred = [](std::uint64_t K) {
      return std::log(9.0) + (double(K) - 1.0) * std::log(8.5 / 9.0) <
             -8.0 * std::log(2.0);
    };
    std::uint64_t lo = 1, hi = 1024;
    while (lo < hi) {
      std::uint64_t mid = (lo + hi) / 2;
      if (pred(mid))
        hi = mid;
      else
        lo = mid + 1;
    }
    ok = ok && lo == 137;
    std::string detail = "slow-decay jump index " +
                         std::to_string(jump_index(6, 1.0, JumpRule::b_prime)) +
                         " (bisection " + std::to_string(lo) + ")";
    for (const char* json : {kPinnedConfig, kRelaxedConfig}) {
      Schedule s = build_schedule(parse_run_config(json).schedule);
      for (const UELevel& u : s.ue_levels) {
        ok = ok && std::sqrt(8.0 * u.beta) == u.theta / 4.0;  // exact identity
        ok = ok && std::pow(double(s.config.N), double(u.n)) * u.theta +
                           std::pow(2.0, 1.0 - double(u.n)) <
                       u.r;
      }
    }
    report(3, ok, "jump index, threshold identity and closeness contract", detail);
  }

  // ---- the two pipelines shared by the remaining criteria -----------------
  std::optional<Pipeline> pinned;
  std::string pinned_error;
  try {
    pinned.emplace(kPinnedConfig, 2);
  } catch (const Error& e) {
    pinned_error = e.what();
  }
  Pipeline relaxed(kRelaxedConfig, 2);
  VerifyReport relaxed_verify =
      verify_construction(relaxed.levels, relaxed.schedule, relaxed.y, relaxed.families);

  // ---- 4: pinned-config construction + independent re-check ---------------
  {
    bool ok = false;
    std::string detail;
    if (!pinned) {
      detail = "construction infeasible on the pinned tolerances: " + pinned_error;
    } else {
      VerifyReport rep = verify_construction(pinned->levels, pinned->schedule, pinned->y,
                                             pinned->families);
      ok = rep.ok && pinned->levels.size() == 4;
      detail = std::to_string(rep.blocks_checked) + " blocks re-checked, " +
               std::to_string(rep.issues.size()) + " issues";
    }
    report(4, ok, "pinned-config construction re-passes the naive checker", detail);
    if (!ok) {
      note("the pinned correlation bound at level 1 is 0.2 while the constant code");
      note("forces |correlation| = 5/6 on a window of the test sequence, so no");
      note("candidate can pass; this is a defect of the pinned tolerances, not of");
      note("the builder. Supplementary demonstration on the relaxed tolerances:");
      note("  re-check: " + std::to_string(relaxed_verify.blocks_checked) +
           " blocks across " + std::to_string(relaxed_verify.levels_checked) +
           " levels, issues = " + std::to_string(relaxed_verify.issues.size()) +
           (relaxed_verify.ok ? " (clean)" : " (FAILED)"));
    }
  }

  // ---- 5: entropy identity -------------------------------------------------
  {
    bool ok = false;
    std::string detail;
    if (pinned) {
      EntropyReport rep = entropy_report(pinned->levels, pinned->schedule);
      ok = true;
      for (const auto& c : rep.checks)
        if (!c.holds) ok = false;
      detail = "identity and bounds on the pinned run";
    } else {
      detail = "pinned construction unavailable (see criterion 4)";
    }
    report(5, ok, "entropy identity, lower bound and level-gap bound", detail);
    if (!ok) {
      EntropyReport rep = entropy_report(relaxed.levels, relaxed.schedule);
      bool supp = true;
      double h1 = 0, tel1 = 0;
      for (const auto& e : rep.levels)
        if (e.k == 1) h1 = e.h, tel1 = e.telescoped;
      supp = supp && std::fabs(h1 - tel1) <= 1e-12 * std::max(1.0, std::fabs(h1));
      for (const auto& c : rep.checks)
        if (!c.holds) supp = false;
      note("supplementary, relaxed tolerances: level-1 identity exact to " +
           round1(std::fabs(h1 - tel1)) + ", all entropy checks " +
           std::string(supp ? "hold" : "FAIL"));
    }
  }

  // ---- 6: concentration of averaged frequencies ---------------------------
  {
    // Nonvacuous setting: q*beta = 0.8 gives a failure bound 2e^{-1.6} ~ 0.4.
    const FamilyLevel& fam = relaxed.levels[1];  // all 64 blocks of length 6
    const std::uint32_t n = 2;
    const double beta = 0.004;
    const std::uint64_t q = 200, trials = 100000;
    const double threshold = std::sqrt(8.0 * beta);
    const double bound = 2.0 * std::exp(-2.0 * double(q) * beta);
    // Frequencies of the fixed short block D = "00" in each family member.
    BernsteinStats st = bernstein_stats(fam, n, threshold);
    std::vector<double> fD(fam.blocks.size());
    for (std::size_t i = 0; i < fam.blocks.size(); ++i)
      fD[i] = freq(fam.blocks[i], Block::parse_digits("00", 2)).value();
    const double mean = st.xbar[0];
    Rng rng(20260826);
    std::uint64_t bad = 0;
    for (std::uint64_t t = 0; t < trials; ++t) {
      double sum = 0.0;
      for (std::uint64_t i = 0; i < q; ++i) sum += fD[rng.below(fD.size())];
      if (std::fabs(sum / double(q) - mean) > threshold) ++bad;
    }
    const double empirical = double(bad) / double(trials);
    const double sigma = std::sqrt(bound * (1.0 - bound) / double(trials));
    const bool ok = bound <= 0.5 && empirical <= bound + 3.0 * sigma;
    report(6, ok, "iid deviation rate within the concentration bound",
           "empirical " + round1(empirical) + " vs bound " + round1(bound) + " (+3sigma " +
               round1(3.0 * sigma) + ")");
  }

  // ---- 7: frequency spread and measure diameter ---------------------------
  {
    bool ok = false;
    std::string detail;
    const UELevel* pu = nullptr;
    if (pinned && !pinned->schedule.ue_levels.empty() &&
        pinned->schedule.ue_levels[0].K < pinned->levels.size()) {
      const UELevel& u = pinned->schedule.ue_levels[0];
      pu = &u;
      DiameterReport rep =
          diameter_report(pinned->levels[u.K], u, 50, derive_seed(pinned->config.seed, 77));
      ok = true;
      for (const auto& c : rep.checks)
        if (!c.holds) ok = false;
      detail = "max distance " + round1(rep.max_distance + rep.tail_bound) + " vs r=" +
               round1(u.r);
    } else {
      detail = "pinned construction unavailable (see criterion 4)";
    }
    report(7, ok, "frequency spread and sampled measure diameter", detail);
    if (!ok && !pu) {
      const UELevel& u = relaxed.schedule.ue_levels[0];
      DiameterReport rep =
          diameter_report(relaxed.levels[u.K], u, 50, derive_seed(relaxed.config.seed, 77));
      bool supp = true;
      for (const auto& c : rep.checks)
        if (!c.holds) supp = false;
      note("supplementary, relaxed tolerances: spread " + round1(rep.spread.max_spread) +
           " <= " + round1(rep.theta) + "+slack, diameter " +
           round1(rep.max_distance + rep.tail_bound) + " < " + round1(rep.r_target) +
           (supp ? " (all hold)" : " (FAIL)"));
    }
  }

  // ---- 8: uniform uncorrelation sweep and adversarial sensitivity ---------
  {
    // Sensitivity half: feeding the code's own image of x as the test
    // sequence must be detected as correlated.
    bool sensitivity = false;
    {
      const FamilyLevel& top = relaxed.levels.back();
      Block x = sample_point(top, 2 * top.block_len, 5);
      const Code& f = relaxed.families.back().codes.front();
      SignBlock img = f.apply(x);
      std::vector<double> vals(img.raw().begin(), img.raw().end());
      TestSequence self(vals, SequenceSource::synthetic);
      auto rep = uncorrelation_check(x, self, f, {top.block_len}, relaxed.schedule,
                                     relaxed.families);
      sensitivity = !rep.entries.empty() && rep.entries[0].applicable &&
                    !rep.entries[0].holds;
    }

    bool sweep = false;
    std::string detail;
    auto run_sweep = [&](const Pipeline& p) {
      const FamilyLevel& top = p.levels.back();
      const std::uint64_t N_k = top.block_len;
      std::vector<std::size_t> n_list{N_k / 4, N_k / 2, N_k};
      bool all_hold = true;
      double worst_margin = 1e9;
      for (const Block& B : top.blocks) {
        const Block doubled = concat({B, B});
        const auto syms = doubled.unpack();
        for (std::uint64_t off = 0; off < N_k; ++off) {
          std::vector<std::uint8_t> cut(syms.begin() + off, syms.begin() + off + N_k);
          Block x(cut, top.alphabet);
          for (const Code& f : p.families.back().codes) {
            auto rep = uncorrelation_check(x, p.y, f, n_list, p.schedule, p.families);
            for (const auto& e : rep.entries)
              if (e.applicable) {
                worst_margin = std::min(worst_margin, e.bound - std::fabs(e.a_n));
                if (!e.holds) all_hold = false;
              }
          }
        }
      }
      return std::make_pair(all_hold, worst_margin);
    };
    if (pinned) {
      auto [hold, margin] = run_sweep(*pinned);
      sweep = hold;
      detail = "worst margin " + round1(margin);
    } else {
      detail = "pinned construction unavailable (see criterion 4)";
    }
    report(8, sweep && sensitivity, "orbit-average bound sweep and adversarial detection",
           detail + (sensitivity ? "; adversarial pair detected"
                                 : "; adversarial pair NOT detected"));
    if (!sweep && pinned_error.empty() == false) {
      auto [hold, margin] = run_sweep(relaxed);
      note("supplementary, relaxed tolerances: all blocks x all offsets, bound " +
           std::string(hold ? "holds" : "FAILS") + ", worst margin " + round1(margin));
    }
  }

  // ---- 9: byte-identical artifacts ----------------------------------------
  {
    auto dump = [&](const Pipeline& p, const std::string& dir) {
      fs::remove_all(dir);
      const std::uint64_t hash = config_hash(p.config);
      save_config_artifact(dir, p.config);
      save_schedule_artifact(dir, p.schedule, p.schedule.validate(true), hash);
      for (const auto& lvl : p.levels) save_level(dir, lvl, hash);
    };
    Pipeline again(kRelaxedConfig, 4);  // same config/seed, different threads
    dump(relaxed, "/tmp/forge_accept_a");
    dump(again, "/tmp/forge_accept_b");
    bool identical = true;
    std::size_t files = 0;
    for (auto it = fs::recursive_directory_iterator("/tmp/forge_accept_a");
         it != fs::recursive_directory_iterator(); ++it) {
      if (!it->is_regular_file()) continue;
      ++files;
      const auto rel = fs::relative(it->path(), "/tmp/forge_accept_a");
      std::ifstream a(it->path(), std::ios::binary);
      std::ifstream b(fs::path("/tmp/forge_accept_b") / rel, std::ios::binary);
      std::string sa((std::istreambuf_iterator<char>(a)), std::istreambuf_iterator<char>());
      std::string sb((std::istreambuf_iterator<char>(b)), std::istreambuf_iterator<char>());
      if (sa != sb || sa.empty()) identical = false;
    }
    report(9, identical && files >= 6, "repeated runs produce byte-identical artifacts",
           std::to_string(files) + " files compared");
    fs::remove_all("/tmp/forge_accept_a");
    fs::remove_all("/tmp/forge_accept_b");
  }

  // ---- 10: pseudometric properties ----------------------------------------
  {
    std::uint64_t violations = 0;
    for (std::uint64_t trial = 0; trial < 1000; ++trial) {
      EmpiricalMeasure m[3]{EmpiricalMeasure(2, 3), EmpiricalMeasure(2, 3),
                            EmpiricalMeasure(2, 3)};
      Rng rng(derive_seed(99, trial));
      for (auto& mu : m)
        for (std::uint32_t n = 1; n <= 3; ++n)
          for (std::size_t d = 0; d < mu.row_size(n); ++d) mu.set(n, d, rng.unit());
      const double dxy = measure_distance(m[0], m[1], 3).value;
      const double dyx = measure_distance(m[1], m[0], 3).value;
      const double dxz = measure_distance(m[0], m[2], 3).value;
      const double dzy = measure_distance(m[2], m[1], 3).value;
      if (dxy != dyx) ++violations;
      if (dxy > dxz + dzy + 1e-12) ++violations;
      if (measure_distance(m[0], m[0], 3).value != 0.0) ++violations;
      // Identity of indiscernibles on tables: distance 0 forces equality.
      if (dxy == 0.0) {
        bool equal = true;
        for (std::uint32_t n = 1; n <= 3; ++n)
          for (std::size_t d = 0; d < m[0].row_size(n); ++d)
            if (m[0].at(n, d) != m[1].at(n, d)) equal = false;
        if (!equal) ++violations;
      }
    }
    report(10, violations == 0, "distance is a pseudometric on cylinder tables",
           std::to_string(violations) + " violations over 1000 triples");
  }

  std::printf("acceptance: %d of 10 criteria failed (%.1fs)\n", failures, elapsed());
  return failures == 0 ? 0 : 1;
}
