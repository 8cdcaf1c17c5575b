#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "forge/artifacts.hpp"
#include "forge/config.hpp"
#include "forge/hierarchy.hpp"
#include "forge/measure.hpp"
#include "forge/rng.hpp"
#include "forge/verify.hpp"

namespace fs = std::filesystem;
using namespace forge;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitConstruction = 3;
constexpr int kExitVerification = 4;

void print_check(const CheckRecord& c) {
  std::printf("  [%s] %-40s lhs=%-14.6g rhs=%-14.6g%s%s\n", c.holds ? "ok" : "FAIL",
              c.name.c_str(), c.lhs, c.rhs, c.note.empty() ? "" : "  -- ",
              c.note.c_str());
}

std::vector<CodeFamily> families_for(const RunConfig& cfg, std::uint64_t max_k) {
  std::vector<CodeFamily> fams;
  for (std::uint64_t k = 1; k <= max_k; ++k) {
    CodeFamily f = enumerate_codes(cfg.schedule.N, cfg.window_at(k));
    f.step = static_cast<int>(k);
    fams.push_back(std::move(f));
  }
  return fams;
}

int cmd_schedule(const RunConfig& cfg, const std::string& out) {
  Schedule schedule = build_schedule(cfg.schedule);
  ValidationReport report = schedule.validate(!cfg.faithful);
  std::printf("schedule: horizon %llu, %zu jump entries, %zu UE levels\n",
              static_cast<unsigned long long>(schedule.horizon), schedule.jumps.size(),
              schedule.ue_levels.size());
  for (const auto& [m, K] : schedule.jumps)
    std::printf("  K_%llu = %llu\n", static_cast<unsigned long long>(m),
                static_cast<unsigned long long>(K));
  for (const auto& u : schedule.ue_levels)
    std::printf("  ue j=%d: r=%g n=%u theta=%g beta=%g p=%llu m=%llu K=%llu%s\n", u.j,
                u.r, u.n, u.theta, u.beta, static_cast<unsigned long long>(u.p),
                static_cast<unsigned long long>(u.m),
                static_cast<unsigned long long>(u.K), u.overridden ? " (override)" : "");
  for (const auto& c : report.checks) print_check(c);
  if (!out.empty()) {
    save_config_artifact(out, cfg);
    save_schedule_artifact(out, schedule, report, config_hash(cfg));
  }
  if (!report.gating_ok()) {
    std::fprintf(stderr, "schedule: gating validation failed\n");
    return kExitConfig;
  }
  return kExitOk;
}

int cmd_build(const RunConfig& cfg, const std::string& out) {
  if (out.empty()) throw ConfigError("build: --out is required");
  Schedule schedule = build_schedule(cfg.schedule);
  ValidationReport report = schedule.validate(!cfg.faithful);
  if (!report.gating_ok())
    throw ConfigError("build: schedule fails gating validation; run 'forge schedule'");
  const std::uint64_t hash = config_hash(cfg);
  save_config_artifact(out, cfg);
  save_schedule_artifact(out, schedule, report, hash);

  TestSequence y = make_sequence(cfg.sequence);
  std::vector<FamilyLevel> levels = load_levels(out, cfg.schedule.N, hash);
  if (levels.empty()) {
    levels.push_back(make_root_level(cfg.schedule.N));
    save_level(out, levels.back(), hash);
  }
  std::printf("build: resuming with %zu level(s) present\n", levels.size());

  BuildOptions opts{cfg.seed, cfg.threads};
  const std::uint64_t top =
      std::min<std::uint64_t>(cfg.schedule.caps.max_level, schedule.horizon);
  for (std::uint64_t k = levels.size(); k <= top; ++k) {
    CodeFamily F = enumerate_codes(cfg.schedule.N, cfg.window_at(k));
    F.step = static_cast<int>(k);
    FamilyLevel lvl;
    if (auto ue = schedule.ue_at_step(k)) {
      if (ue->p >= levels.size())
        throw ConstructionError("build: UE reference level p is not built yet");
      lvl = build_level_F(levels[k - 1], schedule, *ue, levels[ue->p], y, F, k, opts);
    } else {
      lvl = build_level_R(levels[k - 1], schedule, y, F, k, opts);
    }
    std::printf("build: level %llu: %zu blocks, N_k=%llu, gamma=%.6g (%s)\n",
                static_cast<unsigned long long>(k), lvl.blocks.size(),
                static_cast<unsigned long long>(lvl.block_len), lvl.gamma.value(),
                lvl.gamma.mode == BuildMode::exhaustive ? "exhaustive" : "sampled");
    save_level(out, lvl, hash);
    levels.push_back(std::move(lvl));
  }
  return kExitOk;
}

int cmd_verify(const std::string& dir, const std::string& checks_arg, bool faithful,
               std::uint64_t seed) {
  RunConfig cfg = load_config_artifact(dir);
  const std::uint64_t hash = config_hash(cfg);
  Schedule schedule = build_schedule(cfg.schedule);
  std::vector<FamilyLevel> levels = load_levels(dir, cfg.schedule.N, hash);
  if (levels.empty()) throw VerificationError("verify: no levels in " + dir);
  TestSequence y = make_sequence(cfg.sequence);

  std::set<std::string> checks;
  {
    std::stringstream ss(checks_arg);
    std::string item;
    while (std::getline(ss, item, ',')) checks.insert(item);
  }
  auto enabled = [&](const std::string& c) { return checks.contains(c); };

  AggregateReport agg;
  if (enabled("reverify") || enabled("gamma")) {
    agg.verify =
        verify_construction(levels, schedule, y, families_for(cfg, levels.back().k));
    std::printf("verify: %llu level(s), %llu block(s), %zu issue(s)\n",
                static_cast<unsigned long long>(agg.verify.levels_checked),
                static_cast<unsigned long long>(agg.verify.blocks_checked),
                agg.verify.issues.size());
    for (const auto& i : agg.verify.issues)
      std::printf("  issue: level %llu block %zu: %s\n",
                  static_cast<unsigned long long>(i.level), i.block_index,
                  i.what.c_str());
    if (enabled("gamma"))
      for (const auto& c : agg.verify.checks) print_check(c);
  }
  if (enabled("entropy")) {
    agg.entropy = entropy_report(levels, schedule);
    for (const auto& e : agg.entropy.levels)
      std::printf("  h(level %llu) = %.8f (telescoped %.8f)%s\n",
                  static_cast<unsigned long long>(e.k), e.h, e.telescoped,
                  e.exact ? "" : " [estimate]");
    for (const auto& c : agg.entropy.checks) print_check(c);
  }
  if (enabled("spread") || enabled("diameter")) {
    for (const UELevel& ue : schedule.ue_levels) {
      if (ue.K >= levels.size()) continue;
      const FamilyLevel& lvl = levels[ue.K];
      if (enabled("diameter")) {
        DiameterReport rep = diameter_report(lvl, ue, 50, derive_seed(seed, 1000 + ue.j));
        std::printf("  diameter j=%d: max distance %.6g (+tail %.6g) vs r=%g\n", ue.j,
                    rep.max_distance, rep.tail_bound, rep.r_target);
        for (const auto& c : rep.checks) {
          print_check(c);
          agg.extra.push_back(c);
        }
      } else {
        FreqSpread sp = freq_spread(lvl, ue.n);
        CheckRecord c{"freq_spread(j=" + std::to_string(ue.j) + ")", sp.max_spread,
                      ue.theta, sp.max_spread <= ue.theta, false, sp.note};
        print_check(c);
        agg.extra.push_back(c);
      }
    }
  }
  if (enabled("uncorrelation")) {
    const FamilyLevel& top = levels.back();
    const auto fams = families_for(cfg, top.k);
    const CodeFamily& F = fams.back();
    std::vector<std::size_t> n_list{top.block_len, 2 * top.block_len, 4 * top.block_len};
    const std::size_t need = *std::max_element(n_list.begin(), n_list.end()) + 4;
    bool all_ok = true;
    for (int s = 0; s < 5; ++s) {
      Block x = sample_point(top, need, derive_seed(seed, 2000 + s));
      for (const Code& f : F.codes) {
        auto rep = uncorrelation_check(x, y, f, n_list, schedule, fams);
        if (!rep.all_applicable_hold()) all_ok = false;
        for (const auto& e : rep.entries)
          if (e.applicable)
            agg.extra.push_back({"uncorrelation(sample=" + std::to_string(s) +
                                     ",code=" + std::to_string(f.id()) +
                                     ",n=" + std::to_string(e.n) + ")",
                                 std::fabs(e.a_n), e.bound, e.holds, false, e.note});
      }
    }
    std::printf("  uncorrelation sweep: %s\n", all_ok ? "all bounds hold" : "VIOLATION");
  }

  agg.gating_ok = agg.verify.ok;
  if (faithful)
    for (const auto& c : agg.extra)
      if (!c.holds) agg.gating_ok = false;
  save_verify_report(dir, agg);
  if (!agg.gating_ok) {
    std::fprintf(stderr, "verify: gating checks failed\n");
    return kExitVerification;
  }
  std::printf("verify: ok\n");
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"construction engine and verification lab for hierarchical subshifts"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  std::optional<std::uint64_t> seed_flag;
  std::optional<unsigned> threads_flag;
  std::optional<std::string> mode_flag;

  auto add_common = [&](CLI::App* cmd, bool need_config) {
    auto* c = cmd->add_option("--config", config_path, "config file (JSON)");
    if (need_config) c->required();
    cmd->add_option("--out", out_dir, "artifact directory");
    cmd->add_option("--seed", seed_flag, "override the config seed");
    cmd->add_option("--threads", threads_flag, "worker threads");
    cmd->add_option("--mode", mode_flag, "desk|faithful (overrides the config)")
        ->check(CLI::IsMember({"desk", "faithful"}));
  };

  auto* sched = app.add_subcommand("schedule", "derive and validate the parameter schedule");
  add_common(sched, true);
  auto* build = app.add_subcommand("build", "run the construction pipeline");
  add_common(build, true);

  auto* verify = app.add_subcommand("verify", "re-check a built artifact directory");
  verify->add_option("--out", out_dir, "artifact directory")->required();
  std::string checks = "reverify,gamma,entropy,spread,diameter,uncorrelation";
  verify->add_option("--checks", checks, "comma list of checks to run");
  std::uint64_t verify_seed = 0;
  verify->add_option("--seed", verify_seed, "seed for sampled diagnostics");
  verify->add_option("--mode", mode_flag, "desk|faithful")
      ->check(CLI::IsMember({"desk", "faithful"}));

  auto* seq = app.add_subcommand("seq", "sequence utilities");
  seq->require_subcommand(1);
  auto* seq_mob = seq->add_subcommand("mobius", "write a Mobius prefix to a file");
  std::size_t seq_n = 100000;
  std::string seq_out, seq_in;
  seq_mob->add_option("--n", seq_n, "prefix length");
  seq_mob->add_option("--out", seq_out, "output file")->required();
  auto* seq_ver = seq->add_subcommand("verify", "aperiodicity screen for a sequence");
  std::size_t t_max = 10;
  double tol = 0.05;
  seq_ver->add_option("--input", seq_in, "sequence file (one value per line)");
  seq_ver->add_option("--n", seq_n, "Mobius prefix length when no input file is given");
  seq_ver->add_option("--t-max", t_max, "largest progression step");
  seq_ver->add_option("--tol", tol, "flag averages above this magnitude");

  CLI11_PARSE(app, argc, argv);

  try {
    if (seq_mob->parsed()) {
      save_sequence(mobius(seq_n), seq_out);
      std::printf("seq: wrote %zu values to %s\n", seq_n, seq_out.c_str());
      return kExitOk;
    }
    if (seq_ver->parsed()) {
      TestSequence y = seq_in.empty() ? mobius(seq_n) : load_sequence(seq_in);
      auto rep = verify_aperiodic(y, t_max, tol);
      std::printf("seq verify: %zu triples, worst |average| %.6g at (t=%zu,l=%zu) [%s]\n",
                  rep.evaluated.size(), rep.max_abs_average, rep.worst.t, rep.worst.l,
                  AperiodicityReport::kCaveat);
      for (const auto& f : rep.flagged)
        std::printf("  flagged: t=%zu l=%zu n=%zu average=%.6g\n", f.t, f.l, f.n,
                    f.average);
      return rep.flagged.empty() ? kExitOk : kExitVerification;
    }

    if (verify->parsed()) {
      const bool faithful = mode_flag.value_or("desk") == "faithful";
      return cmd_verify(out_dir, checks, faithful, verify_seed);
    }

    RunConfig cfg = load_run_config(config_path);
    if (seed_flag) cfg.seed = *seed_flag;
    if (threads_flag) cfg.threads = *threads_flag;
    if (mode_flag) cfg.faithful = *mode_flag == "faithful";
    if (sched->parsed()) return cmd_schedule(cfg, out_dir);
    if (build->parsed()) return cmd_build(cfg, out_dir);
    return kExitConfig;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitConfig;
  } catch (const ConstructionError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitConstruction;
  } catch (const VerificationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitVerification;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitConfig;
  }
}
