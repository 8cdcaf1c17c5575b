#include "forge/verify.hpp"

#include <cmath>
#include <sstream>

namespace forge {

namespace {

std::uint64_t ipow(std::uint64_t base, std::uint32_t exp) {
  std::uint64_t r = 1;
  while (exp--) r *= base;
  return r;
}

void issue(VerifyReport& rep, std::uint64_t level, std::size_t block_index,
           std::string what) {
  rep.ok = false;
  rep.issues.push_back({level, block_index, std::move(what)});
}

// Plain per-position correlation scan; no incremental window index, no
// partial-sum reuse.
bool naive_correlation_ok(const Block& B, const TestSequence& y, const CodeFamily& F,
                          double bound, std::uint64_t m, std::uint64_t N_k,
                          std::string* why) {
  const auto syms = B.unpack();
  const std::uint64_t j_max = (m * m - 1) * N_k;
  for (const Code& f : F.codes) {
    const std::size_t len = N_k - f.window() + 1;
    for (std::uint64_t j = 1; j <= j_max; ++j) {
      double sum = 0.0;
      for (std::size_t i = 0; i < len; ++i) {
        std::span<const std::uint8_t> window(syms.data() + i, f.window());
        sum += f.eval(window) * y.at(j + i);
      }
      const double corr = sum / static_cast<double>(len);
      if (!(std::fabs(corr) < bound)) {
        if (why) {
          std::ostringstream msg;
          msg << "correlation " << corr << " at window j=" << j << ", code id "
              << f.id() << " (bound " << bound << ")";
          *why = msg.str();
        }
        return false;
      }
    }
  }
  return true;
}

std::vector<Block> cut(const Block& B, std::uint64_t piece_len) {
  const auto syms = B.unpack();
  std::vector<Block> pieces;
  for (std::size_t i = 0; i + piece_len <= syms.size(); i += piece_len) {
    std::vector<std::uint8_t> chunk(syms.begin() + i, syms.begin() + i + piece_len);
    pieces.push_back(Block(chunk, B.alphabet_size()));
  }
  return pieces;
}

Block decode_short(std::uint64_t packed, std::uint32_t n, std::uint32_t N) {
  std::vector<std::uint8_t> digits(n);
  for (std::uint32_t i = n; i-- > 0;) {
    digits[i] = static_cast<std::uint8_t>(packed % N);
    packed /= N;
  }
  return Block(digits, N);
}

const CodeFamily* family_for(const std::vector<CodeFamily>& families, std::uint64_t k) {
  for (const CodeFamily& f : families)
    if (f.step == static_cast<int>(k)) return &f;
  if (families.size() == 1) return &families.front();
  return nullptr;
}

}  // namespace

VerifyReport verify_construction(const std::vector<FamilyLevel>& levels,
                                 const Schedule& schedule, const TestSequence& y,
                                 const std::vector<CodeFamily>& code_families) {
  VerifyReport rep;
  if (levels.empty()) {
    issue(rep, 0, 0, "no levels to verify");
    return rep;
  }
  if (levels.front().k != 0)
    issue(rep, levels.front().k, 0, "first stored level is not the root (k=0)");

  for (std::size_t li = 1; li < levels.size(); ++li) {
    const FamilyLevel& lvl = levels[li];
    const FamilyLevel& parent = levels[li - 1];
    const std::uint64_t k = lvl.k;
    ++rep.levels_checked;

    if (k != parent.k + 1)
      issue(rep, k, 0, "level index is not the parent's successor");
    const std::uint64_t m = schedule.multiplier(k);
    if (lvl.multiplier != m)
      issue(rep, k, 0, "stored multiplier disagrees with the schedule");
    if (lvl.block_len != parent.block_len * m)
      issue(rep, k, 0, "block length is not multiplier * parent length");
    if (lvl.blocks.empty()) issue(rep, k, 0, "empty family");
    if (lvl.alphabet != parent.alphabet) issue(rep, k, 0, "alphabet mismatch");

    const CodeFamily* F = family_for(code_families, k);
    if (!F) {
      issue(rep, k, 0, "no code family supplied for this step");
      continue;
    }
    const double bound = schedule.correlation_bound(k);
    const auto parent_set = parent.block_set();

    // Bernstein context, when this level claims it.
    const FamilyLevel* reference = nullptr;
    std::optional<UELevel> ue;
    std::vector<double> xbar;
    std::uint64_t table = 0;
    if (lvl.bernstein_tested) {
      ue = schedule.ue_at_step(k);
      if (!ue) {
        issue(rep, k, 0, "level claims a Bernstein step but the schedule has none here");
      } else {
        for (const FamilyLevel& cand : levels)
          if (cand.k == ue->p) reference = &cand;
        if (!reference) {
          issue(rep, k, 0, "reference level at p is not among the stored levels");
        } else {
          table = ipow(lvl.alphabet, ue->n);
          xbar.assign(table, 0.0);
          for (std::uint64_t d = 0; d < table; ++d) {
            const Block D = decode_short(d, ue->n, lvl.alphabet);
            for (const Block& b : reference->blocks)
              xbar[d] += freq(b, D).value();
            xbar[d] /= static_cast<double>(reference->blocks.size());
          }
          if (lvl.stats) {
            const double want = std::sqrt(8.0 * ue->beta);
            if (std::fabs(lvl.stats->threshold - want) > 1e-12)
              issue(rep, k, 0, "stored Bernstein threshold is not sqrt(8 beta)");
            if (lvl.stats->xbar.size() != table) {
              issue(rep, k, 0, "stored frequency profile has the wrong size");
            } else {
              for (std::uint64_t d = 0; d < table; ++d)
                if (std::fabs(lvl.stats->xbar[d] - xbar[d]) > 1e-9) {
                  issue(rep, k, 0, "stored frequency profile disagrees with recomputation");
                  break;
                }
            }
          }
        }
      }
    }

    std::unordered_set<Block, BlockHash> seen;
    for (std::size_t bi = 0; bi < lvl.blocks.size(); ++bi) {
      const Block& B = lvl.blocks[bi];
      ++rep.blocks_checked;
      if (B.size() != lvl.block_len) {
        issue(rep, k, bi, "block has the wrong length");
        continue;
      }
      if (lvl.gamma.mode == BuildMode::exhaustive && !seen.insert(B).second)
        issue(rep, k, bi, "duplicate block in an exhaustive family");

      // Nesting: the block must cut into parent-family members.
      for (const Block& piece : cut(B, parent.block_len))
        if (!parent_set.contains(piece)) {
          issue(rep, k, bi, "nesting violated: a parent-length piece is not in G_{k-1}");
          break;
        }

      std::string why;
      if (!naive_correlation_ok(B, y, *F, bound, m, lvl.block_len, &why))
        issue(rep, k, bi, "correlation test fails on re-check: " + why);

      if (lvl.bernstein_tested && reference && ue) {
        if (lvl.block_len % reference->block_len != 0) {
          issue(rep, k, bi, "reference block length does not divide N_k");
        } else {
          const auto pieces = cut(B, reference->block_len);
          const auto ref_set = reference->block_set();
          const double q = static_cast<double>(pieces.size());
          bool member_ok = true;
          for (const Block& piece : pieces)
            if (!ref_set.contains(piece)) {
              issue(rep, k, bi, "nesting violated at the reference level");
              member_ok = false;
              break;
            }
          if (member_ok) {
            const double threshold = std::sqrt(8.0 * ue->beta);
            for (std::uint64_t d = 0; d < table; ++d) {
              const Block D = decode_short(d, ue->n, lvl.alphabet);
              double avg = 0.0;
              for (const Block& piece : pieces) avg += freq(piece, D).value();
              avg /= q;
              if (std::fabs(avg - xbar[d]) > threshold) {
                issue(rep, k, bi, "Bernstein test fails on re-check for D=" + D.to_digits());
                break;
              }
            }
          }
        }
      }
    }

    // Bookkeeping on the recorded acceptance ratio.
    if (lvl.gamma.passers != lvl.blocks.size())
      issue(rep, k, 0, "recorded passer count disagrees with the family size");
    if (lvl.gamma.draws < lvl.gamma.passers)
      issue(rep, k, 0, "recorded draws below the passer count");
    if (lvl.gamma.mode == BuildMode::exhaustive) {
      const Rational want(static_cast<long long>(lvl.gamma.passers),
                          static_cast<long long>(lvl.gamma.draws));
      if (!(lvl.gamma.exact == want))
        issue(rep, k, 0, "exact gamma is not passers/draws");
      const std::uint64_t space = [&] {
        std::uint64_t r = 1;
        for (std::uint64_t i = 0; i < m; ++i) {
          if (r > UINT64_MAX / parent.blocks.size()) return UINT64_MAX;
          r *= parent.blocks.size();
        }
        return r;
      }();
      if (lvl.gamma.draws != space)
        issue(rep, k, 0, "exhaustive draw count is not (#parent)^m");
    }
  }

  for (const auto& c : check_gamma_chain(levels, schedule).checks) rep.checks.push_back(c);
  return rep;
}

}  // namespace forge
