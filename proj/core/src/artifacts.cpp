#include "forge/artifacts.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace forge {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void write_text(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("artifacts: cannot write " + path.string());
  out << text;
  if (!out) throw Error("artifacts: write failed for " + path.string());
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("artifacts: cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json check_to_json(const CheckRecord& c) {
  return json{{"gating", c.gating}, {"holds", c.holds},     {"lhs", c.lhs},
              {"name", c.name},     {"note", c.note},       {"rhs", c.rhs}};
}

json gamma_to_json(const GammaInfo& g) {
  json out{{"ci_high", g.ci_high},
           {"ci_low", g.ci_low},
           {"draws", g.draws},
           {"estimate", g.estimate},
           {"mode", g.mode == BuildMode::exhaustive ? "exhaustive" : "sampled"},
           {"passers", g.passers}};
  if (g.mode == BuildMode::exhaustive) {
    out["num"] = g.exact.num();
    out["den"] = g.exact.den();
  }
  return out;
}

GammaInfo gamma_from_json(const json& j) {
  GammaInfo g;
  g.mode = j.at("mode").get<std::string>() == "exhaustive" ? BuildMode::exhaustive
                                                           : BuildMode::sampled;
  g.estimate = j.at("estimate").get<double>();
  g.ci_low = j.at("ci_low").get<double>();
  g.ci_high = j.at("ci_high").get<double>();
  g.draws = j.at("draws").get<std::uint64_t>();
  g.passers = j.at("passers").get<std::uint64_t>();
  if (g.mode == BuildMode::exhaustive)
    g.exact = Rational(j.at("num").get<long long>(), j.at("den").get<long long>());
  return g;
}

}  // namespace

void save_config_artifact(const std::string& dir, const RunConfig& config) {
  const std::string canonical = canonical_config(config);
  json root{{"config", json::parse(canonical)}, {"hash", fnv1a(canonical)}};
  write_text(fs::path(dir) / "config.json", root.dump(2) + "\n");
}

RunConfig load_config_artifact(const std::string& dir) {
  const json root = json::parse(read_text(fs::path(dir) / "config.json"));
  const std::string canonical = root.at("config").dump();
  if (fnv1a(canonical) != root.at("hash").get<std::uint64_t>())
    throw VerificationError("artifacts: config fingerprint mismatch in " + dir);
  return parse_run_config(canonical);
}

void save_schedule_artifact(const std::string& dir, const Schedule& schedule,
                            const ValidationReport& report, std::uint64_t config_hash) {
  json jumps = json::object();
  for (const auto& [m, K] : schedule.jumps) jumps[std::to_string(m)] = K;
  json ue = json::array();
  for (const UELevel& u : schedule.ue_levels)
    ue.push_back(json{{"K", u.K},
                      {"beta", u.beta},
                      {"j", u.j},
                      {"m", u.m},
                      {"m_p", u.m_p},
                      {"n", u.n},
                      {"overridden", u.overridden},
                      {"p", u.p},
                      {"r", u.r},
                      {"theta", u.theta}});
  json checks = json::array();
  for (const auto& c : report.checks) checks.push_back(check_to_json(c));
  json root{{"config_hash", config_hash},
            {"horizon", schedule.horizon},
            {"jumps", jumps},
            {"ue_levels", ue},
            {"validation", checks}};
  write_text(fs::path(dir) / "schedule.json", root.dump(2) + "\n");
}

void save_level(const std::string& dir, const FamilyLevel& level,
                std::uint64_t config_hash) {
  const fs::path base = fs::path(dir) / ("level_" + std::to_string(level.k));
  json meta{{"N_k", level.block_len},
            {"bernstein_tested", level.bernstein_tested},
            {"config_hash", config_hash},
            {"count", level.blocks.size()},
            {"gamma", gamma_to_json(level.gamma)},
            {"k", level.k},
            {"m_k", level.multiplier},
            {"seed", level.seed}};
  if (level.stats) {
    meta["stats"] = json{{"n", level.stats->n},
                         {"p", level.stats->p},
                         {"threshold", level.stats->threshold},
                         {"xbar", level.stats->xbar}};
  }
  if (level.bernstein) {
    json bounds = json::array();
    for (const auto& c : level.bernstein->bounds) bounds.push_back(check_to_json(c));
    meta["bernstein"] = json{{"bounds", bounds},
                             {"gamma_bar", level.bernstein->gamma_bar},
                             {"p_fail_given_r", level.bernstein->p_fail_given_r},
                             {"q", level.bernstein->q}};
  }
  write_text(base / "meta.json", meta.dump(2) + "\n");
  std::string lines;
  for (const Block& b : level.blocks) lines += b.to_digits() + "\n";
  write_text(base / "blocks.txt", lines);
}

FamilyLevel load_level(const std::string& dir, std::uint32_t alphabet,
                       std::uint64_t expected_config_hash) {
  const fs::path base(dir);
  const json meta = json::parse(read_text(base / "meta.json"));
  if (meta.at("config_hash").get<std::uint64_t>() != expected_config_hash)
    throw VerificationError("artifacts: level in " + dir +
                            " was built from a different config (fingerprint mismatch)");
  FamilyLevel lvl;
  lvl.k = meta.at("k").get<std::uint64_t>();
  lvl.block_len = meta.at("N_k").get<std::uint64_t>();
  lvl.multiplier = meta.at("m_k").get<std::uint64_t>();
  lvl.alphabet = alphabet;
  lvl.seed = meta.at("seed").get<std::uint64_t>();
  lvl.gamma = gamma_from_json(meta.at("gamma"));
  lvl.bernstein_tested = meta.at("bernstein_tested").get<bool>();
  if (meta.contains("stats")) {
    BernsteinStats st;
    st.n = meta["stats"].at("n").get<std::uint32_t>();
    st.p = meta["stats"].at("p").get<std::uint64_t>();
    st.threshold = meta["stats"].at("threshold").get<double>();
    st.xbar = meta["stats"].at("xbar").get<std::vector<double>>();
    st.alphabet = alphabet;
    lvl.stats = st;
  }
  if (meta.contains("bernstein")) {
    BernsteinLevelReport rep;
    rep.gamma_bar = meta["bernstein"].at("gamma_bar").get<double>();
    rep.p_fail_given_r = meta["bernstein"].at("p_fail_given_r").get<double>();
    rep.q = meta["bernstein"].at("q").get<std::uint64_t>();
    for (const json& b : meta["bernstein"].at("bounds")) {
      CheckRecord c;
      c.name = b.at("name").get<std::string>();
      c.lhs = b.at("lhs").get<double>();
      c.rhs = b.at("rhs").get<double>();
      c.holds = b.at("holds").get<bool>();
      c.gating = b.at("gating").get<bool>();
      c.note = b.at("note").get<std::string>();
      rep.bounds.push_back(c);
    }
    lvl.bernstein = rep;
  }

  std::istringstream blocks(read_text(base / "blocks.txt"));
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(blocks, line)) {
    ++lineno;
    if (line.empty()) continue;
    Block b = Block::parse_digits(line, alphabet);
    if (b.size() != lvl.block_len)
      throw ParseError("artifacts: " + (base / "blocks.txt").string() + ":" +
                       std::to_string(lineno) + ": block length disagrees with meta");
    lvl.blocks.push_back(std::move(b));
  }
  if (lvl.blocks.size() != meta.at("count").get<std::size_t>())
    throw VerificationError("artifacts: block count in " + dir +
                            " disagrees with meta.json");
  return lvl;
}

std::vector<FamilyLevel> load_levels(const std::string& dir, std::uint32_t alphabet,
                                     std::uint64_t expected_config_hash) {
  std::vector<FamilyLevel> levels;
  for (std::uint64_t k = 0;; ++k) {
    const fs::path base = fs::path(dir) / ("level_" + std::to_string(k));
    if (!fs::exists(base / "meta.json")) break;
    levels.push_back(load_level(base.string(), alphabet, expected_config_hash));
  }
  return levels;
}

void save_verify_report(const std::string& dir, const AggregateReport& report) {
  json issues = json::array();
  for (const auto& i : report.verify.issues)
    issues.push_back(json{
        {"block", i.block_index}, {"level", i.level}, {"what", i.what}});
  json checks = json::array();
  for (const auto& c : report.verify.checks) checks.push_back(check_to_json(c));
  for (const auto& c : report.entropy.checks) checks.push_back(check_to_json(c));
  for (const auto& c : report.extra) checks.push_back(check_to_json(c));
  json entropy = json::array();
  for (const auto& e : report.entropy.levels)
    entropy.push_back(json{
        {"exact", e.exact}, {"h", e.h}, {"k", e.k}, {"telescoped", e.telescoped}});
  json root{{"blocks_checked", report.verify.blocks_checked},
            {"checks", checks},
            {"entropy", entropy},
            {"gating_ok", report.gating_ok},
            {"issues", issues},
            {"levels_checked", report.verify.levels_checked},
            {"reverify_ok", report.verify.ok}};
  write_text(fs::path(dir) / "verify_report.json", root.dump(2) + "\n");
}

}  // namespace forge
