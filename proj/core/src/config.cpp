#include "forge/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace forge {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& field, const std::string& why) {
  throw ConfigError("config: field '" + field + "': " + why);
}

void expect_known_fields(const json& obj, const std::set<std::string>& known,
                         const std::string& where) {
  for (const auto& [key, _] : obj.items())
    if (!known.contains(key)) bad(where.empty() ? key : where + "." + key, "unknown field");
}

double positive(const json& v, const std::string& field) {
  if (!v.is_number()) bad(field, "must be a number");
  const double d = v.get<double>();
  if (!(d > 0.0)) bad(field, "must be positive");
  return d;
}

std::uint64_t positive_int(const json& v, const std::string& field) {
  if (!v.is_number_unsigned() && !v.is_number_integer()) bad(field, "must be an integer");
  const std::int64_t d = v.get<std::int64_t>();
  if (d <= 0) bad(field, "must be positive");
  return static_cast<std::uint64_t>(d);
}

}  // namespace

std::uint32_t RunConfig::window_at(std::uint64_t k) const {
  std::uint32_t w = 1;
  for (const auto& [from, win] : code_windows)
    if (from <= k) w = win;
  return w;
}

RunConfig parse_run_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("config: top level must be an object");
  expect_known_fields(root,
                      {"N", "M", "alpha", "c_eps", "c_delta", "eps_rule", "jump_rule",
                       "r", "desk_jumps", "desk_ue", "caps", "sequence", "code_windows",
                       "seed", "threads", "mode"},
                      "");

  RunConfig cfg;
  auto& sc = cfg.schedule;

  if (!root.contains("N")) bad("N", "required");
  sc.N = static_cast<std::uint32_t>(positive_int(root["N"], "N"));
  if (sc.N < 2) bad("N", "alphabet must have at least 2 symbols");
  if (!root.contains("M")) bad("M", "required");
  sc.M = static_cast<std::uint32_t>(positive_int(root["M"], "M"));
  if (sc.M < 2) bad("M", "must be at least 2");

  if (root.contains("alpha")) {
    const json& a = root["alpha"];
    if (a.is_string()) {
      const std::string s = a.get<std::string>();
      if (s.rfind("const:", 0) != 0) bad("alpha", "string form must be 'const:<value>'");
      try {
        sc.alpha_const = std::stod(s.substr(6));
      } catch (const std::exception&) {
        bad("alpha", "unparsable constant");
      }
      if (!(sc.alpha_const > 0.0)) bad("alpha", "constant must be positive");
    } else if (a.is_object()) {
      for (const auto& [key, v] : a.items()) {
        std::uint64_t m = 0;
        try {
          m = std::stoull(key);
        } catch (const std::exception&) {
          bad("alpha", "table keys must be integers (m values)");
        }
        sc.alpha_table[m] = positive(v, "alpha[" + key + "]");
      }
    } else {
      bad("alpha", "must be 'const:<v>' or a table");
    }
  }

  DecayRule::Kind kind = DecayRule::Kind::inv_log;
  if (root.contains("eps_rule")) {
    const std::string s = root["eps_rule"].get<std::string>();
    if (s == "inv_log")
      kind = DecayRule::Kind::inv_log;
    else if (s == "log3_log")
      kind = DecayRule::Kind::log3_log;
    else
      bad("eps_rule", "must be 'inv_log' or 'log3_log'");
  }
  sc.eps.kind = sc.delta.kind = kind;
  if (root.contains("c_eps")) sc.eps.c = positive(root["c_eps"], "c_eps");
  if (root.contains("c_delta")) sc.delta.c = positive(root["c_delta"], "c_delta");

  if (root.contains("jump_rule")) {
    const std::string s = root["jump_rule"].get<std::string>();
    if (s == "b")
      sc.rule = JumpRule::b;
    else if (s == "b_prime")
      sc.rule = JumpRule::b_prime;
    else
      bad("jump_rule", "must be 'b' or 'b_prime'");
  }

  if (root.contains("r")) {
    if (!root["r"].is_array()) bad("r", "must be a list of target diameters");
    for (std::size_t i = 0; i < root["r"].size(); ++i)
      sc.r.push_back(positive(root["r"][i], "r[" + std::to_string(i) + "]"));
  }

  if (root.contains("desk_jumps")) {
    for (const auto& [key, v] : root["desk_jumps"].items()) {
      std::uint64_t m = 0;
      try {
        m = std::stoull(key);
      } catch (const std::exception&) {
        bad("desk_jumps", "keys must be integers (m values)");
      }
      sc.desk_jumps[m] = positive_int(v, "desk_jumps[" + key + "]");
    }
  }

  if (root.contains("desk_ue")) {
    for (const auto& [key, v] : root["desk_ue"].items()) {
      int j = 0;
      try {
        j = std::stoi(key);
      } catch (const std::exception&) {
        bad("desk_ue", "keys must be integers (j values)");
      }
      const std::string where = "desk_ue[" + key + "]";
      if (!v.is_object() || !v.contains("p") || !v.contains("K"))
        bad(where, "must be an object with fields p and K");
      expect_known_fields(v, {"p", "K"}, where);
      sc.desk_ue[j] = {positive_int(v["p"], where + ".p"), positive_int(v["K"], where + ".K")};
    }
  }

  if (root.contains("caps")) {
    const json& c = root["caps"];
    expect_known_fields(c, {"max_level", "max_family", "max_candidates"}, "caps");
    if (c.contains("max_level")) sc.caps.max_level = positive_int(c["max_level"], "caps.max_level");
    if (c.contains("max_family"))
      sc.caps.max_family = positive_int(c["max_family"], "caps.max_family");
    if (c.contains("max_candidates"))
      sc.caps.max_candidates = positive_int(c["max_candidates"], "caps.max_candidates");
  }

  if (root.contains("sequence")) {
    const json& s = root["sequence"];
    expect_known_fields(s, {"source", "length", "path", "seed"}, "sequence");
    const std::string src = s.value("source", "mobius");
    if (src == "mobius")
      cfg.sequence.kind = SequenceSpec::Kind::mobius;
    else if (src == "file")
      cfg.sequence.kind = SequenceSpec::Kind::file;
    else if (src == "synthetic")
      cfg.sequence.kind = SequenceSpec::Kind::synthetic;
    else
      bad("sequence.source", "must be 'mobius', 'file' or 'synthetic'");
    if (s.contains("length"))
      cfg.sequence.length = positive_int(s["length"], "sequence.length");
    if (s.contains("path")) cfg.sequence.path = s["path"].get<std::string>();
    if (s.contains("seed")) cfg.sequence.noise_seed = s["seed"].get<std::uint64_t>();
    if (cfg.sequence.kind == SequenceSpec::Kind::file && cfg.sequence.path.empty())
      bad("sequence.path", "required for a file source");
  }

  if (root.contains("code_windows")) {
    for (const auto& [key, v] : root["code_windows"].items()) {
      std::uint64_t k = 0;
      try {
        k = std::stoull(key);
      } catch (const std::exception&) {
        bad("code_windows", "keys must be integers (step values)");
      }
      cfg.code_windows[k] =
          static_cast<std::uint32_t>(positive_int(v, "code_windows[" + key + "]"));
    }
    // Nondecreasing window schedule.
    std::uint32_t prev = 0;
    for (const auto& [k, w] : cfg.code_windows) {
      if (w < prev) bad("code_windows", "window schedule must be nondecreasing");
      prev = w;
    }
  }

  if (root.contains("seed")) cfg.seed = root["seed"].get<std::uint64_t>();
  if (root.contains("threads"))
    cfg.threads = static_cast<unsigned>(positive_int(root["threads"], "threads"));
  if (root.contains("mode")) {
    const std::string s = root["mode"].get<std::string>();
    if (s == "desk")
      cfg.faithful = false;
    else if (s == "faithful")
      cfg.faithful = true;
    else
      bad("mode", "must be 'desk' or 'faithful'");
  }
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_run_config(ss.str());
}

std::string canonical_config(const RunConfig& config) {
  json root;  // nlohmann::json keeps object keys sorted
  const auto& sc = config.schedule;
  root["N"] = sc.N;
  root["M"] = sc.M;
  if (sc.alpha_table.empty()) {
    root["alpha"] = "const:" + std::to_string(sc.alpha_const);
  } else {
    json t;
    for (const auto& [m, v] : sc.alpha_table) t[std::to_string(m)] = v;
    root["alpha"] = t;
  }
  root["eps_rule"] = sc.eps.kind == DecayRule::Kind::inv_log ? "inv_log" : "log3_log";
  root["c_eps"] = sc.eps.c;
  root["c_delta"] = sc.delta.c;
  root["jump_rule"] = sc.rule == JumpRule::b ? "b" : "b_prime";
  root["r"] = sc.r;
  {
    json t = json::object();
    for (const auto& [m, K] : sc.desk_jumps) t[std::to_string(m)] = K;
    root["desk_jumps"] = t;
  }
  {
    json t = json::object();
    for (const auto& [j, ov] : sc.desk_ue)
      t[std::to_string(j)] = json{{"K", ov.K}, {"p", ov.p}};
    root["desk_ue"] = t;
  }
  root["caps"] = json{{"max_candidates", sc.caps.max_candidates},
                      {"max_family", sc.caps.max_family},
                      {"max_level", sc.caps.max_level}};
  const char* src = config.sequence.kind == SequenceSpec::Kind::mobius ? "mobius"
                    : config.sequence.kind == SequenceSpec::Kind::file ? "file"
                                                                       : "synthetic";
  root["sequence"] = json{{"length", config.sequence.length},
                          {"path", config.sequence.path},
                          {"seed", config.sequence.noise_seed},
                          {"source", src}};
  {
    json t = json::object();
    for (const auto& [k, w] : config.code_windows) t[std::to_string(k)] = w;
    root["code_windows"] = t;
  }
  root["seed"] = config.seed;
  root["mode"] = config.faithful ? "faithful" : "desk";
  // threads deliberately excluded: results are thread-count independent.
  return root.dump();
}

std::uint64_t config_hash(const RunConfig& config) {
  return fnv1a(canonical_config(config));
}

TestSequence make_sequence(const SequenceSpec& spec) {
  switch (spec.kind) {
    case SequenceSpec::Kind::mobius:
      return mobius(spec.length);
    case SequenceSpec::Kind::file:
      return load_sequence(spec.path);
    case SequenceSpec::Kind::synthetic:
      return synthetic_pm1(spec.noise_seed, spec.length);
  }
  throw ConfigError("config: unreachable sequence kind");
}

}  // namespace forge
