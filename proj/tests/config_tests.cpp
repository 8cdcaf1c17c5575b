#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "forge/artifacts.hpp"
#include "forge/config.hpp"
#include "helpers.hpp"

using namespace forge;
using namespace forge::testutil;
namespace fs = std::filesystem;

TEST_CASE("run config parsing") {
  RunConfig cfg = small_run_config();
  CHECK(cfg.schedule.N == 2);
  CHECK(cfg.schedule.M == 6);
  CHECK(cfg.schedule.eps.c == doctest::Approx(0.225));
  CHECK(cfg.schedule.rule == JumpRule::b_prime);
  REQUIRE(cfg.schedule.r.size() == 1);
  CHECK(cfg.schedule.r[0] == doctest::Approx(1.5));
  CHECK(cfg.schedule.desk_jumps.at(6) == 2);
  CHECK(cfg.schedule.desk_ue.at(1).p == 1);
  CHECK(cfg.schedule.caps.max_family == 400);
  CHECK(cfg.seed == 42);
  CHECK(!cfg.faithful);
  CHECK(cfg.window_at(1) == 1);  // default window schedule
}

TEST_CASE("config rejects malformed input") {
  CHECK_THROWS_AS(parse_run_config("not json"), ConfigError);
  CHECK_THROWS_AS(parse_run_config(R"({"M": 6})"), ConfigError);          // missing N
  CHECK_THROWS_AS(parse_run_config(R"({"N": 1, "M": 6})"), ConfigError);  // N too small
  CHECK_THROWS_AS(parse_run_config(R"({"N": 2, "M": 6, "bogus": 1})"), ConfigError);
  CHECK_THROWS_AS(parse_run_config(R"({"N": 2, "M": 6, "mode": "fast"})"), ConfigError);
  CHECK_THROWS_AS(parse_run_config(R"({"N": 2, "M": 6, "c_eps": -0.1})"), ConfigError);
  CHECK_THROWS_AS(
      parse_run_config(R"({"N": 2, "M": 6, "code_windows": {"1": 2, "5": 1}})"),
      ConfigError);  // decreasing window schedule
}

TEST_CASE("canonical config hash is stable and field-sensitive") {
  RunConfig a = small_run_config();
  RunConfig b = small_run_config();
  CHECK(config_hash(a) == config_hash(b));
  b.seed = 43;
  CHECK(config_hash(a) != config_hash(b));
  // Thread count must not affect identity.
  RunConfig c = small_run_config();
  c.threads = 8;
  CHECK(config_hash(a) == config_hash(c));
}

TEST_CASE("window schedule lookup") {
  RunConfig cfg = small_run_config();
  cfg.code_windows = {{1, 1}, {3, 2}};
  CHECK(cfg.window_at(1) == 1);
  CHECK(cfg.window_at(2) == 1);
  CHECK(cfg.window_at(3) == 2);
  CHECK(cfg.window_at(7) == 2);
}

TEST_CASE("level artifacts round trip") {
  const std::string dir = "/tmp/forge_artifact_test";
  fs::remove_all(dir);
  RunConfig rc = small_run_config();
  Schedule sched = build_schedule(rc.schedule);
  TestSequence y = mobius(1000);
  CodeFamily F = enumerate_codes(2, 1);
  F.step = 1;
  FamilyLevel root = make_root_level(2);
  FamilyLevel l1 = build_level_R(root, sched, y, F, 1, {42, 1});

  const std::uint64_t hash = config_hash(rc);
  save_config_artifact(dir, rc);
  save_level(dir, root, hash);
  save_level(dir, l1, hash);

  RunConfig back = load_config_artifact(dir);
  CHECK(config_hash(back) == hash);

  auto levels = load_levels(dir, 2, hash);
  REQUIRE(levels.size() == 2);
  CHECK(levels[1].k == 1);
  CHECK(levels[1].block_len == l1.block_len);
  REQUIRE(levels[1].blocks.size() == l1.blocks.size());
  for (std::size_t i = 0; i < l1.blocks.size(); ++i)
    CHECK(levels[1].blocks[i] == l1.blocks[i]);
  CHECK(levels[1].gamma.exact == l1.gamma.exact);

  SUBCASE("mismatched fingerprint is refused") {
    CHECK_THROWS_AS(load_levels(dir, 2, hash + 1), VerificationError);
  }
  SUBCASE("tampered blocks are caught by the verifier") {
    // Flip one digit in the stored level.
    const std::string blocks_path = dir + std::string("/level_1/blocks.txt");
    std::ifstream in(blocks_path);
    std::string text((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
    in.close();
    text[0] = text[0] == '0' ? '1' : '0';
    std::ofstream out(blocks_path, std::ios::trunc);
    out << text;
    out.close();
    auto tampered = load_levels(dir, 2, hash);
    // Either the block count/length checks or the re-verification must
    // notice; at level 1 with a loose bound the duplicate check fires.
    VerifyReport rep = verify_construction(tampered, sched, y, {F});
    CHECK(!rep.ok);
  }
  fs::remove_all(dir);
}
