#include <doctest.h>

#include <set>
#include <sstream>

#include "hrl/trainer.hpp"

using namespace hrl;

namespace {

RunConfig small(Mode mode, std::size_t total, std::uint64_t seed = 1) {
  RunConfig c;
  c.mode = mode;
  c.seed = seed;
  c.total_steps = total;
  return c;
}

SubgoalSet room_centered() {
  SubgoalSet g;
  g.centroids = {{0, {3, 3}}, {1, {9, 3}}, {2, {3, 9}}, {3, {9, 9}}};
  g.anomalies = {{{10, 2, true}, 10.0}, {{2, 10, true}, 20.0}};
  return g;
}

std::string metrics_text(const RunArtifacts& a) {
  std::ostringstream out;
  write_metrics_csv(out, a.metrics);
  return out.str();
}

}  // namespace

TEST_CASE("mode names") {
  for (Mode m : {Mode::RandomWalk, Mode::FlatQ, Mode::RandomMetaHrl, Mode::UnifiedHrl})
    CHECK(mode_from_string(to_string(m)) == m);
  CHECK(to_string(Mode::UnifiedHrl) == "unified_hrl");
  CHECK_THROWS_AS(mode_from_string("unified"), std::invalid_argument);
}

TEST_CASE("config validation") {
  RunConfig c;
  CHECK_NOTHROW(c.validate());
  c.warmup_steps = c.total_steps;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = RunConfig{};
  c.warmup_steps = 0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = RunConfig{};
  c.subgoal_timeout = 0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = RunConfig{};
  c.k = 0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = RunConfig{};
  c.gamma = 1.5;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = RunConfig{};
  c.batch_size = 0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = RunConfig{};
  c.meta_epsilon_end = 2.0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  // The trainer refuses an invalid config before stepping.
  c = RunConfig{};
  c.total_steps = 10;
  CHECK_THROWS_AS(Trainer{c}, std::invalid_argument);
}

TEST_CASE("config json round trip") {
  RunConfig c;
  c.mode = Mode::FlatQ;
  c.seed = 42;
  c.alpha = 0.25;
  c.flat_tie_break = TieBreak::Random;
  c.env.episode_cap = 123;
  const RunConfig back = run_config_from_json(nlohmann::json::parse(to_json(c).dump()));
  CHECK(to_json(back).dump() == to_json(c).dump());
  CHECK_THROWS(run_config_from_json(nlohmann::json{{"alhpa", 0.1}}));
}

TEST_CASE("coverage") {
  const RoomsLayout layout = RoomsLayout::standard();
  const std::vector<Cell> start{{1, 1}};
  CHECK(coverage(start, layout) == doctest::Approx(1.0 / 104.0));
  CHECK(coverage(layout.playable_cells(), layout) == 1.0);
  std::vector<Cell> nw;
  for (Cell c : layout.playable_cells())
    if (layout.room_of(c) == Region::NW) nw.push_back(c);
  nw.push_back({6, 3});
  nw.push_back({3, 6});
  nw.push_back({1, 1});  // duplicates count once
  CHECK(coverage(nw, layout) == doctest::Approx(27.0 / 104.0));
  const std::vector<Cell> walls{{0, 0}, {6, 6}};
  CHECK(coverage(walls, layout) == 0.0);
}

TEST_CASE("moving average") {
  const std::vector<double> s{3, 1, 4, 1, 5};
  CHECK(moving_average(s, 1) == s);
  const std::vector<double> c(6, 2.5);
  CHECK(moving_average(c, 3) == c);
  const std::vector<double> two{0, 10};
  CHECK(moving_average(two, 2) == std::vector<double>{0, 5});
  CHECK_THROWS(moving_average(two, 0));
}

TEST_CASE("metrics csv round trip") {
  std::vector<MetricsRecord> m{{0, 200, 10.0, 0.25, 0.5, 6, 1.0}, {1, 231, 50.0, 0.5, 0.75, 6, 2.0}};
  std::stringstream ss;
  write_metrics_csv(ss, m);
  CHECK(ss.str().rfind("episode,steps,return,coverage,success_rate,num_subgoals\n", 0) == 0);
  const auto back = read_metrics_csv(ss);
  REQUIRE(back.size() == 2);
  CHECK(back[1].steps == 231);
  CHECK(back[1].ret == 50.0);
  CHECK(back[1].coverage == 0.5);
  CHECK(back[1].num_subgoals == 6);
  std::stringstream bad("nope\n");
  CHECK_THROWS(read_metrics_csv(bad));
}

TEST_CASE("random walk accounting") {
  RunConfig c = small(Mode::RandomWalk, 10);
  c.warmup_steps = 5;
  Trainer t(c);
  const RunArtifacts a = t.run();
  CHECK(a.memory.size() == 10);
  CHECK(t.controller_memory().empty());
  CHECK(t.meta_memory().empty());
  CHECK(a.subgoals.empty());
  for (std::size_t s = 0; s < 208; ++s)
    for (Action act : kAllActions) CHECK(a.flat.at(s, act) == 0.0);
  CHECK(a.controller.num_subgoals() == 0);
}

TEST_CASE("same seed gives bit-identical metrics") {
  const RunConfig c = small(Mode::UnifiedHrl, 30'000, 9);
  CHECK(metrics_text(run(c)) == metrics_text(run(c)));
  const RunConfig f = small(Mode::FlatQ, 20'000, 9);
  CHECK(metrics_text(run(f)) == metrics_text(run(f)));
}

TEST_CASE("discovery schedule") {
  const RunArtifacts a = run(small(Mode::UnifiedHrl, 40'000, 3));
  CHECK(a.stats.discovery_steps == std::vector<std::size_t>{5000, 15000, 25000, 35000});
  CHECK(a.stats.failed_discoveries == 0);
}

TEST_CASE("failed discovery is retried next period") {
  RunConfig c = small(Mode::UnifiedHrl, 25'000, 3);
  c.min_discovery_samples = 10'000;
  const RunArtifacts a = run(c);
  CHECK(a.stats.failed_discoveries == 1);
  // The final step also lands on the schedule.
  CHECK(a.stats.discovery_steps == std::vector<std::size_t>{15000, 25000});
}

TEST_CASE("warmup random walk leaves the first room") {
  const RoomsLayout layout = RoomsLayout::standard();
  int escaped = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    RunConfig c = small(Mode::RandomWalk, 5000, seed);
    c.warmup_steps = 1;
    const RunArtifacts a = run(c);
    bool beyond = false;
    for (const auto& t : a.memory) {
      const Region r = layout.room_of(t.s_next.cell());
      beyond = beyond || (r != Region::NW && !is_doorway(r));
    }
    escaped += beyond;
  }
  CHECK(escaped >= 19);
}

TEST_CASE("discovery before any key pickup has no anomalies") {
  RunConfig c = small(Mode::RandomWalk, 2000, 2);
  c.warmup_steps = 1;
  const RunArtifacts a = run(c);
  // Everything before the first pickup.
  std::vector<Transition> prefix;
  for (const auto& t : a.memory) {
    if (t.r != 0.0) break;
    prefix.push_back(t);
  }
  REQUIRE(prefix.size() >= 32);
  Rng rng(0);
  const SubgoalSet g = discover(prefix, {}, rng);
  CHECK(g.k() == 4);
  CHECK(g.anomalies.empty());
}

TEST_CASE("attempt toward the current cluster succeeds on the first step") {
  Trainer t(small(Mode::UnifiedHrl, 10'000));
  t.install_subgoals(room_centered());
  t.env().reset_to({3, 3, false});
  const SubgoalAttempt a = t.attempt_subgoal(0);
  CHECK(a.attained);
  CHECK(a.steps == 1);
}

TEST_CASE("unattainable anomaly times out after exactly T_max steps") {
  Trainer t(small(Mode::UnifiedHrl, 10'000));
  SubgoalSet g = room_centered();
  g.anomalies.push_back({{10, 2, false}, 9.0});  // the key cell is never occupied without the key
  t.install_subgoals(g);
  t.env().reset();
  const SubgoalAttempt a = t.attempt_subgoal(6);
  CHECK_FALSE(a.attained);
  CHECK(a.steps == 50);
  REQUIRE(t.meta_memory().size() == 1);
  CHECK(t.meta_memory()[0].duration == 50);
  CHECK(t.stats().subgoal_attempts == 1);
  CHECK(t.stats().subgoal_successes == 0);
}

TEST_CASE("trained controller reaches the key from an adjacent cell in one step") {
  Trainer t(small(Mode::UnifiedHrl, 200'000));
  t.install_subgoals(room_centered());
  const RoomsLayout& layout = t.env().layout();
  const std::vector<Cell> adjacent{{9, 2}, {11, 2}, {10, 1}, {10, 3}};
  for (int rep = 0; rep < 200; ++rep) {
    const Cell c = adjacent[rep % adjacent.size()];
    t.env().reset_to({c.x, c.y, false});
    t.attempt_subgoal(4, 0.5);
  }
  for (Cell c : adjacent) {
    REQUIRE(bfs_distances(layout, c)[layout.cell_index(layout.key())] == 1);
    t.env().reset_to({c.x, c.y, false});
    const SubgoalAttempt a = t.attempt_subgoal(4, 0.0);
    CHECK(a.attained);
    CHECK(a.steps == 1);
    CHECK(a.rewards == std::vector<double>{10.0});
  }
}

TEST_CASE("unified run invariants") {
  Trainer t(small(Mode::UnifiedHrl, 60'000, 4));
  const RunArtifacts a = t.run();
  CHECK(a.stats.warmup_steps + a.stats.controller_steps == 60'000);
  CHECK(a.stats.warmup_steps == 5000);
  CHECK(a.memory.size() == 50'000);
  for (std::size_t i = 0; i < t.controller_memory().size(); ++i) {
    const auto& c = t.controller_memory()[i];
    CHECK(a.subgoals.contains(c.g));
    CHECK((c.r_intrinsic == 0.0 || c.r_intrinsic == 1.0));
  }
  for (std::size_t i = 0; i < t.meta_memory().size(); ++i) {
    const auto& m = t.meta_memory()[i];
    CHECK(m.duration >= 1);
    CHECK(m.duration <= 50);
  }
  double prev = 0.0;
  for (const auto& m : a.metrics) {
    CHECK(m.coverage >= prev);
    CHECK(m.coverage <= 1.0);
    CHECK(m.ret <= 50.0);
    prev = m.coverage;
  }
  CHECK(a.controller.num_subgoals() == a.subgoals.size());
  CHECK(a.meta.num_subgoals() == a.subgoals.size());
}

TEST_CASE("random meta mode never trains the meta table") {
  const RunArtifacts a = run(small(Mode::RandomMetaHrl, 30'000, 5));
  REQUIRE(a.meta.num_subgoals() > 0);
  for (std::size_t s = 0; s < 208; ++s)
    for (SubgoalId g = 0; g < static_cast<SubgoalId>(a.meta.num_subgoals()); ++g)
      CHECK(a.meta.at(s, g) == 0.0);
  CHECK(a.stats.meta_transitions > 0);
}

TEST_CASE("greedy evaluation of a trained unified agent solves the task") {
  const RunArtifacts a = run(small(Mode::UnifiedHrl, 200'000, 1));
  const EvalResult r =
      evaluate_hrl(RoomsLayout::standard(), a.config.env, a.subgoals, a.controller, a.meta, 50, 0);
  CHECK(r.solved);
  CHECK(r.ret == 50.0);
  CHECK_FALSE(r.subgoal_path.empty());
  CHECK(r.trajectory.size() == static_cast<std::size_t>(r.steps) + 1);
}

TEST_CASE("greedy evaluation of the flat baseline stops at the key") {
  const RunArtifacts a = run(small(Mode::FlatQ, 100'000, 1));
  const EvalResult r = evaluate_flat(RoomsLayout::standard(), a.config.env, a.flat);
  CHECK(r.ret <= 10.0);
  CHECK_FALSE(r.solved);
}
