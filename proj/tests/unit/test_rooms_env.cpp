#include <doctest.h>

#include <cstdlib>
#include <queue>
#include <set>
#include <stdexcept>

#include "hrl/rooms_env.hpp"

using namespace hrl;

TEST_CASE("reset returns the start state") {
  RoomsEnv env(RoomsLayout::standard());
  const GridState s = env.reset();
  CHECK(s == GridState{1, 1, false});
  CHECK(env.reset() == s);
  CHECK(env.episode_steps() == 0);
}

TEST_CASE("reset clears the key flag after an episode") {
  RoomsEnv env(RoomsLayout::standard());
  env.reset_to({9, 2, false});
  CHECK(env.step(Action::East).next_state.has_key);
  CHECK_FALSE(env.reset().has_key);
}

TEST_CASE("free move and wall bump") {
  RoomsEnv env(RoomsLayout::standard());
  env.reset();
  StepOutcome out = env.step(Action::East);
  CHECK(out.next_state == GridState{2, 1, false});
  CHECK(out.reward == 0.0);
  CHECK_FALSE(out.terminal);

  env.reset();
  out = env.step(Action::North);
  CHECK(out.next_state == GridState{1, 1, false});
  CHECK(out.reward == 0.0);
}

TEST_CASE("key pickup from every adjacent cell") {
  const RoomsLayout layout = RoomsLayout::standard();
  const Cell key = layout.key();
  int adjacent = 0;
  for (Action a : kAllActions) {
    // Step from the neighbour that moves onto the key with action a.
    Cell from = move(key, a);
    if (!layout.is_playable(from)) continue;
    Action back = a == Action::North ? Action::South
                  : a == Action::South ? Action::North
                  : a == Action::East  ? Action::West
                                       : Action::East;
    const StepOutcome out = layout.transition({from.x, from.y, false}, back);
    CHECK(out.next_state == GridState{key.x, key.y, true});
    CHECK(out.reward == 10.0);
    CHECK_FALSE(out.terminal);
    // Already holding the key: no second reward.
    CHECK(layout.transition({from.x, from.y, true}, back).reward == 0.0);
    ++adjacent;
  }
  CHECK(adjacent == 4);
}

TEST_CASE("box is terminal only with the key") {
  const RoomsLayout layout = RoomsLayout::standard();
  const Cell box = layout.box();
  const GridState east_of_box{box.x + 1, box.y, true};
  StepOutcome out = layout.transition(east_of_box, Action::West);
  CHECK(out.next_state == GridState{box.x, box.y, true});
  CHECK(out.reward == 40.0);
  CHECK(out.terminal);

  out = layout.transition({box.x + 1, box.y, false}, Action::West);
  CHECK(out.next_state.cell() == box);
  CHECK(out.reward == 0.0);
  CHECK_FALSE(out.terminal);
}

TEST_CASE("stepping after the episode ended is an error") {
  RoomsEnv env(RoomsLayout::standard());
  env.reset_to({3, 10, true});
  CHECK(env.step(Action::West).terminal);
  CHECK(env.episode_over());
  CHECK_THROWS_AS(env.step(Action::East), std::logic_error);
}

TEST_CASE("episode cap truncates") {
  RoomsEnv env(RoomsLayout::standard(), EnvConfig{5, 0.0});
  env.reset();
  for (int i = 0; i < 4; ++i) CHECK_FALSE(env.step(Action::North).truncated);
  const StepOutcome last = env.step(Action::North);
  CHECK(last.truncated);
  CHECK_FALSE(last.terminal);
  CHECK_THROWS_AS(env.step(Action::North), std::logic_error);
}

TEST_CASE("playable cells") {
  const RoomsLayout layout = RoomsLayout::standard();
  // Independent count: 13x13 minus border minus two internal walls plus 4 doorways.
  int count = 0;
  for (int y = 1; y < 12; ++y)
    for (int x = 1; x < 12; ++x)
      if (x != 6 && y != 6) ++count;
  count += 4;
  CHECK(count == 104);
  CHECK(layout.num_playable() == 104);
  CHECK(layout.num_states() == 208);
  CHECK_FALSE(layout.is_playable({0, 0}));
  CHECK(layout.is_playable({6, 3}));
  for (Cell d : {Cell{6, 3}, Cell{6, 9}, Cell{3, 6}, Cell{9, 6}}) CHECK(layout.is_playable(d));
  CHECK_FALSE(layout.is_playable({6, 6}));
  CHECK_FALSE(layout.is_playable({6, 4}));
}

TEST_CASE("room_of") {
  const RoomsLayout layout = RoomsLayout::standard();
  CHECK(layout.room_of({2, 2}) == Region::NW);
  CHECK(layout.room_of({9, 9}) == Region::SE);
  CHECK(layout.room_of({9, 2}) == Region::NE);
  CHECK(layout.room_of({2, 9}) == Region::SW);
  CHECK(to_string(layout.room_of({6, 3})) == "doorway-west-east-north");
  std::set<Region> doors;
  for (Cell d : {Cell{6, 3}, Cell{6, 9}, Cell{3, 6}, Cell{9, 6}}) {
    CHECK(is_doorway(layout.room_of(d)));
    doors.insert(layout.room_of(d));
  }
  CHECK(doors.size() == 4);
  CHECK_THROWS_AS(layout.room_of({0, 0}), std::invalid_argument);
  CHECK_THROWS_AS(layout.room_of({6, 6}), std::invalid_argument);

  int per_room[4] = {0, 0, 0, 0};
  for (Cell c : layout.playable_cells()) {
    const Region r = layout.room_of(c);
    if (!is_doorway(r)) ++per_room[static_cast<int>(r)];
  }
  for (int n : per_room) CHECK(n == 25);
}

TEST_CASE("state index is a bijection") {
  const RoomsLayout layout = RoomsLayout::standard();
  std::set<std::size_t> seen;
  for (Cell c : layout.playable_cells())
    for (bool k : {false, true}) {
      const GridState s{c.x, c.y, k};
      const std::size_t i = layout.state_index(s);
      CHECK(i < layout.num_states());
      CHECK(layout.state_at(i) == s);
      seen.insert(i);
    }
  CHECK(seen.size() == 208);
  CHECK_THROWS(layout.cell_index({0, 0}));
}

TEST_CASE("transition invariants hold over the whole state-action space") {
  const RoomsLayout layout = RoomsLayout::standard();
  for (std::size_t i = 0; i < layout.num_states(); ++i) {
    const GridState s = layout.state_at(i);
    for (Action a : kAllActions) {
      const StepOutcome o = layout.transition(s, a);
      CHECK(layout.is_playable(o.next_state.cell()));
      CHECK(std::abs(o.next_state.x - s.x) + std::abs(o.next_state.y - s.y) <= 1);
      CHECK((o.reward == 0.0 || o.reward == 10.0 || o.reward == 40.0));
      CHECK(o.terminal == (o.next_state.cell() == layout.box() && o.next_state.has_key));
      if (s.has_key) CHECK(o.next_state.has_key);
      CHECK(layout.transition(s, a).next_state == o.next_state);
    }
  }
}

TEST_CASE("reward per episode is bounded by 50") {
  RoomsEnv env(RoomsLayout::standard(), {}, 3);
  Rng rng(3);
  std::uniform_int_distribution<std::size_t> pick(0, 3);
  for (int ep = 0; ep < 300; ++ep) {
    env.reset();
    double total = 0.0;
    int keys = 0;
    while (!env.episode_over()) {
      const StepOutcome o = env.step(action_from_index(pick(rng)));
      total += o.reward;
      keys += o.reward == 10.0;
      if (o.reward == 40.0) CHECK(o.terminal);
    }
    CHECK(total <= 50.0);
    CHECK(keys <= 1);
  }
}

TEST_CASE("bfs reaches every playable cell") {
  const RoomsLayout layout = RoomsLayout::standard();
  const auto dist = bfs_distances(layout, layout.start());
  REQUIRE(dist.size() == 104);
  for (int d : dist) CHECK(d >= 0);
  CHECK(dist[layout.cell_index(layout.start())] == 0);
  // Hand-counted shortest paths through the north doorway (6,3).
  CHECK(dist[layout.cell_index({6, 3})] == 7);
  CHECK(dist[layout.cell_index(layout.key())] == 12);
  CHECK(dist[layout.cell_index({11, 11})] == 20);
}

TEST_CASE("slip probability 1 randomizes actions deterministically under seed") {
  const RoomsLayout layout = RoomsLayout::standard();
  auto trace = [&](std::uint64_t seed) {
    RoomsEnv env(layout, EnvConfig{200, 1.0}, seed);
    env.reset_to({3, 3, false});
    std::vector<GridState> out;
    for (int i = 0; i < 50; ++i) out.push_back(env.step(Action::North).next_state);
    return out;
  };
  CHECK(trace(5) == trace(5));
  std::set<int> ys;
  for (const auto& s : trace(5)) ys.insert(s.y);
  CHECK(ys.size() > 1);
}

TEST_CASE("layout text round trip and validation") {
  const RoomsLayout layout = RoomsLayout::standard();
  const RoomsLayout again = RoomsLayout::from_text(layout.to_text());
  CHECK(again.to_text() == layout.to_text());
  CHECK(again.key() == layout.key());
  CHECK(again.box() == layout.box());
  CHECK(again.start() == layout.start());

  CHECK_NOTHROW(RoomsLayout::from_text("#####\n#SKB#\n#####\n"));
  CHECK_THROWS_AS(RoomsLayout::from_text("#####\n#SK.#\n#####\n"), std::invalid_argument);
  CHECK_THROWS_AS(RoomsLayout::from_text("#####\n#SKBK#\n#####\n"), std::invalid_argument);
  CHECK_THROWS_AS(RoomsLayout::from_text("#####\n.SKB#\n#####\n"), std::invalid_argument);
  CHECK_THROWS_AS(RoomsLayout::from_text(""), std::invalid_argument);
  CHECK_THROWS_AS(RoomsLayout::from_text("#####\n#SKx#\n#####\n"), std::invalid_argument);
}

TEST_CASE("action helpers") {
  CHECK(move({5, 5}, Action::North) == Cell{5, 4});
  CHECK(move({5, 5}, Action::South) == Cell{5, 6});
  CHECK(move({5, 5}, Action::East) == Cell{6, 5});
  CHECK(move({5, 5}, Action::West) == Cell{4, 5});
  for (std::size_t i = 0; i < kNumActions; ++i) CHECK(index_of(action_from_index(i)) == i);
  CHECK_THROWS(action_from_index(4));
}
