#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "hrl/memory.hpp"
#include "hrl/rooms_env.hpp"

namespace hrl::testing {

// Short random walks from uniformly random restart states, so every playable cell is
// visited at roughly the same rate. Key and box pickups both occur.
inline std::vector<Transition> uniform_memory(const RoomsLayout& layout, std::size_t n,
                                              std::uint64_t seed, int walk_len = 20) {
  Rng rng(seed);
  RoomsEnv env(layout, {}, seed + 1);
  const auto& cells = layout.playable_cells();
  std::uniform_int_distribution<std::size_t> pick(0, cells.size() - 1);
  std::uniform_int_distribution<std::size_t> act(0, kNumActions - 1);
  std::bernoulli_distribution coin(0.5);
  std::vector<Transition> memory;
  memory.reserve(n);
  while (memory.size() < n) {
    const Cell c = cells[pick(rng)];
    if (c == layout.box()) continue;
    const bool has_key = coin(rng) || c == layout.key();
    env.reset_to({c.x, c.y, has_key});
    for (int t = 0; t < walk_len && memory.size() < n; ++t) {
      const GridState from = env.state();
      const Action a = action_from_index(act(rng));
      const StepOutcome out = env.step(a);
      memory.push_back({from, a, out.reward, out.next_state, out.terminal});
      if (out.terminal) break;
    }
  }
  return memory;
}

}  // namespace hrl::testing
