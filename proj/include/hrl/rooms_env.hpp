#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace hrl {

using Rng = std::mt19937_64;

struct Cell {
  int x = 0;
  int y = 0;
  auto operator<=>(const Cell&) const = default;
};

/// Agent cell plus key possession. This is the full Markov state of the rooms task.
struct GridState {
  int x = 0;
  int y = 0;
  bool has_key = false;

  Cell cell() const { return {x, y}; }
  auto operator<=>(const GridState&) const = default;
};

enum class Action : std::uint8_t { North = 0, South = 1, East = 2, West = 3 };

inline constexpr std::size_t kNumActions = 4;
inline constexpr std::array<Action, kNumActions> kAllActions{Action::North, Action::South,
                                                             Action::East, Action::West};

std::string_view to_string(Action a);
Action action_from_index(std::size_t index);
inline std::size_t index_of(Action a) { return static_cast<std::size_t>(a); }
Cell move(Cell c, Action a);

struct StepOutcome {
  GridState next_state;
  double reward = 0.0;
  bool terminal = false;
  // Episode hit the step cap without reaching the box.
  bool truncated = false;
};

/// Coarse location of a playable cell: one of the four rooms or one of the four doorways.
enum class Region : std::uint8_t {
  NW,
  NE,
  SW,
  SE,
  DoorNorth,  // between NW and NE
  DoorSouth,  // between SW and SE
  DoorWest,   // between NW and SW
  DoorEast,   // between NE and SE
};

std::string_view to_string(Region r);
inline bool is_doorway(Region r) { return r >= Region::DoorNorth; }

/// Static geometry of a four-rooms grid. The standard layout is 13x13 with internal
/// walls on column 6 and row 6, giving 104 playable cells.
class RoomsLayout {
 public:
  static constexpr double kKeyReward = 10.0;
  static constexpr double kBoxReward = 40.0;

  static RoomsLayout standard();

  /// Parses the text grid format: '#' wall, '.' floor, 'K' key, 'B' box, 'S' start.
  /// Throws std::invalid_argument on malformed input.
  static RoomsLayout from_text(std::string_view text);
  std::string to_text() const;

  int width() const { return width_; }
  int height() const { return height_; }
  Cell key() const { return key_; }
  Cell box() const { return box_; }
  Cell start() const { return start_; }

  bool in_bounds(Cell c) const;
  bool is_wall(Cell c) const;
  bool is_playable(Cell c) const { return in_bounds(c) && !is_wall(c); }

  /// Row-major list of every non-wall cell.
  const std::vector<Cell>& playable_cells() const { return playable_; }
  std::size_t num_playable() const { return playable_.size(); }

  /// Dense index of a playable cell in [0, num_playable()). Throws for walls.
  std::size_t cell_index(Cell c) const;
  /// Dense index over (cell, has_key): [0, 2 * num_playable()).
  std::size_t state_index(const GridState& s) const;
  std::size_t num_states() const { return 2 * playable_.size(); }
  GridState state_at(std::size_t index) const;

  /// Room or doorway containing a playable cell. Throws std::invalid_argument for walls.
  Region room_of(Cell c) const;

  /// Deterministic transition. A move into a wall leaves the agent in place.
  StepOutcome transition(const GridState& s, Action a) const;

 private:
  RoomsLayout() = default;
  void finalize();

  int width_ = 0;
  int height_ = 0;
  std::vector<bool> walls_;
  std::vector<int> index_;  // -1 for walls
  std::vector<Cell> playable_;
  Cell key_;
  Cell box_;
  Cell start_;
};

/// Breadth-first distances (in steps) from `from` to every playable cell, ignoring the key.
/// Unreachable cells get -1. Indexed by RoomsLayout::cell_index.
std::vector<int> bfs_distances(const RoomsLayout& layout, Cell from);

struct EnvConfig {
  int episode_cap = 200;
  // Probability that the chosen action is replaced by a uniformly random one.
  double slip_probability = 0.0;
};

/// Episode state machine over a RoomsLayout.
class RoomsEnv {
 public:
  explicit RoomsEnv(RoomsLayout layout, EnvConfig config = {}, std::uint64_t seed = 0);

  const RoomsLayout& layout() const { return layout_; }
  const EnvConfig& config() const { return config_; }

  GridState reset();
  /// Starts an episode from an arbitrary playable state (evaluation and tests).
  GridState reset_to(const GridState& s);

  /// Throws std::logic_error when the episode already ended (terminal or capped).
  StepOutcome step(Action a);

  const GridState& state() const { return state_; }
  int episode_steps() const { return steps_; }
  bool episode_over() const { return over_; }

 private:
  RoomsLayout layout_;
  EnvConfig config_;
  Rng rng_;
  GridState state_;
  int steps_ = 0;
  bool over_ = false;
};

}  // namespace hrl
