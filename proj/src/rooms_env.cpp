#include "hrl/rooms_env.hpp"

#include <deque>
#include <sstream>
#include <stdexcept>

namespace hrl {

std::string_view to_string(Action a) {
  switch (a) {
    case Action::North: return "north";
    case Action::South: return "south";
    case Action::East: return "east";
    case Action::West: return "west";
  }
  return "?";
}

Action action_from_index(std::size_t index) {
  if (index >= kNumActions) throw std::invalid_argument("action index out of range");
  return static_cast<Action>(index);
}

Cell move(Cell c, Action a) {
  switch (a) {
    case Action::North: return {c.x, c.y - 1};
    case Action::South: return {c.x, c.y + 1};
    case Action::East: return {c.x + 1, c.y};
    case Action::West: return {c.x - 1, c.y};
  }
  return c;
}

std::string_view to_string(Region r) {
  switch (r) {
    case Region::NW: return "NW";
    case Region::NE: return "NE";
    case Region::SW: return "SW";
    case Region::SE: return "SE";
    case Region::DoorNorth: return "doorway-west-east-north";
    case Region::DoorSouth: return "doorway-west-east-south";
    case Region::DoorWest: return "doorway-north-south-west";
    case Region::DoorEast: return "doorway-north-south-east";
  }
  return "?";
}

RoomsLayout RoomsLayout::standard() {
  // clang-format off
  static constexpr std::string_view kText =
      "#############\n"
      "#S....#.....#\n"
      "#.....#...K.#\n"
      "#...........#\n"
      "#.....#.....#\n"
      "#.....#.....#\n"
      "###.#####.###\n"
      "#.....#.....#\n"
      "#.....#.....#\n"
      "#...........#\n"
      "#.B...#.....#\n"
      "#.....#.....#\n"
      "#############\n";
  // clang-format on
  return from_text(kText);
}

RoomsLayout RoomsLayout::from_text(std::string_view text) {
  std::vector<std::string> rows;
  std::istringstream in{std::string(text)};
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) rows.push_back(line);
  }
  if (rows.size() < 3) throw std::invalid_argument("layout needs at least 3 rows");
  const std::size_t w = rows.front().size();
  if (w < 3) throw std::invalid_argument("layout needs at least 3 columns");

  RoomsLayout layout;
  layout.width_ = static_cast<int>(w);
  layout.height_ = static_cast<int>(rows.size());
  layout.walls_.assign(w * rows.size(), false);
  int keys = 0, boxes = 0, starts = 0;
  for (std::size_t y = 0; y < rows.size(); ++y) {
    if (rows[y].size() != w) throw std::invalid_argument("layout rows have unequal length");
    for (std::size_t x = 0; x < w; ++x) {
      const Cell c{static_cast<int>(x), static_cast<int>(y)};
      switch (rows[y][x]) {
        case '#': layout.walls_[y * w + x] = true; break;
        case '.': break;
        case 'K': layout.key_ = c; ++keys; break;
        case 'B': layout.box_ = c; ++boxes; break;
        case 'S': layout.start_ = c; ++starts; break;
        default:
          throw std::invalid_argument(std::string("unknown layout character '") + rows[y][x] + "'");
      }
    }
  }
  if (keys != 1 || boxes != 1 || starts != 1)
    throw std::invalid_argument("layout needs exactly one K, one B and one S");
  for (int x = 0; x < layout.width_; ++x)
    if (!layout.is_wall({x, 0}) || !layout.is_wall({x, layout.height_ - 1}))
      throw std::invalid_argument("layout border must be wall");
  for (int y = 0; y < layout.height_; ++y)
    if (!layout.is_wall({0, y}) || !layout.is_wall({layout.width_ - 1, y}))
      throw std::invalid_argument("layout border must be wall");
  layout.finalize();
  return layout;
}

void RoomsLayout::finalize() {
  index_.assign(walls_.size(), -1);
  playable_.clear();
  for (int y = 0; y < height_; ++y)
    for (int x = 0; x < width_; ++x)
      if (!is_wall({x, y})) {
        index_[static_cast<std::size_t>(y * width_ + x)] = static_cast<int>(playable_.size());
        playable_.push_back({x, y});
      }
}

std::string RoomsLayout::to_text() const {
  std::string out;
  out.reserve(static_cast<std::size_t>((width_ + 1) * height_));
  for (int y = 0; y < height_; ++y) {
    for (int x = 0; x < width_; ++x) {
      const Cell c{x, y};
      char ch = is_wall(c) ? '#' : '.';
      if (c == key_) ch = 'K';
      if (c == box_) ch = 'B';
      if (c == start_) ch = 'S';
      out.push_back(ch);
    }
    out.push_back('\n');
  }
  return out;
}

bool RoomsLayout::in_bounds(Cell c) const {
  return c.x >= 0 && c.y >= 0 && c.x < width_ && c.y < height_;
}

bool RoomsLayout::is_wall(Cell c) const {
  return !in_bounds(c) || walls_[static_cast<std::size_t>(c.y * width_ + c.x)];
}

std::size_t RoomsLayout::cell_index(Cell c) const {
  if (!is_playable(c)) throw std::invalid_argument("cell is not playable");
  return static_cast<std::size_t>(index_[static_cast<std::size_t>(c.y * width_ + c.x)]);
}

std::size_t RoomsLayout::state_index(const GridState& s) const {
  return cell_index(s.cell()) + (s.has_key ? playable_.size() : 0);
}

GridState RoomsLayout::state_at(std::size_t index) const {
  if (index >= num_states()) throw std::out_of_range("state index out of range");
  const bool key = index >= playable_.size();
  const Cell c = playable_[key ? index - playable_.size() : index];
  return {c.x, c.y, key};
}

Region RoomsLayout::room_of(Cell c) const {
  if (!is_playable(c)) throw std::invalid_argument("room_of: cell is a wall");
  const int col = width_ / 2;
  const int row = height_ / 2;
  if (c.x == col) return c.y < row ? Region::DoorNorth : Region::DoorSouth;
  if (c.y == row) return c.x < col ? Region::DoorWest : Region::DoorEast;
  if (c.y < row) return c.x < col ? Region::NW : Region::NE;
  return c.x < col ? Region::SW : Region::SE;
}

StepOutcome RoomsLayout::transition(const GridState& s, Action a) const {
  if (!is_playable(s.cell())) throw std::invalid_argument("transition from a wall cell");
  StepOutcome out;
  out.next_state = s;
  const Cell target = move(s.cell(), a);
  if (is_wall(target)) return out;
  out.next_state.x = target.x;
  out.next_state.y = target.y;
  if (target == key_ && !s.has_key) {
    out.next_state.has_key = true;
    out.reward = kKeyReward;
  } else if (target == box_ && s.has_key) {
    out.reward = kBoxReward;
    out.terminal = true;
  }
  return out;
}

std::vector<int> bfs_distances(const RoomsLayout& layout, Cell from) {
  std::vector<int> dist(layout.num_playable(), -1);
  std::deque<Cell> frontier{from};
  dist[layout.cell_index(from)] = 0;
  while (!frontier.empty()) {
    const Cell c = frontier.front();
    frontier.pop_front();
    const int d = dist[layout.cell_index(c)];
    for (Action a : kAllActions) {
      const Cell n = move(c, a);
      if (!layout.is_playable(n)) continue;
      int& nd = dist[layout.cell_index(n)];
      if (nd < 0) {
        nd = d + 1;
        frontier.push_back(n);
      }
    }
  }
  return dist;
}

RoomsEnv::RoomsEnv(RoomsLayout layout, EnvConfig config, std::uint64_t seed)
    : layout_(std::move(layout)), config_(config), rng_(seed) {
  if (config_.episode_cap < 1) throw std::invalid_argument("episode_cap must be >= 1");
  if (config_.slip_probability < 0.0 || config_.slip_probability > 1.0)
    throw std::invalid_argument("slip_probability must lie in [0, 1]");
  reset();
}

GridState RoomsEnv::reset() { return reset_to({layout_.start().x, layout_.start().y, false}); }

GridState RoomsEnv::reset_to(const GridState& s) {
  if (!layout_.is_playable(s.cell())) throw std::invalid_argument("reset_to: cell is a wall");
  state_ = s;
  steps_ = 0;
  over_ = false;
  return state_;
}

StepOutcome RoomsEnv::step(Action a) {
  if (over_) throw std::logic_error("step called on a finished episode; call reset() first");
  if (config_.slip_probability > 0.0) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    if (u(rng_) < config_.slip_probability) {
      std::uniform_int_distribution<std::size_t> pick(0, kNumActions - 1);
      a = action_from_index(pick(rng_));
    }
  }
  StepOutcome out = layout_.transition(state_, a);
  state_ = out.next_state;
  ++steps_;
  if (!out.terminal && steps_ >= config_.episode_cap) out.truncated = true;
  over_ = out.terminal || out.truncated;
  return out;
}

}  // namespace hrl
