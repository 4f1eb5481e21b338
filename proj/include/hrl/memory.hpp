#pragma once

#include <algorithm>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "hrl/rooms_env.hpp"

namespace hrl {

using SubgoalId = int;

/// One raw environment step (s, a, r, s', terminal).
struct Transition {
  GridState s;
  Action a = Action::North;
  double r = 0.0;
  GridState s_next;
  bool terminal = false;

  bool operator==(const Transition&) const = default;
};

/// Controller experience (s, g, a, r~, s') with the intrinsic reward.
struct ControllerTransition {
  GridState s;
  SubgoalId g = 0;
  Action a = Action::North;
  double r_intrinsic = 0.0;
  GridState s_next;
  bool attained_or_terminal = false;
};

/// Meta-controller experience (s, g, G, s_end) for one completed subgoal attempt.
struct MetaTransition {
  GridState s0;
  SubgoalId g = 0;
  double G = 0.0;
  GridState s_end;
  int duration = 1;
  // The environment episode ended at s_end, so no bootstrap.
  bool terminal = false;
};

/// Discounted sum G = sum_k gamma^k * rewards[k].
/// Throws std::invalid_argument for an empty sequence or gamma outside (0, 1].
double accumulate_return(std::span<const double> rewards, double gamma);

/// Builds a MetaTransition from the reward slice observed during the attempt.
MetaTransition make_meta_transition(const GridState& s0, SubgoalId g,
                                    std::span<const double> rewards, double gamma,
                                    const GridState& s_end, bool terminal);

/// Fixed-capacity FIFO of experiences. Oldest records are evicted first and iteration
/// order is insertion order.
template <class T>
class BoundedMemory {
 public:
  explicit BoundedMemory(std::size_t capacity) : capacity_(capacity) {
    if (capacity_ == 0) throw std::invalid_argument("memory capacity must be >= 1");
    buf_.reserve(std::min<std::size_t>(capacity_, 1 << 16));
  }

  void push(T item) {
    if (buf_.size() < capacity_) {
      buf_.push_back(std::move(item));
    } else {
      buf_[head_] = std::move(item);
      head_ = (head_ + 1) % capacity_;
    }
  }

  std::size_t size() const { return buf_.size(); }
  std::size_t capacity() const { return capacity_; }
  bool empty() const { return buf_.empty(); }

  /// i = 0 is the oldest record.
  const T& operator[](std::size_t i) const { return buf_[(head_ + i) % buf_.size()]; }

  /// n records drawn uniformly with replacement.
  std::vector<T> sample(std::size_t n, Rng& rng) const {
    if (buf_.empty()) throw std::invalid_argument("cannot sample from an empty memory");
    std::uniform_int_distribution<std::size_t> pick(0, buf_.size() - 1);
    std::vector<T> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(buf_[pick(rng)]);
    return out;
  }

  /// Contents oldest-first.
  std::vector<T> snapshot() const {
    std::vector<T> out;
    out.reserve(buf_.size());
    for (std::size_t i = 0; i < buf_.size(); ++i) out.push_back((*this)[i]);
    return out;
  }

  void clear() {
    buf_.clear();
    head_ = 0;
  }

 private:
  std::size_t capacity_;
  std::vector<T> buf_;
  std::size_t head_ = 0;
};

/// JSON-lines snapshot: one object per line with keys
/// x, y, has_key, action, reward, x', y', has_key', terminal.
void write_transitions_jsonl(std::ostream& out, std::span<const Transition> records);

/// Reads a snapshot written by write_transitions_jsonl. Blank lines are skipped.
/// Throws std::runtime_error on malformed lines or when more than max_records are present.
std::vector<Transition> read_transitions_jsonl(std::istream& in,
                                               std::size_t max_records = 10'000'000);

}  // namespace hrl
