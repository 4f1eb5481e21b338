#pragma once

#include <cstddef>
#include <deque>
#include <iosfwd>
#include <span>
#include <vector>

#include "hrl/discovery.hpp"
#include "hrl/memory.hpp"
#include "hrl/rooms_env.hpp"

namespace hrl {

/// Controller values q(s, g, a) in intrinsic-reward units. Storage is subgoal-major, so
/// adding subgoals appends columns without touching existing entries.
class ControllerTable {
 public:
  ControllerTable() = default;
  ControllerTable(std::size_t num_states, std::size_t num_subgoals, double init = 0.0);

  std::size_t num_states() const { return num_states_; }
  std::size_t num_subgoals() const { return num_subgoals_; }
  double init_value() const { return init_; }

  /// Grows to n subgoals; new entries start at the initialization value.
  void resize_subgoals(std::size_t n);

  double& at(std::size_t state, SubgoalId g, Action a);
  double at(std::size_t state, SubgoalId g, Action a) const;
  std::span<const double> row(std::size_t state, SubgoalId g) const;
  std::span<double> row(std::size_t state, SubgoalId g);

 private:
  std::size_t offset(std::size_t state, SubgoalId g) const;

  std::size_t num_states_ = 0;
  std::size_t num_subgoals_ = 0;
  double init_ = 0.0;
  std::vector<double> values_;
};

/// Meta-controller values Q(s, g) in task-reward units.
class MetaTable {
 public:
  MetaTable() = default;
  MetaTable(std::size_t num_states, std::size_t num_subgoals, double init = 0.0);

  std::size_t num_states() const { return num_states_; }
  std::size_t num_subgoals() const { return num_subgoals_; }
  double init_value() const { return init_; }
  void resize_subgoals(std::size_t n);

  double& at(std::size_t state, SubgoalId g);
  double at(std::size_t state, SubgoalId g) const;
  std::span<const double> row(std::size_t state) const;
  std::span<double> row(std::size_t state);

 private:
  std::size_t num_states_ = 0;
  std::size_t num_subgoals_ = 0;
  double init_ = 0.0;
  std::vector<double> values_;
};

/// Flat Q(s, a) for the baseline learner.
class FlatTable {
 public:
  FlatTable() = default;
  explicit FlatTable(std::size_t num_states, double init = 0.0);

  std::size_t num_states() const { return num_states_; }
  double& at(std::size_t state, Action a);
  double at(std::size_t state, Action a) const;
  std::span<const double> row(std::size_t state) const;
  std::span<double> row(std::size_t state);

 private:
  std::size_t num_states_ = 0;
  std::vector<double> values_;
};

/// Linear decay from start to end over `horizon` steps, then held at end.
struct EpsilonSchedule {
  double start = 1.0;
  double end = 0.1;
  std::size_t horizon = 1;

  EpsilonSchedule() = default;
  EpsilonSchedule(double start, double end, std::size_t horizon);
  double value(std::size_t t) const;
};

/// Per-subgoal exploration rate annealed by the moving success rate over the last `window`
/// attempts: eps_g = start - (start - end) * success_rate_g.
class SubgoalEpsilon {
 public:
  explicit SubgoalEpsilon(double start = 1.0, double end = 0.1, std::size_t window = 100);

  void record(SubgoalId g, bool success);
  double success_rate(SubgoalId g) const;
  double epsilon(SubgoalId g) const;

 private:
  double start_;
  double end_;
  std::size_t window_;
  std::vector<std::deque<bool>> history_;
};

/// Uniform choice among the maximal entries.
std::size_t argmax_random_tie(std::span<const double> values, Rng& rng);
/// First maximal entry.
std::size_t argmax_first(std::span<const double> values);
/// With probability eps a uniform index, otherwise argmax_random_tie.
std::size_t epsilon_greedy(std::span<const double> values, double eps, Rng& rng);

/// Throws std::invalid_argument when the table has no subgoals.
SubgoalId select_subgoal(const MetaTable& table, std::size_t state, double eps, Rng& rng);
Action select_action(const ControllerTable& table, std::size_t state, SubgoalId g, double eps,
                     Rng& rng);

struct CriticResult {
  bool attained = false;
  double reward = 0.0;
};

/// Intrinsic reward for reaching subgoal g. Anomaly subgoals need an exact state match
/// (has_key included); centroid subgoals are attained when g is the nearest centroid to
/// the cell of s_next. Reward is +1 on attainment, 0 otherwise.
CriticResult intrinsic_critic(const GridState& s_next, SubgoalId g, const SubgoalSet& subgoals);

/// One sequential Q-learning sweep over the batch. Alpha must lie in [0, 1] and gamma in
/// (0, 1]; transitions naming a subgoal outside the table throw std::out_of_range.
void update_controller(ControllerTable& table, std::span<const ControllerTransition> batch,
                       const RoomsLayout& layout, double alpha, double gamma);
/// Semi-MDP update: bootstraps with gamma^duration unless the attempt ended the episode.
void update_meta(MetaTable& table, std::span<const MetaTransition> batch,
                 const RoomsLayout& layout, double alpha, double gamma);
void flat_q_update(FlatTable& table, std::span<const Transition> batch, const RoomsLayout& layout,
                   double alpha, double gamma);

/// CSV exports: header then one row per entry, values printed with round-trip precision.
void write_csv(std::ostream& out, const ControllerTable& table);  // state,subgoal,action,value
void write_csv(std::ostream& out, const MetaTable& table);        // state,subgoal,value
void write_csv(std::ostream& out, const FlatTable& table);        // state,action,value
ControllerTable read_controller_csv(std::istream& in, std::size_t num_states);
MetaTable read_meta_csv(std::istream& in, std::size_t num_states);
FlatTable read_flat_csv(std::istream& in, std::size_t num_states);

}  // namespace hrl
