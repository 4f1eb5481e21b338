#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "hrl/agent.hpp"
#include "hrl/discovery.hpp"
#include "hrl/memory.hpp"
#include "hrl/rooms_env.hpp"

namespace hrl {

enum class Mode { RandomWalk, FlatQ, RandomMetaHrl, UnifiedHrl };

std::string_view to_string(Mode m);
/// Accepts random_walk, flat_q, random_meta_hrl, unified_hrl.
Mode mode_from_string(std::string_view name);

enum class TieBreak { First, Random };

/// Every tunable of a run. Defaults are the values used for the reported experiments.
struct RunConfig {
  Mode mode = Mode::UnifiedHrl;
  std::uint64_t seed = 0;
  std::size_t total_steps = 200'000;

  EnvConfig env;

  std::size_t memory_capacity = 50'000;             // D, raw transitions
  std::size_t controller_memory_capacity = 50'000;  // D1
  std::size_t meta_memory_capacity = 10'000;        // D2

  std::size_t k = 4;
  double anomaly_threshold = 3.0;
  std::size_t warmup_steps = 5'000;
  std::size_t discovery_period = 10'000;
  std::size_t min_discovery_samples = 32;
  std::size_t kmeans_max_iter = 100;
  double kmeans_tol = 1e-6;
  bool use_dissimilarity = false;
  double dissimilarity_threshold = 3.0;

  int subgoal_timeout = 50;  // T_max, controller steps per attempt
  double alpha = 0.1;
  double gamma = 0.99;
  std::size_t batch_size = 32;
  double q_init = 0.0;

  double meta_epsilon_start = 1.0;
  double meta_epsilon_end = 0.1;
  double meta_epsilon_fraction = 0.5;  // of total_steps
  double controller_epsilon_start = 1.0;
  double controller_epsilon_end = 0.1;
  std::size_t success_window = 100;

  double flat_epsilon = 0.3;
  TieBreak flat_tie_break = TieBreak::First;

  /// Throws std::invalid_argument describing the first violated constraint.
  void validate() const;
};

nlohmann::ordered_json to_json(const RunConfig& c);
RunConfig run_config_from_json(const nlohmann::json& j);

struct MetricsRecord {
  std::size_t episode = 0;
  std::size_t steps = 0;  // cumulative environment steps at episode end
  double ret = 0.0;       // undiscounted episode return
  double coverage = 0.0;
  double success_rate = 0.0;  // controller success over the last success_window attempts
  std::size_t num_subgoals = 0;
  double wall_clock = 0.0;  // seconds since run start; not written to CSV
};

/// Header: episode,steps,return,coverage,success_rate,num_subgoals
void write_metrics_csv(std::ostream& out, std::span<const MetricsRecord> records);
std::vector<MetricsRecord> read_metrics_csv(std::istream& in);

/// Fraction of the layout's playable cells present in `visited`.
double coverage(std::span<const Cell> visited, const RoomsLayout& layout);
/// Trailing mean over min(window, available) points. Throws if window == 0.
std::vector<double> moving_average(std::span<const double> series, std::size_t window);

struct RunStats {
  std::size_t warmup_steps = 0;      // steps taken by the random warmup policy (HRL modes)
  std::size_t controller_steps = 0;  // steps taken inside subgoal attempts
  std::size_t subgoal_attempts = 0;
  std::size_t subgoal_successes = 0;
  std::size_t controller_transitions = 0;
  std::size_t meta_transitions = 0;
  std::vector<std::size_t> discovery_steps;  // steps at which discovery succeeded
  std::size_t failed_discoveries = 0;
};

struct RunArtifacts {
  RunConfig config;
  std::vector<MetricsRecord> metrics;
  ControllerTable controller;
  MetaTable meta;
  FlatTable flat;
  SubgoalSet subgoals;
  std::vector<Transition> memory;  // snapshot of D, oldest first
  std::vector<Cell> visited;
  RunStats stats;
};

/// Outcome of one controller episode toward a subgoal.
struct SubgoalAttempt {
  SubgoalId g = 0;
  GridState start;
  GridState end;
  int steps = 0;
  bool attained = false;
  bool env_terminal = false;
  bool interrupted = false;  // environment episode capped before attainment
  std::vector<double> rewards;
};

/// Single-phase training loop: environment, memories D/D1/D2, periodic subgoal discovery,
/// controller and meta-controller learning all advance together.
class Trainer {
 public:
  explicit Trainer(RunConfig config, RoomsLayout layout = RoomsLayout::standard());

  /// Runs the configured mode until total_steps environment steps have been taken.
  RunArtifacts run();

  // Lower-level access, mostly for tests and evaluation.
  RoomsEnv& env() { return env_; }
  const RunConfig& config() const { return config_; }
  const SubgoalSet& subgoals() const { return subgoals_; }
  const ControllerTable& controller() const { return controller_; }
  const MetaTable& meta() const { return meta_; }
  const BoundedMemory<Transition>& memory() const { return memory_; }
  const BoundedMemory<ControllerTransition>& controller_memory() const { return controller_memory_; }
  const BoundedMemory<MetaTransition>& meta_memory() const { return meta_memory_; }
  const RunStats& stats() const { return stats_; }
  std::size_t steps_taken() const { return step_; }

  /// Replaces G (merging ids with the current set) and grows the value tables.
  void install_subgoals(const SubgoalSet& discovered);
  /// Runs discovery on D now. Returns false if D is too small.
  bool discover_now();
  /// One controller episode toward g from the current environment state. The controller
  /// keeps learning; epsilon_override replaces the per-subgoal exploration rate.
  SubgoalAttempt attempt_subgoal(SubgoalId g, std::optional<double> epsilon_override = {});

 private:
  struct StepInfo {
    StepOutcome outcome;
    GridState from;
  };

  StepInfo env_step(Action a);
  void after_step(const StepOutcome& out);
  void maybe_discover();
  bool discovery_due() const;
  Action random_action();
  void run_random_walk();
  void run_flat();
  void run_hrl();

  RunConfig config_;
  RoomsEnv env_;
  Rng rng_;
  BoundedMemory<Transition> memory_;
  BoundedMemory<ControllerTransition> controller_memory_;
  BoundedMemory<MetaTransition> meta_memory_;
  SubgoalSet subgoals_;
  ControllerTable controller_;
  MetaTable meta_;
  FlatTable flat_;
  SubgoalEpsilon controller_eps_;
  EpsilonSchedule meta_eps_;

  std::size_t step_ = 0;
  std::vector<bool> visited_;
  std::size_t visited_count_ = 0;
  std::size_t episode_ = 0;
  double episode_return_ = 0.0;
  std::deque<bool> recent_attempts_;
  std::vector<MetricsRecord> metrics_;
  RunStats stats_;
  double started_ = 0.0;
};

RunArtifacts run(const RunConfig& config, const RoomsLayout& layout = RoomsLayout::standard());

struct EvalResult {
  double ret = 0.0;
  int steps = 0;
  bool solved = false;
  std::vector<SubgoalId> subgoal_path;
  std::vector<GridState> trajectory;
};

/// Greedy rollout of a trained hierarchical agent (meta and controller at epsilon = 0) for one
/// environment episode. Each subgoal attempt is bounded by subgoal_timeout steps.
EvalResult evaluate_hrl(const RoomsLayout& layout, const EnvConfig& env_config,
                        const SubgoalSet& subgoals, const ControllerTable& controller,
                        const MetaTable& meta, int subgoal_timeout, std::uint64_t seed);
/// Greedy rollout of the flat baseline (first-index argmax).
EvalResult evaluate_flat(const RoomsLayout& layout, const EnvConfig& env_config,
                         const FlatTable& table);

}  // namespace hrl
