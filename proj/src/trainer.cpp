#include "hrl/trainer.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace hrl {

namespace {

double now_seconds() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

const RunConfig& validated(const RunConfig& c) {
  c.validate();
  return c;
}

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(std::string("invalid run config: ") + what);
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string_view to_string(Mode m) {
  switch (m) {
    case Mode::RandomWalk: return "random_walk";
    case Mode::FlatQ: return "flat_q";
    case Mode::RandomMetaHrl: return "random_meta_hrl";
    case Mode::UnifiedHrl: return "unified_hrl";
  }
  return "?";
}

Mode mode_from_string(std::string_view name) {
  for (Mode m : {Mode::RandomWalk, Mode::FlatQ, Mode::RandomMetaHrl, Mode::UnifiedHrl})
    if (to_string(m) == name) return m;
  throw std::invalid_argument("unknown mode '" + std::string(name) + "'");
}

void RunConfig::validate() const {
  require(total_steps > warmup_steps, "total_steps must exceed warmup_steps");
  require(warmup_steps > 0, "warmup_steps must be > 0");
  require(subgoal_timeout >= 1, "subgoal_timeout must be >= 1");
  require(discovery_period >= 1, "discovery_period must be >= 1");
  require(env.episode_cap >= 1, "episode_cap must be >= 1");
  require(env.slip_probability >= 0.0 && env.slip_probability <= 1.0,
          "slip_probability must lie in [0, 1]");
  require(memory_capacity >= 1 && controller_memory_capacity >= 1 && meta_memory_capacity >= 1,
          "memory capacities must be >= 1");
  require(k >= 1, "k must be >= 1");
  require(anomaly_threshold >= 0.0, "anomaly_threshold must be >= 0");
  require(kmeans_max_iter >= 1, "kmeans_max_iter must be >= 1");
  require(kmeans_tol > 0.0, "kmeans_tol must be > 0");
  require(alpha >= 0.0 && alpha <= 1.0, "alpha must lie in [0, 1]");
  require(gamma > 0.0 && gamma <= 1.0, "gamma must lie in (0, 1]");
  require(batch_size >= 1, "batch_size must be >= 1");
  require(0.0 <= meta_epsilon_end && meta_epsilon_end <= meta_epsilon_start &&
              meta_epsilon_start <= 1.0,
          "meta epsilon needs 0 <= end <= start <= 1");
  require(meta_epsilon_fraction > 0.0 && meta_epsilon_fraction <= 1.0,
          "meta_epsilon_fraction must lie in (0, 1]");
  require(0.0 <= controller_epsilon_end && controller_epsilon_end <= controller_epsilon_start &&
              controller_epsilon_start <= 1.0,
          "controller epsilon needs 0 <= end <= start <= 1");
  require(success_window >= 1, "success_window must be >= 1");
  require(flat_epsilon >= 0.0 && flat_epsilon <= 1.0, "flat_epsilon must lie in [0, 1]");
  require(std::isfinite(q_init), "q_init must be finite");
}

nlohmann::ordered_json to_json(const RunConfig& c) {
  nlohmann::ordered_json j;
  j["mode"] = to_string(c.mode);
  j["seed"] = c.seed;
  j["total_steps"] = c.total_steps;
  j["episode_cap"] = c.env.episode_cap;
  j["slip_probability"] = c.env.slip_probability;
  j["memory_capacity"] = c.memory_capacity;
  j["controller_memory_capacity"] = c.controller_memory_capacity;
  j["meta_memory_capacity"] = c.meta_memory_capacity;
  j["k"] = c.k;
  j["anomaly_threshold"] = c.anomaly_threshold;
  j["warmup_steps"] = c.warmup_steps;
  j["discovery_period"] = c.discovery_period;
  j["min_discovery_samples"] = c.min_discovery_samples;
  j["kmeans_max_iter"] = c.kmeans_max_iter;
  j["kmeans_tol"] = c.kmeans_tol;
  j["use_dissimilarity"] = c.use_dissimilarity;
  j["dissimilarity_threshold"] = c.dissimilarity_threshold;
  j["subgoal_timeout"] = c.subgoal_timeout;
  j["alpha"] = c.alpha;
  j["gamma"] = c.gamma;
  j["batch_size"] = c.batch_size;
  j["q_init"] = c.q_init;
  j["meta_epsilon_start"] = c.meta_epsilon_start;
  j["meta_epsilon_end"] = c.meta_epsilon_end;
  j["meta_epsilon_fraction"] = c.meta_epsilon_fraction;
  j["controller_epsilon_start"] = c.controller_epsilon_start;
  j["controller_epsilon_end"] = c.controller_epsilon_end;
  j["success_window"] = c.success_window;
  j["flat_epsilon"] = c.flat_epsilon;
  j["flat_tie_break"] = c.flat_tie_break == TieBreak::First ? "first" : "random";
  return j;
}

RunConfig run_config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("run config must be a JSON object");
  const auto known = to_json(RunConfig{});
  for (const auto& [key, value] : j.items())
    if (!known.contains(key)) throw std::invalid_argument("unknown config key: " + key);
  RunConfig c;
  auto get = [&j](const char* key, auto& field) {
    if (j.contains(key)) j.at(key).get_to(field);
  };
  if (j.contains("mode")) c.mode = mode_from_string(j.at("mode").get<std::string>());
  get("seed", c.seed);
  get("total_steps", c.total_steps);
  get("episode_cap", c.env.episode_cap);
  get("slip_probability", c.env.slip_probability);
  get("memory_capacity", c.memory_capacity);
  get("controller_memory_capacity", c.controller_memory_capacity);
  get("meta_memory_capacity", c.meta_memory_capacity);
  get("k", c.k);
  get("anomaly_threshold", c.anomaly_threshold);
  get("warmup_steps", c.warmup_steps);
  get("discovery_period", c.discovery_period);
  get("min_discovery_samples", c.min_discovery_samples);
  get("kmeans_max_iter", c.kmeans_max_iter);
  get("kmeans_tol", c.kmeans_tol);
  get("use_dissimilarity", c.use_dissimilarity);
  get("dissimilarity_threshold", c.dissimilarity_threshold);
  get("subgoal_timeout", c.subgoal_timeout);
  get("alpha", c.alpha);
  get("gamma", c.gamma);
  get("batch_size", c.batch_size);
  get("q_init", c.q_init);
  get("meta_epsilon_start", c.meta_epsilon_start);
  get("meta_epsilon_end", c.meta_epsilon_end);
  get("meta_epsilon_fraction", c.meta_epsilon_fraction);
  get("controller_epsilon_start", c.controller_epsilon_start);
  get("controller_epsilon_end", c.controller_epsilon_end);
  get("success_window", c.success_window);
  get("flat_epsilon", c.flat_epsilon);
  if (j.contains("flat_tie_break")) {
    const auto tb = j.at("flat_tie_break").get<std::string>();
    if (tb != "first" && tb != "random") throw std::invalid_argument("flat_tie_break: " + tb);
    c.flat_tie_break = tb == "first" ? TieBreak::First : TieBreak::Random;
  }
  return c;
}

void write_metrics_csv(std::ostream& out, std::span<const MetricsRecord> records) {
  out << "episode,steps,return,coverage,success_rate,num_subgoals\n";
  for (const MetricsRecord& m : records)
    out << m.episode << ',' << m.steps << ',' << format_double(m.ret) << ','
        << format_double(m.coverage) << ',' << format_double(m.success_rate) << ','
        << m.num_subgoals << '\n';
}

std::vector<MetricsRecord> read_metrics_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("metrics csv: empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "episode,steps,return,coverage,success_rate,num_subgoals")
    throw std::runtime_error("metrics csv: unexpected header '" + line + "'");
  std::vector<MetricsRecord> records;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::vector<std::string> f;
    for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
    if (f.size() != 6) throw std::runtime_error("metrics csv: bad row '" + line + "'");
    MetricsRecord m;
    m.episode = std::stoul(f[0]);
    m.steps = std::stoul(f[1]);
    m.ret = std::stod(f[2]);
    m.coverage = std::stod(f[3]);
    m.success_rate = std::stod(f[4]);
    m.num_subgoals = std::stoul(f[5]);
    records.push_back(m);
  }
  return records;
}

double coverage(std::span<const Cell> visited, const RoomsLayout& layout) {
  std::vector<bool> seen(layout.num_playable(), false);
  std::size_t count = 0;
  for (const Cell& c : visited) {
    if (!layout.is_playable(c)) continue;
    const std::size_t i = layout.cell_index(c);
    if (!seen[i]) {
      seen[i] = true;
      ++count;
    }
  }
  return static_cast<double>(count) / static_cast<double>(layout.num_playable());
}

std::vector<double> moving_average(std::span<const double> series, std::size_t window) {
  if (window == 0) throw std::invalid_argument("moving_average: window must be >= 1");
  std::vector<double> out(series.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < series.size(); ++i) {
    sum += series[i];
    if (i >= window) sum -= series[i - window];
    out[i] = sum / static_cast<double>(std::min(window, i + 1));
  }
  return out;
}

// --- Trainer ---

Trainer::Trainer(RunConfig config, RoomsLayout layout)
    : config_(validated(config)),
      env_(std::move(layout), config_.env, config_.seed ^ 0x9e3779b97f4a7c15ULL),
      rng_(config_.seed),
      memory_(config_.memory_capacity),
      controller_memory_(config_.controller_memory_capacity),
      meta_memory_(config_.meta_memory_capacity),
      controller_(env_.layout().num_states(), 0, config_.q_init),
      meta_(env_.layout().num_states(), 0, config_.q_init),
      flat_(env_.layout().num_states(), config_.q_init),
      controller_eps_(config_.controller_epsilon_start, config_.controller_epsilon_end,
                      config_.success_window),
      meta_eps_(config_.meta_epsilon_start, config_.meta_epsilon_end,
                std::max<std::size_t>(1, static_cast<std::size_t>(config_.meta_epsilon_fraction *
                                                                   static_cast<double>(
                                                                       config_.total_steps)))),
      visited_(env_.layout().num_playable(), false) {
  const GridState s = env_.reset();
  visited_[env_.layout().cell_index(s.cell())] = true;
  visited_count_ = 1;
  started_ = now_seconds();
}

Action Trainer::random_action() {
  std::uniform_int_distribution<std::size_t> pick(0, kNumActions - 1);
  return action_from_index(pick(rng_));
}

Trainer::StepInfo Trainer::env_step(Action a) {
  const GridState from = env_.state();
  const StepOutcome out = env_.step(a);
  memory_.push({from, a, out.reward, out.next_state, out.terminal});
  return {out, from};
}

void Trainer::after_step(const StepOutcome& out) {
  ++step_;
  const std::size_t ci = env_.layout().cell_index(out.next_state.cell());
  if (!visited_[ci]) {
    visited_[ci] = true;
    ++visited_count_;
  }
  episode_return_ += out.reward;
  if (out.terminal || out.truncated) {
    MetricsRecord m;
    m.episode = episode_++;
    m.steps = step_;
    m.ret = episode_return_;
    m.coverage = static_cast<double>(visited_count_) /
                 static_cast<double>(env_.layout().num_playable());
    if (!recent_attempts_.empty())
      m.success_rate =
          static_cast<double>(std::count(recent_attempts_.begin(), recent_attempts_.end(), true)) /
          static_cast<double>(recent_attempts_.size());
    m.num_subgoals = subgoals_.size();
    m.wall_clock = now_seconds() - started_;
    metrics_.push_back(m);
    episode_return_ = 0.0;
    env_.reset();
  }
  if (config_.mode == Mode::RandomMetaHrl || config_.mode == Mode::UnifiedHrl) maybe_discover();
}

bool Trainer::discovery_due() const {
  return step_ >= config_.warmup_steps &&
         (step_ - config_.warmup_steps) % config_.discovery_period == 0;
}

void Trainer::maybe_discover() {
  if (discovery_due()) discover_now();
}

bool Trainer::discover_now() {
  DiscoveryOptions opts;
  opts.k = config_.k;
  opts.anomaly_threshold = config_.anomaly_threshold;
  opts.min_samples = config_.min_discovery_samples;
  opts.max_iter = config_.kmeans_max_iter;
  opts.tol = config_.kmeans_tol;
  opts.use_dissimilarity = config_.use_dissimilarity;
  opts.dissimilarity_threshold = config_.dissimilarity_threshold;
  const std::vector<Transition> snapshot = memory_.snapshot();
  try {
    install_subgoals(discover(snapshot, opts, rng_));
  } catch (const InsufficientMemory&) {
    ++stats_.failed_discoveries;
    return false;
  }
  stats_.discovery_steps.push_back(step_);
  return true;
}

void Trainer::install_subgoals(const SubgoalSet& discovered) {
  MergeResult res = merge(subgoals_, discovered);
  subgoals_ = std::move(res.merged);
  controller_.resize_subgoals(subgoals_.size());
  meta_.resize_subgoals(subgoals_.size());
}

SubgoalAttempt Trainer::attempt_subgoal(SubgoalId g, std::optional<double> epsilon_override) {
  if (!subgoals_.contains(g)) throw std::out_of_range("attempt_subgoal: unknown subgoal");
  const RoomsLayout& layout = env_.layout();
  SubgoalAttempt att;
  att.g = g;
  att.start = env_.state();
  att.end = att.start;
  bool complete = false;
  while (step_ < config_.total_steps) {
    const double eps = epsilon_override.value_or(controller_eps_.epsilon(g));
    const GridState s = env_.state();
    const Action a = select_action(controller_, layout.state_index(s), g, eps, rng_);
    const StepOutcome out = env_step(a).outcome;
    const CriticResult critic = intrinsic_critic(out.next_state, g, subgoals_);

    controller_memory_.push(
        {s, g, a, critic.reward, out.next_state, critic.attained || out.terminal});
    ++stats_.controller_transitions;
    const auto batch = controller_memory_.sample(config_.batch_size, rng_);
    update_controller(controller_, batch, layout, config_.alpha, config_.gamma);

    att.rewards.push_back(out.reward);
    ++att.steps;
    ++stats_.controller_steps;
    att.end = out.next_state;
    att.attained = critic.attained;
    att.env_terminal = out.terminal;
    att.interrupted = out.truncated && !critic.attained;
    after_step(out);
    if (critic.attained || out.terminal || out.truncated || att.steps >= config_.subgoal_timeout) {
      complete = true;
      break;
    }
  }
  if (!complete) return att;

  ++stats_.subgoal_attempts;
  stats_.subgoal_successes += att.attained;
  controller_eps_.record(g, att.attained);
  recent_attempts_.push_back(att.attained);
  if (recent_attempts_.size() > config_.success_window) recent_attempts_.pop_front();

  const MetaTransition mt =
      make_meta_transition(att.start, g, att.rewards, config_.gamma, att.end, att.env_terminal);
  double direct = 0.0;
  for (std::size_t i = 0; i < att.rewards.size(); ++i)
    direct += std::pow(config_.gamma, static_cast<double>(i)) * att.rewards[i];
  if (std::abs(direct - mt.G) > 1e-9 * std::max(1.0, std::abs(direct)))
    throw std::logic_error("meta transition return does not match its reward slice");
  meta_memory_.push(mt);
  ++stats_.meta_transitions;
  if (config_.mode == Mode::UnifiedHrl) {
    const auto batch = meta_memory_.sample(config_.batch_size, rng_);
    update_meta(meta_, batch, layout, config_.alpha, config_.gamma);
  }
  return att;
}

void Trainer::run_random_walk() {
  while (step_ < config_.total_steps) after_step(env_step(random_action()).outcome);
}

void Trainer::run_flat() {
  const RoomsLayout& layout = env_.layout();
  std::uniform_real_distribution<double> u(0.0, 1.0);
  while (step_ < config_.total_steps) {
    const auto row = flat_.row(layout.state_index(env_.state()));
    Action a;
    if (config_.flat_epsilon > 0.0 && u(rng_) < config_.flat_epsilon)
      a = random_action();
    else if (config_.flat_tie_break == TieBreak::First)
      a = action_from_index(argmax_first(row));
    else
      a = action_from_index(argmax_random_tie(row, rng_));
    const StepOutcome out = env_step(a).outcome;
    const auto batch = memory_.sample(config_.batch_size, rng_);
    flat_q_update(flat_, batch, layout, config_.alpha, config_.gamma);
    after_step(out);
  }
}

void Trainer::run_hrl() {
  const RoomsLayout& layout = env_.layout();
  while (step_ < config_.total_steps) {
    if (subgoals_.empty()) {
      after_step(env_step(random_action()).outcome);
      ++stats_.warmup_steps;
      continue;
    }
    SubgoalId g;
    if (config_.mode == Mode::UnifiedHrl) {
      g = select_subgoal(meta_, layout.state_index(env_.state()), meta_eps_.value(step_), rng_);
    } else {
      std::uniform_int_distribution<std::size_t> pick(0, subgoals_.size() - 1);
      g = static_cast<SubgoalId>(pick(rng_));
    }
    attempt_subgoal(g);
  }
}

RunArtifacts Trainer::run() {
  switch (config_.mode) {
    case Mode::RandomWalk: run_random_walk(); break;
    case Mode::FlatQ: run_flat(); break;
    case Mode::RandomMetaHrl:
    case Mode::UnifiedHrl: run_hrl(); break;
  }
  RunArtifacts art;
  art.config = config_;
  art.metrics = metrics_;
  art.controller = controller_;
  art.meta = meta_;
  art.flat = flat_;
  art.subgoals = subgoals_;
  art.memory = memory_.snapshot();
  for (std::size_t i = 0; i < visited_.size(); ++i)
    if (visited_[i]) art.visited.push_back(env_.layout().playable_cells()[i]);
  art.stats = stats_;
  return art;
}

RunArtifacts run(const RunConfig& config, const RoomsLayout& layout) {
  Trainer trainer(config, layout);
  return trainer.run();
}

EvalResult evaluate_hrl(const RoomsLayout& layout, const EnvConfig& env_config,
                        const SubgoalSet& subgoals, const ControllerTable& controller,
                        const MetaTable& meta, int subgoal_timeout, std::uint64_t seed) {
  if (subgoals.empty()) throw std::invalid_argument("evaluate_hrl: empty subgoal set");
  if (controller.num_subgoals() < subgoals.size() || meta.num_subgoals() < subgoals.size())
    throw std::invalid_argument("evaluate_hrl: tables do not cover the subgoal set");
  RoomsEnv env(layout, env_config, seed);
  Rng rng(seed);
  EvalResult res;
  GridState s = env.reset();
  res.trajectory.push_back(s);
  while (!env.episode_over()) {
    const SubgoalId g = select_subgoal(meta, layout.state_index(s), 0.0, rng);
    res.subgoal_path.push_back(g);
    for (int t = 0; t < subgoal_timeout && !env.episode_over(); ++t) {
      const Action a = select_action(controller, layout.state_index(s), g, 0.0, rng);
      const StepOutcome out = env.step(a);
      s = out.next_state;
      res.ret += out.reward;
      ++res.steps;
      res.trajectory.push_back(s);
      res.solved = res.solved || out.terminal;
      if (intrinsic_critic(s, g, subgoals).attained) break;
    }
  }
  return res;
}

EvalResult evaluate_flat(const RoomsLayout& layout, const EnvConfig& env_config,
                         const FlatTable& table) {
  RoomsEnv env(layout, env_config);
  EvalResult res;
  GridState s = env.reset();
  res.trajectory.push_back(s);
  while (!env.episode_over()) {
    const StepOutcome out = env.step(action_from_index(argmax_first(table.row(layout.state_index(s)))));
    s = out.next_state;
    res.ret += out.reward;
    ++res.steps;
    res.trajectory.push_back(s);
    res.solved = res.solved || out.terminal;
  }
  return res;
}

}  // namespace hrl
