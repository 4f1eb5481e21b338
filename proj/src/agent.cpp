#include "hrl/agent.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace hrl {

namespace {

void check_step_sizes(double alpha, double gamma) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha must lie in [0, 1]");
  if (!(gamma > 0.0 && gamma <= 1.0)) throw std::invalid_argument("gamma must lie in (0, 1]");
}

double max_of(std::span<const double> v) { return *std::max_element(v.begin(), v.end()); }

std::string format_value(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::vector<std::string>> read_rows(std::istream& in, std::size_t columns) {
  std::vector<std::vector<std::string>> rows;
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("table csv: missing header");
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    for (std::string f; std::getline(ss, f, ',');) fields.push_back(f);
    if (fields.size() != columns) throw std::runtime_error("table csv: bad row '" + line + "'");
    rows.push_back(std::move(fields));
  }
  return rows;
}

}  // namespace

// --- ControllerTable ---

ControllerTable::ControllerTable(std::size_t num_states, std::size_t num_subgoals, double init)
    : num_states_(num_states),
      num_subgoals_(num_subgoals),
      init_(init),
      values_(num_states * num_subgoals * kNumActions, init) {}

void ControllerTable::resize_subgoals(std::size_t n) {
  if (n < num_subgoals_) throw std::invalid_argument("ControllerTable cannot shrink");
  num_subgoals_ = n;
  values_.resize(num_states_ * num_subgoals_ * kNumActions, init_);
}

std::size_t ControllerTable::offset(std::size_t state, SubgoalId g) const {
  if (g < 0 || static_cast<std::size_t>(g) >= num_subgoals_)
    throw std::out_of_range("controller table: unknown subgoal " + std::to_string(g));
  if (state >= num_states_) throw std::out_of_range("controller table: state out of range");
  return (static_cast<std::size_t>(g) * num_states_ + state) * kNumActions;
}

double& ControllerTable::at(std::size_t state, SubgoalId g, Action a) {
  return values_[offset(state, g) + index_of(a)];
}
double ControllerTable::at(std::size_t state, SubgoalId g, Action a) const {
  return values_[offset(state, g) + index_of(a)];
}
std::span<const double> ControllerTable::row(std::size_t state, SubgoalId g) const {
  return {values_.data() + offset(state, g), kNumActions};
}
std::span<double> ControllerTable::row(std::size_t state, SubgoalId g) {
  return {values_.data() + offset(state, g), kNumActions};
}

// --- MetaTable ---

MetaTable::MetaTable(std::size_t num_states, std::size_t num_subgoals, double init)
    : num_states_(num_states),
      num_subgoals_(num_subgoals),
      init_(init),
      values_(num_states * num_subgoals, init) {}

void MetaTable::resize_subgoals(std::size_t n) {
  if (n < num_subgoals_) throw std::invalid_argument("MetaTable cannot shrink");
  std::vector<double> grown(num_states_ * n, init_);
  for (std::size_t s = 0; s < num_states_; ++s)
    std::copy_n(values_.begin() + static_cast<std::ptrdiff_t>(s * num_subgoals_), num_subgoals_,
                grown.begin() + static_cast<std::ptrdiff_t>(s * n));
  values_ = std::move(grown);
  num_subgoals_ = n;
}

double& MetaTable::at(std::size_t state, SubgoalId g) {
  if (g < 0 || static_cast<std::size_t>(g) >= num_subgoals_)
    throw std::out_of_range("meta table: unknown subgoal " + std::to_string(g));
  return row(state)[static_cast<std::size_t>(g)];
}
double MetaTable::at(std::size_t state, SubgoalId g) const {
  if (g < 0 || static_cast<std::size_t>(g) >= num_subgoals_)
    throw std::out_of_range("meta table: unknown subgoal " + std::to_string(g));
  return row(state)[static_cast<std::size_t>(g)];
}
std::span<const double> MetaTable::row(std::size_t state) const {
  if (state >= num_states_) throw std::out_of_range("meta table: state out of range");
  return {values_.data() + state * num_subgoals_, num_subgoals_};
}
std::span<double> MetaTable::row(std::size_t state) {
  if (state >= num_states_) throw std::out_of_range("meta table: state out of range");
  return {values_.data() + state * num_subgoals_, num_subgoals_};
}

// --- FlatTable ---

FlatTable::FlatTable(std::size_t num_states, double init)
    : num_states_(num_states), values_(num_states * kNumActions, init) {}

double& FlatTable::at(std::size_t state, Action a) { return row(state)[index_of(a)]; }
double FlatTable::at(std::size_t state, Action a) const { return row(state)[index_of(a)]; }
std::span<const double> FlatTable::row(std::size_t state) const {
  if (state >= num_states_) throw std::out_of_range("flat table: state out of range");
  return {values_.data() + state * kNumActions, kNumActions};
}
std::span<double> FlatTable::row(std::size_t state) {
  if (state >= num_states_) throw std::out_of_range("flat table: state out of range");
  return {values_.data() + state * kNumActions, kNumActions};
}

// --- exploration ---

EpsilonSchedule::EpsilonSchedule(double start_, double end_, std::size_t horizon_)
    : start(start_), end(end_), horizon(horizon_) {
  if (!(0.0 <= end && end <= start && start <= 1.0))
    throw std::invalid_argument("epsilon schedule needs 0 <= end <= start <= 1");
  if (horizon == 0) throw std::invalid_argument("epsilon schedule horizon must be >= 1");
}

double EpsilonSchedule::value(std::size_t t) const {
  const double frac = std::min(1.0, static_cast<double>(t) / static_cast<double>(horizon));
  return std::max(end, start - (start - end) * frac);
}

SubgoalEpsilon::SubgoalEpsilon(double start, double end, std::size_t window)
    : start_(start), end_(end), window_(window) {
  if (!(0.0 <= end && end <= start && start <= 1.0))
    throw std::invalid_argument("subgoal epsilon needs 0 <= end <= start <= 1");
  if (window == 0) throw std::invalid_argument("success window must be >= 1");
}

void SubgoalEpsilon::record(SubgoalId g, bool success) {
  if (g < 0) throw std::out_of_range("negative subgoal id");
  const auto idx = static_cast<std::size_t>(g);
  if (idx >= history_.size()) history_.resize(idx + 1);
  auto& h = history_[idx];
  h.push_back(success);
  if (h.size() > window_) h.pop_front();
}

double SubgoalEpsilon::success_rate(SubgoalId g) const {
  if (g < 0 || static_cast<std::size_t>(g) >= history_.size()) return 0.0;
  const auto& h = history_[static_cast<std::size_t>(g)];
  if (h.empty()) return 0.0;
  return static_cast<double>(std::count(h.begin(), h.end(), true)) / static_cast<double>(h.size());
}

double SubgoalEpsilon::epsilon(SubgoalId g) const {
  return start_ - (start_ - end_) * success_rate(g);
}

std::size_t argmax_random_tie(std::span<const double> values, Rng& rng) {
  if (values.empty()) throw std::invalid_argument("argmax of an empty row");
  const double best = max_of(values);
  std::size_t ties = 0;
  for (double v : values) ties += v == best;
  if (ties == 1) return argmax_first(values);
  std::uniform_int_distribution<std::size_t> pick(0, ties - 1);
  std::size_t nth = pick(rng);
  for (std::size_t i = 0; i < values.size(); ++i)
    if (values[i] == best && nth-- == 0) return i;
  return 0;
}

std::size_t argmax_first(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("argmax of an empty row");
  return static_cast<std::size_t>(std::max_element(values.begin(), values.end()) - values.begin());
}

std::size_t epsilon_greedy(std::span<const double> values, double eps, Rng& rng) {
  if (values.empty()) throw std::invalid_argument("epsilon_greedy over an empty row");
  std::uniform_real_distribution<double> u(0.0, 1.0);
  if (eps > 0.0 && u(rng) < eps) {
    std::uniform_int_distribution<std::size_t> pick(0, values.size() - 1);
    return pick(rng);
  }
  return argmax_random_tie(values, rng);
}

SubgoalId select_subgoal(const MetaTable& table, std::size_t state, double eps, Rng& rng) {
  if (table.num_subgoals() == 0) throw std::invalid_argument("select_subgoal: empty subgoal set");
  return static_cast<SubgoalId>(epsilon_greedy(table.row(state), eps, rng));
}

Action select_action(const ControllerTable& table, std::size_t state, SubgoalId g, double eps,
                     Rng& rng) {
  return action_from_index(epsilon_greedy(table.row(state, g), eps, rng));
}

CriticResult intrinsic_critic(const GridState& s_next, SubgoalId g, const SubgoalSet& subgoals) {
  if (!subgoals.contains(g)) throw std::out_of_range("intrinsic_critic: unknown subgoal");
  bool attained = false;
  if (subgoals.is_centroid(g)) {
    const std::vector<Point2> centroids = subgoals.centroid_positions();
    attained = nearest_index(to_point(s_next.cell()), centroids) == static_cast<std::size_t>(g);
  } else {
    attained = subgoals.anomaly(g).state == s_next;
  }
  return {attained, attained ? 1.0 : 0.0};
}

void update_controller(ControllerTable& table, std::span<const ControllerTransition> batch,
                       const RoomsLayout& layout, double alpha, double gamma) {
  check_step_sizes(alpha, gamma);
  for (const ControllerTransition& t : batch) {
    double target = t.r_intrinsic;
    if (!t.attained_or_terminal)
      target += gamma * max_of(table.row(layout.state_index(t.s_next), t.g));
    double& q = table.at(layout.state_index(t.s), t.g, t.a);
    q += alpha * (target - q);
  }
}

void update_meta(MetaTable& table, std::span<const MetaTransition> batch,
                 const RoomsLayout& layout, double alpha, double gamma) {
  check_step_sizes(alpha, gamma);
  for (const MetaTransition& t : batch) {
    double target = t.G;
    if (!t.terminal)
      target += std::pow(gamma, t.duration) * max_of(table.row(layout.state_index(t.s_end)));
    double& q = table.at(layout.state_index(t.s0), t.g);
    q += alpha * (target - q);
  }
}

void flat_q_update(FlatTable& table, std::span<const Transition> batch, const RoomsLayout& layout,
                   double alpha, double gamma) {
  check_step_sizes(alpha, gamma);
  for (const Transition& t : batch) {
    double target = t.r;
    if (!t.terminal) target += gamma * max_of(table.row(layout.state_index(t.s_next)));
    double& q = table.at(layout.state_index(t.s), t.a);
    q += alpha * (target - q);
  }
}

void write_csv(std::ostream& out, const ControllerTable& table) {
  out << "state,subgoal,action,value\n";
  for (std::size_t s = 0; s < table.num_states(); ++s)
    for (std::size_t g = 0; g < table.num_subgoals(); ++g)
      for (Action a : kAllActions)
        out << s << ',' << g << ',' << index_of(a) << ','
            << format_value(table.at(s, static_cast<SubgoalId>(g), a)) << '\n';
}

void write_csv(std::ostream& out, const MetaTable& table) {
  out << "state,subgoal,value\n";
  for (std::size_t s = 0; s < table.num_states(); ++s)
    for (std::size_t g = 0; g < table.num_subgoals(); ++g)
      out << s << ',' << g << ',' << format_value(table.at(s, static_cast<SubgoalId>(g))) << '\n';
}

void write_csv(std::ostream& out, const FlatTable& table) {
  out << "state,action,value\n";
  for (std::size_t s = 0; s < table.num_states(); ++s)
    for (Action a : kAllActions)
      out << s << ',' << index_of(a) << ',' << format_value(table.at(s, a)) << '\n';
}

ControllerTable read_controller_csv(std::istream& in, std::size_t num_states) {
  const auto rows = read_rows(in, 4);
  std::size_t subgoals = 0;
  for (const auto& r : rows) subgoals = std::max<std::size_t>(subgoals, std::stoul(r[1]) + 1);
  ControllerTable table(num_states, subgoals);
  for (const auto& r : rows)
    table.at(std::stoul(r[0]), std::stoi(r[1]), action_from_index(std::stoul(r[2]))) =
        std::stod(r[3]);
  return table;
}

MetaTable read_meta_csv(std::istream& in, std::size_t num_states) {
  const auto rows = read_rows(in, 3);
  std::size_t subgoals = 0;
  for (const auto& r : rows) subgoals = std::max<std::size_t>(subgoals, std::stoul(r[1]) + 1);
  MetaTable table(num_states, subgoals);
  for (const auto& r : rows) table.at(std::stoul(r[0]), std::stoi(r[1])) = std::stod(r[2]);
  return table;
}

FlatTable read_flat_csv(std::istream& in, std::size_t num_states) {
  const auto rows = read_rows(in, 3);
  FlatTable table(num_states);
  for (const auto& r : rows)
    table.at(std::stoul(r[0]), action_from_index(std::stoul(r[1]))) = std::stod(r[2]);
  return table;
}

}  // namespace hrl
