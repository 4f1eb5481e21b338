#include "hrl/memory.hpp"

#include <istream>
#include <ostream>
#include <string>

#include <json.hpp>

namespace hrl {

double accumulate_return(std::span<const double> rewards, double gamma) {
  if (rewards.empty()) throw std::invalid_argument("accumulate_return: empty reward sequence");
  if (!(gamma > 0.0 && gamma <= 1.0))
    throw std::invalid_argument("accumulate_return: gamma must lie in (0, 1]");
  double g = 0.0;
  for (auto it = rewards.rbegin(); it != rewards.rend(); ++it) g = *it + gamma * g;
  return g;
}

MetaTransition make_meta_transition(const GridState& s0, SubgoalId g,
                                    std::span<const double> rewards, double gamma,
                                    const GridState& s_end, bool terminal) {
  MetaTransition m;
  m.s0 = s0;
  m.g = g;
  m.G = accumulate_return(rewards, gamma);
  m.s_end = s_end;
  m.duration = static_cast<int>(rewards.size());
  m.terminal = terminal;
  return m;
}

void write_transitions_jsonl(std::ostream& out, std::span<const Transition> records) {
  for (const Transition& t : records) {
    nlohmann::ordered_json j;
    j["x"] = t.s.x;
    j["y"] = t.s.y;
    j["has_key"] = t.s.has_key;
    j["action"] = index_of(t.a);
    j["reward"] = t.r;
    j["x'"] = t.s_next.x;
    j["y'"] = t.s_next.y;
    j["has_key'"] = t.s_next.has_key;
    j["terminal"] = t.terminal;
    out << j.dump() << '\n';
  }
}

std::vector<Transition> read_transitions_jsonl(std::istream& in, std::size_t max_records) {
  std::vector<Transition> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (records.size() >= max_records)
      throw std::runtime_error("memory snapshot exceeds " + std::to_string(max_records) +
                               " records");
    try {
      const auto j = nlohmann::json::parse(line);
      Transition t;
      t.s = {j.at("x").get<int>(), j.at("y").get<int>(), j.at("has_key").get<bool>()};
      t.a = action_from_index(j.at("action").get<std::size_t>());
      t.r = j.at("reward").get<double>();
      t.s_next = {j.at("x'").get<int>(), j.at("y'").get<int>(), j.at("has_key'").get<bool>()};
      t.terminal = j.at("terminal").get<bool>();
      records.push_back(t);
    } catch (const std::exception& e) {
      throw std::runtime_error("memory snapshot line " + std::to_string(line_no) + ": " +
                               e.what());
    }
  }
  return records;
}

}  // namespace hrl
