#include "hrl/discovery.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <set>
#include <tuple>

namespace hrl {

double squared_distance(Point2 a, Point2 b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return dx * dx + dy * dy;
}

double distance(Point2 a, Point2 b) { return std::sqrt(squared_distance(a, b)); }

std::size_t nearest_index(Point2 p, std::span<const Point2> centroids) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < centroids.size(); ++i) {
    const double d = squared_distance(p, centroids[i]);
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

namespace {

std::size_t count_distinct(std::span<const Point2> points) {
  std::set<std::pair<double, double>> seen;
  for (const Point2& p : points) seen.emplace(p.x, p.y);
  return seen.size();
}

std::vector<Point2> kmeans_plus_plus(std::span<const Point2> points, std::size_t k, Rng& rng) {
  std::vector<Point2> centroids;
  centroids.reserve(k);
  std::uniform_int_distribution<std::size_t> first(0, points.size() - 1);
  centroids.push_back(points[first(rng)]);

  std::vector<double> d2(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) d2[i] = squared_distance(points[i], centroids[0]);

  while (centroids.size() < k) {
    const double total = std::accumulate(d2.begin(), d2.end(), 0.0);
    std::uniform_real_distribution<double> u(0.0, total);
    const double target = u(rng);
    double acc = 0.0;
    std::size_t chosen = points.size();
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (d2[i] <= 0.0) continue;
      acc += d2[i];
      chosen = i;
      if (acc >= target) break;
    }
    centroids.push_back(points[chosen]);
    for (std::size_t i = 0; i < points.size(); ++i)
      d2[i] = std::min(d2[i], squared_distance(points[i], centroids.back()));
  }
  return centroids;
}

}  // namespace

KMeansResult kmeans_fit(std::span<const Point2> points, std::size_t k, Rng& rng,
                        std::size_t max_iter, double tol) {
  if (k == 0) throw std::invalid_argument("kmeans_fit: k must be >= 1");
  if (points.size() < k) throw std::invalid_argument("kmeans_fit: fewer points than clusters");
  if (count_distinct(points) < k)
    throw std::invalid_argument("kmeans_fit: fewer distinct points than clusters");

  KMeansResult res;
  res.centroids = kmeans_plus_plus(points, k, rng);
  res.assignment.assign(points.size(), 0);

  std::vector<double> sum_x(k), sum_y(k);
  std::vector<std::size_t> count(k);
  for (std::size_t iter = 0; iter < max_iter; ++iter) {
    for (std::size_t i = 0; i < points.size(); ++i)
      res.assignment[i] = nearest_index(points[i], res.centroids);

    // Empty-cluster repair: steal the point with the largest residual.
    std::fill(count.begin(), count.end(), 0);
    for (std::size_t a : res.assignment) ++count[a];
    for (std::size_t c = 0; c < k; ++c) {
      if (count[c] != 0) continue;
      std::size_t far = 0;
      double far_d = -1.0;
      for (std::size_t i = 0; i < points.size(); ++i) {
        if (count[res.assignment[i]] <= 1) continue;
        const double d = squared_distance(points[i], res.centroids[res.assignment[i]]);
        if (d > far_d) {
          far_d = d;
          far = i;
        }
      }
      --count[res.assignment[far]];
      res.assignment[far] = c;
      count[c] = 1;
      res.centroids[c] = points[far];
    }

    std::fill(sum_x.begin(), sum_x.end(), 0.0);
    std::fill(sum_y.begin(), sum_y.end(), 0.0);
    for (std::size_t i = 0; i < points.size(); ++i) {
      sum_x[res.assignment[i]] += points[i].x;
      sum_y[res.assignment[i]] += points[i].y;
    }
    double shift = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
      const Point2 updated{sum_x[c] / static_cast<double>(count[c]),
                           sum_y[c] / static_cast<double>(count[c])};
      shift = std::max(shift, distance(updated, res.centroids[c]));
      res.centroids[c] = updated;
    }

    double distortion = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i)
      distortion += squared_distance(points[i], res.centroids[res.assignment[i]]);
    if (!res.distortion_history.empty()) {
      const double prev = res.distortion_history.back();
      if (distortion > prev + 1e-9 * std::max(1.0, prev))
        throw std::logic_error("kmeans_fit: distortion increased");
    }
    res.distortion_history.push_back(distortion);
    res.iterations = iter + 1;
    if (shift < tol) {
      res.converged = true;
      break;
    }
  }
  return res;
}

std::vector<double> anomaly_scores(std::span<const Transition> memory) {
  if (memory.size() < 2) throw std::invalid_argument("anomaly_scores: need at least 2 transitions");
  constexpr double kEps = 1e-12;
  const double n = static_cast<double>(memory.size());
  double mean = 0.0;
  for (const Transition& t : memory) mean += t.r;
  mean /= n;
  double var = 0.0;
  for (const Transition& t : memory) var += (t.r - mean) * (t.r - mean);
  const double sd = std::sqrt(var / n);

  std::vector<double> scores(memory.size(), 0.0);
  if (sd == 0.0) return scores;
  for (std::size_t i = 0; i < memory.size(); ++i)
    scores[i] = std::abs(memory[i].r - mean) / (sd + kEps);
  return scores;
}

std::vector<double> dissimilarity_scores(std::span<const Transition> memory,
                                         std::span<const Point2> centroids) {
  if (centroids.empty()) throw std::invalid_argument("dissimilarity_scores: no centroids");
  std::vector<double> scores(memory.size());
  double mean = 0.0;
  for (std::size_t i = 0; i < memory.size(); ++i) {
    const Point2 p = to_point(memory[i].s_next.cell());
    scores[i] = distance(p, centroids[nearest_index(p, centroids)]);
    mean += scores[i];
  }
  if (memory.empty()) return scores;
  mean /= static_cast<double>(memory.size());
  for (double& s : scores) s = mean > 0.0 ? s / mean : 0.0;
  return scores;
}

std::vector<Point2> SubgoalSet::centroid_positions() const {
  std::vector<Point2> out;
  out.reserve(centroids.size());
  for (const Centroid& c : centroids) out.push_back(c.position);
  return out;
}

std::optional<SubgoalId> SubgoalSet::find_anomaly(const GridState& s) const {
  for (std::size_t i = 0; i < anomalies.size(); ++i)
    if (anomalies[i].state == s) return static_cast<SubgoalId>(centroids.size() + i);
  return std::nullopt;
}

std::string SubgoalSet::describe(SubgoalId g) const {
  if (!contains(g)) return "invalid(" + std::to_string(g) + ")";
  char buf[96];
  if (is_centroid(g)) {
    const Point2 p = centroids[static_cast<std::size_t>(g)].position;
    std::snprintf(buf, sizeof buf, "centroid#%d(%.2f,%.2f)", g, p.x, p.y);
  } else {
    const GridState& s = anomaly(g).state;
    std::snprintf(buf, sizeof buf, "anomaly#%d(%d,%d,%s)", g, s.x, s.y, s.has_key ? "key" : "nokey");
  }
  return buf;
}

SubgoalSet discover(std::span<const Transition> memory, const DiscoveryOptions& options, Rng& rng) {
  if (options.k == 0) throw std::invalid_argument("discover: k must be >= 1");
  if (memory.size() < std::max({options.k, options.min_samples, std::size_t{2}}))
    throw InsufficientMemory("discover: memory holds " + std::to_string(memory.size()) +
                             " transitions");
  std::vector<Point2> points;
  points.reserve(memory.size());
  for (const Transition& t : memory) points.push_back(to_point(t.s_next.cell()));
  if (count_distinct(points) < options.k)
    throw InsufficientMemory("discover: memory visits fewer distinct cells than k");

  const KMeansResult km = kmeans_fit(points, options.k, rng, options.max_iter, options.tol);

  SubgoalSet set;
  set.anomaly_threshold = options.anomaly_threshold;
  set.source_size = memory.size();
  for (std::size_t c = 0; c < km.centroids.size(); ++c)
    set.centroids.push_back({static_cast<SubgoalId>(c), km.centroids[c]});

  auto add_anomaly = [&set](const GridState& s, double score) {
    for (AnomalySubgoal& a : set.anomalies)
      if (a.state == s) {
        a.score = std::max(a.score, score);
        return;
      }
    set.anomalies.push_back({s, score});
  };

  const std::vector<double> scores = anomaly_scores(memory);
  std::vector<double> dissim;
  if (options.use_dissimilarity) dissim = dissimilarity_scores(memory, km.centroids);
  for (std::size_t i = 0; i < memory.size(); ++i) {
    if (scores[i] > options.anomaly_threshold) add_anomaly(memory[i].s_next, scores[i]);
    if (options.use_dissimilarity && dissim[i] > options.dissimilarity_threshold)
      add_anomaly(memory[i].s_next, dissim[i]);
  }
  return set;
}

MergeResult merge(const SubgoalSet& old_set, const SubgoalSet& discovered) {
  MergeResult res;
  if (old_set.empty()) {
    res.merged = discovered;
    res.discovered_to_merged.resize(discovered.size());
    std::iota(res.discovered_to_merged.begin(), res.discovered_to_merged.end(), 0);
    res.fresh_ids = discovered.size();
    return res;
  }
  if (old_set.k() != discovered.k())
    throw std::invalid_argument("merge: K differs between subgoal sets");

  const std::size_t k = old_set.k();
  res.merged.anomaly_threshold = discovered.anomaly_threshold;
  res.merged.source_size = discovered.source_size;
  res.merged.centroids = old_set.centroids;
  res.discovered_to_merged.assign(discovered.size(), -1);

  // Greedy one-to-one matching over all (old, new) pairs by ascending distance.
  std::vector<std::tuple<double, std::size_t, std::size_t>> pairs;
  pairs.reserve(k * k);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j)
      pairs.emplace_back(
          squared_distance(old_set.centroids[i].position, discovered.centroids[j].position), i, j);
  std::sort(pairs.begin(), pairs.end());
  std::vector<bool> old_used(k, false), new_used(k, false);
  for (const auto& [d, i, j] : pairs) {
    if (old_used[i] || new_used[j]) continue;
    old_used[i] = new_used[j] = true;
    res.merged.centroids[i].position = discovered.centroids[j].position;
    res.discovered_to_merged[j] = static_cast<SubgoalId>(i);
  }

  res.merged.anomalies = old_set.anomalies;
  for (std::size_t j = 0; j < discovered.anomalies.size(); ++j) {
    const AnomalySubgoal& a = discovered.anomalies[j];
    std::optional<SubgoalId> id = res.merged.find_anomaly(a.state);
    if (id) {
      res.merged.anomalies[static_cast<std::size_t>(*id) - k].score = a.score;
    } else {
      id = static_cast<SubgoalId>(res.merged.size());
      res.merged.anomalies.push_back(a);
      ++res.fresh_ids;
    }
    res.discovered_to_merged[k + j] = *id;
  }
  return res;
}

nlohmann::ordered_json to_json(const SubgoalSet& set) {
  nlohmann::ordered_json j;
  j["k"] = set.k();
  j["anomaly_threshold"] = set.anomaly_threshold;
  j["source_size"] = set.source_size;
  j["num_subgoals"] = set.size();
  j["centroids"] = nlohmann::ordered_json::array();
  for (const Centroid& c : set.centroids)
    j["centroids"].push_back({{"id", c.id}, {"x", c.position.x}, {"y", c.position.y}});
  j["anomalies"] = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < set.anomalies.size(); ++i) {
    const AnomalySubgoal& a = set.anomalies[i];
    j["anomalies"].push_back({{"id", set.k() + i},
                              {"x", a.state.x},
                              {"y", a.state.y},
                              {"has_key", a.state.has_key},
                              {"score", a.score}});
  }
  return j;
}

SubgoalSet subgoals_from_json(const nlohmann::json& j) {
  SubgoalSet set;
  set.anomaly_threshold = j.at("anomaly_threshold").get<double>();
  set.source_size = j.at("source_size").get<std::size_t>();
  for (const auto& c : j.at("centroids")) {
    const auto id = c.at("id").get<SubgoalId>();
    if (id != static_cast<SubgoalId>(set.centroids.size()))
      throw std::runtime_error("subgoal json: centroid ids must be dense and ordered");
    set.centroids.push_back({id, {c.at("x").get<double>(), c.at("y").get<double>()}});
  }
  for (const auto& a : j.at("anomalies")) {
    if (a.at("id").get<std::size_t>() != set.size())
      throw std::runtime_error("subgoal json: anomaly ids must follow centroids densely");
    set.anomalies.push_back(
        {{a.at("x").get<int>(), a.at("y").get<int>(), a.at("has_key").get<bool>()},
         a.at("score").get<double>()});
  }
  if (j.at("k").get<std::size_t>() != set.k())
    throw std::runtime_error("subgoal json: k does not match centroid count");
  return set;
}

}  // namespace hrl
