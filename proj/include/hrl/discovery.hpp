#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "hrl/memory.hpp"
#include "hrl/rooms_env.hpp"

namespace hrl {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
  bool operator==(const Point2&) const = default;
};

inline Point2 to_point(Cell c) { return {static_cast<double>(c.x), static_cast<double>(c.y)}; }
double squared_distance(Point2 a, Point2 b);
double distance(Point2 a, Point2 b);

struct KMeansResult {
  std::vector<Point2> centroids;
  std::vector<std::size_t> assignment;  // cluster index per input point
  // Sum of squared distances after every Lloyd iteration, in order.
  std::vector<double> distortion_history;
  std::size_t iterations = 0;
  bool converged = false;

  double distortion() const { return distortion_history.empty() ? 0.0 : distortion_history.back(); }
};

/// Lloyd's algorithm with k-means++ seeding. An empty cluster is repaired by moving its
/// centroid onto the point farthest from its current centroid.
///
/// Throws std::invalid_argument when k == 0, when there are fewer points than k, or when
/// there are fewer distinct points than k (distinct centroids would be impossible).
/// Throws std::logic_error if distortion ever increases between iterations.
KMeansResult kmeans_fit(std::span<const Point2> points, std::size_t k, Rng& rng,
                        std::size_t max_iter = 100, double tol = 1e-6);

/// Index of the nearest centroid, lowest index on ties.
std::size_t nearest_index(Point2 p, std::span<const Point2> centroids);

/// Reward z-score |r_i - mean| / (std + eps) per transition. All zeros when every reward
/// is identical. Throws std::invalid_argument for fewer than 2 transitions.
std::vector<double> anomaly_scores(std::span<const Transition> memory);

/// Distance of each s' to its nearest centroid divided by the mean such distance over the
/// memory. Zeros when that mean is zero. Throws std::invalid_argument if centroids is empty.
std::vector<double> dissimilarity_scores(std::span<const Transition> memory,
                                         std::span<const Point2> centroids);

struct Centroid {
  SubgoalId id = 0;
  Point2 position;
};

struct AnomalySubgoal {
  GridState state;
  double score = 0.0;
};

/// The subgoal set G. Centroids hold ids [0, K); anomalies follow with ids K, K+1, ...
struct SubgoalSet {
  std::vector<Centroid> centroids;
  std::vector<AnomalySubgoal> anomalies;
  double anomaly_threshold = 3.0;
  std::size_t source_size = 0;

  std::size_t k() const { return centroids.size(); }
  std::size_t size() const { return centroids.size() + anomalies.size(); }
  bool empty() const { return size() == 0; }
  bool contains(SubgoalId g) const { return g >= 0 && static_cast<std::size_t>(g) < size(); }
  bool is_centroid(SubgoalId g) const {
    return g >= 0 && static_cast<std::size_t>(g) < centroids.size();
  }
  const AnomalySubgoal& anomaly(SubgoalId g) const {
    return anomalies.at(static_cast<std::size_t>(g) - centroids.size());
  }
  std::vector<Point2> centroid_positions() const;
  /// Id of the anomaly whose state equals s, if any.
  std::optional<SubgoalId> find_anomaly(const GridState& s) const;
  std::string describe(SubgoalId g) const;
};

/// Raised when the memory is too small to run discovery; the trainer retries later.
class InsufficientMemory : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DiscoveryOptions {
  std::size_t k = 4;
  double anomaly_threshold = 3.0;
  std::size_t min_samples = 32;
  std::size_t max_iter = 100;
  double tol = 1e-6;
  // Adds s' of transitions whose dissimilarity score exceeds the threshold as anomalies.
  bool use_dissimilarity = false;
  double dissimilarity_threshold = 3.0;
};

/// K-means over s' coordinates plus reward anomalies, deduplicated by state in order of
/// first appearance. Throws InsufficientMemory when |memory| < max(k, min_samples) or the
/// memory visits fewer than k distinct cells.
SubgoalSet discover(std::span<const Transition> memory, const DiscoveryOptions& options, Rng& rng);

struct MergeResult {
  SubgoalSet merged;
  // merged id assigned to each subgoal of the freshly discovered set (centroids first).
  std::vector<SubgoalId> discovered_to_merged;
  std::size_t fresh_ids = 0;
};

/// Carries subgoal ids across rediscovery. Each new centroid takes the id of an old centroid
/// via greedy one-to-one matching by ascending distance. Old anomalies keep their ids (and
/// stay in the set even if not rediscovered); new anomalies not already present are appended.
/// Every old id therefore survives unchanged, so value tables only grow.
/// Throws std::invalid_argument if both sets are non-empty with different K.
MergeResult merge(const SubgoalSet& old_set, const SubgoalSet& discovered);

nlohmann::ordered_json to_json(const SubgoalSet& set);
SubgoalSet subgoals_from_json(const nlohmann::json& j);

}  // namespace hrl
