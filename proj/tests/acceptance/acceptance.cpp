// Runs every acceptance criterion and prints one PASS/FAIL line per criterion.
// Exit status is non-zero if any criterion fails.

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "../support/fixtures.hpp"
#include "hrl/discovery.hpp"
#include "hrl/trainer.hpp"

using namespace hrl;

namespace {

constexpr std::uint64_t kSeeds[] = {0, 1, 2, 3, 4};

struct Summary {
  double coverage = 0.0;
  double final_return = 0.0;
};

Summary summarize(const RunArtifacts& a, const RoomsLayout& layout) {
  Summary s;
  s.coverage = coverage(a.visited, layout);
  const std::size_t n = std::min<std::size_t>(100, a.metrics.size());
  for (std::size_t i = a.metrics.size() - n; i < a.metrics.size(); ++i) s.final_return += a.metrics[i].ret;
  if (n) s.final_return /= static_cast<double>(n);
  return s;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
  std::atomic<std::size_t> next{0};
  const unsigned workers = std::max(1u, std::thread::hardware_concurrency());
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < std::min<std::size_t>(workers, n); ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) body(i);
    });
  for (auto& t : pool) t.join();
}

int failures = 0;

void report(int id, bool pass, const std::string& detail) {
  std::printf("%s criterion %d: %s\n", pass ? "PASS" : "FAIL", id, detail.c_str());
  std::fflush(stdout);
  failures += !pass;
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

}  // namespace

int main(int argc, char** argv) {
  const RoomsLayout layout = RoomsLayout::standard();

  struct Job {
    Mode mode;
    std::size_t steps;
    std::uint64_t seed;
    Summary result;
  };
  std::vector<Job> jobs;
  for (std::uint64_t s : kSeeds) {
    jobs.push_back({Mode::UnifiedHrl, 200'000, s, {}});
    jobs.push_back({Mode::FlatQ, 200'000, s, {}});
    jobs.push_back({Mode::UnifiedHrl, 100'000, s, {}});
    jobs.push_back({Mode::RandomMetaHrl, 100'000, s, {}});
    jobs.push_back({Mode::FlatQ, 100'000, s, {}});
  }
  parallel_for(jobs.size(), [&](std::size_t i) {
    RunConfig c;
    c.mode = jobs[i].mode;
    c.seed = jobs[i].seed;
    c.total_steps = jobs[i].steps;
    jobs[i].result = summarize(run(c, layout), layout);
  });
  auto results = [&](Mode m, std::size_t steps) {
    std::vector<Summary> out;
    for (const auto& j : jobs)
      if (j.mode == m && j.steps == steps) out.push_back(j.result);
    return out;
  };

  // 1. unified_hrl reaches full coverage within 200k steps on at least 4 of 5 seeds.
  {
    const auto u = results(Mode::UnifiedHrl, 200'000);
    int full = 0;
    std::string per;
    for (const auto& s : u) {
      full += s.coverage == 1.0;
      per += fmt(" %.4f", s.coverage);
    }
    report(1, full >= 4,
           "unified_hrl final coverage = 1.0 on " + std::to_string(full) + "/5 seeds (need >= 4);" + per);
  }

  // 2. Coverage ordering at a matched 100k budget.
  {
    auto mean = [](const std::vector<Summary>& v) {
      double m = 0.0;
      for (const auto& s : v) m += s.coverage;
      return m / static_cast<double>(v.size());
    };
    const double flat = mean(results(Mode::FlatQ, 100'000));
    const double rmeta = mean(results(Mode::RandomMetaHrl, 100'000));
    const double uni = mean(results(Mode::UnifiedHrl, 100'000));
    const bool pass = flat < rmeta && rmeta <= uni && rmeta - flat >= 0.10;
    report(2, pass,
           "mean coverage at 100k: flat_q " + fmt("%.4f", flat) + " < random_meta_hrl " +
               fmt("%.4f", rmeta) + " <= unified_hrl " + fmt("%.4f", uni) + ", gap " +
               fmt("%.4f", rmeta - flat) + " (need >= 0.10)");
  }

  // 3. Return separation over the final 100 episodes, majority vote over seeds.
  {
    const auto flat = results(Mode::FlatQ, 200'000);
    const auto uni = results(Mode::UnifiedHrl, 200'000);
    int votes = 0;
    std::string per;
    for (std::size_t i = 0; i < flat.size(); ++i) {
      const bool ok = flat[i].final_return <= 15.0 && uni[i].final_return >= 45.0;
      votes += ok;
      per += " (" + fmt("%.2f", flat[i].final_return) + ", " + fmt("%.2f", uni[i].final_return) + ")";
    }
    report(3, votes >= 3,
           "flat_q <= 15 and unified_hrl >= 45 on " + std::to_string(votes) +
               "/5 seeds (need >= 3); (flat, unified):" + per);
  }

  // 4. Discovery geometry on a full-coverage memory.
  {
    const auto memory = testing::uniform_memory(layout, 50'000, 0);
    Rng rng(0);
    DiscoveryOptions opts;
    opts.k = 4;
    const SubgoalSet g = discover(memory, opts, rng);
    const Point2 centers[4] = {{3, 3}, {9, 3}, {3, 9}, {9, 9}};
    std::set<Region> rooms;
    double worst = 0.0;
    bool in_rooms = g.k() == 4;
    for (const Point2& p : g.centroid_positions()) {
      const Cell c{static_cast<int>(std::lround(p.x)), static_cast<int>(std::lround(p.y))};
      if (!layout.is_playable(c) || is_doorway(layout.room_of(c))) {
        in_rooms = false;
        continue;
      }
      const Region r = layout.room_of(c);
      rooms.insert(r);
      worst = std::max(worst, distance(p, centers[static_cast<int>(r)]));
    }
    std::set<GridState> anomalies;
    for (const auto& a : g.anomalies) anomalies.insert(a.state);
    const std::set<GridState> expected{{layout.key().x, layout.key().y, true},
                                       {layout.box().x, layout.box().y, true}};
    const bool pass = in_rooms && rooms.size() == 4 && worst <= 1.5 && anomalies == expected;
    std::string desc;
    for (std::size_t i = 0; i < g.size(); ++i) desc += " " + g.describe(static_cast<SubgoalId>(i));
    report(4, pass,
           std::to_string(rooms.size()) + " rooms, max distance to room centre " + fmt("%.3f", worst) +
               " (need <= 1.5), anomalies exact: " + (anomalies == expected ? "yes" : "no") + ";" +
               desc);
  }

  // 5. Property suites, timed.
  {
    std::string unit = UNIT_TESTS_PATH;
    if (argc > 1) unit = argv[1];
    const auto t0 = std::chrono::steady_clock::now();
    const std::string cmd = "\"" + unit + "\" --test-suite=properties --no-intro=true > /dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    report(5, rc == 0 && secs < 30.0,
           std::string("property suites ") + (rc == 0 ? "passed" : "failed") + " in " +
               fmt("%.2f", secs) + " s (need < 30 s)");
  }

  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
