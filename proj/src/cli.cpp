#include "hrl/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "hrl/trainer.hpp"

namespace fs = std::filesystem;

namespace hrl::cli {

namespace {

constexpr std::uintmax_t kMaxMemoryFileBytes = std::uintmax_t{1} << 30;

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& p, const std::string& contents) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << contents;
  if (!out) throw std::runtime_error("write failed for " + p.string());
}

template <class F>
void write_with(const fs::path& p, F&& writer) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  writer(out);
  if (!out) throw std::runtime_error("write failed for " + p.string());
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

double final_window_return(const std::vector<MetricsRecord>& m, std::size_t window) {
  if (m.empty()) return 0.0;
  const std::size_t n = std::min(window, m.size());
  double sum = 0.0;
  for (std::size_t i = m.size() - n; i < m.size(); ++i) sum += m[i].ret;
  return sum / static_cast<double>(n);
}

// ---------------------------------------------------------------- train

struct TrainJob {
  RunConfig config;
  fs::path dir;
};

void write_run(const TrainJob& job, const RoomsLayout& layout, const std::string& layout_text) {
  fs::create_directories(job.dir);
  nlohmann::ordered_json manifest;
  manifest["status"] = "running";
  manifest["mode"] = to_string(job.config.mode);
  manifest["seed"] = job.config.seed;
  manifest["config"] = to_json(job.config);
  write_file(job.dir / "manifest.json", manifest.dump(2) + "\n");

  try {
    const RunArtifacts art = run(job.config, layout);
    write_file(job.dir / "layout.txt", layout_text);
    write_with(job.dir / "metrics.csv", [&](std::ostream& o) { write_metrics_csv(o, art.metrics); });
    write_with(job.dir / "memory.jsonl",
               [&](std::ostream& o) { write_transitions_jsonl(o, art.memory); });
    write_file(job.dir / "subgoals.json", to_json(art.subgoals).dump(2) + "\n");
    nlohmann::ordered_json files;
    files["layout"] = "layout.txt";
    files["metrics"] = "metrics.csv";
    files["memory"] = "memory.jsonl";
    files["subgoals"] = "subgoals.json";
    if (job.config.mode == Mode::FlatQ) {
      write_with(job.dir / "flat_table.csv", [&](std::ostream& o) { write_csv(o, art.flat); });
      files["flat_table"] = "flat_table.csv";
    }
    if (job.config.mode == Mode::RandomMetaHrl || job.config.mode == Mode::UnifiedHrl) {
      write_with(job.dir / "controller_table.csv",
                 [&](std::ostream& o) { write_csv(o, art.controller); });
      write_with(job.dir / "meta_table.csv", [&](std::ostream& o) { write_csv(o, art.meta); });
      files["controller_table"] = "controller_table.csv";
      files["meta_table"] = "meta_table.csv";
    }
    manifest["status"] = "complete";
    manifest["artifacts"] = files;
    nlohmann::ordered_json summary;
    summary["steps"] = job.config.total_steps;
    summary["episodes"] = art.metrics.size();
    summary["final_coverage"] = coverage(art.visited, layout);
    summary["final_100_episode_return"] = final_window_return(art.metrics, 100);
    summary["num_subgoals"] = art.subgoals.size();
    summary["subgoal_attempts"] = art.stats.subgoal_attempts;
    summary["subgoal_successes"] = art.stats.subgoal_successes;
    summary["discovery_steps"] = art.stats.discovery_steps;
    manifest["summary"] = summary;
    write_file(job.dir / "manifest.json", manifest.dump(2) + "\n");
  } catch (const std::exception& e) {
    manifest["status"] = "failed";
    manifest["error"] = e.what();
    write_file(job.dir / "manifest.json", manifest.dump(2) + "\n");
    throw;
  }
}

void add_hyperparameters(CLI::App* cmd, RunConfig& c, std::string& tie_break) {
  cmd->add_option("--total_steps,--steps", c.total_steps, "environment steps per run")
      ->capture_default_str();
  cmd->add_option("--episode_cap", c.env.episode_cap, "environment steps per episode")
      ->capture_default_str();
  cmd->add_option("--slip_probability", c.env.slip_probability,
                  "probability an action is replaced by a random one")
      ->capture_default_str();
  cmd->add_option("--memory_capacity", c.memory_capacity, "capacity of D, transitions")
      ->capture_default_str();
  cmd->add_option("--controller_memory_capacity", c.controller_memory_capacity,
                  "capacity of D1, transitions")
      ->capture_default_str();
  cmd->add_option("--meta_memory_capacity", c.meta_memory_capacity, "capacity of D2, transitions")
      ->capture_default_str();
  cmd->add_option("--k", c.k, "K-means clusters")->capture_default_str();
  cmd->add_option("--anomaly_threshold", c.anomaly_threshold, "reward z-score threshold")
      ->capture_default_str();
  cmd->add_option("--warmup_steps", c.warmup_steps, "random-policy steps before first discovery")
      ->capture_default_str();
  cmd->add_option("--discovery_period", c.discovery_period, "steps between rediscoveries")
      ->capture_default_str();
  cmd->add_option("--min_discovery_samples", c.min_discovery_samples,
                  "minimum |D| for discovery, transitions")
      ->capture_default_str();
  cmd->add_option("--kmeans_max_iter", c.kmeans_max_iter, "Lloyd iterations cap")
      ->capture_default_str();
  cmd->add_option("--kmeans_tol", c.kmeans_tol, "centroid shift tolerance, cells")
      ->capture_default_str();
  cmd->add_flag("--use_dissimilarity", c.use_dissimilarity,
                "also add spatial-dissimilarity anomalies");
  cmd->add_option("--dissimilarity_threshold", c.dissimilarity_threshold,
                  "normalized distance threshold")
      ->capture_default_str();
  cmd->add_option("--subgoal_timeout", c.subgoal_timeout, "T_max, controller steps per attempt")
      ->capture_default_str();
  cmd->add_option("--alpha", c.alpha, "learning rate")->capture_default_str();
  cmd->add_option("--gamma", c.gamma, "discount per step")->capture_default_str();
  cmd->add_option("--batch_size", c.batch_size, "replay minibatch, transitions")
      ->capture_default_str();
  cmd->add_option("--q_init", c.q_init, "initial table value")->capture_default_str();
  cmd->add_option("--meta_epsilon_start", c.meta_epsilon_start, "meta exploration at step 0")
      ->capture_default_str();
  cmd->add_option("--meta_epsilon_end", c.meta_epsilon_end, "meta exploration floor")
      ->capture_default_str();
  cmd->add_option("--meta_epsilon_fraction", c.meta_epsilon_fraction,
                  "fraction of total steps for the meta decay")
      ->capture_default_str();
  cmd->add_option("--controller_epsilon_start", c.controller_epsilon_start,
                  "controller exploration at 0% subgoal success")
      ->capture_default_str();
  cmd->add_option("--controller_epsilon_end", c.controller_epsilon_end,
                  "controller exploration at 100% subgoal success")
      ->capture_default_str();
  cmd->add_option("--success_window", c.success_window, "attempts in the success-rate window")
      ->capture_default_str();
  cmd->add_option("--flat_epsilon", c.flat_epsilon, "flat baseline exploration rate")
      ->capture_default_str();
  cmd->add_option("--flat_tie_break", tie_break, "flat baseline greedy ties: first or random")
      ->check(CLI::IsMember({"first", "random"}))
      ->capture_default_str();
}

// Loads --manifest before option parsing so that explicit flags override it.
std::string prescan_manifest(const std::vector<std::string>& args) {
  for (std::size_t i = 0; i + 1 < args.size(); ++i) {
    if (args[i] == "--manifest") return args[i + 1];
    if (args[i].rfind("--manifest=", 0) == 0) return args[i].substr(11);
  }
  return {};
}

// CLI11 only reads set_config files on the top-level app, so subcommand config is applied
// here: each key fills the option of the same name unless it was given on the command line.
void apply_config_file(CLI::App* cmd, const std::string& path) {
  if (!fs::exists(path)) throw std::runtime_error("config file not found: " + path);
  const std::vector<CLI::ConfigItem> items = CLI::ConfigTOML().from_file(path);
  for (const CLI::ConfigItem& item : items) {
    if (item.name == "++" || item.name == "--") continue;  // section markers
    const std::string name = item.fullname();
    if (name == "config" || name == "manifest" || name == "print-config")
      throw std::invalid_argument("config key not allowed in a config file: " + name);
    CLI::Option* opt = cmd->get_option_no_throw("--" + name);
    if (opt == nullptr) throw std::invalid_argument("unknown config key: " + name);
    if (opt->count() > 0) continue;
    opt->add_result(item.inputs);
    opt->run_callback();
  }
}

int train(const std::vector<std::string>& modes, const std::vector<std::uint64_t>& seeds,
          RunConfig base, const std::string& out_dir, const std::string& layout_path,
          unsigned jobs) {
  RoomsLayout layout = RoomsLayout::standard();
  if (!layout_path.empty()) layout = RoomsLayout::from_text(read_file(layout_path));
  const std::string layout_text = layout.to_text();

  std::vector<TrainJob> queue;
  for (const std::string& m : modes) {
    std::vector<std::uint64_t> seen;
    for (std::uint64_t seed : seeds) {
      if (std::find(seen.begin(), seen.end(), seed) != seen.end())
        throw std::invalid_argument("duplicate seed " + std::to_string(seed));
      seen.push_back(seed);
      TrainJob job;
      job.config = base;
      job.config.mode = mode_from_string(m);
      job.config.seed = seed;
      job.config.validate();
      job.dir = fs::path(out_dir) / (m + "_seed" + std::to_string(seed));
      queue.push_back(std::move(job));
    }
  }
  fs::create_directories(out_dir);

  std::atomic<std::size_t> next{0};
  std::mutex io;
  std::vector<std::string> errors;
  auto worker = [&] {
    for (std::size_t i = next++; i < queue.size(); i = next++) {
      try {
        write_run(queue[i], layout, layout_text);
        std::lock_guard lock(io);
        std::cout << "finished " << queue[i].dir.string() << '\n';
      } catch (const std::exception& e) {
        std::lock_guard lock(io);
        errors.push_back(queue[i].dir.string() + ": " + e.what());
      }
    }
  };
  const unsigned n = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(queue.size())));
  std::vector<std::thread> pool;
  for (unsigned i = 0; i < n; ++i) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  for (const auto& e : errors) std::cerr << "error: " << e << '\n';
  return errors.empty() ? 0 : 1;
}

// ---------------------------------------------------------------- discover

int discover_cmd(const std::string& memory_path, const DiscoveryOptions& opts, std::uint64_t seed,
                 const std::string& out_path, std::size_t max_records) {
  if (!fs::exists(memory_path)) throw std::runtime_error("memory file not found: " + memory_path);
  if (fs::file_size(memory_path) > kMaxMemoryFileBytes)
    throw std::runtime_error("memory file too large: " + memory_path);
  std::ifstream in(memory_path);
  if (!in) throw std::runtime_error("cannot open " + memory_path);
  const std::vector<Transition> memory = read_transitions_jsonl(in, max_records);
  if (memory.empty()) throw std::runtime_error("memory file is empty: " + memory_path);
  Rng rng(seed);
  const SubgoalSet set = discover(memory, opts, rng);
  const fs::path out(out_path);
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  write_file(out, to_json(set).dump(2) + "\n");
  std::cout << "discovered " << set.size() << " subgoals (" << set.k() << " centroids, "
            << set.anomalies.size() << " anomalies) from " << memory.size() << " transitions\n";
  for (std::size_t g = 0; g < set.size(); ++g)
    std::cout << "  " << set.describe(static_cast<SubgoalId>(g)) << '\n';
  return 0;
}

// ---------------------------------------------------------------- compare

struct LoadedRun {
  std::string dir;
  Mode mode;
  std::vector<MetricsRecord> metrics;
  std::vector<double> smoothed_return;
};

LoadedRun load_run(const fs::path& dir, std::size_t window) {
  const auto manifest = nlohmann::json::parse(read_file(dir / "manifest.json"));
  if (manifest.value("status", "") != "complete")
    throw std::runtime_error(dir.string() + " is not a completed run");
  LoadedRun r;
  r.dir = dir.string();
  r.mode = mode_from_string(manifest.at("mode").get<std::string>());
  std::ifstream in(dir / "metrics.csv");
  if (!in) throw std::runtime_error("missing metrics.csv in " + dir.string());
  r.metrics = read_metrics_csv(in);
  if (r.metrics.empty()) throw std::runtime_error(dir.string() + " has no completed episodes");
  std::vector<double> returns;
  for (const auto& m : r.metrics) returns.push_back(m.ret);
  r.smoothed_return = moving_average(returns, window);
  return r;
}

// Index of the last episode finished by `step`, or -1.
long last_at(const LoadedRun& r, std::size_t step) {
  const auto it = std::upper_bound(r.metrics.begin(), r.metrics.end(), step,
                                   [](std::size_t s, const MetricsRecord& m) { return s < m.steps; });
  return static_cast<long>(it - r.metrics.begin()) - 1;
}

int compare_cmd(const std::vector<std::string>& dirs, const std::string& out_dir,
                std::size_t grid, std::size_t window) {
  if (dirs.size() < 2) throw std::invalid_argument("compare needs at least 2 run directories");
  if (grid == 0) throw std::invalid_argument("--grid must be >= 1");
  std::vector<LoadedRun> runs;
  for (const auto& d : dirs) runs.push_back(load_run(d, window));

  std::map<Mode, std::vector<const LoadedRun*>> by_mode;
  for (const auto& r : runs) by_mode[r.mode].push_back(&r);

  std::size_t end = runs.front().metrics.back().steps;
  std::size_t begin = 0;
  for (const auto& r : runs) {
    end = std::min(end, r.metrics.back().steps);
    begin = std::max(begin, r.metrics.front().steps);
  }

  std::ostringstream cov, ret;
  cov << "steps";
  ret << "steps";
  for (const auto& [mode, list] : by_mode) {
    cov << ',' << to_string(mode) << "_mean," << to_string(mode) << "_std";
    ret << ',' << to_string(mode) << "_mean," << to_string(mode) << "_std";
  }
  cov << '\n';
  ret << '\n';
  std::size_t rows = 0;
  for (std::size_t step = grid; step <= end; step += grid) {
    if (step < begin) continue;
    cov << step;
    ret << step;
    for (const auto& [mode, list] : by_mode) {
      std::vector<double> c, g;
      for (const LoadedRun* r : list) {
        const auto i = static_cast<std::size_t>(last_at(*r, step));
        c.push_back(r->metrics[i].coverage);
        g.push_back(r->smoothed_return[i]);
      }
      auto stats = [](const std::vector<double>& v) {
        double mean = 0.0;
        for (double x : v) mean += x;
        mean /= static_cast<double>(v.size());
        double var = 0.0;
        for (double x : v) var += (x - mean) * (x - mean);
        return std::pair{mean, std::sqrt(var / static_cast<double>(v.size()))};
      };
      const auto [cm, cs] = stats(c);
      const auto [gm, gs] = stats(g);
      cov << ',' << fmt(cm) << ',' << fmt(cs);
      ret << ',' << fmt(gm) << ',' << fmt(gs);
    }
    cov << '\n';
    ret << '\n';
    ++rows;
  }
  if (rows == 0) throw std::runtime_error("runs share no common step range at this --grid");
  fs::create_directories(out_dir);
  write_file(fs::path(out_dir) / "coverage.csv", cov.str());
  write_file(fs::path(out_dir) / "return.csv", ret.str());
  std::cout << "wrote " << rows << " rows for " << by_mode.size() << " modes to " << out_dir
            << '\n';
  return 0;
}

// ---------------------------------------------------------------- eval

int eval_cmd(const std::string& run_dir, std::uint64_t seed, bool print_trajectory) {
  const fs::path dir(run_dir);
  const auto manifest = nlohmann::json::parse(read_file(dir / "manifest.json"));
  if (manifest.value("status", "") != "complete")
    throw std::runtime_error(run_dir + " is not a completed run");
  const RunConfig cfg = run_config_from_json(manifest.at("config"));
  const RoomsLayout layout = RoomsLayout::from_text(read_file(dir / "layout.txt"));

  EvalResult res;
  SubgoalSet subgoals;
  if (cfg.mode == Mode::FlatQ) {
    std::ifstream in(dir / "flat_table.csv");
    res = evaluate_flat(layout, cfg.env, read_flat_csv(in, layout.num_states()));
  } else if (cfg.mode == Mode::RandomMetaHrl || cfg.mode == Mode::UnifiedHrl) {
    subgoals = subgoals_from_json(nlohmann::json::parse(read_file(dir / "subgoals.json")));
    std::ifstream cin_(dir / "controller_table.csv");
    std::ifstream min_(dir / "meta_table.csv");
    const ControllerTable controller = read_controller_csv(cin_, layout.num_states());
    const MetaTable meta = read_meta_csv(min_, layout.num_states());
    res = evaluate_hrl(layout, cfg.env, subgoals, controller, meta, cfg.subgoal_timeout, seed);
  } else {
    throw std::invalid_argument("random_walk runs have no policy to evaluate");
  }

  std::cout << "mode " << to_string(cfg.mode) << "\nreturn " << fmt(res.ret) << "\nsteps "
            << res.steps << "\nsolved " << (res.solved ? "true" : "false") << '\n';
  if (!res.subgoal_path.empty()) {
    std::cout << "subgoal path";
    for (std::size_t i = 0; i < res.subgoal_path.size(); ++i)
      std::cout << (i ? " -> " : " ") << subgoals.describe(res.subgoal_path[i]);
    std::cout << '\n';
  }
  if (print_trajectory) {
    std::cout << "trajectory";
    for (const GridState& s : res.trajectory)
      std::cout << " (" << s.x << ',' << s.y << ',' << (s.has_key ? 1 : 0) << ')';
    std::cout << '\n';
  }
  return 0;
}

}  // namespace

std::string default_output_root() {
  const char* env = std::getenv("HRL_OUT_ROOT");
  return env && *env ? env : "runs";
}

int run(const std::vector<std::string>& args) {
  CLI::App app{"Hierarchical RL with unsupervised subgoal discovery on the four-rooms task", "hrl"};
  app.require_subcommand(1);

  // train
  RunConfig base;
  std::vector<std::string> modes;
  std::vector<std::uint64_t> seeds;
  std::string manifest_path = prescan_manifest(args);
  if (!manifest_path.empty()) {
    try {
      const auto m = nlohmann::json::parse(read_file(manifest_path));
      base = run_config_from_json(m.contains("config") ? m.at("config") : m);
      modes.push_back(std::string(to_string(base.mode)));
      seeds.push_back(base.seed);
    } catch (const std::exception& e) {
      std::cerr << "error: cannot load manifest: " << e.what() << '\n';
      return 2;
    }
  }
  std::string tie_break = base.flat_tie_break == TieBreak::First ? "first" : "random";
  std::string train_out;
  std::string layout_path;
  unsigned jobs = 1;
  bool print_config = false;
  auto* train_cmd = app.add_subcommand("train", "run training for each (mode, seed)");
  std::string config_path;
  train_cmd->add_option("--config", config_path,
                        "TOML/INI config file; command-line flags take precedence");
  train_cmd->add_option("--manifest", manifest_path,
                        "reuse the resolved config of a previous run's manifest.json");
  train_cmd->add_option("--mode", modes, "random_walk, flat_q, random_meta_hrl, unified_hrl")
      ->check(CLI::IsMember({"random_walk", "flat_q", "random_meta_hrl", "unified_hrl"}));
  train_cmd->add_option("--seed", seeds, "one or more seeds");
  train_cmd->add_option("--out", train_out, "output directory (default $HRL_OUT_ROOT or runs)");
  train_cmd->add_option("--layout", layout_path, "custom layout text file");
  train_cmd->add_option("--jobs", jobs, "runs executed in parallel")->capture_default_str();
  train_cmd->add_flag("--print-config", print_config,
                      "print every hyperparameter with its default and exit");
  add_hyperparameters(train_cmd, base, tie_break);

  // discover
  std::string memory_path, discover_out = "subgoals.json";
  DiscoveryOptions dopts;
  std::uint64_t discover_seed = 0;
  std::size_t max_records = 10'000'000;
  auto* discover_sub = app.add_subcommand("discover", "run subgoal discovery on a memory snapshot");
  discover_sub->add_option("--memory", memory_path, "memory JSONL snapshot")->required();
  discover_sub->add_option("--k", dopts.k, "K-means clusters")->capture_default_str();
  discover_sub->add_option("--threshold,--anomaly_threshold", dopts.anomaly_threshold,
                           "reward z-score threshold")
      ->capture_default_str();
  discover_sub->add_option("--seed", discover_seed, "k-means++ seed")->capture_default_str();
  discover_sub->add_option("--min_samples", dopts.min_samples, "minimum transitions")
      ->capture_default_str();
  discover_sub->add_flag("--use_dissimilarity", dopts.use_dissimilarity,
                         "also add spatial-dissimilarity anomalies");
  discover_sub->add_option("--dissimilarity_threshold", dopts.dissimilarity_threshold,
                           "normalized distance threshold")
      ->capture_default_str();
  discover_sub->add_option("--max_records", max_records, "reject larger snapshots")
      ->capture_default_str();
  discover_sub->add_option("--out", discover_out, "output JSON file")->capture_default_str();

  // compare
  std::vector<std::string> compare_dirs;
  std::string compare_out;
  std::size_t grid = 1000, window = 100;
  auto* compare_sub = app.add_subcommand("compare", "merge metrics across runs per mode");
  compare_sub->add_option("runs", compare_dirs, "completed run directories")->required();
  compare_sub->add_option("--out", compare_out, "output directory (default <root>/compare)");
  compare_sub->add_option("--grid", grid, "step spacing of the common grid")->capture_default_str();
  compare_sub->add_option("--window", window, "episodes in the return moving average")
      ->capture_default_str();

  // eval
  std::string eval_dir;
  std::uint64_t eval_seed = 0;
  bool trajectory = false;
  auto* eval_sub = app.add_subcommand("eval", "greedy rollout from a saved run");
  eval_sub->add_option("--run", eval_dir, "completed run directory")->required();
  eval_sub->add_option("--seed", eval_seed, "tie-breaking seed")->capture_default_str();
  eval_sub->add_flag("--trajectory", trajectory, "print visited states");

  std::vector<std::string> argv_store;
  argv_store.push_back("hrl");
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : argv_store) argv.push_back(s.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*train_cmd) {
      if (!config_path.empty()) apply_config_file(train_cmd, config_path);
      base.flat_tie_break = tie_break == "first" ? TieBreak::First : TieBreak::Random;
      if (print_config) {
        std::cout << train_cmd->config_to_str(true, true);
        return 0;
      }
      if (modes.empty()) {
        std::cerr << "error: --mode is required (or --manifest / a config file providing mode)\n"
                  << train_cmd->help();
        return 2;
      }
      if (seeds.empty()) seeds.push_back(0);
      return train(modes, seeds, base, train_out.empty() ? default_output_root() : train_out,
                   layout_path, jobs);
    }
    if (*discover_sub) return discover_cmd(memory_path, dopts, discover_seed, discover_out, max_records);
    if (*compare_sub)
      return compare_cmd(compare_dirs,
                         compare_out.empty() ? (fs::path(default_output_root()) / "compare").string()
                                             : compare_out,
                         grid, window);
    if (*eval_sub) return eval_cmd(eval_dir, eval_seed, trajectory);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args);
}

}  // namespace hrl::cli
