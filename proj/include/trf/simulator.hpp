#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "trf/events.hpp"
#include "trf/graph.hpp"
#include "trf/records.hpp"

namespace trf {

// Two-mechanism TRF model: a retweet group is observed with probability p,
// and each observed retweet independently triggers a follow with probability q.
struct TrfModelParams {
  double p = 0.0;
  double q = 0.0;
  friend bool operator==(const TrfModelParams&, const TrfModelParams&) = default;
};

// Fitted values for delta = 24 h. q is stored as (p*q)/p.
inline constexpr TrfModelParams kReciprocalDefaults{24.0e-4, 10.2 / 24.0};
inline constexpr TrfModelParams kNonReciprocalDefaults{0.7e-4, 0.16 / 0.7};

// Log-normal retweet latency. sigma = 1.2 puts P(latency < 1 h) at about 0.93
// for a 600 s median.
struct LatencyDistribution {
  double median = 600.0;
  double sigma = 1.2;
  friend bool operator==(const LatencyDistribution&, const LatencyDistribution&) = default;
};

struct SimConfig {
  TemporalDigraph initial_graph;
  std::string initial_graph_source;  // how the graph was specified; informational
  double duration = 7 * 86400.0;
  double delta = 86400.0;
  double tweet_rate = 1.0 / 86400.0;  // per user, per second
  double retweet_prob = 0.1;
  LatencyDistribution retweet_latency_dist;
  TrfModelParams params_reciprocal = kReciprocalDefaults;
  TrfModelParams params_nonreciprocal = kNonReciprocalDefaults;
  double exo_follow_rate = 0.0;  // per user, per second
  std::uint64_t seed = 1;
  double poll_interval = 300.0;
  // When set, any receiver of a retweet may retweet it in turn; otherwise
  // only direct followers of the author do.
  bool multi_hop = false;

  // Throws Errc::invalid_config.
  void validate() const;
};

// Receives the simulation output as it is produced. Events arrive in
// processing order, which is log order; groups arrive when they close.
class SimulationSink {
 public:
  virtual ~SimulationSink() = default;
  virtual void on_event(const Event&) {}
  virtual void on_trf(const GroundTruthTrf&) {}
  virtual void on_group(const RetweetGroup&) {}
};

struct SimulationStats {
  std::uint64_t tweets = 0;
  std::uint64_t retweets = 0;
  std::uint64_t deliveries = 0;
  std::uint64_t trf_follows = 0;
  std::uint64_t exogenous_follows = 0;
  std::uint64_t groups = 0;
};

struct SimulationResult {
  EventLog log;
  std::vector<GroundTruthTrf> trf;    // sorted by (t_l, speaker, listener)
  std::vector<RetweetGroup> groups;   // sorted by group_less
  TemporalDigraph final_graph;
  SimulationStats stats;
};

SimulationStats run_simulation(const SimConfig& config, SimulationSink& sink);
SimulationResult run_simulation(const SimConfig& config);

// Follower set of each monitored user at every poll k * poll_interval, from
// k = 0 up to the first poll at or after `horizon`. Output is ordered by
// (user, t).
std::vector<Snapshot> snapshot_observer(std::span<const Event> log,
                                        const TemporalDigraph& initial_graph,
                                        std::span<const UserId> users, double poll_interval,
                                        double horizon);

enum class GraphFamily { cycle, dag_hierarchy, reciprocal_pairs, random };

GraphFamily parse_graph_family(std::string_view name);
std::string_view to_string(GraphFamily family);

// Users 0..size-1, every edge created at t = 0.
//   cycle            i -> i+1 (mod size)
//   dag_hierarchy    users 0..k-1 are sinks (k = floor(sqrt(size))); user k
//                    follows every sink and each later user follows one
//                    uniformly chosen earlier non-sink plus each other
//                    earlier user with probability edge_prob
//   reciprocal_pairs each unordered pair linked both ways with edge_prob
//   random           each ordered pair linked with edge_prob
TemporalDigraph synth_graph(GraphFamily family, std::size_t size, double edge_prob,
                            std::uint64_t seed);

// `synth:<family>:<size>[:<edge_prob>[:<seed>]]` or a path to a graph CSV
// (relative paths resolve against base_dir).
TemporalDigraph resolve_graph_source(const std::string& source, const std::string& base_dir);

// Flat `key = value` config; `#` starts a comment. Keys are the SimConfig
// field names. Parameters are written "p, q"; the latency distribution is
// "lognormal <median> <sigma>".
SimConfig parse_sim_config(std::istream& in, const std::string& base_dir);
SimConfig load_sim_config(const std::string& path);
void apply_config_entry(SimConfig& config, const std::string& key, const std::string& value,
                        const std::string& base_dir);
std::vector<std::pair<std::string, std::string>> config_entries(const SimConfig& config);

}  // namespace trf
