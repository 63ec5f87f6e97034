#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <span>
#include <string_view>
#include <vector>

#include "trf/graph.hpp"

namespace trf {

// Creation time stamped on edges added by trf_closure. Later than any
// simulated time.
inline constexpr Timestamp kEquilibriumTime = std::numeric_limits<double>::max();

// Compressed adjacency over dense indices 0..n-1; ids[i] is the user at i,
// ascending.
struct Csr {
  std::vector<UserId> ids;
  std::vector<std::uint32_t> offsets;  // size n + 1
  std::vector<std::uint32_t> targets;
  std::size_t size() const { return ids.size(); }
  std::span<const std::uint32_t> neighbors(std::uint32_t v) const {
    return {targets.data() + offsets[v], targets.data() + offsets[v + 1]};
  }
};

// Follower -> followee arcs, sorted per node. With `undirected` every edge is
// listed from both ends, duplicates removed.
Csr to_csr(const TemporalDigraph& graph, bool undirected = false);

struct SccResult {
  std::vector<UserId> nodes;             // ascending
  std::vector<std::uint32_t> component;  // per node, numbered in order of first member
  std::vector<std::size_t> sizes;        // per component
  double largest_fraction = 0.0;         // 0 on an empty graph
};

// Iterative Tarjan, no recursion.
SccResult tarjan_scc(const TemporalDigraph& graph);
SccResult tarjan_scc(const Csr& csr);

// Walk over the undirected view, returning to `start` with probability
// restart_prob at each step, until target_size distinct users are seen.
// Throws Errc::unreachable when the walk gives up (after 1000 * |V| + 10000
// steps) and Errc::unknown_user for an unregistered start. Result ascending.
std::vector<UserId> random_walk_sample_from(const TemporalDigraph& graph, std::size_t target_size,
                                            double restart_prob, UserId start, std::uint64_t seed);
// Start drawn uniformly from the seed.
std::vector<UserId> random_walk_sample(const TemporalDigraph& graph, std::size_t target_size,
                                       double restart_prob, std::uint64_t seed);

// Breadth-first over the undirected view, neighbors in ascending id; the last
// layer is cut at target_size. Throws Errc::unreachable when the component is
// smaller than target_size.
std::vector<UserId> snowball_sample_from(const TemporalDigraph& graph, std::size_t target_size,
                                         UserId start);
std::vector<UserId> snowball_sample(const TemporalDigraph& graph, std::size_t target_size,
                                    std::uint64_t seed);

TemporalDigraph induced_subgraph(const TemporalDigraph& graph, std::span<const UserId> nodes);

// Everyone reachable from x along followee edges, ascending. Contains x only
// when x lies on a cycle.
std::vector<UserId> reachable_followees(const TemporalDigraph& graph, UserId x);

// Adds x -> y for every y reachable from x (x != y), stamped kEquilibriumTime.
TemporalDigraph trf_closure(const TemporalDigraph& graph);

bool is_trf_equilibrium(const TemporalDigraph& graph);

enum class SampleMethod { random_walk, snowball };
SampleMethod parse_sample_method(std::string_view name);
std::string_view to_string(SampleMethod m);

struct SccCurveRow {
  std::size_t size;
  double mean_fraction;
  double ci_low;  // mean -/+ 1.96 sd / sqrt(repetitions)
  double ci_high;
  std::size_t repetitions;
};

// Largest-SCC fraction of sampled induced subgraphs. Sizes must ascend.
std::vector<SccCurveRow> scc_fraction_curve(const TemporalDigraph& graph, SampleMethod method,
                                            std::span<const std::size_t> sizes,
                                            std::size_t repetitions, std::uint64_t seed,
                                            double restart_prob = 0.15);

void write_scc_curve_csv(std::ostream& out, std::span<const SccCurveRow> rows);

}  // namespace trf
