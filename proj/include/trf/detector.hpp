#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include <absl/container/flat_hash_map.h>

#include "trf/events.hpp"
#include "trf/graph.hpp"
#include "trf/records.hpp"

namespace trf {

// One retweet reaching one follower of its repeater. Produced for every
// follower except the original author; the flags record the graph state when
// the retweet arrived (log order, so a follow stamped with the same time
// comes after it).
struct Delivery {
  UserId speaker;
  UserId repeater;
  UserId listener;
  MsgId msg;
  Timestamp t_s;
  Timestamp t_r;
  bool listener_follows_speaker;
  bool speaker_follows_listener;
  friend bool operator==(const Delivery&, const Delivery&) = default;
};

// A delivery to a listener who did not yet follow the speaker.
struct TrEvent {
  UserId speaker;
  UserId repeater;
  UserId listener;
  Timestamp t_r;
  bool i_delta;
  friend bool operator==(const TrEvent&, const TrEvent&) = default;
};

// (follower, followee) -> time of the follow event.
using FollowTimes = absl::flat_hash_map<std::pair<UserId, UserId>, Timestamp>;

FollowTimes follow_times(std::span<const Event> log);

// Replays the log over the initial graph. Throws Errc::inconsistent_log when a
// follow event re-creates an existing edge.
std::vector<Delivery> retweet_deliveries(std::span<const Event> log,
                                         const TemporalDigraph& initial_graph);

std::vector<TrEvent> extract_tr_events(std::span<const Event> log,
                                       const TemporalDigraph& initial_graph, double delta);

// Greedy per-(speaker, listener) windows anchored at the first eligible
// delivery. `deliveries` must be in log order, as retweet_deliveries returns
// them. Output sorted by group_less.
std::vector<RetweetGroup> group_retweets(std::span<const Delivery> deliveries,
                                         const FollowTimes& follows, double delta);

// One detection per follow preceded within delta by an eligible delivery,
// attributed to the most recent one. Sorted by detection_less.
std::vector<TrfDetection> detect_trf(std::span<const Event> log,
                                     const TemporalDigraph& initial_graph, double delta);

// Follower-set diffing between consecutive polls of each speaker. A newcomer
// counts as a TRF when some delivery of the speaker reached her within delta
// before the poll; t_l is the poll time. Newcomers without one are exogenous.
std::vector<TrfDetection> detect_from_snapshots(std::span<const Snapshot> snapshots,
                                                std::span<const Delivery> deliveries,
                                                double delta);

enum class Stratum { all, reciprocal, nonreciprocal };
std::string_view to_string(Stratum s);
Stratum parse_stratum(std::string_view s);

// How a group's size is counted when stratifying by n.
//   window:    every retweet received in the window (n_window)
//   truncated: only those received before the follow (n)
enum class GroupSize { window, truncated };

struct PTrfRow {
  Stratum stratum;
  std::uint32_t n;  // 0 on the pooled row
  std::uint64_t groups;
  std::uint64_t followers;
  double probability;
  friend bool operator==(const PTrfRow&, const PTrfRow&) = default;
};

// Fraction of groups with i_delta set, pooled (by_n = false) or per n.
// Throws Errc::empty_input when no group passes the filter.
std::vector<PTrfRow> estimate_p_trf(std::span<const RetweetGroup> groups, Stratum filter,
                                    bool by_n, GroupSize size = GroupSize::window);

void write_p_trf_csv(std::ostream& out, std::span<const PTrfRow> rows);
std::vector<PTrfRow> read_p_trf_csv(std::istream& in);

struct ProbabilityEstimate {
  double probability;
  std::size_t samples;  // tweets or retweets averaged over
  double std_error;     // of the mean of the per-sample fractions
};

// Mean over tweets of S that saw no retweet of any S message within
// [t_s, t_s + delta] of the fraction of followers-of-followers of S that
// follow S by t_s + delta. Tweets with an empty candidate set are skipped.
ProbabilityEstimate estimate_p_exo(std::span<const Event> log,
                                   const TemporalDigraph& initial_graph, double delta);

// Same fraction per retweet, over followers-of-followers of S that also
// follow the repeater.
ProbabilityEstimate estimate_p_endo(std::span<const Event> log,
                                    const TemporalDigraph& initial_graph, double delta);

struct LatencyCdf {
  std::vector<double> edges;
  std::vector<double> trf_cdf;      // fraction of t_l - t_r <= edge
  std::vector<double> retweet_cdf;  // fraction of t_r - t_s <= edge
  std::size_t trf_count = 0;
  std::size_t retweet_count = 0;
};

std::vector<double> empirical_cdf(std::span<const double> values, std::span<const double> edges);

// Retweets are taken from `events`; other kinds are ignored.
LatencyCdf latency_histograms(std::span<const TrfDetection> detections,
                              std::span<const Event> events, std::span<const double> edges);

}  // namespace trf
