#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "trf/types.hpp"

namespace trf {

// A follow the simulator caused through a retweet. t_r is the delivery that
// triggered it; the simulator places the follow at that delivery, so t_l == t_r.
struct GroundTruthTrf {
  UserId speaker;
  UserId repeater;
  UserId listener;
  Timestamp t_s;
  Timestamp t_r;
  Timestamp t_l;
  std::uint32_t n_received;  // retweets in the group up to and including the trigger
  bool reciprocal;           // speaker followed listener at t_r
  friend bool operator==(const GroundTruthTrf&, const GroundTruthTrf&) = default;
};

// Retweets of one speaker received by one listener within a window of length
// delta anchored at the first of them.
struct RetweetGroup {
  UserId speaker;
  UserId listener;
  Timestamp t_r;  // first retweet of the group
  // Retweets received while the listener did not yet follow the speaker.
  std::uint32_t n;
  // Every retweet of the speaker received in [t_r, t_r + delta), including
  // those that arrived after the listener followed.
  std::uint32_t n_window;
  bool i_delta;     // listener followed the speaker within [t_r, t_r + delta]
  bool reciprocal;  // speaker followed listener at t_r
  friend bool operator==(const RetweetGroup&, const RetweetGroup&) = default;
};

bool group_less(const RetweetGroup& a, const RetweetGroup& b);

struct TrfDetection {
  UserId speaker;
  UserId repeater;
  UserId listener;
  Timestamp t_s;
  Timestamp t_r;
  Timestamp t_l;
  Timestamp latency;  // t_l - t_r
  bool reciprocal;
  friend bool operator==(const TrfDetection&, const TrfDetection&) = default;
};

bool detection_less(const TrfDetection& a, const TrfDetection& b);

void write_ground_truth_csv(std::ostream& out, std::span<const GroundTruthTrf> rows);
std::vector<GroundTruthTrf> read_ground_truth_csv(std::istream& in);

void write_groups_csv(std::ostream& out, std::span<const RetweetGroup> rows);
std::vector<RetweetGroup> read_groups_csv(std::istream& in);

void write_detections_csv(std::ostream& out, std::span<const TrfDetection> rows);
std::vector<TrfDetection> read_detections_csv(std::istream& in);

// Splits one CSV line on commas (no quoting; none of the formats need it).
std::vector<std::string_view> split_csv(std::string_view line);

}  // namespace trf
