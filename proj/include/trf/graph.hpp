#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include <absl/container/flat_hash_map.h>

#include "trf/types.hpp"

namespace trf {

struct Arc {
  UserId other;
  Timestamp created_at;
};

struct FollowEdge {
  UserId follower;
  UserId followee;
  Timestamp created_at;

  friend bool operator==(const FollowEdge&, const FollowEdge&) = default;
};

// Directed follower graph. An edge (a -> b) means a follows b and exists at
// every t >= created_at. Edges are never removed.
//
// Reads are safe from any number of threads; mutation needs exclusive access.
// Spans returned by followers()/followees() are invalidated by add_user and
// add_follow.
class TemporalDigraph {
 public:
  void add_user(UserId u);
  bool has_user(UserId u) const { return index_.contains(u); }

  // Registers both endpoints if needed.
  void add_follow(UserId follower, UserId followee, Timestamp t);

  bool edge_at(UserId a, UserId b, Timestamp t) const;
  bool has_edge(UserId a, UserId b) const { return edges_.contains({a, b}); }
  std::optional<Timestamp> edge_time(UserId a, UserId b) const;

  // Ascending UserId order.
  std::vector<UserId> followers_at(UserId user, Timestamp t) const;
  std::vector<UserId> followees_at(UserId user, Timestamp t) const;

  // Users two follower-hops away from s that do not already follow s.
  std::vector<UserId> followers_of_followers(UserId s, Timestamp t) const;

  // Every arc regardless of time, in insertion order.
  std::span<const Arc> followers(UserId user) const;
  std::span<const Arc> followees(UserId user) const;

  std::vector<UserId> users() const;
  std::size_t user_count() const { return ids_.size(); }
  std::size_t edge_count() const { return edges_.size(); }

  // Sorted by (follower, followee).
  std::vector<FollowEdge> edges() const;

 private:
  std::uint32_t require(UserId u) const;
  std::uint32_t ensure(UserId u);

  absl::flat_hash_map<UserId, std::uint32_t> index_;
  std::vector<UserId> ids_;
  std::vector<std::vector<Arc>> in_;
  std::vector<std::vector<Arc>> out_;
  absl::flat_hash_map<std::pair<UserId, UserId>, Timestamp> edges_;
};

// `follower,followee,created_at` with that header line.
void write_graph_csv(std::ostream& out, const TemporalDigraph& graph);
TemporalDigraph read_graph_csv(std::istream& in);
TemporalDigraph load_graph_csv(const std::string& path);
void save_graph_csv(const std::string& path, const TemporalDigraph& graph);

}  // namespace trf
