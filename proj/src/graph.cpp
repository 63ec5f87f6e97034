#include "trf/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

namespace trf {

namespace {

std::string id_text(UserId u) { return std::to_string(to_int(u)); }

}  // namespace

void TemporalDigraph::add_user(UserId u) { ensure(u); }

std::uint32_t TemporalDigraph::ensure(UserId u) {
  auto [it, inserted] = index_.try_emplace(u, static_cast<std::uint32_t>(ids_.size()));
  if (inserted) {
    ids_.push_back(u);
    in_.emplace_back();
    out_.emplace_back();
  }
  return it->second;
}

std::uint32_t TemporalDigraph::require(UserId u) const {
  auto it = index_.find(u);
  if (it == index_.end()) throw Error(Errc::unknown_user, "unknown user " + id_text(u));
  return it->second;
}

void TemporalDigraph::add_follow(UserId follower, UserId followee, Timestamp t) {
  if (follower == followee) throw Error(Errc::self_edge, "self edge on user " + id_text(follower));
  if (!std::isfinite(t) || t < 0.0)
    throw Error(Errc::malformed_record, "edge creation time must be finite and non-negative");
  auto [it, inserted] = edges_.try_emplace({follower, followee}, t);
  if (!inserted)
    throw Error(Errc::duplicate_edge,
                "edge " + id_text(follower) + " -> " + id_text(followee) + " already exists");
  const auto a = ensure(follower);
  const auto b = ensure(followee);
  out_[a].push_back({followee, t});
  in_[b].push_back({follower, t});
}

bool TemporalDigraph::edge_at(UserId a, UserId b, Timestamp t) const {
  require(a);
  require(b);
  auto it = edges_.find({a, b});
  return it != edges_.end() && it->second <= t;
}

std::optional<Timestamp> TemporalDigraph::edge_time(UserId a, UserId b) const {
  auto it = edges_.find({a, b});
  if (it == edges_.end()) return std::nullopt;
  return it->second;
}

namespace {

std::vector<UserId> alive(std::span<const Arc> arcs, Timestamp t) {
  std::vector<UserId> out;
  out.reserve(arcs.size());
  for (const auto& a : arcs)
    if (a.created_at <= t) out.push_back(a.other);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

std::vector<UserId> TemporalDigraph::followers_at(UserId user, Timestamp t) const {
  return alive(in_[require(user)], t);
}

std::vector<UserId> TemporalDigraph::followees_at(UserId user, Timestamp t) const {
  return alive(out_[require(user)], t);
}

std::vector<UserId> TemporalDigraph::followers_of_followers(UserId s, Timestamp t) const {
  const auto direct = followers_at(s, t);
  std::vector<UserId> out;
  for (UserId y : direct)
    for (const auto& a : in_[index_.at(y)])
      if (a.created_at <= t && a.other != s) out.push_back(a.other);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  std::vector<UserId> result;
  result.reserve(out.size());
  std::set_difference(out.begin(), out.end(), direct.begin(), direct.end(),
                      std::back_inserter(result));
  return result;
}

std::span<const Arc> TemporalDigraph::followers(UserId user) const { return in_[require(user)]; }

std::span<const Arc> TemporalDigraph::followees(UserId user) const { return out_[require(user)]; }

std::vector<UserId> TemporalDigraph::users() const {
  std::vector<UserId> out(ids_);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<FollowEdge> TemporalDigraph::edges() const {
  std::vector<FollowEdge> out;
  out.reserve(edges_.size());
  for (const auto& [key, t] : edges_) out.push_back({key.first, key.second, t});
  std::sort(out.begin(), out.end(), [](const FollowEdge& x, const FollowEdge& y) {
    return std::pair(x.follower, x.followee) < std::pair(y.follower, y.followee);
  });
  return out;
}

void write_graph_csv(std::ostream& out, const TemporalDigraph& graph) {
  out << "follower,followee,created_at\n";
  for (const auto& e : graph.edges())
    out << to_int(e.follower) << ',' << to_int(e.followee) << ',' << format_number(e.created_at)
        << '\n';
}

TemporalDigraph read_graph_csv(std::istream& in) {
  TemporalDigraph g;
  std::string line;
  std::size_t lineno = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!header) {
      if (line != "follower,followee,created_at")
        throw Error(Errc::malformed_record, "line 1: expected header follower,followee,created_at");
      header = true;
      continue;
    }
    const auto c1 = line.find(',');
    const auto c2 = c1 == std::string::npos ? c1 : line.find(',', c1 + 1);
    if (c2 == std::string::npos || line.find(',', c2 + 1) != std::string::npos)
      throw Error(Errc::malformed_record, "line " + std::to_string(lineno) + ": expected 3 fields");
    try {
      const std::string_view sv(line);
      g.add_follow(user_id(parse_uint(sv.substr(0, c1))),
                   user_id(parse_uint(sv.substr(c1 + 1, c2 - c1 - 1))),
                   parse_number(sv.substr(c2 + 1)));
    } catch (const Error& e) {
      throw Error(e.code(), "line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  if (!header) throw Error(Errc::malformed_record, "empty graph file (missing header)");
  return g;
}

TemporalDigraph load_graph_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io, "cannot open " + path);
  try {
    return read_graph_csv(in);
  } catch (const Error& e) {
    throw Error(e.code(), path + ": " + e.what());
  }
}

void save_graph_csv(const std::string& path, const TemporalDigraph& graph) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::io, "cannot write " + path);
  write_graph_csv(out, graph);
}

}  // namespace trf
