#include <algorithm>
#include <istream>
#include <ostream>

#include "trf/inference.hpp"

namespace trf {

namespace {

struct Member {
  MsgId msg;
  UserId repeater;
};

struct OpenGroup {
  RetweetGroup group;
  std::vector<Member> members;  // eligible deliveries only
};

std::size_t distinct_count(std::vector<std::uint64_t> v) {
  std::sort(v.begin(), v.end());
  return static_cast<std::size_t>(std::unique(v.begin(), v.end()) - v.begin());
}

}  // namespace

FactorTable build_factor_table(std::span<const Event> log, const TemporalDigraph& initial_graph,
                               double delta) {
  const auto deliveries = retweet_deliveries(log, initial_graph);
  const auto follows = follow_times(log);

  // Same windows as group_retweets, keeping the members.
  std::vector<OpenGroup> groups;
  absl::flat_hash_map<std::pair<UserId, UserId>, std::size_t> open;
  for (const auto& d : deliveries) {
    const std::pair key{d.speaker, d.listener};
    auto it = open.find(key);
    if (it != open.end() && d.t_r >= groups[it->second].group.t_r + delta) {
      open.erase(it);
      it = open.end();
    }
    if (it != open.end()) {
      auto& g = groups[it->second];
      ++g.group.n_window;
      if (!d.listener_follows_speaker) {
        ++g.group.n;
        g.members.push_back({d.msg, d.repeater});
      }
      continue;
    }
    if (d.listener_follows_speaker) continue;
    auto f = follows.find({d.listener, d.speaker});
    const bool followed = f != follows.end() && f->second >= d.t_r && f->second <= d.t_r + delta;
    open.emplace(key, groups.size());
    groups.push_back({RetweetGroup{d.speaker, d.listener, d.t_r, 1, 1, followed,
                                   d.speaker_follows_listener},
                      {{d.msg, d.repeater}}});
  }
  std::sort(groups.begin(), groups.end(),
            [](const OpenGroup& a, const OpenGroup& b) { return group_less(a.group, b.group); });

  TemporalDigraph final_graph = initial_graph;
  absl::flat_hash_map<UserId, std::vector<Timestamp>> tweet_times;
  for (const auto& e : log) {
    if (const auto* fw = e.follow()) final_graph.add_follow(fw->follower, fw->followee, e.t);
    if (const auto* tw = e.tweet()) tweet_times[tw->author].push_back(e.t);
  }

  FactorTable t;
  t.names = {"followers_s", "followees_s",  "tweets_s",    "tweet_rate_s",
             "reciprocity", "tweets_sl",    "retweets_sl", "repeaters_sl"};
  t.features.resize(static_cast<Eigen::Index>(groups.size()), 8);
  t.labels.resize(static_cast<Eigen::Index>(groups.size()));
  std::vector<std::uint64_t> ids;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    const auto& g = groups[i].group;
    const auto row = static_cast<Eigen::Index>(i);
    double tweets = 0.0;
    if (auto it = tweet_times.find(g.speaker); it != tweet_times.end())
      tweets = static_cast<double>(std::upper_bound(it->second.begin(), it->second.end(), g.t_r) -
                                   it->second.begin());
    ids.clear();
    for (const auto& m : groups[i].members) ids.push_back(to_int(m.msg));
    const auto distinct_tweets = distinct_count(ids);
    ids.clear();
    for (const auto& m : groups[i].members) ids.push_back(to_int(m.repeater));
    const auto distinct_repeaters = distinct_count(ids);

    t.features(row, 0) = static_cast<double>(final_graph.followers_at(g.speaker, g.t_r).size());
    t.features(row, 1) = static_cast<double>(final_graph.followees_at(g.speaker, g.t_r).size());
    t.features(row, 2) = tweets;
    t.features(row, 3) = tweets * 86400.0 / std::max(g.t_r, delta);
    t.features(row, 4) = g.reciprocal ? 1.0 : 0.0;
    t.features(row, 5) = static_cast<double>(distinct_tweets);
    t.features(row, 6) = static_cast<double>(g.n);
    t.features(row, 7) = static_cast<double>(distinct_repeaters);
    t.labels[row] = g.i_delta ? 1.0 : 0.0;
  }
  return t;
}

FactorTable select_factors(const FactorTable& table, std::span<const std::string> names) {
  FactorTable out;
  out.names.assign(names.begin(), names.end());
  out.features.resize(table.features.rows(), static_cast<Eigen::Index>(names.size()));
  out.labels = table.labels;
  for (std::size_t j = 0; j < names.size(); ++j) {
    auto it = std::find(table.names.begin(), table.names.end(), names[j]);
    if (it == table.names.end())
      throw Error(Errc::invalid_config, "unknown factor '" + names[j] + "'");
    out.features.col(static_cast<Eigen::Index>(j)) =
        table.features.col(static_cast<Eigen::Index>(it - table.names.begin()));
  }
  return out;
}

void write_factor_table_csv(std::ostream& out, const FactorTable& table) {
  for (const auto& n : table.names) out << n << ',';
  out << "label\n";
  for (Eigen::Index i = 0; i < table.features.rows(); ++i) {
    for (Eigen::Index j = 0; j < table.features.cols(); ++j)
      out << format_number(table.features(i, j)) << ',';
    out << (table.labels[i] != 0.0 ? 1 : 0) << '\n';
  }
}

FactorTable read_factor_table_csv(std::istream& in) {
  FactorTable t;
  std::string line;
  std::size_t lineno = 0;
  std::vector<std::vector<double>> rows;
  std::vector<double> labels;
  bool header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split_csv(line);
    if (!header) {
      if (cells.empty() || cells.back() != "label")
        throw Error(Errc::malformed_record, "line 1: last column must be 'label'");
      for (std::size_t j = 0; j + 1 < cells.size(); ++j) t.names.emplace_back(cells[j]);
      header = true;
      continue;
    }
    try {
      if (cells.size() != t.names.size() + 1)
        throw Error(Errc::malformed_record, "expected " + std::to_string(t.names.size() + 1) +
                                                " fields, got " + std::to_string(cells.size()));
      std::vector<double> row;
      for (std::size_t j = 0; j < t.names.size(); ++j) row.push_back(parse_number(cells[j]));
      const auto label = parse_uint(cells.back());
      if (label > 1) throw Error(Errc::malformed_record, "label must be 0 or 1");
      rows.push_back(std::move(row));
      labels.push_back(static_cast<double>(label));
    } catch (const Error& e) {
      throw Error(e.code(), "line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  if (!header) throw Error(Errc::malformed_record, "missing header");
  t.features.resize(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(t.names.size()));
  t.labels.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < t.names.size(); ++j)
      t.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    t.labels[static_cast<Eigen::Index>(i)] = labels[i];
  }
  return t;
}

}  // namespace trf
