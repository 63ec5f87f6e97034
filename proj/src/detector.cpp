#include "trf/detector.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>

namespace trf {

namespace {

using PairKey = std::pair<UserId, UserId>;

void apply_follow(TemporalDigraph& g, const Event& e, const Follow& f) {
  if (g.has_edge(f.follower, f.followee))
    throw Error(Errc::inconsistent_log, "follow " + std::to_string(to_int(f.follower)) + " -> " +
                                            std::to_string(to_int(f.followee)) + " at t=" +
                                            format_number(e.t) + " re-creates an existing edge");
  g.add_follow(f.follower, f.followee, e.t);
}

bool follows_at(const TemporalDigraph& g, UserId a, UserId b, Timestamp t) {
  const auto when = g.edge_time(a, b);
  return when && *when <= t;
}

// Walks the log in order, keeping `graph` at the state just before each event.
template <class OnEvent>
void replay(std::span<const Event> log, TemporalDigraph graph, OnEvent&& on_event) {
  for (const auto& e : log) {
    on_event(e, static_cast<const TemporalDigraph&>(graph));
    if (const auto* f = e.follow()) apply_follow(graph, e, *f);
  }
}

}  // namespace

FollowTimes follow_times(std::span<const Event> log) {
  FollowTimes out;
  for (const auto& e : log)
    if (const auto* f = e.follow()) out.try_emplace({f->follower, f->followee}, e.t);
  return out;
}

std::vector<Delivery> retweet_deliveries(std::span<const Event> log,
                                         const TemporalDigraph& initial_graph) {
  std::vector<Delivery> out;
  replay(log, initial_graph, [&](const Event& e, const TemporalDigraph& g) {
    const auto* rt = e.retweet();
    if (!rt || !g.has_user(rt->repeater)) return;
    const UserId speaker = rt->origin_author;
    for (const auto& a : g.followers(rt->repeater)) {
      if (a.created_at > e.t || a.other == speaker) continue;
      out.push_back(Delivery{speaker, rt->repeater, a.other, rt->msg, rt->origin_t, e.t,
                             follows_at(g, a.other, speaker, e.t),
                             follows_at(g, speaker, a.other, e.t)});
    }
  });
  return out;
}

std::vector<TrEvent> extract_tr_events(std::span<const Event> log,
                                       const TemporalDigraph& initial_graph, double delta) {
  const auto follows = follow_times(log);
  std::vector<TrEvent> out;
  for (const auto& d : retweet_deliveries(log, initial_graph)) {
    if (d.listener_follows_speaker) continue;
    auto it = follows.find({d.listener, d.speaker});
    const bool followed = it != follows.end() && it->second >= d.t_r && it->second <= d.t_r + delta;
    out.push_back(TrEvent{d.speaker, d.repeater, d.listener, d.t_r, followed});
  }
  return out;
}

std::vector<RetweetGroup> group_retweets(std::span<const Delivery> deliveries,
                                         const FollowTimes& follows, double delta) {
  std::vector<RetweetGroup> out;
  absl::flat_hash_map<PairKey, std::size_t> open;
  for (const auto& d : deliveries) {
    const PairKey key{d.speaker, d.listener};
    auto it = open.find(key);
    if (it != open.end() && d.t_r >= out[it->second].t_r + delta) {
      open.erase(it);
      it = open.end();
    }
    if (it != open.end()) {
      auto& g = out[it->second];
      ++g.n_window;
      // Retweets after the follow are outside the group proper.
      if (!d.listener_follows_speaker) ++g.n;
      continue;
    }
    if (d.listener_follows_speaker) continue;
    auto f = follows.find({d.listener, d.speaker});
    const bool followed = f != follows.end() && f->second >= d.t_r && f->second <= d.t_r + delta;
    open.emplace(key, out.size());
    out.push_back(RetweetGroup{d.speaker, d.listener, d.t_r, 1, 1, followed,
                               d.speaker_follows_listener});
  }
  std::sort(out.begin(), out.end(), group_less);
  return out;
}

std::vector<TrfDetection> detect_trf(std::span<const Event> log,
                                     const TemporalDigraph& initial_graph, double delta) {
  // Eligible deliveries per (speaker, listener), in time order.
  absl::flat_hash_map<PairKey, std::vector<Delivery>> by_pair;
  for (const auto& d : retweet_deliveries(log, initial_graph))
    if (!d.listener_follows_speaker) by_pair[{d.speaker, d.listener}].push_back(d);

  std::vector<TrfDetection> out;
  for (const auto& e : log) {
    const auto* f = e.follow();
    if (!f) continue;
    auto it = by_pair.find({f->followee, f->follower});
    if (it == by_pair.end()) continue;
    const auto& ds = it->second;
    auto last = std::upper_bound(ds.begin(), ds.end(), e.t,
                                 [](Timestamp t, const Delivery& d) { return t < d.t_r; });
    if (last == ds.begin()) continue;
    const Delivery& d = *std::prev(last);
    if (e.t > d.t_r + delta) continue;
    out.push_back(TrfDetection{d.speaker, d.repeater, d.listener, d.t_s, d.t_r, e.t, e.t - d.t_r,
                               d.speaker_follows_listener});
  }
  std::sort(out.begin(), out.end(), detection_less);
  return out;
}

std::vector<TrfDetection> detect_from_snapshots(std::span<const Snapshot> snapshots,
                                                std::span<const Delivery> deliveries,
                                                double delta) {
  absl::flat_hash_map<PairKey, std::vector<const Delivery*>> by_pair;
  for (const auto& d : deliveries) by_pair[{d.speaker, d.listener}].push_back(&d);
  for (auto& [key, v] : by_pair)
    std::stable_sort(v.begin(), v.end(),
                     [](const Delivery* a, const Delivery* b) { return a->t_r < b->t_r; });

  std::vector<const Snapshot*> order;
  order.reserve(snapshots.size());
  for (const auto& s : snapshots) order.push_back(&s);
  std::stable_sort(order.begin(), order.end(), [](const Snapshot* a, const Snapshot* b) {
    return std::tie(a->user, a->t) < std::tie(b->user, b->t);
  });

  std::vector<TrfDetection> out;
  std::vector<UserId> fresh;
  for (std::size_t i = 1; i < order.size(); ++i) {
    const Snapshot& prev = *order[i - 1];
    const Snapshot& cur = *order[i];
    if (prev.user != cur.user) continue;
    fresh.clear();
    std::set_difference(cur.followers.begin(), cur.followers.end(), prev.followers.begin(),
                        prev.followers.end(), std::back_inserter(fresh));
    for (UserId listener : fresh) {
      auto it = by_pair.find({cur.user, listener});
      if (it == by_pair.end()) continue;
      const auto& ds = it->second;
      auto last = std::upper_bound(ds.begin(), ds.end(), cur.t,
                                   [](Timestamp t, const Delivery* d) { return t < d->t_r; });
      if (last == ds.begin()) continue;
      const Delivery& d = **std::prev(last);
      if (cur.t > d.t_r + delta) continue;
      out.push_back(TrfDetection{d.speaker, d.repeater, d.listener, d.t_s, d.t_r, cur.t,
                                 cur.t - d.t_r, d.speaker_follows_listener});
    }
  }
  std::sort(out.begin(), out.end(), detection_less);
  return out;
}

std::string_view to_string(Stratum s) {
  switch (s) {
    case Stratum::all: return "all";
    case Stratum::reciprocal: return "reciprocal";
    case Stratum::nonreciprocal: return "nonreciprocal";
  }
  return "all";
}

Stratum parse_stratum(std::string_view s) {
  if (s == "all") return Stratum::all;
  if (s == "reciprocal") return Stratum::reciprocal;
  if (s == "nonreciprocal") return Stratum::nonreciprocal;
  throw Error(Errc::malformed_record, "unknown stratum '" + std::string(s) + "'");
}

std::vector<PTrfRow> estimate_p_trf(std::span<const RetweetGroup> groups, Stratum filter,
                                    bool by_n, GroupSize size) {
  std::vector<std::pair<std::uint64_t, std::uint64_t>> counts;  // index n: (groups, follows)
  std::uint64_t total = 0, followed = 0;
  for (const auto& g : groups) {
    if (filter == Stratum::reciprocal && !g.reciprocal) continue;
    if (filter == Stratum::nonreciprocal && g.reciprocal) continue;
    ++total;
    followed += g.i_delta;
    if (by_n) {
      const std::uint32_t n = size == GroupSize::window ? g.n_window : g.n;
      if (counts.size() <= n) counts.resize(n + 1);
      ++counts[n].first;
      counts[n].second += g.i_delta;
    }
  }
  if (total == 0)
    throw Error(Errc::empty_input,
                "no retweet groups in stratum '" + std::string(to_string(filter)) + "'");

  std::vector<PTrfRow> rows;
  if (!by_n) {
    rows.push_back({filter, 0, total, followed, static_cast<double>(followed) / total});
    return rows;
  }
  for (std::uint32_t n = 0; n < counts.size(); ++n)
    if (counts[n].first > 0)
      rows.push_back({filter, n, counts[n].first, counts[n].second,
                      static_cast<double>(counts[n].second) / counts[n].first});
  return rows;
}

void write_p_trf_csv(std::ostream& out, std::span<const PTrfRow> rows) {
  out << "stratum,n,groups,followers,probability\n";
  for (const auto& r : rows)
    out << to_string(r.stratum) << ',' << r.n << ',' << r.groups << ',' << r.followers << ','
        << format_number(r.probability) << '\n';
}

std::vector<PTrfRow> read_p_trf_csv(std::istream& in) {
  std::vector<PTrfRow> rows;
  std::string line;
  std::size_t lineno = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!header) {
      if (line != "stratum,n,groups,followers,probability")
        throw Error(Errc::malformed_record, "expected header stratum,n,groups,followers,probability");
      header = true;
      continue;
    }
    const auto c = split_csv(line);
    try {
      if (c.size() != 5) throw Error(Errc::malformed_record, "expected 5 fields");
      PTrfRow r{parse_stratum(c[0]), static_cast<std::uint32_t>(parse_uint(c[1])), parse_uint(c[2]),
                parse_uint(c[3]), parse_number(c[4])};
      if (r.followers > r.groups) throw Error(Errc::malformed_record, "followers exceed groups");
      rows.push_back(r);
    } catch (const Error& e) {
      throw Error(e.code(), "line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  if (!header) throw Error(Errc::malformed_record, "missing header");
  return rows;
}

namespace {

ProbabilityEstimate summarize(const std::vector<double>& fractions) {
  const double k = static_cast<double>(fractions.size());
  double mean = 0.0;
  for (double f : fractions) mean += f;
  mean /= k;
  double ss = 0.0;
  for (double f : fractions) ss += (f - mean) * (f - mean);
  const double se = fractions.size() > 1 ? std::sqrt(ss / (k - 1.0) / k) : 0.0;
  return {mean, fractions.size(), se};
}

bool followed_by(const FollowTimes& follows, UserId listener, UserId speaker, Timestamp deadline) {
  auto it = follows.find({listener, speaker});
  return it != follows.end() && it->second <= deadline;
}

}  // namespace

ProbabilityEstimate estimate_p_exo(std::span<const Event> log,
                                   const TemporalDigraph& initial_graph, double delta) {
  const auto follows = follow_times(log);
  absl::flat_hash_map<UserId, std::vector<Timestamp>> retweeted_at;  // by speaker, ascending
  for (const auto& e : log)
    if (const auto* rt = e.retweet()) retweeted_at[rt->origin_author].push_back(e.t);

  std::vector<double> fractions;
  replay(log, initial_graph, [&](const Event& e, const TemporalDigraph& g) {
    const auto* tw = e.tweet();
    if (!tw || !g.has_user(tw->author)) return;
    if (auto it = retweeted_at.find(tw->author); it != retweeted_at.end()) {
      auto first = std::lower_bound(it->second.begin(), it->second.end(), e.t);
      if (first != it->second.end() && *first <= e.t + delta) return;
    }
    const auto phi = g.followers_of_followers(tw->author, e.t);
    if (phi.empty()) return;
    std::size_t hits = 0;
    for (UserId l : phi) hits += followed_by(follows, l, tw->author, e.t + delta);
    fractions.push_back(static_cast<double>(hits) / static_cast<double>(phi.size()));
  });
  if (fractions.empty())
    throw Error(Errc::no_qualifying_tweets, "no retweet-free tweet with a non-empty candidate set");
  return summarize(fractions);
}

ProbabilityEstimate estimate_p_endo(std::span<const Event> log,
                                    const TemporalDigraph& initial_graph, double delta) {
  const auto follows = follow_times(log);
  std::vector<double> fractions;
  std::vector<UserId> phi_r;
  replay(log, initial_graph, [&](const Event& e, const TemporalDigraph& g) {
    const auto* rt = e.retweet();
    if (!rt || !g.has_user(rt->repeater) || !g.has_user(rt->origin_author)) return;
    const UserId s = rt->origin_author;
    phi_r.clear();
    if (follows_at(g, rt->repeater, s, e.t)) {
      // Every follower of a follower of S is two hops from S.
      for (const auto& a : g.followers(rt->repeater))
        if (a.created_at <= e.t && a.other != s && !follows_at(g, a.other, s, e.t))
          phi_r.push_back(a.other);
    } else {
      const auto phi = g.followers_of_followers(s, e.t);
      for (const auto& a : g.followers(rt->repeater))
        if (a.created_at <= e.t && std::binary_search(phi.begin(), phi.end(), a.other))
          phi_r.push_back(a.other);
    }
    if (phi_r.empty()) return;
    std::size_t hits = 0;
    for (UserId l : phi_r) hits += followed_by(follows, l, s, e.t + delta);
    fractions.push_back(static_cast<double>(hits) / static_cast<double>(phi_r.size()));
  });
  if (fractions.empty())
    throw Error(Errc::no_qualifying_retweets, "no retweet with a non-empty candidate set");
  return summarize(fractions);
}

std::vector<double> empirical_cdf(std::span<const double> values, std::span<const double> edges) {
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> out;
  out.reserve(edges.size());
  for (double edge : edges) {
    const auto count = std::upper_bound(sorted.begin(), sorted.end(), edge) - sorted.begin();
    out.push_back(sorted.empty() ? 0.0
                                 : static_cast<double>(count) / static_cast<double>(sorted.size()));
  }
  return out;
}

LatencyCdf latency_histograms(std::span<const TrfDetection> detections,
                              std::span<const Event> events, std::span<const double> edges) {
  std::vector<double> trf, rt;
  trf.reserve(detections.size());
  for (const auto& d : detections) trf.push_back(d.t_l - d.t_r);
  for (const auto& e : events)
    if (const auto* r = e.retweet()) rt.push_back(e.t - r->origin_t);
  if (trf.empty()) throw Error(Errc::empty_input, "no TRF detections");
  if (rt.empty()) throw Error(Errc::empty_input, "no retweets");
  LatencyCdf out;
  out.edges.assign(edges.begin(), edges.end());
  out.trf_cdf = empirical_cdf(trf, edges);
  out.retweet_cdf = empirical_cdf(rt, edges);
  out.trf_count = trf.size();
  out.retweet_count = rt.size();
  return out;
}

}  // namespace trf
