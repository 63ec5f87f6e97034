#include "trf/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include <absl/container/flat_hash_map.h>
#include <absl/container/flat_hash_set.h>

#include "trf/rng.hpp"

namespace trf {

namespace {

bool is_probability(double x) { return x >= 0.0 && x <= 1.0; }

[[noreturn]] void invalid(const std::string& why) { throw Error(Errc::invalid_config, why); }

}  // namespace

void SimConfig::validate() const {
  if (!(duration > 0.0) || !std::isfinite(duration)) invalid("duration must be positive");
  if (!(delta > 0.0) || !std::isfinite(delta)) invalid("delta must be positive");
  if (!(tweet_rate >= 0.0) || !std::isfinite(tweet_rate)) invalid("tweet_rate must be >= 0");
  if (!(exo_follow_rate >= 0.0) || !std::isfinite(exo_follow_rate))
    invalid("exo_follow_rate must be >= 0");
  if (!is_probability(retweet_prob)) invalid("retweet_prob must lie in [0, 1]");
  if (!(poll_interval > 0.0) || !std::isfinite(poll_interval))
    invalid("poll_interval must be positive");
  if (!(retweet_latency_dist.median > 0.0) || !(retweet_latency_dist.sigma >= 0.0))
    invalid("retweet latency needs median > 0 and sigma >= 0");
  for (const auto* params : {&params_reciprocal, &params_nonreciprocal})
    if (!is_probability(params->p) || !is_probability(params->q))
      invalid("model parameters p and q must lie in [0, 1]");
}

namespace {

enum Rank : int { kTweetRank = 0, kRetweetRank = 1, kFollowRank = 2 };

struct PendingRetweet {
  Timestamp t;
  std::uint64_t seq;
  UserId repeater;
  MsgId msg;
  UserId author;
  Timestamp t_s;
};

struct LaterFirst {
  bool operator()(const PendingRetweet& a, const PendingRetweet& b) const {
    return std::tie(a.t, a.seq) > std::tie(b.t, b.seq);
  }
};

struct OpenGroup {
  Timestamp t_open;
  std::uint32_t n;
  std::uint32_t n_window;
  bool observed;
  bool followed;
  bool reciprocal;
};

struct Cascade {
  absl::flat_hash_set<UserId> reached;
  std::uint32_t pending = 0;
};

using PairKey = std::pair<UserId, UserId>;  // (speaker, listener)

class Engine {
 public:
  Engine(const SimConfig& cfg, SimulationSink& sink)
      : cfg_(cfg),
        sink_(sink),
        graph_(cfg.initial_graph),
        users_(graph_.users()),
        tweet_rng_(Rng::substream(cfg.seed, "simulation/tweets")),
        retweet_rng_(Rng::substream(cfg.seed, "simulation/retweets")),
        latency_rng_(Rng::substream(cfg.seed, "simulation/latency")),
        group_rng_(Rng::substream(cfg.seed, "simulation/groups")),
        exo_rng_(Rng::substream(cfg.seed, "simulation/exogenous")) {}

  SimulationStats run() {
    const double n_users = static_cast<double>(users_.size());
    const double tweet_total = cfg_.tweet_rate * n_users;
    const double exo_total = cfg_.exo_follow_rate * n_users;
    constexpr double inf = std::numeric_limits<double>::infinity();

    double next_tweet = tweet_total > 0.0 ? tweet_rng_.exponential(tweet_total) : inf;
    double next_exo = exo_total > 0.0 ? exo_rng_.exponential(exo_total) : inf;

    while (true) {
      const double next_rt = pending_.empty() ? inf : pending_.top().t;
      // Equal times resolve in kind order: tweet, retweet, follow.
      if (next_tweet <= next_rt && next_tweet <= next_exo) {
        if (next_tweet > cfg_.duration) break;
        const double t = next_tweet;
        const UserId author = users_[tweet_rng_.below(users_.size())];
        next_tweet = t + tweet_rng_.exponential(tweet_total);
        on_tweet(t, author);
      } else if (next_rt <= next_exo) {
        if (next_rt > cfg_.duration) break;
        const PendingRetweet job = pending_.top();
        pending_.pop();
        on_retweet(job);
      } else {
        if (next_exo > cfg_.duration) break;
        const double t = next_exo;
        const UserId user = users_[exo_rng_.below(users_.size())];
        next_exo = t + exo_rng_.exponential(exo_total);
        on_exogenous(t, user);
      }
    }
    flush_groups();
    return stats_;
  }

  TemporalDigraph take_graph() { return std::move(graph_); }

 private:
  void emit(const Event& e) { sink_.on_event(e); }

  double latency() {
    return latency_rng_.lognormal(cfg_.retweet_latency_dist.median,
                                  cfg_.retweet_latency_dist.sigma);
  }

  void schedule_retweet(UserId repeater, MsgId msg, UserId author, Timestamp t_s, Timestamp now) {
    double t = now + latency();
    if (!(t > now)) t = std::nextafter(now, std::numeric_limits<double>::infinity());
    pending_.push({t, seq_++, repeater, msg, author, t_s});
  }

  void on_tweet(Timestamp t, UserId author) {
    const MsgId msg = msg_id(next_msg_++);
    ++stats_.tweets;
    emit(make_tweet(t, author, msg));

    buffer_.clear();
    for (const auto& a : graph_.followers(author)) buffer_.push_back(a.other);

    Cascade* cascade = nullptr;
    if (cfg_.multi_hop) {
      cascade = &cascades_[msg];
      cascade->reached.insert(author);
      cascade->reached.insert(buffer_.begin(), buffer_.end());
    }
    for (UserId follower : buffer_) {
      if (!retweet_rng_.bernoulli(cfg_.retweet_prob)) continue;
      schedule_retweet(follower, msg, author, t, t);
      if (cascade) ++cascade->pending;
    }
    if (cascade && cascade->pending == 0) cascades_.erase(msg);
  }

  void on_retweet(const PendingRetweet& job) {
    const Timestamp t = job.t;
    ++stats_.retweets;
    emit(make_retweet(t, job.repeater, job.msg, job.author, job.t_s));

    buffer_.clear();
    for (const auto& a : graph_.followers(job.repeater)) buffer_.push_back(a.other);

    Cascade* cascade = nullptr;
    if (cfg_.multi_hop) {
      auto it = cascades_.find(job.msg);
      if (it != cascades_.end()) cascade = &it->second;
    }
    for (UserId listener : buffer_) {
      if (listener == job.author) continue;
      deliver(job.author, job.repeater, listener, t, job.t_s);
      if (cascade && cascade->reached.insert(listener).second &&
          retweet_rng_.bernoulli(cfg_.retweet_prob)) {
        schedule_retweet(listener, job.msg, job.author, job.t_s, t);
        ++cascade->pending;
      }
    }
    if (cascade && --cascade->pending == 0) cascades_.erase(job.msg);
  }

  void deliver(UserId speaker, UserId repeater, UserId listener, Timestamp t, Timestamp t_s) {
    ++stats_.deliveries;
    auto it = groups_.find(PairKey{speaker, listener});
    if (it != groups_.end()) {
      OpenGroup& g = it->second;
      if (t < g.t_open + cfg_.delta) {
        ++g.n_window;
        if (!g.followed) {
          ++g.n;
          if (g.observed && group_rng_.bernoulli(params(g).q)) trf_follow(speaker, repeater, listener, t, t_s, g);
        }
        return;
      }
      close(it->first, g);
      if (graph_.has_edge(listener, speaker)) {
        groups_.erase(it);
        return;
      }
      open(it->second, speaker, repeater, listener, t, t_s);
      return;
    }
    if (graph_.has_edge(listener, speaker)) return;
    auto [slot, inserted] = groups_.try_emplace(PairKey{speaker, listener});
    open(slot->second, speaker, repeater, listener, t, t_s);
  }

  const TrfModelParams& params(const OpenGroup& g) const {
    return g.reciprocal ? cfg_.params_reciprocal : cfg_.params_nonreciprocal;
  }

  void open(OpenGroup& g, UserId speaker, UserId repeater, UserId listener, Timestamp t,
            Timestamp t_s) {
    g.t_open = t;
    g.n = 1;
    g.n_window = 1;
    g.followed = false;
    g.reciprocal = graph_.has_edge(speaker, listener);
    // One observation draw per group, then one follow draw per observed retweet.
    g.observed = group_rng_.bernoulli(params(g).p);
    if (g.observed && group_rng_.bernoulli(params(g).q))
      trf_follow(speaker, repeater, listener, t, t_s, g);
  }

  void trf_follow(UserId speaker, UserId repeater, UserId listener, Timestamp t, Timestamp t_s,
                  OpenGroup& g) {
    graph_.add_follow(listener, speaker, t);
    g.followed = true;
    ++stats_.trf_follows;
    emit(make_follow(t, listener, speaker));
    sink_.on_trf(GroundTruthTrf{speaker, repeater, listener, t_s, t, t, g.n,
                                graph_.has_edge(speaker, listener)});
  }

  void close(const PairKey& key, const OpenGroup& g) {
    ++stats_.groups;
    sink_.on_group(
        RetweetGroup{key.first, key.second, g.t_open, g.n, g.n_window, g.followed, g.reciprocal});
  }

  void on_exogenous(Timestamp t, UserId user) {
    candidates_.clear();
    for (const auto& y : graph_.followees(user))
      for (const auto& z : graph_.followees(y.other))
        if (z.other != user && !graph_.has_edge(user, z.other)) candidates_.push_back(z.other);
    if (candidates_.empty()) return;
    std::sort(candidates_.begin(), candidates_.end());
    candidates_.erase(std::unique(candidates_.begin(), candidates_.end()), candidates_.end());
    const UserId target = candidates_[exo_rng_.below(candidates_.size())];

    graph_.add_follow(user, target, t);
    ++stats_.exogenous_follows;
    emit(make_follow(t, user, target));
    // A follow inside an open window is what an observer sees, whatever caused it.
    auto it = groups_.find(PairKey{target, user});
    if (it != groups_.end() && !it->second.followed && t <= it->second.t_open + cfg_.delta)
      it->second.followed = true;
  }

  void flush_groups() {
    std::vector<PairKey> keys;
    keys.reserve(groups_.size());
    for (const auto& [key, g] : groups_) keys.push_back(key);
    std::sort(keys.begin(), keys.end());
    for (const auto& key : keys) close(key, groups_.at(key));
    groups_.clear();
  }

  const SimConfig& cfg_;
  SimulationSink& sink_;
  TemporalDigraph graph_;
  std::vector<UserId> users_;
  Rng tweet_rng_;
  Rng retweet_rng_;
  Rng latency_rng_;
  Rng group_rng_;
  Rng exo_rng_;
  std::priority_queue<PendingRetweet, std::vector<PendingRetweet>, LaterFirst> pending_;
  absl::flat_hash_map<PairKey, OpenGroup> groups_;
  absl::flat_hash_map<MsgId, Cascade> cascades_;
  std::vector<UserId> buffer_;
  std::vector<UserId> candidates_;
  std::uint64_t seq_ = 0;
  std::uint64_t next_msg_ = 1;
  SimulationStats stats_;
};

class CollectingSink : public SimulationSink {
 public:
  void on_event(const Event& e) override { log.push_back(e); }
  void on_trf(const GroundTruthTrf& r) override { trf.push_back(r); }
  void on_group(const RetweetGroup& g) override { groups.push_back(g); }

  EventLog log;
  std::vector<GroundTruthTrf> trf;
  std::vector<RetweetGroup> groups;
};

}  // namespace

SimulationStats run_simulation(const SimConfig& config, SimulationSink& sink) {
  config.validate();
  Engine engine(config, sink);
  return engine.run();
}

SimulationResult run_simulation(const SimConfig& config) {
  config.validate();
  CollectingSink sink;
  Engine engine(config, sink);
  SimulationResult result;
  result.stats = engine.run();
  result.final_graph = engine.take_graph();
  // Processing order already is log order; the stable sort only pins it down
  // for simultaneous events.
  std::stable_sort(sink.log.begin(), sink.log.end(), event_less);
  std::sort(sink.trf.begin(), sink.trf.end(), [](const auto& a, const auto& b) {
    return std::tie(a.t_l, a.speaker, a.listener) < std::tie(b.t_l, b.speaker, b.listener);
  });
  std::sort(sink.groups.begin(), sink.groups.end(), group_less);
  result.log = std::move(sink.log);
  result.trf = std::move(sink.trf);
  result.groups = std::move(sink.groups);
  return result;
}

std::vector<Snapshot> snapshot_observer(std::span<const Event> log,
                                        const TemporalDigraph& initial_graph,
                                        std::span<const UserId> users, double poll_interval,
                                        double horizon) {
  if (!(poll_interval > 0.0)) throw Error(Errc::invalid_config, "poll_interval must be positive");
  std::vector<UserId> monitored(users.begin(), users.end());
  std::sort(monitored.begin(), monitored.end());
  monitored.erase(std::unique(monitored.begin(), monitored.end()), monitored.end());

  // Creation time of every follower edge into a monitored user.
  absl::flat_hash_map<UserId, std::vector<std::pair<Timestamp, UserId>>> incoming;
  for (UserId u : monitored) {
    auto& v = incoming[u];
    if (initial_graph.has_user(u))
      for (const auto& a : initial_graph.followers(u)) v.emplace_back(a.created_at, a.other);
  }
  for (const auto& e : log)
    if (const auto* f = e.follow()) {
      auto it = incoming.find(f->followee);
      if (it != incoming.end()) it->second.emplace_back(e.t, f->follower);
    }

  const auto last_poll = static_cast<std::uint64_t>(std::ceil(std::max(horizon, 0.0) / poll_interval));
  std::vector<Snapshot> out;
  out.reserve(monitored.size() * (last_poll + 1));
  for (UserId u : monitored) {
    auto& v = incoming[u];
    std::sort(v.begin(), v.end());
    std::vector<UserId> current;
    std::size_t next = 0;
    for (std::uint64_t k = 0; k <= last_poll; ++k) {
      const double t = static_cast<double>(k) * poll_interval;
      bool changed = false;
      while (next < v.size() && v[next].first <= t) {
        current.push_back(v[next++].second);
        changed = true;
      }
      if (changed) std::sort(current.begin(), current.end());
      out.push_back(Snapshot{u, t, current});
    }
  }
  return out;
}

}  // namespace trf
