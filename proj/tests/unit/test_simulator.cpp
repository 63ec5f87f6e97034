#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include <absl/container/flat_hash_set.h>

#include "trf/detector.hpp"
#include "trf/simulator.hpp"
#include "trf/topology.hpp"

using namespace trf;

namespace {

SimConfig small_config(std::uint64_t seed) {
  SimConfig c;
  c.initial_graph = synth_graph(GraphFamily::random, 120, 0.05, 2);
  c.duration = 3 * 86400.0;
  c.tweet_rate = 4.0 / 86400.0;
  c.retweet_prob = 0.2;
  c.params_reciprocal = {0.4, 0.5};
  c.params_nonreciprocal = {0.2, 0.3};
  c.seed = seed;
  return c;
}

std::string log_text(const EventLog& log) {
  std::ostringstream s;
  write_log(s, log);
  return s.str();
}

// Counts groups and their outcomes by window size without keeping anything.
struct CountingSink : SimulationSink {
  std::uint64_t groups = 0, single = 0, single_followed = 0;
  void on_group(const RetweetGroup& g) override {
    ++groups;
    if (g.n_window == 1) {
      ++single;
      single_followed += g.i_delta;
    }
  }
};

}  // namespace

TEST_SUITE("simulator") {

TEST_CASE("config validation") {
  SimConfig c;
  c.duration = 0.0;
  CHECK_THROWS_AS(c.validate(), Error);
  c = SimConfig{};
  c.params_reciprocal.p = 1.5;
  try {
    c.validate();
    FAIL("expected InvalidConfig");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::invalid_config);
  }
  c = SimConfig{};
  c.poll_interval = 0.0;
  CHECK_THROWS_AS(run_simulation(c), Error);
}

TEST_CASE("default parameters") {
  const SimConfig c;
  CHECK(c.params_reciprocal.p == doctest::Approx(24.0e-4));
  CHECK(c.params_reciprocal.p * c.params_reciprocal.q == doctest::Approx(10.2e-4));
  CHECK(c.params_nonreciprocal.p == doctest::Approx(0.7e-4));
  CHECK(c.params_nonreciprocal.p * c.params_nonreciprocal.q == doctest::Approx(0.16e-4));
}

TEST_CASE("p = 0 gives no TRF events") {
  auto c = small_config(4);
  c.params_reciprocal = {0.0, 0.9};
  c.params_nonreciprocal = {0.0, 0.9};
  const auto r = run_simulation(c);
  CHECK(r.stats.retweets > 0);
  CHECK(r.trf.empty());
}

TEST_CASE("p = q = 1 follows at the first delivery of every group") {
  auto c = small_config(6);
  c.params_reciprocal = {1.0, 1.0};
  c.params_nonreciprocal = {1.0, 1.0};
  const auto r = run_simulation(c);
  REQUIRE(!r.trf.empty());
  CHECK(r.trf.size() == r.groups.size());
  for (const auto& g : r.groups) CHECK(g.i_delta);
  for (const auto& t : r.trf) {
    CHECK(t.n_received == 1);
    CHECK(t.t_l == t.t_r);
  }
}

TEST_CASE("single-retweet groups follow with probability p*q") {
  // One speaker, many repeaters, each with their own listener: every group
  // sees at most a few retweets. p = q = 0.5.
  SimConfig c;
  const int repeaters = 20000;
  for (int i = 1; i <= repeaters; ++i) {
    c.initial_graph.add_follow(user_id(i), user_id(0), 0.0);
    c.initial_graph.add_follow(user_id(repeaters + i), user_id(i), 0.0);
  }
  c.params_nonreciprocal = {0.5, 0.5};
  c.retweet_prob = 1.0;
  c.delta = 3600.0;
  // Only tweets of user 0 reach anyone who does not follow the author.
  c.tweet_rate = 1.0 / 7200.0;
  // Listeners drop out once they follow, so later tweets add little.
  c.duration = 7200.0 * 30;
  c.seed = 17;
  CountingSink sink;
  run_simulation(c, sink);
  REQUIRE(sink.single > 30000);
  const double f = double(sink.single_followed) / double(sink.single);
  const double se = std::sqrt(0.25 * 0.75 / double(sink.single));
  CHECK(std::abs(f - 0.25) < 3 * se);
}

TEST_CASE("identical seeds give identical output") {
  const auto a = run_simulation(small_config(9));
  const auto b = run_simulation(small_config(9));
  CHECK(log_text(a.log) == log_text(b.log));
  CHECK(a.trf == b.trf);
  CHECK(a.groups == b.groups);
  const auto c = run_simulation(small_config(10));
  CHECK(log_text(a.log) != log_text(c.log));
}

TEST_CASE("adding exogenous follows leaves the tweet stream alone") {
  auto base = small_config(12);
  auto exo = base;
  exo.exo_follow_rate = 1.0 / 86400.0;
  auto tweets = [](const EventLog& log) {
    std::vector<Event> out;
    for (const auto& e : log)
      if (e.tweet()) out.push_back(e);
    return out;
  };
  CHECK(tweets(run_simulation(base).log) == tweets(run_simulation(exo).log));
}

TEST_CASE("grouping invariants") {
  auto c = small_config(21);
  c.exo_follow_rate = 0.5 / 86400.0;
  const auto r = run_simulation(c);
  REQUIRE(is_sorted_log(r.log));
  CHECK_NOTHROW(validate_log(r.log));
  REQUIRE(!r.trf.empty());

  absl::flat_hash_map<std::pair<UserId, UserId>, std::vector<const RetweetGroup*>> by_pair;
  for (const auto& g : r.groups) by_pair[{g.speaker, g.listener}].push_back(&g);
  for (const auto& t : r.trf) {
    CHECK(t.t_s < t.t_r);
    CHECK(t.t_l == t.t_r);
    CHECK_FALSE(c.initial_graph.has_edge(t.listener, t.speaker));
    // The group that produced the follow opened no more than delta earlier.
    const auto& gs = by_pair[{t.speaker, t.listener}];
    bool found = false;
    for (const auto* g : gs)
      if (g->i_delta && g->t_r <= t.t_l && t.t_l - g->t_r <= c.delta) found = true;
    CHECK(found);
  }
  for (const auto& g : r.groups) {
    CHECK(g.n >= 1);
    CHECK(g.n <= g.n_window);
    // No group for a pair that already followed at open time.
    CHECK_FALSE(c.initial_graph.has_edge(g.listener, g.speaker));
  }
  // Exactly one follow per edge.
  absl::flat_hash_set<std::pair<UserId, UserId>> seen;
  for (const auto& e : r.log)
    if (const auto* f = e.follow()) CHECK(seen.insert({f->follower, f->followee}).second);
}

TEST_CASE("simulator groups equal the detector's reconstruction") {
  for (std::uint64_t seed : {31, 32, 33}) {
    auto c = small_config(seed);
    c.exo_follow_rate = 0.5 / 86400.0;
    const auto r = run_simulation(c);
    const auto deliveries = retweet_deliveries(r.log, c.initial_graph);
    const auto groups = group_retweets(deliveries, follow_times(r.log), c.delta);
    REQUIRE(groups.size() == r.groups.size());
    CHECK(groups == r.groups);
  }
}

TEST_CASE("exogenous follows are Poisson in count") {
  // Every user always has candidates on a dense graph, so the count per
  // run is Poisson(rate * users * duration); check mean and dispersion.
  SimConfig c;
  c.initial_graph = synth_graph(GraphFamily::random, 200, 0.3, 5);
  c.tweet_rate = 0.0;
  c.exo_follow_rate = 1.0 / 86400.0 / 20.0;
  c.duration = 86400.0;
  const double expected = c.exo_follow_rate * 200 * c.duration;  // 10
  std::vector<double> counts;
  for (std::uint64_t seed = 1; seed <= 300; ++seed) {
    c.seed = seed;
    counts.push_back(static_cast<double>(run_simulation(c).stats.exogenous_follows));
  }
  double mean = 0.0;
  for (double x : counts) mean += x;
  mean /= counts.size();
  double var = 0.0;
  for (double x : counts) var += (x - mean) * (x - mean);
  var /= counts.size() - 1;
  CHECK(std::abs(mean - expected) < 3 * std::sqrt(expected / counts.size()));
  // Dispersion index of a Poisson sample is 1 with sd about sqrt(2/(k-1)).
  CHECK(std::abs(var / mean - 1.0) < 3 * std::sqrt(2.0 / (counts.size() - 1)));
}

TEST_CASE("retweet latency default puts over 90% under an hour") {
  auto c = small_config(40);
  c.tweet_rate = 20.0 / 86400.0;
  const auto r = run_simulation(c);
  std::size_t total = 0, fast = 0;
  for (const auto& e : r.log)
    if (const auto* rt = e.retweet()) {
      ++total;
      fast += (e.t - rt->origin_t) < 3600.0;
    }
  REQUIRE(total > 5000);
  CHECK(double(fast) / total >= 0.90);
}

TEST_CASE("snapshot_observer") {
  TemporalDigraph g;
  g.add_follow(user_id(2), user_id(1), 0.0);
  const EventLog log{make_follow(7.0, user_id(3), user_id(1))};
  const std::vector<UserId> users{user_id(1)};
  const auto snaps = snapshot_observer(log, g, users, 5.0, 10.0);
  REQUIRE(snaps.size() == 3);
  CHECK(snaps[0].t == 0.0);
  CHECK(snaps[1].followers == std::vector<UserId>{user_id(2)});
  CHECK(snaps[2].t == 10.0);
  CHECK(snaps[2].followers == (std::vector<UserId>{user_id(2), user_id(3)}));

  const auto quiet = snapshot_observer(EventLog{}, g, users, 5.0, 20.0);
  for (const auto& s : quiet) CHECK(s.followers == std::vector<UserId>{user_id(2)});
}

TEST_CASE("snapshot diffs recover follow times within one poll") {
  auto c = small_config(50);
  c.exo_follow_rate = 1.0 / 86400.0;
  const auto r = run_simulation(c);
  const auto users = c.initial_graph.users();
  const auto snaps = snapshot_observer(r.log, c.initial_graph, users, c.poll_interval, c.duration);
  absl::flat_hash_map<std::pair<UserId, UserId>, Timestamp> seen_at;
  for (std::size_t i = 1; i < snaps.size(); ++i) {
    if (snaps[i].user != snaps[i - 1].user) continue;
    std::vector<UserId> fresh;
    std::set_difference(snaps[i].followers.begin(), snaps[i].followers.end(),
                        snaps[i - 1].followers.begin(), snaps[i - 1].followers.end(),
                        std::back_inserter(fresh));
    for (UserId f : fresh) seen_at[{f, snaps[i].user}] = snaps[i].t;
  }
  std::size_t follows = 0;
  for (const auto& e : r.log)
    if (const auto* f = e.follow()) {
      ++follows;
      auto it = seen_at.find({f->follower, f->followee});
      REQUIRE(it != seen_at.end());
      CHECK(it->second >= e.t);
      CHECK(it->second - e.t < c.poll_interval);
    }
  CHECK(follows == seen_at.size());
}

TEST_CASE("synth_graph families") {
  const auto cyc = synth_graph(GraphFamily::cycle, 5, 0.0, 0);
  CHECK(cyc.edge_count() == 5);
  CHECK(tarjan_scc(cyc).sizes == std::vector<std::size_t>{5});

  for (std::size_t n : {2, 10, 50}) {
    const auto dag = synth_graph(GraphFamily::dag_hierarchy, n, 0.1, 3);
    const auto scc = tarjan_scc(dag);
    CHECK(scc.sizes.size() == n);  // acyclic
    bool has_sink = false;
    for (UserId u : dag.users()) has_sink |= dag.followees(u).empty();
    CHECK(has_sink);
  }

  const auto a = synth_graph(GraphFamily::random, 30, 0.1, 7);
  const auto b = synth_graph(GraphFamily::random, 30, 0.1, 7);
  CHECK(a.edges() == b.edges());

  const auto pairs = synth_graph(GraphFamily::reciprocal_pairs, 30, 0.2, 1);
  for (const auto& e : pairs.edges()) CHECK(pairs.has_edge(e.followee, e.follower));

  CHECK_THROWS_AS(synth_graph(GraphFamily::cycle, 0, 0.0, 0), Error);
  CHECK_THROWS_AS(resolve_graph_source("synth:blob:5", "."), Error);
  CHECK(resolve_graph_source("synth:cycle:7", ".").edge_count() == 7);
}

TEST_CASE("config files") {
  std::istringstream in(
      "# comment\n"
      "duration = 3600   # one hour\n"
      "delta = 600\n"
      "params_reciprocal = 0.5, 0.25\n"
      "retweet_latency_dist = lognormal 300 1.0\n"
      "initial_graph = synth:cycle:4\n"
      "multi_hop = true\n"
      "seed = 99\n");
  const auto c = parse_sim_config(in, ".");
  CHECK(c.duration == 3600.0);
  CHECK(c.delta == 600.0);
  CHECK(c.params_reciprocal == TrfModelParams{0.5, 0.25});
  CHECK(c.retweet_latency_dist.median == 300.0);
  CHECK(c.initial_graph.edge_count() == 4);
  CHECK(c.multi_hop);
  CHECK(c.seed == 99);

  std::istringstream unknown("durration = 5\n");
  try {
    parse_sim_config(unknown, ".");
    FAIL("expected InvalidConfig");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::invalid_config);
    CHECK(std::string(e.what()).find("line 1") != std::string::npos);
  }
  std::istringstream negative("tweet_rate = -1\n");
  CHECK_THROWS_AS(parse_sim_config(negative, "."), Error);

  // Entries written back parse to the same config.
  std::ostringstream text;
  for (const auto& [k, v] : config_entries(c)) text << k << " = " << v << '\n';
  std::istringstream again(text.str());
  const auto d = parse_sim_config(again, ".");
  CHECK(config_entries(d) == config_entries(c));
}

}  // TEST_SUITE
