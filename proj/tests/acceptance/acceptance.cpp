// Acceptance checks. One PASS/FAIL line per criterion; pass criterion numbers
// as arguments to run a subset.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "logit_oracle.hpp"
#include "trf/cli.hpp"
#include "trf/detector.hpp"
#include "trf/inference.hpp"
#include "trf/simulator.hpp"
#include "trf/topology.hpp"

namespace fs = std::filesystem;
using namespace trf;

namespace {

const std::string kData = TRF_DATA_DIR;
constexpr double kDay = 86400.0;

struct Verdict {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Speakers in blocks that share their repeaters, so one listener edge serves
// every speaker of the block.
struct Block {
  std::size_t speakers;
  std::size_t repeaters;
  std::vector<std::size_t> listener_fanin;  // per listener: how many repeaters it follows
  bool reciprocal;                          // speakers follow all listeners
};

void add_block(TemporalDigraph& g, std::uint64_t& next, const Block& b) {
  std::vector<UserId> s, r;
  for (std::size_t i = 0; i < b.speakers; ++i) s.push_back(user_id(next++));
  for (std::size_t i = 0; i < b.repeaters; ++i) {
    r.push_back(user_id(next++));
    for (UserId x : s) g.add_follow(r.back(), x, 0.0);
  }
  std::size_t rot = 0;
  for (std::size_t k : b.listener_fanin) {
    const UserId l = user_id(next++);
    // Rotate which repeaters a small-fanin listener uses so load spreads.
    for (std::size_t j = 0; j < k; ++j) g.add_follow(l, r[(rot + j) % r.size()], 0.0);
    rot += k;
    if (b.reciprocal)
      for (UserId x : s) g.add_follow(x, l, 0.0);
  }
}

// ---------------------------------------------------------------------------

struct PerClassCounts : SimulationSink {
  // [reciprocal][n_window] -> (groups, follows)
  std::array<std::map<std::uint32_t, std::pair<std::uint64_t, std::uint64_t>>, 2> rows;
  void on_group(const RetweetGroup& g) override {
    auto& c = rows[g.reciprocal][g.n_window];
    ++c.first;
    c.second += g.i_delta;
  }
};

Verdict model_recovery() {
  const auto t0 = std::chrono::steady_clock::now();
  SimConfig c;
  std::uint64_t next = 0;
  // Three single-repeater listeners per repeater and twelve that follow all
  // twelve: n = 1 and n = 12 groups in a 3:1 ratio.
  std::vector<std::size_t> fanin(36, 1);
  fanin.insert(fanin.end(), 12, 12);
  for (int i = 0; i < 200; ++i) add_block(c.initial_graph, next, {50, 12, fanin, false});
  for (int i = 0; i < 50; ++i) add_block(c.initial_graph, next, {10, 12, fanin, true});
  c.retweet_prob = 1.0;
  c.delta = kDay;
  c.tweet_rate = 0.2 / kDay;
  c.duration = 1000 * kDay;
  c.exo_follow_rate = 0.0;
  c.seed = 2011;
  // Default reciprocal and nonreciprocal parameters.
  c.params_reciprocal = kReciprocalDefaults;
  c.params_nonreciprocal = kNonReciprocalDefaults;

  PerClassCounts sink;
  const auto stats = run_simulation(c, sink);

  bool ok = true;
  std::string detail;
  for (int cls : {1, 0}) {
    const auto truth = cls ? kReciprocalDefaults : kNonReciprocalDefaults;
    std::vector<FitRow> rows;
    std::uint64_t groups = 0;
    for (const auto& [n, gf] : sink.rows[cls]) {
      rows.push_back({n, gf.first, gf.second});
      groups += gf.first;
    }
    const auto fit = fit_pq(rows);
    const double ep = std::abs(fit.params.p - truth.p) / truth.p;
    const double epq = std::abs(fit.params.p * fit.params.q - truth.p * truth.q) / (truth.p * truth.q);
    ok = ok && groups >= 1000000 && ep < 0.10 && epq < 0.10;
    detail += fmt("%s: groups=%llu p=%.4g (err %.1f%%) pq=%.4g (err %.1f%%); ",
                  cls ? "reciprocal" : "nonreciprocal", (unsigned long long)groups, fit.params.p,
                  100 * ep, fit.params.p * fit.params.q, 100 * epq);
  }
  const double secs = seconds_since(t0);
  ok = ok && secs <= 300.0;
  detail += fmt("deliveries=%llu runtime=%.0fs", (unsigned long long)stats.deliveries, secs);
  return {ok, detail};
}

// ---------------------------------------------------------------------------

Verdict ground_truth_equivalence() {
  int exact = 0, snap_ok = 0;
  std::size_t min_events = SIZE_MAX, max_events = 0, total_trf = 0;
  double worst_lag = 0.0;
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    SimConfig c;
    c.initial_graph = synth_graph(GraphFamily::random, 200, 0.04, seed);
    c.duration = 4 * kDay;
    c.tweet_rate = 4.0 / kDay;
    c.retweet_prob = 0.2;
    c.params_reciprocal = {0.3, 0.3};
    c.params_nonreciprocal = {0.1, 0.3};
    c.exo_follow_rate = 0.0;
    c.seed = seed;
    const auto r = run_simulation(c);
    min_events = std::min(min_events, r.log.size());
    max_events = std::max(max_events, r.log.size());
    total_trf += r.trf.size();

    std::vector<TrfDetection> truth;
    for (const auto& t : r.trf)
      truth.push_back({t.speaker, t.repeater, t.listener, t.t_s, t.t_r, t.t_l, t.t_l - t.t_r, t.reciprocal});
    std::sort(truth.begin(), truth.end(), detection_less);
    const auto d = detect_trf(r.log, c.initial_graph, c.delta);
    exact += d == truth;

    const auto users = c.initial_graph.users();
    const auto snaps = snapshot_observer(r.log, c.initial_graph, users, c.poll_interval, c.duration);
    const auto sd = detect_from_snapshots(snaps, retweet_deliveries(r.log, c.initial_graph), c.delta);
    std::map<std::pair<UserId, UserId>, Timestamp> true_tl;
    for (const auto& x : truth) true_tl[{x.speaker, x.listener}] = x.t_l;
    bool good = sd.size() == truth.size();
    std::set<std::pair<UserId, UserId>> seen;
    for (const auto& x : sd) {
      auto it = true_tl.find({x.speaker, x.listener});
      if (it == true_tl.end() || !seen.insert(it->first).second) {
        good = false;
        continue;
      }
      const double lag = x.t_l - it->second;
      worst_lag = std::max(worst_lag, lag);
      good = good && lag >= 0.0 && lag < c.poll_interval;
    }
    snap_ok += good;
  }
  const bool sized = min_events >= 10000 && max_events <= 100000;
  return {exact == 50 && snap_ok == 50 && sized,
          fmt("log detection exact on %d/50 runs, snapshot detection on %d/50 (max t_l lag %.1fs, poll 300s); "
              "%zu TRF events; events per run %zu..%zu",
              exact, snap_ok, worst_lag, total_trf, min_events, max_events)};
}

// ---------------------------------------------------------------------------

struct SmallGroups : SimulationSink {
  std::vector<RetweetGroup> groups;
  void on_group(const RetweetGroup& g) override {
    if (g.n_window >= 1 && g.n_window <= 20) groups.push_back(g);
  }
};

Verdict curve_shape() {
  // p and q chosen so that consecutive points up to n = 20 differ by several
  // standard errors: with q = 0.05 the step at n = 20 is still 1.9% of p.
  const TrfModelParams rec{0.5, 0.05}, non{0.25, 0.05};
  const double rounds = 4.0;  // tweets per speaker over the run
  SimConfig c;
  std::uint64_t next = 0;
  std::mt19937_64 rng(3);
  for (auto [params, reciprocal] : {std::pair{rec, true}, std::pair{non, false}}) {
    // Once a reciprocal listener follows, her retweets reach every speaker of
    // her block, so reciprocal blocks stay small.
    const std::size_t speakers = reciprocal ? 10 : 200;
    // Listeners per fan-in k sized so each step k -> k+1 is resolved at
    // about 4.5 standard errors, with 30% to spare. A pair yields groups
    // until its listener follows.
    std::vector<std::size_t> fanin;
    for (std::size_t k = 1; k <= 20; ++k) {
      const double pk = trf_probability(params, k);
      double step = params.p * params.q * std::pow(1 - params.q, double(k));
      if (k > 1) step = std::min(step, params.p * params.q * std::pow(1 - params.q, double(k - 1)));
      const double need = 2 * pk * (1 - pk) * std::pow(4.5 / step, 2);
      const double per_pair = (1 - std::pow(1 - pk, rounds)) / pk;
      const auto listeners = static_cast<std::size_t>(std::ceil(1.3 * need / per_pair / double(speakers)));
      fanin.insert(fanin.end(), listeners, k);
    }
    std::shuffle(fanin.begin(), fanin.end(), rng);
    const std::size_t per_block = reciprocal ? 150 : fanin.size();
    for (std::size_t i = 0; i < fanin.size(); i += per_block) {
      const std::vector<std::size_t> part(fanin.begin() + i,
                                         fanin.begin() + std::min(fanin.size(), i + per_block));
      add_block(c.initial_graph, next, {speakers, 20, part, reciprocal});
    }
  }
  c.retweet_prob = 1.0;
  c.delta = kDay;
  c.tweet_rate = 0.1 / kDay;
  c.duration = rounds / c.tweet_rate;
  c.params_reciprocal = rec;
  c.params_nonreciprocal = non;
  c.seed = 44;
  SmallGroups sink;
  run_simulation(c, sink);

  bool ok = true;
  std::string detail;
  for (auto [stratum, params] : {std::pair{Stratum::reciprocal, rec}, std::pair{Stratum::nonreciprocal, non}}) {
    const auto rows = estimate_p_trf(sink.groups, stratum, true, GroupSize::window);
    std::map<std::uint32_t, PTrfRow> by_n;
    for (const auto& r : rows) by_n[r.n] = r;
    int monotone_breaks = 0, outside = 0;
    double worst_z = 0.0;
    std::uint64_t fewest = UINT64_MAX;
    for (std::uint32_t n = 1; n <= 20; ++n) {
      if (!by_n.count(n)) {
        ++outside;
        continue;
      }
      const auto& r = by_n[n];
      fewest = std::min(fewest, r.groups);
      const double model = trf_probability(params, n);
      const double se = std::sqrt(model * (1 - model) / double(r.groups));
      const double z = std::abs(r.probability - model) / se;
      worst_z = std::max(worst_z, z);
      outside += z > 3.0;
      if (n > 1 && by_n.count(n - 1) && r.probability < by_n[n - 1].probability) ++monotone_breaks;
    }
    ok = ok && monotone_breaks == 0 && outside == 0;
    detail += fmt("%s: decreasing steps=%d, points beyond 3 SE=%d (max |z|=%.2f), min groups per n=%llu, "
                  "P(20)=%.4f vs p=%.2f; ",
                  std::string(to_string(stratum)).c_str(), monotone_breaks, outside, worst_z,
                  (unsigned long long)fewest, by_n.count(20) ? by_n[20].probability : 0.0, params.p);
  }
  return {ok, detail};
}

// ---------------------------------------------------------------------------

Verdict endo_exo_separation() {
  // Disjoint chains x -> y -> z. Retweets of z by y reach x; x's only
  // exogenous candidate is z. Endogenous per-exposure follow probability is
  // p*q = 0.2, exogenous per-window probability 0.002.
  const double pq = 0.2, exo_window = 0.002;
  double lo = 1e300, hi = 0.0;
  int inside = 0;
  std::vector<double> ratios;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    SimConfig c;
    for (std::uint64_t k = 0; k < 4000; ++k) {
      c.initial_graph.add_follow(user_id(3 * k), user_id(3 * k + 1), 0.0);
      c.initial_graph.add_follow(user_id(3 * k + 1), user_id(3 * k + 2), 0.0);
    }
    c.delta = kDay;
    c.tweet_rate = 0.5 / kDay;
    c.retweet_prob = 0.02;
    c.params_nonreciprocal = {0.4, pq / 0.4};
    c.params_reciprocal = {0.4, pq / 0.4};
    c.exo_follow_rate = -std::log1p(-exo_window) / c.delta;
    c.duration = 120 * kDay;
    c.seed = seed;
    // Long enough that windows opened before the cutoff are complete.
    const double cutoff = c.duration;
    c.duration += c.delta;
    const auto r = run_simulation(c);
    EventLog exo_log, endo_log;
    for (const auto& e : r.log) {
      if (!e.tweet() || e.t <= cutoff) exo_log.push_back(e);
      if (!e.retweet() || e.t <= cutoff) endo_log.push_back(e);
    }
    const auto exo = estimate_p_exo(exo_log, c.initial_graph, c.delta);
    const auto endo = estimate_p_endo(endo_log, c.initial_graph, c.delta);
    const double ratio = endo.probability / exo.probability;
    ratios.push_back(ratio);
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
    inside += ratio >= 70.0 && ratio <= 140.0;
  }
  double mean = 0.0;
  for (double x : ratios) mean += x / double(ratios.size());
  return {inside == 20, fmt("configured ratio %.0f; P_ENDO/P_EXO in [70,140] on %d/20 runs "
                            "(min %.1f, max %.1f, mean %.1f)",
                            pq / exo_window, inside, lo, hi, mean)};
}

// ---------------------------------------------------------------------------

Verdict latency_percentiles() {
  const std::vector<double> edges{3600.0, 24 * 3600.0};
  std::size_t rt_total = 0, rt_fast = 0, trf_total = 0, trf_fast = 0, log_trf = 0, log_fast = 0;
  double worst_rt = 1.0, worst_trf = 1.0;
  bool per_seed = true;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    // Default model parameters and latency; a denser graph than the config
    // file so that every run has TRF events to time.
    SimConfig c;
    c.initial_graph = synth_graph(GraphFamily::random, 1500, 0.03, seed);
    c.tweet_rate = 1.0 / kDay;
    c.seed = seed;
    const auto r = run_simulation(c);
    const auto d = detect_trf(r.log, c.initial_graph, c.delta);
    // Observe the speakers the log detector found, as a monitor of active
    // speakers would.
    std::set<UserId> speakers;
    for (const auto& x : d) speakers.insert(x.speaker);
    const std::vector<UserId> watch(speakers.begin(), speakers.end());
    const auto snaps = snapshot_observer(r.log, c.initial_graph, watch, c.poll_interval, c.duration);
    const auto sd = detect_from_snapshots(snaps, retweet_deliveries(r.log, c.initial_graph), c.delta);
    if (sd.empty()) {
      per_seed = false;
      continue;
    }
    const auto h = latency_histograms(sd, r.log, edges);
    const auto hl = latency_histograms(d, r.log, edges);
    const double rt = h.retweet_cdf[0], trf = h.trf_cdf[1];
    rt_total += h.retweet_count;
    rt_fast += static_cast<std::size_t>(std::llround(rt * double(h.retweet_count)));
    trf_total += h.trf_count;
    trf_fast += static_cast<std::size_t>(std::llround(trf * double(h.trf_count)));
    log_trf += hl.trf_count;
    log_fast += static_cast<std::size_t>(std::llround(hl.trf_cdf[1] * double(hl.trf_count)));
    worst_rt = std::min(worst_rt, rt);
    worst_trf = std::min(worst_trf, trf);
    per_seed = per_seed && rt >= 0.85 && trf >= 0.75;
  }
  const double rt_frac = double(rt_fast) / double(rt_total);
  const double trf_frac = trf_total ? double(trf_fast) / double(trf_total) : 0.0;
  return {per_seed && rt_frac >= 0.90 && trf_frac >= 0.80,
          fmt("retweets < 1 h: %.2f%% of %zu (worst seed %.2f%%); TRF < 24 h: %.2f%% of %zu snapshot "
              "detections (worst seed %.2f%%); log-timed TRF < 24 h: %zu/%zu",
              100 * rt_frac, rt_total, 100 * worst_rt, 100 * trf_frac, trf_total, 100 * worst_trf, log_fast,
              log_trf)};
}

// ---------------------------------------------------------------------------

Verdict logistic_regression() {
  std::mt19937_64 rng(606);
  std::normal_distribution<double> z;
  int oracle_ok = 0;
  double worst = 0.0;
  for (int round = 0; round < 100; ++round) {
    oracle::Dataset d;
    const std::size_t k = 1 + rng() % 4;
    const std::size_t rows = 40 + rng() % 461;
    std::vector<double> beta(k + 1);
    for (auto& b : beta) b = 0.6 * z(rng);
    for (std::size_t i = 0; i < rows; ++i) {
      std::vector<double> x{1.0};
      double eta = beta[0];
      for (std::size_t j = 0; j < k; ++j) {
        // Mix of continuous and binary columns.
        x.push_back(j % 2 ? double(rng() % 2) : z(rng));
        eta += beta[j + 1] * x.back();
      }
      d.x.push_back(x);
      d.y.push_back(std::uniform_real_distribution<double>()(rng) < 1 / (1 + std::exp(-eta)) ? 1.0 : 0.0);
    }
    Eigen::MatrixXd f(rows, k);
    Eigen::VectorXd y(rows);
    for (std::size_t i = 0; i < rows; ++i) {
      for (std::size_t j = 0; j < k; ++j) f(i, j) = d.x[i][j + 1];
      y(i) = d.y[i];
    }
    const auto m = logistic_fit(f, y);
    const auto ref = oracle::brute_force_logit(d);
    double diff = 0.0;
    for (std::size_t j = 0; j <= k; ++j) diff = std::max(diff, std::abs(m.coefficients[j] - ref[j]));
    worst = std::max(worst, diff);
    oracle_ok += diff < 1e-6;
  }

  int table_ok = 0;
  double worst_table = 0.0;
  for (int round = 0; round < 50; ++round) {
    const int a = 1 + rng() % 60, b = 1 + rng() % 60, c = 1 + rng() % 60, e = 1 + rng() % 60;
    Eigen::MatrixXd f(a + b + c + e, 1);
    Eigen::VectorXd y(a + b + c + e);
    int i = 0;
    for (auto [x, lab, count] : {std::tuple{1, 1, a}, {1, 0, b}, {0, 1, c}, {0, 0, e}})
      for (int j = 0; j < count; ++j, ++i) {
        f(i, 0) = x;
        y(i) = lab;
      }
    const auto m = logistic_fit(f, y);
    const double diff = std::abs(m.coefficients[1] - std::log(double(a) * e / (double(b) * c)));
    worst_table = std::max(worst_table, diff);
    table_ok += diff < 1e-10;
  }

  int significant = 0;
  double min_or = 1e300, max_or = 0.0;
  const std::vector<std::string> names{"reciprocity", "retweets_sl", "tweets_s", "followers_s"};
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    SimConfig c;
    c.initial_graph = synth_graph(GraphFamily::random, 400, 0.02, seed);
    for (const auto& e : synth_graph(GraphFamily::reciprocal_pairs, 400, 0.01, seed + 1000).edges())
      if (!c.initial_graph.has_edge(e.follower, e.followee))
        c.initial_graph.add_follow(e.follower, e.followee, 0.0);
    // Default q with p scaled up so each run has enough follows.
    c.params_reciprocal = {100 * kReciprocalDefaults.p, kReciprocalDefaults.q};
    c.params_nonreciprocal = {100 * kNonReciprocalDefaults.p, kNonReciprocalDefaults.q};
    c.tweet_rate = 2.0 / kDay;
    c.retweet_prob = 0.2;
    c.seed = seed;
    const auto r = run_simulation(c);
    const auto table = select_factors(build_factor_table(r.log, c.initial_graph, c.delta), names);
    const auto model = logistic_fit(table.features, table.labels);
    const auto odds = odds_ratios(model, table.names);
    const auto& rec = odds[0];
    min_or = std::min(min_or, rec.odds_ratio);
    max_or = std::max(max_or, rec.odds_ratio);
    significant += rec.odds_ratio > 1.0 && rec.ci_low > 1.0;
  }
  return {oracle_ok == 100 && table_ok == 50 && significant >= 19,
          fmt("oracle agreement %d/100 (max diff %.1e); 2x2 identity %d/50 (max diff %.1e); "
              "reciprocity OR > 1 with CI above 1 in %d/20 runs (OR %.1f..%.1f)",
              oracle_ok, worst, table_ok, worst_table, significant, min_or, max_or)};
}

// ---------------------------------------------------------------------------

std::vector<std::vector<char>> floyd_warshall(const TemporalDigraph& g, std::size_t n) {
  std::vector<std::vector<char>> r(n, std::vector<char>(n, 0));
  for (const auto& e : g.edges()) r[to_int(e.follower)][to_int(e.followee)] = 1;
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      if (r[i][k])
        for (std::size_t j = 0; j < n; ++j)
          if (r[k][j]) r[i][j] = 1;
  return r;
}

TemporalDigraph random_digraph(std::mt19937_64& rng, std::size_t n, double p) {
  TemporalDigraph g;
  std::bernoulli_distribution coin(p);
  for (std::size_t i = 0; i < n; ++i) g.add_user(user_id(i));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j && coin(rng)) g.add_follow(user_id(i), user_id(j), 0.0);
  return g;
}

std::set<std::pair<UserId, UserId>> edge_set(const TemporalDigraph& g) {
  std::set<std::pair<UserId, UserId>> s;
  for (const auto& e : g.edges()) s.insert({e.follower, e.followee});
  return s;
}

Verdict closure_correctness() {
  std::mt19937_64 rng(7007);
  int fw_ok = 0, scc_ok = 0;
  for (int round = 0; round < 1000; ++round) {
    const std::size_t n = 1 + rng() % 50;
    const auto g = random_digraph(rng, n, std::uniform_real_distribution<double>(0.0, 0.12)(rng));
    const auto cl = trf_closure(g);
    const auto reach = floyd_warshall(g, n);
    bool same = true;
    std::size_t expected = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j) {
          expected += reach[i][j];
          same = same && cl.has_edge(user_id(i), user_id(j)) == bool(reach[i][j]);
        }
    fw_ok += same && cl.edge_count() == expected;
    scc_ok += tarjan_scc(g).component == tarjan_scc(cl).component;
  }

  const auto c5 = trf_closure(load_graph_csv(kData + "/cycle5.csv"));

  const auto h = load_graph_csv(kData + "/hierarchy30.csv");
  const auto hc = trf_closure(h);
  std::vector<UserId> sinks;
  for (UserId u : h.users())
    if (h.followees(u).empty()) sinks.push_back(u);
  bool two_layer = is_trf_equilibrium(hc);
  for (UserId u : hc.users()) {
    const auto fee = hc.followees_at(u, kEquilibriumTime);
    two_layer = two_layer && fee == reachable_followees(h, u);
    if (!std::binary_search(sinks.begin(), sinks.end(), u))
      for (UserId s : sinks) two_layer = two_layer && std::binary_search(fee.begin(), fee.end(), s);
  }

  int dyn_ok = 0;
  const std::vector<std::string> fixtures{"cycle30.csv", "random30.csv", "hierarchy30.csv"};
  for (const auto& name : fixtures) {
    SimConfig c;
    c.initial_graph = load_graph_csv(kData + "/" + name);
    c.params_reciprocal = {1.0, 1.0};
    c.params_nonreciprocal = {1.0, 1.0};
    c.retweet_prob = 1.0;
    c.tweet_rate = 20.0 / kDay;
    c.duration = 20 * kDay;
    c.seed = 30;
    const auto r = run_simulation(c);
    dyn_ok += is_trf_equilibrium(r.final_graph) &&
              edge_set(r.final_graph) == edge_set(trf_closure(c.initial_graph));
  }
  return {fw_ok == 1000 && scc_ok == 1000 && c5.edge_count() == 20 && two_layer &&
              dyn_ok == int(fixtures.size()),
          fmt("Floyd-Warshall agreement %d/1000, SCC partition kept %d/1000; 5-cycle closure has %zu "
              "edges; hierarchy fixture two-layer: %s (%zu sinks); p=q=1 dynamics reach closure on %d/%zu "
              "fixtures",
              fw_ok, scc_ok, c5.edge_count(), two_layer ? "yes" : "no", sinks.size(), dyn_ok,
              fixtures.size())};
}

// ---------------------------------------------------------------------------

Verdict scc_machinery() {
  std::mt19937_64 rng(808);
  int agree = 0;
  for (int round = 0; round < 200; ++round) {
    const std::size_t n = 1 + rng() % 50;
    const auto g = random_digraph(rng, n, std::uniform_real_distribution<double>(0.0, 0.15)(rng));
    const auto r = tarjan_scc(g);
    const auto reach = floyd_warshall(g, n);
    bool ok = r.nodes.size() == n;
    for (std::size_t i = 0; ok && i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        const bool mutual = i == j || (reach[i][j] && reach[j][i]);
        ok = ok && (r.component[i] == r.component[j]) == mutual;
      }
    agree += ok;
  }

  TemporalDigraph complete;
  for (std::size_t i = 0; i < 60; ++i)
    for (std::size_t j = 0; j < 60; ++j)
      if (i != j) complete.add_follow(user_id(i), user_id(j), 0.0);
  const auto dag = synth_graph(GraphFamily::dag_hierarchy, 500, 0.02, 5);
  const std::vector<std::size_t> sizes{5, 10, 20, 40, 60};
  bool complete_ok = true, dag_ok = true;
  for (auto method : {SampleMethod::random_walk, SampleMethod::snowball}) {
    for (const auto& row : scc_fraction_curve(complete, method, sizes, 10, 9))
      complete_ok = complete_ok && row.mean_fraction == 1.0;
    for (const auto& row : scc_fraction_curve(dag, method, sizes, 10, 9))
      dag_ok = dag_ok && std::abs(row.mean_fraction - 1.0 / double(row.size)) < 1e-12;
  }

  TemporalDigraph big;
  const std::size_t nodes = 100000;
  for (std::size_t i = 0; i < nodes; ++i) big.add_user(user_id(i));
  std::mt19937_64 erng(99);
  while (big.edge_count() < 1000000) {
    const auto a = erng() % nodes, b = erng() % nodes;
    if (a != b && !big.has_edge(user_id(a), user_id(b))) big.add_follow(user_id(a), user_id(b), 0.0);
  }
  const auto t0 = std::chrono::steady_clock::now();
  const auto res = tarjan_scc(big);
  const double secs = seconds_since(t0);
  return {agree == 200 && complete_ok && dag_ok && secs < 10.0,
          fmt("brute-force agreement %d/200; complete digraph curve all 1.0: %s; DAG curve 1/size: %s; "
              "1e6-edge graph in %.2fs (largest SCC %.3f)",
              agree, complete_ok ? "yes" : "no", dag_ok ? "yes" : "no", secs, res.largest_fraction)};
}

// ---------------------------------------------------------------------------

int cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  if (code != 0) std::fprintf(stderr, "trfkit %s failed: %s\n", args[0].c_str(), err.str().c_str());
  return code;
}

bool run_pipeline(const fs::path& dir) {
  fs::remove_all(dir);
  const auto p = [&](const char* s) { return (dir / s).string(); };
  const std::string graph = kData + "/random30.csv";
  return cli({"simulate", "--config", kData + "/configs/default.conf", "--graph", "synth:random:300:0.04:3",
              "--seed", "12", "--duration", "432000", "--set", "params_nonreciprocal=0.05, 0.3", "--set",
              "exo_follow_rate=0.00001", "--out", p("sim")}) == 0 &&
         cli({"simulate", "--graph", graph, "--seed", "3", "--repetitions", "3", "--duration", "86400",
              "--out", p("reps")}) == 0 &&
         cli({"observe", "--log", p("sim/events.jsonl"), "--graph", p("sim/initial_graph.csv"), "--users",
              "1,2,3,4,5", "--out", p("obs")}) == 0 &&
         cli({"detect", "--log", p("sim/events.jsonl"), "--graph", p("sim/initial_graph.csv"), "--out",
              p("det")}) == 0 &&
         cli({"detect", "--log", p("sim/events.jsonl"), "--graph", p("sim/initial_graph.csv"), "--snapshots",
              p("obs/snapshots.jsonl"), "--out", p("det_snap")}) == 0 &&
         cli({"estimate", "--log", p("sim/events.jsonl"), "--graph", p("sim/initial_graph.csv"), "--out",
              p("est")}) == 0 &&
         cli({"fit", "--estimates", p("est/p_trf.csv"), "--out", p("fit")}) == 0 &&
         cli({"logit", "--log", p("sim/events.jsonl"), "--graph", p("sim/initial_graph.csv"), "--factors",
              "reciprocity,retweets_sl", "--out", p("logit")}) == 0 &&
         cli({"scc", "--graph", p("sim/initial_graph.csv"), "--sizes", "10,50,100", "--repetitions", "5",
              "--seed", "4", "--out", p("scc")}) == 0 &&
         cli({"sample", "--graph", p("sim/initial_graph.csv"), "--size", "40", "--seed", "8", "--out",
              p("sample")}) == 0 &&
         cli({"closure", "--graph", graph, "--out", p("closure")}) == 0 &&
         cli({"synth", "--family", "dag_hierarchy", "--size", "50", "--seed", "2", "--out", p("synth")}) == 0;
}

std::map<std::string, std::string> data_files(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    const auto ext = e.path().extension();
    if (ext != ".csv" && ext != ".jsonl") continue;
    std::ifstream in(e.path(), std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    files[fs::relative(e.path(), dir).string()] = s.str();
  }
  return files;
}

Verdict determinism() {
  const auto base = fs::temp_directory_path() / "trfkit-acceptance-determinism";
  const bool ran = run_pipeline(base / "a") && run_pipeline(base / "b");
  if (!ran) return {false, "a pipeline step failed"};
  const auto a = data_files(base / "a"), b = data_files(base / "b");
  std::size_t same = 0, bytes = 0;
  for (const auto& [name, content] : a) {
    auto it = b.find(name);
    if (it != b.end() && it->second == content) {
      ++same;
      bytes += content.size();
    }
  }
  fs::remove_all(base);
  return {same == a.size() && a.size() == b.size() && a.size() >= 20,
          fmt("%zu/%zu CSV and log files byte-identical across reruns (%zu bytes)", same, a.size(), bytes)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria{
      {"model recovery", model_recovery},
      {"estimator/ground-truth equivalence", ground_truth_equivalence},
      {"TRF probability curve shape", curve_shape},
      {"endogenous/exogenous separation", endo_exo_separation},
      {"latency percentiles", latency_percentiles},
      {"logistic regression", logistic_regression},
      {"closure correctness", closure_correctness},
      {"SCC machinery", scc_machinery},
      {"determinism", determinism},
  };
  std::set<int> pick;
  for (int i = 1; i < argc; ++i) pick.insert(std::atoi(argv[i]));
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = int(i) + 1;
    if (!pick.empty() && !pick.count(id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("error: ") + e.what()};
    }
    std::printf("%s %d %s: %s [%.1fs]\n", v.pass ? "PASS" : "FAIL", id, criteria[i].first, v.detail.c_str(),
                seconds_since(t0));
    std::fflush(stdout);
    failed += !v.pass;
  }
  return failed ? 1 : 0;
}
