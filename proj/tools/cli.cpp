#include "trf/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <future>
#include <optional>
#include <ostream>
#include <sstream>

#include "trf/detector.hpp"
#include "trf/events.hpp"
#include "trf/inference.hpp"
#include "trf/simulator.hpp"
#include "trf/topology.hpp"

#ifndef TRFKIT_VERSION
#define TRFKIT_VERSION "dev"
#endif

namespace trf::cli {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

std::string hex64(std::uint64_t v) {
  std::ostringstream s;
  s << std::hex;
  s.width(16);
  s.fill('0');
  s << v;
  return s.str();
}

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io, "cannot open " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// Collects what a run read and wrote so it can be replayed.
class Manifest {
 public:
  explicit Manifest(std::string command) {
    j_["tool"] = "trfkit";
    j_["version"] = TRFKIT_VERSION;
    j_["command"] = std::move(command);
    j_["arguments"] = ordered_json::object();
    j_["parameters"] = ordered_json::object();
    j_["inputs"] = ordered_json::array();
    j_["outputs"] = ordered_json::array();
  }

  void argument(const std::string& key, ordered_json value) { j_["arguments"][key] = std::move(value); }
  void parameter(const std::string& key, ordered_json value) {
    j_["parameters"][key] = std::move(value);
  }
  void input(const std::string& path) {
    j_["inputs"].push_back({{"path", path}, {"fnv1a64", hex64(fnv1a(slurp(path)))}});
  }
  void output(const std::string& name, const std::string& content) {
    j_["outputs"].push_back({{"path", name}, {"fnv1a64", hex64(fnv1a(content))}});
  }
  ordered_json& json() { return j_; }

 private:
  ordered_json j_;
};

void write_text(const fs::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(Errc::io, "cannot write " + path.string());
  f << content;
  if (!f) throw Error(Errc::io, "write failed for " + path.string());
}

// Writes one output file and records it in the manifest.
void emit(const fs::path& dir, const std::string& name, Manifest& m,
          const std::function<void(std::ostream&)>& body) {
  std::ostringstream s;
  body(s);
  write_text(dir / name, s.str());
  m.output(name, s.str());
}

void finish(const fs::path& dir, Manifest& m) {
  write_text(dir / "manifest.json", m.json().dump(2) + "\n");
}

fs::path prepare_dir(const std::string& dir) {
  fs::path p(dir);
  std::error_code ec;
  fs::create_directories(p, ec);
  if (!fs::is_directory(p)) throw Error(Errc::io, "cannot create output directory " + dir);
  return p;
}

template <class T>
std::string join(const std::vector<T>& v) {
  std::ostringstream s;
  for (std::size_t i = 0; i < v.size(); ++i) s << (i ? "," : "") << v[i];
  return s.str();
}

// Options shared by most subcommands.
struct Common {
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<double> delta;
  std::string config;
};

void add_out(CLI::App* app, Common& c) {
  app->add_option("--out", c.out_dir, "Output directory")->required();
}

// ---- simulate --------------------------------------------------------------

struct SimulateArgs {
  Common common;
  std::string graph;
  std::optional<double> duration;
  std::vector<std::string> sets;
  unsigned repetitions = 1;
};

SimConfig build_config(const SimulateArgs& a) {
  SimConfig c = a.common.config.empty() ? SimConfig{} : load_sim_config(a.common.config);
  if (!a.graph.empty()) apply_config_entry(c, "initial_graph", a.graph, ".");
  for (const auto& kv : a.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos)
      throw Error(Errc::invalid_config, "--set expects key=value, got '" + kv + "'");
    auto trim = [](std::string s) {
      s.erase(0, s.find_first_not_of(' '));
      s.erase(s.find_last_not_of(' ') + 1);
      return s;
    };
    apply_config_entry(c, trim(kv.substr(0, eq)), trim(kv.substr(eq + 1)), ".");
  }
  if (a.common.seed) c.seed = *a.common.seed;
  if (a.common.delta) c.delta = *a.common.delta;
  if (a.duration) c.duration = *a.duration;
  c.validate();
  return c;
}

SimulationStats simulate_into(const SimConfig& config, const fs::path& dir, Manifest& m) {
  const auto result = run_simulation(config);
  emit(dir, "initial_graph.csv", m, [&](std::ostream& o) { write_graph_csv(o, config.initial_graph); });
  emit(dir, "events.jsonl", m, [&](std::ostream& o) { write_log(o, result.log); });
  emit(dir, "ground_truth.csv", m, [&](std::ostream& o) { write_ground_truth_csv(o, result.trf); });
  emit(dir, "groups.csv", m, [&](std::ostream& o) { write_groups_csv(o, result.groups); });
  emit(dir, "final_graph.csv", m, [&](std::ostream& o) { write_graph_csv(o, result.final_graph); });
  return result.stats;
}

ordered_json stats_json(const SimulationStats& s) {
  return {{"tweets", s.tweets},         {"retweets", s.retweets},
          {"deliveries", s.deliveries}, {"trf_follows", s.trf_follows},
          {"exogenous_follows", s.exogenous_follows}, {"groups", s.groups}};
}

int do_simulate(const SimulateArgs& a, std::ostream& out) {
  const SimConfig base = build_config(a);
  const fs::path dir = prepare_dir(a.common.out_dir);
  Manifest m("simulate");
  if (!a.common.config.empty()) m.input(a.common.config);
  m.argument("repetitions", a.repetitions);
  for (const auto& [k, v] : config_entries(base)) m.parameter(k, v);

  if (a.repetitions <= 1) {
    const auto stats = simulate_into(base, dir, m);
    m.json()["stats"] = stats_json(stats);
    finish(dir, m);
    out << "simulated " << stats.tweets << " tweets, " << stats.retweets << " retweets, "
        << stats.trf_follows << " TRF follows, " << stats.exogenous_follows
        << " exogenous follows\n";
    return kOk;
  }

  // Independent runs with seeds seed, seed+1, ...; each writes its own
  // directory and manifest, aggregation is by seed.
  std::vector<std::future<SimulationStats>> runs;
  for (unsigned i = 0; i < a.repetitions; ++i) {
    SimConfig c = base;
    c.seed = base.seed + i;
    runs.push_back(std::async(std::launch::async, [c, dir] {
      const fs::path sub = prepare_dir((dir / ("run-" + std::to_string(c.seed))).string());
      Manifest rm("simulate");
      for (const auto& [k, v] : config_entries(c)) rm.parameter(k, v);
      const auto stats = simulate_into(c, sub, rm);
      rm.json()["stats"] = stats_json(stats);
      finish(sub, rm);
      return stats;
    }));
  }
  std::vector<SimulationStats> stats;
  for (auto& f : runs) stats.push_back(f.get());
  emit(dir, "runs.csv", m, [&](std::ostream& o) {
    o << "seed,tweets,retweets,deliveries,trf_follows,exogenous_follows,groups\n";
    for (unsigned i = 0; i < a.repetitions; ++i) {
      const auto& s = stats[i];
      o << base.seed + i << ',' << s.tweets << ',' << s.retweets << ',' << s.deliveries << ','
        << s.trf_follows << ',' << s.exogenous_follows << ',' << s.groups << '\n';
    }
  });
  finish(dir, m);
  out << "simulated " << a.repetitions << " runs\n";
  return kOk;
}

// ---- observe ---------------------------------------------------------------

struct ObserveArgs {
  Common common;
  std::string log, graph;
  std::vector<std::uint64_t> users;
  double poll_interval = 300.0;
  std::optional<double> horizon;
};

int do_observe(const ObserveArgs& a, std::ostream& out) {
  const auto log = load_log(a.log);
  const auto graph = load_graph_csv(a.graph);
  std::vector<UserId> users;
  if (a.users.empty()) {
    users = graph.users();
    // Users that only appear in the log are monitored too.
    for (const auto& e : log)
      if (const auto* f = e.follow()) users.push_back(f->followee);
    std::sort(users.begin(), users.end());
    users.erase(std::unique(users.begin(), users.end()), users.end());
  } else {
    for (auto u : a.users) users.push_back(user_id(u));
  }
  const double horizon = a.horizon ? *a.horizon : (log.empty() ? 0.0 : log.back().t);
  if (!(a.poll_interval > 0.0)) throw Error(Errc::invalid_config, "poll interval must be positive");
  const auto snaps = snapshot_observer(log, graph, users, a.poll_interval, horizon);

  const fs::path dir = prepare_dir(a.common.out_dir);
  Manifest m("observe");
  m.input(a.log);
  m.input(a.graph);
  m.argument("poll_interval", format_number(a.poll_interval));
  m.argument("horizon", format_number(horizon));
  m.argument("users", a.users.empty() ? std::string("all") : join(a.users));
  emit(dir, "snapshots.jsonl", m, [&](std::ostream& o) { write_snapshots(o, snaps); });
  finish(dir, m);
  out << "wrote " << snaps.size() << " snapshots\n";
  return kOk;
}

// ---- detect ----------------------------------------------------------------

struct DetectArgs {
  Common common;
  std::string log, graph, snapshots;
};

int do_detect(const DetectArgs& a, std::ostream& out) {
  const double delta = a.common.delta.value_or(86400.0);
  const auto log = load_log(a.log);
  const auto graph = load_graph_csv(a.graph);
  std::vector<TrfDetection> detections;
  Manifest m("detect");
  m.input(a.log);
  m.input(a.graph);
  m.argument("delta", format_number(delta));
  if (a.snapshots.empty()) {
    detections = detect_trf(log, graph, delta);
    m.argument("source", "log");
  } else {
    std::ifstream in(a.snapshots, std::ios::binary);
    if (!in) throw Error(Errc::io, "cannot open " + a.snapshots);
    std::vector<Snapshot> snaps;
    try {
      snaps = read_snapshots(in);
    } catch (const Error& e) {
      throw Error(e.code(), a.snapshots + ": " + e.what());
    }
    m.input(a.snapshots);
    m.argument("source", "snapshots");
    detections = detect_from_snapshots(snaps, retweet_deliveries(log, graph), delta);
  }
  const fs::path dir = prepare_dir(a.common.out_dir);
  emit(dir, "detections.csv", m, [&](std::ostream& o) { write_detections_csv(o, detections); });
  finish(dir, m);
  out << "detected " << detections.size() << " TRF events\n";
  return kOk;
}

// ---- estimate --------------------------------------------------------------

struct EstimateArgs {
  Common common;
  std::string log, graph;
  std::string count = "window";
  std::vector<double> edges{60.0, 600.0, 3600.0, 21600.0, 86400.0};
};

int do_estimate(const EstimateArgs& a, std::ostream& out, std::ostream& err) {
  const double delta = a.common.delta.value_or(86400.0);
  if (a.count != "window" && a.count != "truncated")
    throw Error(Errc::invalid_config, "--count must be window or truncated");
  const GroupSize size = a.count == "window" ? GroupSize::window : GroupSize::truncated;
  const auto log = load_log(a.log);
  const auto graph = load_graph_csv(a.graph);
  const auto deliveries = retweet_deliveries(log, graph);
  const auto groups = group_retweets(deliveries, follow_times(log), delta);

  std::vector<PTrfRow> table;
  for (Stratum s : {Stratum::all, Stratum::reciprocal, Stratum::nonreciprocal}) {
    try {
      for (const auto& r : estimate_p_trf(groups, s, false, size)) table.push_back(r);
      for (const auto& r : estimate_p_trf(groups, s, true, size)) table.push_back(r);
    } catch (const Error& e) {
      if (e.code() != Errc::empty_input) throw;
      err << "note: " << e.what() << '\n';
    }
  }
  if (table.empty()) throw Error(Errc::empty_input, "log has no retweet groups");

  struct Named {
    std::string name;
    ProbabilityEstimate est;
  };
  std::vector<Named> probs;
  try {
    probs.push_back({"p_exo", estimate_p_exo(log, graph, delta)});
  } catch (const Error& e) {
    if (e.code() != Errc::no_qualifying_tweets) throw;
    err << "note: P_EXO skipped: " << e.what() << '\n';
  }
  try {
    probs.push_back({"p_endo", estimate_p_endo(log, graph, delta)});
  } catch (const Error& e) {
    if (e.code() != Errc::no_qualifying_retweets) throw;
    err << "note: P_ENDO skipped: " << e.what() << '\n';
  }

  const fs::path dir = prepare_dir(a.common.out_dir);
  Manifest m("estimate");
  m.input(a.log);
  m.input(a.graph);
  m.argument("delta", format_number(delta));
  m.argument("count", a.count);
  emit(dir, "groups.csv", m, [&](std::ostream& o) { write_groups_csv(o, groups); });
  emit(dir, "p_trf.csv", m, [&](std::ostream& o) { write_p_trf_csv(o, table); });
  emit(dir, "p_exo_endo.csv", m, [&](std::ostream& o) {
    o << "estimator,probability,samples,std_error\n";
    for (const auto& p : probs)
      o << p.name << ',' << format_number(p.est.probability) << ',' << p.est.samples << ','
        << format_number(p.est.std_error) << '\n';
  });
  const auto detections = detect_trf(log, graph, delta);
  try {
    const auto cdf = latency_histograms(detections, log, a.edges);
    emit(dir, "latency.csv", m, [&](std::ostream& o) {
      o << "edge,trf_cdf,retweet_cdf\n";
      for (std::size_t i = 0; i < cdf.edges.size(); ++i)
        o << format_number(cdf.edges[i]) << ',' << format_number(cdf.trf_cdf[i]) << ','
          << format_number(cdf.retweet_cdf[i]) << '\n';
    });
  } catch (const Error& e) {
    if (e.code() != Errc::empty_input) throw;
    err << "note: latency table skipped: " << e.what() << '\n';
  }
  finish(dir, m);
  out << "estimated from " << groups.size() << " retweet groups\n";
  return kOk;
}

// ---- fit -------------------------------------------------------------------

struct FitArgs {
  Common common;
  std::string estimates;
};

int do_fit(const FitArgs& a, std::ostream& out, std::ostream& err) {
  const double delta = a.common.delta.value_or(86400.0);
  std::ifstream in(a.estimates, std::ios::binary);
  if (!in) throw Error(Errc::io, "cannot open " + a.estimates);
  std::vector<PTrfRow> table;
  try {
    table = read_p_trf_csv(in);
  } catch (const Error& e) {
    throw Error(e.code(), a.estimates + ": " + e.what());
  }
  std::vector<FitReportRow> report;
  for (Stratum s : {Stratum::all, Stratum::reciprocal, Stratum::nonreciprocal}) {
    std::vector<PTrfRow> rows;
    for (const auto& r : table)
      if (r.stratum == s) rows.push_back(r);
    if (rows.empty()) continue;
    try {
      const auto fit = fit_pq(fit_rows(rows));
      report.push_back({std::string(to_string(s)), delta, fit.params.p,
                        fit.params.p * fit.params.q, fit.params.q, fit.nll});
    } catch (const Error& e) {
      if (e.code() != Errc::underdetermined && e.code() != Errc::all_zero_successes) throw;
      err << "note: " << to_string(s) << ": " << e.what() << '\n';
    }
  }
  if (report.empty()) throw Error(Errc::underdetermined, "no stratum could be fitted");

  const fs::path dir = prepare_dir(a.common.out_dir);
  Manifest m("fit");
  m.input(a.estimates);
  m.argument("delta", format_number(delta));
  emit(dir, "fit.csv", m, [&](std::ostream& o) { write_fit_report_csv(o, report); });
  finish(dir, m);
  for (const auto& r : report)
    out << r.cls << ": p=" << format_number(r.p) << " pq=" << format_number(r.pq) << '\n';
  return kOk;
}

// ---- logit -----------------------------------------------------------------

struct LogitArgs {
  Common common;
  std::string features, log, graph;
  std::vector<std::string> factors;
  double confidence = 0.95;
};

int do_logit(const LogitArgs& a, std::ostream& out) {
  Manifest m("logit");
  const fs::path dir = prepare_dir(a.common.out_dir);
  FactorTable table;
  if (!a.features.empty()) {
    std::ifstream in(a.features, std::ios::binary);
    if (!in) throw Error(Errc::io, "cannot open " + a.features);
    try {
      table = read_factor_table_csv(in);
    } catch (const Error& e) {
      throw Error(e.code(), a.features + ": " + e.what());
    }
    m.input(a.features);
  } else if (!a.log.empty() && !a.graph.empty()) {
    const double delta = a.common.delta.value_or(86400.0);
    table = build_factor_table(load_log(a.log), load_graph_csv(a.graph), delta);
    m.input(a.log);
    m.input(a.graph);
    m.argument("delta", format_number(delta));
    emit(dir, "factors.csv", m, [&](std::ostream& o) { write_factor_table_csv(o, table); });
  } else {
    throw CLI::ValidationError("logit needs --features or both --log and --graph");
  }
  if (!a.factors.empty()) table = select_factors(table, a.factors);
  m.argument("factors", join(table.names));
  m.argument("confidence", format_number(a.confidence));
  const auto model = logistic_fit(table.features, table.labels);
  const auto rows = odds_ratios(model, table.names, a.confidence);
  emit(dir, "odds.csv", m, [&](std::ostream& o) { write_odds_csv(o, rows); });
  finish(dir, m);
  for (const auto& r : rows)
    out << r.factor << ": odds ratio " << format_number(r.odds_ratio) << '\n';
  return kOk;
}

// ---- scc / sample / closure / synth ----------------------------------------

struct SccArgs {
  Common common;
  std::string graph, method = "random_walk";
  std::vector<std::size_t> sizes;
  std::size_t repetitions = 10;
  double restart = 0.15;
};

int do_scc(const SccArgs& a, std::ostream& out) {
  const auto graph = load_graph_csv(a.graph);
  const fs::path dir = prepare_dir(a.common.out_dir);
  Manifest m("scc");
  m.input(a.graph);
  const auto scc = tarjan_scc(graph);
  emit(dir, "components.csv", m, [&](std::ostream& o) {
    o << "user,component\n";
    for (std::size_t i = 0; i < scc.nodes.size(); ++i)
      o << to_int(scc.nodes[i]) << ',' << scc.component[i] << '\n';
  });
  out << "components: " << scc.sizes.size()
      << ", largest fraction: " << format_number(scc.largest_fraction) << '\n';
  if (!a.sizes.empty()) {
    const std::uint64_t seed = a.common.seed.value_or(1);
    const auto method = parse_sample_method(a.method);
    m.argument("method", std::string(to_string(method)));
    m.argument("sizes", join(a.sizes));
    m.argument("repetitions", a.repetitions);
    m.argument("restart_prob", format_number(a.restart));
    m.argument("seed", seed);
    const auto curve = scc_fraction_curve(graph, method, a.sizes, a.repetitions, seed, a.restart);
    emit(dir, "scc_curve.csv", m, [&](std::ostream& o) { write_scc_curve_csv(o, curve); });
  }
  finish(dir, m);
  return kOk;
}

struct SampleArgs {
  Common common;
  std::string graph, method = "random_walk";
  std::size_t size = 0;
  std::optional<std::uint64_t> start;
  double restart = 0.15;
};

int do_sample(const SampleArgs& a, std::ostream& out) {
  const auto graph = load_graph_csv(a.graph);
  const std::uint64_t seed = a.common.seed.value_or(1);
  const auto method = parse_sample_method(a.method);
  std::vector<UserId> nodes;
  if (method == SampleMethod::random_walk)
    nodes = a.start ? random_walk_sample_from(graph, a.size, a.restart, user_id(*a.start), seed)
                    : random_walk_sample(graph, a.size, a.restart, seed);
  else
    nodes = a.start ? snowball_sample_from(graph, a.size, user_id(*a.start))
                    : snowball_sample(graph, a.size, seed);
  const fs::path dir = prepare_dir(a.common.out_dir);
  Manifest m("sample");
  m.input(a.graph);
  m.argument("method", std::string(to_string(method)));
  m.argument("size", a.size);
  m.argument("seed", seed);
  if (a.start) m.argument("start", *a.start);
  m.argument("restart_prob", format_number(a.restart));
  const auto sub = induced_subgraph(graph, nodes);
  emit(dir, "sample.csv", m, [&](std::ostream& o) { write_graph_csv(o, sub); });
  emit(dir, "sample_users.csv", m, [&](std::ostream& o) {
    o << "user\n";
    for (UserId u : nodes) o << to_int(u) << '\n';
  });
  finish(dir, m);
  out << "sampled " << nodes.size() << " users, " << sub.edge_count() << " edges\n";
  return kOk;
}

struct ClosureArgs {
  Common common;
  std::string graph;
};

int do_closure(const ClosureArgs& a, std::ostream& out) {
  const auto graph = load_graph_csv(a.graph);
  const auto closed = trf_closure(graph);
  const fs::path dir = prepare_dir(a.common.out_dir);
  Manifest m("closure");
  m.input(a.graph);
  emit(dir, "closure.csv", m, [&](std::ostream& o) { write_graph_csv(o, closed); });
  finish(dir, m);
  out << "closure: " << closed.edge_count() << " edges (" << closed.edge_count() - graph.edge_count()
      << " added)\n";
  return kOk;
}

struct SynthArgs {
  Common common;
  std::string family;
  std::size_t size = 0;
  double edge_prob = 0.0;
};

int do_synth(const SynthArgs& a, std::ostream& out) {
  const std::uint64_t seed = a.common.seed.value_or(1);
  const auto g = synth_graph(parse_graph_family(a.family), a.size, a.edge_prob, seed);
  const fs::path dir = prepare_dir(a.common.out_dir);
  Manifest m("synth");
  m.argument("family", a.family);
  m.argument("size", a.size);
  m.argument("edge_prob", format_number(a.edge_prob));
  m.argument("seed", seed);
  emit(dir, "graph.csv", m, [&](std::ostream& o) { write_graph_csv(o, g); });
  finish(dir, m);
  out << "graph: " << g.user_count() << " users, " << g.edge_count() << " edges\n";
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"trfkit: tweet-retweet-follow simulation and analysis", "trfkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", TRFKIT_VERSION);

  int status = kOk;
  std::function<int()> action;

  SimulateArgs sim;
  auto* c_sim = app.add_subcommand("simulate", "Run the simulator (config -> event log + ground truth)");
  c_sim->add_option("--config", sim.common.config, "Config file (key = value)")->check(CLI::ExistingFile);
  c_sim->add_option("--graph", sim.graph, "Initial graph: CSV path or synth:<family>:<size>[:<p>[:<seed>]]");
  c_sim->add_option("--seed", sim.common.seed, "Random seed");
  c_sim->add_option("--delta", sim.common.delta, "Window length in seconds");
  c_sim->add_option("--duration", sim.duration, "Simulated seconds");
  c_sim->add_option("--set", sim.sets, "Override a config key (key=value)");
  c_sim->add_option("--repetitions", sim.repetitions, "Independent runs with seeds seed..seed+k-1")
      ->check(CLI::PositiveNumber);
  add_out(c_sim, sim.common);
  c_sim->callback([&] { action = [&] { return do_simulate(sim, out); }; });

  ObserveArgs obs;
  auto* c_obs = app.add_subcommand("observe", "Poll follower sets (log -> snapshots)");
  c_obs->add_option("--log", obs.log, "Event log (JSON Lines)")->required()->check(CLI::ExistingFile);
  c_obs->add_option("--graph", obs.graph, "Initial graph CSV")->required()->check(CLI::ExistingFile);
  c_obs->add_option("--users", obs.users, "Users to monitor (default: all)")->delimiter(',');
  c_obs->add_option("--poll-interval", obs.poll_interval, "Seconds between polls");
  c_obs->add_option("--horizon", obs.horizon, "Last time to cover (default: last event)");
  add_out(c_obs, obs.common);
  c_obs->callback([&] { action = [&] { return do_observe(obs, out); }; });

  DetectArgs det;
  auto* c_det = app.add_subcommand("detect", "Detect TRF events (log or snapshots -> detections)");
  c_det->add_option("--log", det.log, "Event log")->required()->check(CLI::ExistingFile);
  c_det->add_option("--graph", det.graph, "Initial graph CSV")->required()->check(CLI::ExistingFile);
  c_det->add_option("--snapshots", det.snapshots, "Detect from follower snapshots instead")
      ->check(CLI::ExistingFile);
  c_det->add_option("--delta", det.common.delta, "Window length in seconds (default 86400)");
  add_out(c_det, det.common);
  c_det->callback([&] { action = [&] { return do_detect(det, out); }; });

  EstimateArgs est;
  auto* c_est = app.add_subcommand("estimate", "P_TRF / P_EXO / P_ENDO tables from a log");
  c_est->add_option("--log", est.log, "Event log")->required()->check(CLI::ExistingFile);
  c_est->add_option("--graph", est.graph, "Initial graph CSV")->required()->check(CLI::ExistingFile);
  c_est->add_option("--delta", est.common.delta, "Window length in seconds (default 86400)");
  c_est->add_option("--count", est.count, "Group size used for strata: window or truncated");
  c_est->add_option("--latency-edges", est.edges, "CDF edges in seconds")->delimiter(',');
  add_out(c_est, est.common);
  c_est->callback([&] { action = [&] { return do_estimate(est, out, err); }; });

  FitArgs fit;
  auto* c_fit = app.add_subcommand("fit", "Fit p, q per stratum (estimate table -> report)");
  c_fit->add_option("--estimates", fit.estimates, "p_trf.csv from estimate")
      ->required()
      ->check(CLI::ExistingFile);
  c_fit->add_option("--delta", fit.common.delta, "Window length recorded in the report");
  add_out(c_fit, fit.common);
  c_fit->callback([&] { action = [&] { return do_fit(fit, out, err); }; });

  LogitArgs lg;
  auto* c_lg = app.add_subcommand("logit", "Logistic regression odds ratios (features -> odds)");
  c_lg->add_option("--features", lg.features, "Factor table CSV")->check(CLI::ExistingFile);
  c_lg->add_option("--log", lg.log, "Build the factor table from this log")->check(CLI::ExistingFile);
  c_lg->add_option("--graph", lg.graph, "Initial graph for --log")->check(CLI::ExistingFile);
  c_lg->add_option("--factors", lg.factors, "Columns to use")->delimiter(',');
  c_lg->add_option("--confidence", lg.confidence, "Confidence level");
  c_lg->add_option("--delta", lg.common.delta, "Window length in seconds (default 86400)");
  add_out(c_lg, lg.common);
  c_lg->callback([&] { action = [&] { return do_logit(lg, out); }; });

  SccArgs scc;
  auto* c_scc = app.add_subcommand("scc", "Strongly connected components and sampled SCC curve");
  c_scc->add_option("--graph", scc.graph, "Graph CSV")->required()->check(CLI::ExistingFile);
  c_scc->add_option("--sizes", scc.sizes, "Sample sizes for the curve")->delimiter(',');
  c_scc->add_option("--repetitions", scc.repetitions, "Samples per size")->check(CLI::PositiveNumber);
  c_scc->add_option("--method", scc.method, "random_walk or snowball");
  c_scc->add_option("--restart", scc.restart, "Random-walk restart probability");
  c_scc->add_option("--seed", scc.common.seed, "Random seed");
  add_out(c_scc, scc.common);
  c_scc->callback([&] { action = [&] { return do_scc(scc, out); }; });

  SampleArgs smp;
  auto* c_smp = app.add_subcommand("sample", "Sample a weakly connected subgraph");
  c_smp->add_option("--graph", smp.graph, "Graph CSV")->required()->check(CLI::ExistingFile);
  c_smp->add_option("--size", smp.size, "Target number of users")->required();
  c_smp->add_option("--method", smp.method, "random_walk or snowball");
  c_smp->add_option("--start", smp.start, "Start user (default: drawn from the seed)");
  c_smp->add_option("--restart", smp.restart, "Random-walk restart probability");
  c_smp->add_option("--seed", smp.common.seed, "Random seed");
  add_out(c_smp, smp.common);
  c_smp->callback([&] { action = [&] { return do_sample(smp, out); }; });

  ClosureArgs clo;
  auto* c_clo = app.add_subcommand("closure", "TRF closure (transitive closure) of a graph");
  c_clo->add_option("--graph", clo.graph, "Graph CSV")->required()->check(CLI::ExistingFile);
  add_out(c_clo, clo.common);
  c_clo->callback([&] { action = [&] { return do_closure(clo, out); }; });

  SynthArgs syn;
  auto* c_syn = app.add_subcommand("synth", "Generate a synthetic graph");
  c_syn->add_option("--family", syn.family, "cycle, dag_hierarchy, reciprocal_pairs or random")
      ->required();
  c_syn->add_option("--size", syn.size, "Number of users")->required();
  c_syn->add_option("--edge-prob", syn.edge_prob, "Edge probability");
  c_syn->add_option("--seed", syn.common.seed, "Random seed");
  add_out(c_syn, syn.common);
  c_syn->callback([&] { action = [&] { return do_synth(syn, out); }; });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
    status = action ? action() : kUsage;
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForVersion&) {
    out << TRFKIT_VERSION << '\n';
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kUsage;
  } catch (const Error& e) {
    err << "error [" << to_string(e.code()) << "]: " << e.what() << '\n';
    return kDataError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kDataError;
  }
  return status;
}

}  // namespace trf::cli
