#include <filesystem>
#include <fstream>
#include <istream>
#include <sstream>

#include "trf/simulator.hpp"

namespace trf {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double number(const std::string& key, const std::string& value) {
  try {
    return parse_number(value);
  } catch (const Error&) {
    throw Error(Errc::invalid_config, key + ": expected a number, got '" + value + "'");
  }
}

TrfModelParams model_params(const std::string& key, const std::string& value) {
  const auto comma = value.find(',');
  if (comma == std::string::npos)
    throw Error(Errc::invalid_config, key + ": expected 'p, q', got '" + value + "'");
  return {number(key, trim(value.substr(0, comma))), number(key, trim(value.substr(comma + 1)))};
}

LatencyDistribution latency_dist(const std::string& key, const std::string& value) {
  std::istringstream in(value);
  std::string family, median, sigma, extra;
  in >> family >> median >> sigma;
  if (family != "lognormal" || median.empty() || sigma.empty() || (in >> extra))
    throw Error(Errc::invalid_config,
                key + ": expected 'lognormal <median> <sigma>', got '" + value + "'");
  return {number(key, median), number(key, sigma)};
}

std::string params_text(const TrfModelParams& p) {
  return format_number(p.p) + ", " + format_number(p.q);
}

}  // namespace

void apply_config_entry(SimConfig& c, const std::string& key, const std::string& value,
                        const std::string& base_dir) {
  if (key == "initial_graph") {
    c.initial_graph = resolve_graph_source(value, base_dir);
    c.initial_graph_source = value;
  } else if (key == "duration") {
    c.duration = number(key, value);
  } else if (key == "delta") {
    c.delta = number(key, value);
  } else if (key == "tweet_rate") {
    c.tweet_rate = number(key, value);
  } else if (key == "retweet_prob") {
    c.retweet_prob = number(key, value);
  } else if (key == "retweet_latency_dist") {
    c.retweet_latency_dist = latency_dist(key, value);
  } else if (key == "params_reciprocal") {
    c.params_reciprocal = model_params(key, value);
  } else if (key == "params_nonreciprocal") {
    c.params_nonreciprocal = model_params(key, value);
  } else if (key == "exo_follow_rate") {
    c.exo_follow_rate = number(key, value);
  } else if (key == "seed") {
    try {
      c.seed = parse_uint(value);
    } catch (const Error&) {
      throw Error(Errc::invalid_config, "seed: expected an unsigned integer");
    }
  } else if (key == "poll_interval") {
    c.poll_interval = number(key, value);
  } else if (key == "multi_hop") {
    if (value == "true" || value == "1")
      c.multi_hop = true;
    else if (value == "false" || value == "0")
      c.multi_hop = false;
    else
      throw Error(Errc::invalid_config, "multi_hop: expected true or false");
  } else {
    throw Error(Errc::invalid_config, "unknown config key '" + key + "'");
  }
}

SimConfig parse_sim_config(std::istream& in, const std::string& base_dir) {
  SimConfig c;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos)
      throw Error(Errc::invalid_config, "line " + std::to_string(lineno) + ": expected key = value");
    try {
      apply_config_entry(c, trim(body.substr(0, eq)), trim(body.substr(eq + 1)), base_dir);
    } catch (const Error& e) {
      throw Error(e.code(), "line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  c.validate();
  return c;
}

SimConfig load_sim_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io, "cannot open " + path);
  try {
    return parse_sim_config(in, std::filesystem::path(path).parent_path().string());
  } catch (const Error& e) {
    throw Error(e.code(), path + ": " + e.what());
  }
}

std::vector<std::pair<std::string, std::string>> config_entries(const SimConfig& c) {
  return {
      {"initial_graph", c.initial_graph_source},
      {"duration", format_number(c.duration)},
      {"delta", format_number(c.delta)},
      {"tweet_rate", format_number(c.tweet_rate)},
      {"retweet_prob", format_number(c.retweet_prob)},
      {"retweet_latency_dist", "lognormal " + format_number(c.retweet_latency_dist.median) + " " +
                                   format_number(c.retweet_latency_dist.sigma)},
      {"params_reciprocal", params_text(c.params_reciprocal)},
      {"params_nonreciprocal", params_text(c.params_nonreciprocal)},
      {"exo_follow_rate", format_number(c.exo_follow_rate)},
      {"seed", std::to_string(c.seed)},
      {"poll_interval", format_number(c.poll_interval)},
      {"multi_hop", c.multi_hop ? "true" : "false"},
  };
}

}  // namespace trf
