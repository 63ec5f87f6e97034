#include <cmath>
#include <filesystem>
#include <string>

#include "trf/rng.hpp"
#include "trf/simulator.hpp"

namespace trf {

GraphFamily parse_graph_family(std::string_view name) {
  if (name == "cycle") return GraphFamily::cycle;
  if (name == "dag_hierarchy") return GraphFamily::dag_hierarchy;
  if (name == "reciprocal_pairs") return GraphFamily::reciprocal_pairs;
  if (name == "random") return GraphFamily::random;
  throw Error(Errc::invalid_config, "unknown graph family '" + std::string(name) + "'");
}

std::string_view to_string(GraphFamily family) {
  switch (family) {
    case GraphFamily::cycle: return "cycle";
    case GraphFamily::dag_hierarchy: return "dag_hierarchy";
    case GraphFamily::reciprocal_pairs: return "reciprocal_pairs";
    case GraphFamily::random: return "random";
  }
  return "unknown";
}

TemporalDigraph synth_graph(GraphFamily family, std::size_t size, double edge_prob,
                            std::uint64_t seed) {
  if (size < 1) throw Error(Errc::invalid_config, "graph size must be at least 1");
  if (!(edge_prob >= 0.0 && edge_prob <= 1.0))
    throw Error(Errc::invalid_config, "edge_prob must lie in [0, 1]");

  TemporalDigraph g;
  for (std::size_t i = 0; i < size; ++i) g.add_user(user_id(i));
  Rng rng = Rng::substream(seed, "synth/" + std::string(to_string(family)));

  switch (family) {
    case GraphFamily::cycle:
      if (size > 1)
        for (std::size_t i = 0; i < size; ++i) g.add_follow(user_id(i), user_id((i + 1) % size), 0.0);
      break;

    case GraphFamily::dag_hierarchy: {
      const auto sinks = std::max<std::size_t>(
          1, static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(size)))));
      if (size > sinks)
        for (std::size_t s = 0; s < sinks; ++s) g.add_follow(user_id(sinks), user_id(s), 0.0);
      for (std::size_t i = sinks + 1; i < size; ++i) {
        const auto parent = sinks + rng.below(i - sinks);
        g.add_follow(user_id(i), user_id(parent), 0.0);
        for (std::size_t j = 0; j < i; ++j)
          if (j != parent && rng.bernoulli(edge_prob)) g.add_follow(user_id(i), user_id(j), 0.0);
      }
      break;
    }

    case GraphFamily::reciprocal_pairs:
      for (std::size_t i = 0; i < size; ++i)
        for (std::size_t j = i + 1; j < size; ++j)
          if (rng.bernoulli(edge_prob)) {
            g.add_follow(user_id(i), user_id(j), 0.0);
            g.add_follow(user_id(j), user_id(i), 0.0);
          }
      break;

    case GraphFamily::random:
      for (std::size_t i = 0; i < size; ++i)
        for (std::size_t j = 0; j < size; ++j)
          if (i != j && rng.bernoulli(edge_prob)) g.add_follow(user_id(i), user_id(j), 0.0);
      break;
  }
  return g;
}

TemporalDigraph resolve_graph_source(const std::string& source, const std::string& base_dir) {
  constexpr std::string_view prefix = "synth:";
  if (source.rfind(prefix, 0) == 0) {
    std::vector<std::string> parts;
    std::size_t start = prefix.size();
    while (true) {
      const auto pos = source.find(':', start);
      parts.push_back(source.substr(start, pos == std::string::npos ? pos : pos - start));
      if (pos == std::string::npos) break;
      start = pos + 1;
    }
    if (parts.size() < 2 || parts.size() > 4)
      throw Error(Errc::invalid_config,
                  "expected synth:<family>:<size>[:<edge_prob>[:<seed>]], got '" + source + "'");
    try {
      const auto family = parse_graph_family(parts[0]);
      const auto size = parse_uint(parts[1]);
      const double p = parts.size() > 2 ? parse_number(parts[2]) : 0.0;
      const auto seed = parts.size() > 3 ? parse_uint(parts[3]) : 0;
      return synth_graph(family, size, p, seed);
    } catch (const Error& e) {
      throw Error(Errc::invalid_config, "bad graph source '" + source + "': " + e.what());
    }
  }
  std::filesystem::path path(source);
  if (path.is_relative() && !base_dir.empty()) path = std::filesystem::path(base_dir) / path;
  return load_graph_csv(path.string());
}

}  // namespace trf
