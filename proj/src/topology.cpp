#include "trf/topology.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <absl/container/flat_hash_set.h>

#include "trf/rng.hpp"

namespace trf {

namespace {

std::uint32_t dense_index(const Csr& csr, UserId u) {
  auto it = std::lower_bound(csr.ids.begin(), csr.ids.end(), u);
  if (it == csr.ids.end() || *it != u)
    throw Error(Errc::unknown_user, "unknown user " + std::to_string(to_int(u)));
  return static_cast<std::uint32_t>(it - csr.ids.begin());
}

// BFS along arcs from `source`; `seen` must be all-false on entry and is left
// marked. Returns the visited list in discovery order, source excluded unless
// it is re-entered.
std::vector<std::uint32_t> reach_from(const Csr& csr, std::uint32_t source,
                                      std::vector<char>& seen) {
  std::vector<std::uint32_t> found;
  std::vector<std::uint32_t> queue{source};
  for (std::size_t head = 0; head < queue.size(); ++head)
    for (std::uint32_t w : csr.neighbors(queue[head]))
      if (!seen[w]) {
        seen[w] = 1;
        found.push_back(w);
        queue.push_back(w);
      }
  return found;
}

}  // namespace

Csr to_csr(const TemporalDigraph& graph, bool undirected) {
  Csr csr;
  csr.ids = graph.users();
  const std::size_t n = csr.ids.size();
  absl::flat_hash_map<UserId, std::uint32_t> index;
  index.reserve(n);
  for (std::uint32_t i = 0; i < n; ++i) index.emplace(csr.ids[i], i);

  std::vector<std::vector<std::uint32_t>> adj(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    for (const auto& a : graph.followees(csr.ids[i])) adj[i].push_back(index.at(a.other));
    if (undirected)
      for (const auto& a : graph.followers(csr.ids[i])) adj[i].push_back(index.at(a.other));
  }
  csr.offsets.assign(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) {
    auto& v = adj[i];
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    csr.offsets[i + 1] = csr.offsets[i] + static_cast<std::uint32_t>(v.size());
  }
  csr.targets.reserve(csr.offsets[n]);
  for (auto& v : adj) csr.targets.insert(csr.targets.end(), v.begin(), v.end());
  return csr;
}

SccResult tarjan_scc(const Csr& csr) {
  const auto n = static_cast<std::uint32_t>(csr.size());
  constexpr std::uint32_t kUnset = std::numeric_limits<std::uint32_t>::max();
  std::vector<std::uint32_t> index(n, kUnset), low(n, 0), comp(n, kUnset);
  std::vector<char> on_stack(n, 0);
  std::vector<std::uint32_t> stack;
  struct Frame {
    std::uint32_t v;
    std::uint32_t next;  // offset of the next arc to look at
  };
  std::vector<Frame> call;
  std::uint32_t counter = 0, components = 0;
  std::vector<std::uint32_t> raw_sizes;

  for (std::uint32_t root = 0; root < n; ++root) {
    if (index[root] != kUnset) continue;
    call.push_back({root, csr.offsets[root]});
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = 1;
    while (!call.empty()) {
      Frame& f = call.back();
      const std::uint32_t v = f.v;
      if (f.next < csr.offsets[v + 1]) {
        const std::uint32_t w = csr.targets[f.next++];
        if (index[w] == kUnset) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = 1;
          call.push_back({w, csr.offsets[w]});
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], index[w]);
        }
        continue;
      }
      if (low[v] == index[v]) {
        std::uint32_t size = 0, w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = 0;
          comp[w] = components;
          ++size;
        } while (w != v);
        raw_sizes.push_back(size);
        ++components;
      }
      call.pop_back();
      if (!call.empty()) low[call.back().v] = std::min(low[call.back().v], low[v]);
    }
  }

  // Renumber so component ids follow the smallest member.
  SccResult r;
  r.nodes = csr.ids;
  r.component.resize(n);
  std::vector<std::uint32_t> renumber(components, kUnset);
  std::uint32_t next_id = 0;
  r.sizes.reserve(components);
  for (std::uint32_t v = 0; v < n; ++v) {
    auto& id = renumber[comp[v]];
    if (id == kUnset) {
      id = next_id++;
      r.sizes.push_back(raw_sizes[comp[v]]);
    }
    r.component[v] = id;
  }
  if (n > 0)
    r.largest_fraction =
        static_cast<double>(*std::max_element(r.sizes.begin(), r.sizes.end())) / n;
  return r;
}

SccResult tarjan_scc(const TemporalDigraph& graph) { return tarjan_scc(to_csr(graph)); }

std::vector<UserId> random_walk_sample_from(const TemporalDigraph& graph, std::size_t target_size,
                                            double restart_prob, UserId start, std::uint64_t seed) {
  if (!(restart_prob >= 0.0 && restart_prob < 1.0))
    throw Error(Errc::invalid_config, "restart_prob must lie in [0, 1)");
  const Csr csr = to_csr(graph, true);
  const std::uint32_t s = dense_index(csr, start);
  if (target_size > csr.size())
    throw Error(Errc::unreachable, "target size exceeds the graph");
  if (target_size == 0) return {};

  Rng rng = Rng::substream(seed, "sampling/random_walk");
  std::vector<char> seen(csr.size(), 0);
  std::vector<UserId> out{start};
  seen[s] = 1;
  const std::uint64_t cap = 1000 * static_cast<std::uint64_t>(csr.size()) + 10000;
  std::uint32_t at = s;
  for (std::uint64_t step = 0; out.size() < target_size; ++step) {
    if (step >= cap)
      throw Error(Errc::unreachable, "random walk saw " + std::to_string(out.size()) + " of " +
                                         std::to_string(target_size) + " users before giving up");
    const auto nb = csr.neighbors(at);
    if (nb.empty() || rng.bernoulli(restart_prob)) {
      at = s;
      continue;
    }
    at = nb[rng.below(nb.size())];
    if (!seen[at]) {
      seen[at] = 1;
      out.push_back(csr.ids[at]);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<UserId> random_walk_sample(const TemporalDigraph& graph, std::size_t target_size,
                                       double restart_prob, std::uint64_t seed) {
  const auto users = graph.users();
  if (users.empty()) throw Error(Errc::unreachable, "empty graph");
  Rng rng = Rng::substream(seed, "sampling/start");
  return random_walk_sample_from(graph, target_size, restart_prob, users[rng.below(users.size())],
                                 seed);
}

std::vector<UserId> snowball_sample_from(const TemporalDigraph& graph, std::size_t target_size,
                                         UserId start) {
  const Csr csr = to_csr(graph, true);
  const std::uint32_t s = dense_index(csr, start);
  if (target_size == 0) return {};
  std::vector<char> seen(csr.size(), 0);
  std::vector<std::uint32_t> queue{s};
  seen[s] = 1;
  // Neighbor lists are ascending, so the cut at target_size keeps the
  // smallest ids of the last layer reached.
  for (std::size_t head = 0; head < queue.size() && queue.size() < target_size; ++head)
    for (std::uint32_t w : csr.neighbors(queue[head])) {
      if (seen[w]) continue;
      seen[w] = 1;
      queue.push_back(w);
      if (queue.size() == target_size) break;
    }
  if (queue.size() < target_size)
    throw Error(Errc::unreachable, "component of the start holds only " +
                                       std::to_string(queue.size()) + " users");
  std::vector<UserId> out;
  for (auto v : queue) out.push_back(csr.ids[v]);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<UserId> snowball_sample(const TemporalDigraph& graph, std::size_t target_size,
                                    std::uint64_t seed) {
  const auto users = graph.users();
  if (users.empty()) throw Error(Errc::unreachable, "empty graph");
  Rng rng = Rng::substream(seed, "sampling/start");
  return snowball_sample_from(graph, target_size, users[rng.below(users.size())]);
}

TemporalDigraph induced_subgraph(const TemporalDigraph& graph, std::span<const UserId> nodes) {
  absl::flat_hash_set<UserId> keep(nodes.begin(), nodes.end());
  TemporalDigraph sub;
  for (UserId u : nodes) sub.add_user(u);
  for (UserId u : nodes)
    for (const auto& a : graph.followees(u))
      if (keep.contains(a.other)) sub.add_follow(u, a.other, a.created_at);
  return sub;
}

std::vector<UserId> reachable_followees(const TemporalDigraph& graph, UserId x) {
  if (!graph.has_user(x)) throw Error(Errc::unknown_user, "unknown user " + std::to_string(to_int(x)));
  const Csr csr = to_csr(graph);
  std::vector<char> seen(csr.size(), 0);
  std::vector<UserId> out;
  for (auto v : reach_from(csr, dense_index(csr, x), seen)) out.push_back(csr.ids[v]);
  std::sort(out.begin(), out.end());
  return out;
}

TemporalDigraph trf_closure(const TemporalDigraph& graph) {
  const Csr csr = to_csr(graph);
  TemporalDigraph out = graph;
  std::vector<char> seen(csr.size(), 0);
  for (std::uint32_t v = 0; v < csr.size(); ++v) {
    const auto found = reach_from(csr, v, seen);
    std::vector<std::uint32_t> sorted(found);
    std::sort(sorted.begin(), sorted.end());
    for (auto w : sorted) {
      seen[w] = 0;
      if (w != v && !out.has_edge(csr.ids[v], csr.ids[w]))
        out.add_follow(csr.ids[v], csr.ids[w], kEquilibriumTime);
    }
  }
  return out;
}

bool is_trf_equilibrium(const TemporalDigraph& graph) {
  const Csr csr = to_csr(graph);
  std::vector<char> seen(csr.size(), 0);
  for (std::uint32_t v = 0; v < csr.size(); ++v) {
    const auto found = reach_from(csr, v, seen);
    bool closed = true;
    for (auto w : found) {
      seen[w] = 0;
      if (w != v && !std::binary_search(csr.neighbors(v).begin(), csr.neighbors(v).end(), w))
        closed = false;
    }
    if (!closed) return false;
  }
  return true;
}

SampleMethod parse_sample_method(std::string_view name) {
  if (name == "random_walk" || name == "rw") return SampleMethod::random_walk;
  if (name == "snowball" || name == "bfs") return SampleMethod::snowball;
  throw Error(Errc::invalid_config, "unknown sampling method '" + std::string(name) + "'");
}

std::string_view to_string(SampleMethod m) {
  return m == SampleMethod::random_walk ? "random_walk" : "snowball";
}

std::vector<SccCurveRow> scc_fraction_curve(const TemporalDigraph& graph, SampleMethod method,
                                            std::span<const std::size_t> sizes,
                                            std::size_t repetitions, std::uint64_t seed,
                                            double restart_prob) {
  if (!std::is_sorted(sizes.begin(), sizes.end()))
    throw Error(Errc::invalid_config, "sample sizes must be ascending");
  if (repetitions == 0) throw Error(Errc::invalid_config, "repetitions must be positive");
  std::vector<SccCurveRow> out;
  std::vector<double> fractions;
  for (std::size_t size : sizes) {
    fractions.clear();
    for (std::size_t rep = 0; rep < repetitions; ++rep) {
      const std::uint64_t run_seed =
          splitmix64(seed ^ splitmix64(size * 1000003ULL + rep));
      const auto nodes = method == SampleMethod::random_walk
                             ? random_walk_sample(graph, size, restart_prob, run_seed)
                             : snowball_sample(graph, size, run_seed);
      fractions.push_back(tarjan_scc(induced_subgraph(graph, nodes)).largest_fraction);
    }
    double mean = 0.0;
    for (double f : fractions) mean += f;
    mean /= static_cast<double>(repetitions);
    double ss = 0.0;
    for (double f : fractions) ss += (f - mean) * (f - mean);
    const double sd = repetitions > 1 ? std::sqrt(ss / double(repetitions - 1)) : 0.0;
    const double half = 1.96 * sd / std::sqrt(double(repetitions));
    out.push_back({size, mean, mean - half, mean + half, repetitions});
  }
  return out;
}

void write_scc_curve_csv(std::ostream& out, std::span<const SccCurveRow> rows) {
  out << "size,mean_fraction,ci_low,ci_high,repetitions\n";
  for (const auto& r : rows)
    out << r.size << ',' << format_number(r.mean_fraction) << ',' << format_number(r.ci_low) << ','
        << format_number(r.ci_high) << ',' << r.repetitions << '\n';
}

}  // namespace trf
