#pragma once

#include <random>
#include <vector>

#include "trf/graph.hpp"

namespace testing {

using trf::UserId;
using trf::user_id;

inline trf::TemporalDigraph random_digraph(std::mt19937_64& rng, std::size_t n, double p) {
  trf::TemporalDigraph g;
  std::bernoulli_distribution coin(p);
  for (std::size_t i = 0; i < n; ++i) g.add_user(user_id(i));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j && coin(rng)) g.add_follow(user_id(i), user_id(j), 0.0);
  return g;
}

// reach[i][j]: a path of length >= 1 from i to j, by Floyd-Warshall over
// users 0..n-1.
inline std::vector<std::vector<char>> floyd_warshall(const trf::TemporalDigraph& g, std::size_t n) {
  std::vector<std::vector<char>> r(n, std::vector<char>(n, 0));
  for (const auto& e : g.edges()) r[trf::to_int(e.follower)][trf::to_int(e.followee)] = 1;
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      if (r[i][k])
        for (std::size_t j = 0; j < n; ++j)
          if (r[k][j]) r[i][j] = 1;
  return r;
}

inline std::vector<UserId> ids(std::initializer_list<std::uint64_t> v) {
  std::vector<UserId> out;
  for (auto x : v) out.push_back(user_id(x));
  return out;
}

}  // namespace testing
