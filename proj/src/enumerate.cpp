#include "causalcat/enumerate.hpp"

#include <algorithm>
#include <numeric>

namespace causalcat {

namespace {

// Edge (i, j) of an n-vertex graph as bit i * n + j.
std::uint64_t edge_bit(std::size_t n, std::size_t i, std::size_t j) { return std::uint64_t{1} << (i * n + j); }

Dag dag_from_mask(std::size_t n, std::uint64_t mask) {
  std::vector<Dag::Edge> edges;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (mask & edge_bit(n, i, j)) edges.emplace_back(Vertex(i), Vertex(j));
    }
  }
  return build_dag(n, edges);
}

}  // namespace

std::vector<Dag> all_dags(std::size_t n) {
  if (n == 0) return {};
  if (n > 6) throw TooManyVertices("exhaustive DAG enumeration is limited to 6 vertices");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  const std::size_t pairs = n * (n - 1) / 2;
  std::vector<std::uint64_t> masks;
  do {
    for (std::uint64_t subset = 0; subset < (std::uint64_t{1} << pairs); ++subset) {
      std::uint64_t mask = 0;
      std::size_t bit = 0;
      for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = a + 1; b < n; ++b, ++bit) {
          if (subset >> bit & 1U) mask |= edge_bit(n, order[a], order[b]);
        }
      }
      masks.push_back(mask);
    }
  } while (std::next_permutation(order.begin(), order.end()));
  std::sort(masks.begin(), masks.end());
  masks.erase(std::unique(masks.begin(), masks.end()), masks.end());

  std::vector<Dag> out;
  out.reserve(masks.size());
  for (std::uint64_t m : masks) out.push_back(dag_from_mask(n, m));
  return out;
}

std::vector<Dag> all_dags_up_to(std::size_t max_vertices) {
  std::vector<Dag> out;
  for (std::size_t n = 1; n <= max_vertices; ++n) {
    auto dags = all_dags(n);
    out.insert(out.end(), std::make_move_iterator(dags.begin()), std::make_move_iterator(dags.end()));
  }
  return out;
}

Dag random_dag(std::size_t n, std::mt19937_64& rng, double edge_probability) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  std::bernoulli_distribution keep(edge_probability);
  std::vector<Dag::Edge> edges;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      if (keep(rng)) edges.emplace_back(Vertex(order[a]), Vertex(order[b]));
    }
  }
  return build_dag(n, edges);
}

void for_each_triple(VertexSet vertices, const std::function<void(const Triple&)>& visit) {
  const Word members = sorted_word(vertices);
  const std::size_t n = members.size();
  std::size_t total = 1;
  for (std::size_t i = 0; i < n; ++i) total *= 4;
  for (std::size_t code = 0; code < total; ++code) {
    Triple t;
    std::size_t rest = code;
    for (std::size_t i = 0; i < n; ++i, rest /= 4) {
      switch (rest % 4) {
        case 1: t.u.insert(members[i]); break;
        case 2: t.v.insert(members[i]); break;
        case 3: t.w.insert(members[i]); break;
        default: break;
      }
    }
    if (t.v.empty() || t.w.empty()) continue;
    visit(t);
  }
}

std::vector<Triple> all_triples(VertexSet vertices) {
  std::vector<Triple> out;
  for_each_triple(vertices, [&](const Triple& t) { out.push_back(t); });
  return out;
}

}  // namespace causalcat
