#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "causalcat/dag.hpp"

namespace causalcat {

// All labeled DAGs on `n` vertices named "v0".."v{n-1}", generated by
// enumerating topological orders and subsets of order-compatible edges, then
// removing duplicates. Sorted by edge bitmask, so the output is deterministic.
std::vector<Dag> all_dags(std::size_t n);

// Same, for every vertex count from 1 to `max_vertices`.
std::vector<Dag> all_dags_up_to(std::size_t max_vertices);

// A random DAG: random topological order, each compatible edge kept with
// probability `edge_probability`.
Dag random_dag(std::size_t n, std::mt19937_64& rng, double edge_probability = 0.5);

// An assignment of the vertices of a Dag to (u, v, w, rest), with u, v, w
// pairwise disjoint.
struct Triple {
  VertexSet u;
  VertexSet v;
  VertexSet w;
};

// Calls `visit` for every pairwise-disjoint (u, v, w) over `vertices` with v
// and w nonempty. Enumeration order is fixed.
void for_each_triple(VertexSet vertices, const std::function<void(const Triple&)>& visit);
std::vector<Triple> all_triples(VertexSet vertices);

}  // namespace causalcat
