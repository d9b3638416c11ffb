#pragma once

#include <optional>
#include <string>
#include <vector>

#include "causalcat/dag.hpp"

namespace causalcat {

enum class TrekKind { forward, backward };

// A trek between two vertices. `vertices` runs from the start i to the end j.
// A forward trek is the directed path i -> ... -> j (top == i). A backward
// trek is either the directed path j -> ... -> i (top == j) or a fork
// i <- ... <- k -> ... -> j with a distinct top k.
struct Trek {
  TrekKind kind = TrekKind::forward;
  std::vector<Vertex> vertices;
  Vertex top;

  Vertex start() const { return vertices.front(); }
  Vertex end() const { return vertices.back(); }
  VertexSet members() const;
  std::string format(const Dag& dag) const;
  friend bool operator==(const Trek&, const Trek&) = default;
};

// All proper treks of `kind` from some i in `from` to some j in `to`, i.e.
// treks whose other vertices avoid from ∪ to. Exhaustive DFS over simple
// paths in a deterministic order. Throws OverlapError when the sets meet.
std::vector<Trek> proper_treks(const Dag& dag, VertexSet from, VertexSet to, TrekKind kind);

// A proper trek of `kind` from X to Y that avoids Z, if one exists. This is
// the witness that X is not (forward/backward) t-separated from Y by Z.
std::optional<Trek> unblocked_trek(const Dag& dag, VertexSet x, VertexSet y, VertexSet z, TrekKind kind);

// Every proper forward trek from X to Y contains a vertex of Z.
bool forward_t_separated(const Dag& dag, VertexSet x, VertexSet y, VertexSet z);
// Every proper backward trek from X to Y contains a vertex of Z. Not symmetric.
bool backward_t_separated(const Dag& dag, VertexSet x, VertexSet y, VertexSet z);
bool t_separated(const Dag& dag, VertexSet x, VertexSet y, VertexSet z);

// Classical d-separation of X and Y given Z (reachability formulation).
bool d_separated(const Dag& dag, VertexSet x, VertexSet y, VertexSet z);

// Throws OverlapError unless x, y, z are pairwise disjoint subsets of the Dag.
void require_disjoint(const Dag& dag, VertexSet x, VertexSet y, VertexSet z);

}  // namespace causalcat
