#pragma once

#include <bit>
#include <compare>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "causalcat/errors.hpp"

namespace causalcat {

// A vertex is its position in the declaration order of its Dag.
struct Vertex {
  std::uint8_t id = 0;

  constexpr Vertex() = default;
  constexpr explicit Vertex(std::size_t index) : id(static_cast<std::uint8_t>(index)) {}
  constexpr std::size_t index() const { return id; }
  friend constexpr auto operator<=>(Vertex, Vertex) = default;
};

// Set of vertices of one Dag, stored as a bitmask. Iteration follows the Dag
// order, so iterating a set yields the sorted singular word over it.
class VertexSet {
 public:
  constexpr VertexSet() = default;
  constexpr explicit VertexSet(std::uint64_t bits) : bits_(bits) {}

  static constexpr VertexSet of(Vertex v) { return VertexSet(std::uint64_t{1} << v.index()); }
  static constexpr VertexSet first_n(std::size_t n) {
    return VertexSet(n >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1);
  }

  constexpr std::uint64_t bits() const { return bits_; }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr std::size_t size() const { return static_cast<std::size_t>(std::popcount(bits_)); }
  constexpr bool contains(Vertex v) const { return (bits_ >> v.index()) & 1U; }
  constexpr bool contains(VertexSet s) const { return (s.bits_ & ~bits_) == 0; }
  constexpr bool intersects(VertexSet s) const { return (bits_ & s.bits_) != 0; }
  constexpr void insert(Vertex v) { bits_ |= std::uint64_t{1} << v.index(); }
  constexpr void erase(Vertex v) { bits_ &= ~(std::uint64_t{1} << v.index()); }
  constexpr Vertex front() const { return Vertex(static_cast<std::size_t>(std::countr_zero(bits_))); }

  // Number of members of this set that precede `v` in Dag order.
  constexpr std::size_t rank(Vertex v) const {
    return static_cast<std::size_t>(std::popcount(bits_ & ((std::uint64_t{1} << v.index()) - 1)));
  }

  friend constexpr VertexSet operator|(VertexSet a, VertexSet b) { return VertexSet(a.bits_ | b.bits_); }
  friend constexpr VertexSet operator&(VertexSet a, VertexSet b) { return VertexSet(a.bits_ & b.bits_); }
  friend constexpr VertexSet operator-(VertexSet a, VertexSet b) { return VertexSet(a.bits_ & ~b.bits_); }
  constexpr VertexSet& operator|=(VertexSet o) { bits_ |= o.bits_; return *this; }
  constexpr VertexSet& operator&=(VertexSet o) { bits_ &= o.bits_; return *this; }
  constexpr VertexSet& operator-=(VertexSet o) { bits_ &= ~o.bits_; return *this; }
  friend constexpr bool operator==(VertexSet, VertexSet) = default;

  class iterator {
   public:
    using value_type = Vertex;
    using difference_type = std::ptrdiff_t;
    constexpr iterator() = default;
    constexpr explicit iterator(std::uint64_t rest) : rest_(rest) {}
    constexpr Vertex operator*() const { return Vertex(static_cast<std::size_t>(std::countr_zero(rest_))); }
    constexpr iterator& operator++() { rest_ &= rest_ - 1; return *this; }
    constexpr iterator operator++(int) { auto copy = *this; ++*this; return copy; }
    friend constexpr bool operator==(iterator, iterator) = default;

   private:
    std::uint64_t rest_ = 0;
  };
  constexpr iterator begin() const { return iterator(bits_); }
  constexpr iterator end() const { return iterator(0); }

 private:
  std::uint64_t bits_ = 0;
};

// A word is a finite sequence of atomic variables (an object of the causal
// theory). Singular words have no repeated letter.
using Word = std::vector<Vertex>;

bool is_singular(const Word& word);
// Throws NotSingular when the word repeats a letter.
VertexSet letters(const Word& word);
// The unique singular word over `set`, sorted by Dag order.
Word sorted_word(VertexSet set);
Word concat(const Word& a, const Word& b);

class Dag {
 public:
  static constexpr std::size_t kMaxVertices = 64;
  using Edge = std::pair<Vertex, Vertex>;

  Dag() = default;

  std::size_t size() const { return names_.size(); }
  VertexSet vertices() const { return VertexSet::first_n(size()); }
  const std::string& name(Vertex v) const { return names_.at(v.index()); }
  const std::vector<std::string>& names() const { return names_; }
  std::optional<Vertex> find(std::string_view name) const;
  // Throws UnknownVertex.
  Vertex vertex(std::string_view name) const;
  VertexSet set_of(const std::vector<std::string>& names) const;
  Word word_of(const std::vector<std::string>& names) const;

  VertexSet parents(Vertex v) const { return parents_[v.index()]; }
  VertexSet children(Vertex v) const { return children_[v.index()]; }
  bool has_edge(Vertex from, Vertex to) const { return children_[from.index()].contains(to); }
  // Edges sorted by (source, target) in Dag order.
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<Vertex>& topological_order() const { return topo_; }

  std::string format(VertexSet set) const;
  std::string format(const Word& word) const;

  friend bool operator==(const Dag& a, const Dag& b) {
    return a.names_ == b.names_ && a.edges_ == b.edges_;
  }

 private:
  friend Dag build_dag(std::vector<std::string> vertices,
                       const std::vector<std::pair<std::string, std::string>>& edges);
  friend Dag build_dag(std::size_t n, const std::vector<Edge>& edges, std::vector<std::string> names);

  std::vector<std::string> names_;
  std::vector<VertexSet> parents_;
  std::vector<VertexSet> children_;
  std::vector<Edge> edges_;
  std::vector<Vertex> topo_;
};

using DagPtr = std::shared_ptr<const Dag>;

// Validates names, rejects duplicate edges, unknown endpoints and cycles.
// The vertex order of the result is the order of `vertices`.
Dag build_dag(std::vector<std::string> vertices,
              const std::vector<std::pair<std::string, std::string>>& edges);
// Index-based construction; names default to "v0", "v1", ...
Dag build_dag(std::size_t n, const std::vector<Dag::Edge>& edges, std::vector<std::string> names = {});

// `x` together with all vertices that have a directed path to `x`.
VertexSet ancestors(const Dag& dag, Vertex x);
VertexSet ancestors(const Dag& dag, VertexSet xs);
VertexSet descendants(const Dag& dag, Vertex x);
// Vertices of which `x` is not an ancestor.
VertexSet non_descendants(const Dag& dag, Vertex x);

// Copy of `dag` without the edges into `cut_into` and without the edges out of
// `cut_out_of`.
Dag mutilate(const Dag& dag, VertexSet cut_into, VertexSet cut_out_of);

// The subgraph G_{t->v} over which the causal effect of t on v is assembled.
// Vertex indices refer to the ambient Dag.
struct EffectSubgraph {
  VertexSet vertices;
  VertexSet treatment;
  VertexSet outcome;
  std::vector<VertexSet> parents;  // indexed by ambient vertex; empty outside `vertices`

  VertexSet parents_of(Vertex v) const { return parents[v.index()]; }
  std::size_t child_count(Vertex v) const;
  std::vector<Dag::Edge> edges() const;
};

EffectSubgraph effect_subgraph(const Dag& dag, VertexSet treatment, VertexSet outcome);
// Throws NotSingular when either word repeats a letter.
EffectSubgraph effect_subgraph(const Dag& dag, const Word& treatment, const Word& outcome);

std::ostream& operator<<(std::ostream& os, const Dag& dag);

}  // namespace causalcat
