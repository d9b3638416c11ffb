#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "causalcat/dag.hpp"

namespace causalcat {

class StringDiagram;

// Source of a wire inside a TermGraph: either a domain input or the output of
// a mechanism node.
class TermRef {
 public:
  constexpr TermRef() = default;
  static constexpr TermRef input(std::size_t i) { return TermRef(-static_cast<std::int32_t>(i) - 1); }
  static constexpr TermRef node(std::size_t k) { return TermRef(static_cast<std::int32_t>(k)); }

  constexpr bool is_input() const { return raw_ < 0; }
  constexpr std::size_t index() const { return static_cast<std::size_t>(raw_ < 0 ? -raw_ - 1 : raw_); }
  constexpr std::int32_t raw() const { return raw_; }
  friend constexpr bool operator==(TermRef, TermRef) = default;

 private:
  constexpr explicit TermRef(std::int32_t raw) : raw_(raw) {}
  std::int32_t raw_ = 0;
};

// Hypergraph form of a string diagram in Cau(G). Mechanism nodes reference
// the sources of their input wires; a source referenced k times is copied
// k ways (k = 0 means discarded), so duplicates, discards and swaps are not
// stored. Nodes are kept in topological order: arguments only reference
// earlier nodes.
class TermGraph {
 public:
  TermGraph() = default;
  explicit TermGraph(Word dom) : dom_(std::move(dom)) {}

  const Word& dom() const { return dom_; }
  std::size_t node_count() const { return node_vertex_.size(); }
  Vertex node_vertex(std::size_t k) const { return node_vertex_[k]; }
  std::span<const TermRef> args(std::size_t k) const {
    return {args_.data() + arg_begin_[k], args_.data() + arg_begin_[k + 1]};
  }
  const std::vector<TermRef>& outputs() const { return outputs_; }
  Vertex label(TermRef r) const { return r.is_input() ? dom_[r.index()] : node_vertex_[r.index()]; }
  Word cod() const;

  TermRef add_mechanism(Vertex v, std::span<const TermRef> args);
  void add_output(TermRef r) { outputs_.push_back(r); }

  static TermGraph identity(const Word& word);
  // The unique multiplier between `from` (singular) and a word over its letters.
  static TermGraph multiplier(const Word& from, const Word& to);

  // Drops nodes that do not reach an output (discard surgery applied to
  // exhaustion) and renumbers the rest in output-anchored DFS post-order.
  TermGraph canonical() const;
  // Flat equality key of a canonical graph.
  std::vector<std::int32_t> key() const;

  friend bool operator==(const TermGraph&, const TermGraph&) = default;

 private:
  Word dom_;
  std::vector<Vertex> node_vertex_;
  std::vector<std::uint32_t> arg_begin_{0};
  std::vector<TermRef> args_;
  std::vector<TermRef> outputs_;
};

// `g` after `f`; requires f.cod() == g.dom().
TermGraph compose(const TermGraph& f, const TermGraph& g);
TermGraph tensor(const TermGraph& f, const TermGraph& g);
// Removes one occurrence of each letter of `drop` from the codomain.
TermGraph discard_outputs(const TermGraph& f, const Word& drop);

// A morphism of Cau(G): the canonical term graph of an equivalence class of
// string diagrams up to surgery. Two morphisms are equal iff their canonical
// keys are identical.
class Morphism {
 public:
  Morphism() = default;
  // Canonicalizes `g` and checks every mechanism against the parents in `dag`.
  static Morphism from_terms(DagPtr dag, const TermGraph& g);

  const Dag& dag() const { return *dag_; }
  const DagPtr& dag_ptr() const { return dag_; }
  const Word& dom() const { return terms_.dom(); }
  const Word& cod() const { return cod_; }
  const TermGraph& terms() const { return terms_; }
  const std::vector<std::int32_t>& key() const { return key_; }

  // Deterministic text form of the normal form, e.g.
  // "x -> z : n0 = κ_y(in0); n1 = κ_z(n0); return (n1)".
  std::string serialize() const;
  // The canonical string diagram: mechanisms in normal-form order, n-ary
  // fan-outs for shared wires, bare discards on unused inputs.
  StringDiagram diagram() const;

  // Domain inputs connected to some codomain wire.
  VertexSet connected_inputs() const;

  friend bool operator==(const Morphism& f, const Morphism& g);

 private:
  DagPtr dag_;
  TermGraph terms_;
  Word cod_;
  std::vector<std::int32_t> key_;
};

bool equal(const Morphism& f, const Morphism& g);

Morphism compose(const Morphism& f, const Morphism& g);
Morphism tensor(const Morphism& f, const Morphism& g);
Morphism identity(DagPtr dag, const Word& word);
Morphism mechanism(DagPtr dag, Vertex v);
// Throws NotSingular for a non-singular `from`, NotBuildable when `to` uses a
// letter absent from `from`.
Morphism multiplier(DagPtr dag, const Word& from, const Word& to);
// Marginal of f over `drop`: discards on `drop`, identities elsewhere.
// Throws NotSubWord when `drop` is not contained in cod(f).
Morphism marginal(const Morphism& f, const Word& drop);

}  // namespace causalcat
