#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "causalcat/dag.hpp"
#include "causalcat/morphism.hpp"

namespace causalcat {

enum class GeneratorKind { mechanism, duplicate, discard, swap, identity };

// One generator of Cau(G). `var` is the vertex of a mechanism, duplicate,
// discard or identity; a swap exchanges `var` and `other`.
struct Generator {
  GeneratorKind kind = GeneratorKind::identity;
  Vertex var;
  Vertex other;

  static Generator mechanism(Vertex v) { return {GeneratorKind::mechanism, v, v}; }
  static Generator duplicate(Vertex v) { return {GeneratorKind::duplicate, v, v}; }
  static Generator discard(Vertex v) { return {GeneratorKind::discard, v, v}; }
  static Generator swap(Vertex a, Vertex b) { return {GeneratorKind::swap, a, b}; }
  static Generator identity(Vertex v) { return {GeneratorKind::identity, v, v}; }
};

// Endpoint of a wire at its source: output `port` of node `node`, or domain
// input `port` when node == kBoundary.
struct Port {
  static constexpr std::int32_t kBoundary = -1;
  std::int32_t node = kBoundary;
  std::int32_t port = 0;

  static Port input(std::size_t i) { return {kBoundary, static_cast<std::int32_t>(i)}; }
  static Port output(std::size_t node, std::size_t port) {
    return {static_cast<std::int32_t>(node), static_cast<std::int32_t>(port)};
  }
  bool is_input() const { return node == kBoundary; }
  friend bool operator==(Port, Port) = default;
  friend auto operator<=>(Port, Port) = default;
};

enum class NodeKind { mechanism, copy };

// A box of a string diagram. A copy node with n outputs is the n-ary fan-out
// on `var`: n = 2 is the duplicate δ, n = 0 the discard ε.
struct DiagramNode {
  NodeKind kind = NodeKind::copy;
  Vertex var;
  std::int32_t outputs = 0;
  std::vector<Port> inputs;

  bool is_duplicate() const { return kind == NodeKind::copy && outputs == 2; }
  bool is_discard() const { return kind == NodeKind::copy && outputs == 0; }
  friend bool operator==(const DiagramNode&, const DiagramNode&) = default;
};

// Where a wire ends: input `port` of node `node`, or codomain position `port`
// when node == Port::kBoundary.
using Consumer = Port;

// A string diagram of Cau(G) as a port graph. Each node input and each
// codomain position names the source port of its wire, so wire crossings
// (swaps) and bare identity wires are implicit. Nodes are kept in topological
// order: inputs only reference domain inputs or earlier nodes.
class StringDiagram {
 public:
  StringDiagram() = default;
  StringDiagram(DagPtr dag, Word dom) : dag_(std::move(dag)), dom_(std::move(dom)) {}

  const Dag& dag() const { return *dag_; }
  const DagPtr& dag_ptr() const { return dag_; }
  const Word& dom() const { return dom_; }
  Word cod() const;
  const std::vector<DiagramNode>& nodes() const { return nodes_; }
  const std::vector<Port>& outputs() const { return outputs_; }

  Vertex label(Port p) const { return p.is_input() ? dom_[p.port] : nodes_[p.node].var; }
  std::size_t count(NodeKind kind) const;

  std::size_t add_node(DiagramNode node);
  Port add_mechanism(Vertex v, std::vector<Port> inputs);
  // Fan-out of `source` into `ways` copies; returns the first output port.
  Port add_copy(Port source, std::size_t ways);
  void add_discard(Port source) { add_copy(source, 0); }
  void add_output(Port p) { outputs_.push_back(p); }

  // Consumer of every source port, indexed [node + 1][port] (row 0 is the
  // domain boundary). Throws MalformedDiagram when a port has no consumer or
  // more than one.
  std::vector<std::vector<Consumer>> consumers() const;

  // Checks port arity, labels, topological order and the one-consumer rule.
  void validate() const;

  // Source of the wire ending at `c`.
  Port source(Consumer c) const { return c.is_input() ? outputs_[c.port] : nodes_[c.node].inputs[c.port]; }

  // Re-sorts nodes topologically (stable) and drops nodes listed in `removed`.
  // Remaining nodes must not reference removed ones.
  void compact(const std::vector<bool>& removed = {});

  friend bool operator==(const StringDiagram&, const StringDiagram&) = default;

 private:
  friend struct DiagramAccess;
  DagPtr dag_;
  Word dom_;
  std::vector<DiagramNode> nodes_;
  std::vector<Port> outputs_;
};

StringDiagram generator_diagram(DagPtr dag, const Generator& g);
StringDiagram identity_diagram(DagPtr dag, const Word& word);
StringDiagram empty_diagram(DagPtr dag);
// Explicit multiplier: binary duplicate chains, discards and crossings.
StringDiagram multiplier_diagram(DagPtr dag, const Word& from, const Word& to);

// `g` after `f`. Throws BoundaryMismatch unless cod(f) == dom(g).
StringDiagram compose(const StringDiagram& f, const StringDiagram& g);
StringDiagram tensor(const StringDiagram& f, const StringDiagram& g);

enum class SurgeryRule { coassociativity, counitality, cocommutativity, discard };

// A place where a surgery applies. `inverse` selects the right-to-left
// direction of the rule:
//  - coassociativity: `node` is a duplicate whose output `port` feeds another
//    duplicate; the pair is re-associated. Self-inverse.
//  - counitality: forward, `node` is a duplicate whose output `port` is
//    discarded; both nodes are removed. Inverse, the wire leaving `source` is
//    routed through a new duplicate whose prong `port` is discarded.
//  - cocommutativity: the two prongs of duplicate `node` are exchanged.
//  - discard: forward, every output of `node` is discarded and the node is
//    replaced by discards on its inputs. Inverse, the discards listed in
//    `discards` (one per parent of `var`, in parent order) are replaced by a
//    discarded mechanism κ_var.
struct SurgerySite {
  SurgeryRule rule = SurgeryRule::counitality;
  bool inverse = false;
  std::int32_t node = -1;
  std::int32_t port = 0;
  Port source;
  Vertex var;
  std::vector<std::int32_t> discards;
};

// Every site where a surgery applies. Inverse discard sites use the earliest
// discards matching the parents of each vertex.
std::vector<SurgerySite> surgery_sites(const StringDiagram& d);
// Throws PatternMismatch when the rule does not match at the site.
StringDiagram apply_surgery(const StringDiagram& d, const SurgerySite& site);

// Normal form: garbage elimination by discard and counitality surgeries,
// collapse of duplicate trees into fan-outs, canonical numbering.
Morphism normalize(const StringDiagram& d);
// Number of surgeries applied by the garbage-elimination phase of normalize.
std::size_t garbage_surgeries(const StringDiagram& d);

// Directed path in a diagram: starts at a domain input (start_input >= 0) or
// at the first listed node, visits `nodes`, ends at codomain position `output`
// (or at a dead end when output < 0).
struct DiagramPath {
  std::int32_t start_input = -1;
  std::vector<std::int32_t> nodes;
  std::int32_t output = -1;
};

// Two directed paths leaving the same copy node through different prongs.
struct SplitterPath {
  std::int32_t split_node = -1;
  DiagramPath left;
  DiagramPath right;
};

struct PathInvariantReport {
  std::vector<std::int32_t> quasi_terminal;
  std::vector<DiagramPath> to_codomain_paths;
  std::vector<SplitterPath> splitter_paths;
};

PathInvariantReport path_invariants(const StringDiagram& d);

// Projection of a PathInvariantReport that is stable under surgery: labels of
// the non-quasi-terminal mechanisms, mechanism-label sequences of the paths
// into each codomain wire and of the splitter paths per codomain pair.
struct PathSignature {
  std::multiset<std::string> mechanisms;
  std::vector<std::multiset<std::string>> paths_per_output;
  std::map<std::pair<std::int32_t, std::int32_t>, std::multiset<std::string>> splitters;
  friend bool operator==(const PathSignature&, const PathSignature&) = default;
};

PathSignature path_signature(const StringDiagram& d);

// Text dump of the raw diagram (not canonical).
std::string to_text(const StringDiagram& d);
std::string to_dot(const StringDiagram& d, const std::string& title = "diagram");
std::string to_json(const StringDiagram& d);

// Random well-formed diagram for fuzzing; built from mechanisms, duplicates,
// discards and crossings over `dag`.
StringDiagram random_diagram(DagPtr dag, std::mt19937_64& rng, std::size_t steps = 12);
// Applies `count` random surgeries (both directions); returns the result.
StringDiagram random_surgeries(const StringDiagram& d, std::mt19937_64& rng, std::size_t count);

}  // namespace causalcat
