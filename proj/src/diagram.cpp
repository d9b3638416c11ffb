#include "causalcat/diagram.hpp"

#include <algorithm>
#include <functional>
#include <queue>
#include <sstream>

#include "json.hpp"

namespace causalcat {

struct DiagramAccess {
  static std::vector<DiagramNode>& nodes(StringDiagram& d) { return d.nodes_; }
  static std::vector<Port>& outputs(StringDiagram& d) { return d.outputs_; }
  static Word& dom(StringDiagram& d) { return d.dom_; }

  static void rewire(StringDiagram& d, Consumer c, Port p) {
    if (c.is_input()) {
      d.outputs_[c.port] = p;
    } else {
      d.nodes_[c.node].inputs[c.port] = p;
    }
  }
};

namespace {

constexpr Port kUnset{-2, -2};

void check_vertex(const Dag& dag, Vertex v) {
  if (v.index() >= dag.size()) throw UnknownVertex("generator vertex outside the Dag");
}

std::string node_label(const Dag& dag, const DiagramNode& n) {
  if (n.kind == NodeKind::mechanism) return "κ_" + dag.name(n.var);
  if (n.outputs == 0) return "ε_" + dag.name(n.var);
  if (n.outputs == 2) return "δ_" + dag.name(n.var);
  return "δ" + std::to_string(n.outputs) + "_" + dag.name(n.var);
}

}  // namespace

Word StringDiagram::cod() const {
  Word out;
  out.reserve(outputs_.size());
  for (Port p : outputs_) out.push_back(label(p));
  return out;
}

std::size_t StringDiagram::count(NodeKind kind) const {
  return static_cast<std::size_t>(std::count_if(nodes_.begin(), nodes_.end(), [&](const DiagramNode& n) { return n.kind == kind; }));
}

std::size_t StringDiagram::add_node(DiagramNode node) {
  for (Port p : node.inputs) {
    if (p.is_input() ? p.port < 0 || static_cast<std::size_t>(p.port) >= dom_.size()
                     : p.node < 0 || static_cast<std::size_t>(p.node) >= nodes_.size() || p.port < 0 ||
                           p.port >= nodes_[p.node].outputs) {
      throw MalformedDiagram("node input references a missing port");
    }
  }
  nodes_.push_back(std::move(node));
  return nodes_.size() - 1;
}

Port StringDiagram::add_mechanism(Vertex v, std::vector<Port> inputs) {
  check_vertex(*dag_, v);
  const VertexSet pa = dag_->parents(v);
  if (inputs.size() != pa.size()) throw MalformedDiagram("mechanism arity does not match its parents");
  std::size_t i = 0;
  for (Vertex p : pa) {
    const Port in = inputs[i++];
    if (!in.is_input() && (in.node < 0 || static_cast<std::size_t>(in.node) >= nodes_.size())) {
      throw MalformedDiagram("node input references a missing port");
    }
    if (in.is_input() && (in.port < 0 || static_cast<std::size_t>(in.port) >= dom_.size())) {
      throw MalformedDiagram("node input references a missing port");
    }
    if (label(in) != p) throw MalformedDiagram("mechanism input label does not match its parent");
  }
  return Port::output(add_node({NodeKind::mechanism, v, 1, std::move(inputs)}), 0);
}

Port StringDiagram::add_copy(Port source, std::size_t ways) {
  const std::size_t k = add_node({NodeKind::copy, label(source), static_cast<std::int32_t>(ways), {source}});
  return Port::output(k, 0);
}

std::vector<std::vector<Consumer>> StringDiagram::consumers() const {
  std::vector<std::vector<Consumer>> table(nodes_.size() + 1);
  table[0].assign(dom_.size(), kUnset);
  for (std::size_t k = 0; k < nodes_.size(); ++k) table[k + 1].assign(static_cast<std::size_t>(nodes_[k].outputs), kUnset);
  auto claim = [&](Port p, Consumer c) {
    auto& row = table[static_cast<std::size_t>(p.node + 1)];
    if (p.port < 0 || static_cast<std::size_t>(p.port) >= row.size()) throw MalformedDiagram("wire leaves a missing port");
    if (row[p.port] != kUnset) throw MalformedDiagram("port has more than one consumer");
    row[p.port] = c;
  };
  for (std::size_t k = 0; k < nodes_.size(); ++k) {
    for (std::size_t i = 0; i < nodes_[k].inputs.size(); ++i) claim(nodes_[k].inputs[i], Port::output(k, i));
  }
  for (std::size_t j = 0; j < outputs_.size(); ++j) claim(outputs_[j], Port::input(j));
  for (const auto& row : table) {
    for (Consumer c : row) {
      if (c == kUnset) throw MalformedDiagram("port has no consumer");
    }
  }
  return table;
}

void StringDiagram::validate() const {
  if (!dag_) throw MalformedDiagram("diagram has no Dag");
  for (Vertex v : dom_) check_vertex(*dag_, v);
  for (std::size_t k = 0; k < nodes_.size(); ++k) {
    const DiagramNode& n = nodes_[k];
    check_vertex(*dag_, n.var);
    for (Port p : n.inputs) {
      if (!p.is_input() && (p.node < 0 || static_cast<std::size_t>(p.node) >= k)) {
        throw MalformedDiagram("diagram is not topologically ordered");
      }
      if (p.is_input() && (p.port < 0 || static_cast<std::size_t>(p.port) >= dom_.size())) {
        throw MalformedDiagram("node input references a missing domain wire");
      }
    }
    if (n.kind == NodeKind::mechanism) {
      const VertexSet pa = dag_->parents(n.var);
      if (n.outputs != 1 || n.inputs.size() != pa.size()) throw MalformedDiagram("mechanism has the wrong arity");
      std::size_t i = 0;
      for (Vertex p : pa) {
        if (label(n.inputs[i++]) != p) throw MalformedDiagram("mechanism input label does not match its parent");
      }
    } else {
      if (n.outputs < 0 || n.inputs.size() != 1) throw MalformedDiagram("copy node has the wrong arity");
      if (label(n.inputs[0]) != n.var) throw MalformedDiagram("copy node input label mismatch");
    }
  }
  for (Port p : outputs_) {
    if (!p.is_input() && (p.node < 0 || static_cast<std::size_t>(p.node) >= nodes_.size())) {
      throw MalformedDiagram("codomain wire references a missing node");
    }
  }
  consumers();
}

void StringDiagram::compact(const std::vector<bool>& removed) {
  const std::size_t n = nodes_.size();
  auto gone = [&](std::size_t k) { return k < removed.size() && removed[k]; };
  std::vector<std::vector<std::size_t>> users(n);
  std::vector<std::size_t> pending(n, 0);
  for (std::size_t k = 0; k < n; ++k) {
    if (gone(k)) continue;
    for (Port p : nodes_[k].inputs) {
      if (p.is_input()) continue;
      if (gone(static_cast<std::size_t>(p.node))) throw MalformedDiagram("node references a removed node");
      users[p.node].push_back(k);
      ++pending[k];
    }
  }
  std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> ready;
  for (std::size_t k = 0; k < n; ++k) {
    if (!gone(k) && pending[k] == 0) ready.push(k);
  }
  std::vector<std::int32_t> new_id(n, -1);
  std::vector<DiagramNode> sorted;
  while (!ready.empty()) {
    const std::size_t k = ready.top();
    ready.pop();
    new_id[k] = static_cast<std::int32_t>(sorted.size());
    sorted.push_back(nodes_[k]);
    for (std::size_t u : users[k]) {
      if (--pending[u] == 0) ready.push(u);
    }
  }
  std::size_t kept = 0;
  for (std::size_t k = 0; k < n; ++k) kept += gone(k) ? 0 : 1;
  if (sorted.size() != kept) throw MalformedDiagram("diagram contains a cycle");
  auto remap = [&](Port p) {
    if (p.is_input()) return p;
    if (new_id[p.node] < 0) throw MalformedDiagram("wire references a removed node");
    return Port{new_id[p.node], p.port};
  };
  for (DiagramNode& node : sorted) {
    for (Port& p : node.inputs) p = remap(p);
  }
  for (Port& p : outputs_) p = remap(p);
  nodes_ = std::move(sorted);
}

StringDiagram generator_diagram(DagPtr dag, const Generator& g) {
  check_vertex(*dag, g.var);
  check_vertex(*dag, g.other);
  switch (g.kind) {
    case GeneratorKind::mechanism: {
      StringDiagram d(dag, sorted_word(dag->parents(g.var)));
      std::vector<Port> in;
      for (std::size_t i = 0; i < d.dom().size(); ++i) in.push_back(Port::input(i));
      d.add_output(d.add_mechanism(g.var, std::move(in)));
      return d;
    }
    case GeneratorKind::duplicate: {
      StringDiagram d(dag, {g.var});
      const Port first = d.add_copy(Port::input(0), 2);
      d.add_output(first);
      d.add_output({first.node, 1});
      return d;
    }
    case GeneratorKind::discard: {
      StringDiagram d(dag, {g.var});
      d.add_discard(Port::input(0));
      return d;
    }
    case GeneratorKind::swap: {
      StringDiagram d(dag, {g.var, g.other});
      d.add_output(Port::input(1));
      d.add_output(Port::input(0));
      return d;
    }
    case GeneratorKind::identity:
      return identity_diagram(std::move(dag), {g.var});
  }
  throw MalformedDiagram("unknown generator kind");
}

StringDiagram identity_diagram(DagPtr dag, const Word& word) {
  for (Vertex v : word) check_vertex(*dag, v);
  StringDiagram d(std::move(dag), word);
  for (std::size_t i = 0; i < word.size(); ++i) d.add_output(Port::input(i));
  return d;
}

StringDiagram empty_diagram(DagPtr dag) { return StringDiagram(std::move(dag), {}); }

StringDiagram multiplier_diagram(DagPtr dag, const Word& from, const Word& to) {
  if (!is_singular(from)) throw NotSingular("multiplier source must be singular");
  for (Vertex v : from) check_vertex(*dag, v);
  StringDiagram d(std::move(dag), from);
  std::vector<std::vector<Port>> prongs(from.size());
  for (std::size_t i = 0; i < from.size(); ++i) {
    const auto copies = static_cast<std::size_t>(std::count(to.begin(), to.end(), from[i]));
    Port wire = Port::input(i);
    if (copies == 0) {
      d.add_discard(wire);
      continue;
    }
    // Right-leaning chain of binary duplicates.
    for (std::size_t c = 1; c < copies; ++c) {
      const Port left = d.add_copy(wire, 2);
      prongs[i].push_back(left);
      wire = {left.node, 1};
    }
    prongs[i].push_back(wire);
  }
  std::vector<std::size_t> used(from.size(), 0);
  for (Vertex letter : to) {
    auto it = std::find(from.begin(), from.end(), letter);
    if (it == from.end()) throw NotBuildable("multiplier target uses a letter absent from its source");
    const auto i = static_cast<std::size_t>(it - from.begin());
    d.add_output(prongs[i][used[i]++]);
  }
  return d;
}

StringDiagram compose(const StringDiagram& f, const StringDiagram& g) {
  if (f.dag_ptr() != g.dag_ptr() && !(f.dag() == g.dag())) throw BoundaryMismatch("diagrams live over different Dags");
  if (f.cod() != g.dom()) throw BoundaryMismatch("codomain of the first diagram differs from the domain of the second");
  StringDiagram out(f.dag_ptr(), f.dom());
  auto& nodes = DiagramAccess::nodes(out);
  nodes = f.nodes();
  const auto shift = static_cast<std::int32_t>(f.nodes().size());
  auto remap = [&](Port p) { return p.is_input() ? f.outputs()[p.port] : Port{p.node + shift, p.port}; };
  for (DiagramNode n : g.nodes()) {
    for (Port& p : n.inputs) p = remap(p);
    nodes.push_back(std::move(n));
  }
  for (Port p : g.outputs()) out.add_output(remap(p));
  return out;
}

StringDiagram tensor(const StringDiagram& f, const StringDiagram& g) {
  if (f.dag_ptr() != g.dag_ptr() && !(f.dag() == g.dag())) throw BoundaryMismatch("diagrams live over different Dags");
  StringDiagram out(f.dag_ptr(), concat(f.dom(), g.dom()));
  auto& nodes = DiagramAccess::nodes(out);
  nodes = f.nodes();
  const auto in_shift = static_cast<std::int32_t>(f.dom().size());
  const auto node_shift = static_cast<std::int32_t>(f.nodes().size());
  auto remap = [&](Port p) { return p.is_input() ? Port{Port::kBoundary, p.port + in_shift} : Port{p.node + node_shift, p.port}; };
  for (DiagramNode n : g.nodes()) {
    for (Port& p : n.inputs) p = remap(p);
    nodes.push_back(std::move(n));
  }
  for (Port p : f.outputs()) out.add_output(p);
  for (Port p : g.outputs()) out.add_output(remap(p));
  return out;
}

// ---------------------------------------------------------------------------
// Surgeries

namespace {

bool is_discard_consumer(const StringDiagram& d, Consumer c) { return !c.is_input() && d.nodes()[c.node].is_discard(); }

// Earliest discard on a wire labeled by each parent of `v`, all distinct.
std::optional<std::vector<std::int32_t>> parent_discards(const StringDiagram& d, Vertex v) {
  std::vector<std::int32_t> picked;
  for (Vertex p : d.dag().parents(v)) {
    bool found = false;
    for (std::size_t k = 0; k < d.nodes().size(); ++k) {
      const auto id = static_cast<std::int32_t>(k);
      if (d.nodes()[k].is_discard() && d.nodes()[k].var == p && std::find(picked.begin(), picked.end(), id) == picked.end()) {
        picked.push_back(id);
        found = true;
        break;
      }
    }
    if (!found) return std::nullopt;
  }
  return picked;
}

std::int32_t to_i32(std::size_t x) { return static_cast<std::int32_t>(x); }

void require(bool ok, const char* what) {
  if (!ok) throw PatternMismatch(what);
}

bool valid_node(const StringDiagram& d, std::int32_t k) { return k >= 0 && static_cast<std::size_t>(k) < d.nodes().size(); }

}  // namespace

std::vector<SurgerySite> surgery_sites(const StringDiagram& d) {
  const auto cons = d.consumers();
  std::vector<SurgerySite> sites;
  auto consumer_of = [&](Port p) { return cons[static_cast<std::size_t>(p.node + 1)][p.port]; };
  for (std::size_t k = 0; k < d.nodes().size(); ++k) {
    const DiagramNode& n = d.nodes()[k];
    const auto id = to_i32(k);
    if (n.is_duplicate()) {
      sites.push_back({SurgeryRule::cocommutativity, false, id, 0, {}, n.var, {}});
      for (std::int32_t p = 0; p < 2; ++p) {
        const Consumer c = consumer_of({id, p});
        if (!c.is_input() && d.nodes()[c.node].is_duplicate()) {
          sites.push_back({SurgeryRule::coassociativity, false, id, p, {}, n.var, {}});
        }
        if (is_discard_consumer(d, c)) sites.push_back({SurgeryRule::counitality, false, id, p, {}, n.var, {}});
      }
    }
    if (!n.is_discard()) {
      bool all = true;
      for (std::int32_t p = 0; p < n.outputs && all; ++p) all = is_discard_consumer(d, consumer_of({id, p}));
      if (all) sites.push_back({SurgeryRule::discard, false, id, 0, {}, n.var, {}});
    }
  }
  auto wires = [&](Port p) {
    for (std::int32_t side = 0; side < 2; ++side) sites.push_back({SurgeryRule::counitality, true, -1, side, p, d.label(p), {}});
  };
  for (std::size_t i = 0; i < d.dom().size(); ++i) wires(Port::input(i));
  for (std::size_t k = 0; k < d.nodes().size(); ++k) {
    for (std::int32_t p = 0; p < d.nodes()[k].outputs; ++p) wires(Port::output(k, static_cast<std::size_t>(p)));
  }
  for (Vertex v : d.dag().vertices()) {
    if (auto picked = parent_discards(d, v)) {
      sites.push_back({SurgeryRule::discard, true, -1, 0, {}, v, std::move(*picked)});
    }
  }
  return sites;
}

StringDiagram apply_surgery(const StringDiagram& d, const SurgerySite& site) {
  StringDiagram out = d;
  auto& nodes = DiagramAccess::nodes(out);
  const auto cons = d.consumers();
  auto consumer_of = [&](Port p) { return cons[static_cast<std::size_t>(p.node + 1)][p.port]; };
  std::vector<bool> removed(nodes.size(), false);

  switch (site.rule) {
    case SurgeryRule::cocommutativity: {
      require(valid_node(d, site.node) && d.nodes()[site.node].is_duplicate(), "cocommutativity needs a duplicate");
      const Consumer c0 = consumer_of({site.node, 0});
      const Consumer c1 = consumer_of({site.node, 1});
      DiagramAccess::rewire(out, c0, {site.node, 1});
      DiagramAccess::rewire(out, c1, {site.node, 0});
      return out;
    }
    case SurgeryRule::coassociativity: {
      require(valid_node(d, site.node) && d.nodes()[site.node].is_duplicate() && (site.port == 0 || site.port == 1),
              "coassociativity needs a duplicate");
      const std::int32_t a = site.node;
      const Consumer inner = consumer_of({a, site.port});
      require(!inner.is_input() && d.nodes()[inner.node].is_duplicate(), "coassociativity needs a duplicate on the prong");
      const std::int32_t b = inner.node;
      const Consumer cq = consumer_of({a, 1 - site.port});
      const Consumer cb0 = consumer_of({b, 0});
      const Consumer cb1 = consumer_of({b, 1});
      if (site.port == 0) {
        // (δ ⊗ 1) ∘ δ  ->  (1 ⊗ δ) ∘ δ, leaves (cb0, cb1, cq) kept in order.
        DiagramAccess::rewire(out, cb0, {a, 0});
        DiagramAccess::rewire(out, {b, 0}, {a, 1});
        DiagramAccess::rewire(out, cb1, {b, 0});
        DiagramAccess::rewire(out, cq, {b, 1});
      } else {
        // (1 ⊗ δ) ∘ δ  ->  (δ ⊗ 1) ∘ δ, leaves (cq, cb0, cb1) kept in order.
        DiagramAccess::rewire(out, {b, 0}, {a, 0});
        DiagramAccess::rewire(out, cq, {b, 0});
        DiagramAccess::rewire(out, cb0, {b, 1});
        DiagramAccess::rewire(out, cb1, {a, 1});
      }
      out.compact();
      return out;
    }
    case SurgeryRule::counitality: {
      if (!site.inverse) {
        require(valid_node(d, site.node) && d.nodes()[site.node].is_duplicate() && (site.port == 0 || site.port == 1),
                "counitality needs a duplicate");
        const Consumer e = consumer_of({site.node, site.port});
        require(is_discard_consumer(d, e), "counitality needs a discarded prong");
        const Consumer keep = consumer_of({site.node, 1 - site.port});
        DiagramAccess::rewire(out, keep, d.nodes()[site.node].inputs[0]);
        removed[site.node] = true;
        removed[e.node] = true;
        out.compact(removed);
        return out;
      }
      const Port s = site.source;
      require(s.is_input() ? s.port >= 0 && static_cast<std::size_t>(s.port) < d.dom().size()
                           : valid_node(d, s.node) && s.port >= 0 && s.port < d.nodes()[s.node].outputs,
              "counitality needs an existing wire");
      require(site.port == 0 || site.port == 1, "counitality prong must be 0 or 1");
      const Consumer old = consumer_of(s);
      const Port first = out.add_copy(s, 2);
      const Port kept{first.node, 1 - site.port};
      out.add_discard({first.node, site.port});
      DiagramAccess::rewire(out, old, kept);
      out.compact();
      return out;
    }
    case SurgeryRule::discard: {
      if (!site.inverse) {
        require(valid_node(d, site.node) && !d.nodes()[site.node].is_discard(), "discard surgery needs a node with outputs");
        const DiagramNode& n = d.nodes()[site.node];
        for (std::int32_t p = 0; p < n.outputs; ++p) {
          const Consumer c = consumer_of({site.node, p});
          require(is_discard_consumer(d, c), "discard surgery needs every output discarded");
          removed[c.node] = true;
        }
        removed[site.node] = true;
        for (Port in : n.inputs) out.add_discard(in);
        removed.resize(nodes.size(), false);
        out.compact(removed);
        return out;
      }
      check_vertex(d.dag(), site.var);
      const VertexSet pa = d.dag().parents(site.var);
      require(site.discards.size() == pa.size(), "inverse discard needs one discard per parent");
      std::vector<Port> inputs;
      std::size_t i = 0;
      for (Vertex p : pa) {
        const std::int32_t e = site.discards[i++];
        require(valid_node(d, e) && d.nodes()[e].is_discard() && d.nodes()[e].var == p && !removed[e],
                "inverse discard needs distinct discards on the parents");
        removed[e] = true;
        inputs.push_back(d.nodes()[e].inputs[0]);
      }
      const Port made = out.add_mechanism(site.var, std::move(inputs));
      out.add_discard(made);
      removed.resize(nodes.size(), false);
      out.compact(removed);
      return out;
    }
  }
  throw PatternMismatch("unknown surgery rule");
}

// ---------------------------------------------------------------------------
// Normal form

namespace {

// Phase 1: discard naturality and counitality until no node other than a
// discard on a wire that survives is quasi-terminal.
StringDiagram eliminate_garbage(StringDiagram d, std::size_t* steps) {
  std::size_t count = 0;
  for (;;) {
    const auto cons = d.consumers();
    auto consumer_of = [&](Port p) { return cons[static_cast<std::size_t>(p.node + 1)][p.port]; };
    std::optional<SurgerySite> site;
    for (std::size_t k = 0; k < d.nodes().size() && !site; ++k) {
      const DiagramNode& n = d.nodes()[k];
      if (n.is_discard()) continue;
      const auto id = to_i32(k);
      bool all = true;
      for (std::int32_t p = 0; p < n.outputs && all; ++p) all = is_discard_consumer(d, consumer_of({id, p}));
      if (all) {
        site = SurgerySite{SurgeryRule::discard, false, id, 0, {}, n.var, {}};
        break;
      }
      if (n.is_duplicate()) {
        for (std::int32_t p = 0; p < 2; ++p) {
          if (is_discard_consumer(d, consumer_of({id, p}))) {
            site = SurgerySite{SurgeryRule::counitality, false, id, p, {}, n.var, {}};
            break;
          }
        }
      }
    }
    if (!site) break;
    d = apply_surgery(d, *site);
    ++count;
  }
  if (steps) *steps = count;
  return d;
}

// Phases 2 and 3: every tree of copy nodes becomes one shared source, then the
// term graph is numbered canonically.
TermGraph collapse(const StringDiagram& d) {
  TermGraph g(d.dom());
  std::vector<TermRef> root(d.nodes().size());
  std::vector<TermRef> buf;
  auto resolve = [&](Port p) { return p.is_input() ? TermRef::input(static_cast<std::size_t>(p.port)) : root[p.node]; };
  for (std::size_t k = 0; k < d.nodes().size(); ++k) {
    const DiagramNode& n = d.nodes()[k];
    if (n.kind == NodeKind::copy) {
      root[k] = resolve(n.inputs[0]);
      continue;
    }
    buf.clear();
    for (Port p : n.inputs) buf.push_back(resolve(p));
    root[k] = g.add_mechanism(n.var, buf);
  }
  for (Port p : d.outputs()) g.add_output(resolve(p));
  return g;
}

}  // namespace

Morphism normalize(const StringDiagram& d) {
  d.validate();
  return Morphism::from_terms(d.dag_ptr(), collapse(eliminate_garbage(d, nullptr)));
}

std::size_t garbage_surgeries(const StringDiagram& d) {
  d.validate();
  std::size_t steps = 0;
  eliminate_garbage(d, &steps);
  return steps;
}

StringDiagram Morphism::diagram() const {
  StringDiagram d(dag_, dom());
  const TermGraph& g = terms_;
  const std::size_t n_in = g.dom().size();
  auto slot = [&](TermRef r) { return r.is_input() ? r.index() : n_in + r.index(); };
  std::vector<std::size_t> refs(n_in + g.node_count(), 0);
  for (std::size_t k = 0; k < g.node_count(); ++k) {
    for (TermRef r : g.args(k)) ++refs[slot(r)];
  }
  for (TermRef r : g.outputs()) ++refs[slot(r)];

  // Port handed to each consumer, in consumption order.
  std::vector<Port> base(refs.size());
  std::vector<std::size_t> taken(refs.size(), 0);
  auto expose = [&](std::size_t s, Port p) {
    if (refs[s] == 1) {
      base[s] = p;
    } else {
      base[s] = d.add_copy(p, refs[s]);
    }
  };
  auto take = [&](TermRef r) {
    const std::size_t s = slot(r);
    const Port b = base[s];
    if (refs[s] == 1) return b;
    return Port{b.node, static_cast<std::int32_t>(taken[s]++)};
  };
  for (std::size_t i = 0; i < n_in; ++i) expose(i, Port::input(i));
  for (std::size_t k = 0; k < g.node_count(); ++k) {
    std::vector<Port> in;
    for (TermRef r : g.args(k)) in.push_back(take(r));
    expose(n_in + k, d.add_mechanism(g.node_vertex(k), std::move(in)));
  }
  for (TermRef r : g.outputs()) d.add_output(take(r));
  return d;
}

// ---------------------------------------------------------------------------
// Path invariants

PathInvariantReport path_invariants(const StringDiagram& d) {
  const auto cons = d.consumers();
  const std::size_t n = d.nodes().size();
  auto consumer_of = [&](Port p) { return cons[static_cast<std::size_t>(p.node + 1)][p.port]; };

  PathInvariantReport report;
  std::vector<bool> quasi(n, false);
  for (std::size_t k = n; k-- > 0;) {
    const DiagramNode& node = d.nodes()[k];
    bool all = true;
    for (std::int32_t p = 0; p < node.outputs && all; ++p) {
      const Consumer c = consumer_of(Port::output(k, static_cast<std::size_t>(p)));
      all = !c.is_input() && quasi[c.node];
    }
    quasi[k] = all;
  }
  for (std::size_t k = 0; k < n; ++k) {
    if (quasi[k]) report.quasi_terminal.push_back(to_i32(k));
  }

  // Backward from each codomain wire to a domain input or an exogenous node.
  for (std::size_t j = 0; j < d.outputs().size(); ++j) {
    std::vector<std::int32_t> trail;
    std::function<void(Port)> back = [&](Port p) {
      if (p.is_input()) {
        DiagramPath path{p.port, {trail.rbegin(), trail.rend()}, to_i32(j)};
        report.to_codomain_paths.push_back(std::move(path));
        return;
      }
      trail.push_back(p.node);
      const DiagramNode& node = d.nodes()[p.node];
      if (node.inputs.empty()) {
        report.to_codomain_paths.push_back({-1, {trail.rbegin(), trail.rend()}, to_i32(j)});
      }
      for (Port in : node.inputs) back(in);
      trail.pop_back();
    };
    back(d.outputs()[j]);
  }

  // Forward from each prong of a copy node to every codomain wire it reaches.
  auto forward_paths = [&](Port start) {
    std::vector<DiagramPath> found;
    std::vector<std::int32_t> trail;
    std::function<void(Port)> walk = [&](Port p) {
      const Consumer c = consumer_of(p);
      if (c.is_input()) {
        found.push_back({-1, trail, c.port});
        return;
      }
      trail.push_back(c.node);
      for (std::int32_t q = 0; q < d.nodes()[c.node].outputs; ++q) walk({c.node, q});
      trail.pop_back();
    };
    walk(start);
    return found;
  };
  for (std::size_t k = 0; k < n; ++k) {
    const DiagramNode& node = d.nodes()[k];
    if (node.kind != NodeKind::copy || node.outputs < 2) continue;
    std::vector<std::vector<DiagramPath>> legs;
    for (std::int32_t p = 0; p < node.outputs; ++p) legs.push_back(forward_paths(Port::output(k, static_cast<std::size_t>(p))));
    for (std::size_t a = 0; a < legs.size(); ++a) {
      for (std::size_t b = a + 1; b < legs.size(); ++b) {
        for (const DiagramPath& l : legs[a]) {
          for (const DiagramPath& r : legs[b]) {
            if (l.output == r.output) continue;
            if (l.output < r.output) {
              report.splitter_paths.push_back({to_i32(k), l, r});
            } else {
              report.splitter_paths.push_back({to_i32(k), r, l});
            }
          }
        }
      }
    }
  }
  return report;
}

PathSignature path_signature(const StringDiagram& d) {
  const PathInvariantReport report = path_invariants(d);
  const Dag& dag = d.dag();
  PathSignature sig;
  std::vector<bool> quasi(d.nodes().size(), false);
  for (std::int32_t k : report.quasi_terminal) quasi[k] = true;
  for (std::size_t k = 0; k < d.nodes().size(); ++k) {
    if (!quasi[k] && d.nodes()[k].kind == NodeKind::mechanism) sig.mechanisms.insert(dag.name(d.nodes()[k].var));
  }
  auto mechanisms_on = [&](const std::vector<std::int32_t>& nodes) {
    std::string s;
    for (std::int32_t k : nodes) {
      if (d.nodes()[k].kind == NodeKind::mechanism) s += ">" + dag.name(d.nodes()[k].var);
    }
    return s;
  };
  sig.paths_per_output.resize(d.outputs().size());
  for (const DiagramPath& p : report.to_codomain_paths) {
    const std::string start = p.start_input >= 0 ? dag.name(d.dom()[p.start_input]) : std::string("()");
    sig.paths_per_output[p.output].insert(start + mechanisms_on(p.nodes));
  }
  for (const SplitterPath& s : report.splitter_paths) {
    sig.splitters[{s.left.output, s.right.output}].insert(dag.name(d.nodes()[s.split_node].var) + "|" +
                                                          mechanisms_on(s.left.nodes) + "|" + mechanisms_on(s.right.nodes));
  }
  return sig;
}

// ---------------------------------------------------------------------------
// Export

namespace {

std::string port_name(const StringDiagram& d, Port p) {
  if (p.is_input()) return "in" + std::to_string(p.port) + ":" + d.dag().name(d.dom()[p.port]);
  return "n" + std::to_string(p.node) + "." + std::to_string(p.port);
}

}  // namespace

std::string to_text(const StringDiagram& d) {
  std::ostringstream os;
  os << d.dag().format(d.dom()) << " -> " << d.dag().format(d.cod()) << "\n";
  for (std::size_t k = 0; k < d.nodes().size(); ++k) {
    const DiagramNode& n = d.nodes()[k];
    os << "  n" << k << " = " << node_label(d.dag(), n) << "(";
    for (std::size_t i = 0; i < n.inputs.size(); ++i) os << (i ? ", " : "") << port_name(d, n.inputs[i]);
    os << ")\n";
  }
  os << "  return (";
  for (std::size_t j = 0; j < d.outputs().size(); ++j) os << (j ? ", " : "") << port_name(d, d.outputs()[j]);
  os << ")\n";
  return os.str();
}

std::string to_dot(const StringDiagram& d, const std::string& title) {
  const Dag& dag = d.dag();
  std::ostringstream os;
  os << "digraph \"" << title << "\" {\n  rankdir=BT;\n  node [fontname=\"Helvetica\"];\n";
  os << "  { rank=min;";
  for (std::size_t i = 0; i < d.dom().size(); ++i) os << " in" << i << ";";
  os << " }\n  { rank=max;";
  for (std::size_t j = 0; j < d.outputs().size(); ++j) os << " out" << j << ";";
  os << " }\n";
  for (std::size_t i = 0; i < d.dom().size(); ++i) {
    os << "  in" << i << " [shape=plaintext, label=\"" << dag.name(d.dom()[i]) << "\"];\n";
  }
  for (std::size_t j = 0; j < d.outputs().size(); ++j) {
    os << "  out" << j << " [shape=plaintext, label=\"" << dag.name(d.label(d.outputs()[j])) << "\"];\n";
  }
  for (std::size_t k = 0; k < d.nodes().size(); ++k) {
    const DiagramNode& n = d.nodes()[k];
    const char* shape = n.kind == NodeKind::mechanism ? "box" : (n.outputs == 0 ? "circle" : "point");
    os << "  n" << k << " [shape=" << shape << ", label=\"" << node_label(dag, n) << "\"";
    if (n.kind == NodeKind::copy && n.outputs != 0) os << ", xlabel=\"" << node_label(dag, n) << "\"";
    os << "];\n";
  }
  auto src = [](Port p) { return p.is_input() ? "in" + std::to_string(p.port) : "n" + std::to_string(p.node); };
  for (std::size_t k = 0; k < d.nodes().size(); ++k) {
    for (Port p : d.nodes()[k].inputs) {
      os << "  " << src(p) << " -> n" << k << " [label=\"" << dag.name(d.label(p)) << "\"];\n";
    }
  }
  for (std::size_t j = 0; j < d.outputs().size(); ++j) {
    const Port p = d.outputs()[j];
    os << "  " << src(p) << " -> out" << j << " [label=\"" << dag.name(d.label(p)) << "\"];\n";
  }
  os << "}\n";
  return os.str();
}

std::string to_json(const StringDiagram& d) {
  using nlohmann::json;
  const Dag& dag = d.dag();
  auto port = [&](Port p) {
    return p.is_input() ? json{{"input", p.port}} : json{{"node", p.node}, {"port", p.port}};
  };
  json out;
  json dom = json::array();
  for (Vertex v : d.dom()) dom.push_back(dag.name(v));
  json cod = json::array();
  for (Vertex v : d.cod()) cod.push_back(dag.name(v));
  out["dom"] = dom;
  out["cod"] = cod;
  json nodes = json::array();
  for (const DiagramNode& n : d.nodes()) {
    json inputs = json::array();
    for (Port p : n.inputs) inputs.push_back(port(p));
    nodes.push_back({{"kind", n.kind == NodeKind::mechanism ? "mechanism" : (n.outputs == 0 ? "discard" : "copy")},
                     {"var", dag.name(n.var)},
                     {"outputs", n.outputs},
                     {"label", node_label(dag, n)},
                     {"inputs", inputs}});
  }
  out["nodes"] = nodes;
  json wires = json::array();
  for (std::size_t k = 0; k < d.nodes().size(); ++k) {
    for (std::size_t i = 0; i < d.nodes()[k].inputs.size(); ++i) {
      const Port p = d.nodes()[k].inputs[i];
      wires.push_back({{"from", port(p)}, {"to", {{"node", k}, {"port", i}}}, {"var", dag.name(d.label(p))}});
    }
  }
  for (std::size_t j = 0; j < d.outputs().size(); ++j) {
    const Port p = d.outputs()[j];
    wires.push_back({{"from", port(p)}, {"to", {{"output", j}}}, {"var", dag.name(d.label(p))}});
  }
  out["wires"] = wires;
  return out.dump(2);
}

// ---------------------------------------------------------------------------
// Fuzzing

StringDiagram random_diagram(DagPtr dag, std::mt19937_64& rng, std::size_t steps) {
  // Keeps evaluation of fuzzed diagrams cheap: at most 2^kWireCap rows.
  constexpr std::size_t kWireCap = 7;
  const std::size_t n = dag->size();
  auto pick = [&](std::size_t bound) { return std::uniform_int_distribution<std::size_t>(0, bound - 1)(rng); };
  Word dom;
  const std::size_t dom_len = pick(4);
  for (std::size_t i = 0; i < dom_len; ++i) dom.push_back(Vertex(pick(n)));
  StringDiagram d(dag, dom);
  std::vector<Port> live;
  for (std::size_t i = 0; i < dom.size(); ++i) live.push_back(Port::input(i));

  auto take = [&](std::size_t i) {
    const Port p = live[i];
    live.erase(live.begin() + static_cast<std::ptrdiff_t>(i));
    return p;
  };
  for (std::size_t s = 0; s < steps; ++s) {
    switch (pick(5)) {
      case 0:
      case 1: {
        // A mechanism whose parents are all live; duplicate them first so the
        // wires stay available.
        const Vertex v(pick(n));
        std::vector<Port> in;
        bool ok = true;
        for (Vertex p : dag->parents(v)) {
          auto it = std::find_if(live.begin(), live.end(), [&](Port q) { return d.label(q) == p; });
          if (it == live.end()) {
            ok = false;
            break;
          }
          const Port w = take(static_cast<std::size_t>(it - live.begin()));
          if (live.size() < kWireCap && pick(3) != 0) {
            const Port first = d.add_copy(w, 2);
            live.push_back({first.node, 1});
            in.push_back(first);
          } else {
            in.push_back(w);
          }
        }
        if (!ok) {
          // Put back whatever was taken; they are still unconsumed ports.
          live.insert(live.end(), in.begin(), in.end());
          break;
        }
        live.push_back(d.add_mechanism(v, std::move(in)));
        break;
      }
      case 2:
        if (!live.empty() && live.size() < kWireCap) {
          const Port first = d.add_copy(take(pick(live.size())), 2);
          live.push_back(first);
          live.push_back({first.node, 1});
        }
        break;
      case 3:
        if (!live.empty()) d.add_discard(take(pick(live.size())));
        break;
      default: {
        std::vector<Vertex> exo;
        for (Vertex v : dag->vertices()) {
          if (dag->parents(v).empty()) exo.push_back(v);
        }
        live.push_back(d.add_mechanism(exo[pick(exo.size())], {}));
        break;
      }
    }
  }
  std::shuffle(live.begin(), live.end(), rng);
  for (Port p : live) d.add_output(p);
  return d;
}

StringDiagram random_surgeries(const StringDiagram& d, std::mt19937_64& rng, std::size_t count) {
  StringDiagram cur = d;
  for (std::size_t i = 0; i < count; ++i) {
    auto sites = surgery_sites(cur);
    // Growth moves are kept rarer than the rest so diagrams stay small.
    std::vector<SurgerySite> shrink;
    std::vector<SurgerySite> grow;
    for (auto& s : sites) (s.inverse ? grow : shrink).push_back(std::move(s));
    const bool use_grow = shrink.empty() || std::bernoulli_distribution(0.35)(rng);
    auto& pool = use_grow ? grow : shrink;
    if (pool.empty()) break;
    cur = apply_surgery(cur, pool[std::uniform_int_distribution<std::size_t>(0, pool.size() - 1)(rng)]);
  }
  return cur;
}

}  // namespace causalcat
