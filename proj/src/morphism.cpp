#include "causalcat/morphism.hpp"

#include <algorithm>
#include <sstream>

#include "causalcat/diagram.hpp"

namespace causalcat {

Word TermGraph::cod() const {
  Word out;
  out.reserve(outputs_.size());
  for (TermRef r : outputs_) out.push_back(label(r));
  return out;
}

TermRef TermGraph::add_mechanism(Vertex v, std::span<const TermRef> args) {
  node_vertex_.push_back(v);
  args_.insert(args_.end(), args.begin(), args.end());
  arg_begin_.push_back(static_cast<std::uint32_t>(args_.size()));
  return TermRef::node(node_vertex_.size() - 1);
}

TermGraph TermGraph::identity(const Word& word) {
  TermGraph g(word);
  for (std::size_t i = 0; i < word.size(); ++i) g.add_output(TermRef::input(i));
  return g;
}

TermGraph TermGraph::multiplier(const Word& from, const Word& to) {
  if (!is_singular(from)) throw NotSingular("multiplier source must be singular");
  TermGraph g(from);
  for (Vertex letter : to) {
    auto it = std::find(from.begin(), from.end(), letter);
    if (it == from.end()) throw NotBuildable("multiplier target uses a letter absent from its source");
    g.add_output(TermRef::input(static_cast<std::size_t>(it - from.begin())));
  }
  return g;
}

TermGraph TermGraph::canonical() const {
  constexpr std::int32_t kUnseen = -1;
  constexpr std::int32_t kOpen = -2;
  std::vector<std::int32_t> new_id(node_count(), kUnseen);
  std::vector<std::uint32_t> order;
  order.reserve(node_count());
  std::vector<std::pair<std::uint32_t, std::uint32_t>> stack;

  auto visit = [&](TermRef root) {
    if (root.is_input() || new_id[root.index()] != kUnseen) return;
    stack.emplace_back(static_cast<std::uint32_t>(root.index()), 0U);
    new_id[root.index()] = kOpen;
    while (!stack.empty()) {
      auto& [k, next] = stack.back();
      auto a = args(k);
      if (next < a.size()) {
        TermRef child = a[next++];
        if (!child.is_input() && new_id[child.index()] == kUnseen) {
          new_id[child.index()] = kOpen;
          stack.emplace_back(static_cast<std::uint32_t>(child.index()), 0U);
        }
        continue;
      }
      new_id[k] = static_cast<std::int32_t>(order.size());
      order.push_back(k);
      stack.pop_back();
    }
  };
  for (TermRef r : outputs_) visit(r);

  auto remap = [&](TermRef r) { return r.is_input() ? r : TermRef::node(static_cast<std::size_t>(new_id[r.index()])); };
  TermGraph out(dom_);
  out.node_vertex_.reserve(order.size());
  out.arg_begin_.reserve(order.size() + 1);
  out.args_.reserve(args_.size());
  for (std::uint32_t k : order) {
    out.node_vertex_.push_back(node_vertex_[k]);
    for (TermRef r : args(k)) out.args_.push_back(remap(r));
    out.arg_begin_.push_back(static_cast<std::uint32_t>(out.args_.size()));
  }
  out.outputs_.reserve(outputs_.size());
  for (TermRef r : outputs_) out.outputs_.push_back(remap(r));
  return out;
}

std::vector<std::int32_t> TermGraph::key() const {
  std::vector<std::int32_t> k;
  k.reserve(4 + dom_.size() + 2 * node_count() + args_.size() + 2 * outputs_.size());
  k.push_back(static_cast<std::int32_t>(dom_.size()));
  for (Vertex v : dom_) k.push_back(v.id);
  k.push_back(static_cast<std::int32_t>(node_count()));
  for (std::size_t n = 0; n < node_count(); ++n) {
    auto a = args(n);
    k.push_back(node_vertex_[n].id);
    k.push_back(static_cast<std::int32_t>(a.size()));
    for (TermRef r : a) k.push_back(r.raw());
  }
  k.push_back(static_cast<std::int32_t>(outputs_.size()));
  for (TermRef r : outputs_) k.push_back(r.raw());
  return k;
}

TermGraph compose(const TermGraph& f, const TermGraph& g) {
  if (f.outputs().size() != g.dom().size()) throw BoundaryMismatch("codomain and domain lengths differ");
  for (std::size_t i = 0; i < g.dom().size(); ++i) {
    if (f.label(f.outputs()[i]) != g.dom()[i]) throw BoundaryMismatch("codomain and domain words differ");
  }
  TermGraph out(f.dom());
  for (std::size_t k = 0; k < f.node_count(); ++k) out.add_mechanism(f.node_vertex(k), f.args(k));
  const std::size_t shift = f.node_count();
  auto remap = [&](TermRef r) { return r.is_input() ? f.outputs()[r.index()] : TermRef::node(r.index() + shift); };
  std::vector<TermRef> buf;
  for (std::size_t k = 0; k < g.node_count(); ++k) {
    buf.clear();
    for (TermRef r : g.args(k)) buf.push_back(remap(r));
    out.add_mechanism(g.node_vertex(k), buf);
  }
  for (TermRef r : g.outputs()) out.add_output(remap(r));
  return out;
}

TermGraph tensor(const TermGraph& f, const TermGraph& g) {
  TermGraph out(concat(f.dom(), g.dom()));
  for (std::size_t k = 0; k < f.node_count(); ++k) out.add_mechanism(f.node_vertex(k), f.args(k));
  const std::size_t in_shift = f.dom().size();
  const std::size_t node_shift = f.node_count();
  auto remap = [&](TermRef r) {
    return r.is_input() ? TermRef::input(r.index() + in_shift) : TermRef::node(r.index() + node_shift);
  };
  std::vector<TermRef> buf;
  for (std::size_t k = 0; k < g.node_count(); ++k) {
    buf.clear();
    for (TermRef r : g.args(k)) buf.push_back(remap(r));
    out.add_mechanism(g.node_vertex(k), buf);
  }
  for (TermRef r : f.outputs()) out.add_output(r);
  for (TermRef r : g.outputs()) out.add_output(remap(r));
  return out;
}

TermGraph discard_outputs(const TermGraph& f, const Word& drop) {
  std::vector<bool> dropped(f.outputs().size(), false);
  for (Vertex letter : drop) {
    bool found = false;
    for (std::size_t i = 0; i < f.outputs().size(); ++i) {
      if (!dropped[i] && f.label(f.outputs()[i]) == letter) {
        dropped[i] = true;
        found = true;
        break;
      }
    }
    if (!found) throw NotSubWord("discarded letter is not in the codomain");
  }
  TermGraph out(f.dom());
  for (std::size_t k = 0; k < f.node_count(); ++k) out.add_mechanism(f.node_vertex(k), f.args(k));
  for (std::size_t i = 0; i < f.outputs().size(); ++i) {
    if (!dropped[i]) out.add_output(f.outputs()[i]);
  }
  return out;
}

Morphism Morphism::from_terms(DagPtr dag, const TermGraph& g) {
  const std::size_t n = dag->size();
  for (Vertex v : g.dom()) {
    if (v.index() >= n) throw UnknownVertex("domain letter outside the Dag");
  }
  for (std::size_t k = 0; k < g.node_count(); ++k) {
    const Vertex v = g.node_vertex(k);
    if (v.index() >= n) throw UnknownVertex("mechanism outside the Dag");
    auto a = g.args(k);
    const VertexSet pa = dag->parents(v);
    if (a.size() != pa.size()) throw MalformedDiagram("mechanism arity does not match its parents");
    std::size_t i = 0;
    for (Vertex p : pa) {
      const TermRef r = a[i++];
      if (!r.is_input() && r.index() >= k) throw MalformedDiagram("term graph is not topologically ordered");
      if (r.is_input() && r.index() >= g.dom().size()) throw MalformedDiagram("argument references a missing input");
      if (g.label(r) != p) throw MalformedDiagram("mechanism argument label does not match its parent");
    }
  }
  for (TermRef r : g.outputs()) {
    if (r.is_input() ? r.index() >= g.dom().size() : r.index() >= g.node_count()) {
      throw MalformedDiagram("output references a missing source");
    }
  }
  Morphism m;
  m.dag_ = std::move(dag);
  m.terms_ = g.canonical();
  m.cod_ = m.terms_.cod();
  m.key_ = m.terms_.key();
  return m;
}

std::string Morphism::serialize() const {
  const Dag& d = *dag_;
  auto word = [&](const Word& w) {
    if (w.empty()) return std::string("∅");
    std::string s;
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (i) s += ",";
      s += d.name(w[i]);
    }
    return s;
  };
  auto ref = [](TermRef r) { return (r.is_input() ? "in" : "n") + std::to_string(r.index()); };
  std::ostringstream os;
  os << word(dom()) << " -> " << word(cod_) << " :";
  for (std::size_t k = 0; k < terms_.node_count(); ++k) {
    os << " n" << k << " = κ_" << d.name(terms_.node_vertex(k)) << "(";
    auto a = terms_.args(k);
    for (std::size_t i = 0; i < a.size(); ++i) os << (i ? "," : "") << ref(a[i]);
    os << ");";
  }
  os << " return (";
  for (std::size_t i = 0; i < terms_.outputs().size(); ++i) os << (i ? "," : "") << ref(terms_.outputs()[i]);
  os << ")";
  return os.str();
}

VertexSet Morphism::connected_inputs() const {
  std::vector<bool> used(dom().size(), false);
  auto mark = [&](TermRef r) {
    if (r.is_input()) used[r.index()] = true;
  };
  for (std::size_t k = 0; k < terms_.node_count(); ++k) {
    for (TermRef r : terms_.args(k)) mark(r);
  }
  for (TermRef r : terms_.outputs()) mark(r);
  VertexSet out;
  for (std::size_t i = 0; i < used.size(); ++i) {
    if (used[i]) out.insert(dom()[i]);
  }
  return out;
}

bool equal(const Morphism& f, const Morphism& g) {
  if (f.dag_ptr() != g.dag_ptr() && !(f.dag() == g.dag())) return false;
  return f.key() == g.key();
}

bool operator==(const Morphism& f, const Morphism& g) { return equal(f, g); }

namespace {

void require_same_dag(const Morphism& f, const Morphism& g) {
  if (f.dag_ptr() != g.dag_ptr() && !(f.dag() == g.dag())) {
    throw BoundaryMismatch("morphisms live over different Dags");
  }
}

}  // namespace

Morphism compose(const Morphism& f, const Morphism& g) {
  require_same_dag(f, g);
  return Morphism::from_terms(f.dag_ptr(), compose(f.terms(), g.terms()));
}

Morphism tensor(const Morphism& f, const Morphism& g) {
  require_same_dag(f, g);
  return Morphism::from_terms(f.dag_ptr(), tensor(f.terms(), g.terms()));
}

Morphism identity(DagPtr dag, const Word& word) { return Morphism::from_terms(std::move(dag), TermGraph::identity(word)); }

Morphism mechanism(DagPtr dag, Vertex v) {
  if (v.index() >= dag->size()) throw UnknownVertex("mechanism outside the Dag");
  TermGraph g(sorted_word(dag->parents(v)));
  std::vector<TermRef> args;
  for (std::size_t i = 0; i < g.dom().size(); ++i) args.push_back(TermRef::input(i));
  g.add_output(g.add_mechanism(v, args));
  return Morphism::from_terms(std::move(dag), g);
}

Morphism multiplier(DagPtr dag, const Word& from, const Word& to) {
  return Morphism::from_terms(std::move(dag), TermGraph::multiplier(from, to));
}

Morphism marginal(const Morphism& f, const Word& drop) {
  return Morphism::from_terms(f.dag_ptr(), discard_outputs(f.terms(), drop));
}

}  // namespace causalcat
