#include "causalcat/dag.hpp"

#include <algorithm>
#include <cctype>
#include <ostream>
#include <sstream>

namespace causalcat {

bool is_singular(const Word& word) {
  VertexSet seen;
  for (Vertex v : word) {
    if (seen.contains(v)) return false;
    seen.insert(v);
  }
  return true;
}

VertexSet letters(const Word& word) {
  VertexSet seen;
  for (Vertex v : word) {
    if (seen.contains(v)) throw NotSingular("word repeats a letter");
    seen.insert(v);
  }
  return seen;
}

Word sorted_word(VertexSet set) {
  Word out;
  out.reserve(set.size());
  for (Vertex v : set) out.push_back(v);
  return out;
}

Word concat(const Word& a, const Word& b) {
  Word out = a;
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

std::optional<Vertex> Dag::find(std::string_view name) const {
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i] == name) return Vertex(i);
  }
  return std::nullopt;
}

Vertex Dag::vertex(std::string_view name) const {
  if (auto v = find(name)) return *v;
  throw UnknownVertex("unknown vertex '" + std::string(name) + "'");
}

VertexSet Dag::set_of(const std::vector<std::string>& names) const {
  VertexSet out;
  for (const auto& n : names) out.insert(vertex(n));
  return out;
}

Word Dag::word_of(const std::vector<std::string>& names) const {
  Word out;
  for (const auto& n : names) out.push_back(vertex(n));
  return out;
}

std::string Dag::format(VertexSet set) const { return format(sorted_word(set)); }

std::string Dag::format(const Word& word) const {
  std::string out = "{";
  for (std::size_t i = 0; i < word.size(); ++i) {
    if (i) out += ",";
    out += name(word[i]);
  }
  return out + "}";
}

namespace {

void check_name(const std::string& name) {
  if (name.empty()) throw InvalidVertexName("vertex ids must be nonempty");
  for (char c : name) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      throw InvalidVertexName("vertex id '" + name + "' contains whitespace");
    }
  }
}

}  // namespace

Dag build_dag(std::size_t n, const std::vector<Dag::Edge>& edges, std::vector<std::string> names) {
  if (n > Dag::kMaxVertices) {
    throw TooManyVertices("at most " + std::to_string(Dag::kMaxVertices) + " vertices are supported");
  }
  if (names.empty()) {
    for (std::size_t i = 0; i < n; ++i) names.push_back("v" + std::to_string(i));
  }
  if (names.size() != n) throw InvalidVertexName("name count does not match vertex count");

  Dag dag;
  dag.names_ = std::move(names);
  for (std::size_t i = 0; i < n; ++i) {
    check_name(dag.names_[i]);
    for (std::size_t j = 0; j < i; ++j) {
      if (dag.names_[i] == dag.names_[j]) throw DuplicateVertex("duplicate vertex '" + dag.names_[i] + "'");
    }
  }
  dag.parents_.assign(n, VertexSet{});
  dag.children_.assign(n, VertexSet{});
  for (auto [from, to] : edges) {
    if (from.index() >= n || to.index() >= n) throw UnknownVertex("edge endpoint out of range");
    if (from == to) throw CycleError("self-loop on '" + dag.names_[from.index()] + "'");
    if (dag.children_[from.index()].contains(to)) {
      throw DuplicateEdge("duplicate edge " + dag.names_[from.index()] + "->" + dag.names_[to.index()]);
    }
    dag.children_[from.index()].insert(to);
    dag.parents_[to.index()].insert(from);
  }

  // Kahn's algorithm, always taking the smallest ready vertex.
  VertexSet placed;
  while (dag.topo_.size() < n) {
    VertexSet ready;
    for (std::size_t i = 0; i < n; ++i) {
      Vertex v(i);
      if (!placed.contains(v) && placed.contains(dag.parents_[i])) ready.insert(v);
    }
    if (ready.empty()) throw CycleError("edges admit a directed cycle");
    Vertex next = ready.front();
    placed.insert(next);
    dag.topo_.push_back(next);
  }

  for (std::size_t i = 0; i < n; ++i) {
    for (Vertex c : dag.children_[i]) dag.edges_.emplace_back(Vertex(i), c);
  }
  return dag;
}

Dag build_dag(std::vector<std::string> vertices,
              const std::vector<std::pair<std::string, std::string>>& edges) {
  if (vertices.size() > Dag::kMaxVertices) {
    throw TooManyVertices("at most " + std::to_string(Dag::kMaxVertices) + " vertices are supported");
  }
  auto index_of = [&](const std::string& name) {
    auto it = std::find(vertices.begin(), vertices.end(), name);
    if (it == vertices.end()) throw UnknownVertex("edge mentions unknown vertex '" + name + "'");
    return Vertex(static_cast<std::size_t>(it - vertices.begin()));
  };
  std::vector<Dag::Edge> indexed;
  indexed.reserve(edges.size());
  for (const auto& [from, to] : edges) indexed.emplace_back(index_of(from), index_of(to));
  const std::size_t n = vertices.size();
  return build_dag(n, indexed, std::move(vertices));
}

VertexSet ancestors(const Dag& dag, VertexSet xs) {
  VertexSet out = xs;
  VertexSet frontier = xs;
  while (!frontier.empty()) {
    VertexSet next;
    for (Vertex v : frontier) next |= dag.parents(v);
    frontier = next - out;
    out |= next;
  }
  return out;
}

VertexSet ancestors(const Dag& dag, Vertex x) {
  if (x.index() >= dag.size()) throw UnknownVertex("vertex out of range");
  return ancestors(dag, VertexSet::of(x));
}

VertexSet descendants(const Dag& dag, Vertex x) {
  if (x.index() >= dag.size()) throw UnknownVertex("vertex out of range");
  VertexSet out = VertexSet::of(x);
  VertexSet frontier = out;
  while (!frontier.empty()) {
    VertexSet next;
    for (Vertex v : frontier) next |= dag.children(v);
    frontier = next - out;
    out |= next;
  }
  return out;
}

VertexSet non_descendants(const Dag& dag, Vertex x) { return dag.vertices() - descendants(dag, x); }

Dag mutilate(const Dag& dag, VertexSet cut_into, VertexSet cut_out_of) {
  if (!dag.vertices().contains(cut_into | cut_out_of)) throw UnknownVertex("cut set outside the vertex set");
  std::vector<Dag::Edge> kept;
  for (auto [from, to] : dag.edges()) {
    if (cut_into.contains(to) || cut_out_of.contains(from)) continue;
    kept.emplace_back(from, to);
  }
  return build_dag(dag.size(), kept, dag.names());
}

std::size_t EffectSubgraph::child_count(Vertex v) const {
  std::size_t count = 0;
  for (Vertex c : vertices) count += parents[c.index()].contains(v) ? 1 : 0;
  return count;
}

std::vector<Dag::Edge> EffectSubgraph::edges() const {
  std::vector<Dag::Edge> out;
  for (Vertex from : vertices) {
    for (Vertex to : vertices) {
      if (parents[to.index()].contains(from)) out.emplace_back(from, to);
    }
  }
  return out;
}

EffectSubgraph effect_subgraph(const Dag& dag, VertexSet treatment, VertexSet outcome) {
  if (!dag.vertices().contains(treatment | outcome)) throw UnknownVertex("word outside the vertex set");
  // Vertices outside t that reach v along a path that never enters t.
  VertexSet reach = outcome - treatment;
  VertexSet frontier = reach;
  while (!frontier.empty()) {
    VertexSet next;
    for (Vertex x : frontier) next |= dag.parents(x);
    next -= treatment;
    frontier = next - reach;
    reach |= next;
  }

  EffectSubgraph sub;
  sub.treatment = treatment;
  sub.outcome = outcome;
  sub.vertices = reach | treatment | outcome;
  sub.parents.assign(dag.size(), VertexSet{});
  for (Vertex x : reach) sub.parents[x.index()] = dag.parents(x);
  return sub;
}

EffectSubgraph effect_subgraph(const Dag& dag, const Word& treatment, const Word& outcome) {
  return effect_subgraph(dag, letters(treatment), letters(outcome));
}

std::ostream& operator<<(std::ostream& os, const Dag& dag) {
  os << "Dag(" << dag.format(dag.vertices()) << "; ";
  bool first = true;
  for (auto [from, to] : dag.edges()) {
    if (!first) os << ", ";
    first = false;
    os << dag.name(from) << "->" << dag.name(to);
  }
  return os << ")";
}

}  // namespace causalcat
