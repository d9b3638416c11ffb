#include "causalcat/effects.hpp"

#include <algorithm>

namespace causalcat {

namespace {

void require_in_dag(const Dag& dag, VertexSet s) {
  if (!dag.vertices().contains(s)) throw UnknownVertex("vertex set outside the Dag");
}

void require_pairwise_disjoint(const Dag& dag, VertexSet u, VertexSet v, VertexSet w) {
  require_in_dag(dag, u | v | w);
  if (u.intersects(v) || u.intersects(w) || v.intersects(w)) throw NotDisjoint("u, v, w must be pairwise disjoint");
}

TermGraph effect_terms(const Dag& dag, VertexSet outcome, VertexSet treatment) {
  const EffectSubgraph sub = effect_subgraph(dag, treatment, outcome);
  TermGraph g(sorted_word(treatment));
  std::vector<TermRef> source(dag.size());
  for (Vertex t : treatment) source[t.index()] = TermRef::input(treatment.rank(t));
  std::vector<TermRef> args;
  for (Vertex i : dag.topological_order()) {
    if (!sub.vertices.contains(i) || treatment.contains(i)) continue;
    args.clear();
    for (Vertex p : dag.parents(i)) args.push_back(source[p.index()]);
    source[i.index()] = g.add_mechanism(i, args);
  }
  for (Vertex v : outcome) g.add_output(source[v.index()]);
  return g;
}

}  // namespace

Morphism causal_effect(DagPtr dag, VertexSet outcome, VertexSet treatment) {
  require_in_dag(*dag, outcome | treatment);
  TermGraph g = effect_terms(*dag, outcome, treatment);
  return Morphism::from_terms(std::move(dag), g);
}

Morphism causal_effect(DagPtr dag, const Word& outcome, const Word& treatment) {
  const VertexSet v = letters(outcome);
  const VertexSet t = letters(treatment);
  return causal_effect(std::move(dag), v, t);
}

StringDiagram effect_diagram(DagPtr dag, VertexSet outcome, VertexSet treatment, const std::vector<Vertex>& fuse_order) {
  require_in_dag(*dag, outcome | treatment);
  const EffectSubgraph sub = effect_subgraph(*dag, treatment, outcome);
  std::vector<Vertex> order = fuse_order;
  if (order.empty()) order = sorted_word(sub.vertices);
  VertexSet listed;
  for (Vertex i : order) listed.insert(i);
  if (listed != sub.vertices || order.size() != sub.vertices.size()) {
    throw NotBuildable("fuse order must list the vertices of the effect subgraph once each");
  }

  StringDiagram d(dag, sorted_word(treatment));
  // Unclaimed prongs of the multiplier of each component.
  std::vector<std::vector<Port>> prongs(dag->size());
  std::vector<bool> laid(dag->size(), false);

  auto lay_multiplier = [&](Vertex i, Port source) {
    const std::size_t copies = sub.child_count(i) + (outcome.contains(i) ? 1 : 0);
    if (copies == 0) {
      d.add_discard(source);
      return;
    }
    Port wire = source;
    std::vector<Port>& out = prongs[i.index()];
    for (std::size_t c = 1; c < copies; ++c) {
      const Port first = d.add_copy(wire, 2);
      out.push_back(first);
      wire = {first.node, 1};
    }
    out.push_back(wire);
    // Outcome prong is taken last; children take prongs from the front.
    std::reverse(out.begin(), out.end());
  };

  // Components are laid out in fuse order, deferring a mechanism until all
  // its parents have been laid out.
  std::vector<Vertex> pending = order;
  while (!pending.empty()) {
    bool progress = false;
    for (auto it = pending.begin(); it != pending.end();) {
      const Vertex i = *it;
      if (treatment.contains(i)) {
        lay_multiplier(i, Port::input(treatment.rank(i)));
      } else {
        const VertexSet pa = sub.parents_of(i);
        bool ready = true;
        for (Vertex p : pa) ready = ready && laid[p.index()];
        if (!ready) {
          ++it;
          continue;
        }
        std::vector<Port> in;
        for (Vertex p : pa) {
          in.push_back(prongs[p.index()].back());
          prongs[p.index()].pop_back();
        }
        lay_multiplier(i, d.add_mechanism(i, std::move(in)));
      }
      laid[i.index()] = true;
      it = pending.erase(it);
      progress = true;
    }
    if (!progress) throw CycleError("effect subgraph is cyclic");
  }
  for (Vertex v : outcome) {
    d.add_output(prongs[v.index()].back());
    prongs[v.index()].pop_back();
  }
  return d;
}

const Morphism& EffectCache::get(VertexSet outcome, VertexSet treatment) {
  const auto key = std::make_pair(outcome.bits(), treatment.bits());
  auto it = cache_.find(key);
  if (it != cache_.end()) return it->second;
  return cache_.emplace(key, causal_effect(dag_, outcome, treatment)).first->second;
}

namespace {

Word join(VertexSet a, VertexSet b) { return concat(sorted_word(a), sorted_word(b)); }

TermGraph decomposition_rhs(EffectCache& cache, VertexSet u, VertexSet v, VertexSet w) {
  const Word uw = sorted_word(u);
  const Word vw = sorted_word(v);
  const Word copy_u = concat(uw, uw);
  TermGraph g = TermGraph::multiplier(uw, copy_u);
  g = compose(g, tensor(cache.get(v, u).terms(), TermGraph::identity(uw)));
  g = compose(g, TermGraph::multiplier(join(v, u), concat(vw, sorted_word(v | u))));
  g = compose(g, tensor(TermGraph::identity(vw), cache.get(w, v | u).terms()));
  return compose(g, TermGraph::multiplier(join(v, w), sorted_word(v | w)));
}

TermGraph screening_rhs(EffectCache& cache, VertexSet u, VertexSet v, VertexSet w) {
  TermGraph g = TermGraph::multiplier(sorted_word(v | u), join(v, u));
  return compose(g, tensor(TermGraph::multiplier(sorted_word(v), {}), cache.get(w, u).terms()));
}

TermGraph independence_rhs(EffectCache& cache, VertexSet u, VertexSet v, VertexSet w) {
  const Word uw = sorted_word(u);
  const TermGraph& joint = cache.get(v | w, u).terms();
  const TermGraph left = discard_outputs(joint, sorted_word(w));
  const TermGraph right = discard_outputs(joint, sorted_word(v));
  TermGraph g = TermGraph::multiplier(uw, concat(uw, uw));
  g = compose(g, tensor(left, right));
  return compose(g, TermGraph::multiplier(join(v, w), sorted_word(v | w)));
}

bool same(const Morphism& lhs, const TermGraph& rhs) { return lhs.key() == rhs.canonical().key(); }

}  // namespace

bool decomposable_over(EffectCache& cache, VertexSet u, VertexSet v, VertexSet w) {
  require_pairwise_disjoint(*cache.dag_ptr(), u, v, w);
  return same(cache.get(v | w, u), decomposition_rhs(cache, u, v, w));
}

bool screened_off(EffectCache& cache, VertexSet u, VertexSet v, VertexSet w) {
  require_pairwise_disjoint(*cache.dag_ptr(), u, v, w);
  return same(cache.get(w, v | u), screening_rhs(cache, u, v, w));
}

bool cond_independent(EffectCache& cache, VertexSet u, VertexSet v, VertexSet w) {
  require_pairwise_disjoint(*cache.dag_ptr(), u, v, w);
  return same(cache.get(v | w, u), independence_rhs(cache, u, v, w));
}

bool decomposable_over(DagPtr dag, VertexSet u, VertexSet v, VertexSet w) {
  EffectCache cache(std::move(dag));
  return decomposable_over(cache, u, v, w);
}

bool screened_off(DagPtr dag, VertexSet u, VertexSet v, VertexSet w) {
  EffectCache cache(std::move(dag));
  return screened_off(cache, u, v, w);
}

bool cond_independent(DagPtr dag, VertexSet u, VertexSet v, VertexSet w) {
  EffectCache cache(std::move(dag));
  return cond_independent(cache, u, v, w);
}

EquationSides decomposition_sides(EffectCache& cache, VertexSet u, VertexSet v, VertexSet w) {
  require_pairwise_disjoint(*cache.dag_ptr(), u, v, w);
  return {cache.get(v | w, u), Morphism::from_terms(cache.dag_ptr(), decomposition_rhs(cache, u, v, w))};
}

EquationSides screening_sides(EffectCache& cache, VertexSet u, VertexSet v, VertexSet w) {
  require_pairwise_disjoint(*cache.dag_ptr(), u, v, w);
  return {cache.get(w, v | u), Morphism::from_terms(cache.dag_ptr(), screening_rhs(cache, u, v, w))};
}

EquationSides independence_sides(EffectCache& cache, VertexSet u, VertexSet v, VertexSet w) {
  require_pairwise_disjoint(*cache.dag_ptr(), u, v, w);
  return {cache.get(v | w, u), Morphism::from_terms(cache.dag_ptr(), independence_rhs(cache, u, v, w))};
}

bool connected_in_effect(DagPtr dag, Vertex v, Vertex w) {
  if (v.index() >= dag->size() || w.index() >= dag->size()) throw UnknownVertex("vertex outside the Dag");
  if (v == w) throw NotDisjoint("connected_in_effect needs two distinct vertices");
  return !causal_effect(std::move(dag), VertexSet::of(w), VertexSet::of(v)).connected_inputs().empty();
}

}  // namespace causalcat
