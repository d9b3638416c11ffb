#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "causalcat/dag.hpp"
#include "causalcat/diagram.hpp"
#include "causalcat/morphism.hpp"

namespace causalcat {

// The causal effect [v‖t] : t -> v, assembled over G_{t->v}. Domain and
// codomain are the sorted words over t and v. Throws NotSingular.
Morphism causal_effect(DagPtr dag, const Word& outcome, const Word& treatment);
Morphism causal_effect(DagPtr dag, VertexSet outcome, VertexSet treatment);

// Explicit string diagram of [v‖t] fused from the components Γ_i: for each
// vertex i of G_{t->v}, κ_i unless i is treated, followed by a duplicate
// chain with one prong per child (plus one if i is an outcome), or a discard.
// `fuse_order` fixes the order in which components are laid out and in which
// children take the prongs of their parents; it must list the vertices of
// G_{t->v} (any order). Empty means Dag order.
StringDiagram effect_diagram(DagPtr dag, VertexSet outcome, VertexSet treatment,
                             const std::vector<Vertex>& fuse_order = {});

// Memoizes causal effects of one Dag by (outcome, treatment). Not thread-safe;
// give each worker its own cache.
class EffectCache {
 public:
  explicit EffectCache(DagPtr dag) : dag_(std::move(dag)) {}

  const DagPtr& dag_ptr() const { return dag_; }
  const Morphism& get(VertexSet outcome, VertexSet treatment);
  std::size_t size() const { return cache_.size(); }

 private:
  struct KeyHash {
    std::size_t operator()(const std::pair<std::uint64_t, std::uint64_t>& k) const {
      return std::hash<std::uint64_t>()(k.first * 0x9E3779B97F4A7C15ULL ^ k.second);
    }
  };
  DagPtr dag_;
  std::unordered_map<std::pair<std::uint64_t, std::uint64_t>, Morphism, KeyHash> cache_;
};

// [vw‖u] = ι ∘ (1_v ⊗ [w‖vu]) ∘ ι ∘ ([v‖u] ⊗ 1_u) ∘ δ_u, i.e. [vw‖u] factors
// through [v‖u] followed by the candidate conditional [w‖vu].
bool decomposable_over(EffectCache& cache, VertexSet u, VertexSet v, VertexSet w);
// [w‖vu] = (ε_v ⊗ [w‖u]) ∘ ι.
bool screened_off(EffectCache& cache, VertexSet u, VertexSet v, VertexSet w);
// [vw‖u] = ι ∘ ([vw‖u]_v ⊗ [vw‖u]_w) ∘ δ_u, with the factors its marginals.
bool cond_independent(EffectCache& cache, VertexSet u, VertexSet v, VertexSet w);

// Single-shot forms. u, v, w must be pairwise disjoint (NotDisjoint).
bool decomposable_over(DagPtr dag, VertexSet u, VertexSet v, VertexSet w);
bool screened_off(DagPtr dag, VertexSet u, VertexSet v, VertexSet w);
bool cond_independent(DagPtr dag, VertexSet u, VertexSet v, VertexSet w);

// The two sides of each equation, for reporting and semantic checks.
struct EquationSides {
  Morphism lhs;
  Morphism rhs;
};
EquationSides decomposition_sides(EffectCache& cache, VertexSet u, VertexSet v, VertexSet w);
EquationSides screening_sides(EffectCache& cache, VertexSet u, VertexSet v, VertexSet w);
EquationSides independence_sides(EffectCache& cache, VertexSet u, VertexSet v, VertexSet w);

// Whether the input of [w‖v] is wired to its output in the normal form.
// Throws UnknownVertex; requires v != w (NotDisjoint).
bool connected_in_effect(DagPtr dag, Vertex v, Vertex w);

}  // namespace causalcat
