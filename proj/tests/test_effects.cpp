#include "causalcat/diagram.hpp"
#include "causalcat/effects.hpp"
#include "causalcat/enumerate.hpp"
#include "causalcat/errors.hpp"
#include "causalcat/treks.hpp"
#include "doctest.h"
#include "oracles.hpp"
#include "support.hpp"

using namespace causalcat;
using testing::S;
using testing::W;

TEST_SUITE("effects") {
  TEST_CASE("chain effect is two mechanisms in sequence") {
    const DagPtr c3 = testing::chain();
    const Morphism f = causal_effect(c3, S(*c3, "z"), S(*c3, "x"));
    CHECK(f == compose(mechanism(c3, c3->vertex("y")), mechanism(c3, c3->vertex("z"))));
    CHECK(f.serialize() == "x -> z : n0 = κ_y(in0); n1 = κ_z(n0); return (n1)");
    CHECK(f.connected_inputs() == S(*c3, "x"));
  }

  TEST_CASE("disconnected effects factor through the unit") {
    for (const DagPtr& g : {testing::fork(), testing::reversed_chain()}) {
      const Morphism f = causal_effect(g, S(*g, "z"), S(*g, "x"));
      const Morphism expected = tensor(multiplier(g, W(*g, "x"), {}), causal_effect(g, S(*g, "z"), {}));
      CHECK(f == expected);
      CHECK(f.connected_inputs().empty());
      const StringDiagram d = f.diagram();
      bool discard_on_x = false;
      for (const auto& n : d.nodes()) discard_on_x = discard_on_x || (n.is_discard() && n.inputs[0] == Port::input(0));
      CHECK(discard_on_x);
    }
    // In the fork [z] is κ_z after κ_y; in the reversed chain it is κ_z alone.
    const DagPtr fk = testing::fork();
    CHECK(causal_effect(fk, S(*fk, "z"), {}).terms().node_count() == 2);
    const DagPtr rc = testing::reversed_chain();
    CHECK(causal_effect(rc, S(*rc, "z"), {}) == mechanism(rc, rc->vertex("z")));
  }

  TEST_CASE("effect of the parents is the mechanism") {
    for (const Dag& dag : all_dags_up_to(4)) {
      const DagPtr p = testing::share(dag);
      for (Vertex v : dag.vertices()) {
        CHECK(causal_effect(p, VertexSet::of(v), dag.parents(v)) == mechanism(p, v));
      }
    }
  }

  TEST_CASE("overlapping outcome and treatment") {
    const DagPtr c3 = testing::chain();
    // A treated outcome is passed through unchanged.
    CHECK(causal_effect(c3, S(*c3, "x"), S(*c3, "x")) == identity(c3, W(*c3, "x")));
    const Morphism f = causal_effect(c3, S(*c3, "x,z"), S(*c3, "x"));
    CHECK(f.dom() == W(*c3, "x"));
    CHECK(f.cod() == W(*c3, "x,z"));
    CHECK_THROWS_AS(causal_effect(c3, W(*c3, "z,z"), W(*c3, "x")), NotSingular);
  }

  TEST_CASE("fused component diagram matches the normal form") {
    const DagPtr c3 = testing::chain();
    const StringDiagram d = effect_diagram(c3, S(*c3, "y,z"), S(*c3, "x"));
    CHECK(normalize(d) == causal_effect(c3, S(*c3, "y,z"), S(*c3, "x")));
    const StringDiagram r = effect_diagram(c3, S(*c3, "y,z"), S(*c3, "x"),
                                           {c3->vertex("z"), c3->vertex("y"), c3->vertex("x")});
    CHECK(normalize(r) == normalize(d));
  }

  TEST_CASE("marginals") {
    const DagPtr c3 = testing::chain();
    const Morphism f = causal_effect(c3, S(*c3, "y,z"), S(*c3, "x"));
    CHECK(marginal(f, {}) == f);
    CHECK(marginal(f, W(*c3, "y")) == causal_effect(c3, S(*c3, "z"), S(*c3, "x")));
    CHECK_THROWS_AS(marginal(f, W(*c3, "x")), NotSubWord);

    // Third example graph z -> y -> x: discarding y from [xy||z] leaves [x||z].
    const DagPtr rc = testing::reversed_chain();
    const Morphism g = causal_effect(rc, S(*rc, "x,y"), S(*rc, "z"));
    CHECK(marginal(g, W(*rc, "y")) == causal_effect(rc, S(*rc, "x"), S(*rc, "z")));
    CHECK(marginal(g, W(*rc, "x")) == mechanism(rc, rc->vertex("y")));
  }

  TEST_CASE("decomposability") {
    const DagPtr c3 = testing::chain();
    CHECK(decomposable_over(c3, {}, S(*c3, "x"), S(*c3, "z")));
    const DagPtr g = testing::edge();
    CHECK_FALSE(decomposable_over(g, {}, S(*g, "y"), S(*g, "x")));
    CHECK(decomposable_over(g, {}, S(*g, "x"), S(*g, "y")));
    const DagPtr fk = testing::fork();
    CHECK(decomposable_over(fk, S(*fk, "y"), S(*fk, "x"), S(*fk, "z")));
    CHECK_FALSE(decomposable_over(fk, {}, S(*fk, "x"), S(*fk, "z")));
    CHECK_THROWS_AS(decomposable_over(c3, S(*c3, "x"), S(*c3, "x"), S(*c3, "z")), NotDisjoint);
  }

  TEST_CASE("screening off") {
    const DagPtr c3 = testing::chain();
    CHECK(screened_off(c3, S(*c3, "y"), S(*c3, "x"), S(*c3, "z")));
    CHECK_FALSE(screened_off(c3, {}, S(*c3, "x"), S(*c3, "z")));
    const DagPtr rc = testing::reversed_chain();
    CHECK(screened_off(rc, {}, S(*rc, "x"), S(*rc, "z")));
  }

  TEST_CASE("conditional independence") {
    const DagPtr col = testing::collider();
    CHECK(cond_independent(col, {}, S(*col, "x"), S(*col, "y")));
    const DagPtr c3 = testing::chain();
    CHECK(cond_independent(c3, S(*c3, "y"), S(*c3, "x"), S(*c3, "z")));
    CHECK_FALSE(cond_independent(c3, {}, S(*c3, "x"), S(*c3, "z")));
  }

  TEST_CASE("equation sides share their boundary") {
    const DagPtr c3 = testing::chain();
    EffectCache cache(c3);
    for (auto sides : {decomposition_sides(cache, {}, S(*c3, "x"), S(*c3, "z")),
                       screening_sides(cache, {}, S(*c3, "x"), S(*c3, "z")),
                       independence_sides(cache, {}, S(*c3, "x"), S(*c3, "z"))}) {
      CHECK(sides.lhs.dom() == sides.rhs.dom());
      CHECK(sides.lhs.cod() == sides.rhs.cod());
    }
    CHECK(cache.size() > 0);
  }

  TEST_CASE("connectivity follows ancestry") {
    const DagPtr c3 = testing::chain();
    CHECK(connected_in_effect(c3, c3->vertex("x"), c3->vertex("z")));
    CHECK_FALSE(connected_in_effect(c3, c3->vertex("z"), c3->vertex("x")));
    const DagPtr col = testing::collider();
    CHECK_FALSE(connected_in_effect(col, col->vertex("x"), col->vertex("y")));
    CHECK_FALSE(connected_in_effect(col, col->vertex("y"), col->vertex("x")));
    CHECK_THROWS_AS(connected_in_effect(c3, c3->vertex("x"), c3->vertex("x")), NotDisjoint);

    for (const Dag& dag : all_dags_up_to(4)) {
      const DagPtr p = testing::share(dag);
      const auto adj = oracle::adjacency(dag);
      for (Vertex a : dag.vertices()) {
        for (Vertex b : dag.vertices()) {
          if (a == b) continue;
          REQUIRE(connected_in_effect(p, a, b) == oracle::reaches(adj, static_cast<int>(a.index()), static_cast<int>(b.index())));
        }
      }
    }
  }

  TEST_CASE("theorems on every DAG up to 4 vertices against the trek oracle") {
    for (const Dag& dag : all_dags_up_to(4)) {
      EffectCache cache(testing::share(dag));
      for (const Triple& q : all_triples(dag.vertices())) {
        const bool f = oracle::forward_t_separated(dag, q.v, q.w, q.u);
        const bool b = oracle::backward_t_separated(dag, q.v, q.w, q.u);
        REQUIRE(decomposable_over(cache, q.u, q.v, q.w) == b);
        REQUIRE(screened_off(cache, q.u, q.v, q.w) == f);
        REQUIRE(cond_independent(cache, q.u, q.v, q.w) == (f && b));
      }
    }
  }
}
