#include <algorithm>

#include "causalcat/dag.hpp"
#include "causalcat/enumerate.hpp"
#include "causalcat/errors.hpp"
#include "causalcat/treks.hpp"
#include "doctest.h"
#include "oracles.hpp"
#include "support.hpp"

using namespace causalcat;
using testing::S;

TEST_SUITE("dag") {
  TEST_CASE("construction") {
    const DagPtr c3 = testing::chain();
    CHECK(c3->size() == 3);
    CHECK(c3->edges().size() == 2);
    CHECK(c3->parents(c3->vertex("z")) == S(*c3, "y"));
    CHECK(c3->children(c3->vertex("x")) == S(*c3, "y"));

    CHECK_THROWS_AS(build_dag({"x", "y"}, {{"x", "y"}, {"y", "x"}}), CycleError);
    CHECK_THROWS_AS(build_dag({"x", "y"}, {{"x", "y"}, {"x", "y"}}), DuplicateEdge);
    CHECK_THROWS_AS(build_dag({"x", "x"}, {}), DuplicateVertex);
    CHECK_THROWS_AS(build_dag({"x"}, {{"x", "q"}}), UnknownVertex);
    CHECK_THROWS_AS(build_dag({"x"}, {{"x", "x"}}), CycleError);

    const Dag one = build_dag({"x"}, {});
    CHECK(one.size() == 1);
    CHECK(one.edges().empty());
  }

  TEST_CASE("too many vertices") {
    CHECK_NOTHROW(build_dag(64, {}));
    CHECK_THROWS_AS(build_dag(65, {}), TooManyVertices);
  }

  TEST_CASE("ancestors") {
    const DagPtr c3 = testing::chain();
    CHECK(ancestors(*c3, c3->vertex("z")) == S(*c3, "x,y,z"));
    CHECK(ancestors(*c3, c3->vertex("x")) == S(*c3, "x"));
    const DagPtr col = testing::collider();
    CHECK(ancestors(*col, col->vertex("z")) == S(*col, "x,y,z"));
    CHECK(descendants(*c3, c3->vertex("y")) == S(*c3, "y,z"));
    CHECK(non_descendants(*c3, c3->vertex("y")) == S(*c3, "x"));
  }

  TEST_CASE("mutilate") {
    const DagPtr c3 = testing::chain();
    const Dag a = mutilate(*c3, S(*c3, "y"), {});
    REQUIRE(a.edges().size() == 1);
    CHECK(a.has_edge(a.vertex("y"), a.vertex("z")));
    const Dag b = mutilate(*c3, {}, S(*c3, "y"));
    REQUIRE(b.edges().size() == 1);
    CHECK(b.has_edge(b.vertex("x"), b.vertex("y")));
    CHECK(mutilate(*c3, {}, {}) == *c3);
  }

  TEST_CASE("effect subgraph of the three example graphs") {
    const DagPtr c3 = testing::chain();
    const auto g1 = effect_subgraph(*c3, S(*c3, "x"), S(*c3, "z"));
    CHECK(g1.vertices == S(*c3, "x,y,z"));
    CHECK(g1.edges().size() == 2);

    const DagPtr fk = testing::fork();
    const auto g2 = effect_subgraph(*fk, S(*fk, "x"), S(*fk, "z"));
    CHECK(g2.vertices == S(*fk, "x,y,z"));
    REQUIRE(g2.edges().size() == 1);
    CHECK(g2.edges()[0] == Dag::Edge{fk->vertex("y"), fk->vertex("z")});

    const DagPtr rc = testing::reversed_chain();
    const auto g3 = effect_subgraph(*rc, S(*rc, "x"), S(*rc, "z"));
    CHECK(g3.vertices == S(*rc, "x,z"));
    CHECK(g3.edges().empty());
  }

  TEST_CASE("vertex set formatting") {
    const DagPtr c3 = testing::chain();
    CHECK(c3->format(S(*c3, "x,z")) == "{x,z}");
    CHECK(c3->format(VertexSet{}) == "{}");
  }
}

TEST_SUITE("treks") {
  TEST_CASE("proper treks on the small graphs") {
    const DagPtr c3 = testing::chain();
    const auto fwd = proper_treks(*c3, S(*c3, "x"), S(*c3, "z"), TrekKind::forward);
    REQUIRE(fwd.size() == 1);
    CHECK(fwd[0].format(*c3) == "x->y->z");
    CHECK(proper_treks(*c3, S(*c3, "x"), S(*c3, "z"), TrekKind::backward).empty());

    const DagPtr fk = testing::fork();
    const auto bwd = proper_treks(*fk, S(*fk, "x"), S(*fk, "z"), TrekKind::backward);
    REQUIRE(bwd.size() == 1);
    CHECK(bwd[0].format(*fk) == "x<-y->z");
    CHECK(bwd[0].top == fk->vertex("y"));

    CHECK_THROWS_AS(proper_treks(*c3, S(*c3, "x,y"), S(*c3, "y"), TrekKind::forward), OverlapError);
  }

  TEST_CASE("separation examples") {
    const DagPtr c3 = testing::chain();
    const DagPtr fk = testing::fork();
    const DagPtr col = testing::collider();
    const VertexSet x = S(*c3, "x"), y = S(*c3, "y"), z = S(*c3, "z"), none;

    CHECK(forward_t_separated(*c3, x, z, y));
    CHECK_FALSE(forward_t_separated(*c3, x, z, none));
    CHECK(forward_t_separated(*c3, z, x, none));

    CHECK(backward_t_separated(*c3, x, z, none));
    CHECK_FALSE(backward_t_separated(*fk, x, z, none));
    CHECK(backward_t_separated(*fk, x, z, y));

    CHECK(t_separated(*c3, x, z, y));
    CHECK_FALSE(t_separated(*c3, x, z, none));
    CHECK(t_separated(*col, x, y, none));

    CHECK_FALSE(d_separated(*col, x, y, z));
    CHECK(d_separated(*col, x, y, none));
    CHECK(d_separated(*c3, x, z, y));
  }

  TEST_CASE("witness treks") {
    const DagPtr c3 = testing::chain();
    const auto w = unblocked_trek(*c3, S(*c3, "x"), S(*c3, "z"), {}, TrekKind::forward);
    REQUIRE(w.has_value());
    CHECK(w->format(*c3) == "x->y->z");
    CHECK_FALSE(unblocked_trek(*c3, S(*c3, "x"), S(*c3, "z"), S(*c3, "y"), TrekKind::forward).has_value());
  }

  TEST_CASE("backward separation is not symmetric") {
    // x -> y: from y there is a backward trek y <- x to x; from x there is none.
    const DagPtr g = testing::edge();
    CHECK(backward_t_separated(*g, S(*g, "x"), S(*g, "y"), {}));
    CHECK_FALSE(backward_t_separated(*g, S(*g, "y"), S(*g, "x"), {}));
  }

  TEST_CASE("trek sets match path enumeration on every DAG up to 4 vertices") {
    std::size_t compared = 0;
    for (const Dag& dag : all_dags_up_to(4)) {
      for (const Triple& q : all_triples(dag.vertices())) {
        for (TrekKind kind : {TrekKind::forward, TrekKind::backward}) {
          std::set<oracle::TrekRecord> ours;
          for (const Trek& t : proper_treks(dag, q.v, q.w, kind)) {
            std::vector<int> seq;
            for (Vertex a : t.vertices) seq.push_back(static_cast<int>(a.index()));
            ours.insert({kind == TrekKind::forward, seq});
          }
          REQUIRE(ours == oracle::treks(dag, q.v, q.w, kind == TrekKind::forward));
          ++compared;
        }
      }
    }
    CHECK(compared > 0);
  }

  TEST_CASE("separation predicates match brute force on every DAG up to 4 vertices") {
    for (const Dag& dag : all_dags_up_to(4)) {
      for (const Triple& q : all_triples(dag.vertices())) {
        // (v, w) separated given u.
        const bool f = oracle::forward_t_separated(dag, q.v, q.w, q.u);
        const bool b = oracle::backward_t_separated(dag, q.v, q.w, q.u);
        REQUIRE(forward_t_separated(dag, q.v, q.w, q.u) == f);
        REQUIRE(backward_t_separated(dag, q.v, q.w, q.u) == b);
        REQUIRE(t_separated(dag, q.v, q.w, q.u) == (f && b));
        REQUIRE(d_separated(dag, q.v, q.w, q.u) == oracle::d_separated(dag, q.v, q.w, q.u));
      }
    }
  }
}

TEST_SUITE("enumerate") {
  TEST_CASE("labeled DAG counts") {
    const std::uint64_t expected[] = {1, 1, 3, 25, 543, 29281};
    for (int n = 1; n <= 5; ++n) {
      CHECK(oracle::dag_count(n) == expected[n]);
      CHECK(all_dags(static_cast<std::size_t>(n)).size() == expected[n]);
    }
    CHECK(oracle::dag_count(6) == 3781503);
  }

  TEST_CASE("edge sets match filtered digraphs up to 4 vertices") {
    for (int n = 1; n <= 4; ++n) {
      std::set<std::vector<std::pair<int, int>>> ours;
      for (const Dag& d : all_dags(static_cast<std::size_t>(n))) {
        std::vector<std::pair<int, int>> edges;
        for (const auto& [a, b] : d.edges()) edges.emplace_back(static_cast<int>(a.index()), static_cast<int>(b.index()));
        std::sort(edges.begin(), edges.end());
        ours.insert(edges);
      }
      CHECK(ours == oracle::all_dag_edge_sets(n));
    }
  }

  TEST_CASE("all_dags is deterministic") {
    CHECK(all_dags(4) == all_dags(4));
    CHECK(all_dags_up_to(3).size() == 1 + 3 + 25);
  }

  TEST_CASE("triples") {
    // Assign each of n vertices to u, v, w or rest, with v and w nonempty:
    // 4^n - 2*3^n + 2^n.
    for (std::size_t n = 1; n <= 5; ++n) {
      std::size_t p4 = 1, p3 = 1, p2 = 1;
      for (std::size_t i = 0; i < n; ++i) p4 *= 4, p3 *= 3, p2 *= 2;
      const auto ts = all_triples(VertexSet::first_n(n));
      CHECK(ts.size() == p4 - 2 * p3 + p2);
      for (const Triple& t : ts) {
        CHECK_FALSE(t.v.empty());
        CHECK_FALSE(t.w.empty());
        CHECK_FALSE(t.u.intersects(t.v | t.w));
        CHECK_FALSE(t.v.intersects(t.w));
      }
    }
  }

  TEST_CASE("random_dag is acyclic and seeded") {
    std::mt19937_64 a(3), b(3);
    for (int i = 0; i < 50; ++i) {
      const Dag x = random_dag(6, a);
      CHECK(x == random_dag(6, b));
      CHECK(oracle::acyclic(oracle::adjacency(x)));
    }
  }
}
