#include <cmath>
#include <stdexcept>

#include "causalcat/docalc.hpp"
#include "causalcat/enumerate.hpp"
#include "causalcat/errors.hpp"
#include "causalcat/semantics.hpp"
#include "causalcat/treks.hpp"
#include "doctest.h"
#include "oracles.hpp"
#include "support.hpp"

using namespace causalcat;
using testing::S;

namespace {

// Max gap between the sides of a rule's conclusion, from the test oracle.
double oracle_rule_gap(const CbnModel& m, const RuleQuery& q) {
  // P(Y | do X, Z), P(Y | do X), P(Y | do X, do Z) keyed by (x state, z state).
  const auto observe_z = oracle::conditional_under(m, q.y, q.x, q.z);
  const auto ignore_z = oracle::conditional_under(m, q.y, q.x, {});
  const auto do_z = oracle::conditional_under(m, q.y, q.x | q.z, {});
  const auto xs = oracle::members(q.x);
  const auto zs = oracle::members(q.z);
  const auto xz = oracle::members(q.x | q.z);
  double gap = 0.0;
  for (const auto& a : oracle::assignments(m.card())) {
    const std::size_t xi = oracle::index_of(m.card(), xs, a);
    const std::size_t zi = oracle::index_of(m.card(), zs, a);
    const auto obs = observe_z.find({xi, zi});
    if (obs == observe_z.end()) continue;
    const auto& lhs_do = do_z.at({oracle::index_of(m.card(), xz, a), 0});
    const auto& plain = ignore_z.at({xi, 0});
    for (std::size_t k = 0; k < plain.size(); ++k) {
      switch (q.rule) {
        case 1: gap = std::max(gap, std::abs(obs->second[k] - plain[k])); break;
        case 2: gap = std::max(gap, std::abs(lhs_do[k] - obs->second[k])); break;
        default: gap = std::max(gap, std::abs(lhs_do[k] - plain[k])); break;
      }
    }
  }
  return gap;
}

}  // namespace

TEST_SUITE("docalc") {
  TEST_CASE("rule examples") {
    const DagPtr g = testing::edge();
    CHECK(rule_applicable(*g, {2, {}, S(*g, "y"), S(*g, "x")}));
    CHECK(pearl_rule_applicable_w_empty(*g, {2, {}, S(*g, "y"), S(*g, "x")}));

    // Reversed chain z -> y -> x: no directed path from x to z, one from z to x.
    const DagPtr rc = testing::reversed_chain();
    CHECK(rule_applicable(*rc, {3, {}, S(*rc, "z"), S(*rc, "x")}));
    CHECK(rule_applicable(*rc, {3, {}, S(*rc, "x"), S(*rc, "z")}) == false);

    // Collider x -> z <- y.
    const DagPtr col = testing::collider();
    CHECK(pearl_rule_applicable_w_empty(*col, {3, {}, S(*col, "x"), S(*col, "y")}));
    CHECK(rule_applicable(*col, {3, {}, S(*col, "x"), S(*col, "y")}));

    CHECK_THROWS_AS(rule_applicable(*g, {4, {}, S(*g, "y"), S(*g, "x")}), std::invalid_argument);
    CHECK_THROWS_AS(rule_applicable(*g, {1, S(*g, "x"), S(*g, "y"), S(*g, "x")}), OverlapError);
  }

  TEST_CASE("rule 1 is the conjunction of rules 2 and 3") {
    for (const Dag& dag : all_dags_up_to(4)) {
      for (const Triple& q : all_triples(dag.vertices())) {
        const bool r1 = rule_applicable(dag, {1, q.u, q.v, q.w});
        const bool r2 = rule_applicable(dag, {2, q.u, q.v, q.w});
        const bool r3 = rule_applicable(dag, {3, q.u, q.v, q.w});
        REQUIRE(r1 == (r2 && r3));
      }
    }
  }

  TEST_CASE("both predicates agree on the chain and match the trek oracle") {
    const DagPtr c3 = testing::chain();
    for (const Triple& q : all_triples(c3->vertices())) {
      for (int rule = 1; rule <= 3; ++rule) {
        const RuleQuery rq{rule, q.u, q.v, q.w};
        CHECK(rule_applicable(*c3, rq) == pearl_rule_applicable_w_empty(*c3, rq));
      }
      // Rule 2 reads "Z backward-t-separated from Y by X"; rule 3 the forward form.
      CHECK(rule_applicable(*c3, {2, q.u, q.v, q.w}) == oracle::backward_t_separated(*c3, q.w, q.v, q.u));
      CHECK(rule_applicable(*c3, {3, q.u, q.v, q.w}) == oracle::forward_t_separated(*c3, q.w, q.v, q.u));
    }
  }

  TEST_CASE("rule semantics: x -> y") {
    const DagPtr g = testing::edge();
    for (std::uint64_t s = 0; s < 10; ++s) {
      const CbnModel m = random_positive_model(g, 3, s);
      const RuleQuery q{2, {}, S(*g, "y"), S(*g, "x")};
      CHECK(verify_rule_semantics(m, q) <= 1e-12);
      CHECK(std::abs(verify_rule_semantics(m, q) - oracle_rule_gap(m, q)) <= 1e-12);
    }
  }

  TEST_CASE("rule semantics agree with the oracle, applicable or not") {
    std::uint64_t seed = 1;
    bool saw_violation = false;
    for (const Dag& dag : all_dags_up_to(4)) {
      const CbnModel m = random_positive_model(testing::share(dag), 2, seed++);
      for (const Triple& q : all_triples(dag.vertices())) {
        for (int rule = 1; rule <= 3; ++rule) {
          const RuleQuery rq{rule, q.u, q.v, q.w};
          const double gap = verify_rule_semantics(m, rq);
          REQUIRE(std::abs(gap - oracle_rule_gap(m, rq)) <= 1e-12);
          if (rule_applicable(dag, rq)) REQUIRE(gap <= 1e-9);
          saw_violation = saw_violation || gap > 1e-6;
        }
      }
    }
    CHECK(saw_violation);
  }

  TEST_CASE("local Markov condition") {
    const DagPtr c3 = testing::chain();
    const CbnModel m = random_positive_model(c3, 2, 3);
    // nd(x) = pa(x) = {}: identical conditionals.
    CHECK(local_markov_gap(m, c3->vertex("x")) == 0.0);
    for (Vertex v : c3->vertices()) CHECK(local_markov_gap(m, v) <= 1e-12);

    for (const Dag& dag : all_dags_up_to(4)) {
      const DagPtr p = testing::share(dag);
      const CbnModel mm = random_positive_model(p, 2, dag.edges().size() + 17);
      for (Vertex v : dag.vertices()) {
        REQUIRE(local_markov_gap(mm, v) <= 1e-9);
        // Every nonempty treatment avoiding v, at the all-ones state.
        const std::uint64_t others = (dag.vertices() - VertexSet::of(v)).bits();
        for (std::uint64_t sub = others; sub != 0; sub = (sub - 1) & others) {
          const Word t = sorted_word(VertexSet(sub));
          REQUIRE(local_markov_gap(mm, v, t, std::vector<int>(t.size(), 1)) <= 1e-9);
        }
      }
    }
  }

  TEST_CASE("zero conditioning events") {
    const DagPtr g = testing::edge();
    StochMatrix kx(2, 1);
    kx << 1.0, 0.0;
    StochMatrix ky(2, 2);
    ky << 0.5, 0.5, 0.5, 0.5;
    const CbnModel m(g, {2, 2}, {kx, ky});
    CHECK_THROWS_AS(local_markov_gap(m, g->vertex("y")), ZeroConditional);
  }
}
