#include <algorithm>
#include <random>

#include "causalcat/diagram.hpp"
#include "causalcat/effects.hpp"
#include "causalcat/enumerate.hpp"
#include "causalcat/errors.hpp"
#include "causalcat/morphism.hpp"
#include "causalcat/semantics.hpp"
#include "doctest.h"
#include "json.hpp"
#include "support.hpp"

using namespace causalcat;
using testing::S;
using testing::W;

namespace {

std::vector<SurgerySite> sites_of(const StringDiagram& d, SurgeryRule rule, bool inverse) {
  std::vector<SurgerySite> out;
  for (const auto& s : surgery_sites(d)) {
    if (s.rule == rule && s.inverse == inverse) out.push_back(s);
  }
  return out;
}

// δ_x with one prong discarded; `left` picks which.
StringDiagram copy_then_discard(const DagPtr& dag, bool left) {
  StringDiagram d(dag, W(*dag, "x"));
  const Port p = d.add_copy(Port::input(0), 2);
  const Port q{p.node, 1};
  d.add_discard(left ? p : q);
  d.add_output(left ? q : p);
  return d;
}

// (δ_x ⊗ 1_x) ∘ δ_x when `left`, else (1_x ⊗ δ_x) ∘ δ_x.
StringDiagram triple_copy(const DagPtr& dag, bool left) {
  StringDiagram d(dag, W(*dag, "x"));
  const Port a = d.add_copy(Port::input(0), 2);
  const Port a1{a.node, 1};
  if (left) {
    const Port b = d.add_copy(a, 2);
    d.add_output(b);
    d.add_output({b.node, 1});
    d.add_output(a1);
  } else {
    const Port b = d.add_copy(a1, 2);
    d.add_output(a);
    d.add_output(b);
    d.add_output({b.node, 1});
  }
  return d;
}

}  // namespace

TEST_SUITE("diagram") {
  TEST_CASE("generators") {
    const DagPtr c3 = testing::chain();
    const StringDiagram dup = generator_diagram(c3, Generator::duplicate(c3->vertex("x")));
    CHECK(dup.nodes().size() == 1);
    CHECK(dup.dom() == W(*c3, "x"));
    CHECK(dup.cod() == W(*c3, "x,x"));

    const StringDiagram kz = generator_diagram(c3, Generator::mechanism(c3->vertex("z")));
    CHECK(kz.dom() == W(*c3, "y"));
    CHECK(kz.cod() == W(*c3, "z"));

    const StringDiagram kx = generator_diagram(c3, Generator::mechanism(c3->vertex("x")));
    CHECK(kx.dom().empty());
    CHECK(kx.cod() == W(*c3, "x"));

    const StringDiagram sw = generator_diagram(c3, Generator::swap(c3->vertex("x"), c3->vertex("z")));
    CHECK(sw.nodes().empty());
    CHECK(sw.dom() == W(*c3, "x,z"));
    CHECK(sw.cod() == W(*c3, "z,x"));

    const StringDiagram eps = generator_diagram(c3, Generator::discard(c3->vertex("y")));
    CHECK(eps.cod().empty());
    REQUIRE(eps.nodes().size() == 1);
    CHECK(eps.nodes()[0].is_discard());
  }

  TEST_CASE("composition") {
    const DagPtr c3 = testing::chain();
    const StringDiagram ky = generator_diagram(c3, Generator::mechanism(c3->vertex("y")));
    const StringDiagram kz = generator_diagram(c3, Generator::mechanism(c3->vertex("z")));
    const StringDiagram both = compose(ky, kz);
    CHECK(both.dom() == W(*c3, "x"));
    CHECK(both.cod() == W(*c3, "z"));
    CHECK(both.count(NodeKind::mechanism) == 2);
    CHECK(normalize(both) == causal_effect(c3, S(*c3, "z"), S(*c3, "x")));

    CHECK(normalize(compose(both, identity_diagram(c3, both.cod()))) == normalize(both));
    CHECK(normalize(compose(identity_diagram(c3, both.dom()), both)) == normalize(both));

    const StringDiagram xy = identity_diagram(c3, W(*c3, "x,y"));
    const StringDiagram yx = identity_diagram(c3, W(*c3, "y,x"));
    CHECK_THROWS_AS(compose(xy, yx), BoundaryMismatch);
  }

  TEST_CASE("monoidal product") {
    const DagPtr c3 = testing::chain();
    const StringDiagram ky = generator_diagram(c3, Generator::mechanism(c3->vertex("y")));
    CHECK(tensor(ky, empty_diagram(c3)) == ky);
    CHECK(tensor(empty_diagram(c3), ky) == ky);

    const StringDiagram ex = generator_diagram(c3, Generator::discard(c3->vertex("x")));
    const StringDiagram ey = generator_diagram(c3, Generator::discard(c3->vertex("y")));
    const StringDiagram both = tensor(ex, ey);
    CHECK(both.dom() == W(*c3, "x,y"));
    CHECK(both.cod().empty());
    CHECK(normalize(both) == multiplier(c3, W(*c3, "x,y"), {}));

    const StringDiagram ix = identity_diagram(c3, W(*c3, "x"));
    const StringDiagram iy = identity_diagram(c3, W(*c3, "y"));
    CHECK(tensor(ix, iy) == identity_diagram(c3, W(*c3, "x,y")));
  }

  TEST_CASE("counitality") {
    const DagPtr c3 = testing::chain();
    for (bool left : {true, false}) {
      const StringDiagram d = copy_then_discard(c3, left);
      const auto sites = sites_of(d, SurgeryRule::counitality, false);
      REQUIRE(sites.size() == 1);
      const StringDiagram r = apply_surgery(d, sites[0]);
      CHECK(r == identity_diagram(c3, W(*c3, "x")));
      CHECK(normalize(d) == identity(c3, W(*c3, "x")));
    }

    // Inverse: an identity wire grows a duplicate with a discarded prong.
    const StringDiagram id = identity_diagram(c3, W(*c3, "x"));
    const auto inv = sites_of(id, SurgeryRule::counitality, true);
    REQUIRE_FALSE(inv.empty());
    const StringDiagram grown = apply_surgery(id, inv[0]);
    CHECK(grown.count(NodeKind::copy) == 2);
    CHECK(normalize(grown) == normalize(id));
  }

  TEST_CASE("discard naturality") {
    const DagPtr c3 = testing::chain();
    StringDiagram d(c3, W(*c3, "x"));
    d.add_discard(d.add_mechanism(c3->vertex("y"), {Port::input(0)}));
    const auto sites = sites_of(d, SurgeryRule::discard, false);
    REQUIRE(sites.size() == 1);
    const StringDiagram r = apply_surgery(d, sites[0]);
    REQUIRE(r.nodes().size() == 1);
    CHECK(r.nodes()[0].is_discard());
    CHECK(r.nodes()[0].inputs[0] == Port::input(0));
    CHECK(normalize(d) == multiplier(c3, W(*c3, "x"), {}));

    // Inverse: ε_x becomes κ_y followed by ε_y.
    const auto inv = sites_of(r, SurgeryRule::discard, true);
    REQUIRE_FALSE(inv.empty());
    const auto it = std::find_if(inv.begin(), inv.end(), [&](const SurgerySite& s) { return s.var == c3->vertex("y"); });
    REQUIRE(it != inv.end());
    CHECK(apply_surgery(r, *it).count(NodeKind::mechanism) == 1);
  }

  TEST_CASE("cocommutativity") {
    const DagPtr c3 = testing::chain();
    const StringDiagram d = generator_diagram(c3, Generator::duplicate(c3->vertex("x")));
    const auto sites = sites_of(d, SurgeryRule::cocommutativity, false);
    REQUIRE(sites.size() == 1);
    const StringDiagram r = apply_surgery(d, sites[0]);
    CHECK(r.outputs()[0] == d.outputs()[1]);
    CHECK(r.outputs()[1] == d.outputs()[0]);
    CHECK(normalize(r) == normalize(d));
  }

  TEST_CASE("coassociativity") {
    const DagPtr c3 = testing::chain();
    const StringDiagram left = triple_copy(c3, true);
    const StringDiagram right = triple_copy(c3, false);
    CHECK(normalize(left) == normalize(right));
    CHECK(normalize(left) == multiplier(c3, W(*c3, "x"), W(*c3, "x,x,x")));

    const auto sites = sites_of(left, SurgeryRule::coassociativity, false);
    REQUIRE(sites.size() == 1);
    const StringDiagram moved = apply_surgery(left, sites[0]);
    CHECK(normalize(moved) == normalize(left));
    // Re-association keeps the codomain order and is self-inverse.
    CHECK(moved.cod() == left.cod());
    const auto back = sites_of(moved, SurgeryRule::coassociativity, false);
    REQUIRE(back.size() == 1);
    const CbnModel m = random_positive_model(c3, 3, 11);
    CHECK(max_abs_diff(eval_finstoch(m, apply_surgery(moved, back[0])), eval_finstoch(m, left)) == 0.0);
  }

  TEST_CASE("surgery at a non-matching site") {
    const DagPtr c3 = testing::chain();
    const StringDiagram d = generator_diagram(c3, Generator::duplicate(c3->vertex("x")));
    SurgerySite bogus;
    bogus.rule = SurgeryRule::counitality;
    bogus.node = 0;
    bogus.port = 0;
    CHECK_THROWS_AS(apply_surgery(d, bogus), PatternMismatch);
    bogus.rule = SurgeryRule::discard;
    CHECK_THROWS_AS(apply_surgery(d, bogus), PatternMismatch);
  }

  TEST_CASE("multiplier") {
    const DagPtr c3 = testing::chain();
    const Word x = W(*c3, "x");
    CHECK(normalize(multiplier_diagram(c3, x, W(*c3, "x,x"))) ==
          normalize(generator_diagram(c3, Generator::duplicate(c3->vertex("x")))));
    CHECK(normalize(multiplier_diagram(c3, x, {})) == normalize(generator_diagram(c3, Generator::discard(c3->vertex("x")))));

    const StringDiagram m = multiplier_diagram(c3, W(*c3, "x,y,z"), W(*c3, "x,x,y"));
    CHECK(m.count(NodeKind::mechanism) == 0);
    std::size_t dups = 0, discards = 0;
    for (const auto& n : m.nodes()) {
      dups += n.is_duplicate();
      discards += n.is_discard();
    }
    CHECK(dups == 1);
    CHECK(discards == 1);
    CHECK(normalize(m) == multiplier(c3, W(*c3, "x,y,z"), W(*c3, "x,x,y")));

    CHECK_THROWS_AS(multiplier(c3, W(*c3, "x"), W(*c3, "y")), NotBuildable);
    CHECK_THROWS_AS(multiplier(c3, W(*c3, "x,x"), W(*c3, "x")), NotSingular);
  }

  TEST_CASE("normal form is idempotent and ignores layout") {
    const DagPtr c3 = testing::chain();
    const Morphism f = causal_effect(c3, S(*c3, "y,z"), S(*c3, "x"));
    CHECK(normalize(f.diagram()) == f);
    CHECK(normalize(normalize(f.diagram()).diagram()) == f);
    CHECK(equal(f, f));
    CHECK(f.serialize() == normalize(f.diagram()).serialize());
  }

  TEST_CASE("[xy] differs from the product of its marginals") {
    const DagPtr g = testing::edge();
    const Morphism xy = causal_effect(g, S(*g, "x,y"), {});
    const Morphism mx = marginal(xy, W(*g, "y"));
    const Morphism my = marginal(xy, W(*g, "x"));
    const Morphism product = tensor(mx, my);
    CHECK(product.cod() == xy.cod());
    CHECK_FALSE(equal(xy, product));
  }

  TEST_CASE("path invariants") {
    const DagPtr c3 = testing::chain();
    const StringDiagram eps = generator_diagram(c3, Generator::discard(c3->vertex("x")));
    const PathInvariantReport r0 = path_invariants(eps);
    CHECK(r0.quasi_terminal == std::vector<std::int32_t>{0});

    const StringDiagram zx = causal_effect(c3, S(*c3, "z"), S(*c3, "x")).diagram();
    const PathInvariantReport r1 = path_invariants(zx);
    REQUIRE(r1.to_codomain_paths.size() == 1);
    const DiagramPath& p = r1.to_codomain_paths[0];
    CHECK(p.start_input == 0);
    CHECK(p.output == 0);
    REQUIRE(p.nodes.size() == 2);
    CHECK(zx.nodes()[p.nodes[0]].var == c3->vertex("y"));
    CHECK(zx.nodes()[p.nodes[1]].var == c3->vertex("z"));
    CHECK(r1.splitter_paths.empty());

    const DagPtr g = testing::edge();
    const StringDiagram xy = causal_effect(g, S(*g, "x,y"), {}).diagram();
    const PathInvariantReport r2 = path_invariants(xy);
    REQUIRE(r2.splitter_paths.size() == 1);
    const SplitterPath& s = r2.splitter_paths[0];
    CHECK(xy.nodes()[s.split_node].kind == NodeKind::copy);
    CHECK(std::set<std::int32_t>{s.left.output, s.right.output} == std::set<std::int32_t>{0, 1});
  }

  TEST_CASE("quasi-terminal nodes lead only to discards") {
    const DagPtr c3 = testing::chain();
    StringDiagram d(c3, {});
    const Port x = d.add_mechanism(c3->vertex("x"), {});
    const Port c = d.add_copy(x, 2);
    const Port y = d.add_mechanism(c3->vertex("y"), {c});
    d.add_discard(y);
    d.add_output({c.node, 1});
    const PathInvariantReport r = path_invariants(d);
    // κ_y and its discard are garbage; κ_x and δ_x are not.
    CHECK(r.quasi_terminal.size() == 2);
    CHECK(path_signature(d) == path_signature(normalize(d).diagram()));
  }

  TEST_CASE("export formats") {
    const DagPtr c3 = testing::chain();
    const StringDiagram d = causal_effect(c3, S(*c3, "z"), S(*c3, "x")).diagram();
    const std::string dot = to_dot(d, "zx");
    CHECK(dot.find("digraph") != std::string::npos);
    CHECK(dot.find("κ_y") != std::string::npos);
    CHECK(dot.find("κ_z") != std::string::npos);
    const auto j = nlohmann::json::parse(to_json(d));
    CHECK(j.at("nodes").size() == 2);
    CHECK(j.at("dom").size() == 1);
    CHECK(j.at("cod").size() == 1);
    CHECK(to_text(d).find("κ_z") != std::string::npos);
  }

  TEST_CASE("validate rejects malformed diagrams") {
    const DagPtr c3 = testing::chain();
    StringDiagram d(c3, W(*c3, "x"));
    d.add_output(Port::input(0));
    d.add_output(Port::input(0));
    CHECK_THROWS_AS(d.validate(), MalformedDiagram);

    StringDiagram wrong(c3, W(*c3, "x"));
    CHECK_THROWS_AS(wrong.add_mechanism(c3->vertex("z"), {Port::input(0)}), MalformedDiagram);
  }
}
