#pragma once

#include <vector>

#include "causalcat/dag.hpp"
#include "causalcat/semantics.hpp"

namespace causalcat {

// A do-calculus query with W empty: the rule's conclusion is about
// P(Y | do(X), Z) or P(Y | do(X), do(Z)).
struct RuleQuery {
  int rule = 1;
  VertexSet x;
  VertexSet y;
  VertexSet z;
};

// Rule 1: Y and Z t-separated by X. Rule 2: Z backward-t-separated from Y by
// X. Rule 3: Z forward-t-separated from Y by X. Throws OverlapError, and
// std::invalid_argument for a rule outside 1..3.
bool rule_applicable(const Dag& dag, const RuleQuery& q);

// The classical side conditions with W empty, as d-separation of Y and Z
// given X in a mutilated graph:
//   1: arrows into X removed;
//   2: arrows into X and out of Z removed;
//   3: arrows into X and into Z* removed, Z* = members of Z that are not
//      ancestors of Y once the arrows into X are removed.
bool pearl_rule_applicable_w_empty(const Dag& dag, const RuleQuery& q);

// max |P(v | nd(v)) - P(v | pa(v))| over the states of nd(v), from the joint
// of the factorization. Throws ZeroConditional on a zero-probability
// conditioning event.
double local_markov_gap(const CbnModel& m, Vertex v);
// Same after do(treatment = value), with pa* and nd* read in the graph
// without arrows into the treatment. Zero-probability events are skipped;
// a treated vertex has gap 0.
double local_markov_gap(const CbnModel& m, Vertex v, const Word& treatment, const std::vector<int>& value);

// Max-norm gap between the two sides of the rule's conclusion, by exact
// enumeration:
//   1: P(Y | do X, Z)    vs P(Y | do X)
//   2: P(Y | do X, do Z) vs P(Y | do X, Z)
//   3: P(Y | do X, do Z) vs P(Y | do X)
// States where an observed Z has probability zero are skipped. Does not check
// that the rule applies.
double verify_rule_semantics(const CbnModel& m, const RuleQuery& q);

}  // namespace causalcat
