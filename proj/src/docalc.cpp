#include "causalcat/docalc.hpp"

#include <cmath>
#include <stdexcept>

#include "causalcat/treks.hpp"

namespace causalcat {

namespace {

void check_rule(int rule) {
  if (rule < 1 || rule > 3) throw std::invalid_argument("rule must be 1, 2 or 3");
}

// Distribution of `word` under a joint over all vertices of `m`.
std::vector<double> marginal_of(const CbnModel& m, const std::vector<double>& joint, const Word& word) {
  const Word all = sorted_word(m.dag().vertices());
  std::vector<double> out(state_count(m.card(), word), 0.0);
  std::vector<int> digits(word.size());
  for (std::size_t s = 0; s < joint.size(); ++s) {
    if (joint[s] == 0.0) continue;
    const auto full = decode_state(m.card(), all, s);
    for (std::size_t i = 0; i < word.size(); ++i) digits[i] = full[word[i].index()];
    out[encode_state(m.card(), word, digits)] += joint[s];
  }
  return out;
}

// Index into the states of `word` of the digits picked out of `full`.
std::size_t project(const CbnModel& m, const Word& word, const std::vector<int>& full) {
  std::size_t index = 0;
  for (Vertex x : word) index = index * static_cast<std::size_t>(m.card(x)) + static_cast<std::size_t>(full[x.index()]);
  return index;
}

// Gap between P(v | big) and P(v | small) for small ⊆ big, v ∉ big.
double conditional_gap(const CbnModel& m, const std::vector<double>& joint, Vertex v, VertexSet big, VertexSet small,
                       bool strict) {
  const Word bw = sorted_word(big);
  const Word sw = sorted_word(small);
  const Word vb = sorted_word(big | VertexSet::of(v));
  const Word vs = sorted_word(small | VertexSet::of(v));
  const auto p_b = marginal_of(m, joint, bw);
  const auto p_vb = marginal_of(m, joint, vb);
  const auto p_s = marginal_of(m, joint, sw);
  const auto p_vs = marginal_of(m, joint, vs);
  std::vector<int> full(m.dag().size(), 0);
  double gap = 0.0;
  for (std::size_t s = 0; s < p_vb.size(); ++s) {
    const auto digits = decode_state(m.card(), vb, s);
    for (std::size_t i = 0; i < vb.size(); ++i) full[vb[i].index()] = digits[i];
    const double denom_b = p_b[project(m, bw, full)];
    const double denom_s = p_s[project(m, sw, full)];
    if (denom_b <= 0.0 || denom_s <= 0.0) {
      if (strict) throw ZeroConditional("conditioning event has probability zero");
      continue;
    }
    const double lhs = p_vb[s] / denom_b;
    const double rhs = p_vs[project(m, vs, full)] / denom_s;
    gap = std::max(gap, std::abs(lhs - rhs));
  }
  return gap;
}

}  // namespace

bool rule_applicable(const Dag& dag, const RuleQuery& q) {
  check_rule(q.rule);
  require_disjoint(dag, q.x, q.y, q.z);
  switch (q.rule) {
    case 1:
      return t_separated(dag, q.y, q.z, q.x);
    case 2:
      return backward_t_separated(dag, q.z, q.y, q.x);
    default:
      return forward_t_separated(dag, q.z, q.y, q.x);
  }
}

bool pearl_rule_applicable_w_empty(const Dag& dag, const RuleQuery& q) {
  check_rule(q.rule);
  require_disjoint(dag, q.x, q.y, q.z);
  switch (q.rule) {
    case 1:
      return d_separated(mutilate(dag, q.x, {}), q.y, q.z, q.x);
    case 2:
      return d_separated(mutilate(dag, q.x, q.z), q.y, q.z, q.x);
    default: {
      const Dag cut_x = mutilate(dag, q.x, {});
      const VertexSet z_star = q.z - ancestors(cut_x, q.y);
      return d_separated(mutilate(dag, q.x | z_star, {}), q.y, q.z, q.x);
    }
  }
}

double local_markov_gap(const CbnModel& m, Vertex v) {
  const Dag& dag = m.dag();
  if (v.index() >= dag.size()) throw UnknownVertex("vertex outside the Dag");
  const auto joint = truncated_factorization(m, {}, {});
  return conditional_gap(m, joint, v, non_descendants(dag, v), dag.parents(v), true);
}

double local_markov_gap(const CbnModel& m, Vertex v, const Word& treatment, const std::vector<int>& value) {
  const Dag& dag = m.dag();
  if (v.index() >= dag.size()) throw UnknownVertex("vertex outside the Dag");
  const VertexSet t = letters(treatment);
  if (t.contains(v)) return 0.0;
  const Dag cut = mutilate(dag, t, {});
  const auto joint = truncated_factorization(m, treatment, value);
  return conditional_gap(m, joint, v, non_descendants(cut, v), cut.parents(v), false);
}

double verify_rule_semantics(const CbnModel& m, const RuleQuery& q) {
  check_rule(q.rule);
  const Dag& dag = m.dag();
  require_disjoint(dag, q.x, q.y, q.z);
  const Word xw = sorted_word(q.x);
  const Word yw = sorted_word(q.y);
  const Word zw = sorted_word(q.z);
  const Word xz = sorted_word(q.x | q.z);
  const Word yz = sorted_word(q.y | q.z);
  std::vector<int> full(dag.size(), 0);
  auto assign = [&](const Word& word, std::size_t index) {
    const auto digits = decode_state(m.card(), word, index);
    for (std::size_t i = 0; i < word.size(); ++i) full[word[i].index()] = digits[i];
  };

  double gap = 0.0;
  const std::size_t nx = state_count(m.card(), xw);
  const std::size_t nz = state_count(m.card(), zw);
  const std::size_t ny = state_count(m.card(), yw);
  for (std::size_t a = 0; a < nx; ++a) {
    assign(xw, a);
    const auto do_x = truncated_factorization(m, xw, decode_state(m.card(), xw, a));
    const auto p_y = marginal_of(m, do_x, yw);
    const auto p_z = marginal_of(m, do_x, zw);
    const auto p_yz = marginal_of(m, do_x, yz);
    for (std::size_t c = 0; c < nz; ++c) {
      assign(zw, c);
      std::vector<double> p_y_do_z;
      if (q.rule != 1) {
        std::vector<int> xz_digits;
        for (Vertex x : xz) xz_digits.push_back(full[x.index()]);
        p_y_do_z = marginal_of(m, truncated_factorization(m, xz, xz_digits), yw);
      }
      const double pz = p_z[project(m, zw, full)];
      for (std::size_t b = 0; b < ny; ++b) {
        assign(yw, b);
        const double observed = pz > 0.0 ? p_yz[project(m, yz, full)] / pz : std::nan("");
        double lhs = 0.0;
        double rhs = 0.0;
        switch (q.rule) {
          case 1:
            if (pz <= 0.0) continue;
            lhs = observed;
            rhs = p_y[b];
            break;
          case 2:
            if (pz <= 0.0) continue;
            lhs = p_y_do_z[b];
            rhs = observed;
            break;
          default:
            lhs = p_y_do_z[b];
            rhs = p_y[b];
            break;
        }
        gap = std::max(gap, std::abs(lhs - rhs));
      }
    }
  }
  return gap;
}

}  // namespace causalcat
