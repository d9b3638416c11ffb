#pragma once

#include <algorithm>
#include <concepts>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "causalcat/dag.hpp"
#include "causalcat/diagram.hpp"
#include "causalcat/morphism.hpp"

namespace causalcat {

// Column-stochastic matrix. Rows index codomain states, columns domain
// states; a state of a word is a mixed-radix number over its letters with the
// last letter varying fastest.
using StochMatrix = Eigen::MatrixXd;

// Number of states of `word` under `card`, and the digits of a state.
std::size_t state_count(const std::vector<int>& card, const Word& word);
std::vector<int> decode_state(const std::vector<int>& card, const Word& word, std::size_t index);
std::size_t encode_state(const std::vector<int>& card, const Word& word, const std::vector<int>& digits);

// Causal Bayesian network on a Dag: cardinality per vertex and one kernel per
// vertex of shape card(v) x prod card(pa(v)), parents in Dag order.
class CbnModel {
 public:
  CbnModel(DagPtr dag, std::vector<int> card, std::vector<StochMatrix> kernels);

  const Dag& dag() const { return *dag_; }
  const DagPtr& dag_ptr() const { return dag_; }
  const std::vector<int>& card() const { return card_; }
  int card(Vertex v) const { return card_[v.index()]; }
  const StochMatrix& kernel(Vertex v) const { return kernels_[v.index()]; }
  const std::vector<StochMatrix>& kernels() const { return kernels_; }
  // Every kernel entry is at least `floor`.
  bool positive(double floor = 0.0) const;

 private:
  DagPtr dag_;
  std::vector<int> card_;
  std::vector<StochMatrix> kernels_;
};

// Structural equation model: functions[v][parent state] is the value of v.
class DetModel {
 public:
  DetModel(DagPtr dag, std::vector<int> card, std::vector<std::vector<int>> functions);

  const Dag& dag() const { return *dag_; }
  const DagPtr& dag_ptr() const { return dag_; }
  const std::vector<int>& card() const { return card_; }
  int card(Vertex v) const { return card_[v.index()]; }
  const std::vector<int>& function(Vertex v) const { return functions_[v.index()]; }
  // The same model with 0/1 kernels.
  CbnModel lift() const;

 private:
  DagPtr dag_;
  std::vector<int> card_;
  std::vector<std::vector<int>> functions_;
};

// A semantics backend maps the layered form of a diagram to a value. The
// evaluator keeps a list of live wires; each node is applied to the trailing
// wires after a permutation brings its inputs to the end.
template <typename B>
concept SemanticsBackend = requires(const B& b, typename B::Value& value, const Word& word,
                                    const std::vector<std::size_t>& perm, const DiagramNode& node) {
  { b.start(word) } -> std::same_as<typename B::Value>;
  // New live wire i is old live wire perm[i]; `word` is the old live word.
  b.permute(value, word, perm);
  // Applies `node` to the last node.inputs.size() wires of the live word.
  b.apply_trailing(value, word, node);
};

template <SemanticsBackend B>
typename B::Value evaluate(const B& backend, const StringDiagram& d) {
  std::vector<Port> live;
  for (std::size_t i = 0; i < d.dom().size(); ++i) live.push_back(Port::input(i));
  auto live_word = [&] {
    Word w;
    for (Port p : live) w.push_back(d.label(p));
    return w;
  };
  auto bring_to_end = [&](typename B::Value& value, const std::vector<Port>& wanted) {
    std::vector<std::size_t> perm;
    std::vector<bool> moved(live.size(), false);
    std::vector<std::size_t> tail;
    for (Port p : wanted) {
      auto it = std::find(live.begin(), live.end(), p);
      if (it == live.end()) throw MalformedDiagram("wire consumed before it is produced");
      const auto i = static_cast<std::size_t>(it - live.begin());
      moved[i] = true;
      tail.push_back(i);
    }
    for (std::size_t i = 0; i < live.size(); ++i) {
      if (!moved[i]) perm.push_back(i);
    }
    perm.insert(perm.end(), tail.begin(), tail.end());
    bool trivial = true;
    for (std::size_t i = 0; i < perm.size(); ++i) trivial = trivial && perm[i] == i;
    if (!trivial) {
      backend.permute(value, live_word(), perm);
      std::vector<Port> next;
      for (std::size_t i : perm) next.push_back(live[i]);
      live = std::move(next);
    }
  };

  typename B::Value value = backend.start(d.dom());
  for (std::size_t k = 0; k < d.nodes().size(); ++k) {
    const DiagramNode& node = d.nodes()[k];
    bring_to_end(value, node.inputs);
    backend.apply_trailing(value, live_word(), node);
    live.resize(live.size() - node.inputs.size());
    for (std::int32_t p = 0; p < node.outputs; ++p) live.push_back(Port::output(k, static_cast<std::size_t>(p)));
  }
  // Everything left must be a codomain wire; order them as the codomain.
  if (live.size() != d.outputs().size()) throw MalformedDiagram("dangling wire in diagram");
  bring_to_end(value, d.outputs());
  return value;
}

// Stochastic matrices: kernels, Kronecker products, matrix products.
class FinStochBackend {
 public:
  using Value = StochMatrix;
  explicit FinStochBackend(const CbnModel& model) : model_(model) {}

  Value start(const Word& dom) const;
  void permute(Value& value, const Word& word, const std::vector<std::size_t>& perm) const;
  void apply_trailing(Value& value, const Word& word, const DiagramNode& node) const;
  StochMatrix generator(const DiagramNode& node) const;

 private:
  const CbnModel& model_;
};

// Function tables: table[dom state] = codomain digits.
using FunctionTable = std::vector<std::vector<int>>;

class DetBackend {
 public:
  using Value = FunctionTable;
  explicit DetBackend(const DetModel& model) : model_(model) {}

  Value start(const Word& dom) const;
  void permute(Value& value, const Word& word, const std::vector<std::size_t>& perm) const;
  void apply_trailing(Value& value, const Word& word, const DiagramNode& node) const;

 private:
  const DetModel& model_;
};

static_assert(SemanticsBackend<FinStochBackend>);
static_assert(SemanticsBackend<DetBackend>);

// Throws DimensionMismatch when the diagram uses a vertex outside the model.
StochMatrix eval_finstoch(const CbnModel& m, const StringDiagram& d);
StochMatrix eval_finstoch(const CbnModel& m, const Morphism& f);
FunctionTable eval_detsem(const DetModel& m, const StringDiagram& d);
FunctionTable eval_detsem(const DetModel& m, const Morphism& f);
// 0/1 matrix of a function table with the given codomain word.
StochMatrix table_matrix(const DetModel& m, const Word& cod, const FunctionTable& table);

// Joint distribution over all vertices (states in Dag order, last vertex
// fastest) after setting `treatment` to `value`: product of the kernels of the
// untreated vertices, 0 off the treatment value. Throws BadState.
std::vector<double> truncated_factorization(const CbnModel& m, const Word& treatment, const std::vector<int>& value);

// P(outcome | do(treatment)), one column per treatment state. Throws
// NotSingular, NotDisjoint.
StochMatrix interventional_matrix(const CbnModel& m, const Word& outcome, const Word& treatment);

// Kernels with entries drawn uniformly from [0.01, 1] and normalized per
// column; deterministic given the seed.
CbnModel random_positive_model(DagPtr dag, const std::vector<int>& card, std::uint64_t seed);
CbnModel random_positive_model(DagPtr dag, int card, std::uint64_t seed);
DetModel random_det_model(DagPtr dag, const std::vector<int>& card, std::uint64_t seed);

enum class Equation { decomposition, screening, independence };

// Max-norm difference between the two sides of
//   decomposition: P(v,w | do u) = P(v | do u) P(w | do u, do v)
//   screening:     P(w | do u, do v) = P(w | do u)
//   independence:  P(v,w | do u) = P(v | do u) P(w | do u)
// with every term an interventional matrix. Throws NotDisjoint.
double semantic_gap(const CbnModel& m, VertexSet u, VertexSet v, VertexSet w, Equation eq);
double semantic_gap(const DetModel& m, VertexSet u, VertexSet v, VertexSet w, Equation eq);

double max_abs_diff(const StochMatrix& a, const StochMatrix& b);
// Largest deviation of a column sum from 1.
double column_stochastic_error(const StochMatrix& m);

}  // namespace causalcat
