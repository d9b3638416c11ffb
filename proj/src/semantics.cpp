#include "causalcat/semantics.hpp"

#include <cmath>

namespace causalcat {

std::size_t state_count(const std::vector<int>& card, const Word& word) {
  std::size_t n = 1;
  for (Vertex v : word) n *= static_cast<std::size_t>(card[v.index()]);
  return n;
}

std::vector<int> decode_state(const std::vector<int>& card, const Word& word, std::size_t index) {
  std::vector<int> digits(word.size());
  for (std::size_t i = word.size(); i-- > 0;) {
    const auto c = static_cast<std::size_t>(card[word[i].index()]);
    digits[i] = static_cast<int>(index % c);
    index /= c;
  }
  if (index != 0) throw BadState("state index out of range");
  return digits;
}

std::size_t encode_state(const std::vector<int>& card, const Word& word, const std::vector<int>& digits) {
  std::size_t index = 0;
  for (std::size_t i = 0; i < word.size(); ++i) {
    index = index * static_cast<std::size_t>(card[word[i].index()]) + static_cast<std::size_t>(digits[i]);
  }
  return index;
}

namespace {

void check_card(const Dag& dag, const std::vector<int>& card) {
  if (card.size() != dag.size()) throw BadModel("one cardinality per vertex is required");
  for (int c : card) {
    if (c < 1) throw BadModel("cardinalities must be positive");
  }
}

// Index of the parent state of `v` inside a full assignment of the Dag.
std::size_t parent_index(const Dag& dag, const std::vector<int>& card, Vertex v, const std::vector<int>& full) {
  std::size_t index = 0;
  for (Vertex p : dag.parents(v)) index = index * static_cast<std::size_t>(card[p.index()]) + static_cast<std::size_t>(full[p.index()]);
  return index;
}

std::size_t parent_states(const Dag& dag, const std::vector<int>& card, Vertex v) {
  return state_count(card, sorted_word(dag.parents(v)));
}

}  // namespace

CbnModel::CbnModel(DagPtr dag, std::vector<int> card, std::vector<StochMatrix> kernels)
    : dag_(std::move(dag)), card_(std::move(card)), kernels_(std::move(kernels)) {
  check_card(*dag_, card_);
  if (kernels_.size() != dag_->size()) throw BadModel("one kernel per vertex is required");
  for (Vertex v : dag_->vertices()) {
    const StochMatrix& k = kernels_[v.index()];
    if (k.rows() != card_[v.index()] || static_cast<std::size_t>(k.cols()) != parent_states(*dag_, card_, v)) {
      throw DimensionMismatch("kernel of " + dag_->name(v) + " has the wrong shape");
    }
    if ((k.array() < 0.0).any()) throw BadModel("kernel of " + dag_->name(v) + " has a negative entry");
    if (column_stochastic_error(k) > 1e-12) throw BadModel("kernel of " + dag_->name(v) + " is not column-stochastic");
  }
}

bool CbnModel::positive(double floor) const {
  for (const StochMatrix& k : kernels_) {
    if (k.size() > 0 && k.minCoeff() < floor) return false;
    if (floor <= 0.0 && k.size() > 0 && k.minCoeff() <= 0.0) return false;
  }
  return true;
}

DetModel::DetModel(DagPtr dag, std::vector<int> card, std::vector<std::vector<int>> functions)
    : dag_(std::move(dag)), card_(std::move(card)), functions_(std::move(functions)) {
  check_card(*dag_, card_);
  if (functions_.size() != dag_->size()) throw BadModel("one function per vertex is required");
  for (Vertex v : dag_->vertices()) {
    const auto& f = functions_[v.index()];
    if (f.size() != parent_states(*dag_, card_, v)) throw DimensionMismatch("function of " + dag_->name(v) + " is not total");
    for (int value : f) {
      if (value < 0 || value >= card_[v.index()]) throw BadModel("function of " + dag_->name(v) + " leaves its range");
    }
  }
}

CbnModel DetModel::lift() const {
  std::vector<StochMatrix> kernels;
  for (Vertex v : dag_->vertices()) {
    const auto& f = functions_[v.index()];
    StochMatrix k = StochMatrix::Zero(card_[v.index()], static_cast<Eigen::Index>(f.size()));
    for (std::size_t s = 0; s < f.size(); ++s) k(f[s], static_cast<Eigen::Index>(s)) = 1.0;
    kernels.push_back(std::move(k));
  }
  return CbnModel(dag_, card_, std::move(kernels));
}

// ---------------------------------------------------------------------------
// Stochastic backend

StochMatrix FinStochBackend::start(const Word& dom) const {
  const auto n = static_cast<Eigen::Index>(state_count(model_.card(), dom));
  return StochMatrix::Identity(n, n);
}

void FinStochBackend::permute(Value& value, const Word& word, const std::vector<std::size_t>& perm) const {
  Word next;
  for (std::size_t i : perm) next.push_back(word[i]);
  StochMatrix out(value.rows(), value.cols());
  std::vector<int> moved(word.size());
  for (Eigen::Index r = 0; r < value.rows(); ++r) {
    const auto digits = decode_state(model_.card(), word, static_cast<std::size_t>(r));
    for (std::size_t i = 0; i < perm.size(); ++i) moved[i] = digits[perm[i]];
    out.row(static_cast<Eigen::Index>(encode_state(model_.card(), next, moved))) = value.row(r);
  }
  value = std::move(out);
}

StochMatrix FinStochBackend::generator(const DiagramNode& node) const {
  if (node.var.index() >= model_.dag().size()) throw DimensionMismatch("diagram uses a vertex outside the model");
  if (node.kind == NodeKind::mechanism) return model_.kernel(node.var);
  const int c = model_.card(node.var);
  std::size_t rows = 1;
  for (std::int32_t i = 0; i < node.outputs; ++i) rows *= static_cast<std::size_t>(c);
  StochMatrix g = StochMatrix::Zero(static_cast<Eigen::Index>(rows), c);
  for (int s = 0; s < c; ++s) {
    std::size_t row = 0;
    for (std::int32_t i = 0; i < node.outputs; ++i) row = row * static_cast<std::size_t>(c) + static_cast<std::size_t>(s);
    g(static_cast<Eigen::Index>(row), s) = 1.0;
  }
  return g;
}

void FinStochBackend::apply_trailing(Value& value, const Word& word, const DiagramNode& node) const {
  const StochMatrix g = generator(node);
  const Word tail(word.end() - static_cast<std::ptrdiff_t>(node.inputs.size()), word.end());
  const auto t = static_cast<Eigen::Index>(state_count(model_.card(), tail));
  if (g.cols() != t) throw DimensionMismatch("generator does not fit its input wires");
  const Eigen::Index prefix = value.rows() / t;
  StochMatrix out(prefix * g.rows(), value.cols());
  for (Eigen::Index a = 0; a < prefix; ++a) {
    out.middleRows(a * g.rows(), g.rows()).noalias() = g * value.middleRows(a * t, t);
  }
  value = std::move(out);
}

// ---------------------------------------------------------------------------
// Deterministic backend

FunctionTable DetBackend::start(const Word& dom) const {
  FunctionTable table(state_count(model_.card(), dom));
  for (std::size_t s = 0; s < table.size(); ++s) table[s] = decode_state(model_.card(), dom, s);
  return table;
}

void DetBackend::permute(Value& value, const Word&, const std::vector<std::size_t>& perm) const {
  std::vector<int> moved(perm.size());
  for (auto& row : value) {
    for (std::size_t i = 0; i < perm.size(); ++i) moved[i] = row[perm[i]];
    row = moved;
  }
}

void DetBackend::apply_trailing(Value& value, const Word& word, const DiagramNode& node) const {
  if (node.var.index() >= model_.dag().size()) throw DimensionMismatch("diagram uses a vertex outside the model");
  const std::size_t arity = node.inputs.size();
  const Word tail(word.end() - static_cast<std::ptrdiff_t>(arity), word.end());
  for (auto& row : value) {
    const std::vector<int> args(row.end() - static_cast<std::ptrdiff_t>(arity), row.end());
    row.resize(row.size() - arity);
    if (node.kind == NodeKind::mechanism) {
      row.push_back(model_.function(node.var)[encode_state(model_.card(), tail, args)]);
    } else {
      for (std::int32_t i = 0; i < node.outputs; ++i) row.push_back(args[0]);
    }
  }
}

namespace {

void check_fits(const Dag& model_dag, const Dag& diagram_dag) {
  if (model_dag.size() != diagram_dag.size()) throw DimensionMismatch("model and diagram live over different Dags");
}

}  // namespace

StochMatrix eval_finstoch(const CbnModel& m, const StringDiagram& d) {
  check_fits(m.dag(), d.dag());
  return evaluate(FinStochBackend(m), d);
}

StochMatrix eval_finstoch(const CbnModel& m, const Morphism& f) { return eval_finstoch(m, f.diagram()); }

FunctionTable eval_detsem(const DetModel& m, const StringDiagram& d) {
  check_fits(m.dag(), d.dag());
  return evaluate(DetBackend(m), d);
}

FunctionTable eval_detsem(const DetModel& m, const Morphism& f) { return eval_detsem(m, f.diagram()); }

StochMatrix table_matrix(const DetModel& m, const Word& cod, const FunctionTable& table) {
  StochMatrix out = StochMatrix::Zero(static_cast<Eigen::Index>(state_count(m.card(), cod)), static_cast<Eigen::Index>(table.size()));
  for (std::size_t s = 0; s < table.size(); ++s) {
    out(static_cast<Eigen::Index>(encode_state(m.card(), cod, table[s])), static_cast<Eigen::Index>(s)) = 1.0;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Truncated factorization

std::vector<double> truncated_factorization(const CbnModel& m, const Word& treatment, const std::vector<int>& value) {
  const Dag& dag = m.dag();
  const VertexSet t = letters(treatment);
  if (!dag.vertices().contains(t)) throw UnknownVertex("treatment outside the Dag");
  if (value.size() != treatment.size()) throw BadState("treatment value has the wrong length");
  for (std::size_t i = 0; i < treatment.size(); ++i) {
    if (value[i] < 0 || value[i] >= m.card(treatment[i])) throw BadState("treatment value out of range");
  }
  const Word all = sorted_word(dag.vertices());
  std::vector<double> joint(state_count(m.card(), all), 0.0);
  std::vector<int> fixed(dag.size(), -1);
  for (std::size_t i = 0; i < treatment.size(); ++i) fixed[treatment[i].index()] = value[i];
  for (std::size_t s = 0; s < joint.size(); ++s) {
    const auto full = decode_state(m.card(), all, s);
    double p = 1.0;
    for (Vertex v : dag.vertices()) {
      if (fixed[v.index()] >= 0) {
        if (full[v.index()] != fixed[v.index()]) {
          p = 0.0;
          break;
        }
        continue;
      }
      p *= m.kernel(v)(full[v.index()], static_cast<Eigen::Index>(parent_index(dag, m.card(), v, full)));
    }
    joint[s] = p;
  }
  return joint;
}

StochMatrix interventional_matrix(const CbnModel& m, const Word& outcome, const Word& treatment) {
  const VertexSet v = letters(outcome);
  const VertexSet t = letters(treatment);
  if (!m.dag().vertices().contains(v | t)) throw UnknownVertex("word outside the Dag");
  if (v.intersects(t)) throw NotDisjoint("outcome and treatment overlap");
  const Word all = sorted_word(m.dag().vertices());
  const std::size_t cols = state_count(m.card(), treatment);
  StochMatrix out = StochMatrix::Zero(static_cast<Eigen::Index>(state_count(m.card(), outcome)), static_cast<Eigen::Index>(cols));
  std::vector<int> digits(outcome.size());
  for (std::size_t c = 0; c < cols; ++c) {
    const auto joint = truncated_factorization(m, treatment, decode_state(m.card(), treatment, c));
    for (std::size_t s = 0; s < joint.size(); ++s) {
      if (joint[s] == 0.0) continue;
      const auto full = decode_state(m.card(), all, s);
      for (std::size_t i = 0; i < outcome.size(); ++i) digits[i] = full[outcome[i].index()];
      out(static_cast<Eigen::Index>(encode_state(m.card(), outcome, digits)), static_cast<Eigen::Index>(c)) += joint[s];
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Random models

CbnModel random_positive_model(DagPtr dag, const std::vector<int>& card, std::uint64_t seed) {
  check_card(*dag, card);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> entry(0.01, 1.0);
  std::vector<StochMatrix> kernels;
  for (Vertex v : dag->vertices()) {
    StochMatrix k(card[v.index()], static_cast<Eigen::Index>(parent_states(*dag, card, v)));
    for (Eigen::Index c = 0; c < k.cols(); ++c) {
      for (Eigen::Index r = 0; r < k.rows(); ++r) k(r, c) = entry(rng);
      k.col(c) /= k.col(c).sum();
    }
    kernels.push_back(std::move(k));
  }
  return CbnModel(std::move(dag), card, std::move(kernels));
}

CbnModel random_positive_model(DagPtr dag, int card, std::uint64_t seed) {
  const std::vector<int> cards(dag->size(), card);
  return random_positive_model(std::move(dag), cards, seed);
}

DetModel random_det_model(DagPtr dag, const std::vector<int>& card, std::uint64_t seed) {
  check_card(*dag, card);
  std::mt19937_64 rng(seed);
  std::vector<std::vector<int>> functions;
  for (Vertex v : dag->vertices()) {
    std::uniform_int_distribution<int> value(0, card[v.index()] - 1);
    std::vector<int> f(parent_states(*dag, card, v));
    for (int& x : f) x = value(rng);
    functions.push_back(std::move(f));
  }
  return DetModel(std::move(dag), card, std::move(functions));
}

// ---------------------------------------------------------------------------
// Equations

double max_abs_diff(const StochMatrix& a, const StochMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimensionMismatch("matrices differ in shape");
  if (a.size() == 0) return 0.0;
  return (a - b).cwiseAbs().maxCoeff();
}

double column_stochastic_error(const StochMatrix& m) {
  if (m.cols() == 0) return 0.0;
  return (m.colwise().sum().array() - 1.0).abs().maxCoeff();
}

double semantic_gap(const CbnModel& m, VertexSet u, VertexSet v, VertexSet w, Equation eq) {
  const Dag& dag = m.dag();
  if (!dag.vertices().contains(u | v | w)) throw UnknownVertex("vertex set outside the Dag");
  if (u.intersects(v) || u.intersects(w) || v.intersects(w)) throw NotDisjoint("u, v, w must be pairwise disjoint");
  const auto& card = m.card();
  const Word uw = sorted_word(u);
  const Word vw = sorted_word(v);
  const Word ww = sorted_word(w);
  const Word vu = sorted_word(v | u);
  const Word joint_word = sorted_word(v | w);

  // Digits of `word` read from a full assignment indexed by vertex.
  std::vector<int> full(dag.size(), 0);
  auto index_of = [&](const Word& word) {
    std::size_t index = 0;
    for (Vertex x : word) index = index * static_cast<std::size_t>(card[x.index()]) + static_cast<std::size_t>(full[x.index()]);
    return static_cast<Eigen::Index>(index);
  };
  auto assign = [&](const Word& word, std::size_t index) {
    const auto digits = decode_state(card, word, index);
    for (std::size_t i = 0; i < word.size(); ++i) full[word[i].index()] = digits[i];
  };

  double gap = 0.0;
  const std::size_t nu = state_count(card, uw);
  const std::size_t nv = state_count(card, vw);
  const std::size_t nw = state_count(card, ww);
  switch (eq) {
    case Equation::decomposition: {
      const StochMatrix lhs = interventional_matrix(m, joint_word, uw);
      const StochMatrix pv = interventional_matrix(m, vw, uw);
      const StochMatrix pw = interventional_matrix(m, ww, vu);
      for (std::size_t c = 0; c < nu; ++c) {
        assign(uw, c);
        for (std::size_t a = 0; a < nv; ++a) {
          assign(vw, a);
          for (std::size_t b = 0; b < nw; ++b) {
            assign(ww, b);
            const double rhs = pv(index_of(vw), index_of(uw)) * pw(index_of(ww), index_of(vu));
            gap = std::max(gap, std::abs(lhs(index_of(joint_word), index_of(uw)) - rhs));
          }
        }
      }
      break;
    }
    case Equation::screening: {
      const StochMatrix both = interventional_matrix(m, ww, vu);
      const StochMatrix only_u = interventional_matrix(m, ww, uw);
      for (std::size_t c = 0; c < state_count(card, vu); ++c) {
        assign(vu, c);
        for (std::size_t b = 0; b < nw; ++b) {
          assign(ww, b);
          gap = std::max(gap, std::abs(both(index_of(ww), index_of(vu)) - only_u(index_of(ww), index_of(uw))));
        }
      }
      break;
    }
    case Equation::independence: {
      const StochMatrix lhs = interventional_matrix(m, joint_word, uw);
      const StochMatrix pv = interventional_matrix(m, vw, uw);
      const StochMatrix pw = interventional_matrix(m, ww, uw);
      for (std::size_t c = 0; c < nu; ++c) {
        assign(uw, c);
        for (std::size_t a = 0; a < nv; ++a) {
          assign(vw, a);
          for (std::size_t b = 0; b < nw; ++b) {
            assign(ww, b);
            const double rhs = pv(index_of(vw), index_of(uw)) * pw(index_of(ww), index_of(uw));
            gap = std::max(gap, std::abs(lhs(index_of(joint_word), index_of(uw)) - rhs));
          }
        }
      }
      break;
    }
  }
  return gap;
}

double semantic_gap(const DetModel& m, VertexSet u, VertexSet v, VertexSet w, Equation eq) {
  return semantic_gap(m.lift(), u, v, w, eq);
}

}  // namespace causalcat
