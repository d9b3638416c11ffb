// causalcat: separation queries, causal effects, interventions, do-calculus
// rules and the verification suites from the command line.
//
// Exit codes: 0 success, 1 verification failure, 2 usage or parse error.

#include <cstdio>
#include <cstdlib>
#include <iomanip>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "causalcat/dag.hpp"
#include "causalcat/diagram.hpp"
#include "causalcat/docalc.hpp"
#include "causalcat/effects.hpp"
#include "causalcat/io.hpp"
#include "causalcat/semantics.hpp"
#include "causalcat/treks.hpp"
#include "causalcat/verify.hpp"
#include "json.hpp"

namespace {

using namespace causalcat;
using nlohmann::json;

constexpr int kOk = 0;
constexpr int kVerifyFailed = 1;
constexpr int kUsage = 2;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

double default_tolerance() {
  if (const char* env = std::getenv("CAUSALCAT_TOL")) {
    char* end = nullptr;
    const double tol = std::strtod(env, &end);
    if (end != env && tol > 0.0) return tol;
    throw UsageError("CAUSALCAT_TOL must be a positive number");
  }
  return 1e-9;
}

DagPtr load_dag(const std::string& path) { return std::make_shared<const Dag>(parse_dag_json(read_file(path))); }

VertexSet set_of(const Dag& dag, const std::vector<std::string>& names) {
  VertexSet out;
  for (const auto& n : names) {
    if (n.empty()) continue;
    const Vertex v = dag.vertex(n);
    if (out.contains(v)) throw UsageError("vertex " + n + " listed twice");
    out.insert(v);
  }
  return out;
}

std::string verdict(bool b) { return b ? "true" : "false"; }

// ---------------------------------------------------------------------------

struct SeparateArgs {
  std::string dag;
  std::vector<std::string> x, y, z, tsep;
  std::string format = "text";
};

int cmd_separate(const SeparateArgs& a) {
  const DagPtr dag = load_dag(a.dag);
  std::vector<std::string> xs = a.x;
  std::vector<std::string> ys = a.y;
  if (!a.tsep.empty()) {
    if (a.tsep.size() != 2 || !xs.empty() || !ys.empty()) throw UsageError("--t-sep takes exactly two vertices and replaces --x/--y");
    xs = {a.tsep[0]};
    ys = {a.tsep[1]};
  }
  const VertexSet x = set_of(*dag, xs);
  const VertexSet y = set_of(*dag, ys);
  const VertexSet z = set_of(*dag, a.z);
  require_disjoint(*dag, x, y, z);

  const auto fwd = unblocked_trek(*dag, x, y, z, TrekKind::forward);
  const auto bwd = unblocked_trek(*dag, x, y, z, TrekKind::backward);
  const bool d = d_separated(*dag, x, y, z);
  if (a.format == "json") {
    json out{{"x", dag->format(x)},
             {"y", dag->format(y)},
             {"given", dag->format(z)},
             {"t_separated", !fwd && !bwd},
             {"forward_t_separated", !fwd},
             {"backward_t_separated", !bwd},
             {"d_separated", d}};
    if (fwd) out["forward_witness"] = fwd->format(*dag);
    if (bwd) out["backward_witness"] = bwd->format(*dag);
    std::cout << out.dump(2) << "\n";
    return kOk;
  }
  std::cout << "t-separated: " << verdict(!fwd && !bwd) << "\n";
  std::cout << "forward-t-separated: " << verdict(!fwd) << "\n";
  if (fwd) std::cout << "  open forward trek: " << fwd->format(*dag) << "\n";
  std::cout << "backward-t-separated: " << verdict(!bwd) << "\n";
  if (bwd) std::cout << "  open backward trek: " << bwd->format(*dag) << "\n";
  std::cout << "d-separated: " << verdict(d) << "\n";
  return kOk;
}

// ---------------------------------------------------------------------------

struct EffectArgs {
  std::string dag;
  std::vector<std::string> v, t;
  std::string format = "text";
  std::string layout = "normal";
};

int cmd_effect(const EffectArgs& a) {
  const DagPtr dag = load_dag(a.dag);
  const VertexSet v = set_of(*dag, a.v);
  const VertexSet t = set_of(*dag, a.t);
  const Morphism f = causal_effect(dag, v, t);
  const StringDiagram d = a.layout == "components" ? effect_diagram(dag, v, t) : f.diagram();
  const std::string title = "[" + dag->format(v) + "||" + dag->format(t) + "]";
  if (a.format == "dot") {
    std::cout << to_dot(d, title);
  } else if (a.format == "json") {
    json out = json::parse(to_json(d));
    out["effect"] = title;
    out["normal_form"] = f.serialize();
    std::cout << out.dump(2) << "\n";
  } else {
    std::cout << title << "\n" << "normal form: " << f.serialize() << "\n" << to_text(d);
  }
  return kOk;
}

// ---------------------------------------------------------------------------

struct InterveneArgs {
  std::string dag, model;
  std::vector<std::string> outcome, treatment;
  std::string format = "text";
};

std::vector<std::string> state_labels(const CbnModel& m, const Word& word) {
  std::vector<std::string> out;
  for (std::size_t s = 0; s < state_count(m.card(), word); ++s) {
    const auto digits = decode_state(m.card(), word, s);
    std::string label;
    for (std::size_t i = 0; i < word.size(); ++i) label += (i ? "," : "") + m.dag().name(word[i]) + "=" + std::to_string(digits[i]);
    out.push_back(word.empty() ? "()" : label);
  }
  return out;
}

int cmd_intervene(const InterveneArgs& a) {
  const DagPtr dag = load_dag(a.dag);
  const CbnModel m = parse_model_json(dag, read_file(a.model));
  const VertexSet v = set_of(*dag, a.outcome);
  const VertexSet t = set_of(*dag, a.treatment);
  if (v.intersects(t)) throw UsageError("outcome and treatment overlap");
  const Word vw = sorted_word(v);
  const Word tw = sorted_word(t);
  const StochMatrix p = interventional_matrix(m, vw, tw);
  const auto rows = state_labels(m, vw);
  const auto cols = state_labels(m, tw);
  const std::string title = "P(" + dag->format(v) + (t.empty() ? "" : " | do(" + dag->format(t) + ")") + ")";

  if (a.format == "json") {
    json matrix = json::array();
    for (Eigen::Index r = 0; r < p.rows(); ++r) {
      json row = json::array();
      for (Eigen::Index c = 0; c < p.cols(); ++c) row.push_back(p(r, c));
      matrix.push_back(row);
    }
    std::cout << json{{"query", title}, {"rows", rows}, {"columns", cols}, {"matrix", matrix}}.dump(2) << "\n";
    return kOk;
  }
  if (a.format == "csv") {
    std::cout << "outcome";
    for (const auto& c : cols) std::cout << "," << c;
    std::cout << "\n" << std::setprecision(17);
    for (Eigen::Index r = 0; r < p.rows(); ++r) {
      std::cout << rows[r];
      for (Eigen::Index c = 0; c < p.cols(); ++c) std::cout << "," << p(r, c);
      std::cout << "\n";
    }
    return kOk;
  }
  std::size_t label_width = 0;
  for (const auto& r : rows) label_width = std::max(label_width, r.size());
  std::size_t col_width = 10;
  for (const auto& c : cols) col_width = std::max(col_width, c.size() + 2);
  std::cout << title << "\n" << std::string(label_width, ' ');
  for (const auto& c : cols) std::cout << std::setw(static_cast<int>(col_width)) << c;
  std::cout << "\n" << std::fixed << std::setprecision(6);
  for (Eigen::Index r = 0; r < p.rows(); ++r) {
    std::cout << std::left << std::setw(static_cast<int>(label_width)) << rows[r] << std::right;
    for (Eigen::Index c = 0; c < p.cols(); ++c) std::cout << std::setw(static_cast<int>(col_width)) << p(r, c);
    std::cout << "\n";
  }
  return kOk;
}

// ---------------------------------------------------------------------------

struct DocalcArgs {
  std::string dag, model;
  int rule = 1;
  std::vector<std::string> x, y, z;
  double tol = 0.0;
};

int cmd_docalc(const DocalcArgs& a) {
  const DagPtr dag = load_dag(a.dag);
  const RuleQuery q{a.rule, set_of(*dag, a.x), set_of(*dag, a.y), set_of(*dag, a.z)};
  const bool ours = rule_applicable(*dag, q);
  const bool pearl = pearl_rule_applicable_w_empty(*dag, q);
  static const char* const kConclusion[] = {"", "P(Y | do(X), Z) = P(Y | do(X))", "P(Y | do(X), do(Z)) = P(Y | do(X), Z)",
                                            "P(Y | do(X), do(Z)) = P(Y | do(X))"};
  std::cout << "rule " << a.rule << ": " << kConclusion[a.rule] << "\n";
  std::cout << "  X = " << dag->format(q.x) << ", Y = " << dag->format(q.y) << ", Z = " << dag->format(q.z) << "\n";
  std::cout << "t-separation condition: " << verdict(ours) << "\n";
  std::cout << "classical condition (W empty): " << verdict(pearl) << "\n";
  int status = ours == pearl ? kOk : kVerifyFailed;
  if (!a.model.empty()) {
    const CbnModel m = parse_model_json(dag, read_file(a.model));
    const double gap = verify_rule_semantics(m, q);
    const double tol = a.tol > 0.0 ? a.tol : default_tolerance();
    std::cout << "semantic gap: " << std::scientific << std::setprecision(3) << gap << " (tol " << tol << ")\n";
    if (ours && gap > tol) status = kVerifyFailed;
  }
  return status;
}

// ---------------------------------------------------------------------------

struct VerifyArgs {
  std::string suite = "all";
  std::size_t max_vertices = 5;
  std::size_t trials = 0;
  std::uint64_t seed = 7;
  std::size_t threads = 1;
  double tol = 0.0;
  bool show_examples = true;
};

int cmd_verify(const VerifyArgs& a) {
  VerifyConfig cfg;
  if (a.max_vertices < 1 || a.max_vertices > 8) throw UsageError("--max-vertices must be between 1 and 8");
  cfg.max_vertices = std::min<std::size_t>(a.max_vertices, 6);
  if (cfg.max_vertices < a.max_vertices) std::cerr << "note: exhaustive enumeration is limited to 6 vertices\n";
  cfg.probe_max_vertices = std::min(cfg.probe_max_vertices, cfg.max_vertices);
  cfg.seed = a.seed;
  cfg.threads = a.threads;
  cfg.stat_tol = a.tol > 0.0 ? a.tol : default_tolerance();
  if (a.trials > 0) {
    cfg.models = a.trials;
    cfg.fuzz_diagrams = a.trials;
  }
  bool ok = true;
  for (const auto& r : run_suite(a.suite, cfg)) {
    std::cout << r.line() << "\n";
    if (a.show_examples) {
      for (const auto& e : r.examples) std::cout << "    " << e << "\n";
    }
    ok = ok && r.passed;
  }
  return ok ? kOk : kVerifyFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"causalcat: causal effects, trek separation and the do-calculus over DAGs"};
  app.require_subcommand(1);

  SeparateArgs sep;
  auto* separate = app.add_subcommand("separate", "t-, forward-, backward- and d-separation verdicts");
  separate->add_option("dag", sep.dag, "DAG JSON file")->required();
  separate->add_option("--x", sep.x, "first vertex set")->delimiter(',');
  separate->add_option("--y", sep.y, "second vertex set")->delimiter(',');
  separate->add_option("--given,--z", sep.z, "separating set")->delimiter(',');
  separate->add_option("--t-sep", sep.tsep, "shorthand for --x A --y B")->expected(2);
  separate->add_option("--format", sep.format)->check(CLI::IsMember({"text", "json"}));

  EffectArgs eff;
  auto* effect = app.add_subcommand("effect", "render the causal effect [v||t]");
  effect->add_option("dag", eff.dag, "DAG JSON file")->required();
  effect->add_option("--v", eff.v, "outcome vertices")->delimiter(',');
  effect->add_option("--t", eff.t, "treatment vertices")->delimiter(',');
  effect->add_option("--format", eff.format)->check(CLI::IsMember({"text", "dot", "json"}));
  effect->add_option("--layout", eff.layout, "normal form or fused components")->check(CLI::IsMember({"normal", "components"}));

  InterveneArgs iv;
  auto* intervene = app.add_subcommand("intervene", "P(outcome | do(treatment)) by truncated factorization");
  intervene->add_option("dag", iv.dag, "DAG JSON file")->required();
  intervene->add_option("model", iv.model, "CPT JSON file")->required();
  intervene->add_option("--outcome", iv.outcome)->delimiter(',')->required();
  intervene->add_option("--do", iv.treatment)->delimiter(',');
  intervene->add_option("--format", iv.format)->check(CLI::IsMember({"text", "csv", "json"}));

  DocalcArgs dc;
  auto* docalc = app.add_subcommand("docalc", "applicability of a do-calculus rule with W empty");
  docalc->add_option("dag", dc.dag, "DAG JSON file")->required();
  docalc->add_option("--rule", dc.rule)->required()->check(CLI::Range(1, 3));
  docalc->add_option("--x", dc.x)->delimiter(',');
  docalc->add_option("--y", dc.y)->delimiter(',')->required();
  docalc->add_option("--z", dc.z)->delimiter(',')->required();
  docalc->add_option("--model", dc.model, "CPT JSON file; adds the semantic gap");
  docalc->add_option("--tol", dc.tol, "gap tolerance (default $CAUSALCAT_TOL or 1e-9)");

  VerifyArgs va;
  auto* verify = app.add_subcommand("verify", "run verification suites");
  std::vector<std::string> suites = suite_names();
  suites.push_back("docalc");
  suites.push_back("all");
  verify->add_option("--suite", va.suite)->check(CLI::IsMember(suites));
  verify->add_option("--max-vertices", va.max_vertices);
  verify->add_option("--trials", va.trials, "random models / fuzzed diagrams");
  verify->add_option("--seed", va.seed);
  verify->add_option("--threads", va.threads);
  verify->add_option("--tol", va.tol, "statistical tolerance (default $CAUSALCAT_TOL or 1e-9)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*separate) return cmd_separate(sep);
    if (*effect) return cmd_effect(eff);
    if (*intervene) return cmd_intervene(iv);
    if (*docalc) return cmd_docalc(dc);
    if (*verify) return cmd_verify(va);
  } catch (const causalcat::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
