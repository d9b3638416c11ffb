#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace causalcat {

struct VerifyConfig {
  std::size_t max_vertices = 5;
  std::uint64_t seed = 7;
  std::size_t threads = 1;
  // Random models for the semantic suites (functor, rules, markov, det).
  std::size_t models = 200;
  // Random models tried per triple by the necessity probe.
  std::size_t probe_models = 200;
  std::size_t probe_max_vertices = 4;
  double probe_rate = 0.95;
  std::size_t fuzz_diagrams = 1000;
  std::size_t fuzz_surgeries = 24;
  double exact_tol = 1e-12;
  double stat_tol = 1e-9;
  double probe_gap = 1e-6;
};

struct SuiteResult {
  std::string name;
  bool passed = false;
  std::uint64_t checks = 0;
  std::uint64_t failures = 0;
  std::string summary;
  // First few offending cases, formatted for humans.
  std::vector<std::string> examples;
  double seconds = 0.0;

  std::string line() const;
};

// Syntax vs graph over every labeled DAG up to max_vertices and every
// pairwise-disjoint (u, v, w) with v, w nonempty: decomposable_over,
// screened_off, cond_independent against backward/forward/t-separation.
SuiteResult verify_theorems(const VerifyConfig& cfg);
// marginal([vw‖u], v) == [w‖u] on the same enumeration.
SuiteResult verify_marginal_lemma(const VerifyConfig& cfg);
// connected_in_effect(v, w) == v is a strict ancestor of w.
SuiteResult verify_ancestry(const VerifyConfig& cfg);
// eval_finstoch(causal_effect(v‖t)) == interventional_matrix(v, t) on
// cfg.models random binary models; also the component-fused diagram.
SuiteResult verify_functor_oracle(const VerifyConfig& cfg);
// Random diagrams under random surgeries keep normal form, path signature and
// semantics.
SuiteResult verify_surgery_fuzz(const VerifyConfig& cfg);
// Applicable rules and separated equations have semantic gap <= stat_tol.
SuiteResult verify_rule_soundness(const VerifyConfig& cfg);
// Triples failing backward-t-separation on DAGs up to probe_max_vertices get a
// decomposition gap above probe_gap in some random model, for at least
// probe_rate of them.
SuiteResult verify_necessity_probe(const VerifyConfig& cfg);
// rule_applicable == pearl_rule_applicable_w_empty for each rule.
SuiteResult verify_pearl_equivalence(const VerifyConfig& cfg);
// local_markov_gap <= stat_tol, before and under every intervention.
SuiteResult verify_local_markov(const VerifyConfig& cfg);
// Decomposition holds exactly in random deterministic models, including on
// triples that fail backward-t-separation.
SuiteResult verify_deterministic_contrast(const VerifyConfig& cfg);

// Suite names accepted by run_suite: theorems, marginal, ancestry, functor,
// surgery-fuzz, rules, necessity, pearl, markov, deterministic; "docalc" runs
// rules, pearl and markov; "all" runs everything.
std::vector<std::string> suite_names();
std::vector<SuiteResult> run_suite(const std::string& name, const VerifyConfig& cfg);

}  // namespace causalcat
