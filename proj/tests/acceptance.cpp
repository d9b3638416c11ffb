// Acceptance gate: runs the ten acceptance criteria at their stated scale and
// tolerances and prints one PASS/FAIL line per criterion. Exit status is 0 iff
// every criterion passes. Pass criterion numbers as arguments to run a subset.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "causalcat/effects.hpp"
#include "causalcat/semantics.hpp"
#include "causalcat/verify.hpp"
#include "oracles.hpp"
#include "support.hpp"

namespace {

using namespace causalcat;

struct Outcome {
  bool passed = false;
  std::string detail;
};

Outcome from_suite(const SuiteResult& r) {
  Outcome o{r.passed, r.summary};
  for (const auto& e : r.examples) o.detail += "\n      " + e;
  return o;
}

VerifyConfig base() {
  VerifyConfig cfg;
  cfg.max_vertices = 5;
  cfg.seed = 7;
  cfg.threads = 1;
  cfg.exact_tol = 1e-12;
  cfg.stat_tol = 1e-9;
  return cfg;
}

// Criterion 4, second half: the same comparison against the test-side
// enumeration oracle, on independently generated instances.
Outcome functor_vs_test_oracle(std::size_t models) {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> size(1, 5);
  std::size_t checks = 0;
  double worst = 0.0;
  for (std::size_t i = 0; i < models; ++i) {
    const DagPtr dag = testing::share(oracle::random_dag(rng, size(rng)));
    const CbnModel m = random_positive_model(dag, 2, rng());
    const std::size_t n = dag->size();
    std::size_t codes = 1;
    for (std::size_t k = 0; k < n; ++k) codes *= 3;
    for (std::size_t code = 0; code < codes; ++code) {
      VertexSet v, t;
      std::size_t rest = code;
      for (std::size_t k = 0; k < n; ++k, rest /= 3) {
        if (rest % 3 == 1) v.insert(Vertex(k));
        if (rest % 3 == 2) t.insert(Vertex(k));
      }
      worst = std::max(worst, max_abs_diff(eval_finstoch(m, causal_effect(dag, v, t)), oracle::interventional(m, v, t)));
      ++checks;
    }
  }
  char buf[160];
  std::snprintf(buf, sizeof buf, "test oracle: %zu models, %zu (v,t) checks, max gap %.3g (tol 1e-12)", models, checks, worst);
  return {worst <= 1e-12, buf};
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
  auto wanted = [&](int k) { return only.empty() || only.count(k) > 0; };

  struct Criterion {
    int id;
    const char* name;
    Outcome (*run)();
  };
  const Criterion criteria[] = {
      {1, "theorem suite", [] { return from_suite(verify_theorems(base())); }},
      {2, "marginal lemma", [] { return from_suite(verify_marginal_lemma(base())); }},
      {3, "ancestry", [] { return from_suite(verify_ancestry(base())); }},
      {4, "functor vs oracle",
       [] {
         VerifyConfig cfg = base();
         cfg.models = 100;
         Outcome a = from_suite(verify_functor_oracle(cfg));
         const Outcome b = functor_vs_test_oracle(100);
         return Outcome{a.passed && b.passed, a.detail + "; " + b.detail};
       }},
      {5, "surgery soundness fuzz",
       [] {
         VerifyConfig cfg = base();
         cfg.fuzz_diagrams = 1000;
         return from_suite(verify_surgery_fuzz(cfg));
       }},
      {6, "corollary sufficiency",
       [] {
         VerifyConfig cfg = base();
         cfg.models = 200;
         return from_suite(verify_rule_soundness(cfg));
       }},
      {7, "necessity probe",
       [] {
         VerifyConfig cfg = base();
         cfg.probe_models = 200;
         cfg.probe_max_vertices = 4;
         cfg.probe_rate = 0.95;
         cfg.probe_gap = 1e-6;
         return from_suite(verify_necessity_probe(cfg));
       }},
      {8, "W-empty equivalence", [] { return from_suite(verify_pearl_equivalence(base())); }},
      {9, "local Markov recovery",
       [] {
         VerifyConfig cfg = base();
         cfg.models = 100;
         return from_suite(verify_local_markov(cfg));
       }},
      {10, "deterministic contrast",
       [] {
         VerifyConfig cfg = base();
         cfg.models = 100;
         return from_suite(verify_deterministic_contrast(cfg));
       }},
  };

  bool all = true;
  for (const Criterion& c : criteria) {
    if (!wanted(c.id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("[%s] criterion %d (%s): %s [%.1f s]\n", o.passed ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), secs);
    std::fflush(stdout);
    all = all && o.passed;
  }
  return all ? 0 : 1;
}
