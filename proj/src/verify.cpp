#include "causalcat/verify.hpp"

#include <atomic>
#include <chrono>
#include <cstdio>
#include <memory>
#include <random>
#include <sstream>
#include <thread>
#include <unordered_map>

#include "causalcat/dag.hpp"
#include "causalcat/diagram.hpp"
#include "causalcat/docalc.hpp"
#include "causalcat/effects.hpp"
#include "causalcat/enumerate.hpp"
#include "causalcat/semantics.hpp"
#include "causalcat/treks.hpp"

namespace causalcat {

namespace {

constexpr std::size_t kMaxExamples = 8;

struct Tally {
  std::uint64_t checks = 0;
  std::uint64_t failures = 0;
  std::vector<std::string> examples;

  void check(bool ok, const std::function<std::string()>& describe) {
    ++checks;
    if (ok) return;
    ++failures;
    if (examples.size() < kMaxExamples) examples.push_back(describe());
  }
  void merge(Tally&& other) {
    checks += other.checks;
    failures += other.failures;
    for (auto& e : other.examples) {
      if (examples.size() < kMaxExamples) examples.push_back(std::move(e));
    }
  }
};

// Runs work(i) for i < count on up to `threads` workers; results come back in
// index order whatever the completion order.
template <typename R, typename F>
std::vector<R> parallel_map(std::size_t count, std::size_t threads, F work) {
  std::vector<R> out(count);
  threads = std::max<std::size_t>(1, std::min(threads, count));
  if (threads == 1) {
    for (std::size_t i = 0; i < count; ++i) out[i] = work(i);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(threads);
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (std::size_t i = next++; i < count; i = next++) out[i] = work(i);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

template <typename F>
Tally tally_over(std::size_t count, std::size_t threads, F work) {
  auto parts = parallel_map<Tally>(count, threads, work);
  Tally total;
  for (auto& p : parts) total.merge(std::move(p));
  return total;
}

std::vector<DagPtr> enumerate(std::size_t max_vertices) {
  std::vector<DagPtr> out;
  for (Dag& d : all_dags_up_to(max_vertices)) out.push_back(std::make_shared<const Dag>(std::move(d)));
  return out;
}

std::string describe(const Dag& dag) {
  std::string s = "{";
  for (std::size_t i = 0; i < dag.edges().size(); ++i) {
    const auto& [a, b] = dag.edges()[i];
    s += (i ? "," : "") + dag.name(a) + "->" + dag.name(b);
  }
  return s + "} on " + std::to_string(dag.size()) + " vertices";
}

std::string describe(const Dag& dag, const Triple& t) {
  return describe(dag) + " u=" + dag.format(t.u) + " v=" + dag.format(t.v) + " w=" + dag.format(t.w);
}

// splitmix64 finalizer over (seed, a, b).
std::uint64_t mix(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (a + 1) + 0xD1B54A32D192ED03ULL * (b + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Random DAG on between lo and hi vertices for model index i.
DagPtr random_instance(std::uint64_t seed, std::size_t i, std::size_t lo, std::size_t hi) {
  std::mt19937_64 rng(mix(seed, i, 1));
  const std::size_t n = lo + static_cast<std::size_t>(rng() % (hi - lo + 1));
  return std::make_shared<const Dag>(random_dag(n, rng));
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

SuiteResult finish(std::string name, Tally&& tally, std::string summary, const Stopwatch& clock, bool extra_ok = true) {
  SuiteResult r;
  r.name = std::move(name);
  r.checks = tally.checks;
  r.failures = tally.failures;
  r.passed = tally.failures == 0 && extra_ok;
  r.summary = std::move(summary);
  r.examples = std::move(tally.examples);
  r.seconds = clock.seconds();
  return r;
}

}  // namespace

std::string SuiteResult::line() const {
  std::ostringstream os;
  os << (passed ? "[PASS] " : "[FAIL] ") << name << ": " << summary << " (" << fmt(seconds) << " s)";
  return os.str();
}

SuiteResult verify_theorems(const VerifyConfig& cfg) {
  Stopwatch clock;
  const auto dags = enumerate(cfg.max_vertices);
  std::vector<std::uint64_t> triples(dags.size(), 0);
  Tally t = tally_over(dags.size(), cfg.threads, [&](std::size_t i) {
    Tally local;
    const Dag& dag = *dags[i];
    EffectCache cache(dags[i]);
    for_each_triple(dag.vertices(), [&](const Triple& q) {
      ++triples[i];
      const bool dec = decomposable_over(cache, q.u, q.v, q.w);
      const bool bwd = backward_t_separated(dag, q.v, q.w, q.u);
      local.check(dec == bwd, [&] { return describe(dag, q) + ": decomposable=" + std::to_string(dec) + " backward=" + std::to_string(bwd); });
      const bool scr = screened_off(cache, q.u, q.v, q.w);
      const bool fwd = forward_t_separated(dag, q.v, q.w, q.u);
      local.check(scr == fwd, [&] { return describe(dag, q) + ": screened=" + std::to_string(scr) + " forward=" + std::to_string(fwd); });
      const bool ind = cond_independent(cache, q.u, q.v, q.w);
      const bool sep = t_separated(dag, q.v, q.w, q.u);
      local.check(ind == sep, [&] { return describe(dag, q) + ": independent=" + std::to_string(ind) + " t-separated=" + std::to_string(sep); });
    });
    return local;
  });
  std::uint64_t total = 0;
  for (auto n : triples) total += n;
  const std::string summary = std::to_string(dags.size()) + " DAGs, " + std::to_string(total) + " triples x 3 predicates, " +
                              std::to_string(t.failures) + " mismatches";
  return finish("theorems", std::move(t), summary, clock);
}

SuiteResult verify_marginal_lemma(const VerifyConfig& cfg) {
  Stopwatch clock;
  const auto dags = enumerate(cfg.max_vertices);
  Tally t = tally_over(dags.size(), cfg.threads, [&](std::size_t i) {
    Tally local;
    const Dag& dag = *dags[i];
    EffectCache cache(dags[i]);
    for_each_triple(dag.vertices(), [&](const Triple& q) {
      const TermGraph m = discard_outputs(cache.get(q.v | q.w, q.u).terms(), sorted_word(q.v));
      local.check(m.canonical().key() == cache.get(q.w, q.u).key(), [&] { return describe(dag, q); });
    });
    return local;
  });
  const std::string summary = std::to_string(dags.size()) + " DAGs, " + std::to_string(t.checks) + " triples, " +
                              std::to_string(t.failures) + " mismatches";
  return finish("marginal-lemma", std::move(t), summary, clock);
}

SuiteResult verify_ancestry(const VerifyConfig& cfg) {
  Stopwatch clock;
  const auto dags = enumerate(cfg.max_vertices);
  Tally t = tally_over(dags.size(), cfg.threads, [&](std::size_t i) {
    Tally local;
    const Dag& dag = *dags[i];
    for (Vertex v : dag.vertices()) {
      for (Vertex w : dag.vertices()) {
        if (v == w) continue;
        const bool connected = connected_in_effect(dags[i], v, w);
        const bool ancestor = ancestors(dag, w).contains(v);
        local.check(connected == ancestor, [&] {
          return describe(dag) + " v=" + dag.name(v) + " w=" + dag.name(w) + ": connected=" + std::to_string(connected);
        });
      }
    }
    return local;
  });
  const std::string summary = std::to_string(dags.size()) + " DAGs, " + std::to_string(t.checks) + " ordered pairs, " +
                              std::to_string(t.failures) + " mismatches";
  return finish("ancestry", std::move(t), summary, clock);
}

SuiteResult verify_functor_oracle(const VerifyConfig& cfg) {
  Stopwatch clock;
  std::vector<double> worst(cfg.models, 0.0);
  Tally t = tally_over(cfg.models, cfg.threads, [&](std::size_t i) {
    Tally local;
    const DagPtr dag = random_instance(cfg.seed, i, 1, cfg.max_vertices);
    const CbnModel m = random_positive_model(dag, 2, mix(cfg.seed, i, 2));
    std::mt19937_64 rng(mix(cfg.seed, i, 3));
    const Word all = sorted_word(dag->vertices());
    std::size_t codes = 1;
    for (std::size_t k = 0; k < all.size(); ++k) codes *= 3;
    for (std::size_t code = 0; code < codes; ++code) {
      VertexSet v;
      VertexSet tr;
      std::size_t rest = code;
      for (Vertex x : all) {
        if (rest % 3 == 1) v.insert(x);
        if (rest % 3 == 2) tr.insert(x);
        rest /= 3;
      }
      const Morphism f = causal_effect(dag, v, tr);
      const StochMatrix oracle = interventional_matrix(m, sorted_word(v), sorted_word(tr));
      const double gap = max_abs_diff(eval_finstoch(m, f), oracle);
      worst[i] = std::max(worst[i], gap);
      local.check(gap <= cfg.exact_tol, [&] {
        return describe(*dag) + " [" + dag->format(v) + "||" + dag->format(tr) + "]: gap " + fmt(gap);
      });
      // The component-fused diagram, in a random fuse order.
      std::vector<Vertex> order = sorted_word(effect_subgraph(*dag, tr, v).vertices);
      std::shuffle(order.begin(), order.end(), rng);
      const StringDiagram fused = effect_diagram(dag, v, tr, order);
      const double fused_gap = max_abs_diff(eval_finstoch(m, fused), oracle);
      worst[i] = std::max(worst[i], fused_gap);
      local.check(fused_gap <= cfg.exact_tol && normalize(fused) == f, [&] {
        return describe(*dag) + " fused [" + dag->format(v) + "||" + dag->format(tr) + "]: gap " + fmt(fused_gap);
      });
    }
    return local;
  });
  double w = 0.0;
  for (double x : worst) w = std::max(w, x);
  const std::string summary = std::to_string(cfg.models) + " models, " + std::to_string(t.checks) + " (v,t) checks, max gap " +
                              fmt(w) + " (tol " + fmt(cfg.exact_tol) + "), " + std::to_string(t.failures) + " failures";
  return finish("functor-vs-oracle", std::move(t), summary, clock);
}

SuiteResult verify_surgery_fuzz(const VerifyConfig& cfg) {
  Stopwatch clock;
  std::vector<double> worst(cfg.fuzz_diagrams, 0.0);
  std::vector<std::uint64_t> applied(cfg.fuzz_diagrams, 0);
  Tally t = tally_over(cfg.fuzz_diagrams, cfg.threads, [&](std::size_t i) {
    Tally local;
    const DagPtr dag = random_instance(cfg.seed, i, 1, std::min<std::size_t>(cfg.max_vertices, 5));
    std::mt19937_64 rng(mix(cfg.seed, i, 4));
    const StringDiagram d = random_diagram(dag, rng, 4 + rng() % 10);
    const std::size_t count = 1 + rng() % std::max<std::size_t>(1, cfg.fuzz_surgeries);
    const StringDiagram e = random_surgeries(d, rng, count);
    applied[i] = count;
    const CbnModel m = random_positive_model(dag, 2, mix(cfg.seed, i, 5));
    const Morphism nd = normalize(d);
    const Morphism ne = normalize(e);
    local.check(nd == ne, [&] { return "diagram " + std::to_string(i) + ": normal forms differ\n" + to_text(d) + to_text(e); });
    local.check(normalize(nd.diagram()) == nd, [&] { return "diagram " + std::to_string(i) + ": normalize not idempotent"; });
    local.check(path_signature(d) == path_signature(e) && path_signature(d) == path_signature(nd.diagram()),
                [&] { return "diagram " + std::to_string(i) + ": path invariants differ"; });
    const StochMatrix sd = eval_finstoch(m, d);
    const double gap = std::max(max_abs_diff(sd, eval_finstoch(m, e)), max_abs_diff(sd, eval_finstoch(m, nd)));
    worst[i] = gap;
    local.check(gap <= cfg.exact_tol, [&] { return "diagram " + std::to_string(i) + ": semantic gap " + fmt(gap); });
    return local;
  });
  double w = 0.0;
  std::uint64_t surgeries = 0;
  for (std::size_t i = 0; i < worst.size(); ++i) {
    w = std::max(w, worst[i]);
    surgeries += applied[i];
  }
  const std::string summary = std::to_string(cfg.fuzz_diagrams) + " diagrams, " + std::to_string(surgeries) +
                              " surgeries, max semantic gap " + fmt(w) + ", " + std::to_string(t.failures) + " failures";
  return finish("surgery-fuzz", std::move(t), summary, clock);
}

SuiteResult verify_rule_soundness(const VerifyConfig& cfg) {
  Stopwatch clock;
  std::vector<double> worst(cfg.models, 0.0);
  Tally t = tally_over(cfg.models, cfg.threads, [&](std::size_t i) {
    Tally local;
    const DagPtr dag = random_instance(cfg.seed, i, 2, cfg.max_vertices);
    const CbnModel m = random_positive_model(dag, 2, mix(cfg.seed, i, 6));
    for_each_triple(dag->vertices(), [&](const Triple& q) {
      for (int rule = 1; rule <= 3; ++rule) {
        const RuleQuery rq{rule, q.u, q.v, q.w};
        if (!rule_applicable(*dag, rq)) continue;
        const double gap = verify_rule_semantics(m, rq);
        worst[i] = std::max(worst[i], gap);
        local.check(gap <= cfg.stat_tol, [&] { return describe(*dag, q) + " rule " + std::to_string(rule) + ": gap " + fmt(gap); });
      }
      const std::pair<bool, Equation> eqs[] = {{backward_t_separated(*dag, q.v, q.w, q.u), Equation::decomposition},
                                               {forward_t_separated(*dag, q.v, q.w, q.u), Equation::screening},
                                               {t_separated(*dag, q.v, q.w, q.u), Equation::independence}};
      for (const auto& [holds, eq] : eqs) {
        if (!holds) continue;
        const double gap = semantic_gap(m, q.u, q.v, q.w, eq);
        worst[i] = std::max(worst[i], gap);
        local.check(gap <= cfg.stat_tol, [&] { return describe(*dag, q) + " equation " + std::to_string(static_cast<int>(eq)) + ": gap " + fmt(gap); });
      }
    });
    return local;
  });
  double w = 0.0;
  for (double x : worst) w = std::max(w, x);
  const std::string summary = std::to_string(cfg.models) + " models, " + std::to_string(t.checks) +
                              " applicable rule/equation instances, max gap " + fmt(w) + " (tol " + fmt(cfg.stat_tol) + ")";
  return finish("rule-soundness", std::move(t), summary, clock);
}

SuiteResult verify_necessity_probe(const VerifyConfig& cfg) {
  Stopwatch clock;
  const auto dags = enumerate(cfg.probe_max_vertices);
  struct Part {
    std::uint64_t failing = 0;
    std::uint64_t witnessed = 0;
    std::uint64_t models_tried = 0;
    std::vector<std::string> unwitnessed;
  };
  auto parts = parallel_map<Part>(dags.size(), cfg.threads, [&](std::size_t i) {
    Part part;
    const Dag& dag = *dags[i];
    std::vector<std::unique_ptr<CbnModel>> models(cfg.probe_models);
    auto model = [&](std::size_t j) -> const CbnModel& {
      if (!models[j]) models[j] = std::make_unique<CbnModel>(random_positive_model(dags[i], 2, mix(cfg.seed, i, 1000 + j)));
      return *models[j];
    };
    for_each_triple(dag.vertices(), [&](const Triple& q) {
      if (backward_t_separated(dag, q.v, q.w, q.u)) return;
      ++part.failing;
      for (std::size_t j = 0; j < cfg.probe_models; ++j) {
        ++part.models_tried;
        if (semantic_gap(model(j), q.u, q.v, q.w, Equation::decomposition) > cfg.probe_gap) {
          ++part.witnessed;
          return;
        }
      }
      part.unwitnessed.push_back(describe(dag, q));
    });
    return part;
  });
  Part total;
  Tally t;
  for (auto& p : parts) {
    total.failing += p.failing;
    total.witnessed += p.witnessed;
    total.models_tried += p.models_tried;
    for (auto& s : p.unwitnessed) {
      if (t.examples.size() < kMaxExamples) t.examples.push_back("not witnessed: " + s);
    }
  }
  t.checks = total.failing;
  const double rate = total.failing ? static_cast<double>(total.witnessed) / static_cast<double>(total.failing) : 1.0;
  const std::string summary = std::to_string(total.failing) + " triples failing backward-t-separation, " +
                              std::to_string(total.witnessed) + " witnessed (" + fmt(100.0 * rate) + "%, need " +
                              fmt(100.0 * cfg.probe_rate) + "%), " + std::to_string(total.failing - total.witnessed) +
                              " not witnessed";
  SuiteResult r = finish("necessity-probe", std::move(t), summary, clock, rate >= cfg.probe_rate);
  r.failures = total.failing - total.witnessed;
  return r;
}

SuiteResult verify_pearl_equivalence(const VerifyConfig& cfg) {
  Stopwatch clock;
  const auto dags = enumerate(cfg.max_vertices);
  Tally t = tally_over(dags.size(), cfg.threads, [&](std::size_t i) {
    Tally local;
    const Dag& dag = *dags[i];
    for_each_triple(dag.vertices(), [&](const Triple& q) {
      for (int rule = 1; rule <= 3; ++rule) {
        const RuleQuery rq{rule, q.u, q.v, q.w};
        const bool ours = rule_applicable(dag, rq);
        const bool pearl = pearl_rule_applicable_w_empty(dag, rq);
        local.check(ours == pearl, [&] {
          return describe(dag) + " X=" + dag.format(q.u) + " Y=" + dag.format(q.v) + " Z=" + dag.format(q.w) + " rule " +
                 std::to_string(rule) + ": t-sep=" + std::to_string(ours) + " pearl=" + std::to_string(pearl);
        });
      }
    });
    return local;
  });
  const std::string summary = std::to_string(dags.size()) + " DAGs, " + std::to_string(t.checks) + " (query, rule) pairs, " +
                              std::to_string(t.failures) + " mismatches";
  return finish("pearl-equivalence", std::move(t), summary, clock);
}

SuiteResult verify_local_markov(const VerifyConfig& cfg) {
  Stopwatch clock;
  std::vector<double> worst(cfg.models, 0.0);
  Tally t = tally_over(cfg.models, cfg.threads, [&](std::size_t i) {
    Tally local;
    const DagPtr dag = random_instance(cfg.seed, i, 1, cfg.max_vertices);
    const CbnModel m = random_positive_model(dag, 2, mix(cfg.seed, i, 7));
    for (Vertex v : dag->vertices()) {
      const double gap = local_markov_gap(m, v);
      worst[i] = std::max(worst[i], gap);
      local.check(gap <= cfg.stat_tol, [&] { return describe(*dag) + " vertex " + dag->name(v) + ": gap " + fmt(gap); });
    }
    const std::uint64_t subsets = std::uint64_t{1} << dag->size();
    for (std::uint64_t bits = 1; bits < subsets; ++bits) {
      const Word treatment = sorted_word(VertexSet(bits));
      for (std::size_t s = 0; s < state_count(m.card(), treatment); ++s) {
        const auto value = decode_state(m.card(), treatment, s);
        for (Vertex v : dag->vertices()) {
          const double gap = local_markov_gap(m, v, treatment, value);
          worst[i] = std::max(worst[i], gap);
          local.check(gap <= cfg.stat_tol, [&] {
            return describe(*dag) + " vertex " + dag->name(v) + " do(" + dag->format(treatment) + "): gap " + fmt(gap);
          });
        }
      }
    }
    return local;
  });
  double w = 0.0;
  for (double x : worst) w = std::max(w, x);
  const std::string summary = std::to_string(cfg.models) + " models, " + std::to_string(t.checks) +
                              " vertex checks (pre and post intervention), max gap " + fmt(w) + " (tol " + fmt(cfg.stat_tol) + ")";
  return finish("local-markov", std::move(t), summary, clock);
}

SuiteResult verify_deterministic_contrast(const VerifyConfig& cfg) {
  Stopwatch clock;
  std::vector<std::uint64_t> failing(cfg.models, 0);
  Tally t = tally_over(cfg.models, cfg.threads, [&](std::size_t i) {
    Tally local;
    const DagPtr dag = random_instance(cfg.seed, i, 2, cfg.max_vertices);
    std::mt19937_64 rng(mix(cfg.seed, i, 8));
    std::vector<int> card(dag->size());
    for (int& c : card) c = 2 + static_cast<int>(rng() % 2);
    const DetModel m = random_det_model(dag, card, mix(cfg.seed, i, 9));
    EffectCache cache(dag);
    for_each_triple(dag->vertices(), [&](const Triple& q) {
      if (backward_t_separated(*dag, q.v, q.w, q.u)) return;
      ++failing[i];
      const double gap = semantic_gap(m, q.u, q.v, q.w, Equation::decomposition);
      const EquationSides sides = decomposition_sides(cache, q.u, q.v, q.w);
      const bool same = eval_detsem(m, sides.lhs) == eval_detsem(m, sides.rhs);
      local.check(gap == 0.0 && same, [&] { return describe(*dag, q) + ": deterministic gap " + fmt(gap); });
    });
    return local;
  });
  std::uint64_t total = 0;
  for (auto n : failing) total += n;
  const std::string summary = std::to_string(cfg.models) + " deterministic models, " + std::to_string(total) +
                              " triples failing backward-t-separation, " + std::to_string(t.failures) + " with nonzero gap";
  return finish("deterministic-contrast", std::move(t), summary, clock, total > 0);
}

std::vector<std::string> suite_names() {
  return {"theorems", "marginal", "ancestry", "functor", "surgery-fuzz", "rules", "necessity", "pearl", "markov", "deterministic"};
}

std::vector<SuiteResult> run_suite(const std::string& name, const VerifyConfig& cfg) {
  if (name == "theorems") return {verify_theorems(cfg)};
  if (name == "marginal") return {verify_marginal_lemma(cfg)};
  if (name == "ancestry") return {verify_ancestry(cfg)};
  if (name == "functor") return {verify_functor_oracle(cfg)};
  if (name == "surgery-fuzz") return {verify_surgery_fuzz(cfg)};
  if (name == "rules") return {verify_rule_soundness(cfg)};
  if (name == "necessity") return {verify_necessity_probe(cfg)};
  if (name == "pearl") return {verify_pearl_equivalence(cfg)};
  if (name == "markov") return {verify_local_markov(cfg)};
  if (name == "deterministic") return {verify_deterministic_contrast(cfg)};
  if (name == "docalc") return {verify_rule_soundness(cfg), verify_pearl_equivalence(cfg), verify_local_markov(cfg)};
  if (name == "all") {
    std::vector<SuiteResult> out;
    for (const auto& n : suite_names()) out.push_back(run_suite(n, cfg).front());
    return out;
  }
  throw std::invalid_argument("unknown suite: " + name);
}

}  // namespace causalcat
