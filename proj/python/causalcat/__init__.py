"""Causal effects, trek separation and the do-calculus over DAGs."""

from ._causalcat import (
    CausalcatError,
    Dag,
    Model,
    Morphism,
    backward_t_separated,
    causal_effect,
    compose,
    cond_independent,
    connected_in_effect,
    d_separated,
    decomposable_over,
    evaluate,
    forward_t_separated,
    interventional,
    local_markov_gap,
    marginal,
    pearl_rule_applicable,
    rule_applicable,
    rule_gap,
    run_suite,
    screened_off,
    suite_names,
    t_separated,
    tensor,
)

__all__ = [
    "CausalcatError",
    "Dag",
    "Model",
    "Morphism",
    "backward_t_separated",
    "causal_effect",
    "compose",
    "cond_independent",
    "connected_in_effect",
    "d_separated",
    "decomposable_over",
    "evaluate",
    "forward_t_separated",
    "interventional",
    "local_markov_gap",
    "marginal",
    "pearl_rule_applicable",
    "rule_applicable",
    "rule_gap",
    "run_suite",
    "screened_off",
    "suite_names",
    "t_separated",
    "tensor",
]
