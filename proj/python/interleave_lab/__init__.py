"""Interleaving versus A/B testing: closed-form error probabilities and click simulations."""

from ._core import (
    Error,
    check_constant_case,
    check_relevance_aware_case,
    dcg,
    draw_teams,
    error_probability,
    evaluate_scenario,
    examination_fn,
    expected_click_ab,
    expected_click_interleaved,
    monte_carlo_error,
    ndcg,
    normal_cdf,
    parse_letor,
    run_rq1,
    run_rq2,
    score_impression,
    simulate_cascade,
    sweep_grid,
)

__version__ = "0.1.0"

__all__ = [
    "Error",
    "check_constant_case",
    "check_relevance_aware_case",
    "dcg",
    "draw_teams",
    "error_probability",
    "evaluate_scenario",
    "examination_fn",
    "expected_click_ab",
    "expected_click_interleaved",
    "monte_carlo_error",
    "ndcg",
    "normal_cdf",
    "parse_letor",
    "run_rq1",
    "run_rq2",
    "score_impression",
    "simulate_cascade",
    "sweep_grid",
]
