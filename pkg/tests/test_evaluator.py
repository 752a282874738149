from __future__ import annotations

import math

import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from epistom.btom import Belief
from epistom.elot import DEFAULT_THRESHOLDS, ThresholdTable, parse_elot, parse_term
from epistom.evaluator import (
    eval_epistemic,
    likelihood_ratio_score,
    normalized_likelihood,
    prob_of,
    score_statement,
    statement_posterior,
    statement_prior,
)
from epistom.evaluator.semantics import grid_domain
from epistom.gridworld import enumerate_initial_states, observe

from formulas import Vocabulary, base_formula, statement
from oracles import epistemic_truth, oracle_prob
from worlds import world

SC = world("two_doors_small")
GRID = SC.grid
VOCAB = Vocabulary(
    boxes=[b.name for b in GRID.boxes], doors=[d.name for d in GRID.doors], gems=[g.name for g in GRID.gems],
    colors=list(GRID.colors),
)
POSTERIOR = SC.posterior(k=3)
PAIRS = [[pb for pb in POSTERIOR.pair_groups(t)[0] if pb[1] is not None] for t in range(SC.T + 1)]
STATES = enumerate_initial_states(GRID, observe(SC.initial_state), SC.rules)
NAMES = ("believes", "certain", "uncertain", "likely", "unlikely", "could", "might", "may", "should", "must")


@st.composite
def world_and_belief(draw):
    """Either a (state, belief) pair reached by inference or a random belief over the initial worlds."""
    if draw(st.booleans()):
        t = draw(st.integers(0, SC.T))
        return draw(st.sampled_from(PAIRS[t]))
    idx = draw(st.lists(st.integers(0, len(STATES) - 1), min_size=1, max_size=4, unique=True))
    raw = [draw(st.integers(1, 6)) for _ in idx]
    b = Belief.from_weights([(STATES[i], r / sum(raw)) for i, r in zip(idx, raw)])
    return draw(st.sampled_from(STATES)), b


@st.composite
def thresholds(draw):
    if draw(st.booleans()):
        return DEFAULT_THRESHOLDS
    vals = {n: draw(st.sampled_from([0.1, 0.2, 1 / 3, 0.5, 0.6, 2 / 3, 0.75, 0.9, 1.0])) for n in NAMES}
    return ThresholdTable(most=draw(st.sampled_from([1.0, 1.2, 1.5, 2.0])), **vals)


@settings(max_examples=500, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(base_formula(VOCAB), world_and_belief())
def test_prob_of_matches_oracle(phi, pair):
    _, b = pair
    assert abs(prob_of(b, phi) - oracle_prob(list(b.items()), phi)) <= 1e-12


@settings(max_examples=1200, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(statement(VOCAB), world_and_belief(), thresholds())
def test_eval_matches_direct_semantics(f, pair, th):
    s, b = pair
    got = eval_epistemic(f, s, b, th, grid_domain(GRID))
    assert got == epistemic_truth(f, s, list(b.items()), th)


def test_knows_requires_truth():
    s = next(x for x in STATES if x.contents[0] is None)
    other = next(x for x in STATES if x.contents[0] is not None)
    b = Belief.from_weights([(s, 0.1), (other, 0.9)])
    f = parse_elot("knows_that(player, formula(exists(key(K), inside(K, box1))))")
    assert not eval_epistemic(f, s, b)
    assert eval_epistemic(f, other, b)
    believes = parse_elot("believes(player, formula(exists(key(K), inside(K, box1))))")
    assert eval_epistemic(believes, s, b)


def test_prob_of_point_belief_is_truth():
    for s in STATES:
        b = Belief.point(s)
        for text in ("empty(box1)", "empty(box2)", "exists(and(key(K), iscolor(K, red)), inside(K, box1))"):
            phi = parse_term(text)
            assert prob_of(b, phi) in (0.0, 1.0)


@settings(max_examples=300)
@given(st.floats(0, 1), st.floats(0.001, 0.999))
def test_likelihood_ratio_properties(q, pi):
    l = likelihood_ratio_score(q, pi)
    assert 0.0 <= l <= 1.0
    assert math.isclose(likelihood_ratio_score(pi, pi), 0.5)
    if q > pi:
        assert l >= 0.5 - 1e-12


def test_likelihood_ratio_degenerate_prior():
    assert likelihood_ratio_score(0.3, 0.0) == 0.3
    assert likelihood_ratio_score(0.7, 1.0) == 0.7


def test_no_evidence_gives_half():
    f = parse_elot("believes(player, formula(exists(key(K), inside(K, box1))))")
    assert math.isclose(normalized_likelihood(f, POSTERIOR.at(0), 0), 0.5)


def test_tautology_is_certain():
    f = parse_elot("or(believes(player, formula(empty(box1))), not(believes(player, formula(empty(box1)))))")
    for t in range(SC.T + 1):
        sc = score_statement(f, POSTERIOR, t)
        assert sc.posterior == 1.0 and sc.normalized_likelihood == 1.0


def test_worlds_prior_reports_raw_posterior():
    f = parse_elot("believes(player, might(exists(key(K), inside(K, box2))))")
    t = 2
    q = statement_posterior(f, POSTERIOR, t)
    sc = score_statement(f, POSTERIOR, t, prior="worlds")
    assert sc.normalized_likelihood == q == sc.posterior
    assert 0.0 <= statement_prior(f, POSTERIOR, t) <= 1.0
    with pytest.raises(ValueError):
        score_statement(f, POSTERIOR, t, prior="flat")


def test_posterior_is_weighted_truth():
    f = parse_elot("believes(player, formula(exists(and(key(K), iscolor(K, red)), inside(K, box1))))")
    for t in (0, 2, SC.T):
        w = POSTERIOR.weights()
        want = sum(wh for h, wh in enumerate(w)
                   if wh > 0 and eval_epistemic(f, POSTERIOR.state(h, t), POSTERIOR.belief(h, t)))
        assert math.isclose(statement_posterior(f, POSTERIOR, t), want / w.sum(), abs_tol=1e-12)


def test_degree_term_is_not_a_statement():
    f = parse_term("degree(likely, player, empty(box1))")
    with pytest.raises((TypeError, ValueError)):
        eval_epistemic(f, STATES[0], Belief.point(STATES[0]))
