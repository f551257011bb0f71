import sys

sys.path.append("..")

import math

import numpy as np
import pytest

from accounting.notions import DCLIP, NAIVE_CLIP, AdjacencyNotion
from accounting.zcdp import rho_per_token, sensitivity
from evaluation.oracle import ALPHA_GRID, certify_zcdp
from mechanism.clipping import ClipParams, aggregate
from mechanism.sampling import (
    exponential_mechanism_distribution,
    sample_token,
    token_distribution,
)
from mechanism.topk import expanded_top_vocabulary, top_k_set


def test_softmax_closed_form():
    p = token_distribution(np.array([math.log(3), 0.0, 9.0]), np.array([0, 1]), 1.0)
    assert p == pytest.approx([0.75, 0.25, 0.0])


def test_equal_logits_sample_evenly():
    rng = np.random.default_rng(0)
    draws = 100_000
    values = np.array([1.0, 1.0, -3.0])
    hits = sum(
        sample_token(values, np.array([0, 1]), 0.7, rng) == 0 for _ in range(draws)
    )
    sigma = math.sqrt(draws * 0.25)
    assert abs(hits - draws / 2) < 3 * sigma


def test_sample_token_is_reproducible():
    values = np.random.default_rng(1).normal(0, 1, 10)
    members = np.arange(10)
    first = [sample_token(values, members, 1.0, seed) for seed in range(20)]
    second = [sample_token(values, members, 1.0, seed) for seed in range(20)]
    assert first == second


def test_sample_token_stays_in_members():
    values = np.array([9.0, 0.0, 0.0, 0.0])
    members = np.array([1, 2])
    rng = np.random.default_rng(2)
    assert {sample_token(values, members, 1.0, rng) for _ in range(200)} <= {1, 2}


def test_sampling_errors():
    with pytest.raises(ValueError):
        token_distribution(np.zeros(3), np.array([], dtype=int), 1.0)
    with pytest.raises(ValueError):
        token_distribution(np.zeros(3), np.array([0]), 0.0)


def test_large_logits_are_stable():
    p = token_distribution(np.array([1000.0, 999.0]), np.array([0, 1]), 0.01)
    assert np.all(np.isfinite(p))
    assert p.sum() == pytest.approx(1.0)


def test_temperature_form_equals_rho_form():
    rng = np.random.default_rng(3)
    for _ in range(100):
        V = int(rng.integers(2, 12))
        scores = rng.normal(0, 3, V)
        members = np.flatnonzero(rng.random(V) < 0.7)
        if members.size == 0:
            members = np.array([0])
        rho = float(rng.uniform(1e-3, 2.0))
        sens = float(rng.uniform(0.01, 1.0))
        tau = sens / math.sqrt(2 * rho)
        assert np.allclose(
            token_distribution(scores, members, tau),
            exponential_mechanism_distribution(scores, members, rho, sens),
        )


def test_zero_clip_norm_is_public_top_k_bit_for_bit():
    rng = np.random.default_rng(4)
    for _ in range(200):
        V = int(rng.integers(2, 9))
        B = int(rng.integers(1, 4))
        k = int(rng.integers(1, V + 1))
        tau = float(rng.uniform(0.3, 2.0))
        phi_pub = rng.normal(0, 3, V)
        phis = [rng.normal(0, 3, V) for _ in range(B)]
        agg = aggregate(phis, phi_pub, ClipParams(0.0))
        allowed = expanded_top_vocabulary(phi_pub, k, 0.0, B)
        p = token_distribution(agg, allowed, tau)

        top = top_k_set(phi_pub, k)
        z = (phi_pub / tau)[top]
        z = z - z.max()
        weights = np.exp(z)
        expected = np.zeros(V)
        expected[top] = weights / weights.sum()
        assert np.array_equal(p, expected)


def per_token_law(phis, phi_pub, k, C, B, tau, strategy):
    agg = aggregate(phis, phi_pub, ClipParams(C, strategy))
    allowed = expanded_top_vocabulary(phi_pub, k, C, B)
    p = token_distribution(agg, allowed, tau)
    return {(y,): float(p[y]) for y in np.flatnonzero(p > 0)}


@pytest.mark.parametrize("strategy", [DCLIP, NAIVE_CLIP])
@pytest.mark.parametrize(
    "adjacency", [AdjacencyNotion.REPLACE_BY_NULL, AdjacencyNotion.ZERO_OUT]
)
def test_per_token_exact_zcdp(strategy, adjacency):
    rng = np.random.default_rng(5)
    for _ in range(200):
        V = int(rng.integers(2, 9))
        B = int(rng.integers(1, 4))
        k = int(rng.integers(1, V + 1))
        C = float(rng.uniform(0.1, 3.0))
        tau = float(rng.uniform(0.2, 2.0))
        phi_pub = rng.normal(0, 3, V)
        phis = [phi_pub + rng.normal(0, 3, V) for _ in range(B)]
        index = int(rng.integers(B))
        neighbour = list(phis)
        if adjacency is AdjacencyNotion.REPLACE_BY_NULL:
            neighbour[index] = phi_pub.copy()
        else:
            neighbour[index] = np.zeros(V)

        P = per_token_law(phis, phi_pub, k, C, B, tau, strategy)
        Q = per_token_law(neighbour, phi_pub, k, C, B, tau, strategy)
        rho = rho_per_token(C, B, tau, strategy, adjacency)
        assert sensitivity(strategy, adjacency, C, B) > 0
        for certificate in certify_zcdp(P, Q, rho, ALPHA_GRID):
            assert certificate.holds, certificate
