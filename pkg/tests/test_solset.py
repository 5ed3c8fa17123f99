import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from instances import k_singular_everywhere, r0_singular_scalar, scalar, two_root_scalar
from wienerhopf.core import InvalidRepresentationError
from wienerhopf.generate import instance_from_seed, rng_from_seed
from wienerhopf.riccati import r0_invertible
from wienerhopf.solset import check_r0_lemma, classify, find_invertibilizing_q, scalar_solution_sets

seeds = st.integers(0, 2**31 - 1)


def _same_roots(a, b, tol=1e-8):
    if len(a) != len(b):
        return False
    return all(min(abs(x - y) for y in b) <= tol * max(1.0, abs(x)) for x in a)


def test_classify_first_example():
    rep = r0_singular_scalar(0.5)
    c = classify(rep, [[0.5]])
    assert c.in_ricc1 and c.admissible_ricc1
    assert not c.r0_invertible and not c.in_ricc2 and c.residual_ricc2 is None
    c = classify(rep, [[2.0]])
    assert not c.admissible_ricc1 and not c.in_ricc1 and not c.in_ricc2


def test_classify_two_root_instance():
    rep = two_root_scalar(0.5, 0.5, 1.0, 2.0)
    c = classify(rep, [[4.0]])
    assert c.in_ricc2 and not c.admissible_ricc1 and not c.in_ricc2_prime
    c = classify(rep, [[0.5]])
    assert c.in_ricc1 and c.in_ricc2 and c.in_ricc2_prime
    assert not classify(rep, [[1.0]]).in_ricc2


def test_sets_first_example():
    s = scalar_solution_sets(r0_singular_scalar(0.5))
    assert _same_roots(s.ricc1_roots, [0.5], 1e-10)
    assert s.ricc2_roots == [] and not s.r0_invertible
    assert _same_roots(s.rejected, [2.0], 1e-10)
    assert any("R(0) not invertible" in n for n in s.notes)


def test_sets_two_root_instance():
    s = scalar_solution_sets(two_root_scalar(0.5, 0.5, 1.0, 2.0))
    assert _same_roots(s.ricc1_roots, [0.5], 1e-10)
    assert _same_roots(s.ricc2_roots, [0.5, 4.0], 1e-10)
    assert _same_roots(s.ricc2_prime_roots, [0.5], 1e-10)


def test_sets_decoupled_minus_part():
    s = scalar_solution_sets(scalar(1.0, 0.3, 0.5, 0.2, 0.0, 0.4, 0.0))
    assert _same_roots(s.ricc1_roots, [0.0], 1e-12)
    assert _same_roots(s.ricc2_roots, [0.0], 1e-12)


def test_sets_singular_k_instances():
    s = scalar_solution_sets(k_singular_everywhere(0.5, 0.5, [1.0, 0.0]))
    assert s.ricc1_roots == [] and not s.ricc1_all
    assert _same_roots(s.ricc2_roots, [2.0], 1e-10)
    s = scalar_solution_sets(k_singular_everywhere(0.5, 0.5, [0.0, 0.5]))
    assert s.ricc2_all and s.ricc2_roots == []
    assert any("vanishes identically" in n for n in s.notes)


@settings(max_examples=30, deadline=None)
@given(st.floats(0.05, 0.95), st.floats(0.05, 0.95))
def test_identically_zero_equation_survives_rounding(ap, am):
    # the cancellation is exact in real arithmetic but leaves rounding noise in floating point
    s = scalar_solution_sets(k_singular_everywhere(ap, am, [0.0, ap]))
    assert s.ricc2_all and s.ricc2_roots == []
    s = scalar_solution_sets(k_singular_everywhere(ap, am, [1.0, 0.0]))
    assert not s.ricc2_all and _same_roots(s.ricc2_roots, [1 / ap], 1e-10)


def test_sets_need_scalar_state():
    with pytest.raises(InvalidRepresentationError):
        scalar_solution_sets(instance_from_seed(0))


def test_sets_serialize():
    d = scalar_solution_sets(two_root_scalar(0.5, 0.5, 1.0, 2.0)).to_dict()
    assert set(d) >= {"ricc1", "ricc2", "ricc2_prime_roots", "rejected_spurious", "r0_invertible"}


def _random_scalar(seed):
    rng = rng_from_seed(seed)
    d = rng.uniform(-3, 3) + 1j * rng.uniform(-3, 3)
    gp, bp, gm, bm = rng.uniform(-2, 2, 4) + 1j * rng.uniform(-2, 2, 4)
    ap, am = rng.uniform(0.05, 0.95, 2) * np.exp(2j * np.pi * rng.uniform(size=2))
    return scalar(d, gp, ap, bp, gm, am, bm)


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_set_relations_scalar(seed):
    rep = _random_scalar(seed)
    s = scalar_solution_sets(rep)
    if not s.r0_invertible:
        assert s.ricc2_roots == []
        return
    assert _same_roots(s.ricc1_roots, s.ricc2_prime_roots)
    assert all(min(abs(q - r) for r in s.ricc2_roots) <= 1e-8 * max(1, abs(q)) for q in s.ricc1_roots)


@settings(max_examples=25, deadline=None)
@given(seeds)
def test_set_relations_two_channels(seed):
    rep = instance_from_seed(seed, (1, 1, 2), coupling=1.5)
    s = scalar_solution_sets(rep)
    for c in s.ricc1:
        assert c.residual_ricc1 <= 1e-8
    if s.r0_invertible:
        assert _same_roots(s.ricc1_roots, s.ricc2_prime_roots)


def test_r0_relations_each_branch():
    v = check_r0_lemma(r0_singular_scalar(0.5), [[0.5]])
    assert v.ok and v.notes == ["(b) holds"]
    v = check_r0_lemma(two_root_scalar(0.5, 0.5, 1.0, 2.0), [[0.5]])
    assert v.ok and "(a) holds" in v.notes and v.measures["inverse_formula_gap"] <= 1e-12
    v = check_r0_lemma(two_root_scalar(0.5, 0.5, 1.0, 2.0), [[4.0]])
    assert v.ok and v.notes == ["(c) holds"] and v.measures["formula_norm"] == pytest.approx(0.0, abs=1e-12)
    v = check_r0_lemma(k_singular_everywhere(0.5, 0.5, [1.0, 0.0]), [[2.0]])
    assert v.ok and v.measures["formula_norm"] == 0.0


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_r0_relations_hold_for_random_q(seed):
    rep = instance_from_seed(seed, (2, 2, 2), coupling=2.0)
    Q = rng_from_seed(seed + 1).standard_normal((2, 2))
    assert check_r0_lemma(rep, Q).ok


def test_r0_relations_need_invertible_alpha_minus():
    with pytest.raises(InvalidRepresentationError):
        check_r0_lemma(scalar(1.0, 1.0, 0.5, 1.0, 1.0, 0.0, 1.0), [[0.1]])


def test_invertibilizing_q_examples():
    Q = find_invertibilizing_q(np.zeros((2, 2)), np.eye(2), np.eye(2))
    assert abs(np.linalg.det(-Q)) > 1e-6
    # U - q e1 e1^T keeps the zero second row
    assert find_invertibilizing_q(np.diag([1.0, 0.0]), [[1.0], [0.0]], [[1.0, 0.0]]) is None
    Q = find_invertibilizing_q(np.diag([0.0, 1.0]), [[1.0], [0.0]], [[1.0, 0.0]])
    assert abs(np.linalg.det(np.diag([0.0, 1.0]) - np.array([[Q[0, 0], 0], [0, 0]]))) > 1e-6


def _random_low_rank(rng, rows, cols, rank):
    return rng.standard_normal((rows, rank)) @ rng.standard_normal((rank, cols))


def _rank_deficient_case(seed):
    rng = rng_from_seed(seed)
    n, k, l = 4, int(rng.integers(1, 4)), int(rng.integers(1, 4))
    U = _random_low_rank(rng, n, n, int(rng.integers(1, 5)))
    V = _random_low_rank(rng, n, k, int(rng.integers(k // 2, k + 1)))
    W = _random_low_rank(rng, l, n, int(rng.integers(l // 2, l + 1)))
    return rng, U, V, W


@pytest.mark.parametrize("seed", range(16))
def test_invertibilizing_q_against_random_search(seed):
    rng, U, V, W = _rank_deficient_case(seed)
    k, l = V.shape[1], W.shape[0]
    # oracle: a generic Q works whenever any Q does, so random draws decide existence
    Qs = rng.standard_normal((10_000, k, l))
    dets = np.abs(np.linalg.det(U[None] - V[None] @ Qs @ W[None]))
    exists = bool(dets.max() > 1e-8)
    Q = find_invertibilizing_q(U, V, W)
    assert (Q is not None) == exists
    if Q is not None:
        M = U - V @ Q @ W
        assert np.linalg.svd(M, compute_uv=False)[-1] > 1e-8


def test_random_search_sees_both_outcomes():
    outcomes = set()
    for seed in range(16):
        _, U, V, W = _rank_deficient_case(seed)
        outcomes.add(find_invertibilizing_q(U, V, W) is None)
    assert outcomes == {True, False}


def test_r0_invertibility_agrees_with_classification():
    rep = two_root_scalar(0.5, 0.5, 1.0, 1.0)
    assert not r0_invertible(rep)
    assert not classify(rep, [[2.0]]).in_ricc2
