"""Exit criteria of the build, one test per criterion.

Each test records a PASS/FAIL line through ``acceptance_record``; the lines
are repeated in the terminal summary under "acceptance criteria".
"""

import sys

import numpy as np
import pytest

from instances import k_singular_everywhere, r0_singular_scalar, scalar, two_root_scalar
from wienerhopf.core import DEFAULT_TOL, norm2, unit_circle_points
from wienerhopf.factorization import right_factors, verify_factorization
from wienerhopf.generate import (
    blaschke_obstruction,
    direct_sum,
    instance_from_seed,
    mix_constant,
    random_stable,
    rng_from_seed,
)
from wienerhopf.leftright import block_diagonalize, left_exists_given_right
from wienerhopf.representation import (
    StableRepresentation,
    dichotomous_to_stable,
    sharp_dual,
    stable_to_dichotomous,
)
from wienerhopf.riccati import (
    NoStabilizingSolution,
    alpha_minus_circ_inv_formula,
    alpha_plus_circ_r0,
    circ_operators,
    r0_invertible,
    residual_ricc1,
    solve_left_stabilizing,
    solve_right_stabilizing,
)
from wienerhopf.solset import scalar_solution_sets
from wienerhopf.toeplitz import q_truncated, toeplitz_q_oracle

pytestmark = pytest.mark.acceptance

ZS = unit_circle_points(64)
SUITE_SEEDS = range(100)


def _matches(found, expected, tol):
    """Same multiset of roots up to ``tol`` (relative above 1)."""
    if len(found) != len(expected):
        return False
    left = list(expected)
    for q in found:
        k = min(range(len(left)), key=lambda i: abs(q - left[i]))
        if abs(q - left[k]) > tol * max(1.0, abs(left[k])):
            return False
        left.pop(k)
    return True


def _finish(record, number, failures, detail):
    record(number, not failures, detail if not failures else "; ".join(failures[:3]))
    assert not failures, failures


def test_criterion_1_first_example(acceptance_record):
    rep = r0_singular_scalar(0.5)
    failures = []
    res = residual_ricc1(rep, [[0.5]])
    if res > 1e-12:
        failures.append(f"ricc1 residual {res:.3e}")
    cert = circ_operators(rep, [[0.5]], "ricc1")
    if abs(cert.alpha_minus_circ[0, 0]) > 1e-12:
        failures.append(f"alpha_minus_circ = {cert.alpha_minus_circ[0, 0]}")
    if abs(cert.alpha_plus_circ[0, 0] + 2 / 3) > 1e-12:
        failures.append(f"alpha_plus_circ = {cert.alpha_plus_circ[0, 0]}")
    solved = solve_right_stabilizing(rep)
    verdict = verify_factorization(rep, right_factors(rep, solved))
    prod = verdict.measures["product_residual"]
    if not verdict.ok or prod > 1e-10:
        failures.append(f"factorization: {verdict.notes} product residual {prod:.3e}")
    sets = scalar_solution_sets(rep)
    if sets.r0_invertible or sets.ricc2_roots:
        failures.append("R(0) = 0 not detected or ricc2 not empty")
    _finish(acceptance_record, 1, failures, f"ricc1 residual {res:.1e}, product residual {prod:.1e}")


def test_criterion_2_second_instance(acceptance_record):
    # the stated data: ap = am = 0.5, bp = gm = bm = 1, gp = 1, delta = 2
    ap, am, bp, gm, bm, gp, delta = 0.5, 0.5, 1.0, 1.0, 1.0, 1.0, 2.0
    rep = scalar(delta, gp, ap, bp, gm, am, bm)
    sets = scalar_solution_sets(rep)
    failures = []
    if not _matches(sets.ricc1_roots, [ap * bm], 1e-10):
        failures.append(f"ricc1 = {sets.ricc1_roots}, expected [{ap * bm}]")
    if not _matches(sets.ricc2_roots, [gp / ap, bm * ap], 1e-10):
        failures.append(f"ricc2 = {[complex(q) for q in sets.ricc2_roots]}, expected [{gp / ap}, {bm * ap}]"
                        f" (R(0) invertible: {sets.r0_invertible})")
    _finish(acceptance_record, 2, failures, "ricc1 and ricc2 match the closed forms")


def test_second_instance_with_nonzero_r0():
    """Not a criterion: the same family with gp = 2, delta = gp / ap = 4, where R(0) = 2."""
    rep = two_root_scalar(0.5, 0.5, 1.0, 2.0)
    sets = scalar_solution_sets(rep)
    assert sets.r0_invertible
    assert _matches(sets.ricc1_roots, [0.5], 1e-10)
    assert _matches(sets.ricc2_roots, [4.0, 0.5], 1e-10)
    assert _matches(sets.ricc2_prime_roots, [0.5], 1e-10)


def test_criterion_3_singular_k_instances(acceptance_record):
    failures = []
    for ap, am in ((0.5, 0.5), (0.3, 0.7)):
        unique = k_singular_everywhere(ap, am, [1.0, 0.0])
        degenerate = k_singular_everywhere(ap, am, [0.0, ap])
        sets = scalar_solution_sets(unique)
        if sets.ricc2_all or not _matches(sets.ricc2_roots, [1 / ap], 1e-10):
            failures.append(f"ricc2 = {sets.ricc2_roots}, expected [{1 / ap}]")
        if not scalar_solution_sets(degenerate).ricc2_all:
            failures.append(f"ap = {ap}: all-solutions marker missing")
        for name, rep, qs in (("unique", unique, [1 / ap]), ("degenerate", degenerate, [0.0, 1.0, -2.5, 1j])):
            for q in qs:
                if circ_operators(rep, [[q]], "ricc2").stabilizing:
                    failures.append(f"{name}: q = {q} reported stabilizing")
                value = norm2(alpha_minus_circ_inv_formula(rep, [[q]]))
                if value > 1e-12:
                    failures.append(f"{name}: formula at q = {q} is {value:.3e}")
            for method in ("auto", "subspace", "toeplitz", "iterate"):
                try:
                    solve_right_stabilizing(rep, method)
                    failures.append(f"{name}: {method} reported a stabilizing solution")
                except NoStabilizingSolution:
                    pass
    _finish(acceptance_record, 3, failures, "ricc2 = {1/ap} for two (ap, am), degenerate marker emitted")


def test_criterion_4_cross_method_agreement(acceptance_record):
    failures = []
    worst_gap = worst_res = 0.0
    for seed in SUITE_SEEDS:
        rep = instance_from_seed(seed, (2, 2, 2), 0.3)
        certs = {m: solve_right_stabilizing(rep, m) for m in ("subspace", "toeplitz", "iterate")}
        if not all(c.stabilizing for c in certs.values()):
            failures.append(f"seed {seed}: a method returned a non-stabilizing solution")
        Qs = [c.Q for c in certs.values()]
        gap = max(norm2(a - b) for i, a in enumerate(Qs) for b in Qs[i + 1:])
        worst_gap = max(worst_gap, gap)
        if gap > 1e-6:
            failures.append(f"seed {seed}: methods differ by {gap:.3e}")
        verdict = verify_factorization(rep, right_factors(rep, certs["subspace"]))
        res = max(verdict.measures["product_residual"], verdict.measures["inverse_residual"])
        worst_res = max(worst_res, res)
        if not verdict.ok or res > 1e-8:
            failures.append(f"seed {seed}: verification {verdict.notes}")
    _finish(acceptance_record, 4, failures,
            f"100 instances, max Q gap {worst_gap:.1e}, max residual {worst_res:.1e}")


def _random_scalar(rng):
    d = rng.uniform(-3, 3) + 1j * rng.uniform(-3, 3)
    gp, bp, gm, bm = rng.uniform(-2, 2, 4) + 1j * rng.uniform(-2, 2, 4)
    ap, am = rng.uniform(0.05, 0.95, 2) * np.exp(2j * np.pi * rng.uniform(size=2))
    return d, gp, ap, bp, gm, am, bm


def test_criterion_5_solution_set_relations(acceptance_record):
    failures = []
    checked = sizes = 0
    rng = rng_from_seed(5)
    while checked < 500:
        rep = scalar(*_random_scalar(rng))
        if not r0_invertible(rep):
            continue
        checked += 1
        s = scalar_solution_sets(rep)
        r1, r2, r2p = s.ricc1_roots, s.ricc2_roots, s.ricc2_prime_roots
        sizes += len(r1)
        if not _matches(r1, r2p, 1e-8):
            failures.append(f"instance {checked}: ricc1 {r1} != ricc2' {r2p}")
        if any(min((abs(q - r) for r in r2), default=np.inf) > 1e-8 * max(1, abs(q)) for q in r1):
            failures.append(f"instance {checked}: ricc1 not inside ricc2")
    singular = 0
    for _ in range(100):
        d, gp, ap, bp, gm, am, bm = _random_scalar(rng)
        # delta chosen so that R(0) = delta - gm bm / am vanishes
        rep = scalar(gm * (bm / am), gp, ap, bp, gm, am, bm)
        s = scalar_solution_sets(rep)
        if s.r0_invertible:
            failures.append("R(0) singular instance not detected")
        elif s.ricc2_roots or s.ricc2_all:
            failures.append("ricc2 not empty although R(0) is singular")
        singular += 1
    _finish(acceptance_record, 5, failures,
            f"{checked} instances ({sizes} ricc1 roots), {singular} with R(0) singular")


def _leftright_instance(seed):
    """Near-identity data, strongly coupled data, or a Blaschke block mixed by constants."""
    rng = rng_from_seed(seed)
    kind = seed % 3
    if kind == 0:
        return instance_from_seed(seed, (2, 2, 2), 0.3)
    if kind == 1:
        return random_stable(rng, 2, 2, 2, coupling=float(rng.uniform(0.8, 2.0)))
    c = 0.8 * rng.uniform(0.1, 1.0) * np.exp(2j * np.pi * rng.uniform())
    rep = direct_sum(blaschke_obstruction(c), instance_from_seed(seed, (1, 1, 1), 0.3))
    E = np.eye(3) + 0.4 * rng.standard_normal((3, 3))
    F = np.eye(3) + 0.4 * rng.standard_normal((3, 3))
    return mix_constant(rep, E, F)


def test_criterion_6_left_from_right(acceptance_record):
    failures = []
    counts = {True: 0, False: 0}
    worst = 0.0
    seed = 0
    while sum(counts.values()) < 200:
        rep = _leftright_instance(seed)
        seed += 1
        if not r0_invertible(rep):
            continue
        try:
            cert = solve_right_stabilizing(rep)
        except NoStabilizingSolution:
            continue
        report = left_exists_given_right(rep, cert)
        try:
            solve_left_stabilizing(rep)
            independent = True
        except NoStabilizingSolution:
            independent = False
        counts[report.left_exists] += 1
        worst = max(worst, report.lyapunov_residual)
        if report.left_exists != independent:
            failures.append(f"seed {seed - 1}: verdict {report.left_exists}, left solve {independent}")
        if report.lyapunov_residual > 1e-10:
            failures.append(f"seed {seed - 1}: Sylvester residual {report.lyapunov_residual:.3e}")
    _finish(acceptance_record, 6, failures,
            f"{counts[True]} with left factorization, {counts[False]} without, "
            f"max Sylvester residual {worst:.1e}")


def test_criterion_7_structural_invariants(acceptance_record):
    failures = []
    worst = {}

    def check(name, value, limit):
        worst[name] = max(worst.get(name, 0.0), value)
        if value > limit:
            failures.append(f"{name} {value:.3e} > {limit:.0e}")

    I = np.eye(2)
    for seed in range(40):
        rep = instance_from_seed(seed, (2, 2, 2), 0.3)
        back = dichotomous_to_stable(stable_to_dichotomous(rep))
        check("round trip", max(norm2(a - b) for a, b in zip(rep.matrices().values(), back.matrices().values())),
              1e-12)
        cert = solve_right_stabilizing(rep)
        dual = circ_operators(sharp_dual(rep), cert.Q.conj().T, "ricc1")
        check("sharp dual", max(norm2(dual.alpha_plus_circ - cert.alpha_minus_circ.conj().T),
                                norm2(dual.alpha_minus_circ - cert.alpha_plus_circ.conj().T)), 1e-9)
        if not dual.stabilizing:
            failures.append(f"seed {seed}: dual certificate not stabilizing")
        check("two plus operators", norm2(cert.alpha_plus_circ - alpha_plus_circ_r0(rep, cert.Q)), 1e-10)
        K = rep.delta - rep.gamma_minus @ cert.Q @ rep.beta_plus
        E = I + 0.3 * rng_from_seed(seed).standard_normal((2, 2))
        a = right_factors(rep, cert)
        b = right_factors(rep, cert, split=(E, np.linalg.solve(E, K)))
        check("gauge", max(norm2(x - y) for x, y in zip(a.product_many(ZS), b.product_many(ZS))), 1e-10)
        check("block diagonal", block_diagonalize(rep, cert).residual, 1e-8)
        for pair in (a, b):
            for f, finv in ((pair.minus, pair.minus_inv), (pair.plus, pair.plus_inv)):
                F, G = f.evaluate_many(ZS), finv.evaluate_many(ZS)
                check("factor inverse", max(max(norm2(x @ y - I), norm2(y @ x - I)) for x, y in zip(F, G)),
                      1e-10)
    detail = ", ".join(f"{k} {v:.1e}" for k, v in worst.items())
    _finish(acceptance_record, 7, failures, detail)


# differences at this level are rounding noise, so they carry no rate information
ROUNDOFF_FLOOR = 1e-13
PROFILE_SIZES = (32, 64, 128, 256, 512)


def test_criterion_8_toeplitz_convergence(acceptance_record):
    failures = []
    pairs = 0
    worst_match = 0.0
    for seed in SUITE_SEEDS:
        rep = instance_from_seed(seed, (2, 2, 2), 0.3)
        Qs = [q_truncated(rep, N)[0] for N in PROFILE_SIZES]
        deltas = [norm2(b - a) for a, b in zip(Qs, Qs[1:])]
        for N, d, d_next in zip(PROFILE_SIZES, deltas, deltas[1:]):
            if d <= ROUNDOFF_FLOOR:
                continue
            pairs += 1
            if d_next > max(d / 2, ROUNDOFF_FLOOR):
                failures.append(f"seed {seed}: delta {d:.3e} at N = {N} then {d_next:.3e}")
        gap = norm2(toeplitz_q_oracle(rep).Q - solve_right_stabilizing(rep, "subspace").Q)
        worst_match = max(worst_match, gap)
        if gap > 1e-6:
            failures.append(f"seed {seed}: oracle and subspace Q differ by {gap:.3e}")
    _finish(acceptance_record, 8, failures,
            f"{pairs} doubling pairs above the {ROUNDOFF_FLOOR:.0e} floor, max oracle gap {worst_match:.1e}")


def _slowly_decaying(seed, radius=0.95, coupling=0.1):
    rng = rng_from_seed(seed)

    def unitary():
        q, _ = np.linalg.qr(rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2)))
        return q

    def coupling_block():
        return coupling * (rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))) / np.sqrt(2)

    # every eigenvalue of the state matrices has modulus exactly ``radius``
    return StableRepresentation(np.eye(2), coupling_block(), radius * unitary(), coupling_block(),
                                coupling_block(), radius * unitary(), coupling_block())


@pytest.mark.parametrize("seed", range(5))
def test_toeplitz_rate_on_slowly_decaying_data(seed):
    """Not a criterion: spectral radii 0.95 keep the differences above the floor for N >= 32."""
    rep = _slowly_decaying(seed)
    Qs = [q_truncated(rep, N)[0] for N in PROFILE_SIZES]
    deltas = [norm2(b - a) for a, b in zip(Qs, Qs[1:])]
    assert deltas[2] > ROUNDOFF_FLOOR
    for d, d_next in zip(deltas, deltas[1:]):
        if d > ROUNDOFF_FLOOR:
            assert d_next <= max(d / 2, ROUNDOFF_FLOOR)


def test_tolerances_are_the_defaults():
    assert (DEFAULT_TOL.residual_tol, DEFAULT_TOL.circle_samples) == (1e-8, 64)


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
