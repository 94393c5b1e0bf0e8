import math

import numpy as np
import pytest

from stablelab import (Disc, HalfPlane, MultiPoly, OracleConfig,
                       apolarity_bracket, compose_disc, compose_halfplane, find_zero,
                       grace_check_disc, grace_check_halfplane,
                       run_grace_campaign_disc, run_grace_campaign_halfplane)

UPPER = HalfPlane(0.0)
UNIT_DISC = Disc(0j, 1.0)
FAST = OracleConfig(slices_per_variable=60, seed=9)


def _mono(nvars, exp, coef=1.0):
    return MultiPoly(nvars, {tuple(exp): complex(coef)})


def _poly1(coeffs):
    return MultiPoly(1, {(k,): complex(c) for k, c in enumerate(coeffs) if c != 0},
                     prune=False)


# ---- composition, hand-checked values -----------------------------------------------


def test_compose_halfplane_sum_kernel():
    f = _mono(2, (1, 0)) + _mono(2, (0, 1))  # z + w
    assert compose_halfplane(f, f, (1,)).terms == {(1, 0): 1, (0, 1): 1}


def test_compose_halfplane_with_constant_second_factor():
    # caps all zero: only the alpha = 0 slice contributes, P0(w) * Q0(z)
    f = _mono(2, (0, 2)) + _mono(2, (0, 0))  # 1 + w^2, degree 0 in z
    g = MultiPoly.constant(2, 1.0)
    assert compose_halfplane(f, g, (0,)) == f


def test_compose_disc_pair_kernel():
    g = _mono(2, (0, 0)) + _mono(2, (1, 1))  # 1 + z w
    assert compose_disc(g, g, (1,)).terms == {(0, 0): 1, (1, 1): 1}


def test_compose_disc_with_delta_second_factor():
    f = _mono(2, (1, 1), 2.0) + _mono(2, (0, 3)) + _mono(2, (0, 0))
    g = MultiPoly.constant(2, 5.0)  # only Q_0 nonzero
    got = compose_disc(f, g, (1,))
    # P_0(w) Q_0(z) = (1 + w^3) * 5
    assert got.terms == {(0, 0): 5, (0, 3): 5}


def test_compose_form_violation_rejected():
    f = _mono(2, (2, 0))
    with pytest.raises(ValueError):
        compose_halfplane(f, f, (1,))


def test_compose_forms_agree_on_random_pairs():
    # the coefficient and derivative routes are verified against each other
    # inside the operation; 100 random form-compliant (not necessarily stable)
    # pairs must pass the internal 1e-9 cross-check
    rng = np.random.default_rng(100)
    for _ in range(100):
        n = int(rng.integers(1, 3))
        caps = tuple(int(c) for c in rng.integers(0, 4, size=n))
        f = _random_form_pair(rng, n, caps, slice_by_z=True)
        g = _random_form_pair(rng, n, caps, slice_by_z=False)
        compose_halfplane(f, g, caps)
        compose_disc(f, g, caps)


def _random_form_pair(rng, n, caps, slice_by_z):
    """Random 2n-variable polynomial with the sliced block capped by caps."""
    terms = {}
    for _ in range(rng.integers(1, 7)):
        main = tuple(int(rng.integers(0, c + 1)) for c in caps)
        free = tuple(int(e) for e in rng.integers(0, 3, size=n))
        exp = main + free if slice_by_z else free + main
        terms[exp] = complex(rng.uniform(-2, 2), rng.uniform(-2, 2))
    return MultiPoly(2 * n, terms, prune=False)


# ---- composition stability -----------------------------------------------------------


def _stable_halfplane_pair_factor(rng, n, caps):
    """Product of (z_i + w_i + c) factors with Im c > 0, capped degrees."""
    out = MultiPoly.constant(2 * n, 1.0)
    for i in range(n):
        for _ in range(caps[i]):
            c = complex(rng.uniform(-1.5, 1.5), rng.uniform(0.1, 1.5))
            z = [0] * (2 * n)
            z[i] = 1
            w = [0] * (2 * n)
            w[n + i] = 1
            out = out * MultiPoly(2 * n, {tuple(z): 1, tuple(w): 1, (0,) * 2 * n: c})
    return out


def _stable_disc_pair_factor(rng, n, caps):
    """Product of (1 + a z_i w_i) and (1 + b z_i)(1 + c w_i) factors, |a|,|b|,|c| < 1."""
    out = MultiPoly.constant(2 * n, 1.0)
    for i in range(n):
        for _ in range(caps[i]):
            z = [0] * (2 * n)
            z[i] = 1
            w = [0] * (2 * n)
            w[n + i] = 1
            if rng.uniform() < 0.5:
                a = 0.9 * complex(rng.uniform(-1, 1), rng.uniform(-1, 1)) / math.sqrt(2)
                zw = [0] * (2 * n)
                zw[i] = 1
                zw[n + i] = 1
                out = out * MultiPoly(2 * n, {tuple(zw): a, (0,) * 2 * n: 1})
            else:
                b = 0.85 * complex(rng.uniform(-1, 1), rng.uniform(-1, 1)) / math.sqrt(2)
                c = 0.85 * complex(rng.uniform(-1, 1), rng.uniform(-1, 1)) / math.sqrt(2)
                out = (out * MultiPoly(2 * n, {tuple(z): b, (0,) * 2 * n: 1})
                       * MultiPoly(2 * n, {tuple(w): c, (0,) * 2 * n: 1}))
    return out


def test_compose_halfplane_preserves_stability():
    rng = np.random.default_rng(55)
    for _ in range(25):
        n = int(rng.integers(1, 3))
        caps = tuple(int(c) for c in rng.integers(1, 3, size=n))
        f = _stable_halfplane_pair_factor(rng, n, caps)
        g = _stable_halfplane_pair_factor(rng, n, caps)
        out = compose_halfplane(f, g, caps)
        if out.is_zero:
            continue
        verdict = find_zero(out, [UPPER] * (2 * n), FAST)
        assert not verdict.is_counterexample


def test_compose_disc_preserves_stability():
    rng = np.random.default_rng(56)
    for _ in range(25):
        n = int(rng.integers(1, 3))
        caps = tuple(int(c) for c in rng.integers(1, 3, size=n))
        f = _stable_disc_pair_factor(rng, n, caps)
        g = _stable_disc_pair_factor(rng, n, caps)
        out = compose_disc(f, g, caps)
        if out.is_zero:
            continue
        verdict = find_zero(out, [UNIT_DISC] * (2 * n), FAST)
        assert not verdict.is_counterexample


# ---- apolarity bracket -----------------------------------------------------------------


def test_bracket_two_term_example():
    f = _poly1([0, 1])  # z
    g = _poly1([1])     # 1
    assert apolarity_bracket(f, g, (1,)) == -1


def test_bracket_constant_pair():
    one = MultiPoly.constant(1, 1.0)
    assert apolarity_bracket(one, one, (0,)) == 1


def test_bracket_quadratic_example():
    f = _poly1([6, -5, 1])  # (x - 2)(x - 3)
    g = _poly1([0, 0, 1])   # x^2
    # f(0) g''(0) + f'(0) g'(0) + f''(0) g(0) = 6*2 + 0 + 0
    assert apolarity_bracket(f, g, (2,)) == 12


def test_bracket_degree_excess_rejected():
    with pytest.raises(ValueError):
        apolarity_bracket(_poly1([0, 0, 1]), _poly1([1]), (1,))


def test_bracket_bilinearity_exact_on_integers():
    rng = np.random.default_rng(60)
    caps = (2, 2)
    for _ in range(50):

        def rand_capped():
            terms = {}
            for _ in range(rng.integers(1, 6)):
                exp = tuple(int(e) for e in rng.integers(0, 3, size=2))
                terms[exp] = complex(int(rng.integers(-4, 5)))
            return MultiPoly(2, terms, prune=False)

        f1, f2, g = rand_capped(), rand_capped(), rand_capped()
        a = complex(int(rng.integers(-3, 4)))
        b = complex(int(rng.integers(-3, 4)))
        combo = f1.mul(a, prune=False).add(f2.mul(b, prune=False), prune=False)
        lhs = apolarity_bracket(combo, g, caps)
        rhs = (a * apolarity_bracket(f1, g, caps) + b * apolarity_bracket(f2, g, caps))
        assert lhs == rhs


def test_variant_bracket_matches_classical_signs():
    # per-term signs reproduce the classical alternating univariate pairing
    f = _poly1([1, 2, 3])
    g = _poly1([4, 5, 6])
    per_term = apolarity_bracket(f, g, (2,), per_term_signs=True)
    expected = (f.coeff((0,)) * g.coeff((2,)) * 2        # a0 * g''(0)
                - f.coeff((1,)) * g.coeff((1,))          # - f'(0) g'(0)
                + f.coeff((2,)) * 2 * g.coeff((0,)))     # + f''(0) g(0)
    assert per_term == expected


# ---- Grace-type checks --------------------------------------------------------------------


def test_grace_disc_example():
    f = _poly1([6, -5, 1])                    # roots 2 and 3, outside the disc
    g = _poly1([1 / 20, -9 / 20, 1])          # roots 1/4 and 1/5, inside
    report = grace_check_disc(f, g, [UNIT_DISC], (2,), FAST)
    assert report.hypotheses_verified
    assert not report.violation
    assert abs(report.bracket - 14.35) <= 1e-12


def test_grace_disc_hypothesis_failure_reported():
    f = _poly1([-1 / 4, 0, 1])  # roots +-1/2 inside the disc
    g = _poly1([1 / 20, -9 / 20, 1])
    report = grace_check_disc(f, g, [UNIT_DISC], (2,), FAST)
    assert not report.hypotheses_verified
    assert not report.violation


def test_grace_halfplane_example():
    f = _poly1([1j, 1])    # z + i
    g = _poly1([2j, 1])    # z + 2i
    report = grace_check_halfplane(f, g, UPPER, UPPER, (1,), FAST)
    assert report.applicable and report.hypotheses_verified
    assert abs(report.bracket - (-3j)) <= 1e-12
    assert not report.violation


def test_grace_halfplane_support_condition_gate():
    one = MultiPoly.constant(1, 1.0)
    report = grace_check_halfplane(one, one, UPPER, HalfPlane(0.3), (1,), FAST)
    assert not report.applicable
    assert not report.violation


def test_grace_halfplane_disjoint_planes_not_applicable():
    f = _poly1([1j, 1])
    report = grace_check_halfplane(f, f, UPPER, HalfPlane(math.pi), (1,), FAST)
    assert not report.applicable


def test_degree_condition_readings_disagree():
    # f = z^2 - 4 is disc-zero-free with full degree; g = z has a single root
    # inside the disc but degree 1 < 2.  Under the literal reading (degree
    # condition re-imposed on f) the hypotheses pass and the pairing vanishes;
    # the default reading rejects the pair instead of claiming anything.
    f = _poly1([-4, 0, 1])
    g = _poly1([0, 1])
    literal = grace_check_disc(f, g, [UNIT_DISC], (2,), FAST, degree_condition_on="f")
    assert literal.hypotheses_verified and literal.violation
    default = grace_check_disc(f, g, [UNIT_DISC], (2,), FAST, degree_condition_on="g")
    assert not default.hypotheses_verified and not default.violation


def test_grace_campaign_disc_small():
    report = run_grace_campaign_disc(40, seed=11, nvars=2, cap=2, cfg=FAST)
    assert report["hypotheses_verified"] == 40
    assert report["violations"] == 0
    assert report["min_abs_bracket"] > 0


def test_grace_campaign_halfplane_small():
    report = run_grace_campaign_halfplane(40, seed=12, nvars=2, cap=1, cfg=FAST)
    assert report["hypotheses_verified"] == 40
    assert report["violations"] == 0


def test_grace_campaign_classical_univariate():
    # the univariate disc case is the classical apolarity statement: pairs with
    # one root set inside and one outside never produce a vanishing bracket
    report = run_grace_campaign_disc(60, seed=13, nvars=1, cap=2, cfg=FAST)
    assert report["hypotheses_verified"] == 60
    assert report["violations"] == 0
