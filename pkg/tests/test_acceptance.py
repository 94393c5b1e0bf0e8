"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines; every tolerance is pinned here, nothing is deferred to configuration.
"""

import math

import numpy as np

from stablelab import (Disc, DiscExterior, HalfPlane, MultiPoly, OracleConfig,
                       SpinSystem, WeightedGraph, asano_contraction,
                       circle_theorem_product, compose_disc, compose_halfplane,
                       diagonal_partition, edge_laplace_transform,
                       edge_operator_pipeline, exp_series_symbol, find_zero,
                       heilmann_lieb_check, heilmann_lieb_poly,
                       is_stable_exact_univariate, lee_yang_check,
                       matchings_enumeration, multi_affine_part, partition_fugacity,
                       run_grace_campaign_disc, run_grace_campaign_halfplane,
                       symbol_disc, univariate_roots)

UPPER = HalfPlane(0.0)
UNIT_DISC = Disc(0j, 1.0)
UNIT_EXTERIOR = DiscExterior(0j, 1.0)


def _report(num: int, name: str, ok: bool, detail: str = "") -> None:
    line = f"[criterion {num:2d}] {'PASS' if ok else 'FAIL'}  {name}"
    if detail:
        line += f"  ({detail})"
    print(line)
    assert ok, line


def _random_ferromagnet(rng, n, top=2.0):
    J = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            J[i, j] = J[j, i] = rng.uniform(0.0, top)
    return SpinSystem(n, J)


def test_criterion_01_circle_root_moduli():
    rng = np.random.default_rng(1001)
    worst = 0.0
    for _ in range(100):
        n = int(rng.integers(2, 11))
        report = lee_yang_check(_random_ferromagnet(rng, n), tol=1e-8)
        worst = max(worst, report["max_modulus_deviation"])
    _report(1, "equal-field roots on the unit circle, 100 ferromagnets n=2..10",
            worst <= 1e-8, f"max | |root|-1 | = {worst:.2e}")


def test_criterion_02_exterior_zero_freeness_with_negative_control():
    rng = np.random.default_rng(1002)
    failures = 0
    for trial in range(25):
        n = int(rng.integers(2, 9))
        system = _random_ferromagnet(rng, n)
        fp = partition_fugacity(system)
        verdict = find_zero(fp.poly, [UNIT_EXTERIOR] * n,
                            OracleConfig(slices_per_variable=200, seed=trial))
        failures += verdict.is_counterexample
    anti = SpinSystem(2, np.array([[0.0, -2.0], [-2.0, 0.0]]))
    anti_verdict = find_zero(partition_fugacity(anti).poly, [UNIT_EXTERIOR] * 2,
                             OracleConfig(slices_per_variable=200, seed=0))
    off_circle = max(abs(abs(r) - 1.0)
                     for r in univariate_roots(diagonal_partition(anti)))
    control = anti_verdict.is_counterexample or off_circle > 1e-3
    _report(2, "fugacity polynomials zero-free on |x|>1, 25 ferromagnets n<=8",
            failures == 0 and control,
            f"failures={failures}, control CE={anti_verdict.is_counterexample}, "
            f"off-circle={off_circle:.2e}")


def test_criterion_03_symbol_identities_exact():
    rng = np.random.default_rng(1003)
    ok = True
    for _ in range(10):
        n = int(rng.integers(2, 6))
        caps = [1, 1] + [int(rng.integers(1, 4)) for _ in range(n - 2)]
        caps = tuple(caps[:n])
        got = symbol_disc(asano_contraction(0, 1, caps))
        merged = [0] * (2 * n)
        merged[0] = merged[n] = merged[n + 1] = 1
        expected = MultiPoly(2 * n, {(0,) * 2 * n: 1, tuple(merged): 1})
        for k in range(2, n):
            exp = [0] * (2 * n)
            exp[k] = exp[n + k] = 1
            expected = expected * MultiPoly(2 * n, {(0,) * 2 * n: 1,
                                                    tuple(exp): 1}).pow(caps[k])
        ok = ok and got == expected
    for n in (1, 2, 3):
        got = exp_series_symbol(multi_affine_part((n + 1,) * n), +1, n + 1)
        expected = MultiPoly.constant(2 * n, 1.0)
        for i in range(n):
            exp = [0] * (2 * n)
            exp[i] = exp[n + i] = 1
            expected = expected * MultiPoly(2 * n, {(0,) * 2 * n: 1, tuple(exp): 1})
        ok = ok and got == expected
    _report(3, "merged-pair and multi-affine symbols match closed forms exactly", ok)


def test_criterion_04_composition_dual_route_identity():
    rng = np.random.default_rng(1004)

    def random_form(n, caps, slice_by_z):
        terms = {}
        for _ in range(rng.integers(1, 8)):
            main = tuple(int(rng.integers(0, c + 1)) for c in caps)
            free = tuple(int(e) for e in rng.integers(0, 4, size=n))
            exp = main + free if slice_by_z else free + main
            terms[exp] = complex(rng.uniform(-3, 3), rng.uniform(-3, 3))
        return MultiPoly(2 * n, terms, prune=False)

    count = 0
    for _ in range(100):
        n = int(rng.integers(1, 3))
        caps = tuple(int(c) for c in rng.integers(0, 4, size=n))
        f = random_form(n, caps, True)
        g = random_form(n, caps, False)
        compose_halfplane(f, g, caps)  # raises InternalCheckError on mismatch
        compose_disc(f, g, caps)
        count += 1
    _report(4, "coefficient form equals derivative form on 100 random pairs",
            count == 100, "1e-9 relative, checked inside both pairings")


def _stable_pair_factor(rng, n, caps, disc: bool):
    out = MultiPoly.constant(2 * n, 1.0)
    for i in range(n):
        for _ in range(caps[i]):
            z = [0] * (2 * n)
            z[i] = 1
            w = [0] * (2 * n)
            w[n + i] = 1
            if not disc:
                c = complex(rng.uniform(-1.5, 1.5), rng.uniform(0.1, 1.5))
                out = out * MultiPoly(2 * n, {tuple(z): 1, tuple(w): 1,
                                              (0,) * 2 * n: c})
            elif rng.uniform() < 0.5:
                a = 0.6 * complex(rng.uniform(-1, 1), rng.uniform(-1, 1))
                zw = [0] * (2 * n)
                zw[i] = zw[n + i] = 1
                out = out * MultiPoly(2 * n, {tuple(zw): a, (0,) * 2 * n: 1})
            else:
                b = 0.6 * complex(rng.uniform(-1, 1), rng.uniform(-1, 1))
                c = 0.6 * complex(rng.uniform(-1, 1), rng.uniform(-1, 1))
                out = (out * MultiPoly(2 * n, {tuple(z): b, (0,) * 2 * n: 1})
                       * MultiPoly(2 * n, {tuple(w): c, (0,) * 2 * n: 1}))
    return out


def test_criterion_05_composition_preserves_stability():
    rng = np.random.default_rng(1005)
    bad = 0
    for disc in (False, True):
        for trial in range(50):
            n = int(rng.integers(1, 3))
            caps = tuple(int(c) for c in rng.integers(1, 3, size=n))
            f = _stable_pair_factor(rng, n, caps, disc)
            g = _stable_pair_factor(rng, n, caps, disc)
            out = compose_disc(f, g, caps) if disc else compose_halfplane(f, g, caps)
            if out.is_zero:
                continue
            domains = [UNIT_DISC if disc else UPPER] * (2 * n)
            verdict = find_zero(out, domains,
                                OracleConfig(slices_per_variable=200, seed=trial))
            bad += verdict.is_counterexample
    _report(5, "compositions of 50 stable pairs per kernel stay zero-free",
            bad == 0, f"counterexamples={bad}")


def test_criterion_06_grace_campaigns():
    cfg = OracleConfig(slices_per_variable=200, seed=0)
    disc = run_grace_campaign_disc(200, seed=1006, nvars=2, cap=2, cfg=cfg)
    half = run_grace_campaign_halfplane(200, seed=1007, nvars=2, cap=1, cfg=cfg)
    classical = run_grace_campaign_disc(200, seed=1008, nvars=1, cap=2, cfg=cfg)
    ok = (disc["hypotheses_verified"] == 200 and disc["violations"] == 0
          and half["hypotheses_verified"] == 200 and half["violations"] == 0
          and classical["hypotheses_verified"] == 200 and classical["violations"] == 0)
    _report(6, "apolarity pairings never vanish across 3x200 verified pairs", ok,
            f"min |bracket|: disc {disc['min_abs_bracket']:.2e}, "
            f"half-plane {half['min_abs_bracket']:.2e}, "
            f"univariate {classical['min_abs_bracket']:.2e}")


def test_criterion_07_matching_polynomials():
    rng = np.random.default_rng(1009)
    mismatches = 0
    worst_real = 0.0
    for trial in range(50):
        n = int(rng.integers(2, 11))
        possible = [(i, j) for i in range(n) for j in range(i + 1, n)]
        rng.shuffle(possible)
        count = int(rng.integers(0, min(len(possible), 12) + 1))
        graph = WeightedGraph(n, tuple((i, j, float(rng.uniform(0, 3)))
                                       for i, j in possible[:count]))
        poly = heilmann_lieb_poly(graph)  # internally checked against matchings
        oracle = matchings_enumeration(graph)
        if poly.terms.keys() != oracle.terms.keys() or any(
                abs(poly.terms[k] - oracle.terms[k]) > 1e-12 * max(1.0, abs(oracle.terms[k]))
                for k in oracle.terms):
            mismatches += 1
        report = heilmann_lieb_check(graph, tol=1e-8,
                                     cfg=OracleConfig(slices_per_variable=200,
                                                      seed=trial))
        worst_real = max(worst_real, report["max_real_part"])
        if not report["passed"]:
            mismatches += 1
    _report(7, "matching enumeration agrees and diagonal roots are imaginary",
            mismatches == 0 and worst_real <= 1e-8,
            f"max |Re root| = {worst_real:.2e}")


def test_criterion_08_circle_theorem_products():
    rng = np.random.default_rng(1010)
    bad = 0
    for trial in range(20):
        n = int(rng.integers(2, 7))
        a = np.zeros((n, n), dtype=complex)
        for i in range(n):
            for j in range(i + 1, n):
                radius = math.sqrt(rng.uniform(0.0, 1.0))
                phase = rng.uniform(0.0, 2 * math.pi)
                a[i, j] = radius * complex(math.cos(phase), math.sin(phase))
        report = circle_theorem_product(a, OracleConfig(slices_per_variable=200,
                                                        seed=trial))
        if not (report["identity_ok"] and report["zero_free_evidence"]):
            bad += 1
    _report(8, "pair-product identity and polydisc zero-freeness, 20 seeds n<=6",
            bad == 0, f"failures={bad}")


def test_criterion_09_oracle_soundness_and_univariate_agreement():
    rng = np.random.default_rng(1011)
    disagreements = 0
    unsound = 0
    counterexamples = 0
    for dom in (UPPER, UNIT_DISC, UNIT_EXTERIOR):
        for _ in range(500):
            deg = int(rng.integers(1, 7))
            f = MultiPoly(1, {(k,): complex(rng.uniform(-2, 2), rng.uniform(-2, 2))
                              for k in range(deg + 1)}, prune=False)
            exact = is_stable_exact_univariate(f, dom)
            verdict = find_zero(f, [dom], OracleConfig(seed=11))
            if verdict.is_counterexample:
                counterexamples += 1
                residual = abs(f.evaluate(verdict.point))
                margin = dom.interior_distance(verdict.point[0])
                if residual > 1e-9 * f.scale() or margin <= 0:
                    unsound += 1
            if exact != (not verdict.is_counterexample):
                disagreements += 1
    _report(9, "oracle counterexamples re-verify and match the exact check",
            disagreements == 0 and unsound == 0,
            f"1500 polynomials, {counterexamples} certified zeros, "
            f"{disagreements} disagreements")


def test_criterion_10_pipeline_error_monotone():
    rng = np.random.default_rng(1012)
    ok = True
    detail = []
    for _ in range(3):
        strength = rng.uniform(0.2, 2.0)
        system = SpinSystem(2, np.array([[0.0, strength], [strength, 0.0]]))
        points = [[complex(rng.uniform(-0.8, 0.8), rng.uniform(-0.8, 0.8))
                   for _ in range(2)] for _ in range(20)]
        errors = []
        for order in (4, 8, 16, 32):
            poly = edge_operator_pipeline(system, order)
            worst = 0.0
            for h in points:
                exact = edge_laplace_transform(system, h)
                worst = max(worst, abs(poly.evaluate(h) - exact) / (1 + abs(exact)))
            errors.append(worst)
        ok = ok and all(errors[k + 1] < errors[k] for k in range(3))
        detail.append("->".join(f"{e:.1e}" for e in errors))
    _report(10, "edge-pipeline error decreases over truncation orders 4,8,16,32",
            ok, "; ".join(detail))
