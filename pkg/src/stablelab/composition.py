"""Two-block composition products, the apolarity pairing, and Grace-type checks.

The composition operations each carry an internal dual route: the coefficient
form and the derivative form are computed independently and must agree before
a result is returned.  A mismatch signals an implementation bug, never a math
outcome, and raises :class:`InternalCheckError`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .domains import CircularDomain, Disc, DiscExterior, HalfPlane
from .oracle import OracleConfig, find_zero
from .polynomials import (Exponent, MultiPoly, coefficient_slices, exponents_below,
                          multi_binomial, poly_allclose)

BRACKET_VANISH_REL = 1e-10


class InternalCheckError(RuntimeError):
    """A dual-route identity that must hold algebraically failed numerically."""


def _check_block_degrees(p: MultiPoly, caps: Exponent, offset: int, label: str) -> None:
    for i, cap in enumerate(caps):
        if p.degree(offset + i) > cap:
            raise ValueError(f"{label} has degree {p.degree(offset + i)} in block "
                             f"variable {i}, cap is {cap}")


def _block_zeroed(p: MultiPoly, n: int, first_block: bool) -> MultiPoly:
    """Set one variable block to zero by dropping terms supported on it."""
    span = range(n) if first_block else range(n, 2 * n)
    keep = {exp: c for exp, c in p.terms.items() if all(exp[i] == 0 for i in span)}
    return MultiPoly(p.nvars, keep, prune=False)


def _compose(f: MultiPoly, g: MultiPoly, caps: Exponent, disc_pairing: bool) -> MultiPoly:
    caps = tuple(caps)
    n = len(caps)
    if f.nvars != 2 * n or g.nvars != 2 * n:
        raise ValueError(f"inputs must have {2 * n} variables for caps {caps}")
    _check_block_degrees(f, caps, 0, "first factor")
    _check_block_degrees(g, caps, n, "second factor")

    f_slices = coefficient_slices(f, n)
    g_slices = coefficient_slices(g.swap_blocks(n), n)

    total = 2 * n
    coeff_form: dict[Exponent, complex] = {}
    for alpha in exponents_below(caps):
        beta = alpha if disc_pairing else tuple(k - a for k, a in zip(caps, alpha))
        fa = f_slices.get(alpha)
        gb = g_slices.get(beta)
        if fa is None or gb is None:
            continue
        weight = 1.0 / multi_binomial(caps, alpha)
        for g_exp, g_coef in gb.terms.items():
            for f_exp, f_coef in fa.terms.items():
                key = g_exp + f_exp
                coeff_form[key] = coeff_form.get(key, 0j) + weight * g_coef * f_coef
    result = MultiPoly(total, coeff_form, prune=False)

    caps_factorial = 1
    for k in caps:
        caps_factorial *= math.factorial(k)
    zeros = (0,) * n
    derivative_form = MultiPoly.zero(total)
    for alpha in exponents_below(caps):
        co_alpha = tuple(k - a for k, a in zip(caps, alpha))
        left = _block_zeroed(f.derive(alpha + zeros), n, first_block=True)
        if left.is_zero:
            continue
        g_order = alpha if disc_pairing else co_alpha
        right = _block_zeroed(g.derive(zeros + g_order), n, first_block=False)
        if right.is_zero:
            continue
        weight = 1.0 / caps_factorial
        if disc_pairing:
            num = den = 1
            for a, ca in zip(alpha, co_alpha):
                num *= math.factorial(ca)
                den *= math.factorial(a)
            weight *= num / den
        derivative_form = derivative_form.add(left.mul(right, prune=False).mul(weight, prune=False),
                                              prune=False)
    if not poly_allclose(result, derivative_form, 1e-9):
        raise InternalCheckError("coefficient and derivative composition forms disagree")
    return result


def compose_halfplane(f: MultiPoly, g: MultiPoly, caps: Exponent) -> MultiPoly:
    """Complementary-index pairing of two-block polynomials.

    With f sliced by its leading block and g by its trailing block, this is
    the sum over indices a <= caps of binom(caps, a) * P_a(w) * Q_(caps-a)(z).
    Preserves half-plane stability of the factor pair (or vanishes).
    """
    return _compose(f, g, caps, disc_pairing=False)


def compose_disc(f: MultiPoly, g: MultiPoly, caps: Exponent) -> MultiPoly:
    """Equal-index pairing, binom(caps, a) * P_a(w) * Q_a(z) summed over a <= caps.

    Preserves unit-disc stability of the factor pair (or vanishes).
    """
    return _compose(f, g, caps, disc_pairing=True)


# ---- apolarity pairing ----------------------------------------------------------


def _derivative_at_zero(p: MultiPoly, alpha: Exponent) -> complex:
    """Value of the alpha-th partial derivative at the origin."""
    c = p.coeff(alpha)
    if c == 0:
        return 0j
    fact = 1
    for a in alpha:
        fact *= math.factorial(a)
    return c * fact


def apolarity_bracket(f: MultiPoly, g: MultiPoly, caps: Exponent,
                      per_term_signs: bool = False) -> complex:
    """Bilinear pairing of derivatives at the origin up to the degree caps.

    The default sign convention is one global factor (-1)^|caps|.  The
    ``per_term_signs`` variant uses (-1)^|alpha| term by term instead, which is
    the classical univariate normalization; it is kept for cross-checks.
    """
    caps = tuple(caps)
    if f.nvars != len(caps) or g.nvars != len(caps):
        raise ValueError("polynomials and caps must share one variable count")
    for p, label in ((f, "f"), (g, "g")):
        for i, cap in enumerate(caps):
            if p.degree(i) > cap:
                raise ValueError(f"{label} has degree {p.degree(i)} > cap {cap} in variable {i}")
    total = 0j
    for alpha in exponents_below(caps):
        co = tuple(k - a for k, a in zip(caps, alpha))
        term = _derivative_at_zero(f, alpha) * _derivative_at_zero(g, co)
        if per_term_signs:
            term *= (-1) ** (sum(alpha) % 2)
        total += term
    if not per_term_signs:
        total *= (-1) ** (sum(caps) % 2)
    return total


def bracket_scale(f: MultiPoly, g: MultiPoly, caps: Exponent) -> float:
    """Largest term magnitude in the pairing sum; the vanishing threshold scale."""
    top = 0.0
    for alpha in exponents_below(caps):
        co = tuple(k - a for k, a in zip(caps, alpha))
        top = max(top, abs(_derivative_at_zero(f, alpha) * _derivative_at_zero(g, co)))
    return top


# ---- Grace-type reports ----------------------------------------------------------


@dataclass(frozen=True)
class GraceReport:
    """Outcome of one apolarity check: hypotheses, pairing value, and verdict."""
    bracket: complex
    bracket_variant: complex
    scale: float
    applicable: bool
    hypotheses_verified: bool
    violation: bool
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"bracket": [self.bracket.real, self.bracket.imag],
                "bracket_variant": [self.bracket_variant.real, self.bracket_variant.imag],
                "abs_bracket": abs(self.bracket),
                "scale": self.scale,
                "applicable": self.applicable,
                "hypotheses_verified": self.hypotheses_verified,
                "violation": self.violation,
                "details": self.details}


def _grace_report(f: MultiPoly, g: MultiPoly, caps: Exponent, applicable: bool,
                  verified: bool, details: dict) -> GraceReport:
    bracket = apolarity_bracket(f, g, caps)
    variant = apolarity_bracket(f, g, caps, per_term_signs=True)
    scale = bracket_scale(f, g, caps)
    violation = bool(applicable and verified and abs(bracket) <= BRACKET_VANISH_REL * scale)
    return GraceReport(bracket, variant, scale, applicable, verified, violation, details)


def grace_check_disc(f: MultiPoly, g: MultiPoly, domains: Sequence[CircularDomain],
                     caps: Exponent, cfg: OracleConfig = OracleConfig(),
                     degree_condition_on: str = "g") -> GraceReport:
    """Apolarity check over products of discs and disc exteriors.

    Hypotheses: f is zero-free on the domain product with full degree cap on
    every exterior coordinate; g is zero-free on the product of complements
    with a full-degree condition on every disc coordinate.  That second degree
    condition lands on g by default; ``degree_condition_on="f"`` switches to
    the literal alternative reading, which the campaigns show to be the wrong
    one.  The report never raises on mathematical content.
    """
    caps = tuple(caps)
    if degree_condition_on not in ("f", "g"):
        raise ValueError("degree_condition_on must be 'f' or 'g'")
    if any(isinstance(d, HalfPlane) for d in domains):
        raise ValueError("disc-type check needs discs or disc exteriors only")
    if len(domains) != len(caps):
        raise ValueError("one domain per variable required")

    details: dict = {"degree_condition_on": degree_condition_on}
    degree_ok = True
    for i, dom in enumerate(domains):
        if isinstance(dom, DiscExterior) and f.degree(i) != caps[i]:
            degree_ok = False
            details.setdefault("degree_failures", []).append(["f", i])
        if isinstance(dom, Disc):
            target = f if degree_condition_on == "f" else g
            if target.degree(i) != caps[i]:
                degree_ok = False
                details.setdefault("degree_failures", []).append([degree_condition_on, i])
    f_verdict = find_zero(f, domains, cfg) if not f.is_zero else None
    complements = [d.complement_interior() for d in domains]
    g_verdict = find_zero(g, complements, cfg) if not g.is_zero else None
    stable_ok = (f_verdict is not None and not f_verdict.is_counterexample
                 and g_verdict is not None and not g_verdict.is_counterexample)
    details["f_zero_free"] = f_verdict is not None and not f_verdict.is_counterexample
    details["g_zero_free_on_complements"] = (g_verdict is not None
                                             and not g_verdict.is_counterexample)
    details["degrees_ok"] = degree_ok
    verified = bool(degree_ok and stable_ok)
    return _grace_report(f, g, caps, applicable=True, verified=verified, details=details)


def grace_check_halfplane(f: MultiPoly, g: MultiPoly, first: HalfPlane, second: HalfPlane,
                          caps: Exponent, cfg: OracleConfig = OracleConfig()) -> GraceReport:
    """Apolarity check over two overlapping half-planes.

    Applicability needs a non-empty intersection of the half-planes and the
    support condition: some exponent of f plus some exponent of g dominates
    the caps componentwise.  Supports are read off the pruned term maps.
    """
    caps = tuple(caps)
    n = len(caps)
    if f.nvars != n or g.nvars != n:
        raise ValueError("polynomials and caps must share one variable count")
    opposite = math.isclose((first.theta - second.theta) % (2 * math.pi), math.pi,
                            abs_tol=1e-12)
    support_ok = any(
        all(a + b >= k for a, b, k in zip(alpha, beta, caps))
        for alpha in f.support() for beta in g.support())
    details: dict = {"halfplanes_intersect": not opposite, "support_condition": support_ok}
    applicable = (not opposite) and support_ok
    if f.is_zero or g.is_zero:
        return _grace_report(f, g, caps, applicable=False, verified=False, details=details)
    f_verdict = find_zero(f, [first] * n, cfg)
    g_verdict = find_zero(g, [second] * n, cfg)
    details["f_zero_free"] = not f_verdict.is_counterexample
    details["g_zero_free"] = not g_verdict.is_counterexample
    verified = details["f_zero_free"] and details["g_zero_free"]
    return _grace_report(f, g, caps, applicable=applicable, verified=verified,
                         details=details)


# ---- randomized campaigns ----------------------------------------------------------


def _affine_product(nvars: int, caps: Exponent, roots_by_var: list[list[complex]],
                    ) -> MultiPoly:
    """Product over variables of (z_i - r) for the listed roots (full degree)."""
    out = MultiPoly.constant(nvars, 1.0)
    for i, roots in enumerate(roots_by_var):
        for r in roots:
            exp = [0] * nvars
            exp[i] = 1
            out = out.mul(MultiPoly(nvars, {tuple(exp): 1.0 + 0j, (0,) * nvars: -r}))
    return out


def run_grace_campaign_disc(pairs: int, seed: int, nvars: int = 2,
                            cap: int = 2, cfg: OracleConfig = OracleConfig(),
                            degree_condition_on: str = "g") -> dict:
    """Seeded root-placement campaign for the disc-type apolarity theorem.

    Domains, radii, and roots are drawn with interior margins so that each
    generated pair satisfies the hypotheses by construction; the oracle then
    re-verifies them.  Returns an aggregate JSON-ready report.
    """
    rng = np.random.default_rng(seed)
    caps = (cap,) * nvars
    violations = 0
    variant_vanish = 0
    verified = 0
    min_abs = math.inf
    brackets: list[list[float]] = []
    for _ in range(pairs):
        domains: list[CircularDomain] = []
        for _ in range(nvars):
            center = complex(rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3))
            radius = rng.uniform(0.6, 1.4)
            domains.append(Disc(center, radius) if rng.uniform() < 0.5
                           else DiscExterior(center, radius))
        margin = 0.05
        f_roots = [[domains[i].complement_interior().sample(rng, margin * domains[i].radius)
                    for _ in range(cap)] for i in range(nvars)]
        g_roots = [[domains[i].sample(rng, margin * domains[i].radius)
                    for _ in range(cap)] for i in range(nvars)]
        f = _affine_product(nvars, caps, f_roots)
        g = _affine_product(nvars, caps, g_roots)
        report = grace_check_disc(f, g, domains, caps, cfg, degree_condition_on)
        if report.hypotheses_verified:
            verified += 1
            min_abs = min(min_abs, abs(report.bracket))
            brackets.append([report.bracket.real, report.bracket.imag])
            if report.violation:
                violations += 1
            if abs(report.bracket_variant) <= BRACKET_VANISH_REL * report.scale:
                variant_vanish += 1
    return {"kind": "grace-disc", "pairs": pairs, "seed": seed, "nvars": nvars,
            "cap": cap, "degree_condition_on": degree_condition_on,
            "hypotheses_verified": verified, "violations": violations,
            "variant_sign_vanishing": variant_vanish, "brackets": brackets,
            "min_abs_bracket": None if math.isinf(min_abs) else min_abs}


def run_grace_campaign_halfplane(pairs: int, seed: int, nvars: int = 2,
                                 cap: int = 1, cfg: OracleConfig = OracleConfig()) -> dict:
    """Seeded campaign for the half-plane apolarity theorem."""
    rng = np.random.default_rng(seed)
    caps = (cap,) * nvars
    violations = 0
    variant_vanish = 0
    verified = 0
    min_abs = math.inf
    brackets: list[list[float]] = []
    for _ in range(pairs):
        theta1 = rng.uniform(0.0, 2 * math.pi)
        # keep the two half-planes clearly overlapping
        theta2 = (theta1 + rng.uniform(-0.45 * math.pi, 0.45 * math.pi)) % (2 * math.pi)
        first, second = HalfPlane(theta1), HalfPlane(theta2)
        margin = 0.1
        f_roots = [[first.complement_interior().sample(rng, margin) for _ in range(cap)]
                   for _ in range(nvars)]
        g_roots = [[second.complement_interior().sample(rng, margin) for _ in range(cap)]
                   for _ in range(nvars)]
        f = _affine_product(nvars, caps, f_roots)
        g = _affine_product(nvars, caps, g_roots)
        report = grace_check_halfplane(f, g, first, second, caps, cfg)
        if report.applicable and report.hypotheses_verified:
            verified += 1
            min_abs = min(min_abs, abs(report.bracket))
            brackets.append([report.bracket.real, report.bracket.imag])
            if report.violation:
                violations += 1
            if abs(report.bracket_variant) <= BRACKET_VANISH_REL * report.scale:
                variant_vanish += 1
    return {"kind": "grace-halfplane", "pairs": pairs, "seed": seed, "nvars": nvars,
            "cap": cap, "hypotheses_verified": verified, "violations": violations,
            "variant_sign_vanishing": variant_vanish, "brackets": brackets,
            "min_abs_bracket": None if math.isinf(min_abs) else min_abs}
