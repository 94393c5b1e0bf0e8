"""Semi-decision oracle for zero-freeness on products of circular domains.

Non-stability is certified: a returned witness re-evaluates to a residual
below tolerance at a point strictly interior to every coordinate domain.
Stability is only ever evidenced, by exhausting randomized axis-parallel
slices whose univariate restrictions are solved exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from numpy.polynomial import polynomial as npoly

from .domains import CircularDomain
from .polynomials import MultiPoly

_LEAD_TOL = 1e-12


@dataclass(frozen=True)
class OracleConfig:
    slices_per_variable: int = 200
    seed: int = 0
    residual_tol: float = 1e-9
    boundary_margin: float = 1e-7
    max_newton_iters: int = 50

    def __post_init__(self):
        for name in ("slices_per_variable", "residual_tol", "boundary_margin",
                     "max_newton_iters"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")


@dataclass(frozen=True)
class Counterexample:
    """Certified zero strictly inside the domain product."""
    point: tuple[complex, ...]
    residual: float
    boundary_margin: float

    is_counterexample = True

    def to_dict(self) -> dict:
        return {"kind": "counterexample",
                "point": [[z.real, z.imag] for z in self.point],
                "residual": self.residual,
                "boundary_margin": self.boundary_margin}


@dataclass(frozen=True)
class NoZeroFound:
    """Exhausted the slice budget without finding an interior zero."""
    slices_per_variable: int
    total_samples: int
    min_abs_seen: float

    is_counterexample = False

    def to_dict(self) -> dict:
        return {"kind": "no_zero_found",
                "slices_per_variable": self.slices_per_variable,
                "total_samples": self.total_samples,
                "min_abs_seen": self.min_abs_seen}


StabilityVerdict = Counterexample | NoZeroFound


def univariate_roots(f: MultiPoly) -> list[complex]:
    """All roots of a univariate polynomial, Newton-polished.

    Roots come from the eigenvalues of the (LAPACK-balanced) companion matrix.
    The leading coefficient must not be negligible; deflate before calling.
    """
    if f.nvars != 1:
        raise ValueError("univariate_roots needs a 1-variable polynomial")
    deg = f.degree(0)
    if deg < 1:
        raise ValueError("univariate_roots needs degree >= 1")
    coeffs = np.zeros(deg + 1, dtype=complex)
    for exp, c in f.terms.items():
        coeffs[exp[0]] = c
    scale = np.max(np.abs(coeffs))
    if abs(coeffs[-1]) < _LEAD_TOL * scale:
        raise ValueError("leading coefficient is numerically zero; deflate first")
    roots = np.roots(coeffs[::-1])
    return [_newton_polish(coeffs, r) for r in roots]


def _newton_polish(coeffs: np.ndarray, root: complex, iters: int = 20) -> complex:
    """Refine a root of the ascending-coefficient polynomial, never worsening it."""
    dcoeffs = npoly.polyder(coeffs)
    best = complex(root)
    best_val = abs(npoly.polyval(best, coeffs))
    current = best
    for _ in range(iters):
        dp = npoly.polyval(current, dcoeffs)
        if dp == 0:
            break
        current = current - npoly.polyval(current, coeffs) / dp
        val = abs(npoly.polyval(current, coeffs))
        if val < best_val:
            best, best_val = current, val
        else:
            break
    return best


def _slice_coefficients(f: MultiPoly, var: int, point: Sequence[complex]) -> np.ndarray:
    """Coefficients (ascending) of f with all variables but ``var`` fixed."""
    out = np.zeros(f.degree(var) + 1, dtype=complex)
    caches: list[dict[int, complex]] = [{0: 1.0 + 0j} for _ in range(f.nvars)]

    def power(j: int, e: int) -> complex:
        cache = caches[j]
        if e not in cache:
            top = max(cache)
            acc = cache[top]
            for k in range(top + 1, e + 1):
                acc *= point[j]
                cache[k] = acc
        return cache[e]

    for exp, coef in f.terms.items():
        w = coef
        for j, e in enumerate(exp):
            if j != var and e:
                w *= power(j, e)
        out[exp[var]] += w
    return out


def _deflate(coeffs: np.ndarray) -> np.ndarray:
    """Strip numerically-zero leading coefficients (highest powers)."""
    scale = np.max(np.abs(coeffs))
    if scale == 0.0:
        return coeffs[:1]
    k = len(coeffs)
    while k > 1 and abs(coeffs[k - 1]) <= _LEAD_TOL * scale:
        k -= 1
    return coeffs[:k]


def find_zero(f: MultiPoly, domains: Sequence[CircularDomain],
              cfg: OracleConfig = OracleConfig()) -> StabilityVerdict:
    """Search for a zero of ``f`` strictly inside the product of ``domains``.

    Strategy: for every variable, repeatedly fix all other coordinates at
    seeded interior samples, solve the univariate restriction exactly, and
    test its roots for interior membership with margin.  Any hit is polished
    and re-verified before being returned, so counterexamples are sound.  For
    a univariate input a single slice is exhaustive.
    """
    n = f.nvars
    if len(domains) != n:
        raise ValueError(f"need {n} domains, got {len(domains)}")
    if f.is_zero:
        raise ValueError("the zero polynomial vanishes everywhere")
    scale = f.scale()
    residual_cut = cfg.residual_tol * scale
    rounds = 1 if n == 1 else cfg.slices_per_variable
    seeds = np.random.SeedSequence(cfg.seed).spawn(n * rounds)

    min_abs = np.inf
    samples = 0
    for var in range(n):
        for r in range(rounds):
            rng = np.random.default_rng(seeds[var * rounds + r])
            point = [dom.sample(rng, margin=cfg.boundary_margin) for dom in domains]
            value = abs(f.evaluate(point))
            samples += 1
            min_abs = min(min_abs, value)
            coeffs = _deflate(_slice_coefficients(f, var, point))
            if np.max(np.abs(coeffs)) <= residual_cut:
                # the whole sampled line sits in the zero set; the sample is a witness
                witness = _certify(f, point, domains, residual_cut, cfg)
                if witness is not None:
                    return witness
                continue
            if len(coeffs) < 2:
                continue
            roots = np.roots(coeffs[::-1])
            order = sorted(range(len(roots)),
                           key=lambda k: (-domains[var].interior_distance(roots[k]),
                                          roots[k].real, roots[k].imag))
            for k in order:
                root = _newton_polish(coeffs, roots[k], cfg.max_newton_iters)
                if domains[var].interior_distance(root) < cfg.boundary_margin:
                    continue
                candidate = list(point)
                candidate[var] = root
                witness = _certify(f, candidate, domains, residual_cut, cfg)
                if witness is not None:
                    return witness
    return NoZeroFound(rounds, samples, float(min_abs))


def _certify(f: MultiPoly, point: Sequence[complex], domains: Sequence[CircularDomain],
             residual_cut: float, cfg: OracleConfig) -> Counterexample | None:
    residual = abs(f.evaluate(point))
    margin = min(dom.interior_distance(z) for dom, z in zip(domains, point))
    if residual <= residual_cut and margin >= cfg.boundary_margin:
        return Counterexample(tuple(complex(z) for z in point), residual, margin)
    return None


def is_stable_exact_univariate(f: MultiPoly, domain: CircularDomain,
                               boundary_tol: float = 1e-9) -> bool:
    """Exact univariate check: no root strictly inside the open domain.

    Roots within ``boundary_tol`` of the boundary count as boundary points,
    and boundary points of an open domain are outside it.
    """
    if f.nvars != 1:
        raise ValueError("is_stable_exact_univariate needs a 1-variable polynomial")
    if f.is_zero:
        raise ValueError("the zero polynomial vanishes everywhere")
    deg = f.degree(0)
    if deg == 0:
        return True
    coeffs = np.zeros(deg + 1, dtype=complex)
    for exp, c in f.terms.items():
        coeffs[exp[0]] = c
    coeffs = _deflate(coeffs)
    if len(coeffs) < 2:
        return True
    poly = MultiPoly(1, {(k,): c for k, c in enumerate(coeffs) if c != 0}, prune=False)
    return all(domain.interior_distance(r) <= boundary_tol for r in univariate_roots(poly))
