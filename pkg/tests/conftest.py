"""Shared builders for randomized test inputs."""

from __future__ import annotations

import numpy as np

from stablelab import HalfPlane, MultiPoly


def rand_poly(rng: np.random.Generator, nvars: int, max_deg: int = 3,
              max_terms: int = 6, integer: bool = False, coef_bound: float = 4.0,
              ) -> MultiPoly:
    """Random sparse polynomial; integer or complex coefficients."""
    terms = {}
    for _ in range(rng.integers(1, max_terms + 1)):
        exp = tuple(int(e) for e in rng.integers(0, max_deg + 1, size=nvars))
        if integer:
            coef = complex(int(rng.integers(-int(coef_bound), int(coef_bound) + 1)))
        else:
            coef = complex(rng.uniform(-coef_bound, coef_bound),
                           rng.uniform(-coef_bound, coef_bound))
        if coef != 0:
            terms[exp] = coef
    if not terms:
        terms[(0,) * nvars] = 1.0 + 0j
    return MultiPoly(nvars, terms, prune=False)


def rand_point(rng: np.random.Generator, nvars: int, bound: float = 1.0) -> list[complex]:
    return [complex(rng.uniform(-bound, bound), rng.uniform(-bound, bound))
            for _ in range(nvars)]


def halfplane_stable_affine_product(rng: np.random.Generator, nvars: int,
                                    caps: tuple[int, ...], plane: HalfPlane,
                                    margin: float = 0.1) -> MultiPoly:
    """Product over variables of cap-many factors (z_i - root), roots outside
    the half-plane with the given clearance.  Full degree caps by construction."""
    out = MultiPoly.constant(nvars, 1.0)
    outside = plane.complement_interior()
    for i in range(nvars):
        for _ in range(caps[i]):
            root = outside.sample(rng, margin)
            exp = [0] * nvars
            exp[i] = 1
            out = out.mul(MultiPoly(nvars, {tuple(exp): 1.0 + 0j, (0,) * nvars: -root}))
    return out
