"""Open circular domains, normalized Möbius maps, and degree-capped transport.

The three domain kinds are open half-planes through the origin, open discs,
and open disc exteriors.  Möbius maps are kept in determinant-one form with a
deterministic sign choice, so transported polynomials are reproducible up to
nothing at all.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .polynomials import Exponent, MultiPoly

# Truncation defaults for sampling unbounded domains: half-plane samples stay
# within this modulus cap (measured after rotating the plane upright), disc
# exteriors are sampled on an annulus reaching this multiple of the radius.
HALFPLANE_SAMPLE_CAP = 10.0
EXTERIOR_SAMPLE_FACTOR = 10.0


class MoebiusPoleError(ZeroDivisionError):
    """A Möbius map was evaluated at (numerically) its pole."""


@dataclass(frozen=True)
class HalfPlane:
    """Open half-plane {z : Im(e^{i theta} z) > 0}."""
    theta: float

    convex = True

    def interior_distance(self, z: complex) -> float:
        return (cmath.exp(1j * self.theta) * z).imag

    def complement_interior(self) -> "HalfPlane":
        return HalfPlane((self.theta + math.pi) % (2 * math.pi))

    def sample(self, rng, margin: float = 0.0, cap: float = HALFPLANE_SAMPLE_CAP) -> complex:
        if margin < 0 or margin >= cap:
            raise ValueError(f"margin {margin} incompatible with sampling cap {cap}")
        g = _as_rng(rng)
        u = g.uniform(-cap, cap)
        v = g.uniform(margin, cap)
        return cmath.exp(-1j * self.theta) * complex(u, v)

    def to_dict(self) -> dict:
        return {"kind": "half_plane", "theta": self.theta}


@dataclass(frozen=True)
class Disc:
    """Open disc of given center and radius."""
    center: complex
    radius: float

    convex = True

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError(f"radius must be positive, got {self.radius}")

    def interior_distance(self, z: complex) -> float:
        return self.radius - abs(z - self.center)

    def complement_interior(self) -> "DiscExterior":
        return DiscExterior(self.center, self.radius)

    def sample(self, rng, margin: float = 0.0) -> complex:
        if margin < 0 or margin >= self.radius:
            raise ValueError(f"margin {margin} incompatible with radius {self.radius}")
        g = _as_rng(rng)
        s = (self.radius - margin) * math.sqrt(g.uniform(0.0, 1.0))
        phi = g.uniform(0.0, 2 * math.pi)
        return self.center + s * cmath.exp(1j * phi)

    def to_dict(self) -> dict:
        return {"kind": "disc", "center": [self.center.real, self.center.imag],
                "radius": self.radius}


@dataclass(frozen=True)
class DiscExterior:
    """Open exterior {z : |z - center| > radius}.  Not convex."""
    center: complex
    radius: float

    convex = False

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError(f"radius must be positive, got {self.radius}")

    def interior_distance(self, z: complex) -> float:
        return abs(z - self.center) - self.radius

    def complement_interior(self) -> "Disc":
        return Disc(self.center, self.radius)

    def sample(self, rng, margin: float = 0.0,
               outer_factor: float = EXTERIOR_SAMPLE_FACTOR) -> complex:
        outer = outer_factor * self.radius
        if margin < 0 or self.radius + margin >= outer:
            raise ValueError(f"margin {margin} incompatible with annulus up to {outer}")
        g = _as_rng(rng)
        s = g.uniform(self.radius + margin, outer)
        phi = g.uniform(0.0, 2 * math.pi)
        return self.center + s * cmath.exp(1j * phi)

    def to_dict(self) -> dict:
        return {"kind": "disc_exterior", "center": [self.center.real, self.center.imag],
                "radius": self.radius}


CircularDomain = HalfPlane | Disc | DiscExterior


def contains(domain: CircularDomain, z: complex) -> bool:
    """Strict membership in the open domain; boundary points are outside."""
    return domain.interior_distance(z) > 0.0


def sample_interior(domain: CircularDomain, rng, margin: float = 0.0) -> complex:
    """Seeded interior sample with distance to the boundary >= margin."""
    return domain.sample(rng, margin)


def domain_from_dict(data: dict) -> CircularDomain:
    if not isinstance(data, dict) or "kind" not in data:
        raise ValueError(f"domain JSON must be an object with a 'kind': {data!r}")
    kind = data["kind"]
    if kind == "half_plane":
        return HalfPlane(float(data["theta"]))
    if kind in ("disc", "disc_exterior"):
        re, im = data["center"]
        cls = Disc if kind == "disc" else DiscExterior
        return cls(complex(float(re), float(im)), float(data["radius"]))
    raise ValueError(f"unknown domain kind {kind!r}")


def _as_rng(rng) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


# ---- Möbius maps -------------------------------------------------------------


@dataclass(frozen=True)
class MoebiusMap:
    """Fractional-linear map z -> (a z + b) / (c z + d) with a d - b c = 1.

    Construction rescales by a square root of the determinant and fixes the
    remaining sign so that the first nonzero entry of (a, b, c, d) has
    argument in (-pi/2, pi/2].
    """
    a: complex
    b: complex
    c: complex
    d: complex

    def __post_init__(self):
        a, b, c, d = (complex(self.a), complex(self.b), complex(self.c), complex(self.d))
        det = a * d - b * c
        if abs(det) < 1e-30:
            raise ValueError("degenerate map: determinant is numerically zero")
        s = cmath.sqrt(det)
        a, b, c, d = a / s, b / s, c / s, d / s
        for entry in (a, b, c, d):
            if entry != 0:
                if not (entry.real > 0 or (entry.real == 0 and entry.imag > 0)):
                    a, b, c, d = -a, -b, -c, -d
                break
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "d", d)

    @classmethod
    def identity(cls) -> "MoebiusMap":
        return cls(1, 0, 0, 1)

    def apply(self, z: complex) -> complex:
        den = self.c * z + self.d
        if abs(den) < 1e-300:
            raise MoebiusPoleError(f"point {z} is at the pole of the map")
        return (self.a * z + self.b) / den

    def inverse(self) -> "MoebiusMap":
        return MoebiusMap(self.d, -self.b, -self.c, self.a)

    def compose(self, other: "MoebiusMap") -> "MoebiusMap":
        """Map equal to applying ``other`` first, then ``self``."""
        return MoebiusMap(self.a * other.a + self.b * other.c,
                          self.a * other.b + self.b * other.d,
                          self.c * other.a + self.d * other.c,
                          self.c * other.b + self.d * other.d)

    def to_dict(self) -> dict:
        return {"a": [self.a.real, self.a.imag], "b": [self.b.real, self.b.imag],
                "c": [self.c.real, self.c.imag], "d": [self.d.real, self.d.imag]}


# Cayley-type map taking the unit disc onto the upper half-plane, 0 -> i.
# Chosen so that disc-domain symbols reduce to the (1 + z w) kernel exactly.
_CAYLEY = MoebiusMap(1, 1j, 1j, 1)
# Inversion z -> 1/z exchanging unit-disc interior and exterior.
_INVERSION = MoebiusMap(0, 1j, 1j, 0)


def to_upper_half_plane(domain: CircularDomain) -> MoebiusMap:
    """Catalog map sending the domain onto the upper half-plane."""
    if isinstance(domain, HalfPlane):
        return MoebiusMap(cmath.exp(1j * domain.theta), 0, 0, 1)
    affine = MoebiusMap(1, -domain.center, 0, domain.radius)
    if isinstance(domain, Disc):
        return _CAYLEY.compose(affine)
    return _CAYLEY.compose(_INVERSION.compose(affine))


def moebius_for(src: CircularDomain, dst: CircularDomain) -> MoebiusMap:
    """Catalog map with image(src) == dst, composed through the upper half-plane."""
    return to_upper_half_plane(dst).inverse().compose(to_upper_half_plane(src))


# ---- degree-capped transport --------------------------------------------------


def _factor_coefficients(m: MoebiusMap, e: int, cap: int) -> np.ndarray:
    """Univariate coefficients of (a z + b)^e (c z + d)^(cap - e), degree cap."""
    first = np.array([math.comb(e, k) * m.a ** k * m.b ** (e - k)
                      for k in range(e + 1)], dtype=complex)
    rest = cap - e
    second = np.array([math.comb(rest, k) * m.c ** k * m.d ** (rest - k)
                       for k in range(rest + 1)], dtype=complex)
    return np.convolve(first, second)


def transport(f: MultiPoly, maps: Sequence[MoebiusMap], caps: Exponent) -> MultiPoly:
    """Monomial-wise Möbius substitution within per-variable degree caps.

    Each monomial z_i^e becomes (a_i z_i + b_i)^e (c_i z_i + d_i)^(cap_i - e),
    so the result satisfies, away from the poles of the maps,

        transport(f)(z) == prod_i (c_i z_i + d_i)^cap_i * f(map_1(z_1), ...).
    """
    n = f.nvars
    if len(maps) != n:
        raise ValueError(f"need one map per variable, got {len(maps)} for {n}")
    caps = tuple(caps)
    if len(caps) != n:
        raise ValueError(f"degree cap tuple has length {len(caps)}, expected {n}")
    for i in range(n):
        if f.degree(i) > caps[i]:
            raise ValueError(f"degree {f.degree(i)} in variable {i} exceeds cap {caps[i]}")

    tables: list[dict[int, np.ndarray]] = [{} for _ in range(n)]
    out: dict[Exponent, complex] = {}
    for exp, coef in f.terms.items():
        partial: dict[Exponent, complex] = {(): coef}
        for i, e in enumerate(exp):
            table = tables[i]
            if e not in table:
                table[e] = _factor_coefficients(maps[i], e, caps[i])
            factor = table[e]
            nxt: dict[Exponent, complex] = {}
            for key, val in partial.items():
                for k, fk in enumerate(factor):
                    if fk != 0:
                        nk = key + (k,)
                        nxt[nk] = nxt.get(nk, 0j) + val * fk
            partial = nxt
        for key, val in partial.items():
            out[key] = out.get(key, 0j) + val
    return MultiPoly(n, out)


def transport_between(f: MultiPoly, src: Sequence[CircularDomain],
                      dst: Sequence[CircularDomain], caps: Exponent) -> MultiPoly:
    """Transport an (src-product)-stable polynomial to a (dst-product)-stable one.

    Uses per-variable catalog maps oriented dst -> src, which is the
    orientation that carries stability from the source product to the target.
    """
    maps = [moebius_for(d, s) for s, d in zip(src, dst)]
    return transport(f, maps, caps)


# ---- membership in the degree-capped stable class ------------------------------


@dataclass(frozen=True)
class ClassMembership:
    """Outcome of a degree-capped stability-class check.

    ``member_evidence`` is sampling evidence, not a certificate; a False value
    is certified either by a witness zero or by a degree shortfall on a
    non-convex coordinate domain.
    """
    member_evidence: bool
    reason: str
    degree_shortfall: tuple[int, ...]
    oracle_verdict: object | None

    def to_dict(self) -> dict:
        verdict = None
        if self.oracle_verdict is not None and hasattr(self.oracle_verdict, "to_dict"):
            verdict = self.oracle_verdict.to_dict()
        return {"member_evidence": self.member_evidence, "reason": self.reason,
                "degree_shortfall": list(self.degree_shortfall), "oracle_verdict": verdict}


def stable_class_membership(f: MultiPoly, domains: Sequence[CircularDomain],
                            caps: Exponent,
                            oracle: Callable[[MultiPoly, Sequence[CircularDomain]], object],
                            ) -> ClassMembership:
    """Check membership in the stable class with per-variable degree caps.

    Membership requires (i) full degree cap_j in every variable whose domain is
    non-convex and (ii) no zero in the domain product.  Condition (ii) is
    delegated to the supplied oracle, whose verdict must expose a boolean
    ``is_counterexample`` attribute.
    """
    caps = tuple(caps)
    if len(domains) != f.nvars or len(caps) != f.nvars:
        raise ValueError("domains and caps must match the variable count")
    for i in range(f.nvars):
        if f.degree(i) > caps[i]:
            raise ValueError(f"degree {f.degree(i)} in variable {i} exceeds cap {caps[i]}")
    shortfall = tuple(i for i, dom in enumerate(domains)
                      if not dom.convex and f.degree(i) != caps[i])
    if shortfall:
        return ClassMembership(False, "degree-shortfall", shortfall, None)
    verdict = oracle(f, domains)
    if getattr(verdict, "is_counterexample"):
        return ClassMembership(False, "zero-found", (), verdict)
    return ClassMembership(True, "no-zero-evidence", (), verdict)
