"""Sparse multivariate polynomial arithmetic over complex double coefficients.

A polynomial in n variables is stored as a map from exponent tuples (one
non-negative integer per variable) to nonzero complex coefficients.  The zero
polynomial is the empty map.  All arithmetic prunes coefficients that are
exactly zero, and by default also coefficients below a relative noise
threshold, so that supports stay meaningful for support-sensitive checks.

Values are immutable after construction and safe to share across threads.
"""

from __future__ import annotations

import math
from typing import Iterable, Iterator, Mapping

Exponent = tuple[int, ...]

# Capacity limits for desk-scale computations.  The degree cap leaves room for
# truncation ladders up to order 64 per variable; the term cap admits one full
# 20-spin enumeration.
NVARS_CAP = 24
DEGREE_CAP = 64
TERM_CAP = 2**20

# Relative magnitude below which arithmetic results are treated as noise.
PRUNE_REL = 1e-14


class CapacityError(ValueError):
    """Input exceeds the supported variable count, degree, or term budget."""


class PolyFormatError(ValueError):
    """Malformed polynomial interchange data."""


def multi_binomial(caps: Exponent, alpha: Exponent) -> int:
    """Product of per-coordinate binomials C(caps_i, alpha_i), exact integer.

    Requires alpha <= caps componentwise.
    """
    if len(caps) != len(alpha):
        raise ValueError(f"length mismatch: {len(caps)} vs {len(alpha)}")
    if any(a > k or a < 0 for a, k in zip(alpha, caps)):
        raise ValueError(f"multi-index {alpha} not <= {caps}")
    out = 1
    for k, a in zip(caps, alpha):
        out *= math.comb(k, a)
    return out


def exponents_below(caps: Exponent) -> Iterator[Exponent]:
    """Iterate all exponent tuples alpha with 0 <= alpha <= caps, lexicographically."""
    if not caps:
        yield ()
        return
    for head in range(caps[0] + 1):
        for tail in exponents_below(caps[1:]):
            yield (head,) + tail


def _validated_terms(nvars: int, items: Iterable[tuple[Exponent, complex]],
                     prune: bool) -> dict[Exponent, complex]:
    terms: dict[Exponent, complex] = {}
    for exp, coef in items:
        exp = tuple(exp)
        if len(exp) != nvars:
            raise ValueError(f"exponent {exp} has length {len(exp)}, expected {nvars}")
        for e in exp:
            if not isinstance(e, int) or e < 0:
                raise ValueError(f"exponent entries must be non-negative integers, got {exp}")
            if e > DEGREE_CAP:
                raise CapacityError(f"degree {e} exceeds cap {DEGREE_CAP}")
        c = complex(coef)
        if c != 0:
            terms[exp] = terms.get(exp, 0j) + c
    terms = {e: c for e, c in terms.items() if c != 0}
    if prune and terms:
        top = max(abs(c) for c in terms.values())
        cut = PRUNE_REL * top
        terms = {e: c for e, c in terms.items() if abs(c) >= cut}
    if len(terms) > TERM_CAP:
        raise CapacityError(f"{len(terms)} terms exceed cap {TERM_CAP}")
    return terms


class MultiPoly:
    """Immutable sparse polynomial in ``nvars`` complex variables."""

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms: Mapping[Exponent, complex] | None = None,
                 *, prune: bool = True):
        if not isinstance(nvars, int) or nvars < 1:
            raise ValueError(f"nvars must be a positive integer, got {nvars!r}")
        if nvars > NVARS_CAP:
            raise CapacityError(f"{nvars} variables exceed cap {NVARS_CAP}")
        object.__setattr__(self, "nvars", nvars)
        items = terms.items() if terms else ()
        object.__setattr__(self, "terms", _validated_terms(nvars, items, prune))

    def __setattr__(self, name, value):
        raise AttributeError("MultiPoly is immutable")

    # ---- constructors -----------------------------------------------------

    @classmethod
    def zero(cls, nvars: int) -> "MultiPoly":
        return cls(nvars, {})

    @classmethod
    def constant(cls, nvars: int, value: complex) -> "MultiPoly":
        return cls(nvars, {(0,) * nvars: complex(value)})

    @classmethod
    def variable(cls, nvars: int, index: int) -> "MultiPoly":
        if not 0 <= index < nvars:
            raise ValueError(f"variable index {index} out of range for {nvars} variables")
        exp = [0] * nvars
        exp[index] = 1
        return cls(nvars, {tuple(exp): 1.0 + 0j})

    @classmethod
    def monomial(cls, nvars: int, exp: Exponent, coef: complex = 1.0) -> "MultiPoly":
        return cls(nvars, {tuple(exp): complex(coef)})

    # ---- shape queries ----------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def degree(self, var: int) -> int:
        """Degree in variable ``var`` (0 for the zero polynomial)."""
        if not 0 <= var < self.nvars:
            raise ValueError(f"variable index {var} out of range")
        if not self.terms:
            return 0
        return max(e[var] for e in self.terms)

    def degrees(self) -> Exponent:
        """Per-variable degrees as a tuple."""
        return tuple(self.degree(i) for i in range(self.nvars))

    def support(self) -> set[Exponent]:
        return set(self.terms)

    def coeff(self, exp: Exponent) -> complex:
        return self.terms.get(tuple(exp), 0j)

    def scale(self) -> float:
        """Largest coefficient magnitude (0.0 for the zero polynomial)."""
        return max((abs(c) for c in self.terms.values()), default=0.0)

    # ---- arithmetic -------------------------------------------------------

    def add(self, other: "MultiPoly", *, prune: bool = True) -> "MultiPoly":
        if self.nvars != other.nvars:
            raise ValueError(f"variable count mismatch: {self.nvars} vs {other.nvars}")
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, 0j) + c
        return MultiPoly(self.nvars, out, prune=prune)

    def mul(self, other: "MultiPoly | complex", *, prune: bool = True) -> "MultiPoly":
        if not isinstance(other, MultiPoly):
            s = complex(other)
            return MultiPoly(self.nvars, {e: c * s for e, c in self.terms.items()}, prune=prune)
        if self.nvars != other.nvars:
            raise ValueError(f"variable count mismatch: {self.nvars} vs {other.nvars}")
        out: dict[Exponent, complex] = {}
        for ea, ca in self.terms.items():
            for eb, cb in other.terms.items():
                key = tuple(x + y for x, y in zip(ea, eb))
                out[key] = out.get(key, 0j) + ca * cb
        return MultiPoly(self.nvars, out, prune=prune)

    def __add__(self, other: "MultiPoly") -> "MultiPoly":
        return self.add(other)

    def __sub__(self, other: "MultiPoly") -> "MultiPoly":
        return self.add(other.__neg__())

    def __neg__(self) -> "MultiPoly":
        return MultiPoly(self.nvars, {e: -c for e, c in self.terms.items()}, prune=False)

    def __mul__(self, other: "MultiPoly | complex") -> "MultiPoly":
        return self.mul(other)

    def __rmul__(self, other: complex) -> "MultiPoly":
        return self.mul(other)

    def pow(self, k: int) -> "MultiPoly":
        if k < 0:
            raise ValueError("negative power")
        out = MultiPoly.constant(self.nvars, 1.0)
        for _ in range(k):
            out = out.mul(self)
        return out

    def __eq__(self, other) -> bool:
        return (isinstance(other, MultiPoly) and self.nvars == other.nvars
                and self.terms == other.terms)

    def __hash__(self):
        return hash((self.nvars, frozenset(self.terms.items())))

    # ---- calculus and substitution -----------------------------------------

    def derive(self, alpha: Exponent) -> "MultiPoly":
        """Iterated partial derivative by the multi-index ``alpha``.

        Annihilates terms whose exponent is exceeded in any coordinate; the
        surviving coefficients pick up the usual falling-factorial factors.
        """
        alpha = tuple(alpha)
        if len(alpha) != self.nvars:
            raise ValueError(f"multi-index length {len(alpha)} != {self.nvars}")
        out: dict[Exponent, complex] = {}
        for exp, coef in self.terms.items():
            if any(e < a for e, a in zip(exp, alpha)):
                continue
            factor = 1
            for e, a in zip(exp, alpha):
                for t in range(e, e - a, -1):
                    factor *= t
            key = tuple(e - a for e, a in zip(exp, alpha))
            out[key] = out.get(key, 0j) + coef * factor
        return MultiPoly(self.nvars, out, prune=False)

    def evaluate(self, point: Iterable[complex]) -> complex:
        """Value at a point, with per-variable power caching."""
        values = [complex(v) for v in point]
        if len(values) != self.nvars:
            raise ValueError(f"point length {len(values)} != {self.nvars}")
        powers: list[dict[int, complex]] = [{0: 1.0 + 0j} for _ in range(self.nvars)]

        def power(i: int, e: int) -> complex:
            cache = powers[i]
            if e not in cache:
                # build upwards from the largest cached exponent
                top = max(cache)
                acc = cache[top]
                for k in range(top + 1, e + 1):
                    acc = acc * values[i]
                    cache[k] = acc
            return cache[e]

        total = 0j
        for exp, coef in self.terms.items():
            term = coef
            for i, e in enumerate(exp):
                if e:
                    term *= power(i, e)
            total += term
        return total

    def restrict(self, var: int, value: complex) -> "MultiPoly":
        """Substitute ``value`` for variable ``var``; result has one variable fewer."""
        if not 0 <= var < self.nvars:
            raise ValueError(f"variable index {var} out of range")
        if self.nvars == 1:
            raise ValueError("cannot restrict a univariate polynomial to zero variables")
        v = complex(value)
        out: dict[Exponent, complex] = {}
        for exp, coef in self.terms.items():
            key = exp[:var] + exp[var + 1:]
            out[key] = out.get(key, 0j) + coef * v ** exp[var]
        return MultiPoly(self.nvars - 1, out, prune=False)

    def swap_blocks(self, split: int) -> "MultiPoly":
        """Exchange the first ``split`` variables with the remaining ones."""
        if not 0 < split < self.nvars:
            raise ValueError(f"split {split} out of range for {self.nvars} variables")
        out = {exp[split:] + exp[:split]: c for exp, c in self.terms.items()}
        return MultiPoly(self.nvars, out, prune=False)

    # ---- interchange --------------------------------------------------------

    def to_dict(self) -> dict:
        items = sorted(self.terms.items())
        return {"nvars": self.nvars,
                "terms": [{"exp": list(e), "coef": [c.real, c.imag]} for e, c in items]}

    @classmethod
    def from_dict(cls, data: dict) -> "MultiPoly":
        if not isinstance(data, dict):
            raise PolyFormatError("polynomial JSON must be an object")
        try:
            nvars = data["nvars"]
            raw_terms = data["terms"]
        except KeyError as missing:
            raise PolyFormatError(f"polynomial JSON missing key {missing}") from None
        if not isinstance(nvars, int):
            raise PolyFormatError("nvars must be an integer")
        if not isinstance(raw_terms, list):
            raise PolyFormatError("terms must be a list")
        seen: set[Exponent] = set()
        terms: dict[Exponent, complex] = {}
        for item in raw_terms:
            if not isinstance(item, dict) or set(item) != {"exp", "coef"}:
                raise PolyFormatError(f"bad term entry: {item!r}")
            exp_raw, coef_raw = item["exp"], item["coef"]
            if (not isinstance(exp_raw, list)
                    or any(not isinstance(e, int) or isinstance(e, bool) or e < 0 for e in exp_raw)):
                raise PolyFormatError(f"exponents must be non-negative integers: {exp_raw!r}")
            exp = tuple(exp_raw)
            if exp in seen:
                raise PolyFormatError(f"duplicate exponent key {list(exp)}")
            seen.add(exp)
            if (not isinstance(coef_raw, list) or len(coef_raw) != 2
                    or any(not isinstance(x, (int, float)) or isinstance(x, bool) for x in coef_raw)):
                raise PolyFormatError(f"coefficient must be a [re, im] pair: {coef_raw!r}")
            re, im = float(coef_raw[0]), float(coef_raw[1])
            if not (math.isfinite(re) and math.isfinite(im)):
                raise PolyFormatError(f"non-finite coefficient {coef_raw!r}")
            terms[exp] = complex(re, im)
        try:
            return cls(nvars, terms, prune=False)
        except (ValueError, CapacityError) as exc:
            if isinstance(exc, CapacityError):
                raise
            raise PolyFormatError(str(exc)) from None

    # ---- display ------------------------------------------------------------

    def __repr__(self) -> str:
        if not self.terms:
            return "MultiPoly(0)"
        bits = []
        for exp, coef in sorted(self.terms.items())[:8]:
            mono = "·".join(f"z{i}^{e}" if e > 1 else f"z{i}"
                            for i, e in enumerate(exp) if e) or "1"
            bits.append(f"({coef:.4g})·{mono}")
        tail = " + ..." if len(self.terms) > 8 else ""
        return "MultiPoly(" + " + ".join(bits) + tail + ")"


def coefficient_slices(f: MultiPoly, split: int | None = None) -> dict[Exponent, MultiPoly]:
    """Partition ``f`` by the exponents of its first ``split`` variables.

    Returns a map from each leading-block exponent to the polynomial (in the
    trailing variables) that multiplies it.  The partition is exact: summing
    ``slice * z^alpha`` over all keys reproduces ``f`` term by term.
    """
    if split is None:
        if f.nvars % 2 != 0:
            raise ValueError(f"odd variable count {f.nvars} needs an explicit split")
        split = f.nvars // 2
    if not 0 < split < f.nvars:
        raise ValueError(f"split {split} out of range for {f.nvars} variables")
    rest = f.nvars - split
    grouped: dict[Exponent, dict[Exponent, complex]] = {}
    for exp, coef in f.terms.items():
        grouped.setdefault(exp[:split], {})[exp[split:]] = coef
    return {head: MultiPoly(rest, body, prune=False) for head, body in grouped.items()}


def assemble_slices(slices: Mapping[Exponent, MultiPoly], split: int) -> MultiPoly:
    """Inverse of :func:`coefficient_slices`."""
    terms: dict[Exponent, complex] = {}
    rest = None
    for head, body in slices.items():
        if rest is None:
            rest = body.nvars
        elif body.nvars != rest:
            raise ValueError("inconsistent slice variable counts")
        for tail, coef in body.terms.items():
            terms[tuple(head) + tail] = terms.get(tuple(head) + tail, 0j) + coef
    if rest is None:
        raise ValueError("empty slice map")
    return MultiPoly(split + rest, terms, prune=False)


def poly_allclose(f: MultiPoly, g: MultiPoly, rtol: float = 1e-9) -> bool:
    """Termwise comparison relative to the larger coefficient scale."""
    if f.nvars != g.nvars:
        return False
    tol = rtol * max(f.scale(), g.scale(), 1e-300)
    keys = set(f.terms) | set(g.terms)
    return all(abs(f.coeff(k) - g.coeff(k)) <= tol for k in keys)
