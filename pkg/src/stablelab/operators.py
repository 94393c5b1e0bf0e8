"""Linear operators on degree-capped polynomial spaces and their symbols.

Operators are stored extensionally: one image polynomial for every monomial
below the input degree caps.  That makes symbol computation mechanical and
rank detection exact on integer tables.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

from .domains import (CircularDomain, Disc, DiscExterior, HalfPlane, MoebiusMap,
                      to_upper_half_plane)
from .oracle import OracleConfig, StabilityVerdict, find_zero
from .polynomials import Exponent, MultiPoly, exponents_below, multi_binomial

RANK_ONE_TOL = 1e-10


@dataclass(frozen=True)
class LinearOperator:
    """Action table of a linear map on the monomials below ``caps``."""
    caps: Exponent
    nvars_in: int
    nvars_out: int
    action: Mapping[Exponent, MultiPoly]

    def __post_init__(self):
        object.__setattr__(self, "caps", tuple(self.caps))
        if len(self.caps) != self.nvars_in:
            raise ValueError("caps length must equal the input variable count")
        table = dict(self.action)
        expected = set(exponents_below(self.caps))
        if set(table) != expected:
            raise ValueError("action table must cover exactly the monomials below caps")
        for image in table.values():
            if image.nvars != self.nvars_out:
                raise ValueError("operator images must share the output variable count")
        object.__setattr__(self, "action", table)

    def to_dict(self) -> dict:
        entries = [{"alpha": list(e), "image": p.to_dict()}
                   for e, p in sorted(self.action.items())]
        return {"kappa": list(self.caps), "action": entries}

    @classmethod
    def from_dict(cls, data: dict) -> "LinearOperator":
        caps = tuple(data["kappa"])
        table = {}
        for entry in data["action"]:
            alpha = tuple(entry["alpha"])
            if alpha in table:
                raise ValueError(f"duplicate action entry for {list(alpha)}")
            table[alpha] = MultiPoly.from_dict(entry["image"])
        nvars_out = next(iter(table.values())).nvars if table else len(caps)
        return cls(caps, len(caps), nvars_out, table)


def make_operator(caps: Exponent, rule: Callable[[Exponent], MultiPoly],
                  nvars_out: int | None = None) -> LinearOperator:
    """Tabulate ``rule`` over every monomial below ``caps``."""
    caps = tuple(caps)
    table = {alpha: rule(alpha) for alpha in exponents_below(caps)}
    if nvars_out is None:
        nvars_out = next(iter(table.values())).nvars
    return LinearOperator(caps, len(caps), nvars_out, table)


def identity_operator(caps: Exponent) -> LinearOperator:
    n = len(caps)
    return make_operator(caps, lambda a: MultiPoly.monomial(n, a), n)


def apply(T: LinearOperator, f: MultiPoly) -> MultiPoly:
    """Linear extension of the action table to all of the capped space."""
    if f.nvars != T.nvars_in:
        raise ValueError(f"operator takes {T.nvars_in} variables, got {f.nvars}")
    for i in range(f.nvars):
        if f.degree(i) > T.caps[i]:
            raise ValueError(f"degree {f.degree(i)} in variable {i} exceeds cap {T.caps[i]}")
    out = MultiPoly.zero(T.nvars_out)
    for exp, coef in f.terms.items():
        image = T.action[exp]
        if not image.is_zero:
            out = out.add(image.mul(coef, prune=False), prune=False)
    return out


# ---- symbols -------------------------------------------------------------------


def _embed(p: MultiPoly, total: int, offset: int) -> MultiPoly:
    """Place an n-variable polynomial into a larger variable block."""
    pad_right = total - offset - p.nvars
    terms = {(0,) * offset + exp + (0,) * pad_right: c for exp, c in p.terms.items()}
    return MultiPoly(total, terms, prune=False)


def _symbol_nvars(T: LinearOperator) -> int:
    if T.nvars_in != T.nvars_out:
        raise ValueError("symbols need an operator with matching input/output variables")
    return 2 * T.nvars_in


def symbol_halfplane(T: LinearOperator) -> MultiPoly:
    """Image of the product of (z_j + w_j)^cap_j, reassembled exactly.

    This is the 2n-variable certificate polynomial for preservation on
    half-plane products.
    """
    total = _symbol_nvars(T)
    n = T.nvars_in
    out: dict[Exponent, complex] = {}
    for alpha in exponents_below(T.caps):
        image = T.action[alpha]
        if image.is_zero:
            continue
        weight = multi_binomial(T.caps, alpha)
        w_exp = tuple(k - a for k, a in zip(T.caps, alpha))
        for exp, coef in image.terms.items():
            key = exp + w_exp
            out[key] = out.get(key, 0j) + weight * coef
    return MultiPoly(total, out, prune=False)


def symbol_disc(T: LinearOperator) -> MultiPoly:
    """Image of the product of (1 + z_j w_j)^cap_j, reassembled exactly."""
    total = _symbol_nvars(T)
    out: dict[Exponent, complex] = {}
    for alpha in exponents_below(T.caps):
        image = T.action[alpha]
        if image.is_zero:
            continue
        weight = multi_binomial(T.caps, alpha)
        for exp, coef in image.terms.items():
            key = exp + alpha
            out[key] = out.get(key, 0j) + weight * coef
    return MultiPoly(total, out, prune=False)


def _general_kernel(caps: Exponent, maps: Sequence[MoebiusMap], total: int) -> MultiPoly:
    kernel = MultiPoly.constant(total, 1.0)
    n = len(caps)
    for i, m in enumerate(maps):
        zw = [0] * total
        zw[i] = 1
        zw[n + i] = 1
        z = [0] * total
        z[i] = 1
        w = [0] * total
        w[n + i] = 1
        cross = m.a * m.d + m.b * m.c
        factor = MultiPoly(total, {
            tuple(zw): 2 * m.a * m.c,
            tuple(z): cross,
            tuple(w): cross,
            (0,) * total: 2 * m.b * m.d,
        }, prune=False)
        kernel = kernel.mul(factor.pow(caps[i]), prune=False)
    return kernel


def symbol_general(T: LinearOperator, maps: Sequence[MoebiusMap]) -> MultiPoly:
    """Symbol against the Möbius-transported kernel, one map per variable.

    The kernel is the product over variables of
    ((a z + b)(c w + d) + (a w + b)(c z + d))^cap; the operator acts on its
    z-part monomial by monomial.
    """
    total = _symbol_nvars(T)
    n = T.nvars_in
    if len(maps) != n:
        raise ValueError(f"need {n} maps, got {len(maps)}")
    kernel = _general_kernel(T.caps, maps, total)
    grouped: dict[Exponent, dict[Exponent, complex]] = {}
    for exp, coef in kernel.terms.items():
        grouped.setdefault(exp[:n], {})[exp[n:]] = coef
    out = MultiPoly.zero(total)
    for z_exp, w_terms in grouped.items():
        image = T.action[z_exp]
        if image.is_zero:
            continue
        w_poly = MultiPoly(total, {(0,) * n + w_exp: c for w_exp, c in w_terms.items()},
                           prune=False)
        out = out.add(_embed(image, total, 0).mul(w_poly, prune=False), prune=False)
    return out


def exp_series_symbol(T: LinearOperator, sign: int, order: int) -> MultiPoly:
    """Truncated symbol against the exponential kernel, plus or minus convention.

    Sums sign^|alpha| * image(z^alpha) * w^alpha / alpha! over |alpha| <= order.
    The order must not exceed the operator's caps in any variable.
    """
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    if order < 0 or any(order > k for k in T.caps):
        raise ValueError(f"order {order} outside the operator's defined range {T.caps}")
    total = _symbol_nvars(T)
    out = MultiPoly.zero(total)
    n = T.nvars_in
    for alpha in exponents_below((order,) * n):
        weight_deg = sum(alpha)
        if weight_deg > order:
            continue
        image = T.action[alpha]
        if image.is_zero:
            continue
        fact = 1
        for a in alpha:
            fact *= math.factorial(a)
        coef = (sign ** weight_deg) / fact
        w_mono = MultiPoly.monomial(total, (0,) * n + alpha, coef)
        out = out.add(_embed(image, total, 0).mul(w_mono, prune=False), prune=False)
    return out


# ---- built-in operators -----------------------------------------------------


def asano_contraction(i: int, j: int, caps: Exponent) -> LinearOperator:
    """Merge the multi-affine pair (z_i, z_j): keep the constant and the z_i z_j
    part (renamed to z_i), kill the two mixed terms.  Output is constant in z_j."""
    caps = tuple(caps)
    n = len(caps)
    if n < 2 or i == j or not (0 <= i < n and 0 <= j < n):
        raise ValueError("asano contraction needs two distinct variables")
    if caps[i] != 1 or caps[j] != 1:
        raise ValueError(f"caps must be 1 in variables {i} and {j}, got {caps}")

    def rule(alpha: Exponent) -> MultiPoly:
        if alpha[i] == 0 and alpha[j] == 0:
            return MultiPoly.monomial(n, alpha)
        if alpha[i] == 1 and alpha[j] == 1:
            merged = list(alpha)
            merged[j] = 0
            return MultiPoly.monomial(n, tuple(merged))
        return MultiPoly.zero(n)

    return make_operator(caps, rule, n)


def multi_affine_part(caps: Exponent) -> LinearOperator:
    """Keep monomials with all exponents <= 1, kill the rest."""
    n = len(caps)

    def rule(alpha: Exponent) -> MultiPoly:
        if all(a <= 1 for a in alpha):
            return MultiPoly.monomial(n, alpha)
        return MultiPoly.zero(n)

    return make_operator(tuple(caps), rule, n)


def lee_yang_edge(i: int, j: int, strength: float, caps: Exponent) -> LinearOperator:
    """cosh(strength) * f + sinh(strength) * d^2 f / dz_i dz_j as a table."""
    caps = tuple(caps)
    n = len(caps)
    if i == j or not (0 <= i < n and 0 <= j < n):
        raise ValueError("edge operator needs two distinct variables")
    ch, sh = math.cosh(strength), math.sinh(strength)

    def rule(alpha: Exponent) -> MultiPoly:
        terms = {alpha: complex(ch)}
        if alpha[i] >= 1 and alpha[j] >= 1 and sh != 0.0:
            lowered = list(alpha)
            lowered[i] -= 1
            lowered[j] -= 1
            key = tuple(lowered)
            terms[key] = terms.get(key, 0j) + sh * alpha[i] * alpha[j]
        return MultiPoly(n, terms, prune=False)

    return make_operator(caps, rule, n)


def apply_lee_yang_edge(f: MultiPoly, i: int, j: int, strength: float) -> MultiPoly:
    """Direct application of the edge operator, cheaper than tabulating it."""
    lower = [0] * f.nvars
    lower[i] += 1
    lower[j] += 1
    return f.mul(math.cosh(strength), prune=False).add(
        f.derive(tuple(lower)).mul(math.sinh(strength), prune=False), prune=False)


def hadamard_schur(g: MultiPoly) -> LinearOperator:
    """Coefficientwise (convolution) product with a fixed multi-affine factor."""
    if any(d > 1 for d in g.degrees()):
        raise ValueError("hadamard_schur needs a multi-affine factor")
    n = g.nvars

    def rule(alpha: Exponent) -> MultiPoly:
        c = g.coeff(alpha)
        if c == 0:
            return MultiPoly.zero(n)
        return MultiPoly.monomial(n, alpha, c)

    return make_operator((1,) * n, rule, n)


def lieb_sokal(p_list: Sequence[MultiPoly], q_list: Sequence[MultiPoly],
               ) -> tuple[MultiPoly, MultiPoly]:
    """Pairing of polynomial families: the 2n-variable sum of products, and the
    n-variable sum with each first factor acting as a differential operator."""
    if len(p_list) != len(q_list) or not p_list:
        raise ValueError("need matching nonempty polynomial lists")
    n = p_list[0].nvars
    for p, q in zip(p_list, q_list):
        if p.nvars != n or q.nvars != n:
            raise ValueError("all polynomials must share one variable count")
    total = 2 * n
    paired = MultiPoly.zero(total)
    applied = MultiPoly.zero(n)
    for p, q in zip(p_list, q_list):
        paired = paired.add(_embed(p, total, 0).mul(_embed(q, total, n), prune=False),
                            prune=False)
        for exp, coef in p.terms.items():
            applied = applied.add(q.derive(exp).mul(coef, prune=False), prune=False)
    return paired, applied


def lieb_sokal_operator(n: int, cap: int) -> LinearOperator:
    """The 2n-variable monomial rule u^a v^b -> d^a (v^b) / dv^a, tabulated."""
    caps = (cap,) * (2 * n)

    def rule(alpha: Exponent) -> MultiPoly:
        u_part, v_part = alpha[:n], alpha[n:]
        if any(a > b for a, b in zip(u_part, v_part)):
            return MultiPoly.zero(2 * n)
        coef = 1
        for a, b in zip(u_part, v_part):
            coef *= math.factorial(b) // math.factorial(b - a)
        exp = (0,) * n + tuple(b - a for a, b in zip(u_part, v_part))
        return MultiPoly.monomial(2 * n, exp, coef)

    return make_operator(caps, rule, 2 * n)


# ---- preserver classification -------------------------------------------------


def rank_at_most_one(T: LinearOperator, tol: float = RANK_ONE_TOL,
                     ) -> tuple[bool, MultiPoly | None]:
    """Whether all images lie on one line; returns a representative direction."""
    reference: MultiPoly | None = None
    ref_scale = 0.0
    ref_pivot: Exponent | None = None
    for alpha in sorted(T.action):
        image = T.action[alpha]
        if image.is_zero:
            continue
        if reference is None:
            reference = image
            ref_scale = image.scale()
            ref_pivot = max(image.terms, key=lambda e: abs(image.terms[e]))
            continue
        scale = image.scale()
        lam = image.coeff(ref_pivot) / reference.coeff(ref_pivot)
        keys = set(image.terms) | set(reference.terms)
        for key in keys:
            deviation = abs(image.coeff(key) / scale - lam * reference.coeff(key) / scale)
            if deviation > tol:
                return False, reference
    return True, reference


@dataclass(frozen=True)
class SymbolReport:
    """Combined evidence for or against stability preservation."""
    symbol: MultiPoly
    symbol_kind: str
    verdict: StabilityVerdict | None
    rank_le_one: bool
    rank_one_image_stable: bool | None
    evidence_positive: bool

    def to_dict(self) -> dict:
        return {"symbol": self.symbol.to_dict(),
                "symbol_kind": self.symbol_kind,
                "verdict": None if self.verdict is None else self.verdict.to_dict(),
                "rank_le_one": self.rank_le_one,
                "rank_one_image_stable": self.rank_one_image_stable,
                "evidence_positive": self.evidence_positive}


def _pick_symbol(T: LinearOperator, domains: Sequence[CircularDomain],
                 maps: Sequence[MoebiusMap] | None) -> tuple[MultiPoly, str]:
    if maps is not None:
        return symbol_general(T, maps), "algebraic-general"
    if all(isinstance(d, HalfPlane) for d in domains) and len({d.theta for d in domains}) == 1:
        return symbol_halfplane(T), "algebraic-halfplane"
    unit_disc = all(isinstance(d, Disc) and d.center == 0 and d.radius == 1.0
                    for d in domains)
    unit_ext = all(isinstance(d, DiscExterior) and d.center == 0 and d.radius == 1.0
                   for d in domains)
    if unit_disc or unit_ext:
        return symbol_disc(T), "algebraic-disc"
    derived = [to_upper_half_plane(d) for d in domains]
    return symbol_general(T, derived), "algebraic-general"


def classify_preserver(T: LinearOperator, domains: Sequence[CircularDomain],
                       cfg: OracleConfig = OracleConfig(),
                       maps: Sequence[MoebiusMap] | None = None) -> SymbolReport:
    """Evidence-based preserver check on a product of circular domains.

    Combines the two certification routes: a rank-at-most-one action with a
    stable common image, or a symbol with no zero found on the doubled domain
    product.  Counterexamples on the symbol certify non-preservation of the
    capped class.
    """
    if len(domains) != T.nvars_in:
        raise ValueError("one domain per input variable required")
    symbol, kind = _pick_symbol(T, domains, maps)
    rank_ok, direction = rank_at_most_one(T)
    image_stable: bool | None = None
    if rank_ok:
        if direction is None:
            image_stable = True  # zero operator: every image is the zero polynomial
        else:
            image_stable = not find_zero(direction, domains, cfg).is_counterexample
    verdict: StabilityVerdict | None = None
    if not symbol.is_zero:
        verdict = find_zero(symbol, list(domains) + list(domains), cfg)
    positive = bool(rank_ok and image_stable) or (
        verdict is not None and not verdict.is_counterexample)
    return SymbolReport(symbol, kind, verdict, rank_ok, image_stable, positive)


def classify_preserver_ladder(factory: Callable[[Exponent], LinearOperator],
                              nvars: int, domains: Sequence[CircularDomain],
                              cfg: OracleConfig = OracleConfig(),
                              orders: Sequence[int] = (2, 4, 8),
                              ) -> list[SymbolReport]:
    """Run the algebraic-symbol check on a ladder of degree caps.

    For operators defined at every degree there is no finite certificate, so
    the honest computable surrogate is the sequence of capped verdicts.
    """
    return [classify_preserver(factory((order,) * nvars), domains, cfg)
            for order in orders]
