"""Pydantic request/response models shared by the HTTP service and the CLI.

These mirror the JSON interchange formats: polynomials as exponent/coefficient
term lists, domains as tagged records, operators as action tables or named
built-ins.  Coefficients must be finite; NaN and infinity are rejected at the
model boundary.
"""

from __future__ import annotations

from typing import Annotated, Literal, Optional

import numpy as np
from pydantic import BaseModel, Field, model_validator

from . import domains as dom
from . import operators as ops
from .oracle import OracleConfig, StabilityVerdict
from .polynomials import MultiPoly

FiniteFloat = Annotated[float, Field(allow_inf_nan=False)]
ComplexPair = Annotated[list[FiniteFloat], Field(min_length=2, max_length=2)]


def pair(z: complex) -> list[float]:
    return [z.real, z.imag]


class TermModel(BaseModel):
    exp: list[Annotated[int, Field(ge=0)]]
    coef: ComplexPair


class PolyModel(BaseModel):
    nvars: Annotated[int, Field(ge=1)]
    terms: list[TermModel]

    @model_validator(mode="after")
    def _check_terms(self) -> "PolyModel":
        seen = set()
        for term in self.terms:
            if len(term.exp) != self.nvars:
                raise ValueError(f"exponent {term.exp} does not have {self.nvars} entries")
            key = tuple(term.exp)
            if key in seen:
                raise ValueError(f"duplicate exponent key {term.exp}")
            seen.add(key)
        return self

    def to_core(self) -> MultiPoly:
        return MultiPoly.from_dict(self.model_dump())

    @classmethod
    def from_core(cls, p: MultiPoly) -> "PolyModel":
        return cls.model_validate(p.to_dict())


class DomainModel(BaseModel):
    kind: Literal["half_plane", "disc", "disc_exterior"]
    theta: Optional[FiniteFloat] = None
    center: Optional[ComplexPair] = None
    radius: Optional[Annotated[float, Field(gt=0, allow_inf_nan=False)]] = None

    @model_validator(mode="after")
    def _check_fields(self) -> "DomainModel":
        if self.kind == "half_plane":
            if self.theta is None:
                raise ValueError("half_plane needs a theta")
        else:
            if self.center is None or self.radius is None:
                raise ValueError(f"{self.kind} needs center and radius")
        return self

    def to_core(self) -> dom.CircularDomain:
        if self.kind == "half_plane":
            return dom.HalfPlane(self.theta)
        center = complex(self.center[0], self.center[1])
        cls = dom.Disc if self.kind == "disc" else dom.DiscExterior
        return cls(center, self.radius)

    @classmethod
    def from_core(cls, d: dom.CircularDomain) -> "DomainModel":
        return cls.model_validate(d.to_dict())


class MoebiusModel(BaseModel):
    a: ComplexPair
    b: ComplexPair
    c: ComplexPair
    d: ComplexPair

    def to_core(self) -> dom.MoebiusMap:
        def cplx(v):
            return complex(v[0], v[1])
        return dom.MoebiusMap(cplx(self.a), cplx(self.b), cplx(self.c), cplx(self.d))

    @classmethod
    def from_core(cls, m: dom.MoebiusMap) -> "MoebiusModel":
        return cls(a=pair(m.a), b=pair(m.b), c=pair(m.c), d=pair(m.d))


class OracleConfigModel(BaseModel):
    slices_per_variable: Annotated[int, Field(ge=1)] = 200
    seed: int = 0
    residual_tol: Annotated[float, Field(gt=0, allow_inf_nan=False)] = 1e-9
    boundary_margin: Annotated[float, Field(gt=0, allow_inf_nan=False)] = 1e-7
    max_newton_iters: Annotated[int, Field(ge=1)] = 50

    def to_core(self) -> OracleConfig:
        return OracleConfig(**self.model_dump())


class VerdictModel(BaseModel):
    kind: Literal["counterexample", "no_zero_found"]
    point: Optional[list[ComplexPair]] = None
    residual: Optional[float] = None
    boundary_margin: Optional[float] = None
    slices_per_variable: Optional[int] = None
    total_samples: Optional[int] = None
    min_abs_seen: Optional[float] = None

    @classmethod
    def from_core(cls, v: StabilityVerdict) -> "VerdictModel":
        return cls.model_validate(v.to_dict())


class ActionEntryModel(BaseModel):
    alpha: list[Annotated[int, Field(ge=0)]]
    image: PolyModel


class OperatorModel(BaseModel):
    """Action table, or a named built-in with its parameters."""
    kappa: Optional[list[Annotated[int, Field(ge=0)]]] = None
    action: Optional[list[ActionEntryModel]] = None
    builtin: Optional[Literal["identity", "asano", "multi_affine_part",
                              "lee_yang_edge", "hadamard_schur"]] = None
    i: Optional[int] = None
    j: Optional[int] = None
    strength: Optional[FiniteFloat] = None
    factor: Optional[PolyModel] = None

    @model_validator(mode="after")
    def _check_shape(self) -> "OperatorModel":
        if self.builtin is None:
            if self.kappa is None or self.action is None:
                raise ValueError("operator needs either a builtin name or kappa+action")
        elif self.builtin in ("asano", "lee_yang_edge"):
            if self.i is None or self.j is None or self.kappa is None:
                raise ValueError(f"builtin {self.builtin} needs i, j, and kappa")
            if self.builtin == "lee_yang_edge" and self.strength is None:
                raise ValueError("lee_yang_edge needs a strength")
        elif self.builtin == "hadamard_schur":
            if self.factor is None:
                raise ValueError("hadamard_schur needs a factor polynomial")
        elif self.kappa is None:
            raise ValueError(f"builtin {self.builtin} needs kappa")
        return self

    def to_core(self) -> ops.LinearOperator:
        if self.builtin is None:
            return ops.LinearOperator.from_dict(
                {"kappa": self.kappa,
                 "action": [e.model_dump() for e in self.action]})
        if self.builtin == "identity":
            return ops.identity_operator(tuple(self.kappa))
        if self.builtin == "asano":
            return ops.asano_contraction(self.i, self.j, tuple(self.kappa))
        if self.builtin == "multi_affine_part":
            return ops.multi_affine_part(tuple(self.kappa))
        if self.builtin == "lee_yang_edge":
            return ops.lee_yang_edge(self.i, self.j, self.strength, tuple(self.kappa))
        return ops.hadamard_schur(self.factor.to_core())


# ---- per-endpoint payloads --------------------------------------------------


class StabilityRequest(BaseModel):
    poly: PolyModel
    domains: list[DomainModel]
    config: OracleConfigModel = OracleConfigModel()

    def core_domains(self, nvars: int) -> list[dom.CircularDomain]:
        ds = [d.to_core() for d in self.domains]
        if len(ds) == 1 and nvars > 1:
            ds = ds * nvars
        if len(ds) != nvars:
            raise ValueError(f"need 1 or {nvars} domains, got {len(self.domains)}")
        return ds


class StabilityResponse(BaseModel):
    verdict: VerdictModel
    passed: bool


class SymbolRequest(BaseModel):
    operator: OperatorModel
    kind: Literal["halfplane", "disc", "general", "series"] = "halfplane"
    maps: Optional[list[MoebiusModel]] = None
    sign: Literal[1, -1] = 1
    order: Optional[int] = None

    @model_validator(mode="after")
    def _check_kind(self) -> "SymbolRequest":
        if self.kind == "general" and self.maps is None:
            raise ValueError("general symbol needs maps")
        if self.kind == "series" and self.order is None:
            raise ValueError("series symbol needs an order")
        return self


class SymbolResponse(BaseModel):
    symbol: PolyModel
    symbol_kind: str


class ClassifyRequest(BaseModel):
    operator: OperatorModel
    domains: list[DomainModel]
    maps: Optional[list[MoebiusModel]] = None
    config: OracleConfigModel = OracleConfigModel()


class ClassifyResponse(BaseModel):
    symbol: PolyModel
    symbol_kind: str
    verdict: Optional[VerdictModel]
    rank_le_one: bool
    rank_one_image_stable: Optional[bool]
    evidence_positive: bool


class MoebiusRequest(BaseModel):
    source: DomainModel
    target: DomainModel
    points: list[ComplexPair] = []


class MoebiusResponse(BaseModel):
    map: MoebiusModel
    images: list[ComplexPair]


class ComposeRequest(BaseModel):
    f: PolyModel
    g: PolyModel
    kappa: list[Annotated[int, Field(ge=0)]]
    kind: Literal["halfplane", "disc"] = "halfplane"
    check_stability: bool = False
    theta: FiniteFloat = 0.0
    config: OracleConfigModel = OracleConfigModel()


class ComposeResponse(BaseModel):
    result: PolyModel
    verdict: Optional[VerdictModel]
    passed: bool


class ApolarityRequest(BaseModel):
    f: PolyModel
    g: PolyModel
    kappa: list[Annotated[int, Field(ge=0)]]
    check: Literal["none", "disc", "halfplane"] = "none"
    domains: Optional[list[DomainModel]] = None
    degree_condition_on: Literal["f", "g"] = "g"
    config: OracleConfigModel = OracleConfigModel()

    @model_validator(mode="after")
    def _check_domains(self) -> "ApolarityRequest":
        if self.check != "none" and not self.domains:
            raise ValueError(f"check={self.check} needs domains")
        return self


class ApolarityResponse(BaseModel):
    bracket: ComplexPair
    bracket_variant: ComplexPair
    abs_bracket: float
    scale: float
    applicable: Optional[bool] = None
    hypotheses_verified: Optional[bool] = None
    violation: Optional[bool] = None
    details: Optional[dict] = None
    passed: bool


class SpinSystemModel(BaseModel):
    n: Annotated[int, Field(ge=1)]
    J: list[list[FiniteFloat]]

    def to_core(self):
        from .statmech import SpinSystem
        return SpinSystem(self.n, np.asarray(self.J, dtype=float))


class LeeYangRequest(BaseModel):
    system: SpinSystemModel
    tol: Annotated[float, Field(gt=0, allow_inf_nan=False)] = 1e-8
    check: Literal["circle", "exterior", "both"] = "circle"
    config: OracleConfigModel = OracleConfigModel()


class LeeYangResponse(BaseModel):
    circle: Optional[dict] = None
    exterior: Optional[dict] = None
    passed: bool


class GraphModel(BaseModel):
    n: Annotated[int, Field(ge=1)]
    edges: list[list] = []

    def to_core(self):
        from .statmech import WeightedGraph
        return WeightedGraph(self.n, tuple((int(i), int(j), float(w))
                                           for i, j, w in self.edges))


class MatchingRequest(BaseModel):
    graph: GraphModel
    tol: Annotated[float, Field(gt=0, allow_inf_nan=False)] = 1e-8
    config: OracleConfigModel = OracleConfigModel()


class MatchingResponse(BaseModel):
    report: dict
    passed: bool


class CircleRequest(BaseModel):
    matrix: list[list[ComplexPair]]
    config: OracleConfigModel = OracleConfigModel()

    def to_core_matrix(self) -> np.ndarray:
        rows = [[complex(e[0], e[1]) for e in row] for row in self.matrix]
        return np.asarray(rows, dtype=complex)


class CircleResponse(BaseModel):
    report: dict
    passed: bool
