"""HTTP service exposing the laboratory over JSON.

Each endpoint is a thin wrapper: validate the request model, call the core
function, wrap the result.  The CLI calls the same handler functions
in-process, so both front ends share one behavior.
"""

from __future__ import annotations

import functools
import math

from fastapi import FastAPI, HTTPException
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse

from . import schemas as sc
from .composition import (InternalCheckError, apolarity_bracket, bracket_scale,
                          compose_disc, compose_halfplane, grace_check_disc,
                          grace_check_halfplane)
from .domains import Disc, HalfPlane, MoebiusPoleError, moebius_for
from .operators import (classify_preserver, exp_series_symbol, symbol_disc,
                        symbol_general, symbol_halfplane)
from .oracle import find_zero
from .polynomials import CapacityError, PolyFormatError
from .statmech import (circle_theorem_product, heilmann_lieb_check, lee_yang_check,
                       lee_yang_exterior_check)

app = FastAPI(title="stablelab", version="0.1.0",
              description="Stability oracle, operator symbols, and spin-system "
                          "checks for multivariate polynomials.")


def _guarded(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except (PolyFormatError, CapacityError, MoebiusPoleError, ValueError) as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        except InternalCheckError as exc:
            raise HTTPException(status_code=500, detail=str(exc)) from exc
    return wrapper


def _json_safe(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        return repr(obj)
    if isinstance(obj, dict):
        return {k: _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_safe(v) for v in obj]
    if obj is None or isinstance(obj, (str, int, float, bool)):
        return obj
    return repr(obj)


@app.exception_handler(RequestValidationError)
async def _validation_handler(_request, exc: RequestValidationError) -> JSONResponse:
    # rejected inputs may contain NaN/Inf, which the default encoder cannot echo
    return JSONResponse(status_code=422, content={"detail": _json_safe(exc.errors())})


@app.get("/health")
def health() -> dict:
    return {"status": "ok"}


@app.post("/stability", response_model=sc.StabilityResponse)
@_guarded
def stability(req: sc.StabilityRequest) -> sc.StabilityResponse:
    poly = req.poly.to_core()
    domains = req.core_domains(poly.nvars)
    verdict = find_zero(poly, domains, req.config.to_core())
    return sc.StabilityResponse(verdict=sc.VerdictModel.from_core(verdict),
                                passed=not verdict.is_counterexample)


@app.post("/symbol", response_model=sc.SymbolResponse)
@_guarded
def symbol(req: sc.SymbolRequest) -> sc.SymbolResponse:
    T = req.operator.to_core()
    if req.kind == "halfplane":
        sym, label = symbol_halfplane(T), "algebraic-halfplane"
    elif req.kind == "disc":
        sym, label = symbol_disc(T), "algebraic-disc"
    elif req.kind == "general":
        sym = symbol_general(T, [m.to_core() for m in req.maps])
        label = "algebraic-general"
    else:
        sym = exp_series_symbol(T, req.sign, req.order)
        label = f"series-truncation:{req.order}:{'plus' if req.sign > 0 else 'minus'}"
    return sc.SymbolResponse(symbol=sc.PolyModel.from_core(sym), symbol_kind=label)


@app.post("/classify", response_model=sc.ClassifyResponse)
@_guarded
def classify(req: sc.ClassifyRequest) -> sc.ClassifyResponse:
    T = req.operator.to_core()
    domains = [d.to_core() for d in req.domains]
    if len(domains) == 1 and T.nvars_in > 1:
        domains = domains * T.nvars_in
    maps = None if req.maps is None else [m.to_core() for m in req.maps]
    report = classify_preserver(T, domains, req.config.to_core(), maps)
    return sc.ClassifyResponse(
        symbol=sc.PolyModel.from_core(report.symbol),
        symbol_kind=report.symbol_kind,
        verdict=None if report.verdict is None else sc.VerdictModel.from_core(report.verdict),
        rank_le_one=report.rank_le_one,
        rank_one_image_stable=report.rank_one_image_stable,
        evidence_positive=report.evidence_positive)


@app.post("/moebius", response_model=sc.MoebiusResponse)
@_guarded
def moebius(req: sc.MoebiusRequest) -> sc.MoebiusResponse:
    m = moebius_for(req.source.to_core(), req.target.to_core())
    images = [sc.pair(m.apply(complex(p[0], p[1]))) for p in req.points]
    return sc.MoebiusResponse(map=sc.MoebiusModel.from_core(m), images=images)


@app.post("/compose", response_model=sc.ComposeResponse)
@_guarded
def compose(req: sc.ComposeRequest) -> sc.ComposeResponse:
    f, g = req.f.to_core(), req.g.to_core()
    caps = tuple(req.kappa)
    if req.kind == "halfplane":
        result = compose_halfplane(f, g, caps)
        check_domains = [HalfPlane(req.theta)] * (2 * len(caps))
    else:
        result = compose_disc(f, g, caps)
        check_domains = [Disc(0j, 1.0)] * (2 * len(caps))
    verdict = None
    passed = True
    if req.check_stability and not result.is_zero:
        verdict = find_zero(result, check_domains, req.config.to_core())
        passed = not verdict.is_counterexample
    return sc.ComposeResponse(
        result=sc.PolyModel.from_core(result),
        verdict=None if verdict is None else sc.VerdictModel.from_core(verdict),
        passed=passed)


@app.post("/apolarity", response_model=sc.ApolarityResponse)
@_guarded
def apolarity(req: sc.ApolarityRequest) -> sc.ApolarityResponse:
    f, g = req.f.to_core(), req.g.to_core()
    caps = tuple(req.kappa)
    if req.check == "none":
        bracket = apolarity_bracket(f, g, caps)
        variant = apolarity_bracket(f, g, caps, per_term_signs=True)
        return sc.ApolarityResponse(
            bracket=sc.pair(bracket), bracket_variant=sc.pair(variant),
            abs_bracket=abs(bracket), scale=bracket_scale(f, g, caps), passed=True)
    domains = [d.to_core() for d in req.domains]
    cfg = req.config.to_core()
    if req.check == "disc":
        report = grace_check_disc(f, g, domains, caps, cfg, req.degree_condition_on)
    else:
        if len(domains) != 2 or not all(isinstance(d, HalfPlane) for d in domains):
            raise ValueError("half-plane check needs exactly two half_plane domains")
        report = grace_check_halfplane(f, g, domains[0], domains[1], caps, cfg)
    return sc.ApolarityResponse(
        bracket=sc.pair(report.bracket), bracket_variant=sc.pair(report.bracket_variant),
        abs_bracket=abs(report.bracket), scale=report.scale,
        applicable=report.applicable, hypotheses_verified=report.hypotheses_verified,
        violation=report.violation, details=report.details,
        passed=not report.violation)


@app.post("/lee-yang", response_model=sc.LeeYangResponse)
@_guarded
def lee_yang(req: sc.LeeYangRequest) -> sc.LeeYangResponse:
    system = req.system.to_core()
    circle = exterior = None
    passed = True
    if req.check in ("circle", "both"):
        circle = lee_yang_check(system, req.tol)
        passed = passed and circle["passed"]
    if req.check in ("exterior", "both"):
        exterior = lee_yang_exterior_check(system, req.config.to_core())
        passed = passed and exterior["passed"]
    return sc.LeeYangResponse(circle=circle, exterior=exterior, passed=passed)


@app.post("/matching", response_model=sc.MatchingResponse)
@_guarded
def matching(req: sc.MatchingRequest) -> sc.MatchingResponse:
    report = heilmann_lieb_check(req.graph.to_core(), req.tol, req.config.to_core())
    return sc.MatchingResponse(report=report, passed=report["passed"])


@app.post("/circle", response_model=sc.CircleResponse)
@_guarded
def circle(req: sc.CircleRequest) -> sc.CircleResponse:
    report = circle_theorem_product(req.to_core_matrix(), req.config.to_core())
    passed = report["identity_ok"] and report["zero_free_evidence"]
    return sc.CircleResponse(report=report, passed=passed)


# Registry used by the CLI for in-process dispatch.
HANDLERS = {
    "/stability": (stability, sc.StabilityResponse),
    "/symbol": (symbol, sc.SymbolResponse),
    "/classify": (classify, sc.ClassifyResponse),
    "/moebius": (moebius, sc.MoebiusResponse),
    "/compose": (compose, sc.ComposeResponse),
    "/apolarity": (apolarity, sc.ApolarityResponse),
    "/lee-yang": (lee_yang, sc.LeeYangResponse),
    "/matching": (matching, sc.MatchingResponse),
    "/circle": (circle, sc.CircleResponse),
}
