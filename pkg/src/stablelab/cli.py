"""Command-line front door: a thin client over the service handlers.

Every subcommand builds the same request models the HTTP endpoints take,
dispatches either in-process (default) or to a running server (``--url``),
prints a human summary, and optionally writes JSON and CSV artifacts.

Exit codes: 0 pass / evidence-positive, 1 certified counterexample or failed
check, 2 usage or input errors.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from typing import Sequence

import httpx
from fastapi import HTTPException
from pydantic import BaseModel, ValidationError

from . import schemas as sc
from .composition import InternalCheckError
from .polynomials import CapacityError, PolyFormatError
from .service import HANDLERS, app

SEED_ENV = "STABLELAB_SEED"


class UsageError(Exception):
    """Bad input: reported on stderr, exit code 2."""


class Dispatcher:
    """Routes requests to the in-process handlers or to a remote server."""

    def __init__(self, url: str | None = None, client: httpx.Client | None = None):
        self.url = url
        self.client = client

    def call(self, path: str, request: BaseModel, response_type: type[BaseModel]) -> BaseModel:
        if self.url is None and self.client is None:
            handler, _ = HANDLERS[path]
            return handler(request)
        client = self.client or httpx.Client(base_url=self.url, timeout=600.0)
        resp = client.post(path, json=request.model_dump(mode="json"))
        if resp.status_code != 200:
            try:
                detail = resp.json().get("detail", resp.text)
            except ValueError:
                detail = resp.text
            raise UsageError(f"server rejected request ({resp.status_code}): {detail}")
        return response_type.model_validate(resp.json())


# ---- input helpers ---------------------------------------------------------


def _load_json(path: str):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise UsageError(f"{path}: no such file") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None


def _parse_domain(spec: str) -> sc.DomainModel:
    """Compact domain syntax: halfplane:theta | disc:re,im,r | exterior:re,im,r."""
    kind, _, rest = spec.partition(":")
    try:
        if kind == "halfplane":
            return sc.DomainModel(kind="half_plane", theta=float(rest))
        if kind in ("disc", "exterior"):
            re_s, im_s, r_s = rest.split(",")
            return sc.DomainModel(kind="disc" if kind == "disc" else "disc_exterior",
                                  center=[float(re_s), float(im_s)], radius=float(r_s))
    except (ValueError, ValidationError) as exc:
        raise UsageError(f"bad domain spec {spec!r}: {exc}") from None
    raise UsageError(f"bad domain spec {spec!r}: unknown kind {kind!r}")


def _domains_from_args(args) -> list[sc.DomainModel]:
    if getattr(args, "domains", None):
        data = _load_json(args.domains)
        if not isinstance(data, list):
            raise UsageError(f"{args.domains}: expected a JSON list of domains")
        try:
            return [sc.DomainModel.model_validate(d) for d in data]
        except ValidationError as exc:
            raise UsageError(f"{args.domains}: {exc}") from None
    if getattr(args, "domain", None):
        return [_parse_domain(s) for s in args.domain]
    raise UsageError("no domains given (use --domain or --domains)")


def _poly_from_file(path: str) -> sc.PolyModel:
    try:
        return sc.PolyModel.model_validate(_load_json(path))
    except ValidationError as exc:
        raise UsageError(f"{path}: {exc}") from None


def _operator_from_args(args) -> sc.OperatorModel:
    if getattr(args, "op", None):
        try:
            return sc.OperatorModel.model_validate(_load_json(args.op))
        except ValidationError as exc:
            raise UsageError(f"{args.op}: {exc}") from None
    if getattr(args, "builtin", None):
        fields: dict = {"builtin": args.builtin}
        if args.kappa:
            fields["kappa"] = _parse_kappa(args.kappa)
        for name in ("i", "j", "strength"):
            value = getattr(args, name, None)
            if value is not None:
                fields[name] = value
        if getattr(args, "factor", None):
            fields["factor"] = _poly_from_file(args.factor)
        try:
            return sc.OperatorModel.model_validate(fields)
        except ValidationError as exc:
            raise UsageError(str(exc)) from None
    raise UsageError("no operator given (use --op FILE or --builtin NAME)")


def _parse_kappa(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",")]
    except ValueError:
        raise UsageError(f"bad kappa {text!r}: expected comma-separated integers") from None


def _oracle_config(args) -> sc.OracleConfigModel:
    fields = {}
    if getattr(args, "slices", None) is not None:
        fields["slices_per_variable"] = args.slices
    fields["seed"] = args.seed if getattr(args, "seed", None) is not None \
        else int(os.environ.get(SEED_ENV, "0"))
    if getattr(args, "residual_tol", None) is not None:
        fields["residual_tol"] = args.residual_tol
    if getattr(args, "boundary_margin", None) is not None:
        fields["boundary_margin"] = args.boundary_margin
    return sc.OracleConfigModel(**fields)


# ---- output helpers ----------------------------------------------------------


def _write_json(path: str, payload) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _write_zero_csv(path: str, points: Sequence[Sequence[float]]) -> None:
    """Zero list as re, im, modulus rows with lossless double precision."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("re,im,modulus\n")
        for re_part, im_part in points:
            mod = math.hypot(re_part, im_part)
            fh.write(f"{re_part:.17g},{im_part:.17g},{mod:.17g}\n")


def _emit(args, response: BaseModel, summary: str, csv_points=None) -> None:
    print(summary)
    if getattr(args, "json_out", None):
        _write_json(args.json_out, response.model_dump(mode="json"))
    if getattr(args, "csv_out", None) is not None and csv_points is not None:
        _write_zero_csv(args.csv_out, csv_points)


def _describe_verdict(v: sc.VerdictModel | None) -> str:
    if v is None:
        return "no stability check run"
    if v.kind == "counterexample":
        point = ", ".join(f"{re:.6g}{im:+.6g}i" for re, im in v.point)
        return (f"counterexample at ({point}); residual {v.residual:.3g}, "
                f"boundary margin {v.boundary_margin:.3g}")
    return (f"no zero found: {v.slices_per_variable} slices/variable, "
            f"{v.total_samples} samples, min |f| seen {v.min_abs_seen:.3g}")


# ---- subcommand runners ----------------------------------------------------------


def _run_stability(args, disp: Dispatcher) -> int:
    req = sc.StabilityRequest(poly=_poly_from_file(args.poly),
                              domains=_domains_from_args(args),
                              config=_oracle_config(args))
    resp = disp.call("/stability", req, sc.StabilityResponse)
    points = resp.verdict.point if resp.verdict.kind == "counterexample" else []
    _emit(args, resp, _describe_verdict(resp.verdict), points)
    return 0 if resp.passed else 1


def _run_symbol(args, disp: Dispatcher) -> int:
    req = sc.SymbolRequest(operator=_operator_from_args(args), kind=args.kind,
                           maps=_maps_from_args(args), sign=args.sign,
                           order=args.order)
    resp = disp.call("/symbol", req, sc.SymbolResponse)
    _emit(args, resp, f"{resp.symbol_kind} symbol, {len(resp.symbol.terms)} terms:\n"
          + json.dumps(resp.symbol.model_dump(), sort_keys=True))
    return 0


def _maps_from_args(args) -> list[sc.MoebiusModel] | None:
    if not getattr(args, "maps", None):
        return None
    data = _load_json(args.maps)
    try:
        return [sc.MoebiusModel.model_validate(m) for m in data]
    except ValidationError as exc:
        raise UsageError(f"{args.maps}: {exc}") from None


def _run_classify(args, disp: Dispatcher) -> int:
    req = sc.ClassifyRequest(operator=_operator_from_args(args),
                             domains=_domains_from_args(args),
                             maps=_maps_from_args(args),
                             config=_oracle_config(args))
    resp = disp.call("/classify", req, sc.ClassifyResponse)
    lines = [f"symbol ({resp.symbol_kind}): "
             + json.dumps(resp.symbol.model_dump(), sort_keys=True),
             f"rank at most one: {resp.rank_le_one}",
             _describe_verdict(resp.verdict),
             "evidence-positive preserver" if resp.evidence_positive
             else "certified non-preserver (symbol has an interior zero)"]
    _emit(args, resp, "\n".join(lines))
    return 0 if resp.evidence_positive else 1


def _run_moebius(args, disp: Dispatcher) -> int:
    points = []
    for spec in args.apply or []:
        try:
            re_s, im_s = spec.split(",")
            points.append([float(re_s), float(im_s)])
        except ValueError:
            raise UsageError(f"bad point {spec!r}: expected re,im") from None
    req = sc.MoebiusRequest(source=_parse_domain(args.src), target=_parse_domain(args.dst),
                            points=points)
    resp = disp.call("/moebius", req, sc.MoebiusResponse)
    lines = [f"map: {json.dumps(resp.map.model_dump(), sort_keys=True)}"]
    for src, img in zip(points, resp.images):
        lines.append(f"{src[0]:.6g}{src[1]:+.6g}i -> {img[0]:.6g}{img[1]:+.6g}i")
    _emit(args, resp, "\n".join(lines))
    return 0


def _run_compose(args, disp: Dispatcher) -> int:
    req = sc.ComposeRequest(f=_poly_from_file(args.f), g=_poly_from_file(args.g),
                            kappa=_parse_kappa(args.kappa), kind=args.kind,
                            check_stability=args.check, theta=args.theta,
                            config=_oracle_config(args))
    resp = disp.call("/compose", req, sc.ComposeResponse)
    summary = (f"composition ({args.kind}), {len(resp.result.terms)} terms\n"
               + _describe_verdict(resp.verdict))
    _emit(args, resp, summary)
    return 0 if resp.passed else 1


def _run_apolarity(args, disp: Dispatcher) -> int:
    domains = None
    if args.check != "none":
        domains = _domains_from_args(args)
    req = sc.ApolarityRequest(f=_poly_from_file(args.f), g=_poly_from_file(args.g),
                              kappa=_parse_kappa(args.kappa), check=args.check,
                              domains=domains,
                              degree_condition_on=args.degree_condition_on,
                              config=_oracle_config(args))
    resp = disp.call("/apolarity", req, sc.ApolarityResponse)
    lines = [f"bracket = {resp.bracket[0]:.12g}{resp.bracket[1]:+.12g}i "
             f"(|bracket| = {resp.abs_bracket:.6g}, scale {resp.scale:.6g})"]
    if args.check != "none":
        lines.append(f"applicable: {resp.applicable}, hypotheses verified: "
                     f"{resp.hypotheses_verified}, violation: {resp.violation}")
    _emit(args, resp, "\n".join(lines))
    return 0 if resp.passed else 1


def _run_lee_yang(args, disp: Dispatcher) -> int:
    try:
        system = sc.SpinSystemModel.model_validate(_load_json(args.system))
    except ValidationError as exc:
        raise UsageError(f"{args.system}: {exc}") from None
    req = sc.LeeYangRequest(system=system, tol=args.tol, check=args.check,
                            config=_oracle_config(args))
    resp = disp.call("/lee-yang", req, sc.LeeYangResponse)
    lines = []
    csv_points = None
    if resp.circle is not None:
        lines.append(f"equal-field roots: max | |root| - 1 | = "
                     f"{resp.circle['max_modulus_deviation']:.3e} "
                     f"(tol {resp.circle['tolerance']:.1e})")
        csv_points = resp.circle["roots"]
    if resp.exterior is not None:
        lines.append("fugacity polynomial on |x_i| > 1: "
                     + ("no zero found" if resp.exterior["passed"]
                        else "counterexample found"))
    lines.append("PASS" if resp.passed else "FAIL")
    _emit(args, resp, "\n".join(lines), csv_points)
    return 0 if resp.passed else 1


def _run_matching(args, disp: Dispatcher) -> int:
    try:
        graph = sc.GraphModel.model_validate(_load_json(args.graph))
    except ValidationError as exc:
        raise UsageError(f"{args.graph}: {exc}") from None
    req = sc.MatchingRequest(graph=graph, tol=args.tol, config=_oracle_config(args))
    resp = disp.call("/matching", req, sc.MatchingResponse)
    report = resp.report
    summary = (f"matching polynomial checks: zero-free evidence "
               f"{report['zero_free_evidence']}, max diagonal-root real part "
               f"{report['max_real_part']:.3e} -> "
               + ("PASS" if resp.passed else "FAIL"))
    _emit(args, resp, summary, report["diagonal_roots"])
    return 0 if resp.passed else 1


def _run_circle(args, disp: Dispatcher) -> int:
    data = _load_json(args.matrix)
    if not isinstance(data, list):
        raise UsageError(f"{args.matrix}: expected a JSON matrix")
    rows = []
    for row in data:
        rows.append([[float(e), 0.0] if isinstance(e, (int, float)) else e for e in row])
    try:
        req = sc.CircleRequest(matrix=rows, config=_oracle_config(args))
    except ValidationError as exc:
        raise UsageError(f"{args.matrix}: {exc}") from None
    resp = disp.call("/circle", req, sc.CircleResponse)
    summary = (f"pair-product identity ok: {resp.report['identity_ok']}, "
               f"polydisc zero-free evidence: {resp.report['zero_free_evidence']} -> "
               + ("PASS" if resp.passed else "FAIL"))
    _emit(args, resp, summary)
    return 0 if resp.passed else 1


def _run_serve(args, _disp: Dispatcher) -> int:
    import uvicorn
    uvicorn.run(app, host=args.host, port=args.port)
    return 0


# ---- argument parsing ----------------------------------------------------------


def _add_oracle_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=None,
                   help=f"oracle seed (default: ${SEED_ENV} or 0)")
    p.add_argument("--slices", type=int, default=None, help="slices per variable")
    p.add_argument("--residual-tol", type=float, default=None, dest="residual_tol")
    p.add_argument("--boundary-margin", type=float, default=None, dest="boundary_margin")


def _add_output_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--json", dest="json_out", default=None, help="write JSON artifact")
    p.add_argument("--csv", dest="csv_out", default=None, help="write zero-list CSV")


def _add_domain_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--domain", action="append", default=None, metavar="SPEC",
                   help="halfplane:theta | disc:re,im,r | exterior:re,im,r "
                        "(repeat per variable, or give once to broadcast)")
    p.add_argument("--domains", default=None, help="JSON file with a list of domains")


def _add_operator_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--op", default=None, help="operator JSON (action table or builtin)")
    p.add_argument("--builtin", default=None,
                   choices=["identity", "asano", "multi_affine_part",
                            "lee_yang_edge", "hadamard_schur"])
    p.add_argument("--kappa", default=None, help="comma-separated degree caps")
    p.add_argument("--i", type=int, default=None)
    p.add_argument("--j", type=int, default=None)
    p.add_argument("--strength", type=float, default=None)
    p.add_argument("--factor", default=None, help="polynomial JSON for hadamard_schur")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="stablelab",
                                     description="Zero-free polynomial laboratory")
    parser.add_argument("--url", default=None,
                        help="POST to a running service instead of in-process")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("stability", help="search for interior zeros")
    p.add_argument("--poly", required=True)
    _add_domain_flags(p)
    _add_oracle_flags(p)
    _add_output_flags(p)
    p.set_defaults(run=_run_stability)

    p = sub.add_parser("symbol", help="compute an operator symbol")
    _add_operator_flags(p)
    p.add_argument("--kind", choices=["halfplane", "disc", "general", "series"],
                   default="halfplane")
    p.add_argument("--maps", default=None, help="JSON list of Moebius maps")
    p.add_argument("--order", type=int, default=None)
    p.add_argument("--sign", type=int, choices=[1, -1], default=1)
    _add_output_flags(p)
    p.set_defaults(run=_run_symbol)

    p = sub.add_parser("classify", help="evidence-based preserver check")
    _add_operator_flags(p)
    _add_domain_flags(p)
    p.add_argument("--maps", default=None, help="JSON list of Moebius maps")
    _add_oracle_flags(p)
    _add_output_flags(p)
    p.set_defaults(run=_run_classify)

    p = sub.add_parser("moebius", help="catalog map between two domains")
    p.add_argument("--from", dest="src", required=True, metavar="SPEC")
    p.add_argument("--to", dest="dst", required=True, metavar="SPEC")
    p.add_argument("--apply", action="append", default=None, metavar="RE,IM")
    _add_output_flags(p)
    p.set_defaults(run=_run_moebius)

    p = sub.add_parser("compose", help="two-block composition product")
    p.add_argument("--f", required=True)
    p.add_argument("--g", required=True)
    p.add_argument("--kappa", required=True)
    p.add_argument("--kind", choices=["halfplane", "disc"], default="halfplane")
    p.add_argument("--check", action="store_true", help="also run the stability oracle")
    p.add_argument("--theta", type=float, default=0.0)
    _add_oracle_flags(p)
    _add_output_flags(p)
    p.set_defaults(run=_run_compose)

    p = sub.add_parser("apolarity", help="apolarity bracket and Grace-type checks")
    p.add_argument("--f", required=True)
    p.add_argument("--g", required=True)
    p.add_argument("--kappa", required=True)
    p.add_argument("--check", choices=["none", "disc", "halfplane"], default="none")
    p.add_argument("--degree-condition-on", choices=["f", "g"], default="g",
                   dest="degree_condition_on")
    _add_domain_flags(p)
    _add_oracle_flags(p)
    _add_output_flags(p)
    p.set_defaults(run=_run_apolarity)

    p = sub.add_parser("lee-yang", help="spin-system zero checks")
    p.add_argument("--system", required=True)
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--check", choices=["circle", "exterior", "both"], default="circle")
    _add_oracle_flags(p)
    _add_output_flags(p)
    p.set_defaults(run=_run_lee_yang)

    p = sub.add_parser("matching", help="matching-polynomial checks")
    p.add_argument("--graph", required=True)
    p.add_argument("--tol", type=float, default=1e-8)
    _add_oracle_flags(p)
    _add_output_flags(p)
    p.set_defaults(run=_run_matching)

    p = sub.add_parser("circle", help="pairwise-product identity and polydisc check")
    p.add_argument("--matrix", required=True)
    _add_oracle_flags(p)
    _add_output_flags(p)
    p.set_defaults(run=_run_circle)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(run=_run_serve)

    return parser


def main(argv: Sequence[str] | None = None, client: httpx.Client | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    disp = Dispatcher(url=args.url, client=client)
    try:
        return args.run(args, disp)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except HTTPException as exc:
        print(f"error: {exc.detail}", file=sys.stderr)
        return 2
    except (PolyFormatError, CapacityError, ValidationError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except InternalCheckError as exc:
        print(f"internal check failed: {exc}", file=sys.stderr)
        return 2
    except httpx.HTTPError as exc:
        print(f"transport error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
