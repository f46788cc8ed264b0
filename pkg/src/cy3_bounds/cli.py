import argparse
import json
import logging
import sys
import tomllib
from fractions import Fraction
from pathlib import Path
from typing import IO, Callable

import jsonlines
from pydantic import ValidationError

from cy3_bounds.algebra.forms import DivisorClass, c2_eval, cube, hessian_form
from cy3_bounds.algebra.real_algebraic import RealAlgebraic
from cy3_bounds.entities import DomainError, FibrationBranch, OutputFormat
from cy3_bounds.geometry.cone2 import (
    InconsistentInputError,
    classify_cubic,
    delta_ray,
    mov_bound_ray,
    positive_index_components,
)
from cy3_bounds.geometry.svg_renderer import SvgRenderer, forms_scene
from cy3_bounds.serialization.json_codec import (
    DecodeError,
    encode_algebraic,
    encode_cone,
    encode_forms,
    encode_ray,
    encode_rational,
    parse_forms_instance,
    parse_rational,
)
from cy3_bounds.serialization.jsonl_reader import ingest_jsonl, read_records
from cy3_bounds.services.bounds.bounds import (
    fibration_threshold,
    min_effectivity_m,
    roundup_effectivity,
)
from cy3_bounds.services.flops.flops import FlopData, FormsState, apply_flop
from cy3_bounds.services.pipeline.pipeline import AnalysisParams, BoundednessAnalyzer
from cy3_bounds.services.pipeline.report_writer import ReportWriter, report_scene
from cy3_bounds.services.surfaces.surfaces import (
    enumerate_pairs,
    enumerate_pairs_by_cube,
    solve_classes,
)
from cy3_bounds.settings import Constants, EnumerationCaps, Settings

logger = logging.getLogger(__name__)

_CAP_FLAGS = {
    "m_cap": "--m-cap",
    "relevant_m_cap": "--relevant-m-cap",
    "n_cap": "--n-cap",
    "enumeration_nodes": "--node-cap",
    "c2e_cap": "--c2e-cap",
    "coefficient_box": "--box-cap",
    "class_search": "--class-search",
}


class UsageError(Exception):
    pass


def _class(text: str) -> DivisorClass:
    try:
        return DivisorClass.parse(text)
    except DomainError as e:
        raise argparse.ArgumentTypeError(str(e))


def _rational(text: str) -> Fraction:
    try:
        return parse_rational(text)
    except DecodeError as e:
        raise argparse.ArgumentTypeError(str(e))


def _add_io(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("-i", "--input", type=Path, help="input JSON (stdin when omitted)")
    parser.add_argument("-o", "--output", type=Path, help="output file (stdout when omitted)")
    parser.add_argument("--format", type=OutputFormat, choices=list(OutputFormat), default=OutputFormat.json)


def _add_params(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=Path, help="TOML or JSON file with settings")
    parser.add_argument("--mu0", type=_rational, help="klt threshold, a rational in (0, 1)")
    parser.add_argument("--r", type=int, help="universal constant r >= 1")
    for name, flag in _CAP_FLAGS.items():
        parser.add_argument(flag, dest=name, type=int)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cy3-bounds", description="Boundedness data of Picard number two forms")
    subparsers = parser.add_subparsers(dest="command", required=True)

    classify = subparsers.add_parser("classify", help="classify the cubic form")
    _add_io(classify)

    cone = subparsers.add_parser("cone", help="positive index components, with Delta and R for a class")
    _add_io(cone)
    cone.add_argument("--e", type=_class, help="rigid class E for Delta and R")

    surfaces = subparsers.add_parser("surfaces", help="candidate surface pairs")
    _add_io(surfaces)
    _add_params(surfaces)
    surfaces.add_argument("--c2-upper", type=int, default=None)
    surfaces.add_argument("--e3-lower", type=int, default=None)
    surfaces.add_argument("--classes", action="store_true", help="solve for classes on the input forms")

    flop = subparsers.add_parser("flop", help="apply a flop to the forms")
    _add_io(flop)
    flop.add_argument("--eta", required=True)
    flop.add_argument("--nd", required=True, help="curve counts d:n_d,...")

    rr = subparsers.add_parser("rr", help="smallest m with chi(mD) >= 2")
    _add_io(rr)
    _add_params(rr)
    rr.add_argument("--class", dest="divisor", type=_class, required=True)

    roundup = subparsers.add_parser("roundup", help="round-up effectivity along E")
    _add_io(roundup)
    _add_params(roundup)
    roundup.add_argument("--d0", type=_class, required=True)
    roundup.add_argument("--e", type=_class, required=True)
    roundup.add_argument("--lambda-poly", required=True, help="integer coefficients, constant term first")
    roundup.add_argument("--lambda-interval", required=True, help="isolating interval lo,hi")

    threshold = subparsers.add_parser("threshold", help="fibration threshold n")
    _add_io(threshold)
    _add_params(threshold)
    threshold.add_argument("--branch", choices=["elliptic", "k3"], required=True)
    threshold.add_argument("--class", dest="divisor", type=_class, required=True)
    threshold.add_argument("--hint", type=_class, required=True, help="movable non-big class L")
    threshold.add_argument("--e", type=_class, required=True)
    threshold.add_argument("-m", type=int, help="multiple of D (smallest effective when omitted)")

    analyze = subparsers.add_parser("analyze", help="full boundedness report")
    _add_io(analyze)
    _add_params(analyze)
    analyze.add_argument("--c2-upper", type=int, default=None)
    analyze.add_argument("--movable-hint", type=_class)
    analyze.add_argument("--slope-denominator", type=int, default=1)
    analyze.add_argument("--svg", type=Path, help="also draw the report scene")

    batch = subparsers.add_parser("batch", help="analyze a JSONL corpus")
    _add_io(batch)
    _add_params(batch)
    batch.add_argument("--c2-upper", type=int, default=None)
    batch.add_argument("--jobs", type=int, default=None)

    render = subparsers.add_parser("render", help="SVG of the forms or of an analysis report")
    _add_io(render)
    return parser


def _load_config(path: Path | None) -> dict:
    if path is None:
        return {}
    if path.suffix == ".toml":
        with open(path, "rb") as fp:
            data = tomllib.load(fp)
    else:
        with open(path, encoding="utf-8") as fp:
            data = json.load(fp)
    if not isinstance(data, dict):
        raise DecodeError(f"config file {path} must hold a table of settings")
    return {key.upper(): value for key, value in data.items()}


def _settings(args: argparse.Namespace) -> Settings:
    """Defaults, then environment, then the config file, then flags."""
    settings = Settings(**_load_config(getattr(args, "config", None)))
    caps = {name: getattr(args, name) for name in _CAP_FLAGS if getattr(args, name, None) is not None}
    if caps:
        settings.DEFAULT_CAPS = EnumerationCaps.model_validate({**settings.DEFAULT_CAPS.model_dump(), **caps})
    if getattr(args, "mu0", None) is not None:
        settings.MU0 = str(args.mu0)
    if getattr(args, "r", None) is not None:
        settings.R_CONSTANT = args.r
    if getattr(args, "c2_upper", None) is not None:
        settings.C2E_UPPER = args.c2_upper
    if getattr(args, "jobs", None) is not None:
        settings.JOBS = args.jobs
    return settings


def _load_json(args: argparse.Namespace, stdin: IO[str]):
    if args.input is None:
        return json.load(stdin)
    with open(args.input, encoding="utf-8") as fp:
        return json.load(fp)


def _read_forms(args: argparse.Namespace, stdin: IO[str]) -> FormsState:
    return parse_forms_instance(_load_json(args, stdin))


def _emit(text: str, args: argparse.Namespace, stdout: IO[str]) -> None:
    if args.output is None:
        stdout.write(text + "\n")
    else:
        args.output.write_text(text + "\n", encoding="utf-8")


def _classify(args, settings, constants, stdin) -> dict:
    state = _read_forms(args, stdin)
    case = classify_cubic(state.trilinear)
    return {
        "case": case.tag.value,
        "discriminant": encode_rational(case.discriminant),
        "vanishing_rays": [encode_ray(ray) for ray in case.vanishing_rays],
        "hessian": [encode_rational(v) for v in hessian_form(state.trilinear).binary_coefficients],
    }


def _cone(args, settings, constants, stdin) -> dict:
    state = _read_forms(args, stdin)
    T = state.trilinear
    components = []
    for index, P in enumerate(positive_index_components(T)):
        entry = {"index": index, "cone": encode_cone(P)}
        if args.e is not None:
            try:
                delta = delta_ray(P, T, args.e)
                entry["delta"] = encode_ray(delta.ray)
                entry["delta_semi_ample"] = delta.e_dot_delta_trivial
                if not delta.e_dot_delta_trivial:
                    mov = mov_bound_ray(P, T, args.e, delta.ray)
                    entry["r"] = encode_ray(mov.ray)
                    entry["branch"] = mov.branch.value
                    entry["alpha_bound"] = None if mov.alpha_bound is None else encode_algebraic(mov.alpha_bound)
            except InconsistentInputError as e:
                entry["excluded"] = str(e)
        components.append(entry)
    return {"components": components}


def _surfaces(args, settings, constants, stdin) -> dict:
    caps = settings.DEFAULT_CAPS
    if args.e3_lower is not None:
        pairs = enumerate_pairs_by_cube(args.e3_lower, caps.c2e_cap, caps.enumeration_nodes)
    else:
        pairs = enumerate_pairs(settings.C2E_UPPER, caps.enumeration_nodes)
    rows = []
    for pair in pairs:
        rows.append({
            "e_cubed": pair.e_cubed,
            "c2_e": pair.c2_e,
            "provenance": pair.provenance,
            "replayed": list(pair.replay()) == [pair.e_cubed, pair.c2_e],
        })
    payload = {"pairs": rows}
    if args.classes:
        state = _read_forms(args, stdin)
        classes = []
        for pair in pairs:
            for candidate in solve_classes(state.trilinear, state.c2, pair):
                classes.append({
                    "e": list(candidate.divisor.coords),
                    "e_cubed": pair.e_cubed,
                    "c2_e": pair.c2_e,
                    "degenerate": candidate.degenerate,
                    "direction": None if candidate.direction is None else list(candidate.direction.coords),
                })
        payload["classes"] = classes
    return payload


def _flop(args, settings, constants, stdin) -> dict:
    state = _read_forms(args, stdin)
    return encode_forms(apply_flop(state, FlopData.parse(args.eta, args.nd)))


def _rr(args, settings, constants, stdin) -> dict:
    state = _read_forms(args, stdin)
    D = args.divisor
    result = min_effectivity_m(state.trilinear, state.c2, D, settings.DEFAULT_CAPS.m_cap)
    return {
        "class": list(D.coords),
        "cube": encode_rational(cube(state.trilinear, D)),
        "c2": c2_eval(state.c2, D),
        "m": result.m,
        "chi": None if result.chi_at_m is None else encode_rational(result.chi_at_m),
    }


def _roundup(args, settings, constants, stdin) -> dict:
    state = _read_forms(args, stdin)
    if settings.mu0 is None:
        raise UsageError("roundup needs --mu0")
    try:
        poly = [int(v) for v in args.lambda_poly.split(",")]
        lo, hi = (parse_rational(v) for v in args.lambda_interval.split(","))
    except ValueError as e:
        raise UsageError(f"cannot parse lambda: {e}")
    lam = RealAlgebraic.from_isolating_interval(poly, lo, hi)
    result = roundup_effectivity(
        args.d0, args.e, lam, settings.mu0, state.trilinear, state.c2, settings.DEFAULT_CAPS.relevant_m_cap
    )
    return {
        "lambda": encode_algebraic(lam),
        "m": result.m,
        "ceil": result.ceil_coeff,
        "chi": None if result.chi_at_m is None else encode_rational(result.chi_at_m),
    }


def _threshold(args, settings, constants, stdin) -> dict:
    state = _read_forms(args, stdin)
    T, c = state.trilinear, state.c2
    m = args.m
    if m is None:
        m = min_effectivity_m(T, c, args.divisor, settings.DEFAULT_CAPS.m_cap).m
        if m is None:
            return {"m": None, "n": None}
    branch = FibrationBranch.k3_abelian if args.branch == "k3" else FibrationBranch.elliptic
    n = fibration_threshold(
        T, c, args.divisor, args.hint, args.e, m, settings.R_CONSTANT, branch, settings.DEFAULT_CAPS.n_cap
    )
    return {"branch": branch.value, "m": m, "n": n}


def _params(args, settings: Settings) -> AnalysisParams:
    return AnalysisParams.from_settings(
        settings,
        movable_hint=getattr(args, "movable_hint", None),
        slope_denominator=getattr(args, "slope_denominator", 1),
    )


def _analyze(args, settings, constants, stdin, stdout) -> None:
    state = _read_forms(args, stdin)
    analyzer = BoundednessAnalyzer(_params(args, settings), constants)
    report, scene = analyzer.analyze_with_scene(state)
    _emit(ReportWriter(args.format).write_report(report), args, stdout)
    if args.svg is not None:
        args.svg.write_text(SvgRenderer(constants, settings.svg_precision).render(scene), encoding="utf-8")


def _batch(args, settings, constants, stdin, stdout) -> None:
    records = read_records(stdin) if args.input is None else ingest_jsonl(args.input)
    analyzer = BoundednessAnalyzer(_params(args, settings), constants)
    outputs = analyzer.analyze_records(records, settings.JOBS)
    if args.output is None:
        writer = jsonlines.Writer(stdout, compact=True, sort_keys=False)
        writer.write_all(outputs)
    else:
        with jsonlines.open(args.output, mode="w", compact=True) as writer:
            writer.write_all(outputs)


def _render(args, settings, constants, stdin, stdout) -> None:
    data = _load_json(args, stdin)
    if isinstance(data, dict) and "schema" in data:
        scene = report_scene(data)
    else:
        scene = forms_scene(parse_forms_instance(data).trilinear)
    svg = SvgRenderer(constants, settings.svg_precision).render(scene)
    _emit(svg, args, stdout)


_PAYLOAD_COMMANDS: dict[str, Callable] = {
    "classify": _classify,
    "cone": _cone,
    "surfaces": _surfaces,
    "flop": _flop,
    "rr": _rr,
    "roundup": _roundup,
    "threshold": _threshold,
}

_STREAM_COMMANDS: dict[str, Callable] = {
    "analyze": _analyze,
    "batch": _batch,
    "render": _render,
}


def _diagnostic(stderr: IO[str], error: str, message: str) -> None:
    stderr.write(json.dumps({"error": error, "message": message}) + "\n")


def run(argv: list[str], stdin: IO[str] | None = None, stdout: IO[str] | None = None,
        stderr: IO[str] | None = None) -> int:
    stdin = stdin or sys.stdin
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 0 if e.code == 0 else 2
    try:
        settings = _settings(args)
        constants = Constants()
        if args.command in _PAYLOAD_COMMANDS:
            payload = _PAYLOAD_COMMANDS[args.command](args, settings, constants, stdin)
            _emit(ReportWriter(args.format).write_payload(payload), args, stdout)
        else:
            _STREAM_COMMANDS[args.command](args, settings, constants, stdin, stdout)
    except UsageError as e:
        parser.print_usage(stderr)
        _diagnostic(stderr, "UsageError", str(e))
        return 2
    except DomainError as e:
        _diagnostic(stderr, type(e).__name__, str(e))
        return 1
    except (json.JSONDecodeError, tomllib.TOMLDecodeError, UnicodeDecodeError, ValidationError, OSError) as e:
        _diagnostic(stderr, type(e).__name__, str(e))
        return 1
    return 0


def main():
    logging.basicConfig(level=logging.INFO)
    sys.exit(run(sys.argv[1:]))
