import pandas as pd

from cy3_bounds.entities import AnalysisReport, OutputFormat
from cy3_bounds.geometry.rays import Ray2
from cy3_bounds.geometry.svg_renderer import Scene, SceneCone, SceneRay
from cy3_bounds.serialization.json_codec import DecodeError, decode_cone, decode_ray, dumps


def _short_ray(data: dict | None) -> str:
    if data is None:
        return "-"
    if "int" in data:
        return f"({data['int'][0]}, {data['int'][1]})"
    slope = data["alg"]["slope"]
    return f"{data['alg']['sign']:+d}*(1, root of {slope['poly']} in [{slope['interval'][0]}, {slope['interval'][1]}])"


def _first_threshold(subcones: list[dict]) -> str:
    for row in subcones:
        if row.get("effectivity") and row["effectivity"]["m"] is not None:
            return str(row["effectivity"]["m"])
    return "-"


def payload_to_text(payload: dict | list) -> str:
    """Flat key/value table of a subcommand payload."""
    rows = payload if isinstance(payload, list) else [payload]
    if not rows:
        return "(empty)"
    frame = pd.json_normalize(rows)
    if len(rows) == 1:
        return frame.T.to_string(header=False)
    return frame.to_string(index=False)


def report_to_text(report: AnalysisReport) -> str:
    lines = [f"schema: {report.schema_tag}"]
    validation = "waived" if report.validation.waived else ("accepted" if report.validation.accepted else "rejected")
    lines.append(f"validation: {validation}")
    if report.cubic_case is not None:
        lines.append(f"cubic case: {report.cubic_case['case']}")
    if report.verdict is not None:
        lines.append(f"verdict: {report.verdict.value}")
        lines.append(report.verdict_note or "")
        return "\n".join(lines)

    for component in report.components:
        cone = component.cone
        lines.append("")
        lines.append(f"component {component.index}: <{_short_ray(cone['lo'])}, {_short_ray(cone['hi'])}>")
        lines.append(f"  c2 = 0: {component.c2_line['kind']} along {_short_ray(component.c2_line['ray'])}")
        lines.append(f"  c2 dual ray: {_short_ray(component.c2_dual_ray)}")
        if component.candidates:
            frame = pd.DataFrame([
                {
                    "E": tuple(candidate.e),
                    "E^3": candidate.e_cubed,
                    "c2.E": candidate.c2_e,
                    "side": candidate.side,
                    "Delta": _short_ray(candidate.delta),
                    "semi-ample": candidate.delta_semi_ample,
                    "R": _short_ray(candidate.mov_bound["ray"]) if candidate.mov_bound else "-",
                    "m": _first_threshold(candidate.subcones),
                }
                for candidate in component.candidates
            ])
            lines.append(frame.to_string(index=False))
        else:
            lines.append("  no rigid class candidates")
        if component.excluded:
            excluded = pd.DataFrame([{"E": tuple(e["e"]), "reason": e["reason"]} for e in component.excluded])
            lines.append(excluded.to_string(index=False))
        for scenario in component.scenarios:
            marker = " (parametric)" if scenario.parametric else ""
            lines.append(f"  [{scenario.tag.value}]{marker} {scenario.narrative}")
    for note in report.metadata.get("terminal_notes", []):
        lines.append(f"note: {note}")
    return "\n".join(lines)


def report_scene(data: dict) -> Scene:
    """Scene of a JSON report: cubic roots, components with their edges, and E, Delta, R of the first candidate."""
    scene = Scene()
    try:
        if data.get("cubic_case"):
            scene.rays += [SceneRay(decode_ray(ray), "cubic_root") for ray in data["cubic_case"]["vanishing_rays"]]
        for component in data.get("components", []):
            index = component["index"]
            cone = decode_cone(component["cone"])
            scene.cones.append(SceneCone(cone, f"P{index}"))
            scene.rays += [SceneRay(cone.ray_lo, "p_edge"), SceneRay(cone.ray_hi, "p_edge")]
            if not component["candidates"]:
                continue
            first = component["candidates"][0]
            scene.rays.append(SceneRay(Ray2.integral(*first["e"]), "e", f"E{index}"))
            if first.get("delta") is not None:
                scene.rays.append(SceneRay(decode_ray(first["delta"]), "delta", f"D{index}"))
            if first.get("mov_bound") is not None:
                scene.rays.append(SceneRay(decode_ray(first["mov_bound"]["ray"]), "r", f"R{index}"))
    except (AttributeError, KeyError, TypeError) as e:
        raise DecodeError(f"malformed report: {e}") from e
    return scene


class ReportWriter:
    def __init__(self, output_format: OutputFormat):
        self.output_format = output_format

    def write_report(self, report: AnalysisReport) -> str:
        if self.output_format == OutputFormat.text:
            return report_to_text(report)
        return dumps(report.model_dump(mode="json", by_alias=True))

    def write_payload(self, payload: dict | list) -> str:
        if self.output_format == OutputFormat.text:
            return payload_to_text(payload)
        return dumps(payload)
