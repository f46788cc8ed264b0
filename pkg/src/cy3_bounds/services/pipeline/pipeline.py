"""
The Picard number two boundedness procedure. Every positive index component is
analyzed on its own: rigid class candidates with c2.E <= 0, their Delta and R
rays, effectivity thresholds, fixed part bounds and the four scenario narratives.
"""
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import partial
from typing import Iterable, Iterator

import sympy
import tqdm

from cy3_bounds.algebra.forms import (
    DivisorClass,
    LinearFormC2,
    QuadraticForm2,
    TrilinearForm,
    c2_eval,
    cube,
    cubic_coefficients,
    hessian_form,
    quad_form_vector,
    require_rank_two,
    triple,
    validate_rr_integrality,
)
from cy3_bounds.algebra.real_algebraic import (
    PreconditionError,
    RealAlgebraic,
    evaluate,
    to_sympy_rational,
)
from cy3_bounds.entities import (
    AnalysisReport,
    C2LineKind,
    CandidateReport,
    ComponentReport,
    CubicCaseTag,
    DomainError,
    ErrorRecord,
    FibrationBranch,
    FormsMode,
    ValidationResult,
    Verdict,
)
from cy3_bounds.geometry.cone2 import (
    Cone2,
    CubicCase,
    DegenerateCubicError,
    DeltaRay,
    InconsistentInputError,
    MovBound,
    NegativeDefiniteQuadricError,
    adjacent_edges,
    circle_subdivision,
    classify_cubic,
    delta_ray,
    mov_bound_ray,
    positive_index_components,
    quadratic_root_rays,
    subdivide_by_quadrics,
)
from cy3_bounds.geometry.rays import Ray2, cross_sign
from cy3_bounds.geometry.svg_renderer import Scene, SceneRay, forms_scene
from cy3_bounds.serialization.json_codec import encode_algebraic, encode_cone, encode_ray, encode_rational
from cy3_bounds.serialization.jsonl_reader import FormsRecord
from cy3_bounds.services.bounds.bounds import (
    EFFECTIVE_THRESHOLD,
    EffectivityResult,
    UnboundedEnumerationError,
    effectivity_value,
    fibration_threshold,
    fixed_part_bounds,
    min_effectivity_m,
    roundup_effectivity,
)
from cy3_bounds.services.flops.flops import FormsState
from cy3_bounds.services.pipeline.scenario_writer import ScenarioWriter
from cy3_bounds.services.pipeline.templates import (
    C2_ZERO_NOTE,
    DEGENERATE_FAMILY_NOTE,
    EMPTY_CONE_NOTE,
    OPEN_QUESTIONS,
    OUT_OF_SCOPE,
    RIGID_COUNT_NOTES,
    TRIPLE_ROOT_NOTE,
    ScenarioRegex,
)
from cy3_bounds.services.surfaces.surfaces import (
    EnumerationCapExceeded,
    SurfaceClassCandidate,
    case_b_slope_bound,
    enumerate_pairs,
    solve_classes,
)
from cy3_bounds.settings import Constants, EnumerationCaps, Settings

logger = logging.getLogger(__name__)

_DISPLAY_PRECISION = Fraction(1, 10 ** 6)


class ValidationFailedError(DomainError):
    pass


class C2IdenticallyZeroError(DomainError):
    pass


@dataclass
class AnalysisParams:
    mu0: Fraction | None = None
    r: int = 1
    caps: EnumerationCaps = field(default_factory=EnumerationCaps)
    c2e_upper: int = 0
    movable_hint: DivisorClass | None = None
    slope_denominator: int = 1

    def __post_init__(self):
        if self.mu0 is not None:
            self.mu0 = Fraction(self.mu0)
            if not (0 < self.mu0 < 1):
                raise PreconditionError(f"mu0 must lie in (0, 1), got {self.mu0}")
        if self.r <= 0:
            raise PreconditionError(f"r must be positive, got {self.r}")
        if self.slope_denominator <= 0:
            raise PreconditionError("the slope denominator bound must be positive")
        if self.movable_hint is not None and self.movable_hint.is_zero:
            raise PreconditionError("the movable hint must be a non-zero class")

    @classmethod
    def from_settings(cls, settings: Settings, **overrides) -> "AnalysisParams":
        return cls(
            mu0=settings.mu0,
            r=settings.R_CONSTANT,
            caps=settings.DEFAULT_CAPS,
            c2e_upper=settings.C2E_UPPER,
            **overrides,
        )

    def as_metadata(self) -> dict:
        return {
            "mu0": None if self.mu0 is None else encode_rational(self.mu0),
            "r": self.r,
            "c2e_upper": self.c2e_upper,
            "caps": self.caps.model_dump(),
            "movable_hint": None if self.movable_hint is None else list(self.movable_hint.coords),
            "slope_denominator": self.slope_denominator,
        }


@dataclass(frozen=True)
class C2LineRelation:
    kind: C2LineKind
    ray: Ray2
    sector: int | None = None

    def to_dict(self) -> dict:
        return {"kind": self.kind.value, "ray": encode_ray(self.ray), "sector": self.sector}

    def describe(self) -> str:
        text = f"{self.kind.value} along {format_ray(self.ray)}"
        if self.sector is not None:
            text += f" in sector {self.sector}"
        return text


@dataclass
class _CandidateAnalysis:
    candidate: SurfaceClassCandidate
    side: str
    delta: DeltaRay
    mov_bound: MovBound | None
    subcones: list[tuple[Cone2, DivisorClass | None, EffectivityResult | None]]
    report: CandidateReport


def format_ray(ray: Ray2) -> str:
    if ray.is_integral:
        return f"({ray.vector[0]}, {ray.vector[1]})"
    x, y = ray.direction(_DISPLAY_PRECISION)
    return f"({float(x):.6f}, {float(y):.6f})"


def _sector_index(boundary: list[Ray2], ray: Ray2) -> int | None:
    for i, lo in enumerate(boundary):
        hi = boundary[(i + 1) % len(boundary)]
        if cross_sign(lo, ray) > 0 and cross_sign(ray, hi) > 0:
            return i
    return None


def c2_line_relation(T: TrilinearForm, c: LinearFormC2, P: Cone2 | None = None) -> C2LineRelation:
    """
    Position of the line c2 = 0 against the root lines of the cubic and of the
    Hessian, and against P when one is given.
    """
    require_rank_two(T)
    if c.is_zero:
        raise C2IdenticallyZeroError(C2_ZERO_NOTE)
    c1, c2 = c.coeffs
    line = Ray2.integral(c2, -c1)
    case = classify_cubic(T)
    if P is not None and (P.on_boundary(line) or P.on_boundary(line.negated())):
        return C2LineRelation(C2LineKind.edge_of_p, line)
    if line in case.vanishing_rays:
        if case.tag == CubicCaseTag.three_distinct_real:
            return C2LineRelation(C2LineKind.third_cubic_line, line)
        return C2LineRelation(C2LineKind.cubic_root, line)
    if hessian_form(T)(*line.vector) == 0:
        return C2LineRelation(C2LineKind.hessian_root, line)
    sector = _sector_index(circle_subdivision(T), line)
    if P is not None and not (P.contains(line) or P.contains(line.negated())):
        return C2LineRelation(C2LineKind.misses_p, line, sector)
    return C2LineRelation(C2LineKind.interior_of_sector, line, sector)


def _symbolic(Q: QuadraticForm2, x, y):
    a, b, cc = (to_sympy_rational(v) for v in (Q.a, Q.b, Q.c))
    return a * x * x + 2 * b * x * y + cc * y * y


def c2_dual_ray(T: TrilinearForm, c: LinearFormC2, P: Cone2) -> Ray2 | None:
    """
    The ray D of the closed cone P with T(D, D, .) a positive multiple of c2.
    """
    require_rank_two(T)
    if c.is_zero:
        raise C2IdenticallyZeroError(C2_ZERO_NOTE)
    c1, c2 = (Fraction(v) for v in c.coeffs)
    first, second = quad_form_vector(T, (1, 0)), quad_form_vector(T, (0, 1))
    # T(D, D, .) is proportional to c2 exactly where c2 Q_1 - c1 Q_2 vanishes
    G = first.scaled(c2) + second.scaled(-c1)
    if G.is_zero:
        return None
    rays, _ = quadratic_root_rays(*(to_sympy_rational(v) for v in (G.a, G.b, G.c)), {})
    for ray in rays:
        if not P.contains_closed(ray):
            continue
        (x, y), bindings = ray.coordinates(sympy.Dummy("t"))
        pairing = to_sympy_rational(c1) * _symbolic(first, x, y) + to_sympy_rational(c2) * _symbolic(second, x, y)
        if evaluate(pairing, bindings).sign() > 0:
            return ray
    return None


def roundup_decomposition(D0: DivisorClass, E1: DivisorClass, ray: Ray2) -> RealAlgebraic:
    """
    The lambda with D0 + lambda E1 on the line of `ray`.
    """
    (rx, ry), bindings = ray.coordinates(sympy.Dummy("t"))
    x0, y0 = D0.coords
    ex, ey = E1.coords
    denominator = rx * ey - ry * ex
    if evaluate(denominator, bindings).sign() == 0:
        raise InconsistentInputError(f"E1 = ({E1}) is parallel to {format_ray(ray)}")
    return evaluate((x0 * ry - y0 * rx) / denominator, bindings)


def canonical_integral_point(cone: Cone2, radius: int) -> DivisorClass | None:
    """
    Integral class in the open cone with the smallest |x| + |y|, ties broken
    lexicographically.
    """
    for total in range(1, radius + 1):
        points = sorted({(x, s * (total - abs(x))) for x in range(-total, total + 1) for s in (1, -1)})
        for point in points:
            if cone.contains(DivisorClass(point)):
                return DivisorClass(point)
    return None


def _movable_cone(E: DivisorClass, bound: Ray2) -> Cone2 | None:
    e_ray = Ray2.of_class(E)
    orientation = cross_sign(e_ray, bound)
    if orientation > 0:
        return Cone2(e_ray, bound)
    if orientation < 0:
        return Cone2(bound, e_ray)
    return None


def _cubic_case_dict(case: CubicCase) -> dict:
    return {
        "case": case.tag.value,
        "discriminant": encode_rational(case.discriminant),
        "vanishing_rays": [encode_ray(ray) for ray in case.vanishing_rays],
    }


def _effectivity_dict(T: TrilinearForm, c: LinearFormC2, D: DivisorClass, result: EffectivityResult) -> dict:
    if result.m is None:
        return {"m": None}
    check = effectivity_value(cube(T, D), c2_eval(c, D), result.m)
    return {
        "m": result.m,
        "chi": encode_rational(result.chi_at_m),
        "check": encode_rational(check),
        "verified": check >= EFFECTIVE_THRESHOLD,
    }


def _mov_bound_dict(mov: MovBound | None) -> dict | None:
    if mov is None:
        return None
    return {
        "ray": encode_ray(mov.ray),
        "alpha_bound": None if mov.alpha_bound is None else encode_algebraic(mov.alpha_bound),
        "branch": mov.branch.value,
    }


class BoundednessAnalyzer:
    def __init__(self, params: AnalysisParams, constants: Constants):
        self.params = params
        self.constants = constants
        self.caps = params.caps
        self.scenario_writer = ScenarioWriter(params.r, constants.VERY_AMPLE_MULTIPLES)
        self.regex = ScenarioRegex()
        self.failed_records = []

    def _validate(self, T: TrilinearForm, c: LinearFormC2) -> ValidationResult:
        if T.mode == FormsMode.normal_form:
            logger.warning("Normal form input: Riemann-Roch integrality is waived")
            return ValidationResult(accepted=True, waived=True)
        validation = validate_rr_integrality(T, c)
        if not validation.accepted:
            raise ValidationFailedError(
                f"2 D^3 + c2.D = {validation.residue} (mod 12) at D = ({','.join(map(str, validation.witness))})"
            )
        logger.info("Riemann-Roch integrality holds")
        return validation

    def _metadata(self, families: list[SurfaceClassCandidate]) -> dict:
        return {
            "parameters": self.params.as_metadata(),
            "very_ample_multiples": list(self.constants.VERY_AMPLE_MULTIPLES),
            "rigid_count_notes": list(RIGID_COUNT_NOTES),
            "terminal_notes": [self._family_note(family) for family in families],
            "out_of_scope": list(OUT_OF_SCOPE),
            "open_questions": list(OPEN_QUESTIONS),
        }

    def _family_note(self, family: SurfaceClassCandidate) -> str:
        text = self.regex.cube_regex.sub(str(family.pair.e_cubed), DEGENERATE_FAMILY_NOTE)
        text = self.regex.c2_regex.sub(str(family.pair.c2_e), text)
        return self.regex.sample_regex.sub(f"({family.divisor})", text)

    def _terminal(
            self, validation: ValidationResult, verdict: Verdict, note: str,
            cubic_case: dict | None = None) -> AnalysisReport:
        logger.info(f"Terminal verdict: {verdict.value}")
        return AnalysisReport(
            schema_tag=self.constants.REPORT_SCHEMA,
            validation=validation,
            cubic_case=cubic_case,
            verdict=verdict,
            verdict_note=note,
            metadata=self._metadata([]),
        )

    def _rigid_candidates(
            self, T: TrilinearForm, c: LinearFormC2
    ) -> tuple[list[SurfaceClassCandidate], list[SurfaceClassCandidate]]:
        pairs = enumerate_pairs(self.params.c2e_upper, self.caps.enumeration_nodes)
        classes, families = [], []
        for pair in pairs:
            for candidate in solve_classes(T, c, pair):
                if candidate.degenerate:
                    families.append(candidate)
                    # a family through the origin is one line; its two primitive rays stand for it
                    if candidate.divisor.is_zero:
                        classes += [
                            SurfaceClassCandidate(candidate.direction, candidate.pair),
                            SurfaceClassCandidate(-candidate.direction, candidate.pair),
                        ]
                else:
                    classes.append(candidate)
        logger.info(
            f"Found {len(classes)} rigid class candidates and {len(families)} degenerate families "
            f"from {len(pairs)} surface pairs"
        )
        return classes, families

    def _fibration(
            self, T: TrilinearForm, c: LinearFormC2, E: DivisorClass,
            subcones: list[tuple[Cone2, DivisorClass | None, EffectivityResult | None]]) -> dict:
        L = self.params.movable_hint
        square_vanishes = all(triple(T, L, L, DivisorClass(e)) == 0 for e in ((1, 0), (0, 1)))
        branch = FibrationBranch.k3_abelian if square_vanishes else FibrationBranch.elliptic
        data = {"l": list(L.coords), "branch": branch.value, "n": None}
        effective = [(D, eff) for _, D, eff in subcones if eff is not None and eff.m is not None]
        if not effective:
            data["note"] = "no canonical class of the subcones reaches chi >= 2"
            return data
        D, eff = effective[0]
        data.update({"d": list(D.coords), "m": eff.m})
        try:
            data["n"] = fibration_threshold(T, c, D, L, E, eff.m, self.params.r, branch, self.caps.n_cap)
        except PreconditionError as e:
            data["note"] = str(e)
        return data

    def _subcone_rows(
            self, P: Cone2, T: TrilinearForm, c: LinearFormC2, E: DivisorClass, bound_cone: Cone2 | None,
    ) -> tuple[list[dict], list[tuple[Cone2, DivisorClass | None, EffectivityResult | None]]]:
        rows, subcones = [], []
        for sub in subdivide_by_quadrics(P, T, [E]):
            row = {"cone": encode_cone(sub), "canonical_d": None, "effectivity": None, "movable_candidates": []}
            D = canonical_integral_point(sub, self.caps.class_search)
            eff = None
            if D is None:
                row["note"] = f"no integral class with |x| + |y| <= {self.caps.class_search}"
            else:
                eff = min_effectivity_m(T, c, D, self.caps.m_cap)
                row["canonical_d"] = list(D.coords)
                row["effectivity"] = _effectivity_dict(T, c, D, eff)
                if eff.m is not None:
                    try:
                        movable = fixed_part_bounds(eff.m * D, [E], T, c, bound_cone, self.caps.coefficient_box)
                        row["movable_candidates"] = [
                            {"l": list(L.divisor.coords), "a": list(L.coefficients), "c2_l": L.c2_value}
                            for L in movable
                        ]
                    except (UnboundedEnumerationError, EnumerationCapExceeded) as e:
                        row["note"] = str(e)
            rows.append(row)
            subcones.append((sub, D, eff))
        return rows, subcones

    def _candidate(
            self, P: Cone2, T: TrilinearForm, c: LinearFormC2, candidate: SurfaceClassCandidate,
    ) -> _CandidateAnalysis:
        E = candidate.divisor
        near, _ = adjacent_edges(P, E)
        side = "low" if near == P.ray_lo else "high"
        delta = delta_ray(P, T, E)
        mov = None if delta.e_dot_delta_trivial else mov_bound_ray(P, T, E, delta.ray)
        bound_cone = _movable_cone(E, mov.ray if mov else delta.ray)
        rows, subcones = self._subcone_rows(P, T, c, E, bound_cone)
        notes = []
        if delta.e_dot_delta_trivial:
            notes.append("E.Delta.L vanishes identically; Delta is semi-ample and contracts E")
        if bound_cone is None:
            notes.append("E and R are collinear; fixed parts were bounded by c2 alone")
        fibration = None
        if self.params.movable_hint is not None:
            fibration = self._fibration(T, c, E, subcones)
        report = CandidateReport(
            e=list(E.coords),
            e_cubed=candidate.pair.e_cubed,
            c2_e=candidate.pair.c2_e,
            side=side,
            provenance=candidate.pair.provenance,
            delta=encode_ray(delta.ray),
            delta_semi_ample=delta.e_dot_delta_trivial,
            mov_bound=_mov_bound_dict(mov),
            subcones=rows,
            fibration=fibration,
            notes=notes,
        )
        return _CandidateAnalysis(candidate, side, delta, mov, subcones, report)

    def _slope_bound(self, T: TrilinearForm, c: LinearFormC2, case: CubicCase, relation: C2LineRelation) -> dict | None:
        if case.tag != CubicCaseTag.double_root:
            return None
        a, k1, cc, d = cubic_coefficients(T)
        k2 = Fraction(c.coeffs[0])
        normal = a == 0 and cc == 0 and d == 0 and c.coeffs[1] == 0 and k1 > 0 and k2 > 0
        if not normal or relation.kind != C2LineKind.edge_of_p:
            return {"parametric": True, "note": "forms are not in the scaling k1 x^2 y, c2 = k2 x"}
        try:
            bound = case_b_slope_bound(k1, k2, self.params.slope_denominator, self.caps.enumeration_nodes)
        except EnumerationCapExceeded as e:
            return {"parametric": True, "note": str(e)}
        return {
            "parametric": False,
            "k1": encode_rational(k1),
            "k2": encode_rational(k2),
            "denominator_bound": self.params.slope_denominator,
            "c_prime": encode_rational(bound),
        }

    def _roundup_recipe(
            self, T: TrilinearForm, c: LinearFormC2, base: DivisorClass | None,
            analysis: _CandidateAnalysis, name: str, ray: Ray2) -> dict:
        E = analysis.candidate.divisor
        recipe = {"e": list(E.coords), "ray": name, "target": encode_ray(ray)}
        if ray.is_integral:
            D = DivisorClass(ray.vector)
            recipe["lambda"] = None
            recipe["d"] = list(D.coords)
            recipe["effectivity"] = _effectivity_dict(T, c, D, min_effectivity_m(T, c, D, self.caps.m_cap))
            return recipe
        bases = [D for _, D, _ in analysis.subcones if D is not None]
        if base is not None:
            bases.append(base)
        for D0 in bases:
            lam = roundup_decomposition(D0, E, ray)
            if lam.sign() > 0:
                break
        else:
            recipe["note"] = "no canonical class gives a positive lambda"
            return recipe
        recipe["d0"] = list(D0.coords)
        recipe["lambda"] = encode_algebraic(lam)
        if self.params.mu0 is None:
            recipe["note"] = "supply mu0 to certify the round-up threshold"
            return recipe
        try:
            eff = roundup_effectivity(D0, E, lam, self.params.mu0, T, c, self.caps.relevant_m_cap)
        except DomainError as e:
            recipe["note"] = str(e)
            return recipe
        recipe["effectivity"] = {"m": eff.m, "ceil": eff.ceil_coeff, "chi": encode_rational(eff.chi_at_m)}
        return recipe

    def _component_data(
            self, index: int, T: TrilinearForm, c: LinearFormC2, P: Cone2, D: DivisorClass | None,
            eff: EffectivityResult | None, analyses: list[_CandidateAnalysis], relation: C2LineRelation,
            dual: Ray2 | None, slope_bound: dict | None) -> dict:
        no_rigid_recipes = []
        if D is not None:
            no_rigid_recipes.append({"d": list(D.coords), "effectivity": _effectivity_dict(T, c, D, eff)})
        one_rigid_recipes = []
        for analysis in analyses:
            effective = [(S, eff_s) for _, S, eff_s in analysis.subcones if eff_s is not None and eff_s.m is not None]
            recipe = {"e": analysis.report.e, "delta": analysis.report.delta, "r": None, "d": None, "m": None}
            if analysis.mov_bound is not None:
                recipe["r"] = encode_ray(analysis.mov_bound.ray)
            if effective:
                recipe["d"] = list(effective[0][0].coords)
                recipe["m"] = effective[0][1].m
            if analysis.report.fibration is not None:
                recipe["fibration"] = analysis.report.fibration
            one_rigid_recipes.append(recipe)
        two_rigid_recipes = [{"c2_line": relation.to_dict(), "c2_dual_ray": None if dual is None else encode_ray(dual)}]
        if slope_bound is not None:
            two_rigid_recipes.append({"slope_bound": slope_bound})
        mixed_recipes = []
        for analysis in analyses:
            if analysis.candidate.pair.c2_e >= 0:
                continue
            targets = [("delta", analysis.delta.ray)]
            if dual is not None and dual != analysis.delta.ray:
                targets.append(("c2_dual", dual))
            for name, ray in targets:
                mixed_recipes.append(self._roundup_recipe(T, c, D, analysis, name, ray))

        if slope_bound is None:
            slope_text = ""
        elif slope_bound["parametric"]:
            slope_text = "The slope bound is parametric for this scaling."
        else:
            slope_text = f"Every candidate E = (a, -b) has b <= {slope_bound['c_prime']} a."
        certified = [r for r in mixed_recipes if r.get("effectivity")]
        roundup_text = f"{len(certified)} of {len(mixed_recipes)} round-up recipes carry a certified threshold."
        return {
            "index": index,
            "sample": "none" if D is None else f"({D})",
            "cube": "-" if D is None else str(cube(T, D)),
            "c2": "-" if D is None else str(c2_eval(c, D)),
            "m": str(eff.m) if eff is not None and eff.m is not None else f"none up to {self.caps.m_cap}",
            "candidates": [
                f"({a.candidate.divisor}) with E^3 = {a.candidate.pair.e_cubed}, c2.E = {a.candidate.pair.c2_e}"
                for a in analyses
            ],
            "semi_ample": [f"({a.candidate.divisor})" for a in analyses if a.delta.e_dot_delta_trivial],
            "c2_line": relation.describe(),
            "dual_ray": "absent from P" if dual is None else format_ray(dual),
            "slope_bound": slope_text,
            "low_count": sum(1 for a in analyses if a.side == "low" and a.candidate.pair.c2_e < 0),
            "high_count": sum(1 for a in analyses if a.side == "high" and a.candidate.pair.c2_e < 0),
            "roundup": roundup_text,
            "no_rigid_recipes": no_rigid_recipes,
            "one_rigid_recipes": one_rigid_recipes,
            "two_rigid_recipes": two_rigid_recipes,
            "mixed_recipes": mixed_recipes,
        }

    def _component(
            self, index: int, P: Cone2, T: TrilinearForm, c: LinearFormC2, case: CubicCase,
            classes: list[SurfaceClassCandidate], families: list[SurfaceClassCandidate],
            scene: Scene) -> ComponentReport:
        relation = c2_line_relation(T, c, P)
        dual = c2_dual_ray(T, c, P)
        D = canonical_integral_point(P, self.caps.class_search)
        eff = None if D is None else min_effectivity_m(T, c, D, self.caps.m_cap)
        analyses, excluded = [], []
        for candidate in classes:
            E = candidate.divisor
            if P.contains_closed(E) or P.negated().contains_closed(E):
                excluded.append({"e": list(E.coords), "reason": "lies in the closure of P or -P"})
                continue
            try:
                analyses.append(self._candidate(P, T, c, candidate))
            except (InconsistentInputError, NegativeDefiniteQuadricError) as e:
                excluded.append({"e": list(E.coords), "reason": str(e)})
        logger.info(f"Component {index}: {len(analyses)} candidates kept, {len(excluded)} excluded")

        scene.rays += [SceneRay(P.ray_lo, "p_edge"), SceneRay(P.ray_hi, "p_edge")]
        if analyses:
            first = analyses[0]
            scene.rays.append(SceneRay(Ray2.of_class(first.candidate.divisor), "e", f"E{index}"))
            scene.rays.append(SceneRay(first.delta.ray, "delta", f"D{index}"))
            if first.mov_bound is not None:
                scene.rays.append(SceneRay(first.mov_bound.ray, "r", f"R{index}"))

        slope_bound = self._slope_bound(T, c, case, relation)
        data = self._component_data(index, T, c, P, D, eff, analyses, relation, dual, slope_bound)
        return ComponentReport(
            index=index,
            cone=encode_cone(P),
            sample_class=list(P.sample_ray().vector),
            canonical_d=None if D is None else list(D.coords),
            effectivity=None if D is None else _effectivity_dict(T, c, D, eff),
            c2_line=relation.to_dict(),
            c2_dual_ray=None if dual is None else encode_ray(dual),
            candidates=[a.report for a in analyses],
            excluded=excluded,
            degenerate_families=[
                {
                    "base": list(f.divisor.coords),
                    "direction": list(f.direction.coords),
                    "e_cubed": f.pair.e_cubed,
                    "c2_e": f.pair.c2_e,
                    "provenance": f.pair.provenance,
                }
                for f in families
            ],
            slope_bound=slope_bound,
            scenarios=self.scenario_writer.write(data),
        )

    def analyze_with_scene(self, state: FormsState) -> tuple[AnalysisReport, Scene]:
        # 1. Validate Riemann-Roch integrality (waived for normal forms)
        # 2. Classify the cubic; a triple root is terminal
        # 3. c2 = 0 and an empty positive index cone are terminal
        # 4. Rigid class candidates with c2.E <= c2e_upper
        # 5. Per component: exclusions, Delta and R, thresholds, fixed parts, scenarios
        T, c = state.trilinear, state.c2
        require_rank_two(T)
        validation = self._validate(T, c)
        if all(v == 0 for v in cubic_coefficients(T)):
            raise DegenerateCubicError("the cubic form is identically zero")
        if hessian_form(T).is_zero:
            return self._terminal(validation, Verdict.triple_root, TRIPLE_ROOT_NOTE), Scene()
        case = classify_cubic(T)
        cubic_case = _cubic_case_dict(case)
        scene = forms_scene(T)
        if c.is_zero:
            return self._terminal(validation, Verdict.c2_zero, C2_ZERO_NOTE, cubic_case), scene
        components = positive_index_components(T)
        if not len(components):
            return self._terminal(validation, Verdict.empty_positive_cone, EMPTY_CONE_NOTE, cubic_case), scene

        classes, families = self._rigid_candidates(T, c)
        reports = [
            self._component(index, P, T, c, case, classes, families, scene)
            for index, P in enumerate(components)
        ]
        report = AnalysisReport(
            schema_tag=self.constants.REPORT_SCHEMA,
            validation=validation,
            cubic_case=cubic_case,
            components=reports,
            metadata=self._metadata(families),
        )
        return report, scene

    def analyze(self, state: FormsState) -> AnalysisReport:
        report, _ = self.analyze_with_scene(state)
        return report

    def analyze_records(self, records: Iterable[FormsRecord | ErrorRecord], jobs: int = 1) -> Iterator[dict]:
        worker = partial(_analyze_record, params=self.params, constants=self.constants)
        if jobs > 1:
            with ProcessPoolExecutor(max_workers=jobs) as pool:
                yield from self._track(pool.map(worker, records))
        else:
            yield from self._track(map(worker, records))

    def _track(self, outputs: Iterable[dict]) -> Iterator[dict]:
        for output in tqdm.tqdm(outputs, desc="records"):
            if "error" in output:
                self.failed_records.append(output.get("line"))
            yield output
        if self.failed_records:
            logger.error(f"Failed to process {len(self.failed_records)} records: lines {self.failed_records}")
        else:
            logger.info("All records processed")


def _analyze_record(record: FormsRecord | ErrorRecord, params: AnalysisParams, constants: Constants) -> dict:
    if isinstance(record, ErrorRecord):
        return record.model_dump()
    try:
        report = BoundednessAnalyzer(params, constants).analyze(record.state)
    except DomainError as e:
        logger.warning(f"line {record.line}: {e}")
        return ErrorRecord(line=record.line, error=type(e).__name__, message=str(e)).model_dump()
    return {"line": record.line, "id": record.record_id, "report": report.model_dump(mode="json", by_alias=True)}


def analyze(T: TrilinearForm, c: LinearFormC2, params: AnalysisParams | None = None) -> AnalysisReport:
    return BoundednessAnalyzer(params or AnalysisParams(), Constants()).analyze(FormsState(T, c))


def analyze_batch(
        records: Iterable[FormsRecord | ErrorRecord], params: AnalysisParams | None = None,
        jobs: int = 1) -> Iterator[dict]:
    analyzer = BoundednessAnalyzer(params or AnalysisParams(), Constants())
    yield from analyzer.analyze_records(records, jobs)
