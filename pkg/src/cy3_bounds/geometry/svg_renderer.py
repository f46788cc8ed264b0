"""
SVG diagrams of rays and cones in the divisor plane. Algebraic slopes are drawn
from rational approximations; coordinates here are display-only floats.
"""
import math
from dataclasses import dataclass, field
from fractions import Fraction

import svgwrite

from cy3_bounds.algebra.forms import TrilinearForm, hessian_form
from cy3_bounds.geometry.cone2 import Cone2, binary_root_rays, classify_cubic, positive_index_components
from cy3_bounds.geometry.rays import Ray2
from cy3_bounds.settings import Constants

_ARC_STEPS = 32
_LEGEND = [
    ("cubic_root", "cubic roots"),
    ("hessian_root", "Hessian roots"),
    ("p_edge", "edges of P"),
    ("e", "rigid class E"),
    ("delta", "Delta"),
    ("r", "R"),
]


@dataclass(frozen=True)
class SceneRay:
    ray: Ray2
    role: str
    label: str = ""


@dataclass(frozen=True)
class SceneCone:
    cone: Cone2
    label: str = ""


@dataclass
class Scene:
    rays: list[SceneRay] = field(default_factory=list)
    cones: list[SceneCone] = field(default_factory=list)


def forms_scene(T: TrilinearForm) -> Scene:
    """Cubic roots, Hessian roots and shaded positive index components."""
    scene = Scene()
    case = classify_cubic(T)
    scene.rays += [SceneRay(ray, "cubic_root") for ray in case.vanishing_rays]
    hessian = hessian_form(T)
    scene.rays += [SceneRay(ray, "hessian_root") for ray in binary_root_rays(hessian.binary_coefficients)]
    for i, cone in enumerate(positive_index_components(T)):
        scene.cones.append(SceneCone(cone, f"P{i}"))
    return scene


def _angle(ray: Ray2, precision: Fraction) -> float:
    x, y = ray.direction(precision)
    return math.atan2(float(y), float(x))


class SvgRenderer:
    def __init__(self, constants: Constants, precision: Fraction):
        self.constants = constants
        self.precision = precision
        self.center = constants.SVG_SIZE / 2
        self.radius = constants.SVG_SIZE / 2 - constants.SVG_MARGIN

    def _point(self, angle: float, scale: float = 1.0) -> tuple[float, float]:
        return (
            round(self.center + scale * self.radius * math.cos(angle), 3),
            round(self.center - scale * self.radius * math.sin(angle), 3),
        )

    def _cone_polygon(self, cone: Cone2) -> list[tuple[float, float]]:
        start = _angle(cone.ray_lo, self.precision)
        end = _angle(cone.ray_hi, self.precision)
        if end <= start:
            end += 2 * math.pi
        points = [(self.center, self.center)]
        for step in range(_ARC_STEPS + 1):
            points.append(self._point(start + (end - start) * step / _ARC_STEPS))
        return points

    def render(self, scene: Scene) -> str:
        colors = self.constants.SVG_COLORS
        size = self.constants.SVG_SIZE
        dwg = svgwrite.Drawing(size=(size, size), profile="full", debug=False)
        clip = dwg.defs.add(dwg.clipPath(id="unit"))
        clip.add(dwg.circle(center=(self.center, self.center), r=self.radius))

        shading = dwg.add(dwg.g(id="cones", clip_path="url(#unit)"))
        for item in scene.cones:
            shading.add(dwg.polygon(self._cone_polygon(item.cone), fill=colors["component"], fill_opacity="0.5"))
            if item.label:
                middle = _angle(item.cone.sample_ray(), self.precision)
                shading.add(dwg.text(item.label, insert=self._point(middle, 0.6), font_size="12"))

        axes = dwg.add(dwg.g(id="axes", stroke=colors["axis"]))
        axes.add(dwg.circle(center=(self.center, self.center), r=self.radius, fill="none"))
        axes.add(dwg.line(self._point(math.pi), self._point(0)))
        axes.add(dwg.line(self._point(-math.pi / 2), self._point(math.pi / 2)))

        rays = dwg.add(dwg.g(id="rays", clip_path="url(#unit)", stroke_width=2))
        for item in scene.rays:
            angle = _angle(item.ray, self.precision)
            rays.add(dwg.line((self.center, self.center), self._point(angle), stroke=colors[item.role]))
            if item.label:
                rays.add(dwg.text(item.label, insert=self._point(angle, 0.9), fill=colors[item.role], font_size="12"))

        legend = dwg.add(dwg.g(id="legend", font_size="10"))
        for row, (role, text) in enumerate(_LEGEND):
            y = 12 + 12 * row
            legend.add(dwg.line((4, y - 3), (16, y - 3), stroke=colors[role], stroke_width=2))
            legend.add(dwg.text(text, insert=(20, y)))
        return dwg.tostring()


def render_svg(scene: Scene, constants: Constants | None = None, precision: Fraction = Fraction(1, 10 ** 6)) -> str:
    return SvgRenderer(constants or Constants(), precision).render(scene)
