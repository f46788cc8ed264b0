from cy3_bounds.entities import Scenario, ScenarioTag
from cy3_bounds.services.pipeline.templates import (
    ASSUMPTIONS,
    NO_RIGID_TEMPLATE,
    ONE_RIGID_TEMPLATE,
    SEMI_AMPLE_NOTE,
    TWO_RIGID_BOTH_TEMPLATE,
    TWO_RIGID_MIXED_TEMPLATE,
    ScenarioRegex,
)


class ScenarioWriter:
    """
    Fills the four scenario narratives of one component from its summarized analysis.
    Every field of `component_data` is already rendered as text except the recipe lists.
    """

    def __init__(self, r: int, very_ample_multiples: tuple[int, int]):
        self.regex = ScenarioRegex()
        self.r = r
        self.very_ample_multiples = very_ample_multiples

    def _assumptions(self) -> list[str]:
        return [self.regex.r_regex.sub(str(self.r), text) for text in ASSUMPTIONS]

    def _no_rigid(self, component_data: dict) -> Scenario:
        text = NO_RIGID_TEMPLATE
        text = self.regex.component_regex.sub(str(component_data["index"]), text)
        text = self.regex.sample_regex.sub(component_data["sample"], text)
        text = self.regex.cube_regex.sub(component_data["cube"], text)
        text = self.regex.c2_regex.sub(component_data["c2"], text)
        text = self.regex.m_regex.sub(component_data["m"], text)
        multiples = " and ".join(str(k) for k in self.very_ample_multiples)
        text = self.regex.very_ample_regex.sub(multiples, text)
        return Scenario(
            tag=ScenarioTag.no_rigid,
            narrative=text.strip(),
            assumptions=self._assumptions(),
            recipes=component_data["no_rigid_recipes"],
        )

    def _one_rigid(self, component_data: dict) -> Scenario:
        candidates = component_data["candidates"]
        text = ONE_RIGID_TEMPLATE
        text = self.regex.count_regex.sub(str(len(candidates)), text)
        text = self.regex.candidates_regex.sub(", ".join(candidates) if candidates else "none", text)
        semi_ample = ""
        if component_data["semi_ample"]:
            semi_ample = self.regex.classes_regex.sub(", ".join(component_data["semi_ample"]), SEMI_AMPLE_NOTE)
        text = self.regex.semi_ample_regex.sub(semi_ample, text)
        return Scenario(
            tag=ScenarioTag.one_rigid,
            narrative=text.strip(),
            assumptions=self._assumptions(),
            recipes=component_data["one_rigid_recipes"],
        )

    def _two_rigid_both(self, component_data: dict) -> Scenario:
        text = TWO_RIGID_BOTH_TEMPLATE
        text = self.regex.c2_line_regex.sub(component_data["c2_line"], text)
        text = self.regex.dual_ray_regex.sub(component_data["dual_ray"], text)
        text = self.regex.slope_bound_regex.sub(component_data["slope_bound"], text)
        return Scenario(
            tag=ScenarioTag.two_rigid_both_c2_non_neg,
            narrative=text.strip(),
            assumptions=self._assumptions(),
            recipes=component_data["two_rigid_recipes"],
            parametric=True,
        )

    def _two_rigid_mixed(self, component_data: dict) -> Scenario:
        text = TWO_RIGID_MIXED_TEMPLATE
        text = self.regex.low_count_regex.sub(str(component_data["low_count"]), text)
        text = self.regex.high_count_regex.sub(str(component_data["high_count"]), text)
        text = self.regex.roundup_regex.sub(component_data["roundup"], text)
        return Scenario(
            tag=ScenarioTag.two_rigid_mixed,
            narrative=text.strip(),
            assumptions=self._assumptions(),
            recipes=component_data["mixed_recipes"],
        )

    def write(self, component_data: dict) -> list[Scenario]:
        return [
            self._no_rigid(component_data),
            self._one_rigid(component_data),
            self._two_rigid_both(component_data),
            self._two_rigid_mixed(component_data),
        ]
