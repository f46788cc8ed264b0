import re


NO_RIGID_TEMPLATE = """
No rigid non-movable surface: the movable and nef cones agree on component <COMPONENT>,
so every integral class of P is nef. The sample class D = <SAMPLE> has D^3 = <CUBE> and
c2.D = <C2>; chi(mD) >= 2 first holds at m = <M>. An ample class then becomes very ample
after the fixed multiples <VERY_AMPLE>.
"""

ONE_RIGID_TEMPLATE = """
A unique rigid non-movable surface E. It lies outside P and -P, and when c2.E <= 0 it is one of
<COUNT> candidate classes: <CANDIDATES>. The ample cone lies beyond the Delta ray of E, and
a fixed part of |mD| is a multiple of E with the movable part in Cone<E, R>. <SEMI_AMPLE>
"""

TWO_RIGID_BOTH_TEMPLATE = """
Two rigid non-movable surfaces, one on each side of P, with c2.E1 >= 0 and c2.E2 >= 0.
The line c2 = 0 is <C2_LINE>; the ray where D^2 is proportional to c2 is <DUAL_RAY>.
Candidates on these sides are not a finite list; the slopes are bounded through the
c2 inequalities. <SLOPE_BOUND>
"""

TWO_RIGID_MIXED_TEMPLATE = """
Two rigid non-movable surfaces on opposite sides of P with c2.E1 < 0 <= c2.E2. E1 is one of
<LOW_COUNT> candidates on the low side and <HIGH_COUNT> on the high side of P. When Delta is
irrational, mD rounds up along E1 as m D0 + ceil(m lambda) E1 for relevant m. <ROUNDUP>
"""

SEMI_AMPLE_NOTE = "Delta is integral and semi-ample for <CLASSES>; it contracts E to a Calabi-Yau image."

C2_ZERO_NOTE = (
    "c2 vanishes identically: X is an etale quotient of an abelian threefold and lies in a "
    "bounded family."
)
TRIPLE_ROOT_NOTE = "The cubic form has a triple root, which no Calabi-Yau threefold of Picard number 2 realizes."
EMPTY_CONE_NOTE = "The positive index cone is empty, so no class can be ample."

ASSUMPTIONS = [
    "h^2 vanishing for mD (nef restriction to a very ample divisor) is assumed, not checked.",
    "The component holding the ample cone is unknown; every component is analyzed.",
    "Thresholds depending on the universal constant r use r = <R>.",
]

OUT_OF_SCOPE = [
    "curve counts n_d of flops are inputs, not derived",
    "klt threshold mu0 is an input",
    "volume function argument",
    "Picard number 3 or more",
]

RIGID_COUNT_NOTES = [
    "At most two rigid non-movable surfaces exist, one on each side of P.",
    "At most two rigid surfaces have c2.E < 0, since c2 is non-negative on mobile classes.",
    "Two rigid surfaces with c2.E <= 0 on both force c2 to vanish identically.",
]

DEGENERATE_FAMILY_NOTE = (
    "E^3 is constant along the line c2.E = <C2>, so the pair (<CUBE>, <C2>) is met by a whole "
    "line of classes through <SAMPLE>; flopping-curve data is needed to cut it down."
)

OPEN_QUESTIONS = [
    "beta* for E^3 < 0 is taken as the largest beta with B + beta E in P.",
    "The smallest relevant m is not bounded a priori; the scan is capped.",
]


class ScenarioRegex:
    def __init__(self):
        self.component_regex = re.compile("<COMPONENT>")
        self.sample_regex = re.compile("<SAMPLE>")
        self.cube_regex = re.compile("<CUBE>")
        self.c2_regex = re.compile("<C2>")
        self.m_regex = re.compile("<M>")
        self.very_ample_regex = re.compile("<VERY_AMPLE>")
        self.count_regex = re.compile("<COUNT>")
        self.candidates_regex = re.compile("<CANDIDATES>")
        self.semi_ample_regex = re.compile("<SEMI_AMPLE>")
        self.classes_regex = re.compile("<CLASSES>")
        self.c2_line_regex = re.compile("<C2_LINE>")
        self.dual_ray_regex = re.compile("<DUAL_RAY>")
        self.slope_bound_regex = re.compile("<SLOPE_BOUND>")
        self.low_count_regex = re.compile("<LOW_COUNT>")
        self.high_count_regex = re.compile("<HIGH_COUNT>")
        self.roundup_regex = re.compile("<ROUNDUP>")
        self.r_regex = re.compile("<R>")
