"""Rate regions from stable-set families.

Each stable set achieves the rate point counting how many of its reads
serve each flow; timesharing over the family (with idling allowed) makes
every convex combination of those points, and nothing else, servable.
The region is therefore the convex hull of the generator points together
with the origin, kept in exact rational arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

from .conflict import ConflictGraph
from .geometry import HullResult, Vec, exact_hull, exact_lp_feasible, frac_vector
from .stableset import FlowIncidence, StableSetFamily, enumerate_stable_sets, flow_incidence

__all__ = ["RateRegion", "rate_region", "VOLUME_DIMENSION_CAP"]

VOLUME_DIMENSION_CAP = 8


@dataclass(frozen=True)
class RateRegion:
    """Convex, exact rate region over the served flows.

    ``generators[ell-1]`` is the rate point of stable set ell.  Regions of
    broadcast-style patterns are lower-dimensional (their flows are
    coupled) and report volume 0.
    """

    flows: tuple[tuple[int, int], ...]
    family: StableSetFamily
    incidence: FlowIncidence
    generators: tuple[tuple[int, ...], ...]

    @property
    def dimension(self) -> int:
        return len(self.flows)

    @cached_property
    def _distinct_points(self) -> tuple[Vec, ...]:
        pts = {frac_vector(g) for g in self.generators}
        pts.add(tuple(Fraction(0) for _ in range(self.dimension)))
        return tuple(sorted(pts))

    @cached_property
    def hull(self) -> HullResult:
        return exact_hull(list(self._distinct_points))

    def volume(self) -> Fraction:
        """Exact Lebesgue volume; 0 for degenerate regions."""
        if self.dimension > VOLUME_DIMENSION_CAP:
            raise ValueError(
                f"exact volume refused in dimension {self.dimension} > {VOLUME_DIMENSION_CAP}"
            )
        return self.hull.volume

    def contains(self, rho) -> bool:
        """Exact membership: rho <= some convex combination is not needed;
        equality against combinations including the idle set decides it.

        Boundary points count as inside; any negative component is outside.
        """
        vec = frac_vector(rho)
        if len(vec) != self.dimension:
            raise ValueError(f"rate vector has {len(vec)} components, region has {self.dimension}")
        if any(x < 0 for x in vec):
            return False
        columns = [p for p in self._distinct_points if any(x != 0 for x in p)]
        return exact_lp_feasible(columns, vec, slack_to_one=True) is not None

    def vertices(self) -> tuple[Vec, ...]:
        return self.hull.vertices

    def v_representation_text(self) -> str:
        lines = ["\t".join(str(x) for x in v) for v in self.vertices()]
        return "\n".join(lines) + "\n"

    def h_representation_text(self) -> str:
        lines = []
        flow_names = [f"r({i},{j})" for (i, j) in self.flows]

        def render(normal, b, op) -> str:
            terms = []
            for coeff, name in zip(normal, flow_names):
                if coeff == 0:
                    continue
                terms.append(f"{coeff}*{name}" if coeff not in (1,) else name)
            lhs = " + ".join(terms).replace("+ -", "- ") if terms else "0"
            return f"{lhs} {op} {b}"

        for normal, b in self.hull.equalities:
            lines.append(render(normal, b, "=="))
        for normal, b in self.hull.facets:
            lines.append(render(normal, b, "<="))
        return "\n".join(lines) + "\n"


def rate_region(
    graph: ConflictGraph,
    family: StableSetFamily | None = None,
    incidence: FlowIncidence | None = None,
) -> RateRegion:
    """Build the exact rate region of a conflict graph."""
    if family is None:
        family = enumerate_stable_sets(graph)
    if incidence is None:
        incidence = flow_incidence(family)
    generators = tuple(
        incidence.generator_point(ell) for ell in range(1, family.size + 1)
    )
    return RateRegion(
        flows=incidence.flows,
        family=family,
        incidence=incidence,
        generators=generators,
    )
