from __future__ import annotations

import logging
from typing import Iterable, Iterator

from app.config import Settings, settings
from app.domain.enums import RuleFamily
from app.domain.errors import IncompleteClosureError, RuleNotApplicableError
from app.domain.hypspec import HypSpec
from app.domain.models import ChainStep, Orbit, Verdict
from app.rules import TransformRule, get_rule, guess_integer_symbols, rules_for

Families = Iterable[RuleFamily | str]


def _families(families: Families) -> frozenset[RuleFamily]:
    return frozenset(f if isinstance(f, RuleFamily) else RuleFamily(f.lower()) for f in families)


class OrbitService:
    """Canonical forms, closures and relatedness under transformation sets."""

    def __init__(self, cfg: Settings = settings):
        self.settings = cfg
        self.logger = logging.getLogger(__name__)

    @staticmethod
    def canonical(spec: HypSpec) -> HypSpec:
        return spec.canonical()

    @staticmethod
    def _expand(
        spec: HypSpec, rules: tuple[TransformRule, ...], integers: frozenset[str]
    ) -> Iterator[tuple[HypSpec, str, tuple[int, ...], tuple[int, ...]]]:
        for rule in rules:
            for top_order, bottom_order in spec.slot_orders():
                ordered = spec.reorder(top_order, bottom_order)
                if rule.applies(ordered, integers):
                    yield rule.image(ordered), rule.id, top_order, bottom_order

    def orbit_closure(
        self,
        spec: HypSpec,
        families: Families = (RuleFamily.THOMAE,),
        max_depth: int | None = None,
        integers: Iterable[str] | None = None,
    ) -> Orbit:
        if spec.p != 3 or spec.q != 2:
            raise RuleNotApplicableError(f"Orbits are defined for 3F2, got {spec}")
        chosen = _families(families)
        rules = rules_for(chosen)
        depth_limit = self.settings.max_depth if max_depth is None else max_depth
        known = frozenset(integers) if integers is not None else guess_integer_symbols(spec)

        members: dict[str, HypSpec] = {spec.key: spec}
        parents: dict[str, tuple[str, str, tuple[int, ...], tuple[int, ...]]] = {}
        frontier = [spec]
        depth = 0
        while frontier and depth < depth_limit:
            depth += 1
            grown: list[HypSpec] = []
            for current in frontier:
                for image, rule_id, top_order, bottom_order in self._expand(current, rules, known):
                    key = image.key
                    if key in members:
                        continue
                    members[key] = image
                    parents[key] = (current.key, rule_id, top_order, bottom_order)
                    grown.append(image)
            frontier = grown

        complete = not any(
            image.key not in members
            for current in frontier
            for image, *_ in self._expand(current, rules, known)
        )
        self.logger.info(
            "Orbit closure",
            extra={
                "spec": str(spec),
                "rules": sorted(f.value for f in chosen),
                "orbit_size": len(members),
                "depth": depth,
                "status": "complete" if complete else "incomplete",
            },
        )
        return Orbit(spec, members, parents, chosen, complete, depth, known)

    def chain_to(self, orbit: Orbit, target: HypSpec) -> tuple[ChainStep, ...]:
        """Witness chain from the orbit source to target (empty for the source)."""
        key = target.key
        if key not in orbit.members:
            raise RuleNotApplicableError(f"{target} is not in the orbit of {orbit.source}")
        steps: list[ChainStep] = []
        while key in orbit.parents:
            parent_key, rule_id, top_order, bottom_order = orbit.parents[key]
            ordered = orbit.members[parent_key].reorder(top_order, bottom_order)
            prefactor, image = get_rule(rule_id).apply(ordered, orbit.integers)
            steps.append(ChainStep(rule_id, top_order, bottom_order, prefactor, image))
            key = parent_key
        return tuple(reversed(steps))

    def related(
        self,
        x: HypSpec,
        y: HypSpec,
        families: Families = (RuleFamily.THOMAE,),
        max_depth: int | None = None,
        integers: Iterable[str] | None = None,
    ) -> Verdict:
        """Decide whether y lies in the closure of x; one witness chain when it does."""
        orbit = self.orbit_closure(x, families, max_depth, integers)
        if y.key in orbit.members:
            chain = self.chain_to(orbit, y)
            self.logger.info("Related", extra={"rules": [step.rule for step in chain], "depth": len(chain)})
            return Verdict(True, chain, orbit.rules, orbit.size, orbit.complete)
        if not orbit.complete:
            raise IncompleteClosureError(orbit.depth, orbit.size)
        return Verdict(False, (), orbit.rules, orbit.size, True)

    def orbit_key(
        self,
        spec: HypSpec,
        families: Families = (RuleFamily.THOMAE,),
        integers: Iterable[str] | None = None,
    ) -> str:
        """Least printed form over the orbit; the same for every member."""
        return self.orbit_closure(spec, families, integers=integers).min_key
