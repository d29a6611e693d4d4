from __future__ import annotations

from typing import Iterable

from app.domain.enums import RuleFamily

from .base import TransformRule


def get_rules(family: RuleFamily | str) -> tuple[TransformRule, ...]:
    """Return the rules of one transformation family."""
    normalized = family.value if isinstance(family, RuleFamily) else family.lower()
    if normalized == RuleFamily.THOMAE.value:
        from .thomae import THOMAE_RULES

        return THOMAE_RULES
    if normalized == RuleFamily.RJRJR.value:
        from .rjrjr import RJRJR_RULES

        return RJRJR_RULES
    if normalized == RuleFamily.REVERSE.value:
        from .rjrjr import REVERSE_RULES

        return REVERSE_RULES
    msg = f"Unknown rule family {family}"
    raise ValueError(msg)


def rules_for(families: Iterable[RuleFamily | str]) -> tuple[TransformRule, ...]:
    collected: list[TransformRule] = []
    for family in sorted({f.value if isinstance(f, RuleFamily) else f.lower() for f in families}):
        collected.extend(get_rules(family))
    return tuple(collected)


def get_rule(rule_id: str) -> TransformRule:
    """Return a rule by its stable id (case-insensitive).

    Ids: thom1..thom9, ra1p, ra2p, ra3, ra4, ra6, ra8, raB and reverse.
    """
    normalized = rule_id.lower()
    for rule in rules_for(RuleFamily):
        if rule.id.lower() == normalized:
            return rule
    msg = f"Unknown rule {rule_id}"
    raise ValueError(msg)
