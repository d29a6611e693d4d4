from .base import TransformRule, guess_integer_symbols, termination_length
from .factory import get_rule, get_rules, rules_for

__all__ = ["TransformRule", "get_rule", "get_rules", "guess_integer_symbols", "rules_for", "termination_length"]
