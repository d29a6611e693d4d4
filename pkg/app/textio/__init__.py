from .parser import parse_expr, parse_linform, parse_spec
from .printer import print_expr, print_spec

__all__ = ["parse_expr", "parse_linform", "parse_spec", "print_expr", "print_spec"]
