from .hypseries import classify, reverse_terminating, sum_convergent, sum_terminating_exact
from .numeval import EvalContext, eval_exact, eval_expr, gamma_ratio_limit

__all__ = [
    "EvalContext",
    "classify",
    "eval_exact",
    "eval_expr",
    "gamma_ratio_limit",
    "reverse_terminating",
    "sum_convergent",
    "sum_terminating_exact",
]
