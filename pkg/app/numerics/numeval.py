"""Numeric and exact evaluation of expression trees at rational bindings."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from fractions import Fraction
from math import factorial, isqrt
from typing import Mapping, Union

import mpmath

from app.config import settings
from app.domain.enums import PolePolicy
from app.domain.errors import (
    EvaluationError,
    NonCancellingPoleError,
    NonIntegerSignError,
    PoleError,
    UnboundSymbolError,
)
from app.domain.expr import (
    Add,
    Apply,
    Binom,
    Const,
    Div,
    Expr,
    Fn,
    Hyp,
    INFINITY,
    MinMax,
    Mul,
    Neg1Pow,
    Pochhammer,
    Polygamma,
    Pow,
    RatLit,
    Sum,
    Sym,
)
from app.domain.linform import LinForm

from .hypseries import evaluate_exact, evaluate_values, sum_direct_values, to_mpf

logger = logging.getLogger(__name__)

Number = Union[mpmath.mpf, mpmath.mpc]


@dataclass(frozen=True)
class EvalContext:
    binding: Mapping[str, Fraction] = field(default_factory=dict)
    precision: int = settings.precision
    pole_policy: PolePolicy = PolePolicy.ERROR
    pole_margin: Fraction | None = None  # reject arguments this close to a pole
    direct_series: bool = False  # sum series term by term instead of through hyper

    def bind(self, name: str, value: Fraction) -> EvalContext:
        binding = dict(self.binding)
        binding[name] = value
        return replace(self, binding=binding)


def _is_pole(value: Fraction) -> bool:
    return value.denominator == 1 and value <= 0


def _near_pole(value: Fraction, margin: Fraction) -> bool:
    if value > margin:
        return False
    nearest = Fraction(round(value))
    if nearest > 0:
        return False
    return value != nearest and abs(value - nearest) < margin


# Exact path


def _rational_sqrt(value: Fraction) -> Fraction | None:
    if value < 0:
        return None
    num, den = isqrt(value.numerator), isqrt(value.denominator)
    if num * num == value.numerator and den * den == value.denominator:
        return Fraction(num, den)
    return None


def pochhammer_exact(x: Fraction, n: int) -> Fraction:
    """(x)_n for integer n, negative n meaning 1/(x+n)_(-n)."""
    if n >= 0:
        result = Fraction(1)
        for k in range(n):
            result *= x + k
        return result
    denominator = pochhammer_exact(x + n, -n)
    if denominator == 0:
        raise PoleError("poch", f"({x},{n})")
    return 1 / denominator


def binomial_exact(x: Fraction, k: int) -> Fraction:
    if k < 0:
        return Fraction(0)
    return pochhammer_exact(x - k + 1, k) / factorial(k)


def _integer(value: Fraction | None) -> int | None:
    if value is None or value.denominator != 1:
        return None
    return int(value)


def _factors(e: Expr, sign: int, out: list[tuple[Expr, int]]) -> Fraction:
    """Flatten a product into (factor, exponent) pairs, returning its rational coefficient."""
    if isinstance(e, Mul):
        coeff = e.coeff if sign > 0 else 1 / e.coeff
        for f in e.factors:
            coeff *= _factors(f, sign, out)
        return coeff
    if isinstance(e, Div):
        return _factors(e.num, sign, out) * _factors(e.den, -sign, out)
    if isinstance(e, Pow) and isinstance(e.exponent, RatLit) and e.exponent.value.denominator == 1:
        power = int(e.exponent.value)
        inner: list[tuple[Expr, int]] = []
        coeff = _factors(e.base, sign, inner)
        out.extend((f, k * power) for f, k in inner)
        return coeff**power
    out.append((e, sign))
    return Fraction(1)


def _gamma_classes(items: list[tuple[Fraction, int]]) -> Fraction | None:
    """Exact value of prod Gamma(x_i)^k_i, or None when it is not rational."""
    classes: dict[Fraction, list[tuple[Fraction, int]]] = {}
    for arg, power in items:
        classes.setdefault(arg - (arg.numerator // arg.denominator), []).append((arg, power))
    result = Fraction(1)
    for frac, members in classes.items():
        if frac == 0:
            poles_up = [p for a, p in members if a <= 0 and p > 0]
            poles_down = [p for a, p in members if a <= 0 and p < 0]
            if poles_up:
                return None
            if poles_down:
                result = Fraction(0)
                continue
            for arg, power in members:
                result *= Fraction(factorial(int(arg) - 1)) ** power
            continue
        if sum(power for _, power in members) != 0:
            return None
        base = min(arg for arg, _ in members)
        for arg, power in members:
            result *= pochhammer_exact(base, int(arg - base)) ** power
    return result


def _exact_product(e: Expr, binding: Mapping[str, Fraction]) -> Fraction | None:
    items: list[tuple[Expr, int]] = []
    coeff = _factors(e, 1, items)
    gammas: list[tuple[Fraction, int]] = []
    result = coeff
    for factor, power in items:
        if isinstance(factor, Apply) and factor.func is Fn.GAMMA:
            arg = eval_exact(factor.arg, binding)
            if arg is None:
                return None
            gammas.append((arg, power))
            continue
        value = eval_exact(factor, binding)
        if value is None:
            return None
        if value == 0 and power < 0:
            return None
        result *= value**power
    if gammas:
        gamma_value = _gamma_classes(gammas)
        if gamma_value is None:
            return None
        result *= gamma_value
    return result


def eval_exact(e: Expr, binding: Mapping[str, Fraction]) -> Fraction | None:
    """Exact rational value, or None when the value is not reachable exactly."""
    if isinstance(e, RatLit):
        return e.value
    if isinstance(e, Sym):
        return e.form.evaluate(binding)
    if isinstance(e, Neg1Pow):
        exponent = e.form.evaluate(binding)
        if exponent.denominator != 1:
            raise NonIntegerSignError(exponent)
        return Fraction(1 if exponent.numerator % 2 == 0 else -1)
    if isinstance(e, Add):
        total = Fraction(0)
        for term in e.terms:
            value = eval_exact(term, binding)
            if value is None:
                return None
            total += value
        return total
    if isinstance(e, (Mul, Div, Pow)) or (isinstance(e, Apply) and e.func is Fn.GAMMA):
        if isinstance(e, Pow) and not (
            isinstance(e.exponent, RatLit) and e.exponent.value.denominator == 1
        ):
            base = eval_exact(e.base, binding)
            exponent = eval_exact(e.exponent, binding)
            if base is None or exponent is None:
                return None
            if exponent.denominator == 1:
                if base == 0 and exponent < 0:
                    return None
                return base ** int(exponent)
            if exponent.denominator == 2:
                root = _rational_sqrt(base)
                if root is not None and not (root == 0 and exponent < 0):
                    return root ** int(exponent * 2)
            return None
        return _exact_product(e, binding)
    if isinstance(e, Apply) and e.func is Fn.SQRT:
        inner = eval_exact(e.arg, binding)
        return None if inner is None else _rational_sqrt(inner)
    if isinstance(e, Pochhammer):
        base = eval_exact(e.base, binding)
        length = _integer(eval_exact(e.length, binding))
        if base is None or length is None:
            return None
        try:
            return pochhammer_exact(base, length)
        except PoleError:
            return None
    if isinstance(e, Binom):
        top = eval_exact(e.top, binding)
        bottom = _integer(eval_exact(e.bottom, binding))
        if top is None or bottom is None:
            return None
        return binomial_exact(top, bottom)
    if isinstance(e, MinMax):
        values = [eval_exact(a, binding) for a in e.args]
        if any(v is None for v in values):
            return None
        return max(values) if e.largest else min(values)  # type: ignore[type-var]
    if isinstance(e, Sum):
        lower = _integer(eval_exact(e.lower, binding))
        upper = _integer(eval_exact(e.upper, binding))
        if lower is None or upper is None:
            return None
        total = Fraction(0)
        inner = dict(binding)
        for k in range(lower, upper + 1):
            inner[e.index] = Fraction(k)
            value = eval_exact(e.body, inner)
            if value is None:
                return None
            total += value
        return total
    if isinstance(e, Hyp):
        return evaluate_exact(e.spec, binding)
    return None


# Numeric path


def _constant(name: str) -> mpmath.mpf:
    if name == "pi":
        return +mpmath.pi
    if name == "euler":
        return +mpmath.euler
    return +mpmath.catalan


def _pole_value(function: str, argument: Fraction, ctx: EvalContext) -> mpmath.mpf:
    if ctx.pole_policy is PolePolicy.ERROR:
        raise PoleError(function, argument)
    if function == "Gamma":
        # Gamma(-n + eps) ~ (-1)^n / (n! eps)
        return mpmath.inf if int(-argument) % 2 == 0 else -mpmath.inf
    return -mpmath.inf


def _special_argument(function: str, arg: Expr, ctx: EvalContext) -> Fraction | None:
    """Exact argument of Gamma/psi when available, after the pole checks."""
    value = eval_exact(arg, ctx.binding)
    if value is None:
        return None
    if ctx.pole_margin is not None and _near_pole(value, ctx.pole_margin):
        raise PoleError(function, value)
    return value


def _gamma(arg: Expr, ctx: EvalContext) -> Number:
    exact = _special_argument("Gamma", arg, ctx)
    if exact is not None:
        if _is_pole(exact):
            return _pole_value("Gamma", exact, ctx)
        return mpmath.gamma(to_mpf(exact))
    value = _eval(arg, ctx)
    try:
        return mpmath.gamma(value)
    except ValueError as exc:
        raise PoleError("Gamma", mpmath.nstr(value, 10)) from exc


def _rgamma(arg: Expr, ctx: EvalContext) -> Number:
    exact = _special_argument("Gamma", arg, ctx)
    if exact is not None:
        return mpmath.rgamma(to_mpf(exact))
    return mpmath.rgamma(_eval(arg, ctx))


def _polygamma(order: int, arg: Expr, ctx: EvalContext) -> Number:
    exact = _special_argument("psi", arg, ctx)
    if exact is not None:
        if _is_pole(exact):
            return _pole_value("psi", exact, ctx)
        return mpmath.psi(order, to_mpf(exact))
    value = _eval(arg, ctx)
    try:
        return mpmath.psi(order, value)
    except ValueError as exc:
        raise PoleError("psi", mpmath.nstr(value, 10)) from exc


def _reciprocal(e: Expr, ctx: EvalContext) -> Number:
    """1/e with Gamma factors inverted through rgamma, so poles give zero."""
    if isinstance(e, Apply) and e.func is Fn.GAMMA:
        return _rgamma(e.arg, ctx)
    if isinstance(e, Mul):
        result = 1 / to_mpf(e.coeff)
        for f in e.factors:
            result *= _reciprocal(f, ctx)
        return result
    if isinstance(e, Pow) and isinstance(e.exponent, RatLit) and e.exponent.value.denominator == 1:
        power = int(e.exponent.value)
        if power > 0:
            return _reciprocal(e.base, ctx) ** power
    value = _eval(e, ctx)
    if value == 0:
        raise EvaluationError(f"Division by zero in {e}")
    return 1 / value


def _exact_integer(e: Expr, ctx: EvalContext, what: str) -> int:
    value = eval_exact(e, ctx.binding)
    if value is None or value.denominator != 1:
        raise EvaluationError(f"{what} {e} is not an integer at this binding")
    return int(value)


def _infinite_sum(e: Sum, lower: int, ctx: EvalContext) -> Number:
    def term(k: mpmath.mpf) -> Number:
        return _eval(e.body, ctx.bind(e.index, Fraction(int(k))))

    try:
        return mpmath.nsum(term, [lower, mpmath.inf])
    except (ValueError, mpmath.libmp.NoConvergence) as exc:
        raise EvaluationError(f"Series {e} did not converge") from exc


def _eval(e: Expr, ctx: EvalContext) -> Number:
    if isinstance(e, RatLit):
        return to_mpf(e.value)
    if isinstance(e, Const):
        if e == INFINITY:
            raise EvaluationError("inf is only valid as the upper limit of a sum")
        return _constant(e.name)
    if isinstance(e, Sym):
        return to_mpf(e.form.evaluate(ctx.binding))
    if isinstance(e, Neg1Pow):
        exponent = e.form.evaluate(ctx.binding)
        if exponent.denominator != 1:
            raise NonIntegerSignError(exponent)
        return mpmath.mpf(1 if exponent.numerator % 2 == 0 else -1)
    if isinstance(e, Apply):
        if e.func is Fn.GAMMA:
            return _gamma(e.arg, ctx)
        value = _eval(e.arg, ctx)
        if e.func is Fn.SIN:
            return mpmath.sin(value)
        if e.func is Fn.COS:
            return mpmath.cos(value)
        if e.func is Fn.LN:
            if value == 0:
                raise PoleError("ln", 0)
            return mpmath.log(value)
        if e.func is Fn.SQRT:
            return mpmath.sqrt(value)
        return mpmath.atanh(value)
    if isinstance(e, Polygamma):
        return _polygamma(e.order, e.arg, ctx)
    if isinstance(e, Pow):
        exponent_exact = eval_exact(e.exponent, ctx.binding)
        base = _eval(e.base, ctx)
        if exponent_exact is not None and exponent_exact.denominator == 1:
            if base == 0 and exponent_exact < 0:
                raise EvaluationError("Zero to a negative power")
            return base ** int(exponent_exact)
        return mpmath.power(base, _eval(e.exponent, ctx))
    if isinstance(e, Add):
        return mpmath.fsum(_eval(t, ctx) for t in e.terms)
    if isinstance(e, Mul):
        result = to_mpf(e.coeff)
        for f in e.factors:
            result *= _eval(f, ctx)
        return result
    if isinstance(e, Div):
        return _eval(e.num, ctx) * _reciprocal(e.den, ctx)
    if isinstance(e, Sum):
        lower = _exact_integer(e.lower, ctx, "Lower limit")
        if e.infinite:
            return _infinite_sum(e, lower, ctx)
        upper = _exact_integer(e.upper, ctx, "Upper limit")
        return mpmath.fsum(_eval(e.body, ctx.bind(e.index, Fraction(k))) for k in range(lower, upper + 1))
    if isinstance(e, Pochhammer):
        length = eval_exact(e.length, ctx.binding)
        base_exact = eval_exact(e.base, ctx.binding)
        if length is not None and base_exact is not None and length.denominator == 1:
            return to_mpf(pochhammer_exact(base_exact, int(length)))
        return mpmath.rf(_eval(e.base, ctx), _eval(e.length, ctx))
    if isinstance(e, Binom):
        exact = eval_exact(e, ctx.binding)
        if exact is not None:
            return to_mpf(exact)
        return mpmath.binomial(_eval(e.top, ctx), _eval(e.bottom, ctx))
    if isinstance(e, MinMax):
        values = [_eval(a, ctx) for a in e.args]
        return max(values) if e.largest else min(values)
    if isinstance(e, Hyp):
        tops, bottoms = e.spec.evaluate(ctx.binding)
        if ctx.direct_series:
            return sum_direct_values(tops, bottoms, ctx.precision)
        return evaluate_values(tops, bottoms, ctx.precision)
    raise EvaluationError(f"Cannot evaluate node {type(e).__name__}")


def eval_expr(e: Expr, ctx: EvalContext | None = None) -> Number:
    """High-precision value of e; exact sub-results are converted at the end."""
    ctx = ctx or EvalContext()
    with mpmath.workdps(ctx.precision):
        try:
            return +_eval(e, ctx)
        except UnboundSymbolError:
            raise
        except ZeroDivisionError as exc:
            raise EvaluationError(f"Division by zero in {e}") from exc


def gamma_ratio_limit_exact(
    numer: LinForm,
    denom: LinForm,
    binding: Mapping[str, Fraction],
    direction: str,
    numerator: str = "gamma",
) -> Fraction:
    """Limit of Gamma(numer)/Gamma(denom) (or psi(numer)/Gamma(denom)) as direction -> its bound value.

    Both arguments must sit on poles; the residues of Gamma at -p and of
    psi at -p give the finite ratio.
    """
    top = numer.evaluate(binding)
    bottom = denom.evaluate(binding)
    if not (_is_pole(top) and _is_pole(bottom)):
        raise NonCancellingPoleError(f"Gamma({numer})/Gamma({denom}) has no cancelling pair of poles here")
    alpha = numer.coefficient(direction)
    beta = denom.coefficient(direction)
    if alpha == 0 or beta == 0:
        raise NonCancellingPoleError(f"{direction} does not move both arguments off their poles")
    p, q = int(-top), int(-bottom)
    if numerator == "psi":
        return -((-1) ** q) * factorial(q) * beta / alpha
    return (-1) ** ((p - q) % 2) * Fraction(factorial(q), factorial(p)) * beta / alpha


def gamma_ratio_limit(
    numer: LinForm,
    denom: LinForm,
    binding: Mapping[str, Fraction],
    direction: str,
    numerator: str = "gamma",
    precision: int | None = None,
) -> mpmath.mpf:
    with mpmath.workdps(precision or settings.precision):
        return to_mpf(gamma_ratio_limit_exact(numer, denom, binding, direction, numerator))
