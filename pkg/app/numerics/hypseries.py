"""Classification and summation of pFq at unit argument."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

import mpmath

from app.config import settings
from app.domain.enums import SeriesKind
from app.domain.errors import (
    ConvergenceError,
    DegenerateSeriesError,
    DivergentSeriesError,
    ExcessTooSmallError,
    RuleNotApplicableError,
)
from app.domain.expr import Expr, div, mul, neg1pow, poch, product
from app.domain.hypspec import HypSpec
from app.domain.linform import LinForm
from app.domain.models import SeriesClass

logger = logging.getLogger(__name__)

Values = tuple[tuple[Fraction, ...], tuple[Fraction, ...]]
_MAX_TAIL_TERMS = 200_000


def to_mpf(value: Fraction) -> mpmath.mpf:
    return mpmath.mpf(value.numerator) / value.denominator


def _nonpositive_integer(value: Fraction) -> bool:
    return value.denominator == 1 and value <= 0


def classify_values(tops: Sequence[Fraction], bottoms: Sequence[Fraction]) -> SeriesClass:
    excess = sum(bottoms, Fraction(0)) - sum(tops, Fraction(0))
    ends = [-t for t in tops if _nonpositive_integer(t)]
    poles = [-b for b in bottoms if _nonpositive_integer(b)]
    if ends:
        stop = min(ends)
        if any(pole < stop for pole in poles):
            return SeriesClass(SeriesKind.DEGENERATE, excess)
        return SeriesClass(SeriesKind.TERMINATING, excess, int(stop) + 1)
    if poles:
        return SeriesClass(SeriesKind.DEGENERATE, excess)
    if len(tops) != len(bottoms) + 1:
        # Only the balanced family p = q + 1 has a convergence test at z = 1.
        return SeriesClass(SeriesKind.DIVERGENT, excess)
    kind = SeriesKind.CONVERGENT if excess > 0 else SeriesKind.DIVERGENT
    return SeriesClass(kind, excess)


def classify(spec: HypSpec, binding: Mapping[str, Fraction]) -> SeriesClass:
    tops, bottoms = spec.evaluate(binding)
    return classify_values(tops, bottoms)


def sum_terminating_values(tops: Sequence[Fraction], bottoms: Sequence[Fraction]) -> Fraction:
    info = classify_values(tops, bottoms)
    if info.kind is SeriesKind.DEGENERATE:
        raise DegenerateSeriesError(f"Bottom parameter pole before termination in {list(tops)};{list(bottoms)}")
    if info.kind is not SeriesKind.TERMINATING or info.length is None:
        raise DivergentSeriesError("Series does not terminate")
    total = Fraction(0)
    term = Fraction(1)
    for k in range(info.length):
        total += term
        numerator = Fraction(1)
        for t in tops:
            numerator *= t + k
        denominator = Fraction(k + 1)
        for b in bottoms:
            denominator *= b + k
        if numerator == 0:
            break
        term = term * numerator / denominator
    return total


def sum_terminating_exact(spec: HypSpec, binding: Mapping[str, Fraction]) -> Fraction:
    tops, bottoms = spec.evaluate(binding)
    return sum_terminating_values(tops, bottoms)


def _hyper(tops: Sequence[Fraction], bottoms: Sequence[Fraction], dps: int) -> mpmath.mpf:
    with mpmath.workdps(dps):
        try:
            return mpmath.hyper([to_mpf(t) for t in tops], [to_mpf(b) for b in bottoms], 1)
        except (mpmath.libmp.NoConvergence, ZeroDivisionError, ValueError) as exc:
            raise ConvergenceError(f"Series failed to converge: {exc}") from exc


@dataclass(frozen=True)
class ConvergentSum:
    """A convergent pFq(1) with a certified enclosure from its partial sum.

    |series - partial| <= tail_bound holds rigorously; value is the mpmath sum,
    accepted only when it lies inside that enclosure.
    """

    value: mpmath.mpf
    partial: mpmath.mpf
    terms: int
    tail_bound: mpmath.mpf


def tail_start(tops: Sequence[Fraction], bottoms: Sequence[Fraction]) -> int:
    """First index k with |t_{k+1}/t_k| <= (k/(k+1))^(1+sigma/2) from k on.

    With |log(1+x) - x| <= x^2 for |x| <= 1/2, any k >= 2M (M the largest
    parameter modulus, at least 1) with k >= 2Q/sigma qualifies, where Q is one
    plus the sum of the squared parameters.
    """
    params = (*tops, *bottoms)
    excess = sum(bottoms, Fraction(0)) - sum(tops, Fraction(0))
    largest = max([Fraction(1), *(abs(x) for x in params)])
    squares = 1 + sum((x * x for x in params), Fraction(0))
    return max(math.ceil(2 * largest), math.ceil(2 * squares / excess))


def partial_sum_with_tail(
    tops: Sequence[Fraction], bottoms: Sequence[Fraction], terms: int, dps: int
) -> tuple[mpmath.mpf, mpmath.mpf, mpmath.mpf]:
    """Sum of the first `terms` terms, a bound on everything after, and the largest term.

    For terms >= tail_start the remaining terms obey |t_k| <= |t_N| (N/k)^(1+sigma/2),
    so their sum is at most |t_N| (1 + 2N/sigma).
    """
    excess = sum(bottoms, Fraction(0)) - sum(tops, Fraction(0))
    with mpmath.workdps(dps):
        uppers = [to_mpf(t) for t in tops]
        lowers = [to_mpf(b) for b in bottoms]
        total = mpmath.mpf(0)
        term = mpmath.mpf(1)
        largest = mpmath.mpf(1)
        for k in range(terms):
            total += term
            numerator = mpmath.fprod(t + k for t in uppers)
            denominator = (k + 1) * mpmath.fprod(b + k for b in lowers)
            term = term * numerator / denominator
            largest = max(largest, abs(term))
        bound = abs(term) * (1 + 2 * terms / to_mpf(excess))
    return total, bound, largest


def sum_convergent_certified(
    tops: Sequence[Fraction],
    bottoms: Sequence[Fraction],
    precision: int | None = None,
    *,
    sigma_min: Fraction | None = None,
    guard: int | None = None,
) -> ConvergentSum:
    precision = precision or settings.precision
    sigma_min = settings.sigma_min_value if sigma_min is None else sigma_min
    guard = settings.guard_digits if guard is None else guard
    info = classify_values(tops, bottoms)
    if info.kind is SeriesKind.DEGENERATE:
        raise DegenerateSeriesError("Bottom parameter at a nonpositive integer")
    if info.kind is SeriesKind.DIVERGENT:
        raise DivergentSeriesError(f"Parametric excess {info.excess} is not positive")
    if info.kind is SeriesKind.TERMINATING:
        with mpmath.workdps(precision + guard):
            exact = to_mpf(sum_terminating_values(tops, bottoms))
            return ConvergentSum(exact, exact, info.length or 0, mpmath.mpf(0))
    if info.excess < sigma_min:
        raise ExcessTooSmallError(info.excess, sigma_min)
    terms = max(settings.tail_terms, tail_start(tops, bottoms))
    if terms > _MAX_TAIL_TERMS:
        raise ConvergenceError(f"Tail bound needs {terms} terms, more than {_MAX_TAIL_TERMS}")
    first = _hyper(tops, bottoms, precision + guard)
    second = _hyper(tops, bottoms, precision + 2 * guard)
    partial, bound, largest = partial_sum_with_tail(tops, bottoms, terms, precision + guard)
    with mpmath.workdps(precision + guard):
        scale = max(mpmath.mpf(1), abs(second))
        gap = abs(first - second) / scale
        if gap > mpmath.mpf(10) ** (guard - precision):
            logger.warning("Two-precision cross-check disagrees", extra={"residual": gap, "precision": precision})
            raise ConvergenceError(f"Cross-check gap {mpmath.nstr(gap, 5)} exceeds bound")
        rounding = (terms + 1) * largest * mpmath.mpf(10) ** (-precision - guard)
        slack = bound + rounding + scale * mpmath.mpf(10) ** (guard - precision)
        if abs(second - partial) > slack:
            logger.warning(
                "Series value outside its tail enclosure",
                extra={"residual": abs(second - partial), "bound": bound, "terms": terms},
            )
            raise ConvergenceError("Series value lies outside the certified tail enclosure")
        return ConvergentSum(+second, partial, terms, bound)


def sum_convergent_values(
    tops: Sequence[Fraction],
    bottoms: Sequence[Fraction],
    precision: int | None = None,
    *,
    sigma_min: Fraction | None = None,
    guard: int | None = None,
) -> mpmath.mpf:
    return sum_convergent_certified(tops, bottoms, precision, sigma_min=sigma_min, guard=guard).value


def sum_convergent(
    spec: HypSpec,
    binding: Mapping[str, Fraction],
    precision: int | None = None,
    **kwargs: object,
) -> ConvergentSum:
    tops, bottoms = spec.evaluate(binding)
    return sum_convergent_certified(tops, bottoms, precision, **kwargs)  # type: ignore[arg-type]


def _lift_excess(
    tops: Sequence[Fraction],
    bottoms: Sequence[Fraction],
    precision: int | None,
) -> mpmath.mpf | None:
    """Sum a slowly converging 3F2 through its two-term Thomae image.

    3F2(a,b,c;d,e) = G(d)G(e)G(s)/(G(a)G(s+b)G(s+c)) 3F2(d-a,e-a,s;s+b,s+c)
    with s = d+e-a-b-c; the image has excess a, so the largest usable top wins.
    """
    if len(tops) != 3 or len(bottoms) != 2:
        return None
    precision = precision or settings.precision
    d, e = bottoms
    s = d + e - sum(tops, Fraction(0))
    for index in sorted(range(3), key=lambda i: tops[i], reverse=True):
        a = tops[index]
        if a < settings.sigma_min_value:
            break
        b, c = (t for j, t in enumerate(tops) if j != index)
        image_bottoms = (s + b, s + c)
        if any(_nonpositive_integer(x) for x in image_bottoms):
            continue
        value = sum_convergent_values((d - a, e - a, s), image_bottoms, precision)
        with mpmath.workdps(precision + settings.guard_digits):
            prefactor = mpmath.gamma(to_mpf(d)) * mpmath.gamma(to_mpf(e)) * mpmath.gamma(to_mpf(s))
            for x in (a, s + b, s + c):
                prefactor *= mpmath.rgamma(to_mpf(x))
            logger.debug("Summed through Thomae image", extra={"excess": str(a)})
            return prefactor * value
    return None


def evaluate_values(
    tops: Sequence[Fraction],
    bottoms: Sequence[Fraction],
    precision: int | None = None,
) -> mpmath.mpf:
    """Numeric value of any admissible pFq(1): exact when terminating.

    A convergent 3F2 whose excess is below sigma_min is summed through a Thomae
    image when one has a large enough excess; otherwise it is refused.
    """
    info = classify_values(tops, bottoms)
    if info.kind is SeriesKind.CONVERGENT and info.excess < settings.sigma_min_value:
        lifted = _lift_excess(tops, bottoms, precision)
        if lifted is not None:
            return lifted
    return sum_convergent_values(tops, bottoms, precision)


def sum_direct_values(
    tops: Sequence[Fraction],
    bottoms: Sequence[Fraction],
    precision: int | None = None,
) -> mpmath.mpf:
    """Term-by-term summation with mpmath.nsum; the oracle for closed forms."""
    precision = precision or settings.precision
    info = classify_values(tops, bottoms)
    if info.kind is SeriesKind.DEGENERATE:
        raise DegenerateSeriesError("Bottom parameter at a nonpositive integer")
    if info.kind is SeriesKind.TERMINATING:
        with mpmath.workdps(precision):
            return to_mpf(sum_terminating_values(tops, bottoms))
    if info.kind is SeriesKind.DIVERGENT:
        raise DivergentSeriesError(f"Parametric excess {info.excess} is not positive")
    with mpmath.workdps(precision + settings.guard_digits):
        upper = [to_mpf(t) for t in tops]
        lower = [to_mpf(b) for b in bottoms]

        def term(k: mpmath.mpf) -> mpmath.mpf:
            value = 1 / mpmath.factorial(k)
            for t in upper:
                value *= mpmath.rf(t, k)
            for b in lower:
                value /= mpmath.rf(b, k)
            return value

        try:
            return +mpmath.nsum(term, [0, mpmath.inf])
        except (mpmath.libmp.NoConvergence, ZeroDivisionError) as exc:
            raise ConvergenceError(f"Direct summation failed: {exc}") from exc


def evaluate_exact(spec: HypSpec, binding: Mapping[str, Fraction]) -> Fraction | None:
    tops, bottoms = spec.evaluate(binding)
    if classify_values(tops, bottoms).kind is not SeriesKind.TERMINATING:
        return None
    return sum_terminating_values(tops, bottoms)


def find_negative_top(spec: HypSpec, n: str | LinForm) -> int:
    target = -(LinForm.symbol(n) if isinstance(n, str) else n)
    for index, top in enumerate(spec.tops):
        if top == target:
            return index
    raise RuleNotApplicableError(f"{spec} has no top parameter {target}")


def reverse_terminating(spec: HypSpec, n: str | LinForm) -> tuple[Expr, HypSpec]:
    """Reverse the order of summation of a series terminating at -n.

    pFq(-n, a_i; b_j) = (-1)^n prod (a_i)_n / prod (b_j)_n * pFq(-n, 1-b_j-n; 1-a_i-n)
    """
    if spec.p != spec.q + 1:
        raise RuleNotApplicableError("Reversal needs p = q + 1")
    where = find_negative_top(spec, n)
    minus_n = spec.tops[where]
    n_form = -minus_n
    others = [t for i, t in enumerate(spec.tops) if i != where]
    prefactor = mul(
        neg1pow(n_form),
        div(
            product([poch(t, n_form) for t in others]),
            product([poch(b, n_form) for b in spec.bottoms]),
        ),
    )
    tops = (minus_n,) + tuple(1 - b - n_form for b in spec.bottoms)
    bottoms = tuple(1 - a - n_form for a in others)
    return prefactor, HypSpec(tops, bottoms)
