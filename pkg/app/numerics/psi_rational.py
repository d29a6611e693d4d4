"""Digamma at rational arguments in terms of euler, pi, ln and radicals."""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import gcd

from app.domain import expr as E
from app.domain.errors import EvaluationError, UnknownEntryError
from app.domain.expr import Expr

FERMAT_PRIMES = (3, 5, 17, 257, 65537)

# Values the Gauss rules would produce in a longer, equivalent shape.
_KNOWN = {
    "psi(1)": "-euler",
    "psi(1/2)": "-euler-2*ln(2)",
    "psi(1/4)": "-euler-pi/2-3*ln(2)",
    "psi(3/4)": "-euler+pi/2-3*ln(2)",
    "psi(1/3)": "-euler-pi*sqrt(3)/6-3*ln(3)/2",
    "psi(2/3)": "-euler+pi*sqrt(3)/6-3*ln(3)/2",
    "psi(1,1)": "pi^2/6",
    "psi(1,1/2)": "pi^2/2",
    "psi(1,1/4)": "pi^2+8*G",
    "psi(1,3/4)": "pi^2-8*G",
    "psi(5/8)-psi(1/8)": "sqrt(2)*(pi-2*ln(sqrt(2)-1))",
    "psi(7/8)-psi(3/8)": "sqrt(2)*(pi-2*ln(1+sqrt(2)))",
    "psi(1/6)-psi(2/3)": "-2*ln(2)-2*pi*sqrt(3)/3",
    "psi(1/12)-psi(7/12)": "-2*pi+2*sqrt(3)*ln(2-sqrt(3))",
    "harmonic(n/2)": "psi(n/2+1)+euler",
}


@lru_cache(maxsize=1)
def _table() -> dict[str, Expr]:
    from app.textio.parser import parse_expr

    return {str(parse_expr(key)): parse_expr(value) for key, value in _KNOWN.items()}


def psi_constants_lookup(key: str | Expr) -> Expr:
    from app.textio.parser import parse_expr

    normalized = str(parse_expr(key) if isinstance(key, str) else key)
    try:
        return _table()[normalized]
    except KeyError:
        raise UnknownEntryError(normalized) from None


# Exact trigonometry at rational multiples of pi


def _cos_first_quadrant(r: Fraction) -> Expr | None:
    """cos(pi*r) for 0 <= r <= 1/2 when r*24 is an integer."""
    s2, s3, s6 = E.sqrt(2), E.sqrt(3), E.sqrt(6)
    table: dict[Fraction, Expr] = {
        Fraction(0): E.ONE,
        Fraction(1, 12): E.div(E.add(s6, s2), 4),
        Fraction(1, 8): E.div(E.sqrt(E.add(2, s2)), 2),
        Fraction(1, 6): E.div(s3, 2),
        Fraction(1, 4): E.div(s2, 2),
        Fraction(1, 3): E.rat(Fraction(1, 2)),
        Fraction(3, 8): E.div(E.sqrt(E.sub(2, s2)), 2),
        Fraction(5, 12): E.div(E.sub(s6, s2), 4),
        Fraction(1, 2): E.ZERO,
    }
    return table.get(r)


def cos_pi(r: Fraction) -> Expr:
    """cos(pi*r), exact for denominators 1, 2, 3, 4, 6, 8 and 12."""
    reduced = r % 2
    if reduced > 1:
        reduced = 2 - reduced
    sign = 1
    if reduced > Fraction(1, 2):
        reduced = 1 - reduced
        sign = -1
    value = _cos_first_quadrant(reduced)
    if value is None:
        return E.cos(E.mul(r, E.PI))
    return E.mul(sign, value)


def sin_pi(r: Fraction) -> Expr:
    return cos_pi(Fraction(1, 2) - r)


def _ln(value: Expr) -> Expr:
    if isinstance(value, E.RatLit) and value.value == 1:
        return E.ZERO
    return E.ln(value)


def _gauss_tail(p: int, q: int) -> Expr:
    """psi(p/q) + euler + ln(q) by the Gauss rules (q odd or even)."""
    half = q // 2
    terms: list[Expr] = [E.mul(Fraction(-1, 2), E.PI, E.div(cos_pi(Fraction(p, q)), sin_pi(Fraction(p, q))))]
    upper = half if q % 2 else half - 1
    for n in range(1, upper + 1):
        weight = cos_pi(Fraction(2 * n * p, q))
        if weight == E.ZERO:
            continue
        terms.append(E.mul(2, weight, _ln(E.mul(2, sin_pi(Fraction(n, q))))))
    if q % 2 == 0:
        terms.append(E.mul(cos_pi(Fraction(2 * half * p, q)), _ln(E.mul(2, sin_pi(Fraction(half, q))))))
    return E.add(*terms)


def psi_rational(p: int, q: int) -> Expr:
    if not 0 < p < q:
        raise EvaluationError(f"psi_rational needs 0 < p < q, got {p}/{q}")
    if gcd(p, q) != 1:
        raise EvaluationError(f"{p}/{q} is not in lowest terms")
    return E.add(E.neg(E.EULER), E.neg(_ln(E.rat(q))), _gauss_tail(p, q))


def psi_difference(p1: int, p2: int, q: int) -> Expr:
    """psi(p1/q) - psi(p2/q) with the shared -euler - ln(q) cancelled."""
    for p in (p1, p2):
        if not 0 < p < q:
            raise EvaluationError(f"psi_difference needs 0 < p < q, got {p}/{q}")
    key = f"psi({Fraction(p1, q)})-psi({Fraction(p2, q)})"
    try:
        return psi_constants_lookup(key)
    except UnknownEntryError:
        pass
    if p1 == p2:
        return E.ZERO
    return E.sub(_gauss_tail(p1, q), _gauss_tail(p2, q))


def harmonic(x: Fraction | int) -> Expr:
    """H_x = psi(x+1) + euler; exact for integers, ln(2) form at half-integers."""
    x = Fraction(x)
    if x.denominator == 1:
        if x < 0:
            raise EvaluationError(f"harmonic number undefined at {x}")
        return E.rat(sum((Fraction(1, k) for k in range(1, int(x) + 1)), Fraction(0)))
    if x.denominator == 2 and x > -1:
        m = int(x + Fraction(1, 2))
        # H_{m-1/2} = 2 H_{2m} - H_m - 2 ln 2
        exact = 2 * _harmonic_int(2 * m) - _harmonic_int(m)
        return E.add(exact, E.mul(-2, E.ln(2)))
    return E.add(E.psi(E.add(x, 1)), E.EULER)


def _harmonic_int(n: int) -> Fraction:
    return sum((Fraction(1, k) for k in range(1, n + 1)), Fraction(0))


def polygamma_at_integer(order: int, n: int) -> Expr:
    """psi(order, n) for positive integer n via zeta values; order 0 and 1 only."""
    if n < 1:
        raise EvaluationError(f"psi has a pole at {n}")
    if order == 0:
        return E.add(E.neg(E.EULER), _harmonic_int(n - 1))
    if order == 1:
        tail = sum((Fraction(1, k * k) for k in range(1, n)), Fraction(0))
        return E.sub(E.div(E.power(E.PI, 2), 6), tail)
    raise EvaluationError(f"No closed table for psi({order},n); order {order} needs zeta({order + 1})")


def is_exotic_reducible(q: int) -> bool:
    """True when q is a power of two times distinct Fermat primes (constructible angle pi/q)."""
    if q < 1:
        return False
    while q % 2 == 0:
        q //= 2
    for prime in FERMAT_PRIMES:
        if q % prime == 0:
            q //= prime
            if q % prime == 0:
                return False
    return q == 1


def _shifted_psi(value: Fraction) -> Expr:
    """psi at a rational, moved into (0, 1) by psi(x+1) = psi(x) + 1/x."""
    if value.denominator == 1:
        return polygamma_at_integer(0, int(value))
    base = value - (value.numerator // value.denominator)
    steps = int(value - base)
    try:
        core = psi_constants_lookup(E.psi(E.rat(base)))
    except UnknownEntryError:
        core = psi_rational(base.numerator, base.denominator)
    if steps >= 0:
        tail = sum((Fraction(1) / (base + j) for j in range(steps)), Fraction(0))
    else:
        tail = -sum((Fraction(1) / (base + j) for j in range(steps, 0)), Fraction(0))
    return E.add(core, tail)


def reduce_psi(e: Expr) -> Expr:
    """Replace psi and psi(1,.) at rational arguments by closed forms where known."""
    try:
        return psi_constants_lookup(e)
    except UnknownEntryError:
        pass
    if isinstance(e, E.Polygamma) and isinstance(e.arg, E.RatLit):
        value = e.arg.value
        if e.order == 0:
            return _shifted_psi(value)
        if value.denominator == 1:
            return polygamma_at_integer(e.order, int(value))
        return e
    if isinstance(e, E.Add):
        terms = list(e.terms)
        for i in range(len(terms)):
            for j in range(i + 1, len(terms)):
                try:
                    paired = psi_constants_lookup(E.add(terms[i], terms[j]))
                except UnknownEntryError:
                    continue
                rest = [t for k, t in enumerate(terms) if k not in (i, j)]
                return E.add(paired, *(reduce_psi(t) for t in rest))
        return E.add(*(reduce_psi(t) for t in terms))
    if isinstance(e, E.Mul):
        return E.mul(e.coeff, *(reduce_psi(f) for f in e.factors))
    if isinstance(e, E.Div):
        return E.div(reduce_psi(e.num), reduce_psi(e.den))
    return e


__all__ = [
    "cos_pi",
    "harmonic",
    "is_exotic_reducible",
    "polygamma_at_integer",
    "psi_constants_lookup",
    "psi_difference",
    "psi_rational",
    "reduce_psi",
    "sin_pi",
]
