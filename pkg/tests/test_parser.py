from __future__ import annotations

import pathlib
import random
import sys
from fractions import Fraction

import pytest

sys.path.append(str(pathlib.Path(__file__).resolve().parents[1]))
from app.config import settings
from app.domain import expr as E
from app.domain.enums import SymbolKind
from app.domain.errors import HypError, ParseError, RecordFormatError, UndeclaredSymbolError, UnknownFunctionError
from app.domain.hypspec import HypSpec
from app.domain.linform import LinForm
from app.domain.statuses import EntryStatus
from app.numerics.numeval import eval_exact
from app.textio.parser import parse_expr, parse_linform, parse_spec
from app.textio.printer import print_expr
from app.textio.records import dump_records, format_record, iter_records, load_records, parse_identity_record


def test_series_parameters_are_unordered() -> None:
    first = parse_spec("3F2(a,b,c;e,f)")
    second = parse_spec("3F2(c,a,b;f,e)")
    assert first == second
    assert hash(first) == hash(second)
    assert first.excess == parse_linform("e+f-a-b-c")


def test_sugar_expands_to_plain_series() -> None:
    a, b, c = (LinForm.symbol(name) for name in "abc")
    assert parse_spec("dixon(0,0,a,b,c)") == HypSpec.of((a, b, c), (1 + a - b, 1 + a - c))
    assert parse_expr("csc(x)") == parse_expr("1/sin(x)")
    assert parse_expr("harmonic(x)") == parse_expr("euler+psi(x+1)")


def test_parameter_must_be_affine() -> None:
    with pytest.raises(ParseError):
        parse_spec("3F2(a*b,b,c;e,f)")


def test_parameter_count_must_match_head() -> None:
    with pytest.raises(ParseError):
        parse_spec("3F2(a,b;e,f)")


def test_unknown_function() -> None:
    with pytest.raises(UnknownFunctionError):
        parse_expr("foo(x)")


def test_error_carries_position() -> None:
    with pytest.raises(ParseError) as info:
        parse_expr("Gamma(a+)", line=7)
    assert info.value.span is not None
    assert info.value.span.line == 7


def test_sign_node_needs_affine_exponent() -> None:
    sign = parse_expr("(-1)^(n+1)")
    assert isinstance(sign, E.Neg1Pow)
    assert sign.form == parse_linform("n+1")


def test_infinite_sum_upper_limit() -> None:
    series = parse_expr("sum(k,1,inf,1/k^2)")
    assert isinstance(series, E.Sum)
    assert series.infinite
    assert "k" not in E.free_symbols(series)


def test_printed_tree_parses_back() -> None:
    text = "Gamma(1+b-c)*Gamma(1-c-n)/(Gamma(1+b-c-n)*Gamma(1-c))*3F2(-n,a,b;c,1+a+b-c-n)"
    tree = parse_expr(text)
    assert parse_expr(print_expr(tree)) == tree


def test_record_fields_and_inferred_status() -> None:
    entry = parse_identity_record(
        "cv | n:nonnegative-integer,b:real,c:real | - | 2F1(-n,b;c) | poch(c-b,n)/poch(c,n) | vandermonde"
    )
    assert entry.id == "cv"
    assert entry.status is EntryStatus.CLOSED
    assert entry.integer_symbols == frozenset({"n"})
    assert entry.lhs_spec == parse_spec("2F1(-n,b;c)")
    assert not entry.explicit_status


@pytest.mark.parametrize(
    "rhs, status",
    [
        ("3F2(a,b,c;e,f)", EntryStatus.TRANSFORMATION),
        ("sum(k,0,3,a^k)", EntryStatus.SUMMABLE),
        ("sum(k,1,inf,a^k/k^2)", EntryStatus.CLOSED),
    ],
)
def test_status_follows_right_hand_side(rhs: str, status: EntryStatus) -> None:
    entry = parse_identity_record(f"x | a:real,b:real,c:real,e:real,f:real | - | 3F2(a,b,c;e,f) | {rhs} | ref")
    assert entry.status is status


def test_explicit_status_is_kept() -> None:
    text = "r | a:real,b:real | sigma>=1/2 | 2F1(a,b;a+b+1) | 2F1(a,b;a+b+1) | trivial | relation"
    entry = parse_identity_record(text)
    assert entry.status is EntryStatus.RELATION
    assert entry.explicit_status
    assert format_record(entry).endswith("| relation")


def test_bounded_and_derived_declarations() -> None:
    entry = parse_identity_record("d | n:positive-integer[2,4],a:real,b:=1+a | - | 2F1(-n,a;b) | 1 | ref")
    decls = entry.declared
    assert decls["n"].kind is SymbolKind.POSITIVE_INTEGER
    assert (decls["n"].lower, decls["n"].upper) == (Fraction(2), Fraction(4))
    assert decls["b"].is_derived
    assert not decls["n"].admits(Fraction(5))


def test_open_upper_bound() -> None:
    entry = parse_identity_record("o | n:positive-integer[2,],a:real | - | 2F1(-n,a;a+1) | 1 | ref")
    assert entry.declared["n"].lower == 2
    assert entry.declared["n"].upper is None


def test_excess_names_resolve_to_lhs_excess() -> None:
    entry = parse_identity_record("g | a:real,b:real,c:real | sigma>0 | 2F1(a,b;c) | 1 | ref")
    (constraint,) = entry.resolved_constraints
    assert constraint.left == parse_linform("c-a-b")


def test_undeclared_symbol_is_rejected() -> None:
    with pytest.raises(UndeclaredSymbolError):
        parse_identity_record("u | a:real | - | 2F1(a,b;a+1) | 1 | ref")


def test_wrong_field_count() -> None:
    with pytest.raises(RecordFormatError):
        parse_identity_record("w | a:real | - | 2F1(a,a;a+1)")


def test_unknown_status() -> None:
    with pytest.raises(RecordFormatError):
        parse_identity_record("s | a:real | - | 2F1(a,a;a+1) | 1 | ref | proven")


def test_record_round_trip() -> None:
    text = "karl11 | m:nonnegative-integer,n:nonnegative-integer,a:real,b:real | - | 3F2(-m-n,a+m,b+n;a,b) | (-1)^(m+n)*Gamma(m+n+1)*Gamma(a)*Gamma(b)/(Gamma(a+m)*Gamma(b+n)) | Karlsson"
    entry = parse_identity_record(text)
    again = parse_identity_record(format_record(entry))
    assert again.lhs == entry.lhs
    assert again.rhs == entry.rhs
    assert again.decls == entry.decls


def test_shifted_numerator_keeps_its_brackets() -> None:
    binding = {"a": Fraction(1, 3), "b": Fraction(2, 7)}
    quotient = parse_expr("(a-1)/b")
    assert print_expr(quotient) == "(a-1)/b"
    assert eval_exact(parse_expr(print_expr(quotient)), binding) == Fraction(-7, 3)
    squared = parse_expr("(a-1)/(a-1/2)^2")
    assert parse_expr(print_expr(squared)) == squared
    assert eval_exact(parse_expr(print_expr(squared)), binding) == eval_exact(squared, binding)


def test_scaled_numerator_needs_no_brackets() -> None:
    assert print_expr(parse_expr("2*a/b")) == "2*a/b"
    assert print_expr(parse_expr("-a/(b+1)")) == "-a/(b+1)"


@pytest.mark.parametrize("text", ["(1+a)/(2*a)", "-c+5/(a-b)", "Gamma(a)-(a-1)/(a-1/2)^2"])
def test_printing_is_idempotent(text: str) -> None:
    once = print_expr(parse_expr(text))
    assert print_expr(parse_expr(once)) == once
    assert parse_expr(once) == parse_expr(text)


def test_excess_name_needs_a_single_series() -> None:
    with pytest.raises(RecordFormatError):
        parse_identity_record("r | a:real,b:real,c:real | sigma>0 | 2F1(a,b;c)/2F1(a,b;c+1) | 1 | ratio")


SYMBOLS = ("a", "b", "c")
SCALES = (Fraction(1), Fraction(-1), Fraction(2), Fraction(-3, 2), Fraction(1, 2))
SHIFTS = (Fraction(0), Fraction(1), Fraction(-1), Fraction(1, 2), Fraction(-1, 3))


def random_form(rng: random.Random) -> LinForm:
    form = LinForm.const(rng.choice(SHIFTS))
    for name in rng.sample(SYMBOLS, rng.randint(1, 2)):
        form = form + LinForm.symbol(name) * rng.choice(SCALES)
    return form


def random_leaf(rng: random.Random) -> E.Expr:
    pick = rng.random()
    if pick < 0.5:
        return E.lin(random_form(rng))
    if pick < 0.8:
        return E.rat(Fraction(rng.choice([1, -1, 2, 3, -5]), rng.choice([1, 2, 3, 7])))
    return rng.choice([E.PI, E.EULER, E.CATALAN])


def random_tree(rng: random.Random, depth: int) -> E.Expr:
    if depth == 0:
        return random_leaf(rng)
    x = random_tree(rng, depth - 1)
    y = random_tree(rng, rng.randint(0, depth - 1))
    pick = rng.randrange(14)
    if pick == 0:
        return E.add(x, y)
    if pick == 1:
        return E.sub(x, y)
    if pick == 2:
        return E.mul(x, y)
    if pick == 3:
        return E.div(x, y)
    if pick == 4:
        return E.power(x, rng.choice([E.rat(2), E.rat(3), E.rat(-1), E.rat(Fraction(1, 2))]))
    if pick == 5:
        return E.mul(E.neg1pow(random_form(rng)), x)
    if pick == 6:
        return E.gamma(x)
    if pick == 7:
        return E.psi(x, rng.choice([0, 1]))
    if pick == 8:
        return rng.choice([E.sqrt, E.ln, E.sin, E.cos])(x)
    if pick == 9:
        return E.poch(x, E.sym("n"))
    if pick == 10:
        return E.binom(x, y)
    if pick == 11:
        tops = tuple(random_form(rng) for _ in range(3))
        return E.mul(E.hyp(HypSpec(tops, (random_form(rng), random_form(rng)))), x)
    if pick == 12:
        return E.summation("k", 0, E.sym("n"), E.mul(E.poch(E.sym("k"), 2), x))
    return rng.choice([E.minimum, E.maximum])(x, y)


def test_random_trees_survive_printing() -> None:
    rng = random.Random(20240601)
    checked = 0
    while checked < 10_000:
        try:
            tree = random_tree(rng, rng.randint(0, 4))
        except HypError:
            continue
        text = print_expr(tree)
        again = parse_expr(text)
        assert again == tree, text
        assert print_expr(again) == text
        checked += 1


@pytest.mark.parametrize("path", [settings.catalog_path, settings.relations_path, settings.db_path])
def test_shipped_records_reprint_identically(path: str) -> None:
    entries = load_records(path)
    dump = dump_records(entries)
    again = list(iter_records(dump.splitlines()))
    assert dump_records(again) == dump
    assert [format_record(entry) for entry in again] == [format_record(entry) for entry in entries]
