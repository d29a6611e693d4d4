from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

from .enums import Comparison, RuleFamily, SeriesKind, SymbolKind
from .errors import RecordFormatError
from .expr import ONE, ZERO, Add, Div, Expr, Hyp, Mul, add, div, hyp_nodes, mul, sub
from .hypspec import HypSpec
from .linform import LinForm, SymbolDecl
from .statuses import EntryStatus

# Names that stand for the parametric excess of an entry's left-hand side.
EXCESS_NAMES = ("sigma", "balance")


@dataclass(frozen=True)
class SeriesClass:
    """Classification of a pFq(1) at a concrete binding."""

    kind: SeriesKind
    excess: Fraction
    length: int | None = None  # number of terms when terminating

    def __str__(self) -> str:
        if self.kind is SeriesKind.TERMINATING:
            return f"terminating(length={self.length}) sigma={self.excess}"
        return f"{self.kind.value} sigma={self.excess}"


@dataclass(frozen=True)
class Constraint:
    """Affine comparison, or a parity test on an affine form."""

    op: Comparison
    left: LinForm
    right: LinForm = field(default_factory=LinForm)

    @property
    def difference(self) -> LinForm:
        return self.left - self.right

    @property
    def symbols(self) -> frozenset[str]:
        return self.left.symbols | self.right.symbols

    def resolve(self, excess: LinForm | None) -> Constraint:
        if excess is None or not (self.symbols & set(EXCESS_NAMES)):
            return self
        mapping = {name: excess for name in EXCESS_NAMES}
        return Constraint(self.op, self.left.substitute(mapping), self.right.substitute(mapping))

    def check(self, binding: Mapping[str, Fraction]) -> bool:
        return _holds(self.op, self.difference.evaluate(binding))

    def decide(self, kinds: Mapping[str, SymbolKind]) -> bool | None:
        """Decide without a binding where possible; None means pending."""
        diff = self.difference
        if diff.is_constant:
            return _holds(self.op, diff.constant)
        if self.op.is_parity or self.op in (Comparison.EQ, Comparison.NE):
            return None
        # Integer symbols with a known minimum give a lower bound on diff.
        sign = 1 if self.op in (Comparison.GT, Comparison.GE) else -1
        bound = diff.constant * sign
        for name, coef in diff.terms:
            kind = kinds.get(name)
            minimum = kind.minimum if kind is not None else None
            if minimum is None or coef * sign < 0:
                return None
            bound += coef * sign * minimum
        strict = self.op in (Comparison.GT, Comparison.LT)
        if bound > 0 or (bound == 0 and not strict):
            return True
        return None

    def __str__(self) -> str:
        if self.op.is_parity:
            return f"{self.op.value}({self.left})"
        return f"{self.left}{self.op.value}{self.right}"


def _holds(op: Comparison, value: Fraction) -> bool:
    if op is Comparison.EQ:
        return value == 0
    if op is Comparison.NE:
        return value != 0
    if op is Comparison.LT:
        return value < 0
    if op is Comparison.LE:
        return value <= 0
    if op is Comparison.GT:
        return value > 0
    if op is Comparison.GE:
        return value >= 0
    if value.denominator != 1:
        return False
    if op is Comparison.EVEN:
        return value.numerator % 2 == 0
    return value.numerator % 2 == 1


@dataclass(frozen=True)
class IdentityEntry:
    """One catalog record: lhs = rhs under the declared constraints."""

    id: str
    decls: tuple[SymbolDecl, ...]
    constraints: tuple[Constraint, ...]
    lhs: Expr
    rhs: Expr
    ref: str = ""
    status: EntryStatus = EntryStatus.CLOSED
    section: str = "main"
    explicit_status: bool = False

    @property
    def lhs_spec(self) -> HypSpec | None:
        return self.lhs.spec if isinstance(self.lhs, Hyp) else None

    @property
    def declared(self) -> dict[str, SymbolDecl]:
        return {decl.name: decl for decl in self.decls}

    @property
    def kinds(self) -> dict[str, SymbolKind]:
        return {decl.name: decl.kind for decl in self.decls}

    @property
    def integer_symbols(self) -> frozenset[str]:
        return frozenset(decl.name for decl in self.decls if decl.is_integer)

    @property
    def excess(self) -> LinForm | None:
        spec = self.lhs_spec
        return spec.excess if spec is not None else None

    @property
    def resolved_constraints(self) -> tuple[Constraint, ...]:
        excess = self.excess
        return tuple(c.resolve(excess) for c in self.constraints)

    @property
    def is_relation(self) -> bool:
        return self.status is EntryStatus.RELATION


@dataclass(frozen=True)
class MatchResult:
    entry_id: str
    unifier: dict[str, LinForm]
    verified: tuple[str, ...] = ()
    pending: tuple[str, ...] = ()

    def __str__(self) -> str:
        pairs = ", ".join(f"{name}={form}" for name, form in sorted(self.unifier.items()))
        return f"{self.entry_id} {{{pairs}}}"


@dataclass(frozen=True)
class ChainStep:
    """One rule application inside a relatedness witness."""

    rule: str
    top_order: tuple[int, ...]
    bottom_order: tuple[int, ...]
    prefactor: Expr
    image: HypSpec

    @property
    def slots(self) -> str:
        tops = ",".join(str(i) for i in self.top_order)
        bottoms = ",".join(str(i) for i in self.bottom_order)
        return f"{tops};{bottoms}"

    def __str__(self) -> str:
        return f"{self.rule}[{self.slots}] -> {self.image}"


@dataclass(frozen=True)
class Verdict:
    related: bool
    chain: tuple[ChainStep, ...] = ()
    rules: frozenset[RuleFamily] = frozenset()
    orbit_size: int = 0
    complete: bool = True

    @property
    def prefactor(self) -> Expr:
        """Coefficient c with source = c * target along the chain."""
        total: Expr = ONE
        for step in self.chain:
            total = mul(total, step.prefactor)
        return total


def split_hyp_term(term: Expr) -> tuple[Expr, HypSpec] | None:
    """Split coefficient * pFq into its two parts; None when the term has no pFq."""
    found = hyp_nodes(term)
    if not found:
        return None
    if len(found) > 1:
        raise RecordFormatError(f"Term {term} holds more than one series")
    if isinstance(term, Hyp):
        return ONE, term.spec
    if isinstance(term, Mul):
        others = [f for f in term.factors if not isinstance(f, Hyp)]
        if len(others) == len(term.factors) - 1:
            return mul(term.coeff, *others), found[0]
    if isinstance(term, Div) and not hyp_nodes(term.den):
        inner = split_hyp_term(term.num)
        if inner is not None:
            return div(inner[0], term.den), inner[1]
    raise RecordFormatError(f"Series in {term} is not a plain factor")


@dataclass(frozen=True)
class ContigRelation:
    """sum(coefficient * pFq) + inhomogeneous = 0."""

    id: str
    terms: tuple[tuple[Expr, HypSpec], ...]
    inhomogeneous: Expr
    entry: IdentityEntry

    @classmethod
    def from_entry(cls, entry: IdentityEntry) -> ContigRelation:
        total = sub(entry.lhs, entry.rhs)
        pieces: Iterable[Expr] = total.terms if isinstance(total, Add) else (total,)
        terms: list[tuple[Expr, HypSpec]] = []
        rest: list[Expr] = []
        for piece in pieces:
            split = split_hyp_term(piece)
            if split is None:
                rest.append(piece)
            else:
                terms.append(split)
        if len(terms) < 2:
            raise RecordFormatError(f"Relation {entry.id} needs at least two series terms")
        return cls(entry.id, tuple(terms), add(*rest) if rest else ZERO, entry)


@dataclass(frozen=True)
class DbRecord:
    """Stored evaluation plus its orbit key."""

    entry: IdentityEntry
    key: str | None = None
    provenance: str = ""

    @property
    def id(self) -> str:
        return self.entry.id


@dataclass(frozen=True)
class Orbit:
    """Closure of a source spec under a rule set.

    members maps canonical key to the spec as produced (slot order kept,
    since chain steps index into it); parents maps each non-source key to
    (parent key, rule id, top order, bottom order).
    """

    source: HypSpec
    members: dict[str, HypSpec]
    parents: dict[str, tuple[str, str, tuple[int, ...], tuple[int, ...]]]
    rules: frozenset[RuleFamily]
    complete: bool
    depth: int
    integers: frozenset[str] = frozenset()

    @property
    def size(self) -> int:
        return len(self.members)

    @property
    def specs(self) -> frozenset[HypSpec]:
        return frozenset(spec.canonical() for spec in self.members.values())

    @property
    def min_key(self) -> str:
        return min(self.members)

    def __contains__(self, spec: object) -> bool:
        return isinstance(spec, HypSpec) and spec.key in self.members
