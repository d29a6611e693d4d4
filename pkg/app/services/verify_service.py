from __future__ import annotations

import logging
from decimal import Decimal
from fractions import Fraction
from typing import Callable, Iterable, Mapping

import mpmath

from app.config import Settings, settings
from app.domain import expr as E
from app.domain.dtos import TrialFailure, VerifyReport
from app.domain.enums import SymbolKind
from app.domain.errors import EvaluationError, HypError
from app.domain.expr import Expr
from app.domain.hypspec import HypSpec
from app.domain.linform import SymbolDecl
from app.domain.models import Constraint, Verdict
from app.domain.statuses import EntryStatus
from app.numerics.hypseries import to_mpf
from app.numerics.numeval import EvalContext, Number, eval_exact, eval_expr
from app.repositories.catalog_store import InMemoryCatalogStore
from app.services.contiguity_service import ContiguityService
from app.utils.sampler import Binding, BindingSampler

# One trial: exact residual (None when not reachable) and numeric residual.
Trial = tuple[Fraction | None, mpmath.mpf]


def _has_infinite_sum(*sides: Expr) -> bool:
    return any(E.contains(side, lambda node: isinstance(node, E.Sum) and node.infinite) for side in sides)


class VerifyService:
    """Sampling harness that refutes, or fails to refute, catalog statements."""

    def __init__(self, store: InMemoryCatalogStore, cfg: Settings = settings):
        self.store = store
        self.settings = cfg
        self.logger = logging.getLogger(__name__)
        self.contiguity = ContiguityService(store, cfg)

    def _context(self, binding: Mapping[str, Fraction], precision: int) -> EvalContext:
        return EvalContext(binding, precision, pole_margin=self.settings.pole_margin_value)

    @staticmethod
    def _relative(left: Number, right: Number) -> mpmath.mpf:
        return abs(left - right) / max(mpmath.mpf(1), abs(left))

    def _compare(self, lhs: Expr, rhs: Expr, binding: Mapping[str, Fraction], precision: int) -> Trial:
        left_exact = eval_exact(lhs, binding)
        right_exact = eval_exact(rhs, binding) if left_exact is not None else None
        if left_exact is not None and right_exact is not None:
            gap = abs(left_exact - right_exact)
            with mpmath.workdps(precision):
                return gap, to_mpf(gap / max(Fraction(1), abs(left_exact)))
        ctx = self._context(binding, precision)
        with mpmath.workdps(precision):
            return None, self._relative(eval_expr(lhs, ctx), eval_expr(rhs, ctx))

    def _run(
        self,
        label: str,
        decls: Iterable[SymbolDecl],
        constraints: Iterable[Constraint],
        measure: Callable[[Binding], Trial],
        trials: int | None,
        precision: int | None,
        tolerance: Decimal | str | None,
        seed: int | None,
        status: EntryStatus | None = None,
    ) -> VerifyReport:
        trials = trials or self.settings.trials
        precision = precision or self.settings.precision
        tol = Decimal(str(tolerance)) if tolerance is not None else self.settings.tolerance
        sampler = BindingSampler(seed, self.settings)
        decls, constraints = tuple(decls), tuple(constraints)

        outcome: list[Trial] = []

        def accept(binding: Binding) -> bool:
            try:
                outcome.append(measure(binding))
            except (HypError, ZeroDivisionError):
                return False
            return True

        with mpmath.workdps(precision):
            bound = mpmath.mpf(str(tol))
            worst = mpmath.mpf(0)
            failures: list[TrialFailure] = []
            exact_trials = 0
            for _ in range(trials):
                binding = sampler.sample(decls, constraints, accept=accept, entry_id=label)
                exact, residual = outcome[-1]
                worst = max(worst, residual)
                if exact is not None:
                    exact_trials += 1
                    bad = exact != 0
                else:
                    bad = residual > bound
                if bad:
                    failures.append(
                        TrialFailure(
                            binding={name: str(value) for name, value in sorted(binding.items())},
                            residual=str(exact) if exact is not None else mpmath.nstr(residual, 5),
                            reason="exact mismatch" if exact is not None else "residual above tolerance",
                        )
                    )
            report = VerifyReport(
                entry_id=label,
                trials=trials,
                max_residual=mpmath.nstr(worst, 5),
                failures=failures,
                precision=precision,
                tolerance=tol,
                exact_trials=exact_trials,
                status=status,
            )
        level = logging.INFO if report.passed else logging.WARNING
        self.logger.log(
            level,
            "Verification finished",
            extra={
                "entry_id": label,
                "trials": trials,
                "failures": len(failures),
                "residual": report.max_residual,
                "precision": precision,
            },
        )
        return report

    def verify_entry(
        self,
        entry_id: str,
        trials: int | None = None,
        precision: int | None = None,
        tolerance: Decimal | str | None = None,
        seed: int | None = None,
    ) -> VerifyReport:
        entry = self.store.get(entry_id)
        if not entry.status.verifiable:
            raise EvaluationError(f"{entry_id} is cited but not shipped; nothing to verify")
        if entry.is_relation:
            return self.verify_relation(entry_id, trials, precision, tolerance, seed)
        precision = precision or self.settings.precision
        if tolerance is None and _has_infinite_sum(entry.lhs, entry.rhs):
            tolerance = self.settings.series_tolerance

        def measure(binding: Binding) -> Trial:
            return self._compare(entry.lhs, entry.rhs, binding, precision)

        return self._run(
            entry.id, entry.decls, entry.resolved_constraints, measure,
            trials, precision, tolerance, seed, entry.status,
        )

    def verify_relation(
        self,
        relation_id: str,
        trials: int | None = None,
        precision: int | None = None,
        tolerance: Decimal | str | None = None,
        seed: int | None = None,
    ) -> VerifyReport:
        rel = self.contiguity.get_relation(relation_id)
        precision = precision or self.settings.precision

        def measure(binding: Binding) -> Trial:
            exact = self.contiguity.exact_residual(rel, binding)
            if exact is not None:
                return exact, to_mpf(abs(exact))
            margin = self.settings.pole_margin_value
            return None, self.contiguity.check_relation(rel, binding, precision, pole_margin=margin)

        return self._run(
            rel.id, rel.entry.decls, rel.entry.resolved_constraints, measure,
            trials, precision, tolerance, seed, EntryStatus.RELATION,
        )

    def verify_chain(
        self,
        source: HypSpec,
        verdict: Verdict,
        integers: Iterable[str] = (),
        trials: int | None = None,
        precision: int | None = None,
        tolerance: Decimal | str | None = None,
        seed: int | None = None,
    ) -> VerifyReport:
        """Sample source = prefactor * target along a witness chain."""
        if not verdict.related or not verdict.chain:
            raise EvaluationError("Verdict carries no chain to verify")
        target = verdict.chain[-1].image
        lhs = E.hyp(source)
        rhs = E.mul(verdict.prefactor, E.hyp(target))
        ints = set(integers)
        names = sorted(source.symbols | E.free_symbols(rhs))
        decls = tuple(
            SymbolDecl(name, SymbolKind.POSITIVE_INTEGER if name in ints else SymbolKind.REAL) for name in names
        )
        precision = precision or self.settings.precision

        def measure(binding: Binding) -> Trial:
            return self._compare(lhs, rhs, binding, precision)

        label = f"chain:{source}"
        return self._run(label, decls, (), measure, trials, precision, tolerance, seed)

    def verify_all(
        self,
        trials: int | None = None,
        precision: int | None = None,
        tolerance: Decimal | str | None = None,
        seed: int | None = None,
    ) -> list[VerifyReport]:
        """Every verifiable entry and relation, in id order."""
        reports = []
        for entry in self.store.list_all():
            if not entry.status.verifiable:
                self.logger.info("Skipping external citation", extra={"entry_id": entry.id})
                continue
            reports.append(self.verify_entry(entry.id, trials, precision, tolerance, seed))
        return reports

    def brute_force_sum(
        self, expression: Expr, binding: Mapping[str, Fraction], precision: int | None = None
    ) -> Fraction | mpmath.mpf:
        """Value by direct summation, with no identity shortcuts; exact when every sum is finite."""
        exact = eval_exact(expression, binding)
        if exact is not None:
            return exact
        ctx = EvalContext(binding, precision or self.settings.precision, direct_series=True)
        return eval_expr(expression, ctx)

