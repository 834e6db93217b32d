"""Recursions and closed forms, evaluated without sorting, plus cross-checks.

Everything here is exact: integers with explicit divisibility checks, or
:class:`Fraction` where a ratio is the natural answer. A failed division is
raised as :class:`InvariantViolation`; it means the inputs did not come from
a correct enumeration.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from math import comb, factorial, gcd, lcm
from typing import Iterable, Mapping, Sequence

from npslab import engine
from npslab.errors import CapacityError, DomainError, InvariantViolation
from npslab.stats import (
    Aggregate,
    DistributionVector,
    DropTable,
    aggregate,
    complexity,
    complexity_from_beta,
    complexity_from_exchange,
    is_uniform,
)
from npslab.young import (
    Cell,
    Partition,
    Tableau,
    column_order,
    enumerate_syt,
    enumerate_tableaux,
    height,
    row_order,
    strip_orders,
    syt_count,
)

FISCHER_MAX_SORTS = 2_000_000
TRACE_CHECK_MAX_N = 8


def _exact(num: int, den: int, what: str) -> int:
    q, r = divmod(num, den)
    if r:
        raise InvariantViolation(f"{what}: {num}/{den} is not an integer")
    return q


def exchange_recursion(alpha: int, omega: Mapping[int, int], n: int) -> dict[int, int]:
    """Exchange numbers ``m_U(1..n-1)`` from the total terminal heights.

    ``(n - b) m(b) = alpha - omega(b) + sum_{a<b} m(a)``. At ``b = n`` the
    left side vanishes, so ``m(n)`` is not produced.
    """
    if n < 2:
        raise DomainError("the exchange recursion needs n >= 2")
    if omega.get(1, 0) != 0:
        raise InvariantViolation(f"omega(1) must be 0, got {omega[1]}")
    m: dict[int, int] = {}
    acc = 0
    for b in range(1, n):
        m[b] = _exact(alpha - omega[b] + acc, n - b, f"m({b})")
        acc += m[b]
    return m


def uniform_omega(p: Partition) -> dict[int, int]:
    """Total terminal heights assuming every standard tableau is hit ``n!/f`` times."""
    n = p.n
    per = _exact(factorial(n), syt_count(p), "n!/f")
    omega = dict.fromkeys(range(1, n + 1), 0)
    for w in enumerate_syt(p):
        for c, b in w.entries.items():
            omega[b] += height(c)
    return {b: per * v for b, v in omega.items()}


def omega_from_distribution(z: DistributionVector) -> dict[int, int]:
    omega = dict.fromkeys(range(1, z.order.n + 1), 0)
    for w, mult in z.multiplicities.items():
        for c, b in w.entries.items():
            omega[b] += mult * height(c)
    return omega


def exit_recursion(
    p: Partition, omega_cell: Mapping[tuple[int, Cell], int], n: int
) -> dict[tuple[int, Cell], int]:
    """Signed exit numbers for ``b = 1..n-1`` from terminal-position counts.

    ``(n - b) D(b, x) = (n-1)! - omega(b, x) + sum_{a<b} D(a, x)``; each row
    must sum to zero over the cells.
    """
    if n != p.n:
        raise DomainError(f"n={n} does not match shape of size {p.n}")
    f = factorial(n - 1) if n else 0
    delta: dict[tuple[int, Cell], int] = {}
    acc = dict.fromkeys(p.cells, 0)
    for b in range(1, n):
        for x in p.cells:
            delta[b, x] = _exact(f - omega_cell[b, x] + acc[x], n - b, f"Delta({b}, {tuple(x)})")
        if sum(delta[b, x] for x in p.cells):
            raise InvariantViolation(f"signed exit numbers of {b} do not sum to zero")
        for x in p.cells:
            acc[x] += delta[b, x]
    return delta


def drop_from_exits(
    exits: Mapping[tuple[int, Cell], int], n: int, cells: Iterable[Cell] | None = None
) -> dict[tuple[int, Cell], int]:
    """Drop counts ``d(b, x) = (n-1)! + sum_{a<b} D(a, x)`` for ``b = 1..n``.

    ``cells`` is only needed when ``exits`` is empty (a one-cell shape).
    """
    cells = sorted({x for _, x in exits} if cells is None else set(cells))
    if not cells and n == 1:
        cells = [Cell(1, 1)]
    f = factorial(n - 1)
    drops = {}
    acc = dict.fromkeys(cells, 0)
    for b in range(1, n + 1):
        for x in cells:
            drops[b, x] = f + acc[x]
        if b < n:
            for x in cells:
                acc[x] += exits[b, x]
    return drops


def _binom(top: int, bottom: int) -> int:
    return comb(top, bottom) if 0 <= bottom <= top else 0


def single_row_partial_drop(n: int, a: int, x: int, y: int) -> int:
    """Fillings of the single row ``(n)`` where ``a`` starts at ``x`` and drops to ``y``."""
    if not (1 <= a <= n and 1 <= x <= n and 1 <= y <= n):
        raise DomainError(f"need 1 <= a, x, y <= {n}")
    return _binom(x - 1, y - a) * _binom(n - x, n - y) * factorial(a - 1) * factorial(n - a)


def single_row_drop(n: int, a: int, x: int) -> int:
    if not (1 <= a <= n and 1 <= x <= n):
        raise DomainError(f"need 1 <= a, x <= {n}")
    return factorial(n) // (n - a + 1) if x >= a else 0


def single_row_recursion_holds(n: int) -> bool:
    """Check the step ``a -> a+1`` of the partial drop counts at every integer point."""
    for a in range(1, n):
        for x in range(1, n + 1):
            for y in range(1, n + 1):
                lhs = single_row_partial_drop(n, a + 1, x, y)
                rhs = Fraction(y - a, n - a) * single_row_partial_drop(n, a, x, y)
                if y > 1:
                    rhs += Fraction(n - y + 1, n - a) * single_row_partial_drop(n, a, x, y - 1)
                if lhs != rhs:
                    return False
    return True


@dataclass(frozen=True)
class GcdRatioRecord:
    gcd: int
    lcm: int
    ratio: Fraction
    is_integer: bool
    zero_cells: tuple[tuple[int, Cell], ...]
    uniform: bool | None = None

    def to_json(self) -> dict:
        return {
            "gcd": self.gcd,
            "lcm": self.lcm,
            "ratio": f"{self.ratio.numerator}/{self.ratio.denominator}",
            "is_integer": self.is_integer,
            "zero_cells": [[b, list(x)] for b, x in self.zero_cells],
            "uniform": self.uniform,
        }


def gcd_ratio_check(drop: DropTable | Mapping[tuple[int, Cell], int], n: int,
                       distribution: DistributionVector | None = None) -> GcdRatioRecord:
    """Report ``n! / (lcm(1..n) * gcd of drop counts)``; reports only, never asserts.

    Zero drop counts are gcd-neutral and listed in ``zero_cells``.
    """
    counts = drop.counts if isinstance(drop, DropTable) else drop
    g = reduce(gcd, counts.values(), 0)
    l = lcm(*range(1, n + 1)) if n else 1
    ratio = Fraction(factorial(n), l * g) if g else Fraction(0)
    zeros = tuple(sorted(k for k, v in counts.items() if v == 0))
    uniform = is_uniform(distribution) if distribution is not None else None
    return GcdRatioRecord(g, l, ratio, g > 0 and ratio.denominator == 1, zeros, uniform)


@dataclass(frozen=True)
class FischerMatrix:
    shape: Partition
    orders: tuple[Tableau, ...]
    matrix: tuple[tuple[int, ...], ...]

    @property
    def is_symmetric(self) -> bool:
        m = self.matrix
        return all(m[i][j] == m[j][i] for i in range(len(m)) for j in range(i))

    def row_sums(self) -> tuple[int, ...]:
        return tuple(sum(r) for r in self.matrix)


def fischer_matrix(p: Partition, max_sorts: int = FISCHER_MAX_SORTS, workers: int = 1) -> FischerMatrix:
    """Multiplicities ``z_U(W)`` for every pair of standard tableaux ``U, W``."""
    syts = tuple(enumerate_syt(p))
    cost = len(syts) * factorial(p.n)
    if cost > max_sorts:
        raise CapacityError(f"Fischer matrix for {p} needs {cost} sorts (cap {max_sorts})")
    rows = []
    for u in syts:
        z = aggregate(p, u, workers=workers).distribution.multiplicities
        rows.append(tuple(z[w] for w in syts))
    return FischerMatrix(p, syts, tuple(rows))


def complexities(agg: Aggregate) -> tuple[Fraction, Fraction, Fraction]:
    """The mean step count computed directly, from exchange numbers and from maximal heights."""
    n = agg.shape.n
    return (
        complexity(agg.total_steps, n),
        complexity_from_exchange(agg.exchange),
        complexity_from_beta(agg.heights, n),
    )


@dataclass
class ComplexityReport:
    shape: Partition
    orders: list[Tableau]
    values: list[Fraction]
    groups: list[list[int]]
    consistent: bool
    row_equals_column: bool | None

    def to_json(self) -> dict:
        return {
            "shape": list(self.shape.parts),
            "orders": [
                {"order": [list(r) for r in u.rows], "complexity": f"{c.numerator}/{c.denominator}"}
                for u, c in zip(self.orders, self.values)
            ],
            "groups": self.groups,
            "consistent": self.consistent,
            "row_equals_column": self.row_equals_column,
        }


def complexity_group_check(
    p: Partition, orders: Iterable[Tableau], aggregates: Mapping[Tableau, Aggregate] | None = None,
    workers: int = 1,
) -> ComplexityReport:
    """Group orders by distribution vector and check that each group shares one complexity."""
    orders = list(dict.fromkeys(orders))
    aggs = [aggregates[u] if aggregates and u in aggregates else aggregate(p, u, workers=workers)
            for u in orders]
    values = []
    for agg in aggs:
        direct, via_m, via_beta = complexities(agg)
        if not direct == via_m == via_beta:
            raise InvariantViolation(f"complexity formulas disagree: {direct}, {via_m}, {via_beta}")
        values.append(direct)
    by_z: dict[tuple[int, ...], list[int]] = {}
    for k, agg in enumerate(aggs):
        by_z.setdefault(agg.distribution.vector(), []).append(k)
    groups = list(by_z.values())
    consistent = all(len({values[k] for k in g}) == 1 for g in groups)
    row_col = None
    col, row = column_order(p), row_order(p)
    if col in orders and row in orders:
        row_col = values[orders.index(col)] == values[orders.index(row)]
    return ComplexityReport(p, orders, values, groups, consistent, row_col)


# -- per-order verification -------------------------------------------------

CHECKS = ("thm44", "thm53", "cor54", "prop41", "eq21", "eq22", "fischer", "conj66", "cor45")


@dataclass
class TheoryReport:
    """Recursion outputs next to their brute-force counterparts for one (shape, order)."""

    shape: Partition
    order: Tableau
    exchange_recursion: dict[int, int] | None = None
    exchange_brute: dict[int, int] | None = None
    exits_recursion: dict[tuple[int, Cell], int] | None = None
    exits_brute: dict | None = None
    drops_recursion: dict[tuple[int, Cell], int] | None = None
    drops_brute: dict | None = None
    verdicts: dict[str, str] = field(default_factory=dict)

    def to_json(self) -> dict:
        return dict(self.verdicts)


def _verdict(ok: bool) -> str:
    return "match" if ok else "mismatch"


def check_exchange_recursion(agg: Aggregate, report: TheoryReport) -> bool:
    n = agg.shape.n
    if n < 2:
        report.verdicts["thm44"] = "match"
        return True
    rec = exchange_recursion(agg.heights.alpha, agg.heights.omega_by_entry, n)
    brute = agg.exchange.exchange_numbers()
    report.exchange_recursion, report.exchange_brute = rec, brute
    ok = rec == brute and rec[1] * (n - 1) == agg.heights.alpha
    report.verdicts["thm44"] = _verdict(ok)
    return ok


def check_exit_recursion(agg: Aggregate, report: TheoryReport) -> bool:
    n = agg.shape.n
    rec = exit_recursion(agg.shape, agg.heights.omega_by_entry_cell, n)
    brute = {k: v for k, v in agg.exits.values.items() if k[0] < n}
    report.exits_recursion, report.exits_brute = rec, brute
    ok = rec == brute and all(
        sum(agg.exits.values[b, x] for x in agg.shape.cells) == 0 for b in range(1, n + 1)
    )
    report.verdicts["thm53"] = _verdict(ok)
    return ok


def check_drop_reconstruction(agg: Aggregate, report: TheoryReport) -> bool:
    n = agg.shape.n
    rec = exit_recursion(agg.shape, agg.heights.omega_by_entry_cell, n)
    drops = drop_from_exits(rec, n, agg.shape.cells)
    report.drops_recursion, report.drops_brute = drops, dict(agg.drops.counts)
    ok = drops == dict(agg.drops.counts)
    report.verdicts["cor54"] = _verdict(ok)
    return ok


def check_exchange_independence(agg: Aggregate, report: TheoryReport) -> bool:
    try:
        agg.exchange.local_counts
        agg.exchange.exchange_numbers()
        ok = True
    except InvariantViolation:
        ok = False
    report.verdicts["prop41"] = _verdict(ok)
    return ok


def check_traces(p: Partition, u: Tableau, report: TheoryReport, which: Sequence[str]) -> bool:
    """Sort every filling through the traced path and test per-trace identities."""
    if p.n > TRACE_CHECK_MAX_N:
        raise CapacityError(f"per-trace checks are capped at n <= {TRACE_CHECK_MAX_N}")
    ok = {w: True for w in which}
    for t in enumerate_tableaux(p):
        trace = engine.sort(t, u)
        for w in which:
            try:
                if w == "eq21":
                    engine.check_composition(trace)
                    engine.check_mu(trace)
                else:
                    engine.check_heights(trace)
                    engine.check_consecutive_drops(trace)
                    engine.check_single_exchange(trace)
            except InvariantViolation:
                ok[w] = False
    for w in which:
        report.verdicts[w] = "hold" if ok[w] else "violated"
    return all(ok.values())


@dataclass
class VerifyReport:
    shape: Partition
    per_order: list[tuple[Tableau, TheoryReport]]
    conj66: list[tuple[Tableau, GcdRatioRecord]]
    fischer: FischerMatrix | None = None
    cor45: ComplexityReport | None = None
    ok: bool = True

    def to_json(self) -> dict:
        out: dict = {"shape": list(self.shape.parts), "ok": self.ok, "orders": []}
        conj = {u: rec for u, rec in self.conj66}
        for u, rep in self.per_order:
            entry = {"order": [list(r) for r in u.rows], **rep.to_json()}
            if self.fischer is not None:
                entry["fischer"] = "symmetric" if self.fischer.is_symmetric else "asymmetric"
            if u in conj:
                r = conj[u].ratio
                entry["conj66_ratio"] = f"{r.numerator}/{r.denominator}"
            out["orders"].append(entry)
        if self.fischer is not None:
            out["fischer"] = {
                "symmetric": self.fischer.is_symmetric,
                "orders": [[list(r) for r in u.rows] for u in self.fischer.orders],
                "matrix": [list(r) for r in self.fischer.matrix],
            }
        if self.cor45 is not None:
            out["cor45"] = self.cor45.to_json()
        if self.conj66:
            out["conj66"] = [
                {"order": [list(r) for r in u.rows], **rec.to_json()} for u, rec in self.conj66
            ]
        return out


def default_orders(p: Partition) -> list[Tableau]:
    """Column order, row order and every strip order, without repeats."""
    return list(dict.fromkeys([column_order(p), row_order(p), *strip_orders(p)]))


def verify(p: Partition, orders: Sequence[Tableau] | None = None,
           which: Iterable[str] = CHECKS, workers: int = 1) -> VerifyReport:
    which = list(dict.fromkeys(which))
    unknown = set(which) - set(CHECKS)
    if unknown:
        raise DomainError(f"unknown checks: {sorted(unknown)}")
    orders = default_orders(p) if orders is None else list(dict.fromkeys(orders))
    needs_agg = set(which) & {"thm44", "thm53", "cor54", "prop41", "conj66", "cor45"}
    report = VerifyReport(p, [], [])
    aggs: dict[Tableau, Aggregate] = {}
    for u in orders:
        rep = TheoryReport(p, u)
        if needs_agg:
            agg = aggs[u] = aggregate(p, u, workers=workers)
            if "thm44" in which:
                report.ok &= check_exchange_recursion(agg, rep)
            if "thm53" in which:
                report.ok &= check_exit_recursion(agg, rep)
            if "cor54" in which:
                report.ok &= check_drop_reconstruction(agg, rep)
            if "prop41" in which:
                report.ok &= check_exchange_independence(agg, rep)
            if "conj66" in which:
                report.conj66.append((u, gcd_ratio_check(agg.drops, p.n, agg.distribution)))
        trace_checks = [w for w in ("eq21", "eq22") if w in which]
        if trace_checks:
            report.ok &= check_traces(p, u, rep, trace_checks)
        report.per_order.append((u, rep))
    if "fischer" in which:
        report.fischer = fischer_matrix(p, workers=workers)
        report.ok &= report.fischer.is_symmetric
    if "cor45" in which:
        report.cor45 = complexity_group_check(p, orders, aggs, workers=workers)
        report.ok &= report.cor45.consistent and report.cor45.row_equals_column is not False
    return report
