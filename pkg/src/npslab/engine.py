"""The generalised Novelli-Pak-Stoyanovskii sort with full tracing.

A standard tableau ``U`` fixes the processing order ``x_1 < ... < x_n`` of
the cells (``x_s`` is the cell holding ``s`` in ``U``). Cells are handled
from ``x_n`` down to ``x_1``; the entry found there slides away from the
corner, each time swapping with the smaller of its bottom/right neighbours,
until it is no larger than both. This is the same sequence of swaps as
repeatedly fixing the order-maximal out-of-order cell (see
:func:`find_active_cell` and :func:`step`), just without rescanning.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import comb
from typing import Iterator, NamedTuple, Sequence

from npslab.errors import DomainError, InvalidCallError, InvariantViolation
from npslab.young import Cell, Partition, Tableau, height, is_standard, neighbors


class Transposition(NamedTuple):
    """One exchange ``T_{step-1} -> T_step``.

    Before the swap the larger entry sits in ``x`` and the smaller in ``y``;
    ``y`` is a bottom or right neighbour of ``x``.
    """

    step: int
    small: int
    large: int
    x: Cell
    y: Cell


class DropRecord(NamedTuple):
    entry: int
    start_cell: Cell
    drop_path: tuple[Cell, ...]
    max_height: int


class Layout:
    """Flat, index-based view of a shape and a processing order.

    Cells are indexed ``0..n-1`` in the canonical column-wise order, matching
    ``Tableau.column_sequence``.
    """

    def __init__(self, shape: Partition, order: Tableau):
        self.shape = shape
        self.n = shape.n
        self.cells = shape.column_cells
        index = shape.column_index
        self.plus = tuple(
            tuple(index[y] for y in sorted(neighbors(shape, c).plus)) for c in self.cells
        )
        self.heights = tuple(height(c) for c in self.cells)
        # seq[s-1] is the index of x_s
        self.seq = tuple(index[order.position(s)] for s in range(1, self.n + 1))
        self.budget = self.n * comb(self.n, 2)


@lru_cache(maxsize=256)
def layout(order: Tableau) -> Layout:
    if not is_standard(order):
        raise DomainError("sorting order must be a standard tableau")
    return Layout(order.shape, order)


def run_flat(vals: list[int], lay: Layout) -> tuple[list[tuple[int, int, int, int]], list[int]]:
    """Sort ``vals`` (entries in column-wise cell order) in place.

    Returns the swaps as ``(a, b, x, y)`` index tuples (``b`` moves from
    cell ``x`` to ``y``, ``a`` the other way) and ``mu`` with
    ``mu[s-1] = mu_U(s, T)`` for ``s = 1..n+1``.
    """
    plus = lay.plus
    seq = lay.seq
    n = lay.n
    steps: list[tuple[int, int, int, int]] = []
    mu = [0] * (n + 1)
    for s in range(n - 1, -1, -1):
        x = seq[s]
        b = vals[x]
        while True:
            nb = plus[x]
            if not nb:
                break
            y = nb[0]
            if len(nb) == 2 and vals[nb[1]] < vals[y]:
                y = nb[1]
            a = vals[y]
            if a > b:
                break
            vals[x] = a
            vals[y] = b
            steps.append((a, b, x, y))
            x = y
        mu[s] = len(steps)
        if len(steps) > lay.budget:
            raise InvariantViolation(f"sort exceeded its step budget of {lay.budget}")
    return steps, mu


@dataclass(frozen=True)
class SortTrace:
    """Everything recorded while sorting ``initial`` with respect to ``order``.

    ``mu[s-1]`` is the number of steps after which the filling is ordered on
    ``{x_s, ..., x_n}``; the final element is ``mu_U(n+1, T) = 0``.
    """

    order: Tableau
    initial: Tableau
    steps: tuple[Transposition, ...]
    result: Tableau
    mu: tuple[int, ...]

    @property
    def r(self) -> int:
        return len(self.steps)

    def mu_at(self, s: int) -> int:
        if not 1 <= s <= self.initial.n + 1:
            raise DomainError(f"mu index {s} outside 1..{self.initial.n + 1}")
        return self.mu[s - 1]

    def states(self) -> Iterator[Tableau]:
        """``T_0, ..., T_r`` rebuilt from the transpositions."""
        cur = dict(self.initial.entries)
        shape = self.initial.shape
        yield self.initial
        for tr in self.steps:
            cur[tr.x], cur[tr.y] = cur[tr.y], cur[tr.x]
            yield Tableau.from_mapping(shape, cur)

    def to_json(self) -> dict:
        return {
            "steps": [
                {"i": tr.step, "a": tr.small, "b": tr.large, "x": list(tr.x), "y": list(tr.y)}
                for tr in self.steps
            ],
            "mu": list(self.mu),
            "result": self.result.to_json(),
        }


def _check_pair(t: Tableau, u: Tableau) -> Layout:
    if t.shape != u.shape:
        raise DomainError(f"shape mismatch: {t.shape.parts} vs {u.shape.parts}")
    return layout(u)


def find_active_cell(t: Tableau, u: Tableau) -> Cell | None:
    """The order-maximal cell whose entry exceeds one of its bottom/right neighbours."""
    _check_pair(t, u)
    for s in range(t.n, 0, -1):
        x = u.position(s)
        plus = neighbors(t.shape, x).plus
        if plus and t[x] > min(t[y] for y in plus):
            return x
    return None


def step(t: Tableau, u: Tableau) -> tuple[Tableau, Transposition]:
    """Apply one exchange at the active cell. The step index in the result is 1."""
    x = find_active_cell(t, u)
    if x is None:
        raise InvalidCallError("tableau is already standard")
    y = min(neighbors(t.shape, x).plus, key=t.__getitem__)
    entries = dict(t.entries)
    entries[x], entries[y] = entries[y], entries[x]
    return Tableau.from_mapping(t.shape, entries), Transposition(1, t[y], t[x], x, y)


def sort(t: Tableau, u: Tableau) -> SortTrace:
    lay = _check_pair(t, u)
    vals = list(t.column_sequence())
    raw, mu = run_flat(vals, lay)
    cells = lay.cells
    steps = tuple(
        Transposition(i, a, b, cells[x], cells[y]) for i, (a, b, x, y) in enumerate(raw, 1)
    )
    result = Tableau.from_column_sequence(t.shape, vals)
    return SortTrace(u, t, steps, result, tuple(mu))


def drop_records(trace: SortTrace) -> list[DropRecord]:
    """One record per entry that actually drops, in processing order ``x_n, ..., x_1``."""
    n = trace.initial.n
    records = []
    for s in range(n, 0, -1):
        lo, hi = trace.mu[s], trace.mu[s - 1]
        if lo == hi:
            continue
        start = trace.order.position(s)
        entry = trace.initial[start]
        path = (start,) + tuple(tr.y for tr in trace.steps[lo:hi])
        records.append(DropRecord(entry, start, path, height(path[-1])))
    return records


def beta(trace: SortTrace, b: int) -> int:
    """Largest height reached by entry ``b`` during the sort."""
    n = trace.initial.n
    if not 1 <= b <= n:
        raise DomainError(f"entry {b} outside 1..{n}")
    start = trace.initial.position(b)
    s = trace.order[start]
    lo, hi = trace.mu[s], trace.mu[s - 1]
    if lo == hi:
        return height(start)
    return height(trace.steps[hi - 1].y)


# -- trace invariants -------------------------------------------------------


def check_composition(trace: SortTrace) -> None:
    """Applying the recorded transpositions in turn to the input gives the result."""
    perm = {v: v for v in range(1, trace.initial.n + 1)}
    for tr in trace.steps:
        # left-multiply by the transposition (a b)
        a, b = tr.small, tr.large
        for k, v in perm.items():
            if v == a:
                perm[k] = b
            elif v == b:
                perm[k] = a
    composed = Tableau.from_mapping(
        trace.initial.shape, {c: perm[v] for c, v in trace.initial.entries.items()}
    )
    if composed != trace.result:
        raise InvariantViolation("composition of transpositions does not reproduce the result")
    if not is_standard(trace.result):
        raise InvariantViolation("result is not standard")


def check_heights(trace: SortTrace) -> None:
    """Each exchange moves the smaller entry one step toward the corner, the larger one away."""
    pos = dict(trace.initial._positions)
    for tr in trace.steps:
        if pos[tr.small] != tr.y or pos[tr.large] != tr.x:
            raise InvariantViolation(f"step {tr.step}: entries not where recorded")
        if tr.y not in neighbors(trace.initial.shape, tr.x).plus:
            raise InvariantViolation(f"step {tr.step}: cells are not neighbours")
        if height(tr.y) != height(tr.x) + 1 or tr.small >= tr.large:
            raise InvariantViolation(f"step {tr.step}: height change is not +-1")
        pos[tr.small], pos[tr.large] = tr.x, tr.y


def check_consecutive_drops(trace: SortTrace) -> None:
    """Exchanges of ``b`` with smaller entries are consecutive and increasing in the partner."""
    seen_done: set[int] = set()
    prev: Transposition | None = None
    for tr in trace.steps:
        if prev is not None and prev.large == tr.large:
            if tr.small <= prev.small or tr.step != prev.step + 1:
                raise InvariantViolation(f"drop of {tr.large} not increasing at step {tr.step}")
        else:
            if tr.large in seen_done:
                raise InvariantViolation(f"entry {tr.large} drops in two separate runs")
            if prev is not None:
                seen_done.add(prev.large)
        prev = tr


def check_single_exchange(trace: SortTrace) -> None:
    pairs = [(tr.small, tr.large) for tr in trace.steps]
    if len(pairs) != len(set(pairs)):
        raise InvariantViolation("some pair of entries was exchanged twice")


def check_mu(trace: SortTrace) -> None:
    mu = trace.mu
    if mu[-1] != 0 or mu[0] != trace.r:
        raise InvariantViolation("mu endpoints wrong")
    if any(mu[s] > mu[s - 1] for s in range(1, len(mu))):
        raise InvariantViolation("mu is not monotone")


def check_trace(trace: SortTrace) -> None:
    """Run every single-trace invariant; raises :class:`InvariantViolation`."""
    check_composition(trace)
    check_heights(trace)
    check_consecutive_drops(trace)
    check_single_exchange(trace)
    check_mu(trace)


def _flat_states(vals: Sequence[int], raw: Sequence[tuple[int, int, int, int]]) -> Iterator[list[int]]:
    cur = list(vals)
    yield cur[:]
    for a, b, x, y in raw:
        cur[x], cur[y] = a, b
        yield cur[:]


def check_swap_stability(t: Tableau, u: Tableau, b: int) -> int:
    """Compare the sorts of ``T`` and ``T* = (b, b+1) o T``.

    Of the two fillings, take the one holding ``b`` (not ``b+1``) in the
    earlier cell ``x_i`` of the pair. Up to its step ``mu_U(i, .)`` the
    intermediate fillings of both sorts must agree after swapping ``b`` and
    ``b+1``. Returns that step bound.
    """
    lay = _check_pair(t, u)
    n = t.n
    if not 1 <= b < n:
        raise DomainError(f"need 1 <= b < n, got b={b}")
    vals = list(t.column_sequence())
    swapped = [b + 1 if v == b else b if v == b + 1 else v for v in vals]
    raw, mu = run_flat(list(vals), lay)
    raw_s, mu_s = run_flat(list(swapped), lay)
    ub, ub1 = u[lay.cells[vals.index(b)]], u[lay.cells[vals.index(b + 1)]]
    bound = mu[ub - 1] if ub < ub1 else mu_s[ub1 - 1]
    if min(len(raw), len(raw_s)) < bound:
        raise InvariantViolation("one sort is shorter than the shared prefix")
    swap = {b: b + 1, b + 1: b}
    for k, (s1, s2) in enumerate(zip(_flat_states(vals, raw), _flat_states(swapped, raw_s))):
        if k > bound:
            break
        if s1 != [swap.get(v, v) for v in s2]:
            raise InvariantViolation(f"traces diverge at step {k} <= {bound} for b={b}")
    return bound
