"""Brute-force statistics of the sort over all (or sampled) fillings of a shape.

Every filling is sorted once and all tables are updated in the same pass.
Work is split into batches of fillings; each batch produces a :class:`Tally`
of plain integer accumulators and tallies are merged by componentwise
addition, so exhaustive results do not depend on how the work was split.
"""
from __future__ import annotations

import itertools
import math
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

from npslab.engine import Layout, layout
from npslab.errors import DomainError, InvariantViolation
from npslab.young import (
    Cell,
    Partition,
    Tableau,
    alpha,
    enumerate_syt,
    height,
    neighbors,
    syt_count,
)

SAMPLE_CHUNK = 10_000


@dataclass
class Tally:
    """Mergeable accumulators for one batch of fillings.

    Flat index conventions (entries 1-based, cells 0-based column-wise):

    * ``exchange[((a-1)*n + b-1)*n*n + src*n + dst]`` counts swaps where ``a``
      moved from ``src`` to ``dst`` and ``b`` the other way;
    * ``drop_shift[(b-1)*n + cell]``: +1 where a drop of ``b`` ended, -1 where
      it started;
    * ``starts[(b-1)*n + cell]`` counts initial positions (only kept for
      non-exhaustive sources; for the full enumeration each is ``(n-1)!``).
    """

    n: int
    fillings: int = 0
    total_steps: int = 0
    steps_sq: int = 0
    exchange: list[int] = field(default_factory=list)
    drop_shift: list[int] = field(default_factory=list)
    starts: list[int] | None = None
    results: Counter = field(default_factory=Counter)

    @classmethod
    def empty(cls, n: int, track_starts: bool = False) -> Tally:
        return cls(
            n,
            exchange=[0] * n**4,
            drop_shift=[0] * n * n,
            starts=[0] * n * n if track_starts else None,
        )

    def merge(self, other: Tally) -> Tally:
        if other.n != self.n or (self.starts is None) != (other.starts is None):
            raise DomainError("cannot merge tallies of different kinds")
        self.fillings += other.fillings
        self.total_steps += other.total_steps
        self.steps_sq += other.steps_sq
        self.exchange = [p + q for p, q in zip(self.exchange, other.exchange)]
        self.drop_shift = [p + q for p, q in zip(self.drop_shift, other.drop_shift)]
        if self.starts is not None:
            self.starts = [p + q for p, q in zip(self.starts, other.starts)]
        self.results.update(other.results)
        return self


def tally_fillings(fillings: Iterable[Sequence[int]], lay: Layout, tally: Tally) -> Tally:
    """Sort each filling (given as a column-wise entry sequence) and accumulate into ``tally``.

    This is the hot loop; it repeats the sliding rule of :func:`npslab.engine.run_flat`
    inline rather than building step lists.
    """
    n = lay.n
    n2 = n * n
    n3 = n2 * n
    plus = lay.plus
    order_desc = lay.seq[::-1]
    exch = tally.exchange
    shift = tally.drop_shift
    starts = tally.starts
    results = tally.results
    total = sq = count = 0
    for filling in fillings:
        vals = list(filling)
        if starts is not None:
            for k, v in enumerate(vals):
                starts[(v - 1) * n + k] += 1
        r = 0
        for x0 in order_desc:
            x = x0
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
                exch[(a - 1) * n3 + (b - 1) * n2 + y * n + x] += 1
                r += 1
                x = y
            if x != x0:
                base = (b - 1) * n
                shift[base + x0] -= 1
                shift[base + x] += 1
        total += r
        sq += r * r
        count += 1
        results[tuple(vals)] += 1
    tally.fillings += count
    tally.total_steps += total
    tally.steps_sq += sq
    return tally


def _prefixes(n: int) -> list[tuple[int, ...]]:
    k = min(n, 2)
    return list(itertools.permutations(range(1, n + 1), k))


def _fillings_with_prefix(n: int, prefix: tuple[int, ...]) -> Iterator[tuple[int, ...]]:
    rest = [v for v in range(1, n + 1) if v not in prefix]
    for tail in itertools.permutations(rest):
        yield prefix + tail


def _tally_prefix(args: tuple[Tableau, tuple[int, ...]]) -> Tally:
    order, prefix = args
    lay = layout(order)
    return tally_fillings(_fillings_with_prefix(lay.n, prefix), lay, Tally.empty(lay.n))


def _tally_sample_chunk(args: tuple[Tableau, int, int, int]) -> Tally:
    order, seed, chunk, size = args
    lay = layout(order)
    return tally_fillings(sample_fillings_chunk(lay.n, seed, chunk, size), lay, Tally.empty(lay.n, True))


def _run(func, jobs: list, n: int, track_starts: bool, workers: int) -> Tally:
    total = Tally.empty(n, track_starts)
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for part in pool.map(func, jobs, chunksize=max(1, len(jobs) // (4 * workers))):
                total.merge(part)
    else:
        for job in jobs:
            total.merge(func(job))
    return total


def exhaustive_tally(order: Tableau, workers: int = 1) -> Tally:
    """Tally every filling, split by the first two entries of the column-wise sequence.

    The batches are the consecutive blocks of the lexicographic enumeration.
    """
    n = order.n
    if n == 0:
        return Tally(0, fillings=1, results=Counter({(): 1}), exchange=[], drop_shift=[])
    jobs = [(order, prefix) for prefix in _prefixes(n)]
    return _run(_tally_prefix, jobs, n, False, workers)


def sample_fillings_chunk(n: int, seed: int, chunk: int, size: int) -> list[list[int]]:
    """``size`` uniform random fillings (column-wise entry sequences) for batch ``chunk``.

    Batch ``k`` draws from a PCG64 generator seeded with ``[seed, k]``, so a
    sample of ``N`` fillings is the concatenation of batches ``0, 1, ...`` of
    ``SAMPLE_CHUNK`` fillings regardless of how many workers consume them.
    """
    rng = np.random.default_rng([seed, chunk])
    base = np.tile(np.arange(1, n + 1), (size, 1))
    return rng.permuted(base, axis=1).tolist()


def sample_fillings(n: int, samples: int, seed: int) -> Iterator[list[int]]:
    for chunk, size in _sample_chunks(samples):
        yield from sample_fillings_chunk(n, seed, chunk, size)


def random_tableaux(shape: Partition, samples: int, seed: int) -> Iterator[Tableau]:
    for vals in sample_fillings(shape.n, samples, seed):
        yield Tableau.from_column_sequence(shape, vals)


def _sample_chunks(samples: int) -> list[tuple[int, int]]:
    full, rem = divmod(samples, SAMPLE_CHUNK)
    chunks = [(k, SAMPLE_CHUNK) for k in range(full)]
    if rem:
        chunks.append((full, rem))
    return chunks


def sample_tally(order: Tableau, samples: int, seed: int, workers: int = 1) -> Tally:
    if samples < 1:
        raise DomainError("sample mode needs at least one sample")
    jobs = [(order, seed, chunk, size) for chunk, size in _sample_chunks(samples)]
    return _run(_tally_sample_chunk, jobs, order.n, True, workers)


def stream_tally(order: Tableau, source: Iterable[Tableau | Sequence[int]]) -> Tally:
    """Tally an arbitrary stream of fillings (tableaux or column-wise sequences)."""
    lay = layout(order)

    def flat() -> Iterator[Sequence[int]]:
        for t in source:
            if isinstance(t, Tableau):
                if t.shape != order.shape:
                    raise DomainError(f"shape mismatch: {t.shape.parts} vs {order.shape.parts}")
                yield t.column_sequence()
            else:
                yield t

    return tally_fillings(flat(), lay, Tally.empty(order.n, True))


# -- tables -----------------------------------------------------------------


@dataclass(frozen=True)
class ExchangeTables:
    """Exchange counts ``m_U(a, b, x, y)``: ``a < b`` swapped, ``a`` moving from ``x`` to ``y``.

    ``counts`` holds only nonzero entries.
    """

    order: Tableau
    counts: Mapping[tuple[int, int, Cell, Cell], int]

    @property
    def n(self) -> int:
        return self.order.n

    def count(self, a: int, b: int, x: Sequence[int], y: Sequence[int]) -> int:
        """``m_U(a, b, x, y)`` for any ``a != b``; for ``a > b`` this is the same event as ``(b, a, y, x)``."""
        x, y = Cell(*x), Cell(*y)
        if a > b:
            a, b, x, y = b, a, y, x
        return self.counts.get((a, b, x, y), 0)

    @property
    def pair_counts(self) -> dict[tuple[int, int], int]:
        pairs = {(a, b): 0 for a in range(1, self.n + 1) for b in range(a + 1, self.n + 1)}
        for (a, b, _, _), m in self.counts.items():
            pairs[a, b] += m
        return pairs

    @property
    def matrix(self) -> list[list[int]]:
        """``M_U``: ``m_U(a, b)`` above the diagonal, zero elsewhere."""
        m = [[0] * self.n for _ in range(self.n)]
        for (a, b), v in self.pair_counts.items():
            m[a - 1][b - 1] = v
        return m

    def exchange_number(self, a: int) -> int:
        """``m_U(a)``, the common value of ``m_U(a, b)`` over ``b > a``."""
        if not 1 <= a < self.n:
            raise DomainError(f"exchange number needs 1 <= a < n, got {a}")
        pairs = self.pair_counts
        values = {pairs[a, b] for b in range(a + 1, self.n + 1)}
        if len(values) != 1:
            raise InvariantViolation(f"m_U({a}, b) depends on b: {sorted(values)}")
        return values.pop()

    def exchange_numbers(self) -> dict[int, int]:
        return {a: self.exchange_number(a) for a in range(1, self.n)}

    @property
    def local_counts(self) -> dict[tuple[int, Cell, Cell], int]:
        """``m_U(a, x, y)``, checked to be independent of the partner ``b > a``."""
        by_partner: dict[tuple[int, Cell, Cell], dict[int, int]] = {}
        for (a, b, x, y), m in self.counts.items():
            by_partner.setdefault((a, x, y), {})[b] = m
        local = {}
        for key, partners in sorted(by_partner.items()):
            a = key[0]
            values = {partners.get(b, 0) for b in range(a + 1, self.n + 1)}
            if len(values) != 1:
                raise InvariantViolation(f"m_U({a}, b, {key[1]}, {key[2]}) depends on b")
            local[key] = values.pop()
        return local


@dataclass(frozen=True)
class DistributionVector:
    order: Tableau
    multiplicities: Mapping[Tableau, int]

    @property
    def total(self) -> int:
        return sum(self.multiplicities.values())

    def vector(self) -> tuple[int, ...]:
        return tuple(self.multiplicities.values())


@dataclass(frozen=True)
class HeightTotals:
    """Height sums over the fillings seen.

    ``alpha`` is the shape constant (total initial height of any entry over
    all ``n!`` fillings); the other fields are sums over the source.
    """

    alpha: int
    omega_by_entry: Mapping[int, int]
    omega_by_entry_cell: Mapping[tuple[int, Cell], int]
    beta_by_entry: Mapping[int, int]


@dataclass(frozen=True)
class DropTable:
    order: Tableau
    counts: Mapping[tuple[int, Cell], int]

    def row(self, b: int) -> tuple[int, ...]:
        """Drop counts of entry ``b`` over cells in row-major order."""
        return tuple(self.counts[b, c] for c in self.order.shape.cells)


@dataclass(frozen=True)
class SignedExitTable:
    """Net number of exits of each entry from each cell toward the corner.

    Values are exact integers for the full enumeration; sampled sources may
    give non-integral partner averages, kept as :class:`Fraction`.
    """

    order: Tableau
    values: Mapping[tuple[int, Cell], int | Fraction]

    def row(self, b: int) -> tuple[int | Fraction, ...]:
        return tuple(self.values[b, c] for c in self.order.shape.cells)


@dataclass(frozen=True)
class Aggregate:
    shape: Partition
    order: Tableau
    exhaustive: bool
    fillings: int
    total_steps: int
    steps_sq: int
    exchange: ExchangeTables
    distribution: DistributionVector
    heights: HeightTotals
    drops: DropTable
    exits: SignedExitTable

    @property
    def mean_steps(self) -> Fraction:
        return Fraction(self.total_steps, self.fillings)

    @property
    def standard_error(self) -> float:
        """Standard error of the mean step count (sample variance with ``N - 1``)."""
        N = self.fillings
        if N < 2:
            return math.nan
        mean = Fraction(self.total_steps, N)
        var = (Fraction(self.steps_sq, 1) - N * mean * mean) / (N - 1)
        return math.sqrt(var / N)


def _normalize(q: Fraction) -> int | Fraction:
    return q.numerator if q.denominator == 1 else q


def build_aggregate(order: Tableau, tally: Tally, exhaustive: bool) -> Aggregate:
    shape = order.shape
    n = shape.n
    cells = shape.column_cells
    n2, n3 = n * n, n**3

    counts: dict[tuple[int, int, Cell, Cell], int] = {}
    for idx, m in enumerate(tally.exchange):
        if m:
            a, rest = divmod(idx, n3)
            b, rest = divmod(rest, n2)
            src, dst = divmod(rest, n)
            counts[a + 1, b + 1, cells[src], cells[dst]] = m
    exchange = ExchangeTables(order, counts)

    syts = list(enumerate_syt(shape))
    mult = {w: tally.results.get(w.column_sequence(), 0) for w in syts}
    if sum(mult.values()) != tally.fillings:
        raise InvariantViolation("some sorted filling is not a standard tableau")
    distribution = DistributionVector(order, mult)

    omega_cell = {(b, c): 0 for b in range(1, n + 1) for c in shape.cells}
    for w, z in mult.items():
        if z:
            for c, b in w.entries.items():
                omega_cell[b, c] += z
    omega = {b: sum(omega_cell[b, c] * height(c) for c in shape.cells) for b in range(1, n + 1)}

    index = shape.column_index
    drop_counts = {}
    start_each = factorial(n - 1) if n else 0
    for b in range(1, n + 1):
        for c in shape.cells:
            k = (b - 1) * n + index[c]
            start = start_each if tally.starts is None else tally.starts[k]
            drop_counts[b, c] = start + tally.drop_shift[k]
    drops = DropTable(order, drop_counts)
    beta = {b: sum(drop_counts[b, c] * height(c) for c in shape.cells) for b in range(1, n + 1)}
    heights = HeightTotals(alpha(shape) if n else 0, omega, omega_cell, beta)

    exits = SignedExitTable(order, signed_exits_from_counts(shape, exchange))
    return Aggregate(
        shape, order, exhaustive, tally.fillings, tally.total_steps, tally.steps_sq,
        exchange, distribution, heights, drops, exits,
    )


def signed_exits_from_counts(shape: Partition, exchange: ExchangeTables) -> dict[tuple[int, Cell], int | Fraction]:
    """Signed exit numbers straight from exchange counts, averaging over larger partners.

    For the largest entry there is no larger partner and the value is 0.
    """
    n = shape.n
    out: dict[tuple[int, Cell], int | Fraction] = {}
    for b in range(1, n + 1):
        for x in shape.cells:
            nb = neighbors(shape, x)
            net = 0
            for c in range(b + 1, n + 1):
                net += sum(exchange.count(b, c, x, y) for y in nb.minus)
                net -= sum(exchange.count(b, c, y, x) for y in nb.plus)
            out[b, x] = _normalize(Fraction(net, n - b)) if b < n else 0
    return out


def aggregate(
    shape: Partition,
    order: Tableau,
    source: Iterable[Tableau | Sequence[int]] | None = None,
    *,
    workers: int = 1,
) -> Aggregate:
    """Sort every filling from ``source`` (all ``n!`` fillings when ``None``) and tabulate."""
    if order.shape != shape:
        raise DomainError(f"order has shape {order.shape.parts}, expected {shape.parts}")
    layout(order)
    if source is None:
        tally = exhaustive_tally(order, workers)
    else:
        tally = stream_tally(order, source)
    return build_aggregate(order, tally, source is None)


def aggregate_sample(shape: Partition, order: Tableau, samples: int, seed: int, *, workers: int = 1) -> Aggregate:
    if order.shape != shape:
        raise DomainError(f"order has shape {order.shape.parts}, expected {shape.parts}")
    layout(order)
    return build_aggregate(order, sample_tally(order, samples, seed, workers), False)


# -- complexity -------------------------------------------------------------


def complexity(total_steps: int, n: int) -> Fraction:
    """Mean number of exchanges over all ``n!`` fillings."""
    return Fraction(total_steps, factorial(n))


def complexity_from_exchange(tables: ExchangeTables) -> Fraction:
    n = tables.n
    if n < 2:
        return Fraction(0)
    return Fraction(sum((n - a) * m for a, m in tables.exchange_numbers().items()), factorial(n))


def complexity_from_beta(totals: HeightTotals, n: int) -> Fraction:
    return Fraction(sum(b - totals.alpha for b in totals.beta_by_entry.values()), factorial(n))


def is_uniform(z: DistributionVector) -> bool:
    shape = z.order.shape
    target, rem = divmod(factorial(shape.n), syt_count(shape))
    return rem == 0 and len(z.multiplicities) == syt_count(shape) and all(
        v == target for v in z.multiplicities.values()
    )
