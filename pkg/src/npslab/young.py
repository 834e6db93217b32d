"""Partitions, Young diagrams, tableaux and hook statistics.

All public interfaces use 1-based ``(row, col)`` cells in the English
convention. The canonical cell order of a shape is the column-wise order
``(i, j) < (k, l)`` iff ``j < l`` or ``j == l and i < k``; flat sequences of
entries (``Tableau.column_sequence``, ``enumerate_tableaux``) are read in that
order.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from math import comb, factorial, prod
from typing import Iterable, Iterator, Mapping, NamedTuple, Sequence

from npslab.errors import DomainError, InvariantViolation


class Cell(NamedTuple):
    row: int
    col: int


class CellStats(NamedTuple):
    arm: int
    leg: int
    coarm: int
    coleg: int
    hook: int
    height: int


class Neighbors(NamedTuple):
    minus: frozenset[Cell]
    plus: frozenset[Cell]


@dataclass(frozen=True)
class Partition:
    """An integer partition, stored without trailing zeros."""

    parts: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        parts = tuple(int(p) for p in self.parts)
        while parts and parts[-1] == 0:
            parts = parts[:-1]
        for i, p in enumerate(parts):
            if p <= 0:
                raise DomainError(f"partition parts must be positive: {parts}")
            if i and parts[i - 1] < p:
                raise DomainError(f"partition parts must be weakly decreasing: {parts}")
        object.__setattr__(self, "parts", parts)

    @classmethod
    def parse(cls, text: str) -> Partition:
        """Parse ``"5,4,2,1,1,1"``; an empty string (or ``"0"``) is the empty partition."""
        text = text.strip()
        if not text:
            return cls(())
        try:
            parts = tuple(int(tok) for tok in text.split(","))
        except ValueError as exc:
            raise DomainError(f"malformed partition string {text!r}") from exc
        return cls(parts)

    def __str__(self) -> str:
        return ",".join(map(str, self.parts))

    def __len__(self) -> int:
        return len(self.parts)

    def __iter__(self) -> Iterator[int]:
        return iter(self.parts)

    @property
    def n(self) -> int:
        return sum(self.parts)

    def __contains__(self, cell: object) -> bool:
        try:
            i, j = cell  # type: ignore[misc]
        except (TypeError, ValueError):
            return False
        return 1 <= i <= len(self.parts) and 1 <= j <= self.parts[i - 1]

    @cached_property
    def cells(self) -> tuple[Cell, ...]:
        """Cells in row-major (reading) order."""
        return tuple(Cell(i, j) for i, p in enumerate(self.parts, 1) for j in range(1, p + 1))

    @cached_property
    def column_cells(self) -> tuple[Cell, ...]:
        """Cells in the canonical column-wise order."""
        conj = conjugate(self)
        return tuple(Cell(i, j) for j, q in enumerate(conj.parts, 1) for i in range(1, q + 1))

    @cached_property
    def column_index(self) -> dict[Cell, int]:
        """0-based position of each cell in the column-wise order."""
        return {c: k for k, c in enumerate(self.column_cells)}

    def check_cell(self, x: Sequence[int]) -> Cell:
        if x not in self:
            raise DomainError(f"cell {tuple(x)} is not in shape {self.parts}")
        return Cell(*x)


def partitions(n: int) -> Iterator[Partition]:
    """All partitions of ``n`` in reverse lexicographic order, starting with ``(n)``."""

    def rec(remaining: int, largest: int) -> Iterator[tuple[int, ...]]:
        if remaining == 0:
            yield ()
            return
        for p in range(min(remaining, largest), 0, -1):
            for rest in rec(remaining - p, p):
                yield (p,) + rest

    for parts in rec(n, n):
        yield Partition(parts)


def conjugate(p: Partition) -> Partition:
    if not p.parts:
        return Partition(())
    return Partition(tuple(sum(1 for part in p.parts if part >= i) for i in range(1, p.parts[0] + 1)))


def cell_stats(p: Partition, x: Sequence[int]) -> CellStats:
    i, j = p.check_cell(x)
    conj = conjugate(p)
    arm = p.parts[i - 1] - j
    leg = conj.parts[j - 1] - i
    return CellStats(arm, leg, j - 1, i - 1, arm + leg + 1, i + j - 2)


def height(x: Sequence[int]) -> int:
    """Taxicab distance of a cell from the corner ``(1, 1)``."""
    return x[0] + x[1] - 2


def hook_lengths(p: Partition) -> dict[Cell, int]:
    conj = conjugate(p)
    return {c: p.parts[c.row - 1] - c.col + conj.parts[c.col - 1] - c.row + 1 for c in p.cells}


def neighbors(p: Partition, x: Sequence[int]) -> Neighbors:
    """Top/left (``minus``) and bottom/right (``plus``) neighbours of ``x`` inside ``p``."""
    i, j = p.check_cell(x)
    minus = frozenset(c for c in (Cell(i - 1, j), Cell(i, j - 1)) if c in p)
    plus = frozenset(c for c in (Cell(i + 1, j), Cell(i, j + 1)) if c in p)
    return Neighbors(minus, plus)


def dropping_zone(p: Partition, x: Sequence[int]) -> frozenset[Cell]:
    i, j = p.check_cell(x)
    return frozenset(c for c in p.cells if c.row >= i and c.col >= j)


@dataclass(frozen=True)
class Tableau:
    """A bijective filling of a shape with ``1..n``.

    ``rows`` is the ragged row-major array of entries; ``shape`` is inferred
    from it when built via :meth:`from_rows`.
    """

    shape: Partition
    rows: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        rows = tuple(tuple(int(v) for v in r) for r in self.rows)
        if tuple(len(r) for r in rows) != self.shape.parts:
            raise DomainError(f"row lengths {[len(r) for r in rows]} do not match shape {self.shape.parts}")
        values = sorted(v for r in rows for v in r)
        if values != list(range(1, self.shape.n + 1)):
            raise DomainError(f"entries are not a bijection onto 1..{self.shape.n}: {rows}")
        object.__setattr__(self, "rows", rows)

    @classmethod
    def from_rows(cls, rows: Iterable[Iterable[int]]) -> Tableau:
        rows = tuple(tuple(r) for r in rows)
        try:
            shape = Partition(tuple(len(r) for r in rows))
        except DomainError as exc:
            raise DomainError(f"rows do not form a Young diagram: {rows}") from exc
        return cls(shape, rows)

    @classmethod
    def from_column_sequence(cls, shape: Partition, values: Sequence[int]) -> Tableau:
        """Build from entries listed in the canonical column-wise cell order."""
        if len(values) != shape.n:
            raise DomainError(f"expected {shape.n} entries, got {len(values)}")
        rows = [[0] * p for p in shape.parts]
        for (i, j), v in zip(shape.column_cells, values):
            rows[i - 1][j - 1] = v
        return cls(shape, tuple(map(tuple, rows)))

    @classmethod
    def from_mapping(cls, shape: Partition, entries: Mapping[Sequence[int], int]) -> Tableau:
        return cls(shape, tuple(tuple(entries[(i, j)] for j in range(1, p + 1)) for i, p in enumerate(shape.parts, 1)))

    @property
    def n(self) -> int:
        return self.shape.n

    def __getitem__(self, x: Sequence[int]) -> int:
        i, j = x
        if (i, j) not in self.shape:
            raise DomainError(f"cell {(i, j)} is not in shape {self.shape.parts}")
        return self.rows[i - 1][j - 1]

    @cached_property
    def entries(self) -> dict[Cell, int]:
        return {c: self.rows[c.row - 1][c.col - 1] for c in self.shape.cells}

    @cached_property
    def _positions(self) -> dict[int, Cell]:
        return {v: c for c, v in self.entries.items()}

    def position(self, entry: int) -> Cell:
        """Cell holding ``entry``."""
        try:
            return self._positions[entry]
        except KeyError:
            raise DomainError(f"entry {entry} not in 1..{self.n}") from None

    def entry_height(self, entry: int) -> int:
        return height(self.position(entry))

    def column_sequence(self) -> tuple[int, ...]:
        return tuple(self.rows[i - 1][j - 1] for i, j in self.shape.column_cells)

    def cells_in_order(self) -> tuple[Cell, ...]:
        """Cells sorted by their entry, i.e. ``x_1 < x_2 < ... < x_n`` in the induced order."""
        return tuple(self._positions[v] for v in range(1, self.n + 1))

    def to_json(self) -> dict:
        return {"shape": list(self.shape.parts), "rows": [list(r) for r in self.rows]}

    @classmethod
    def from_json(cls, data: Mapping | str) -> Tableau:
        if isinstance(data, str):
            try:
                data = json.loads(data)
            except json.JSONDecodeError as exc:
                raise DomainError(f"malformed tableau JSON: {exc}") from exc
        try:
            rows = data["rows"]
        except (KeyError, TypeError) as exc:
            raise DomainError("tableau JSON needs a 'rows' array") from exc
        t = cls.from_rows(rows)
        if "shape" in data and Partition(tuple(data["shape"])) != t.shape:
            raise DomainError(f"declared shape {data['shape']} does not match rows")
        return t

    def __str__(self) -> str:
        width = len(str(self.n))
        return "\n".join(" ".join(str(v).rjust(width) for v in r) for r in self.rows)


@dataclass(frozen=True)
class HookFunction:
    """A map ``H`` on the cells of a shape with ``-leg(x) <= H(x) <= arm(x)``."""

    shape: Partition
    values: Mapping[Cell, int] = field(hash=False)

    def __post_init__(self) -> None:
        if set(self.values) != set(self.shape.cells):
            raise DomainError("hook function must assign a value to every cell")
        for c, v in self.values.items():
            st = cell_stats(self.shape, c)
            if not -st.leg <= v <= st.arm:
                raise DomainError(f"H{tuple(c)} = {v} outside [-{st.leg}, {st.arm}]")


def is_ordered_on(t: Tableau, cells: Iterable[Sequence[int]]) -> bool:
    p = t.shape
    for x in cells:
        plus = neighbors(p, x).plus
        if plus and t[x] > min(t[y] for y in plus):
            return False
    return True


def is_standard(t: Tableau) -> bool:
    for r, row in enumerate(t.rows):
        below = t.rows[r + 1] if r + 1 < len(t.rows) else ()
        for c, v in enumerate(row):
            if c + 1 < len(row) and v > row[c + 1]:
                return False
            if c < len(below) and v > below[c]:
                return False
    return True


def syt_count(p: Partition) -> int:
    """Number of standard tableaux by the hook-length formula."""
    return factorial(p.n) // count_hook_functions(p)


def count_hook_functions(p: Partition) -> int:
    return prod(hook_lengths(p).values())


def enumerate_tableaux(p: Partition) -> Iterator[Tableau]:
    """All ``n!`` fillings, lexicographic in their column-wise entry sequence."""
    for perm in itertools.permutations(range(1, p.n + 1)):
        yield Tableau.from_column_sequence(p, perm)


def enumerate_syt(p: Partition) -> Iterator[Tableau]:
    """Standard tableaux of shape ``p``.

    Entries ``1..n`` are placed one at a time into addable corners, trying the
    topmost row first, so the output order is deterministic.
    """
    n = p.n
    lengths = [0] * len(p.parts)
    rows: list[list[int]] = [[] for _ in p.parts]

    def rec(v: int) -> Iterator[Tableau]:
        if v > n:
            yield Tableau(p, tuple(map(tuple, rows)))
            return
        for i, part in enumerate(p.parts):
            if lengths[i] < part and (i == 0 or lengths[i - 1] > lengths[i]):
                lengths[i] += 1
                rows[i].append(v)
                yield from rec(v + 1)
                rows[i].pop()
                lengths[i] -= 1

    yield from rec(1)


def column_order(p: Partition) -> Tableau:
    """The tableau numbering cells down each column, left to right."""
    return Tableau.from_column_sequence(p, range(1, p.n + 1))


def row_order(p: Partition) -> Tableau:
    """The tableau numbering cells along each row, top to bottom."""
    rows, start = [], 1
    for part in p.parts:
        rows.append(tuple(range(start, start + part)))
        start += part
    return Tableau(p, tuple(rows))


class Strip(str, Enum):
    ROW = "R"
    COLUMN = "C"


def strip_order(p: Partition, choices: Iterable[Strip | str]) -> Tableau:
    """Greedy strip filling.

    Each choice fills either the top row that still has empty cells, or the
    leftmost such column, with the next consecutive entries. Choices left over
    once the shape is full are ignored.
    """
    conj = conjugate(p)
    rows = [[0] * part for part in p.parts]
    done_rows = done_cols = 0
    nxt = 1

    def remaining() -> bool:
        return done_rows < len(p.parts) and p.parts[done_rows] > done_cols

    for choice in choices:
        if not remaining():
            break
        choice = Strip(choice)
        if choice is Strip.ROW:
            for j in range(done_cols, p.parts[done_rows]):
                rows[done_rows][j] = nxt
                nxt += 1
            done_rows += 1
        else:
            for i in range(done_rows, conj.parts[done_cols]):
                rows[i][done_cols] = nxt
                nxt += 1
            done_cols += 1
    if remaining():
        raise DomainError(f"choice sequence too short to fill shape {p.parts}")
    return Tableau(p, tuple(map(tuple, rows)))


def strip_orders(p: Partition) -> list[Tableau]:
    """Every distinct tableau reachable by :func:`strip_order`, in first-seen order.

    Choice sequences are explored depth-first with ``R`` before ``C``.
    """
    seen: dict[Tableau, None] = {}

    def rec(done_rows: int, done_cols: int, choices: list[Strip]) -> None:
        if done_rows >= len(p.parts) or p.parts[done_rows] <= done_cols:
            seen.setdefault(strip_order(p, choices), None)
            return
        rec(done_rows + 1, done_cols, choices + [Strip.ROW])
        rec(done_rows, done_cols + 1, choices + [Strip.COLUMN])

    rec(0, 0, [])
    return list(seen)


def parse_strip(spec: str) -> list[Strip]:
    spec = spec.strip().upper()
    if not spec or set(spec) - {"R", "C"}:
        raise DomainError(f"strip spec must be a non-empty string of R and C: {spec!r}")
    return [Strip(ch) for ch in spec]


def conjugate_tableau(u: Tableau) -> Tableau:
    conj = conjugate(u.shape)
    return Tableau(conj, tuple(tuple(u.rows[i][j] for i in range(q)) for j, q in enumerate(conj.parts)))


def alpha(p: Partition) -> int:
    """Total initial height of any entry summed over all fillings.

    Evaluated three ways (heights, hook lengths, row lengths); they must agree.
    """
    n = p.n
    if n == 0:
        raise DomainError("alpha is undefined for the empty partition")
    f = factorial(n - 1)
    by_height = f * sum(height(c) for c in p.cells)
    by_hooks = f * (sum(hook_lengths(p).values()) - n)
    by_rows = f * sum(comb(part, 2) + i * part for i, part in enumerate(p.parts))
    if not by_height == by_hooks == by_rows:
        raise InvariantViolation(f"alpha formulas disagree: {by_height}, {by_hooks}, {by_rows}")
    return by_height
