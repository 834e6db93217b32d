import json

import pytest
from hypothesis import given, strategies as st

from conftest import partitions_st
from oracles import naive_sort
from npslab import engine
from npslab.engine import (
    beta,
    check_swap_stability,
    check_trace,
    drop_records,
    find_active_cell,
    sort,
    step,
)
from npslab.errors import DomainError, InvalidCallError
from npslab.young import (
    Partition,
    Tableau,
    column_order,
    enumerate_syt,
    enumerate_tableaux,
    height,
    is_standard,
    partitions,
    row_order,
    strip_orders,
)

P21 = Partition((2, 1))
COL21 = column_order(P21)

# Input of the worked column-wise example on shape (3,3,1); recovered by
# searching all 7! fillings for the swap sequence (2,5)(2,6)(5,6)(1,7)(1,4)(3,4).
WORKED_INPUT = Tableau.from_rows([[4, 6, 5], [7, 3, 2], [1]])


def t21(a, b, c):
    return Tableau.from_rows([[a, b], [c]])


def as_dict(t: Tableau):
    return {tuple(c): v for c, v in t.entries.items()}


class TestActiveCell:
    def test_standard_has_none(self):
        assert find_active_cell(t21(1, 2, 3), COL21) is None

    def test_corner(self):
        assert find_active_cell(t21(2, 1, 3), COL21) == (1, 1)

    def test_inner_cell(self):
        p = Partition((3, 3, 1))
        # only (2,2) is out of order: 6 sits above-left of 5
        t = Tableau.from_rows([[1, 3, 4], [2, 6, 5], [7]])
        assert find_active_cell(t, column_order(p)) == (2, 2)

    def test_rejects_bad_order(self):
        with pytest.raises(DomainError):
            find_active_cell(t21(1, 2, 3), t21(2, 1, 3))
        with pytest.raises(DomainError):
            find_active_cell(t21(1, 2, 3), column_order(Partition((3,))))


class TestStep:
    def test_single_swap(self):
        t, tr = step(t21(2, 1, 3), COL21)
        assert t == t21(1, 2, 3)
        assert (tr.small, tr.large) == (1, 2)

    def test_min_neighbour(self):
        t, tr = step(t21(3, 2, 1), COL21)
        assert t == t21(1, 2, 3)
        assert (tr.small, tr.large) == (1, 3)

    def test_column(self):
        t, tr = step(Tableau.from_rows([[2], [1]]), column_order(Partition((1, 1))))
        assert t.rows == ((1,), (2,))
        assert (tr.small, tr.large) == (1, 2)

    def test_standard_raises(self):
        with pytest.raises(InvalidCallError):
            step(t21(1, 2, 3), COL21)


class TestSort:
    def test_standard_input(self):
        trace = sort(t21(1, 3, 2), COL21)
        assert trace.r == 0 and trace.steps == () and trace.result == t21(1, 3, 2)

    def test_hand_example(self):
        trace = sort(t21(2, 3, 1), COL21)
        assert trace.r == 1
        tr = trace.steps[0]
        assert (tr.small, tr.large, tr.x, tr.y) == (1, 2, (1, 1), (2, 1))
        assert trace.result.rows == ((1, 3), (2,))

    def test_total_steps_21(self):
        assert sum(sort(t, COL21).r for t in enumerate_tableaux(P21)) == 4

    def test_worked_example(self):
        p = Partition((3, 3, 1))
        u = column_order(p)
        trace = sort(WORKED_INPUT, u)
        assert [(tr.small, tr.large) for tr in trace.steps] == [(2, 5), (2, 6), (5, 6), (1, 7), (1, 4), (3, 4)]
        assert [trace.mu_at(s) for s in range(7, 0, -1)] == [0, 1, 1, 3, 3, 4, 6]
        assert trace.mu_at(8) == 0
        recs = drop_records(trace)
        assert [r.entry for r in recs] == [5, 6, 7, 4]
        assert [u[r.start_cell] for r in recs] == [6, 4, 2, 1]

    def test_json(self):
        data = json.loads(json.dumps(sort(t21(2, 3, 1), COL21).to_json()))
        assert data["steps"] == [{"i": 1, "a": 1, "b": 2, "x": [1, 1], "y": [2, 1]}]
        assert data["mu"] == [1, 0, 0, 0]
        assert data["result"]["rows"] == [[1, 3], [2]]

    def test_states(self):
        trace = sort(WORKED_INPUT, column_order(WORKED_INPUT.shape))
        states = list(trace.states())
        assert states[0] == WORKED_INPUT and states[-1] == trace.result
        assert len(states) == trace.r + 1

    def test_shape_mismatch(self):
        with pytest.raises(DomainError):
            sort(t21(1, 2, 3), column_order(Partition((3,))))

    def test_empty_and_single(self):
        e = Tableau(Partition(()), ())
        assert sort(e, e).r == 0
        one = Tableau.from_rows([[1]])
        assert sort(one, one).mu == (0, 0)


def _orders(p):
    return list(dict.fromkeys([column_order(p), row_order(p), *strip_orders(p)]))


@pytest.mark.parametrize("n", range(1, 6))
def test_matches_literal_rule(n):
    """The sliding implementation reproduces the scan-for-the-maximal-bad-cell rule exactly."""
    for p in partitions(n):
        orders = list(enumerate_syt(p)) if n <= 4 else _orders(p)
        for u in orders:
            udict = as_dict(u)
            for t in enumerate_tableaux(p):
                states, swaps, mu = naive_sort(p.parts, as_dict(t), udict)
                trace = sort(t, u)
                got = [(tr.small, tr.large, tuple(tr.x), tuple(tr.y)) for tr in trace.steps]
                assert got == swaps
                assert trace.mu == tuple(mu[s] for s in range(1, n + 2))
                assert as_dict(trace.result) == states[-1]


class TestDrops:
    def test_none_for_standard(self):
        assert drop_records(sort(t21(1, 2, 3), COL21)) == []

    def test_hand_example(self):
        (rec,) = drop_records(sort(t21(2, 3, 1), COL21))
        assert rec.entry == 2
        assert rec.drop_path == ((1, 1), (2, 1))
        assert rec.max_height == 1

    @given(partitions_st(max_n=10), st.randoms(use_true_random=False))
    def test_record_structure(self, p, rnd):
        vals = list(range(1, p.n + 1))
        rnd.shuffle(vals)
        t = Tableau.from_column_sequence(p, vals)
        for u in _orders(p)[:3]:
            trace = sort(t, u)
            recs = drop_records(trace)
            assert sum(len(r.drop_path) - 1 for r in recs) == trace.r
            for r in recs:
                hs = [height(c) for c in r.drop_path]
                assert hs == list(range(hs[0], hs[0] + len(hs)))
                assert r.max_height == hs[-1] == beta(trace, r.entry)


class TestBeta:
    def test_entry_one(self):
        t = t21(3, 2, 1)
        assert beta(sort(t, COL21), 1) == t.entry_height(1)

    def test_hand_example(self):
        assert beta(sort(t21(2, 3, 1), COL21), 2) == 1

    def test_standard(self):
        t = t21(1, 3, 2)
        trace = sort(t, COL21)
        assert [beta(trace, b) for b in (1, 2, 3)] == [t.entry_height(b) for b in (1, 2, 3)]

    def test_range(self):
        with pytest.raises(DomainError):
            beta(sort(t21(1, 2, 3), COL21), 4)


@pytest.mark.parametrize("n", range(1, 7))
def test_trace_invariants_exhaustive(n):
    for p in partitions(n):
        for u in _orders(p)[:4]:
            for t in enumerate_tableaux(p):
                trace = sort(t, u)
                check_trace(trace)
                assert (trace.r == 0) == is_standard(t)


@pytest.mark.parametrize("n", range(2, 6))
def test_swap_stability_exhaustive(n):
    for p in partitions(n):
        for u in _orders(p)[:3]:
            for t in enumerate_tableaux(p):
                for b in range(1, n):
                    check_swap_stability(t, u, b)


def test_swap_stability_rejects_bad_entry():
    with pytest.raises(DomainError):
        check_swap_stability(t21(1, 2, 3), COL21, 3)


def test_budget_guard(monkeypatch):
    lay = engine.layout(COL21)
    monkeypatch.setattr(lay, "budget", 0)
    with pytest.raises(engine.InvariantViolation):
        sort(t21(2, 3, 1), COL21)
    engine.layout.cache_clear()
