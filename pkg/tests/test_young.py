import json
from math import factorial

import pytest
from hypothesis import given, settings, strategies as st

from conftest import partitions_st
from oracles import brute_hook_functions, brute_syt
from npslab.errors import DomainError
from npslab.young import (
    Cell,
    HookFunction,
    Partition,
    Strip,
    Tableau,
    alpha,
    cell_stats,
    column_order,
    conjugate,
    conjugate_tableau,
    count_hook_functions,
    dropping_zone,
    enumerate_syt,
    enumerate_tableaux,
    is_ordered_on,
    is_standard,
    neighbors,
    parse_strip,
    partitions,
    row_order,
    strip_order,
    strip_orders,
    syt_count,
)

HOOK_SHAPE = Partition((5, 4, 2, 1, 1, 1))

# A 130-cell strip order, row by row.
STRIP_ROWS = [
    list(range(1, 17)),
    [17, 26, 35, *range(44, 56)],
    [18, 27, 36, *range(56, 67)],
    [19, 28, 37, 67, *range(74, 84)],
    [20, 29, 38, 68, *range(84, 94)],
    [21, 30, 39, 69, *range(94, 104)],
    [22, 31, 40, 70, 104, 108, 111, *range(114, 120)],
    [23, 32, 41, 71, 105, 109, 112, *range(120, 126)],
    [24, 33, 42, 72, 106, 110, 113, *range(126, 131)],
    [25, 34, 43, 73, 107],
]


def t21(a, b, c):
    """Tableau of shape (2,1) from (T(1,1), T(1,2), T(2,1))."""
    return Tableau.from_rows([[a, b], [c]])


class TestPartition:
    def test_parse_roundtrip(self):
        assert Partition.parse("5,4,2,1,1,1") == HOOK_SHAPE
        assert str(HOOK_SHAPE) == "5,4,2,1,1,1"
        assert Partition.parse("") == Partition(())
        assert Partition((3, 1, 0, 0)).parts == (3, 1)

    @pytest.mark.parametrize("bad", ["2,3", "1,-1", "a,b", "3,,1"])
    def test_parse_rejects(self, bad):
        with pytest.raises(DomainError):
            Partition.parse(bad)

    def test_partitions_counts(self):
        assert [sum(1 for _ in partitions(n)) for n in range(9)] == [1, 1, 2, 3, 5, 7, 11, 15, 22]

    def test_column_cells(self):
        assert Partition((2, 1)).column_cells == ((1, 1), (2, 1), (1, 2))


class TestConjugate:
    def test_reference_shape(self):
        assert conjugate(HOOK_SHAPE) == Partition((6, 3, 2, 2, 1))

    def test_empty(self):
        assert conjugate(Partition(())) == Partition(())

    @pytest.mark.parametrize("n", [1, 4, 7])
    def test_row_to_column(self, n):
        assert conjugate(Partition((n,))) == Partition((1,) * n)

    @given(partitions_st(min_n=0, max_n=12))
    def test_involution(self, p):
        assert conjugate(conjugate(p)) == p


class TestCellStats:
    def test_reference_shape(self):
        st_ = cell_stats(HOOK_SHAPE, (2, 3))
        assert (st_.arm, st_.leg, st_.coarm, st_.coleg) == (1, 0, 2, 1)

    def test_corner_height(self):
        assert cell_stats(HOOK_SHAPE, (1, 1)).height == 0

    def test_hooks_21(self):
        p = Partition((2, 1))
        assert [cell_stats(p, c).hook for c in [(1, 1), (1, 2), (2, 1)]] == [3, 1, 1]

    def test_outside(self):
        with pytest.raises(DomainError):
            cell_stats(Partition((2, 1)), (2, 2))

    @given(partitions_st(max_n=12))
    def test_identities(self, p):
        for c in p.cells:
            s = cell_stats(p, c)
            assert s.hook == s.arm + s.leg + 1
            assert s.height == s.coarm + s.coleg
            assert s.arm + s.coarm + 1 == p.parts[c.row - 1]


class TestNeighbors:
    def test_reference_shape(self):
        nb = neighbors(HOOK_SHAPE, (2, 3))
        assert nb.minus == {(1, 3), (2, 2)}
        assert nb.plus == {(2, 4)}

    def test_corner(self):
        nb = neighbors(Partition((2, 1)), (1, 1))
        assert nb.minus == set() and nb.plus == {(2, 1), (1, 2)}

    def test_row_end(self):
        assert neighbors(Partition((5,)), (1, 5)).plus == set()

    def test_outside(self):
        with pytest.raises(DomainError):
            neighbors(Partition((1,)), (1, 2))


class TestDroppingZone:
    def test_examples(self):
        p = Partition((2, 1))
        assert dropping_zone(p, (1, 1)) == set(p.cells)
        assert dropping_zone(p, (2, 1)) == {(2, 1)}
        assert dropping_zone(Partition((3, 3, 1)), (2, 2)) == {(2, 2), (2, 3)}

    def test_outside(self):
        with pytest.raises(DomainError):
            dropping_zone(Partition((2, 1)), (3, 1))


class TestTableau:
    def test_bijection_enforced(self):
        with pytest.raises(DomainError):
            Tableau.from_rows([[1, 1], [2]])
        with pytest.raises(DomainError):
            Tableau.from_rows([[1], [2, 3]])

    def test_json_roundtrip(self):
        t = t21(2, 3, 1)
        data = json.loads(json.dumps(t.to_json()))
        assert data == {"shape": [2, 1], "rows": [[2, 3], [1]]}
        assert Tableau.from_json(data) == t

    def test_json_shape_mismatch(self):
        with pytest.raises(DomainError):
            Tableau.from_json({"shape": [3], "rows": [[2, 3], [1]]})

    def test_column_sequence(self):
        t = t21(2, 3, 1)
        assert t.column_sequence() == (2, 1, 3)
        assert Tableau.from_column_sequence(t.shape, (2, 1, 3)) == t


class TestOrdered:
    def test_examples(self):
        assert is_ordered_on(t21(1, 2, 3), Partition((2, 1)).cells)
        assert is_ordered_on(t21(3, 2, 1), [])
        assert not is_ordered_on(t21(2, 1, 3), [(1, 1)])

    def test_standard_examples(self):
        assert is_standard(t21(1, 2, 3))
        assert not is_standard(t21(2, 1, 3))
        assert is_standard(Tableau.from_rows([[1, 4, 6], [2, 5, 7], [3]]))

    @given(partitions_st(max_n=7), st.randoms(use_true_random=False))
    def test_standard_iff_ordered_everywhere(self, p, rnd):
        values = list(range(1, p.n + 1))
        rnd.shuffle(values)
        t = Tableau.from_column_sequence(p, values)
        assert is_standard(t) == is_ordered_on(t, p.cells)


class TestCounting:
    @pytest.mark.parametrize("parts, expected", [((2, 1), 2), ((4,), 1), ((3, 3, 1), 21)])
    def test_syt_count(self, parts, expected):
        p = Partition(parts)
        assert len(brute_syt(parts)) == expected
        assert syt_count(p) == expected

    @pytest.mark.parametrize("parts", [(2, 1), (1,), (3,), (2, 2), (3, 1, 1)])
    def test_hook_functions(self, parts):
        assert count_hook_functions(Partition(parts)) == brute_hook_functions(parts)

    def test_hook_functions_row(self):
        assert count_hook_functions(Partition((6,))) == factorial(6)

    def test_hook_function_bounds(self):
        p = Partition((2, 1))
        HookFunction(p, {Cell(1, 1): -1, Cell(1, 2): 0, Cell(2, 1): 0})
        with pytest.raises(DomainError):
            HookFunction(p, {Cell(1, 1): 2, Cell(1, 2): 0, Cell(2, 1): 0})

    def test_exact_integers_beyond_64_bit(self):
        p = Partition((7, 6, 5, 4))
        assert syt_count(p) * count_hook_functions(p) == factorial(22)


class TestEnumeration:
    def test_all_fillings(self):
        assert len(list(enumerate_tableaux(Partition((2, 1))))) == 6
        assert list(enumerate_tableaux(Partition(()))) == [Tableau(Partition(()), ())]
        fillings = list(enumerate_tableaux(Partition((2, 2))))
        assert len(fillings) == 24 == len(set(fillings))

    def test_lexicographic_column_order(self):
        seqs = [t.column_sequence() for t in enumerate_tableaux(Partition((2, 1)))]
        assert seqs == sorted(seqs)

    def test_syt(self):
        assert len(list(enumerate_syt(Partition((2, 1))))) == 2
        assert list(enumerate_syt(Partition((4,)))) == [Tableau.from_rows([[1, 2, 3, 4]])]
        assert len(list(enumerate_syt(Partition((2, 2))))) == 2
        assert len(list(enumerate_syt(Partition(())))) == 1

    @pytest.mark.parametrize("n", range(1, 9))
    def test_syt_enumeration_matches_formula(self, n):
        for p in partitions(n):
            syts = list(enumerate_syt(p))
            assert len(syts) == len(set(syts)) == syt_count(p)
            assert all(is_standard(t) for t in syts)


class TestOrders:
    def test_canonical_orders(self):
        p = Partition((3, 3, 1))
        assert column_order(p).rows == ((1, 4, 6), (2, 5, 7), (3,))
        assert row_order(p).rows == ((1, 2, 3), (4, 5, 6), (7,))

    def test_single_row(self):
        p = Partition((5,))
        assert column_order(p) == row_order(p) == Tableau.from_rows([[1, 2, 3, 4, 5]])

    def test_strip_degenerate(self):
        p = Partition((3, 3, 1))
        assert strip_order(p, "CCC") == column_order(p)
        assert strip_order(p, [Strip.ROW] * 3) == row_order(p)
        assert strip_order(p, "RRRCCC") == row_order(p)

    def test_long_strip_sequence(self):
        u = Tableau.from_rows(STRIP_ROWS)
        assert u.n == 130 and is_standard(u)
        assert strip_order(u.shape, "RCCCRRCRRRCCCRRR") == u

    def test_strip_too_short(self):
        with pytest.raises(DomainError):
            strip_order(Partition((2, 2)), "R")

    def test_parse_strip(self):
        assert parse_strip("rc") == [Strip.ROW, Strip.COLUMN]
        with pytest.raises(DomainError):
            parse_strip("RX")

    @given(partitions_st(max_n=12), st.lists(st.sampled_from("RC"), min_size=24, max_size=24))
    def test_strip_always_standard(self, p, choices):
        assert is_standard(strip_order(p, choices))

    def test_strip_orders_distinct(self):
        p = Partition((3, 2))
        orders = strip_orders(p)
        assert len(orders) == len(set(orders))
        assert column_order(p) in orders and row_order(p) in orders

    def test_conjugate_tableau(self):
        lam = Partition((4, 2, 1))
        assert conjugate_tableau(row_order(lam)) == column_order(conjugate(lam))
        single = Tableau.from_rows([[1]])
        assert conjugate_tableau(single) == single
        assert conjugate_tableau(t21(1, 2, 3)).rows == ((1, 3), (2,))

    @given(partitions_st(max_n=9))
    @settings(max_examples=50)
    def test_conjugate_tableau_involution_on_syt(self, p):
        for u in list(enumerate_syt(p))[:20]:
            v = conjugate_tableau(u)
            assert is_standard(v) and v.shape == conjugate(p)
            assert conjugate_tableau(v) == u


class TestAlpha:
    def test_examples(self):
        assert alpha(Partition((2, 1))) == 4
        assert alpha(Partition((1,))) == 0
        assert alpha(Partition((3,))) == 6

    def test_empty(self):
        with pytest.raises(DomainError):
            alpha(Partition(()))

    @given(partitions_st(max_n=15))
    def test_formulas_agree(self, p):
        # alpha itself raises on disagreement
        alpha(p)
        hooks = sum(cell_stats(p, c).hook for c in p.cells)
        heights = sum(cell_stats(p, c).height for c in p.cells)
        assert hooks - p.n == heights

    def test_direct_sum_over_fillings(self):
        p = Partition((3, 1))
        total = sum(t.entry_height(2) for t in enumerate_tableaux(p))
        assert total == alpha(p)
