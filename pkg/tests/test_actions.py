import math

import numpy as np
import pytest

from finact import groups as gk
from finact.actions import (LeftDiscreteAction, LeftRightAction, LeftWordAction, TranslationAction,
                            make_builtin_action, sample_action, table_action, validate_pseudometric,
                            word_length)
from finact.exceptions import FamilyMismatch


def test_translation_window():
    Z = gk.Lattice(1)
    h = TranslationAction(Z)
    A = gk.symmetrize([Z.element(1)])           # 0, 1, -1
    sa = sample_action(h, A, [h.point(0)])
    expected = np.array([[abs(g.payload[0] - k.payload[0]) for k in A] for g in A], dtype=float)
    assert np.array_equal(sa.kappa, expected)
    assert set(sa.kappa.ravel()) == {0.0, 1.0, 2.0}


def test_left_discrete_window():
    F = gk.FreeGroup(2)
    A = gk.symmetrize(F.generators())
    sa = sample_action(LeftDiscreteAction(F), A, [F.identity()])
    assert np.array_equal(sa.kappa, 1 - np.eye(5))


def test_singleton_window():
    Z = gk.Lattice(1)
    h = TranslationAction(Z)
    sa = sample_action(h, [Z.identity()], [h.point(3)])
    assert sa.kappa.tolist() == [[0.0]]


def test_left_right_table():
    F = gk.FreeGroup(1)
    G = gk.ProductGroup(F, F)
    act = LeftRightAction(G, 3, [1])
    a = F.element([1])
    # phi_{(a, a^-1)}(x) = pi(a) + x - pi(a^-1) = x + 2 mod 3
    assert act.act(gk.pair(a, gk.inverse(a)), 0) == 2
    assert act.act(gk.pair(a, a), 1) == 1


def test_index_layout_row_major():
    Z = gk.Lattice(1)
    h = TranslationAction(Z)
    A = gk.symmetrize([Z.element(1)])
    X0 = [h.point(0), h.point(0.5)]
    sa = sample_action(h, A, X0)
    # (g=1, x=0.5) vs (h=-1, y=0): |1.5 - (-1)|
    assert sa.kappa[sa.index(1, 1), sa.index(2, 0)] == 2.5


def test_euclidean_dim2():
    Z2 = gk.Lattice(2)
    h = make_builtin_action({"kind": "translation"}, Z2)
    sa = sample_action(h, gk.symmetrize(Z2.generators()), [h.point([0, 0])])
    assert sa.kappa.max() == 2.0
    assert math.isclose(sa.kappa[1, 3], math.sqrt(2))


class TestValidate:
    def test_valid(self):
        Z = gk.Lattice(1)
        h = TranslationAction(Z)
        sa = sample_action(h, gk.product_set(gk.symmetrize([Z.element(1)]), 3), [h.point(0), h.point(0.3)])
        assert validate_pseudometric(sa.kappa).ok

    def test_triangle(self):
        K = np.array([[0, 5, 10], [5, 0, 1], [10, 1, 0]], dtype=float)
        rep = validate_pseudometric(K)
        assert (0, 1, 2) in rep.triangle and (2, 1, 0) in rep.triangle

    def test_negative(self):
        K = np.array([[0, -1], [-1, 0]], dtype=float)
        assert validate_pseudometric(K).negative

    def test_asymmetric_and_diagonal(self):
        K = np.array([[1, 2], [3, 0]], dtype=float)
        rep = validate_pseudometric(K)
        assert rep.asymmetric == [(0, 1)] and rep.nonzero_diagonal == [(0,)]


def test_left_invariance_of_builtins():
    F = gk.FreeGroup(2)
    handle = LeftWordAction(F, [1.0, 2.5])
    B = gk.product_set(gk.symmetrize(F.generators()), 2)
    x, y = F.element([1, 2]), F.element([-2])
    for k in B:
        for g in B[:6]:
            for h in B[:6]:
                lhs = handle.dist(handle.act(k * g, x), handle.act(k * h, y))
                assert lhs == handle.dist(handle.act(g, x), handle.act(h, y))


def test_sampling_deterministic():
    Z = gk.Lattice(2)
    h = TranslationAction(Z)
    A = gk.symmetrize(Z.generators())
    a = sample_action(h, A, [h.point([0, 0]), h.point([1, 0.5])])
    b = sample_action(h, A, [h.point([0, 0]), h.point([1, 0.5])])
    assert np.array_equal(a.kappa, b.kappa) and a.X0 == b.X0


def test_word_lengths():
    assert word_length(gk.FreeGroup(2), gk.free_word([1, -2, -2]), [1, 3]) == 7
    assert word_length(gk.CyclicGroup(7), gk.cyclic_residue(5, 7)) == 2
    S3 = gk.PermGroup(3, [[1, 0, 2], [0, 2, 1]])
    assert word_length(S3, gk.permutation([2, 1, 0])) == 3


class TestTable:
    def setup_method(self):
        self.Z = gk.Lattice(1)

    def test_reorders_rows(self):
        A = [self.Z.element(-1), self.Z.element(0), self.Z.element(1)]
        K = [[0, 1, 2], [1, 0, 1], [2, 1, 0]]
        sa = table_action(self.Z, A, ["p"], K)
        assert [a.payload for a in sa.A] == [(0,), (1,), (-1,)]
        assert sa.kappa.tolist() == [[0, 1, 1], [1, 0, 2], [1, 2, 0]]

    def test_rationals(self):
        A = [self.Z.element(0), self.Z.element(1), self.Z.element(-1)]
        K = [[0, "1/3", "1/3"], ["1/3", 0, "2/3"], ["1/3", "2/3", 0]]
        sa = table_action(self.Z, A, ["p"], K)
        assert sa.kappa[1, 2] == 2 / 3

    def test_rejects_non_symmetric_A(self):
        with pytest.raises(ValueError):
            table_action(self.Z, [self.Z.element(0), self.Z.element(1)], ["p"], [[0, 1], [1, 0]])

    def test_rejects_non_pseudometric(self):
        A = [self.Z.element(0), self.Z.element(1), self.Z.element(-1)]
        with pytest.raises(ValueError):
            table_action(self.Z, A, ["p"], [[0, 1, 1], [1, 0, 5], [1, 5, 0]])


def test_unknown_kind():
    with pytest.raises(ValueError):
        make_builtin_action({"kind": "rotation"}, gk.Lattice(1))


def test_dimension_mismatch():
    with pytest.raises(FamilyMismatch):
        TranslationAction(gk.FreeGroup(1))
    with pytest.raises(ValueError):
        TranslationAction(gk.Lattice(2)).point([1.0])
