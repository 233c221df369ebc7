from fractions import Fraction

import numpy as np
import pytest

from ap3.gfspace import GroupParams, PointSet, digits_to_index
from ap3.search import exhaustive_min, local_min, size_floor, structure_report
from ap3 import subspace as sub


class TestSizeFloor:
    def test_values(self):
        assert size_floor(4 / 9, 9) == 4
        assert size_floor(1.0, 9) == 9
        assert size_floor(0.01, 9) == 1

    def test_exact_fraction_no_overshoot(self):
        # 3/9 * 9 must give exactly 3 despite float representation
        assert size_floor(3 / 9, 9) == 3
        assert size_floor(1 / 3, 27) == 9

    def test_rejects(self):
        with pytest.raises(ValueError):
            size_floor(0.0, 9)
        with pytest.raises(ValueError):
            size_floor(1.5, 9)


class TestExhaustive:
    def test_single_point(self):
        r = exhaustive_min(GroupParams(3, 1), 0.1)
        assert r.best_set.members == (0,)
        assert r.count == 1
        assert r.lambda3 == Fraction(1, 9)

    def test_cap_witness_f3_2(self):
        # alpha = 4/9: the 4-point cap has only trivial triples
        r = exhaustive_min(GroupParams(3, 2), 4 / 9)
        assert r.count == 4
        assert r.lambda3 == Fraction(4, 81)
        from ap3.apcount import t3_nontrivial

        assert t3_nontrivial(r.best_set) == 0
        assert len(r.best_set) == 4

    def test_lex_tiebreak(self):
        r = exhaustive_min(GroupParams(3, 1), 1 / 3)
        assert r.best_set.members == (0,)

    def test_full_domain(self):
        r = exhaustive_min(GroupParams(3, 2), 1.0)
        assert r.count == 81
        assert r.lambda3 == 1

    def test_domain_too_big(self):
        with pytest.raises(ValueError, match="exceeds"):
            exhaustive_min(GroupParams(3, 3), 0.5)


class TestLocal:
    def test_reproducible(self):
        params = GroupParams(3, 2)
        a = local_min(params, 4 / 9, restarts=5, iters=20, seed=3)
        b = local_min(params, 4 / 9, restarts=5, iters=20, seed=3)
        assert a.best_set.members == b.best_set.members
        assert a.count == b.count

    def test_matches_exhaustive_count(self):
        params = GroupParams(3, 2)
        ex = exhaustive_min(params, 4 / 9)
        lo = local_min(params, 4 / 9, restarts=30, iters=50, seed=0)
        assert lo.count == ex.count

    def test_respects_floor(self):
        params = GroupParams(3, 2)
        r = local_min(params, 5 / 9, restarts=3, iters=10, seed=1)
        assert len(r.best_set) >= 5


class TestStructure:
    def test_subspace_itself(self):
        params = GroupParams(3, 3)
        w = sub.span(params, [[1, 0, 0], [0, 1, 0]])
        s = PointSet(params, tuple(int(i) for i in w.elements()))
        rep = structure_report(s, max_codim=1)
        assert rep.best_positive_dim.symmetric_difference == 0
        assert rep.best_positive_dim.W == w
        assert rep.best_positive_dim.A_reps == (0,)

    def test_coset_union(self):
        # two cosets of a line in F_3^2 are matched exactly at codim 1
        params = GroupParams(3, 2)
        w = sub.span(params, [[0, 1]])
        dec = sub.coset_decomposition(w)
        members = []
        for rep in dec.transversal[:2]:
            members.extend(int(i) for i in dec.coset_members(rep))
        rep = structure_report(PointSet(params, tuple(sorted(members))), max_codim=1)
        assert rep.best_positive_dim.symmetric_difference == 0
        assert rep.best_positive_dim.W == w

    def test_trivial_w_is_perfect(self):
        params = GroupParams(3, 2)
        s = PointSet(params, (0, 1, 5))
        rep = structure_report(s, max_codim=2)
        assert rep.symmetric_difference == 0
        assert rep.W.dim == 0

    def test_budget(self):
        with pytest.raises(ValueError, match="budget"):
            structure_report(PointSet(GroupParams(3, 3), (0,)), 2, max_subspaces=3)

    def test_normalization(self):
        params = GroupParams(3, 2)
        s = PointSet(params, (0, 1))
        rep = structure_report(s, max_codim=1)
        assert rep.best_positive_dim.normalized == pytest.approx(
            rep.best_positive_dim.symmetric_difference / 9
        )
