import math

import pytest

from hannerfaces.errors import BudgetExceededError, UsageError
from hannerfaces.phimap import compose_window
from hannerfaces.polys import IntPoly, eval_at_one, log2_int
from hannerfaces.recursion import Engine, face_numbers, run
from hannerfaces.schedule import DensityParam, StepKind
from hannerfaces.trees import (
    atypical_count_and_leaf_bound,
    build_lower_bound_tree,
    count_trees,
    enumerate_trees,
    internal_count,
    leaf_count,
    lower_bound_certificate,
    lower_bound_value,
    preorder_decode,
    preorder_encode,
    tree_sum_check,
    tree_weight,
    upper_bound_report,
)

S, R = StepKind.PRODUCT, StepKind.HULL

HALF = DensityParam.rational(1, 2)
THIRD = DensityParam.rational(1, 3)
TWO_THIRDS = DensityParam.rational(2, 3)

PHI_SR = compose_window((S, R))  # t x^4 + 2 x^2


class TestEnumeration:
    def test_height_zero(self):
        assert list(enumerate_trees(0, [])) == [()]
        assert count_trees(0, []) == 1

    def test_height_one(self):
        trees = list(enumerate_trees(1, {2, 4}))
        assert len(trees) == 2
        assert count_trees(1, {2, 4}) == 2

    def test_height_two(self):
        trees = list(enumerate_trees(2, {2, 4}))
        assert len(trees) == 20  # 2^2 + 2^4
        assert count_trees(2, {2, 4}) == 20
        assert len(set(trees)) == 20

    def test_budget_error(self):
        with pytest.raises(BudgetExceededError) as ei:
            list(enumerate_trees(2, {2, 4}, budget=7))
        assert ei.value.count == 7

    def test_all_leaves_at_uniform_height(self):
        def depths(t, d=0):
            if not t:
                yield d
            for c in t:
                yield from depths(c, d + 1)

        for t in enumerate_trees(3, {1, 2}):
            assert set(depths(t)) == {3}

    def test_per_level_supports(self):
        # root degree from {2,3,4}, next level from {2,4}: 4+8+16 trees
        assert count_trees(2, [{2, 3, 4}, {2, 4}]) == 28
        assert len(list(enumerate_trees(2, [{2, 3, 4}, {2, 4}]))) == 28


class TestTreeWeight:
    def test_single_leaf(self):
        assert tree_weight((), PHI_SR, 4) == IntPoly.one(4)

    def test_root_degree_four(self):
        t = ((), (), (), ())
        assert tree_weight(t, PHI_SR, 4).coeffs == (0, 1, 0, 0, 0)

    def test_root_degree_two(self):
        t = ((), ())
        assert tree_weight(t, PHI_SR, 4).coeffs == (2, 0, 0, 0, 0)

    def test_degree_outside_support(self):
        with pytest.raises(UsageError):
            tree_weight(((), (), ()), PHI_SR, 4)


class TestTreeSumCheck:
    def test_m_zero(self):
        res = tree_sum_check(HALF, 2, 0, 8)
        assert res.n_trees == 1
        assert res.total.coeffs[:2] == (2, 1)

    def test_m1_half(self):
        res = tree_sum_check(HALF, 2, 1, 8)
        assert res.n_trees == 2
        assert res.total.coeffs[:6] == (8, 24, 34, 24, 8, 1)

    def test_m2_half_matches_f4(self):
        res = tree_sum_check(HALF, 2, 2, 16)
        assert res.n_trees == 20
        assert res.match

    @pytest.mark.parametrize("a", [HALF, THIRD, TWO_THIRDS])
    @pytest.mark.parametrize("Qm", [(1, 1), (1, 2), (1, 3), (2, 1), (2, 2), (3, 1)])
    def test_identity_grid(self, a, Qm):
        Q, m = Qm
        res = tree_sum_check(a, Q, m, 16)
        assert res.match

    def test_varying_window_words(self):
        # a=1/3 with Q=2 has distinct consecutive window words; the
        # height-indexed weights must still reproduce the recursion.
        res = tree_sum_check(THIRD, 2, 2, 12)
        assert res.match


class TestAtypicalStats:
    def test_full_typical_tree(self):
        t, _, _ = build_lower_bound_tree(2, 1, 1, 3, 2)  # h=0: full binary
        stats = atypical_count_and_leaf_bound(t, PHI_SR)
        assert stats.qcount == 0
        assert stats.level_sizes == [1, 2, 4, 8]
        assert stats.level_recurrence_ok and stats.leaf_bound_ok

    def test_full_top_degree_tree(self):
        t = tuple(((), (), (), ()) for _ in range(4))  # full 4-ary, height 2
        stats = atypical_count_and_leaf_bound(t, PHI_SR)
        assert stats.qcount == (4**2 - 1) // (4 - 1)
        assert stats.leaves == 16
        assert stats.level_recurrence_ok and stats.leaf_bound_ok

    def test_leaf_count_identity(self):
        from hannerfaces.trees import iter_nodes

        for t in enumerate_trees(2, {2, 4}):
            hist_sum = sum(len(node) - 1 for node, _ in iter_nodes(t) if node)
            assert leaf_count(t) == 1 + hist_sum

    def test_level_identities(self):
        for t in enumerate_trees(2, {2, 3, 4}):
            stats = atypical_count_and_leaf_bound(t, compose_window((S, S, R)))
            assert stats.level_sizes[0] == 1
            assert stats.level_sizes[-1] == stats.leaves
            assert sum(stats.level_atypical) == stats.qcount


class TestPreorder:
    def test_single_leaf(self):
        assert preorder_encode((), [2, 4]) == (0,)

    def test_distinct_words(self):
        words = {preorder_encode(t, [2, 4]) for t in enumerate_trees(2, {2, 4})}
        assert len(words) == 20

    def test_round_trip(self):
        for t in enumerate_trees(3, {1, 2}):
            word = preorder_encode(t, [1, 2])
            assert preorder_decode(word, [1, 2]) == t

    def test_trailing_garbage(self):
        with pytest.raises(UsageError):
            preorder_decode((0, 0), [2])


class TestLowerBoundTree:
    def test_example_half(self):
        t, h, jstar = build_lower_bound_tree(2, 1, 1, 3, 8)
        assert h == 1 and jstar == 4
        assert len(t) == 4  # root degree 2^Q
        assert leaf_count(t) == 16
        assert all(len(c) == 2 for c in t)

    def test_precondition_m_too_small(self):
        with pytest.raises(UsageError):
            build_lower_bound_tree(2, 1, 1, 2, 32)

    def test_example_third(self):
        t, h, jstar = build_lower_bound_tree(3, 1, 3, 2, 48)
        assert h == 1
        assert leaf_count(t) == 16
        assert jstar == 24

    def test_k_below_two_lambda(self):
        with pytest.raises(UsageError):
            build_lower_bound_tree(2, 1, 3, 3, 5)


class TestLowerBoundCertificate:
    def test_half_m3_k8(self):
        cert = lower_bound_certificate(HALF, 2, 3, 8)
        assert cert.leaves == 16
        assert cert.bound_log2 == 8
        assert cert.jstar == 4 and cert.jstar * 2 <= 8
        assert cert.qcount <= 8
        assert cert.certified
        assert lower_bound_value(HALF, 2, 3, 8) == 256
        a68 = face_numbers(HALF, 6, 8, Engine.PAPER_EXACT)[8]
        assert a68 >= 256

    def test_weight_exponent_is_not_jstar(self):
        # The weight of T_m has t-degree lam * (#top-degree vertices), which
        # is strictly below jstar once h >= 1.
        cert = lower_bound_certificate(HALF, 2, 3, 8)
        assert cert.jweight == 1  # one degree-4 vertex (the root), lam = 1
        assert cert.jweight < cert.jstar
        assert cert.weight_coeff >= 1

    def test_minimal_height_bound_below_one(self):
        cert = lower_bound_certificate(THIRD, 3, 2, 8)
        assert cert.h == 0
        assert cert.bound_log2 < 0  # L = 4 < k = 8: bound 2^(L-k) <= 1, still valid
        assert lower_bound_value(THIRD, 3, 2, 8) == 0

    def test_third_m3_k48(self):
        # At this m the L > 2k precondition fails (L=32, 2k=96): the chain
        # is reported un-certified and the bound holds only trivially.
        cert = lower_bound_certificate(THIRD, 3, 3, 48)
        assert cert.leaves == 32
        assert not cert.leaves_exceed_2k
        assert not cert.certified
        log2_a = log2_int(face_numbers(THIRD, 9, 48, Engine.PAPER_EXACT)[48])
        assert cert.bound_log2 <= log2_a

    def test_chain_certifies_once_leaves_dominate(self):
        for m in (5, 6):
            cert = lower_bound_certificate(HALF, 2, m, 2**m)
            assert cert.leaves_exceed_2k and cert.certified


class TestAtypicalFilter:
    @pytest.mark.parametrize("k", [1, 2, 3])
    def test_high_qcount_trees_do_not_touch_low_coefficients(self, k):
        phi = PHI_SR
        kmax = k
        seg = IntPoly.from_coeffs([2, 1], kmax)
        from hannerfaces.polys import convolve_truncated, power_truncated

        full = IntPoly.zero(kmax)
        filtered = IntPoly.zero(kmax)
        for t in enumerate_trees(2, set(phi.support)):
            w = tree_weight(t, phi, kmax)
            term = convolve_truncated(w, power_truncated(seg, leaf_count(t)))
            full = full + term
            if atypical_count_and_leaf_bound(t, phi).qcount <= k:
                filtered = filtered + term
        assert full.coeffs[: k + 1] == filtered.coeffs[: k + 1]


class TestWeightMassBound:
    def test_log_weight_at_one_bounded_by_internal_count(self):
        # W(T)(1) <= (2^(2^Q))^(Int(T)) since every C_k(1) <= 2^(2^Q).
        for word in ((S, R), (R, R), (S, R, R)):
            phi = compose_window(word)
            cap = 2**phi.Q
            for t in enumerate_trees(2, set(phi.support), budget=10**5):
                w1 = eval_at_one(tree_weight(t, phi, 2 ** (phi.Q + 1)))
                assert log2_int(w1) <= cap * internal_count(t) + 1e-9

    def test_internal_at_most_leaves_minus_one(self):
        for t in enumerate_trees(2, {2, 4}):
            assert internal_count(t) <= leaf_count(t) - 1


class TestUpperBoundReport:
    def test_example_half(self):
        rep = upper_bound_report(HALF, 2, 3, 8)
        a68 = face_numbers(HALF, 6, 8, Engine.PAPER_EXACT)[8]
        assert rep.denominator == pytest.approx(8 * math.sqrt(8))
        assert rep.rho == pytest.approx(log2_int(a68) / (8 * math.sqrt(8)))

    def test_k_one(self):
        rep = upper_bound_report(HALF, 2, 2, 1)
        assert rep.denominator == pytest.approx(2.0 ** (2 * rep.p))

    def test_rho_envelope_across_m(self):
        rhos = [
            upper_bound_report(HALF, 2, m, max(1, int(math.isqrt(2 ** (2 * m))))).rho
            for m in range(2, 7)
        ]
        assert max(rhos) / min(rhos) < 16
