import math

import numpy as np
import pytest

from oclust.divergence import Distribution, Support, bernoulli, hellinger, hellinger2
from oclust.estimation import (
    Constants,
    inter_dist,
    intra_dist,
    membership,
    membership_scores,
    pooled_estimates,
    threshold_from_h,
)
from oclust.instance import Balanced, ExplicitSizes, SideInfo, generate, pair_index
from oclust.oracle import Oracle
from oclust.solver_mc import phase1

BIN = Support((0.0, 1.0))


def hand_side(n: int, pairs: dict[tuple[int, int], int]) -> SideInfo:
    tri = np.zeros(n * (n - 1) // 2, dtype=np.uint8)
    for (u, v), val in pairs.items():
        tri[pair_index(u, v, n)] = val
    return SideInfo(n, BIN, tri)


class TestConstants:
    def test_defaults(self):
        c = Constants()
        assert c.c == 118.0 and c.c_prime == 3.0
        assert c.b == pytest.approx(math.sqrt(118.0 / 3.0))
        assert c.b > 6.0

    def test_validation(self):
        with pytest.raises(ValueError):
            Constants(c=100.0, c_prime=3.0)  # c < 36 c'
        with pytest.raises(ValueError):
            Constants(c_prime=2.0)
        with pytest.raises(ValueError):
            Constants(scale=0.0)

    def test_scale_only_touches_size_thresholds(self):
        a, b = Constants(), Constants(scale=0.01)
        assert a.b == b.b
        assert b.effective_c == pytest.approx(1.18)


class TestInterDist:
    def test_single_member_point_mass(self):
        side = hand_side(3, {(0, 2): 1})
        assert inter_dist(2, [0], side).probs == (0.0, 1.0)

    def test_all_equal_point_mass(self):
        side = hand_side(4, {})  # all zeros
        assert inter_dist(3, [0, 1, 2], side).probs == (1.0, 0.0)

    def test_hand_counted_five_member_cluster(self):
        # v=5 against C={0..4} with entries (1,1,0,1,0) -> (0.4, 0.6)
        side = hand_side(6, {(0, 5): 1, (1, 5): 1, (3, 5): 1})
        d = inter_dist(5, [0, 1, 2, 3, 4], side)
        assert d.probs == (0.4, 0.6)

    def test_member_vertex_rejected(self):
        side = hand_side(3, {})
        with pytest.raises(ValueError):
            inter_dist(1, [0, 1], side)
        with pytest.raises(ValueError):
            inter_dist(1, [], side)


class TestIntraDist:
    def test_pair_cluster_point_mass(self):
        side = hand_side(3, {(0, 1): 1})
        assert intra_dist([0, 1], side).probs == (0.0, 1.0)

    def test_all_equal_point_mass(self):
        side = hand_side(4, {})
        assert intra_dist([0, 1, 2, 3], side).probs == (1.0, 0.0)

    def test_hand_counted_four_clique(self):
        # pair values (01,02,03,12,13,23) = (1,1,1,0,0,1) -> (1/3, 2/3)
        side = hand_side(4, {(0, 1): 1, (0, 2): 1, (0, 3): 1, (2, 3): 1})
        d = intra_dist([0, 1, 2, 3], side)
        assert d.probs_array == pytest.approx([1 / 3, 2 / 3], abs=1e-15)

    def test_needs_two_members(self):
        side = hand_side(3, {})
        with pytest.raises(ValueError):
            intra_dist([0], side)


class TestMembership:
    def test_zero_when_inter_matches_intra(self):
        side = hand_side(3, {(0, 1): 1, (0, 2): 1, (1, 2): 1})
        assert membership(2, [0, 1], side) == 0.0

    def test_minus_one_when_disjoint(self):
        side = hand_side(3, {(0, 1): 1})
        assert membership(2, [0, 1], side) == -1.0

    def test_composed_hand_value(self):
        # the two hand counts composed through hellinger2, frozen from the
        # Decimal oracle: -H^2((0.4, 0.6) || (1/3, 2/3))
        inter = Distribution(BIN, (0.4, 0.6))
        intra = Distribution(BIN, (1 / 3, 2 / 3))
        assert -hellinger2(inter, intra) == pytest.approx(
            -0.0023960962962133928, abs=1e-15
        )

    def test_matches_definition_on_real_cluster(self):
        side = hand_side(6, {(0, 1): 1, (0, 2): 1, (0, 3): 1, (2, 3): 1, (1, 5): 1})
        got = membership(5, [0, 1, 2, 3], side)
        want = -hellinger2(inter_dist(5, [0, 1, 2, 3], side), intra_dist([0, 1, 2, 3], side))
        assert got == want

    def test_permutation_invariance(self, rng):
        inst = generate(50, Balanced(3), bernoulli(0.8), bernoulli(0.2), seed=8)
        members = list(range(1, 20))
        base = membership(30, members, inst.side)
        for _ in range(5):
            rng.shuffle(members)
            assert membership(30, members, inst.side) == base

    def test_vectorized_scores_match_scalar(self):
        inst = generate(60, Balanced(4), bernoulli(0.7), bernoulli(0.3), seed=12)
        members = inst.truth[0]
        pool = np.array([v for v in range(60) if v not in members])
        fast = membership_scores(pool, members, inst.side)
        slow = [membership(int(v), members, inst.side) for v in pool]
        assert np.allclose(fast, slow, atol=1e-12)


class TestThreshold:
    def test_boundary_h_equals_one(self):
        consts = Constants()
        n = 2000  # large enough that the cap at n stays inactive
        assert threshold_from_h(1.0, consts, n) == math.ceil(118.0 * math.log(n))

    def test_nonincreasing_in_h(self):
        consts = Constants(scale=0.1)
        hs = np.linspace(0.05, 1.0, 40)
        ms = [threshold_from_h(float(h), consts, 5000) for h in hs]
        assert all(a >= b for a, b in zip(ms, ms[1:]))

    def test_capped_at_n(self):
        assert threshold_from_h(0.01, Constants(), 100) == 100

    def test_unbounded_cases(self):
        assert threshold_from_h(0.0, Constants(), 100) is None
        assert threshold_from_h(None, Constants(), 100) is None


class TestPooledEstimates:
    def test_single_pair_cluster(self):
        side = hand_side(4, {(0, 1): 1})
        est = pooled_estimates([[0, 1]], side, Constants(), n=4)
        assert est.p_plus is not None and est.p_plus.probs == (0.0, 1.0)
        assert est.p_minus is None
        assert est.m_threshold is None

    def test_two_singletons(self):
        side = hand_side(4, {(0, 1): 1})
        est = pooled_estimates([[0], [1]], side, Constants(), n=4)
        assert est.p_plus is None
        assert est.p_minus is not None and est.p_minus.probs == (0.0, 1.0)
        assert est.m_threshold is None

    def test_pool_counts(self):
        side = hand_side(5, {(0, 1): 1, (2, 3): 1, (0, 2): 1})
        est = pooled_estimates([[0, 1], [2, 3]], side, Constants(), n=5)
        assert est.n_intra_pairs == 2
        assert est.n_inter_pairs == 4
        assert est.p_plus.probs == (0.0, 1.0)
        assert est.p_minus.probs == (0.75, 0.25)

    def test_estimates_track_truth_after_phase1(self):
        fp, fm = bernoulli(0.8), bernoulli(0.2)
        inst = generate(1000, Balanced(4), fp, fm, seed=17)
        consts = Constants(scale=0.025)
        state = phase1(inst, Oracle(inst.labels), consts, np.random.default_rng(17))
        est = pooled_estimates(state.clustering.members, inst.side, consts, inst.n)
        assert est.h == pytest.approx(hellinger(fp, fm), abs=0.1)


class TestConcentration:
    def test_misordering_is_rare_at_the_sanov_size(self):
        # clusters of size ceil(32 ln n / H^2) at n = 1200 for
        # Bern(0.9)/Bern(0.1); small-trial version of the acceptance gate
        fp, fm = bernoulli(0.9), bernoulli(0.1)
        n_ref = 1200
        m = math.ceil(32.0 * math.log(n_ref) / hellinger2(fp, fm))
        trials, bad = 200, 0
        for t in range(trials):
            inst = generate(
                2 * m + 1, ExplicitSizes((m + 1, m)), fp, fm, seed=9000 + t
            )
            own = list(range(1, m + 1))
            other = list(range(m + 1, 2 * m + 1))
            if membership(0, other, inst.side) >= membership(0, own, inst.side):
                bad += 1
        assert bad / trials <= 0.01
