"""Always-exact solvers: the membership-guided Las Vegas algorithm and the
no-side-information baseline.

Both place a vertex in a cluster only on a +1 answer and open a singleton
only after querying every existing cluster, so the output always equals the
ground truth and per-vertex queries never exceed the number of clusters.
"""

from __future__ import annotations

import time
from typing import Optional

import numpy as np

from .clustering import ClusteringState, misassigned_count, partition_equal
from .estimation import hellinger2_rows, membership_scores
from .instance import Instance
from .oracle import Oracle, QueryLogger
from .report import RunReport


def run_baseline(
    instance: Instance,
    seed: int,
    query_log: Optional[QueryLogger] = None,
) -> tuple[ClusteringState, RunReport]:
    """One query per existing cluster, new cluster on all-negative answers.

    Processes vertices in seeded-random order; exact by construction and
    uses at most nk queries (exactly n-1 when k == 1).
    """
    t0 = time.perf_counter()
    n = instance.n
    oracle = Oracle(instance.labels, log=query_log)
    state = ClusteringState(n)
    rng = np.random.default_rng(seed)
    for v in rng.permutation(n):
        v = int(v)
        before = oracle.count
        placed = False
        for cid in range(state.num_clusters):
            if oracle.query(v, state.min_member[cid]) == 1:
                state.add(v, cid)
                placed = True
                break
        if not placed:
            state.new_cluster(v)
        assert oracle.count - before <= max(instance.k, 1)
    return state, _exact_report(
        "baseline", instance, seed, oracle, state, t0, {}
    )


class LvState:
    """Clusters in nonincreasing size order plus a staleness-aware cache of
    membership scores (a cluster's column is recomputed only after its size
    changed)."""

    def __init__(self, instance: Instance):
        n, q = instance.n, instance.q
        self.n = n
        self.q = q
        self.dense = instance.side.dense()
        self.clustering = ClusteringState(n)
        self.inter: list[np.ndarray] = []  # per cluster: (n, q) value counts
        self.intra: list[np.ndarray] = []  # per cluster: (q,) pair value counts
        self.scores: list[np.ndarray] = []  # per cluster: (n,) cached membership
        self.scored_at: list[int] = []  # cluster size when the column was cached

    def order(self) -> list[int]:
        """Cluster ids by nonincreasing size, ties toward earlier creation."""
        return sorted(
            range(self.clustering.num_clusters),
            key=lambda c: (-self.clustering.size(c), c),
        )

    def join(self, v: int, cid: int) -> None:
        members = self.clustering.members[cid]
        self.intra[cid] += np.bincount(
            self.dense[v, members].astype(np.int64), minlength=self.q
        )
        col = self.dense[:, v].astype(np.int64)
        self.inter[cid][np.arange(self.n), col] += 1.0
        self.clustering.add(v, cid)

    def open_singleton(self, v: int) -> int:
        cid = self.clustering.new_cluster(v)
        self.inter.append(np.zeros((self.n, self.q)))
        self.intra.append(np.zeros(self.q))
        self.scores.append(np.full(self.n, -np.inf))
        self.scored_at.append(1)
        col = self.dense[:, v].astype(np.int64)
        self.inter[cid][np.arange(self.n), col] += 1.0
        return cid

    def fresh_scores(self, cid: int) -> np.ndarray:
        size = self.clustering.size(cid)
        if self.scored_at[cid] != size:
            pairs = size * (size - 1) / 2
            p_c = self.intra[cid] / pairs
            self.scores[cid] = -hellinger2_rows(self.inter[cid], p_c)
            self.scored_at[cid] = size
        return self.scores[cid]


def run_lv(
    instance: Instance,
    seed: int,
    query_log: Optional[QueryLogger] = None,
    trace: Optional[list] = None,
    paranoid: bool = False,
) -> tuple[ClusteringState, RunReport]:
    """Las Vegas clustering: always exact, side information only steers which
    cluster gets queried first.

    Each round finds the smallest index j (in nonincreasing size order) such
    that some unclustered vertex has its best membership at cluster j, and
    queries that vertex against j; on a miss it works through dyadic size
    groups of the larger clusters (best-membership pick per group) and then
    exhausts the remaining clusters. ``trace``, when given, collects
    per-placement tuples (v, queries_used, recovered_true_cluster_size).
    ``paranoid`` revalidates every cached score against a scratch
    recomputation (tests only).
    """
    t0 = time.perf_counter()
    n = instance.n
    oracle = Oracle(instance.labels, log=query_log)
    lv = LvState(instance)
    clustering = lv.clustering
    # recovered-size accounting per true cluster, for trace consumers
    recovered = np.zeros(instance.k, dtype=np.int64)

    while clustering.num_unclustered > 0:
        pool = clustering.unclustered()
        order = lv.order()
        rankable = [c for c in order if clustering.size(c) >= 2]

        if not rankable:
            v = int(pool[0])
            used = _resolve_by_sweep(v, order, oracle, lv)
        else:
            cols = [lv.fresh_scores(c) for c in rankable]
            if paranoid:
                for c, col in zip(rankable, cols):
                    ref = membership_scores(pool, clustering.members[c], instance.side)
                    assert np.allclose(col[pool], ref, atol=1e-12)
            score_rows = np.stack(cols, axis=1)[pool]
            best = np.argmax(score_rows, axis=1)  # first max: larger cluster wins ties
            j = int(best.min())
            v = int(pool[np.flatnonzero(best == j)[0]])  # lowest id achieving j
            used = _resolve_ranked(
                v, j, order, rankable, score_rows[np.flatnonzero(best == j)[0]], oracle, lv
            )
        if trace is not None:
            trace.append((v, used, int(recovered[instance.labels[v]])))
        recovered[instance.labels[v]] += 1

    report = _exact_report("lv", instance, seed, oracle, lv.clustering, t0, {})
    return lv.clustering, report


def _resolve_ranked(
    v: int,
    j: int,
    order: list[int],
    rankable: list[int],
    v_scores: np.ndarray,
    oracle: Oracle,
    lv: LvState,
) -> int:
    """Query schedule for a membership-ranked vertex; returns queries used."""
    clustering = lv.clustering
    tried: set[int] = set()

    def ask(cid: int) -> bool:
        tried.add(cid)
        if oracle.query(v, clustering.min_member[cid]) == 1:
            lv.join(v, cid)
            return True
        return False

    used = 1
    if ask(order[j]):
        return used

    # dyadic size groups over the larger clusters order[0..j-1]: group i holds
    # sizes in (s1/2^i, s1/2^(i-1)]; probe the best-membership cluster of each
    if j > 0:
        s1 = clustering.size(order[0])
        groups: dict[int, list[int]] = {}
        for idx in range(j):
            i = (s1 // clustering.size(order[idx])).bit_length()
            groups.setdefault(i, []).append(idx)
        for i in sorted(groups):
            idx = max(groups[i], key=lambda t: (v_scores[t], -t))
            used += 1
            if ask(order[idx]):
                return used

    # still unresolved: sweep every untried cluster, then open a singleton
    for cid in order:
        if cid in tried:
            continue
        used += 1
        if ask(cid):
            return used
    lv.open_singleton(v)
    return used


def _resolve_by_sweep(v: int, order: list[int], oracle: Oracle, lv: LvState) -> int:
    """No cluster is big enough to rank; fall back to a plain sweep."""
    used = 0
    for cid in order:
        used += 1
        if oracle.query(v, lv.clustering.min_member[cid]) == 1:
            lv.join(v, cid)
            return used
    lv.open_singleton(v)
    return used


def _exact_report(
    algo: str,
    instance: Instance,
    seed: int,
    oracle: Oracle,
    state: ClusteringState,
    t0: float,
    constants: dict,
) -> RunReport:
    blocks = state.blocks()
    exact = partition_equal(blocks, instance.labels)
    assert exact, f"{algo} must recover the exact partition"
    assert oracle.count <= instance.n * max(instance.k, 1)
    mis = misassigned_count(blocks, instance.labels)
    return RunReport(
        algo=algo,
        fingerprint=instance.fingerprint(),
        n=instance.n,
        k=instance.k,
        seed=seed,
        queries=oracle.count,
        exact=exact,
        misassigned=mis,
        wall_ms=(time.perf_counter() - t0) * 1000.0,
        constants=constants,
        extras={"clusters_out": state.num_clusters},
    )
