"""The parameter-free three-phase Monte Carlo solver.

Phase 1 seeds clusters by querying random vertices until one cluster reaches
ceil(scale * C * log n). Phase 2 alternates re-estimating the pooled
empirical distributions (and the size threshold they imply) with clustering
one more random vertex by queries. Phase 3 processes each grown cluster:
vertices whose membership clears the upper band join for free, vertices in
the uncertainty band are resolved by queries, and the cluster is then
retired. Control returns to phase 2 until every vertex is placed.
"""

from __future__ import annotations

import math
import time
from typing import Optional

import numpy as np

from .clustering import ClusteringState, misassigned_count, partition_equal
from .divergence import Distribution, hellinger
from .estimation import Constants, Estimates, membership_scores, threshold_from_h
from .instance import Instance
from .oracle import Oracle, QueryLogger
from .report import RunReport

BAND_MODES = ("lemma", "text")


class _Pool:
    """Unclustered ids with O(1) uniform pop and O(1) targeted removal."""

    def __init__(self, ids):
        self.items = list(ids)
        self.pos = {v: i for i, v in enumerate(self.items)}

    def __len__(self):
        return len(self.items)

    def pop_random(self, rng) -> int:
        i = int(rng.integers(len(self.items)))
        return self._pop_at(i)

    def remove(self, v: int) -> None:
        self._pop_at(self.pos[v])

    def _pop_at(self, i: int) -> int:
        items = self.items
        v = items[i]
        last = items.pop()
        if last != v:
            items[i] = last
            self.pos[last] = i
        del self.pos[v]
        return v

    def snapshot(self) -> np.ndarray:
        return np.array(sorted(self.items), dtype=np.int64)


class McState:
    """Mutable run state: the partial clustering, current estimates, the
    waiting lists, and the set of clusters already processed in phase 3."""

    def __init__(self, instance: Instance, rng: np.random.Generator):
        self.clustering = ClusteringState(instance.n)
        self.phase = "init"
        self.estimates: Optional[Estimates] = None
        self.waiting: dict[int, list[int]] = {}
        self.grown_done: set[int] = set()
        self.rng = rng
        self.pool = _Pool(range(instance.n))
        self.dense = instance.side.dense()
        self.q = instance.q
        # pooled pair-value counts over everything clustered so far
        self.intra_counts = np.zeros(instance.q, dtype=np.int64)
        self.inter_counts = np.zeros(instance.q, dtype=np.int64)
        self.n_intra = 0
        self.n_inter = 0
        self.clustered: list[int] = []
        # bookkeeping for reports and invariants
        self.placement = ["?"] * instance.n
        self.q_phase = {"phase1": 0, "phase2": 0, "phase3": 0}
        self.vertices_phase = {"phase1": 0, "phase2": 0}
        self.waiting_total = 0
        self.max_clusters_seen = 0

    def join(self, v: int, cid: int, how: str) -> None:
        members = self.clustering.members[cid]
        row = self.dense[v]
        cnt_c = np.bincount(row[members].astype(np.int64), minlength=self.q)
        cnt_all = np.bincount(
            row[self.clustered].astype(np.int64), minlength=self.q
        )
        self.intra_counts += cnt_c
        self.inter_counts += cnt_all - cnt_c
        self.n_intra += len(members)
        self.n_inter += len(self.clustered) - len(members)
        self.clustering.add(v, cid)
        self.clustered.append(v)
        self.placement[v] = how

    def open_singleton(self, v: int, how: str) -> int:
        cnt_all = np.bincount(
            self.dense[v, self.clustered].astype(np.int64), minlength=self.q
        )
        self.inter_counts += cnt_all
        self.n_inter += len(self.clustered)
        cid = self.clustering.new_cluster(v)
        self.clustered.append(v)
        self.placement[v] = how
        self.max_clusters_seen = max(self.max_clusters_seen, self.clustering.num_clusters)
        return cid

    def refresh_estimates(self, instance: Instance, consts: Constants) -> Estimates:
        support = instance.side.support
        p_plus = (
            Distribution(support, self.intra_counts / self.n_intra)
            if self.n_intra > 0
            else None
        )
        p_minus = (
            Distribution(support, self.inter_counts / self.n_inter)
            if self.n_inter > 0
            else None
        )
        h = hellinger(p_plus, p_minus) if (p_plus and p_minus) else None
        self.estimates = Estimates(
            p_plus=p_plus,
            p_minus=p_minus,
            h=h,
            m_threshold=threshold_from_h(h, consts, instance.n),
            n_intra_pairs=self.n_intra,
            n_inter_pairs=self.n_inter,
        )
        return self.estimates


def _poll_order(state: McState, first: Optional[int] = None) -> list[int]:
    """Clusters by decreasing size, ties by creation id; ``first`` leads."""
    order = sorted(
        range(state.clustering.num_clusters),
        key=lambda c: (-state.clustering.size(c), c),
    )
    if first is not None:
        order.remove(first)
        order.insert(0, first)
    return order


def _place_by_query(
    state: McState, v: int, oracle: Oracle, first: Optional[int] = None
) -> int:
    """One query per existing cluster, stop at the first +1, else singleton."""
    for cid in _poll_order(state, first):
        if oracle.query(v, state.clustering.min_member[cid]) == 1:
            state.join(v, cid, "query")
            return cid
    return state.open_singleton(v, "seed")


def phase1(
    instance: Instance,
    oracle: Oracle,
    consts: Constants,
    rng: np.random.Generator,
) -> McState:
    """Query random vertices until one cluster reaches ceil(scale*C*log n).

    If the pool runs out first the clustering is already complete and exact.
    """
    state = McState(instance, rng)
    target = max(1, math.ceil(consts.effective_c * math.log(max(instance.n, 2))))
    before = oracle.count
    while len(state.pool) and state.clustering.max_size() < target:
        v = state.pool.pop_random(rng)
        _place_by_query(state, v, oracle)
        state.vertices_phase["phase1"] += 1
    state.q_phase["phase1"] = oracle.count - before
    state.phase = "iterate"
    return state


def phase2_loop(
    state: McState, instance: Instance, oracle: Oracle, consts: Constants
) -> McState:
    """Alternate pooled re-estimation with clustering one more random vertex.

    Exits with ``state.phase == "grow"`` as soon as a not-yet-processed
    cluster reaches the current threshold (zero queries if that already
    holds on entry), or ``"done"`` when every vertex is clustered.
    """
    before = oracle.count
    while True:
        est = state.refresh_estimates(instance, consts)
        m = est.m_threshold
        if m is not None and any(
            state.clustering.size(c) >= m
            for c in range(state.clustering.num_clusters)
            if c not in state.grown_done
        ):
            state.phase = "grow"
            break
        if not len(state.pool):
            state.phase = "done"
            break
        v = state.pool.pop_random(state.rng)
        _place_by_query(state, v, oracle)
        state.vertices_phase["phase2"] += 1
    state.q_phase["phase2"] += oracle.count - before
    return state


def phase3_process(
    state: McState,
    instance: Instance,
    oracle: Oracle,
    consts: Constants,
    band: str = "lemma",
) -> McState:
    """Process the largest grown cluster with the estimates frozen at entry.

    3A: memberships at or above -(h/B - 2h^2/(B sqrt(log n))) join with zero
    queries. 3B: memberships inside the two-sided band go to Waiting and are
    resolved by one query per existing cluster, the grown cluster first.
    If the lower cut is nonpositive (tiny n) or the cluster is too small to
    have an intra distribution, free inclusion is disabled and every
    candidate is resolved by queries. The cluster is then retired.
    """
    if band not in BAND_MODES:
        raise ValueError(f"band must be one of {BAND_MODES}")
    before = oracle.count
    est = state.estimates
    m = est.m_threshold if est else None
    grown = [
        c
        for c in range(state.clustering.num_clusters)
        if c not in state.grown_done and m is not None and state.clustering.size(c) >= m
    ]
    if not grown:
        raise ValueError("phase 3 needs a grown, unprocessed cluster")
    cid = min(grown, key=lambda c: (-state.clustering.size(c), c))

    h = est.h
    logn = math.log(max(instance.n, 2))
    if band == "lemma":
        center, wobble = h / consts.b, 2.0 * h * h / (consts.b * math.sqrt(logn))
    else:
        center, wobble = 4.0 * h / consts.c, 2.0 * h * h / (consts.c * math.sqrt(logn))
    t_in, t_wait = center - wobble, center + wobble

    pool_ids = state.pool.snapshot()
    if state.clustering.size(cid) < 2:
        include = np.array([], dtype=np.int64)
        waiting = pool_ids
    else:
        scores = membership_scores(pool_ids, state.clustering.members[cid], instance.side)
        if t_in <= 0.0:
            include = np.array([], dtype=np.int64)
            waiting = pool_ids[scores >= -t_wait]
        else:
            include = pool_ids[scores >= -t_in]
            waiting = pool_ids[(scores >= -t_wait) & (scores < -t_in)]

    for v in include.tolist():
        state.pool.remove(v)
        state.join(v, cid, "side")
    wait_list = waiting.tolist()
    state.waiting[cid] = wait_list
    for v in wait_list:
        state.pool.remove(v)
        _place_by_query(state, v, oracle, first=cid)
    state.waiting_total += len(wait_list)
    state.grown_done.add(cid)
    state.q_phase["phase3"] += oracle.count - before
    state.phase = "iterate"
    return state


def run_mc(
    instance: Instance,
    consts: Constants = Constants(),
    seed: int = 0,
    band: str = "lemma",
    query_log: Optional[QueryLogger] = None,
    debug: Optional[dict] = None,
) -> tuple[ClusteringState, RunReport]:
    """Run the three phases to completion and report query accounting."""
    t0 = time.perf_counter()
    n = instance.n
    oracle = Oracle(instance.labels, log=query_log)
    rng = np.random.default_rng(seed)

    state = phase1(instance, oracle, consts, rng)
    state.max_clusters_seen = max(state.max_clusters_seen, state.clustering.num_clusters)
    guard = 0
    while True:
        state = phase2_loop(state, instance, oracle, consts)
        if state.phase == "done":
            break
        state = phase3_process(state, instance, oracle, consts, band=band)
        guard += 1
        if guard > 2 * n + 4:
            raise RuntimeError("phase loop failed to terminate")

    assert state.clustering.num_unclustered == 0
    queries = oracle.count
    assert queries == sum(state.q_phase.values())
    kmax = max(state.max_clusters_seen, 1)
    # monotone degradation: never worse than querying everything, plus the
    # waiting lists' slack
    assert queries <= n * kmax
    assert queries <= n * kmax + kmax * state.waiting_total

    blocks = state.clustering.blocks()
    mis = misassigned_count(blocks, instance.labels)
    exact = partition_equal(blocks, instance.labels)
    assert exact == (mis == 0)
    est = state.estimates
    report = RunReport(
        algo="mc",
        fingerprint=instance.fingerprint(),
        n=n,
        k=instance.k,
        seed=seed,
        queries=queries,
        exact=exact,
        misassigned=mis,
        wall_ms=(time.perf_counter() - t0) * 1000.0,
        q_phase1=state.q_phase["phase1"],
        q_phase2=state.q_phase["phase2"],
        q_phase3=state.q_phase["phase3"],
        constants={**consts.as_dict(), "band": band},
        extras={
            "clusters_out": state.clustering.num_clusters,
            "max_clusters_seen": state.max_clusters_seen,
            "vertices_phase1": state.vertices_phase["phase1"],
            "vertices_phase2": state.vertices_phase["phase2"],
            "waiting_total": state.waiting_total,
            "side_placements": state.placement.count("side"),
            "h_final": est.h if est else None,
            "m_final": est.m_threshold if est else None,
        },
    )
    if debug is not None:
        debug["state"] = state
    return state.clustering, report
