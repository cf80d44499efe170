"""Planted-clustering instances with pairwise noisy side information.

An instance is n elements, a ground-truth partition into k clusters, and an
upper-triangular matrix W of similarity values: intra-cluster entries are
i.i.d. draws from ``f_plus``, inter-cluster entries from ``f_minus``. W is
stored as a flat triangular array of support indices (one byte per pair for
q <= 256), giving O(1) pair lookup.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass
from functools import lru_cache
from hashlib import sha256
from pathlib import Path
from typing import Sequence, Union

import numpy as np

from .divergence import Distribution, Support, from_text, to_text

MAGIC = b"OCLB1"
SIDECAR_MAX_N = 200


# ---------------------------------------------------------------------------
# cluster size specifications


@dataclass(frozen=True)
class Balanced:
    """k clusters with sizes as equal as possible."""

    k: int


@dataclass(frozen=True)
class ExplicitSizes:
    """Arbitrary positive sizes; singletons allowed (the adversarial case)."""

    sizes: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "sizes", tuple(int(s) for s in self.sizes))


@dataclass(frozen=True)
class Skewed:
    """k clusters with a geometric size profile, max/min size close to ratio."""

    k: int
    ratio: float


ClusterSpec = Union[Balanced, ExplicitSizes, Skewed]


def cluster_sizes(spec: ClusterSpec, n: int) -> tuple[int, ...]:
    """Resolve a spec into concrete sizes summing to n; raises if impossible."""
    if isinstance(spec, ExplicitSizes):
        sizes = spec.sizes
        if any(s <= 0 for s in sizes):
            raise ValueError("empty cluster requested")
        if sum(sizes) != n:
            raise ValueError(f"sizes sum to {sum(sizes)}, expected n={n}")
        return sizes
    if isinstance(spec, Balanced):
        k = spec.k
        if k < 1 or k > n:
            raise ValueError(f"cannot split n={n} into k={k} nonempty clusters")
        base, extra = divmod(n, k)
        return tuple(base + (1 if i < extra else 0) for i in range(k))
    if isinstance(spec, Skewed):
        k, ratio = spec.k, spec.ratio
        if k < 1 or k > n:
            raise ValueError(f"cannot split n={n} into k={k} nonempty clusters")
        if ratio < 1.0:
            raise ValueError("skew ratio must be >= 1")
        weights = np.array([ratio ** (i / max(k - 1, 1)) for i in range(k)])
        raw = weights / weights.sum() * n
        sizes = np.maximum(np.floor(raw).astype(int), 1)
        # hand out the remainder (or claw back overshoot) largest-first
        order = np.argsort(-raw)
        i = 0
        while sizes.sum() < n:
            sizes[order[i % k]] += 1
            i += 1
        while sizes.sum() > n:
            j = order[i % k]
            if sizes[j] > 1:
                sizes[j] -= 1
            i += 1
        return tuple(int(s) for s in sizes)
    raise TypeError(f"unknown cluster spec {spec!r}")


# ---------------------------------------------------------------------------
# triangular indexing and the counter-based pair RNG


def pair_index(u: int, v: int, n: int) -> int:
    """Flat index of the unordered pair {u, v} in row-major upper-tri order."""
    if u == v:
        raise ValueError("no diagonal entries")
    if u > v:
        u, v = v, u
    return u * n - u * (u + 1) // 2 + (v - u - 1)


@lru_cache(maxsize=32)
def _row_starts(n: int) -> np.ndarray:
    u = np.arange(n, dtype=np.int64)
    starts = u * n - u * (u + 1) // 2
    starts.setflags(write=False)
    return starts


def pair_uniforms(seed: int, lo: int, hi: int) -> np.ndarray:
    """Uniforms for flat pair indices [lo, hi) of the per-seed Philox stream.

    The value at index i depends only on (seed, i): Philox is counter based
    and advances in blocks of 4 doubles, so any slice can be regenerated
    without producing the prefix. Generation order therefore never affects
    the instance.
    """
    if not 0 <= lo <= hi:
        raise ValueError("bad index range")
    block = lo // 4
    bg = np.random.Philox(key=seed)
    if block:
        bg.advance(block)
    vals = np.random.Generator(bg).random(hi - 4 * block)
    return vals[lo - 4 * block :]


class SideInfo:
    """The matrix W as a flat upper-triangular array of support indices."""

    __slots__ = ("n", "support", "tri", "_dense")

    def __init__(self, n: int, support: Support, tri: np.ndarray):
        expected = n * (n - 1) // 2
        if tri.shape != (expected,):
            raise ValueError(f"side_info has {tri.shape[0]} entries, expected {expected}")
        if tri.size and int(tri.max(initial=0)) >= support.q:
            raise ValueError("side_info contains an out-of-range support index")
        tri = np.ascontiguousarray(tri)
        tri.setflags(write=False)
        self.n = n
        self.support = support
        self.tri = tri
        self._dense = None

    @property
    def q(self) -> int:
        return self.support.q

    def value_index(self, u: int, v: int) -> int:
        return int(self.tri[pair_index(u, v, self.n)])

    def dense(self) -> np.ndarray:
        """Full symmetric n x n index matrix (diagonal unused, zero).

        Built once and cached; solvers use it for vectorized row gathers.
        """
        if self._dense is None:
            n = self.n
            m = np.zeros((n, n), dtype=self.tri.dtype)
            starts = _row_starts(n)
            for u in range(n - 1):
                m[u, u + 1 :] = self.tri[starts[u] : starts[u] + n - u - 1]
            m = m + m.T
            m.setflags(write=False)
            self._dense = m
        return self._dense


def _dtype_for_q(q: int) -> np.dtype:
    return np.dtype(np.uint8) if q <= 256 else np.dtype(np.uint16)


class Instance:
    """Immutable planted instance: truth labels, side information, provenance."""

    __slots__ = ("n", "labels", "f_plus", "f_minus", "seed", "side", "_truth")

    def __init__(
        self,
        labels: np.ndarray,
        side: SideInfo,
        f_plus: Distribution,
        f_minus: Distribution,
        seed: int,
    ):
        labels = np.ascontiguousarray(labels, dtype=np.int32)
        n = labels.shape[0]
        if side.n != n:
            raise ValueError("labels and side_info disagree on n")
        if f_plus.support != f_minus.support:
            raise ValueError("support mismatch")
        if side.support != f_plus.support:
            raise ValueError("side_info support disagrees with distributions")
        k = int(labels.max(initial=-1)) + 1
        if n and (labels.min() < 0 or np.bincount(labels, minlength=k).min() == 0):
            raise ValueError("truth labels must use every cluster id 0..k-1")
        labels.setflags(write=False)
        self.n = n
        self.labels = labels
        self.f_plus = f_plus
        self.f_minus = f_minus
        self.seed = int(seed)
        self.side = side
        self._truth = None

    @property
    def k(self) -> int:
        return int(self.labels.max(initial=-1)) + 1

    @property
    def q(self) -> int:
        return self.side.q

    @property
    def truth(self) -> tuple[tuple[int, ...], ...]:
        """Ground-truth partition as tuples of element ids, by cluster id."""
        if self._truth is None:
            blocks = [[] for _ in range(self.k)]
            for v, c in enumerate(self.labels):
                blocks[c].append(v)
            self._truth = tuple(tuple(b) for b in blocks)
        return self._truth

    def fingerprint(self) -> str:
        h = sha256()
        h.update(struct.pack("<qq", self.n, self.seed))
        h.update(self.labels.tobytes())
        h.update(self.side.tri.tobytes())
        h.update(to_text(self.f_plus).encode())
        h.update(to_text(self.f_minus).encode())
        return h.hexdigest()[:12]

    def __eq__(self, other):
        if not isinstance(other, Instance):
            return NotImplemented
        return (
            self.n == other.n
            and self.seed == other.seed
            and np.array_equal(self.labels, other.labels)
            and np.array_equal(self.side.tri, other.side.tri)
            and self.f_plus == other.f_plus
            and self.f_minus == other.f_minus
        )


def generate(
    n: int,
    spec: ClusterSpec,
    f_plus: Distribution,
    f_minus: Distribution,
    seed: int,
) -> Instance:
    """Sample an instance: intra pairs from f_plus, inter pairs from f_minus.

    Deterministic for a fixed seed. Each pair's randomness depends only on
    (seed, pair index), so the output is independent of generation order.
    """
    if f_plus.support != f_minus.support:
        raise ValueError("support mismatch")
    if n < 1:
        raise ValueError("n must be positive")
    sizes = cluster_sizes(spec, n)
    labels = np.repeat(np.arange(len(sizes), dtype=np.int32), sizes)

    q = f_plus.q
    npairs = n * (n - 1) // 2
    u = pair_uniforms(seed, 0, npairs)
    idx_plus = np.minimum(np.searchsorted(f_plus.cdf, u, side="right"), q - 1)
    idx_minus = np.minimum(np.searchsorted(f_minus.cdf, u, side="right"), q - 1)
    if npairs:
        same = np.concatenate([labels[i + 1 :] == labels[i] for i in range(n - 1)])
        tri = np.where(same, idx_plus, idx_minus).astype(_dtype_for_q(q))
    else:
        tri = np.zeros(0, dtype=_dtype_for_q(q))
    return Instance(labels, SideInfo(n, f_plus.support, tri), f_plus, f_minus, seed)


# ---------------------------------------------------------------------------
# persistence


class InstanceFormatError(ValueError):
    """Malformed instance file; ``offset`` is the byte where parsing failed."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (byte offset {offset})")
        self.offset = offset


def save(instance: Instance, path: str | Path, sidecar: bool | None = None) -> Path:
    """Write the binary container; round-trips exactly through :func:`load`.

    A human-readable JSON sidecar (``<path>.json``) is written for small
    instances (n <= 200) unless explicitly disabled.
    """
    path = Path(path)
    header = {
        "version": 1,
        "n": instance.n,
        "k": instance.k,
        "q": instance.q,
        "seed": instance.seed,
        "f_plus": to_text(instance.f_plus),
        "f_minus": to_text(instance.f_minus),
        "w_dtype": instance.side.tri.dtype.str,
    }
    blob = json.dumps(header, separators=(",", ":")).encode()
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<I", len(blob)))
        fh.write(blob)
        fh.write(instance.labels.astype("<i4").tobytes())
        fh.write(instance.side.tri.tobytes())
    if sidecar or (sidecar is None and instance.n <= SIDECAR_MAX_N):
        doc = {
            "n": instance.n,
            "k": instance.k,
            "seed": instance.seed,
            "f_plus": header["f_plus"],
            "f_minus": header["f_minus"],
            "clusters": [list(block) for block in instance.truth],
            "w_indices": instance.side.tri.tolist(),
        }
        Path(str(path) + ".json").write_text(json.dumps(doc, indent=1))
    return path


def load(path: str | Path) -> Instance:
    """Read an instance container; re-validates every invariant on load."""
    data = Path(path).read_bytes()
    if data[:5] != MAGIC:
        raise InstanceFormatError(f"bad magic {data[:5]!r}, expected {MAGIC!r}", 0)
    if len(data) < 9:
        raise InstanceFormatError("truncated header length", len(data))
    (hlen,) = struct.unpack("<I", data[5:9])
    if len(data) < 9 + hlen:
        raise InstanceFormatError("truncated header", len(data))
    try:
        header = json.loads(data[9 : 9 + hlen])
    except json.JSONDecodeError as exc:
        raise InstanceFormatError(f"header is not valid JSON: {exc}", 9) from exc
    try:
        n = int(header["n"])
        seed = int(header["seed"])
        f_plus = from_text(header["f_plus"])
        f_minus = from_text(header["f_minus"])
        w_dtype = np.dtype(header["w_dtype"])
    except (KeyError, ValueError, TypeError) as exc:
        raise InstanceFormatError(f"bad header field: {exc}", 9) from exc

    off = 9 + hlen
    labels_bytes = n * 4
    if len(data) < off + labels_bytes:
        raise InstanceFormatError("truncated labels block", len(data))
    labels = np.frombuffer(data, dtype="<i4", count=n, offset=off).astype(np.int32)

    off += labels_bytes
    npairs = n * (n - 1) // 2
    tri_bytes = npairs * w_dtype.itemsize
    if len(data) < off + tri_bytes:
        raise InstanceFormatError("truncated side-information block", len(data))
    if len(data) > off + tri_bytes:
        raise InstanceFormatError("trailing bytes after side information", off + tri_bytes)
    tri = np.frombuffer(data, dtype=w_dtype, count=npairs, offset=off).copy()

    try:
        inst = Instance(labels, SideInfo(n, f_plus.support, tri), f_plus, f_minus, seed)
    except ValueError as exc:
        raise InstanceFormatError(f"invariant violation: {exc}", off) from exc
    if inst.k != int(header.get("k", inst.k)):
        raise InstanceFormatError("header k disagrees with labels", 9)
    return inst
