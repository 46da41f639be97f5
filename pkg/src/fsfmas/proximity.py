"""Proximity between FSFs: semantic x temporal x spatial.

The temporal and spatial terms share one bell-shaped kernel,
``4 e^{-k d} / (1 + e^{-k d})^2``, which equals ``sech^2(k d / 2)``; they lie
in (0, 1] and only the semantic term can carry a sign.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NonFiniteInput
from .fsf import FSF
from .ontology import Ontology

TEMPORAL_RATE = 0.2
SPATIAL_RATE = 0.08


@dataclass(frozen=True)
class ProximityParams:
    temporal_rate: float = TEMPORAL_RATE
    spatial_rate: float = SPATIAL_RATE
    # weight of the class term vs. qualifier agreement in P_s
    class_weight: float = 0.5

    def __post_init__(self):
        if not 0.0 <= self.class_weight <= 1.0:
            raise ValueError("class_weight must lie in [0, 1]")
        if self.temporal_rate <= 0 or self.spatial_rate <= 0:
            raise ValueError("rates must be positive")


DEFAULT_PARAMS = ProximityParams()


@dataclass(frozen=True)
class ProximityBreakdown:
    semantic: float
    temporal: float
    spatial: float
    total: float


def _kernel(delta: float, rate: float) -> float:
    if not math.isfinite(delta):
        raise NonFiniteInput(f"non-finite difference {delta!r}")
    e = math.exp(-rate * abs(delta))
    return 4.0 * e / ((1.0 + e) * (1.0 + e))


def temporal_proximity(delta_t: float, rate: float = TEMPORAL_RATE) -> float:
    """P_t for a time difference in cycles."""
    return _kernel(delta_t, rate)


def spatial_proximity(delta_e: float, rate: float = SPATIAL_RATE) -> float:
    """P_e for a Euclidean distance in world units."""
    return _kernel(delta_e, rate)


def distance(a: FSF, b: FSF) -> float:
    dx = float(a.location.x - b.location.x)
    dy = float(a.location.y - b.location.y)
    return math.sqrt(dx * dx + dy * dy)


def qualifier_agreement(a: FSF, b: FSF) -> float:
    """Fraction of shared qualifier names whose values are equal (1 if none are shared)."""
    qa = a.qualifier_map
    shared = [n for n, _ in b.qualifiers if n in qa]
    if not shared:
        return 1.0
    qb = b.qualifier_map
    return sum(1 for n in shared if qa[n] == qb[n]) / len(shared)


def semantic_proximity(a: FSF, b: FSF, ontology: Ontology,
                       params: ProximityParams = DEFAULT_PARAMS) -> float:
    if a.object_id == b.object_id:
        return 1.0
    s = ontology.distinct_object_similarity(a.cls.name, b.cls.name)
    lam = params.class_weight
    return s * (lam + (1.0 - lam) * qualifier_agreement(a, b))


def total_proximity(a: FSF, b: FSF, ontology: Ontology,
                    params: ProximityParams = DEFAULT_PARAMS) -> ProximityBreakdown:
    ps = semantic_proximity(a, b, ontology, params)
    pt = temporal_proximity(float(a.time - b.time), params.temporal_rate)
    pe = spatial_proximity(distance(a, b), params.spatial_rate)
    return ProximityBreakdown(ps, pt, pe, ps * pt * pe)


def proximity(a: FSF, b: FSF, ontology: Ontology,
              params: ProximityParams = DEFAULT_PARAMS) -> float:
    return total_proximity(a, b, ontology, params).total


def spatial_cutoff(threshold: float, rate: float = SPATIAL_RATE) -> float:
    """Distance beyond which ``spatial_proximity`` falls below ``threshold``.

    Total proximity never exceeds the spatial term, so nothing farther away can
    reach ``threshold``. Returns ``inf`` when ``threshold <= 0``.
    """
    if threshold <= 0:
        return math.inf
    if threshold >= 1:
        return 0.0
    return 2.0 * math.acosh(1.0 / math.sqrt(threshold)) / rate


class SpatialGrid:
    """Uniform bucket grid over slot positions for radius queries."""

    def __init__(self, cell: float):
        if not cell > 0:
            raise ValueError("cell size must be positive")
        self.cell = float(cell)
        self._buckets: dict[tuple[int, int], set[int]] = {}
        self._where: dict[int, tuple[int, int]] = {}
        self._pos: dict[int, tuple[float, float]] = {}

    def _key(self, x, y):
        return math.floor(x / self.cell), math.floor(y / self.cell)

    def move(self, slot: int, x: float, y: float):
        key = self._key(x, y)
        old = self._where.get(slot)
        if old != key:
            if old is not None:
                self._buckets[old].discard(slot)
            self._buckets.setdefault(key, set()).add(slot)
            self._where[slot] = key
        self._pos[slot] = (x, y)

    def discard(self, slot: int):
        key = self._where.pop(slot, None)
        if key is not None:
            self._buckets[key].discard(slot)
            del self._pos[slot]

    def near(self, x: float, y: float, radius: float) -> list[int]:
        """Slots within ``radius`` of (x, y), ascending."""
        c = self.cell
        i0, i1 = math.floor((x - radius) / c), math.floor((x + radius) / c)
        j0, j1 = math.floor((y - radius) / c), math.floor((y + radius) / c)
        r2 = radius * radius
        buckets, pos = self._buckets, self._pos
        out = []
        for i in range(i0, i1 + 1):
            for j in range(j0, j1 + 1):
                bucket = buckets.get((i, j))
                if not bucket:
                    continue
                for slot in bucket:
                    px, py = pos[slot]
                    dx, dy = px - x, py - y
                    if dx * dx + dy * dy <= r2:
                        out.append(slot)
        out.sort()
        return out


class ProximityIndex:
    """Column store of FSFs for vectorized one-vs-many and all-pairs proximity.

    Slots are dense integers (the MAS uses agent ids). Values agree with
    :func:`total_proximity` up to floating-point rounding of ``exp``.
    """

    def __init__(self, ontology: Ontology, params: ProximityParams = DEFAULT_PARAMS,
                 capacity: int = 64):
        self.ontology = ontology
        self.params = params
        self.size = 0
        self._class_idx = {c: i for i, c in enumerate(ontology.classes)}
        n = len(self._class_idx)
        self._sim = np.empty((n, n))
        for a, i in self._class_idx.items():
            for b, j in self._class_idx.items():
                self._sim[i, j] = ontology.distinct_object_similarity(a, b)
        self._obj_codes: dict[str, int] = {}
        self._qual_cols: dict[str, int] = {}
        self._value_codes: list[dict] = []
        self._alloc(capacity, 4)

    def _alloc(self, cap, qcap):
        old = self.size
        def grow(arr, shape, fill, dtype):
            new = np.full(shape, fill, dtype=dtype)
            if arr is not None:
                new[tuple(slice(0, s) for s in arr.shape)] = arr
            return new
        self.t = grow(getattr(self, "t", None), (cap,), 0.0, float)
        self.x = grow(getattr(self, "x", None), (cap,), 0.0, float)
        self.y = grow(getattr(self, "y", None), (cap,), 0.0, float)
        self.cls = grow(getattr(self, "cls", None), (cap,), 0, np.intp)
        self.obj = grow(getattr(self, "obj", None), (cap,), -1, np.int64)
        self.q = grow(getattr(self, "q", None), (cap, qcap), -1, np.int64)
        self.size = old

    def _encode(self, fsf: FSF):
        obj = self._obj_codes.setdefault(fsf.object_id, len(self._obj_codes))
        codes = {}
        for name, value in fsf.qualifiers:
            col = self._qual_cols.get(name)
            if col is None:
                col = self._qual_cols[name] = len(self._qual_cols)
                self._value_codes.append({})
            table = self._value_codes[col]
            codes[col] = table.setdefault(value, len(table))
        return obj, codes

    def _row_codes(self, codes) -> np.ndarray:
        q = np.full(self.q.shape[1], -1, dtype=np.int64)
        for col, code in codes.items():
            q[col] = code
        return q

    def put(self, slot: int, fsf: FSF):
        if slot > self.size:
            raise IndexError("slots must be filled densely")
        obj, codes = self._encode(fsf)
        cap, qcap = self.q.shape
        if slot >= cap or len(self._qual_cols) > qcap:
            self._alloc(max(cap, 2 * (slot + 1)), max(qcap, 2 * len(self._qual_cols)))
        self.t[slot] = fsf.time
        self.x[slot] = fsf.location.x
        self.y[slot] = fsf.location.y
        self.cls[slot] = self._class_idx[fsf.cls.name]
        self.obj[slot] = obj
        row = self.q[slot]
        row.fill(-1)
        for col, code in codes.items():
            row[col] = code
        self.size = max(self.size, slot + 1)

    def _kernel(self, d, rate):
        e = np.exp(-rate * d)
        return 4.0 * e / ((1.0 + e) * (1.0 + e))

    def _semantic(self, same, s, n_both, n_eq):
        lam = self.params.class_weight
        with np.errstate(invalid="ignore", divide="ignore"):
            j = np.where(n_both == 0, 1.0, n_eq / np.maximum(n_both, 1))
        return np.where(same, 1.0, s * (lam + (1.0 - lam) * j))

    def row(self, fsf: FSF) -> np.ndarray:
        """Total proximity of ``fsf`` against every filled slot."""
        n = self.size
        obj, codes = self._encode(fsf)
        if len(self._qual_cols) > self.q.shape[1]:
            self._alloc(self.q.shape[0], 2 * len(self._qual_cols))
        q = self._row_codes(codes)
        stored = self.q[:n]
        both = (stored >= 0) & (q >= 0)
        n_both = both.sum(axis=1)
        n_eq = (both & (stored == q)).sum(axis=1)
        s = self._sim[self._class_idx[fsf.cls.name], self.cls[:n]]
        ps = self._semantic(self.obj[:n] == obj, s, n_both, n_eq)
        pt = self._kernel(np.abs(self.t[:n] - fsf.time), self.params.temporal_rate)
        dx = self.x[:n] - fsf.location.x
        dy = self.y[:n] - fsf.location.y
        pe = self._kernel(np.sqrt(dx * dx + dy * dy), self.params.spatial_rate)
        return ps * pt * pe

    def pairs(self, a, b) -> np.ndarray:
        """Total proximity between slots ``a[k]`` and ``b[k]`` for every k."""
        a = np.asarray(a, dtype=np.intp)
        b = np.asarray(b, dtype=np.intp)
        qa, qb = self.q[a], self.q[b]
        both = (qa >= 0) & (qb >= 0)
        n_both = both.sum(axis=1)
        n_eq = (both & (qa == qb)).sum(axis=1)
        s = self._sim[self.cls[a], self.cls[b]]
        ps = self._semantic(self.obj[a] == self.obj[b], s, n_both, n_eq)
        pt = self._kernel(np.abs(self.t[a] - self.t[b]), self.params.temporal_rate)
        dx = self.x[a] - self.x[b]
        dy = self.y[a] - self.y[b]
        pe = self._kernel(np.sqrt(dx * dx + dy * dy), self.params.spatial_rate)
        return ps * pt * pe

    def matrix(self, slots) -> np.ndarray:
        """All-pairs total proximity among ``slots`` (square, symmetric)."""
        idx = np.asarray(slots, dtype=np.intp)
        a, b = np.meshgrid(idx, idx, indexing="ij")
        return self.pairs(a.ravel(), b.ravel()).reshape(len(idx), len(idx))

    def neighbours(self, slots, radius: float) -> tuple[np.ndarray, np.ndarray]:
        """Ordered pairs (i, j), i != j, of ``slots`` at most ``radius`` apart, row-major."""
        idx = np.asarray(slots, dtype=np.intp)
        x, y = self.x[idx], self.y[idx]
        dx = x[:, None] - x[None, :]
        dy = y[:, None] - y[None, :]
        close = dx * dx + dy * dy <= radius * radius if math.isfinite(radius) \
            else np.ones((len(idx), len(idx)), dtype=bool)
        np.fill_diagonal(close, False)
        i, j = np.nonzero(close)
        return idx[i], idx[j]
