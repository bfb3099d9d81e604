"""Objective-space geometry: Pareto dominance, front extraction and exact hypervolume.

All objectives follow the maximization convention. Dominance uses exact
floating-point comparisons with no tolerance, and among exact duplicates the
first occurrence is the one kept on the front.
"""

from __future__ import annotations

import itertools
from pathlib import Path

import numpy as np


def _as_points(points, k: int | None = None) -> np.ndarray:
    arr = np.asarray(points, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1) if k in (None, 1) else arr.reshape(1, -1)
    if arr.ndim != 2:
        raise ValueError(f"points must be a 2-D array, got shape {arr.shape}")
    if k is not None and arr.shape[0] and arr.shape[1] != k:
        raise ValueError(f"points have {arr.shape[1]} objectives, reference has {k}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("points must be finite")
    return arr


def _as_reference(z) -> np.ndarray:
    ref = np.atleast_1d(np.asarray(z, dtype=np.float64))
    if ref.ndim != 1 or not np.all(np.isfinite(ref)):
        raise ValueError("reference point must be a finite vector")
    return ref


def dominates(a, b) -> bool:
    """Return True iff ``a`` Pareto-dominates ``b``.

    ``a`` dominates ``b`` when ``b_i <= a_i`` for every objective and
    ``b_j < a_j`` for at least one.
    """
    a = np.atleast_1d(np.asarray(a, dtype=np.float64))
    b = np.atleast_1d(np.asarray(b, dtype=np.float64))
    if a.shape != b.shape:
        raise ValueError(f"length mismatch: {a.shape} vs {b.shape}")
    return bool(np.all(b <= a) and np.any(b < a))


def pareto_front(points) -> np.ndarray:
    """Indices of the non-dominated rows of ``points``, in ascending order.

    Exact duplicates of a front point are not dominated by each other; only
    the first occurrence is reported.
    """
    Y = _as_points(points)
    m = Y.shape[0]
    if m == 0:
        raise ValueError("pareto_front needs at least one point")
    # lexicographic descending order puts every dominator before what it
    # dominates; lexsort is stable, so earlier duplicates come first too
    order = np.lexsort(tuple(-Y[:, j] for j in reversed(range(Y.shape[1]))))
    kept: list[int] = []
    for idx in order:
        if not any(np.all(Y[idx] <= Y[j]) for j in kept):
            kept.append(int(idx))
    return np.array(sorted(kept), dtype=np.intp)


def _clip_to_box(Y: np.ndarray, z: np.ndarray) -> np.ndarray:
    """Drop points with zero dominated volume; clipping at ``z`` is implicit after that."""
    return Y[np.all(Y > z, axis=1)]


def _sweep_2d(Y: np.ndarray, z: np.ndarray) -> float:
    order = np.argsort(-Y[:, 0], kind="stable")
    volume = 0.0
    best_second = z[1]
    for x0, x1 in Y[order]:
        if x1 > best_second:
            volume += (x0 - z[0]) * (x1 - best_second)
            best_second = x1
    return float(volume)


def hypervolume_exact_2d(points, z) -> float:
    """Exact dominated area of a bi-objective point set by sort-and-sweep."""
    z = _as_reference(z)
    if z.shape[0] != 2:
        raise ValueError(f"hypervolume_exact_2d needs k=2, got k={z.shape[0]}")
    Y = _as_points(points, 2)
    if Y.shape[0] == 0:
        return 0.0
    return _sweep_2d(_clip_to_box(Y, z), z)


def _hv_recursive(Y: np.ndarray, z: np.ndarray) -> float:
    m, k = Y.shape
    if m == 0:
        return 0.0
    if k == 1:
        return float(Y[:, 0].max() - z[0])
    if k == 2:
        return _sweep_2d(Y, z)
    # slice along the last objective: between consecutive levels the
    # cross-section is the (k-1)-volume of the points at or above the slab
    levels = np.unique(Y[:, -1])[::-1]
    volume = 0.0
    for upper, lower in zip(levels, itertools.chain(levels[1:], [z[-1]])):
        active = Y[Y[:, -1] >= upper, :-1]
        if active.shape[0] > 1:
            active = active[pareto_front(active)]
        volume += _hv_recursive(active, z[:-1]) * (upper - lower)
    return float(volume)


def hypervolume_exact(points, z) -> float:
    """Exact dominated hypervolume for any number of objectives.

    Uses recursive slicing along the last objective down to a 2-D sweep.
    Intended for desk-scale inputs (a hundred points, up to four objectives).
    """
    z = _as_reference(z)
    Y = _as_points(points, z.shape[0])
    if Y.shape[0] == 0:
        return 0.0
    Y = _clip_to_box(Y, z)
    if Y.shape[0] == 0:
        return 0.0
    Y = Y[pareto_front(Y)]
    return _hv_recursive(Y, z)


def hypervolume_grid_oracle(points, z, cells_per_axis: int) -> float:
    """Brute-force hypervolume by counting dominated grid-cell centers.

    The grid spans the box from ``z`` to the coordinate-wise maximum of the
    points. Error is bounded by the measure of cells crossing the staircase.
    """
    z = _as_reference(z)
    Y = _as_points(points, z.shape[0])
    if Y.shape[0] == 0:
        return 0.0
    Y = _clip_to_box(Y, z)
    if Y.shape[0] == 0:
        return 0.0
    upper = Y.max(axis=0)
    widths = (upper - z) / cells_per_axis
    axes = [z[i] + (np.arange(cells_per_axis) + 0.5) * widths[i] for i in range(z.shape[0])]
    centers = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, z.shape[0])
    covered = np.zeros(centers.shape[0], dtype=bool)
    for y in Y:
        covered |= np.all(centers <= y, axis=1)
    return float(covered.sum() * np.prod(widths))


class ParetoArchive:
    """Evaluated (input, objective) pairs with an incrementally maintained front.

    Insertion is single-writer; reads are safe once a run has finished.
    """

    def __init__(self):
        self.inputs: list[np.ndarray] = []
        self.objectives: list[np.ndarray] = []
        self.front_indices: list[int] = []

    def __len__(self) -> int:
        return len(self.objectives)

    def add(self, x, y) -> bool:
        """Insert a pair; returns True if it joined the front."""
        x = np.atleast_1d(np.asarray(x, dtype=np.float64)).copy()
        y = np.atleast_1d(np.asarray(y, dtype=np.float64)).copy()
        if not np.all(np.isfinite(y)):
            raise ValueError("objective vector must be finite")
        if self.objectives and y.shape != self.objectives[0].shape:
            raise ValueError("objective length differs from archive")
        idx = len(self.objectives)
        self.inputs.append(x)
        self.objectives.append(y)
        for j in self.front_indices:
            q = self.objectives[j]
            if np.all(y <= q):
                return False
        self.front_indices = [j for j in self.front_indices if not dominates(y, self.objectives[j])]
        self.front_indices.append(idx)
        return True

    def front(self) -> np.ndarray:
        return np.array([self.objectives[j] for j in self.front_indices])

    def hypervolume(self, z) -> float:
        if not self.front_indices:
            return 0.0
        return hypervolume_exact(self.front(), z)


def read_points(path) -> np.ndarray:
    """Load a point-set file: one point per line, whitespace-separated reals."""
    rows = []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        try:
            rows.append([float(tok) for tok in line.split()])
        except ValueError as exc:
            raise ValueError(f"{path}:{lineno}: {exc}") from None
    if not rows:
        raise ValueError(f"{path}: no points")
    if len({len(r) for r in rows}) != 1:
        raise ValueError(f"{path}: rows have differing lengths")
    return np.array(rows, dtype=np.float64)
