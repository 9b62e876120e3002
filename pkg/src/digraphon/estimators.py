"""Histogram and degree-sorting digraphon estimators."""
from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .core import SWAP, pair_types
from .dirm import BlockWeights


def _labelled_counts(g, z):
    a = np.asarray(g)
    if a.diagonal().any():
        raise ValueError("estimators expect a loop-free graph")
    z = np.asarray(z, dtype=np.int64).reshape(-1)
    n = len(a)
    if len(z) != n:
        raise ValueError("labels must cover every vertex")
    if n and z.min() < 0:
        raise ValueError("labels must be nonnegative")
    k = int(z.max()) + 1 if n else 0
    tt = pair_types(a).astype(np.int64)
    iu, ju = np.triu_indices(n, 1)
    counts = np.zeros((k, k, 4), dtype=np.int64)
    np.add.at(counts, (z[iu], z[ju], tt[iu, ju]), 1)
    return counts


def histogram_densities(g, z) -> BlockWeights:
    """Empirical joint-type frequencies per class pair, labels taken as given.

    Cells without any vertex pair get the uniform tuple and are flagged in
    ``empty``.
    """
    raw = _labelled_counts(g, z)
    k = len(raw)
    # fold both orientations of each unordered class pair into cell (r, s), r <= s
    cnt = np.zeros_like(raw)
    for r in range(k):
        for s in range(r, k):
            cnt[r, s] = raw[r, s] + (raw[s, r][SWAP] if s != r else 0)
    eta = np.full((k, k, 4), 0.25)
    empty = np.zeros((k, k), dtype=bool)
    for r in range(k):
        for s in range(r, k):
            c = cnt[r, s].astype(float)
            tot = c.sum()
            if tot == 0:
                empty[r, s] = empty[s, r] = True
                continue
            if r == s:
                star = (c[1] + c[2]) / 2
                eta[r, r] = (c[0] / tot, star / tot, star / tot, c[3] / tot)
            else:
                eta[r, s] = c / tot
                eta[s, r] = eta[r, s][SWAP]
    return BlockWeights(eta, empty)


def degree_profiles(g) -> np.ndarray:
    """Fraction of the other vertices in each joint type, from each vertex's side."""
    a = np.asarray(g)
    n = len(a)
    if n < 2:
        return np.full((n, 4), 0.25)
    tt = pair_types(a).astype(np.int64)
    prof = np.zeros((n, 4))
    for t in range(4):
        prof[:, t] = (tt == t).sum(axis=1)
    prof[:, 0] -= 1  # the diagonal of a loop-free graph reads as type 00
    return prof / (n - 1)


class DegreeSortResult(NamedTuple):
    ordering: np.ndarray
    weights: BlockWeights
    labels: np.ndarray
    proportions: np.ndarray


def degree_sort_estimate(g, k: int) -> DegreeSortResult:
    """Sort by profile (00, 01, 10, 11) lexicographically, cut into k equal runs, average."""
    a = np.asarray(g)
    n = len(a)
    k = int(k)
    if not 1 <= k <= max(n, 1) or n == 0:
        raise ValueError(f"block count must be in [1, n], got {k} for n={n}")
    prof = degree_profiles(a)
    order = np.lexsort((np.arange(n), prof[:, 3], prof[:, 2], prof[:, 1], prof[:, 0]))
    size = n // k
    group = np.minimum(np.arange(n) // size, k - 1)
    labels = np.empty(n, dtype=np.int64)
    labels[order] = group
    props = np.bincount(group, minlength=k) / n
    return DegreeSortResult(order, histogram_densities(a, labels), labels, props)
