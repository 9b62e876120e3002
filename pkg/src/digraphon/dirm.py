"""The di-IRM prior over digraphons and clustered digraphs.

Two equivalent generative routes are provided: a truncated stick-breaking
partition of [0, 1] with Dirichlet block weights (a random
:class:`~digraphon.core.StepDigraphon`), and a Chinese restaurant process
partition of the vertices followed by per-pair categorical draws.
"""
from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass, field
from itertools import accumulate

import numpy as np

from .core import SWAP, StepDigraphon, as_generator, symmetric_fill, _draw_types


@dataclass(frozen=True)
class DirmHyperParams:
    """Concentration ``alpha``, off-diagonal Dirichlet ``beta`` (00, 01, 10, 11),
    optional diagonal override ``beta_diag`` (00, *, 11) and stick truncation."""

    alpha: float = 1.0
    beta: tuple = (1.0, 1.0, 1.0, 1.0)
    beta_diag: tuple | None = None
    truncation: int = 50

    def __post_init__(self):
        beta = tuple(float(b) for b in self.beta)
        object.__setattr__(self, "beta", beta)
        if self.beta_diag is not None:
            object.__setattr__(self, "beta_diag", tuple(float(b) for b in self.beta_diag))
        if not self.alpha > 0:
            raise ValueError("alpha must be positive")
        if len(beta) != 4 or min(beta) < 0 or max(beta) <= 0:
            raise ValueError("beta must be 4 nonnegative values, not all zero")
        if self.beta_diag is not None:
            bd = self.beta_diag
            if len(bd) != 3 or min(bd) < 0 or max(bd) <= 0:
                raise ValueError("beta_diag must be 3 nonnegative values, not all zero")
        if int(self.truncation) < 1:
            raise ValueError("truncation must be at least 1")

    @property
    def beta_star(self) -> tuple:
        """Diagonal hyperparameters (b00, b01 + b10, b11) unless overridden."""
        if self.beta_diag is not None:
            return self.beta_diag
        b = self.beta
        return (b[0], b[1] + b[2], b[3])

    def to_dict(self) -> dict:
        out = {"alpha": self.alpha, "beta": list(self.beta)}
        if self.beta_diag is not None:
            out["beta_diag"] = list(self.beta_diag)
        out["truncation"] = int(self.truncation)
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "DirmHyperParams":
        return cls(alpha=float(data.get("alpha", 1.0)),
                   beta=tuple(data.get("beta", (1, 1, 1, 1))),
                   beta_diag=tuple(data["beta_diag"]) if data.get("beta_diag") is not None else None,
                   truncation=int(data.get("truncation", 50)))


@dataclass
class BlockWeights:
    """Per-class-pair type probabilities; ``eta[r, s]`` is oriented from class r."""

    eta: np.ndarray
    empty: np.ndarray | None = None

    def __post_init__(self):
        self.eta = np.asarray(self.eta, dtype=float)

    @property
    def k(self) -> int:
        return self.eta.shape[0]

    def to_digraphon(self, proportions) -> StepDigraphon:
        p = np.asarray(proportions, dtype=float)
        cuts = np.cumsum(p)[:-1] / p.sum()
        return StepDigraphon(cuts, self.eta.copy())


@dataclass
class ClusterAssignment:
    z: np.ndarray
    sizes: np.ndarray = field(default=None)

    def __post_init__(self):
        self.z = compact_labels(self.z)
        self.sizes = np.bincount(self.z, minlength=0).astype(np.int64)

    def __len__(self):
        return len(self.z)

    def __array__(self, dtype=None, copy=None):
        return self.z if dtype is None else self.z.astype(dtype)

    @property
    def k(self) -> int:
        return len(self.sizes)


def compact_labels(z) -> np.ndarray:
    """Relabel clusters 0, 1, ... in order of first appearance."""
    z = np.asarray(z).reshape(-1)
    if len(z) == 0:
        return np.zeros(0, dtype=np.int64)
    _, first, inv = np.unique(z, return_index=True, return_inverse=True)
    rank = np.empty(len(first), dtype=np.int64)
    rank[np.argsort(first, kind="stable")] = np.arange(len(first))
    return rank[inv.reshape(-1)]


def _dirichlet(rng, params) -> np.ndarray:
    params = np.asarray(params, dtype=float)
    active = params > 0
    if not active.any():
        raise ValueError("Dirichlet parameters are all zero")
    out = np.zeros(len(params))
    if active.sum() == 1:
        out[active] = 1.0
    else:
        out[active] = rng.dirichlet(params[active])
    return out


def sample_stick_partition(h: DirmHyperParams, seed) -> np.ndarray:
    """Truncated stick-breaking weights; the last stick takes the residual mass."""
    rng = as_generator(seed)
    K = int(h.truncation)
    x = rng.beta(1.0, h.alpha, size=K - 1)
    v = np.empty(K)
    rest = 1.0
    for k in range(K - 1):
        v[k] = x[k] * rest
        rest *= 1.0 - x[k]
    v[K - 1] = rest
    return v


def sample_block_weights(k: int, h: DirmHyperParams, seed) -> "BlockWeights":
    """Dirichlet(beta) on r < s, Dirichlet(beta*) split evenly on the diagonal.

    Draws are consumed row by row: the diagonal cell of class r, then
    cells (r, r+1), ..., (r, k-1).
    """
    k = int(k)
    if k < 1:
        raise ValueError("need at least one class")
    rng = as_generator(seed)
    eta = np.zeros((k, k, 4))
    for r in range(k):
        d00, dstar, d11 = _dirichlet(rng, h.beta_star)
        eta[r, r] = (d00, dstar / 2, dstar / 2, d11)
        for s in range(r + 1, k):
            eta[r, s] = _dirichlet(rng, h.beta)
    return BlockWeights(symmetric_fill(eta))


def sample_dirm_digraphon(h: DirmHyperParams, seed) -> StepDigraphon:
    """Random step digraphon from the di-IRM prior (no self-loops)."""
    if isinstance(seed, np.random.Generator):
        stick_rng = weight_rng = seed
    else:
        stick_rng, weight_rng = (np.random.default_rng(s)
                                 for s in np.random.SeedSequence(int(seed)).spawn(2))
    v = sample_stick_partition(h, stick_rng)
    cuts = np.cumsum(v)[:-1]
    # classes of zero (or underflowed) width are never hit by a latent; drop them
    keep, last = [], 0.0
    for c in cuts:
        if last < c < 1.0:
            keep.append(c)
            last = c
    cuts = np.array(keep)
    weights = sample_block_weights(len(cuts) + 1, h, weight_rng)
    return StepDigraphon(cuts, weights.eta).check()


def sample_crp(n: int, alpha: float, seed) -> ClusterAssignment:
    """Sequential CRP seating; labels come out in first-appearance order."""
    n = int(n)
    if n < 0 or not alpha > 0:
        raise ValueError("need n >= 0 and alpha > 0")
    rng = as_generator(seed)
    u = rng.random(n)
    sizes: list[float] = []
    z = np.empty(n, dtype=np.int64)
    for i in range(n):
        cum = list(accumulate(sizes))
        total = i + alpha
        r = bisect_right(cum, u[i] * total)
        if r >= len(sizes):
            sizes.append(1)
            r = len(sizes) - 1
        else:
            sizes[r] += 1
        z[i] = r
    return ClusterAssignment(z)


def crp_log_prior(z, alpha: float) -> float:
    """Log EPPF of the partition encoded by ``z``."""
    from scipy.special import gammaln

    sizes = np.bincount(compact_labels(z))
    n = int(sizes.sum())
    return float(len(sizes) * np.log(alpha) + gammaln(sizes).sum()
                 + gammaln(alpha) - gammaln(alpha + n))


def sample_graph_given_clusters(z, eta: BlockWeights, seed) -> np.ndarray:
    """One categorical draw per pair i < j (row-major) with probabilities ``eta[z_i, z_j]``."""
    z = np.asarray(z, dtype=np.int64).reshape(-1)
    if len(z) and (z.min() < 0 or z.max() >= eta.k):
        raise ValueError("cluster index out of range for the block weights")
    rng = as_generator(seed)
    n = len(z)
    adj = np.zeros((n, n), dtype=np.uint8)
    iu, ju = np.triu_indices(n, k=1)
    v = rng.random(len(iu))
    if len(iu):
        t = _draw_types(eta.eta[z[iu], z[ju]], v)
        adj[iu, ju] = t >> 1
        adj[ju, iu] = t & 1
    return adj


def latent_clusters(d: StepDigraphon, u) -> np.ndarray:
    """Class of each latent, relabelled in first-appearance order."""
    return compact_labels(d.class_of(u))


__all__ = [
    "DirmHyperParams", "BlockWeights", "ClusterAssignment", "compact_labels",
    "sample_stick_partition", "sample_block_weights", "sample_dirm_digraphon",
    "sample_crp", "crp_log_prior", "sample_graph_given_clusters", "latent_clusters",
    "SWAP",
]
