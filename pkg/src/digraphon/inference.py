"""Collapsed Gibbs sampling for the di-IRM and an asymmetric IRM baseline.

Clusters are always indexed in order of first appearance in ``z``; the
orientation of an off-diagonal cell (r, s), r < s, counts the joint type
``(G_ij, G_ji)`` with ``i`` in class r and ``j`` in class s.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln

from . import _kernels
from .core import SWAP, as_generator, pair_types
from .dirm import BlockWeights, DirmHyperParams, compact_labels, crp_log_prior, sample_crp

LOG2 = math.log(2.0)


class SelfLoopError(ValueError):
    pass


def _check_graph(g) -> np.ndarray:
    a = np.asarray(g)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("adjacency must be a square matrix")
    if not ((a == 0) | (a == 1)).all():
        raise ValueError("adjacency entries must be 0 or 1")
    if a.diagonal().any():
        raise SelfLoopError("graph has self-loops; strip them before inference")
    return a.astype(np.uint8)


def _labels(z, n) -> np.ndarray:
    z = compact_labels(np.asarray(z))
    if len(z) != n:
        raise ValueError(f"assignment covers {len(z)} vertices, graph has {n}")
    return z


@dataclass
class PairCounts:
    """Per-cell tallies of joint types.

    ``off[r, s]`` holds the (00, 01, 10, 11) counts seen from class r; the
    entry for s < r mirrors ``off[s, r]`` with 01 and 10 exchanged, and the
    diagonal of ``off`` is unused (zero). ``diag[r]`` is (m00, m*, m11).
    """

    off: np.ndarray
    diag: np.ndarray

    @property
    def k(self) -> int:
        return len(self.diag)

    def total(self) -> int:
        iu = np.triu_indices(self.k, 1)
        return int(self.off[iu].sum() + self.diag.sum())

    def __eq__(self, other):
        return (isinstance(other, PairCounts) and np.array_equal(self.off, other.off)
                and np.array_equal(self.diag, other.diag))


def count_pairs(g, z) -> PairCounts:
    a = _check_graph(g)
    n = len(a)
    z = _labels(z, n)
    K = int(z.max()) + 1 if n else 0
    tt = pair_types(a)
    iu, ju = np.triu_indices(n, 1)
    zi, zj, t = z[iu], z[ju], tt[iu, ju].astype(np.int64)
    off = np.zeros((K, K, 4), dtype=np.int64)
    diag = np.zeros((K, 3), dtype=np.int64)
    same = zi == zj
    np.add.at(diag, (zi[same], np.array([0, 1, 1, 2])[t[same]]), 1)
    cross = ~same
    np.add.at(off, (zi[cross], zj[cross], t[cross]), 1)
    np.add.at(off, (zj[cross], zi[cross], SWAP[t[cross]]), 1)
    return PairCounts(off, diag)


def log_multivariate_beta(theta) -> float:
    theta = [float(t) for t in np.asarray(theta, dtype=float).reshape(-1)]
    if min(theta) <= 0:
        raise ValueError("multivariate beta needs positive arguments")
    # fsum is order-independent, so relabelled or permuted inputs give identical values
    return math.fsum(math.lgamma(t) for t in theta) - math.lgamma(math.fsum(theta))


def _cell_term(m, beta) -> float:
    post, prior = [], []
    for c, b in zip(np.asarray(m).tolist(), beta):
        if b > 0:
            post.append(c + b)
            prior.append(b)
        elif c > 0:
            return -math.inf
    return log_multivariate_beta(post) - log_multivariate_beta(prior)


def collapsed_log_likelihood(counts: PairCounts, h: DirmHyperParams) -> float:
    """log p(G | z) with the block weights integrated out; -inf if a zero-beta type occurs."""
    terms = []
    k = counts.k
    for r in range(k):
        for s in range(r + 1, k):
            terms.append(_cell_term(counts.off[r, s], h.beta))
        terms.append(_cell_term(counts.diag[r], h.beta_star))
        terms.append(-counts.diag[r, 1] * LOG2)
    if -math.inf in terms:
        return -math.inf
    return math.fsum(terms)


def map_weights(counts: PairCounts, h: DirmHyperParams) -> BlockWeights:
    """Posterior-mode weights (m + beta) / N per cell; diagonal 01/10 split evenly."""
    k = counts.k
    beta = np.asarray(h.beta)
    bstar = np.asarray(h.beta_star)
    eta = np.zeros((k, k, 4))
    for r in range(k):
        d = counts.diag[r] + bstar
        d = d / d.sum()
        eta[r, r] = (d[0], d[1] / 2, d[1] / 2, d[2])
        for s in range(r + 1, k):
            c = counts.off[r, s] + beta
            eta[r, s] = c / c.sum()
            eta[s, r] = eta[r, s][SWAP]
    return BlockWeights(eta)


# -- Gibbs state -------------------------------------------------------------

@dataclass
class GibbsState:
    """Cluster labels with incrementally maintained counts (capacity n + 1)."""

    z: np.ndarray
    sizes: np.ndarray
    M: np.ndarray
    D: np.ndarray
    K: int
    loglik: float = 0.0

    @property
    def counts(self) -> PairCounts:
        K = self.K
        return PairCounts(self.M[:K, :K].copy(), self.D[:K].copy())

    @property
    def n_clusters(self) -> int:
        return self.K

    def copy(self) -> "GibbsState":
        return GibbsState(self.z.copy(), self.sizes.copy(), self.M.copy(), self.D.copy(),
                          self.K, self.loglik)


def init_state(g, z, h: DirmHyperParams) -> GibbsState:
    a = _check_graph(g)
    n = len(a)
    z = _labels(z, n)
    pc = count_pairs(a, z)
    K = pc.k
    cap = n + 1
    sizes = np.zeros(cap, dtype=np.int64)
    sizes[:K] = np.bincount(z, minlength=K)
    M = np.zeros((cap, cap, 4), dtype=np.int64)
    M[:K, :K] = pc.off
    D = np.zeros((cap, 3), dtype=np.int64)
    D[:K] = pc.diag
    return GibbsState(z.astype(np.int64), sizes, M, D, K, collapsed_log_likelihood(pc, h))


def _canonicalize(state: GibbsState, mirror: bool = True) -> None:
    z = state.z
    K = state.K
    if K == 0:
        return
    _, first = np.unique(z, return_index=True)
    order = np.argsort(first, kind="stable")      # old labels in appearance order
    if np.array_equal(order, np.arange(K)):
        return
    rank = np.empty(K, dtype=np.int64)
    rank[order] = np.arange(K)
    state.z[:] = rank[z]
    state.sizes[:K] = state.sizes[order]
    state.M[:K, :K] = state.M[np.ix_(order, order)]
    if state.D is not None:
        state.D[:K] = state.D[order]


def _dirm_params(h: DirmHyperParams):
    beta = np.asarray(h.beta, dtype=float)
    return beta, np.ascontiguousarray(beta[SWAP]), np.asarray(h.beta_star, dtype=float)


def _backend(name):
    if name is None:
        return _kernels.kernels
    return _kernels.BACKENDS[name]


def gibbs_conditional(i: int, state: GibbsState, g, h: DirmHyperParams, backend=None) -> np.ndarray:
    """p(z_i = r | z_-i, G) over the clusters left after removing i, plus a new cluster.

    Entry r < len-1 refers to the r-th remaining cluster in label order
    (vertex i's own cluster drops out if i was alone); the last entry is
    a fresh cluster.
    """
    tt = pair_types(_check_graph(g))
    s = state.copy()
    K = _kernels._sweep_py.dirm_detach(int(i), tt, s.z, s.sizes, s.M, s.D, s.K)
    beta, beta_sw, bstar = _dirm_params(h)
    fin, ninf = _backend(backend).dirm_logscores(int(i), tt, s.z, s.sizes, s.M, s.D, K,
                                                 beta, beta_sw, bstar)
    logcrp = np.append(np.log(s.sizes[:K]), np.log(h.alpha))
    p = _kernels._sweep_py.probabilities(fin, ninf, logcrp)
    # detaching may move a cluster into a freed slot; report in original label order
    others = np.arange(len(s.z)) != i
    slot_label = np.empty(K, dtype=np.int64)
    slot_label[s.z[others]] = state.z[others]
    return np.append(p[:K][np.argsort(slot_label)], p[K])


def gibbs_sweep(state: GibbsState, g, h: DirmHyperParams, seed, debug: bool = False,
                backend=None, _tt=None) -> GibbsState:
    """Resample every z_i once in index order; returns a new state."""
    rng = as_generator(seed)
    tt = _tt if _tt is not None else pair_types(_check_graph(g))
    s = state.copy()
    u = rng.random(len(s.z))
    beta, beta_sw, bstar = _dirm_params(h)
    s.K = int(_backend(backend).dirm_sweep(tt, s.z, s.sizes, s.M, s.D, s.K, u,
                                           beta, beta_sw, bstar, float(h.alpha)))
    _canonicalize(s)
    s.loglik = collapsed_log_likelihood(s.counts, h)
    if debug:
        fresh = count_pairs(g, s.z)
        if fresh != s.counts:
            raise AssertionError("incremental pair counts diverged from a recount")
    return s


def log_joint(state, h) -> float:
    return float(state.loglik + crp_log_prior(state.z, h.alpha))


@dataclass
class TraceRecord:
    iteration: int
    n_clusters: int
    log_joint: float
    z: np.ndarray


@dataclass
class ChainResult:
    trace: list = field(default_factory=list)
    state: object = None
    weights: BlockWeights | None = None

    @property
    def z(self) -> np.ndarray:
        return self.state.z


def _initial_labels(n, alpha, init, z0, rng):
    if init == "random":
        return sample_crp(n, alpha, rng).z
    if init == "singleton":
        return np.arange(n)
    if init == "given":
        if z0 is None:
            raise ValueError("init='given' requires z0")
        return np.asarray(z0)
    raise ValueError(f"unknown init {init!r}")


def run_chain(g, h: DirmHyperParams, iters: int, seed, init: str = "random", z0=None,
              debug: bool = False, backend=None) -> ChainResult:
    """Run a di-IRM collapsed Gibbs chain; the trace includes the initial state."""
    if iters < 0:
        raise ValueError("iters must be nonnegative")
    a = _check_graph(g)
    rng = as_generator(seed)
    tt = pair_types(a)
    state = init_state(a, _initial_labels(len(a), h.alpha, init, z0, rng), h)
    out = ChainResult()
    out.trace.append(TraceRecord(0, state.K, log_joint(state, h), state.z.copy()))
    for it in range(1, iters + 1):
        state = gibbs_sweep(state, a, h, rng, debug=debug, backend=backend, _tt=tt)
        out.trace.append(TraceRecord(it, state.K, log_joint(state, h), state.z.copy()))
    out.state = state
    out.weights = map_weights(state.counts, h)
    return out


# -- asymmetric IRM baseline ---------------------------------------------------

@dataclass(frozen=True)
class IrmHyperParams:
    """CRP concentration and Beta(beta1, beta0) prior on each ordered cell's edge probability."""

    alpha: float = 1.0
    beta1: float = 1.0
    beta0: float = 1.0

    def __post_init__(self):
        if not (self.alpha > 0 and self.beta1 > 0 and self.beta0 > 0):
            raise ValueError("IRM hyperparameters must be positive")


@dataclass
class IrmState:
    z: np.ndarray
    sizes: np.ndarray
    M: np.ndarray          # (cap, cap, 2) ordered (no-edge, edge) counts
    K: int
    loglik: float = 0.0
    D: None = None

    def copy(self) -> "IrmState":
        return IrmState(self.z.copy(), self.sizes.copy(), self.M.copy(), self.K, self.loglik)

    @property
    def counts(self) -> np.ndarray:
        return self.M[:self.K, :self.K].copy()


def irm_counts(g, z) -> np.ndarray:
    """Ordered-cell counts ``[r, s] = (#non-edges, #edges)`` over pairs i != j."""
    a = _check_graph(g)
    n = len(a)
    z = _labels(z, n)
    K = int(z.max()) + 1 if n else 0
    N = np.zeros((K, K, 2), dtype=np.int64)
    off = ~np.eye(n, dtype=bool)
    ii, jj = np.nonzero(off)
    np.add.at(N, (z[ii], z[jj], a[ii, jj].astype(np.int64)), 1)
    return N


def irm_log_likelihood(N: np.ndarray, h: IrmHyperParams) -> float:
    b = np.array([h.beta0, h.beta1])
    x = N + b
    terms = gammaln(x).sum(axis=-1) - gammaln(x.sum(axis=-1))
    base = gammaln(b).sum() - gammaln(b.sum())
    return float((terms - base).sum())


def irm_init_state(g, z, h: IrmHyperParams) -> IrmState:
    a = _check_graph(g)
    n = len(a)
    z = _labels(z, n)
    N = irm_counts(a, z)
    K = len(N)
    cap = n + 1
    sizes = np.zeros(cap, dtype=np.int64)
    sizes[:K] = np.bincount(z, minlength=K)
    M = np.zeros((cap, cap, 2), dtype=np.int64)
    M[:K, :K] = N
    return IrmState(z.astype(np.int64), sizes, M, K, irm_log_likelihood(N, h))


def irm_conditional(i: int, state: IrmState, g, h: IrmHyperParams, backend=None) -> np.ndarray:
    tt = pair_types(_check_graph(g))
    s = state.copy()
    K = _kernels._sweep_py.irm_detach(int(i), tt, s.z, s.sizes, s.M, s.K)
    b = np.array([h.beta0, h.beta1])
    fin, ninf = _backend(backend).irm_logscores(int(i), tt, s.z, s.sizes, s.M, K, b)
    logcrp = np.append(np.log(s.sizes[:K]), np.log(h.alpha))
    p = _kernels._sweep_py.probabilities(fin, ninf, logcrp)
    # detaching may move a cluster into a freed slot; report in original label order
    others = np.arange(len(s.z)) != i
    slot_label = np.empty(K, dtype=np.int64)
    slot_label[s.z[others]] = state.z[others]
    return np.append(p[:K][np.argsort(slot_label)], p[K])


def irm_sweep(state: IrmState, g, h: IrmHyperParams, seed, debug: bool = False,
              backend=None, _tt=None) -> IrmState:
    rng = as_generator(seed)
    tt = _tt if _tt is not None else pair_types(_check_graph(g))
    s = state.copy()
    u = rng.random(len(s.z))
    b = np.array([h.beta0, h.beta1])
    s.K = int(_backend(backend).irm_sweep(tt, s.z, s.sizes, s.M, s.K, u, b, float(h.alpha)))
    _canonicalize(s)
    s.loglik = irm_log_likelihood(s.counts, h)
    if debug and not np.array_equal(irm_counts(g, s.z), s.counts):
        raise AssertionError("incremental IRM counts diverged from a recount")
    return s


def irm_edge_probabilities(N: np.ndarray, h: IrmHyperParams) -> np.ndarray:
    """MAP edge probability per ordered cell."""
    return (N[..., 1] + h.beta1) / (N.sum(axis=-1) + h.beta1 + h.beta0)


def run_chain_irm(g, h: IrmHyperParams, iters: int, seed, init: str = "random", z0=None,
                  debug: bool = False, backend=None) -> ChainResult:
    if iters < 0:
        raise ValueError("iters must be nonnegative")
    a = _check_graph(g)
    rng = as_generator(seed)
    tt = pair_types(a)
    state = irm_init_state(a, _initial_labels(len(a), h.alpha, init, z0, rng), h)
    out = ChainResult()
    out.trace.append(TraceRecord(0, state.K, log_joint(state, h), state.z.copy()))
    for it in range(1, iters + 1):
        state = irm_sweep(state, a, h, rng, debug=debug, backend=backend, _tt=tt)
        out.trace.append(TraceRecord(it, state.K, log_joint(state, h), state.z.copy()))
    out.state = state
    p = irm_edge_probabilities(state.counts, h)
    q = p.T
    out.weights = BlockWeights(np.stack([(1 - p) * (1 - q), (1 - p) * q, p * (1 - q), p * q], axis=2))
    return out


# -- evaluation ---------------------------------------------------------------

def _comb2(x):
    x = np.asarray(x, dtype=float)
    return x * (x - 1) / 2


def adjusted_rand_index(a, b) -> float:
    """Pair-counting adjusted Rand index (1.0 for identical partitions)."""
    a = np.asarray(a).reshape(-1)
    b = np.asarray(b).reshape(-1)
    if len(a) != len(b):
        raise ValueError("clusterings must have equal length")
    n = len(a)
    if n < 2:
        return 1.0
    a = compact_labels(a)
    b = compact_labels(b)
    table = np.zeros((a.max() + 1, b.max() + 1))
    np.add.at(table, (a, b), 1)
    index = _comb2(table).sum()
    sa = _comb2(table.sum(axis=1)).sum()
    sb = _comb2(table.sum(axis=0)).sum()
    expected = sa * sb / _comb2(n)
    top = (sa + sb) / 2
    if top == expected:
        return 1.0
    return float((index - expected) / (top - expected))
