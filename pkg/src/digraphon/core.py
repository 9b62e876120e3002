"""Step-function digraphons, exact sampling and structural predicates.

A digraphon here is a block model on a finite partition of [0, 1]: each
cell (r, s) carries the joint probabilities of the four edge-pair types
``(G_ij, G_ji)`` in the order 00, 01, 10, 11, and each class carries a
0/1 self-loop indicator.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

PAIR_TYPES = ("00", "01", "10", "11")
# index permutation exchanging the roles of i and j: 01 <-> 10
SWAP = np.array([0, 2, 1, 3])

NORM_TOL = 1e-12
RENORM_TOL = 1e-9
MAX_SEED = 2**64


class InvalidDigraphon(ValueError):
    """Raised when a digraphon fails validation."""

    def __init__(self, violations):
        self.violations = list(violations)
        lines = "; ".join(str(v) for v in self.violations[:5])
        more = len(self.violations) - 5
        if more > 0:
            lines += f"; ... ({more} more)"
        super().__init__(f"invalid digraphon: {lines}")


def as_generator(seed) -> np.random.Generator:
    """Return a PCG64 generator for an integer seed (or pass a Generator through)."""
    if isinstance(seed, np.random.Generator):
        return seed
    if isinstance(seed, (np.random.SeedSequence,)):
        return np.random.default_rng(seed)
    seed = int(seed)
    if not 0 <= seed < MAX_SEED:
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return np.random.default_rng(seed)


class Violation(NamedTuple):
    cell: tuple
    condition: str
    detail: str = ""

    def __str__(self):
        where = "global" if not self.cell else "cell " + ",".join(map(str, self.cell))
        text = f"{where}: {self.condition}"
        return f"{text} ({self.detail})" if self.detail else text


@dataclass
class StepDigraphon:
    """Block digraphon on the partition of [0, 1] induced by ``cuts``.

    ``weights[r, s]`` is the 4-vector ``(w00, w01, w10, w11)`` for a vertex
    in class ``r`` paired with a vertex in class ``s``; ``selfloop[r]`` is
    0 or 1.
    """

    cuts: np.ndarray
    weights: np.ndarray
    selfloop: np.ndarray = field(default=None)

    def __post_init__(self):
        self.cuts = np.asarray(self.cuts, dtype=float).reshape(-1)
        self.weights = np.asarray(self.weights, dtype=float)
        if self.selfloop is None:
            self.selfloop = np.zeros(len(self.cuts) + 1, dtype=np.int64)
        self.selfloop = np.asarray(self.selfloop, dtype=np.int64).reshape(-1)

    @property
    def k(self) -> int:
        return len(self.cuts) + 1

    @property
    def proportions(self) -> np.ndarray:
        edges = np.concatenate([[0.0], self.cuts, [1.0]])
        return np.diff(edges)

    def class_of(self, x):
        """Class index for points in [0, 1]; intervals are [c_t, c_{t+1})."""
        x = np.asarray(x, dtype=float)
        if np.any((x < 0) | (x > 1)) or np.any(np.isnan(x)):
            raise ValueError("latent positions must lie in [0, 1]")
        return np.searchsorted(self.cuts, x, side="right")

    def evaluate(self, x, y) -> np.ndarray:
        return evaluate(self, x, y)

    def validate(self) -> list[Violation]:
        return validate(self)

    def check(self) -> "StepDigraphon":
        violations = validate(self)
        if violations:
            raise InvalidDigraphon(violations)
        return self

    def with_loops(self, value: int) -> "StepDigraphon":
        return StepDigraphon(self.cuts.copy(), self.weights.copy(),
                             np.full(self.k, int(value), dtype=np.int64))


class LatentSample(NamedTuple):
    u: np.ndarray
    graph: np.ndarray


def validate(d: StepDigraphon) -> list[Violation]:
    """Check every digraphon condition; an empty list means valid."""
    out: list[Violation] = []
    k = d.k
    cuts, w = d.cuts, d.weights

    if np.any(~np.isfinite(cuts)) or np.any((cuts <= 0) | (cuts >= 1)):
        out.append(Violation((), "cuts outside (0,1)"))
    if np.any(np.diff(cuts) <= 0):
        out.append(Violation((), "cuts not strictly increasing"))
    if w.shape != (k, k, 4):
        out.append(Violation((), "weights shape", f"expected {(k, k, 4)}, got {w.shape}"))
        return out
    if d.selfloop.shape != (k,) or np.any((d.selfloop != 0) & (d.selfloop != 1)):
        out.append(Violation((), "selfloop must be a 0/1 vector of length k"))

    bad = ~np.isfinite(w) | (w < 0) | (w > 1)
    for r, s in zip(*np.nonzero(bad.any(axis=2))):
        out.append(Violation((int(r), int(s)), "entry outside [0,1]"))

    total = w.sum(axis=2)
    for r, s in zip(*np.nonzero(np.abs(total - 1.0) > NORM_TOL)):
        out.append(Violation((int(r), int(s)), "sum != 1", f"sum={float(total[r, s])!r}"))

    wt = w.transpose(1, 0, 2)[:, :, SWAP]
    asym = np.abs(w - wt) > NORM_TOL
    names = ("w00 symmetry", "cross-symmetry w01/w10", "cross-symmetry w01/w10",
             "w11 symmetry")
    for r, s in zip(*np.nonzero(asym.any(axis=2))):
        if r == s:
            out.append(Violation((int(r), int(s)), "diagonal w01 != w10"))
        elif r < s:
            c = int(np.argmax(asym[r, s]))
            out.append(Violation((int(r), int(s)), names[c], f"against cell {s},{r}"))
    return out


def evaluate(d: StepDigraphon, x, y) -> np.ndarray:
    """The 4-tuple ``(W00, W01, W10, W11)`` at ``(x, y)``.

    Vectorizes over array arguments; the 4-tuple is the last axis.
    """
    return d.weights[d.class_of(x), d.class_of(y)]


def _draw_types(probs: np.ndarray, v: np.ndarray) -> np.ndarray:
    # types with zero mass have empty intervals since cum repeats exactly
    cum = np.cumsum(probs, axis=-1)
    t = (v[:, None] * cum[:, 3:4] >= cum).sum(axis=1)
    over = t > 3
    if over.any():
        for idx in np.nonzero(over)[0]:
            t[idx] = np.nonzero(probs[idx] > 0)[0][-1]
    return t


def sample_digraph(d: StepDigraphon, n: int, seed) -> LatentSample:
    """Draw G(n, W): latents first, then one categorical per pair i<j in row-major order."""
    n = int(n)
    if n < 0:
        raise ValueError("n must be nonnegative")
    rng = as_generator(seed)
    u = rng.random(n)
    cls = d.class_of(u)
    adj = np.zeros((n, n), dtype=np.uint8)
    iu, ju = np.triu_indices(n, k=1)
    v = rng.random(len(iu))
    if len(iu):
        t = _draw_types(d.weights[cls[iu], cls[ju]], v)
        adj[iu, ju] = t >> 1
        adj[ju, iu] = t & 1
    adj[np.arange(n), np.arange(n)] = d.selfloop[cls]
    return LatentSample(u, adj)


def pair_types(adj: np.ndarray) -> np.ndarray:
    """Matrix of joint types ``2*G_ij + G_ji`` (0..3 for 00, 01, 10, 11)."""
    adj = np.asarray(adj, dtype=np.int8)
    return (2 * adj + adj.T).astype(np.int8)


# -- constructors -----------------------------------------------------------

def _default_cuts(k: int, cuts) -> np.ndarray:
    if cuts is None:
        return np.arange(1, k) / k
    cuts = np.asarray(cuts, dtype=float).reshape(-1)
    if len(cuts) != k - 1:
        raise ValueError(f"{k} classes need {k - 1} cuts, got {len(cuts)}")
    return cuts


def _square(a, name) -> np.ndarray:
    a = np.atleast_2d(np.asarray(a, dtype=float))
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"{name} must be a square k x k array")
    if np.any(~np.isfinite(a)) or np.any((a < 0) | (a > 1)):
        raise ValueError(f"{name} entries must lie in [0, 1]")
    return a


def symmetric_fill(upper: np.ndarray) -> np.ndarray:
    """Complete a (k, k, 4) weight array from its upper triangle (incl. diagonal)."""
    w = np.array(upper, dtype=float)
    k = w.shape[0]
    for r in range(k):
        for s in range(r):
            w[r, s] = w[s, r][SWAP]
    return w


def from_asymmetric(f, cuts=None) -> StepDigraphon:
    """Digraphon inducing independent edge directions with ``P(i->j) = f``."""
    f = _square(f, "f")
    k = f.shape[0]
    p = f
    q = f.T
    w = np.stack([(1 - p) * (1 - q), (1 - p) * q, p * (1 - q), p * q], axis=2)
    return StepDigraphon(_default_cuts(k, cuts), w).check()


def undirected_from_graphon(g, cuts=None) -> StepDigraphon:
    g = _square(g, "g")
    if not np.array_equal(g, g.T):
        raise ValueError("graphon must be symmetric")
    z = np.zeros_like(g)
    w = np.stack([1 - g, z, z, g], axis=2)
    return StepDigraphon(_default_cuts(g.shape[0], cuts), w).check()


def tournament_from_kernel(t, cuts=None) -> StepDigraphon:
    """Tournament digraphon from an anti-symmetric kernel ``t[r,s] = 1 - t[s,r]``."""
    t = _square(t, "t")
    if np.any(np.abs(t + t.T - 1) > NORM_TOL):
        raise ValueError("tournament kernel must satisfy t[r,s] + t[s,r] = 1")
    k = t.shape[0]
    w = np.zeros((k, k, 4))
    for r in range(k):
        for s in range(r, k):
            p = 0.5 if r == s else t[r, s]
            w[r, s] = (0.0, 1 - p, p, 0.0)
    return StepDigraphon(_default_cuts(k, cuts), symmetric_fill(w)).check()


def _ordered_blocks(k: int, above, diag) -> StepDigraphon:
    if int(k) < 1:
        raise ValueError("need at least one class")
    k = int(k)
    w = np.zeros((k, k, 4))
    for r in range(k):
        w[r, r] = diag
        for s in range(r + 1, k):
            w[r, s] = above
    return StepDigraphon(_default_cuts(k, None), symmetric_fill(w)).check()


def linear_order_digraphon(k: int) -> StepDigraphon:
    """k-class approximation of W10 = 1{x < y}; within a class a fair coin sets the direction."""
    return _ordered_blocks(k, (0.0, 0.0, 1.0, 0.0), (0.0, 0.5, 0.5, 0.0))


def generic_dag_digraphon(k: int) -> StepDigraphon:
    """k-class approximation of the generic DAG digraphon (W00 = 1/2, W10 = 1/2 on x < y)."""
    return _ordered_blocks(k, (0.5, 0.0, 0.5, 0.0), (1.0, 0.0, 0.0, 0.0))


def poset_block_digraphon(loops: bool = False) -> StepDigraphon:
    """Three-class poset block model with cuts 1/4 and 3/4.

    With ``loops=True`` every vertex carries a self-loop, giving the
    reflexive reading of the order relation.
    """
    w = np.zeros((3, 3, 4))
    w10 = {(0, 1): 0.5, (1, 2): 0.5, (0, 2): 1.0}
    for r in range(3):
        w[r, r] = (1.0, 0.0, 0.0, 0.0)
        for s in range(r + 1, 3):
            p = w10[r, s]
            w[r, s] = (1 - p, 0.0, p, 0.0)
    loop = np.full(3, 1 if loops else 0)
    return StepDigraphon([0.25, 0.75], symmetric_fill(w), loop).check()


def erdos_renyi_digraphon() -> StepDigraphon:
    return undirected_from_graphon([[0.5]])


def generic_tournament_digraphon() -> StepDigraphon:
    return tournament_from_kernel([[0.5]])


def half_digraphon() -> StepDigraphon:
    """Two equal classes: mutual-or-none within a class, exactly one direction across."""
    w = np.zeros((2, 2, 4))
    w[0, 0] = w[1, 1] = (0.5, 0.0, 0.0, 0.5)
    w[0, 1] = w[1, 0] = (0.0, 0.5, 0.5, 0.0)
    return StepDigraphon([0.5], w).check()


def builtin(name: str, resolution: int | None = None, poset_loops: bool = False) -> StepDigraphon:
    if name == "er":
        return erdos_renyi_digraphon()
    if name == "tournament":
        return generic_tournament_digraphon()
    if name == "linear-order":
        return linear_order_digraphon(resolution or 64)
    if name == "dag":
        return generic_dag_digraphon(resolution or 8)
    if name == "poset":
        return poset_block_digraphon(loops=poset_loops)
    if name == "half":
        return half_digraphon()
    raise KeyError(f"unknown builtin digraphon {name!r}")


BUILTINS = ("er", "tournament", "linear-order", "dag", "poset", "half")


# -- structural predicates --------------------------------------------------

def _adj(g) -> np.ndarray:
    a = np.asarray(g)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("adjacency must be a square matrix")
    return a.astype(bool)


def is_undirected(g) -> bool:
    a = _adj(g)
    return bool(np.array_equal(a, a.T) and not a.diagonal().any())


def is_tournament(g) -> bool:
    a = _adj(g)
    if a.diagonal().any():
        return False
    off = ~np.eye(len(a), dtype=bool)
    return bool(np.all((a ^ a.T)[off]))


def is_dag(g) -> bool:
    """Kahn elimination; a self-loop counts as a cycle."""
    a = _adj(g)
    n = len(a)
    if a.diagonal().any():
        return False
    indeg = a.sum(axis=0).astype(int)
    queue = deque(np.nonzero(indeg == 0)[0].tolist())
    seen = 0
    while queue:
        v = queue.popleft()
        seen += 1
        for w in np.nonzero(a[v])[0]:
            indeg[w] -= 1
            if indeg[w] == 0:
                queue.append(int(w))
    return seen == n


def is_transitively_closed(g) -> bool:
    a = _adj(g).astype(np.int64)
    two_step = (a @ a) > 0
    return bool(np.all(~two_step | (a > 0)))


def transitive_closure(g) -> np.ndarray:
    """Reachability by paths of length >= 1 (Warshall)."""
    r = _adj(g).copy()
    for k in range(len(r)):
        r |= r[:, k, None] & r[None, k, :]
    return r.astype(np.uint8)


def remove_loops(g) -> np.ndarray:
    a = np.array(g, dtype=np.uint8)
    np.fill_diagonal(a, 0)
    return a


def intransitive_fraction(g) -> float:
    """Fraction of vertex triples that form a directed 3-cycle."""
    a = _adj(g).astype(np.int64)
    n = len(a)
    if n < 3:
        return 0.0
    cyc = np.trace(a @ a @ a) // 3
    return float(cyc) / (n * (n - 1) * (n - 2) / 6)


def resort_by_latents(s: LatentSample) -> np.ndarray:
    """Conjugate the adjacency by the permutation sorting ``u`` (stable)."""
    perm = np.argsort(s.u, kind="stable")
    return np.asarray(s.graph)[np.ix_(perm, perm)]
