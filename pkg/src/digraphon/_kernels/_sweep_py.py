"""Pure-Python (numpy) Gibbs kernels.

State layout shared with the compiled kernels:

``tt``     (n, n) int8, joint type ``2*G_ij + G_ji`` of each ordered pair
``z``      (n,) int64 labels in [0, K); -1 marks a detached vertex
``sizes``  (cap,) int64 cluster sizes
``M``      (cap, cap, 4) int64, di-IRM type counts seen from the row cluster
``D``      (cap, 3) int64, di-IRM within-cluster counts (00, 01+10, 11)
``N``      (cap, cap, 2) int64, IRM ordered-pair counts (no edge, edge)

Slots at index >= K are kept zeroed. Orientation of a di-IRM cell follows
the order of the clusters' smallest member.
"""
import numpy as np
from scipy.special import gammaln

LOG2 = float(np.log(2.0))
SWAP = np.array([0, 2, 1, 3])


def lbeta(m, b):
    """log B(m + b) over the last axis, skipping zero-parameter components.

    Returns ``(finite_part, n_forbidden)`` where ``n_forbidden`` flags a
    positive count on a zero-parameter component (log-likelihood -inf).
    """
    b = np.broadcast_to(b, np.shape(m))
    active = b > 0
    x = np.where(active, m + b, 0.0)
    fin = gammaln(np.where(active, x, 1.0)).sum(axis=-1) - gammaln(x.sum(axis=-1))
    bad = (~active & (np.asarray(m) > 0)).any(axis=-1)
    return fin, bad.astype(np.int64)


def type_counts(i, tt, z, K):
    """Counts of each joint type between vertex i and every cluster (i excluded)."""
    mask = z >= 0
    mask[i] = False
    return np.bincount(z[mask] * 4 + tt[i, mask], minlength=4 * K).reshape(K, 4)[:K]


def min_members(z, K):
    n = len(z)
    keys = np.full(K, n, dtype=np.int64)
    mask = z >= 0
    np.minimum.at(keys, z[mask], np.nonzero(mask)[0])
    return keys


def pick(fin, ninf, logcrp, u):
    """Normalize candidate scores and select one by inverse CDF at ``u``."""
    p = probabilities(fin, ninf, logcrp)
    cum = np.cumsum(p)
    r = int(np.searchsorted(cum, u * cum[-1], side="right"))
    if r >= len(p) or p[r] == 0:
        r = int(np.nonzero(p > 0)[0][-1]) if r >= len(p) else r
        while p[r] == 0:
            r -= 1
    return r


def probabilities(fin, ninf, logcrp):
    lo = ninf.min()
    logp = np.where(ninf == lo, fin + logcrp, -np.inf)
    p = np.exp(logp - logp.max())
    return p / p.sum()


def _drop_cluster(r, z, sizes, C, K, D=None):
    last = K - 1
    if r != last:
        z[z == last] = r
        C[r, :K] = C[last, :K]
        C[:K, r] = C[:K, last]
        C[r, r] = 0 if D is not None else C[last, last]
        sizes[r] = sizes[last]
        if D is not None:
            D[r] = D[last]
    C[last, :K] = 0
    C[:K, last] = 0
    sizes[last] = 0
    if D is not None:
        D[last] = 0
    return K - 1


# -- di-IRM --------------------------------------------------------------

def dirm_detach(i, tt, z, sizes, M, D, K):
    r = z[i]
    z[i] = -1
    T = type_counts(i, tt, z, K)
    M[r, :K] -= T
    M[:K, r] -= T[:, SWAP]
    M[r, r] = 0
    D[r] -= (T[r, 0], T[r, 1] + T[r, 2], T[r, 3])
    sizes[r] -= 1
    if sizes[r] == 0:
        K = _drop_cluster(r, z, sizes, M, K, D)
    return K


def dirm_attach(i, r, T, z, sizes, M, D, K):
    k0 = len(T)
    if r == K:
        K += 1
    M[r, :k0] += T
    M[:k0, r] += T[:, SWAP]
    M[r, r] = 0
    if r < k0:
        D[r] += (T[r, 0], T[r, 1] + T[r, 2], T[r, 3])
    sizes[r] += 1
    z[i] = r
    return K


def dirm_logscores(i, tt, z, sizes, M, D, K, beta, beta_sw, beta_diag):
    """Log-likelihood change for each candidate cluster of detached vertex i.

    Returns ``(fin, ninf)`` of length K + 1; the last entry is a new cluster.
    """
    T = type_counts(i, tt, z, K)
    return _dirm_scores(i, T, min_members(z, K), M, D, K, beta, beta_sw, beta_diag)


def _dirm_scores(i, T, keys, M, D, K, beta, beta_sw, beta_diag):
    fin = np.zeros(K + 1)
    ninf = np.zeros(K + 1, dtype=np.int64)
    if K:
        Mk = M[:K, :K]
        old_first = keys[:, None] < keys[None, :]
        new_first = np.minimum(keys, i)[:, None] < keys[None, :]
        fo, no = lbeta(Mk, np.where(old_first[..., None], beta, beta_sw))
        fn, nn = lbeta(Mk + T[None, :, :], np.where(new_first[..., None], beta, beta_sw))
        off = ~np.eye(K, dtype=bool)
        fin[:K] = np.where(off, fn - fo, 0.0).sum(axis=1)
        ninf[:K] = np.where(off, nn - no, 0).sum(axis=1)

        Ts = np.stack([T[:, 0], T[:, 1] + T[:, 2], T[:, 3]], axis=1)
        fdn, ndn = lbeta(D[:K] + Ts, beta_diag)
        fdo, ndo = lbeta(D[:K], beta_diag)
        fin[:K] += fdn - fdo - Ts[:, 1] * LOG2
        ninf[:K] += ndn - ndo

        first = i < keys
        f, nf = lbeta(T, np.where(first[:, None], beta, beta_sw))
        f0, _ = lbeta(np.zeros(4), beta)
        fin[K] = (f - f0).sum()
        ninf[K] = nf.sum()
    return fin, ninf


def dirm_sweep(tt, z, sizes, M, D, K, u, beta, beta_sw, beta_diag, alpha):
    """Resample every vertex once in index order; returns the new cluster count."""
    log_alpha = np.log(alpha)
    for i in range(len(z)):
        K = dirm_detach(i, tt, z, sizes, M, D, K)
        T = type_counts(i, tt, z, K)
        fin, ninf = _dirm_scores(i, T, min_members(z, K), M, D, K, beta, beta_sw, beta_diag)
        logcrp = np.append(np.log(sizes[:K]), log_alpha)
        r = pick(fin, ninf, logcrp, u[i])
        K = dirm_attach(i, r, T, z, sizes, M, D, K)
    return K


# -- asymmetric IRM ------------------------------------------------------

def _out_in(T):
    out = np.stack([T[:, 0] + T[:, 1], T[:, 2] + T[:, 3]], axis=1)
    inn = np.stack([T[:, 0] + T[:, 2], T[:, 1] + T[:, 3]], axis=1)
    return out, inn


def irm_detach(i, tt, z, sizes, N, K):
    r = z[i]
    z[i] = -1
    O, I = _out_in(type_counts(i, tt, z, K))
    rr = N[r, r] - O[r] - I[r]
    N[r, :K] -= O
    N[:K, r] -= I
    N[r, r] = rr
    sizes[r] -= 1
    if sizes[r] == 0:
        K = _drop_cluster(r, z, sizes, N, K)
    return K


def irm_attach(i, r, T, z, sizes, N, K):
    k0 = len(T)
    O, I = _out_in(T)
    if r == K:
        K += 1
    rr = N[r, r] + (O[r] + I[r] if r < k0 else 0)
    N[r, :k0] += O
    N[:k0, r] += I
    N[r, r] = rr
    sizes[r] += 1
    z[i] = r
    return K


def irm_logscores(i, tt, z, sizes, N, K, b):
    T = type_counts(i, tt, z, K)
    return _irm_scores(T, N, K, b)


def _irm_scores(T, N, K, b):
    fin = np.zeros(K + 1)
    if K:
        O, I = _out_in(T)
        Nk = N[:K, :K]
        f_out = lbeta(Nk + O[None, :, :], b)[0] - lbeta(Nk, b)[0]
        f_in = lbeta(Nk + I[:, None, :], b)[0] - lbeta(Nk, b)[0]
        off = ~np.eye(K, dtype=bool)
        fin[:K] = np.where(off, f_out, 0.0).sum(axis=1) + np.where(off, f_in, 0.0).sum(axis=0)
        diag = Nk[np.arange(K), np.arange(K)]
        fin[:K] += lbeta(diag + O + I, b)[0] - lbeta(diag, b)[0]
        f0 = lbeta(np.zeros(2), b)[0]
        fin[K] = (lbeta(O, b)[0] + lbeta(I, b)[0] - 2 * f0).sum()
    return fin, np.zeros(K + 1, dtype=np.int64)


def irm_sweep(tt, z, sizes, N, K, u, b, alpha):
    log_alpha = np.log(alpha)
    for i in range(len(z)):
        K = irm_detach(i, tt, z, sizes, N, K)
        T = type_counts(i, tt, z, K)
        fin, ninf = _irm_scores(T, N, K, b)
        logcrp = np.append(np.log(sizes[:K]), log_alpha)
        r = pick(fin, ninf, logcrp, u[i])
        K = irm_attach(i, r, T, z, sizes, N, K)
    return K
