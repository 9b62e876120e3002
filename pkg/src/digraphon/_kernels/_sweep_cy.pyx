# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled Gibbs kernels; same state layout and semantics as ``_sweep_py``."""
import numpy as np

from libc.math cimport lgamma, exp, log, INFINITY
from libc.stdint cimport int64_t, int8_t

ctypedef int64_t i64

cdef double LOG2 = log(2.0)
cdef int SW[4]
SW[0] = 0
SW[1] = 2
SW[2] = 1
SW[3] = 3


cdef inline double lb4(const i64* m, const i64* t, const double* b, int swap, int* bad) noexcept nogil:
    # log B(m + t + b') with b' = b or swapped b; zero-parameter components skipped
    cdef double s = 0.0, tot = 0.0, x, bk
    cdef i64 c
    cdef int k
    for k in range(4):
        bk = b[SW[k]] if swap else b[k]
        c = m[k] + (t[k] if t != NULL else 0)
        if bk > 0:
            x = c + bk
            s += lgamma(x)
            tot += x
        elif c > 0:
            bad[0] += 1
    return s - lgamma(tot)


cdef inline double lb3(i64 a, i64 m, i64 c, const double* b, int* bad) noexcept nogil:
    cdef double s = 0.0, tot = 0.0, x
    cdef i64 v[3]
    cdef int k
    v[0] = a
    v[1] = m
    v[2] = c
    for k in range(3):
        if b[k] > 0:
            x = v[k] + b[k]
            s += lgamma(x)
            tot += x
        elif v[k] > 0:
            bad[0] += 1
    return s - lgamma(tot)


cdef inline double lb2(double n0, double n1, const double* b) noexcept nogil:
    return lgamma(n0 + b[0]) + lgamma(n1 + b[1]) - lgamma(n0 + n1 + b[0] + b[1])


cdef void type_counts(Py_ssize_t i, const int8_t[:, ::1] tt, const i64[::1] z,
                      Py_ssize_t K, i64[:, ::1] T) noexcept nogil:
    cdef Py_ssize_t j, r, n = z.shape[0]
    for r in range(K):
        T[r, 0] = 0
        T[r, 1] = 0
        T[r, 2] = 0
        T[r, 3] = 0
    for j in range(n):
        if j != i and z[j] >= 0:
            T[z[j], tt[i, j]] += 1


cdef void min_members(const i64[::1] z, Py_ssize_t K, i64[::1] keys) noexcept nogil:
    cdef Py_ssize_t j, n = z.shape[0]
    for j in range(K):
        keys[j] = n
    for j in range(n):
        if z[j] >= 0 and j < keys[z[j]]:
            keys[z[j]] = j


cdef Py_ssize_t pick(double* fin, int* ninf, double* logcrp, Py_ssize_t m, double u,
                     double* p) noexcept nogil:
    cdef Py_ssize_t r, last = -1
    cdef int lo = ninf[0]
    cdef double mx = -INFINITY, total = 0.0, target, cum
    for r in range(m):
        if ninf[r] < lo:
            lo = ninf[r]
    for r in range(m):
        if ninf[r] == lo and fin[r] + logcrp[r] > mx:
            mx = fin[r] + logcrp[r]
    for r in range(m):
        if ninf[r] == lo:
            p[r] = exp(fin[r] + logcrp[r] - mx)
        else:
            p[r] = 0.0
        total += p[r]
    cum = 0.0
    for r in range(m):
        p[r] /= total
    total = 0.0
    for r in range(m):
        total += p[r]
    target = u * total
    cum = 0.0
    for r in range(m):
        cum += p[r]
        if p[r] > 0:
            last = r
        if cum > target:
            return r
    return last


cdef Py_ssize_t drop_cluster(Py_ssize_t r, i64[::1] z, i64[::1] sizes, i64[:, :, ::1] C,
                             Py_ssize_t K, Py_ssize_t width, i64[:, ::1] D, int has_d) noexcept nogil:
    cdef Py_ssize_t last = K - 1, s, k, j, n = z.shape[0]
    cdef i64 keep[2]
    if r != last:
        for j in range(n):
            if z[j] == last:
                z[j] = r
        for k in range(width):
            keep[k] = C[last, last, k]
        for s in range(K):
            for k in range(width):
                C[r, s, k] = C[last, s, k]
                C[s, r, k] = C[s, last, k]
        for k in range(width):
            C[r, r, k] = 0 if has_d else keep[k]
        sizes[r] = sizes[last]
        if has_d:
            for k in range(3):
                D[r, k] = D[last, k]
    for s in range(K):
        for k in range(width):
            C[last, s, k] = 0
            C[s, last, k] = 0
    sizes[last] = 0
    if has_d:
        for k in range(3):
            D[last, k] = 0
    return K - 1


cdef Py_ssize_t dirm_detach(Py_ssize_t i, const int8_t[:, ::1] tt, i64[::1] z, i64[::1] sizes,
                            i64[:, :, ::1] M, i64[:, ::1] D, Py_ssize_t K, i64[:, ::1] T) noexcept nogil:
    cdef Py_ssize_t r = z[i], s
    cdef int k
    z[i] = -1
    type_counts(i, tt, z, K, T)
    for s in range(K):
        if s != r:
            for k in range(4):
                M[r, s, k] -= T[s, k]
                M[s, r, k] -= T[s, SW[k]]
    D[r, 0] -= T[r, 0]
    D[r, 1] -= T[r, 1] + T[r, 2]
    D[r, 2] -= T[r, 3]
    sizes[r] -= 1
    if sizes[r] == 0:
        K = drop_cluster(r, z, sizes, M, K, 4, D, 1)
    return K


cdef Py_ssize_t dirm_attach(Py_ssize_t i, Py_ssize_t r, i64[:, ::1] T, i64[::1] z, i64[::1] sizes,
                            i64[:, :, ::1] M, i64[:, ::1] D, Py_ssize_t K) noexcept nogil:
    cdef Py_ssize_t s, k0 = K
    cdef int k
    if r == K:
        K += 1
    for s in range(k0):
        if s != r:
            for k in range(4):
                M[r, s, k] += T[s, k]
                M[s, r, k] += T[s, SW[k]]
    if r < k0:
        D[r, 0] += T[r, 0]
        D[r, 1] += T[r, 1] + T[r, 2]
        D[r, 2] += T[r, 3]
    sizes[r] += 1
    z[i] = r
    return K


cdef void dirm_scores(Py_ssize_t i, i64[:, ::1] T, i64[::1] keys, i64[:, :, ::1] M,
                      i64[:, ::1] D, Py_ssize_t K, const double* beta, const double* bdiag,
                      double* fin, int* ninf) noexcept nogil:
    cdef Py_ssize_t r, s
    cdef int bad_new, bad_old, bad
    cdef i64 kr, ts
    cdef double acc, f0
    cdef i64 zero4[4]
    zero4[0] = 0
    zero4[1] = 0
    zero4[2] = 0
    zero4[3] = 0
    for r in range(K):
        acc = 0.0
        bad_new = 0
        bad_old = 0
        kr = keys[r] if keys[r] < i else i
        for s in range(K):
            if s == r:
                continue
            acc += lb4(&M[r, s, 0], &T[s, 0], beta, not (kr < keys[s]), &bad_new)
            acc -= lb4(&M[r, s, 0], NULL, beta, not (keys[r] < keys[s]), &bad_old)
        ts = T[r, 1] + T[r, 2]
        acc += lb3(D[r, 0] + T[r, 0], D[r, 1] + ts, D[r, 2] + T[r, 3], bdiag, &bad_new)
        acc -= lb3(D[r, 0], D[r, 1], D[r, 2], bdiag, &bad_old)
        acc -= ts * LOG2
        fin[r] = acc
        ninf[r] = bad_new - bad_old
    bad = 0
    f0 = lb4(zero4, NULL, beta, 0, &bad)
    acc = 0.0
    bad = 0
    for s in range(K):
        acc += lb4(&T[s, 0], NULL, beta, not (i < keys[s]), &bad) - f0
    fin[K] = acc
    ninf[K] = bad


def dirm_logscores(Py_ssize_t i, const int8_t[:, ::1] tt, i64[::1] z, i64[::1] sizes,
                   i64[:, :, ::1] M, i64[:, ::1] D, Py_ssize_t K,
                   const double[::1] beta, const double[::1] beta_sw, const double[::1] beta_diag):
    cdef i64[:, ::1] T = np.zeros((K + 1, 4), dtype=np.int64)
    cdef i64[::1] keys = np.zeros(K + 1, dtype=np.int64)
    fin = np.zeros(K + 1)
    ninf = np.zeros(K + 1, dtype=np.intc)
    cdef double[::1] fv = fin
    cdef int[::1] nv = ninf
    type_counts(i, tt, z, K, T)
    min_members(z, K, keys)
    dirm_scores(i, T, keys, M, D, K, &beta[0], &beta_diag[0], &fv[0], &nv[0])
    return fin, ninf.astype(np.int64)


def dirm_sweep(const int8_t[:, ::1] tt, i64[::1] z, i64[::1] sizes, i64[:, :, ::1] M,
               i64[:, ::1] D, Py_ssize_t K, const double[::1] u,
               const double[::1] beta, const double[::1] beta_sw, const double[::1] beta_diag,
               double alpha):
    cdef Py_ssize_t n = z.shape[0], cap = sizes.shape[0], i, r
    cdef i64[:, ::1] T = np.zeros((cap, 4), dtype=np.int64)
    cdef i64[::1] keys = np.zeros(cap, dtype=np.int64)
    cdef double[::1] fin = np.zeros(cap + 1)
    cdef double[::1] logcrp = np.zeros(cap + 1)
    cdef double[::1] p = np.zeros(cap + 1)
    cdef int[::1] ninf = np.zeros(cap + 1, dtype=np.intc)
    cdef double log_alpha = log(alpha)
    with nogil:
        for i in range(n):
            K = dirm_detach(i, tt, z, sizes, M, D, K, T)
            type_counts(i, tt, z, K, T)
            min_members(z, K, keys)
            dirm_scores(i, T, keys, M, D, K, &beta[0], &beta_diag[0], &fin[0], &ninf[0])
            for r in range(K):
                logcrp[r] = log(<double>sizes[r])
            logcrp[K] = log_alpha
            r = pick(&fin[0], &ninf[0], &logcrp[0], K + 1, u[i], &p[0])
            K = dirm_attach(i, r, T, z, sizes, M, D, K)
    return K


# -- asymmetric IRM ------------------------------------------------------

cdef inline void out_in(i64[:, ::1] T, Py_ssize_t s, double* o, double* inn) noexcept nogil:
    o[0] = T[s, 0] + T[s, 1]
    o[1] = T[s, 2] + T[s, 3]
    inn[0] = T[s, 0] + T[s, 2]
    inn[1] = T[s, 1] + T[s, 3]


cdef Py_ssize_t irm_detach(Py_ssize_t i, const int8_t[:, ::1] tt, i64[::1] z, i64[::1] sizes,
                           i64[:, :, ::1] N, Py_ssize_t K, i64[:, ::1] T, i64[:, ::1] Dummy) noexcept nogil:
    cdef Py_ssize_t r = z[i], s
    cdef double o[2]
    cdef double inn[2]
    z[i] = -1
    type_counts(i, tt, z, K, T)
    for s in range(K):
        out_in(T, s, o, inn)
        if s == r:
            N[r, r, 0] -= <i64>(o[0] + inn[0])
            N[r, r, 1] -= <i64>(o[1] + inn[1])
        else:
            N[r, s, 0] -= <i64>o[0]
            N[r, s, 1] -= <i64>o[1]
            N[s, r, 0] -= <i64>inn[0]
            N[s, r, 1] -= <i64>inn[1]
    sizes[r] -= 1
    if sizes[r] == 0:
        K = drop_cluster(r, z, sizes, N, K, 2, Dummy, 0)
    return K


cdef Py_ssize_t irm_attach(Py_ssize_t i, Py_ssize_t r, i64[:, ::1] T, i64[::1] z, i64[::1] sizes,
                           i64[:, :, ::1] N, Py_ssize_t K) noexcept nogil:
    cdef Py_ssize_t s, k0 = K
    cdef double o[2]
    cdef double inn[2]
    if r == K:
        K += 1
    for s in range(k0):
        out_in(T, s, o, inn)
        if s == r:
            N[r, r, 0] += <i64>(o[0] + inn[0])
            N[r, r, 1] += <i64>(o[1] + inn[1])
        else:
            N[r, s, 0] += <i64>o[0]
            N[r, s, 1] += <i64>o[1]
            N[s, r, 0] += <i64>inn[0]
            N[s, r, 1] += <i64>inn[1]
    sizes[r] += 1
    z[i] = r
    return K


cdef void irm_scores(i64[:, ::1] T, i64[:, :, ::1] N, Py_ssize_t K, const double* b,
                     double* fin, int* ninf) noexcept nogil:
    cdef Py_ssize_t r, s
    cdef double acc, f0
    cdef double o[2]
    cdef double inn[2]
    f0 = lb2(0, 0, b)
    for r in range(K):
        acc = 0.0
        for s in range(K):
            out_in(T, s, o, inn)
            if s == r:
                acc += lb2(N[r, r, 0] + o[0] + inn[0], N[r, r, 1] + o[1] + inn[1], b)
                acc -= lb2(N[r, r, 0], N[r, r, 1], b)
            else:
                acc += lb2(N[r, s, 0] + o[0], N[r, s, 1] + o[1], b) - lb2(N[r, s, 0], N[r, s, 1], b)
                acc += lb2(N[s, r, 0] + inn[0], N[s, r, 1] + inn[1], b) - lb2(N[s, r, 0], N[s, r, 1], b)
        fin[r] = acc
        ninf[r] = 0
    acc = 0.0
    for s in range(K):
        out_in(T, s, o, inn)
        acc += lb2(o[0], o[1], b) + lb2(inn[0], inn[1], b) - 2 * f0
    fin[K] = acc
    ninf[K] = 0


def irm_logscores(Py_ssize_t i, const int8_t[:, ::1] tt, i64[::1] z, i64[::1] sizes,
                  i64[:, :, ::1] N, Py_ssize_t K, const double[::1] b):
    cdef i64[:, ::1] T = np.zeros((K + 1, 4), dtype=np.int64)
    fin = np.zeros(K + 1)
    ninf = np.zeros(K + 1, dtype=np.intc)
    cdef double[::1] fv = fin
    cdef int[::1] nv = ninf
    type_counts(i, tt, z, K, T)
    irm_scores(T, N, K, &b[0], &fv[0], &nv[0])
    return fin, ninf.astype(np.int64)


def irm_sweep(const int8_t[:, ::1] tt, i64[::1] z, i64[::1] sizes, i64[:, :, ::1] N,
              Py_ssize_t K, const double[::1] u, const double[::1] b, double alpha):
    cdef Py_ssize_t n = z.shape[0], cap = sizes.shape[0], i, r
    cdef i64[:, ::1] T = np.zeros((cap, 4), dtype=np.int64)
    cdef i64[:, ::1] dummy = np.zeros((1, 3), dtype=np.int64)
    cdef double[::1] fin = np.zeros(cap + 1)
    cdef double[::1] logcrp = np.zeros(cap + 1)
    cdef double[::1] p = np.zeros(cap + 1)
    cdef int[::1] ninf = np.zeros(cap + 1, dtype=np.intc)
    cdef double log_alpha = log(alpha)
    with nogil:
        for i in range(n):
            K = irm_detach(i, tt, z, sizes, N, K, T, dummy)
            type_counts(i, tt, z, K, T)
            irm_scores(T, N, K, &b[0], &fin[0], &ninf[0])
            for r in range(K):
                logcrp[r] = log(<double>sizes[r])
            logcrp[K] = log_alpha
            r = pick(&fin[0], &ninf[0], &logcrp[0], K + 1, u[i], &p[0])
            K = irm_attach(i, r, T, z, sizes, N, K)
    return K
