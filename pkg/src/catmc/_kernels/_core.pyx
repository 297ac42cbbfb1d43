# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: fused softmax / likelihood / gradient loops.

Mirrors ``_fallback`` but avoids the (n, K) temporaries of the numpy
route; per-observation work stays in registers.
"""

import numpy as np

from libc.math cimport exp, log


def logit_probs(const double[::1] alphas, const double[::1] betas,
                const double[::1] x):
    cdef Py_ssize_t n = x.shape[0], K = alphas.shape[0]
    out = np.empty((n, K), dtype=np.float64)
    cdef double[:, ::1] P = out
    cdef Py_ssize_t i, k
    cdef double z, zmax, s
    for i in range(n):
        zmax = alphas[0] + betas[0] * x[i]
        for k in range(1, K):
            z = alphas[k] + betas[k] * x[i]
            if z > zmax:
                zmax = z
        s = 0.0
        for k in range(K):
            z = exp(alphas[k] + betas[k] * x[i] - zmax)
            P[i, k] = z
            s += z
        for k in range(K):
            P[i, k] /= s
    return out


def logit_derivs(const double[::1] alphas, const double[::1] betas,
                 const double[::1] x):
    cdef Py_ssize_t n = x.shape[0], K = alphas.shape[0]
    probs = logit_probs(alphas, betas, x)
    cdef double[:, ::1] P = probs
    out = np.empty((n, K), dtype=np.float64)
    cdef double[:, ::1] D = out
    cdef Py_ssize_t i, k
    cdef double slope_mean
    for i in range(n):
        slope_mean = 0.0
        for k in range(K):
            slope_mean += betas[k] * P[i, k]
        for k in range(K):
            D[i, k] = P[i, k] * (betas[k] - slope_mean)
    return out


cdef inline double _obs_prob_and_mean(const double[::1] alphas,
                                      const double[::1] betas,
                                      double xi, Py_ssize_t ki,
                                      double* slope_mean) nogil:
    """Probability of category ki at input xi; writes sum_j beta_j p_j."""
    cdef Py_ssize_t K = alphas.shape[0]
    cdef Py_ssize_t k
    cdef double z, zmax, s, pk, sm
    zmax = alphas[0] + betas[0] * xi
    for k in range(1, K):
        z = alphas[k] + betas[k] * xi
        if z > zmax:
            zmax = z
    s = 0.0
    pk = 0.0
    sm = 0.0
    for k in range(K):
        z = exp(alphas[k] + betas[k] * xi - zmax)
        s += z
        sm += betas[k] * z
        if k == ki:
            pk = z
    slope_mean[0] = sm / s
    return pk / s


def obs_loglik(const double[::1] alphas, const double[::1] betas,
               const double[::1] x, const Py_ssize_t[::1] cats,
               double floor):
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t i
    cdef double ll = 0.0, pk, sm
    for i in range(n):
        pk = _obs_prob_and_mean(alphas, betas, x[i], cats[i], &sm)
        if pk < floor:
            pk = floor
        ll += log(pk)
    return ll


def obs_loglik_grad(const double[::1] alphas, const double[::1] betas,
                    const double[::1] x, const Py_ssize_t[::1] cats,
                    double floor):
    cdef Py_ssize_t n = x.shape[0]
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] G = out
    cdef Py_ssize_t i
    cdef double ll = 0.0, pk, clamped, sm
    for i in range(n):
        pk = _obs_prob_and_mean(alphas, betas, x[i], cats[i], &sm)
        clamped = pk if pk > floor else floor
        ll += log(clamped)
        G[i] = pk * (betas[cats[i]] - sm) / clamped
    return ll, out
