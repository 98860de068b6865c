# cython: boundscheck=False, wraparound=False, cdivision=True
# cython: language_level=3
"""Compiled kernel for the SINR-constrained power-minimization fixed point.

Mirrors hopbeam._duality_py.duality_power_min; the loop body is hand-rolled
around LAPACK (zposv for the Hermitian solves, dgesv for the downlink power
system) to avoid per-iteration Python overhead.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport fabs, sqrt
from scipy.linalg.cython_lapack cimport dgesv, zposv

cnp.import_array()

STATUS_OK = 0
STATUS_DIVERGED = 1

# Every ACCEL_PERIOD plain updates, take one Newton step on the fixed-point
# residual; the plain iteration contracts at rate gamma / (1 + gamma), which
# is uselessly slow for large targets. The step is only accepted when it
# stays strictly positive under the cap, and convergence is still certified
# by the plain update.
DEF ACCEL_PERIOD = 4


def duality_power_min(rows, gammas, double sigma2, double power_cap,
                      int max_iter=5000, double tol=1e-12):
    cdef cnp.ndarray[cnp.complex128_t, ndim=2] cols = \
        np.asfortranarray(np.conj(np.asarray(rows, dtype=np.complex128)).T)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] gam = \
        np.ascontiguousarray(gammas, dtype=np.float64)
    cdef int m = cols.shape[0]
    cdef int n = cols.shape[1]
    cdef cnp.ndarray[cnp.complex128_t, ndim=2] sig = \
        np.empty((m, m), dtype=np.complex128, order="F")
    cdef cnp.ndarray[cnp.complex128_t, ndim=2] z = \
        np.empty((m, n), dtype=np.complex128, order="F")
    cdef cnp.ndarray[cnp.float64_t, ndim=1] q = np.zeros(n)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] q_new = np.empty(n)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] system = \
        np.empty((n, n), dtype=np.float64, order="F")
    cdef cnp.ndarray[cnp.float64_t, ndim=1] powers = np.empty(n)
    cdef cnp.ndarray[int, ndim=1] ipiv = np.empty(n, dtype=np.intc)
    cdef cnp.ndarray[cnp.complex128_t, ndim=2] beams

    cdef int it, i, j, k, u, info, nrhs_one = 1
    cdef double a, qsum, total_dl, scale, diff, ref
    cdef double complex acc
    cdef bint converged = 0

    cdef int iterations = 0
    for it in range(1, max_iter + 1):
        iterations = it
        # sig = sigma2 * I + sum_k q_k c_k c_k^H
        for j in range(m):
            for i in range(m):
                sig[i, j] = 0
            sig[j, j] = sigma2
        for k in range(n):
            if q[k] == 0.0:
                continue
            for j in range(m):
                acc = q[k] * cols[j, k].conjugate()
                for i in range(m):
                    sig[i, j] = sig[i, j] + cols[i, k] * acc
        for j in range(n):
            for i in range(m):
                z[i, j] = cols[i, j]
        info = 0
        zposv("L", &m, &n, &sig[0, 0], &m, &z[0, 0], &m, &info)
        if info != 0:
            return STATUS_DIVERGED, None, float("inf"), float(np.sum(q)), it

        qsum = 0.0
        for k in range(n):
            acc = 0
            for i in range(m):
                acc = acc + cols[i, k].conjugate() * z[i, k]
            a = acc.real
            scale = gam[k] / (1.0 + gam[k])
            if a <= 0.0:
                return STATUS_DIVERGED, None, float("inf"), float(np.sum(q)), it
            q_new[k] = scale / a
            qsum += q_new[k]
        if qsum > power_cap or qsum != qsum:
            return STATUS_DIVERGED, None, float("inf"), qsum, it

        converged = 1
        for k in range(n):
            ref = q_new[k] if q_new[k] > 1e-300 else 1e-300
            if fabs(q_new[k] - q[k]) > tol * ref:
                converged = 0
            q[k] = q_new[k]
        if converged:
            break

        if it % ACCEL_PERIOD == 0:
            # Refresh receivers at the updated powers, then take a Newton
            # step on G_k(q) = q_k a_k(q) - s_k with
            # a_k(q) = c_k^H Sigma(q)^{-1} c_k and
            # d a_k / d q_j = -|c_k^H Sigma(q)^{-1} c_j|^2.
            for j in range(m):
                for i in range(m):
                    sig[i, j] = 0
                sig[j, j] = sigma2
            for k in range(n):
                for j in range(m):
                    acc = q[k] * cols[j, k].conjugate()
                    for i in range(m):
                        sig[i, j] = sig[i, j] + cols[i, k] * acc
            for j in range(n):
                for i in range(m):
                    z[i, j] = cols[i, j]
            info = 0
            zposv("L", &m, &n, &sig[0, 0], &m, &z[0, 0], &m, &info)
            if info != 0:
                return STATUS_DIVERGED, None, float("inf"), float(np.sum(q)), it
            for k in range(n):
                for j in range(n):
                    acc = 0
                    for i in range(m):
                        acc = acc + z[i, k].conjugate() * cols[i, j]
                    a = acc.real * acc.real + acc.imag * acc.imag
                    system[k, j] = -q[k] * a
                acc = 0
                for i in range(m):
                    acc = acc + cols[i, k].conjugate() * z[i, k]
                a = acc.real
                system[k, k] = system[k, k] + a
                powers[k] = gam[k] / (1.0 + gam[k]) - q[k] * a
            info = 0
            dgesv(&n, &nrhs_one, &system[0, 0], &n, &ipiv[0], &powers[0], &n,
                  &info)
            if info == 0:
                qsum = 0.0
                for k in range(n):
                    powers[k] = q[k] + powers[k]
                    if powers[k] <= 0.0 or powers[k] != powers[k]:
                        qsum = -1.0
                        break
                    qsum += powers[k]
                if qsum >= 0.0 and qsum <= power_cap:
                    for k in range(n):
                        q[k] = powers[k]
    if not converged:
        return STATUS_DIVERGED, None, float("inf"), float(np.sum(q)), max_iter

    # Final MMSE directions at the converged uplink powers.
    for j in range(m):
        for i in range(m):
            sig[i, j] = 0
        sig[j, j] = sigma2
    for k in range(n):
        for j in range(m):
            acc = q[k] * cols[j, k].conjugate()
            for i in range(m):
                sig[i, j] = sig[i, j] + cols[i, k] * acc
    for j in range(n):
        for i in range(m):
            z[i, j] = cols[i, j]
    info = 0
    zposv("L", &m, &n, &sig[0, 0], &m, &z[0, 0], &m, &info)
    if info != 0:
        return STATUS_DIVERGED, None, float("inf"), float(np.sum(q)), iterations
    for j in range(n):
        a = 0.0
        for i in range(m):
            a += z[i, j].real * z[i, j].real + z[i, j].imag * z[i, j].imag
        a = sqrt(a)
        for i in range(m):
            z[i, j] = z[i, j] / a

    # Downlink powers from constraint activity (rows k, columns u).
    for u in range(n):
        for k in range(n):
            acc = 0
            for i in range(m):
                acc = acc + cols[i, k].conjugate() * z[i, u]
            a = acc.real * acc.real + acc.imag * acc.imag
            system[k, u] = (a / gam[k]) if k == u else -a
    for k in range(n):
        powers[k] = sigma2
    info = 0
    dgesv(&n, &nrhs_one, &system[0, 0], &n, &ipiv[0], &powers[0], &n, &info)
    if info != 0:
        return STATUS_DIVERGED, None, float("inf"), float(np.sum(q)), iterations

    total_dl = 0.0
    for k in range(n):
        if powers[k] <= 0.0 or powers[k] != powers[k]:
            return STATUS_DIVERGED, None, float("inf"), float(np.sum(q)), iterations
        total_dl += powers[k]

    beams = np.empty((n, m), dtype=np.complex128)
    for k in range(n):
        a = sqrt(powers[k])
        for i in range(m):
            beams[k, i] = a * z[i, k]
    return STATUS_OK, beams, total_dl, float(np.sum(q)), iterations
