"""Pure-NumPy fallback for the SINR-constrained power-minimization kernel.

Same contract as the compiled extension `hopbeam._duality`; see
`hopbeam.solver_backend` for the import-time selection.

The downlink problem (min total power s.t. per-user SINR >= gamma_k) is
solved through its virtual uplink: iterate the standard interference fixed
point on the uplink powers, take the MMSE directions, then recover exact
downlink powers from the K x K constraint-activity linear system. Total
uplink and downlink powers agree at the optimum, which callers use as a
self-check. The iteration diverges if and only if the targets are
infeasible, which is detected via the power cap / iteration cap.
"""

from __future__ import annotations

import numpy as np

STATUS_OK = 0
STATUS_DIVERGED = 1

# Every ACCEL_PERIOD plain updates, take one Newton step on the fixed-point
# residual. The plain iteration contracts at rate gamma / (1 + gamma), which
# is uselessly slow for large targets; Newton cuts the cost to a handful of
# steps per decade of gamma. The step is only accepted when it stays strictly
# positive, and convergence is still certified by the plain update, which is
# stationary exactly at the true fixed point.
ACCEL_PERIOD = 4


def duality_power_min(rows: np.ndarray, gammas: np.ndarray, sigma2: float,
                      power_cap: float, max_iter: int = 5000,
                      tol: float = 1e-12):
    """Minimal-power beamformers meeting SINR targets.

    rows: (n, m) complex channel rows (one per user, receiver side).
    Returns (status, beams, total_downlink, total_uplink, iterations);
    beams is None when status != 0.
    """
    rows = np.ascontiguousarray(rows, dtype=np.complex128)
    gammas = np.asarray(gammas, dtype=np.float64)
    n, m = rows.shape
    cols = rows.conj().T  # columns c_k; |rows[k] @ w| == |c_k^H w|
    eye = np.eye(m)
    scale = gammas / (1.0 + gammas)

    q = np.zeros(n)
    z = cols / sigma2
    iterations = 0
    for iterations in range(1, max_iter + 1):
        a = np.einsum("mk,mk->k", cols.conj(), z).real
        q_new = scale / a
        if not np.all(np.isfinite(q_new)) or q_new.sum() > power_cap:
            return STATUS_DIVERGED, None, float("inf"), float(q_new.sum()), iterations
        if np.all(np.abs(q_new - q) <= tol * np.maximum(q_new, 1e-300)):
            q = q_new
            break
        q = q_new
        sigma_mat = sigma2 * eye + (cols * q) @ cols.conj().T
        z = np.linalg.solve(sigma_mat, cols)
        if iterations % ACCEL_PERIOD == 0:
            # Newton step on G_k(q) = q_k a_k(q) - s_k, where
            # a_k(q) = c_k^H Sigma(q)^{-1} c_k and
            # d a_k / d q_j = -|c_k^H Sigma(q)^{-1} c_j|^2.
            a_now = np.einsum("mk,mk->k", cols.conj(), z).real
            cross = np.abs(z.conj().T @ cols) ** 2  # (n, n): rows k, cols j
            jac = np.diag(a_now) - q[:, None] * cross
            try:
                step = np.linalg.solve(jac, scale - q * a_now)
            except np.linalg.LinAlgError:
                step = None
            if step is not None:
                q_acc = q + step
                if (np.all(np.isfinite(q_acc)) and np.all(q_acc > 0)
                        and q_acc.sum() <= power_cap):
                    q = q_acc
                    sigma_mat = sigma2 * eye + (cols * q) @ cols.conj().T
                    z = np.linalg.solve(sigma_mat, cols)
    else:
        return STATUS_DIVERGED, None, float("inf"), float(q.sum()), max_iter

    # MMSE directions at the fixed point.
    sigma_mat = sigma2 * eye + (cols * q) @ cols.conj().T
    z = np.linalg.solve(sigma_mat, cols)
    directions = z / np.linalg.norm(z, axis=0, keepdims=True)

    # Downlink powers from constraint activity: for every k,
    #   p_k g_kk / gamma_k - sum_{u != k} p_u g_ku = sigma2,
    # with g_ku = |c_k^H u_u|^2.
    cross = np.abs(cols.conj().T @ directions) ** 2  # (n, n), rows k, cols u
    system = -cross
    system[np.arange(n), np.arange(n)] = cross.diagonal() / gammas
    powers = np.linalg.solve(system, np.full(n, sigma2))
    if not np.all(np.isfinite(powers)) or np.any(powers <= 0):
        return STATUS_DIVERGED, None, float("inf"), float(q.sum()), iterations

    beams = (directions * np.sqrt(powers)).T.copy()  # (n, m) rows w_k
    return (STATUS_OK, beams, float(powers.sum()), float(q.sum()), iterations)
