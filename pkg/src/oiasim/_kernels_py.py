"""Pure-numpy batch kernels (fallback backend; handles any antenna count N).

Layouts shared with the compiled backend:
  h: (T, K, 3, 3, N, N)  channel of trial t, UE k of cell i, from BS j
  w: (T, S, 3, N)        transmit vector sets (metric_tables)
  w: (T, 3, N)           one transmit vector set per trial (max_sinr_eig)
"""

import numpy as np


def _norm2(u):
    return np.sum(u.real * u.real + u.imag * u.imag, axis=-1)


def metric_tables(h: np.ndarray, w: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Per-UE alignment (gamma) and direct-gain (beta) tables.

    Returns float64 (gamma, beta), each of shape (T, 3, K, S).
    Degenerate interference directions (zero effective vectors) are a
    probability-zero event and are not guarded here.
    """
    t_n, k_n = h.shape[:2]
    s_n = w.shape[1]
    gamma = np.empty((t_n, 3, k_n, s_n))
    beta = np.empty((t_n, 3, k_n, s_n))
    for i in range(3):
        ip, idp = (i + 1) % 3, (i + 2) % 3
        u1 = np.einsum("tkrc,tsc->tksr", h[:, :, i, ip], w[:, :, ip], optimize=True)
        u2 = np.einsum("tkrc,tsc->tksr", h[:, :, i, idp], w[:, :, idp], optimize=True)
        ud = np.einsum("tkrc,tsc->tksr", h[:, :, i, i], w[:, :, i], optimize=True)
        dot = np.einsum("tksr,tksr->tks", u1.conj(), u2)
        num = dot.real * dot.real + dot.imag * dot.imag
        gamma[:, i] = np.minimum(num / (_norm2(u1) * _norm2(u2)), 1.0)
        beta[:, i] = _norm2(ud)
    return gamma, beta


def max_sinr_eig(h: np.ndarray, w: np.ndarray, p_s: float, p_i: float,
                 noise_var: float) -> tuple[np.ndarray, np.ndarray]:
    """SINR-optimal receive beamformer and its SINR for every (trial, cell, UE).

    Solves the rank-one generalized eigenproblem with the interference-plus-
    noise covariance A = noise_var*I + p_i*(u1 u1^H + u2 u2^H) and effective
    signal vector sqrt(p_s)*H_ii w_i.  Returns (lam (T,3,K), v (T,3,K,N)).
    """
    if noise_var <= 0.0:
        raise ValueError("noise_var must be > 0")
    t_n, k_n = h.shape[:2]
    n = h.shape[-1]
    lam = np.empty((t_n, 3, k_n))
    v = np.empty((t_n, 3, k_n, n), dtype=np.complex128)
    for i in range(3):
        ip, idp = (i + 1) % 3, (i + 2) % 3
        u1 = np.einsum("tkrc,tc->tkr", h[:, :, i, ip], w[:, ip], optimize=True)
        u2 = np.einsum("tkrc,tc->tkr", h[:, :, i, idp], w[:, idp], optimize=True)
        hv = np.sqrt(p_s) * np.einsum("tkrc,tc->tkr", h[:, :, i, i], w[:, i], optimize=True)
        if n == 2:
            # 2x2 Hermitian adjugate inverse, same arithmetic as the compiled path
            a00 = noise_var + p_i * (np.abs(u1[..., 0]) ** 2 + np.abs(u2[..., 0]) ** 2)
            a11 = noise_var + p_i * (np.abs(u1[..., 1]) ** 2 + np.abs(u2[..., 1]) ** 2)
            a01 = p_i * (u1[..., 0] * u1[..., 1].conj() + u2[..., 0] * u2[..., 1].conj())
            det = a00 * a11 - (a01.real * a01.real + a01.imag * a01.imag)
            x = np.empty_like(hv)
            x[..., 0] = (a11 * hv[..., 0] - a01 * hv[..., 1]) / det
            x[..., 1] = (a00 * hv[..., 1] - a01.conj() * hv[..., 0]) / det
        else:
            a = p_i * (u1[..., :, None] * u1[..., None, :].conj()
                       + u2[..., :, None] * u2[..., None, :].conj())
            a[..., np.arange(n), np.arange(n)] += noise_var
            x = np.linalg.solve(a, hv[..., None])[..., 0]
        lam[:, i] = np.einsum("tkr,tkr->tk", hv.conj(), x).real
        nrm = np.sqrt(_norm2(x))
        zero = nrm == 0.0
        if np.any(zero):  # zero signal vector: eigenvalue 0, direction arbitrary
            x = x.copy()
            x[zero] = 0.0
            x[zero, ..., 0] = 1.0
            nrm = np.where(zero, 1.0, nrm)
        v[:, i] = x / nrm[..., None]
    return lam, v
