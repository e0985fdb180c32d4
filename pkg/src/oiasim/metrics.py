"""Per-UE selection metrics and receive beamformers.

Three scalar metrics drive UE selection:

* gamma -- alignment of the two effective interference directions
  (squared cosine of the angle between them); in [0, 1].
* beta  -- effective direct-channel gain ||H w||^2.
* alpha -- hybrid blend max(1-theta, 0)*gamma + theta*beta with
  theta = noise_var / p_i, so selection adapts to whether noise or
  interference dominates.

Receive beamformers: the SNR-maximizing matched filter and the
SINR-maximizing rank-one generalized eigenvector.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import _backend
from .channel import ChannelRealization, SystemConfig, interferers
from .linalg import rank1_gen_eig

# Squared-norm floor under which an effective interference vector is
# considered degenerate (probability-zero event, surfaced as an error).
DEGENERATE_TOL = 1e-24

METRIC_KINDS = ("gamma", "beta", "alpha", "sinr")


@dataclass(frozen=True)
class MetricTable:
    """Per-cell table of selection-metric values, one per (UE, codeword)."""

    values: np.ndarray  # (K, S) float
    kind: str

    def __post_init__(self):
        if self.kind not in METRIC_KINDS:
            raise ValueError(f"unknown metric kind {self.kind!r}")
        if self.values.ndim != 2:
            raise ValueError("metric table must be 2-D (UE x codeword)")


def effective_gain(h_direct: np.ndarray, w: np.ndarray) -> float:
    """||H w||^2 for a unit-norm transmit vector w."""
    u = h_direct @ w
    return float(np.real(np.vdot(u, u)))


def alignment_metric(h1: np.ndarray, w1: np.ndarray, h2: np.ndarray, w2: np.ndarray) -> float:
    """Squared cosine between the effective interference vectors h1 w1 and h2 w2."""
    u1 = h1 @ w1
    u2 = h2 @ w2
    n1 = np.real(np.vdot(u1, u1))
    n2 = np.real(np.vdot(u2, u2))
    if n1 < DEGENERATE_TOL or n2 < DEGENERATE_TOL:
        raise ValueError("degenerate interference direction")
    return min(float(np.abs(np.vdot(u1, u2)) ** 2 / (n1 * n2)), 1.0)


def hybrid_metric(gamma, beta, theta: float):
    """max(1-theta, 0)*gamma + theta*beta; ranks by beta alone when theta=inf.

    Accepts scalars or arrays (broadcasting elementwise).
    """
    if theta < 0.0:
        raise ValueError("theta must be >= 0")
    if math.isinf(theta):
        # interference-free limit: the beta term dominates every ranking,
        # so return beta itself instead of an infinite surrogate
        return beta
    return np.maximum(1.0 - theta, 0.0) * gamma + theta * beta


def max_snr_receiver(h_direct: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Unit receive vector matched to the effective direct channel H w."""
    u = h_direct @ w
    nrm = np.linalg.norm(u)
    if nrm * nrm < DEGENERATE_TOL:
        raise ValueError("zero effective channel")
    return u / nrm


def interference_covariance(cfg: SystemConfig, real: ChannelRealization,
                            i: int, k: int, w: np.ndarray) -> np.ndarray:
    """A = noise_var*I + p_i * sum of interferer rank-one terms, for UE k of cell i."""
    _, ip, idp = interferers(i)
    u1 = real.h[k, i, ip] @ w[ip]
    u2 = real.h[k, i, idp] @ w[idp]
    a = cfg.p_i * (np.outer(u1, u1.conj()) + np.outer(u2, u2.conj()))
    a[np.diag_indices_from(a)] += cfg.noise_var
    return a


def max_sinr_receiver(cfg: SystemConfig, real: ChannelRealization,
                      i: int, k: int, w: np.ndarray) -> tuple[np.ndarray, float]:
    """SINR-maximizing receive beamformer of UE k in cell i, and its SINR."""
    a = interference_covariance(cfg, real, i, k, w)
    hv = np.sqrt(cfg.p_s) * (real.h[k, i, i] @ w[i])
    lam, v = rank1_gen_eig(a, hv)
    return v, lam


def build_metric_tables(real: ChannelRealization, vectors: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(gamma, beta) arrays of shape (3, K, S) for one realization.

    vectors: (S, 3, N) transmit-vector sets.
    """
    gam, bet = _backend.metric_tables(real.h[None], vectors[None])
    return gam[0], bet[0]
