"""Three-cell downlink system model: configuration, channel draws, SINR, sum rate.

Cells are indexed 0..2.  Each of the three base stations serves one UE per
slot with a rank-one beam; the two out-of-cell signals are interference.
Data symbols and thermal noise are never sampled: the SINR expression
already averages over them, and rates are computed from it directly.
"""

import math
from dataclasses import dataclass

import numpy as np

from .linalg import draw_complex_gaussian

N_CELLS = 3
# Fixed interferer rotation: cell i is interfered by cells i+1 and i+2 (mod 3).
_FIRST_INTERFERER = (1, 2, 0)
_SECOND_INTERFERER = (2, 0, 1)


@dataclass(frozen=True)
class SystemConfig:
    """Static experiment parameters (powers are linear, not dB)."""

    k: int                  # UEs per cell
    s: int = 1              # codebook size
    n: int = 2              # antennas per node
    p_s: float = 1.0        # received data power
    p_i: float = 1.0        # received per-interferer power
    noise_var: float = 1.0  # receiver noise variance

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.s < 1:
            raise ValueError("s must be >= 1")
        if self.n < 2:
            raise ValueError("n must be >= 2")
        if not self.p_s > 0.0:
            raise ValueError("p_s must be > 0")
        if self.p_i < 0.0:
            raise ValueError("p_i must be >= 0")
        if not self.noise_var > 0.0:
            raise ValueError("noise_var must be > 0")

    @property
    def theta(self) -> float:
        """Noise-to-interference power ratio; +inf when interference-free."""
        if self.p_i == 0.0:
            return math.inf
        return self.noise_var / self.p_i


@dataclass(frozen=True)
class ChannelRealization:
    """One slot of channel state.

    h[k, i, j] is the n x n matrix from the BS of cell j to UE k of cell i;
    entries are i.i.d. CN(0,1).  Channel estimation is assumed perfect, so
    the same matrices serve as both truth and receiver-side estimates.
    """

    h: np.ndarray

    @property
    def k(self) -> int:
        return self.h.shape[0]

    @property
    def n(self) -> int:
        return self.h.shape[-1]


def interferers(i: int) -> tuple[int, int, int]:
    """(i, i', i'') where i' and i'' are the two cells interfering cell i."""
    if i not in (0, 1, 2):
        raise ValueError(f"cell index must be 0, 1 or 2, got {i}")
    return i, _FIRST_INTERFERER[i], _SECOND_INTERFERER[i]


def draw_realization(cfg: SystemConfig, rng: np.random.Generator) -> ChannelRealization:
    """Draw the 9k independent channel matrices of one slot."""
    return ChannelRealization(draw_complex_gaussian(rng, (cfg.k, N_CELLS, N_CELLS, cfg.n, cfg.n)))


def sinr(cfg: SystemConfig, real: ChannelRealization, i: int, k: int,
         w: np.ndarray, v: np.ndarray) -> float:
    """Post-beamforming SINR of UE k in cell i.

    w: (3, n) unit transmit vectors (one per BS); v: (n,) unit receive vector.
    """
    _, ip, idp = interferers(i)
    h = real.h[k, i]
    sig = cfg.p_s * np.abs(np.vdot(v, h[i] @ w[i])) ** 2
    intf = (np.abs(np.vdot(v, h[ip] @ w[ip])) ** 2
            + np.abs(np.vdot(v, h[idp] @ w[idp])) ** 2)
    return float(sig / (cfg.noise_var + cfg.p_i * intf))


def sum_rate(sinrs) -> float:
    """Sum over cells of log2(1 + SINR), in bits/s/Hz."""
    return float(np.sum(np.log2(1.0 + np.asarray(sinrs, dtype=float))))
