"""UE selection schemes, codeword choice, and threshold-based feedback.

All schemes pick one UE per cell; the codebook schemes additionally pick
the transmit-vector set whose per-cell best metric values have the largest
three-cell average.  Ties break toward the lowest index everywhere (they
have probability zero under continuous channels, but deterministic
behaviour keeps replays exact).

Threshold feedback: a UE reports a (UE, codeword) metric value only when
it is >= t, so t = 0 reproduces full feedback exactly.  When censoring
leaves gaps, codewords seen by more cells win first, scores average over
the cells that reported, and a cell with no report for the winning
codeword serves a uniformly random UE.  With no feedback anywhere, the
codeword and all UEs are drawn uniformly at random.
"""

from dataclasses import dataclass

import numpy as np

from .channel import ChannelRealization, SystemConfig, sinr as sinr_of
from .codebook import Codebook
from .metrics import (MetricTable, build_metric_tables, hybrid_metric,
                      max_sinr_receiver, max_snr_receiver)

N_CELLS = 3


@dataclass(frozen=True)
class SelectionOutcome:
    """Result of one scheduling decision."""

    codeword: int            # selected codebook index
    ue: np.ndarray           # (3,) selected UE per cell
    rx: np.ndarray           # (3, N) receive beamformers of the selected UEs
    sinr: np.ndarray         # (3,) post-beamforming SINR per cell
    feedback_count: int      # metric values fed back across all cells
    fallback_used: np.ndarray  # (3,) bool, True where a UE was drawn at random


@dataclass(frozen=True)
class FeedbackReport:
    """Which (UE, codeword) values one cell fed back."""

    sent: np.ndarray  # (K, S) bool

    @property
    def load(self) -> float:
        """Fraction of the K*S full-feedback values actually sent."""
        return float(self.sent.mean())


def apply_threshold(table: MetricTable, t: float) -> FeedbackReport:
    """Censor a cell's metric table: only values >= t are fed back."""
    if t < 0.0:
        raise ValueError("threshold must be >= 0")
    return FeedbackReport(sent=table.values >= t)


def measured_feedback_load(reports) -> float:
    """Arithmetic mean of per-report loads."""
    reports = list(reports)
    if not reports:
        raise ValueError("no feedback reports given")
    return float(np.mean([r.load for r in reports]))


def _max_sinr_outcome(cfg, real, w, ue):
    """Fill rx/sinr for chosen UEs with the SINR-optimal receiver."""
    rx = np.empty((N_CELLS, real.n), dtype=np.complex128)
    sinr = np.empty(N_CELLS)
    for i in range(N_CELLS):
        rx[i], sinr[i] = max_sinr_receiver(cfg, real, i, int(ue[i]), w)
    return rx, sinr


def select_max_sinr(cfg: SystemConfig, real: ChannelRealization, w: np.ndarray) -> SelectionOutcome:
    """Pick, per cell, the UE whose SINR-optimal receiver achieves the largest SINR."""
    ue = np.empty(N_CELLS, dtype=np.intp)
    rx = np.empty((N_CELLS, real.n), dtype=np.complex128)
    best = np.empty(N_CELLS)
    for i in range(N_CELLS):
        lams = np.empty(cfg.k)
        vs = np.empty((cfg.k, real.n), dtype=np.complex128)
        for k in range(cfg.k):
            vs[k], lams[k] = max_sinr_receiver(cfg, real, i, k, w)
        ue[i] = int(np.argmax(lams))
        rx[i] = vs[ue[i]]
        best[i] = lams[ue[i]]
    return SelectionOutcome(0, ue, rx, best, feedback_count=N_CELLS * cfg.k,
                            fallback_used=np.zeros(N_CELLS, dtype=bool))


def select_max_snr(cfg: SystemConfig, real: ChannelRealization, w: np.ndarray) -> SelectionOutcome:
    """Pick the UE with the largest effective direct-channel gain per cell.

    The outcome's receive beamformer is the scheme's own matched filter.
    """
    gam, bet = build_metric_tables(real, w[None])
    ue = np.argmax(bet[:, :, 0], axis=1)
    rx = np.empty((N_CELLS, real.n), dtype=np.complex128)
    out_sinr = np.empty(N_CELLS)
    for i in range(N_CELLS):
        rx[i] = max_snr_receiver(real.h[ue[i], i, i], w[i])
        out_sinr[i] = sinr_of(cfg, real, i, int(ue[i]), w, rx[i])
    return SelectionOutcome(0, ue, rx, out_sinr, feedback_count=N_CELLS * cfg.k,
                            fallback_used=np.zeros(N_CELLS, dtype=bool))


def select_oia(cfg: SystemConfig, real: ChannelRealization, w: np.ndarray) -> SelectionOutcome:
    """Pick the UE whose two interference directions are most aligned per cell."""
    gam, _ = build_metric_tables(real, w[None])
    ue = np.argmax(gam[:, :, 0], axis=1)
    rx, out_sinr = _max_sinr_outcome(cfg, real, w, ue)
    return SelectionOutcome(0, ue, rx, out_sinr, feedback_count=N_CELLS * cfg.k,
                            fallback_used=np.zeros(N_CELLS, dtype=bool))


def _selection_values(cfg, real, cb, kind, theta):
    gam, bet = build_metric_tables(real, cb.vectors)
    if kind == "gamma":
        return gam
    if kind == "beta":
        return bet
    if kind == "alpha":
        theta = cfg.theta if theta is None else theta
        return hybrid_metric(gam, bet, theta)
    raise ValueError(f"unsupported selection metric {kind!r}")


def select_coia_full(cfg: SystemConfig, real: ChannelRealization, cb: Codebook,
                     kind: str = "gamma", theta: float | None = None) -> SelectionOutcome:
    """Full-feedback codebook selection.

    Per codeword: take each cell's best metric value, average the three,
    then pick the codeword with the largest average and serve the
    per-cell argmax UEs under it.
    """
    values = _selection_values(cfg, real, cb, kind, theta)
    sstar, ue, _ = coia_full_reduce(values[None])
    s = int(sstar[0])
    ue = ue[0]
    rx, out_sinr = _max_sinr_outcome(cfg, real, cb.codeword(s), ue)
    return SelectionOutcome(s, ue, rx, out_sinr,
                            feedback_count=N_CELLS * cfg.k * cb.size,
                            fallback_used=np.zeros(N_CELLS, dtype=bool))


def select_coia_threshold(cfg: SystemConfig, real: ChannelRealization, cb: Codebook,
                          kind: str, theta: float | None, t: float,
                          rng: np.random.Generator) -> SelectionOutcome:
    """Codebook selection from threshold-censored feedback.

    Always consumes exactly four uniforms from `rng` (codeword draw plus
    one per cell), whether or not a random fallback is needed, so replay
    is independent of the censoring pattern.
    """
    values = _selection_values(cfg, real, cb, kind, theta)
    u = rng.random(4)
    sstar, ue, fallback, count = coia_threshold_reduce(values[None], t, u[None])
    s = int(sstar[0])
    ue = ue[0]
    rx, out_sinr = _max_sinr_outcome(cfg, real, cb.codeword(s), ue)
    return SelectionOutcome(s, ue, rx, out_sinr, feedback_count=int(count[0]),
                            fallback_used=fallback[0])


# ---------------------------------------------------------------------------
# Batched reductions (shared by the single-realization API and the harness)
# ---------------------------------------------------------------------------

def coia_full_reduce(values: np.ndarray):
    """Full-feedback codeword/UE choice for a batch.

    values: (T, 3, K, S) metric values.
    Returns (sstar (T,), ue (T, 3), score (T,)) where score is the selected
    codeword's three-cell average of per-cell maxima.
    """
    bar = values.max(axis=2)            # (T, 3, S)
    score = bar.mean(axis=1)            # (T, S)
    sstar = np.argmax(score, axis=1)
    t_idx = np.arange(values.shape[0])
    assert np.all(score[t_idx, sstar][:, None] >= score)
    ue = np.argmax(values[t_idx[:, None], np.arange(N_CELLS)[None, :], :, sstar[:, None]], axis=2)
    return sstar, ue, score[t_idx, sstar]


def coia_threshold_reduce(values: np.ndarray, t: float, u: np.ndarray):
    """Threshold-censored codeword/UE choice for a batch.

    values: (T, 3, K, S); u: (T, 4) uniforms driving the random fallbacks
    (column 0: codeword, columns 1..3: per-cell UE).
    Returns (sstar (T,), ue (T, 3), fallback (T, 3) bool, count (T,) int).
    """
    if t < 0.0:
        raise ValueError("threshold must be >= 0")
    t_n, _, k_n, s_n = values.shape
    sent = values >= t
    count = sent.sum(axis=(1, 2, 3))
    fed = sent.any(axis=2)                       # (T, 3, S): cell i reported codeword s
    bar = np.where(fed, values.max(axis=2, where=sent, initial=-np.inf), -np.inf)
    ncells = fed.sum(axis=1)                     # (T, S)
    # prefer codewords reported by more cells; break ties by the average
    # over reporting cells, then by the lowest index
    with np.errstate(invalid="ignore"):
        score = np.where(ncells > 0, bar.sum(axis=1, where=fed) / np.maximum(ncells, 1), -np.inf)
    best_cells = ncells.max(axis=1)
    cand = ncells == best_cells[:, None]
    sstar = np.argmax(np.where(cand, score, -np.inf), axis=1)

    none_anywhere = best_cells == 0
    if np.any(none_anywhere):
        sstar = np.where(none_anywhere, np.minimum((u[:, 0] * s_n).astype(np.intp), s_n - 1), sstar)

    t_idx = np.arange(t_n)
    col = values[t_idx[:, None], np.arange(N_CELLS)[None, :], :, sstar[:, None]]   # (T, 3, K)
    col_sent = sent[t_idx[:, None], np.arange(N_CELLS)[None, :], :, sstar[:, None]]
    fallback = ~col_sent.any(axis=2)             # (T, 3)
    ue = np.argmax(np.where(col_sent, col, -np.inf), axis=2)
    rand_ue = np.minimum((u[:, 1:] * k_n).astype(np.intp), k_n - 1)
    ue = np.where(fallback, rand_ue, ue)
    return sstar, ue, fallback, count
