"""Experiment driver: seeded Monte Carlo sweeps, expectation grids, figure
presets, and CSV output.

Common random numbers: channels, per-slot transmit vectors, and the
codebook are drawn once per experiment from substreams keyed by
(seed, purpose, trial), so every scheme variant sees identical randomness
at equal trial index and paired comparisons have low variance.  Rates are
always computed with the SINR-optimal receiver at the selected UEs; the
scheme under test influences selection only.
"""

import io
import math
from dataclasses import dataclass

import numpy as np

from . import _backend, analytic
from .channel import N_CELLS, SystemConfig
from .codebook import Codebook, generate as generate_codebook
from .linalg import draw_complex_gaussian, draw_unit_vector
from .metrics import hybrid_metric
from .rng import make_rng
from .selection import coia_full_reduce, coia_threshold_reduce

# substream purposes under the experiment seed
_STREAM_CODEBOOK = 0
_STREAM_CHANNELS = 1
_STREAM_SLOT_VECTORS = 2
_STREAM_FALLBACK = 3

SCHEME_KINDS = ("max-sinr", "max-snr", "oia", "coia")

CSV_COLUMNS = ("scheme", "k", "s", "snr_db", "sum_rate_mean", "sum_rate_se",
               "feedback_load", "selected_metric_mean", "trials", "seed")

DEFAULT_SNR_GRID_DB = tuple(float(x) for x in range(-10, 31, 5))
DEFAULT_TRIALS = 10_000


@dataclass(frozen=True)
class SchemeVariant:
    """One scheme under test: selection rule, codebook size, feedback policy."""

    kind: str
    s: int = 1
    metric: str = "gamma"            # selection metric for coia: gamma | alpha
    target_load: float | None = None  # None = full feedback

    def __post_init__(self):
        if self.kind not in SCHEME_KINDS:
            raise ValueError(f"unknown scheme kind {self.kind!r}")
        if self.s < 1:
            raise ValueError("codebook size must be >= 1")
        if self.kind != "coia" and self.s != 1:
            raise ValueError(f"{self.kind} does not use a codebook; s must be 1")
        if self.metric not in ("gamma", "alpha"):
            raise ValueError("metric must be 'gamma' or 'alpha'")
        if self.kind == "max-sinr" and self.target_load is not None:
            raise ValueError("max-sinr has no threshold-feedback variant")
        if self.target_load is not None and not 0.0 < self.target_load <= 1.0:
            raise ValueError("target_load must be in (0, 1]")

    @property
    def label(self) -> str:
        parts = [self.kind]
        if self.kind == "coia":
            parts.append(f"s{self.s}")
            parts.append(self.metric)
        if self.target_load is not None:
            parts.append(f"tfb{self.target_load:g}")
        return "-".join(parts)


@dataclass(frozen=True)
class ExperimentSpec:
    """Full description of one simulation sweep."""

    schemes: tuple[SchemeVariant, ...]
    k: int
    snr_db: tuple[float, ...] = DEFAULT_SNR_GRID_DB
    trials: int = DEFAULT_TRIALS
    seed: int = 1
    power_ratio: float = 1.0   # p_i / p_s
    n: int = 2

    def __post_init__(self):
        if not self.schemes:
            raise ValueError("at least one scheme required")
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if not self.snr_db:
            raise ValueError("snr grid must be nonempty")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.power_ratio < 0.0:
            raise ValueError("power_ratio must be >= 0")
        if self.n < 2:
            raise ValueError("n must be >= 2")

    @property
    def max_s(self) -> int:
        return max(v.s for v in self.schemes)


@dataclass(frozen=True)
class ResultRow:
    """One CSV row; None fields print as empty (analytic rows)."""

    scheme: str
    k: int
    s: int
    snr_db: float | None
    sum_rate_mean: float | None
    sum_rate_se: float | None
    feedback_load: float | None
    selected_metric_mean: float
    trials: int | None
    seed: int | None


@dataclass(frozen=True)
class CellResult:
    """Aggregated row plus the per-trial samples behind it."""

    row: ResultRow
    rates: np.ndarray          # (trials,) per-trial sum rate
    selected_metric: np.ndarray  # (trials,) per-trial selected-metric average


def draw_experiment(spec: ExperimentSpec):
    """All randomness of an experiment: channels, slot vectors, codebook.

    Returns (h, w_slot, cb): h (trials, K, 3, 3, N, N) channels, w_slot
    (trials, 3, N) per-slot transmit vectors used by the non-codebook
    schemes, and the shared codebook of size max_s (variants with smaller
    s use its leading codewords).
    """
    cfg = SystemConfig(k=spec.k, s=spec.max_s, n=spec.n)
    cb = generate_codebook(cfg, make_rng(spec.seed, _STREAM_CODEBOOK))
    h = np.empty((spec.trials, spec.k, N_CELLS, N_CELLS, spec.n, spec.n), dtype=np.complex128)
    w_slot = np.empty((spec.trials, N_CELLS, spec.n), dtype=np.complex128)
    for t in range(spec.trials):
        h[t] = draw_complex_gaussian(make_rng(spec.seed, _STREAM_CHANNELS, t),
                                     (spec.k, N_CELLS, N_CELLS, spec.n, spec.n))
        rng_w = make_rng(spec.seed, _STREAM_SLOT_VECTORS, t)
        for i in range(N_CELLS):
            w_slot[t, i] = draw_unit_vector(rng_w, spec.n)
    return h, w_slot, cb


def _powers(spec: ExperimentSpec, snr_db: float) -> tuple[float, float, float]:
    """(p_s, p_i, noise_var) with p_s = 1 and snr_db = p_s / noise_var in dB."""
    p_s = 1.0
    noise_var = p_s * 10.0 ** (-snr_db / 10.0)
    return p_s, spec.power_ratio * p_s, noise_var


def _threshold_for(variant: SchemeVariant, theta: float) -> float:
    if variant.kind == "max-snr":
        return analytic.solve_threshold("maxsnr", variant.target_load)
    if variant.metric == "alpha":
        if math.isinf(theta):  # interference-free: alpha ranks by beta
            return analytic.solve_threshold("maxsnr", variant.target_load)
        return analytic.solve_threshold("coia", variant.target_load, theta)
    return analytic.solve_threshold("oia", variant.target_load)


def _gather_selected(h: np.ndarray, ue: np.ndarray) -> np.ndarray:
    """Channels of the selected UEs: (T, 3(cell), 3(bs), N, N)."""
    t_idx = np.arange(h.shape[0])[:, None]
    return h[t_idx, ue, np.arange(N_CELLS)[None, :]]


def _evaluate_cell(spec, variant, snr_db, h, w_slot, cb, fallback_u):
    """One (scheme variant, SNR point) Monte Carlo estimate."""
    trials, k_n = h.shape[:2]
    p_s, p_i, noise_var = _powers(spec, snr_db)
    theta = math.inf if p_i == 0.0 else noise_var / p_i

    if variant.kind == "max-sinr":
        lam, _ = _backend.max_sinr_eig(h, w_slot, p_s, p_i, noise_var)  # (T,3,K)
        ue = np.argmax(lam, axis=2)
        t_idx = np.arange(trials)[:, None]
        sel_sinr = lam[t_idx, np.arange(N_CELLS)[None, :], ue]
        sel_metric = sel_sinr.mean(axis=1)
        load = 1.0
    else:
        if variant.kind == "coia":
            vectors = cb.vectors[:variant.s]
            w_tab = np.broadcast_to(vectors[None], (trials,) + vectors.shape).copy()
        else:
            w_tab = w_slot[:, None]
        gam, bet = _backend.metric_tables(h, w_tab)
        if variant.kind == "max-snr":
            values = bet
        elif variant.kind == "oia" or variant.metric == "gamma":
            values = gam
        else:
            values = hybrid_metric(gam, bet, theta)

        if variant.target_load is None:
            sstar, ue, _ = coia_full_reduce(values)
            load = 1.0
        else:
            t = _threshold_for(variant, theta)
            sstar, ue, _, count = coia_threshold_reduce(values, t, fallback_u)
            load = float(count.mean()) / (N_CELLS * k_n * values.shape[3])

        t_idx = np.arange(trials)
        sel_metric = values[t_idx[:, None], np.arange(N_CELLS)[None, :], ue,
                            sstar[:, None]].mean(axis=1)
        w_used = w_slot if variant.kind != "coia" else cb.vectors[sstar]
        lam_sel, _ = _backend.max_sinr_eig(_gather_selected(h, ue)[:, None],
                                           w_used, p_s, p_i, noise_var)
        sel_sinr = lam_sel[:, :, 0]

    rates = np.log2(1.0 + sel_sinr).sum(axis=1)
    mean = float(rates.mean())
    se = float(rates.std(ddof=1) / np.sqrt(trials)) if trials > 1 else 0.0
    row = ResultRow(scheme=variant.label, k=spec.k, s=variant.s, snr_db=float(snr_db),
                    sum_rate_mean=mean, sum_rate_se=se, feedback_load=float(load),
                    selected_metric_mean=float(sel_metric.mean()),
                    trials=trials, seed=spec.seed)
    return CellResult(row=row, rates=rates, selected_metric=sel_metric)


def run_detailed(spec: ExperimentSpec) -> list[CellResult]:
    """Run a sweep keeping per-trial samples (for paired comparisons)."""
    h, w_slot, cb = draw_experiment(spec)
    cells = []
    for vi, variant in enumerate(spec.schemes):
        fallback_u = None
        if variant.target_load is not None:
            fallback_u = make_rng(spec.seed, _STREAM_FALLBACK, vi).random((spec.trials, 4))
        for snr_db in spec.snr_db:
            cells.append(_evaluate_cell(spec, variant, snr_db, h, w_slot, cb, fallback_u))
    return cells


def run(spec: ExperimentSpec) -> list[ResultRow]:
    """Run a sweep; rows are ordered scheme-major, then by the SNR grid."""
    return [c.row for c in run_detailed(spec)]


def table1(ks, ss, ctrl: analytic.SeriesControl | None = None) -> list[tuple[int, int, float]]:
    """Analytic expected selected metric over a (K, S) grid."""
    return [(k, s, analytic.expected_selected_metric(k, s, ctrl))
            for k in ks for s in ss]


def spec_header(spec: ExperimentSpec) -> list[str]:
    """Provenance comment block recorded at the top of result CSVs."""
    return [
        "oiasim results",
        f"seed={spec.seed} k={spec.k} trials={spec.trials} "
        f"power_ratio={spec.power_ratio!r} n={spec.n}",
        "snr_db=" + ",".join(repr(x) for x in spec.snr_db),
        "schemes=" + ";".join(v.label for v in spec.schemes),
    ]


def _field(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return repr(x)
    return str(x)


def write_csv(f, rows, header_lines=()) -> None:
    """Write rows (with a '#' provenance block) to a file object or path."""
    if isinstance(f, (str, bytes)) or hasattr(f, "__fspath__"):
        with open(f, "w") as fh:
            write_csv(fh, rows, header_lines)
        return
    for line in header_lines:
        f.write(f"# {line}\n")
    f.write(",".join(CSV_COLUMNS) + "\n")
    for r in rows:
        f.write(",".join(_field(getattr(r, c)) for c in CSV_COLUMNS) + "\n")


def csv_text(rows, header_lines=()) -> str:
    buf = io.StringIO()
    write_csv(buf, rows, header_lines)
    return buf.getvalue()


# ---------------------------------------------------------------------------
# Figure presets
# ---------------------------------------------------------------------------

def _analytic_rows(ks, ss, seed) -> list[ResultRow]:
    return [ResultRow(scheme="analytic-expectation", k=k, s=s, snr_db=None,
                      sum_rate_mean=None, sum_rate_se=None, feedback_load=None,
                      selected_metric_mean=val, trials=None, seed=seed)
            for k, s, val in table1(ks, ss)]


def figure(fig_id: int, k: int | None = None, snr_db=None,
           trials: int = DEFAULT_TRIALS, seed: int = 1,
           power_ratio: float = 1.0) -> tuple[list[ResultRow], list[str]]:
    """Preconfigured sweeps matching the three reference figures.

    1: full-feedback codebook selection, K in {10, 20}, S in {1, 2, 4},
       plus the analytic expectation per (K, S).
    2: threshold-feedback OIA and MAX-SNR at loads {1, 1/2, 1/4, 1/8}.
    3: scheme shoot-out at K=10: MAX-SNR, OIA, codebook gamma/hybrid,
       hybrid with quarter feedback.
    Returns (rows, header_lines).
    """
    snr_db = tuple(float(x) for x in (snr_db or DEFAULT_SNR_GRID_DB))
    if fig_id == 1:
        ss = (1, 2, 4)
        ks = (k,) if k is not None else (10, 20)
        rows, headers = [], []
        for kk in ks:
            spec = ExperimentSpec(
                schemes=tuple(SchemeVariant("coia", s=s) for s in ss),
                k=kk, snr_db=snr_db, trials=trials, seed=seed, power_ratio=power_ratio)
            rows.extend(run(spec))
            headers.extend(spec_header(spec))
        rows.extend(_analytic_rows(ks, ss, seed))
        return rows, ["figure 1"] + headers
    if fig_id == 2:
        loads = (None, 0.5, 0.25, 0.125)
        schemes = tuple(SchemeVariant("oia", target_load=l) for l in loads) + \
            tuple(SchemeVariant("max-snr", target_load=l) for l in loads)
        spec = ExperimentSpec(schemes=schemes, k=k or 10, snr_db=snr_db,
                              trials=trials, seed=seed, power_ratio=power_ratio)
        return run(spec), ["figure 2"] + spec_header(spec)
    if fig_id == 3:
        schemes = (
            SchemeVariant("max-snr"),
            SchemeVariant("oia"),
            SchemeVariant("coia", s=4, metric="gamma"),
            SchemeVariant("coia", s=4, metric="alpha"),
            SchemeVariant("coia", s=4, metric="alpha", target_load=0.25),
        )
        spec = ExperimentSpec(schemes=schemes, k=k or 10, snr_db=snr_db,
                              trials=trials, seed=seed, power_ratio=power_ratio)
        return run(spec), ["figure 3"] + spec_header(spec)
    raise ValueError(f"unknown figure id {fig_id!r}")
