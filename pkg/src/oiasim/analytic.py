"""Closed-form metric statistics, feedback-load curves, and the expectation
of the selected codeword's alignment metric.

Distributions (valid for two antennas per node):

* gamma is Uniform[0,1]: the squared cosine between two independent
  isotropic directions in C^2.
* beta = ||H w||^2 is Gamma(2,1): F(y) = 1 - e^{-y}(1 + y).
* alpha = max(1-theta,0)*gamma + theta*beta; for theta >= 1 this is a
  scaled beta, for 0 < theta < 1 the CDF is the uniform/Gamma(2,1)
  convolution evaluated piecewise around the breakpoint z = 1 - theta.

The per-cell best alignment metric is the maximum of K uniforms,
Beta(K, 1).  The three-cell average is moment-matched to Beta(a, b), and
the expected maximum over S codewords is evaluated both as an
(S-1)-fold Pochhammer-coefficient series and by adaptive quadrature of
the order-statistic integral; the two independent routes must agree.
"""

import math
from dataclasses import dataclass
from fractions import Fraction

import gmpy2
import numpy as np
from scipy import integrate, optimize
from scipy.stats import beta as beta_rv

N_CELLS = 3

#: antenna count the closed forms above are derived for
SUPPORTED_N = 2

#: required agreement between the series and quadrature routes
CROSS_CHECK_TOL = 1e-6

_SERIES_PRECISION_BITS = 300


@dataclass(frozen=True)
class BetaParams:
    """Shape parameters of a Beta distribution."""

    a: float
    b: float

    def __post_init__(self):
        if not (self.a > 0 and math.isfinite(self.a)):
            raise ValueError("a must be finite and positive")
        if not (self.b > 0 and math.isfinite(self.b)):
            raise ValueError("b must be finite and positive")

    @property
    def mean(self) -> float:
        return self.a / (self.a + self.b)


@dataclass(frozen=True)
class SeriesControl:
    """Truncation policy for the multi-index series.

    Each summation index stops once its term's weighted magnitude falls
    below `term_tolerance` relative to the leading term, with `max_index`
    as a hard cap.
    """

    term_tolerance: float = 1e-12
    max_index: int = 1000

    def __post_init__(self):
        if not self.term_tolerance > 0.0:
            raise ValueError("term_tolerance must be > 0")
        if self.max_index < 1:
            raise ValueError("max_index must be >= 1")


class SeriesConvergenceError(ArithmeticError):
    """The series truncation did not converge under the given control."""


# ---------------------------------------------------------------------------
# Metric distributions
# ---------------------------------------------------------------------------

def cdf_gamma(x):
    """CDF of the alignment metric: F(x) = x on [0, 1]."""
    return np.clip(np.asarray(x, dtype=float), 0.0, 1.0)


def pdf_gamma(x):
    x = np.asarray(x, dtype=float)
    return np.where((x >= 0.0) & (x <= 1.0), 1.0, 0.0)


def cdf_beta_gain(y):
    """CDF of the effective channel gain: F(y) = 1 - e^{-y}(1+y), y >= 0."""
    y = np.asarray(y, dtype=float)
    return np.where(y < 0.0, 0.0, -np.expm1(-y) - y * np.exp(-y))


def pdf_beta_gain(y):
    y = np.asarray(y, dtype=float)
    return np.where(y < 0.0, 0.0, y * np.exp(-y))


def cdf_alpha(z, theta: float):
    """CDF of the hybrid metric for a given theta > 0.

    For theta >= 1 the metric is theta*beta.  For 0 < theta < 1 it is the
    convolution of Uniform[0, 1-theta] (scaled gamma) with theta*beta,
    piecewise around z = 1-theta.
    """
    if not theta > 0.0:
        raise ValueError("theta must be > 0 (pure-gamma selection is cdf_gamma)")
    z_arr = np.atleast_1d(np.asarray(z, dtype=float))
    if theta >= 1.0:
        out = np.asarray(cdf_beta_gain(z_arr / theta))
    else:
        c = 1.0 - theta
        out = np.zeros(z_arr.shape)
        lo = (z_arr >= 0.0) & (z_arr < c)
        hi = z_arr >= c
        zl = z_arr[lo]
        out[lo] = (zl - 2.0 * theta + np.exp(-zl / theta) * (2.0 * theta + zl)) / c
        zh = z_arr[hi]
        out[hi] = 1.0 + (np.exp(-zh / theta) * (2.0 * theta + zh)
                         - np.exp(-(zh - c) / theta) * (2.0 * theta + zh - c)) / c
    if np.isscalar(z) or np.ndim(z) == 0:
        return float(out[0])
    return out


# ---------------------------------------------------------------------------
# Feedback load and thresholds
# ---------------------------------------------------------------------------

_LOAD_SCHEMES = ("oia", "maxsnr", "coia")


def load_curve(scheme: str, t: float, theta: float | None = None) -> float:
    """Normalized average feedback load at threshold t: P(metric >= t)."""
    if t < 0.0:
        raise ValueError("threshold must be >= 0")
    if scheme == "oia":
        return float(1.0 - cdf_gamma(t))
    if scheme == "maxsnr":
        return float(1.0 - cdf_beta_gain(t))
    if scheme == "coia":
        if theta is None:
            raise ValueError("coia load curve requires theta")
        return float(1.0 - cdf_alpha(t, theta))
    raise ValueError(f"unknown scheme {scheme!r}; expected one of {_LOAD_SCHEMES}")


def solve_threshold(scheme: str, target_load: float, theta: float | None = None) -> float:
    """Threshold t with load_curve(scheme, t) == target_load (to 1e-10)."""
    if not 0.0 < target_load <= 1.0:
        raise ValueError("target_load must be in (0, 1]")
    if target_load == 1.0:
        return 0.0
    hi = 1.0
    while load_curve(scheme, hi, theta) > target_load:
        hi *= 2.0
        if hi > 1e9:
            raise ValueError("unattainable target load")
    t = optimize.brentq(lambda x: load_curve(scheme, x, theta) - target_load,
                        0.0, hi, xtol=1e-14, rtol=8.9e-16)
    if abs(load_curve(scheme, t, theta) - target_load) >= 1e-10:
        raise ArithmeticError("threshold inversion did not reach tolerance")
    return float(t)


# ---------------------------------------------------------------------------
# Selected-metric expectation
# ---------------------------------------------------------------------------

def percell_max_params(k: int) -> BetaParams:
    """Distribution of a cell's best alignment metric: max of K uniforms."""
    if k < 1:
        raise ValueError("k must be >= 1")
    return BetaParams(float(k), 1.0)


def _avg_params_exact(k: int) -> tuple[Fraction, Fraction]:
    """Moment-matching in exact rational arithmetic: (a, b) with a = K*b."""
    mean = Fraction(k, k + 1)
    var = Fraction(k, (k + 1) ** 2 * (k + 2)) / N_CELLS
    ratio = mean / (1 - mean)                      # K
    b = ratio / (var * (1 + ratio) ** 3)           # 3(K+2)/(K+1)
    return ratio * b, b


def avg_params(k: int) -> BetaParams:
    """Moment-matched Beta fit of the three-cell average of per-cell maxima.

    Matches the mean E = K/(K+1) and variance Var(Beta(K,1))/3 of the
    average; carried out in exact rational arithmetic so the identity
    a == K*b survives the float conversion.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    a, b = _avg_params_exact(k)
    b_f = float(b)
    return BetaParams(float(a / b) * b_f, b_f)


def _series_value(a, b, s: int, ctrl: SeriesControl):
    """High-precision evaluation of the (S-1)-fold coefficient series.

    Terms c_k = (1-b)_k / ((a+k) k!) are generated per index until their
    beta-weighted magnitude drops below ctrl.term_tolerance; the multi-index
    sum over a fixed total degree m collapses to an (S-1)-fold convolution
    of the c sequence against weights B(aS+m+1, b).  The alternating terms
    cancel by many orders of magnitude, which is why this runs at extended
    precision rather than in doubles.
    """
    one = gmpy2.mpfr(1)

    def beta_fn(x, y):
        return gmpy2.exp(gmpy2.lgamma(x)[0] + gmpy2.lgamma(y)[0] - gmpy2.lgamma(x + y)[0])

    c = [one / a]
    wt = one                      # B(aS+k+1, b) / B(aS+1, b), recurrence below
    lead = abs(c[0])
    k = 1
    while True:
        c.append(c[-1] * (k - b) / k * (a + k - 1) / (a + k))
        wt = wt * (a * s + k) / (a * s + k + b)
        if abs(c[-1]) * wt < ctrl.term_tolerance * lead:
            break
        if k >= ctrl.max_index:
            raise SeriesConvergenceError(
                f"series index did not converge within max_index={ctrl.max_index}")
        k += 1

    d = [one]
    for _ in range(s - 1):
        out = [gmpy2.mpfr(0)] * (len(d) + len(c) - 1)
        for i, di in enumerate(d):
            if di == 0:
                continue
            for j, cj in enumerate(c):
                out[i + j] += di * cj
        d = out

    # final weighted sum, with B(aS+m+1, b) by recurrence from m = 0
    bw = beta_fn(a * s + 1, b)
    total = gmpy2.mpfr(0)
    for m, dm in enumerate(d):
        total += dm * bw
        bw = bw * (a * s + m + 1) / (a * s + m + 1 + b)
    return s * total / beta_fn(a, b) ** s


def expected_selected_metric_quadrature(k: int, s: int) -> float:
    """Independent route: adaptive quadrature of S x f(x) F(x)^{S-1}."""
    if k < 1 or s < 1:
        raise ValueError("k and s must be >= 1")
    p = avg_params(k)
    f = lambda x: s * x * beta_rv.pdf(x, p.a, p.b) * beta_rv.cdf(x, p.a, p.b) ** (s - 1)
    val, _ = integrate.quad(f, 0.0, 1.0, epsabs=1e-9, epsrel=1e-9, limit=200)
    return float(val)


def expected_selected_metric(k: int, s: int, ctrl: SeriesControl | None = None,
                             cross_check: bool = True) -> float:
    """Expected alignment-metric average of the selected codeword.

    Series evaluation; when `cross_check` is set (the default) the result
    is verified against the quadrature route and a disagreement beyond
    CROSS_CHECK_TOL raises.
    """
    if k < 1 or s < 1:
        raise ValueError("k and s must be >= 1")
    ctrl = ctrl or SeriesControl()
    if s == 1:
        val = avg_params(k).mean
    else:
        a_q, b_q = _avg_params_exact(k)
        with gmpy2.context(precision=_SERIES_PRECISION_BITS):
            a = gmpy2.mpfr(gmpy2.mpq(a_q.numerator, a_q.denominator))
            b = gmpy2.mpfr(gmpy2.mpq(b_q.numerator, b_q.denominator))
            val = float(_series_value(a, b, s, ctrl))
    if cross_check:
        ref = expected_selected_metric_quadrature(k, s)
        if abs(val - ref) > CROSS_CHECK_TOL:
            raise SeriesConvergenceError(
                f"series ({val}) and quadrature ({ref}) disagree beyond {CROSS_CHECK_TOL}")
    return val
