"""Complex sampling and linear-algebra primitives for the N x N link model.

Everything here is sized for small N (default 2).  The generalized
eigenproblem solved by `rank1_gen_eig` is always rank one in this model,
so it is evaluated in closed form instead of through a general solver.
"""

import numpy as np

# Relative determinant floor below which a 2x2 Hermitian matrix is
# treated as singular.
DET_RTOL = 1e-14

SINGULAR_COV_MSG = "singular interference-plus-noise covariance"


def draw_complex_gaussian(rng: np.random.Generator, shape) -> np.ndarray:
    """i.i.d. CN(0,1) array: real and imaginary parts each have variance 1/2."""
    z = rng.standard_normal(tuple(shape) + (2,))
    return (z[..., 0] + 1j * z[..., 1]) / np.sqrt(2.0)


def draw_complex_gaussian_matrix(rng: np.random.Generator, rows: int, cols: int) -> np.ndarray:
    if rows < 1 or cols < 1:
        raise ValueError("matrix dimensions must be >= 1")
    return draw_complex_gaussian(rng, (rows, cols))


def draw_unit_vector(rng: np.random.Generator, n: int) -> np.ndarray:
    """Isotropic unit-norm complex vector (Gaussian draw, then normalize)."""
    if n < 1:
        raise ValueError("vector length must be >= 1")
    while True:
        v = draw_complex_gaussian(rng, (n,))
        nrm = np.linalg.norm(v)
        if nrm > 0.0:  # zero draw has probability 0; redraw if it happens
            return v / nrm


def _solve_hermitian_pd(a: np.ndarray, h: np.ndarray) -> np.ndarray:
    """x = a^{-1} h for Hermitian positive-definite a; raises if singular."""
    n = a.shape[0]
    if n == 2:
        a00 = a[0, 0].real
        a11 = a[1, 1].real
        a01 = a[0, 1]
        det = a00 * a11 - (a01.real * a01.real + a01.imag * a01.imag)
        scale = np.sum(np.abs(a) ** 2)  # squared Frobenius norm
        if a00 <= 0.0 or det <= DET_RTOL * scale:
            raise np.linalg.LinAlgError(SINGULAR_COV_MSG)
        x0 = (a11 * h[0] - a01 * h[1]) / det
        x1 = (a00 * h[1] - np.conj(a01) * h[0]) / det
        return np.array([x0, x1])
    try:
        c = np.linalg.cholesky(a)
    except np.linalg.LinAlgError as err:
        raise np.linalg.LinAlgError(SINGULAR_COV_MSG) from err
    y = np.linalg.solve(c, h)
    return np.linalg.solve(c.conj().T, y)


def rank1_gen_eig(a: np.ndarray, h: np.ndarray) -> tuple[float, np.ndarray]:
    """Largest generalized eigenpair of (a, h h^H) for Hermitian PD `a`.

    a^{-1} h h^H has a single nonzero eigenvalue h^H a^{-1} h with
    eigenvector a^{-1} h; equivalently, the returned `lam` is the maximum
    over unit vectors u of |u^H h|^2 / (u^H a u), attained at `v`.

    Returns (lam, v) with v unit-norm.
    """
    a = np.asarray(a, dtype=np.complex128)
    h = np.asarray(h, dtype=np.complex128)
    x = _solve_hermitian_pd(a, h)
    lam = float(np.real(np.vdot(h, x)))
    nrm = np.linalg.norm(x)
    if nrm == 0.0:  # h == 0: eigenvalue 0, direction arbitrary
        v = np.zeros_like(h)
        v[0] = 1.0
        return 0.0, v
    return lam, x / nrm
