"""Shared transmit-beamforming codebook.

A codeword is a set of three unit-norm transmit vectors, one per BS; the
codebook holds `s` such sets and is known to every node.  It is drawn once
per experiment (not per slot) so that a recorded seed pins it exactly.
"""

from dataclasses import dataclass

import numpy as np

from .channel import N_CELLS, SystemConfig
from .linalg import draw_unit_vector

UNIT_NORM_TOL = 1e-12


@dataclass(frozen=True)
class Codebook:
    """vectors[s, i]: unit-norm transmit vector of BS i under codeword s."""

    vectors: np.ndarray  # (S, 3, N) complex

    def __post_init__(self):
        if self.vectors.ndim != 3 or self.vectors.shape[1] != N_CELLS:
            raise ValueError("codebook array must have shape (S, 3, N)")
        norms = np.linalg.norm(self.vectors, axis=-1)
        if not np.allclose(norms, 1.0, atol=UNIT_NORM_TOL):
            raise ValueError("codebook vectors must be unit-norm")

    @property
    def size(self) -> int:
        return self.vectors.shape[0]

    @property
    def n(self) -> int:
        return self.vectors.shape[-1]

    def codeword(self, s: int) -> np.ndarray:
        """The (3, N) transmit-vector set of codeword s."""
        return self.vectors[s]


def generate(cfg: SystemConfig, rng: np.random.Generator) -> Codebook:
    """Draw `cfg.s` codewords of three independent isotropic unit vectors."""
    vecs = np.empty((cfg.s, N_CELLS, cfg.n), dtype=np.complex128)
    for s in range(cfg.s):
        for i in range(N_CELLS):
            vecs[s, i] = draw_unit_vector(rng, cfg.n)
    return Codebook(vecs)


def save(cb: Codebook, path) -> None:
    """Write one codeword per line as whitespace-separated complex literals."""
    with open(path, "w") as f:
        f.write(f"# oiasim codebook s={cb.size} n={cb.n}\n")
        for s in range(cb.size):
            entries = cb.vectors[s].reshape(-1)
            f.write(" ".join(repr(complex(e)) for e in entries) + "\n")


def load(path) -> Codebook:
    """Read a codebook written by `save`; exact round trip."""
    rows = []
    with open(path) as f:
        for line in f:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            rows.append([complex(tok) for tok in line.split()])
    if not rows:
        raise ValueError(f"no codewords found in {path}")
    width = len(rows[0])
    if width % N_CELLS != 0 or any(len(r) != width for r in rows):
        raise ValueError("malformed codebook file")
    n = width // N_CELLS
    vecs = np.array(rows, dtype=np.complex128).reshape(len(rows), N_CELLS, n)
    return Codebook(vecs)
