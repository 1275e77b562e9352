"""Discretized Jacobi and Laplace-Beltrami operators, generalized symmetric
eigensolves, Morse index / nullity / weak (volume-constrained) index, and
heat-trace utilities.

The weak form is assembled from the same 8th-order differentiation stencils
used for variation fields:

    f K f = int |grad f|^2 - q f^2 dSigma,      f M f = int f^2 dSigma,

with q = |A|^2 + Ric_N(nu, nu) for the Jacobi operator and q = 0 for the
Laplace-Beltrami operator.  K is symmetric by construction and M is the
(diagonal, positive) quadrature mass, so the pencil is solved by explicit
symmetric reduction plus LAPACK's tridiagonalization / implicit-shift
eigensolver, deterministically.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import scipy.linalg as sla
from scipy.sparse import diags

from .surfaces import Immersion
from .variations import jacobi_form  # noqa: F401  (re-exported for consistency checks)

__all__ = [
    "DiscreteOperator", "SpectralResult", "HeatTraceValue",
    "assemble_jacobi", "assemble_laplace", "assemble_operator",
    "eigensolve", "index_nullity", "weak_index", "heat_trace", "counting",
]

MAX_UNKNOWNS = 5000


@dataclass
class DiscreteOperator:
    """Galerkin pencil (K, M) of -Delta - q on (Sigma, u^* g)."""

    imm: Immersion
    kind: str                    # "jacobi" | "laplace" | "custom"
    K: np.ndarray                # dense symmetric (n, n)
    M_diag: np.ndarray           # positive quadrature mass (n,)
    q: np.ndarray                # potential samples (nx, ny)
    resolution: tuple[int, int]

    @property
    def n(self) -> int:
        return self.K.shape[0]

    def describe(self) -> dict:
        return {
            "kind": self.kind,
            "surface": self.imm.name,
            "resolution": list(self.resolution),
            "unknowns": self.n,
            "potential_min": float(self.q.min()),
            "potential_max": float(self.q.max()),
        }


@dataclass
class SpectralResult:
    """Sorted eigenvalues of a discrete operator with classification data."""

    eigenvalues: np.ndarray          # lowest `count`, ascending
    eigenvectors: Optional[np.ndarray]  # (n, count), M-orthonormal
    all_eigenvalues: np.ndarray      # full discrete spectrum
    eps_null: float
    resolution: tuple[int, int]
    kind: str
    surface: str
    stable: Optional[bool] = None

    @property
    def index(self) -> int:
        return int(np.count_nonzero(self.eigenvalues < -self.eps_null))

    @property
    def nullity(self) -> int:
        return int(np.count_nonzero(np.abs(self.eigenvalues) <= self.eps_null))

    def classification(self) -> list[str]:
        out = []
        for lam in self.eigenvalues:
            if lam < -self.eps_null:
                out.append("negative")
            elif lam <= self.eps_null:
                out.append("null")
            else:
                out.append("positive")
        return out


@dataclass
class HeatTraceValue:
    value: float
    truncated: bool   # True when e^{-lambda_max t} >= 1e-12


# ------------------------------------------------------------------- assembly

def assemble_operator(imm: Immersion, q: np.ndarray, kind: str = "custom") -> DiscreteOperator:
    g = imm.grid
    n = g.nx * g.ny
    if n > MAX_UNKNOWNS:
        raise ValueError(f"grid has {n} unknowns; dense eigensolver capped at {MAX_UNKNOWNS}")
    w0 = diags(imm.chart_weights.ravel())
    dx = g.diff_matrix_x()
    dy = g.diff_matrix_y()
    fx = g.filter_matrix(0)
    fy = g.filter_matrix(1)
    K = (dx.T @ w0 @ dx + dy.T @ w0 @ dy
         + fx.T @ w0 @ fx + fy.T @ w0 @ fy).toarray()
    K = 0.5 * (K + K.T)
    m = imm.area_weights.ravel()
    q = np.asarray(q, dtype=float)
    K[np.diag_indices_from(K)] -= m * q.ravel()
    return DiscreteOperator(imm, kind, K, m, q, (g.nx, g.ny))


def assemble_jacobi(imm: Immersion) -> DiscreteOperator:
    """L = -Delta - (|A|^2 + Ric_N(nu, nu)), the CMC Jacobi operator."""
    return assemble_operator(imm, imm.jacobi_potential, kind="jacobi")


def assemble_laplace(imm: Immersion) -> DiscreteOperator:
    return assemble_operator(imm, np.zeros((imm.grid.nx, imm.grid.ny)), kind="laplace")


# ----------------------------------------------------------------- eigensolve

def _normalize_signs(vecs: np.ndarray) -> np.ndarray:
    """Deterministic sign: first component above threshold made positive."""
    out = vecs.copy()
    for j in range(out.shape[1]):
        col = out[:, j]
        big = np.abs(col) > 1e-8 * np.abs(col).max()
        k = int(np.argmax(big))
        if col[k] < 0:
            out[:, j] = -col
    return out


def _null_tolerance(eigs: np.ndarray, resolution, reference_resolution) -> float:
    lam_range = float(eigs.max() - eigs.min()) if eigs.size else 1.0
    res = float(np.sqrt(resolution[0] * resolution[1]))
    ref = float(np.sqrt(reference_resolution[0] * reference_resolution[1]))
    return 1e-3 * max(1.0, lam_range) * (ref / res) ** 2


def eigensolve(op: DiscreteOperator, count: int,
               reference_resolution: Optional[tuple[int, int]] = None,
               want_vectors: bool = True) -> SpectralResult:
    """Lowest ``count`` eigenpairs of K phi = lambda M phi.

    The diagonal mass is inverted explicitly (B = M^{-1/2} K M^{-1/2}), then
    the symmetric problem is solved densely; eigenvectors are returned
    M-orthonormal with lexicographic sign normalization.
    """
    if count > op.n:
        raise ValueError(f"requested {count} eigenpairs of an {op.n}-dim operator")
    scale = 1.0 / np.sqrt(op.M_diag)
    B = scale[:, None] * op.K * scale[None, :]
    B = 0.5 * (B + B.T)
    if want_vectors:
        w, V = sla.eigh(B)
        vecs = _normalize_signs(scale[:, None] * V[:, :count])
    else:
        w = sla.eigvalsh(B)
        vecs = None
    ref = reference_resolution or op.resolution
    eps = _null_tolerance(w[:count], op.resolution, ref)
    return SpectralResult(w[:count].copy(), vecs, w, eps, op.resolution,
                          op.kind, op.imm.name)


def residual_norms(op: DiscreteOperator, res: SpectralResult) -> np.ndarray:
    """||K phi - lambda M phi|| per returned pair, relative to ||K||."""
    if res.eigenvectors is None:
        raise ValueError("residuals need eigenvectors")
    R = op.K @ res.eigenvectors - (op.M_diag[:, None] * res.eigenvectors) * res.eigenvalues
    return np.linalg.norm(R, axis=0) / np.linalg.norm(op.K, 2)


def index_nullity(res: SpectralResult, finer: Optional[SpectralResult] = None) -> tuple[int, int]:
    """(index, nullity); when a refined result is supplied the classification
    must agree across the two finest resolutions, else ``res.stable`` is False.
    """
    i, n = res.index, res.nullity
    if finer is not None:
        res.stable = (i, n) == (finer.index, finer.nullity)
    return i, n


def weak_index(op: DiscreteOperator, count: int = 24) -> int:
    """Index of the form restricted to mean-zero functions (int f dSigma = 0).

    After the diagonal mass reduction the constraint becomes g perp M^{1/2} 1;
    that direction is removed by a Householder reflector and the reduced
    standard problem solved densely.  The null tolerance is taken from the
    same low band as the unconstrained classification, so the discrete
    interlacing i - 1 <= i_h <= i is preserved.
    """
    scale = 1.0 / np.sqrt(op.M_diag)
    B = scale[:, None] * op.K * scale[None, :]
    B = 0.5 * (B + B.T)
    a = np.sqrt(op.M_diag)
    e = np.zeros_like(a)
    e[0] = np.linalg.norm(a)
    u = a - e
    nu = np.linalg.norm(u)
    if nu < 1e-300:
        raise RuntimeError("degenerate constraint vector")
    u /= nu
    BH = B - 2.0 * np.outer(u, u @ B)
    BH = BH - 2.0 * np.outer(BH @ u, u)
    Br = 0.5 * (BH[1:, 1:] + BH[1:, 1:].T)
    w = sla.eigvalsh(Br)
    eps = _null_tolerance(w[:min(count, w.size)], op.resolution, op.resolution)
    return int(np.count_nonzero(w < -eps))


# ----------------------------------------------------------------- heat trace

def heat_trace(res: SpectralResult, t: float) -> HeatTraceValue:
    """h(t) = sum_i exp(-lambda_i t) over the discrete spectrum."""
    if t <= 0:
        raise ValueError("heat trace requires t > 0")
    lam = res.all_eigenvalues
    truncated = bool(np.exp(-float(lam.max()) * t) >= 1e-12)
    return HeatTraceValue(float(np.exp(-lam * t).sum()), truncated)


def counting(res: SpectralResult, c: float) -> int:
    """#{lambda_i <= c} over the discrete spectrum."""
    return int(np.count_nonzero(res.all_eigenvalues <= c))
