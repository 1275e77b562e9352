"""Parameter grids, quadrature weights and differentiation stencils.

Two chart types are supported:

* torus charts: uniform, periodic in both directions, trapezoid quadrature
  (spectrally accurate for smooth periodic integrands);
* sphere charts: the conformal cylinder chart (longitude x, Mercator
  coordinate y = log tan(theta/2)), sampled on a midpoint-uniform colatitude
  grid.  Rows adjacent to theta = 0 and theta = pi close the chart over the
  poles: stencils reaching past a pole pick up the antipodal-longitude rows,
  so no one-sided differences are ever needed.

Sampled fields are differentiated with 8th-order centered stencils.  Closed
surface data is always evaluated analytically; the fixed-order stencils only
touch sampled variation fields, which keeps their discretization error visible
and convergent under refinement instead of collapsing to roundoff.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

TWO_PI = 2.0 * np.pi

# 8th-order central first-derivative weights for offsets +1..+4 (antisymmetric).
_C8 = np.array([4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0])
# Centered fourth difference (offsets -2..+2); its symbol (2 sin(t/2))^4
# vanishes like t^4 on resolved modes but is 16 at the sawtooth, which makes
# it the natural stiffness regularizer for the wide first-derivative stencil.
_D4 = np.array([1.0, -4.0, 6.0, -4.0, 1.0])
STENCIL_HALF_WIDTH = 4


@dataclass(frozen=True)
class ParamGrid:
    """Tensor grid on a conformal chart of a closed surface."""

    topology: str                 # "torus" | "sphere"
    nx: int
    ny: int
    x_range: tuple[float, float]  # x period is x_range[1] - x_range[0]
    y_range: tuple[float, float]  # informational for sphere (Mercator span)
    periodic_x: bool
    periodic_y: bool

    def __post_init__(self):
        if self.topology not in ("torus", "sphere"):
            raise ValueError(f"unknown topology {self.topology!r}")
        if self.nx < 8 or self.ny < 8:
            raise ValueError("grid resolution must be at least 8 per direction")
        if self.topology == "sphere":
            if self.nx % 2:
                raise ValueError("sphere grids need even nx for pole closure")
            if self.periodic_y:
                raise ValueError("sphere grids are periodic in longitude only")
        if self.topology == "torus" and not (self.periodic_x and self.periodic_y):
            raise ValueError("torus grids are periodic in both directions")

    # ------------------------------------------------------------------ nodes
    @cached_property
    def hx(self) -> float:
        return (self.x_range[1] - self.x_range[0]) / self.nx

    @cached_property
    def x(self) -> np.ndarray:
        return self.x_range[0] + self.hx * np.arange(self.nx)

    @cached_property
    def dtheta(self) -> float:
        if self.topology != "sphere":
            raise AttributeError("dtheta only exists on sphere grids")
        return np.pi / self.ny

    @cached_property
    def theta(self) -> np.ndarray:
        """Midpoint colatitude nodes; no node sits on a pole."""
        return (np.arange(self.ny) + 0.5) * self.dtheta

    @cached_property
    def hy(self) -> float:
        if self.topology == "sphere":
            raise AttributeError("sphere grids have no uniform chart spacing in y")
        return (self.y_range[1] - self.y_range[0]) / self.ny

    @cached_property
    def y(self) -> np.ndarray:
        """Chart y coordinate: uniform for tori, Mercator log tan(theta/2) for spheres."""
        if self.topology == "sphere":
            return np.log(np.tan(0.5 * self.theta))
        return self.y_range[0] + self.hy * np.arange(self.ny)

    def meshes(self) -> tuple[np.ndarray, np.ndarray]:
        return np.meshgrid(self.x, self.y, indexing="ij")

    # -------------------------------------------------------------- quadrature
    @cached_property
    def theta_weights(self) -> np.ndarray:
        """Weights integrating smooth odd-symmetric integrands over (0, pi).

        Integrands appearing here always vanish at the poles like sin(theta),
        so they extend to smooth 2pi-periodic functions odd about both poles.
        Expanding in sin(k theta) on the midpoint grid and integrating each
        mode exactly gives an interpolatory rule with spectral accuracy.
        """
        n = self.ny
        th = self.theta
        w = np.zeros(n)
        for k in range(1, n, 2):
            w += (4.0 / (n * k)) * np.sin(k * th)
        if np.any(w <= 0):
            raise RuntimeError("colatitude quadrature weights not positive")
        return w

    @cached_property
    def chart_weights(self) -> np.ndarray:
        """Weights W with sum(W * F) ~ integral of F dx dy over the chart.

        On sphere charts dy = dtheta / sin(theta); the rule is accurate for
        chart densities decaying like sin^2(theta) at the poles, which covers
        every integrand produced by this package (area densities, defect
        densities, gradient-square densities).
        """
        if self.topology == "torus":
            return np.full((self.nx, self.ny), self.hx * self.hy)
        wy = self.theta_weights / np.sin(self.theta)
        return self.hx * np.broadcast_to(wy, (self.nx, self.ny)).copy()

    # ---------------------------------------------------------- differentiation
    def _pad_theta(self, f: np.ndarray) -> np.ndarray:
        """Extend a sampled field across both poles by the antipodal rule.

        A smooth field F on the sphere satisfies F(-theta, x) = F(theta, x+pi)
        and F(pi + t, x) = F(pi - t, x + pi); with even nx the antipodal
        longitude is a grid column.
        """
        m = STENCIL_HALF_WIDTH
        nx, ny = self.nx, self.ny
        out = np.empty((nx, ny + 2 * m) + f.shape[2:], dtype=f.dtype)
        out[:, m:ny + m] = f
        g = np.roll(f, nx // 2, axis=0)
        out[:, :m] = g[:, m - 1::-1]
        out[:, ny + m:] = g[:, :ny - m - 1:-1]
        return out

    def diff_x(self, f: np.ndarray) -> np.ndarray:
        """d/dx of a sampled field, 8th order, periodic."""
        out = np.zeros_like(f, dtype=np.result_type(f.dtype, float))
        for k, c in enumerate(_C8, start=1):
            out += c * (np.roll(f, -k, axis=0) - np.roll(f, k, axis=0))
        return out / self.hx

    def diff_theta(self, f: np.ndarray) -> np.ndarray:
        if self.topology != "sphere":
            raise ValueError("diff_theta is only defined on sphere grids")
        m = STENCIL_HALF_WIDTH
        g = self._pad_theta(f)
        out = np.zeros_like(f, dtype=np.result_type(f.dtype, float))
        ny = self.ny
        for k, c in enumerate(_C8, start=1):
            out += c * (g[:, m + k:m + k + ny] - g[:, m - k:m - k + ny])
        return out / self.dtheta

    def diff_y(self, f: np.ndarray) -> np.ndarray:
        """d/dy in chart coordinates (Mercator y on spheres)."""
        if self.topology == "torus":
            out = np.zeros_like(f, dtype=np.result_type(f.dtype, float))
            for k, c in enumerate(_C8, start=1):
                out += c * (np.roll(f, -k, axis=1) - np.roll(f, k, axis=1))
            return out / self.hy
        dth = self.diff_theta(f)
        shape = (1, self.ny) + (1,) * (f.ndim - 2)
        return np.sin(self.theta).reshape(shape) * dth

    # --------------------------------------------------- sparse operator forms
    def diff_matrix_x(self):
        """Sparse matrix acting on C-order flattened (nx, ny) fields."""
        from scipy.sparse import coo_matrix

        nx, ny = self.nx, self.ny
        ii, jj = np.meshgrid(np.arange(nx), np.arange(ny), indexing="ij")
        rows_base = (ii * ny + jj).ravel()
        rows, cols, vals = [], [], []
        for k, c in enumerate(_C8, start=1):
            for sgn in (+1, -1):
                cols_k = (((ii + sgn * k) % nx) * ny + jj).ravel()
                rows.append(rows_base)
                cols.append(cols_k)
                vals.append(np.full(rows_base.size, sgn * c / self.hx))
        return coo_matrix(
            (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
            shape=(nx * ny, nx * ny),
        ).tocsr()

    def diff_matrix_y(self):
        """Sparse chart d/dy matrix (includes pole closure on spheres)."""
        from scipy.sparse import coo_matrix

        nx, ny = self.nx, self.ny
        ii, jj = np.meshgrid(np.arange(nx), np.arange(ny), indexing="ij")
        rows_base = (ii * ny + jj).ravel()
        rows, cols, vals = [], [], []
        if self.topology == "torus":
            for k, c in enumerate(_C8, start=1):
                for sgn in (+1, -1):
                    cols_k = (ii * ny + (jj + sgn * k) % ny).ravel()
                    rows.append(rows_base)
                    cols.append(cols_k)
                    vals.append(np.full(rows_base.size, sgn * c / self.hy))
        else:
            sin_th = np.sin(self.theta)
            scale = (sin_th[jj] / self.dtheta).ravel()
            for k, c in enumerate(_C8, start=1):
                for sgn in (+1, -1):
                    j2 = jj + sgn * k
                    i2 = ii.copy()
                    flip_lo = j2 < 0
                    flip_hi = j2 > ny - 1
                    j2 = np.where(flip_lo, -1 - j2, j2)
                    j2 = np.where(flip_hi, 2 * ny - 1 - j2, j2)
                    i2 = np.where(flip_lo | flip_hi, (ii + nx // 2) % nx, ii)
                    rows.append(rows_base)
                    cols.append((i2 * ny + j2).ravel())
                    vals.append(sgn * c * scale)
        return coo_matrix(
            (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
            shape=(nx * ny, nx * ny),
        ).tocsr()

    def filter_matrix(self, axis: int):
        """Sawtooth penalty C = Delta_4 / (16 h) along one axis.

        C^T W C added to a first-derivative stiffness expels the Nyquist-band
        modes annihilated by the centered stencil (their Rayleigh quotients
        jump to ~1/h^2) while perturbing resolved modes at O((kh)^6) relative,
        far below the stencil's own consistency error budget.
        """
        from scipy.sparse import coo_matrix

        nx, ny = self.nx, self.ny
        ii, jj = np.meshgrid(np.arange(nx), np.arange(ny), indexing="ij")
        rows_base = (ii * ny + jj).ravel()
        rows, cols, vals = [], [], []
        if axis == 0:
            h = self.hx
            for off, c in zip(range(-2, 3), _D4):
                cols_k = (((ii + off) % nx) * ny + jj).ravel()
                rows.append(rows_base)
                cols.append(cols_k)
                vals.append(np.full(rows_base.size, c / (16.0 * h)))
        elif self.topology == "torus":
            h = self.hy
            for off, c in zip(range(-2, 3), _D4):
                cols_k = (ii * ny + (jj + off) % ny).ravel()
                rows.append(rows_base)
                cols.append(cols_k)
                vals.append(np.full(rows_base.size, c / (16.0 * h)))
        else:
            h = self.dtheta
            for off, c in zip(range(-2, 3), _D4):
                j2 = jj + off
                flip_lo = j2 < 0
                flip_hi = j2 > ny - 1
                j2 = np.where(flip_lo, -1 - j2, j2)
                j2 = np.where(flip_hi, 2 * ny - 1 - j2, j2)
                i2 = np.where(flip_lo | flip_hi, (ii + nx // 2) % nx, ii)
                rows.append(rows_base)
                cols.append((i2 * ny + j2).ravel())
                vals.append(np.full(rows_base.size, c / (16.0 * h)))
        return coo_matrix(
            (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
            shape=(nx * ny, nx * ny),
        ).tocsr()


def torus_grid(nx: int, ny: int, lx: float = TWO_PI, ly: float = TWO_PI) -> ParamGrid:
    return ParamGrid("torus", nx, ny, (0.0, lx), (0.0, ly), True, True)


def sphere_grid(nx: int, ny: int) -> ParamGrid:
    dth = np.pi / ny
    ymax = float(np.log(np.tan(0.5 * (np.pi - 0.5 * dth))))
    return ParamGrid("sphere", nx, ny, (0.0, TWO_PI), (-ymax, ymax), True, False)


def refine(grid: ParamGrid, factor: int = 2) -> ParamGrid:
    if grid.topology == "torus":
        return torus_grid(grid.nx * factor, grid.ny * factor,
                          grid.x_range[1] - grid.x_range[0],
                          grid.y_range[1] - grid.y_range[0])
    return sphere_grid(grid.nx * factor, grid.ny * factor)
