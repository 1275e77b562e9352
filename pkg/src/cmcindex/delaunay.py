"""Delaunay (unduloid) profile curves and k-lobed CMC tori in the flat T^3.

The rotationally symmetric CMC profile is integrated directly in the
conformal parameter t (arclength rescaled by 1/r), in which the immersion

    u(t, theta) = c * (x(t), r(t) cos theta, r(t) sin theta)

is isothermal with e^lam = c r.  With phi the tangent angle of the profile
against the rotation axis, the first-order system is

    dx/dt = r cos phi,   dr/dt = r sin phi,   dphi/dt = cos phi - h r,

whose first integral is the flux r sin(psi) + (h/2) r^2, psi = phi - pi/2.
Neck and bulge radii (a, b) satisfy a + b = 2/h; the profile is integrated
at h = 1 from the neck and the period located by the tangent-angle events,
then k periods are scaled by 1/(k * x_period) so the surface closes up
through the unit cube exactly once along the axis.

Scaling is exact, so the k-lobed members inherit h_k = k h_1 and
Area_k = Area_1 / k identically up to integrator tolerance.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .ambient import FLAT_T3
from .grids import torus_grid
from .surfaces import Immersion

__all__ = ["DelaunayProfile", "DelaunayConstructionError", "solve_profile",
           "delaunay_torus", "flux_samples"]

_H0 = 1.0  # unscaled profile mean curvature


class DelaunayConstructionError(RuntimeError):
    """No admissible periodic profile for the requested parameters."""


@dataclass
class DelaunayProfile:
    """One fundamental period of the unduloid profile at h = 1."""

    neck: float          # neck/bulge radius ratio in (0, 1)
    r_neck: float
    r_bulge: float
    t_period: float      # period in the conformal parameter
    x_period: float      # period along the rotation axis
    sol: object          # dense ODE solution over [0, t_period]

    def evaluate(self, t: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(x, r, phi) at conformal parameters t in [0, t_period]."""
        vals = self.sol(np.asarray(t, dtype=float))
        return vals[0], vals[1], vals[2]


def _rhs(_t, state):
    x, r, phi = state
    return [r * np.cos(phi), r * np.sin(phi), np.cos(phi) - _H0 * r]


def solve_profile(neck: float, rtol: float = 1e-12, atol: float = 1e-13) -> DelaunayProfile:
    """Integrate one period of the unduloid profile with neck ratio ``neck``."""
    if not 0.0 < neck < 1.0:
        raise DelaunayConstructionError(f"neck ratio must lie in (0,1), got {neck}")
    r_neck = 2.0 * neck / (1.0 + neck)
    r_bulge = 2.0 / (1.0 + neck)

    def phi_zero(t, state):
        return state[2]
    phi_zero.terminal = True

    # Two legs because phi starts at an event zero: neck -> bulge (phi
    # crosses zero downward), then bulge -> next neck (upward crossing).
    t_max = 200.0
    phi_zero.direction = -1.0
    leg_a = solve_ivp(_rhs, (0.0, t_max), [0.0, r_neck, 0.0],
                      method="DOP853", rtol=rtol, atol=atol,
                      dense_output=True, events=phi_zero)
    if not leg_a.t_events[0].size:
        raise DelaunayConstructionError(
            f"profile with neck={neck} has no bulge before t={t_max}")
    t_half = float(leg_a.t_events[0][0])
    state_half = leg_a.sol(t_half)
    bulge_r = float(state_half[1])
    phi_zero.direction = 1.0
    leg_b = solve_ivp(_rhs, (t_half, t_half + t_max), state_half,
                      method="DOP853", rtol=rtol, atol=atol,
                      dense_output=True, events=phi_zero)
    if not leg_b.t_events[0].size:
        raise DelaunayConstructionError(
            f"profile with neck={neck} did not close a period before t={t_max}")
    t_period = float(leg_b.t_events[0][0])
    x_period, r_end, phi_end = (float(v) for v in leg_b.sol(t_period))
    if abs(r_end - r_neck) > 1e-8 or abs(phi_end) > 1e-8:
        raise DelaunayConstructionError(
            f"profile with neck={neck} failed periodicity: "
            f"|r-a|={abs(r_end - r_neck):.2e}, |phi|={abs(phi_end):.2e}")
    if abs(bulge_r - r_bulge) > 1e-8:
        raise DelaunayConstructionError(
            f"profile with neck={neck} missed the bulge radius: "
            f"got {bulge_r:.12f}, expected {r_bulge:.12f}")

    def dense(t):
        t = np.asarray(t, dtype=float)
        lo = leg_a.sol(np.clip(t, 0.0, t_half))
        hi = leg_b.sol(np.clip(t, t_half, t_period))
        return np.where(t <= t_half, lo, hi)

    return DelaunayProfile(neck, r_neck, r_bulge, t_period, x_period, dense)


def flux_samples(profile: DelaunayProfile, n: int = 400) -> np.ndarray:
    """Samples of the conserved flux r sin(psi) + (h/2) r^2 along a period."""
    t = np.linspace(0.0, profile.t_period, n)
    _, r, phi = profile.evaluate(t)
    sin_psi = -np.cos(phi)  # psi = phi - pi/2
    return r * sin_psi + 0.5 * _H0 * r * r


def delaunay_torus(k: int, neck: float, nx: int, ny: int,
                   profile: DelaunayProfile | None = None) -> Immersion:
    """k-lobed Delaunay torus immersed in the flat unit 3-torus.

    The chart is the doubly periodic conformal (t, theta) rectangle covering
    k profile periods; the scaled surface runs once through the fundamental
    domain along the first axis.  Coordinates are kept as unwrapped lifts.
    """
    if k < 1:
        raise DelaunayConstructionError("lobe count k must be >= 1")
    prof = profile or solve_profile(neck)
    scale = 1.0 / (k * prof.x_period)
    if scale * prof.r_bulge >= 0.5:
        raise DelaunayConstructionError(
            f"k={k}, neck={neck}: scaled bulge radius {scale * prof.r_bulge:.4f} "
            "does not fit the fundamental domain (needs < 1/2)")

    lx = k * prof.t_period
    grid = torus_grid(nx, ny, lx=lx, ly=2.0 * np.pi)
    t = grid.x
    wraps = np.floor(t / prof.t_period + 1e-13)
    t_loc = t - wraps * prof.t_period
    x_prof, r, phi = prof.evaluate(t_loc)
    x_full = x_prof + wraps * prof.x_period

    th = grid.y
    ct, st = np.cos(th), np.sin(th)
    cphi, sphi = np.cos(phi), np.sin(phi)
    one = np.ones_like(th)

    def assemble(f_ax, f_rad):
        # f_ax, f_rad are functions of t only; tensorize against theta.
        out = np.empty((nx, ny, 3))
        out[..., 0] = np.outer(f_ax, one)
        out[..., 1] = np.outer(f_rad, ct)
        out[..., 2] = np.outer(f_rad, st)
        return out

    c = scale
    u = assemble(c * x_full, c * r)
    ut = assemble(c * r * cphi, c * r * sphi)
    # theta-derivatives rotate the radial part.
    utheta = np.empty((nx, ny, 3))
    utheta[..., 0] = 0.0
    utheta[..., 1] = np.outer(c * r, -st)
    utheta[..., 2] = np.outer(c * r, ct)
    # d/dt(r cos phi) = h r^2 sin phi,  d/dt(r sin phi) = r - h r^2 cos phi.
    utt = assemble(c * _H0 * r * r * sphi, c * (r - _H0 * r * r * cphi))
    uttheta = np.empty((nx, ny, 3))
    uttheta[..., 0] = 0.0
    uttheta[..., 1] = np.outer(c * r * sphi, -st)
    uttheta[..., 2] = np.outer(c * r * sphi, ct)
    uthth = np.empty((nx, ny, 3))
    uthth[..., 0] = 0.0
    uthth[..., 1] = np.outer(c * r, -ct)
    uthth[..., 2] = np.outer(c * r, -st)

    h_scaled = _H0 / scale
    imm = Immersion(FLAT_T3, grid, u, ut, utheta, utt, uttheta, uthth,
                    genus=1, branch_count=0, cmc_value=h_scaled,
                    name=f"delaunay_t3(k={k}, neck={neck})",
                    reference={
                        "k": k, "neck": neck,
                        "profile_t_period": prof.t_period,
                        "profile_x_period": prof.x_period,
                        "index_lower_bound": 2 * k - 2,
                        "h_exact": h_scaled,
                    })
    return imm
