"""Analytic CMC gallery: round spheres, Clifford torus, Delaunay tori.

Every member is a conformal CMC immersion with analytically evaluated chart
partials and reference data (exact area and curvature where available, known
index/nullity expectations).  Charts are oriented so the declared CMC value
is positive:  the oriented normal of the round spheres points toward the
center, matching h = 2/rho (R^3), 2*cot(rho) (S^3) and 2*coth(rho) (H^3).
"""

from __future__ import annotations

import json
from typing import Callable

import numpy as np

from . import ambient as amb
from .delaunay import delaunay_torus, solve_profile
from .grids import sphere_grid, torus_grid
from .surfaces import Immersion

__all__ = ["gallery", "gallery_names", "default_resolution",
           "descriptor", "from_descriptor", "GALLERY_SCHEMA_VERSION"]

GALLERY_SCHEMA_VERSION = 1

_CACHE: dict = {}


def gallery_names() -> list[str]:
    return ["sphere_r3", "sphere_s3", "sphere_h3", "clifford_torus", "delaunay_t3"]


def default_resolution(name: str, **params) -> tuple[int, int]:
    if name in ("sphere_r3", "sphere_s3", "sphere_h3"):
        return (64, 48)
    if name == "clifford_torus":
        return (48, 48)
    if name == "delaunay_t3":
        return (32 * int(params.get("k", 1)), 32)
    raise KeyError(f"unknown gallery surface {name!r}")


# ------------------------------------------------------------- sphere charts

def _sphere_chart(flip_x: bool):
    """Unit-sphere direction field n(x, theta) and its chart derivatives.

    The chart y is the Mercator coordinate with d/dy = sin(theta) d/dtheta;
    flip_x reverses the longitude to flip the induced orientation.
    """
    s = -1.0 if flip_x else 1.0

    def parts(x, th):
        sth, cth = np.sin(th), np.cos(th)
        cx, sx = np.cos(x), s * np.sin(x)
        n = np.stack([sth * cx, sth * sx, cth], axis=-1)
        # x-derivatives of (cx, sx) are (-s*sx, s*cx): one factor s per d/dx.
        n_x = s * np.stack([-sth * sx, sth * cx, np.zeros_like(x)], axis=-1)
        # d/dy = sin(theta) d/dtheta applied repeatedly:
        n_y = sth[..., None] * np.stack([cth * cx, cth * sx, -sth], axis=-1)
        n_xx = np.stack([-sth * cx, -sth * sx, np.zeros_like(x)], axis=-1)
        n_xy = s * sth[..., None] * np.stack([-cth * sx, cth * cx, np.zeros_like(x)], axis=-1)
        c2 = cth * cth - sth * sth
        n_yy = sth[..., None] * np.stack([c2 * cx, c2 * sx, -2.0 * sth * cth], axis=-1)
        return n, n_x, n_y, n_xx, n_xy, n_yy
    return parts


def _make_sphere(space, radial: Callable, name: str, flip_x: bool,
                 resolution, genus0_reference: dict, cmc_value: float) -> Immersion:
    """Build a distance sphere u = radial(n) over the conformal chart."""
    nx, ny = resolution
    grid = sphere_grid(nx, ny)
    X, TH = np.meshgrid(grid.x, grid.theta, indexing="ij")
    n, n_x, n_y, n_xx, n_xy, n_yy = _sphere_chart(flip_x)(X, TH)
    u, du = radial
    return Immersion(space, grid, u(n), du(n_x), du(n_y), du(n_xx), du(n_xy),
                     du(n_yy), genus=0, branch_count=0, cmc_value=cmc_value,
                     name=name, reference=genus0_reference)


def _sphere_r3(radius: float, resolution) -> Immersion:
    if radius <= 0:
        raise ValueError("sphere radius must be positive")
    rad = (lambda n: radius * n, lambda dn: radius * dn)
    ref = {
        "area_exact": 4.0 * np.pi * radius ** 2,
        "h_exact": 2.0 / radius,
        "A2_exact": 2.0 / radius ** 2,
        "jacobi_index": 1, "jacobi_nullity": 3,
    }
    return _make_sphere(amb.R3, rad, f"sphere_r3(rho={radius})", False,
                        resolution, ref, 2.0 / radius)


def _sphere_s3(rho_geo: float, resolution) -> Immersion:
    if not 0.0 < rho_geo < np.pi:
        raise ValueError("geodesic radius must lie in (0, pi)")
    sr, cr = np.sin(rho_geo), np.cos(rho_geo)

    def u(n):
        return np.concatenate([sr * n, np.full(n.shape[:-1] + (1,), cr)], axis=-1)

    def du(dn):
        return np.concatenate([sr * dn, np.zeros(dn.shape[:-1] + (1,))], axis=-1)

    ref = {
        "area_exact": float(4.0 * np.pi * sr ** 2),
        "h_exact": float(2.0 * cr / sr),
        "A2_exact": float(2.0 * (cr / sr) ** 2),
        "jacobi_index": 1, "jacobi_nullity": 3,
    }
    # The standard longitude orientation makes the oriented normal point away
    # from the center pole here (extra ambient dimension flips parity), so
    # reverse x to keep h = +2 cot(rho).
    return _make_sphere(amb.S3, (u, du), f"sphere_s3(rho={rho_geo})", True,
                        resolution, ref, float(2.0 * cr / sr))


def _sphere_h3(radius: float, resolution) -> Immersion:
    if radius <= 0:
        raise ValueError("sphere radius must be positive")
    sr, cr = np.sinh(radius), np.cosh(radius)

    def u(n):
        return np.concatenate([sr * n, np.full(n.shape[:-1] + (1,), cr)], axis=-1)

    def du(dn):
        return np.concatenate([sr * dn, np.zeros(dn.shape[:-1] + (1,))], axis=-1)

    ref = {
        "area_exact": float(4.0 * np.pi * sr ** 2),
        "h_exact": float(2.0 * cr / sr),
        "A2_exact": float(2.0 * (cr / sr) ** 2),
        "jacobi_index": 1, "jacobi_nullity": 3,
        "index_plus_nullity": 4,
    }
    return _make_sphere(amb.H3, (u, du), f"sphere_h3(rho={radius})", False,
                        resolution, ref, float(2.0 * cr / sr))


def _clifford(resolution) -> Immersion:
    nx, ny = resolution
    grid = torus_grid(nx, ny)
    X, Y = grid.meshes()
    z = np.zeros_like(X)
    rt = 1.0 / np.sqrt(2.0)

    def stack(a, b, c, d):
        return rt * np.stack([a, b, c, d], axis=-1)

    u = stack(np.cos(X), np.sin(X), np.cos(Y), np.sin(Y))
    ux = stack(-np.sin(X), np.cos(X), z, z)
    uy = stack(z, z, -np.sin(Y), np.cos(Y))
    uxx = stack(-np.cos(X), -np.sin(X), z, z)
    uxy = stack(z, z, z, z)
    uyy = stack(z, z, -np.cos(Y), -np.sin(Y))
    ref = {
        "area_exact": 2.0 * np.pi ** 2,
        "h_exact": 0.0,
        "A2_exact": 2.0,
        "jacobi_index": 5, "jacobi_nullity": 4,
        "weak_index": 4,
    }
    return Immersion(amb.S3, grid, u, ux, uy, uxx, uxy, uyy, genus=1,
                     branch_count=0, cmc_value=0.0, name="clifford_torus",
                     reference=ref)


# ------------------------------------------------------------------- factory

def gallery(name: str, resolution: tuple[int, int] | None = None, **params) -> Immersion:
    """Construct a gallery member (cached per name/params/resolution)."""
    res = tuple(resolution) if resolution is not None else default_resolution(name, **params)
    key = (name, tuple(sorted(params.items())), res)
    if key in _CACHE:
        return _CACHE[key]
    if name == "sphere_r3":
        imm = _sphere_r3(params.get("radius", 1.0), res)
    elif name == "sphere_s3":
        imm = _sphere_s3(params.get("radius", 0.9), res)
    elif name == "sphere_h3":
        imm = _sphere_h3(params.get("radius", 0.8), res)
    elif name == "clifford_torus":
        imm = _clifford(res)
    elif name == "delaunay_t3":
        k = int(params.get("k", 1))
        neck = float(params.get("neck", 0.55))
        prof = _profile_cached(neck)
        imm = delaunay_torus(k, neck, res[0], res[1], profile=prof)
    else:
        raise KeyError(f"unknown gallery surface {name!r}")
    _CACHE[key] = imm
    return imm


def _profile_cached(neck: float):
    key = ("profile", neck)
    if key not in _CACHE:
        _CACHE[key] = solve_profile(neck)
    return _CACHE[key]


# --------------------------------------------------------------- descriptors

def descriptor(name: str, resolution=None, **params) -> dict:
    """JSON-serializable descriptor for reproducible runs."""
    res = tuple(resolution) if resolution is not None else default_resolution(name, **params)
    return {"schema_version": GALLERY_SCHEMA_VERSION, "kind": name,
            "params": dict(sorted(params.items())), "resolution": list(res)}


def from_descriptor(desc: dict | str) -> Immersion:
    if isinstance(desc, str):
        desc = json.loads(desc)
    return gallery(desc["kind"], resolution=tuple(desc["resolution"]),
                   **desc.get("params", {}))
