"""Variation fields and the first/second variation forms of area, energy
and enclosed volume, the infinitesimal conformal defect, the comparison
identity tying them together, and finite-difference oracles.

Sampled variation fields are differenced with the grid's 8th-order stencils;
all surface data stays analytic, so the discretization error of every
quadratic form is controlled by the variation field's resolution alone and
shrinks at 8th order under refinement.

Sign conventions (pinned by the round-sphere oracle tests):

* dA(u)[v]   = -int <H, s> dSigma          (inward-oriented unit sphere: -8 pi rho);
* dV_h(u)[v] = +int <v, h nu> dSigma       (same sphere: +8 pi rho, so A_h is critical);
* d2V_h(u)[nu, nu] = -h^2 Area on CMC spheres (the oriented primitive).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Optional, Union

import numpy as np

from . import ambient as amb
from .surfaces import Immersion

__all__ = [
    "VariationField", "DefectField", "normal_variation", "random_variation",
    "random_scalar", "variation_from_spec", "conformal_defect",
    "first_variation_area", "first_variation_volume",
    "second_variation_area", "second_variation_energy",
    "second_variation_volume", "second_variation_area_h",
    "second_variation_energy_h", "jacobi_form", "comparison_identity_residual",
    "fd_second_variation", "volume_primitive_r3", "peter_paul_margin",
    "energy_curvature_split", "FUNCTIONALS",
]

FUNCTIONALS = ("area", "energy", "volume_h", "area_h", "energy_h")


# ----------------------------------------------------------------- the fields

@dataclass
class VariationField:
    """A section v of u^* TN with its tangential/normal splitting."""

    imm: Immersion
    v: np.ndarray  # (nx, ny, d), tangent to N along u
    spec: Optional[dict] = field(default=None, repr=False)

    def __post_init__(self):
        self.v = amb.project_tangent(self.imm.space, self.imm.u,
                                     np.asarray(self.v, dtype=float))

    @cached_property
    def f(self) -> np.ndarray:
        """Normal component <v, nu>."""
        return amb.inner(self.imm.space, self.v, self.imm.nu)

    @cached_property
    def s(self) -> np.ndarray:
        return self.f[..., None] * self.imm.nu

    @cached_property
    def sigma(self) -> np.ndarray:
        return self.v - self.s

    @cached_property
    def sigma_chart(self) -> tuple[np.ndarray, np.ndarray]:
        """Chart components (alpha, beta) with sigma = alpha u_x + beta u_y."""
        imm = self.imm
        inv = 1.0 / imm.e2lam
        return (amb.inner(imm.space, self.sigma, imm.ux) * inv,
                amb.inner(imm.space, self.sigma, imm.uy) * inv)

    def norm_inf(self) -> float:
        return float(np.sqrt(amb.inner(self.imm.space, self.v, self.v)).max())


def _as_field(imm: Immersion, v) -> VariationField:
    if isinstance(v, VariationField):
        if v.imm is not imm:
            raise ValueError("variation field belongs to a different immersion")
        return v
    return VariationField(imm, np.asarray(v, dtype=float))


def normal_variation(imm: Immersion, f: np.ndarray) -> VariationField:
    """Purely normal variation v = f nu."""
    return VariationField(imm, np.asarray(f)[..., None] * imm.nu)


# ----------------------------------------------------- random fields (seeded)

def random_scalar(imm: Immersion, rng: np.random.Generator,
                  degree: int | None = None, decay: float = 0.3) -> np.ndarray:
    """Seeded smooth random scalar field, resolved by the grid.

    Torus charts use trigonometric polynomials in the chart angles (degree
    capped at resolution/4); sphere charts use quadratic polynomials in the
    ambient coordinates restricted to the surface, which is the band-limited
    analogue there (chart trig polynomials are not smooth across the poles).
    """
    g = imm.grid
    if g.topology == "torus":
        # degree 2 keeps mode-product aliasing of the 8th-order stencils
        # comfortably below the 1e-6 identity-residual budget
        m = min(degree or 2, g.nx // 4, g.ny // 4)
        X, Y = g.meshes()
        xi = 2.0 * np.pi * (X - g.x_range[0]) / (g.x_range[1] - g.x_range[0])
        eta = 2.0 * np.pi * (Y - g.y_range[0]) / (g.y_range[1] - g.y_range[0])
        out = np.zeros_like(X)
        for j in range(m + 1):
            for k in range(m + 1):
                amp = decay ** (j + k)
                out += amp * rng.standard_normal() * np.cos(j * xi + rng.uniform(0, 2 * np.pi)) \
                    * np.cos(k * eta + rng.uniform(0, 2 * np.pi))
        return out
    p = imm.u
    deg = min(degree or 2, 2)
    out = rng.standard_normal() * np.ones(p.shape[:2])
    d = imm.space.dim
    if deg >= 1:
        coef = 0.6 * rng.standard_normal(d)
        out = out + p @ coef
    if deg >= 2:
        coef2 = 0.35 * rng.standard_normal((d, d))
        out = out + np.einsum("...a,ab,...b->...", p, coef2, p)
    return out


def random_variation(imm: Immersion, rng: np.random.Generator,
                     degree: int | None = None, decay: float = 0.35) -> VariationField:
    """Seeded smooth random section of u^* TN (tangency enforced)."""
    comps = [random_scalar(imm, rng, degree=degree, decay=decay)
             for _ in range(imm.space.dim)]
    w = np.stack(comps, axis=-1)
    vf = VariationField(imm, w)
    vf.spec = {"type": "random", "note": "regenerate via seed", "degree": degree}
    return vf


def variation_from_spec(imm: Immersion, spec: dict) -> VariationField:
    """Rebuild a variation field from a serialized coefficient recipe."""
    if spec["type"] == "seeded":
        rng = np.random.default_rng(spec["seed"])
        vf = random_variation(imm, rng, degree=spec.get("degree"))
        vf.spec = dict(spec)
        return vf
    if spec["type"] == "samples":
        return VariationField(imm, np.asarray(spec["values"], dtype=float))
    raise ValueError(f"unknown variation spec type {spec.get('type')!r}")


def seeded_variation(imm: Immersion, seed: int, degree: int | None = None) -> VariationField:
    """Reproducible random variation carrying its JSON-serializable recipe."""
    rng = np.random.default_rng(seed)
    vf = random_variation(imm, rng, degree=degree)
    vf.spec = {"type": "seeded", "seed": int(seed), "degree": degree}
    return vf


# ------------------------------------------------------ covariant derivatives

def _cov(imm: Immersion, w: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Covariant chart derivatives (nabla_x w, nabla_y w) of a sampled field."""
    g, sp = imm.grid, imm.space
    dx = g.diff_x(w)
    dy = g.diff_y(w)
    if sp.kind in ("S3", "H3") or (sp.kind == "EmbeddedGeneric"
                                   and sp.connection_fn is not None):
        dx = dx + amb.covariant_correction(sp, imm.u, imm.ux, w)
        dy = dy + amb.covariant_correction(sp, imm.u, imm.uy, w)
    return dx, dy


# -------------------------------------------------------------- defect fields

@dataclass
class DefectField:
    """Infinitesimal conformal defect eta with its two integral densities."""

    eta: np.ndarray          # complex (nx, ny, d)
    density: np.ndarray      # |eta|^2, a dx dy density
    integral_chart: float    # 8 int |eta|^2 dx dy
    integral_surface: float  # 4 int |mu|^2 dSigma (identical by construction)


def conformal_defect(imm: Immersion, v) -> DefectField:
    """eta = (nabla_z sigma^{0,1})^T - 2 e^{-2lam} <s, A(u_z,u_z)> u_zbar.

    The tangential projection is applied after differentiating, consistent
    with the continuum formula.
    """
    vf = _as_field(imm, v)
    sp = imm.space
    inv = (1.0 / imm.e2lam)[..., None]
    uz, uzb = imm.uz, imm.uzbar
    sig01 = 2.0 * inv * amb.inner(sp, vf.sigma, uz)[..., None] * uzb
    dx, dy = _cov(imm, sig01)
    dz = 0.5 * (dx - 1j * dy)
    proj = 2.0 * inv * (amb.inner(sp, dz, uzb)[..., None] * uz
                        + amb.inner(sp, dz, uz)[..., None] * uzb)
    eta = proj - 2.0 * inv * (vf.f * imm.second_form.azz)[..., None] * uzb
    density = amb.inner(sp, eta, eta.conj()).real
    chart = 8.0 * float(imm.integrate_chart(density).real)
    # |mu|^2 = 2 e^{-2lam} |eta|^2 turns the dx dy form into the dSigma form.
    surface = 4.0 * imm.integrate(2.0 * np.exp(-2.0 * imm.lam) * density)
    return DefectField(eta, density, chart, surface)


# ------------------------------------------------------------ first variations

def first_variation_area(imm: Immersion, v) -> float:
    vf = _as_field(imm, v)
    return -imm.integrate(imm.second_form.mean_scalar * vf.f)


def first_variation_volume(imm: Immersion, v, h_fn: Union[float, Callable]) -> float:
    vf = _as_field(imm, v)
    hvals = h_fn(imm.u) if callable(h_fn) else float(h_fn)
    return imm.integrate(hvals * vf.f)


# ----------------------------------------------------------- second variations

def second_variation_area(imm: Immersion, v) -> float:
    """Full area Hessian along arbitrary (non-normal) variations."""
    vf = _as_field(imm, v)
    sp = imm.space
    sf = imm.second_form
    e2i = 1.0 / imm.e2lam
    dxs, dys = _cov(imm, vf.s)
    px = amb.inner(sp, dxs, imm.nu)
    py = amb.inner(sp, dys, imm.nu)
    grad_perp = e2i * (px ** 2 + py ** 2)
    rm = e2i * (amb.riemann(sp, imm.u, vf.s, imm.ux, imm.ux, vf.s)
                + amb.riemann(sp, imm.u, vf.s, imm.uy, imm.uy, vf.s))
    al, be = vf.sigma_chart
    a_sigma = al * al * sf.a_xx + 2.0 * al * be * sf.a_xy + be * be * sf.a_yy
    integrand = (grad_perp
                 - sf.norm_sq * vf.f ** 2
                 - rm
                 + (sf.mean_scalar * vf.f) ** 2
                 + a_sigma * sf.mean_scalar
                 + 2.0 * (al * px + be * py) * sf.mean_scalar)
    return imm.integrate(integrand)


def second_variation_energy(imm: Immersion, v) -> float:
    """Dirichlet-energy Hessian: int |nabla v|^2 - curvature term, dx dy."""
    vf = _as_field(imm, v)
    sp = imm.space
    dxv, dyv = _cov(imm, vf.v)
    grad = amb.inner(sp, dxv, dxv) + amb.inner(sp, dyv, dyv)
    rm = (amb.riemann(sp, imm.u, vf.v, imm.ux, imm.ux, vf.v)
          + amb.riemann(sp, imm.u, vf.v, imm.uy, imm.uy, vf.v))
    return float(imm.integrate_chart(grad - rm))


def energy_curvature_split(imm: Immersion, v) -> tuple[np.ndarray, np.ndarray]:
    """Complex and real curvature integrands of the energy Hessian.

    Returns (4 Rm(v, u_z, u_zbar, v), Rm(v,u_x,u_x,v) + Rm(v,u_y,u_y,v));
    the two agree identically, which cross-checks the complex-bilinear
    extension of the curvature tensor.
    """
    vf = _as_field(imm, v)
    sp = imm.space
    cplx = 4.0 * amb.riemann(sp, imm.u, vf.v.astype(complex), imm.uz,
                             imm.uzbar, vf.v.astype(complex))
    real = (amb.riemann(sp, imm.u, vf.v, imm.ux, imm.ux, vf.v)
            + amb.riemann(sp, imm.u, vf.v, imm.uy, imm.uy, vf.v))
    return cplx, real


def second_variation_volume(imm: Immersion, v, h_fn: Union[float, Callable],
                            grad_h_fn: Optional[Callable] = None) -> float:
    """Hessian of the enclosed-volume functional with weight dalpha = H dV_N."""
    vf = _as_field(imm, v)
    sf = imm.second_form
    sp = imm.space
    hvals = h_fn(imm.u) if callable(h_fn) else float(h_fn)
    dxs, dys = _cov(imm, vf.s)
    px = amb.inner(sp, dxs, imm.nu)
    py = amb.inner(sp, dys, imm.nu)
    al, be = vf.sigma_chart
    a_sigma = al * al * sf.a_xx + 2.0 * al * be * sf.a_xy + be * be * sf.a_yy
    integrand = (-hvals * vf.f * (sf.mean_scalar * vf.f)
                 - 2.0 * hvals * (al * px + be * py)
                 - hvals * a_sigma)
    if grad_h_fn is not None:
        grad = np.asarray(grad_h_fn(imm.u), dtype=float)
        integrand = integrand + vf.f * vf.f * amb.inner(sp, grad, imm.nu)
    return imm.integrate(integrand)


def _require_cmc(imm: Immersion):
    if np.isnan(imm.cmc_value):
        raise ValueError("operation requires a CMC immersion with declared h")


def second_variation_area_h(imm: Immersion, v) -> float:
    """Hessian of A + V_h at a CMC immersion (sees only the normal part)."""
    _require_cmc(imm)
    return second_variation_area(imm, v) + second_variation_volume(imm, v, imm.cmc_value)


def second_variation_energy_h(imm: Immersion, v) -> float:
    _require_cmc(imm)
    return second_variation_energy(imm, v) + second_variation_volume(imm, v, imm.cmc_value)


def jacobi_form(imm: Immersion, f: np.ndarray) -> float:
    """int |grad f|^2 - (|A|^2 + Ric(nu,nu)) f^2 dSigma (normal-part route)."""
    g = imm.grid
    fx, fy = g.diff_x(f), g.diff_y(f)
    stiff = float(imm.integrate_chart(fx * fx + fy * fy))
    return stiff - imm.integrate(imm.jacobi_potential * f * f)


# --------------------------------------------------------- comparison identity

def comparison_identity_residual(imm: Immersion, v) -> dict:
    """Residual of d2A = d2E - 8 int |eta|^2 dx dy for a conformal immersion."""
    vf = _as_field(imm, v)
    d2a = second_variation_area(imm, vf)
    d2e = second_variation_energy(imm, vf)
    defect = conformal_defect(imm, vf)
    resid = abs(d2a - d2e + defect.integral_chart)
    return {
        "d2_area": d2a,
        "d2_energy": d2e,
        "defect_chart": defect.integral_chart,
        "defect_surface": defect.integral_surface,
        "residual_abs": resid,
        "residual_rel": resid / max(abs(d2a), abs(d2e), 1.0),
    }


# -------------------------------------------------------------- finite differences

class ChartExitError(RuntimeError):
    """Deformation left the valid chart region of the ambient space."""


def _deformed_frame(imm: Immersion, vf: VariationField, t: float):
    """Position and chart partials of exp_u(t v), chain-ruled analytically."""
    sp = imm.space
    v = vf.v
    dxv = imm.grid.diff_x(v)
    dyv = imm.grid.diff_y(v)
    if sp.kind == "S3" and abs(t) * vf.norm_inf() > 0.5 * np.pi:
        raise ChartExitError("geodesic deformation exceeds the S3 chart range")
    if sp.kind == "FlatT3":
        # lift semantics: local integrands never need wrapping
        return imm.u + t * v, imm.ux + t * dxv, imm.uy + t * dyv
    p = amb.exp_map(sp, imm.u, v, t)
    a = amb.exp_directional(sp, imm.u, v, t, imm.ux, dxv)
    b = amb.exp_directional(sp, imm.u, v, t, imm.uy, dyv)
    return p, a, b


def _area_at(imm, vf, t):
    p, a, b = _deformed_frame(imm, vf, t)
    sp = imm.space
    g11 = amb.inner(sp, a, a)
    g22 = amb.inner(sp, b, b)
    g12 = amb.inner(sp, a, b)
    return float(imm.integrate_chart(np.sqrt(np.maximum(g11 * g22 - g12 ** 2, 0.0))))


def _energy_at(imm, vf, t):
    _, a, b = _deformed_frame(imm, vf, t)
    sp = imm.space
    return float(imm.integrate_chart(0.5 * (amb.inner(sp, a, a) + amb.inner(sp, b, b))))


def _volume_flux_at(imm, vf, t, hval):
    """d/dt of the enclosed volume at parameter t: int H dV_N(udot, u_x, u_y)."""
    p, a, b = _deformed_frame(imm, vf, t)
    sp = imm.space
    vel = vf.v if sp.kind in ("R3", "FlatT3") else amb.exp_velocity(sp, imm.u, vf.v, t)
    return float(imm.integrate_chart(hval * amb.volume_form(sp, p, vel, a, b)))


def _second_difference(fn, step):
    f0 = fn(0.0)

    def d2(h):
        return (-fn(2 * h) + 16 * fn(h) - 30 * f0 + 16 * fn(-h) - fn(-2 * h)) / (12 * h * h)
    return (16.0 * d2(0.5 * step) - d2(step)) / 15.0


def _first_difference(fn, step):
    def d1(h):
        return (-fn(2 * h) + 8 * fn(h) - 8 * fn(-h) + fn(-2 * h)) / (12 * h)
    return (16.0 * d1(0.5 * step) - d1(step)) / 15.0


def fd_second_variation(functional: str, imm: Immersion, v,
                        step: float | None = None) -> float:
    """Finite-difference Hessian along the geodesic deformation exp_u(t v).

    Area/energy functionals are differenced with the 5-point central second
    difference plus one Richardson level.  The enclosed volume has no global
    primitive 2-form off R^3, so its Hessian is the matching central first
    difference of the exact first-variation flux.
    """
    if functional not in FUNCTIONALS:
        raise ValueError(f"unknown functional {functional!r}")
    vf = _as_field(imm, v)
    vmax = vf.norm_inf()
    if vmax == 0.0:
        return 0.0
    if step is None:
        inj = np.pi if imm.space.kind == "S3" else 1.0
        step = 1e-3 * max(1.0, inj) / vmax
    if functional == "area":
        return _second_difference(lambda t: _area_at(imm, vf, t), step)
    if functional == "energy":
        return _second_difference(lambda t: _energy_at(imm, vf, t), step)
    _require_cmc(imm)
    h = imm.cmc_value
    if functional == "volume_h":
        return _first_difference(lambda t: _volume_flux_at(imm, vf, t, h), step)
    if functional == "area_h":
        return (_second_difference(lambda t: _area_at(imm, vf, t), step)
                + _first_difference(lambda t: _volume_flux_at(imm, vf, t, h), step))
    return (_second_difference(lambda t: _energy_at(imm, vf, t), step)
            + _first_difference(lambda t: _volume_flux_at(imm, vf, t, h), step))


def volume_primitive_r3(imm: Immersion, v, t: float) -> float:
    """V_h(exp_u(t v)) from the explicit global primitive in R^3.

    alpha_h = (h/3)(x1 dx2^dx3 - x2 dx1^dx3 + x3 dx1^dx2) pulls back to
    (h/3) det(p, p_x, p_y) dx dy; only meaningful for R3 immersions.
    """
    if imm.space.kind != "R3":
        raise amb.UnsupportedOperation("global volume primitive exists only in R3")
    _require_cmc(imm)
    vf = _as_field(imm, v)
    p, a, b = _deformed_frame(imm, vf, t)
    det = np.linalg.det(np.stack([p, a, b], axis=-2))
    return float(imm.integrate_chart(imm.cmc_value / 3.0 * det))


# ----------------------------------------------------------- pointwise bounds

def peter_paul_margin(imm: Immersion, v, eps: float) -> np.ndarray:
    """Pointwise margin of the Peter-Paul estimate on the volume cross terms.

    rhs - lhs with lhs = |e^{-2lam} h (w(v, nabla_x v, u_y) + w(v, u_x, nabla_y v))|
    and rhs = eps h^2 |v|^2 + (2 eps)^{-1} e^{-2lam} (|nabla_x v|^2 + |nabla_y v|^2).
    """
    _require_cmc(imm)
    vf = _as_field(imm, v)
    sp = imm.space
    h = imm.cmc_value
    dxv, dyv = _cov(imm, vf.v)
    w1 = amb.volume_form(sp, imm.u, vf.v, dxv, imm.uy)
    w2 = amb.volume_form(sp, imm.u, vf.v, imm.ux, dyv)
    e2i = 1.0 / imm.e2lam
    lhs = np.abs(e2i * h * (w1 + w2))
    rhs = (eps * h * h * amb.inner(sp, vf.v, vf.v)
           + 0.5 / eps * e2i * (amb.inner(sp, dxv, dxv) + amb.inner(sp, dyv, dyv)))
    return rhs - lhs
