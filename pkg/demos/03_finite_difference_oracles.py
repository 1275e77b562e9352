"""Analytic Hessians vs finite-difference oracles.

Every second-variation formula is validated against a geodesic-deformation
finite difference: u_t = exp_u(t v) is evaluated in closed form, the
functional is quadrature-sampled at a few t, and a Richardson-extrapolated
central difference supplies an independent value.  On the round sphere the
numbers are classical: d2A[nu,nu] = 8 pi, d2V_h[nu,nu] = -16 pi, and the
constrained Hessian d2A_h[nu,nu] = -8 pi.
"""

import numpy as np

from cmcindex import build_surface, variations as vr

imm = build_surface("sphere_r3", radius=1.0)
nu = vr.normal_variation(imm, np.ones(imm.u.shape[:2]))
print("Unit sphere in R^3, v = nu (the oriented, inward unit normal):")
for fn, exact in (("area", 8 * np.pi), ("volume_h", -16 * np.pi),
                  ("area_h", -8 * np.pi)):
    form = {"area": vr.second_variation_area(imm, nu),
            "volume_h": vr.second_variation_volume(imm, nu, imm.cmc_value),
            "area_h": vr.second_variation_area_h(imm, nu)}[fn]
    fd = vr.fd_second_variation(fn, imm, nu)
    print(f"  {fn:9s} formula {form:+.9f}  fd {fd:+.9f}  exact {exact:+.9f}")

print("""
First variations at the same sphere (criticality of A_h):
  dA[nu]   = -h Area = -8 pi rho
  dV_h[nu] = +h Area = +8 pi rho""")
print(f"  dA[nu]   = {vr.first_variation_area(imm, nu):+.9f}")
print(f"  dV_h[nu] = {vr.first_variation_volume(imm, nu, imm.cmc_value):+.9f}")

print("\nRandom variations on every gallery member, relative formula-vs-fd gap:")
cases = [("sphere_r3", {}), ("sphere_s3", {}), ("sphere_h3", {}),
         ("clifford_torus", {"resolution": (64, 64)}),
         ("delaunay_t3", {"k": 2, "resolution": (64, 64)})]
for name, kw in cases:
    imm = build_surface(name, **kw)
    worst = 0.0
    for s in range(5):
        vf = vr.seeded_variation(imm, 50 + s)
        for fn, form in (("area", vr.second_variation_area(imm, vf)),
                         ("energy", vr.second_variation_energy(imm, vf)),
                         ("volume_h", vr.second_variation_volume(imm, vf, imm.cmc_value))):
            fd = vr.fd_second_variation(fn, imm, vf)
            worst = max(worst, abs(form - fd) / max(1.0, abs(form)))
    print(f"  {imm.name:36s} {worst:.3e}")
