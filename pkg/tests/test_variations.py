import numpy as np
import pytest

from cmcindex import ambient as amb
from cmcindex import gallery as gal
from cmcindex import variations as vr

SEEDS = (11, 12, 13)


def _ones(imm):
    return np.ones(imm.u.shape[:2])


# ------------------------------------------------------------------ splitting

@pytest.mark.parametrize("name", ["sphere_s3", "clifford_torus", "delaunay_t3"])
def test_split_invariants(name):
    kw = {"k": 2} if name == "delaunay_t3" else {}
    imm = gal.gallery(name, **kw)
    vf = vr.seeded_variation(imm, 4)
    sp = imm.space
    assert np.abs(vf.sigma + vf.s - vf.v).max() < 1e-12
    assert np.abs(amb.inner(sp, vf.sigma, imm.nu)).max() < 1e-12
    assert np.abs(amb.inner(sp, vf.s, imm.ux)).max() < 1e-12
    assert np.abs(amb.inner(sp, vf.s, imm.uy)).max() < 1e-12
    # complex split recomposes sigma
    inv = (1.0 / imm.e2lam)[..., None]
    s01 = 2.0 * inv * amb.inner(sp, vf.sigma, imm.uz)[..., None] * imm.uzbar
    s10 = 2.0 * inv * amb.inner(sp, vf.sigma, imm.uzbar)[..., None] * imm.uz
    assert np.abs((s01 + s10) - vf.sigma).max() < 1e-12


def test_variation_tangency_enforced():
    imm = gal.gallery("sphere_s3")
    raw = np.ones(imm.u.shape[:2] + (4,))
    vf = vr.VariationField(imm, raw)
    assert np.abs(amb.inner(imm.space, vf.v, imm.u)).max() < 1e-12


def test_seeded_variation_roundtrip():
    imm = gal.gallery("clifford_torus")
    vf = vr.seeded_variation(imm, 123)
    clone = vr.variation_from_spec(imm, vf.spec)
    assert np.abs(clone.v - vf.v).max() == 0.0


# ------------------------------------------------------------- conformal defect

def test_defect_zero_for_zero_variation():
    imm = gal.gallery("clifford_torus")
    d = vr.conformal_defect(imm, np.zeros_like(imm.u))
    assert d.integral_chart == 0.0


def test_defect_zero_for_normal_variation_on_umbilic_sphere():
    imm = gal.gallery("sphere_r3")
    rng = np.random.default_rng(0)
    f = vr.random_scalar(imm, rng)
    d = vr.conformal_defect(imm, vr.normal_variation(imm, f))
    assert d.integral_chart < 1e-20


def test_defect_zero_for_parallel_tangential_field_on_clifford():
    imm = gal.gallery("clifford_torus")
    v = 0.7 * imm.ux + 0.3 * imm.uy
    d = vr.conformal_defect(imm, v)
    assert np.abs(d.density).max() < 1e-16


def test_defect_two_densities_agree():
    imm = gal.gallery("delaunay_t3", k=2)
    d = vr.conformal_defect(imm, vr.seeded_variation(imm, 7))
    assert abs(d.integral_chart - d.integral_surface) <= 1e-10 * max(1, d.integral_chart)
    assert np.all(d.density >= 0)


# --------------------------------------------------------- closed-form values

def test_sphere_closed_form_second_variations():
    imm = gal.gallery("sphere_r3")
    nu = vr.normal_variation(imm, _ones(imm))
    assert abs(vr.second_variation_area(imm, nu) - 8 * np.pi) < 1e-9
    assert abs(vr.second_variation_volume(imm, nu, imm.cmc_value) + 16 * np.pi) < 1e-9
    assert abs(vr.second_variation_area_h(imm, nu) + 8 * np.pi) < 1e-9


def test_first_variations_closed_forms_and_criticality():
    imm = gal.gallery("sphere_r3")
    nu = vr.normal_variation(imm, _ones(imm))
    da = vr.first_variation_area(imm, nu)
    dv = vr.first_variation_volume(imm, nu, imm.cmc_value)
    assert abs(da + 8 * np.pi) < 1e-9
    assert abs(dv - 8 * np.pi) < 1e-9
    # minimal Clifford torus: dA = 0 for every variation
    cl = gal.gallery("clifford_torus")
    for s in SEEDS:
        assert abs(vr.first_variation_area(cl, vr.seeded_variation(cl, s))) < 1e-10
    # CMC criticality of A_h on the Delaunay torus
    dl = gal.gallery("delaunay_t3", k=2)
    for s in SEEDS:
        vf = vr.seeded_variation(dl, s)
        resid = (vr.first_variation_area(dl, vf)
                 + vr.first_variation_volume(dl, vf, dl.cmc_value))
        assert abs(resid) < 1e-6 * max(1.0, abs(vr.first_variation_area(dl, vf)))


def test_volume_zero_variation_trivial():
    imm = gal.gallery("sphere_r3")
    z = np.zeros_like(imm.u)
    assert vr.second_variation_area(imm, z) == 0.0
    assert vr.second_variation_energy(imm, z) == 0.0
    assert vr.second_variation_volume(imm, z, imm.cmc_value) == 0.0
    assert vr.fd_second_variation("energy", imm, z) == 0.0
    assert vr.first_variation_area(imm, z) == 0.0


def test_constant_weight_matches_normal_route():
    # sigma = 0, s = f nu, H == h: d2V = -int h^2 f^2 (paper's corollary route)
    imm = gal.gallery("sphere_s3")
    rng = np.random.default_rng(1)
    f = vr.random_scalar(imm, rng)
    got = vr.second_variation_volume(imm, vr.normal_variation(imm, f), imm.cmc_value)
    expect = -imm.cmc_value ** 2 * imm.integrate(f * f)
    assert abs(got - expect) < 1e-8 * max(1, abs(expect))


# ------------------------------------------------------------------ identities

@pytest.mark.parametrize("name,kw,res", [
    ("sphere_r3", {}, (64, 48)),
    ("sphere_s3", {}, (64, 48)),
    ("sphere_h3", {}, (64, 48)),
    ("clifford_torus", {}, (64, 64)),
    ("delaunay_t3", {"k": 2}, (64, 64)),
])
def test_comparison_identity_and_refinement(name, kw, res):
    imm = gal.gallery(name, resolution=res, **kw)
    fine = gal.gallery(name, resolution=(2 * res[0], 2 * res[1]), **kw)
    worst = worst_f = 0.0
    for s in SEEDS:
        worst = max(worst, vr.comparison_identity_residual(
            imm, vr.seeded_variation(imm, s))["residual_rel"])
        worst_f = max(worst_f, vr.comparison_identity_residual(
            fine, vr.seeded_variation(fine, s))["residual_rel"])
    assert worst < 1e-6
    assert worst_f < worst / 4
    assert worst_f > 1e-14  # above roundoff: the decrease is genuine


def test_area_hessian_below_energy_hessian():
    imm = gal.gallery("delaunay_t3", k=2)
    for s in SEEDS:
        rep = vr.comparison_identity_residual(imm, vr.seeded_variation(imm, s))
        assert rep["defect_chart"] >= 0
        assert rep["d2_area"] <= rep["d2_energy"] + 1e-9


def test_quadratic_homogeneity():
    imm = gal.gallery("clifford_torus")
    vf = vr.seeded_variation(imm, 21)
    base = {
        "area": vr.second_variation_area(imm, vf),
        "energy": vr.second_variation_energy(imm, vf),
        "volume": vr.second_variation_volume(imm, vf, 1.7),
        "area_h": vr.second_variation_area_h(imm, vf),
        "energy_h": vr.second_variation_energy_h(imm, vf),
    }
    for c in (-1.0, 2.0, 3.7):
        scaled = vr.VariationField(imm, c * vf.v)
        vals = {
            "area": vr.second_variation_area(imm, scaled),
            "energy": vr.second_variation_energy(imm, scaled),
            "volume": vr.second_variation_volume(imm, scaled, 1.7),
            "area_h": vr.second_variation_area_h(imm, scaled),
            "energy_h": vr.second_variation_energy_h(imm, scaled),
        }
        for k in base:
            assert abs(vals[k] - c * c * base[k]) < 1e-12 * max(1, abs(base[k])), k


@pytest.mark.parametrize("name,kw", [
    ("sphere_r3", {}), ("sphere_s3", {}), ("clifford_torus", {}),
    ("delaunay_t3", {"k": 2}),
])
def test_normal_part_reduction_on_cmc(name, kw):
    imm = gal.gallery(name, **kw)
    for s in SEEDS:
        vf = vr.seeded_variation(imm, s)
        full = vr.second_variation_area_h(imm, vf)
        norm = vr.second_variation_area_h(imm, vr.VariationField(imm, vf.s))
        assert abs(full - norm) < 1e-4 * max(1.0, abs(full))
    # purely tangential variations are annihilated
    vf = vr.seeded_variation(imm, 99)
    tang = vr.VariationField(imm, vf.sigma)
    assert abs(vr.second_variation_area_h(imm, tang)) < 1e-4 * max(
        1.0, abs(vr.second_variation_area(imm, tang)))


def test_energy_complex_and_real_curvature_terms_agree():
    for name, kw in (("sphere_s3", {}), ("delaunay_t3", {"k": 2})):
        imm = gal.gallery(name, **kw)
        vf = vr.seeded_variation(imm, 31)
        cplx, real = vr.energy_curvature_split(imm, vf)
        assert np.abs(cplx.imag).max() < 1e-10 * max(1, np.abs(real).max())
        assert np.abs(cplx.real - real).max() < 1e-10 * max(1, np.abs(real).max())


def test_flat_ambient_energy_is_pure_dirichlet():
    imm = gal.gallery("delaunay_t3", k=2)
    vf = vr.seeded_variation(imm, 17)
    _, real = vr.energy_curvature_split(imm, vf)
    assert np.abs(real).max() == 0.0


# ------------------------------------------------------------------ fd oracles

def test_fd_oracle_sphere_closed_forms():
    imm = gal.gallery("sphere_r3")
    nu = vr.normal_variation(imm, _ones(imm))
    assert abs(vr.fd_second_variation("area", imm, nu) - 8 * np.pi) < 1e-6
    assert abs(vr.fd_second_variation("volume_h", imm, nu) + 16 * np.pi) < 1e-6
    assert abs(vr.fd_second_variation("area_h", imm, nu) + 8 * np.pi) < 1e-6


@pytest.mark.parametrize("name,kw", [
    ("sphere_r3", {}), ("sphere_s3", {}), ("sphere_h3", {}),
    ("clifford_torus", {"resolution": (64, 64)}),
    ("delaunay_t3", {"k": 2, "resolution": (64, 64)}),
])
def test_fd_oracle_matches_formulas(name, kw):
    imm = gal.gallery(name, **kw)
    for s in SEEDS:
        vf = vr.seeded_variation(imm, 200 + s)
        for fn, form in (("area", vr.second_variation_area(imm, vf)),
                         ("energy", vr.second_variation_energy(imm, vf)),
                         ("volume_h", vr.second_variation_volume(imm, vf, imm.cmc_value)),
                         ("area_h", vr.second_variation_area_h(imm, vf)),
                         ("energy_h", vr.second_variation_energy_h(imm, vf))):
            fd = vr.fd_second_variation(fn, imm, vf)
            assert abs(form - fd) < 1e-4 * max(1.0, abs(form)), (name, fn)


def test_fd_oracle_gap_decreases_under_refinement():
    gaps = []
    for res in ((48, 48), (96, 96)):
        imm = gal.gallery("clifford_torus", resolution=res)
        vf = vr.seeded_variation(imm, 77)
        form = vr.second_variation_area(imm, vf)
        gaps.append(abs(form - vr.fd_second_variation("area", imm, vf))
                    / max(1.0, abs(form)))
    assert gaps[0] > 4.0 * gaps[1]
    assert gaps[1] > 1e-13  # still genuine truncation, not roundoff


def test_r3_primitive_volume_path_agrees():
    # second difference of the explicit primitive = flux-difference oracle
    imm = gal.gallery("sphere_r3")
    vf = vr.seeded_variation(imm, 41)
    step = 1e-3 / vf.norm_inf()
    f0 = vr.volume_primitive_r3(imm, vf, 0.0)

    def d2(h):
        return (-vr.volume_primitive_r3(imm, vf, 2 * h)
                + 16 * vr.volume_primitive_r3(imm, vf, h) - 30 * f0
                + 16 * vr.volume_primitive_r3(imm, vf, -h)
                - vr.volume_primitive_r3(imm, vf, -2 * h)) / (12 * h * h)

    prim = (16 * d2(step / 2) - d2(step)) / 15
    flux = vr.fd_second_variation("volume_h", imm, vf)
    form = vr.second_variation_volume(imm, vf, imm.cmc_value)
    assert abs(prim - flux) < 1e-6 * max(1, abs(form))
    assert abs(prim - form) < 1e-4 * max(1, abs(form))


def test_volume_hessian_with_nonconstant_weight():
    # dalpha = p3 dV on R^3 has primitive alpha = (p3^2/2) dx1 ^ dx2; compare
    # its literal second difference against the Hessian with gradient term.
    imm = gal.gallery("sphere_r3")
    vf = vr.seeded_variation(imm, 43)

    def v_alpha(t):
        p, a, b = vr._deformed_frame(imm, vf, t)
        det2 = a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]
        return float(imm.integrate_chart(0.5 * p[..., 2] ** 2 * det2))

    form = vr.second_variation_volume(
        imm, vf, lambda p: p[..., 2],
        grad_h_fn=lambda p: np.broadcast_to(np.array([0.0, 0.0, 1.0]), p.shape))
    fd = vr._second_difference(v_alpha, 1e-3 / vf.norm_inf())
    assert abs(form - fd) < 1e-4 * max(1.0, abs(form))


def test_chart_exit_guard():
    imm = gal.gallery("sphere_s3")
    vf = vr.normal_variation(imm, 100.0 * _ones(imm))
    with pytest.raises(vr.ChartExitError):
        vr.fd_second_variation("area", imm, vf, step=0.05)


def test_fd_unknown_functional_rejected():
    imm = gal.gallery("sphere_r3")
    with pytest.raises(ValueError):
        vr.fd_second_variation("willmore", imm, vr.normal_variation(imm, _ones(imm)))


# -------------------------------------------------------------- peter-paul

@pytest.mark.parametrize("name,kw", [
    ("sphere_r3", {}), ("sphere_s3", {}), ("sphere_h3", {}),
    ("delaunay_t3", {"k": 2}),
])
def test_peter_paul_pointwise(name, kw):
    imm = gal.gallery(name, **kw)
    for s in SEEDS:
        vf = vr.seeded_variation(imm, 300 + s)
        for eps in (0.5, 1.0):
            marg = vr.peter_paul_margin(imm, vf, eps)
            assert marg.min() > -1e-12 * max(1.0, np.abs(marg).max())
