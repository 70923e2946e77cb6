import math

import numpy as np
import pytest

from gnsharp.constants import GNParams, MINUS, PLUS, sharp_constant
from gnsharp.functionals import (
    COMPACT,
    DECAY,
    CutoffSpec,
    NormalizationError,
    RadialProfile,
    SmoothProfile,
    build_cutoff,
    conformal_invariance_check,
    dirichlet_energy,
    extremal_grid_profile,
    gn_quotient,
    h_extremal,
    mass_integral,
    normalize_exact,
    profile_from_csv,
    profile_to_csv,
    u_base_profile,
    yamabe_type_quotient,
)
from gnsharp.geometry import euclidean, schwarzschild_factor, space_form


def test_radial_profile_validation():
    r = np.linspace(0.0, 1.0, 10)
    with pytest.raises(ValueError):
        RadialProfile(r, np.ones(9), COMPACT)  # shape mismatch
    with pytest.raises(ValueError):
        RadialProfile(r[::-1].copy(), np.ones(10), COMPACT)  # decreasing radii
    with pytest.raises(ValueError):
        RadialProfile(r, np.ones(10), COMPACT)  # compact but nonzero end
    with pytest.raises(ValueError):
        RadialProfile(r, np.full(10, np.nan), DECAY)
    prof = RadialProfile(r, 1.0 - r, COMPACT)
    assert prof.scaled(2.0).values[0] == pytest.approx(2.0)


def test_h_extremal_shape():
    # minus regime: compact support at sqrt(lam/(1-alpha)), value lam^{1/(1-a)} at 0
    a, lam = 0.5, 2.0
    assert h_extremal(a, lam, 0.0) == pytest.approx(lam ** (1.0 / (1.0 - a)), rel=1e-14)
    edge = math.sqrt(lam / (1.0 - a))
    assert h_extremal(a, lam, edge * 1.0001) == 0.0
    assert h_extremal(a, lam, edge * 0.999) > 0.0
    # plus regime: algebraic decay, finite everywhere
    vals = h_extremal(1.5, 1.0, np.array([0.0, 10.0, 100.0]))
    assert vals[0] == pytest.approx(1.0)
    assert 0.0 < vals[2] < vals[1] < 1.0


def test_mass_and_energy_exact_polynomial():
    # u = (1 - r^2) on the unit ball of R^3:
    #   int u^2 = 32 pi / 105,  int |grad u|^2 = 16 pi / 5.
    r = np.linspace(0.0, 1.0, 4001)
    prof = RadialProfile(r, 1.0 - r**2, COMPACT)
    met = euclidean(3)
    assert mass_integral(prof, met, 2.0) == pytest.approx(32.0 * math.pi / 105.0, rel=1e-9)
    assert dirichlet_energy(prof, met) == pytest.approx(16.0 * math.pi / 5.0, rel=1e-7)


def test_quotient_scale_invariance():
    rng = np.random.default_rng(3)
    params = GNParams(3, 0.5, MINUS)
    prof = extremal_grid_profile(params)
    met = euclidean(3)
    base = gn_quotient(prof, met, params)
    for _ in range(3):
        c = float(rng.uniform(0.2, 9.0))
        assert gn_quotient(prof.scaled(c), met, params) == pytest.approx(base, rel=1e-11)


def test_quotient_dilation_invariance_along_family():
    # lam indexes dilations of the extremal family; the quotient is blind to it.
    for n, a, regime in [(3, 0.5, MINUS), (3, 1.2, PLUS)]:
        params = GNParams(n, a, regime)
        met = euclidean(n)
        q1 = gn_quotient(extremal_grid_profile(params, lam=1.0), met, params)
        q2 = gn_quotient(extremal_grid_profile(params, lam=2.3), met, params)
        assert q1 == pytest.approx(q2, rel=1e-8)


def test_extremal_attains_sharp_constant():
    for n, a, regime in [(4, 0.7, MINUS), (5, 1.2, PLUS)]:
        params = GNParams(n, a, regime)
        q = gn_quotient(extremal_grid_profile(params), euclidean(n), params)
        assert q == pytest.approx(sharp_constant(n, a, regime), rel=1e-6)


def test_nearby_profiles_sit_above_the_sharp_constant():
    params = GNParams(3, 0.5, MINUS)
    met = euclidean(3)
    ref = sharp_constant(3, 0.5, MINUS)
    prof = extremal_grid_profile(params)
    rng = np.random.default_rng(11)
    for _ in range(5):
        bump = 1.0 + 0.05 * np.sin(rng.uniform(1.0, 6.0) * prof.radii)
        perturbed = RadialProfile(prof.radii, prof.values * bump, COMPACT)
        assert gn_quotient(perturbed, met, params) > ref


def test_zero_profile_rejected():
    r = np.linspace(0.0, 1.0, 50)
    prof = RadialProfile(r, np.zeros(50), COMPACT)
    with pytest.raises(ValueError):
        gn_quotient(prof, euclidean(3), GNParams(3, 0.5, MINUS))


def test_yamabe_quotient_reduces_to_gn_on_flat_space():
    params = GNParams(3, 0.5, MINUS)
    prof = extremal_grid_profile(params)
    met = euclidean(3)
    assert yamabe_type_quotient(prof, met, params) == pytest.approx(
        gn_quotient(prof, met, params), rel=1e-12
    )
    # positive curvature strictly increases it
    met_s = space_form(3, 1.0)
    r = np.linspace(0.0, 2.0, 800)
    prof_s = RadialProfile(r, np.clip(1.0 - (r / 2.0) ** 2, 0.0, None) ** 2, COMPACT)
    assert yamabe_type_quotient(prof_s, met_s, params) > gn_quotient(prof_s, met_s, params)


def test_normalize_exact_sets_unit_mass():
    for n, a, regime in [(3, 0.5, MINUS), (4, 1.2, PLUS)]:
        params = GNParams(n, a, regime)
        r = np.linspace(0.0, 3.0, 700)
        prof = RadialProfile(r, 5.0 * np.clip(1.0 - (r / 3.0) ** 2, 0.0, None), COMPACT)
        fixed = normalize_exact(prof, euclidean(n), params)
        assert mass_integral(fixed, euclidean(n), params.mass_exponent) == pytest.approx(
            1.0, rel=1e-12
        )


def test_u_base_profile_is_normalized():
    params = GNParams(3, 0.6, MINUS)
    ub = u_base_profile(params, 0.02)
    assert mass_integral(ub, euclidean(3), params.mass_exponent) == pytest.approx(1.0, rel=1e-10)


def test_cutoff_plateau_and_support():
    cut = build_cutoff(CutoffSpec(), 0.01, euclidean(3))
    assert cut.squared(0.0) == pytest.approx(1.0)
    assert cut.squared(0.5) == pytest.approx(1.0)
    assert cut.squared(2.0) == 0.0
    # a jet perturbs the plateau but must stay positive on the support
    spec = CutoffSpec(a_scalar=0.05, beta1=0.02, beta2=0.01, b_E=0.3, d_trace=0.04, r0=0.8)
    cut = build_cutoff(spec, 0.01, space_form(3, 1.0))
    assert cut.squared(0.0) > 0.99
    assert cut.squared(0.79) >= 0.0
    assert cut.squared(1.0) == 0.0


def test_cutoff_positivity_guard():
    # a wildly negative jet coefficient drives the squared cutoff negative
    spec = CutoffSpec(a_scalar=-80.0, r0=1.0)
    with pytest.raises(ValueError):
        build_cutoff(spec, 0.4, euclidean(3))


def test_conformal_invariance_smooth_branch():
    # C^2 bump supported on the annulus [2, 10]: the factor's pole at r = 0
    # is the chart's second asymptotic end, so admissible test functions
    # must stay away from it.
    c, w = 6.0, 4.0

    def val(r):
        x = np.clip((np.asarray(r, dtype=float) - c) / w, -1.0, 1.0)
        return (1.0 - x * x) ** 3

    def der(r):
        x = np.clip((np.asarray(r, dtype=float) - c) / w, -1.0, 1.0)
        return -6.0 * x * (1.0 - x * x) ** 2 / w

    phi = SmoothProfile(value=val, derivative=der, support=c + w, breakpoints=(c - w, c))
    lhs, rhs, diff = conformal_invariance_check(phi, schwarzschild_factor(3, 1.0), 3, 40.0)
    assert abs(diff) <= 1e-7 * max(abs(lhs), abs(rhs))


def test_profile_csv_roundtrip(tmp_path):
    r = np.linspace(0.0, 2.0, 64)
    prof = RadialProfile(r, np.clip(1.0 - r / 2.0, 0.0, None), COMPACT)
    path = tmp_path / "prof.csv"
    profile_to_csv(prof, str(path))
    back = profile_from_csv(str(path))
    assert np.array_equal(back.radii, prof.radii)
    assert np.array_equal(back.values, prof.values)
    assert back.boundary == COMPACT
