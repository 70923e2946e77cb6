"""Tests for the small-t series machinery: fits, predictions, block ratios."""

import math

import numpy as np
import pytest

from gnsharp.constants import GNParams, MINUS, PLUS
from gnsharp.expansion import (
    BP_JET,
    ExponentConditionError,
    L_series,
    W_series,
    default_t_grid,
    fit_series,
    predict_L_coeffs,
    predict_W_coeffs,
    series_report,
    tau_slope,
    verify_DA_ratios,
)
from gnsharp.functionals import (
    CutoffSpec,
    L_functional,
    build_cutoff,
    cutoff_product,
    normalize_exact,
    u_base_profile,
)
from gnsharp.geometry import (
    conformal_radial,
    curvature_at_pole,
    euclidean,
    schwarzschild_factor,
    space_form,
)


# ---------------------------------------------------------------------------
# fit_series on synthetic data


def test_fit_series_recovers_exact_quadratic():
    c0, c1, c2 = 0.75, -1.3, 4.2
    ts = np.geomspace(0.2, 1e-4, 12)
    samples = [(t, c0 + c1 * t + c2 * t * t) for t in ts]
    fit = fit_series(samples)
    assert abs(fit.c0 - c0) < 1e-9
    assert abs(fit.c1 - c1) < 1e-8
    assert abs(fit.c2 - c2) < 1e-6
    assert fit.residual < 1e-8
    assert fit.reliable


def test_fit_series_known_constant_pins_c0():
    # With the constant supplied, c1/c2 come out cleanly even though the
    # diagnostic c0 estimate carries its own extrapolation error.
    c1, c2 = 2.0, -7.5
    ts = np.geomspace(0.1, 5e-4, 10)
    samples = [(t, c1 * t + c2 * t * t) for t in ts]
    fit = fit_series(samples, known_constant=0.0)
    assert abs(fit.c0) < 1e-10
    assert abs(fit.c1 - c1) < 1e-9
    assert abs(fit.c2 - c2) < 1e-6


def test_fit_series_input_validation():
    good = [(t, t) for t in np.geomspace(0.1, 1e-4, 8)]
    with pytest.raises(ValueError):
        fit_series(good[:5])  # too few samples
    with pytest.raises(ValueError):
        fit_series([(t, 1.0) for t in np.geomspace(0.1, 0.05, 8)])  # one decade
    bad = list(good)
    bad[3] = (-bad[3][0], bad[3][1])
    with pytest.raises(ValueError):
        fit_series(bad)


# ---------------------------------------------------------------------------
# assembled series against closed-form predictions


def test_L_series_matches_prediction_on_round_sphere():
    params = GNParams(n=3, alpha=0.6, regime=MINUS)
    metric = space_form(3, 1.0)
    fit = L_series(params, metric, a_choice=BP_JET)
    predicted = predict_L_coeffs(params, curvature_at_pole(metric), a_choice=BP_JET)
    report = series_report("L", params, metric, fit, predicted, tol_first=1e-4, tol_second=1e-3)
    assert report["verdict"]
    assert report["fitted"]["c1"] == fit.c1
    assert abs(fit.c1 - predicted[0]) <= 1e-6 * abs(predicted[0])


def test_W_series_matches_prediction_on_round_sphere():
    params = GNParams(n=3, alpha=1.2, regime=PLUS)
    metric = space_form(3, 1.0)
    fit = W_series(params, metric)
    predicted = predict_W_coeffs(params, curvature_at_pole(metric))
    assert predicted[0] == 0.0  # no first-order term in the weighted series
    report = series_report("W", params, metric, fit, predicted, tol_first=1e-4, tol_second=1e-3)
    assert report["verdict"]


def test_flat_series_coefficients_vanish():
    params = GNParams(n=3, alpha=0.6, regime=MINUS)
    fit = L_series(params, euclidean(3), a_choice=BP_JET)
    # Judge "zero" on the scale of what curvature K=1 would produce.
    p1, p2 = predict_L_coeffs(params, curvature_at_pole(space_form(3, 1.0)), a_choice=BP_JET)
    scale = max(abs(p1), abs(p2))
    assert abs(fit.c1) < 1e-4 * scale
    assert abs(fit.c2) < 1e-3 * scale


def test_plus_regime_second_order_exponent_gate():
    # alpha = 2 is an admissible exponent for n = 3 but sits beyond
    # (n+6)/(n+2) = 1.8, where the order-2 tail moments stop converging.
    params = GNParams(n=3, alpha=2.0, regime=PLUS)
    with pytest.raises(ExponentConditionError):
        L_series(params, space_form(3, 1.0))
    with pytest.raises(ExponentConditionError):
        W_series(params, euclidean(3))


def test_expansion_rejects_conformal_metric():
    params = GNParams(n=3, alpha=0.5, regime=MINUS)
    with pytest.raises(ValueError, match="normal coordinates"):
        L_series(params, conformal_radial(3, schwarzschild_factor(3, 1.0), r_max=40.0))


# ---------------------------------------------------------------------------
# building-block ratios


def test_verify_da_ratios_round_sphere():
    params = GNParams(n=3, alpha=0.5, regime=MINUS)
    spec = CutoffSpec(a_scalar=0.05, beta1=0.02, beta2=0.01, b_E=0.3, d_trace=0.04, r0=0.8)
    report = verify_DA_ratios(
        params,
        space_form(3, 1.0),
        spec,
        m=params.mass_exponent,
        tol_first=1e-3,
        tol_second=5e-3,
    )
    assert report["ok"]
    for key in ("mass", "energy", "sc_mass"):
        block = report[key]
        assert block["first"]["ok"] and block["second"]["ok"]
        assert block["first"]["rel_err"] < 1e-3
    # The leading constants are the flat closed forms.
    assert report["mass"]["c0"]["ok"] and report["energy"]["c0"]["ok"]


# ---------------------------------------------------------------------------
# rebalancing slope


def test_tau_slope_minimizes_assembled_functional():
    params = GNParams(n=3, alpha=0.5, regime=MINUS)
    metric = euclidean(3)
    slope = tau_slope(params)
    assert slope > 0.0
    t = 1e-3
    u = normalize_exact(
        cutoff_product(u_base_profile(params, t), build_cutoff(CutoffSpec(r0=1.0), t, metric)),
        metric,
        params,
    )
    factors = np.linspace(0.6, 1.6, 21)
    values = [L_functional(params, u, f * slope * t, metric) for f in factors]
    best = factors[int(np.argmin(values))]
    assert abs(best - 1.0) <= 0.1


def test_default_t_grid_spans_two_decades():
    params = GNParams(n=4, alpha=1.2, regime=PLUS)
    grid = default_t_grid(params, r0=0.8)
    assert len(grid) >= 6
    assert grid[0] / grid[-1] >= 100.0
    assert all(a > b for a, b in zip(grid, grid[1:]))
