"""Small-t series of the localized families against closed-form predictions.

The drivers here evaluate the mass/energy building-block integrals and the
assembled functionals along the t-parametrized localized profiles, fit
c0 + c1 t + c2 t^2 on a decreasing geometric t-grid, and compare the fitted
coefficients with the closed beta-ratio forms.  The t-grids are gated per
regime: for alpha < 1 the profile support must sit inside the plateau's flat
part, and for alpha > 1 the plateau truncates an algebraic tail whose decay
exponents decide how large t may be before the truncation error contaminates
the t^2 coefficient.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .constants import (
    CutoffJet,
    GNParams,
    MINUS,
    beta1_constraint,
    beta2_constraint,
    c_coefficients,
    exponents,
    flat_energy_constant,
    flat_mass_constant,
    j_coefficient,
    sigma,
    zeta_chi,
)
from .functionals import (
    _QUAD_OPTS,
    Cutoff,
    CutoffSpec,
    L_functional,
    SmoothProfile,
    W_functional,
    _profile_shape,
    _profile_shape_derivative,
    build_cutoff,
    cutoff_product,
    normalize_exact,
    u_base_profile,
)
from .geometry import (
    CONFORMAL,
    CurvatureAtPole,
    E_v,
    RadialMetric,
    curvature_at_pole,
    scalar_curvature,
    volume_density,
)
from .specfun import script_beta, unit_sphere_area

__all__ = [
    "SeriesFit",
    "ExponentConditionError",
    "fit_series",
    "tau_slope",
    "default_t_grid",
    "predict_L_coeffs",
    "predict_W_coeffs",
    "L_series",
    "W_series",
    "verify_DA_ratios",
    "series_report",
    "samples_to_csv",
]

ZERO_JET = "zero"
BP_JET = "bp"

_DEFAULT_TOL_C1 = 1e-3
_DEFAULT_TOL_C2 = 5e-3


class ExponentConditionError(ValueError):
    """A tail-decay or range condition required by the expansion fails."""


@dataclass(frozen=True)
class SeriesFit:
    """Fitted c0 + c1 t + c2 t^2 with diagnostics.

    ``c0`` is always reported (for the assembled functionals it measures the
    constant-term cancellation); ``residual`` is the worst model deviation
    relative to the largest term; ``reliable`` flags residual <= tolerance.
    """

    c0: float
    c1: float
    c2: float
    residual: float
    t_samples: tuple[tuple[float, float], ...]
    reliable: bool


def _neville_zero(ts: np.ndarray, ys: np.ndarray) -> float:
    """Polynomial extrapolation of (t, y) samples to t = 0."""
    p = [float(y) for y in ys]
    t = [float(x) for x in ts]
    n = len(p)
    for j in range(1, n):
        for i in range(n - j):
            p[i] = (-t[i + j] * p[i] + t[i] * p[i + 1]) / (t[i] - t[i + j])
    return p[0]


def fit_series(
    samples,
    known_constant: float | None = None,
    order: int = 2,
    tol: float = _DEFAULT_TOL_C2,
) -> SeriesFit:
    """Fit c0 + c1 t + c2 t^2 to (t, value) samples on a decreasing t-grid.

    c1 comes from polynomial extrapolation of (value - c0)/t to t = 0; c2
    from a t^2-weighted least-squares fit of the remainder divided by t^2
    (the weighting keeps quadrature noise at the smallest t from dominating).
    Pass ``known_constant=0.0`` when the constant term vanishes identically;
    c0 is then still estimated by extrapolation as a diagnostic.
    """
    pairs = sorted(((float(t), float(v)) for t, v in samples), key=lambda p: -p[0])
    ts = np.array([p[0] for p in pairs])
    vs = np.array([p[1] for p in pairs])
    if ts.size < 6:
        raise ValueError(f"need at least 6 samples, got {ts.size}")
    if np.any(np.diff(ts) >= 0.0) or ts[-1] <= 0.0:
        raise ValueError("t samples must be positive and distinct")
    if ts[0] / ts[-1] < 100.0 * (1.0 - 1e-9):
        raise ValueError("t samples must span at least two decades")
    c0_diag = _neville_zero(ts, vs)
    c0_used = c0_diag if known_constant is None else known_constant
    reduced = vs - c0_used
    c1 = _neville_zero(ts, reduced / ts)
    # The least-squares stage fits two nuisance orders beyond the reported
    # coefficient; the residual is measured against the full fitted model so
    # that genuine higher-order signal is not mistaken for noise.
    w = ts  # sqrt of the t^2 weights
    if order < 2:
        c2 = math.nan
        h = reduced / ts - c1
        basis = np.vstack([ts, ts**2]).T
        coef, *_ = np.linalg.lstsq(basis * w[:, None], h * w, rcond=None)
        model = c0_used + c1 * ts + (coef[0] + coef[1] * ts) * ts**2
        scale = max(float(np.max(np.abs(vs))), abs(c1) * float(ts[0]), 1e-12)
    else:
        h = (reduced - c1 * ts) / ts**2
        basis = np.vstack([np.ones_like(ts), ts, ts**2]).T
        coef, *_ = np.linalg.lstsq(basis * w[:, None], h * w, rcond=None)
        c2 = float(coef[0])
        model = c0_used + c1 * ts + (c2 + coef[1] * ts + coef[2] * ts**2) * ts**2
        scale = max(
            float(np.max(np.abs(vs))),
            abs(c1) * float(ts[0]),
            abs(c2) * float(ts[0]) ** 2,
            1e-12,
        )
    residual = float(np.max(np.abs(vs - model))) / scale
    return SeriesFit(
        c0=c0_diag,
        c1=float(c1),
        c2=c2,
        residual=residual,
        t_samples=tuple(zip(ts.tolist(), vs.tolist())),
        reliable=residual <= tol,
    )


# ---------------------------------------------------------------------------
# t-grids and exponent gates


def _plus_tail_exponents(params: GNParams, powers: tuple[float, ...], with_energy: bool) -> list[float]:
    n, a = params.n, params.alpha
    qs = [m / (a - 1.0) - n / 2.0 for m in powers]
    if with_energy:
        qs.append(2.0 * a / (a - 1.0) - n / 2.0 - 1.0)
    return qs


def default_t_grid(
    params: GNParams,
    r0: float,
    powers: tuple[float, ...] | None = None,
    min_samples: int = 6,
) -> tuple[float, ...]:
    """Decreasing geometric t-grid obeying the regime's validity gates.

    alpha < 1: the profile support sqrt(8t/(1-alpha)) must stay inside the
    plateau's flat half, capping t at (1-alpha) r0^2/32; the grid then halves
    until it holds >= 6 samples spanning two decades.  alpha > 1: the
    plateau truncates tails decaying like r^{-2q}; the grid starts at the t
    where the slowest truncation error drops below 1e-12 and spans two
    decades from there.
    """
    a = params.alpha
    if powers is None:
        powers = (params.alpha + 1.0, 2.0 * params.alpha, 2.0)
    if a < 1.0:
        t_top = min(0.1, (1.0 - a) * r0 * r0 / 32.0)
        count = max(min_samples, 8)
    else:
        qs = _plus_tail_exponents(params, powers, with_energy=True)
        q_min = min(qs)
        if q_min <= 0.0:
            raise ExponentConditionError(
                f"tail decay exponent {q_min:.4g} <= 0: the plateau truncation "
                "does not vanish fast enough for a series fit at this (n, alpha)"
            )
        y_hat = math.sqrt(8.0 / (a - 1.0))
        c_gate = 10.0 ** (-6.0 / q_min)
        t_top = (c_gate * r0 / (2.0 * y_hat)) ** 2
        count = max(min_samples, 8)
    # two decades with `count` geometric samples
    ratio = 100.0 ** (1.0 / (count - 1)) * (1.0 + 1e-12)
    return tuple(t_top * ratio ** (-k) for k in range(count))


def tau_slope(params: GNParams) -> float:
    """The slope c of the optimal rebalancing tau(t) = c t for the flat extremal."""
    n, a, mf = params.n, params.alpha, params.m_frak
    exp_set = exponents(params)
    a0 = flat_energy_constant(n, a)
    d_a1 = flat_mass_constant(n, a, a + 1.0)
    d_2a = flat_mass_constant(n, a, 2.0 * a)
    if params.regime == MINUS:
        big_g = exp_set.scale
        return (
            (mf * big_g / (1.0 + big_g))
            * d_a1 ** (2.0 / (a + 1.0))
            / a0
            * d_2a
            / d_a1 ** (2.0 * a / (a + 1.0))
        ) ** (1.0 / (1.0 + 2.0 * big_g))
    big_t = exp_set.scale
    return (
        (mf * big_t / (1.0 - 2.0 * big_t))
        * d_2a ** (1.0 / a)
        / a0
        * d_a1
        / d_2a ** ((a + 1.0) / (2.0 * a))
    ) ** (1.0 / (1.0 - big_t))


# ---------------------------------------------------------------------------
# closed-form predictions


def _series_mass_prefactor(params: GNParams) -> float:
    """m_frak^{1-w} Sigma, the overall factor on every fitted coefficient."""
    exp_set = exponents(params)
    if params.regime == MINUS:
        w = exp_set.scale / (2.0 * exp_set.scale + 1.0)
    else:
        w = exp_set.scale / (1.0 - exp_set.scale)
    return params.m_frak ** (1.0 - w) * sigma(params)


def _isotropic_jet(params: GNParams, curv: CurvatureAtPole, a_choice: str) -> CutoffJet:
    if a_choice not in (ZERO_JET, BP_JET):
        raise ValueError(f"a_choice must be {ZERO_JET!r} or {BP_JET!r}")
    if a_choice == ZERO_JET:
        a_scalar = 0.0
    else:
        curv.require("Rc_isotropic")
        _, _, chi = zeta_chi(params.n, params.alpha)
        a_scalar = 2.0 * (params.alpha + 1.0) * curv.Rc_isotropic / (3.0 * chi)
    b1 = beta1_constraint(params, params.n * a_scalar, curv.Sc)
    partial = CutoffJet(a_scalar=a_scalar, beta1=b1)
    b2 = beta2_constraint(params, partial, curv)
    return CutoffJet(a_scalar=a_scalar, beta1=b1, beta2=b2)


def predict_L_coeffs(
    params: GNParams, curv: CurvatureAtPole, a_choice: str = BP_JET
) -> tuple[float, float]:
    """Closed-form (c1, c2) of the assembled L-series for this jet choice."""
    n = params.n
    z1, _, _ = zeta_chi(n, params.alpha)
    big_m = _series_mass_prefactor(params)
    jet = _isotropic_jet(params, curv, a_choice)
    a_s, b1 = jet.a_scalar, jet.beta1
    tr_a = n * a_s
    sc = curv.Sc
    e_aa = tr_a**2 + 2.0 * n * a_s**2
    e_arc = (n + 2.0) * a_s * sc
    c = c_coefficients(n, params.alpha)
    second = (
        c.c2 * n * a_s**2
        + c.c3 * E_v(curv)
        + c.c4 * e_aa
        + c.c5 * e_arc
        + c.c6 * b1 * tr_a
        + c.c7 * b1**2
        + c.c8 * b1 * sc
    )
    return big_m * z1 * sc, big_m * second


def predict_W_coeffs(params: GNParams, curv: CurvatureAtPole) -> tuple[float, float]:
    """Closed-form (c1, c2) of the curvature-weighted series; c1 is identically 0."""
    n, a = params.n, params.alpha
    _, z2, chi = zeta_chi(n, a)
    curv.require("Rc_norm2", "Rm_norm2")
    big_m = _series_mass_prefactor(params)
    ricci_part = 4.0 * ((n + 5.0) * a - n - 3.0) * (a - 1.0) / (9.0 * chi) * curv.Rc_norm2
    second = 32.0 * z2 * (ricci_part - curv.Rm_norm2 / 6.0) + j_coefficient(params) * curv.Sc**2
    return 0.0, big_m * second


# ---------------------------------------------------------------------------
# range guards


def _check_plus_order2(params: GNParams) -> None:
    n, a = params.n, params.alpha
    if params.regime == MINUS:
        return
    hi = (n + 6.0) / (n + 2.0)
    if a >= hi:
        raise ExponentConditionError(
            f"second-order plus-regime fit needs alpha < (n+6)/(n+2) = {hi:.6g}, got {a}"
        )


def _expansion_metric(metric: RadialMetric) -> None:
    if metric.kind == CONFORMAL:
        raise ValueError("expansions need normal coordinates; conformal metrics are excluded")


def _default_r0(metric: RadialMetric) -> float:
    return min(1.0, 0.4 * metric.r_max)


# ---------------------------------------------------------------------------
# assembled-series drivers


def _family_profile(
    params: GNParams, metric: RadialMetric, jet: CutoffJet, r0: float, t: float
) -> SmoothProfile:
    base = u_base_profile(params, t)
    cutoff = build_cutoff(CutoffSpec.from_jet(jet, r0), t, metric)
    return normalize_exact(cutoff_product(base, cutoff), metric, params)


def L_series(
    params: GNParams,
    metric: RadialMetric,
    a_choice: str = BP_JET,
    t_grid: tuple[float, ...] | None = None,
    r0: float | None = None,
) -> SeriesFit:
    """Fit the small-t series of the assembled L functional along the family."""
    _expansion_metric(metric)
    _check_plus_order2(params)
    r0 = _default_r0(metric) if r0 is None else r0
    if t_grid is None:
        t_grid = default_t_grid(params, r0)
    curv = curvature_at_pole(metric)
    jet = _isotropic_jet(params, curv, a_choice)
    slope = tau_slope(params)
    samples = []
    for t in t_grid:
        u = _family_profile(params, metric, jet, r0, t)
        samples.append((t, L_functional(params, u, slope * t, metric)))
    return fit_series(samples, known_constant=0.0)


def W_series(
    params: GNParams,
    metric: RadialMetric,
    t_grid: tuple[float, ...] | None = None,
    r0: float | None = None,
) -> SeriesFit:
    """Fit the small-t series of the curvature-weighted functional (jet forced to bp)."""
    _expansion_metric(metric)
    _check_plus_order2(params)
    r0 = _default_r0(metric) if r0 is None else r0
    if t_grid is None:
        t_grid = default_t_grid(params, r0)
    curv = curvature_at_pole(metric)
    jet = _isotropic_jet(params, curv, BP_JET)
    slope = tau_slope(params)
    samples = []
    for t in t_grid:
        u = _family_profile(params, metric, jet, r0, t)
        samples.append((t, W_functional(params, u, slope * t, metric)))
    return fit_series(samples, known_constant=0.0)


# ---------------------------------------------------------------------------
# building-block (mass / energy / curvature-mass) ratio verification


def _da_integrals(
    params: GNParams, metric: RadialMetric, cutoff: Cutoff, m: float, t: float
) -> tuple[float, float, float]:
    """(t^{-n/2} mass_m, t^{1-n/2} energy, t^{1-n/2} curvature mass) of H(r/sqrt(t)) xi.

    Evaluated in the self-similar variable y = r/sqrt(t), where the integrand
    stays O(1) however small t gets; integrating in r instead loses absolute
    accuracy like t^{n/2} and contaminates the fitted second coefficients.
    """
    n, a = params.n, params.alpha
    st = math.sqrt(t)
    r0 = cutoff.spec.r0
    y_hat = math.sqrt(8.0 / abs(a - 1.0))
    upper = min(y_hat, r0 / st) if a < 1.0 else r0 / st
    points = sorted({p for p in (y_hat / 2.0, y_hat, r0 / (2.0 * st)) if 0.0 < p < upper})

    def pieces(y: float):
        r = st * y
        xi2 = float(cutoff.squared(r))
        if xi2 <= 0.0:
            return 0.0, 0.0, 0.0
        xi = math.sqrt(xi2)
        dxi = float(cutoff.squared_derivative(r)) / (2.0 * xi)
        common = float(volume_density(metric, r)) * y ** (n - 1)
        return xi, dxi, common

    def f_mass(y: float) -> float:
        xi, _, common = pieces(y)
        return float(_profile_shape(a, y)) ** m * xi**m * common

    def f_energy(y: float) -> float:
        xi, dxi, common = pieces(y)
        h = float(_profile_shape(a, y))
        hp = float(_profile_shape_derivative(a, y))
        return (hp * xi + st * h * dxi) ** 2 * common

    def f_sc(y: float) -> float:
        xi, _, common = pieces(y)
        r = st * y
        return float(scalar_curvature(metric, r)) * float(_profile_shape(a, y)) ** 2 * xi**2 * common

    om = unit_sphere_area(n)
    mass = om * quad(f_mass, 0.0, upper, points=points, **_QUAD_OPTS)[0]
    energy = om * quad(f_energy, 0.0, upper, points=points, **_QUAD_OPTS)[0]
    sc = t * om * quad(f_sc, 0.0, upper, points=points, **_QUAD_OPTS)[0]
    return mass, energy, sc


def _beta_tilde(alpha: float) -> float:
    return abs(alpha - 1.0) / 8.0


def _mass_ratio_predictions(
    params: GNParams, jet: CutoffJet, curv: CurvatureAtPole, m: float
) -> tuple[float, float]:
    """Closed (D1/D0, D2/D0) for mass power m with this jet and curvature."""
    n, a = params.n, params.alpha
    b = _beta_tilde(a)
    q_d = m / (1.0 - a) + 1.0
    sb0 = script_beta(n / 2.0, q_d)
    r1 = script_beta(n / 2.0 + 1.0, q_d) / sb0
    r2 = script_beta(n / 2.0 + 2.0, q_d) / sb0
    tr_a = n * jet.a_scalar
    e_aa = tr_a**2 + 2.0 * n * jet.a_scalar**2
    e_arc = (n + 2.0) * jet.a_scalar * curv.Sc
    first = (m / 2.0) * jet.beta1 + (m / (2.0 * n)) * r1 / b * tr_a - r1 / (6.0 * n * b) * curv.Sc
    second = (
        r2
        / (n * (n + 2.0) * b * b)
        * (
            (m / 2.0) * jet.b_E
            + (m * (m - 2.0) / 8.0) * e_aa
            + E_v(curv)
            - (m / 12.0) * e_arc
        )
        + r1
        / (n * b)
        * (
            (m / 2.0) * jet.d_trace
            + (m * (m - 2.0) / 4.0) * jet.beta1 * tr_a
            - (m / 12.0) * jet.beta1 * curv.Sc
        )
        + (m / 2.0) * jet.beta2
        + (m * (m - 2.0) / 8.0) * jet.beta1**2
    )
    return first, second


def _energy_ratio_predictions(
    params: GNParams, jet: CutoffJet, curv: CurvatureAtPole
) -> tuple[float, float]:
    """Closed (A1/A0, A2/A0) for the Dirichlet-energy series."""
    n, a = params.n, params.alpha
    b = _beta_tilde(a)
    q_a = 2.0 * a / (1.0 - a) + 1.0
    q_s = 2.0 / (1.0 - a) + 1.0
    sb1 = script_beta(n / 2.0 + 1.0, q_a)
    ra1 = script_beta(n / 2.0 + 2.0, q_a) / sb1
    ra2p = script_beta(n / 2.0 + 1.0, q_a + 1.0) / sb1
    ra3 = script_beta(n / 2.0 + 3.0, q_a) / sb1
    ra4 = script_beta(n / 2.0 + 2.0, q_a + 1.0) / sb1
    rae = script_beta(n / 2.0 + 1.0, q_s) / sb1
    tr_a = n * jet.a_scalar
    tr_a2 = n * jet.a_scalar**2
    e_arc = (n + 2.0) * jet.a_scalar * curv.Sc
    first = ra1 / (n * b) * (tr_a - curv.Sc / 6.0) - (8.0 / n) * ra2p * tr_a + jet.beta1
    second = (
        ra3 / (n * (n + 2.0) * b * b) * (jet.b_E + E_v(curv) - e_arc / 6.0)
        + ra1 / (n * b) * (jet.d_trace - jet.beta1 * curv.Sc / 6.0)
        + jet.beta2
        + (16.0 / n) * rae * tr_a2
        - (8.0 / n) * ra2p * jet.d_trace
        + ra4 / (n * (n + 2.0) * b) * (-16.0 * jet.b_E + (4.0 / 3.0) * e_arc)
    )
    return first, second


def _sc_ratio_predictions(
    params: GNParams, jet: CutoffJet, curv: CurvatureAtPole
) -> tuple[float, float]:
    """Closed (S1/S0, S2/S0) for the curvature-weighted mass series (no constant term)."""
    n, a = params.n, params.alpha
    b = _beta_tilde(a)
    q_s = 2.0 / (1.0 - a) + 1.0
    rs1 = script_beta(n / 2.0 + 1.0, q_s) / script_beta(n / 2.0, q_s)
    curv.require("lap_Sc")
    tr_a = n * jet.a_scalar
    second = (
        rs1 / (n * b) * (0.5 * curv.lap_Sc - curv.Sc**2 / 6.0 + tr_a * curv.Sc)
        + jet.beta1 * curv.Sc
    )
    return curv.Sc, second


def _check_da_exponents(params: GNParams, m: float, order: int, include_energy: bool) -> None:
    n, a = params.n, params.alpha
    if a < 1.0:
        return
    if m / (a - 1.0) - n / 2.0 - order <= 0.0:
        raise ExponentConditionError(
            f"mass series at power {m} needs m/(alpha-1) - n/2 > {order}"
        )
    if include_energy and 2.0 * a / (a - 1.0) - n / 2.0 - 1.0 - order <= 0.0:
        raise ExponentConditionError(
            f"energy series needs 2 alpha/(alpha-1) - n/2 - 1 > {order}"
        )


def verify_DA_ratios(
    params: GNParams,
    metric: RadialMetric,
    spec: CutoffSpec,
    m: float,
    t_grid: tuple[float, ...] | None = None,
    order: int = 2,
    include_sc: bool = True,
    tol_first: float = _DEFAULT_TOL_C1,
    tol_second: float = _DEFAULT_TOL_C2,
) -> dict:
    """Fit the mass/energy/curvature-mass building-block series and compare
    each fitted coefficient ratio with its closed beta-ratio form.

    Returns a JSON-ready report; ``report["ok"]`` aggregates all comparisons.
    """
    _expansion_metric(metric)
    _check_da_exponents(params, m, order, include_energy=True)
    n, a = metric.n, params.alpha
    curv = curvature_at_pole(metric)
    jet = CutoffJet(
        a_scalar=spec.a_scalar,
        beta1=spec.beta1,
        beta2=spec.beta2,
        b_E=spec.b_E,
        d_trace=spec.d_trace,
    )
    if t_grid is None:
        powers = (m, 2.0) if include_sc else (m,)
        t_grid = default_t_grid(params, spec.r0, powers=powers)
    mass_samples, energy_samples, sc_samples = [], [], []
    for t in t_grid:
        cutoff = build_cutoff(spec, t, metric)
        v_mass, v_energy, v_sc = _da_integrals(params, metric, cutoff, m, t)
        mass_samples.append((t, v_mass))
        energy_samples.append((t, v_energy))
        if include_sc:
            sc_samples.append((t, v_sc))

    def compare(fitted: float, predicted: float, tol: float) -> dict:
        err = abs(fitted - predicted)
        rel = err / abs(predicted) if predicted != 0.0 else None
        ok = err <= tol * max(abs(predicted), 1e-3)
        return {"fitted": fitted, "predicted": predicted, "rel_err": rel, "ok": ok}

    report: dict = {
        "config": {
            "n": n,
            "alpha": a,
            "regime": params.regime,
            "metric": metric.kind,
            "K": metric.K,
            "m": m,
            "r0": spec.r0,
            "jet": {
                "a_scalar": spec.a_scalar,
                "beta1": spec.beta1,
                "beta2": spec.beta2,
                "b_E": spec.b_E,
                "d_trace": spec.d_trace,
            },
            "t_grid": list(t_grid),
            "order": order,
        },
        "tolerances": {"first": tol_first, "second": tol_second},
    }
    d1, d2 = _mass_ratio_predictions(params, jet, curv, m)
    fit_m = fit_series(mass_samples, known_constant=None, order=order)
    block = {
        "c0": compare(fit_m.c0, flat_mass_constant(n, a, m), 1e-6),
        "first": compare(fit_m.c1 / fit_m.c0, d1, tol_first),
        "residual": fit_m.residual,
    }
    if order >= 2:
        block["second"] = compare(fit_m.c2 / fit_m.c0, d2, tol_second)
    report["mass"] = block

    a1, a2 = _energy_ratio_predictions(params, jet, curv)
    fit_e = fit_series(energy_samples, known_constant=None, order=order)
    block = {
        "c0": compare(fit_e.c0, flat_energy_constant(n, a), 1e-6),
        "first": compare(fit_e.c1 / fit_e.c0, a1, tol_first),
        "residual": fit_e.residual,
    }
    if order >= 2:
        block["second"] = compare(fit_e.c2 / fit_e.c0, a2, tol_second)
    report["energy"] = block

    if include_sc:
        s0 = flat_mass_constant(n, a, 2.0)
        s1, s2 = _sc_ratio_predictions(params, jet, curv)
        fit_s = fit_series(sc_samples, known_constant=0.0, order=order)
        block = {
            "first": compare(fit_s.c1 / s0, s1, tol_first),
            "residual": fit_s.residual,
        }
        if order >= 2:
            block["second"] = compare(fit_s.c2 / s0, s2, tol_second)
        report["sc_mass"] = block

    report["ok"] = all(
        entry["ok"]
        for key in ("mass", "energy", "sc_mass")
        if key in report
        for entry in report[key].values()
        if isinstance(entry, dict)
    )
    return report


# ---------------------------------------------------------------------------
# reports


def series_report(
    kind: str,
    params: GNParams,
    metric: RadialMetric,
    fit: SeriesFit,
    predicted: tuple[float, float],
    tol_first: float = _DEFAULT_TOL_C1,
    tol_second: float = _DEFAULT_TOL_C2,
) -> dict:
    """JSON-ready verdict for an assembled-series fit against predictions."""
    p1, p2 = predicted
    scale1 = max(abs(p1), abs(p2), 1e-12)
    ok1 = abs(fit.c1 - p1) <= tol_first * scale1
    ok2 = abs(fit.c2 - p2) <= tol_second * max(abs(p2), scale1)
    return {
        "config": {
            "functional": kind,
            "n": params.n,
            "alpha": params.alpha,
            "regime": params.regime,
            "m_frak": params.m_frak,
            "metric": metric.kind,
            "K": metric.K,
        },
        "predicted": {"c1": p1, "c2": p2},
        "fitted": {"c0": fit.c0, "c1": fit.c1, "c2": fit.c2, "residual": fit.residual},
        "tolerances": {"first": tol_first, "second": tol_second},
        "verdict": bool(ok1 and ok2),
    }


def samples_to_csv(fit: SeriesFit, path: str) -> None:
    """Raw (t, value) samples of a fit, for external plotting."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "value"])
        for t, v in fit.t_samples:
            writer.writerow([repr(t), repr(v)])
