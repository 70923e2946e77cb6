"""Radial model manifolds: space forms, Euclidean space, conformally flat metrics.

A :class:`RadialMetric` carries everything the quotient and expansion code
needs about a rotationally symmetric background: the volume density against
``r^{n-1} dr``, the matching Dirichlet weight, and the curvature data at the
chart center.  Conformally flat metrics are kept in the flat coordinate (no
normal-coordinate reparametrization), so they feed the quotient machinery but
not the normal-coordinate expansions.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.interpolate import CubicSpline

ArrayLike = float | np.ndarray

EUCLIDEAN = "euclidean"
SPACE_FORM = "spaceform"
CONFORMAL = "conformal"


class UnavailableFieldError(ValueError):
    """A curvature field was requested that the metric cannot supply."""


@dataclass(frozen=True)
class CurvatureAtPole:
    """Curvature data at the chart center.

    ``None`` marks a field the construction could not supply (conformally
    flat metrics expose only the scalar curvature).  ``Rc_isotropic`` is the
    scalar rho with Rc = rho * g at the center, when the Ricci tensor is
    isotropic there.
    """

    n: int
    Sc: float = 0.0
    Rc_isotropic: float | None = None
    Rc_norm2: float | None = None
    Rm_norm2: float | None = None
    lap_Sc: float | None = None
    lambda1_Rc: float | None = None

    def __post_init__(self) -> None:
        tol = 1e-9 * max(1.0, self.Sc**2)
        if self.Rc_norm2 is not None:
            if self.Rc_norm2 < -tol:
                raise ValueError("Rc_norm2 must be nonnegative")
            if self.Rc_norm2 < self.Sc**2 / self.n - tol:
                raise ValueError("Rc_norm2 violates |Rc|^2 >= Sc^2/n")
            if self.Rm_norm2 is not None:
                n = self.n
                weyl_floor = (4.0 / (n - 2.0)) * self.Rc_norm2 - (
                    2.0 / ((n - 1.0) * (n - 2.0))
                ) * self.Sc**2
                if self.Rm_norm2 < weyl_floor - tol * max(1.0, abs(weyl_floor)):
                    raise ValueError("Rm_norm2 below the Weyl-part floor of the decomposition")

    def require(self, *names: str) -> None:
        for name in names:
            if getattr(self, name) is None:
                raise UnavailableFieldError(f"curvature field {name!r} unavailable for this metric")


@dataclass(frozen=True)
class RadialMetric:
    """A rotationally symmetric metric on a chart [0, r_max).

    kind "euclidean": the flat metric.  kind "spaceform": constant sectional
    curvature K; for K > 0 the chart must stay strictly inside the
    injectivity radius pi/sqrt(K).  kind "conformal": u(r)^{4/(n-2)} times
    the flat metric, with u positive on the chart; evaluated in the flat
    coordinate.
    """

    n: int
    kind: str
    r_max: float
    K: float = 0.0
    conformal_factor: Callable[[np.ndarray], np.ndarray] | None = None

    def __post_init__(self) -> None:
        if self.n < 3:
            raise ValueError(f"n must be >= 3, got {self.n}")
        if self.kind not in (EUCLIDEAN, SPACE_FORM, CONFORMAL):
            raise ValueError(f"unknown metric kind {self.kind!r}")
        if not self.r_max > 0.0:
            raise ValueError("r_max must be positive")
        if self.kind == SPACE_FORM and self.K > 0.0 and self.r_max >= math.pi / math.sqrt(self.K):
            raise ValueError("chart radius must stay inside the injectivity radius pi/sqrt(K)")
        if self.kind == CONFORMAL and self.conformal_factor is None:
            raise ValueError("conformal metric needs a conformal_factor")


def euclidean(n: int, r_max: float = math.inf) -> RadialMetric:
    return RadialMetric(n=n, kind=EUCLIDEAN, r_max=r_max)


def space_form(n: int, K: float, r_max: float | None = None) -> RadialMetric:
    """Space form of sectional curvature K; default chart 0.9 pi/sqrt(K) for K > 0."""
    if r_max is None:
        r_max = 0.9 * math.pi / math.sqrt(K) if K > 0.0 else math.inf
    return RadialMetric(n=n, kind=SPACE_FORM, r_max=r_max, K=K)


def conformal_radial(
    n: int, factor: Callable[[np.ndarray], np.ndarray], r_max: float
) -> RadialMetric:
    return RadialMetric(n=n, kind=CONFORMAL, r_max=r_max, conformal_factor=factor)


def schwarzschild_factor(n: int, m: float) -> Callable[[np.ndarray], np.ndarray]:
    """The factor u(r) = 1 + m/(2 r^{n-2}), scalar-flat on the whole punctured chart."""
    if m <= 0.0:
        raise ValueError("mass must be positive")

    def u(r: ArrayLike) -> ArrayLike:
        return 1.0 + m / (2.0 * np.asarray(r, dtype=float) ** (n - 2))

    return u


def conformal_factor_from_table(
    r: np.ndarray, u: np.ndarray
) -> Callable[[np.ndarray], np.ndarray]:
    """Cubic interpolant through sampled (r, u(r)) pairs, for table-supplied factors."""
    r = np.asarray(r, dtype=float)
    u = np.asarray(u, dtype=float)
    if r.ndim != 1 or r.shape != u.shape or r.size < 4:
        raise ValueError("need matching 1-d arrays with at least 4 samples")
    if np.any(np.diff(r) <= 0.0):
        raise ValueError("radii must be strictly increasing")
    if np.any(u <= 0.0):
        raise ValueError("conformal factor samples must be positive")
    return CubicSpline(r, u)


def _check_chart(metric: RadialMetric, r: np.ndarray) -> None:
    if np.any(r < 0.0):
        raise ValueError("radius must be nonnegative")
    if np.any(r > metric.r_max * (1.0 + 1e-12)):
        raise ValueError(f"radius outside the chart [0, {metric.r_max}]")


def _sn_over_r(K: float, r: np.ndarray) -> np.ndarray:
    """sn_K(r)/r, series-safe near r = 0."""
    if K == 0.0:
        return np.ones_like(r)
    s = math.sqrt(abs(K))
    x = s * r
    if K > 0.0:
        return np.sinc(x / math.pi)
    small = x < 1e-4
    x_safe = np.where(small, 1.0, x)
    return np.where(small, 1.0 + x**2 / 6.0 + x**4 / 120.0, np.sinh(x_safe) / x_safe)


def volume_density(metric: RadialMetric, r: ArrayLike) -> ArrayLike:
    """det(g)^{1/2} against the flat radial measure r^{n-1} dr d(angle)."""
    r_arr = np.asarray(r, dtype=float)
    _check_chart(metric, r_arr)
    if metric.kind == EUCLIDEAN:
        out = np.ones_like(r_arr)
    elif metric.kind == SPACE_FORM:
        out = _sn_over_r(metric.K, r_arr) ** (metric.n - 1)
    else:
        u = np.asarray(metric.conformal_factor(r_arr), dtype=float)
        out = u ** (2.0 * metric.n / (metric.n - 2.0))
    return out if np.ndim(r) else float(out)


def dirichlet_weight(metric: RadialMetric, r: ArrayLike) -> ArrayLike:
    """Weight w(r) with  int |grad f|^2 dmu = omega_{n-1} int f'(r)^2 w(r) r^{n-1} dr.

    Geodesic-polar metrics (Euclidean, space forms) give w = volume density;
    conformal metrics give w = u^2 (the inverse-metric factor u^{-4/(n-2)}
    folded against the density).
    """
    if metric.kind != CONFORMAL:
        return volume_density(metric, r)
    r_arr = np.asarray(r, dtype=float)
    _check_chart(metric, r_arr)
    out = np.asarray(metric.conformal_factor(r_arr), dtype=float) ** 2
    return out if np.ndim(r) else float(out)


def conformal_laplacian_coefficient(n: int) -> float:
    """c(n) = 4(n-1)/(n-2), the constant in the conformal scalar-curvature law."""
    return 4.0 * (n - 1.0) / (n - 2.0)


def _flat_radial_laplacian(
    u: Callable[[np.ndarray], np.ndarray], n: int, r: np.ndarray, h: np.ndarray
) -> np.ndarray:
    """Fourth-order finite-difference flat Laplacian u'' + (n-1)/r u'."""
    um2, um1, u0, up1, up2 = (u(r + k * h) for k in (-2.0, -1.0, 0.0, 1.0, 2.0))
    d1 = (-up2 + 8.0 * up1 - 8.0 * um1 + um2) / (12.0 * h)
    d2 = (-up2 + 16.0 * up1 - 30.0 * u0 + 16.0 * um1 - um2) / (12.0 * h**2)
    return d2 + (n - 1.0) / r * d1


def scalar_curvature(metric: RadialMetric, r: ArrayLike) -> ArrayLike:
    """Scalar curvature at radius r.

    Euclidean -> 0; space form -> n(n-1)K; conformal -> the radial conformal
    change law -c(n) u^{-(n+2)/(n-2)} (u'' + (n-1)/r u'), differentiated with
    fourth-order stencils plus one Richardson halving (sixth-order net).
    """
    r_arr = np.asarray(r, dtype=float)
    _check_chart(metric, r_arr)
    if metric.kind == EUCLIDEAN:
        out = np.zeros_like(r_arr)
    elif metric.kind == SPACE_FORM:
        out = np.full_like(r_arr, metric.n * (metric.n - 1.0) * metric.K)
    else:
        if np.any(r_arr <= 0.0):
            raise ValueError("conformal scalar curvature needs r > 0")
        n = metric.n
        u_fun = metric.conformal_factor
        h = 2.5e-3 * r_arr
        lap_h = _flat_radial_laplacian(u_fun, n, r_arr, h)
        lap_h2 = _flat_radial_laplacian(u_fun, n, r_arr, h / 2.0)
        lap = (16.0 * lap_h2 - lap_h) / 15.0
        u0 = np.asarray(u_fun(r_arr), dtype=float)
        out = -conformal_laplacian_coefficient(n) * u0 ** (-(n + 2.0) / (n - 2.0)) * lap
    return out if np.ndim(r) else float(out)


def curvature_at_pole(metric: RadialMetric) -> CurvatureAtPole:
    """Closed-form curvature data at the chart center.

    Space forms fill every field; Euclidean space is all zeros; conformal
    metrics supply the scalar curvature only (sampled just inside the chart),
    with the remaining fields flagged unavailable.
    """
    n = metric.n
    if metric.kind == EUCLIDEAN:
        return CurvatureAtPole(
            n=n, Sc=0.0, Rc_isotropic=0.0, Rc_norm2=0.0, Rm_norm2=0.0, lap_Sc=0.0, lambda1_Rc=0.0
        )
    if metric.kind == SPACE_FORM:
        K = metric.K
        return CurvatureAtPole(
            n=n,
            Sc=n * (n - 1.0) * K,
            Rc_isotropic=(n - 1.0) * K,
            Rc_norm2=n * (n - 1.0) ** 2 * K**2,
            Rm_norm2=2.0 * n * (n - 1.0) * K**2,
            lap_Sc=0.0,
            lambda1_Rc=(n - 1.0) * K,
        )
    r_ref = min(1.0, metric.r_max) / 100.0
    sc = float(scalar_curvature(metric, r_ref))
    return CurvatureAtPole(n=n, Sc=sc)


def decomposition_residual(
    n: int, Sc: float, Rc_norm2: float, Rm_norm2: float, Weyl_norm2: float
) -> float:
    """Residual of the orthogonal curvature decomposition.

    |Rm|^2 - |W|^2 - (4/(n-2))|Rc|^2 + (2/((n-1)(n-2)))Sc^2; zero exactly
    when the four norms come from one algebraic curvature tensor.
    """
    if min(Rc_norm2, Rm_norm2, Weyl_norm2) < 0.0:
        raise ValueError("norms must be nonnegative")
    return (
        Rm_norm2
        - Weyl_norm2
        - (4.0 / (n - 2.0)) * Rc_norm2
        + (2.0 / ((n - 1.0) * (n - 2.0))) * Sc**2
    )


def E_v(curv: CurvatureAtPole) -> float:
    """The contracted fourth-order density term (1/360)(5 Sc^2 + 8|Rc|^2 - 3|Rm|^2 - 18 lap Sc)."""
    curv.require("Rc_norm2", "Rm_norm2", "lap_Sc")
    return (
        5.0 * curv.Sc**2 + 8.0 * curv.Rc_norm2 - 3.0 * curv.Rm_norm2 - 18.0 * curv.lap_Sc
    ) / 360.0
