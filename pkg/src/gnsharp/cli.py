"""Command-line front end and acceptance drivers.

Subcommands
-----------
constants        derived exponents, sharp constants, expansion coefficients
ranges           admissible alpha intervals and the kappa rigidity windows
moments verify   closed-form radial moments against adaptive quadrature
expansion fit    small-t series of the assembled functionals vs. predictions
minimize         projected descent on the discrete quotient over a ball
symmetrize       rearrangement round trips (property mode or CSV input)
conformal check  scalar flatness and conformal invariance of the quotient
suite            the full acceptance battery (--quick for a fast subset)

Every command emits a human table by default, or a JSON document with
``--json`` / CSV rows with ``--csv``.  JSON payloads carry ``"schema": 1``,
use sorted keys, and order their result rows by cell key, so identical
invocations are byte-identical.  Exit status: 0 all checks passed, 1 a
verification failed, 2 the invocation itself was invalid (an error object
is printed to stderr).
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
import time

import numpy as np

from .constants import (
    GNParams,
    MINUS,
    PLUS,
    c_coefficients,
    exponents,
    flat_energy_constant,
    flat_mass_constant,
    j_coefficient,
    moment_ratio_assembly,
    sharp_constant,
    sigma,
    zeta_chi,
)
from .expansion import (
    L_series,
    W_series,
    predict_L_coeffs,
    predict_W_coeffs,
    series_report,
    verify_DA_ratios,
)
from .functionals import (
    COMPACT,
    CutoffSpec,
    RadialProfile,
    conformal_invariance_check,
    extremal_grid_profile,
    gn_quotient,
    profile_from_csv,
    profile_to_csv,
)
from .geometry import (
    CONFORMAL,
    EUCLIDEAN,
    RadialMetric,
    conformal_factor_from_table,
    conformal_radial,
    curvature_at_pole,
    euclidean,
    scalar_curvature,
    schwarzschild_factor,
    space_form,
)
from .ranges import CASES, F_eval, admissible_range, kappa
from .specfun import MomentSpec, moment_closed, moment_quad
from .symmetrize import (
    MeasuredFunction,
    dirichlet_check,
    distribution_function,
    norms_check,
    rearrange,
)
from .varmin import MinimizeConfig, minimize_quotient

SCHEMA = 1

_SCHWARZSCHILD_CHART = 60.0


class CliError(ValueError):
    """Invocation-level problem: bad flag value, unusable input file."""


# ---------------------------------------------------------------------------
# metric syntax


def parse_metric(text: str, n: int) -> RadialMetric:
    """Build a metric from its command-line syntax.

    Accepted forms: ``euclidean``, ``spaceform:K=<value>``,
    ``conformal:schwarzschild:m=<value>``, and ``conformal:<csv-path>``
    where the file has columns ``r,factor``.
    """
    if text == EUCLIDEAN:
        return euclidean(n)
    if text.startswith("spaceform:"):
        body = text[len("spaceform:"):]
        if not body.startswith("K="):
            raise CliError(f"spaceform metric needs K=<value>, got {text!r}")
        return space_form(n, _parse_float(body[2:], "K"))
    if text.startswith("conformal:"):
        body = text[len("conformal:"):]
        if body.startswith("schwarzschild:"):
            tail = body[len("schwarzschild:"):]
            if not tail.startswith("m="):
                raise CliError(f"schwarzschild factor needs m=<value>, got {text!r}")
            m = _parse_float(tail[2:], "m")
            return conformal_radial(n, schwarzschild_factor(n, m), _SCHWARZSCHILD_CHART)
        radii, factors = _read_factor_table(body)
        return conformal_radial(n, conformal_factor_from_table(radii, factors), radii[-1])
    raise CliError(
        f"unknown metric {text!r}; expected euclidean, spaceform:K=<v>, "
        "conformal:schwarzschild:m=<v>, or conformal:<csv-path>"
    )


def _parse_float(text: str, label: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise CliError(f"could not parse {label}={text!r} as a number") from None


def _read_factor_table(path: str) -> tuple[np.ndarray, np.ndarray]:
    try:
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise CliError(f"cannot read conformal factor table: {exc}") from None
    if not rows or [c.strip() for c in rows[0]] != ["r", "factor"]:
        raise CliError("conformal factor table must have header r,factor")
    try:
        data = np.array([[float(a), float(b)] for a, b in rows[1:]])
    except ValueError as exc:
        raise CliError(f"bad row in conformal factor table: {exc}") from None
    if data.shape[0] < 4:
        raise CliError("conformal factor table needs at least 4 samples")
    return data[:, 0], data[:, 1]


def _infer_regime(alpha: float, regime: str | None) -> str:
    if regime is not None:
        return regime
    if alpha == 1.0:
        raise CliError("alpha = 1 sits between the regimes; pass --regime")
    return MINUS if alpha < 1.0 else PLUS


def _build_params(n: int, alpha: float, regime: str | None, m_frak: float) -> GNParams:
    return GNParams(n=n, alpha=alpha, regime=_infer_regime(alpha, regime), m_frak=m_frak)


# ---------------------------------------------------------------------------
# output plumbing


def _fmt_cell(v) -> str:
    if v is None:
        return "-"
    if isinstance(v, bool):
        return "yes" if v else "no"
    if isinstance(v, float):
        return f"{v:.12g}"
    return str(v)


def _csv_cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _render_table(rows: list[dict], fields: list[str]) -> str:
    cells = [[_fmt_cell(row.get(f)) for f in fields] for row in rows]
    widths = [max(len(f), *(len(c[i]) for c in cells)) if cells else len(f) for i, f in enumerate(fields)]
    lines = ["  ".join(f.ljust(w) for f, w in zip(fields, widths)).rstrip()]
    for c in cells:
        lines.append("  ".join(v.ljust(w) for v, w in zip(c, widths)).rstrip())
    return "\n".join(lines) + "\n"


def _emit(args, payload: dict, rows: list[dict], fields: list[str]) -> None:
    if args.json:
        text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    elif args.csv:
        buf = []
        buf.append(",".join(fields))
        for row in rows:
            buf.append(",".join(_csv_cell(row.get(f)) for f in fields))
        text = "\n".join(buf) + "\n"
    else:
        text = _render_table(rows, fields)
        if "pass" in payload:
            text += f"pass: {'yes' if payload['pass'] else 'no'}\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _emit_error(message: str) -> None:
    sys.stderr.write(json.dumps({"schema": SCHEMA, "error": {"message": message}}) + "\n")


# ---------------------------------------------------------------------------
# acceptance checkers.  Each returns a verdict record and is exercised both
# by the `suite` subcommand and by the acceptance test module.


def _moment_grid(n: int, alpha: float) -> list[MomentSpec]:
    """The q-grid a cell contributes: radial powers 0/2/4 crossed with the
    profile powers that actually occur in the expansion machinery."""
    specs = []
    seen = set()
    for q1 in (0.0, 2.0, 4.0):
        for k in (1.0, alpha, alpha + 1.0, 2.0 * alpha, 2.0, 2.0 * alpha + 2.0):
            q2 = k / (1.0 - alpha)
            key = (q1, round(q2, 14))
            if key in seen:
                continue
            seen.add(key)
            spec = MomentSpec(q1=q1, q2=q2)
            try:
                moment_closed(n, alpha, spec)
            except ValueError:
                continue
            specs.append(spec)
    return specs


def check_moment_table(quick: bool = False) -> dict:
    """Closed-form moments against adaptive quadrature over both regimes."""
    start = time.perf_counter()
    minus_cells = [(n, a) for n in (3, 4, 5) for a in (0.3, 0.5, 0.7, 0.9)]
    plus_cells = [(3, 1.1), (3, 1.2), (3, 1.5), (3, 2.0), (4, 1.1), (4, 1.2),
                  (4, 1.3), (5, 1.1), (5, 1.15), (5, 1.2)]
    if quick:
        minus_cells, plus_cells = [(3, 0.5)], [(3, 1.2)]
    count = 0
    worst = 0.0
    for n, a in minus_cells + plus_cells:
        for spec in _moment_grid(n, a):
            closed = moment_closed(n, a, spec)
            quad = moment_quad(n, a, spec)
            worst = max(worst, abs(quad - closed) / abs(closed))
            count += 1
    need = 10 if quick else 200
    passed = worst <= 1e-8 and count >= need
    return {
        "criterion": 1,
        "name": "moment-table",
        "passed": passed,
        "seconds": time.perf_counter() - start,
        "detail": f"{count} cells (need >= {need}), worst rel {worst:.3e}",
    }


def check_coefficient_assembly(quick: bool = False) -> dict:
    """Un-simplified moment-ratio assembly against the closed coefficients."""
    start = time.perf_counter()
    ns = (3, 5) if quick else range(3, 9)
    alphas = (0.25, 0.4, 0.55, 0.7, 0.85, 1.04, 1.08, 1.12, 1.16, 1.2)
    count = 0
    worst = 0.0
    regimes = set()
    for n in ns:
        for a in alphas:
            try:
                want = c_coefficients(n, a)
                got = moment_ratio_assembly(n, a)
            except ValueError:
                continue
            for key, ref in zip(("c1", "c2", "c3", "c4", "c5", "c6", "c7", "c8"), want.as_tuple()):
                worst = max(worst, abs(got[key] - ref) / max(abs(ref), 1e-30))
            count += 1
            regimes.add(MINUS if a < 1.0 else PLUS)
    need = 10 if quick else 50
    passed = worst <= 1e-10 and count >= need and regimes == {MINUS, PLUS}
    return {
        "criterion": 2,
        "name": "coefficient-assembly",
        "passed": passed,
        "seconds": time.perf_counter() - start,
        "detail": f"{count} cells (need >= {need}), regimes {sorted(regimes)}, worst rel {worst:.3e}",
    }


def check_sharp_attainment(quick: bool = False) -> dict:
    """The sampled extremal family attains the sharp constant."""
    start = time.perf_counter()
    ns = (3,) if quick else (3, 4, 5)
    worst = 0.0
    count = 0
    for n in ns:
        for a in (0.3, 0.6, 0.9, 1.1, n / (n - 2.0)):
            regime = MINUS if a < 1.0 else PLUS
            params = GNParams(n=n, alpha=a, regime=regime)
            prof = extremal_grid_profile(params)
            q = gn_quotient(prof, euclidean(n), params)
            ref = sharp_constant(n, a, regime)
            worst = max(worst, abs(q - ref) / ref)
            count += 1
    passed = worst <= 1e-6
    return {
        "criterion": 3,
        "name": "sharp-attainment",
        "passed": passed,
        "seconds": time.perf_counter() - start,
        "detail": f"{count} cells, worst rel {worst:.3e}",
    }


def check_quotient_minimization(quick: bool = False) -> dict:
    """Descent from a generic bump recovers the sharp constant on a ball."""
    start = time.perf_counter()
    cells = [
        (3, 0.5, MINUS, 4.0, 512),
        (4, 0.5, MINUS, 4.0, 512),
        (5, 0.8, MINUS, 4.0, 512),
        (4, 0.7, MINUS, 4.0, 512),
        (3, 1.2, PLUS, 14.0, 512),
        (4, 1.5, PLUS, 14.0, 512),
        (3, 2.0, PLUS, 20.0, 768),
        (5, 1.2, PLUS, 10.0, 512),
        (4, 2.0, PLUS, 50.0, 1024),
    ]
    if quick:
        cells = [cells[0], cells[4]]
    worst = 0.0
    for n, a, regime, radius, nodes in cells:
        params = GNParams(n=n, alpha=a, regime=regime)
        config = MinimizeConfig(ball_radius=radius, grid_nodes=nodes)
        res = minimize_quotient(euclidean(n), params, config)
        ref = sharp_constant(n, a, regime)
        worst = max(worst, abs(res.value - ref) / ref)
    passed = worst <= 1e-3
    return {
        "criterion": 4,
        "name": "quotient-minimization",
        "passed": passed,
        "seconds": time.perf_counter() - start,
        "detail": f"{len(cells)} cells, worst rel gap {worst:.3e}",
    }


_GENERIC_JET = CutoffSpec(a_scalar=0.05, beta1=0.02, beta2=0.01, b_E=0.3, d_trace=0.04, r0=0.8)


def check_block_ratios(quick: bool = False) -> dict:
    """Building-block series ratios on curved space forms, both regimes."""
    start = time.perf_counter()
    cells = [
        (3, 0.5, MINUS, 1.0),
        (4, 0.7, MINUS, 1.0),
        (3, 0.7, MINUS, -1.0),
        (5, 0.8, MINUS, -1.0),
        (3, 1.2, PLUS, 1.0),
        (4, 1.15, PLUS, 1.0),
        (3, 1.3, PLUS, -1.0),
        (5, 1.1, PLUS, -1.0),
    ]
    if quick:
        cells = [cells[0], cells[4]]
    failures = []
    for n, a, regime, K in cells:
        params = GNParams(n=n, alpha=a, regime=regime)
        report = verify_DA_ratios(
            params,
            space_form(n, K),
            _GENERIC_JET,
            m=params.mass_exponent,
            tol_first=1e-3,
            tol_second=5e-3,
        )
        if not report["ok"]:
            failures.append((n, a, regime, K))
    per_regime = min(sum(1 for c in cells if c[2] == r) for r in (MINUS, PLUS))
    passed = not failures and per_regime >= (1 if quick else 4)
    return {
        "criterion": 5,
        "name": "block-ratios",
        "passed": passed,
        "seconds": time.perf_counter() - start,
        "detail": f"{len(cells)} cells ({per_regime}/regime), failures {failures or 'none'}",
    }


def check_curvature_series(quick: bool = False) -> dict:
    """Assembled L/W series match the predicted curvature coefficients."""
    start = time.perf_counter()
    cells = [(3, 0.6, MINUS), (5, 0.8, MINUS), (3, 1.2, PLUS)]
    if quick:
        cells = cells[:1]
    bad = []
    for n, a, regime in cells:
        params = GNParams(n=n, alpha=a, regime=regime)
        metric = space_form(n, 1.0)
        curv = curvature_at_pole(metric)
        lrep = series_report(
            "L", params, metric, L_series(params, metric),
            predict_L_coeffs(params, curv), tol_first=1e-3, tol_second=5e-3,
        )
        wrep = series_report(
            "W", params, metric, W_series(params, metric),
            predict_W_coeffs(params, curv), tol_first=1e-3, tol_second=5e-3,
        )
        if not (lrep["verdict"] and wrep["verdict"]):
            bad.append((n, a, regime, "curved"))
    # Euclidean control: fitted curvature coefficients must vanish on the
    # scale the same cell would have at unit curvature.
    flat_cells = [(3, 0.5, MINUS)] if quick else [(3, 0.5, MINUS), (3, 1.2, PLUS)]
    for n, a, regime in flat_cells:
        params = GNParams(n=n, alpha=a, regime=regime)
        ref = curvature_at_pole(space_form(n, 1.0))
        flat = euclidean(n)
        for fit, predicted in (
            (L_series(params, flat), predict_L_coeffs(params, ref)),
            (W_series(params, flat), predict_W_coeffs(params, ref)),
        ):
            scale = max(abs(predicted[0]), abs(predicted[1]))
            if abs(fit.c1) > 1e-3 * scale or abs(fit.c2) > 5e-3 * scale:
                bad.append((n, a, regime, "flat"))
    passed = not bad
    return {
        "criterion": 6,
        "name": "curvature-series",
        "passed": passed,
        "seconds": time.perf_counter() - start,
        "detail": f"{len(cells)} curved + {len(flat_cells)} flat cells, failures {bad or 'none'}",
    }


def check_alpha_ranges(quick: bool = False) -> dict:
    """Interval endpoints vs. direct surd substitution, plus containment."""
    start = time.perf_counter()
    ns = (3, 7, 16) if quick else range(3, 17)
    worst = 0.0
    nested = True
    for n in ns:
        sob = n / (n - 2.0)
        rng = {case: admissible_range(n, case) for case in CASES}
        expected = {
            "A1": (0.0, 1.0),
            "A2": (0.0, 1.0),
            "B1": (1.0, min((n + 4.0) / n, sob)),
            "B2": (1.0, min((n + 6.0) / (n + 2.0), sob)),
        }
        disc = 28.0 * n * n - 16.0 * n - 287.0
        if n == 3:
            expected["A3"] = (0.0, 1.0)
        else:
            expected["A3"] = (
                (2.0 * n * n + n - 25.0 - math.sqrt(disc)) / (2.0 * n * n + 3.0 * n - 38.0),
                1.0,
            )
        if (n + 6.0) / (n + 2.0) <= sob:
            expected["B3"] = (1.0, (n + 6.0) / (n + 2.0))
        else:
            expected["B3"] = (
                1.0,
                (2.0 * n * n + n - 25.0 + math.sqrt(disc)) / (2.0 * n * n + 3.0 * n - 38.0),
            )
        for case, (lo, hi) in expected.items():
            worst = max(worst, abs(rng[case].lo - lo), abs(rng[case].hi - hi))
        for outer, inner in (("A1", "A2"), ("A2", "A3"), ("B1", "B2"), ("B2", "B3")):
            if rng[inner].lo < rng[outer].lo or rng[inner].hi > rng[outer].hi:
                nested = False
    b3_hi_7 = admissible_range(7, "B3").hi
    passed = worst <= 1e-12 and nested and b3_hi_7 < 1.4
    return {
        "criterion": 7,
        "name": "alpha-ranges",
        "passed": passed,
        "seconds": time.perf_counter() - start,
        "detail": f"worst endpoint err {worst:.3e}, nested {nested}, B3(n=7) hi {b3_hi_7:.6f}",
    }


def check_kappa_window(quick: bool = False) -> dict:
    """kappa > 0 with a tight binding residual, F < 0 strictly inside."""
    start = time.perf_counter()
    ns = (3, 10, 16) if quick else range(3, 17)
    samples = 100 if quick else 1000
    worst_residual = 0.0
    min_kappa = math.inf
    violations = 0
    for n in ns:
        for regime in (MINUS, PLUS):
            res = kappa(n, regime)
            min_kappa = min(min_kappa, res.kappa)
            worst_residual = max(worst_residual, res.residual)
            s = res.kappa * (np.arange(samples) + 0.5) / samples
            at = 1.0 - s if regime == MINUS else 1.0 + s
            values = np.array([F_eval(n, float(a), regime) for a in at])
            violations += int(np.sum(values >= 0.0))
    passed = min_kappa > 0.0 and worst_residual < 1e-10 and violations == 0
    return {
        "criterion": 8,
        "name": "kappa-window",
        "passed": passed,
        "seconds": time.perf_counter() - start,
        "detail": (
            f"min kappa {min_kappa:.6f}, worst residual {worst_residual:.3e}, "
            f"{violations} sign violations"
        ),
    }


def check_conformal_flatness(quick: bool = False) -> dict:
    """Harmonic-factor metric is scalar flat; quotient is conformally invariant."""
    start = time.perf_counter()
    n, m = 3, 1.0
    metric = conformal_radial(n, schwarzschild_factor(n, m), _SCHWARZSCHILD_CHART)
    horizon = (m / 2.0) ** (1.0 / (n - 2.0))
    radii = np.geomspace(1.5 * horizon, 0.75 * _SCHWARZSCHILD_CHART, 10 if quick else 50)
    sc = np.array([scalar_curvature(metric, float(r)) for r in radii])
    max_sc = float(np.max(np.abs(sc)))
    rng = np.random.default_rng(0)
    factor = schwarzschild_factor(n, m)
    worst_rel = 0.0
    bumps = 5 if quick else 20
    grid = np.linspace(0.6, 30.0, 1200)
    ramp = np.clip((grid - 1.0) / 1.5, 0.0, 1.0) ** 2 * np.clip((28.0 - grid) / 1.5, 0.0, 1.0) ** 2
    for _ in range(bumps):
        centers = rng.uniform(2.0, 18.0, size=3)
        widths = rng.uniform(0.5, 3.0, size=3)
        amps = rng.uniform(0.3, 1.0, size=3)
        vals = np.zeros_like(grid)
        for c, w, a in zip(centers, widths, amps):
            vals += a * np.exp(-(((grid - c) / w) ** 2))
        vals *= ramp
        vals[0] = vals[-1] = 0.0
        prof = RadialProfile(grid, vals, COMPACT)
        lhs, rhs, diff = conformal_invariance_check(prof, factor, n, _SCHWARZSCHILD_CHART)
        worst_rel = max(worst_rel, abs(diff) / max(abs(lhs), abs(rhs)))
    passed = max_sc < 1e-9 and worst_rel <= 1e-7
    return {
        "criterion": 9,
        "name": "conformal-flatness",
        "passed": passed,
        "seconds": time.perf_counter() - start,
        "detail": f"max |Sc| {max_sc:.3e} over {len(radii)} radii, worst invariance rel {worst_rel:.3e}",
    }


def _random_source(rng: np.random.Generator, metric: RadialMetric, nodes: int, bumps: int) -> MeasuredFunction:
    radii = np.linspace(0.0, 5.0, nodes)
    top = radii[-1]
    vals = np.zeros_like(radii)
    for _ in range(bumps):
        c = rng.uniform(0.0, 0.8 * top)
        w = rng.uniform(0.08 * top, 0.3 * top)
        a = rng.uniform(0.3, 1.0)
        vals += a * np.exp(-(((radii - c) / w) ** 2))
    vals *= np.clip(1.0 - (radii / top) ** 2, 0.0, None) ** 1.5
    vals[-1] = 0.0
    return MeasuredFunction.from_grid(RadialProfile(radii, vals, COMPACT), metric)


def check_rearrangement(quick: bool = False) -> dict:
    """Equimeasurability, norm preservation, and energy decrease."""
    start = time.perf_counter()
    rng = np.random.default_rng(2024)
    dist_sources = 3 if quick else 20
    worst_dist = 0.0
    for _ in range(dist_sources):
        n = int(rng.integers(3, 6))
        met = euclidean(n)
        f = _random_source(rng, met, 300, 4)
        ubar = rearrange(f, met)
        g = MeasuredFunction.from_grid(ubar, met)
        levels = rng.uniform(0.0, f.profile.values.max() * 1.05, size=100)
        da = distribution_function(f, levels)
        db = distribution_function(g, levels)
        scale = max(float(distribution_function(f, np.array([0.0]))[0]), 1.0)
        worst_dist = max(worst_dist, float(np.max(np.abs(da - db))) / scale)
    norm_sources = 2 if quick else 10
    worst_norm = 0.0
    for _ in range(norm_sources):
        met = euclidean(3)
        f = _random_source(rng, met, 300, 4)
        ubar = rearrange(f, met)
        for q in (1.0, 1.4, 1.7, 2.0):
            lhs, rhs = norms_check(f, ubar, met, q)
            worst_norm = max(worst_norm, abs(lhs - rhs) / max(lhs, 1e-30))
    ps_sources = 50 if quick else 500
    pool = [euclidean(3), euclidean(4), euclidean(5), space_form(3, -0.7), space_form(4, -1.0)]
    worst_margin = -math.inf
    violations = 0
    for i in range(ps_sources):
        met = pool[i % len(pool)]
        f = _random_source(rng, met, int(rng.integers(200, 400)), int(rng.integers(2, 6)))
        target = euclidean(met.n)
        ubar = rearrange(f, target)
        e_src, e_bar = dirichlet_check(f, ubar, target)
        margin = (e_bar - e_src) / max(e_src, 1.0)
        worst_margin = max(worst_margin, margin)
        if margin > 1e-8:
            violations += 1
    passed = worst_dist <= 1e-8 and worst_norm <= 1e-8 and violations == 0
    return {
        "criterion": 10,
        "name": "rearrangement",
        "passed": passed,
        "seconds": time.perf_counter() - start,
        "detail": (
            f"dist rel {worst_dist:.3e}, norm rel {worst_norm:.3e}, "
            f"{violations}/{ps_sources} energy violations (worst margin {worst_margin:.3e})"
        ),
    }


ACCEPTANCE = (
    check_moment_table,
    check_coefficient_assembly,
    check_sharp_attainment,
    check_quotient_minimization,
    check_block_ratios,
    check_curvature_series,
    check_alpha_ranges,
    check_kappa_window,
    check_conformal_flatness,
    check_rearrangement,
)


def run_acceptance(quick: bool = False) -> list[dict]:
    return [check(quick) for check in ACCEPTANCE]


# ---------------------------------------------------------------------------
# subcommands


def _payload(command: str, config: dict, results, passed: bool) -> dict:
    return {
        "schema": SCHEMA,
        "command": command,
        "config": config,
        "results": results,
        "pass": bool(passed),
    }


def _default_alphas(n: int) -> list[tuple[float, str]]:
    sob = n / (n - 2.0)
    cells = [(a, MINUS) for a in (0.3, 0.5, 0.7, 0.9)]
    for a in (1.1, 1.2, 1.5, sob):
        if 1.0 < a <= sob and all(abs(a - b) > 1e-12 for b, _ in cells):
            cells.append((a, PLUS))
    return cells


_CONSTANT_FIELDS = [
    "n", "alpha", "regime", "interp", "scale", "mass_constant", "energy_constant",
    "sharp", "sigma", "zeta1", "zeta2", "chi",
    "c1", "c2", "c3", "c4", "c5", "c6", "c7", "c8", "j",
]


def _constants_row(params: GNParams) -> dict:
    exp = exponents(params)
    row = {
        "n": params.n,
        "alpha": params.alpha,
        "regime": params.regime,
        "interp": exp.interp,
        "scale": exp.scale,
        "mass_constant": flat_mass_constant(params.n, params.alpha, params.mass_exponent),
        "energy_constant": flat_energy_constant(params.n, params.alpha),
        "sharp": sharp_constant(params.n, params.alpha, params.regime),
        "sigma": sigma(params),
    }
    try:
        z1, z2, chi = zeta_chi(params.n, params.alpha)
        cc = c_coefficients(params.n, params.alpha)
        row.update({"zeta1": z1, "zeta2": z2, "chi": chi, "j": j_coefficient(params)})
        row.update({f"c{i}": v for i, v in enumerate(cc.as_tuple(), start=1)})
    except ValueError:
        # Second-order machinery has poles (e.g. at the endpoint exponent in
        # dimension 4); first-order data above is still valid there.
        row.update({k: None for k in ("zeta1", "zeta2", "chi", "j",
                                      "c1", "c2", "c3", "c4", "c5", "c6", "c7", "c8")})
    return row


def cmd_constants(args) -> dict:
    if args.alpha is not None:
        cells = [(args.alpha, _infer_regime(args.alpha, args.regime))]
    else:
        cells = _default_alphas(args.n)
    rows = [
        _constants_row(GNParams(n=args.n, alpha=a, regime=regime, m_frak=args.m_frak))
        for a, regime in cells
    ]
    rows.sort(key=lambda r: (r["n"], r["regime"], r["alpha"]))
    config = {"n": args.n, "alpha": args.alpha, "regime": args.regime, "m_frak": args.m_frak}
    payload = _payload("constants", config, rows, True)
    _emit(args, payload, rows, _CONSTANT_FIELDS)
    return payload


_RANGE_FIELDS = ["n", "kind", "label", "lo", "hi", "lo_open", "hi_open",
                 "provenance", "residual", "kappa", "binding"]


def cmd_ranges(args) -> dict:
    ns = [args.n] if args.n is not None else list(range(3, 17))
    rows = []
    for n in ns:
        for case in CASES:
            r = admissible_range(n, case)
            rows.append({
                "n": n, "kind": "range", "label": case,
                "lo": r.lo, "hi": r.hi, "lo_open": r.lo_open, "hi_open": r.hi_open,
                "provenance": r.provenance, "residual": r.residual,
                "kappa": None, "binding": None,
            })
        for regime in (MINUS, PLUS):
            k = kappa(n, regime)
            rows.append({
                "n": n, "kind": "kappa", "label": regime,
                "lo": None, "hi": None, "lo_open": None, "hi_open": None,
                "provenance": None, "residual": k.residual,
                "kappa": k.kappa, "binding": k.binding,
            })
    rows.sort(key=lambda r: (r["n"], r["kind"], r["label"]))
    payload = _payload("ranges", {"n": args.n}, rows, True)
    _emit(args, payload, rows, _RANGE_FIELDS)
    return payload


_MOMENT_FIELDS = ["n", "alpha", "regime", "q1", "q2", "closed", "quad", "rel_err", "ok"]


def cmd_moments(args) -> dict:
    params = _build_params(args.n, args.alpha, args.regime, args.m_frak)
    tol = args.tol if args.tol is not None else 1e-8
    rows = []
    for spec in _moment_grid(params.n, params.alpha):
        closed = moment_closed(params.n, params.alpha, spec)
        quad = moment_quad(params.n, params.alpha, spec)
        rel = abs(quad - closed) / abs(closed)
        rows.append({
            "n": params.n, "alpha": params.alpha, "regime": params.regime,
            "q1": spec.q1, "q2": spec.q2,
            "closed": closed, "quad": quad, "rel_err": rel, "ok": rel <= tol,
        })
    rows.sort(key=lambda r: (r["q1"], r["q2"]))
    passed = all(r["ok"] for r in rows) and bool(rows)
    config = {"n": params.n, "alpha": params.alpha, "regime": params.regime, "tol": tol}
    payload = _payload("moments verify", config, rows, passed)
    _emit(args, payload, rows, _MOMENT_FIELDS)
    return payload


_SERIES_FIELDS = ["functional", "t", "value"]


def cmd_expansion(args) -> dict:
    params = _build_params(args.n, args.alpha, args.regime, args.m_frak)
    metric = parse_metric(args.metric, args.n)
    if metric.kind == CONFORMAL:
        raise CliError("expansion fit needs a euclidean or spaceform metric")
    t_grid = None
    if args.tmin is not None or args.tmax is not None:
        if args.tmin is None or args.tmax is None:
            raise CliError("--tmin and --tmax must be given together")
        if not 0.0 < args.tmin < args.tmax:
            raise CliError("need 0 < tmin < tmax")
        t_grid = tuple(np.geomspace(args.tmax, args.tmin, args.tcount))
    tol_first = args.tol if args.tol is not None else 1e-3
    tol_second = 5.0 * tol_first
    curv = curvature_at_pole(metric)
    lfit = L_series(params, metric, a_choice=args.jet, t_grid=t_grid)
    wfit = W_series(params, metric, t_grid=t_grid)
    reports = [
        series_report("L", params, metric, lfit, predict_L_coeffs(params, curv, a_choice=args.jet),
                      tol_first=tol_first, tol_second=tol_second),
        series_report("W", params, metric, wfit, predict_W_coeffs(params, curv),
                      tol_first=tol_first, tol_second=tol_second),
    ]
    rows = [
        {"functional": kind, "t": t, "value": v}
        for kind, fit in (("L", lfit), ("W", wfit))
        for t, v in fit.t_samples
    ]
    passed = all(rep["verdict"] for rep in reports)
    config = {
        "n": params.n, "alpha": params.alpha, "regime": params.regime,
        "m_frak": params.m_frak, "metric": args.metric, "jet": args.jet,
        "tol_first": tol_first, "tol_second": tol_second,
        "t_grid": None if t_grid is None else list(t_grid),
    }
    payload = _payload("expansion fit", config, reports, passed)
    _emit(args, payload, rows, _SERIES_FIELDS)
    return payload


_MINIMIZE_FIELDS = ["n", "alpha", "regime", "metric", "ball_radius", "grid",
                    "init", "value", "iterations", "converged", "sharp", "rel_gap", "ok"]


def cmd_minimize(args) -> dict:
    params = _build_params(args.n, args.alpha, args.regime, args.m_frak)
    metric = parse_metric(args.metric, args.n)
    radius = args.ball_radius
    if radius is None:
        radius = 4.0 if params.regime == MINUS else 14.0
    tol = args.tol if args.tol is not None else 1e-3
    config = MinimizeConfig(
        ball_radius=radius, grid_nodes=args.grid, init=args.init, seed=args.seed
    )
    res = minimize_quotient(metric, params, config)
    row = {
        "n": params.n, "alpha": params.alpha, "regime": params.regime,
        "metric": args.metric, "ball_radius": radius, "grid": args.grid,
        "init": args.init, "value": res.value, "iterations": res.iterations,
        "converged": res.converged,
    }
    if metric.kind == EUCLIDEAN:
        ref = sharp_constant(params.n, params.alpha, params.regime)
        rel = abs(res.value - ref) / ref
        row.update({"sharp": ref, "rel_gap": rel, "ok": rel <= tol})
    else:
        # No closed reference off flat space; the minimum is an upper bound.
        row.update({"sharp": None, "rel_gap": None, "ok": True})
    if args.profile_out:
        profile_to_csv(res.profile, args.profile_out)
    cfg = {
        "n": params.n, "alpha": params.alpha, "regime": params.regime,
        "metric": args.metric, "ball_radius": radius, "grid": args.grid,
        "init": args.init, "seed": args.seed, "tol": tol,
    }
    payload = _payload("minimize", cfg, [row], row["ok"])
    _emit(args, payload, [row], _MINIMIZE_FIELDS)
    return payload


_SYM_PROP_FIELDS = ["source", "metric", "dist_rel", "norm_rel", "energy_margin", "ok"]
_SYM_RUN_FIELDS = ["knots", "support", "value_max", "norm_rel", "energy_src", "energy_rearranged", "ok"]


def cmd_symmetrize(args) -> dict:
    target = parse_metric(args.target, args.n)
    tol = args.tol if args.tol is not None else 1e-8
    if args.infile:
        source_metric = parse_metric(args.metric, args.n)
        prof = profile_from_csv(args.infile)
        f = MeasuredFunction.from_grid(prof, source_metric)
        ubar = rearrange(f, target)
        lhs, rhs = norms_check(f, ubar, target, 2.0)
        norm_rel = abs(lhs - rhs) / max(lhs, 1e-30)
        e_src, e_bar = dirichlet_check(f, ubar, target)
        ok = norm_rel <= tol and e_bar <= e_src * (1.0 + tol)
        row = {
            "knots": int(ubar.radii.size),
            "support": float(ubar.radii[-1]),
            "value_max": float(ubar.values.max()),
            "norm_rel": norm_rel,
            "energy_src": e_src,
            "energy_rearranged": e_bar,
            "ok": ok,
        }
        if args.out and not (args.json or args.csv):
            # Default file output for a rearrangement run is the profile itself.
            profile_to_csv(ubar, args.out)
            args.out = None
        cfg = {"n": args.n, "metric": args.metric, "target": args.target,
               "infile": args.infile, "tol": tol}
        payload = _payload("symmetrize", cfg, [row], ok)
        _emit(args, payload, [row], _SYM_RUN_FIELDS)
        return payload
    rng = np.random.default_rng(args.seed)
    rows = []
    for i in range(args.count):
        f = _random_source(rng, parse_metric(args.metric, args.n), args.grid, 4)
        ubar = rearrange(f, target)
        g = MeasuredFunction.from_grid(ubar, target)
        levels = rng.uniform(0.0, f.profile.values.max() * 1.05, size=100)
        scale = max(float(distribution_function(f, np.array([0.0]))[0]), 1.0)
        dist_rel = float(np.max(np.abs(
            distribution_function(f, levels) - distribution_function(g, levels)
        ))) / scale
        norm_rel = 0.0
        for q in (1.0, 2.0):
            lhs, rhs = norms_check(f, ubar, target, q)
            norm_rel = max(norm_rel, abs(lhs - rhs) / max(lhs, 1e-30))
        e_src, e_bar = dirichlet_check(f, ubar, target)
        margin = (e_bar - e_src) / max(e_src, 1.0)
        ok = dist_rel <= tol and norm_rel <= tol and margin <= tol
        rows.append({
            "source": i, "metric": args.metric, "dist_rel": dist_rel,
            "norm_rel": norm_rel, "energy_margin": margin, "ok": ok,
        })
    passed = all(r["ok"] for r in rows)
    cfg = {"n": args.n, "metric": args.metric, "target": args.target,
           "count": args.count, "grid": args.grid, "seed": args.seed, "tol": tol}
    payload = _payload("symmetrize", cfg, rows, passed)
    _emit(args, payload, rows, _SYM_PROP_FIELDS)
    return payload


_CONFORMAL_FIELDS = ["record", "index", "r_lo", "r_hi", "max_abs_sc", "lhs", "rhs", "rel", "ok"]


def cmd_conformal(args) -> dict:
    metric = parse_metric(args.metric, args.n)
    if metric.kind != CONFORMAL:
        raise CliError("conformal check needs a conformal:* metric")
    tol = args.tol if args.tol is not None else 1e-7
    harmonic = args.metric.startswith("conformal:schwarzschild:")
    rows = []
    if harmonic:
        m = _parse_float(args.metric.rsplit("m=", 1)[1], "m")
        horizon = (m / 2.0) ** (1.0 / (args.n - 2.0))
        radii = np.geomspace(1.5 * horizon, 0.75 * metric.r_max, 50)
        sc = np.array([scalar_curvature(metric, float(r)) for r in radii])
        max_sc = float(np.max(np.abs(sc)))
        rows.append({
            "record": "scalar", "index": 0,
            "r_lo": float(radii[0]), "r_hi": float(radii[-1]),
            "max_abs_sc": max_sc, "lhs": None, "rhs": None, "rel": None,
            "ok": max_sc < 1e-9,
        })
    rng = np.random.default_rng(args.seed)
    lo, hi = 0.01 * metric.r_max, 0.5 * metric.r_max
    grid = np.linspace(lo, hi, 1200)
    width = hi - lo
    ramp = (
        np.clip((grid - lo - 0.02 * width) / (0.05 * width), 0.0, 1.0) ** 2
        * np.clip((hi - 0.05 * width - grid) / (0.05 * width), 0.0, 1.0) ** 2
    )
    for i in range(args.count):
        centers = rng.uniform(lo + 0.1 * width, lo + 0.6 * width, size=3)
        widths = rng.uniform(0.02 * width, 0.1 * width, size=3)
        amps = rng.uniform(0.3, 1.0, size=3)
        vals = np.zeros_like(grid)
        for c, w, a in zip(centers, widths, amps):
            vals += a * np.exp(-(((grid - c) / w) ** 2))
        vals *= ramp
        vals[0] = vals[-1] = 0.0
        prof = RadialProfile(grid, vals, COMPACT)
        lhs, rhs, diff = conformal_invariance_check(prof, metric.conformal_factor, args.n, metric.r_max)
        rel = abs(diff) / max(abs(lhs), abs(rhs))
        rows.append({
            "record": "invariance", "index": i,
            "r_lo": None, "r_hi": None, "max_abs_sc": None,
            "lhs": lhs, "rhs": rhs, "rel": rel, "ok": rel <= tol,
        })
    passed = all(r["ok"] for r in rows)
    cfg = {"n": args.n, "metric": args.metric, "count": args.count,
           "seed": args.seed, "tol": tol}
    payload = _payload("conformal check", cfg, rows, passed)
    _emit(args, payload, rows, _CONFORMAL_FIELDS)
    return payload


_SUITE_FIELDS = ["criterion", "name", "passed", "seconds", "detail"]


def cmd_suite(args) -> dict:
    results = run_acceptance(quick=args.quick)
    passed = all(r["passed"] for r in results)
    if not (args.json or args.csv):
        for r in results:
            status = "PASS" if r["passed"] else "FAIL"
            sys.stdout.write(
                f"{status}  {r['criterion']:>2} {r['name']:<22} {r['seconds']:7.2f}s  {r['detail']}\n"
            )
        sys.stdout.write(f"suite: {'pass' if passed else 'FAIL'}\n")
        payload = _payload("suite", {"quick": args.quick}, results, passed)
        if args.out:
            with open(args.out, "w") as fh:
                fh.write(json.dumps(payload, indent=2, sort_keys=True) + "\n")
        return payload
    payload = _payload("suite", {"quick": args.quick}, results, passed)
    _emit(args, payload, results, _SUITE_FIELDS)
    return payload


# ---------------------------------------------------------------------------
# parser


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        _emit_error(message)
        raise SystemExit(2)


def _add_output_flags(p) -> None:
    fmt = p.add_mutually_exclusive_group()
    fmt.add_argument("--json", action="store_true", help="emit a JSON document")
    fmt.add_argument("--csv", action="store_true", help="emit CSV rows")
    p.add_argument("--out", help="write output to this path instead of stdout")


def _add_cell_flags(p, alpha_required: bool) -> None:
    p.add_argument("--n", type=int, default=3, help="dimension (default 3)")
    p.add_argument("--alpha", type=float, required=alpha_required,
                   help="interpolation exponent" + ("" if alpha_required else " (default: a small grid)"))
    p.add_argument("--regime", choices=(MINUS, PLUS),
                   help="inferred from alpha when omitted")
    p.add_argument("--m-frak", dest="m_frak", type=float, default=1.0,
                   help="fixed positive constant in the functionals (default 1)")


def build_parser() -> argparse.ArgumentParser:
    root = _Parser(prog="gnsharp", description=__doc__.split("\n\n")[0])
    sub = root.add_subparsers(dest="command", required=True)

    p = sub.add_parser("constants", help="exponents, sharp constants, coefficients")
    _add_cell_flags(p, alpha_required=False)
    _add_output_flags(p)
    p.set_defaults(handler=cmd_constants)

    p = sub.add_parser("ranges", help="admissible alpha intervals and kappa windows")
    p.add_argument("--n", type=int, default=None, help="single dimension (default: 3..16)")
    _add_output_flags(p)
    p.set_defaults(handler=cmd_ranges)

    p = sub.add_parser("moments", help="radial moment table")
    msub = p.add_subparsers(dest="subcommand", required=True)
    pv = msub.add_parser("verify", help="closed forms against quadrature")
    _add_cell_flags(pv, alpha_required=True)
    pv.add_argument("--tol", type=float, help="relative tolerance (default 1e-8)")
    _add_output_flags(pv)
    pv.set_defaults(handler=cmd_moments)

    p = sub.add_parser("expansion", help="small-t series of the assembled functionals")
    esub = p.add_subparsers(dest="subcommand", required=True)
    pf = esub.add_parser("fit", help="fit L and W series and compare predictions")
    _add_cell_flags(pf, alpha_required=True)
    pf.add_argument("--metric", default="spaceform:K=1", help="euclidean or spaceform:K=<v>")
    pf.add_argument("--jet", choices=("bp", "zero"), default="bp",
                    help="cutoff jet driving the L series (default bp)")
    pf.add_argument("--tmin", type=float, help="smallest t of a custom geometric grid")
    pf.add_argument("--tmax", type=float, help="largest t of a custom geometric grid")
    pf.add_argument("--tcount", type=int, default=12, help="points in the custom grid")
    pf.add_argument("--tol", type=float, help="first-order tolerance (default 1e-3; second order 5x)")
    _add_output_flags(pf)
    pf.set_defaults(handler=cmd_expansion)

    p = sub.add_parser("minimize", help="descend the quotient over a centered ball")
    _add_cell_flags(p, alpha_required=True)
    p.add_argument("--metric", default=EUCLIDEAN, help="any metric syntax (default euclidean)")
    p.add_argument("--ball-radius", dest="ball_radius", type=float,
                   help="default 4 (minus) or 14 (plus)")
    p.add_argument("--grid", type=int, default=512, help="radial nodes (default 512)")
    p.add_argument("--init", choices=("bump", "extremal", "random"), default="bump")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, help="relative gap tolerance vs. the sharp constant (default 1e-3)")
    p.add_argument("--profile-out", dest="profile_out", help="write the minimizer profile as CSV")
    _add_output_flags(p)
    p.set_defaults(handler=cmd_minimize)

    p = sub.add_parser("symmetrize", help="decreasing rearrangement checks")
    p.add_argument("--n", type=int, default=3, help="dimension (default 3)")
    p.add_argument("--metric", default=EUCLIDEAN, help="source metric (default euclidean)")
    p.add_argument("--target", default=EUCLIDEAN, help="target metric (default euclidean)")
    p.add_argument("--in", dest="infile", help="rearrange this r,value CSV instead of random sources")
    p.add_argument("--count", type=int, default=10, help="random sources in property mode")
    p.add_argument("--grid", type=int, default=300, help="source grid nodes in property mode")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, help="relative tolerance (default 1e-8)")
    _add_output_flags(p)
    p.set_defaults(handler=cmd_symmetrize)

    p = sub.add_parser("conformal", help="conformal-geometry checks")
    csub = p.add_subparsers(dest="subcommand", required=True)
    pc = csub.add_parser("check", help="scalar flatness and quotient invariance")
    pc.add_argument("--n", type=int, default=3, help="dimension (default 3)")
    pc.add_argument("--metric", default="conformal:schwarzschild:m=1",
                    help="a conformal:* metric (default conformal:schwarzschild:m=1)")
    pc.add_argument("--count", type=int, default=20, help="random test profiles (default 20)")
    pc.add_argument("--seed", type=int, default=0)
    pc.add_argument("--tol", type=float, help="invariance tolerance (default 1e-7)")
    _add_output_flags(pc)
    pc.set_defaults(handler=cmd_conformal)

    p = sub.add_parser("suite", help="run the acceptance battery")
    p.add_argument("--quick", action="store_true", help="reduced cell counts")
    _add_output_flags(p)
    p.set_defaults(handler=cmd_suite)

    return root


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        payload = args.handler(args)
    except CliError as exc:
        _emit_error(str(exc))
        return 2
    except ValueError as exc:
        _emit_error(str(exc))
        return 2
    return 0 if payload["pass"] else 1


def main() -> None:
    raise SystemExit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
