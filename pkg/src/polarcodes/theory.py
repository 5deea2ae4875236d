"""Numerical checks of polarization constants and bounds.

Every check returns a :class:`BoundReport` with the claimed bound, the
measured extremum and a pass flag, so the CLI can emit them as JSON lines.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from .channel import (
    Channel,
    binary_entropy,
    entropy,
    make_bec,
    metrics,
    random_symmetric_channel,
)
from .construct import _dimension
from .degrade import BinningConfig
from .errors import InvalidParameterError
from .transform import bec_all, transform_minus, transform_plus

REPORT_SCHEMA = "bound-report/1"
THETA_CLAIM = 0.799
DEFAULT_GRID = 10**5


@dataclass
class BoundReport:
    name: str
    claim: str
    measured: float
    grid: str
    passed: bool
    details: dict = field(default_factory=dict)

    def to_json(self) -> str:
        d = {"schema": REPORT_SCHEMA, **asdict(self)}
        return json.dumps(d, sort_keys=True, default=_jsonable)


def _jsonable(v):
    if isinstance(v, np.generic):
        return v.item()
    if isinstance(v, np.ndarray):
        return v.tolist()
    raise TypeError(type(v))


# ---------------------------------------------------------------------------
# entropy helpers that stay accurate at both ends of (0, 1/2)


def entropy_deficit(gamma):
    """``1 - h(1/2 - gamma)`` without cancellation for small ``gamma``.

    Equals ``((1+t) ln(1+t) + (1-t) ln(1-t)) / (2 ln 2)`` with ``t = 2 gamma``;
    the series ``sum_k t**(2k) / (k (2k-1))`` is used for ``t < 0.05``.
    """
    t = 2.0 * np.abs(np.asarray(gamma, dtype=float))
    small = t < 0.05
    out = np.empty_like(t)
    ts = t[small]
    t2 = ts * ts
    acc = np.zeros_like(ts)
    power = np.ones_like(ts)
    for k in range(1, 12):
        power = power * t2
        acc += power / (k * (2 * k - 1))
    out[small] = acc
    tb = t[~small]
    with np.errstate(divide="ignore", invalid="ignore"):
        big = (1 + tb) * np.log1p(tb) + np.where(tb < 1, (1 - tb) * np.log1p(-tb), 0.0)
    out[~small] = big
    out = out / (2.0 * math.log(2.0))
    return out if out.ndim else float(out)


def upsilon(x):
    """``(h(2x(1-x)) - h(x)) / (h(x) (1 - h(x)))`` on ``(0, 1/2)``.

    Below ``x = 1/4`` the numerator is a plain difference of entropies; above
    it, both entropies are written through their deficit from 1 so the
    ``O(xi**2)`` numerator near ``1/2`` keeps full relative precision.
    """
    x = np.asarray(x, dtype=float)
    y = 2.0 * x * (1.0 - x)
    lo = x < 0.25
    num = np.empty_like(x)
    num[lo] = binary_entropy(y[lo]) - binary_entropy(x[lo])
    dx = entropy_deficit(0.5 - x[~lo])
    dy = entropy_deficit(0.5 - y[~lo])
    num[~lo] = dx - dy
    d = np.where(lo, 1.0 - binary_entropy(x), 0.0)
    d[~lo] = dx
    hx = np.where(lo, binary_entropy(x), 1.0 - d)
    out = num / (hx * d)
    return out if out.ndim else float(out)


def _open_grid(lo: float, hi: float, points: int) -> np.ndarray:
    # cell midpoints: never touches the endpoints
    return lo + (hi - lo) * (np.arange(points) + 0.5) / points


def minimize_upsilon(grid_points: int = DEFAULT_GRID) -> BoundReport:
    """Minimum of ``upsilon`` over ``(0, 1/2)``; must exceed 0.799."""
    if grid_points < 1000:
        raise InvalidParameterError("use at least 1000 grid points")
    xs = _open_grid(0.0, 0.5, grid_points)
    vals = upsilon(xs)
    j = int(np.argmin(vals))
    lo, hi = xs[max(j - 1, 0)], xs[min(j + 1, grid_points - 1)]
    res = minimize_scalar(lambda t: float(upsilon(t)), bounds=(lo, hi), method="bounded",
                          options={"xatol": 1e-12})
    x_min, v_min = (res.x, float(res.fun)) if res.fun < vals[j] else (xs[j], float(vals[j]))
    return BoundReport(
        "theta_hat",
        f"min upsilon(x) over (0, 1/2) > {THETA_CLAIM}",
        v_min,
        f"{grid_points} midpoints of (0, 1/2) + bounded refinement",
        v_min > THETA_CLAIM,
        {"argmin": float(x_min), "limit_at_0": 1.0, "limit_at_half": 1.0},
    )


def verify_entropy_sandwich(grid_points: int = DEFAULT_GRID, tol: float = 1e-12) -> BoundReport:
    """``1 - 4 g**2 <= h(1/2 - g) <= 1 - 2 g**2`` for ``g`` in ``[0, 1/2]``."""
    g = np.linspace(0.0, 0.5, grid_points)
    h = 1.0 - entropy_deficit(g)
    low_gap = float(np.min(h - (1.0 - 4.0 * g * g)))
    high_gap = float(np.min((1.0 - 2.0 * g * g) - h))
    return BoundReport(
        "entropy_sandwich",
        "1 - 4g^2 <= h(1/2 - g) <= 1 - 2g^2",
        min(low_gap, high_gap),
        f"{grid_points} points of [0, 1/2]",
        low_gap >= -tol and high_gap >= -tol,
        {"min_lower_margin": low_gap, "min_upper_margin": high_gap, "tolerance": tol},
    )


def case1_threshold(grid_points: int = DEFAULT_GRID) -> float:
    """Largest ``a`` with ``h(2x(1-x)) / h(x) >= 3/2`` on all of ``(0, a)``."""
    xs = _open_grid(0.0, 0.25, grid_points)
    ratio = binary_entropy(2 * xs * (1 - xs)) / binary_entropy(xs)
    bad = np.flatnonzero(ratio < 1.5)
    return float(xs[bad[0]]) if bad.size else 0.25


def verify_upsilon_regimes(a: float, grid_points: int = DEFAULT_GRID, tol: float = 1e-12) -> BoundReport:
    """Check the three-regime lower bounds on ``upsilon`` for split point ``a``.

    * ``(0, a)``: ``upsilon >= 1/2``; the ratio premise ``h(2x(1-x))/h(x) >= 3/2``
      is reported separately because it only holds for small ``a``.
    * ``[a, 1/2 - a]``: ``upsilon >= 4 (h(1/2 - a + 2a(1/2 - a)) - h(1/2 - a))``.
    * ``(1/2 - a, 1/2)``: ``upsilon >= 1/2 - 4 a**2``.
    """
    if not 0.0 < a < 0.25:
        raise InvalidParameterError("a must lie in (0, 1/4)")
    x1 = _open_grid(0.0, a, grid_points)
    x2 = np.linspace(a, 0.5 - a, grid_points)
    xi = _open_grid(0.0, a, grid_points)
    v1, v2, v3 = upsilon(x1), upsilon(x2), upsilon(0.5 - xi)
    ratio1 = binary_entropy(2 * x1 * (1 - x1)) / binary_entropy(x1)
    c2 = 4.0 * (binary_entropy(0.5 - a + 2 * a * (0.5 - a)) - binary_entropy(0.5 - a))
    c3 = 0.5 - 4.0 * a * a
    cases = {
        "case1": {"bound": 0.5, "min_upsilon": float(v1.min()), "ok": bool(v1.min() >= 0.5 - tol),
                  "ratio_premise_holds": bool(ratio1.min() >= 1.5), "min_ratio": float(ratio1.min())},
        "case2": {"bound": float(c2), "min_upsilon": float(v2.min()), "ok": bool(v2.min() >= c2 - tol)},
        "case3": {"bound": float(c3), "min_upsilon": float(v3.min()), "ok": bool(v3.min() >= c3 - tol)},
    }
    sandwich = verify_entropy_sandwich(grid_points, tol)
    cases["sandwich"] = {"ok": sandwich.passed, "margin": sandwich.measured}
    margin = min(v1.min() - 0.5, v2.min() - c2, v3.min() - c3)
    return BoundReport(
        "upsilon_regimes",
        "upsilon >= 1/2, 4(h(1/2-a+2a(1/2-a)) - h(1/2-a)), 1/2 - 4a^2 on the three regimes",
        float(margin),
        f"{grid_points} points per regime, a={a}",
        all(c["ok"] for c in cases.values()),
        cases,
    )


def sqrt3_expression(z):
    z = np.asarray(z, dtype=float)
    return np.sqrt(z * (1 + z)) + np.sqrt((1 - z) * (2 - z))


def verify_sqrt3_bound(grid_points: int = DEFAULT_GRID + 1, tol: float = 1e-12) -> BoundReport:
    """``sqrt(z(1+z)) + sqrt((1-z)(2-z)) <= sqrt(3)`` on ``[0, 1]``; equality at 1/2."""
    z = np.linspace(0.0, 1.0, grid_points)
    vals = sqrt3_expression(z)
    j = int(np.argmax(vals))
    vmax = float(vals[j])
    return BoundReport(
        "sqrt3",
        "sqrt(z(1+z)) + sqrt((1-z)(2-z)) <= sqrt(3)",
        vmax,
        f"{grid_points} points of [0, 1]",
        vmax <= math.sqrt(3.0) + tol,
        {"argmax": float(z[j]), "sqrt3": math.sqrt(3.0), "value_at_half": float(sqrt3_expression(0.5))},
    )


# ---------------------------------------------------------------------------
# channel-level checks


POLARIZED_T = 1e-12


def contraction_ratio(ch: Channel) -> float | None:
    """``(sqrt T(W-) + sqrt T(W+)) / (2 sqrt T(W))``.

    Returns None for (numerically) polarized channels, ``T(W) <= 1e-12``, where
    the ratio is dominated by rounding in ``H``.
    """
    t = metrics(ch).symmetric_entropy
    if t <= POLARIZED_T:
        return None
    tm = metrics(transform_minus(ch)).symmetric_entropy
    tp = metrics(transform_plus(ch)).symmetric_entropy
    return (math.sqrt(max(tm, 0.0)) + math.sqrt(max(tp, 0.0))) / (2.0 * math.sqrt(t))


def bec_contraction_ratio(z: float) -> float:
    """Closed form of :func:`contraction_ratio` for an erasure channel."""
    t = z * (1 - z)
    zm, zp = 2 * z - z * z, z * z
    return (math.sqrt(zm * (1 - zm)) + math.sqrt(zp * (1 - zp))) / (2 * math.sqrt(t))


def estimate_contraction(samples: int = 1000, seed: int = 0, margin: float = 1e-6) -> BoundReport:
    """Largest contraction ratio over random symmetric channels (empirical Lambda)."""
    if samples < 100:
        raise InvalidParameterError("use at least 100 samples")
    rng = np.random.default_rng(seed)
    ratios, skipped = [], 0
    for _ in range(samples):
        r = contraction_ratio(random_symmetric_channel(rng))
        if r is None:
            skipped += 1
        else:
            ratios.append(r)
    lam = max(ratios) if ratios else float("nan")
    bec = contraction_ratio(make_bec(0.5))
    return BoundReport(
        "contraction",
        "E sqrt(T) contracts: ratio < 1",
        lam,
        f"{samples} random symmetric channels, seed {seed}",
        bool(ratios) and lam < 1.0 - margin,
        {"skipped_polarized": skipped, "bec_0.5_ratio": bec, "bec_0.5_exact": bec_contraction_ratio(0.5)},
    )


def check_entropy_gap(samples: int = 500, theta: float = 0.75, seed: int = 1) -> BoundReport:
    """``H(W-) - H(W) >= theta H(W)(1 - H(W))`` on random symmetric channels."""
    rng = np.random.default_rng(seed)
    worst = math.inf
    for _ in range(samples):
        ch = random_symmetric_channel(rng)
        h = entropy(ch)
        t = h * (1 - h)
        if t <= POLARIZED_T:
            continue
        worst = min(worst, (entropy(transform_minus(ch)) - h) / t)
    return BoundReport(
        "entropy_gap",
        f"(H(W-) - H(W)) / T(W) >= {theta}",
        worst,
        f"{samples} random symmetric channels, seed {seed}",
        worst >= theta,
    )


def check_entropy_martingale(samples: int = 500, seed: int = 2, tol: float = 1e-9) -> BoundReport:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(samples):
        ch = random_symmetric_channel(rng)
        gap = 0.5 * entropy(transform_minus(ch)) + 0.5 * entropy(transform_plus(ch)) - entropy(ch)
        worst = max(worst, abs(gap))
    return BoundReport(
        "entropy_martingale",
        "|H(W-)/2 + H(W+)/2 - H(W)| < 1e-9",
        worst,
        f"{samples} random symmetric channels, seed {seed}",
        worst < tol,
    )


def rough_polarization_fraction(p: float = 0.5, n: int = 20, rho: float = 0.9, slack: float = 0.05) -> BoundReport:
    """Share of BEC subchannels with ``Z <= 2 rho**n``, against ``I(W) - slack``.

    The slack is a desk-scale choice; the underlying statement is asymptotic.
    """
    z = bec_all(p, n)
    frac = float(np.mean(z <= 2 * rho**n))
    return BoundReport(
        "rough_polarization_bec",
        f"Pr[Z <= 2 rho^n] >= I(W) - {slack} (slack chosen for finite n)",
        frac,
        f"BEC({p}), n={n}, rho={rho}",
        frac >= (1 - p) - slack,
        {"capacity": 1 - p, "threshold": 2 * rho**n, "desk_scale_slack": slack},
    )


# ---------------------------------------------------------------------------
# scaling experiment


@dataclass
class ScalingRow:
    epsilon: float
    n: int | None
    N: int | None
    rate: float | None
    z_bound: float | None


@dataclass
class ScalingFit:
    rows: list[ScalingRow]
    slope: float | None  # fitted exponent mu_hat; None when fewer than two points
    intercept: float | None
    target: float
    complete: bool

    def to_csv(self) -> str:
        lines = ["# schema: scaling-fit/1", "epsilon,n,N,rate,z_bound"]
        for r in self.rows:
            cells = [repr(r.epsilon)] + ["" if v is None else repr(v) for v in (r.n, r.N, r.rate, r.z_bound)]
            lines.append(",".join(cells))
        return "\n".join(lines) + "\n"


def fit_scaling_exponent(
    channel: Channel,
    gaps,
    target_bler: float = 1e-3,
    max_n: int = 24,
    cfg: BinningConfig | None = None,
) -> ScalingFit:
    """Smallest block length reaching ``target_bler`` at rate ``I(W) - eps``.

    ``log2 N`` is regressed on ``log2(1/eps)``; the slope is the measured
    scaling exponent. Erasure channels use exact subchannel values, other
    channels binned estimates (slow beyond ``n`` of about 12).
    """
    from .construct import is_erasure_channel, sort_stats_for

    gaps = [float(e) for e in gaps]
    cap = 1.0 - entropy(channel)
    if not gaps:
        raise InvalidParameterError("need at least one gap")
    for e in gaps:
        if not 0.0 < e < cap:
            raise InvalidParameterError(f"gap {e} must lie in (0, I(W)={cap:.6g})")
    erasure = is_erasure_channel(channel)
    rows = []
    for eps in sorted(gaps, reverse=True):
        row = ScalingRow(eps, None, None, None, None)
        for n in range(1, max_n + 1):
            z = bec_all(1.0 - cap, n) if erasure else sort_stats_for(channel, n, cfg).z_hat
            K = _dimension(n, cap - eps)
            bound = float(np.partition(z, K - 1)[:K].sum())
            if bound <= target_bler:
                row = ScalingRow(eps, n, 1 << n, K / (1 << n), bound)
                break
        rows.append(row)
    done = [r for r in rows if r.n is not None]
    slope = intercept = None
    if len(done) >= 2:
        xs = np.log2([1.0 / r.epsilon for r in done])
        ys = np.array([float(r.n) for r in done])
        slope, intercept = (float(v) for v in np.polyfit(xs, ys, 1))
    return ScalingFit(rows, slope, intercept, target_bler, len(done) == len(rows))
