"""Impact consumption multipliers of government spending.

Spending moves with the demand shock, truncation included, so the impact
multiplier at horizon ell is the first component of the derivative of the
impact state with respect to g.  That derivative obeys the same backward
recursion as the state itself, V(ell) = p M V(ell - 1) + f_g, with M and
f_g switching from the Normal to the ELB block once ell reaches ell_bar.
"""

from __future__ import annotations

import csv
import enum
import io
import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import NoBifurcation, UnsupportedDecomposition
from .model import E1, ModelParams, Regime, d_bar, d_bar0, f_of_p, p_bar, regime_system
from .paths import DIVERGENCE_FACTOR
from .regions import DEFAULT_ELL_CAP, ell_bar


class Context(str, enum.Enum):
    PN = "PN"
    PL = "PL"
    MIXED = "Mixed"


@dataclass(frozen=True)
class Converged:
    value: float


@dataclass(frozen=True)
class Divergent:
    pass


@dataclass(frozen=True)
class Ar2Coefficients:
    """m(ell+2) = tau_star m(ell+1) - delta_star m(ell) + c_star.

    ``singular`` flags F(p) == 0, where the fixed point does not exist.
    """

    tau_star: float
    delta_star: float
    c_star: float
    singular: bool = False


@dataclass(frozen=True)
class MultiplierSeries:
    context: Context
    values: np.ndarray  # values[ell - 1] = m(ell)
    p: float
    d: float | None = None
    ell_bar: int | None = None
    ell_plus: int | None = None
    limit: Converged | Divergent | None = None

    @property
    def ells(self) -> np.ndarray:
        return np.arange(1, len(self.values) + 1)

    def __len__(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class ModalDecomposition:
    """m(ell) = alpha_star + b1 r1^(ell - ell0) + b2 r2^(ell - ell0)."""

    r1: float
    r2: float
    b1: float
    b2: float
    alpha_star: float
    ell0: int

    def reconstruct(self, ells) -> np.ndarray:
        n = np.asarray(ells, dtype=float) - self.ell0
        return self.alpha_star + self.b1 * np.power(self.r1, n) + self.b2 * np.power(self.r2, n)


def _check_ell(ell: int) -> None:
    if isinstance(ell, bool) or int(ell) != ell or ell < 1:
        raise ValueError(f"ell must be an integer >= 1, got {ell!r}")


def _accumulate(params: ModelParams, p: float, n: int, regime: Regime) -> np.ndarray:
    """V after n steps of V <- p M V + f_g from zero."""
    v = np.zeros(2)
    for v in _iterate(params, p, n, regime):
        pass
    return v


def multiplier_pl(params: ModelParams, p: float, ell: int) -> float:
    """q_g times the (1,2) entry of sum_{i<ell} (pA*)^i."""
    _check_ell(ell)
    return float(E1 @ _accumulate(params, p, ell, Regime.ELB))


def multiplier_pn(params: ModelParams, p: float, ell: int) -> float:
    _check_ell(ell)
    return float(E1 @ _accumulate(params, p, ell, Regime.NORMAL))


def pl_limit_value(params: ModelParams, p: float) -> float:
    """Fixed point q_g p sigma m_xpi / F(p); the analytic continuation past p_bar."""
    return params.q_g * p * params.sigma * params.m_xpi / f_of_p(params, p)


def _below_p_bar(params: ModelParams, p: float) -> bool:
    # F > 0 on [0, p_bar) and F(p) = det(I - pA*); no root in (0, 1) means stable
    if f_of_p(params, p) <= 0:
        return False
    try:
        return p < p_bar(params)
    except NoBifurcation:
        return True


def multiplier_pl_limit(params: ModelParams, p: float) -> Converged | Divergent:
    if _below_p_bar(params, p):
        return Converged(pl_limit_value(params, p))
    return Divergent()


def multiplier_pn_limit(params: ModelParams, p: float) -> float:
    """e1 (I - pA)^{-1} f_g for the Normal block."""
    rf = regime_system(params, Regime.NORMAL)
    return float(E1 @ np.linalg.solve(np.eye(2) - p * rf.m, rf.f_g))


def ar2_coefficients(params: ModelParams, p: float) -> Ar2Coefficients:
    a = regime_system(params, Regime.ELB).m
    tau = p * (a[0, 0] + a[1, 1])
    delta = p * p * (a[0, 0] * a[1, 1] - a[0, 1] * a[1, 0])
    # c* = F(p) * alpha* with alpha* = q_g p sigma m_xpi / F(p)
    c_star = params.q_g * p * params.sigma * params.m_xpi
    return Ar2Coefficients(tau, delta, c_star, singular=f_of_p(params, p) == 0)


def _resolve_ell_bar(params: ModelParams, d: float, p: float, horizon: int) -> int | None:
    """ell_bar if it is <= horizon, else None (the whole range is pure normal)."""
    return ell_bar(params, d, p, ell_cap=max(horizon, 1))


def mixed_vectors(params: ModelParams, d: float, p: float, n: int) -> tuple[np.ndarray, int | None]:
    """dX_impact/dg for horizons 1..n along the unique path, plus ell_bar."""
    lb = _resolve_ell_bar(params, d, p, n)
    normal = regime_system(params, Regime.NORMAL)
    elb = regime_system(params, Regime.ELB)
    pa, pas = p * normal.m, p * elb.m
    out = np.zeros((n, 2))
    v = np.zeros(2)
    for ell in range(1, n + 1):
        if lb is not None and ell >= lb:
            v = pas @ v + elb.f_g
        else:
            v = pa @ v + normal.f_g
        out[ell - 1] = v
    return out, lb


def multiplier_mixed(params: ModelParams, d: float, p: float, ell: int) -> float:
    """Impact multiplier when the shock may push the path into a Mixed solution.

    Below ell_bar the path is pure normal and so is the multiplier.  From
    ell_bar on, the PN derivative at ell_bar - 1 is carried through
    ell - ell_bar + 1 ELB steps and the ELB spending effects accumulate on top.
    """
    _check_ell(ell)
    vecs, _ = mixed_vectors(params, d, p, ell)
    return float(vecs[-1, 0])


def ell_plus(params: ModelParams, d: float, p: float, ell_cap: int = DEFAULT_ELL_CAP) -> int | None:
    """Smallest horizon at which the mixed multiplier turns positive."""
    vecs, _ = mixed_vectors(params, d, p, ell_cap)
    positive = np.nonzero(vecs[:, 0] > 0)[0]
    return int(positive[0]) + 1 if positive.size else None


def admissible_mixed(params: ModelParams, d: float, p: float) -> str | None:
    """None when d_bar(p) < d < d_bar0, else the violated threshold."""
    if d <= d_bar(params, p):
        return f"d={d!r} <= d_bar(p)={d_bar(params, p)!r}"
    if d >= d_bar0(params):
        return f"d={d!r} >= d_bar0={d_bar0(params)!r}"
    return None


def multiplier_series(
    params: ModelParams, context: Context | str, p: float, n: int, d: float | None = None
) -> MultiplierSeries:
    """m(ell) for ell = 1..n in one regime context, with thresholds and limit."""
    context = Context(context)
    _check_ell(n)
    if context is Context.PL:
        vals = np.array([E1 @ v for v in _iterate(params, p, n, Regime.ELB)])
        return MultiplierSeries(context, vals, p, d, ell_bar=1, ell_plus=_first_positive(vals),
                                limit=multiplier_pl_limit(params, p))
    if context is Context.PN:
        vals = np.array([E1 @ v for v in _iterate(params, p, n, Regime.NORMAL)])
        return MultiplierSeries(context, vals, p, d, limit=Converged(multiplier_pn_limit(params, p)))
    if d is None:
        raise ValueError("the Mixed context needs a shock size d")
    vecs, lb = mixed_vectors(params, d, p, n)
    vals = vecs[:, 0].copy()
    if lb is None and d <= d_bar(params, p):
        limit: Converged | Divergent = Converged(multiplier_pn_limit(params, p))
    else:
        limit = multiplier_pl_limit(params, p)
    return MultiplierSeries(context, vals, p, d, ell_bar=lb, ell_plus=_first_positive(vals), limit=limit)


def _iterate(params: ModelParams, p: float, n: int, regime: Regime):
    rf = regime_system(params, regime)
    pm = p * rf.m
    v = np.zeros(2)
    for _ in range(n):
        v = pm @ v + rf.f_g
        yield v


def _first_positive(vals: np.ndarray) -> int | None:
    idx = np.nonzero(vals > 0)[0]
    return int(idx[0]) + 1 if idx.size else None


def ar2_recursion(coefs: Ar2Coefficients, m1: float, m2: float, n: int) -> np.ndarray:
    """Run the AR(2) forward from m(1), m(2) to m(n)."""
    out = np.zeros(n)
    out[0] = m1
    if n > 1:
        out[1] = m2
    for k in range(2, n):
        out[k] = coefs.tau_star * out[k - 1] - coefs.delta_star * out[k - 2] + coefs.c_star
    return out


def ar2_decompose(series: MultiplierSeries, params: ModelParams, p: float | None = None) -> ModalDecomposition:
    """Closed-form modes of the ELB-phase multiplier recursion.

    The weights are fitted on m(ell0), m(ell0 + 1) with ell0 = ell_bar (1 for
    a PL series).
    """
    p = series.p if p is None else p
    if series.context is Context.PN:
        raise ValueError("modal decomposition applies to PL or Mixed series")
    ell0 = 1 if series.context is Context.PL else series.ell_bar
    if ell0 is None or len(series) < ell0 + 1:
        raise ValueError("series needs at least two entries from ell_bar on")
    coefs = ar2_coefficients(params, p)
    tau, delta = coefs.tau_star, coefs.delta_star
    disc = tau * tau - 4.0 * delta
    m0 = float(series.values[ell0 - 1])
    m1 = float(series.values[ell0])

    if tau == 0 and delta == 0:
        # both roots zero: the series is constant at c_star from ell0 + 1 on
        alpha = coefs.c_star
        return ModalDecomposition(0.0, 0.0, m0 - alpha, 0.0, alpha, ell0)
    if disc <= 0:
        raise UnsupportedDecomposition(f"repeated or complex roots (discriminant {disc!r})")
    if coefs.singular:
        raise UnsupportedDecomposition("F(p) = 0: the recursion has no fixed point")

    root = math.sqrt(disc)
    r1 = 0.5 * (tau + root)
    r2 = delta / r1 if r1 != 0 else 0.5 * (tau - root)
    alpha = coefs.c_star / (1.0 - tau + delta)
    # b1 + b2 = m0 - alpha ; b1 r1 + b2 r2 = m1 - alpha
    u0, u1 = m0 - alpha, m1 - alpha
    b1 = (u1 - r2 * u0) / (r1 - r2)
    b2 = u0 - b1
    return ModalDecomposition(r1, r2, b1, b2, alpha, ell0)


def escape_ell(series: MultiplierSeries) -> int | None:
    """First horizon at which the series exceeds 1e6 times its first nonzero size."""
    vals = np.abs(series.values)
    nz = np.nonzero(vals > 0)[0]
    if not nz.size:
        return None
    hit = np.nonzero(vals > DIVERGENCE_FACTOR * vals[nz[0]])[0]
    return int(hit[0]) + 1 if hit.size else None


def _fmt(value: float) -> str:
    return f"{value:.17g}"


def series_csv(series: MultiplierSeries) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["ell", "m", "regime_context"])
    for ell, m in zip(series.ells, series.values):
        writer.writerow([int(ell), _fmt(float(m)), series.context.value])
    return buf.getvalue()


def series_summary(series: MultiplierSeries, params: ModelParams) -> dict:
    coefs = ar2_coefficients(params, series.p)
    summary = {
        "regime_context": series.context.value,
        "p": series.p,
        "d": series.d,
        "ell_bar": series.ell_bar,
        "ell_plus": series.ell_plus,
        "escape_ell": escape_ell(series),
        "limit": _limit_json(series.limit),
        "tau_star": coefs.tau_star,
        "delta_star": coefs.delta_star,
        "c_star": coefs.c_star,
        "r1": None,
        "r2": None,
        "b1": None,
        "b2": None,
    }
    if series.context is not Context.PN:
        try:
            modes = ar2_decompose(series, params)
        except (UnsupportedDecomposition, ValueError) as exc:
            summary["decomposition_error"] = str(exc)
        else:
            summary.update(r1=modes.r1, r2=modes.r2, b1=modes.b1, b2=modes.b2, alpha_star=modes.alpha_star)
    return summary


def _limit_json(limit) -> dict | None:
    if isinstance(limit, Converged):
        return {"converged": True, "value": limit.value}
    if isinstance(limit, Divergent):
        return {"converged": False}
    return None


def summary_json(summary: dict) -> str:
    return json.dumps(summary, indent=2, sort_keys=True) + "\n"
