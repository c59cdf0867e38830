"""Region maps over the (p, d) plane and the duration threshold ell_bar."""

from __future__ import annotations

import csv
import enum
import io
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import partial
from typing import Sequence

import numpy as np

from .errors import ClassifierMismatch, NoBifurcation
from .model import ModelParams, Regime, d_bar, d_bar0, p_bar, regime_system
from .paths import PathKind, boundary_tol, msv_candidates

BOUNDARY_TOL = 1e-9
DEFAULT_ELL_CAP = 512


class Stability(str, enum.Enum):
    STABLE = "Stable"
    UNSTABLE = "Unstable"


@dataclass(frozen=True)
class RegionLabel:
    msv_count: int | None = None
    truncated_kind: PathKind | None = None
    stability: Stability | None = None

    @property
    def name(self) -> str:
        """Visible region name; PN is one region whatever the stability."""
        if self.truncated_kind is None:
            return str(self.msv_count)
        if self.truncated_kind is PathKind.PN:
            return "PN"
        return f"{self.truncated_kind.value}/{self.stability.value}"


@dataclass(frozen=True)
class RegionGrid:
    """Labels for every (p, d) pair; ``labels[i][j]`` is (p_axis[i], d_axis[j])."""

    p_axis: tuple[float, ...]
    d_axis: tuple[float, ...]
    labels: tuple[tuple[RegionLabel, ...], ...]
    mode: str

    def names(self) -> np.ndarray:
        return np.array([[lab.name for lab in row] for row in self.labels], dtype=object)


def _p_bar_or_none(params: ModelParams) -> float | None:
    try:
        return p_bar(params)
    except NoBifurcation:
        return None


def _stability(p: float, pb: float | None) -> Stability:
    return Stability.STABLE if pb is None or p < pb else Stability.UNSTABLE


def threshold_count(params: ModelParams, d: float, p: float) -> int | None:
    """MSV count implied by the p_bar / d_bar(p) rules; None on a boundary."""
    pb = _p_bar_or_none(params)
    if pb is None:
        return 1
    if abs(p - pb) <= BOUNDARY_TOL:
        return None
    if p < pb:
        return 1
    db = d_bar(params, p)
    if abs(d - db) <= BOUNDARY_TOL:
        return None
    return 2 if d < db else 0


def classify_msv(params: ModelParams, d: float, p: float) -> RegionLabel:
    """Equilibrium count under the non-truncated chain, cross-checked two ways."""
    count = msv_candidates(params, d, p).count
    expected = threshold_count(params, d, p)
    if expected is not None and expected != count:
        raise ClassifierMismatch(f"candidate count {count} but threshold rules give {expected}", p, d)
    return RegionLabel(msv_count=count, stability=_stability(p, _p_bar_or_none(params)))


def classify_truncated(params: ModelParams, d: float, p: float) -> RegionLabel:
    """Solution type under the truncated chain; boundaries go to the ELB side."""
    if d >= d_bar0(params):
        kind = PathKind.PL
    elif d <= d_bar(params, p):
        kind = PathKind.PN
    else:
        kind = PathKind.MIXED
    return RegionLabel(truncated_kind=kind, stability=_stability(p, _p_bar_or_none(params)))


_CLASSIFIERS = {"msv": classify_msv, "truncated": classify_truncated}


def _row(params: ModelParams, mode: str, d_axis: Sequence[float], p: float) -> tuple[RegionLabel, ...]:
    classify = _CLASSIFIERS[mode]
    return tuple(classify(params, d, p) for d in d_axis)


def default_axes(params: ModelParams, n_p: int = 200, n_d: int = 200) -> tuple[np.ndarray, np.ndarray]:
    return np.linspace(0.0, 0.99, n_p), np.linspace(0.0, params.d_max, n_d)


def region_map(
    params: ModelParams,
    p_axis: Sequence[float],
    d_axis: Sequence[float],
    mode: str = "msv",
    workers: int | None = None,
) -> RegionGrid:
    """Label every grid cell.  Rows (fixed p) may be farmed out to processes;
    assembly order is always the axis order."""
    if mode not in _CLASSIFIERS:
        raise ValueError(f"mode must be one of {sorted(_CLASSIFIERS)}, got {mode!r}")
    p_axis = tuple(float(v) for v in p_axis)
    d_axis = tuple(float(v) for v in d_axis)
    for name, axis in (("p_axis", p_axis), ("d_axis", d_axis)):
        if any(b < a for a, b in zip(axis, axis[1:])):
            raise ValueError(f"{name} must be sorted")
    if p_axis and not (p_axis[0] >= 0 and p_axis[-1] < 1):
        raise ValueError("p_axis must lie in [0, 1)")
    if d_axis and not (d_axis[0] >= 0 and d_axis[-1] <= params.d_max):
        raise ValueError("d_axis must lie in [0, d_max]")

    row = partial(_row, params, mode, d_axis)
    if workers and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            labels = tuple(pool.map(row, p_axis))
    else:
        labels = tuple(row(p) for p in p_axis)
    return RegionGrid(p_axis, d_axis, labels, mode)


def ell_bar(params: ModelParams, d: float, p: float, ell_cap: int = DEFAULT_ELL_CAP) -> int | None:
    """Smallest horizon at which the ELB binds on impact.

    Scans the pure-normal impact inflation until it reaches -mu/psi.  Returns
    1 when the shock binds even in the terminal period and None when the
    threshold is not reached by ``ell_cap`` (always the case for
    d <= d_bar(p)).
    """
    if d >= d_bar0(params):
        return 1
    if d <= d_bar(params, p):
        return None
    rf = regime_system(params, Regime.NORMAL)
    pm = p * rf.m
    force = rf.f_d * d
    tol = boundary_tol(params)
    x = np.zeros(2)
    for ell in range(1, ell_cap + 1):
        x = pm @ x + force
        if params.psi * x[1] + params.mu <= tol:
            return ell
    return None


def _fmt(value: float) -> str:
    return f"{value:.17g}"


def region_csv(grid: RegionGrid) -> str:
    """CSV ``p,d,msv_count,kind,stability``, d-major (d outer, p inner)."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["p", "d", "msv_count", "kind", "stability"])
    for j, d in enumerate(grid.d_axis):
        for i, p in enumerate(grid.p_axis):
            lab = grid.labels[i][j]
            writer.writerow(
                [
                    _fmt(p),
                    _fmt(d),
                    "" if lab.msv_count is None else lab.msv_count,
                    "" if lab.truncated_kind is None else lab.truncated_kind.value,
                    "" if lab.stability is None else lab.stability.value,
                ]
            )
    return buf.getvalue()


def threshold_curves(params: ModelParams, p_axis: Sequence[float]) -> dict:
    """d_bar(p) sampled on ``p_axis`` alongside p_bar and d_bar0."""
    pb = _p_bar_or_none(params)
    return {
        "p": [float(p) for p in p_axis],
        "d_bar": [d_bar(params, float(p)) for p in p_axis],
        "p_bar": pb,
        "d_bar0": d_bar0(params),
    }


def threshold_json(params: ModelParams, p_axis: Sequence[float], extra: dict | None = None) -> str:
    payload = threshold_curves(params, p_axis)
    if extra:
        payload.update(extra)
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"
