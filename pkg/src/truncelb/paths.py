"""Backward induction along the low state of a truncated two-state chain.

While the shock is alive, expectations are p times next period's low-state
value (the absorbing state is the zero steady state).  After at most ``ell``
periods the chain is forced back to zero, so the terminal expectation is
zero and every earlier period is pinned down by one regime-checked step.
"""

from __future__ import annotations

import csv
import enum
import io
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ContradictionError, InconclusiveError, MixedStructureError, ParameterError
from .model import ModelParams, Regime, ShockSpec, f_of_p, regime_system

DIVERGENCE_FACTOR = 1e6


def boundary_tol(params: ModelParams) -> float:
    """Width of the band around psi*pi = -mu that is resolved to the ELB."""
    return 1e-12 * max(1.0, abs(params.mu))


class PathKind(str, enum.Enum):
    PN = "PN"
    PL = "PL"
    MIXED = "Mixed"


@dataclass(frozen=True)
class PeriodState:
    x: float
    pi: float
    i: float
    regime: Regime

    @property
    def vector(self) -> np.ndarray:
        return np.array([self.x, self.pi])


STEADY_STATE = PeriodState(0.0, 0.0, 0.0, Regime.NORMAL)


@dataclass(frozen=True)
class PathSolution:
    """Hypothetical low-state path, k = 0 being the impact period.

    ``switch_k`` is the last ELB index of a Mixed path and None otherwise.
    """

    states: tuple[PeriodState, ...]
    shock: ShockSpec
    kind: PathKind
    switch_k: int | None = None

    @property
    def x(self) -> np.ndarray:
        return np.array([s.x for s in self.states])

    @property
    def pi(self) -> np.ndarray:
        return np.array([s.pi for s in self.states])

    @property
    def i(self) -> np.ndarray:
        return np.array([s.i for s in self.states])

    @property
    def impact(self) -> PeriodState:
        return self.states[0]


@dataclass(frozen=True)
class MsvReport:
    """Time-invariant candidates under the non-truncated chain.

    A candidate is None when I - pM is singular.
    """

    normal_candidate: tuple[float, float] | None
    elb_candidate: tuple[float, float] | None
    normal_valid: bool
    elb_valid: bool

    @property
    def count(self) -> int:
        return int(self.normal_valid) + int(self.elb_valid)


@dataclass(frozen=True)
class Converged:
    x: float
    pi: float
    ell: int


@dataclass(frozen=True)
class Diverging:
    growth_factor: float
    ell: int


def step_back(params: ModelParams, next_state, d: float, p: float, g: float = 0.0) -> PeriodState:
    """Resolve one period given the low-state continuation value.

    The Normal candidate is kept when psi*pi_N clears -mu by more than
    ``boundary_tol``; otherwise the ELB candidate is returned.
    """
    expected = p * np.asarray(next_state, dtype=float)
    tol = boundary_tol(params)
    normal = regime_system(params, Regime.NORMAL).apply(expected, d, g)
    if params.psi * normal[1] + params.mu > tol:
        return PeriodState(float(normal[0]), float(normal[1]), float(params.psi * normal[1]), Regime.NORMAL)

    elb = regime_system(params, Regime.ELB).apply(expected, d, g)
    # psi*pi_L + mu = (1 + lambda sigma psi)(psi*pi_N + mu), so the slack scales
    slack = (1.0 + params.lam * params.sigma * params.psi) * tol * 4.0 + 1e-15 * abs(params.psi * elb[1])
    if params.psi * elb[1] + params.mu > slack:
        raise ContradictionError(
            f"no regime verifies: psi*pi_N + mu = {params.psi * normal[1] + params.mu!r}, "
            f"psi*pi_L + mu = {params.psi * elb[1] + params.mu!r}"
        )
    return PeriodState(float(elb[0]), float(elb[1]), -params.mu, Regime.ELB)


def classify_regimes(regimes: Sequence[Regime]) -> tuple[PathKind, int | None]:
    """PN / PL / Mixed(k) from an impact-first regime sequence."""
    n = len(regimes)
    n_elb = 0
    while n_elb < n and regimes[n_elb] is Regime.ELB:
        n_elb += 1
    if any(r is Regime.ELB for r in regimes[n_elb:]):
        pattern = "".join("Z" if r is Regime.ELB else "N" for r in regimes)
        raise MixedStructureError(f"regime pattern {pattern} is not an ELB block followed by a Normal block")
    if n_elb == 0:
        return PathKind.PN, None
    if n_elb == n:
        return PathKind.PL, None
    return PathKind.MIXED, n_elb - 1


def solve_hypothetical_path(params: ModelParams, shock: ShockSpec, g: float = 0.0) -> PathSolution:
    """Path if the shock stays in its low state for all ``shock.ell`` periods."""
    shock.check_against(params)
    states: list[PeriodState] = []
    nxt = np.zeros(2)
    for _ in range(shock.ell):
        state = step_back(params, nxt, shock.d, shock.p, g)
        states.append(state)
        nxt = np.array([state.x, state.pi])
    states.reverse()
    kind, switch_k = classify_regimes([s.regime for s in states])
    return PathSolution(tuple(states), shock, kind, switch_k)


def propagate_regimes(
    params: ModelParams, d: float, p: float, regimes: Sequence[Regime], g: float = 0.0
) -> np.ndarray:
    """Backward induction under a prescribed regime sequence, no verification.

    Returns an (ell, 2) array of [x, pi] with row 0 the impact period.
    """
    ell = len(regimes)
    out = np.zeros((ell, 2))
    nxt = np.zeros(2)
    for k in range(ell - 1, -1, -1):
        nxt = regime_system(params, regimes[k]).apply(p * nxt, d, g)
        out[k] = nxt
    return out


def realize_path(path: PathSolution, exit_period: int, horizon: int | None = None) -> list[PeriodState]:
    """Realized states when the shock leaves the low state after ``exit_period`` periods.

    The prefix is the hypothetical path itself; later entries are the
    zero steady state up to ``horizon`` (default ``ell``).
    """
    ell = path.shock.ell
    if isinstance(exit_period, bool) or int(exit_period) != exit_period or not 1 <= exit_period <= ell:
        raise ParameterError("exit_period", f"must be an integer in [1, {ell}], got {exit_period!r}")
    horizon = ell if horizon is None else horizon
    if horizon < exit_period:
        raise ParameterError("horizon", f"must be >= exit_period={exit_period}, got {horizon!r}")
    return list(path.states[:exit_period]) + [STEADY_STATE] * (horizon - exit_period)


def _solve2(m: np.ndarray, rhs: np.ndarray) -> tuple[float, float] | None:
    det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
    if det == 0:
        return None
    return (
        float((m[1, 1] * rhs[0] - m[0, 1] * rhs[1]) / det),
        float((m[0, 0] * rhs[1] - m[1, 0] * rhs[0]) / det),
    )


def msv_candidates(params: ModelParams, d: float, p: float) -> MsvReport:
    """Constant allocations (I - pM)^{-1} force for each regime.

    The ELB candidate is returned for p above the bifurcation as well, where
    it is the analytic continuation of the geometric series.
    """
    eye = np.eye(2)
    nf = regime_system(params, Regime.NORMAL)
    ef = regime_system(params, Regime.ELB)
    normal = _solve2(eye - p * nf.m, nf.f_d * d + nf.f_const)
    # det(I - pA*) is exactly F(p); use the polynomial for the singular test
    elb = None if f_of_p(params, p) == 0 else _solve2(eye - p * ef.m, ef.f_d * d + ef.f_const)
    normal_valid = normal is not None and params.psi * normal[1] > -params.mu
    elb_valid = elb is not None and params.psi * elb[1] <= -params.mu
    return MsvReport(normal, elb, normal_valid, elb_valid)


def impact_sequence(params: ModelParams, d: float, p: float, n: int, g: float = 0.0) -> np.ndarray:
    """Impact [x, pi] for horizons 1..n (row ell-1 holds horizon ell).

    By index symmetry the impact at horizon ell is one backward step from the
    impact at horizon ell - 1, so the whole sequence costs n steps.
    """
    out = np.zeros((n, 2))
    nxt = np.zeros(2)
    for j in range(n):
        state = step_back(params, nxt, d, p, g)
        nxt = np.array([state.x, state.pi])
        out[j] = nxt
    return out


def limit_impact(
    params: ModelParams, d: float, p: float, tol: float = 1e-12, ell_cap: int = 100_000
) -> Converged | Diverging:
    """Follow the impact state as the horizon grows.

    Converged when two consecutive horizons differ by less than ``tol`` (max
    norm); Diverging once the impact exceeds 1e6 times its ell = 1 size, with
    the ratio of the last two increments as growth factor.
    """
    if not tol > 0:
        raise ValueError(f"tol must be > 0, got {tol!r}")
    if ell_cap < 2:
        raise ValueError(f"ell_cap must be >= 2, got {ell_cap!r}")
    first = step_back(params, np.zeros(2), d, p)
    prev = np.array([first.x, first.pi])
    scale = float(np.max(np.abs(prev)))
    prev_step = math.nan
    for ell in range(2, ell_cap + 1):
        state = step_back(params, prev, d, p)
        cur = np.array([state.x, state.pi])
        step = float(np.max(np.abs(cur - prev)))
        if step < tol:
            return Converged(float(cur[0]), float(cur[1]), ell)
        if scale > 0 and float(np.max(np.abs(cur))) > DIVERGENCE_FACTOR * scale:
            return Diverging(step / prev_step, ell)
        prev, prev_step = cur, step
    raise InconclusiveError(f"no convergence or divergence by ell={ell_cap} (last step {prev_step!r})")


def _fmt(value: float) -> str:
    return f"{value:.17g}"


def path_csv(states: Sequence[PeriodState]) -> str:
    """CSV text with header ``k,x,pi,i,regime`` and LF line endings."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["k", "x", "pi", "i", "regime"])
    for k, s in enumerate(states):
        writer.writerow([k, _fmt(s.x), _fmt(s.pi), _fmt(s.i), s.regime.value])
    return buf.getvalue()
