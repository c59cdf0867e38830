"""Parameters, regime reduced forms and analytic thresholds.

The model is the three-equation New Keynesian system with behavioural
discounting,

    x_t  = m_xx E_t x_{t+1} - sigma (i_t - m_xpi E_t pi_{t+1}) - d_t
    pi_t = lambda x_t + m_pipi beta E_t pi_{t+1} (+ q_g g_t)
    i_t  = max(psi pi_t, -mu)

where q_g = kappa eta (1 - c_bar) loads government spending into the
Phillips curve.  In the low state of the shock chain expectations are
E_t X_{t+1} = p X_{t+1}, so each regime collapses to an affine law
X_t = M (p X_{t+1}) + f_d d + f_const + f_g g on the state X = [x, pi].
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import asdict, dataclass, field, fields
from functools import lru_cache
from typing import Any, Mapping, NamedTuple

import numpy as np

from .errors import NoBifurcation, ParameterError

E1 = np.array([1.0, 0.0])
E2 = np.array([0.0, 1.0])
V2 = E2  # inflation selector
for _v in (E1, E2):
    _v.setflags(write=False)

# Reference calibration; mu, kappa, eta,
# c_bar and d_max take their defaults.
BASELINE = {
    "sigma": 1.5,
    "beta": 0.99,
    "psi": 1.183,
    "lambda": 0.1,
    "m_xx": 1.0,
    "m_xpi": 1.0,
    "m_pipi": 0.74,
}

REQUIRED_KEYS = ("sigma", "beta", "psi", "lambda", "m_xx", "m_xpi", "m_pipi")
OPTIONAL_KEYS = ("mu", "kappa", "eta", "c_bar", "d_max")


class Regime(str, enum.Enum):
    NORMAL = "normal"
    ELB = "elb"


@dataclass(frozen=True)
class ModelParams:
    """Structural, behavioural and fiscal parameters.

    ``lam`` is the Phillips-curve slope (serialized as ``lambda``).  Fields
    left as ``None`` are resolved on construction: ``mu = 1/beta - 1``,
    ``kappa = lam`` and ``d_max = 2 * d_bar0``.
    """

    sigma: float
    beta: float
    psi: float
    lam: float
    m_xx: float
    m_xpi: float
    m_pipi: float
    mu: float | None = None
    kappa: float | None = None
    eta: float = 1.0
    c_bar: float = 0.8
    d_max: float | None = None

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if value is None:
                continue
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise ParameterError(_json_name(f.name), f"expected a number, got {value!r}")
            if not math.isfinite(value):
                raise ParameterError(_json_name(f.name), f"must be finite, got {value!r}")
            object.__setattr__(self, f.name, float(value))

        if self.mu is None and 0 < self.beta < 1:
            object.__setattr__(self, "mu", 1.0 / self.beta - 1.0)
        if self.kappa is None:
            object.__setattr__(self, "kappa", self.lam)
        self.check()
        if self.d_max is None:
            dmax = 2.0 * d_bar0(self)
            object.__setattr__(self, "d_max", dmax if dmax > 0 else 1.0)
        if not self.d_max > 0:
            raise ParameterError("d_max", f"must be > 0, got {self.d_max!r}")

    def check(self) -> None:
        """Raise ParameterError naming the first field outside its range."""
        positive = ("sigma", "psi", "lam", "kappa", "eta")
        for name in positive:
            if not getattr(self, name) > 0:
                raise ParameterError(_json_name(name), f"must be > 0, got {getattr(self, name)!r}")
        if not 0 < self.beta < 1:
            raise ParameterError("beta", f"must lie in (0, 1), got {self.beta!r}")
        if not 0 < self.c_bar < 1:
            raise ParameterError("c_bar", f"must lie in (0, 1), got {self.c_bar!r}")
        for name in ("m_xx", "m_xpi", "m_pipi"):
            if not 0 < getattr(self, name) <= 1:
                raise ParameterError(name, f"must lie in (0, 1], got {getattr(self, name)!r}")
        if self.mu is None or not self.mu >= 0:
            raise ParameterError("mu", f"must be >= 0, got {self.mu!r}")

    @property
    def q_g(self) -> float:
        """Spending loading kappa * eta * (1 - c_bar)."""
        return self.kappa * self.eta * (1.0 - self.c_bar)

    def replace(self, **changes) -> "ModelParams":
        data = {f.name: getattr(self, f.name) for f in fields(self)}
        if "lambda" in changes:
            changes["lam"] = changes.pop("lambda")
        data.update(changes)
        return ModelParams(**data)

    def to_dict(self) -> dict[str, float]:
        """Flat record keyed by the serialized field names."""
        return {_json_name(k): v for k, v in asdict(self).items()}

    @classmethod
    def from_dict(cls, record: Mapping[str, Any]) -> "ModelParams":
        """Build from a flat calibration record.

        Unknown keys and missing required keys raise ParameterError.
        """
        unknown = sorted(set(record) - set(REQUIRED_KEYS) - set(OPTIONAL_KEYS))
        if unknown:
            raise ParameterError(unknown[0], "unknown calibration key")
        for key in REQUIRED_KEYS:
            if key not in record:
                raise ParameterError(key, "missing required calibration key")
        kwargs = {("lam" if k == "lambda" else k): v for k, v in record.items()}
        return cls(**kwargs)

    @classmethod
    def from_json(cls, text: str) -> "ModelParams":
        record = json.loads(text)
        if not isinstance(record, dict):
            raise ParameterError("<root>", "calibration must be a JSON object")
        return cls.from_dict(record)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def _json_name(name: str) -> str:
    return "lambda" if name == "lam" else name


def baseline_params(**overrides) -> ModelParams:
    """The reference calibration, optionally with overrides."""
    record = dict(BASELINE)
    record.update(overrides)
    return ModelParams.from_dict(record)


@dataclass(frozen=True)
class ShockSpec:
    d: float
    p: float
    ell: int

    def __post_init__(self):
        if not (math.isfinite(self.d) and self.d >= 0):
            raise ParameterError("d", f"must be finite and >= 0, got {self.d!r}")
        if not (math.isfinite(self.p) and 0 <= self.p < 1):
            raise ParameterError("p", f"must lie in [0, 1), got {self.p!r}")
        if isinstance(self.ell, bool) or int(self.ell) != self.ell or self.ell < 1:
            raise ParameterError("ell", f"must be an integer >= 1, got {self.ell!r}")
        object.__setattr__(self, "ell", int(self.ell))

    def check_against(self, params: ModelParams) -> None:
        if self.d > params.d_max:
            raise ParameterError("d", f"{self.d!r} exceeds d_max={params.d_max!r}")


class Eigenvalues(NamedTuple):
    """Eigenvalues of a 2x2 matrix, largest real part first.

    When ``is_real`` is false the pair is complex conjugate.
    """

    first: complex | float
    second: complex | float
    is_real: bool


@dataclass(frozen=True)
class ReducedForm:
    """X_t = m @ E_t X_{t+1} + f_d * d + f_const + f_g * g for one regime."""

    regime: Regime
    m: np.ndarray
    f_d: np.ndarray
    f_const: np.ndarray
    f_g: np.ndarray

    def apply(self, expected: np.ndarray, d: float, g: float = 0.0) -> np.ndarray:
        return self.m @ expected + self.f_d * d + self.f_const + self.f_g * g


@dataclass(frozen=True)
class AssumptionReport:
    a1_ok: bool
    a2_ok: bool
    eig_A: Eigenvalues
    rho_A: float
    messages: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.a1_ok and self.a2_ok

    def to_dict(self) -> dict[str, Any]:
        eig = self.eig_A
        if eig.is_real:
            eigs: Any = [float(eig.first), float(eig.second)]
        else:
            eigs = {"complex": True, "real": eig.first.real, "imag": abs(eig.first.imag)}
        return {
            "a1_ok": self.a1_ok,
            "a2_ok": self.a2_ok,
            "eig_A": eigs,
            "rho_A": self.rho_A,
            "messages": list(self.messages),
        }


def a1_bound(params: ModelParams) -> float:
    """Upper bound on psi for real eigenvalues of A."""
    return params.m_xpi / (params.beta * params.m_pipi)


def a2_bound(params: ModelParams) -> float:
    """Lower bound on psi (the Taylor principle in this model)."""
    return params.m_xpi + (1 - params.m_xx) * (params.beta * params.m_pipi - 1) / (params.lam * params.sigma)


def validate_params(params: ModelParams) -> AssumptionReport:
    params.check()
    upper, lower = a1_bound(params), a2_bound(params)
    a1 = params.psi < upper
    a2 = params.psi > lower
    messages = []
    if a1:
        messages.append(f"Assumption 1 holds: psi={params.psi:.6g} < {upper:.6g}")
    else:
        messages.append(f"Assumption 1 fails: psi={params.psi:.6g} >= {upper:.6g} (oscillating PN dynamics)")
    if a2:
        messages.append(f"Assumption 2 holds: psi={params.psi:.6g} > {lower:.6g}")
    else:
        messages.append(f"Assumption 2 fails: psi={params.psi:.6g} <= {lower:.6g} (Taylor principle violated)")
    a = regime_system(params, Regime.NORMAL).m
    return AssumptionReport(a1, a2, eigenvalues_2x2(a), spectral_radius_2x2(a), messages)


@lru_cache(maxsize=256)
def regime_system(params: ModelParams, regime: Regime) -> ReducedForm:
    s, b, psi, lam = params.sigma, params.beta, params.psi, params.lam
    mxx, mxp, mpp, mu, qg = params.m_xx, params.m_xpi, params.m_pipi, params.mu, params.q_g
    if regime is Regime.NORMAL:
        denom = 1.0 + lam * s * psi
        m = np.array([[mxx, s * (mxp - psi * b * mpp)], [lam * mxx, lam * s * mxp + b * mpp]]) / denom
        f_d = np.array([-1.0, -lam]) / denom
        f_const = np.zeros(2)
        f_g = qg * np.array([-s * psi, 1.0]) / denom
    elif regime is Regime.ELB:
        m = np.array([[mxx, s * mxp], [lam * mxx, lam * s * mxp + b * mpp]])
        f_d = np.array([-1.0, -lam])
        f_const = np.array([s * mu, lam * s * mu])
        f_g = np.array([0.0, qg])
    else:
        raise ValueError(f"unknown regime {regime!r}")
    for arr in (m, f_d, f_const, f_g):
        arr.setflags(write=False)
    return ReducedForm(regime, m, f_d, f_const, f_g)


def f_of_p(params: ModelParams, p: float) -> float:
    """F(p) = (1 - p m_xx)(1 - p beta m_pipi) - p lambda sigma m_xpi = det(I - p A*)."""
    return (1 - p * params.m_xx) * (1 - p * params.beta * params.m_pipi) - p * params.lam * params.sigma * params.m_xpi


def p_bar(params: ModelParams) -> float:
    """Smaller root of F, the persistence above which ELB dynamics explode."""
    a = params.m_xx * params.beta * params.m_pipi
    b = -(params.m_xx + params.beta * params.m_pipi + params.lam * params.sigma * params.m_xpi)
    disc = b * b - 4.0 * a
    if disc < 0:
        raise NoBifurcation(f"F(p) has no real root (discriminant {disc!r})")
    # b < 0, so -b + sqrt(disc) has no cancellation; c/q is the smaller root.
    q = 0.5 * (-b + math.sqrt(disc))
    root = 1.0 / q
    if not 0 < root < 1:
        raise NoBifurcation(f"smaller root of F is {root!r}, outside (0, 1)")
    return root


def d_bar(params: ModelParams, p: float) -> float:
    """Shock size above which the PN solution fails as the horizon grows."""
    bracket = (1 - p * params.m_xx) * (1 - p * params.beta * params.m_pipi) + params.lam * params.sigma * (
        params.psi - p * params.m_xpi
    )
    return params.mu / (params.lam * params.psi) * bracket


def d_bar0(params: ModelParams) -> float:
    """Shock size at which the ELB binds even in the last low-state period."""
    return params.mu / (params.lam * params.psi) * (1 + params.lam * params.sigma * params.psi)


def elb_inflation_threshold(params: ModelParams) -> float:
    """Inflation at or below which the lower bound binds, -mu/psi."""
    return -params.mu / params.psi


def eigenvalues_2x2(m) -> Eigenvalues:
    (a, b), (c, d) = np.asarray(m, dtype=float).tolist()
    tr = a + d
    det = a * d - b * c
    # (a - d)^2 + 4bc avoids cancellation in tr^2 - 4 det for near-repeated roots
    disc = (a - d) ** 2 + 4.0 * b * c
    if disc < 0:
        half = 0.5 * math.sqrt(-disc)
        return Eigenvalues(complex(0.5 * tr, half), complex(0.5 * tr, -half), False)
    root = math.sqrt(disc)
    big = 0.5 * (tr + math.copysign(root, tr))
    small = det / big if big != 0 else 0.5 * (tr - math.copysign(root, tr))
    hi, lo = (big, small) if big >= small else (small, big)
    return Eigenvalues(hi, lo, True)


def spectral_radius_2x2(m) -> float:
    eig = eigenvalues_2x2(m)
    return max(abs(eig.first), abs(eig.second))
