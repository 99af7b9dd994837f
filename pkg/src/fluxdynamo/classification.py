"""Fast / slow / marginal / decaying labels from the diffusionless limit of gamma(eta).

Decision rule, with ``limit`` the intercept of a least-squares line through
the smallest-eta half of the samples:

* marginal: every |gamma| <= tol
* fast:     limit > tol
* decaying: limit < -tol
* slow:     |limit| <= tol and some sampled gamma > tol
* decaying: |limit| <= tol and no sampled gamma > tol (decay that fades as eta -> 0)

Complex samples are classified on their real part and annotated
``oscillatory``. Marginal here means gamma = 0; a vanishing energy integral is
a separate notion handled in :mod:`fluxdynamo.induction`.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable

import numpy as np
from scipy import stats

DEFAULT_TOL = 1e-9


class Label(str, enum.Enum):
    FAST = "fast"
    SLOW = "slow"
    MARGINAL = "marginal"
    DECAYING = "decaying"


@dataclass(frozen=True)
class GrowthCurve:
    """Samples (eta, gamma) with eta strictly decreasing toward zero."""

    samples: tuple[tuple[float, complex], ...]
    provenance: str = ""

    def __post_init__(self):
        samples = tuple((float(e), g) for e, g in self.samples)
        if len(samples) < 3:
            raise ValueError("a growth curve needs at least 3 samples")
        etas = np.array([e for e, _ in samples])
        if np.any(etas <= 0):
            raise ValueError("all eta samples must be positive")
        if np.any(np.diff(etas) >= 0):
            raise ValueError("eta samples must be strictly decreasing")
        object.__setattr__(self, "samples", samples)

    @classmethod
    def from_function(cls, fn: Callable[[float], complex], etas: Iterable[float], provenance: str = "") -> "GrowthCurve":
        etas = sorted({float(e) for e in etas}, reverse=True)
        return cls(tuple((e, fn(e)) for e in etas), provenance)

    @property
    def eta(self) -> np.ndarray:
        return np.array([e for e, _ in self.samples])

    @property
    def gamma(self) -> np.ndarray:
        return np.array([g for _, g in self.samples])


@dataclass(frozen=True)
class DynamoClass:
    label: Label
    limit: float
    confidence_interval: tuple[float, float]
    annotations: tuple[str, ...] = field(default=())

    @property
    def oscillatory(self) -> bool:
        return "oscillatory" in self.annotations


def diffusionless_limit(eta: np.ndarray, gamma: np.ndarray) -> tuple[float, tuple[float, float]]:
    """Intercept at eta = 0 and its 95% interval from the smallest-eta half."""
    m = max(2, math.ceil(len(eta) / 2))
    order = np.argsort(eta)[:m]
    x, y = eta[order], gamma[order]
    if np.ptp(y) == 0:
        return float(y[0]), (float(y[0]), float(y[0]))
    # a nearly flat curve can underflow the spread of y; only the unused r value divides by it
    with np.errstate(divide="ignore", invalid="ignore"):
        fit = stats.linregress(x, y)
    limit = float(fit.intercept)
    dof = m - 2
    if dof < 1 or not np.isfinite(fit.intercept_stderr):
        return limit, (limit, limit)
    half = float(stats.t.ppf(0.975, dof) * fit.intercept_stderr)
    return limit, (limit - half, limit + half)


def classify(curve: GrowthCurve, tol: float = DEFAULT_TOL) -> DynamoClass:
    if not tol > 0:
        raise ValueError("tolerance must be positive")
    raw = curve.gamma
    annotations = []
    if np.iscomplexobj(raw) and np.any(np.imag(raw) != 0):
        annotations.append("oscillatory")
    gamma = np.real(raw).astype(float)
    if not np.all(np.isfinite(gamma)):
        raise ValueError("growth curve contains non-finite gamma")
    limit, ci = diffusionless_limit(curve.eta, gamma)

    if np.all(np.abs(gamma) <= tol):
        label = Label.MARGINAL
    elif limit > tol:
        label = Label.FAST
    elif limit < -tol:
        label = Label.DECAYING
    elif np.any(gamma > tol):
        label = Label.SLOW
    else:
        label = Label.DECAYING
        annotations.append("decay vanishes with eta")
    return DynamoClass(label=label, limit=limit, confidence_interval=ci, annotations=tuple(annotations))


def default_eta_ladder(eta_max: float = 1e-1, eta_min: float = 1e-6, count: int = 11) -> np.ndarray:
    """Log-spaced diffusivities, largest first."""
    return np.logspace(math.log10(eta_max), math.log10(eta_min), count)
