"""Twisted flux-tube metric dr^2 + r^2 dtheta^2 + K^2 ds^2 and its curvature.

Coordinates are ordered (r, theta, s). ``K = 1 - kappa r cos(theta)``.

Two independent routes to the Riemann components are provided: the closed
expressions quoted for this metric (several mutually inconsistent forms,
all evaluated and tagged) and a finite-difference oracle built from the metric
alone. Agreement between them is measured, never assumed.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import SingularAxisError
from .geometry import CurveProfile


class CurvatureSource(str, enum.Enum):
    QUOTED_CHAIN_1 = "quoted_chain_1"
    QUOTED_CHAIN_2 = "quoted_chain_2"
    QUOTED_CHAIN_3 = "quoted_chain_3"
    THIN_TUBE = "thin_tube_limit"
    ORACLE = "oracle"


@dataclass(frozen=True)
class TubeCoordinates:
    r: float
    theta: float
    theta_R: float
    s: float

    def __post_init__(self):
        if self.r < 0:
            raise ValueError("r must be non-negative")

    @classmethod
    def from_untwisted(cls, r, theta_R, s, profile: CurveProfile) -> "TubeCoordinates":
        """theta = theta_R - total torsion accumulated up to s."""
        return cls(r=r, theta=theta_R - profile.total_torsion(s), theta_R=theta_R, s=s)


def metric_factor(r, theta, kappa):
    """K(r, theta) = 1 - kappa r cos(theta)."""
    return 1.0 - kappa * r * np.cos(theta)


def metric_factor_sq_dr(r, theta, kappa):
    """A = d/dr K^2 = -2 kappa cos(theta) K."""
    return -2.0 * kappa * np.cos(theta) * metric_factor(r, theta, kappa)


def _metric_factor_sq_drr(r, theta, kappa):
    return 2.0 * kappa**2 * np.cos(theta) ** 2 + 0.0 * r


@dataclass(frozen=True)
class TubeMetric:
    kappa: float
    a: float = 1.0

    def K(self, r, theta):
        return metric_factor(r, theta, self.kappa)

    def A(self, r, theta):
        return metric_factor_sq_dr(r, theta, self.kappa)

    def components(self, r, theta):
        """Diagonal (g_rr, g_thetatheta, g_ss)."""
        return 1.0, r * r, self.K(r, theta) ** 2

    def matrix(self, r, theta) -> np.ndarray:
        return np.diag(self.components(r, theta))

    @property
    def max_regular_radius(self) -> float:
        return np.inf if self.kappa == 0 else 1.0 / abs(self.kappa)


@dataclass(frozen=True)
class CurvatureComponents:
    R_rsrs: float
    R_thetas_thetas: float | None
    source: CurvatureSource


def riemann_components_quoted(r, theta, kappa) -> list[CurvatureComponents]:
    """Evaluate every quoted expression for R_rsrs and R_thetas_thetas.

    Chain 1 and 2 carry both components; chain 3 has no R_thetas_thetas form
    and reports ``None`` there.
    """
    if not r > 0:
        raise SingularAxisError("quoted curvature chains contain 1/r^2; r must be > 0")
    K = metric_factor(r, theta, kappa)
    A = metric_factor_sq_dr(r, theta, kappa)
    dA = _metric_factor_sq_drr(r, theta, kappa)
    chain1 = -(1.0 / (4.0 * K**2)) * (2.0 * K**2 * dA - A**2)
    chain2 = -(K**4) / (2.0 * r**2)
    chain3 = -0.5 * r**2 * kappa**4 * np.cos(theta) ** 2
    return [
        CurvatureComponents(float(chain1), float(-(r / 2.0) * A), CurvatureSource.QUOTED_CHAIN_1),
        CurvatureComponents(float(chain2), float(-(K**2)), CurvatureSource.QUOTED_CHAIN_2),
        CurvatureComponents(float(chain3), None, CurvatureSource.QUOTED_CHAIN_3),
    ]


def riemann_thin_tube(r) -> float:
    """Thin-tube value -1/r^2; singular on the axis."""
    if r == 0:
        raise SingularAxisError("thin-tube curvature diverges on the tube axis r = 0")
    if r < 0:
        raise ValueError("r must be positive")
    return -1.0 / r**2


# five-point central stencil, 4th order
_OFFSETS = (-2, -1, 1, 2)
_WEIGHTS = np.array([1.0, -8.0, 8.0, -1.0]) / 12.0


def _central_gradient(f: Callable[[np.ndarray], np.ndarray], x: np.ndarray, h: float) -> np.ndarray:
    """out[c, ...] = d f / d x^c."""
    rows = []
    for c in range(3):
        acc = 0.0
        for off, w in zip(_OFFSETS, _WEIGHTS):
            y = x.copy()
            y[c] += off * h
            acc = acc + w * f(y)
        rows.append(acc / h)
    return np.array(rows)


def _tube_metric_matrix(kappa: float) -> Callable[[np.ndarray], np.ndarray]:
    def g(x):
        r, theta, _ = x
        return np.diag([1.0, r * r, metric_factor(r, theta, kappa) ** 2])

    return g


def christoffel_fd(metric: Callable[[np.ndarray], np.ndarray], x, h: float) -> np.ndarray:
    """Gamma[a, b, c] = Gamma^a_{bc} from finite-difference metric derivatives."""
    x = np.asarray(x, dtype=float)
    g_inv = np.linalg.inv(metric(x))
    dg = _central_gradient(metric, x, h)  # dg[c, a, b] = d_c g_ab
    # lowered[d, b, c] = d_b g_dc + d_c g_db - d_d g_bc
    lowered = np.einsum("bdc->dbc", dg) + np.einsum("cdb->dbc", dg) - dg
    return 0.5 * np.einsum("ad,dbc->abc", g_inv, lowered)


def riemann_tensor_fd(metric: Callable[[np.ndarray], np.ndarray], x, h: float) -> np.ndarray:
    """Fully covariant R_abcd from the connection.

    R^a_{bcd} = d_c Gamma^a_{db} - d_d Gamma^a_{cb}
              + Gamma^a_{ce} Gamma^e_{db} - Gamma^a_{de} Gamma^e_{cb}
    """
    x = np.asarray(x, dtype=float)
    gamma = christoffel_fd(metric, x, h)
    d_gamma = _central_gradient(lambda y: christoffel_fd(metric, y, h), x, h)
    mixed = (
        np.einsum("cadb->abcd", d_gamma)
        - np.einsum("dacb->abcd", d_gamma)
        + np.einsum("ace,edb->abcd", gamma, gamma)
        - np.einsum("ade,ecb->abcd", gamma, gamma)
    )
    return np.einsum("ae,ebcd->abcd", metric(x), mixed)


def symmetry_defect(R: np.ndarray) -> dict[str, float]:
    """Max violation of the algebraic Riemann symmetries."""
    return {
        "antisym_first_pair": float(np.max(np.abs(R + R.transpose(1, 0, 2, 3)))),
        "antisym_second_pair": float(np.max(np.abs(R + R.transpose(0, 1, 3, 2)))),
        "pair_exchange": float(np.max(np.abs(R - R.transpose(2, 3, 0, 1)))),
    }


def default_oracle_step(r: float) -> float:
    return 3e-3 * r


def tube_riemann_tensor(kappa, r, theta, h=None, s=0.0) -> np.ndarray:
    """Finite-difference Riemann tensor of the tube metric at (r, theta, s)."""
    if h is None:
        h = default_oracle_step(r)
    if not h > 0:
        raise ValueError("finite-difference step must be positive")
    # nested five-point stencils reach 4h from the evaluation point
    if not r > 4.0 * h:
        raise ValueError(f"step h={h!r} too large for r={r!r}; need r > 4h")
    return riemann_tensor_fd(_tube_metric_matrix(kappa), np.array([r, theta, s], dtype=float), h)


R_IDX, THETA_IDX, S_IDX = 0, 1, 2


def riemann_oracle(kappa, r, theta, h=None) -> CurvatureComponents:
    R = tube_riemann_tensor(kappa, r, theta, h)
    return CurvatureComponents(
        R_rsrs=float(R[R_IDX, S_IDX, R_IDX, S_IDX]),
        R_thetas_thetas=float(R[THETA_IDX, S_IDX, THETA_IDX, S_IDX]),
        source=CurvatureSource.ORACLE,
    )


@dataclass(frozen=True)
class BasisTransform:
    """Rotation between the tube basis (e_r, e_theta) and the Frenet normal plane (n, b).

    ``matrix`` maps (n, b) coefficients to (e_r, e_theta); rows are
    e_r = cos n + sin b and e_theta = -sin n + cos b.
    """

    theta: float
    matrix: np.ndarray

    @property
    def inverse(self) -> np.ndarray:
        return self.matrix.T

    def to_frenet(self, e_r_comp, e_theta_comp):
        """(v_n, v_b) of a vector with tube components (v_r, v_theta)."""
        return tuple(self.inverse @ np.array([e_r_comp, e_theta_comp], dtype=float))

    def to_tube(self, n_comp, b_comp):
        return tuple(self.matrix @ np.array([n_comp, b_comp], dtype=float))


def basis_transform(theta) -> BasisTransform:
    c, s = np.cos(theta), np.sin(theta)
    return BasisTransform(theta=float(theta), matrix=np.array([[c, s], [-s, c]]))
