"""Flows on filaments and twisted tubes: stretching, incompressibility, vorticity, Beltrami fields."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import integrate

from .errors import SingularAxisError, SingularParameterError
from .tube_metric import metric_factor


@dataclass(frozen=True)
class FilamentFlow:
    """Velocity (v_s, v_n, v_b) in the Frenet frame, each a function of (s, t)."""

    v_s: Callable[[float, float], float]
    v_n: Callable[[float, float], float]
    v_b: Callable[[float, float], float]
    v_s_prime: Callable[[float, float], float]
    v0: float = 0.0

    def stretch_rate(self, kappa: float, s: float, t: float) -> float:
        return stretch_rate_filament(kappa, self.v_n(s, t), self.v_s_prime(s, t))

    def solenoidal_residual(self, kappa: float, s: float, t: float) -> float:
        return solenoidal_residual_filament(kappa, self.v_n(s, t), self.v_s_prime(s, t))


@dataclass(frozen=True)
class TubeFlow:
    """Axial plus poloidal flow in a tube; u_s/u_theta are the heliotron names."""

    v_s: float
    v_theta: Callable[[float, float, float], float]
    lambda_B: float = 0.0

    def __post_init__(self):
        if not np.isfinite(self.v_s) or not np.isfinite(self.lambda_B):
            raise ValueError("tube flow components must be finite")

    @property
    def u_s(self) -> float:
        return self.v_s

    @property
    def u_theta(self):
        return self.v_theta


@dataclass(frozen=True)
class StretchState:
    l0: float
    l: float
    gamma: float

    def __post_init__(self):
        if not (self.l0 > 0 and self.l > 0):
            raise ValueError("line elements must be positive")


@dataclass(frozen=True)
class Vorticity:
    omega_r: float
    omega_theta: float
    omega_s: float
    omega_0: float


def stretch_rate_filament(kappa, v_n, v_s_prime):
    """Line-stretching exponent -kappa v_n + dv_s/ds."""
    return -kappa * v_n + v_s_prime


def stretch_factor(gamma_history, t_span, l0) -> float:
    """l0 * exp(integral of gamma dt over t_span).

    ``gamma_history`` may be a callable of t or a constant.
    """
    if not l0 > 0:
        raise ValueError("initial line element must be positive")
    t0, t1 = (float(v) for v in t_span)
    if callable(gamma_history):
        def integrand(t):
            g = float(gamma_history(t))
            if not np.isfinite(g):
                raise ValueError(f"non-finite stretching rate at t={t!r}")
            return g

        exponent, _ = integrate.quad(integrand, t0, t1, epsabs=1e-14, epsrel=1e-13, limit=200)
    else:
        g = float(gamma_history)
        if not np.isfinite(g):
            raise ValueError("non-finite stretching rate")
        exponent = g * (t1 - t0)
    return l0 * float(np.exp(exponent))


def stretch_state(gamma_history, t_span, l0) -> StretchState:
    l = stretch_factor(gamma_history, t_span, l0)
    duration = t_span[1] - t_span[0]
    mean_gamma = np.log(l / l0) / duration if duration else 0.0
    return StretchState(l0=l0, l=l, gamma=float(mean_gamma))


def stretch_rate_tube(kappa, v_theta, theta, v_s_prime):
    """kappa v_theta sin(theta) + dv_s/ds, i.e. the filament rate with v_n = -v_theta sin(theta)."""
    return kappa * v_theta * np.sin(theta) + v_s_prime


def tube_to_filament_flow(v_theta, theta):
    """Frenet components (v_n, v_b) of a poloidal flow v_theta e_theta."""
    return -v_theta * np.sin(theta), v_theta * np.cos(theta)


def tube_stretch_exponent(v_theta, v0, tau0, a):
    """Exponent v_theta / (v0 tau0 a); the line element grows as l0 * exp(exponent)."""
    if v0 == 0 or tau0 == 0:
        raise SingularParameterError("tube stretch exponent needs nonzero v0 and tau0")
    if not a > 0:
        raise ValueError("tube radius must be positive")
    return v_theta / (v0 * tau0 * a)


def solenoidal_residual_filament(kappa, v_n, v_s_prime):
    """div v = dv_s/ds - kappa v_n; zero means incompressible."""
    return v_s_prime - kappa * v_n


def poloidal_evolution_rhs(r, kappa, tau, theta, v_theta):
    """d v_theta / ds = r kappa tau sin(theta) v_theta."""
    return r * kappa * tau * np.sin(theta) * v_theta


def axial_flow_from_vorticity(omega0, r):
    """v_s = -omega_0 r, the first integral of omega_theta = -d v_s/dr."""
    return -omega0 * r


def vorticity_components(tau0, r, theta, v_theta, dv_theta_dr, omega0) -> Vorticity:
    """Thin-tube vorticity of an axial plus poloidal tube flow."""
    if r == 0:
        raise SingularAxisError("omega_s contains cos(theta)/r")
    omega_r = -(tau0**2) * r * np.sin(theta) * v_theta
    omega_s = -(dv_theta_dr - (np.cos(theta) / r) * tau0 * v_theta)
    return Vorticity(
        omega_r=float(omega_r), omega_theta=float(omega0), omega_s=float(omega_s), omega_0=float(omega0)
    )


def binormal_flow_gamma(tau0, v0):
    """Stretching exponent tau0 * v0 of the flow with binormal component v0."""
    return tau0 * v0


# --- Beltrami residual on orthogonal curvilinear grids -------------------------


@dataclass(frozen=True)
class CurvilinearGrid:
    """Uniform grid in orthogonal coordinates (x1, x2, x3) with Lame scale factors.

    Scale factors broadcast to the grid shape ``(len(x1), len(x2), len(x3))``.
    Periodic axes must not repeat the endpoint.
    """

    axes: tuple[np.ndarray, np.ndarray, np.ndarray]
    scale: tuple[np.ndarray, np.ndarray, np.ndarray]
    periodic: tuple[bool, bool, bool] = (False, False, False)

    def __post_init__(self):
        for i, ax in enumerate(self.axes):
            ax = np.asarray(ax, dtype=float)
            if ax.ndim != 1 or ax.size < 3:
                raise ValueError(f"axis {i} needs at least 3 nodes")
            d = np.diff(ax)
            if np.any(d <= 0) or not np.allclose(d, d[0], rtol=1e-9, atol=0):
                raise ValueError(f"axis {i} must be uniform and increasing")
        shape = self.shape
        for i, h in enumerate(self.scale):
            h = np.broadcast_to(np.asarray(h, dtype=float), shape)
            if np.any(h <= 0) or not np.all(np.isfinite(h)):
                raise ValueError(f"scale factor {i} must be positive and finite")

    @property
    def shape(self) -> tuple[int, int, int]:
        return tuple(len(ax) for ax in self.axes)

    def mesh(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return np.meshgrid(*self.axes, indexing="ij")

    def derivative(self, f: np.ndarray, axis: int) -> np.ndarray:
        ax = np.asarray(self.axes[axis], dtype=float)
        h = ax[1] - ax[0]
        f = np.broadcast_to(f, self.shape)
        if self.periodic[axis]:
            return (np.roll(f, -1, axis=axis) - np.roll(f, 1, axis=axis)) / (2.0 * h)
        return np.gradient(f, h, axis=axis, edge_order=2)

    def curl(self, u: np.ndarray) -> np.ndarray:
        """Curl of a field with physical components u[0..2] on this grid."""
        h1, h2, h3 = (np.broadcast_to(np.asarray(h, dtype=float), self.shape) for h in self.scale)
        u1, u2, u3 = (np.broadcast_to(c, self.shape) for c in u)
        d = self.derivative
        c1 = (d(h3 * u3, 1) - d(h2 * u2, 2)) / (h2 * h3)
        c2 = (d(h1 * u1, 2) - d(h3 * u3, 0)) / (h3 * h1)
        c3 = (d(h2 * u2, 0) - d(h1 * u1, 1)) / (h1 * h2)
        return np.stack([c1, c2, c3])


def tube_grid(r, theta, s, kappa: float, periodic_theta: bool = True) -> CurvilinearGrid:
    """Grid in tube coordinates (r, theta, s) with scale factors (1, r, K)."""
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise SingularAxisError("tube grid must exclude the axis r = 0")
    R, TH, _ = np.meshgrid(r, theta, s, indexing="ij")
    K = metric_factor(R, TH, kappa)
    return CurvilinearGrid(
        axes=(r, np.asarray(theta, dtype=float), np.asarray(s, dtype=float)),
        scale=(np.ones_like(R), R, K),
        periodic=(False, periodic_theta, False),
    )


def box_grid(x, y, z, periodic: bool = True) -> CurvilinearGrid:
    """Cartesian grid; periodic axes exclude the repeated endpoint."""
    one = np.ones((1, 1, 1))
    return CurvilinearGrid(
        axes=tuple(np.asarray(a, dtype=float) for a in (x, y, z)),
        scale=(one, one, one),
        periodic=(periodic, periodic, periodic),
    )


@dataclass(frozen=True)
class BeltramiResidual:
    field: np.ndarray  # (3, n1, n2, n3)
    max_norm: float


def beltrami_residual(u, lambda_B: float, grid: CurvilinearGrid) -> BeltramiResidual:
    """curl(u) - lambda_B u on the grid, with the max-norm of its magnitude."""
    u = np.asarray(u, dtype=float)
    if u.shape[0] != 3:
        raise ValueError("u must have 3 components along its first axis")
    u = np.stack([np.broadcast_to(c, grid.shape) for c in u])
    res = grid.curl(u) - lambda_B * u
    return BeltramiResidual(field=res, max_norm=float(np.max(np.linalg.norm(res, axis=0))))
