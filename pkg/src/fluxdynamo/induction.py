"""Kinematic induction scenarios on filaments and twisted tubes.

Where a quantity has two incompatible quoted forms, both are implemented and
tagged with their source rather than one being silently preferred:

* field decay along a diffusive filament: first power of curvature in the
  governing equation versus squared curvature in its quoted solution;
* radial mode exponents: roots of the quadratic versus the quoted roots.
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import integrate

from .errors import MarginalCaseError, SingularAxisError, SingularParameterError
from .geometry import CurveProfile

SOLENOIDAL_TOL = 1e-10


@dataclass(frozen=True)
class EnergyRate:
    """``d_eps_dt`` holds 4*pi times the magnetic energy rate."""

    d_eps_dt: float
    eps_M: float | None = None


@dataclass(frozen=True)
class MagneticField:
    """Field amplitudes with optional mode structure.

    If ``tau0`` is given, the solenoidal condition k_s = tau0 * k_theta is
    enforced at construction.
    """

    B_s: complex = 0.0
    B_theta: complex = 0.0
    B_n: complex = 0.0
    B0: float = 0.0
    gamma: complex = 0.0
    k_s: complex = 0.0
    k_theta: complex = 0.0
    k0: float = 0.0
    tau0: float | None = None

    def __post_init__(self):
        if self.B0 < 0:
            raise ValueError("B0 must be non-negative")
        if self.tau0 is not None:
            scale = max(1.0, abs(self.k_s), abs(self.tau0 * self.k_theta))
            if abs(self.solenoidal_residual) > SOLENOIDAL_TOL * scale:
                raise ValueError(
                    f"field is not solenoidal: k_s - tau0 k_theta = {self.solenoidal_residual!r}"
                )

    @property
    def solenoidal_residual(self) -> complex:
        tau0 = 0.0 if self.tau0 is None else self.tau0
        return self.k_s - tau0 * self.k_theta

    @classmethod
    def radial_mode(cls, B0: float, gamma: float, k0: float, tau0: float) -> "MagneticField":
        """Axial mode with imaginary axial wavenumber k_s = i k0 and k_theta = k_s / tau0."""
        if tau0 == 0:
            raise SingularParameterError("solenoidal radial modes need tau0 != 0")
        k_s = 1j * k0
        return cls(B_s=B0, B0=B0, gamma=gamma, k_s=k_s, k_theta=k_s / tau0, k0=k0, tau0=tau0)


# --- steady tube dynamos ----------------------------------------------------------


def steady_field_flow_ratio(v_theta, v_s):
    """B_theta / B_s = v_theta / v_s for a steady field frozen into the flow."""
    if v_s == 0:
        raise SingularParameterError("field/flow ratio undefined for v_s = 0")
    return v_theta / v_s


def axis_field_ratio(tau0, r, theta):
    """Near-axis estimate B_s / B_theta ~ tau0 r cos(theta)."""
    return tau0 * r * np.cos(theta)


def zeldovich_integrand(B_s, B_theta, v_s, v_theta, tau0, r, theta):
    if tau0 == 0:
        raise SingularParameterError("integrand contains 1/tau0")
    first = B_theta * tau0**2 * np.sin(theta) * (v_theta - v_s / tau0) + B_s * v_theta
    second = B_s - B_theta / (tau0 * r)
    return first * second


def zeldovich_rate(B_s, B_theta, v_s, v_theta, tau0, r_grid, theta_grid, volume_element) -> EnergyRate:
    """Volume integral of the tube energy-rate integrand.

    All field and grid arguments broadcast together; ``volume_element``
    holds the cell volume dV at each node.
    """
    r_grid = np.asarray(r_grid, dtype=float)
    if r_grid.size == 0:
        raise ValueError("empty grid")
    if np.any(r_grid <= 0):
        raise SingularAxisError("grid must exclude r = 0")
    dV = np.asarray(volume_element, dtype=float)
    integrand = zeldovich_integrand(B_s, B_theta, v_s, v_theta, tau0, r_grid, np.asarray(theta_grid))
    shape = np.broadcast_shapes(np.shape(integrand), dV.shape)
    rate = float(np.sum(np.broadcast_to(integrand * dV, shape)))
    B2 = np.asarray(B_s, dtype=float) ** 2 + np.asarray(B_theta, dtype=float) ** 2
    shape_e = np.broadcast_shapes(B2.shape, dV.shape, r_grid.shape)
    eps = float(np.sum(np.broadcast_to(B2 * dV, shape_e)) / (8.0 * np.pi))
    return EnergyRate(d_eps_dt=rate, eps_M=eps)


@dataclass(frozen=True)
class TubeVolumeGrid:
    r: np.ndarray
    theta: np.ndarray
    s: np.ndarray
    dV: np.ndarray

    @property
    def volume(self) -> float:
        return float(np.sum(self.dV))


def tube_volume_grid(a, length, kappa, n_r=32, n_theta=32, n_s=32) -> TubeVolumeGrid:
    """Cell-centred grid over 0 < r < a, 0 <= theta < 2 pi, 0 <= s < length; dV = K r dr dtheta ds."""
    dr, dth, ds = a / n_r, 2 * np.pi / n_theta, length / n_s
    r = (np.arange(n_r) + 0.5) * dr
    th = (np.arange(n_theta) + 0.5) * dth
    s = (np.arange(n_s) + 0.5) * ds
    R, TH, S = np.meshgrid(r, th, s, indexing="ij")
    K = 1.0 - kappa * R * np.cos(TH)
    return TubeVolumeGrid(r=R, theta=TH, s=S, dV=K * R * dr * dth * ds)


# --- filaments ---------------------------------------------------------------------

# t . n for an orthonormal frame
_T_DOT_N = 0.0


def nonstretching_filament_rate(B_s, v_s, volume: float = 1.0) -> EnergyRate:
    """Energy rate of B = B_s t advected by v = v_s t with no stretching.

    The integrand is B_s^2 v_s (t . n), which vanishes identically.
    """
    if not (np.isfinite(B_s) and np.isfinite(v_s)):
        raise ValueError("non-finite field or flow")
    rate = _T_DOT_N
    return EnergyRate(d_eps_dt=rate, eps_M=float(B_s) ** 2 * volume / (8.0 * np.pi))


def integrate_filament_decay(profile: CurveProfile, eta, B0, s, curvature_power: int):
    """Numerically integrate dB_s/ds = -eta kappa^p B_s from s_min.

    ``curvature_power`` 1 is the governing equation as written; 2 is the ODE
    whose solution is the quoted closed form.
    """
    s = np.atleast_1d(np.asarray(s, dtype=float))
    s0 = profile.s_domain[0]
    if eta == 0:
        return np.full(s.shape, float(B0))
    order = np.argsort(s)
    s_sorted = s[order]
    fun = lambda x, y: -eta * profile.kappa(np.asarray(x)) ** curvature_power * y
    hi = max(float(s_sorted[-1]), s0)
    if hi == s0:
        return np.full(s.shape, float(B0))
    sol = integrate.solve_ivp(
        fun, (s0, hi), [float(B0)], method="DOP853", rtol=1e-13, atol=1e-300, dense_output=True
    )
    if not sol.success:
        raise ArithmeticError(f"field decay integration failed: {sol.message}")
    out = np.empty_like(s)
    out[order] = sol.sol(s_sorted)[0]
    return out


@dataclass(frozen=True)
class DiffusiveFilamentSolution:
    B0: float
    kappa0: float
    tau0: float
    eta: float
    profile: CurveProfile = field(repr=False)

    def __post_init__(self):
        if self.eta < 0:
            raise ValueError("eta must be non-negative")

    def B_s_of_s(self, s):
        """B0 exp(-eta * integral kappa^2 ds)."""
        return np.vectorize(lambda x: self.B0 * math.exp(-self.eta * self.profile.curvature_energy(x)))(s)

    def kappa_of_s(self, s):
        """kappa0 exp(eta * integral tau ds)."""
        return np.vectorize(lambda x: self.kappa0 * math.exp(self.eta * self.profile.total_torsion(x)))(s)

    def B_s_literal_of_s(self, s):
        """Integration of the governing equation as written (first power of kappa)."""
        out = integrate_filament_decay(self.profile, self.eta, self.B0, s, curvature_power=1)
        return out if np.ndim(s) else float(out[0])

    @property
    def v_s_constraint(self) -> float:
        """Helical-filament constraint v_s = -tau0^2 (units suppressed)."""
        return -(self.tau0**2)

    def decays(self, s) -> bool:
        return self.profile.curvature_energy(s) > 0 and self.eta > 0


def diffusive_filament_solve(B0, kappa0_profile: CurveProfile, eta, s_span=None) -> DiffusiveFilamentSolution:
    """Closed-form field and curvature along a diffusive, non-stretching filament.

    ``s_span`` restricts the profile's domain when given.
    """
    if eta < 0:
        raise ValueError("eta must be non-negative")
    if not B0 > 0:
        raise ValueError("B0 must be positive")
    profile = kappa0_profile
    if s_span is not None:
        if profile.is_sampled:
            raise ValueError("s_span cannot re-slice a sampled profile")
        profile = CurveProfile(profile.kappa, profile.tau, tuple(s_span))
    s0 = profile.s_domain[0]
    return DiffusiveFilamentSolution(
        B0=float(B0),
        kappa0=float(profile.kappa(np.asarray(s0))),
        tau0=float(profile.tau(np.asarray(s0))),
        eta=float(eta),
        profile=profile,
    )


# --- Euclidean filamentary fast dynamo ----------------------------------------------


@dataclass(frozen=True)
class FastDynamoSeries:
    t: np.ndarray
    gamma: float
    B_s: np.ndarray
    B_n: np.ndarray
    v_s: float
    eps_M: np.ndarray
    weak_torsion: bool

    @property
    def fields(self) -> list[MagneticField]:
        b0 = abs(float(self.B_s[0])) if len(self.t) else 0.0
        return [
            MagneticField(B_s=float(bs), B_n=float(bn), B0=b0, gamma=self.gamma)
            for bs, bn in zip(self.B_s, self.B_n)
        ]

    @property
    def energy(self) -> EnergyRate:
        """Energies with 4 pi d(eps)/dt = 8 pi gamma eps for the exponential law."""
        return EnergyRate(d_eps_dt=8.0 * np.pi * self.gamma * self.eps_M, eps_M=self.eps_M)


def euclidean_fast_dynamo(
    B0, tau0, v0, c1, t, a: float = 1.0, weak_torsion: bool = False, s: float = 0.0
) -> FastDynamoSeries:
    """Filament field driven by the flow v_s t + v0 b, growth gamma = tau0 v0.

    The general branch uses B_n = (v_s - tau0) exp(gamma t) / v0; the weak
    torsion branch uses B_n = tau0 c1 B0 exp(gamma t) / gamma.
    """
    if v0 == 0:
        raise SingularParameterError("B_n branch and energy need v0 != 0")
    t = np.asarray(t, dtype=float)
    gamma = tau0 * v0
    growth = np.exp(gamma * t)
    v_s = tau0 * v0 * s + c1
    B_s = B0 * growth
    if weak_torsion:
        if gamma == 0:
            raise MarginalCaseError("weak-torsion normal field divides by gamma = 0 (marginal case)")
        B_n = tau0 * c1 * B0 / gamma * growth
    else:
        B_n = (v_s - tau0) / v0 * growth
    eps = (a**2 / 8.0) * B0**2 * (1.0 + c1**2 / v0**2) * np.exp(2.0 * gamma * t)
    return FastDynamoSeries(
        t=t, gamma=gamma, B_s=B_s, B_n=B_n, v_s=v_s, eps_M=eps, weak_torsion=weak_torsion
    )


def measured_doubling_time(t, eps) -> float:
    """Doubling time of a positive series from a least-squares fit of log(eps) against t."""
    t = np.asarray(t, dtype=float)
    log_e = np.log(np.asarray(eps, dtype=float))
    slope = np.polyfit(t, log_e, 1)[0]
    if slope == 0:
        return math.inf
    return math.log(2.0) / slope


# --- heliotron --------------------------------------------------------------------


@dataclass(frozen=True)
class HeliotronState:
    """Heliotron amplitudes; ``gamma`` is dimensionless, scaled by U_max / L."""

    B_s0: float
    B_theta0: float
    u_s: float
    u_theta: float
    tau0: float
    U_max: float = 1.0
    L: float = 1.0
    Re_m: float = 1.0
    gamma: float = 0.0
    a: float = 1.0
    m: int = 0
    theta_R: float = 0.0

    def __post_init__(self):
        if not (self.L > 0 and self.U_max > 0 and self.Re_m > 0):
            raise ValueError("U_max, L and Re_m must be positive")
        if int(self.m) != self.m:
            raise ValueError("winding count m must be an integer")

    @property
    def eta(self) -> float:
        return self.U_max * self.L / self.Re_m

    def beta(self, r, K) -> float:
        """B_s / K - B_theta0 / (tau0 r)."""
        return self.B_s0 / K - self.B_theta0 / (self.tau0 * r)


def heliotron_system_residual(state: HeliotronState, theta, r, K) -> np.ndarray:
    """LHS - RHS of the three heliotron scalar equations, as a complex 3-vector.

    The third equation carries an imaginary unit; its real and imaginary
    parts are the real and imaginary parts of entry 2. At sin(theta) = 0 the
    second equation contains csc(theta) and its residual is non-finite
    whenever u_s != 0.
    """
    if not r > 0:
        raise SingularAxisError("heliotron equations contain 1/r")
    if K == 0:
        raise SingularParameterError("heliotron equations contain 1/K")
    if state.tau0 == 0:
        raise SingularParameterError("heliotron equations contain 1/tau0")
    s = state
    rate = s.gamma * s.U_max / s.L
    beta = s.beta(r, K)
    sin, cos = math.sin(theta), math.cos(theta)
    tan = sin / cos if cos != 0 else math.copysign(math.inf, sin)
    if s.u_s == 0:
        csc_term = 0.0
    elif sin == 0:
        csc_term = math.inf
    else:
        csc_term = s.u_s * s.tau0 / sin

    rhs77 = s.B_theta0 * s.tau0 * sin + s.u_theta * s.tau0 * sin * beta
    rhs79 = s.B_s0 * s.tau0 + beta * s.u_theta * s.tau0 * tan + csc_term
    bracket = s.u_s / K - s.u_theta / (s.tau0 * r)
    beta_term = beta * s.u_theta * s.tau0 * tan if beta * s.u_theta != 0 else 0.0
    rhs80 = complex(-beta_term, bracket)
    return np.array(
        [rate * s.B_s0 - rhs77, rate * s.B_theta0 - rhs79, rate * s.B_theta0 - rhs80], dtype=complex
    )


def nondynamo_axial_flow(u_theta, tau0, r, K):
    """Axial flow u_s = K u_theta / (tau0 r) cancelling the imaginary part of the third equation."""
    if tau0 == 0 or r == 0:
        raise SingularParameterError("needs tau0 != 0 and r != 0")
    return K * u_theta / (tau0 * r)


def heliotron_nondynamo_torsion(a, theta_R, m) -> float:
    """Torsion (2 pi / a)(theta_R - 2 pi m) of a non-dynamo heliotron surface.

    The right-hand side is (1/length) * angle; the dimensional mismatch is
    reported, not corrected.
    """
    if not a > 0:
        raise ValueError("minor radius a must be positive")
    if int(m) != m:
        raise ValueError("winding count m must be an integer")
    return (2.0 * math.pi / a) * (theta_R - 2.0 * math.pi * int(m))


# --- non-stretched diffusive radial modes --------------------------------------------


class ModeSource(str, enum.Enum):
    QUOTED_ROOTS = "quoted_roots"
    QUOTED_GROWTH = "quoted_growth_rates"
    ORACLE_QUADRATIC = "oracle_quadratic"


@dataclass(frozen=True)
class RadialModeResult:
    n_plus: complex
    n_minus: complex
    gamma_plus: float
    gamma_minus: float
    source: ModeSource


QUOTED_MARGINAL_EXPONENTS = (2.0, -5.0)


def radial_mode_polynomial(n, eta, gamma):
    """n^2 + 3n + (2 - gamma/eta)."""
    return n * n + 3.0 * n + (2.0 - gamma / eta)


def quadratic_roots(a, b, c):
    """Roots of a x^2 + b x + c, larger-real-part first, cancellation-free for real roots."""
    if a == 0:
        raise ValueError("leading coefficient must be nonzero")
    disc = b * b - 4.0 * a * c
    if disc >= 0:
        root = math.sqrt(disc)
        q = -0.5 * (b + math.copysign(root, b))
        if q == 0:
            return 0.0, 0.0
        x1, x2 = q / a, c / q
        return (x1, x2) if x1 >= x2 else (x2, x1)
    root = cmath.sqrt(disc)
    x1 = (-b + root) / (2.0 * a)
    x2 = (-b - root) / (2.0 * a)
    return (x1, x2) if x1.imag >= 0 else (x2, x1)


def quoted_mode_exponents(eta, gamma):
    """Quoted exponents n_pm = -3/2 pm (7/2)(1 - gamma / (14 eta))."""
    half = 3.5 * (1.0 - gamma / (14.0 * eta))
    return -1.5 + half, -1.5 - half


def quoted_growth_rate_plus(n_plus, eta):
    return 4.0 * (n_plus - 2.0) * eta


def quoted_growth_rate_minus(n_minus, eta):
    return -4.0 * (n_minus + 5.0) * eta


@dataclass(frozen=True)
class RadialModeSolution:
    eta: float
    gamma: float
    oracle: RadialModeResult
    quoted: RadialModeResult
    growth_formula: RadialModeResult
    marginal_exponents: tuple[float, float] = QUOTED_MARGINAL_EXPONENTS

    @property
    def results(self) -> list[RadialModeResult]:
        return [self.oracle, self.quoted, self.growth_formula]

    def oracle_residuals(self) -> tuple[float, float]:
        return tuple(
            abs(radial_mode_polynomial(n, self.eta, self.gamma))
            for n in (self.oracle.n_plus, self.oracle.n_minus)
        )

    def exponent_gaps(self) -> tuple[float, float]:
        """|oracle root - quoted root| for the + and - branches."""
        return (
            abs(self.oracle.n_plus - self.quoted.n_plus),
            abs(self.oracle.n_minus - self.quoted.n_minus),
        )

    def marginal_field(self, r, s=0.0, theta=0.0, k_s=0.0, k_theta=0.0):
        """Axial amplitudes r^n exp(i(k_s s + k_theta theta)) for the quoted marginal exponents."""
        r = np.asarray(r, dtype=float)
        if np.any(r <= 0):
            raise SingularAxisError("the n = -5 mode is singular on the axis")
        phase = np.exp(1j * (k_s * s + k_theta * theta))
        n_p, n_m = self.marginal_exponents
        return r**n_p * phase, r**n_m * phase


def radial_mode_solve(eta, gamma) -> RadialModeSolution:
    if eta == 0:
        raise SingularParameterError(
            "gamma/eta undefined at eta = 0; classify the diffusionless limit instead"
        )
    n_p, n_m = quadratic_roots(1.0, 3.0, 2.0 - gamma / eta)
    oracle = RadialModeResult(n_p, n_m, gamma, gamma, ModeSource.ORACLE_QUADRATIC)
    p_p, p_m = quoted_mode_exponents(eta, gamma)
    quoted = RadialModeResult(p_p, p_m, gamma, gamma, ModeSource.QUOTED_ROOTS)
    growth = RadialModeResult(
        p_p, p_m, quoted_growth_rate_plus(p_p, eta), quoted_growth_rate_minus(p_m, eta),
        ModeSource.QUOTED_GROWTH,
    )
    return RadialModeSolution(float(eta), float(gamma), oracle, quoted, growth)


def radial_profile_residual(n, r, eta, gamma):
    """Residual of B0'' - (gamma/eta) B0 for B0 = r^n."""
    r = np.asarray(r, dtype=float)
    return n * (n - 1) * r ** (n - 2) - (gamma / eta) * r**n


def mode_equation_residual(B0, dB0, d2B0, r, theta, tau0, k_s, k_theta, eta, gamma) -> complex:
    """gamma B0 - eta[B0'' + tau0 cos(theta) B0' - (1 - 1/(tau0 r)^2) dk^2 B0 + i dk sin(theta) B0 / r].

    ``dk = k_s - tau0 k_theta``. Real and imaginary parts are the two
    independent audit residuals.
    """
    if r == 0 or tau0 == 0:
        raise SingularParameterError("mode equation contains 1/r and 1/tau0")
    dk = k_s - tau0 * k_theta
    bracket = (
        d2B0
        + tau0 * math.cos(theta) * dB0
        - (1.0 - 1.0 / (tau0 * r) ** 2) * dk**2 * B0
        + 1j * dk * math.sin(theta) / r * B0
    )
    return complex(gamma * B0 - eta * bracket)


# --- Anosov geodesic-flow growth rate -----------------------------------------------


def chicone_latushkin_gamma(eta, kappa):
    """0.5 [-eta (1 + kappa^2) + sqrt(eta^2 (1 - kappa^2)^2 - 4 kappa)].

    Returns a float when the radicand is non-negative, otherwise the complex
    root with positive imaginary part (its conjugate is the other member of
    the pair).
    """
    base = -eta * (1.0 + kappa**2)
    if kappa == 0:
        # sqrt(eta^2) written as |eta| so tiny eta cannot underflow away from exact zero
        return 0.5 * (base + abs(eta))
    radicand = eta**2 * (1.0 - kappa**2) ** 2 - 4.0 * kappa
    if radicand >= 0:
        return 0.5 * (base + math.sqrt(radicand))
    return 0.5 * complex(base, math.sqrt(-radicand))


def chicone_latushkin_pair(eta, kappa) -> tuple[complex, complex]:
    g = complex(chicone_latushkin_gamma(eta, kappa))
    radicand = eta**2 * (1.0 - kappa**2) ** 2 - 4.0 * kappa
    if radicand >= 0:
        root = abs(eta) if kappa == 0 else math.sqrt(radicand)
        other = 0.5 * (-eta * (1.0 + kappa**2) - root)
        return g, complex(other)
    return g, g.conjugate()
