"""Filament axis geometry: curvature/torsion profiles, Frenet frames, space curves.

Units are CGS throughout (cm for lengths, 1/cm for curvature and torsion).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from collections.abc import Sequence
from typing import Callable, Iterator

import numpy as np
from scipy import integrate

FRAME_TOL = 1e-10


def _as_vectorized(fn: Callable) -> Callable[[np.ndarray], np.ndarray]:
    """Wrap a scalar callable so it evaluates on arrays of arclength."""

    def wrapped(s):
        s_arr = np.asarray(s, dtype=float)
        try:
            out = np.asarray(fn(s_arr), dtype=float)
            if out.shape == s_arr.shape:
                return out
            if out.shape == ():
                return np.full(s_arr.shape, float(out))
        except (TypeError, ValueError):
            pass
        return np.vectorize(lambda x: float(fn(x)), otypes=[float])(s_arr)

    return wrapped


@dataclass(frozen=True)
class CurveProfile:
    """Curvature kappa(s) and torsion tau(s) of a filament axis.

    Either closed-form callables or a uniformly sampled table. Sampled
    profiles are linearly interpolated between samples.
    """

    kappa: Callable[[np.ndarray], np.ndarray]
    tau: Callable[[np.ndarray], np.ndarray]
    s_domain: tuple[float, float]
    samples: tuple[np.ndarray, np.ndarray, np.ndarray] | None = field(
        default=None, repr=False
    )

    def __post_init__(self):
        s_min, s_max = (float(v) for v in self.s_domain)
        if not (np.isfinite(s_min) and np.isfinite(s_max)) or not s_max > s_min:
            raise ValueError(f"degenerate arclength domain {self.s_domain!r}")
        object.__setattr__(self, "s_domain", (s_min, s_max))
        if self.samples is None:
            object.__setattr__(self, "kappa", _as_vectorized(self.kappa))
            object.__setattr__(self, "tau", _as_vectorized(self.tau))

    @classmethod
    def from_callables(cls, kappa, tau, s_domain) -> "CurveProfile":
        return cls(kappa=kappa, tau=tau, s_domain=tuple(s_domain))

    @classmethod
    def from_samples(cls, s, kappa, tau) -> "CurveProfile":
        s = np.array(s, dtype=float)
        kappa = np.array(kappa, dtype=float)
        tau = np.array(tau, dtype=float)
        if s.ndim != 1 or s.size < 2:
            raise ValueError("sampled profile needs at least 2 samples")
        if kappa.shape != s.shape or tau.shape != s.shape:
            raise ValueError("kappa and tau must have one value per sample")
        if np.any(np.diff(s) <= 0):
            raise ValueError("sample abscissae must be strictly increasing")
        for arr in (s, kappa, tau):
            arr.setflags(write=False)
        return cls(
            kappa=lambda x: np.interp(x, s, kappa),
            tau=lambda x: np.interp(x, s, tau),
            s_domain=(s[0], s[-1]),
            samples=(s, kappa, tau),
        )

    @property
    def is_sampled(self) -> bool:
        return self.samples is not None

    @property
    def length(self) -> float:
        return self.s_domain[1] - self.s_domain[0]

    def total_torsion(self, s: float) -> float:
        """Integral of tau from s_min to s."""
        return self._integral(s, squared_kappa=False)

    def curvature_energy(self, s: float) -> float:
        """Integral of kappa**2 from s_min to s."""
        return self._integral(s, squared_kappa=True)

    def _integral(self, s: float, squared_kappa: bool) -> float:
        s0 = self.s_domain[0]
        s = float(s)
        if s == s0:
            return 0.0
        if self.samples is not None:
            xs, ks, ts = self.samples
            lo, hi = min(s0, s), max(s0, s)
            inner = xs[(xs > lo) & (xs < hi)]
            nodes = np.concatenate(([lo], inner, [hi]))
            h = np.diff(nodes)
            if squared_kappa:
                k = np.interp(nodes, xs, ks)
                # exact for the piecewise-linear interpolant
                total = np.sum(h * (k[:-1] ** 2 + k[:-1] * k[1:] + k[1:] ** 2) / 3.0)
            else:
                t = np.interp(nodes, xs, ts)
                total = np.sum(h * (t[:-1] + t[1:]) / 2.0)
            return float(total if s > s0 else -total)
        if squared_kappa:
            integrand = lambda x: float(self.kappa(np.asarray(x))) ** 2
        else:
            integrand = lambda x: float(self.tau(np.asarray(x)))
        value, _ = integrate.quad(integrand, s0, s, epsabs=0.0, epsrel=1e-13, limit=500)
        return float(value)


def helical_profile(kappa0: float, s_domain) -> CurveProfile:
    """Constant profile with torsion equal to curvature."""
    kappa0 = float(kappa0)
    if not np.isfinite(kappa0):
        raise ValueError("helical curvature must be finite")
    const = lambda s: np.full(np.shape(s), kappa0)
    return CurveProfile(kappa=const, tau=const, s_domain=tuple(s_domain))


@dataclass(frozen=True)
class FrenetFrame:
    """Right-handed orthonormal triad (t, n, b)."""

    t: np.ndarray
    n: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        vecs = []
        for name in ("t", "n", "b"):
            v = np.array(getattr(self, name), dtype=float)
            if v.shape != (3,):
                raise ValueError(f"{name} must be a 3-vector")
            v.setflags(write=False)
            object.__setattr__(self, name, v)
            vecs.append(v)
        m = np.stack(vecs)
        if np.max(np.abs(m @ m.T - np.eye(3))) > FRAME_TOL:
            raise ValueError("frame is not orthonormal")
        if abs(np.dot(vecs[0], np.cross(vecs[1], vecs[2])) - 1.0) > FRAME_TOL:
            raise ValueError("frame is not right-handed")

    @classmethod
    def identity(cls) -> "FrenetFrame":
        return cls(np.array([1.0, 0, 0]), np.array([0, 1.0, 0]), np.array([0, 0, 1.0]))

    @classmethod
    def _unchecked(cls, matrix: np.ndarray) -> "FrenetFrame":
        # integrated frames drift slightly; they are measured, not re-validated
        obj = object.__new__(cls)
        rows = np.array(matrix, dtype=float)
        rows.setflags(write=False)
        object.__setattr__(obj, "t", rows[0])
        object.__setattr__(obj, "n", rows[1])
        object.__setattr__(obj, "b", rows[2])
        return obj

    def as_matrix(self) -> np.ndarray:
        """Rows are t, n, b."""
        return np.stack([self.t, self.n, self.b])


def frenet_arclength_derivative(frame: FrenetFrame, kappa: float, tau: float):
    """(t', n', b') = (kappa n, -kappa t + tau b, -tau n)."""
    t, n, b = frame.t, frame.n, frame.b
    return kappa * n, -kappa * t + tau * b, -tau * n


def frame_time_derivative(kappa: float, kappa_prime: float, tau: float, frame: FrenetFrame):
    """Time evolution of the triad: (kappa' b - kappa tau n, kappa tau t, -kappa' t)."""
    t, n, b = frame.t, frame.n, frame.b
    t_dot = kappa_prime * b - kappa * tau * n
    n_dot = kappa * tau * t
    b_dot = -kappa_prime * t
    return t_dot, n_dot, b_dot


def _generator(kappa: np.ndarray, tau: np.ndarray) -> np.ndarray:
    """Batch of 3x3 matrices A with F' = A F for F = rows (t, n, b)."""
    a = np.zeros(kappa.shape + (3, 3))
    a[..., 0, 1] = kappa
    a[..., 1, 0] = -kappa
    a[..., 1, 2] = tau
    a[..., 2, 1] = -tau
    return a


@dataclass(frozen=True)
class FrameTrajectory(Sequence):
    """Frames sampled along arclength. Indexing yields ``(s, FrenetFrame)``."""

    s: np.ndarray
    frames: np.ndarray  # (N, 3, 3), rows t, n, b

    def __len__(self) -> int:
        return len(self.s)

    def __getitem__(self, i):
        if isinstance(i, slice):
            return [self[j] for j in range(*i.indices(len(self)))]
        return float(self.s[i]), FrenetFrame._unchecked(self.frames[i])

    def __iter__(self) -> Iterator[tuple[float, FrenetFrame]]:
        for i in range(len(self)):
            yield self[i]

    @property
    def tangents(self) -> np.ndarray:
        return self.frames[:, 0, :]

    def orthonormality_drift(self) -> float:
        """Max over samples of |F F^T - I|, covering norms and pairwise dots."""
        gram = np.einsum("nij,nkj->nik", self.frames, self.frames)
        return float(np.max(np.abs(gram - np.eye(3))))

    def handedness_drift(self) -> float:
        triple = np.linalg.det(self.frames)
        return float(np.max(np.abs(triple - 1.0)))


def evolve_frame(profile: CurveProfile, frame0: FrenetFrame, step: float) -> FrameTrajectory:
    """Integrate the Frenet equations over ``profile.s_domain`` with fixed-step RK4.

    The frame is not re-orthonormalized; use
    :meth:`FrameTrajectory.orthonormality_drift` to measure the error.
    """
    step = float(step)
    if not step > 0:
        raise ValueError("step must be positive")
    s_min, s_max = profile.s_domain
    n_steps = max(1, int(np.ceil(profile.length / step - 1e-9)))
    h = profile.length / n_steps
    nodes = s_min + h * np.arange(n_steps + 1)
    nodes[-1] = s_max
    mids = nodes[:-1] + 0.5 * h

    k_nodes, t_nodes = profile.kappa(nodes), profile.tau(nodes)
    k_mids, t_mids = profile.kappa(mids), profile.tau(mids)
    for arr in (k_nodes, t_nodes, k_mids, t_mids):
        if not np.all(np.isfinite(arr)):
            raise ValueError("non-finite curvature or torsion sample")

    a1 = _generator(k_nodes[:-1], t_nodes[:-1])
    a2 = _generator(k_mids, t_mids)
    a3 = _generator(k_nodes[1:], t_nodes[1:])
    eye = np.eye(3)
    k1 = a1
    k2 = a2 @ (eye + 0.5 * h * k1)
    k3 = a2 @ (eye + 0.5 * h * k2)
    k4 = a3 @ (eye + h * k3)
    propagators = eye + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)

    frames = np.empty((n_steps + 1, 3, 3))
    f = frame0.as_matrix()
    frames[0] = f
    for i in range(n_steps):
        f = propagators[i] @ f
        frames[i + 1] = f
    return FrameTrajectory(s=nodes, frames=frames)


@dataclass(frozen=True)
class SpaceCurve:
    """Positions X(s) of the filament axis, arclength-ordered."""

    s: np.ndarray
    X: np.ndarray  # (N, 3)

    def __post_init__(self):
        ds = np.diff(self.s)
        if np.any(ds <= 0):
            raise ValueError("arclength values must be strictly increasing")
        chord = np.linalg.norm(np.diff(self.X, axis=0), axis=1)
        if np.any(chord > ds * (1 + 1e-9)):
            raise ValueError("chord longer than arclength spacing")

    @property
    def points(self) -> list[tuple[float, np.ndarray]]:
        return list(zip(self.s.tolist(), self.X))

    def tangent_estimate(self) -> np.ndarray:
        return np.gradient(self.X, self.s, axis=0, edge_order=2)

    def curvature_estimate(self) -> np.ndarray:
        """|X''| from second-order finite differences."""
        d2 = np.gradient(self.tangent_estimate(), self.s, axis=0, edge_order=2)
        return np.linalg.norm(d2, axis=1)


def reconstruct_curve(frames, X0) -> SpaceCurve:
    """Integrate X' = t starting from X0."""
    if isinstance(frames, FrameTrajectory):
        s, tangents = frames.s, frames.tangents
    else:
        frames = list(frames)
        if not frames:
            raise ValueError("no frames to integrate")
        s = np.array([item[0] for item in frames], dtype=float)
        tangents = np.array([item[1].t for item in frames])
    X0 = np.asarray(X0, dtype=float)
    if len(s) == 1:
        return SpaceCurve(s=s, X=X0[None, :].copy())
    if np.any(np.diff(s) <= 0):
        raise ValueError("arclength values must be strictly increasing")
    if len(s) == 2:
        disp = integrate.cumulative_trapezoid(tangents, x=s, axis=0, initial=0)
    else:
        disp = integrate.cumulative_simpson(tangents, x=s, axis=0, initial=0)
    return SpaceCurve(s=np.array(s), X=X0 + disp)
