"""Discrepancy report: quoted closed forms against independent oracles.

Each entry compares one quoted expression at one evaluation point with an
oracle value. Entries with no oracle counterpart carry a dimensional warning
instead of a gap.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from . import induction
from .config import ScenarioConfig
from .geometry import CurveProfile
from .output import format_value
from .scenarios import SCENARIOS
from .tube_metric import riemann_components_quoted, riemann_oracle, riemann_thin_tube

DEFAULT_REPORT_TOL = 1e-6
RE_M_THRESHOLD_QUOTED = 210.0

CURVATURE_RADII = (0.25, 0.5, 0.75)
CURVATURE_ANGLES = (0.0, math.pi / 3, math.pi / 2)

# filament decay check: kappa(s) = 1 + 0.1 sin(s), eta = 0.05, L = 20
FILAMENT_ETA = 0.05
FILAMENT_LENGTH = 20.0


class Verdict(str, enum.Enum):
    CONSISTENT = "consistent"
    INCONSISTENT = "inconsistent"
    DIMENSIONAL_WARNING = "dimensional_warning"


@dataclass(frozen=True)
class ReportEntry:
    equation_id: str
    point: str
    quoted_values: tuple[complex, ...]
    oracle_value: complex | None
    abs_gap: float | None
    rel_gap: float | None
    verdict: Verdict
    note: str = ""

    def as_row(self) -> dict:
        return {
            "equation_id": self.equation_id,
            "point": self.point,
            "quoted_values": ";".join(format_value(v) for v in self.quoted_values),
            "oracle_value": self.oracle_value,
            "abs_gap": self.abs_gap,
            "rel_gap": self.rel_gap,
            "verdict": self.verdict.value,
            "note": self.note,
        }


@dataclass(frozen=True)
class DiscrepancyReport:
    entries: tuple[ReportEntry, ...]
    tolerance: float
    metadata: dict

    COLUMNS = ("equation_id", "point", "quoted_values", "oracle_value", "abs_gap", "rel_gap", "verdict", "note")

    def ids(self) -> set[str]:
        return {e.equation_id for e in self.entries}

    def find(self, equation_id: str) -> list[ReportEntry]:
        return [e for e in self.entries if e.equation_id == equation_id]

    def rows(self) -> list[dict]:
        return [e.as_row() for e in self.entries]


def compare(equation_id, point, quoted, oracle, tol, note="") -> ReportEntry:
    """Entry for a single quoted value against an oracle value."""
    if oracle is None or quoted is None:
        return ReportEntry(equation_id, point, (quoted,), oracle, None, None, Verdict.INCONSISTENT, note or "missing value")
    gap = abs(quoted - oracle)
    if oracle != 0:
        rel = gap / abs(oracle)
    else:
        rel = 0.0 if gap == 0 else math.inf
    verdict = Verdict.CONSISTENT if gap <= tol * max(1.0, abs(oracle)) else Verdict.INCONSISTENT
    return ReportEntry(equation_id, point, (quoted,), oracle, float(gap), float(rel), verdict, note)


def dimensional(equation_id, point, quoted, note) -> ReportEntry:
    return ReportEntry(equation_id, point, (quoted,), None, None, None, Verdict.DIMENSIONAL_WARNING, note)


def _point(**kw) -> str:
    return ";".join(f"{k}={float(v)!r}" for k, v in kw.items())


def _curvature_entries(kappa, points, h, tol) -> list[ReportEntry]:
    out = []
    for r, theta in points:
        pt = _point(kappa=kappa, r=r, theta=theta)
        oracle = riemann_oracle(kappa, r, theta, h)
        chains = riemann_components_quoted(r, theta, kappa)
        for i, c in enumerate(chains, start=1):
            out.append(compare(f"riemann_rsrs.chain_{i}", pt, c.R_rsrs, oracle.R_rsrs, tol))
        for i, c in enumerate(chains[:2], start=1):
            out.append(compare(f"riemann_thetas_thetas.chain_{i}", pt, c.R_thetas_thetas, oracle.R_thetas_thetas, tol))
        out.append(
            compare("riemann_rsrs.thin_tube", pt, riemann_thin_tube(r), oracle.R_rsrs, tol,
                    "thin-tube limit -1/r^2")
        )
    return out


def _radial_entries(eta, gamma, tol) -> list[ReportEntry]:
    pt = _point(eta=eta, gamma=gamma)
    sol = induction.radial_mode_solve(eta, gamma)
    companion = sorted(np.roots([1.0, 3.0, 2.0 - gamma / eta]), key=lambda z: (z.real, z.imag), reverse=True)
    formula = (sol.oracle.n_plus, sol.oracle.n_minus)
    gap = max(abs(complex(a) - complex(b)) for a, b in zip(formula, companion))
    verdict = Verdict.CONSISTENT if gap <= tol * max(1.0, max(abs(z) for z in companion)) else Verdict.INCONSISTENT
    out = [
        ReportEntry(
            "radial_modes.quadratic_roots", pt, formula, complex(companion[0]), float(gap), None, verdict,
            "quadratic formula vs companion-matrix eigenvalues; oracle_value shows the + root",
        )
    ]
    out.append(compare("radial_modes.quoted_roots.plus", pt, sol.quoted.n_plus, sol.oracle.n_plus, tol))
    out.append(compare("radial_modes.quoted_roots.minus", pt, sol.quoted.n_minus, sol.oracle.n_minus, tol))

    marginal = induction.radial_mode_solve(eta, 0.0)
    mpt = _point(eta=eta, gamma=0.0)
    q_plus, q_minus = induction.QUOTED_MARGINAL_EXPONENTS
    out.append(compare("radial_modes.marginal_exponents.plus", mpt, q_plus, marginal.oracle.n_plus, tol,
                       "quoted marginal mode B ~ r^2"))
    out.append(compare("radial_modes.marginal_exponents.minus", mpt, q_minus, marginal.oracle.n_minus, tol,
                       "quoted marginal mode B ~ r^-5"))
    out.append(compare("radial_modes.growth_rates.plus", pt, sol.growth_formula.gamma_plus, gamma, tol,
                       "4(n+ - 2) eta at the quoted n+ vs the gamma that defined the mode"))
    out.append(compare("radial_modes.growth_rates.minus", pt, sol.growth_formula.gamma_minus, gamma, tol,
                       "-4(n- + 5) eta at the quoted n- vs the gamma that defined the mode"))
    return out


def _filament_entries(tol) -> list[ReportEntry]:
    profile = CurveProfile.from_callables(lambda s: 1.0 + 0.1 * np.sin(s), lambda s: 0.0 * s + 1.0,
                                          (0.0, FILAMENT_LENGTH))
    sol = induction.diffusive_filament_solve(1.0, profile, FILAMENT_ETA)
    pt = _point(eta=FILAMENT_ETA, length=FILAMENT_LENGTH)
    closed = float(sol.B_s_of_s(FILAMENT_LENGTH))
    ode = float(induction.integrate_filament_decay(profile, FILAMENT_ETA, 1.0, FILAMENT_LENGTH, 2)[0])
    literal = sol.B_s_literal_of_s(FILAMENT_LENGTH)
    return [
        compare("filament_decay.closed_form", pt, closed, ode, tol,
                "B0 exp(-eta int kappa^2) vs ODE integration with kappa^2; kappa = 1 + 0.1 sin s"),
        compare("filament_decay.governing_equation", pt, closed, literal, tol,
                "closed form vs integration of the governing equation with kappa to the first power"),
        dimensional("filament_decay.helical_constraint", _point(tau0=1.0), sol.v_s_constraint,
                    "v_s = -tau0^2 equates a speed with an inverse area"),
    ]


def _heliotron_entries() -> list[ReportEntry]:
    a, theta_R, m = 1.0, 0.0, 1
    value = induction.heliotron_nondynamo_torsion(a, theta_R, m)
    return [
        dimensional("heliotron.nondynamo_torsion", _point(a=a, theta_R=theta_R, m=m), value,
                    "torsion (1/cm) set equal to an angle divided by a length"),
    ]


def _zeldovich_entries(tol) -> list[ReportEntry]:
    tau0, a, length, kappa = 0.5, 1.0, 2.0, 0.2
    grid = induction.tube_volume_grid(a, length, kappa, 32, 32, 32)
    B_theta = 1.0 + 0.5 * grid.r * np.cos(grid.theta)
    B_s = B_theta / (tau0 * grid.r)
    v_s, v_theta = 1.0, 0.3 * grid.r
    rate = induction.zeldovich_rate(B_s, B_theta, v_s, v_theta, tau0, grid.r, grid.theta, grid.dV)
    scale = float(np.max(np.abs(B_s))) ** 2 * grid.volume
    pt = _point(tau0=tau0, a=a, length=length, kappa=kappa)
    entry = compare("zeldovich.marginal_condition", pt, 0.0, rate.d_eps_dt / scale, tol,
                    "energy rate normalised by field scale^2 * volume with B_s = B_theta / (tau0 r)")
    return [entry]


def _anosov_entries(eta, tol) -> list[ReportEntry]:
    g = induction.chicone_latushkin_gamma(eta, 0.0)
    return [compare("anosov_rate.flat_limit", _point(eta=eta, kappa=0.0), 0.0, complex(g).real, tol,
                    "growth rate with vanishing Gaussian curvature")]


def build_report(config: ScenarioConfig, tol: float = DEFAULT_REPORT_TOL) -> DiscrepancyReport:
    if config.scenario not in ("curvature_report", "radial_modes"):
        raise ValueError("report needs a curvature_report or radial_modes config")
    p = SCENARIOS["curvature_report"].resolve(config.parameters if config.scenario == "curvature_report" else {})
    kappa = p["kappa"]
    h = p["h"] if p["h"] > 0 else None
    points = [(r, th) for r in CURVATURE_RADII for th in CURVATURE_ANGLES]
    if config.scenario == "curvature_report" and (p["r"], p["theta"]) not in points:
        points.append((p["r"], p["theta"]))

    if config.scenario == "radial_modes":
        rp = SCENARIOS["radial_modes"].resolve(config.parameters)
        eta, gamma = rp["eta"], rp["gamma"]
    else:
        eta, gamma = 1e-3, 0.0

    entries = (
        _curvature_entries(kappa, points, h, tol)
        + _radial_entries(eta, gamma, tol)
        + _filament_entries(tol)
        + _heliotron_entries()
        + _zeldovich_entries(tol)
        + _anosov_entries(eta, tol)
    )
    metadata = {
        "scenario": config.scenario,
        "tolerance": tol,
        "re_m_threshold_quoted": RE_M_THRESHOLD_QUOTED,
        "note": "Re_m threshold is context only; no formula uses it",
    }
    return DiscrepancyReport(tuple(entries), tol, metadata)
