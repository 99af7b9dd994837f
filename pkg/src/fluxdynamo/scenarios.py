"""Named scenarios evaluated from a flat parameter map.

Each scenario declares its parameters (with defaults, or ``REQUIRED``) and a
fixed list of output columns, so every row of a sweep has the same shape
whether or not it succeeded.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import flows, induction
from .classification import DEFAULT_TOL, GrowthCurve, classify, default_eta_ladder
from .geometry import CurveProfile
from .tube_metric import (
    metric_factor,
    riemann_components_quoted,
    riemann_oracle,
    riemann_thin_tube,
    symmetry_defect,
    tube_riemann_tensor,
)

REQUIRED = object()


@dataclass(frozen=True)
class ScenarioResult:
    outputs: dict[str, object]
    gamma: complex | None
    gamma_convention: str
    dynamo_class: str
    sources: tuple[str, ...]
    annotations: tuple[str, ...] = ()


@dataclass(frozen=True)
class Scenario:
    name: str
    params: dict[str, object]
    outputs: tuple[str, ...]
    evaluate: Callable[[dict[str, float], float], ScenarioResult]
    integer_params: tuple[str, ...] = field(default=())

    def resolve(self, given: dict[str, float]) -> dict[str, float]:
        """Fill defaults; caller has already rejected unknown keys."""
        out = {}
        for key, default in self.params.items():
            if key in given:
                out[key] = given[key]
            elif default is REQUIRED:
                raise KeyError(key)
            else:
                out[key] = default
        return out


def _label(fn: Callable[[float], complex], tol: float, provenance: str):
    dc = classify(GrowthCurve.from_function(fn, default_eta_ladder(), provenance), tol)
    return dc.label.value, dc.annotations


def _diffusive_filament(p, tol):
    k0, amp, wn = p["kappa0"], p["kappa_amp"], p["kappa_wavenumber"]
    tau0, length = p["tau0"], p["length"]
    if not length > 0:
        raise ValueError("length must be positive")
    profile = CurveProfile.from_callables(
        lambda s: k0 + amp * np.sin(wn * s), lambda s: tau0 + 0.0 * s, (0.0, length)
    )
    sol = induction.diffusive_filament_solve(p["B0"], profile, p["eta"])
    energy = profile.curvature_energy(length)
    rate = lambda eta: -eta * energy / length
    label, notes = _label(rate, tol, "diffusive_filament")
    return ScenarioResult(
        outputs={
            "curvature_energy": energy,
            "total_torsion": profile.total_torsion(length),
            "B_s_end": float(sol.B_s_of_s(length)),
            "B_s_end_literal": float(sol.B_s_literal_of_s(length)),
            "kappa_end": float(sol.kappa_of_s(length)),
            "v_s_constraint": sol.v_s_constraint,
        },
        gamma=rate(p["eta"]),
        gamma_convention="1/cm (mean decay exponent per unit arclength)",
        dynamo_class=label,
        sources=("closed_form_squared_curvature", "literal_first_power_curvature", "total_torsion_growth"),
        annotations=notes + ("helical flow constraint has mismatched units",),
    )


def _euclidean_fast(p, tol):
    n_t = int(p["n_t"])
    if n_t < 2:
        raise ValueError("n_t must be at least 2")
    t = np.linspace(0.0, p["t_end"], n_t)
    series = induction.euclidean_fast_dynamo(
        p["B0"], p["tau0"], p["v0"], p["c1"], t, a=p["a"], weak_torsion=bool(p["weak_torsion"]), s=p["s"]
    )
    g = series.gamma
    label, notes = _label(lambda eta: g, tol, "euclidean_fast")
    doubling = induction.measured_doubling_time(t, series.eps_M) if g != 0 else math.inf
    return ScenarioResult(
        outputs={
            "B_s_end": float(series.B_s[-1]),
            "B_n_end": float(series.B_n[-1]),
            "v_s": series.v_s,
            "eps_M_end": float(series.eps_M[-1]),
            "doubling_time": doubling,
        },
        gamma=g,
        gamma_convention="1/s",
        dynamo_class=label,
        sources=("binormal_flow_stretching", "weak_torsion_branch" if series.weak_torsion else "general_branch"),
        annotations=notes,
    )


def _heliotron(p, tol):
    state = induction.HeliotronState(
        B_s0=p["B_s0"], B_theta0=p["B_theta0"], u_s=p["u_s"], u_theta=p["u_theta"], tau0=p["tau0"],
        U_max=p["U_max"], L=p["L"], Re_m=p["Re_m"], gamma=p["gamma"], a=p["a"], m=int(p["m"]),
        theta_R=p["theta_R"],
    )
    # helical heliotron: axis curvature equals torsion
    K = float(metric_factor(p["r"], p["theta"], p["tau0"]))
    res = induction.heliotron_system_residual(state, p["theta"], p["r"], K)
    g = state.gamma
    label, notes = _label(lambda eta: g, tol, "heliotron")
    return ScenarioResult(
        outputs={
            "eta": state.eta,
            "K": K,
            "residual_1_re": res[0].real,
            "residual_2_re": res[1].real,
            "residual_3_re": res[2].real,
            "residual_3_im": res[2].imag,
            "tau0_nondynamo": induction.heliotron_nondynamo_torsion(p["a"], p["theta_R"], int(p["m"])),
        },
        gamma=g,
        gamma_convention="dimensionless (rate scaled by U_max/L)",
        dynamo_class=label,
        sources=("heliotron_residuals", "nondynamo_torsion"),
        annotations=notes + ("nondynamo torsion has mismatched units",),
    )


def _radial_modes(p, tol):
    eta, gamma = p["eta"], p["gamma"]
    sol = induction.radial_mode_solve(eta, gamma)
    res = max(sol.oracle_residuals())
    gap_p, gap_m = sol.exponent_gaps()
    n_q = sol.quoted.n_plus
    label, notes = _label(lambda e: induction.quoted_growth_rate_plus(n_q, e), tol, "radial_modes")
    consistent = max(gap_p, gap_m) <= 1e-6
    return ScenarioResult(
        outputs={
            "n_plus_oracle": sol.oracle.n_plus,
            "n_minus_oracle": sol.oracle.n_minus,
            "n_plus_quoted": sol.quoted.n_plus,
            "n_minus_quoted": sol.quoted.n_minus,
            "gamma_plus_quoted": sol.growth_formula.gamma_plus,
            "gamma_minus_quoted": sol.growth_formula.gamma_minus,
            "oracle_residual": res,
            "exponent_gap": max(gap_p, gap_m),
            "quoted_roots_verdict": "consistent" if consistent else "inconsistent",
        },
        gamma=gamma,
        gamma_convention="1/s",
        dynamo_class=label,
        sources=tuple(m.value for m in induction.ModeSource),
        annotations=notes,
    )


def _chicone_latushkin(p, tol):
    kappa = p["kappa"]
    g = induction.chicone_latushkin_gamma(p["eta"], kappa)
    label, notes = _label(lambda e: induction.chicone_latushkin_gamma(e, kappa), tol, "chicone_latushkin")
    gc = complex(g)
    return ScenarioResult(
        outputs={"gamma_imag": gc.imag, "oscillatory": gc.imag != 0},
        gamma=gc.real,
        gamma_convention="1/s (real part)",
        dynamo_class=label,
        sources=("anosov_geodesic_flow_rate",),
        annotations=notes,
    )


def _curvature_report(p, tol):
    kappa, r, theta = p["kappa"], p["r"], p["theta"]
    h = p["h"] if p["h"] > 0 else None
    chains = riemann_components_quoted(r, theta, kappa)
    oracle = riemann_oracle(kappa, r, theta, h)
    defects = symmetry_defect(tube_riemann_tensor(kappa, r, theta, h))
    return ScenarioResult(
        outputs={
            "K": float(metric_factor(r, theta, kappa)),
            "R_rsrs_chain_1": chains[0].R_rsrs,
            "R_rsrs_chain_2": chains[1].R_rsrs,
            "R_rsrs_chain_3": chains[2].R_rsrs,
            "R_thetas_thetas_chain_1": chains[0].R_thetas_thetas,
            "R_thetas_thetas_chain_2": chains[1].R_thetas_thetas,
            "R_rsrs_thin_tube": riemann_thin_tube(r),
            "R_rsrs_oracle": oracle.R_rsrs,
            "R_thetas_thetas_oracle": oracle.R_thetas_thetas,
            "symmetry_defect": max(defects.values()),
        },
        gamma=None,
        gamma_convention="",
        dynamo_class="n/a",
        sources=("quoted_chain_1", "quoted_chain_2", "quoted_chain_3", "thin_tube_limit", "oracle"),
    )


def _stretch_analysis(p, tol):
    g_fil = flows.stretch_rate_filament(p["kappa"], p["v_n"], p["v_s_prime"])
    v_th = p["v_theta"]
    exponent = (
        flows.tube_stretch_exponent(v_th, p["v0"], p["tau0"], p["a"]) if v_th != 0 else 0.0
    )
    label, notes = _label(lambda eta: g_fil, tol, "stretch_analysis")
    return ScenarioResult(
        outputs={
            "solenoidal_residual": flows.solenoidal_residual_filament(p["kappa"], p["v_n"], p["v_s_prime"]),
            "gamma_tube": float(flows.stretch_rate_tube(p["kappa"], v_th, p["theta"], p["v_s_prime"])),
            "tube_exponent": exponent,
            "gamma_binormal": flows.binormal_flow_gamma(p["tau0"], p["v0"]),
            "stretch_factor": flows.stretch_factor(g_fil, (0.0, p["t_end"]), p["l0"]),
        },
        gamma=g_fil,
        gamma_convention="1/s",
        dynamo_class=label,
        sources=("filament_line_stretching", "tube_line_stretching", "tube_twist_exponent", "binormal_flow_stretching"),
        annotations=notes,
    )


SCENARIOS: dict[str, Scenario] = {
    s.name: s
    for s in [
        Scenario(
            "diffusive_filament",
            {"B0": 1.0, "kappa0": 1.0, "kappa_amp": 0.0, "kappa_wavenumber": 1.0, "tau0": 0.0,
             "eta": REQUIRED, "length": 1.0},
            ("curvature_energy", "total_torsion", "B_s_end", "B_s_end_literal", "kappa_end", "v_s_constraint"),
            _diffusive_filament,
        ),
        Scenario(
            "euclidean_fast",
            {"B0": 1.0, "tau0": REQUIRED, "v0": REQUIRED, "c1": 0.0, "a": 1.0, "t_end": 1.0,
             "n_t": 11.0, "s": 0.0, "weak_torsion": 0.0},
            ("B_s_end", "B_n_end", "v_s", "eps_M_end", "doubling_time"),
            _euclidean_fast,
            integer_params=("n_t", "weak_torsion"),
        ),
        Scenario(
            "heliotron",
            {"B_s0": 1.0, "B_theta0": 1.0, "u_s": 0.0, "u_theta": 0.0, "tau0": REQUIRED, "U_max": 1.0,
             "L": 1.0, "Re_m": 210.0, "gamma": 0.0, "a": 1.0, "m": 0.0, "theta_R": 0.0, "r": 0.5,
             "theta": 0.0},
            ("eta", "K", "residual_1_re", "residual_2_re", "residual_3_re", "residual_3_im", "tau0_nondynamo"),
            _heliotron,
            integer_params=("m",),
        ),
        Scenario(
            "radial_modes",
            {"eta": REQUIRED, "gamma": 0.0},
            ("n_plus_oracle", "n_minus_oracle", "n_plus_quoted", "n_minus_quoted", "gamma_plus_quoted",
             "gamma_minus_quoted", "oracle_residual", "exponent_gap", "quoted_roots_verdict"),
            _radial_modes,
        ),
        Scenario(
            "chicone_latushkin",
            {"eta": 0.0, "kappa": REQUIRED},
            ("gamma_imag", "oscillatory"),
            _chicone_latushkin,
        ),
        Scenario(
            "curvature_report",
            {"kappa": 0.2, "r": 0.5, "theta": 0.0, "h": 0.0},
            ("K", "R_rsrs_chain_1", "R_rsrs_chain_2", "R_rsrs_chain_3", "R_thetas_thetas_chain_1",
             "R_thetas_thetas_chain_2", "R_rsrs_thin_tube", "R_rsrs_oracle", "R_thetas_thetas_oracle",
             "symmetry_defect"),
            _curvature_report,
        ),
        Scenario(
            "stretch_analysis",
            {"kappa": 1.0, "v_n": 0.0, "v_s_prime": 0.0, "v_theta": 0.0, "theta": 0.0, "tau0": 1.0,
             "v0": 1.0, "a": 1.0, "l0": 1.0, "t_end": 1.0},
            ("solenoidal_residual", "gamma_tube", "tube_exponent", "gamma_binormal", "stretch_factor"),
            _stretch_analysis,
        ),
    ]
}


def evaluate(name: str, params: dict[str, float], tol: float = DEFAULT_TOL) -> ScenarioResult:
    scenario = SCENARIOS[name]
    return scenario.evaluate(scenario.resolve(params), tol)
