"""Verification batteries run by ``bresse verify`` and the acceptance tests."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .diagnostics import dissipation_residual, energy_forms, spectrum
from .discretization import build_system
from .model_catalog import (
    Cattaneo,
    Coefficients,
    CouplingPattern,
    Fourier,
    GreenNaghdiIII,
    GurtinPipkin,
    ModelSpec,
    PronyKernel,
    SAMPLE_LAWS,
    TypeIIIMemory,
)
from .time_integration import IntegratorConfig, integrate

DESK = Coefficients(
    rho1=1.0,
    rho2=0.8,
    k=1.5,
    k0=1.2,
    b=0.9,
    ell=1.3,
    m1=0.4,
    m2=0.3,
    m3=0.5,
    varrho1=1.0,
    varrho2=1.1,
    varrho3=0.9,
    gamma1=0.8,
    gamma2=0.7,
    gamma3=1.0,
)

THERMAL_PATTERNS = tuple(p for p in CouplingPattern if p is not CouplingPattern.Elastic)


@dataclass(frozen=True)
class Check:
    name: str
    value: float
    tolerance: float
    passed: bool
    relation: str = "<="

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status}  {self.name}: {self.value:.3e} {self.relation} {self.tolerance:.3e}"


def all_specs(coefficients: Coefficients = DESK, **kw) -> list[tuple[str, ModelSpec]]:
    out = []
    for law_name, law in SAMPLE_LAWS.items():
        for pattern in THERMAL_PATTERNS:
            out.append((f"({pattern.name}, {law_name})", ModelSpec(coefficients, pattern, law, **kw)))
    out.append(("(Elastic)", ModelSpec(coefficients, CouplingPattern.Elastic, **kw)))
    return out


def smooth_state(sys) -> np.ndarray:
    """Low-mode sine data on every slot; each slot gets its own mode and amplitude."""
    u = sys.zeros()
    for n, slot in enumerate(sys.slots):
        x = sys.coordinates(slot.name) / sys.grid.L
        mode = 1 + n % 3
        amp = 1.0 / (1 + n % 4) * (0.5 if slot.derivative else 1.0)
        u[slot.slice] = amp * np.sin(mode * np.pi * x)
    return u


def mechanical_state(sys) -> np.ndarray:
    """Sine data on the displacements and velocities only."""
    u = sys.zeros()
    profiles = {"phi": (1, 1.0), "psi": (2, 0.5), "w": (1, 0.3), "phi_t": (2, 0.2), "psi_t": (1, 0.1), "w_t": (3, 0.1)}
    for name, (mode, amp) in profiles.items():
        x = sys.coordinates(name) / sys.grid.L
        u[sys.layout[name]] = amp * np.sin(mode * np.pi * x)
    return u


def energy_series(spec: ModelSpec, N: int, cfg: IntegratorConfig, state=mechanical_state):
    sys = build_system(spec, N)
    traj = integrate(sys, state(sys), cfg)
    return traj.times, np.asarray(energy_forms(sys)[0].value(traj.states.T))


# ---------------------------------------------------------------------------
# batteries
# ---------------------------------------------------------------------------


def energy_identity_checks(N: int = 16, dt: float = 1e-3, T: float = 1.0) -> list[Check]:
    """Discrete identity ``(E_{n+1} - E_n)/dt + D_{n+1/2} = 0`` for every combination."""
    cfg = IntegratorConfig(dt=dt, T=T)
    checks = []
    for label, spec in all_specs():
        sys = build_system(spec, N)
        u0 = smooth_state(sys)
        traj = integrate(sys, u0, cfg)
        res = dissipation_residual(traj, sys)
        E0 = float(energy_forms(sys)[0].value(u0))
        tol = 1e-7 * max(E0, 1.0)
        worst = float(np.max(np.abs(res)))
        checks.append(Check(f"energy identity {label}", worst, tol, worst <= tol))
    return checks


def conservation_checks(N: int = 16, dt: float = 1e-3, steps: int = 1000) -> list[Check]:
    cfg = IntegratorConfig(dt=dt, T=dt * steps)
    cases = {
        "(Elastic)": ModelSpec(DESK, CouplingPattern.Elastic),
        "(Full, GreenNaghdiIII type II)": ModelSpec(DESK, CouplingPattern.Full, GreenNaghdiIII(beta=1.0, varpi=0.0)),
    }
    checks = []
    for label, spec in cases.items():
        _, E = energy_series(spec, N, cfg, smooth_state)
        drift = float(np.max(np.abs(E - E[0])) / E[0])
        checks.append(Check(f"energy drift {label}", drift, 1e-9, drift <= 1e-9))
    return checks


def abscissa_checks(N: int = 12) -> list[Check]:
    checks = []
    for label, spec in all_specs():
        if spec.coupling is CouplingPattern.Elastic:
            continue
        rep = spectrum(build_system(spec, N).operator)
        checks.append(Check(f"spectral abscissa {label}", rep.abscissa, -1e-8, rep.abscissa <= -1e-8))
    return checks


def monotone_energy_checks(N: int = 16, dt: float = 1e-3, T: float = 1.0) -> list[Check]:
    """Output-step energy increments, relative to ``E_0``, must not be positive beyond rounding."""
    cfg = IntegratorConfig(dt=dt, T=T)
    checks = []
    for label, spec in all_specs():
        if spec.coupling is CouplingPattern.Elastic:
            continue
        _, E = energy_series(spec, N, cfg, smooth_state)
        rise = float(np.max(np.diff(E)) / E[0])
        checks.append(Check(f"energy non-increasing {label}", rise, 1e-13, rise <= 1e-13))
    return checks


def spectrum_checks(N: int = 12) -> list[Check]:
    sys = build_system(ModelSpec(DESK, CouplingPattern.Elastic), N)
    rep = spectrum(sys.operator, DESK)
    tol = 1e-9 * rep.norm
    return [
        Check("elastic |abscissa|", abs(rep.abscissa), tol, abs(rep.abscissa) <= tol),
        Check("elastic conjugate closure", 0.0 if rep.conjugate_closed else 1.0, 0.0, rep.conjugate_closed),
        *abscissa_checks(N),
    ]


def _gaps(reference: np.ndarray, runs: list[np.ndarray]) -> list[float]:
    return [float(np.max(np.abs(E - reference))) for E in runs]


def _monotone_check(name: str, gaps: list[float]) -> Check:
    ratio = max(b / a for a, b in zip(gaps, gaps[1:]))
    return Check(f"{name} gaps {', '.join(f'{g:.2e}' for g in gaps)}; max ratio", ratio, 1.0, ratio < 1.0, "<")


def limit_checks(N: int = 16, dt: float = 1e-3, T: float = 1.0) -> list[Check]:
    cfg = IntegratorConfig(dt=dt, T=T)
    bending = CouplingPattern.SingleBending

    def run(law):
        return energy_series(ModelSpec(DESK, bending, law), N, cfg)[1]

    # Cattaneo at unit conductivity is the relaxation of the unit Fourier law
    fourier = run(Fourier())
    cf = _gaps(fourier, [run(Cattaneo(tau, varpi=1.0)) for tau in (1e-1, 1e-2, 1e-3)])

    gp = []
    for eps in (1e-1, 1e-2):
        kernel = PronyKernel.single(1.0 / eps**2, 1.0 / eps)
        gp.append(float(np.max(np.abs(run(GurtinPipkin(kernel)) - run(Cattaneo(eps))))))

    gn = run(GreenNaghdiIII(beta=1.0, varpi=1.0))
    mm = _gaps(
        gn,
        [run(TypeIIIMemory(1.0, 1.0, PronyKernel.single(1.0 / eps**2, 1.0 / eps))) for eps in (1e-1, 1e-2, 1e-3)],
    )
    return [
        _monotone_check("Cattaneo->Fourier", cf),
        _monotone_check("GurtinPipkin->Cattaneo", gp),
        _monotone_check("TypeIIIMemory->GreenNaghdiIII", mm),
    ]


SUITES: dict[str, Callable[[], list[Check]]] = {
    "energy": lambda: energy_identity_checks() + conservation_checks() + monotone_energy_checks(),
    "limits": limit_checks,
    "spectrum": spectrum_checks,
}


def run_suite(name: str) -> list[Check]:
    if name == "all":
        return [c for key in SUITES for c in SUITES[key]()]
    return SUITES[name]()
