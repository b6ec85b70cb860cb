"""Energy functionals, dissipation identity, decay fits and spectra.

Per-law energy ``E`` and dissipation ``D`` with ``dE/dt = -D`` (continuous
form, channel ``i`` with heat capacity ``r = varrho_i``, ``g = gamma_i``,
coupling ``m_i`` and conductivity ``c``):

=============== ============================================ ==========================================
law             thermal energy                               dissipation
=============== ============================================ ==========================================
Fourier         r/2 |theta|^2                                g c |theta_x|^2
Cattaneo, LS    r/2 |theta|^2 + g tau/(2c) |q|^2              g/c |q|^2
Tzou (flux)     r/2 |theta|^2 + g/c Q(Y, V)                  g/c [(tau tau_th - tau^2/2)|V|^2 + |Y|^2]
Gurtin-Pipkin   r/2 |theta|^2 + g c/2 sum c_j/b_j |z_j,x|^2  g c sum c_j |z_j,x|^2
Coleman-Gurtin  as Gurtin-Pipkin                             g(1-c)|theta_x|^2 + g c sum c_j |z_j,x|^2
Green-Naghdi    r/2 |p_t|^2 + g beta/2 |p_x|^2               g c |p_tx|^2
Type III mem.   GN + g c/2 sum c_j |(p - z_j)_x|^2           g c sum a_j |(p - z_j)_x|^2
=============== ============================================ ==========================================

``c_j = a_j / b_j`` for a Prony kernel; for Tzou ``q = Y + tau_th V`` and
``s = (tau^2/2 - tau tau_th) V - tau_th Y`` with
``Q = tau^2/2 <V,Y> + tau^2 tau_th/4 |V|^2 + (tau + tau_th)/2 |Y|^2``.
Gradients use one-sided differences between neighbouring nodes, which is the
norm the compact Laplacian induces.
"""

from __future__ import annotations

import csv
import os
import tempfile
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp

from .discretization import SemiDiscreteSystem, kind_weights
from .model_catalog import (
    Cattaneo,
    Coefficients,
    ColemanGurtin,
    Fourier,
    GreenNaghdiIII,
    GurtinPipkin,
    LordShulman,
    TypeIIIMemory,
    TzouDPL,
    stability_number,
)

ENERGY_COLUMNS = (
    "t",
    "E_total",
    "E_mech",
    "E_therm1",
    "E_therm2",
    "E_therm3",
    "E_flux1",
    "E_flux2",
    "E_flux3",
    "E_mem",
    "D",
    "residual",
)
MECH_PARTS = ("kinetic", "shear", "bending", "axial")


class DiagnosticsError(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# quadratic forms
# ---------------------------------------------------------------------------


@dataclass
class QuadraticForm:
    """``sum_c coef_c (A_c u)^T diag(w_c) (B_c u)`` grouped by channel."""

    dim: int
    pieces: list = field(default_factory=list)

    def add(self, channel: str, coef: float, A, w, B=None):
        if coef != 0.0:
            A = sp.csr_matrix(A)
            B = A if B is None else sp.csr_matrix(B)
            self.pieces.append((channel, float(coef), A, np.asarray(w, float), B))

    def channels(self) -> list[str]:
        seen = []
        for ch, *_ in self.pieces:
            if ch not in seen:
                seen.append(ch)
        return seen

    def components(self, u: np.ndarray) -> dict[str, np.ndarray]:
        """Per-channel values for a state (D,) or a batch of states (D, K)."""
        out: dict[str, np.ndarray] = {}
        for ch, coef, A, w, B in self.pieces:
            a = A @ u
            b = a if B is A else B @ u
            val = coef * np.einsum("i...,i,i...->...", a, w, b)
            out[ch] = out.get(ch, 0.0) + val
        return out

    def value(self, u: np.ndarray):
        comps = self.components(u)
        return sum(comps.values()) if comps else np.zeros(np.shape(u)[1:])

    def matrix(self) -> np.ndarray:
        """Symmetric ``H`` with ``value(u) = u^T H u``."""
        H = np.zeros((self.dim, self.dim))
        for _, coef, A, w, B in self.pieces:
            H += coef * (A.T @ sp.diags(w) @ B).toarray()
        return 0.5 * (H + H.T)


def _select(sys: SemiDiscreteSystem, name: str) -> sp.csr_matrix:
    sl = sys.layout[name]
    n = sl.stop - sl.start
    return sp.csr_matrix((np.ones(n), (np.arange(n), np.arange(sl.start, sl.stop))), shape=(n, sys.dim))


def _forward_difference(kind: str, N: int, h: float) -> sp.csr_matrix:
    """Differences between consecutive nodes ``x_0 .. x_{N+1}`` (N+1 values)."""
    n = N if kind == "dir" else N + 2
    offset = 1 if kind == "dir" else 0
    # node values including the zero boundary entries of a Dirichlet field
    full = sp.eye(N + 2, n, k=-offset, format="csr")
    return ((full[1:] - full[:-1]) / h).tocsr()


def _conductivity(law, c: Coefficients, i: int) -> float:
    varpi = getattr(law, "varpi", None)
    if isinstance(law, Cattaneo) and varpi is None:
        return c.gamma(i)
    return 1.0 if varpi is None else float(varpi)


def _energy_and_dissipation(sys: SemiDiscreteSystem) -> tuple[QuadraticForm, QuadraticForm]:
    desc = sys.description
    sym = desc.symbols
    c = Coefficients(**{k: sym[k] for k in Coefficients.__dataclass_fields__})
    grid = sys.grid
    N, h = grid.N, grid.h
    E = QuadraticForm(sys.dim)
    Dq = QuadraticForm(sys.dim)

    sel = lambda name: _select(sys, name)  # noqa: E731
    W = sys.weights
    half_w = np.full(N + 1, h)

    def grad(name):
        return _forward_difference(sys.slot(name).kind, N, h) @ sel(name)

    # mechanics; E carries a factor 1/2, applied at the end
    E.add("kinetic", c.rho1, sel("phi_t"), W("phi_t"))
    E.add("kinetic", c.rho2, sel("psi_t"), W("psi_t"))
    E.add("kinetic", c.rho1, sel("w_t"), W("w_t"))
    Dphi = sp.csr_matrix(sys.stencil("psi", "phi", 1)) @ sel("phi")
    Ww = W("psi")
    shear = Dphi + sel("psi") + c.ell * sel("w")
    E.add("shear", c.k, grad("phi"), half_w)
    E.add("shear", c.k, shear, Ww)
    E.add("shear", -c.k, Dphi, Ww)
    E.add("bending", c.b, grad("psi"), half_w)
    E.add("axial", c.k0, grad("w"), half_w)
    E.add("axial", 2 * c.k0 * c.ell, Dphi, Ww, sel("w"))
    E.add("axial", c.k0 * c.ell**2, sel("phi"), W("phi"))

    law = desc.law
    for i in desc.coupling.channels:
        r, g = c.varrho(i), c.gamma(i)
        cond = _conductivity(law, c, i)
        th, q, s, p = f"theta{i}", f"q{i}", f"s{i}", f"p{i}"
        therm, flux = f"therm{i}", f"flux{i}"
        if isinstance(law, (Fourier, GurtinPipkin, ColemanGurtin, Cattaneo, LordShulman, TzouDPL)) or (
            isinstance(law, GreenNaghdiIII) and law.beta == 0
        ):
            E.add(therm, r, sel(th), W(th))
        if isinstance(law, Fourier) or (isinstance(law, GreenNaghdiIII) and law.beta == 0):
            Dq.add(therm, g * cond, grad(th), half_w)
        elif isinstance(law, (Cattaneo, LordShulman)):
            E.add(flux, g * law.tau / cond, sel(q), half_w)
            Dq.add(flux, g / cond, sel(q), half_w)
        elif isinstance(law, TzouDPL):
            tau, tt = law.tau_q, law.tau_theta
            a = tau**2 / 2 - tau * tt
            det = a + tt**2
            Y = (a * sel(q) - tt * sel(s)) / det
            V = (tt * sel(q) + sel(s)) / det
            f = g / cond
            E.add(flux, f * tau**2, V, half_w, Y)
            E.add(flux, f * tau**2 * tt / 2, V, half_w)
            E.add(flux, f * (tau + tt), Y, half_w)
            Dq.add(flux, f * (tau * tt - tau**2 / 2), V, half_w)
            Dq.add(flux, f, Y, half_w)
        elif isinstance(law, (GurtinPipkin, ColemanGurtin)):
            kernel = law.kernel
            if isinstance(law, ColemanGurtin):
                Dq.add(therm, g * (1 - cond), grad(th), half_w)
            for j, (aj, bj) in enumerate(kernel.modes, start=1):
                z = f"z{i}_{j}"
                E.add("mem", g * cond * aj / bj**2, grad(z), half_w)
                Dq.add("mem", g * cond * aj / bj, grad(z), half_w)
        elif isinstance(law, (GreenNaghdiIII, TypeIIIMemory)):
            E.add(therm, r, sel(f"{p}_t"), W(f"{p}_t"))
            E.add(therm, g * law.beta, grad(p), half_w)
            if isinstance(law, GreenNaghdiIII):
                Dq.add(therm, g * law.varpi, grad(f"{p}_t"), half_w)
            else:
                for j, (aj, bj) in enumerate(law.kernel.modes, start=1):
                    rel = grad(p) - grad(f"z{i}_{j}")
                    E.add("mem", g * law.varpi * aj / bj, rel, half_w)
                    Dq.add("mem", g * law.varpi * aj, rel, half_w)
        else:  # pragma: no cover - guarded by ModelSpec
            raise DiagnosticsError(f"no energy for law {law!r}")

    for k, piece in enumerate(E.pieces):
        ch, coef, A, w, B = piece
        E.pieces[k] = (ch, 0.5 * coef, A, w, B)
    return E, Dq


_FORMS: dict[int, tuple] = {}


def energy_forms(sys: SemiDiscreteSystem) -> tuple[QuadraticForm, QuadraticForm]:
    key = id(sys)
    hit = _FORMS.get(key)
    if hit is None or hit[0] is not sys:
        hit = (sys, *_energy_and_dissipation(sys))
        _FORMS[key] = hit
    return hit[1], hit[2]


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------


@dataclass
class EnergyReport:
    """Energy series with per-channel breakdown."""

    times: np.ndarray
    components: dict[str, np.ndarray]
    dissipation: np.ndarray
    residual: np.ndarray  # length len(times) - 1

    @property
    def total(self) -> np.ndarray:
        return sum(self.components.values())

    @property
    def mechanical(self) -> np.ndarray:
        return sum(v for k, v in self.components.items() if k in MECH_PARTS)

    def column(self, name: str) -> np.ndarray:
        return self.components.get(name, np.zeros_like(self.times))

    def rows(self):
        total, mech = self.total, self.mechanical
        res = np.append(self.residual, np.nan)
        for n, t in enumerate(self.times):
            yield [
                t,
                total[n],
                mech[n],
                *(self.column(f"therm{i}")[n] for i in (1, 2, 3)),
                *(self.column(f"flux{i}")[n] for i in (1, 2, 3)),
                self.column("mem")[n],
                self.dissipation[n],
                res[n],
            ]

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(ENERGY_COLUMNS)
            for row in self.rows():
                w.writerow([f"{v:.17g}" for v in row])


@dataclass(frozen=True)
class EnergyEntry:
    total: float
    components: dict
    dissipation: float


def energy(sys: SemiDiscreteSystem, u: np.ndarray) -> EnergyEntry:
    E, Dq = energy_forms(sys)
    comps = {k: float(v) for k, v in E.components(u).items()}
    return EnergyEntry(sum(comps.values()), comps, float(Dq.value(u)))


def dissipation(sys: SemiDiscreteSystem, u: np.ndarray):
    return energy_forms(sys)[1].value(u)


def energy_report(traj, sys: SemiDiscreteSystem, residual: np.ndarray | None = None) -> EnergyReport:
    """Energies along a trajectory plus the discrete identity residual.

    ``residual`` overrides the sample-based residual, e.g. with per-step
    values collected by :class:`StepResidual` when the trajectory is strided.
    """
    E, Dq = energy_forms(sys)
    U = traj.states.T
    comps = {ch: np.broadcast_to(v, traj.times.shape).copy() for ch, v in E.components(U).items()}
    if residual is None:
        residual = dissipation_residual(traj, sys)
    return EnergyReport(traj.times, comps, np.asarray(Dq.value(U)), residual)


class StepResidual:
    """``on_step`` hook keeping, per output interval, the largest-magnitude step residual."""

    def __init__(self, sys: SemiDiscreteSystem, dt: float, stride: int):
        self.E, self.D = energy_forms(sys)
        self.dt, self.stride = dt, stride
        self.values: list[float] = []
        self._window = 0.0

    def __call__(self, i: int, u_prev: np.ndarray, u_next: np.ndarray) -> None:
        r = (self.E.value(u_next) - self.E.value(u_prev)) / self.dt + self.D.value(0.5 * (u_prev + u_next))
        if abs(r) >= abs(self._window):
            self._window = float(r)
        if i % self.stride == 0:
            self.values.append(self._window)
            self._window = 0.0

    @property
    def residual(self) -> np.ndarray:
        return np.asarray(self.values)


def dissipation_residual(traj, sys: SemiDiscreteSystem) -> np.ndarray:
    """``r_n = (E_{n+1} - E_n)/dt + D((u_n + u_{n+1})/2)``.

    Exact (up to rounding) for the implicit midpoint rule with stride 1.
    """
    if len(traj.times) < 2:
        raise DiagnosticsError("trajectory needs at least two samples")
    dts = np.diff(traj.times)
    if not np.allclose(dts, dts[0], rtol=1e-9, atol=0):
        raise DiagnosticsError("trajectory samples must be uniformly spaced")
    E, Dq = energy_forms(sys)
    U = traj.states.T
    e = np.asarray(E.value(U))
    mid = 0.5 * (U[:, 1:] + U[:, :-1])
    return np.diff(e) / dts[0] + np.asarray(Dq.value(mid))


def energy_matrix(sys: SemiDiscreteSystem) -> np.ndarray:
    """Gram matrix ``H`` of the energy, ``E(u) = u^T H u``."""
    return energy_forms(sys)[0].matrix()


# ---------------------------------------------------------------------------
# decay fits
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DecayFit:
    kind: str  # "exponential" | "polynomial" | "none"
    rate: float
    r2: float
    r2_exponential: float
    r2_polynomial: float


def _linfit(x, y):
    A = np.vstack([x, np.ones_like(x)]).T
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    pred = A @ coef
    ss_res = float(np.sum((y - pred) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else (1.0 if ss_res == 0 else 0.0)
    return coef[0], r2


def fit_decay(times, energies, *, threshold: float = 0.9, window: float = 0.5) -> DecayFit:
    """Fit ``E ~ exp(-rate t)`` and ``E ~ t^-rate`` on the trailing window."""
    t = np.asarray(times, float)
    e = np.asarray(energies, float)
    if len(e) < 32:
        raise DiagnosticsError("decay fit needs at least 32 samples")
    if np.any(e <= 0):
        raise DiagnosticsError("energy series must be strictly positive")
    start = int(len(t) * (1 - window))
    t, e = t[start:], e[start:]
    loge = np.log(e)
    slope_e, r2_e = _linfit(t, loge)
    if np.all(t > 0):
        slope_p, r2_p = _linfit(np.log(t), loge)
    else:
        slope_p, r2_p = 0.0, -np.inf
    if max(r2_e, r2_p) < threshold:
        kind, rate, r2 = "none", 0.0, max(r2_e, r2_p)
    elif r2_e >= r2_p:
        kind, rate, r2 = "exponential", -slope_e, r2_e
    else:
        kind, rate, r2 = "polynomial", -slope_p, r2_p
    return DecayFit(kind, float(rate), float(r2), float(r2_e), float(r2_p))


# ---------------------------------------------------------------------------
# spectrum
# ---------------------------------------------------------------------------


@dataclass
class SpectrumReport:
    eigenvalues: np.ndarray
    abscissa: float
    conjugate_closed: bool
    stability_number: tuple[float, float]
    norm: float

    def write_csv(self, path) -> None:
        order = np.lexsort((self.eigenvalues.imag, self.eigenvalues.real))
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["re", "im"])
            for lam in self.eigenvalues[order]:
                w.writerow([f"{lam.real:.17g}", f"{lam.imag:.17g}"])


def conjugate_closed(eigs: np.ndarray, tol: float = 1e-9) -> bool:
    """Every eigenvalue has a conjugate partner within ``tol`` (relative to the spread)."""
    eigs = np.asarray(eigs)
    scale = max(1.0, float(np.max(np.abs(eigs)))) if eigs.size else 1.0
    used = np.zeros(eigs.size, bool)
    for k in np.argsort(-np.abs(eigs.imag)):
        if used[k]:
            continue
        target = np.conj(eigs[k])
        d = np.abs(eigs - target)
        d[used] = np.inf
        if abs(eigs[k].imag) > tol * scale:
            d[k] = np.inf
        j = int(np.argmin(d))
        if d[j] > tol * scale:
            return False
        used[k] = used[j] = True
    return True


def spectrum(A, c: Coefficients | None = None) -> SpectrumReport:
    """Dense eigen-decomposition of the real operator."""
    A = np.asarray(A.toarray() if sp.issparse(A) else A, float)
    try:
        eigs = sla.eigvals(A, check_finite=True)
    except (sla.LinAlgError, ValueError) as exc:
        fd, path = tempfile.mkstemp(suffix=".npy", prefix="bresse_matrix_")
        os.close(fd)
        np.save(path, A)
        raise DiagnosticsError(f"eigenvalue solver failed ({exc}); matrix saved to {path}") from exc
    chi = stability_number(c) if c is not None else (float("nan"), float("nan"))
    return SpectrumReport(
        eigenvalues=eigs,
        abscissa=float(np.max(eigs.real)),
        conjugate_closed=conjugate_closed(eigs),
        stability_number=chi,
        norm=float(np.linalg.norm(A, 2)),
    )


def coefficients_of(sys: SemiDiscreteSystem) -> Coefficients:
    sym = sys.description.symbols
    return Coefficients(**{k: sym[k] for k in Coefficients.__dataclass_fields__})

