"""Constitutive algebra for thermoelastic Bresse beams.

Coefficient reduction, constitutive force triples, the heat-flux laws and the
thermal coupling patterns, plus :func:`assemble_model`, which resolves a
declarative :class:`ModelSpec` into a symbolic :class:`ModelDescription`.

Every equation is stored as ``sum(term) = 0`` where a term is
``coefficient * d^dx/dx^dx d^dt/dt^dt field`` and the coefficient is a
polynomial in named symbols (``k``, ``ell``, ``m1``, ``gamma3``, ...). The
numeric value of every symbol lives in ``ModelDescription.symbols``.
"""

from __future__ import annotations

import enum
import json
import math
import warnings
from dataclasses import dataclass, field, fields, replace
from typing import Iterable, Mapping, Union

__all__ = [
    "PhysicalParams",
    "Coefficients",
    "PronyKernel",
    "Fourier",
    "Cattaneo",
    "GurtinPipkin",
    "ColemanGurtin",
    "GreenNaghdiIII",
    "TzouDPL",
    "LordShulman",
    "TypeIIIMemory",
    "ThermalLaw",
    "LAWS",
    "CouplingPattern",
    "BoundaryCondition",
    "ModelSpec",
    "Coef",
    "Term",
    "Equation",
    "FieldInfo",
    "ModelDescription",
    "derive_coefficients",
    "compute_forces",
    "assemble_model",
    "stability_number",
    "catalog_entries",
]


# ---------------------------------------------------------------------------
# coefficients
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PhysicalParams:
    """Raw physical constants of the arched beam.

    ``I1 = I2 / R`` is the geometric relation between the area and the first
    inertial moment; it is not enforced here (use :meth:`consistent` to build
    a parameter set that satisfies it).
    """

    rho: float
    I1: float
    I2: float
    I3: float
    E: float
    kprimeG: float
    alpha: float
    delta11: float
    delta13: float
    c_nu: float
    Theta0: float
    R: float
    L: float

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if not math.isfinite(value):
                raise ValueError(f"{f.name} must be finite, got {value!r}")
            # alpha = 0 is the purely elastic material
            if f.name == "alpha":
                if value < 0:
                    raise ValueError(f"alpha must be >= 0, got {value!r}")
            elif value <= 0:
                raise ValueError(f"{f.name} must be > 0, got {value!r}")

    @classmethod
    def consistent(cls, **kw) -> "PhysicalParams":
        """Build parameters with ``I1`` derived from ``I2 / R``."""
        kw["I1"] = kw["I2"] / kw["R"]
        return cls(**kw)


@dataclass(frozen=True)
class Coefficients:
    """Reduced coefficient set entering the beam equations."""

    rho1: float
    rho2: float
    k: float
    k0: float
    b: float
    ell: float
    m1: float
    m2: float
    m3: float
    varrho1: float
    varrho2: float
    varrho3: float
    gamma1: float
    gamma2: float
    gamma3: float

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if not math.isfinite(value):
                raise ValueError(f"{f.name} must be finite, got {value!r}")
            if f.name in ("rho1", "rho2", "k", "k0", "b", "ell"):
                if value <= 0:
                    raise ValueError(f"{f.name} must be > 0, got {value!r}")
            elif value < 0:
                raise ValueError(f"{f.name} must be >= 0, got {value!r}")

    def m(self, i: int) -> float:
        return getattr(self, f"m{i}")

    def varrho(self, i: int) -> float:
        return getattr(self, f"varrho{i}")

    def gamma(self, i: int) -> float:
        return getattr(self, f"gamma{i}")

    def with_zero_coupling(self) -> "Coefficients":
        return replace(self, m1=0.0, m2=0.0, m3=0.0)

    def as_dict(self) -> dict[str, float]:
        return {f.name: getattr(self, f.name) for f in fields(self)}


def derive_coefficients(p: PhysicalParams) -> Coefficients:
    """Reduce physical constants to the coefficients of the beam equations."""
    m1 = 2.0 * p.alpha * p.kprimeG * p.I1 * p.delta13
    m2 = p.alpha * p.E * p.I2 * p.delta11
    m3 = p.alpha * p.E * p.I3 * p.delta11
    gamma1 = 2.0 / p.Theta0 * m1
    gamma2 = p.R / p.Theta0 * m2
    gamma3 = 1.0 / p.Theta0 * m3
    heat = p.c_nu * p.rho
    return Coefficients(
        rho1=p.rho * p.I1,
        rho2=p.rho * p.I3,
        k=p.kprimeG * p.I1,
        k0=p.E * p.I1,
        b=p.E * p.I3,
        ell=1.0 / p.R,
        m1=m1,
        m2=m2,
        m3=m3,
        varrho1=heat * gamma1,
        varrho2=heat * gamma2,
        varrho3=heat * gamma3,
        gamma1=gamma1,
        gamma2=gamma2,
        gamma3=gamma3,
    )


def compute_forces(c: Coefficients, strain, temps=(0.0, 0.0, 0.0)):
    """Shear force, bending moment and axial force.

    Parameters
    ----------
    c
        Reduced coefficients.
    strain
        ``(phi_x, psi, w, w_x, psi_x, phi)``; scalars or arrays.
    temps
        ``(theta1, theta2, theta3)``.

    Returns
    -------
    thermoelastic, elastic
        Two ``(Q, M, N)`` triples.
    """
    phi_x, psi, w, w_x, psi_x, phi = strain
    theta1, theta2, theta3 = temps
    Q0 = c.k * (phi_x + psi + c.ell * w)
    M0 = c.b * psi_x
    N0 = c.k0 * (w_x - c.ell * phi)
    return (Q0 - c.m1 * theta1, M0 - c.m3 * theta3, N0 - c.m2 * theta2), (Q0, M0, N0)


def stability_number(c: Coefficients) -> tuple[float, float]:
    """``(k/rho1 - b/rho2, k - k0)``; both vanish for equal wave speeds."""
    return c.k / c.rho1 - c.b / c.rho2, c.k - c.k0


# ---------------------------------------------------------------------------
# thermal laws
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PronyKernel:
    """Memory kernel ``g(s) = sum_j a_j exp(-b_j s)``."""

    modes: tuple[tuple[float, float], ...]

    def __post_init__(self):
        modes = tuple((float(a), float(b)) for a, b in self.modes)
        if not modes:
            raise ValueError("kernel must have at least one mode")
        for a, b in modes:
            if not (a > 0 and b > 0 and math.isfinite(a) and math.isfinite(b)):
                raise ValueError(f"kernel modes need a_j > 0 and b_j > 0, got ({a}, {b})")
        object.__setattr__(self, "modes", modes)

    @classmethod
    def single(cls, a: float, b: float) -> "PronyKernel":
        return cls(((a, b),))

    @property
    def mass(self) -> float:
        return sum(a / b for a, b in self.modes)

    def __call__(self, s):
        return sum(a * math.e ** (-b * s) for a, b in self.modes)


def _positive(name, value):
    if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
        raise ValueError(f"{name} must be > 0, got {value!r}")


def _nonnegative(name, value):
    if not (isinstance(value, (int, float)) and math.isfinite(value) and value >= 0):
        raise ValueError(f"{name} must be >= 0, got {value!r}")


def _optional_positive(name, value):
    if value is not None:
        _positive(name, value)


def _kernel(value):
    if not isinstance(value, PronyKernel):
        raise ValueError(f"kernel must be a PronyKernel, got {type(value).__name__}")


@dataclass(frozen=True)
class Fourier:
    """``q = -varpi theta_x``; ``varpi=None`` keeps the unit normalization."""

    varpi: float | None = None
    name = "Fourier"

    def __post_init__(self):
        _optional_positive("varpi", self.varpi)


@dataclass(frozen=True)
class Cattaneo:
    """``tau q_t + q = -varpi theta_x``; ``varpi=None`` means ``varpi_i = gamma_i``."""

    tau: float
    varpi: float | None = None
    name = "Cattaneo"

    def __post_init__(self):
        _positive("tau", self.tau)
        _optional_positive("varpi", self.varpi)


@dataclass(frozen=True)
class GurtinPipkin:
    kernel: PronyKernel
    varpi: float | None = None
    name = "GurtinPipkin"

    def __post_init__(self):
        _kernel(self.kernel)
        _optional_positive("varpi", self.varpi)


@dataclass(frozen=True)
class ColemanGurtin:
    varpi: float
    kernel: PronyKernel
    name = "ColemanGurtin"

    def __post_init__(self):
        if not (isinstance(self.varpi, (int, float)) and 0 < self.varpi < 1):
            raise ValueError(f"varpi must lie in (0, 1), got {self.varpi!r}")
        _kernel(self.kernel)


@dataclass(frozen=True)
class GreenNaghdiIII:
    """Type III law; ``varpi=0`` is type II, ``beta=0`` is type I (Fourier)."""

    beta: float
    varpi: float
    name = "GreenNaghdiIII"

    def __post_init__(self):
        _nonnegative("beta", self.beta)
        _nonnegative("varpi", self.varpi)
        if self.beta == 0 and self.varpi == 0:
            raise ValueError("beta and varpi cannot both be zero")


@dataclass(frozen=True)
class TzouDPL:
    tau_q: float
    tau_theta: float
    varpi: float | None = None
    name = "TzouDPL"

    def __post_init__(self):
        _positive("tau_q", self.tau_q)
        _nonnegative("tau_theta", self.tau_theta)
        _optional_positive("varpi", self.varpi)


@dataclass(frozen=True)
class LordShulman:
    tau: float
    varpi: float | None = None
    name = "LordShulman"

    def __post_init__(self):
        _positive("tau", self.tau)
        _optional_positive("varpi", self.varpi)


@dataclass(frozen=True)
class TypeIIIMemory:
    """Type III law with memory relaxation; ``kernel`` is ``g = -mu'``."""

    beta: float
    varpi: float
    kernel: PronyKernel
    name = "TypeIIIMemory"

    def __post_init__(self):
        _positive("beta", self.beta)
        _positive("varpi", self.varpi)
        _kernel(self.kernel)


ThermalLaw = Union[
    Fourier, Cattaneo, GurtinPipkin, ColemanGurtin, GreenNaghdiIII, TzouDPL, LordShulman, TypeIIIMemory
]

LAWS: dict[str, type] = {
    cls.name: cls
    for cls in (
        Fourier,
        Cattaneo,
        GurtinPipkin,
        ColemanGurtin,
        GreenNaghdiIII,
        TzouDPL,
        LordShulman,
        TypeIIIMemory,
    )
}


class CouplingPattern(enum.Enum):
    """Which thermal channels are retained (1 shear, 2 axial, 3 bending)."""

    Full = (1, 2, 3)
    DoubleBendingAxial = (2, 3)
    DoubleShearAxial = (1, 2)
    DoubleShearBending = (1, 3)
    SingleShear = (1,)
    SingleBending = (3,)
    SingleAxial = (2,)
    Elastic = ()

    @property
    def channels(self) -> tuple[int, ...]:
        return self.value


class BoundaryCondition(enum.Enum):
    FullDirichlet = "FullDirichlet"
    # Dirichlet on phi and thermal fields, Neumann on psi and w
    MixedDN = "MixedDN"


@dataclass(frozen=True)
class ModelSpec:
    coefficients: Coefficients
    coupling: CouplingPattern
    law: ThermalLaw | None = None
    bc: BoundaryCondition = BoundaryCondition.FullDirichlet
    L: float = 1.0

    def __post_init__(self):
        _positive("L", self.L)
        if self.coupling is CouplingPattern.Elastic:
            return
        if self.law is None:
            raise ValueError("a thermal law is required for a thermally coupled model")
        if not isinstance(self.law, tuple(LAWS.values())):
            raise ValueError(f"unknown thermal law {self.law!r}")
        c = self.coefficients
        for i in self.coupling.channels:
            for name in (f"varrho{i}", f"gamma{i}"):
                if getattr(c, name) <= 0:
                    raise ValueError(f"{name} must be > 0 for active channel {i}")


# ---------------------------------------------------------------------------
# symbolic equations
# ---------------------------------------------------------------------------

Monomial = tuple[tuple[str, int], ...]


def _mono(*symbols: str | tuple[str, int]) -> Monomial:
    powers: dict[str, int] = {}
    for s in symbols:
        name, p = (s, 1) if isinstance(s, str) else s
        powers[name] = powers.get(name, 0) + p
    return tuple(sorted((n, p) for n, p in powers.items() if p != 0))


@dataclass(frozen=True)
class Coef:
    """Polynomial in named symbols with float factors."""

    items: tuple[tuple[Monomial, float], ...] = ()

    @classmethod
    def of(cls, factor: float = 1.0, *symbols) -> "Coef":
        return cls(((_mono(*symbols), float(factor)),))

    @classmethod
    def _from_dict(cls, d: Mapping[Monomial, float]) -> "Coef":
        return cls(tuple(sorted((m, f) for m, f in d.items() if f != 0.0)))

    def __add__(self, other: "Coef") -> "Coef":
        d = dict(self.items)
        for m, f in other.items:
            d[m] = d.get(m, 0.0) + f
        return Coef._from_dict(d)

    def __mul__(self, other: "Coef | float") -> "Coef":
        if not isinstance(other, Coef):
            return Coef._from_dict({m: f * other for m, f in self.items})
        d: dict[Monomial, float] = {}
        for m1, f1 in self.items:
            for m2, f2 in other.items:
                m = _mono(*m1, *m2)
                d[m] = d.get(m, 0.0) + f1 * f2
        return Coef._from_dict(d)

    __rmul__ = __mul__

    def __neg__(self) -> "Coef":
        return self * -1.0

    def __bool__(self) -> bool:
        return bool(self.items)

    def symbols(self) -> set[str]:
        return {name for m, _ in self.items for name, _ in m}

    def evaluate(self, values: Mapping[str, float]) -> float:
        total = 0.0
        for m, f in self.items:
            prod = f
            for name, p in m:
                prod *= values[name] ** p
            total += prod
        return total

    def drop(self, names: Iterable[str]) -> "Coef":
        """Remove every monomial containing one of ``names`` (set them to 0)."""
        names = set(names)
        return Coef(tuple((m, f) for m, f in self.items if not any(n in names for n, _ in m)))

    def to_json(self) -> list[dict]:
        return [{"factor": f, "symbols": dict(m)} for m, f in self.items]

    def __str__(self) -> str:
        parts = []
        for m, f in self.items:
            syms = "*".join(n if p == 1 else f"{n}^{p}" for n, p in m)
            if not syms:
                parts.append(f"{f:+g}")
            elif f == 1.0:
                parts.append(f"+{syms}")
            elif f == -1.0:
                parts.append(f"-{syms}")
            else:
                parts.append(f"{f:+g}*{syms}")
        body = " ".join(parts) if parts else "0"
        return f"({body})" if len(parts) > 1 else body


@dataclass(frozen=True)
class Term:
    """``coef * d_x^dx d_t^dt field``; ``kernel`` marks a history convolution."""

    coef: Coef
    field: str
    dx: int = 0
    dt: int = 0
    kernel: str | None = None

    def to_json(self) -> dict:
        d = {"coefficient": self.coef.to_json(), "field": self.field, "dx": self.dx, "dt": self.dt}
        if self.kernel is not None:
            d["convolution"] = self.kernel
        return d

    def render(self) -> str:
        sub = "x" * self.dx + "t" * self.dt
        body = f"{self.field}_{sub}" if sub else self.field
        if self.kernel is not None:
            body = f"int {self.kernel}(s) {body}(t-s) ds"
        return f"{self.coef} {body}"


@dataclass(frozen=True)
class Equation:
    """``sum(terms) = 0``, solved for the highest time derivative of ``principal``."""

    principal: str
    terms: tuple[Term, ...]

    def drop(self, names: Iterable[str]) -> "Equation":
        names = tuple(names)
        kept = []
        for t in self.terms:
            c = t.coef.drop(names)
            if c:
                kept.append(replace(t, coef=c))
        return Equation(self.principal, tuple(kept))

    def render(self) -> str:
        parts = []
        for t in self.terms:
            text = t.render()
            parts.append(text if text[0] in "+-" else "+" + text)
        return " ".join(parts).lstrip("+") + " = 0"


@dataclass(frozen=True)
class FieldInfo:
    """An unknown field.

    ``order`` is its highest time derivative in the working equations;
    ``location`` is ``"node"`` (collocated) or ``"half"`` (staggered flux
    points); ``channel`` is 0 for mechanical fields.
    """

    name: str
    role: str
    channel: int = 0
    order: int = 1
    location: str = "node"
    display: str = ""


MECH_FIELDS = (
    FieldInfo("phi", "displacement", 0, 2, "node", "φ"),
    FieldInfo("psi", "rotation", 0, 2, "node", "ψ"),
    FieldInfo("w", "longitudinal", 0, 2, "node", "w"),
)


@dataclass(frozen=True)
class ModelDescription:
    """Resolved continuous model: fields, equations, per-channel classification."""

    coupling: CouplingPattern
    law: ThermalLaw | None
    fields: tuple[FieldInfo, ...]
    equations: tuple[Equation, ...]
    classification: Mapping[int, str]
    symbols: Mapping[str, float]
    kernels: Mapping[str, PronyKernel] = field(default_factory=dict)
    form: str = "working"

    @property
    def field_names(self) -> tuple[str, ...]:
        return tuple(f.name for f in self.fields)

    def field(self, name: str) -> FieldInfo:
        for f in self.fields:
            if f.name == name:
                return f
        raise KeyError(name)

    def equation(self, principal: str) -> Equation:
        for eq in self.equations:
            if eq.principal == principal:
                return eq
        raise KeyError(principal)

    @property
    def has_memory(self) -> bool:
        return any(t.kernel is not None for eq in self.equations for t in eq.terms)

    def drop_symbols(self, names: Iterable[str]) -> "ModelDescription":
        names = tuple(names)
        return replace(self, equations=tuple(eq.drop(names) for eq in self.equations))

    def mechanical_equations(self) -> tuple[Equation, ...]:
        return tuple(eq for eq in self.equations if eq.principal in ("phi", "psi", "w"))

    def temperature_form(self) -> "ModelDescription":
        """Rewrite thermal-displacement equations in terms of ``theta = p_t``.

        Heat balances are differentiated once in time; mechanical equations
        only see ``p`` through ``p_t`` and are rewritten directly.
        """
        if not any(f.role == "thermal_displacement" for f in self.fields):
            return self
        p_names = {f.name for f in self.fields if f.role == "thermal_displacement"}

        def swap(t: Term, shift: int) -> Term:
            dt = t.dt + shift
            if t.field in p_names:
                if dt == 0:
                    raise ValueError("temperature form needs p only through its time derivatives")
                return replace(t, field=t.field.replace("p", "theta"), dt=dt - 1)
            return replace(t, dt=dt)

        eqs = []
        for eq in self.equations:
            shift = 1 if eq.principal in p_names else 0
            principal = eq.principal.replace("p", "theta") if shift else eq.principal
            eqs.append(Equation(principal, tuple(swap(t, shift) for t in eq.terms)))
        new_fields = tuple(
            replace(f, name=f.name.replace("p", "theta"), role="temperature", display=f"θ{f.channel}")
            if f.name in p_names
            else f
            for f in self.fields
        )
        return replace(self, fields=new_fields, equations=tuple(eqs), form="temperature")

    def eliminated_form(self) -> "ModelDescription":
        """Eliminate the heat flux of a relaxation law (Cattaneo, Lord-Shulman, Tzou).

        Applies ``P(d_t) = 1 + tau_q d_t + tau_q^2/2 d_tt`` (or ``1 + tau d_t``)
        to the heat balance and substitutes ``P q = -varpi (1 + tau_theta d_t) theta_x``.
        """
        law = self.law
        if not isinstance(law, (Cattaneo, LordShulman, TzouDPL)):
            return self
        if isinstance(law, TzouDPL):
            P = [Coef.of(1.0), Coef.of(1.0, "tau_q"), Coef.of(0.5, ("tau_q", 2))]
            R = [Coef.of(1.0)] + ([Coef.of(1.0, "tau_theta")] if law.tau_theta else [])
        else:
            P = [Coef.of(1.0), Coef.of(1.0, "tau")]
            R = [Coef.of(1.0)]
        eqs = list(self.mechanical_equations())
        for i in self.coupling.channels:
            heat = self.equation(f"theta{i}")
            q = f"q{i}"
            flux_term = next(t for t in heat.terms if t.field == q)
            varpi = _varpi_coef(law, i)
            terms: list[Term] = []
            for t in heat.terms:
                if t.field == q:
                    continue
                for order, pc in enumerate(P):
                    terms.append(replace(t, coef=t.coef * pc, dt=t.dt + order))
            # gamma q_x with P q = -varpi R theta_x
            for order, rc in enumerate(R):
                terms.append(Term(-(flux_term.coef * varpi * rc), f"theta{i}", 2, order))
            eqs.append(Equation(f"theta{i}", _combine(terms)))
        kept = tuple(f for f in self.fields if f.role not in ("flux", "flux_rate"))
        return replace(self, fields=kept, equations=tuple(eqs), form="eliminated")

    def to_json(self) -> dict:
        return {
            "coupling": self.coupling.name,
            "law": None if self.law is None else self.law.name,
            "form": self.form,
            "fields": [
                {"name": f.name, "role": f.role, "channel": f.channel, "order": f.order, "location": f.location}
                for f in self.fields
            ],
            "equations": [
                {"principal": eq.principal, "terms": [t.to_json() for t in eq.terms]} for eq in self.equations
            ],
            "classification": {str(k): v for k, v in sorted(self.classification.items())},
            "symbols": dict(sorted(self.symbols.items())),
            "kernels": {k: [list(m) for m in v.modes] for k, v in sorted(self.kernels.items())},
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True)

    def render(self) -> str:
        law = "Elastic" if self.law is None else self.law.name
        lines = [f"({self.coupling.name}, {law}) [{self.form}]"]
        lines += [f"  {eq.render()}" for eq in self.equations]
        return "\n".join(lines)


def _combine(terms: Iterable[Term]) -> tuple[Term, ...]:
    acc: dict[tuple, Coef] = {}
    order: list[tuple] = []
    for t in terms:
        key = (t.field, t.dx, t.dt, t.kernel)
        if key not in acc:
            acc[key] = Coef()
            order.append(key)
        acc[key] = acc[key] + t.coef
    return tuple(Term(acc[k], *k) for k in order if acc[k])


# ---------------------------------------------------------------------------
# assembly
# ---------------------------------------------------------------------------

CLASSIFICATION = {
    "Fourier": "parabolic",
    "ColemanGurtin": "mixed",
    "Cattaneo": "hyperbolic",
    "GurtinPipkin": "hyperbolic",
    "GreenNaghdiIII": "hyperbolic",
    "TzouDPL": "hyperbolic",
    "LordShulman": "hyperbolic",
    "TypeIIIMemory": "hyperbolic",
}


def _varpi_coef(law, i: int) -> Coef:
    """Conductivity factor of the law, honouring the default normalizations."""
    varpi = getattr(law, "varpi", None)
    if isinstance(law, ColemanGurtin):
        return Coef.of(1.0, f"varpi{i}")
    if varpi is None:
        if isinstance(law, Cattaneo):
            return Coef.of(1.0, f"gamma{i}")
        return Coef.of(1.0)
    return Coef.of(1.0, "varpi")


def _uses_p_form(law) -> bool:
    if isinstance(law, TypeIIIMemory):
        return True
    return isinstance(law, GreenNaghdiIII) and law.beta > 0


def _mechanics(channels: tuple[int, ...], temp: dict[int, tuple[str, int]]) -> list[Equation]:
    """Bresse equations with thermal forces ``m_i * T_i``.

    ``temp[i]`` is the field carrying the temperature of channel ``i`` and
    the time order at which it appears (``theta`` -> 0, ``p`` -> 1).
    """
    C = Coef.of
    phi = [
        Term(C(1, "rho1"), "phi", 0, 2),
        Term(C(-1, "k"), "phi", 2),
        Term(C(-1, "k"), "psi", 1),
        Term(C(-1, "k", "ell"), "w", 1),
        Term(C(-1, "ell", "k0"), "w", 1),
        Term(C(1, ("ell", 2), "k0"), "phi"),
    ]
    psi = [
        Term(C(1, "rho2"), "psi", 0, 2),
        Term(C(-1, "b"), "psi", 2),
        Term(C(1, "k"), "phi", 1),
        Term(C(1, "k"), "psi"),
        Term(C(1, "k", "ell"), "w"),
    ]
    w = [
        Term(C(1, "rho1"), "w", 0, 2),
        Term(C(-1, "k0"), "w", 2),
        Term(C(1, "k0", "ell"), "phi", 1),
        Term(C(1, "ell", "k"), "phi", 1),
        Term(C(1, "ell", "k"), "psi"),
        Term(C(1, ("ell", 2), "k"), "w"),
    ]
    if 1 in channels:
        f, s = temp[1]
        phi.append(Term(C(1, "m1"), f, 1, s))
        psi.append(Term(C(-1, "m1"), f, 0, s))
        w.append(Term(C(-1, "ell", "m1"), f, 0, s))
    if 2 in channels:
        f, s = temp[2]
        phi.append(Term(C(1, "ell", "m2"), f, 0, s))
        w.append(Term(C(1, "m2"), f, 1, s))
    if 3 in channels:
        f, s = temp[3]
        psi.append(Term(C(1, "m3"), f, 1, s))
    return [Equation("phi", tuple(phi)), Equation("psi", tuple(psi)), Equation("w", tuple(w))]


def _strain_rate(i: int, dt: int = 1) -> list[Term]:
    """``m_i * d_t^dt S_i`` with S1 = phi_x+psi+ell w, S2 = w_x-ell phi, S3 = psi_x."""
    C = Coef.of
    m = f"m{i}"
    if i == 1:
        return [Term(C(1, m), "phi", 1, dt), Term(C(1, m), "psi", 0, dt), Term(C(1, m, "ell"), "w", 0, dt)]
    if i == 2:
        return [Term(C(1, m), "w", 1, dt), Term(C(-1, m, "ell"), "phi", 0, dt)]
    return [Term(C(1, m), "psi", 1, dt)]


def _heat_block(law, i: int) -> tuple[list[FieldInfo], list[Equation], dict[str, PronyKernel]]:
    C = Coef.of
    g, r = f"gamma{i}", f"varrho{i}"
    th, q, s, p = f"theta{i}", f"q{i}", f"s{i}", f"p{i}"
    kname = f"g{i}"
    theta_f = FieldInfo(th, "temperature", i, 1, "node", f"θ{i}")
    q_f = FieldInfo(q, "flux", i, 1, "half", f"q{i}")
    varpi = _varpi_coef(law, i)
    S = _strain_rate(i)
    kernels: dict[str, PronyKernel] = {}

    if isinstance(law, Fourier) or (isinstance(law, GreenNaghdiIII) and law.beta == 0):
        if isinstance(law, GreenNaghdiIII):
            varpi = C(1, "varpi")
        eq = Equation(th, (Term(C(1, r), th, 0, 1), Term(-(C(1, g) * varpi), th, 2), *S))
        return [theta_f], [eq], kernels

    if isinstance(law, (Cattaneo, LordShulman)):
        heat = Equation(th, (Term(C(1, r), th, 0, 1), Term(C(1, g), q, 1), *S))
        flux = Equation(q, (Term(C(1, "tau"), q, 0, 1), Term(C(1), q), Term(varpi, th, 1)))
        return [theta_f, q_f], [heat, flux], kernels

    if isinstance(law, TzouDPL):
        # flux form with the auxiliary s = tau_q^2/2 q_t + varpi tau_theta theta_x
        heat = Equation(th, (Term(C(1, r), th, 0, 1), Term(C(1, g), q, 1), *S))
        qt = [Term(C(1), q, 0, 1), Term(C(-2, ("tau_q", -2)), s)]
        st = [Term(C(1), s, 0, 1), Term(C(2, ("tau_q", -1)), s), Term(C(1), q), Term(varpi, th, 1)]
        if law.tau_theta:
            qt.append(Term(varpi * C(2, "tau_theta", ("tau_q", -2)), th, 1))
            st.append(Term(-(varpi * C(2, "tau_theta", ("tau_q", -1))), th, 1))
        s_f = FieldInfo(s, "flux_rate", i, 1, "half", f"s{i}")
        return [theta_f, q_f, s_f], [heat, Equation(q, tuple(qt)), Equation(s, _combine(st))], kernels

    if isinstance(law, (GurtinPipkin, ColemanGurtin)):
        kernels[kname] = law.kernel
        terms = [Term(C(1, r), th, 0, 1)]
        if isinstance(law, ColemanGurtin):
            terms += [Term(C(-1, g), th, 2), Term(C(1, g) * varpi, th, 2)]
        terms.append(Term(-(C(1, g) * varpi), th, 2, 0, kname))
        return [theta_f], [Equation(th, (*terms, *S))], kernels

    if isinstance(law, GreenNaghdiIII):
        p_f = FieldInfo(p, "thermal_displacement", i, 2, "node", f"p{i}")
        terms = [Term(C(1, r), p, 0, 2), Term(C(-1, "beta", g), p, 2)]
        if law.varpi:
            terms.append(Term(C(-1, "varpi", g), p, 2, 1))
        return [p_f], [Equation(p, (*terms, *S))], kernels

    if isinstance(law, TypeIIIMemory):
        kernels[kname] = law.kernel
        p_f = FieldInfo(p, "thermal_displacement", i, 2, "node", f"p{i}")
        terms = [
            Term(C(1, r), p, 0, 2),
            Term(C(-1, f"mu{i}", g), p, 2),
            Term(C(1, "varpi", g), p, 2, 0, kname),
        ]
        return [p_f], [Equation(p, (*terms, *S))], kernels

    raise ValueError(f"unsupported thermal law {law!r}")


def _symbols(c: Coefficients, law) -> dict[str, float]:
    sym = dict(c.as_dict())
    if law is None:
        return sym
    for name in ("tau", "tau_q", "tau_theta", "beta"):
        if hasattr(law, name):
            sym[name] = float(getattr(law, name))
    varpi = getattr(law, "varpi", None)
    if varpi is not None:
        sym["varpi"] = float(varpi)
        for i in (1, 2, 3):
            sym[f"varpi{i}"] = float(varpi)
    if isinstance(law, TypeIIIMemory):
        for i in (1, 2, 3):
            sym[f"mu{i}"] = law.beta + law.varpi * law.kernel.mass
    return sym


def assemble_model(spec: ModelSpec) -> ModelDescription:
    """Resolve ``(coupling, law)`` into its continuous system of equations."""
    channels = spec.coupling.channels
    law = spec.law
    if not channels:
        if law is not None:
            warnings.warn("Elastic coupling ignores the thermal law", stacklevel=2)
        return ModelDescription(
            coupling=spec.coupling,
            law=None,
            fields=MECH_FIELDS,
            equations=tuple(_mechanics((), {})),
            classification={},
            symbols=_symbols(spec.coefficients, None),
        )

    p_form = _uses_p_form(law)
    temp = {i: ((f"p{i}", 1) if p_form else (f"theta{i}", 0)) for i in channels}
    fields_: list[FieldInfo] = list(MECH_FIELDS)
    eqs = _mechanics(channels, temp)
    kernels: dict[str, PronyKernel] = {}
    for i in channels:
        f, e, k = _heat_block(law, i)
        fields_ += f
        eqs += e
        kernels.update(k)

    kind = CLASSIFICATION[law.name]
    if isinstance(law, GreenNaghdiIII) and law.beta == 0:
        kind = "parabolic"
    return ModelDescription(
        coupling=spec.coupling,
        law=law,
        fields=tuple(fields_),
        equations=tuple(eqs),
        classification={i: kind for i in channels},
        symbols=_symbols(spec.coefficients, law),
        kernels=kernels,
    )


# ---------------------------------------------------------------------------
# catalog
# ---------------------------------------------------------------------------

_SAMPLE_KERNEL = PronyKernel.single(1.0, 1.0)
SAMPLE_LAWS: dict[str, ThermalLaw] = {
    "Fourier": Fourier(),
    "Cattaneo": Cattaneo(tau=0.1),
    "GurtinPipkin": GurtinPipkin(_SAMPLE_KERNEL),
    "ColemanGurtin": ColemanGurtin(0.5, _SAMPLE_KERNEL),
    "GreenNaghdiIII": GreenNaghdiIII(beta=1.0, varpi=1.0),
    "TzouDPL": TzouDPL(tau_q=0.1, tau_theta=0.1),
    "LordShulman": LordShulman(tau=0.1),
    "TypeIIIMemory": TypeIIIMemory(1.0, 1.0, _SAMPLE_KERNEL),
}

_UNIT = Coefficients(*([1.0] * 15))


def catalog_entries() -> list[tuple[str, ModelDescription]]:
    """Every thermal law for every thermal coupling, plus the elastic baseline."""
    out = []
    for law_name, law in SAMPLE_LAWS.items():
        for pattern in CouplingPattern:
            if pattern is CouplingPattern.Elastic:
                continue
            desc = assemble_model(ModelSpec(_UNIT, pattern, law))
            out.append((f"({pattern.name}, {law_name})", desc))
    out.append(("(Elastic)", assemble_model(ModelSpec(_UNIT, CouplingPattern.Elastic))))
    return out


def describe_entry(label: str, desc: ModelDescription) -> str:
    names = ",".join(f.display for f in desc.fields)
    line = f"{label}: fields {names}"
    if desc.classification:
        cls = ", ".join(f"θ{i}:{v}" for i, v in sorted(desc.classification.items()))
        line += f"; {cls}"
    if desc.kernels:
        line += "; memory " + ",".join(sorted(desc.kernels))
    return line
