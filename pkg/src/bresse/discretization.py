"""Method-of-lines discretization of a :class:`ModelDescription`.

Collocated fields live on the interior nodes ``x_j = j h`` (Dirichlet) or on
all nodes including the two ends (Neumann, mirror ghosts). Flux-type fields
(``q``, ``s``) live on the staggered points ``x_{j+1/2}``, ``j = 0..N``, so
that ``theta -> q -> theta`` reproduces the compact three-point Laplacian.

The operators are built so that the discrete coupling pairs are adjoint in
the trapezoid inner product: central differences are skew, and
``D_minus = -D_plus^T``. This is what makes the discrete energy identity exact
under the implicit midpoint rule.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Mapping

import numpy as np
import scipy.sparse as sp

from .model_catalog import (
    BoundaryCondition,
    Coef,
    Equation,
    FieldInfo,
    ModelDescription,
    Term,
)

DENSE_CAP = 4000
MAX_DIM = 2_000_000


class DiscretizationError(ValueError):
    pass


@dataclass(frozen=True)
class Grid:
    L: float
    N: int

    @property
    def h(self) -> float:
        return self.L / (self.N + 1)

    @property
    def nodes(self) -> np.ndarray:
        return self.h * np.arange(1, self.N + 1)

    @property
    def all_nodes(self) -> np.ndarray:
        return self.h * np.arange(0, self.N + 2)

    @property
    def half_nodes(self) -> np.ndarray:
        return self.h * (np.arange(0, self.N + 1) + 0.5)


def build_grid(L: float, N: int) -> Grid:
    if not (L > 0):
        raise DiscretizationError(f"L must be > 0, got {L!r}")
    if int(N) != N or N < 2:
        raise DiscretizationError(f"N must be an integer >= 2, got {N!r}")
    return Grid(float(L), int(N))


# ---------------------------------------------------------------------------
# memory expansion
# ---------------------------------------------------------------------------


def expand_memory(desc: ModelDescription) -> ModelDescription:
    """Replace every history convolution by Prony auxiliary fields.

    ``int g(s) d_x^a v(t-s) ds`` with ``g = sum_j a_j exp(-b_j s)`` becomes
    ``sum_j (a_j/b_j) d_x^a z_j`` where ``z_j' = b_j (v - z_j)``, i.e.
    ``z_j(t) = b_j int_0^inf exp(-b_j s) v(t-s) ds``. The auxiliaries start
    from zero history.
    """
    if not desc.has_memory:
        return desc
    symbols = dict(desc.symbols)
    fields = list(desc.fields)
    new_eqs: list[Equation] = []
    aux_eqs: list[Equation] = []
    seen: dict[tuple[str, str, int], list[str]] = {}
    for eq in desc.equations:
        terms: list[Term] = []
        for t in eq.terms:
            if t.kernel is None:
                terms.append(t)
                continue
            kernel = desc.kernels[t.kernel]
            if not kernel.modes:
                raise DiscretizationError(f"kernel {t.kernel} has no modes")
            key = (t.kernel, t.field, t.dt)
            if key not in seen:
                channel = desc.field(t.field).channel
                names = []
                for j, (a, b) in enumerate(kernel.modes, start=1):
                    z = f"z{channel}_{j}" if t.dt == 0 else f"z{channel}_{j}_t{t.dt}"
                    names.append(z)
                    bs, cs = f"{t.kernel}.b{j}", f"{t.kernel}.c{j}"
                    symbols[bs], symbols[cs] = b, a / b
                    fields.append(FieldInfo(z, "memory", channel, 1, "node", f"z{channel}.{j}"))
                    aux_eqs.append(
                        Equation(
                            z,
                            (
                                Term(Coef.of(1.0), z, 0, 1),
                                Term(Coef.of(1.0, bs), z),
                                Term(Coef.of(-1.0, bs), t.field, 0, t.dt),
                            ),
                        )
                    )
                seen[key] = names
            for j, z in enumerate(seen[key], start=1):
                terms.append(Term(t.coef * Coef.of(1.0, f"{t.kernel}.c{j}"), z, t.dx, 0))
        new_eqs.append(Equation(eq.principal, tuple(terms)))
    return replace(desc, fields=tuple(fields), equations=tuple(new_eqs + aux_eqs), symbols=symbols)


# ---------------------------------------------------------------------------
# one-dimensional stencils
# ---------------------------------------------------------------------------


def field_kind(info: FieldInfo, bc: BoundaryCondition) -> str:
    """``"dir"`` (interior nodes), ``"neu"`` (all nodes) or ``"half"``."""
    if info.location == "half":
        return "half"
    if bc is BoundaryCondition.MixedDN and info.name in ("psi", "w"):
        return "neu"
    return "dir"


def kind_size(kind: str, N: int) -> int:
    return {"dir": N, "neu": N + 2, "half": N + 1}[kind]


def kind_weights(kind: str, grid: Grid) -> np.ndarray:
    """Trapezoid quadrature weights of a field kind."""
    w = np.full(kind_size(kind, grid.N), grid.h)
    if kind == "neu":
        w[0] = w[-1] = grid.h / 2
    return w


def _padding(kind: str, N: int) -> sp.csr_matrix:
    """Map field values to the padded node values ``x_{-1} .. x_{N+2}``."""
    if kind == "dir":
        # x_0 = x_{N+1} = 0, odd ghosts
        rows = [*range(2, N + 2), 0, N + 3]
        cols = [*range(N), 0, N - 1]
        vals = [1.0] * N + [-1.0, -1.0]
    elif kind == "neu":
        rows = [*range(1, N + 3), 0, N + 3]
        cols = [*range(N + 2), 1, N]
        vals = [1.0] * (N + 4)
    else:
        raise DiscretizationError("staggered fields have no node padding")
    return sp.csr_matrix((vals, (rows, cols)), shape=(N + 4, kind_size(kind, N)))


def _target_rows(kind: str, N: int) -> np.ndarray:
    # padded index of every target node
    return np.arange(1, N + 1) + 1 if kind == "dir" else np.arange(0, N + 2) + 1


def stencil(target: str, source: str, dx: int, grid: Grid) -> sp.csr_matrix:
    """Sparse matrix of ``d_x^dx`` from a ``source`` field kind to a ``target`` kind."""
    N, h = grid.N, grid.h
    if target == "half" or source == "half":
        if dx == 0 and target == source:
            return sp.identity(N + 1, format="csr")
        if dx == 1 and source == "dir" and target == "half":
            # (theta_{j+1} - theta_j) / h with theta_0 = theta_{N+1} = 0
            return sp.diags([np.full(N, 1.0 / h), np.full(N, -1.0 / h)], [0, -1], shape=(N + 1, N), format="csr")
        if dx == 1 and source == "half" and target == "dir":
            return (-stencil("half", "dir", 1, grid).T).tocsr()
        raise DiscretizationError(f"unsupported staggered operator {source}->{target} d_x^{dx}")
    P = _padding(source, N)
    rows = _target_rows(target, N)
    if dx == 0:
        return P[rows]
    if dx == 1:
        return ((P[rows + 1] - P[rows - 1]) / (2 * h)).tocsr()
    if dx == 2:
        return ((P[rows + 1] - 2 * P[rows] + P[rows - 1]) / h**2).tocsr()
    raise DiscretizationError(f"spatial derivative order {dx} not supported")


# ---------------------------------------------------------------------------
# semi-discrete system
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Slot:
    field: str
    derivative: int  # 0 value, 1 velocity
    kind: str
    start: int
    stop: int

    @property
    def slice(self) -> slice:
        return slice(self.start, self.stop)

    @property
    def name(self) -> str:
        return self.field if self.derivative == 0 else f"{self.field}_t"


@dataclass(frozen=True)
class SemiDiscreteSystem:
    """``du/dt = A u`` for one model on one grid."""

    description: ModelDescription
    grid: Grid
    bc: BoundaryCondition
    slots: tuple[Slot, ...]
    operator: sp.csr_matrix
    spec: object = None
    meta: Mapping[str, object] = field(default_factory=dict)

    @property
    def dim(self) -> int:
        return self.operator.shape[0]

    @cached_property
    def layout(self) -> dict[str, slice]:
        return {s.name: s.slice for s in self.slots}

    def slot(self, name: str) -> Slot:
        for s in self.slots:
            if s.name == name:
                return s
        raise KeyError(name)

    def weights(self, name: str) -> np.ndarray:
        return kind_weights(self.slot(name).kind, self.grid)

    def coordinates(self, name: str) -> np.ndarray:
        kind = self.slot(name).kind
        g = self.grid
        return {"dir": g.nodes, "neu": g.all_nodes, "half": g.half_nodes}[kind]

    def get(self, u: np.ndarray, name: str) -> np.ndarray:
        return u[self.layout[name]]

    def apply(self, u: np.ndarray) -> np.ndarray:
        """Matrix-free application of the operator."""
        return self.operator @ u

    def zeros(self) -> np.ndarray:
        return np.zeros(self.dim)

    def state(self, values: Mapping[str, object]) -> np.ndarray:
        """Build a state from per-slot arrays or callables of ``x``."""
        u = self.zeros()
        for name, v in values.items():
            sl = self.layout[name]
            u[sl] = v(self.coordinates(name)) if callable(v) else v
        return u

    def stencil(self, target: str, source: str, dx: int) -> sp.csr_matrix:
        return stencil(self.slot(target).kind, self.slot(source).kind, dx, self.grid)


def discretize(
    desc: ModelDescription,
    grid: Grid,
    bc: BoundaryCondition = BoundaryCondition.FullDirichlet,
    *,
    spec=None,
    max_dim: int = MAX_DIM,
) -> SemiDiscreteSystem:
    """Central-difference discretization normalized to ``du/dt = A u``."""
    if desc.has_memory:
        raise DiscretizationError("expand_memory must run before discretize")

    slots: list[Slot] = []
    offset = 0
    for f in desc.fields:
        kind = field_kind(f, bc)
        n = kind_size(kind, grid.N)
        for d in range(f.order):
            slots.append(Slot(f.name, d, kind, offset, offset + n))
            offset += n
    D = offset
    if D > max_dim:
        raise DiscretizationError(f"state dimension {D} exceeds the cap {max_dim}")

    index = {(s.field, s.derivative): s for s in slots}
    blocks: list[tuple[np.ndarray, np.ndarray, np.ndarray]] = []

    def add(row: Slot, col: Slot, M):
        M = sp.coo_matrix(M)
        blocks.append((M.row + row.start, M.col + col.start, M.data))

    # lower derivatives: d/dt (f, d) = (f, d+1)
    for f in desc.fields:
        for d in range(f.order - 1):
            r, c = index[(f.name, d)], index[(f.name, d + 1)]
            add(r, c, sp.identity(r.stop - r.start))

    sym = desc.symbols
    for eq in desc.equations:
        info = desc.field(eq.principal)
        lead = [t for t in eq.terms if t.field == eq.principal and t.dt == info.order and t.dx == 0]
        if len(lead) != 1:
            raise DiscretizationError(f"equation for {eq.principal} lacks a unique leading term")
        scale = lead[0].coef.evaluate(sym)
        if scale == 0:
            raise DiscretizationError(f"leading coefficient of {eq.principal} vanishes")
        row = index[(eq.principal, info.order - 1)]
        for t in eq.terms:
            if t is lead[0]:
                continue
            src = desc.field(t.field)
            if t.dt >= src.order:
                raise DiscretizationError(
                    f"term {t.render()} in the {eq.principal} equation exceeds the state order of {t.field}"
                )
            value = t.coef.evaluate(sym)
            if value == 0.0:
                continue
            col = index[(t.field, t.dt)]
            add(row, col, (-value / scale) * stencil(row.kind, col.kind, t.dx, grid))

    rows, cols, vals = (np.concatenate(parts) for parts in zip(*blocks)) if blocks else ([], [], [])
    # duplicate entries are summed by the coo -> csr conversion
    A = sp.csr_matrix((vals, (rows, cols)), shape=(D, D))
    A.eliminate_zeros()
    return SemiDiscreteSystem(desc, grid, bc, tuple(slots), A, spec=spec)


def assemble_matrix(sys: SemiDiscreteSystem, cap: int = DENSE_CAP) -> np.ndarray:
    """Dense copy of the operator for eigen-analysis."""
    if sys.dim > cap:
        raise DiscretizationError(
            f"dense matrix of dimension {sys.dim} exceeds the cap {cap}; "
            "run the spectrum analysis at a smaller N"
        )
    return sys.operator.toarray()


def write_matrix_csv(A, path) -> None:
    """Write nonzero entries as ``row,col,value`` triplets."""
    A = sp.coo_matrix(A)
    order = np.lexsort((A.col, A.row))
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["row", "col", "value"])
        for r, c, v in zip(A.row[order], A.col[order], A.data[order]):
            w.writerow([int(r), int(c), f"{v:.17g}"])


def build_system(spec, N: int, *, max_dim: int = MAX_DIM) -> SemiDiscreteSystem:
    """Convenience pipeline: assemble, expand memory, discretize."""
    from .model_catalog import assemble_model

    desc = expand_memory(assemble_model(spec))
    return discretize(desc, build_grid(spec.L, N), spec.bc, spec=spec, max_dim=max_dim)
