"""Fixed-step implicit integrators for ``du/dt = A u``."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla


class Scheme(enum.Enum):
    ImplicitMidpoint = "ImplicitMidpoint"
    BackwardEuler = "BackwardEuler"


class IntegrationError(RuntimeError):
    pass


@dataclass(frozen=True)
class IntegratorConfig:
    dt: float
    T: float
    scheme: Scheme = Scheme.ImplicitMidpoint
    stride: int = 1
    tol: float = 1e-12

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError(f"dt must be > 0, got {self.dt!r}")
        if not self.T > 0:
            raise ValueError(f"T must be > 0, got {self.T!r}")
        if self.dt > self.T:
            raise ValueError("dt must not exceed T")
        if not 0 < self.tol <= 1e-6:
            raise ValueError(f"tol must lie in (0, 1e-6], got {self.tol!r}")
        if int(self.stride) != self.stride or self.stride < 1:
            raise ValueError(f"stride must be a positive integer, got {self.stride!r}")

    @property
    def n_steps(self) -> int:
        return int(round(self.T / self.dt))


@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray  # (n_samples, D)
    observations: dict[str, np.ndarray] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.times)

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]


class Stepper:
    """One-step map with a cached sparse LU factorization."""

    def __init__(self, A, dt: float, scheme: Scheme = Scheme.ImplicitMidpoint, tol: float = 1e-12):
        A = sp.csc_matrix(A)
        n = A.shape[0]
        I = sp.identity(n, format="csc")
        if scheme is Scheme.ImplicitMidpoint:
            self._lhs = (I - 0.5 * dt * A).tocsc()
            self._rhs = (I + 0.5 * dt * A).tocsr()
        else:
            self._lhs = (I - dt * A).tocsc()
            self._rhs = None
        self.dt, self.scheme, self.tol = dt, scheme, tol
        try:
            self._lu = spla.splu(self._lhs)
        except RuntimeError as exc:
            raise IntegrationError(
                f"singular step matrix for dt={dt}; reduce dt or check the operator ({exc})"
            ) from exc

    def __call__(self, u: np.ndarray) -> np.ndarray:
        rhs = u if self._rhs is None else self._rhs @ u
        out = self._lu.solve(rhs)
        # one round of iterative refinement if the direct solve is sloppy
        res = rhs - self._lhs @ out
        scale = np.linalg.norm(rhs)
        if scale > 0 and np.linalg.norm(res) > self.tol * scale:
            out = out + self._lu.solve(res)
        if not np.all(np.isfinite(out)):
            raise IntegrationError(f"non-finite state after a step with dt={self.dt}")
        return out


def step(sys, u: np.ndarray, dt: float, cfg: IntegratorConfig | None = None) -> np.ndarray:
    """Advance one step; ``sys`` is a SemiDiscreteSystem or a matrix."""
    A = getattr(sys, "operator", sys)
    scheme = cfg.scheme if cfg else Scheme.ImplicitMidpoint
    tol = cfg.tol if cfg else 1e-12
    u = np.asarray(u, dtype=float)
    if u.shape[0] != A.shape[0]:
        raise ValueError(f"state has dimension {u.shape[0]}, operator {A.shape[0]}")
    return Stepper(A, dt, scheme, tol)(u)


Observer = Callable[[float, np.ndarray], float]


def integrate(
    sys,
    u0: np.ndarray,
    cfg: IntegratorConfig,
    observers: Mapping[str, Observer] | None = None,
    on_step: Callable[[int, np.ndarray, np.ndarray], None] | None = None,
) -> Trajectory:
    """Integrate to ``cfg.T``; states and observers are recorded every ``stride`` steps.

    ``on_step(i, u_prev, u_next)`` sees every internal step, including those
    between recorded samples.
    """
    A = getattr(sys, "operator", sys)
    u = np.array(u0, dtype=float)
    if u.shape != (A.shape[0],):
        raise ValueError(f"initial state has shape {u.shape}, expected ({A.shape[0]},)")
    stepper = Stepper(A, cfg.dt, cfg.scheme, cfg.tol)
    n = cfg.n_steps
    n_out = n // cfg.stride + 1
    states = np.empty((n_out, u.size))
    times = cfg.dt * cfg.stride * np.arange(n_out)
    states[0] = u
    k = 1
    for i in range(1, n + 1):
        u_next = stepper(u)
        if on_step is not None:
            on_step(i, u, u_next)
        u = u_next
        if i % cfg.stride == 0 and k < n_out:
            states[k] = u
            k += 1
    obs = {}
    for name, fn in (observers or {}).items():
        obs[name] = np.array([fn(t, s) for t, s in zip(times, states)])
    return Trajectory(times, states, obs)
