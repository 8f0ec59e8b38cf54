"""Split vector fields, their commutators, and the modified stage phase.

The evolution u_t = c Lap(u) + cb (V + theta |u|^2) u is split into the
stiff linear part F1(v) = c Lap(v) and the local part F2(v) = cb (V +
theta |v|^2) v.  Higher-order schemes with a force-gradient correction
additionally need the nested commutators

    G1 = F2' F1 - F1' F2          (first commutator)
    G2 = F2' G1 - G1' F2          (second commutator)

which reduce to pointwise closed forms in the potential, the state, and
their first two derivatives.  A finite-difference oracle rebuilds both
commutators from directional derivatives so the closed forms can be
cross-checked at runtime.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .model import (
    EquationKind,
    PotentialData,
    ProblemSpec,
    evaluate_potential,
)
from .spectral import Grid, spectral_derivatives, spectral_laplacian

DEFAULT_FD_STEP = 1e-5


@dataclass(eq=False)
class OperatorContext:
    """Everything the pointwise operators need, evaluated once per run."""

    grid: Grid
    potential: PotentialData
    theta: float
    kind: EquationKind
    linear_multipliers: dict = field(default_factory=dict, repr=False)

    @property
    def linear_coefficient(self) -> complex:
        return self.kind.linear_coefficient

    @property
    def nonlinear_coefficient(self) -> complex:
        return self.kind.nonlinear_coefficient


def make_context(problem: ProblemSpec, grid: Grid) -> OperatorContext:
    """Evaluate the potential on the grid and bundle the run constants."""
    return OperatorContext(
        grid=grid,
        potential=evaluate_potential(problem.potential, grid),
        theta=problem.theta,
        kind=problem.kind,
    )


def apply_stiff(state: np.ndarray, ctx: OperatorContext) -> np.ndarray:
    """F1(v) = c Lap(v)."""
    return ctx.linear_coefficient * spectral_laplacian(state, ctx.grid)


def apply_local(state: np.ndarray, ctx: OperatorContext) -> np.ndarray:
    """F2(v) = cb (V + theta |v|^2) v."""
    density = ctx.potential.values + ctx.theta * np.abs(state) ** 2
    return ctx.nonlinear_coefficient * density * state


def local_derivative(
    state: np.ndarray, direction: np.ndarray, ctx: OperatorContext
) -> np.ndarray:
    """Directional derivative F2'(v) w, treating |v|^2 as v * conj(v)."""
    v = state
    w = direction
    cb = ctx.nonlinear_coefficient
    th = ctx.theta
    return cb * (ctx.potential.values * w + th * (2.0 * np.abs(v) ** 2 * w + v**2 * np.conj(w)))


def apply_first_commutator(state: np.ndarray, ctx: OperatorContext) -> np.ndarray:
    """Closed form of G1 = F2' F1 - F1' F2.

    The diffusive branch assumes real-valued states (its flow preserves
    realness), which collapses the conjugate terms.
    """
    pot = ctx.potential
    th = ctx.theta
    v = state
    grad, lap = spectral_derivatives(v, ctx.grid)
    advect = sum(gv * gu for gv, gu in zip(pot.gradient, grad))
    linear_part = -pot.laplacian * v - 2.0 * advect

    if th == 0.0:
        return linear_part

    if ctx.kind is EquationKind.SCHRODINGER:
        grad_sq = sum(g**2 for g in grad)
        grad_abs = sum(g * np.conj(g) for g in grad)
        cubic = v**2 * np.conj(lap) + grad_sq * np.conj(v) + 2.0 * grad_abs * v
        return linear_part - 2.0 * th * cubic
    grad_sq = sum(g**2 for g in grad)
    return linear_part - 6.0 * th * grad_sq * v


def apply_second_commutator(state: np.ndarray, ctx: OperatorContext) -> np.ndarray:
    """Closed form of G2 = F2' G1 - G1' F2.

    Both branches are pointwise in the potential data and the first two
    state derivatives; the dispersive branch is a pure phase-generator,
    i.e. a real field times -i times the state.
    """
    pot = ctx.potential
    th = ctx.theta
    v = state

    if ctx.kind is EquationKind.SCHRODINGER:
        return ctx.nonlinear_coefficient * _dispersive_curvature(v, ctx) * v

    grad, _ = spectral_derivatives(v, ctx.grid)
    base = pot.grad_squared.astype(complex)
    if th != 0.0:
        advect = sum(gv * gu for gv, gu in zip(pot.gradient, grad))
        grad_sq = sum(g**2 for g in grad)
        correction = (
            -pot.laplacian * v**2
            + 6.0 * advect * v
            + 6.0 * (pot.values + 2.0 * th * v**2) * grad_sq
        )
        base = base + th * correction
    return 2.0 * base * v


def _dispersive_curvature(state: np.ndarray, ctx: OperatorContext) -> np.ndarray:
    """Real field 2 (grad V)^T grad V - 4 theta g6 driving the G2 phase."""
    pot = ctx.potential
    th = ctx.theta
    out = 2.0 * pot.grad_squared
    if th == 0.0:
        return out
    v = state
    grad, lap = spectral_derivatives(v, ctx.grid)
    density = np.abs(v) ** 2
    curvature = np.real(np.conj(v) * lap)
    grad_abs = np.real(sum(g * np.conj(g) for g in grad))
    grad_sq_proj = np.real(np.conj(v) ** 2 * sum(g**2 for g in grad))
    local_shift = th * (2.0 * curvature + 3.0 * grad_abs)
    nested = density * (pot.laplacian + local_shift) + th * grad_sq_proj
    return out - 4.0 * th * nested


def modified_phase(
    state: np.ndarray,
    ctx: OperatorContext,
    beta1: float,
    beta2: float,
    tau: float,
) -> np.ndarray:
    """Real phase field of the dispersive (modified) local stage.

    The stage flow is v -> exp(-i tau f) v with

        f = beta1 (V + theta |v|^2)
          + beta2 tau^2 (2 (grad V)^T grad V - 4 theta g6),

    where g6 collects the second-commutator state terms.  Both summands
    depend on the state only through phase-rotation invariants, so f is
    constant along its own flow and the exponential is exact.  With
    beta2 = 0 no derivatives are taken.
    """
    if ctx.kind is not EquationKind.SCHRODINGER:
        raise ValueError("modified_phase applies to the dispersive equation only")
    f = beta1 * (ctx.potential.values + ctx.theta * np.abs(state) ** 2)
    if beta2 != 0.0:
        f = f + beta2 * tau**2 * _dispersive_curvature(state, ctx)
    return f


def gateaux_fd(
    operator: Callable[[np.ndarray], np.ndarray],
    state: np.ndarray,
    direction: np.ndarray,
    eps: float = DEFAULT_FD_STEP,
) -> np.ndarray:
    """Central-difference directional derivative of a state operator.

    The step is real, so this is the real-linear (Gateaux) derivative;
    operators involving conjugation are differentiated correctly.
    """
    plus = operator(state + eps * direction)
    minus = operator(state - eps * direction)
    return (plus - minus) / (2.0 * eps)


@dataclass(eq=False)
class CommutatorCheck:
    """Closed-form and finite-difference commutators at one state."""

    first_closed: np.ndarray
    first_fd: np.ndarray
    second_closed: np.ndarray
    second_fd: np.ndarray
    first_relative_error: float
    second_relative_error: float


def _relative_deviation(closed: np.ndarray, fd: np.ndarray) -> float:
    scale = max(float(np.max(np.abs(closed))), 1e-300)
    return float(np.max(np.abs(closed - fd))) / scale


def commutator_oracle(
    state: np.ndarray, ctx: OperatorContext, eps: float = DEFAULT_FD_STEP
) -> CommutatorCheck:
    """Rebuild G1 and G2 from directional derivatives and compare.

    G1 is assembled purely from finite differences of F1 and F2; G2 uses
    finite differences of F1, F2, and the closed-form G1 (never the
    closed-form G2, which is exactly what the comparison is testing).
    For the diffusive equation the state must be real-valued, matching
    the closed forms' domain.
    """
    f1 = lambda v: apply_stiff(v, ctx)
    f2 = lambda v: apply_local(v, ctx)
    g1 = lambda v: apply_first_commutator(v, ctx)

    first_fd = gateaux_fd(f2, state, f1(state), eps) - gateaux_fd(
        f1, state, f2(state), eps
    )
    second_fd = gateaux_fd(f2, state, g1(state), eps) - gateaux_fd(
        g1, state, f2(state), eps
    )
    first_closed = apply_first_commutator(state, ctx)
    second_closed = apply_second_commutator(state, ctx)

    return CommutatorCheck(
        first_closed=first_closed,
        first_fd=first_fd,
        second_closed=second_closed,
        second_fd=second_fd,
        first_relative_error=_relative_deviation(first_closed, first_fd),
        second_relative_error=_relative_deviation(second_closed, second_fd),
    )
