"""Exact and approximate flows for the individual splitting stages.

Each function advances a state through one stage flow.  Times passed in
are the effective stage times (scheme coefficient times step size)
except where a stage needs the raw step size to weight its correction
term; those take the coefficient and the step separately.
"""

from __future__ import annotations

import warnings

import numpy as np

from .operators import (
    OperatorContext,
    apply_local,
    apply_second_commutator,
    modified_phase,
)
from .spectral import from_spectral, to_spectral

INSTABILITY_NORM = 1e8


class BackwardFlowWarning(UserWarning):
    """Linear stage applied over a time that amplifies high modes."""


class BlowUpError(RuntimeError):
    """Exact local flow left its domain (finite-time blow-up)."""

    def __init__(self, effective_time: float, message: str):
        super().__init__(message)
        self.effective_time = effective_time


def linear_flow(state: np.ndarray, ctx: OperatorContext, t: complex) -> np.ndarray:
    """Exact flow of u' = c Lap(u) over time t via diagonal multipliers.

    Complex t is accepted (complex-coefficient schemes).  If Re(c t) is
    negative the multiplier grows like exp(|Re(c t)| |lam|) on the
    highest modes; this is flagged with a warning, not an error, so
    deliberately unstable runs can still be observed.
    """
    c = ctx.linear_coefficient
    if (c * t).real < 0.0:
        warnings.warn(
            f"linear stage over time {t} reverses the dissipative direction "
            "and amplifies high modes",
            BackwardFlowWarning,
            stacklevel=2,
        )
    cache = ctx.linear_multipliers
    key = complex(t)
    multiplier = cache.get(key)
    if multiplier is None:
        multiplier = np.exp(c * key * ctx.grid.laplacian_symbol)
        cache[key] = multiplier
    return from_spectral(multiplier * to_spectral(state, ctx.grid), ctx.grid)


def dispersive_local_flow(
    state: np.ndarray,
    ctx: OperatorContext,
    beta1: float,
    beta2: float,
    tau: float,
) -> np.ndarray:
    """Exact dispersive stage flow v -> exp(-i tau f(v)) v.

    Covers both the plain local stage (beta2 = 0) and the modified one:
    the phase field f is constant along the flow, so the exponential is
    the exact solution.  The modulus of every grid value is preserved.
    """
    f = modified_phase(state, ctx, beta1, beta2, tau)
    return np.exp(-1j * tau * f) * state


def diffusive_local_exact_flow(
    state: np.ndarray, ctx: OperatorContext, beta: float, tau: float
) -> np.ndarray:
    """Exact flow of u' = beta (V + theta u^2) u over one step.

    The scalar Bernoulli solution gives, with effective time t = beta tau,

        u(t) = u0 / sqrt(exp(-2 t V) + theta u0^2 expm1(-2 t V) / V),

    with the V -> 0 limit  u0 / sqrt(1 - 2 t theta u0^2)  used where
    |V| < 1e-12.  Negative effective times (schemes with negative
    weights) evaluate through the same formula.  A nonpositive radicand
    means the trajectory blew up inside the step.
    """
    t = beta * tau
    pot = ctx.potential.values
    th = ctx.theta
    u2 = state**2

    small = np.abs(pot) < 1e-12
    safe_pot = np.where(small, 1.0, pot)
    decay = np.exp(-2.0 * t * pot)
    with_potential = decay + th * u2 * np.expm1(-2.0 * t * safe_pot) / safe_pot
    at_zero = 1.0 - 2.0 * t * th * u2
    radicand = np.where(small, at_zero, with_potential)

    if np.any(radicand.real <= 0.0):
        raise BlowUpError(
            t, f"local flow blew up within effective time {t}: nonpositive radicand"
        )
    return state / np.sqrt(radicand)


def diffusive_commutator_euler_flow(
    state: np.ndarray, ctx: OperatorContext, gamma: float, tau: float
) -> np.ndarray:
    """One explicit Euler step for u' = gamma tau^2 G2(u) over time tau."""
    return state + gamma * tau**3 * apply_second_commutator(state, ctx)


def diffusive_composite_flow(
    state: np.ndarray,
    ctx: OperatorContext,
    beta: float,
    gamma: float,
    tau: float,
) -> np.ndarray:
    """Symmetric splitting of the diffusive modified stage.

    Approximates the flow of u' = beta F2(u) + gamma tau^2 G2(u) by an
    exact half-step of the local part, a full Euler step of the
    correction, and another exact half-step.
    """
    mid = diffusive_local_exact_flow(state, ctx, beta, 0.5 * tau)
    mid = diffusive_commutator_euler_flow(mid, ctx, gamma, tau)
    return diffusive_local_exact_flow(mid, ctx, beta, 0.5 * tau)


def rk4_combined_flow(
    state: np.ndarray,
    ctx: OperatorContext,
    beta1: complex,
    beta2: complex,
    tau: complex,
    substeps: int = 1,
) -> np.ndarray:
    """Classical Runge-Kutta step for u' = beta1 F2(u) + beta2 tau^2 G2(u).

    The tau^2 weight on the correction is frozen at the scheme step, and
    the whole stage time tau is integrated in ``substeps`` equal pieces.
    Complex stage coefficients are allowed, which is what makes this the
    fallback for complex-coefficient schemes.  With beta2 = 0 the
    commutator is never evaluated.
    """
    if substeps < 1:
        raise ValueError(f"substeps must be >= 1, got {substeps}")
    weight = beta2 * tau**2

    if beta2 == 0.0:
        rhs = lambda v: beta1 * apply_local(v, ctx)
    else:
        rhs = lambda v: beta1 * apply_local(v, ctx) + weight * apply_second_commutator(
            v, ctx
        )

    h = tau / substeps
    u = state
    for _ in range(substeps):
        k1 = rhs(u)
        k2 = rhs(u + 0.5 * h * k1)
        k3 = rhs(u + 0.5 * h * k2)
        k4 = rhs(u + h * k3)
        u = u + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return u
