"""Splitting schemes, stage dispatch, and time-stepping.

A scheme is a list of stages applied left to right; each stage is the
flow of the stiff part, the local part, or the commutator-modified
local part, over the stage coefficient times the step size.  How local
stages are realized depends on the flow strategy:

  * closed_form_invariance: dispersive only; plain and modified local
    stages are exact phase multiplications (real coefficients only).
  * strang_composite: diffusive only; plain local stages use the exact
    scalar flow, modified ones the symmetric exact/Euler/exact
    composite.
  * rk4_combined: either equation; local stages are integrated by
    classical Runge-Kutta, and complex stage coefficients are accepted.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import flows
from .model import EquationKind, ProblemSpec
from .operators import OperatorContext, make_context
from .spectral import Grid

COEFFICIENT_SUM_TOL = 1e-14
STEP_TIME_TOL = 1e-12


class StageKind(enum.Enum):
    STIFF = "A"
    LOCAL = "B"
    LOCAL_MODIFIED = "B_modified"


@dataclass(frozen=True)
class Stage:
    """One stage: which flow, its time coefficient, and (for modified
    local stages) the weight on the tau^2 commutator correction."""

    kind: StageKind
    coefficient: complex
    commutator_weight: float = 0.0


@dataclass(frozen=True)
class SplittingScheme:
    name: str
    order: int
    stages: tuple[Stage, ...]

    @property
    def has_complex_coefficients(self) -> bool:
        return any(abs(s.coefficient.imag) > 0.0 for s in self.stages)

    def coefficient_sum(self, kind: StageKind) -> complex:
        local = (StageKind.LOCAL, StageKind.LOCAL_MODIFIED)
        if kind in local:
            return sum(s.coefficient for s in self.stages if s.kind in local)
        return sum(s.coefficient for s in self.stages if s.kind is StageKind.STIFF)


def _yoshida_stages(complex_root: bool) -> tuple[Stage, ...]:
    # Triple jump of the symmetric second-order base scheme.  The real
    # branch takes the real cube root; the complex branch the rotated
    # one, which makes every weight's real part positive.
    cbrt2 = 2.0 ** (1.0 / 3.0)
    if complex_root:
        b2 = (1.0 + cbrt2 / 2.0 + cbrt2**2 / 4.0) / 6.0 + 1j * (
            math.sqrt(3.0) / 12.0
        ) * (cbrt2**2 / 2.0 - cbrt2)
    else:
        b2 = (1.0 - cbrt2 - cbrt2**2 / 2.0) / 6.0
    b1 = 0.5 - b2
    a2 = 1.0 - 2.0 * b2
    a3 = 4.0 * b2 - 1.0
    return (
        Stage(StageKind.STIFF, 0.0),
        Stage(StageKind.LOCAL, b1),
        Stage(StageKind.STIFF, a2),
        Stage(StageKind.LOCAL, b2),
        Stage(StageKind.STIFF, a3),
        Stage(StageKind.LOCAL, b2),
        Stage(StageKind.STIFF, a2),
        Stage(StageKind.LOCAL, b1),
    )


_CATALOGUE: dict[str, Callable[[], tuple[int, tuple[Stage, ...]]]] = {
    "lie": lambda: (
        1,
        (Stage(StageKind.STIFF, 1.0), Stage(StageKind.LOCAL, 1.0)),
    ),
    "strang": lambda: (
        2,
        (
            Stage(StageKind.STIFF, 0.0),
            Stage(StageKind.LOCAL, 0.5),
            Stage(StageKind.STIFF, 1.0),
            Stage(StageKind.LOCAL, 0.5),
        ),
    ),
    "yoshida": lambda: (4, _yoshida_stages(complex_root=False)),
    "yoshida_complex": lambda: (4, _yoshida_stages(complex_root=True)),
    "chin_modified": lambda: (
        4,
        (
            Stage(StageKind.LOCAL, 1.0 / 6.0),
            Stage(StageKind.STIFF, 0.5),
            Stage(StageKind.LOCAL_MODIFIED, 2.0 / 3.0, -1.0 / 72.0),
            Stage(StageKind.STIFF, 0.5),
            Stage(StageKind.LOCAL, 1.0 / 6.0),
        ),
    ),
}

SCHEME_NAMES = tuple(_CATALOGUE)


def make_scheme(name: str) -> SplittingScheme:
    """Look up a scheme by name and validate its consistency conditions."""
    try:
        order, stages = _CATALOGUE[name]()
    except KeyError:
        raise ValueError(
            f"unknown scheme {name!r}; available: {', '.join(SCHEME_NAMES)}"
        ) from None
    scheme = SplittingScheme(name=name, order=order, stages=stages)
    for kind in (StageKind.STIFF, StageKind.LOCAL):
        total = scheme.coefficient_sum(kind)
        if abs(total - 1.0) > COEFFICIENT_SUM_TOL:
            raise AssertionError(
                f"scheme {name}: {kind.value} coefficients sum to {total}"
            )
    return scheme


class FlowStrategy(enum.Enum):
    CLOSED_FORM_INVARIANCE = "closed_form_invariance"
    STRANG_COMPOSITE = "strang_composite"
    RK4_COMBINED = "rk4_combined"


def default_strategy(kind: EquationKind, scheme: SplittingScheme) -> FlowStrategy:
    """Preferred local-stage realization for an equation/scheme pair."""
    if scheme.has_complex_coefficients:
        return FlowStrategy.RK4_COMBINED
    if kind is EquationKind.SCHRODINGER:
        return FlowStrategy.CLOSED_FORM_INVARIANCE
    return FlowStrategy.STRANG_COMPOSITE


@dataclass(eq=False)
class IntegrationRun:
    """A fully specified time integration.

    Invariants checked at construction: num_steps * tau reproduces
    total_time to 1e-12, and the strategy is compatible with the
    equation kind and the scheme's coefficients.
    """

    problem: ProblemSpec
    grid: Grid
    scheme: SplittingScheme
    strategy: FlowStrategy
    total_time: float
    num_steps: int
    tau: float
    substeps: int = 1
    context: OperatorContext = field(init=False, repr=False)

    def __post_init__(self) -> None:
        if self.num_steps < 1:
            raise ValueError(f"num_steps must be >= 1, got {self.num_steps}")
        drift = abs(self.num_steps * self.tau - self.total_time)
        if drift > STEP_TIME_TOL * max(1.0, abs(self.total_time)):
            raise ValueError(
                f"num_steps * tau = {self.num_steps * self.tau} does not "
                f"reproduce total_time = {self.total_time}"
            )
        _check_compatibility(self.problem.kind, self.scheme, self.strategy)
        self.context = make_context(self.problem, self.grid)


def make_run(
    problem: ProblemSpec,
    grid: Grid,
    scheme: SplittingScheme,
    strategy: FlowStrategy,
    total_time: float,
    num_steps: int,
    substeps: int = 1,
) -> IntegrationRun:
    """Build a run with tau derived from total_time / num_steps."""
    if num_steps < 1:
        raise ValueError(f"num_steps must be >= 1, got {num_steps}")
    return IntegrationRun(
        problem=problem,
        grid=grid,
        scheme=scheme,
        strategy=strategy,
        total_time=total_time,
        num_steps=num_steps,
        tau=total_time / num_steps,
        substeps=substeps,
    )


def _check_compatibility(
    kind: EquationKind, scheme: SplittingScheme, strategy: FlowStrategy
) -> None:
    if scheme.has_complex_coefficients and strategy is not FlowStrategy.RK4_COMBINED:
        raise ValueError(
            f"scheme {scheme.name} has complex coefficients; only the "
            "rk4_combined strategy integrates those"
        )
    if (
        strategy is FlowStrategy.CLOSED_FORM_INVARIANCE
        and kind is not EquationKind.SCHRODINGER
    ):
        raise ValueError("closed_form_invariance applies to the dispersive equation")
    if strategy is FlowStrategy.STRANG_COMPOSITE and kind is not EquationKind.PARABOLIC:
        raise ValueError("strang_composite applies to the diffusive equation")


def _apply_stage(
    state: np.ndarray,
    stage: Stage,
    tau: float,
    ctx: OperatorContext,
    strategy: FlowStrategy,
    substeps: int,
) -> np.ndarray:
    if stage.kind is StageKind.STIFF:
        if stage.coefficient == 0.0:
            return state
        return flows.linear_flow(state, ctx, stage.coefficient * tau)

    if strategy is FlowStrategy.RK4_COMBINED:
        return flows.rk4_combined_flow(
            state, ctx, stage.coefficient, stage.commutator_weight, tau, substeps
        )

    beta = stage.coefficient.real
    if strategy is FlowStrategy.CLOSED_FORM_INVARIANCE:
        return flows.dispersive_local_flow(
            state, ctx, beta, stage.commutator_weight, tau
        )
    if stage.kind is StageKind.LOCAL:
        return flows.diffusive_local_exact_flow(state, ctx, beta, tau)
    return flows.diffusive_composite_flow(
        state, ctx, beta, stage.commutator_weight, tau
    )


def apply_scheme_step(
    state: np.ndarray,
    scheme: SplittingScheme,
    tau: float,
    ctx: OperatorContext,
    strategy: FlowStrategy,
    substeps: int = 1,
) -> np.ndarray:
    """Advance the state through one full composite step of size tau."""
    for index, stage in enumerate(scheme.stages):
        try:
            state = _apply_stage(state, stage, tau, ctx, strategy, substeps)
        except flows.BlowUpError as err:
            raise flows.BlowUpError(
                err.effective_time,
                f"stage {index} ({stage.kind.value}, coefficient "
                f"{stage.coefficient}): {err}",
            ) from err
    return state


def splitting_step(state: np.ndarray, run: IntegrationRun) -> np.ndarray:
    """One composite step of the run's scheme at its step size."""
    return apply_scheme_step(
        state, run.scheme, run.tau, run.context, run.strategy, run.substeps
    )


@dataclass(eq=False)
class IntegrationResult:
    """Outcome of a time integration.

    status is "ok", "unstable" (norm above threshold or non-finite), or
    "blown_up" (a local exact flow left its domain).  observations holds
    (step, time, value) triples from the observer callback.
    """

    final_state: np.ndarray
    status: str
    steps_completed: int
    observations: list[tuple[int, float, object]]
    failure_message: str | None = None

    @property
    def ok(self) -> bool:
        return self.status == "ok"


def integrate(
    run: IntegrationRun,
    initial_state: np.ndarray,
    observer: Callable[[int, float, np.ndarray], object] | None = None,
    observer_stride: int = 1,
) -> IntegrationResult:
    """Step the state through the whole run, watching for instability.

    The observer, if given, is called at step 0, every observer_stride
    steps, and at the final step.  Instability (discrete L2 norm above
    1e8, or any non-finite value) and local-flow blow-up end the run
    early with a describing record instead of raising.
    """
    from .diagnostics import discrete_l2

    state = initial_state
    observations: list[tuple[int, float, object]] = []

    def observe(step: int) -> None:
        if observer is not None:
            observations.append((step, step * run.tau, observer(step, step * run.tau, state)))

    observe(0)
    for step in range(1, run.num_steps + 1):
        try:
            # divergence shows up as overflow before the norm check
            # catches it; the floating-point warnings are expected noise
            with np.errstate(over="ignore", invalid="ignore"):
                state = splitting_step(state, run)
                norm = discrete_l2(state, run.grid)
        except flows.BlowUpError as err:
            return IntegrationResult(
                final_state=state,
                status="blown_up",
                steps_completed=step - 1,
                observations=observations,
                failure_message=str(err),
            )
        if not np.isfinite(norm) or norm > flows.INSTABILITY_NORM:
            return IntegrationResult(
                final_state=state,
                status="unstable",
                steps_completed=step,
                observations=observations,
                failure_message=f"norm {norm:.3e} after step {step}",
            )
        if step == run.num_steps or step % observer_stride == 0:
            observe(step)
    return IntegrationResult(
        final_state=state,
        status="ok",
        steps_completed=run.num_steps,
        observations=observations,
    )
