"""Experiment harness: convergence scans, energy traces, validation, probe.

Every experiment is a pure function of an ExperimentConfig; CSV writers
are separate so results can be inspected programmatically.  Output is
deterministic for a fixed config and seed, except for the
runtime_seconds column, which reports wall-clock measurements.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from typing import IO

import numpy as np

from .diagnostics import (
    EnergySeries,
    ProbeResult,
    discrete_l2,
    discrete_l2_error,
    energy,
    energy_series,
    observed_order,
    order_reduction_probe,
)
from .integrators import (
    SCHEME_NAMES,
    FlowStrategy,
    IntegrationRun,
    default_strategy,
    integrate,
    make_run,
    make_scheme,
)
from .model import (
    EquationKind,
    PotentialSpec,
    ProblemSpec,
    exact_linear_solution,
    gaussian_initial_state,
    matched_amplitude,
)
from .operators import commutator_oracle, make_context, modified_phase
from .spectral import band_limited_state, build_grid
from .flows import dispersive_local_flow

DEFAULT_METHODS = ("lie", "strang", "yoshida", "chin_modified")
FLOOR_SCALE = 1e-4
REFERENCE_REFINEMENT = 10


def localized_random_state(
    grid, band: int, rng: np.random.Generator, real: bool = False
) -> np.ndarray:
    """Random smooth test field that decays at the box boundary.

    A band-limited draw with smoothly tapered spectrum, multiplied by
    the centered Gaussian and renormalized.  The envelope keeps products
    with the (non-periodic) polynomial potential spectrally accurate:
    raw band-limited fields touch the boundary, where the potential's
    periodic continuation has a derivative jump.  With ``real`` the real
    part is taken first (diffusive test states must be real).
    """
    state = band_limited_state(grid, band, rng, smooth=True)
    if real:
        state = np.real(state).astype(complex)
    state = state * gaussian_initial_state(grid)
    return state / discrete_l2(state, grid)


@dataclass(frozen=True)
class ExperimentConfig:
    """Shared experiment parameters; subcommands use the fields they need.

    taus = None selects a step-count grid of 16 geometrically spaced
    divisors of final_time with tau in [1e-3, 1e-1]; explicit values are
    snapped to the nearest exact divisor so every run lands on the final
    time.  amplitude = None selects the kind-matched potential sign.
    """

    equation: str = "schrodinger"
    degree: int = 2
    amplitude: float | None = None
    theta: float = 1.0
    dim: int = 1
    points_per_dim: int = 256
    half_width: float = 10.0
    final_time: float = 1.0
    taus: tuple[float, ...] | None = None
    methods: tuple[str, ...] = DEFAULT_METHODS
    strategy: str = "default"
    substeps: int = 1
    reference: str = "refined"
    seed: int = 42
    workers: int = 1
    num_steps: int = 10000
    samples: int = 200
    variant: str = "naive"
    probe_u0: float = 0.5
    probe_horizon: float = 0.5

    def kind(self) -> EquationKind:
        return EquationKind(self.equation)

    def resolved_amplitude(self) -> float:
        if self.amplitude is None:
            return matched_amplitude(self.kind())
        return self.amplitude

    def problem(self) -> ProblemSpec:
        return ProblemSpec(
            kind=self.kind(),
            theta=self.theta,
            potential=PotentialSpec(
                degree=self.degree, amplitude=self.resolved_amplitude()
            ),
        )

    def build_grid(self):
        return build_grid(self.half_width, self.points_per_dim, self.dim)


def validate_config(config: ExperimentConfig) -> None:
    """Reject invalid field values before any computation."""
    try:
        kind = config.kind()
    except ValueError:
        raise ValueError(
            f"equation must be 'schrodinger' or 'parabolic', got {config.equation!r}"
        ) from None
    if config.degree not in (2, 4):
        raise ValueError(f"degree must be 2 or 4, got {config.degree}")
    for name in config.methods:
        if name not in SCHEME_NAMES:
            raise ValueError(
                f"unknown method {name!r}; available: {', '.join(SCHEME_NAMES)}"
            )
    if not config.methods:
        raise ValueError("methods must not be empty")
    if config.strategy != "default":
        try:
            FlowStrategy(config.strategy)
        except ValueError:
            names = ", ".join(s.value for s in FlowStrategy)
            raise ValueError(
                f"strategy must be 'default' or one of {names}, got {config.strategy!r}"
            ) from None
    if config.reference not in ("refined", "exact"):
        raise ValueError(
            f"reference must be 'refined' or 'exact', got {config.reference!r}"
        )
    if config.final_time <= 0:
        raise ValueError(f"final_time must be positive, got {config.final_time}")
    if config.workers < 1:
        raise ValueError(f"workers must be >= 1, got {config.workers}")
    if config.substeps < 1:
        raise ValueError(f"substeps must be >= 1, got {config.substeps}")
    if config.num_steps < 1:
        raise ValueError(f"num_steps must be >= 1, got {config.num_steps}")
    if config.samples < 1:
        raise ValueError(f"samples must be >= 1, got {config.samples}")
    if config.theta != 0.0 and config.reference == "exact":
        raise ValueError("reference='exact' requires theta = 0")
    if config.reference == "exact":
        if config.degree != 2:
            raise ValueError("reference='exact' requires degree = 2")
        if config.resolved_amplitude() != matched_amplitude(kind):
            raise ValueError(
                "reference='exact' requires the kind-matched potential amplitude"
            )
    # grid parameters are validated by build_grid


def default_step_counts() -> list[int]:
    """16 geometrically spaced integer step counts for final-time-1 runs."""
    return sorted({int(round(n)) for n in np.geomspace(10, 1000, 16)})


def resolve_step_counts(config: ExperimentConfig) -> list[int]:
    """Step counts whose tau values exactly divide the final time."""
    if config.taus is None:
        return default_step_counts()
    counts = []
    for tau in config.taus:
        if tau <= 0:
            raise ValueError(f"tau values must be positive, got {tau}")
        counts.append(max(1, round(config.final_time / tau)))
    return counts


@dataclass(eq=False)
class ConvergenceRow:
    method: str
    tau: float
    num_steps: int
    global_error: float
    runtime_seconds: float
    status: str


@dataclass(eq=False)
class ConvergenceReport:
    config: ExperimentConfig
    rows: list[ConvergenceRow]
    fitted_orders: dict[str, float]
    error_floor: float

    def rows_for(self, method: str) -> list[ConvergenceRow]:
        return [r for r in self.rows if r.method == method]


def _resolve_strategy(config: ExperimentConfig, scheme) -> FlowStrategy:
    if config.strategy == "default":
        return default_strategy(config.kind(), scheme)
    return FlowStrategy(config.strategy)


def _reference_state(
    config: ExperimentConfig, grid, step_counts: list[int]
) -> np.ndarray:
    """Endpoint reference: exact closed form or a 10x-refined run.

    The refined reference always uses the fourth-order modified scheme
    with the kind's default strategy, independent of the strategy under
    test, so strategy comparisons share one reference.
    """
    problem = config.problem()
    if config.reference == "exact":
        return exact_linear_solution(problem, grid, config.final_time)
    scheme = make_scheme("chin_modified")
    run = make_run(
        problem=problem,
        grid=grid,
        scheme=scheme,
        strategy=default_strategy(config.kind(), scheme),
        total_time=config.final_time,
        num_steps=REFERENCE_REFINEMENT * max(step_counts),
    )
    result = integrate(run, gaussian_initial_state(grid))
    if not result.ok:
        raise RuntimeError(
            f"reference run failed ({result.status}): {result.failure_message}"
        )
    return result.final_state


def run_convergence(config: ExperimentConfig) -> ConvergenceReport:
    """Global endpoint error of each method over the step-size grid.

    Unstable or blown-up runs become rows with that status and no error
    value; they are data, not failures.
    """
    validate_config(config)
    step_counts = resolve_step_counts(config)
    if len(step_counts) < 3:
        raise ValueError(
            f"need at least 3 tau values for a convergence scan, got {len(step_counts)}"
        )
    grid = config.build_grid()
    problem = config.problem()
    reference = _reference_state(config, grid, step_counts)
    initial = gaussian_initial_state(grid)

    cases = [
        (method, num_steps) for method in config.methods for num_steps in step_counts
    ]

    def run_case(case: tuple[str, int]) -> ConvergenceRow:
        method, num_steps = case
        scheme = make_scheme(method)
        run = make_run(
            problem=problem,
            grid=grid,
            scheme=scheme,
            strategy=_resolve_strategy(config, scheme),
            total_time=config.final_time,
            num_steps=num_steps,
            substeps=config.substeps,
        )
        started = time.perf_counter()
        result = integrate(run, initial)
        elapsed = time.perf_counter() - started
        error = (
            discrete_l2_error(result.final_state, reference, grid)
            if result.ok
            else math.nan
        )
        return ConvergenceRow(
            method=method,
            tau=run.tau,
            num_steps=num_steps,
            global_error=error,
            runtime_seconds=elapsed,
            status=result.status,
        )

    if config.workers > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            rows = list(pool.map(run_case, cases))
    else:
        rows = [run_case(case) for case in cases]

    error_floor = _estimate_error_floor(config, rows, max(step_counts))
    fitted = {}
    for method in config.methods:
        own = [r for r in rows if r.method == method and r.status == "ok"]
        try:
            fitted[method] = observed_order(
                [r.tau for r in own], [r.global_error for r in own], error_floor
            )
        except ValueError:
            fitted[method] = math.nan
    return ConvergenceReport(
        config=config, rows=rows, fitted_orders=fitted, error_floor=error_floor
    )


def _estimate_error_floor(
    config: ExperimentConfig, rows: list[ConvergenceRow], finest_count: int
) -> float:
    """Accuracy floor of the reference: zero for the exact solution,
    otherwise a safety fraction of the best error at the finest step."""
    if config.reference == "exact":
        return 0.0
    finest = [
        r.global_error
        for r in rows
        if r.num_steps == finest_count
        and r.status == "ok"
        and np.isfinite(r.global_error)
    ]
    if not finest:
        return 0.0
    return FLOOR_SCALE * min(finest)


@dataclass(eq=False)
class EnergyReport:
    config: ExperimentConfig
    method: str
    tau: float
    series: EnergySeries
    status: str


def run_energy(config: ExperimentConfig) -> EnergyReport:
    """Energy trace of one method over a long dispersive run."""
    validate_config(config)
    if config.kind() is not EquationKind.SCHRODINGER:
        raise ValueError("the energy experiment applies to the dispersive equation")
    if len(config.methods) != 1:
        raise ValueError(
            "the energy experiment takes exactly one method; "
            f"got {len(config.methods)}"
        )
    method = config.methods[0]
    grid = config.build_grid()
    scheme = make_scheme(method)
    run = make_run(
        problem=config.problem(),
        grid=grid,
        scheme=scheme,
        strategy=_resolve_strategy(config, scheme),
        total_time=config.final_time,
        num_steps=config.num_steps,
        substeps=config.substeps,
    )
    stride = max(1, config.num_steps // config.samples)
    result = integrate(
        run,
        gaussian_initial_state(grid),
        observer=lambda step, t, state: energy(state, run.context),
        observer_stride=stride,
    )
    if not result.ok:
        raise RuntimeError(
            f"energy run failed ({result.status}): {result.failure_message}"
        )
    return EnergyReport(
        config=config,
        method=method,
        tau=run.tau,
        series=energy_series(result.observations),
        status=result.status,
    )


@dataclass(eq=False)
class ValidationCheck:
    name: str
    passed: bool
    measured: float
    tolerance: float
    detail: str


@dataclass(eq=False)
class ValidationReport:
    config: ExperimentConfig
    checks: list[ValidationCheck]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)


VALIDATE_TAU = 1e-3
EXACT_SOLUTION_TOL = 1e-8
ORACLE_TOL = 1e-4
INVARIANCE_TOL = 1e-8
NORM_CONSERVATION_TOL = 1e-10


def run_validate(config: ExperimentConfig) -> ValidationReport:
    """Exact-solution error plus the runtime invariant suite.

    Requires the analytically solvable setting: degree 2, theta = 0,
    kind-matched amplitude.  The suite always cross-checks the
    commutator closed forms against the finite-difference oracle; the
    dispersive kind additionally checks the stage-phase invariance
    principle and norm conservation, which are its structural
    properties.
    """
    validate_config(config)
    if config.degree != 2:
        raise ValueError("validation requires degree = 2")
    if config.theta != 0.0:
        raise ValueError("validation requires theta = 0")
    if config.resolved_amplitude() != matched_amplitude(config.kind()):
        raise ValueError(
            "validation requires the kind-matched potential amplitude "
            f"({matched_amplitude(config.kind())} for {config.equation})"
        )

    grid = config.build_grid()
    problem = config.problem()
    kind = config.kind()
    checks: list[ValidationCheck] = []

    scheme = make_scheme("chin_modified")
    num_steps = max(1, round(config.final_time / VALIDATE_TAU))
    run = make_run(
        problem=problem,
        grid=grid,
        scheme=scheme,
        strategy=default_strategy(kind, scheme),
        total_time=config.final_time,
        num_steps=num_steps,
    )
    result = integrate(run, gaussian_initial_state(grid))
    if result.ok:
        err = discrete_l2_error(
            result.final_state,
            exact_linear_solution(problem, grid, config.final_time),
            grid,
        )
    else:
        err = math.inf
    checks.append(
        ValidationCheck(
            name="exact_solution_error",
            passed=err < EXACT_SOLUTION_TOL,
            measured=err,
            tolerance=EXACT_SOLUTION_TOL,
            detail=f"chin_modified at tau={run.tau:g} vs closed-form solution",
        )
    )

    rng = np.random.default_rng(config.seed)
    probe_state = localized_random_state(
        grid,
        max(1, config.points_per_dim // 8),
        rng,
        real=kind is EquationKind.PARABOLIC,
    )
    ctx = run.context
    oracle = commutator_oracle(probe_state, ctx)
    checks.append(
        ValidationCheck(
            name="commutator_oracle_first",
            passed=oracle.first_relative_error < ORACLE_TOL,
            measured=oracle.first_relative_error,
            tolerance=ORACLE_TOL,
            detail="closed-form first commutator vs finite-difference assembly",
        )
    )
    checks.append(
        ValidationCheck(
            name="commutator_oracle_second",
            passed=oracle.second_relative_error < ORACLE_TOL,
            measured=oracle.second_relative_error,
            tolerance=ORACLE_TOL,
            detail="closed-form second commutator vs finite-difference assembly",
        )
    )

    if kind is EquationKind.SCHRODINGER:
        tau = 0.05
        before = modified_phase(probe_state, ctx, 2.0 / 3.0, -1.0 / 72.0, tau)
        moved = dispersive_local_flow(probe_state, ctx, 2.0 / 3.0, -1.0 / 72.0, tau)
        after = modified_phase(moved, ctx, 2.0 / 3.0, -1.0 / 72.0, tau)
        drift = discrete_l2(before - after, grid)
        checks.append(
            ValidationCheck(
                name="invariance_principle",
                passed=drift < INVARIANCE_TOL,
                measured=drift,
                tolerance=INVARIANCE_TOL,
                detail="stage phase before vs after the modified local flow",
            )
        )

        norm_run = make_run(
            problem=problem,
            grid=grid,
            scheme=scheme,
            strategy=default_strategy(kind, scheme),
            total_time=1.0,
            num_steps=100,
        )
        state = gaussian_initial_state(grid)
        norm0 = discrete_l2(state, grid)
        norm_result = integrate(norm_run, state)
        norm_drift = (
            abs(discrete_l2(norm_result.final_state, grid) - norm0)
            if norm_result.ok
            else math.inf
        )
        checks.append(
            ValidationCheck(
                name="norm_conservation",
                passed=norm_drift < NORM_CONSERVATION_TOL,
                measured=norm_drift,
                tolerance=NORM_CONSERVATION_TOL,
                detail="discrete L2 norm drift over 100 steps",
            )
        )

    return ValidationReport(config=config, checks=checks)


@dataclass(eq=False)
class ProbeReport:
    config: ExperimentConfig
    result: ProbeResult
    local_order: float
    global_order: float


def run_order_reduction(config: ExperimentConfig) -> ProbeReport:
    """Scalar order-reduction probe with fitted local/global slopes."""
    validate_config(config)
    taus = np.asarray(config.taus, dtype=float) if config.taus is not None else None
    result = order_reduction_probe(
        u0=config.probe_u0,
        taus=taus,
        variant=config.variant,
        horizon=config.probe_horizon,
    )

    def safe_fit(errors: np.ndarray) -> float:
        try:
            return observed_order(result.taus, errors)
        except ValueError:
            return math.nan

    return ProbeReport(
        config=config,
        result=result,
        local_order=safe_fit(result.local_errors),
        global_order=safe_fit(result.global_errors),
    )


# ---------------------------------------------------------------------------
# CSV emission


def _format_value(value) -> str:
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (tuple, list)):
        return ",".join(_format_value(v) for v in value)
    if value is None:
        return "none"
    return str(value)


def _config_comment(config: ExperimentConfig) -> str:
    fields = asdict(config)
    parts = [f"{key}={_format_value(fields[key])}" for key in sorted(fields)]
    return "# config " + " ".join(parts)


def write_convergence_csv(report: ConvergenceReport, out: IO[str]) -> None:
    config = report.config
    out.write("# splitflow-convergence-csv v1\n")
    out.write(_config_comment(config) + "\n")
    out.write(f"# error_floor={repr(report.error_floor)}\n")
    for method in config.methods:
        order = report.fitted_orders.get(method, math.nan)
        out.write(f"# fitted_order {method}={order:.6f}\n")
    out.write(
        "method,equation,q,C0,theta,dim,points_per_dim,tau,"
        "global_error,runtime_seconds,status\n"
    )
    for row in report.rows:
        error = repr(row.global_error) if row.status == "ok" else ""
        out.write(
            f"{row.method},{config.equation},{config.degree},"
            f"{repr(config.resolved_amplitude())},{repr(config.theta)},"
            f"{config.dim},{config.points_per_dim},{repr(row.tau)},"
            f"{error},{row.runtime_seconds:.6f},{row.status}\n"
        )


def write_energy_csv(report: EnergyReport, out: IO[str]) -> None:
    out.write("# splitflow-energy-csv v1\n")
    out.write(_config_comment(report.config) + "\n")
    out.write(f"# method={report.method} tau={repr(report.tau)}\n")
    out.write("step,time,energy,deviation\n")
    series = report.series
    for step, t, e, dev in zip(
        series.steps, series.times, series.energies, series.deviations
    ):
        out.write(f"{int(step)},{repr(float(t))},{repr(float(e))},{repr(float(dev))}\n")


def write_probe_csv(report: ProbeReport, out: IO[str]) -> None:
    out.write("# splitflow-probe-csv v1\n")
    out.write(_config_comment(report.config) + "\n")
    out.write(f"# fitted_order local={report.local_order:.6f}\n")
    out.write(f"# fitted_order global={report.global_order:.6f}\n")
    out.write("tau,local_error,global_error\n")
    result = report.result
    for tau, le, ge in zip(result.taus, result.local_errors, result.global_errors):
        out.write(f"{repr(float(tau))},{repr(float(le))},{repr(float(ge))}\n")
