"""Measurement utilities: norms, energy, convergence fits, scalar probe.

The scalar probe isolates the order-reduction mechanism of complex
splitting coefficients on a one-dimensional surrogate: the cubic ODE
u' = b |u|^2 u, whose exact flow is known for any complex b.  Composing
its exact stage flows with the complex fourth-order coefficients loses
two orders locally; the same composition telescopes exactly when either
the coefficients are real or the conjugation is dropped.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .flows import BlowUpError
from .operators import OperatorContext
from .spectral import Grid, spectral_laplacian


def discrete_l2(state: np.ndarray, grid: Grid) -> float:
    """Grid-weighted L2 norm, consistent with the continuum norm."""
    return float(np.sqrt(grid.cell_volume * np.sum(np.abs(state) ** 2)))


def discrete_l2_error(state: np.ndarray, reference: np.ndarray, grid: Grid) -> float:
    return discrete_l2(state - reference, grid)


def energy(state: np.ndarray, ctx: OperatorContext) -> float:
    """Trapezoidal value of int (-Lap(u) + V u + theta |u|^2 u) conj(u) dx.

    On the periodic grid the trapezoidal rule is the cell-volume-
    weighted lattice sum.
    """
    lap = spectral_laplacian(state, ctx.grid)
    integrand = (
        -lap + ctx.potential.values * state + ctx.theta * np.abs(state) ** 2 * state
    ) * np.conj(state)
    return float(ctx.grid.cell_volume * np.sum(np.real(integrand)))


@dataclass(eq=False)
class EnergySeries:
    """Sampled energy trace with deviations from the series minimum."""

    steps: np.ndarray
    times: np.ndarray
    energies: np.ndarray
    deviations: np.ndarray

    @property
    def max_deviation(self) -> float:
        return float(np.max(self.deviations))

    @property
    def endpoint_drift(self) -> float:
        return float(abs(self.energies[-1] - self.energies[0]))


def energy_series(observations: list[tuple[int, float, float]]) -> EnergySeries:
    """Assemble an EnergySeries from integrate() observer records."""
    if not observations:
        raise ValueError("no observations to assemble")
    steps = np.array([s for s, _, _ in observations], dtype=int)
    times = np.array([t for _, t, _ in observations], dtype=float)
    energies = np.array([e for _, _, e in observations], dtype=float)
    return EnergySeries(
        steps=steps,
        times=times,
        energies=energies,
        deviations=energies - energies.min(),
    )


def observed_order(
    taus: np.ndarray, errors: np.ndarray, floor: float = 0.0
) -> float:
    """Least-squares slope of log(error) against log(tau).

    Non-finite and nonpositive errors are dropped, as are errors within
    a factor 50 of the resolution floor, where the convergence curve
    flattens into reference noise.  Raises if fewer than two points
    survive.
    """
    taus = np.asarray(taus, dtype=float)
    errors = np.asarray(errors, dtype=float)
    mask = np.isfinite(errors) & (errors > 0.0)
    if floor > 0.0:
        mask &= errors >= 50.0 * floor
    if int(mask.sum()) < 3:
        raise ValueError("insufficient data for an order fit after filtering")
    slope = np.polyfit(np.log(taus[mask]), np.log(errors[mask]), 1)[0]
    return float(slope)


def scalar_cubic_flow(u0: complex, b: complex, t: float) -> complex:
    """Exact flow of the scalar ODE u' = b |u|^2 u at time t.

    The squared modulus solves a scalar Riccati equation; the phase
    integrates the modulus.  Requires the trajectory to exist up to t.
    """
    m0 = abs(u0) ** 2
    den = 1.0 - 2.0 * b.real * t * m0
    if den <= 0.0:
        raise BlowUpError(t, f"scalar cubic flow blew up before time {t}")
    if b.real == 0.0:
        phase = b.imag * t * m0
    else:
        phase = b.imag / (2.0 * b.real) * np.log(1.0 / den)
    return u0 * np.exp(1j * phase) / np.sqrt(den)


def scalar_cubic_holomorphic_flow(u0: complex, b: complex, t: complex) -> complex:
    """Exact flow of u' = b u^3 (no conjugation), principal branch."""
    return u0 / np.sqrt(1.0 - 2.0 * b * t * u0**2)


PROBE_VARIANTS = ("naive", "holomorphic", "real_coefficients")


@dataclass(eq=False)
class ProbeResult:
    """Local and global stage-composition defects of the scalar probe."""

    variant: str
    taus: np.ndarray
    local_errors: np.ndarray
    global_errors: np.ndarray

    def local_order(self, floor: float = 0.0) -> float:
        return observed_order(self.taus, self.local_errors, floor)

    def global_order(self, floor: float = 0.0) -> float:
        return observed_order(self.taus, self.global_errors, floor)


DEFAULT_PROBE_TAUS = (0.02, 0.01, 0.005, 0.0025)


def order_reduction_probe(
    u0: float = 0.5,
    taus: np.ndarray | None = None,
    variant: str = "naive",
    horizon: float = 0.5,
) -> ProbeResult:
    """Compose scalar stage flows with fourth-order local coefficients.

    The stage pattern is the local-coefficient palindrome (b1, b2, b2,
    b1) of the fourth-order scheme, each stage the exact flow of
    u' = b_k |u|^2 u, compared against the exact unit-coefficient flow.
    Variants:

      * "naive": the complex coefficients with the conjugated flow; the
        composition defect is third order locally, second globally.
      * "holomorphic": conjugation dropped (u' = b u^3); the flows form
        a group in the combined complex time b t, so the composition
        telescopes and the defect is pure roundoff.
      * "real_coefficients": the real fourth-order coefficients; stage
        flows are time-rescalings of one field and telescope exactly.

    Local errors compare one composite step against the exact flow at
    time tau; global errors repeat the step up to the horizon, which
    must be an integer multiple of every tau.
    """
    if variant not in PROBE_VARIANTS:
        raise ValueError(f"variant must be one of {PROBE_VARIANTS}, got {variant!r}")
    from .integrators import StageKind, make_scheme

    scheme_name = "yoshida" if variant == "real_coefficients" else "yoshida_complex"
    scheme = make_scheme(scheme_name)
    local_coeffs = [s.coefficient for s in scheme.stages if s.kind is StageKind.LOCAL]

    flow = scalar_cubic_holomorphic_flow if variant == "holomorphic" else scalar_cubic_flow

    if taus is None:
        taus = DEFAULT_PROBE_TAUS
    taus = np.asarray(taus, dtype=float)

    local = np.empty_like(taus)
    global_ = np.empty_like(taus)
    for i, tau in enumerate(taus):
        def composite(u: complex) -> complex:
            for b in local_coeffs:
                u = flow(u, b, tau)
            return u

        local[i] = abs(composite(u0) - flow(u0, 1.0, tau))
        n = int(round(horizon / tau))
        u = u0
        for _ in range(n):
            u = composite(u)
        global_[i] = abs(u - flow(u0, 1.0, n * tau))

    return ProbeResult(
        variant=variant, taus=taus, local_errors=local, global_errors=global_
    )
