"""Problem definitions: equation families, potentials, reference states.

Both equations share the structure u_t = c * Lap(u) + cb * (V + theta
|u|^2) u.  The dispersive family has c = i, cb = -i; the diffusive
family has c = cb = 1.  Potentials are even monomial wells V(x) =
amplitude * k_q * sum_j x_j^q with k_2 = 1 and k_4 = 1/24.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .spectral import Grid

POLYNOMIAL_SCALE = {2: 1.0, 4: 1.0 / 24.0}


class EquationKind(enum.Enum):
    """The two evolution families sharing one right-hand-side template."""

    SCHRODINGER = "schrodinger"
    PARABOLIC = "parabolic"

    @property
    def linear_coefficient(self) -> complex:
        """Factor c on the Laplacian term."""
        return 1j if self is EquationKind.SCHRODINGER else 1.0 + 0j

    @property
    def nonlinear_coefficient(self) -> complex:
        """Factor cb on the potential-plus-interaction term."""
        return -1j if self is EquationKind.SCHRODINGER else 1.0 + 0j


@dataclass(frozen=True)
class PotentialSpec:
    """Even monomial trapping/driving potential.

    degree: monomial power q, either 2 or 4.
    amplitude: overall sign and strength factor multiplying the
        normalized monomial sum.
    """

    degree: int = 2
    amplitude: float = 1.0

    def __post_init__(self) -> None:
        if self.degree not in POLYNOMIAL_SCALE:
            raise ValueError(f"degree must be 2 or 4, got {self.degree}")


@dataclass(frozen=True)
class ProblemSpec:
    """Full continuous problem: equation family, interaction, potential."""

    kind: EquationKind
    theta: float
    potential: PotentialSpec


@dataclass(eq=False)
class PotentialData:
    """Potential and its analytic derivatives sampled on a grid.

    Polynomial wells are differentiated in closed form; the periodic
    spectral derivative does not apply to them (they are not periodic on
    the box), so nothing here touches the Fourier multipliers.
    """

    values: np.ndarray
    gradient: tuple[np.ndarray, ...]
    laplacian: np.ndarray
    grad_squared: np.ndarray


def evaluate_potential(spec: PotentialSpec, grid: Grid) -> PotentialData:
    """Sample the potential and its derivatives on the full mesh."""
    q = spec.degree
    scale = spec.amplitude * POLYNOMIAL_SCALE[q]
    mesh = grid.mesh()

    values = scale * sum(x**q for x in mesh)
    gradient = tuple(scale * q * x ** (q - 1) for x in mesh)
    laplacian = scale * q * (q - 1) * sum(x ** (q - 2) for x in mesh)
    laplacian = np.broadcast_to(np.asarray(laplacian, dtype=float), grid.shape).copy()
    grad_squared = sum(g**2 for g in gradient)

    return PotentialData(
        values=np.asarray(values, dtype=float),
        gradient=gradient,
        laplacian=laplacian,
        grad_squared=np.asarray(grad_squared, dtype=float),
    )


def gaussian_initial_state(grid: Grid) -> np.ndarray:
    """Centered unit-amplitude Gaussian exp(-|x|^2 / 2), complex dtype."""
    mesh = grid.mesh()
    r2 = sum(x**2 for x in mesh)
    return np.exp(-0.5 * r2).astype(complex)


def matched_amplitude(kind: EquationKind) -> float:
    """Potential amplitude for which the Gaussian solves the linear flow.

    The dispersive equation needs the confining well (+1); the diffusive
    one needs the inverted well (-1), which also keeps its dynamics
    bounded on long runs.
    """
    return 1.0 if kind is EquationKind.SCHRODINGER else -1.0


def exact_linear_solution(problem: ProblemSpec, grid: Grid, t: float) -> np.ndarray:
    """Closed-form solution for the interaction-free harmonic problem.

    Requires degree 2, theta = 0, and the kind-matched amplitude.  The
    Gaussian is then a stationary mode: the dispersive flow multiplies
    it by exp(-i d t) and the diffusive flow by exp(-d t).
    """
    if problem.potential.degree != 2:
        raise ValueError("exact solution requires a degree-2 potential")
    if problem.theta != 0.0:
        raise ValueError("exact solution requires theta = 0")
    expected = matched_amplitude(problem.kind)
    if problem.potential.amplitude != expected:
        raise ValueError(
            f"exact solution requires amplitude {expected} for {problem.kind.value}, "
            f"got {problem.potential.amplitude}"
        )
    u0 = gaussian_initial_state(grid)
    d = grid.dim
    if problem.kind is EquationKind.SCHRODINGER:
        return np.exp(-1j * d * t) * u0
    return np.exp(-float(d) * t) * u0
