"""Fourier collocation on uniform periodic grids.

All fields live on the tensor grid x_j = -a + j * (2a / M1) per axis,
j = 0 .. M1 - 1, over the box [-a, a)^d.  Spectral coefficients use the
plane-wave basis exp(i pi m (x + a) / a) with integer mode numbers m in
FFT ordering, so a pure mode maps to a single unit coefficient.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(eq=False)
class Grid:
    """Uniform periodic grid with precomputed spectral symbols.

    Attributes:
        half_width: box half-width a; the domain is [-a, a)^d.
        points_per_dim: grid points per axis (even).
        dim: spatial dimension (1, 2, or 3).
        coords_1d: per-axis collocation coordinates, shape (M1,).
        modes: integer mode numbers in FFT order, shape (M1,).
        gradient_factors: per-axis first-derivative multipliers
            i pi m / a, broadcast-shaped, with the unpaired mode
            m = -M1/2 zeroed so real fields keep real derivatives.
        laplacian_symbol: full multiplier -pi^2 |m|^2 / a^2 on the
            d-dimensional mode lattice (unpaired mode retained).
        cell_volume: quadrature weight (2a / M1)^d.
        num_points: total point count M1^d.
    """

    half_width: float
    points_per_dim: int
    dim: int
    coords_1d: np.ndarray = field(repr=False)
    modes: np.ndarray = field(repr=False)
    gradient_factors: tuple[np.ndarray, ...] = field(repr=False)
    laplacian_symbol: np.ndarray = field(repr=False)
    cell_volume: float
    num_points: int

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.points_per_dim,) * self.dim

    def mesh(self) -> tuple[np.ndarray, ...]:
        """Coordinate arrays of the full tensor grid, shape (M1,)*d each."""
        return np.meshgrid(*([self.coords_1d] * self.dim), indexing="ij")


def build_grid(half_width: float, points_per_dim: int, dim: int) -> Grid:
    """Construct a Grid with its derivative multipliers.

    Args:
        half_width: box half-width a > 0.
        points_per_dim: even number of points per axis, >= 2.
        dim: spatial dimension, one of 1, 2, 3.
    """
    if half_width <= 0:
        raise ValueError(f"half_width must be positive, got {half_width}")
    if points_per_dim < 2 or points_per_dim % 2 != 0:
        raise ValueError(
            f"points_per_dim must be even and >= 2, got {points_per_dim}"
        )
    if dim not in (1, 2, 3):
        raise ValueError(f"dim must be 1, 2, or 3, got {dim}")

    a = float(half_width)
    m1 = int(points_per_dim)
    coords = -a + (2.0 * a / m1) * np.arange(m1)
    modes = np.fft.fftfreq(m1, d=1.0 / m1)

    # First derivatives drop the unpaired mode m = -M1/2: it has no
    # positive partner, and keeping it makes derivatives of real fields
    # complex.  The Laplacian symbol is even in m, so it keeps the mode.
    modes_grad = modes.copy()
    modes_grad[m1 // 2] = 0.0

    factors = []
    for axis in range(dim):
        shape = [1] * dim
        shape[axis] = m1
        factors.append((1j * np.pi / a) * modes_grad.reshape(shape))

    lam = np.zeros((m1,) * dim)
    for axis in range(dim):
        shape = [1] * dim
        shape[axis] = m1
        lam = lam + (-np.pi**2 / a**2) * (modes.reshape(shape) ** 2)

    return Grid(
        half_width=a,
        points_per_dim=m1,
        dim=dim,
        coords_1d=coords,
        modes=modes.astype(int),
        gradient_factors=tuple(factors),
        laplacian_symbol=lam,
        cell_volume=(2.0 * a / m1) ** dim,
        num_points=m1**dim,
    )


def to_spectral(values: np.ndarray, grid: Grid) -> np.ndarray:
    """Forward transform: grid values to plane-wave coefficients."""
    return np.fft.fftn(values) / grid.num_points


def from_spectral(coefficients: np.ndarray, grid: Grid) -> np.ndarray:
    """Inverse transform: plane-wave coefficients to grid values."""
    return np.fft.ifftn(coefficients * grid.num_points)


def spectral_gradient(values: np.ndarray, grid: Grid) -> tuple[np.ndarray, ...]:
    """All first partial derivatives via diagonal mode multipliers."""
    coeffs = to_spectral(values, grid)
    return tuple(
        from_spectral(factor * coeffs, grid) for factor in grid.gradient_factors
    )


def spectral_laplacian(values: np.ndarray, grid: Grid) -> np.ndarray:
    """Laplacian via the full -pi^2 |m|^2 / a^2 multiplier."""
    return from_spectral(grid.laplacian_symbol * to_spectral(values, grid), grid)


def spectral_derivatives(
    values: np.ndarray, grid: Grid
) -> tuple[tuple[np.ndarray, ...], np.ndarray]:
    """Gradient and Laplacian from one forward transform.

    Costs one forward and d + 1 inverse transforms; callers needing both
    should prefer this over separate gradient / Laplacian calls.
    """
    coeffs = to_spectral(values, grid)
    grad = tuple(
        from_spectral(factor * coeffs, grid) for factor in grid.gradient_factors
    )
    lap = from_spectral(grid.laplacian_symbol * coeffs, grid)
    return grad, lap


def band_limited_state(
    grid: Grid,
    band: int,
    rng: np.random.Generator,
    smooth: bool = False,
) -> np.ndarray:
    """Random complex state supported on modes with |m| <= band per axis.

    Coefficients are drawn uniformly from the complex unit square; with
    ``smooth`` they are additionally tapered by a Gaussian envelope
    exp(-(m / (band/2))^2) per axis so the spectrum decays inside the
    band instead of cutting off abruptly.  The result is normalized to
    unit discrete L2 norm.
    """
    if band < 1 or 2 * band >= grid.points_per_dim:
        raise ValueError(
            f"band must satisfy 1 <= band < points_per_dim / 2, got {band}"
        )
    coeffs = np.zeros(grid.shape, dtype=complex)
    mask = np.ones(grid.shape, dtype=bool)
    envelope = np.ones(grid.shape)
    for axis in range(grid.dim):
        shape = [1] * grid.dim
        shape[axis] = grid.points_per_dim
        m = grid.modes.reshape(shape)
        mask = mask & (np.abs(m) <= band)
        if smooth:
            envelope = envelope * np.exp(-((m / (band / 2.0)) ** 2))
    n_active = int(mask.sum())
    draws = rng.uniform(-1.0, 1.0, (2, n_active))
    coeffs[mask] = draws[0] + 1j * draws[1]
    if smooth:
        coeffs *= envelope
    state = from_spectral(coeffs, grid)
    norm = np.sqrt(grid.cell_volume * np.sum(np.abs(state) ** 2))
    return state / norm
