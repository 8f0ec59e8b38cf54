import numpy as np
import pytest

from splitflow.model import (
    EquationKind,
    PotentialSpec,
    ProblemSpec,
    evaluate_potential,
    exact_linear_solution,
    gaussian_initial_state,
    matched_amplitude,
)
from splitflow.spectral import build_grid, spectral_laplacian


class TestEquationKind:
    def test_coefficients(self):
        assert EquationKind.SCHRODINGER.linear_coefficient == 1j
        assert EquationKind.SCHRODINGER.nonlinear_coefficient == -1j
        assert EquationKind.PARABOLIC.linear_coefficient == 1.0
        assert EquationKind.PARABOLIC.nonlinear_coefficient == 1.0

    def test_matched_amplitude(self):
        assert matched_amplitude(EquationKind.SCHRODINGER) == 1.0
        assert matched_amplitude(EquationKind.PARABOLIC) == -1.0


class TestPotential:
    def test_degree_validation(self):
        with pytest.raises(ValueError):
            PotentialSpec(degree=3)

    def test_quadratic_closed_forms(self, grid1d):
        data = evaluate_potential(PotentialSpec(2, 1.0), grid1d)
        x = grid1d.coords_1d
        assert np.allclose(data.values, x**2)
        assert np.allclose(data.gradient[0], 2 * x)
        assert np.allclose(data.laplacian, 2.0)
        assert np.allclose(data.grad_squared, 4 * x**2)

    def test_quartic_closed_forms(self, grid1d):
        data = evaluate_potential(PotentialSpec(4, -1.0), grid1d)
        x = grid1d.coords_1d
        assert np.allclose(data.values, -(x**4) / 24.0)
        assert np.allclose(data.gradient[0], -(x**3) / 6.0)
        assert np.allclose(data.laplacian, -(x**2) / 2.0)
        assert np.allclose(data.grad_squared, x**6 / 36.0)

    def test_2d_sums_over_axes(self):
        grid = build_grid(3.0, 16, 2)
        data = evaluate_potential(PotentialSpec(2, 2.0), grid)
        xs, ys = grid.mesh()
        assert np.allclose(data.values, 2.0 * (xs**2 + ys**2))
        assert np.allclose(data.laplacian, 8.0)
        assert np.allclose(data.grad_squared, 16.0 * (xs**2 + ys**2))

    @pytest.mark.parametrize("degree", [2, 4])
    def test_derivatives_match_difference_quotients(self, grid1d, degree):
        # derivatives are analytic, not spectral (the monomials are not
        # periodic); check them against interior central differences
        data = evaluate_potential(PotentialSpec(degree, 1.0), grid1d)
        h = grid1d.coords_1d[1] - grid1d.coords_1d[0]
        interior = slice(2, -2)
        # truncation of the quotients is h^2/6 V''' resp. h^2/12 V'''',
        # both bounded by h^2 half_width / 6 for these monomials
        tol = h**2 * grid1d.half_width / 3.0
        dv = (np.roll(data.values, -1) - np.roll(data.values, 1)) / (2 * h)
        assert np.allclose(dv[interior], data.gradient[0][interior], atol=tol)
        d2v = (np.roll(data.values, -1) - 2 * data.values + np.roll(data.values, 1)) / h**2
        assert np.allclose(d2v[interior], data.laplacian[interior], atol=tol)


class TestInitialAndExactStates:
    def test_gaussian_properties(self, grid1d):
        u0 = gaussian_initial_state(grid1d)
        assert u0.dtype == complex
        center = np.argmin(np.abs(grid1d.coords_1d))
        assert u0[center] == pytest.approx(1.0)
        assert np.abs(u0[0]) < 1e-20

    def test_exact_solution_preconditions(self, grid1d):
        bad_degree = ProblemSpec(EquationKind.SCHRODINGER, 0.0, PotentialSpec(4, 1.0))
        with pytest.raises(ValueError):
            exact_linear_solution(bad_degree, grid1d, 1.0)
        bad_theta = ProblemSpec(EquationKind.SCHRODINGER, 1.0, PotentialSpec(2, 1.0))
        with pytest.raises(ValueError):
            exact_linear_solution(bad_theta, grid1d, 1.0)
        bad_amp = ProblemSpec(EquationKind.SCHRODINGER, 0.0, PotentialSpec(2, -1.0))
        with pytest.raises(ValueError):
            exact_linear_solution(bad_amp, grid1d, 1.0)

    @pytest.mark.parametrize(
        "kind,amplitude",
        [(EquationKind.SCHRODINGER, 1.0), (EquationKind.PARABOLIC, -1.0)],
    )
    def test_exact_solution_satisfies_equation(self, grid1d, kind, amplitude):
        # substitution check: the time derivative of the closed form
        # equals c Lap(u) + cb V u on the grid
        problem = ProblemSpec(kind, 0.0, PotentialSpec(2, amplitude))
        t = 0.3
        u = exact_linear_solution(problem, grid1d, t)
        rate = -1j if kind is EquationKind.SCHRODINGER else -1.0
        time_derivative = rate * grid1d.dim * u
        potential = evaluate_potential(problem.potential, grid1d)
        rhs = (
            kind.linear_coefficient * spectral_laplacian(u, grid1d)
            + kind.nonlinear_coefficient * potential.values * u
        )
        assert np.max(np.abs(time_derivative - rhs)) < 1e-10

    def test_dispersive_solution_is_phase_rotation(self, grid1d):
        problem = ProblemSpec(EquationKind.SCHRODINGER, 0.0, PotentialSpec(2, 1.0))
        u = exact_linear_solution(problem, grid1d, 0.5)
        assert np.allclose(np.abs(u), np.abs(gaussian_initial_state(grid1d)))

    def test_diffusive_solution_decays(self, grid1d):
        problem = ProblemSpec(EquationKind.PARABOLIC, 0.0, PotentialSpec(2, -1.0))
        u = exact_linear_solution(problem, grid1d, 1.0)
        expected = np.exp(-1.0) * gaussian_initial_state(grid1d)
        assert np.allclose(u, expected)
