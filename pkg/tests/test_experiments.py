import io
import math
from dataclasses import replace

import numpy as np
import pytest

from splitflow.experiments import (
    DEFAULT_METHODS,
    FLOOR_SCALE,
    ConvergenceReport,
    ConvergenceRow,
    ExperimentConfig,
    default_step_counts,
    localized_random_state,
    resolve_step_counts,
    run_convergence,
    run_energy,
    run_order_reduction,
    run_validate,
    validate_config,
    write_convergence_csv,
    write_energy_csv,
    write_probe_csv,
)


def _small(**overrides) -> ExperimentConfig:
    base = dict(points_per_dim=64, taus=(0.05, 0.025, 0.0125, 0.00625))
    base.update(overrides)
    return ExperimentConfig(**base)


class TestLocalizedRandomState:
    def test_unit_norm(self, grid1d, rng):
        from splitflow.diagnostics import discrete_l2

        v = localized_random_state(grid1d, 32, rng)
        assert discrete_l2(v, grid1d) == pytest.approx(1.0, rel=1e-13)

    def test_real_flag(self, grid1d, rng):
        v = localized_random_state(grid1d, 32, rng, real=True)
        assert np.max(np.abs(v.imag)) == 0.0

    def test_decays_at_the_boundary(self, grid1d, rng):
        v = localized_random_state(grid1d, 32, rng)
        interior_peak = np.max(np.abs(v))
        edge = max(abs(v[0]), abs(v[-1]))
        assert edge < 1e-8 * interior_peak

    def test_deterministic_in_the_seed(self, grid1d):
        a = localized_random_state(grid1d, 32, np.random.default_rng(7))
        b = localized_random_state(grid1d, 32, np.random.default_rng(7))
        assert np.array_equal(a, b)


class TestConfigValidation:
    def test_defaults_pass(self):
        validate_config(ExperimentConfig())

    @pytest.mark.parametrize(
        "overrides",
        [
            {"equation": "heat"},
            {"degree": 3},
            {"methods": ("strang", "verlet")},
            {"methods": ()},
            {"strategy": "magic"},
            {"reference": "oracle"},
            {"final_time": 0.0},
            {"workers": 0},
            {"substeps": 0},
            {"num_steps": 0},
            {"samples": 0},
            {"reference": "exact", "theta": 1.0},
            {"reference": "exact", "theta": 0.0, "degree": 4},
            {"reference": "exact", "theta": 0.0, "amplitude": -1.0},
        ],
    )
    def test_rejections(self, overrides):
        with pytest.raises(ValueError):
            validate_config(ExperimentConfig(**overrides))

    def test_resolved_amplitude_matches_kind(self):
        assert ExperimentConfig(equation="schrodinger").resolved_amplitude() == 1.0
        assert ExperimentConfig(equation="parabolic").resolved_amplitude() == -1.0
        assert ExperimentConfig(amplitude=0.25).resolved_amplitude() == 0.25


class TestStepCounts:
    def test_default_grid(self):
        counts = default_step_counts()
        assert counts == [
            10, 14, 18, 25, 34, 46, 63, 86, 117, 158, 215, 293, 398, 541, 736, 1000,
        ]

    def test_explicit_taus_snap_to_divisors(self):
        config = ExperimentConfig(final_time=1.0, taus=(0.11, 0.097, 0.2))
        assert resolve_step_counts(config) == [9, 10, 5]

    def test_nonpositive_tau_rejected(self):
        with pytest.raises(ValueError, match="positive"):
            resolve_step_counts(ExperimentConfig(taus=(0.1, -0.05)))


@pytest.fixture(scope="module")
def linear_report():
    config = _small(theta=0.0, reference="exact", methods=("lie", "strang"))
    return run_convergence(config)


class TestConvergence:
    def test_exact_reference_orders(self, linear_report):
        assert linear_report.fitted_orders["lie"] == pytest.approx(1.0, abs=0.1)
        assert linear_report.fitted_orders["strang"] == pytest.approx(2.0, abs=0.1)

    def test_exact_reference_has_zero_floor(self, linear_report):
        assert linear_report.error_floor == 0.0

    def test_rows_are_method_major(self, linear_report):
        assert [r.method for r in linear_report.rows] == ["lie"] * 4 + ["strang"] * 4
        for row in linear_report.rows:
            assert row.status == "ok"
            assert row.tau == pytest.approx(1.0 / row.num_steps)

    def test_errors_shrink_with_tau(self, linear_report):
        errors = [r.global_error for r in linear_report.rows_for("strang")]
        assert errors == sorted(errors, reverse=True)

    def test_requires_three_points(self):
        with pytest.raises(ValueError, match="at least 3"):
            run_convergence(_small(taus=(0.1, 0.05)))

    def test_refined_reference_floor(self):
        config = _small(
            equation="parabolic",
            methods=("strang",),
            taus=(0.05, 0.025, 0.0125),
        )
        report = run_convergence(config)
        finest = min(
            r.global_error for r in report.rows if r.num_steps == 80 and r.status == "ok"
        )
        assert report.error_floor == pytest.approx(FLOOR_SCALE * finest)
        assert report.error_floor > 0.0

    def test_worker_pool_matches_serial(self):
        config = _small(theta=0.0, reference="exact", methods=("strang",))
        serial = run_convergence(config)
        threaded = run_convergence(replace(config, workers=4))
        for a, b in zip(serial.rows, threaded.rows):
            assert a.global_error == b.global_error


class TestEnergyExperiment:
    def test_sampling_schedule(self):
        config = _small(
            taus=None, final_time=2.0, num_steps=40, samples=7, methods=("chin_modified",)
        )
        report = run_energy(config)
        assert report.status == "ok"
        assert report.tau == pytest.approx(0.05)
        assert report.series.steps.tolist() == [0, 5, 10, 15, 20, 25, 30, 35, 40]
        assert np.all(report.series.deviations >= 0.0)

    def test_more_samples_than_steps(self):
        config = _small(taus=None, num_steps=5, samples=200, methods=("strang",))
        report = run_energy(config)
        assert report.series.steps.tolist() == [0, 1, 2, 3, 4, 5]

    def test_rejects_diffusive_kind(self):
        with pytest.raises(ValueError, match="dispersive"):
            run_energy(_small(taus=None, equation="parabolic", methods=("strang",)))

    def test_rejects_method_lists(self):
        with pytest.raises(ValueError, match="exactly one"):
            run_energy(_small(taus=None, methods=("lie", "strang")))


class TestValidateExperiment:
    def test_dispersive_suite(self):
        report = run_validate(
            ExperimentConfig(theta=0.0, points_per_dim=128, taus=None)
        )
        assert [c.name for c in report.checks] == [
            "exact_solution_error",
            "commutator_oracle_first",
            "commutator_oracle_second",
            "invariance_principle",
            "norm_conservation",
        ]
        assert report.passed

    def test_diffusive_suite(self):
        report = run_validate(
            ExperimentConfig(
                equation="parabolic", theta=0.0, points_per_dim=128, taus=None
            )
        )
        assert [c.name for c in report.checks] == [
            "exact_solution_error",
            "commutator_oracle_first",
            "commutator_oracle_second",
        ]
        assert report.passed

    def test_requires_linear_matched_setting(self):
        with pytest.raises(ValueError, match="theta"):
            run_validate(ExperimentConfig(theta=1.0))
        with pytest.raises(ValueError, match="degree"):
            run_validate(ExperimentConfig(theta=0.0, degree=4))
        with pytest.raises(ValueError, match="matched"):
            run_validate(
                ExperimentConfig(equation="parabolic", theta=0.0, amplitude=1.0)
            )


class TestProbeExperiment:
    def test_naive_orders(self):
        report = run_order_reduction(ExperimentConfig(taus=None))
        assert report.local_order == pytest.approx(3.0, abs=0.1)
        assert report.global_order == pytest.approx(2.0, abs=0.1)

    def test_exact_variant_defects_vanish(self):
        report = run_order_reduction(ExperimentConfig(taus=None, variant="holomorphic"))
        assert np.max(report.result.local_errors) < 1e-12
        assert np.max(report.result.global_errors) < 1e-12


class TestCsvEmission:
    def _stub_report(self):
        config = ExperimentConfig(
            points_per_dim=64, taus=(0.1, 0.05, 0.025), methods=("lie",)
        )
        rows = [
            ConvergenceRow("lie", 0.1, 10, 0.125, 0.001953125, "ok"),
            ConvergenceRow("lie", 0.05, 20, math.nan, 0.001, "unstable"),
        ]
        return ConvergenceReport(
            config=config, rows=rows, fitted_orders={"lie": 1.02}, error_floor=1e-9
        )

    def test_convergence_layout(self):
        out = io.StringIO()
        write_convergence_csv(self._stub_report(), out)
        lines = out.getvalue().splitlines()
        assert lines[0] == "# splitflow-convergence-csv v1"
        assert lines[1].startswith("# config ")
        assert "equation=schrodinger" in lines[1]
        assert "amplitude=none" in lines[1]
        assert lines[2] == "# error_floor=1e-09"
        assert lines[3] == "# fitted_order lie=1.020000"
        assert lines[4] == (
            "method,equation,q,C0,theta,dim,points_per_dim,tau,"
            "global_error,runtime_seconds,status"
        )
        assert lines[5] == "lie,schrodinger,2,1.0,1.0,1,64,0.1,0.125,0.001953,ok"

    def test_failed_rows_have_no_error_value(self):
        out = io.StringIO()
        write_convergence_csv(self._stub_report(), out)
        unstable = out.getvalue().splitlines()[6]
        fields = unstable.split(",")
        assert fields[-1] == "unstable"
        assert fields[-3] == ""

    def test_missing_fit_is_nan_text(self):
        report = self._stub_report()
        report.fitted_orders = {"lie": math.nan}
        out = io.StringIO()
        write_convergence_csv(report, out)
        assert "# fitted_order lie=nan" in out.getvalue()

    def test_energy_layout(self):
        config = _small(taus=None, num_steps=5, samples=200, methods=("strang",))
        out = io.StringIO()
        write_energy_csv(run_energy(config), out)
        lines = out.getvalue().splitlines()
        assert lines[0] == "# splitflow-energy-csv v1"
        assert lines[3] == "step,time,energy,deviation"
        assert len(lines) == 4 + 6

    def test_probe_layout(self):
        out = io.StringIO()
        write_probe_csv(run_order_reduction(ExperimentConfig(taus=None)), out)
        lines = out.getvalue().splitlines()
        assert lines[0] == "# splitflow-probe-csv v1"
        assert lines[2].startswith("# fitted_order local=")
        assert lines[3].startswith("# fitted_order global=")
        assert float(lines[2].split("=")[1]) == pytest.approx(3.0, abs=0.1)
        assert float(lines[3].split("=")[1]) == pytest.approx(2.0, abs=0.1)
        assert lines[4] == "tau,local_error,global_error"
        assert len(lines) == 5 + 4

    def test_output_is_deterministic_up_to_runtimes(self):
        config = _small(theta=0.0, reference="exact", methods=("lie", "strang"))

        def render() -> list[str]:
            out = io.StringIO()
            write_convergence_csv(run_convergence(config), out)
            lines = out.getvalue().splitlines()
            stripped = []
            for line in lines:
                if line.startswith("#") or line.startswith("method,"):
                    stripped.append(line)
                else:
                    fields = line.split(",")
                    stripped.append(",".join(fields[:9] + fields[10:]))
            return stripped

        assert render() == render()
