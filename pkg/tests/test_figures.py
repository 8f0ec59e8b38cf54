import math

from splitflow.experiments import (
    ConvergenceReport,
    ConvergenceRow,
    ExperimentConfig,
    run_energy,
    run_order_reduction,
)
from splitflow.figures import (
    render_convergence_figure,
    render_energy_figure,
    render_probe_figure,
)

PNG_MAGIC = b"\x89PNG"


def _scan_report():
    config = ExperimentConfig(
        points_per_dim=64, taus=(0.1, 0.05, 0.025), methods=("lie",)
    )
    rows = [
        ConvergenceRow("lie", 0.1, 10, math.nan, 0.001, "blown_up"),
        ConvergenceRow("lie", 0.05, 20, 2e-3, 0.002, "ok"),
        ConvergenceRow("lie", 0.025, 40, 1e-3, 0.004, "ok"),
    ]
    return ConvergenceReport(
        config=config, rows=rows, fitted_orders={"lie": 1.0}, error_floor=0.0
    )


def test_convergence_figure_with_failed_rows(tmp_path):
    target = tmp_path / "scan.png"
    render_convergence_figure(_scan_report(), str(target))
    assert target.read_bytes()[:4] == PNG_MAGIC


def test_format_follows_extension(tmp_path):
    target = tmp_path / "scan.svg"
    render_convergence_figure(_scan_report(), str(target))
    assert b"<svg" in target.read_bytes()[:300]


def test_parent_directories_created(tmp_path):
    target = tmp_path / "a" / "b" / "scan.png"
    render_convergence_figure(_scan_report(), str(target))
    assert target.exists()


def test_energy_figure(tmp_path):
    report = run_energy(
        ExperimentConfig(points_per_dim=64, num_steps=5, samples=5, methods=("strang",))
    )
    target = tmp_path / "trace.png"
    render_energy_figure(report, str(target))
    assert target.read_bytes()[:4] == PNG_MAGIC


def test_probe_figure(tmp_path):
    report = run_order_reduction(ExperimentConfig())
    target = tmp_path / "probe.png"
    render_probe_figure(report, str(target))
    assert target.read_bytes()[:4] == PNG_MAGIC
