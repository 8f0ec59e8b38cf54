"""Acceptance gate: figures from real harness runs, refits within 0.01.

The harness is exercised strictly through its command line: each fixture
invokes the installed ``splitflow`` executable and the figures are then
rendered from the CSV files it wrote.  Verdict lines go through the
terminal reporter so they survive output capture.
"""

import shutil
import subprocess

import pytest

from plotviz import (
    mismatches,
    read_convergence_csv,
    read_probe_csv,
    refit_convergence,
    refit_probe,
)
from plotviz.cli import main

PNG_MAGIC = b"\x89PNG\r\n\x1a\n"

SPLITFLOW = shutil.which("splitflow")


@pytest.fixture(scope="module")
def emit(request):
    reporter = request.config.pluginmanager.get_plugin("terminalreporter")

    def write(text: str) -> None:
        if reporter is not None:
            reporter.write_line(text)
        else:
            print(text)

    return write


def _verdict(emit, label: str, passed: bool, detail: str) -> None:
    line = f"[{'PASS' if passed else 'FAIL'}] {label}: {detail}"
    emit(line)
    assert passed, line


def _splitflow(*args: str) -> None:
    assert SPLITFLOW is not None, "the splitflow command must be installed"
    proc = subprocess.run(
        [SPLITFLOW, *args], capture_output=True, text=True, timeout=600
    )
    assert proc.returncode == 0, f"splitflow {' '.join(args)}: {proc.stderr}"


@pytest.fixture(scope="module")
def report_dir(tmp_path_factory):
    """Real report CSVs: the default dispersive scan, the complex-coefficient
    parabolic scan, the scalar probe, and two long energy traces."""
    base = tmp_path_factory.mktemp("reports")
    _splitflow("convergence", "--output", str(base / "gpe.csv"))
    _splitflow(
        "convergence",
        "--equation",
        "parabolic",
        "--methods",
        "yoshida_complex",
        "--output",
        str(base / "complex.csv"),
    )
    _splitflow("order-reduction", "--output", str(base / "probe.csv"))
    _splitflow("energy", "--output", str(base / "energy_chin.csv"))
    _splitflow(
        "energy", "--methods", "lie", "--output", str(base / "energy_lie.csv")
    )
    return base


def test_criterion_12_convergence_figure_and_refit(emit, report_dir, tmp_path):
    out = tmp_path / "convergence.png"
    inputs = [str(report_dir / "gpe.csv"), str(report_dir / "complex.csv")]
    code = main(["convergence", "--input", *inputs, "--output", str(out)])
    comparisons = [
        c for p in inputs for c in refit_convergence(read_convergence_csv(p))
    ]
    worst = max(abs(c.reported - c.refit) for c in comparisons)
    passed = (
        code == 0
        and out.read_bytes()[:8] == PNG_MAGIC
        and not mismatches(comparisons)
    )
    _verdict(
        emit,
        "criterion 12 (convergence)",
        passed,
        f"{len(comparisons)} refits across {len(inputs)} scans, worst "
        f"disagreement {worst:.2e} (tolerance 0.01), exit code {code}",
    )


def test_criterion_12_order_reduction_figure_and_refit(emit, report_dir, tmp_path):
    out = tmp_path / "probe.png"
    path = str(report_dir / "probe.csv")
    code = main(["order-reduction", "--input", path, "--output", str(out)])
    comparisons = refit_probe(read_probe_csv(path))
    worst = max(abs(c.reported - c.refit) for c in comparisons)
    passed = (
        code == 0
        and out.read_bytes()[:8] == PNG_MAGIC
        and not mismatches(comparisons)
    )
    _verdict(
        emit,
        "criterion 12 (order-reduction)",
        passed,
        f"local/global refits, worst disagreement {worst:.2e} "
        f"(tolerance 0.01), exit code {code}",
    )


def test_criterion_12_energy_figure(emit, report_dir, tmp_path):
    out = tmp_path / "energy.png"
    code = main(
        [
            "energy",
            "--input",
            str(report_dir / "energy_chin.csv"),
            str(report_dir / "energy_lie.csv"),
            "--output",
            str(out),
        ]
    )
    passed = code == 0 and out.read_bytes()[:8] == PNG_MAGIC
    _verdict(
        emit,
        "criterion 12 (energy)",
        passed,
        f"two-method trace figure rendered, exit code {code}",
    )
