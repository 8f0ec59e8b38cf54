"""Figure builders for the three report kinds.

Figures are drawn on an Agg canvas directly, so no global backend state
is touched and no display is needed.  Each plot entry point reads its
input files, builds the figure, writes the image, and returns the fit
comparisons so the caller can flag disagreements with the CSV header.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .fits import FitComparison, refit_convergence, refit_probe
from .readers import (
    ConvergenceRow,
    ConvergenceTable,
    EnergyTrace,
    ProbeTable,
    read_convergence_csv,
    read_energy_csv,
    read_probe_csv,
)

FIGURE_KINDS = ("convergence", "energy", "order-reduction")
GUIDE_ORDERS = (1, 2, 4)
PANEL_SIZE = (6.4, 4.8)


@dataclass(frozen=True)
class FigureRequest:
    inputs: tuple[str, ...]
    kind: str
    output: str
    title: str | None = None
    labels: tuple[str, ...] = ()
    image_format: str | None = None

    def __post_init__(self) -> None:
        if self.kind not in FIGURE_KINDS:
            raise ValueError(
                f"unknown figure kind {self.kind!r}; "
                f"available: {', '.join(FIGURE_KINDS)}"
            )
        if not self.inputs:
            raise ValueError("at least one input file is required")
        if len(self.labels) > len(self.inputs):
            raise ValueError(
                f"{len(self.labels)} labels for {len(self.inputs)} inputs"
            )

    def label_for(self, index: int, default: str) -> str:
        if index < len(self.labels):
            return self.labels[index]
        return default


def _new_figure(ncols: int = 1, nrows: int = 1):
    from matplotlib.backends.backend_agg import FigureCanvasAgg
    from matplotlib.figure import Figure

    width, height = PANEL_SIZE
    fig = Figure(
        figsize=(width * ncols, height * nrows), constrained_layout=True
    )
    FigureCanvasAgg(fig)
    return fig


def _save(fig, request: FigureRequest) -> None:
    target = Path(request.output)
    if target.parent and not target.parent.exists():
        target.parent.mkdir(parents=True, exist_ok=True)
    suffix = target.suffix[1:].lower()
    fig.savefig(target, format=request.image_format or suffix or "png")


def _series_prefix(request: FigureRequest, index: int) -> str:
    default = Path(request.inputs[index]).stem if len(request.inputs) > 1 else ""
    return request.label_for(index, default)


def _add_order_guides(ax, taus: list[float], errors: list[float]) -> None:
    if not taus:
        return
    t1 = max(taus)
    anchor = max(errors)
    ts = np.geomspace(min(taus), t1, 32)
    for order in GUIDE_ORDERS:
        ax.loglog(
            ts,
            anchor * (ts / t1) ** order,
            linestyle="--",
            linewidth=0.8,
            color="gray",
            label=f"slope {order}",
        )


def _panel_axes(fig, count: int):
    ncols = 1 if count == 1 else 2
    nrows = math.ceil(count / ncols)
    axes = fig.subplots(nrows, ncols, squeeze=False).ravel()
    for ax in axes[count:]:
        ax.set_visible(False)
    return axes[:count]


def build_convergence_figure(
    tables: list[ConvergenceTable], request: FigureRequest
):
    """One log-log panel per (equation, degree, theta) group."""
    per_table = [refit_convergence(table) for table in tables]
    comparisons = [c for fits in per_table for c in fits]
    refits = {(i, c.name): c.refit for i, fits in enumerate(per_table) for c in fits}
    groups: dict[tuple, list[tuple[int, ConvergenceRow]]] = {}
    for i, table in enumerate(tables):
        for row in table.rows:
            groups.setdefault(row.group, []).append((i, row))

    ncols = 1 if len(groups) == 1 else 2
    fig = _new_figure(ncols=ncols, nrows=math.ceil(len(groups) / ncols))
    for ax, (key, members) in zip(_panel_axes(fig, len(groups)), groups.items()):
        equation, degree, theta = key
        series: dict[tuple[int, str], None] = {}
        for i, row in members:
            series.setdefault((i, row.method), None)
        panel_taus: list[float] = []
        panel_errors: list[float] = []
        failed_taus: list[float] = []
        for i, method in series:
            rows = [r for j, r in members if j == i and r.method == method]
            points = sorted(
                (r.tau, r.global_error)
                for r in rows
                if r.status == "ok"
                and np.isfinite(r.global_error)
                and r.global_error > 0.0
            )
            failed_taus.extend(r.tau for r in rows if r.status != "ok")
            if not points:
                continue
            taus, errors = zip(*points)
            prefix = _series_prefix(request, i)
            name = f"{prefix}: {method}" if prefix else method
            ax.loglog(
                taus,
                errors,
                marker="o",
                label=f"{name} ({refits[(i, method)]:.2f})",
            )
            panel_taus.extend(taus)
            panel_errors.extend(errors)
        _add_order_guides(ax, panel_taus, panel_errors)
        if failed_taus:
            # aborted runs have no error value; mark them above the data
            level = 2.0 * max(panel_errors) if panel_errors else 1.0
            marks = sorted(set(failed_taus))
            ax.loglog(
                marks,
                [level] * len(marks),
                linestyle="none",
                marker="x",
                color="crimson",
                label="failed runs",
            )
        ax.set_xlabel("step size")
        ax.set_ylabel("global error")
        ax.set_title(f"{equation}, q={degree}, theta={theta:g}")
        ax.grid(True, which="both", alpha=0.3)
        ax.legend(fontsize="small")
    if request.title:
        fig.suptitle(request.title)
    return fig, comparisons


def build_energy_figure(traces: list[EnergyTrace], request: FigureRequest):
    """Energy deviation over time, one labeled series per input.

    Deviations are clamped to a roundoff floor so a perfectly conserved
    series still renders as a flat line on the log scale.
    """
    fig = _new_figure()
    ax = fig.add_subplot()
    for i, trace in enumerate(traces):
        scale = float(np.abs(trace.energies).max()) if trace.energies.size else 1.0
        floor = np.finfo(float).eps * max(1.0, scale)
        ax.semilogy(
            trace.times,
            np.maximum(trace.deviations, floor),
            linewidth=0.8,
            label=request.label_for(i, f"{trace.method}, tau={trace.tau:g}"),
        )
    ax.set_xlabel("time")
    ax.set_ylabel("energy deviation")
    if request.title:
        ax.set_title(request.title)
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize="small")
    return fig


def build_probe_figure(tables: list[ProbeTable], request: FigureRequest):
    """Scalar-probe defect slopes, local and global series per input."""
    comparisons = []
    fig = _new_figure()
    ax = fig.add_subplot()
    for i, table in enumerate(tables):
        fits = refit_probe(table)
        comparisons.extend(fits)
        local, global_ = fits
        prefix = _series_prefix(request, i)
        lead = f"{prefix}: " if prefix else ""
        ax.loglog(
            table.taus,
            table.local_errors,
            marker="o",
            label=f"{lead}local ({local.refit:.2f})",
        )
        ax.loglog(
            table.taus,
            table.global_errors,
            marker="s",
            label=f"{lead}global ({global_.refit:.2f})",
        )
    ax.set_xlabel("step size")
    ax.set_ylabel("composition defect")
    if request.title:
        ax.set_title(request.title)
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize="small")
    return fig, comparisons


def plot_convergence(request: FigureRequest) -> list[FitComparison]:
    tables = [read_convergence_csv(path) for path in request.inputs]
    fig, comparisons = build_convergence_figure(tables, request)
    _save(fig, request)
    return comparisons


def plot_energy(request: FigureRequest) -> list[FitComparison]:
    traces = [read_energy_csv(path) for path in request.inputs]
    fig = build_energy_figure(traces, request)
    _save(fig, request)
    return []


def plot_order_reduction(request: FigureRequest) -> list[FitComparison]:
    tables = [read_probe_csv(path) for path in request.inputs]
    fig, comparisons = build_probe_figure(tables, request)
    _save(fig, request)
    return comparisons
