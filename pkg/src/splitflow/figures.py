"""Quick-look figure rendering for the experiment reports.

Each renderer draws one report to an image file next to its CSV.  The
figures use an Agg canvas directly, so no global backend state is
touched and no display is needed.  The output format follows the file
extension.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .experiments import ConvergenceReport, EnergyReport, ProbeReport

GUIDE_ORDERS = (1, 2, 4)


def _new_figure():
    from matplotlib.backends.backend_agg import FigureCanvasAgg
    from matplotlib.figure import Figure

    fig = Figure(figsize=(6.4, 4.8), constrained_layout=True)
    FigureCanvasAgg(fig)
    return fig


def _save(fig, path: str) -> None:
    target = Path(path)
    if target.parent and not target.parent.exists():
        target.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(target)


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


def render_convergence_figure(report: ConvergenceReport, path: str) -> None:
    fig = _new_figure()
    ax = fig.add_subplot()
    all_taus: list[float] = []
    all_errors: list[float] = []
    failed_taus: list[float] = []
    for method in report.config.methods:
        points = [
            (r.tau, r.global_error)
            for r in report.rows_for(method)
            if r.status == "ok"
            and np.isfinite(r.global_error)
            and r.global_error > 0.0
        ]
        failed_taus.extend(
            r.tau for r in report.rows_for(method) if r.status != "ok"
        )
        if not points:
            continue
        taus, errors = zip(*sorted(points))
        order = report.fitted_orders.get(method, float("nan"))
        ax.loglog(taus, errors, marker="o", label=f"{method} ({order:.2f})")
        all_taus.extend(taus)
        all_errors.extend(errors)
    _add_order_guides(ax, all_taus, all_errors)
    if failed_taus and all_errors:
        # aborted runs have no error value; mark them above the data
        ax.loglog(
            sorted(set(failed_taus)),
            [2.0 * max(all_errors)] * len(set(failed_taus)),
            linestyle="none",
            marker="x",
            color="crimson",
            label="failed runs",
        )
    config = report.config
    ax.set_xlabel("step size")
    ax.set_ylabel("global error")
    ax.set_title(
        f"{config.equation}, q={config.degree}, theta={config.theta:g}, "
        f"T={config.final_time:g}"
    )
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize="small")
    _save(fig, path)


def render_energy_figure(report: EnergyReport, path: str) -> None:
    fig = _new_figure()
    ax = fig.add_subplot()
    series = report.series
    positive = series.deviations > 0.0
    ax.semilogy(series.times[positive], series.deviations[positive], linewidth=0.8)
    ax.set_xlabel("time")
    ax.set_ylabel("energy deviation from series minimum")
    ax.set_title(f"{report.method}, tau={report.tau:g}")
    ax.grid(True, which="both", alpha=0.3)
    _save(fig, path)


def render_probe_figure(report: ProbeReport, path: str) -> None:
    fig = _new_figure()
    ax = fig.add_subplot()
    result = report.result
    ax.loglog(
        result.taus,
        result.local_errors,
        marker="o",
        label=f"local ({report.local_order:.2f})",
    )
    ax.loglog(
        result.taus,
        result.global_errors,
        marker="s",
        label=f"global ({report.global_order:.2f})",
    )
    ax.set_xlabel("step size")
    ax.set_ylabel("composition defect")
    ax.set_title(f"scalar probe, variant={report.config.variant}")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize="small")
    _save(fig, path)
