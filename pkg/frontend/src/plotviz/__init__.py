"""Figure rendering for splitflow report CSVs."""

from .fits import (
    FIT_TOLERANCE,
    FitComparison,
    least_squares_order,
    mismatches,
    refit_convergence,
    refit_probe,
)
from .readers import (
    ConvergenceRow,
    ConvergenceTable,
    EnergyTrace,
    ProbeTable,
    SchemaError,
    read_convergence_csv,
    read_energy_csv,
    read_probe_csv,
)
from .render import (
    FIGURE_KINDS,
    FigureRequest,
    build_convergence_figure,
    build_energy_figure,
    build_probe_figure,
    plot_convergence,
    plot_energy,
    plot_order_reduction,
)

__all__ = [
    "FIGURE_KINDS",
    "FIT_TOLERANCE",
    "ConvergenceRow",
    "ConvergenceTable",
    "EnergyTrace",
    "FigureRequest",
    "FitComparison",
    "ProbeTable",
    "SchemaError",
    "build_convergence_figure",
    "build_energy_figure",
    "build_probe_figure",
    "least_squares_order",
    "mismatches",
    "plot_convergence",
    "plot_energy",
    "plot_order_reduction",
    "read_convergence_csv",
    "read_energy_csv",
    "read_probe_csv",
    "refit_convergence",
    "refit_probe",
]
