"""Order refits and agreement checks against the harness-reported values.

The harness fits log(error) against log(tau) by least squares after
dropping unusable points; the same rule is reproduced here from the CSV
data alone, and every figure asserts that the refit agrees with the
`# fitted_order` header values.  A disagreement means the CSV was
edited, truncated, or produced by an incompatible harness version.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .readers import ConvergenceTable, ProbeTable

FIT_TOLERANCE = 0.01
FLOOR_FACTOR = 50.0
MIN_POINTS = 3


def least_squares_order(taus, errors, floor: float = 0.0) -> float:
    """Slope of log(error) vs log(tau) over the usable points.

    Non-finite and nonpositive errors are dropped, as are errors within
    a factor 50 of the error floor, where the curve flattens into
    reference noise.  Returns nan when fewer than three points survive,
    matching what the harness reports in that case.
    """
    taus = np.asarray(taus, dtype=float)
    errors = np.asarray(errors, dtype=float)
    mask = np.isfinite(errors) & (errors > 0.0)
    if floor > 0.0:
        mask &= errors >= FLOOR_FACTOR * floor
    if int(mask.sum()) < MIN_POINTS:
        return math.nan
    return float(np.polyfit(np.log(taus[mask]), np.log(errors[mask]), 1)[0])


@dataclass(frozen=True)
class FitComparison:
    name: str
    reported: float
    refit: float

    def agrees(self, tolerance: float = FIT_TOLERANCE) -> bool:
        if math.isnan(self.reported) and math.isnan(self.refit):
            return True
        return abs(self.reported - self.refit) <= tolerance


def refit_convergence(table: ConvergenceTable) -> list[FitComparison]:
    comparisons = []
    for method in table.methods():
        finished = [r for r in table.rows_for(method) if r.status == "ok"]
        refit = least_squares_order(
            [r.tau for r in finished],
            [r.global_error for r in finished],
            table.error_floor,
        )
        reported = table.fitted_orders.get(method, math.nan)
        comparisons.append(FitComparison(method, reported, refit))
    return comparisons


def refit_probe(table: ProbeTable) -> list[FitComparison]:
    return [
        FitComparison(
            "local",
            table.fitted_orders["local"],
            least_squares_order(table.taus, table.local_errors),
        ),
        FitComparison(
            "global",
            table.fitted_orders["global"],
            least_squares_order(table.taus, table.global_errors),
        ),
    ]


def mismatches(
    comparisons: list[FitComparison], tolerance: float = FIT_TOLERANCE
) -> list[FitComparison]:
    return [c for c in comparisons if not c.agrees(tolerance)]
