"""Synthetic report files with analytically known fits.

The builders write CSVs in the exact harness layout.  Errors follow
exact power laws, so the least-squares slope equals the nominal order
up to roundoff and the reported header values can be generated from the
same data the readers will see.
"""

import numpy as np
import pytest

DEFAULT_TAUS = (0.1, 0.05, 0.025, 0.0125)

CONVERGENCE_HEADER = (
    "method,equation,q,C0,theta,dim,points_per_dim,tau,"
    "global_error,runtime_seconds,status"
)

CONFIG_COMMENT = (
    "# config amplitude=none degree=2 dim=1 equation=schrodinger "
    "final_time=1.0 half_width=10.0 methods=lie,strang num_steps=10000 "
    "points_per_dim=64 probe_horizon=0.5 probe_u0=0.5 reference=exact "
    "samples=200 seed=42 strategy=default substeps=1 "
    "taus=0.1,0.05,0.025,0.0125 theta=1.0 variant=naive workers=1"
)


def log_slope(taus, errors) -> float:
    return float(np.polyfit(np.log(taus), np.log(errors), 1)[0])


def power_law_errors(taus, order, scale=0.5):
    return [scale * t**order for t in taus]


def convergence_text(
    *,
    methods=("lie", "strang"),
    orders=(1.0, 2.0),
    taus=DEFAULT_TAUS,
    equation="schrodinger",
    degree=2,
    amplitude=1.0,
    theta=1.0,
    floor=0.0,
    failed=(),
) -> str:
    """CSV for exact power-law series; ``failed`` lists (method, tau) rows."""
    lines = [
        "# splitflow-convergence-csv v1",
        CONFIG_COMMENT,
        f"# error_floor={floor!r}",
    ]
    data = []
    for method, order in zip(methods, orders):
        errors = power_law_errors(taus, order)
        lines.append(f"# fitted_order {method}={log_slope(taus, errors):.6f}")
        for tau, error in zip(taus, errors):
            data.append(
                f"{method},{equation},{degree},{amplitude!r},{theta!r},1,64,"
                f"{tau!r},{error!r},0.000100,ok"
            )
    for method, tau in failed:
        data.append(
            f"{method},{equation},{degree},{amplitude!r},{theta!r},1,64,"
            f"{tau!r},,0.000100,blown_up"
        )
    return "\n".join(lines + [CONVERGENCE_HEADER] + data) + "\n"


def energy_text(*, method="chin_modified", tau=0.001, deviations=None) -> str:
    if deviations is None:
        deviations = [0.0, 1e-6, 2e-6, 1.5e-6]
    lines = [
        "# splitflow-energy-csv v1",
        CONFIG_COMMENT,
        f"# method={method} tau={tau!r}",
        "step,time,energy,deviation",
    ]
    for step, dev in enumerate(deviations):
        t = step * tau
        lines.append(f"{step},{t!r},{3.0 + dev!r},{dev!r}")
    return "\n".join(lines) + "\n"


def probe_text(*, taus=DEFAULT_TAUS, local_order=3.0, global_order=2.0) -> str:
    local = power_law_errors(taus, local_order, scale=0.2)
    global_ = power_law_errors(taus, global_order, scale=0.4)
    lines = [
        "# splitflow-probe-csv v1",
        CONFIG_COMMENT,
        f"# fitted_order local={log_slope(taus, local):.6f}",
        f"# fitted_order global={log_slope(taus, global_):.6f}",
        "tau,local_error,global_error",
    ]
    for tau, le, ge in zip(taus, local, global_):
        lines.append(f"{tau!r},{le!r},{ge!r}")
    return "\n".join(lines) + "\n"


@pytest.fixture
def convergence_csv(tmp_path):
    path = tmp_path / "convergence.csv"
    path.write_text(convergence_text(), encoding="utf-8")
    return path


@pytest.fixture
def energy_csv(tmp_path):
    path = tmp_path / "energy.csv"
    path.write_text(energy_text(), encoding="utf-8")
    return path


@pytest.fixture
def probe_csv(tmp_path):
    path = tmp_path / "probe.csv"
    path.write_text(probe_text(), encoding="utf-8")
    return path
