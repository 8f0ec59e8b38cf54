"""Readers for the splitflow report CSV files.

Each report kind carries a schema tag on its first line; the readers
refuse files whose tag or column header does not match, so a figure is
never drawn from misread columns.  Comment lines preserve the run
configuration, the error floor, and the fitted orders the harness
reported, all of which are parsed here so the renderers can cross-check
them.  Format errors raise SchemaError (a ValueError); unreadable paths
surface as OSError.  The command line maps both to exit code 2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

SCHEMA_TAGS = {
    "convergence": "# splitflow-convergence-csv v1",
    "energy": "# splitflow-energy-csv v1",
    "order-reduction": "# splitflow-probe-csv v1",
}

CONVERGENCE_COLUMNS = (
    "method",
    "equation",
    "q",
    "C0",
    "theta",
    "dim",
    "points_per_dim",
    "tau",
    "global_error",
    "runtime_seconds",
    "status",
)
ENERGY_COLUMNS = ("step", "time", "energy", "deviation")
PROBE_COLUMNS = ("tau", "local_error", "global_error")


class SchemaError(ValueError):
    """The input file does not match the declared report format."""


@dataclass(frozen=True)
class ConvergenceRow:
    method: str
    equation: str
    degree: int
    amplitude: float
    theta: float
    dim: int
    points_per_dim: int
    tau: float
    global_error: float
    runtime_seconds: float
    status: str

    @property
    def group(self) -> tuple[str, int, float]:
        """Panel key: one figure panel per (equation, degree, theta)."""
        return (self.equation, self.degree, self.theta)


@dataclass(frozen=True)
class ConvergenceTable:
    path: str
    config: dict[str, str]
    error_floor: float
    fitted_orders: dict[str, float]
    rows: tuple[ConvergenceRow, ...]

    def methods(self) -> tuple[str, ...]:
        seen: dict[str, None] = {}
        for row in self.rows:
            seen.setdefault(row.method, None)
        return tuple(seen)

    def rows_for(self, method: str) -> tuple[ConvergenceRow, ...]:
        return tuple(r for r in self.rows if r.method == method)


@dataclass(frozen=True)
class EnergyTrace:
    path: str
    config: dict[str, str]
    method: str
    tau: float
    steps: np.ndarray
    times: np.ndarray
    energies: np.ndarray
    deviations: np.ndarray


@dataclass(frozen=True)
class ProbeTable:
    path: str
    config: dict[str, str]
    fitted_orders: dict[str, float]
    taus: np.ndarray
    local_errors: np.ndarray
    global_errors: np.ndarray


def _load_lines(path: str) -> list[str]:
    target = Path(path)
    if not target.is_file():
        raise SchemaError(f"{path}: no such file")
    return target.read_text(encoding="utf-8").splitlines()


def _split_header(
    path: str, lines: list[str], kind: str, columns: tuple[str, ...]
) -> tuple[list[str], list[tuple[int, str]]]:
    """Validate the tag and column header; return comment and data lines."""
    expected = SCHEMA_TAGS[kind]
    found = lines[0] if lines else "<empty file>"
    if found != expected:
        raise SchemaError(f"{path}: expected {expected!r} on line 1, found {found!r}")
    comments = []
    body = []
    header = None
    for lineno, line in enumerate(lines[1:], start=2):
        if header is None and line.startswith("#"):
            comments.append(line)
            continue
        if header is None:
            header = line
            if line != ",".join(columns):
                raise SchemaError(
                    f"{path}:{lineno}: column header does not match the "
                    f"{kind} schema"
                )
            continue
        if line:
            body.append((lineno, line))
    if header is None:
        raise SchemaError(f"{path}: missing column header")
    return comments, body


def _parse_comments(comments: list[str]) -> tuple[dict[str, str], dict[str, str]]:
    """Split comment lines into the config echo and the other key=value tags."""
    config: dict[str, str] = {}
    tags: dict[str, str] = {}
    for line in comments:
        rest = line[1:].strip()
        if rest.startswith("config "):
            for part in rest[len("config ") :].split():
                key, _, value = part.partition("=")
                config[key] = value
        elif rest.startswith("fitted_order "):
            key, _, value = rest[len("fitted_order ") :].partition("=")
            tags[f"fitted_order {key}"] = value
        else:
            for part in rest.split():
                key, eq, value = part.partition("=")
                if eq:
                    tags[key] = value
    return config, tags


def _tag_number(path: str, name: str, value: str) -> float:
    try:
        return float(value)
    except ValueError:
        raise SchemaError(f"{path}: bad {name} value {value!r}") from None


def _fitted_orders(path: str, tags: dict[str, str]) -> dict[str, float]:
    return {
        key.split(" ", 1)[1]: _tag_number(path, key, value)
        for key, value in tags.items()
        if key.startswith("fitted_order ")
    }


def _fields(path: str, lineno: int, line: str, count: int) -> list[str]:
    fields = line.split(",")
    if len(fields) != count:
        raise SchemaError(
            f"{path}:{lineno}: expected {count} fields, found {len(fields)}"
        )
    return fields


def _number(path: str, lineno: int, text: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise SchemaError(f"{path}:{lineno}: not a number: {text!r}") from None


def read_convergence_csv(path: str) -> ConvergenceTable:
    lines = _load_lines(path)
    comments, body = _split_header(path, lines, "convergence", CONVERGENCE_COLUMNS)
    config, tags = _parse_comments(comments)
    if "error_floor" not in tags:
        raise SchemaError(f"{path}: missing '# error_floor=' comment")
    rows = []
    for lineno, line in body:
        fields = _fields(path, lineno, line, len(CONVERGENCE_COLUMNS))
        rows.append(
            ConvergenceRow(
                method=fields[0],
                equation=fields[1],
                degree=int(_number(path, lineno, fields[2])),
                amplitude=_number(path, lineno, fields[3]),
                theta=_number(path, lineno, fields[4]),
                dim=int(_number(path, lineno, fields[5])),
                points_per_dim=int(_number(path, lineno, fields[6])),
                tau=_number(path, lineno, fields[7]),
                global_error=(
                    _number(path, lineno, fields[8]) if fields[8] else math.nan
                ),
                runtime_seconds=_number(path, lineno, fields[9]),
                status=fields[10],
            )
        )
    return ConvergenceTable(
        path=path,
        config=config,
        error_floor=_tag_number(path, "error_floor", tags["error_floor"]),
        fitted_orders=_fitted_orders(path, tags),
        rows=tuple(rows),
    )


def read_energy_csv(path: str) -> EnergyTrace:
    lines = _load_lines(path)
    comments, body = _split_header(path, lines, "energy", ENERGY_COLUMNS)
    config, tags = _parse_comments(comments)
    if "method" not in tags or "tau" not in tags:
        raise SchemaError(f"{path}: missing '# method=... tau=...' comment")
    parsed = np.array(
        [
            [_number(path, lineno, f) for f in _fields(path, lineno, line, 4)]
            for lineno, line in body
        ],
        dtype=float,
    ).reshape(-1, 4)
    return EnergyTrace(
        path=path,
        config=config,
        method=tags["method"],
        tau=_tag_number(path, "tau", tags["tau"]),
        steps=parsed[:, 0],
        times=parsed[:, 1],
        energies=parsed[:, 2],
        deviations=parsed[:, 3],
    )


def read_probe_csv(path: str) -> ProbeTable:
    lines = _load_lines(path)
    comments, body = _split_header(path, lines, "order-reduction", PROBE_COLUMNS)
    config, tags = _parse_comments(comments)
    orders = _fitted_orders(path, tags)
    for name in ("local", "global"):
        if name not in orders:
            raise SchemaError(f"{path}: missing '# fitted_order {name}=' comment")
    parsed = np.array(
        [
            [_number(path, lineno, f) for f in _fields(path, lineno, line, 3)]
            for lineno, line in body
        ],
        dtype=float,
    ).reshape(-1, 3)
    return ProbeTable(
        path=path,
        config=config,
        fitted_orders=orders,
        taus=parsed[:, 0],
        local_errors=parsed[:, 1],
        global_errors=parsed[:, 2],
    )
