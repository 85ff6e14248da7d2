"""
Trajectory CSV import/export.

One row per accepted step. Columns: ``t``, the state (``x1..xn``,
``y1..yk``, optionally ``z``), the monitored energy ``H`` and ``C1..Cm`` for
the registered Casimirs in registration order. Casimir names live in the
system descriptor written next to the CSV. Floats use 17 significant digits
so a file read back reproduces the trajectory exactly.
"""

import csv
import re
from collections.abc import Sequence
from dataclasses import dataclass
from pathlib import Path
from typing import Self

import numpy as np

from dynamics import Trajectory

from .spec_files import SpecFormatError


def _fmt(value: float) -> str:
    return format(float(value), ".17g")


def casimir_column(i: int) -> str:
    return f"C{i + 1}"


@dataclass(frozen=True)
class TrajectoryLayout:
    n: int
    k: int
    has_z: bool
    casimirs: int = 0

    @classmethod
    def of(cls, traj: Trajectory) -> Self:
        return cls(traj.n, traj.k, traj.has_z, len(traj.casimirs))

    def header(self) -> list[str]:
        columns = ["t"]
        columns += [f"x{i + 1}" for i in range(self.n)]
        columns += [f"y{a + 1}" for a in range(self.k)]
        if self.has_z:
            columns.append("z")
        columns.append("H")
        columns += [casimir_column(i) for i in range(self.casimirs)]
        return columns

    @classmethod
    def from_header(cls, header: list[str], source: str) -> Self:
        """Recover the layout, rejecting anything :meth:`header` would not write."""
        def count(pattern: str) -> int:
            return sum(1 for c in header if re.fullmatch(pattern, c))

        layout = cls(count(r"x[1-9]\d*"), count(r"y[1-9]\d*"), "z" in header, count(r"C[1-9]\d*"))
        if layout.k < 1 or layout.header() != header:
            raise SpecFormatError(source, f"unrecognised trajectory header {','.join(header)}")
        return layout


def write_trajectory(traj: Trajectory, path: Path) -> None:
    layout = TrajectoryLayout.of(traj)
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(layout.header())
        for i, t in enumerate(traj.times):
            row = [t, *traj.values[i], traj.energy[i]]
            row += [column[i] for column in traj.casimirs.values()]
            writer.writerow([_fmt(v) for v in row])


def read_trajectory(path: Path, casimir_names: Sequence[str] | None = None) -> Trajectory:
    """
    Read a trajectory back. Casimir columns are keyed by ``casimir_names``
    when given (usually from the system descriptor), else by ``C1..Cm``.
    The dissipation residual is not stored; monitors recompute it.
    """
    source = str(path)
    try:
        with open(path, newline="", encoding="utf-8") as f:
            rows = list(csv.reader(f))
    except OSError as e:
        raise SpecFormatError(source, f"cannot read file ({e.strerror or e})") from e
    if not rows:
        raise SpecFormatError(source, "empty trajectory file")

    header, body = rows[0], rows[1:]
    layout = TrajectoryLayout.from_header(header, source)
    if casimir_names is None:
        casimir_names = [casimir_column(i) for i in range(layout.casimirs)]
    elif len(casimir_names) != layout.casimirs:
        raise SpecFormatError(
            source, f"{layout.casimirs} Casimir columns, expected {len(casimir_names)}"
        )
    if not body:
        raise SpecFormatError(source, "trajectory has no rows")
    try:
        data = np.array([[float(v) for v in row] for row in body], dtype=float)
    except ValueError as e:
        raise SpecFormatError(source, f"non-numeric value ({e})") from e
    if data.ndim != 2 or data.shape[1] != len(header):
        raise SpecFormatError(source, f"every row needs {len(header)} values")

    width = layout.n + layout.k + (1 if layout.has_z else 0)
    energy_col = 1 + width
    casimirs = {
        name: data[:, energy_col + 1 + i].copy() for i, name in enumerate(casimir_names)
    }
    return Trajectory(
        times=data[:, 0].copy(),
        values=data[:, 1 : 1 + width].copy(),
        n=layout.n,
        k=layout.k,
        has_z=layout.has_z,
        energy=data[:, energy_col].copy(),
        casimirs=casimirs,
    )
