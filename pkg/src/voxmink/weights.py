"""Weight vectors for configuration-count estimators.

A weight vector assigns one coefficient to each of the 22 configuration
classes.  The estimator for the density of V_q it induces is convergent
exactly when w D Q = b_q, where D holds the orbit multiplicities, Q the
expansion rows, and b_q the target row of V_q; see
:mod:`voxmink.expansion`.  This module verifies that condition, solves
it (minimum-norm, optionally on a restricted support), and reads and
writes weight files.

The file format is plain text: one ``class_id,weight`` pair per line for
all 22 classes, ``#`` starts a comment.  Files written here include the
line ``# q = <n>`` so they round-trip the estimated quantity; reading a
file without it requires passing ``q`` explicitly.  Weights are written
with repr precision, so a save and load round-trips bit for bit.

Reference weight sets that minimize the asymptotic worst-case bias over
rotations of the lattice ship with the package, one per q in 0..2; the
q = 3 slot is the exactly unbiased lattice-point counter.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .configs import ClassTable, N_CLASSES, default_class_table
from .expansion import estimator_row, expansion_matrix, target_row

_SOLVE_TOL = 1e-10


class WeightFileError(ValueError):
    """A weight file could not be parsed or is incomplete."""


class InfeasibleWeightsError(RuntimeError):
    """No weight vector on the requested support satisfies w D Q = b_q."""


@dataclass(frozen=True)
class WeightVector:
    """Estimator weights for one density, ordered by class id 1..22."""

    q: int
    values: np.ndarray

    def __post_init__(self) -> None:
        if self.q not in (0, 1, 2, 3):
            raise ValueError(f"q must be in 0..3, got {self.q}")
        values = np.asarray(self.values, dtype=float)
        if values.shape != (N_CLASSES,):
            raise ValueError(
                f"expected {N_CLASSES} weights, got shape {values.shape}"
            )
        if not np.all(np.isfinite(values)):
            raise ValueError("weights must be finite")
        object.__setattr__(self, "values", values)

    def weight(self, class_id: int) -> float:
        if not 1 <= class_id <= N_CLASSES:
            raise ValueError(f"class id must be in 1..{N_CLASSES}, got {class_id}")
        return float(self.values[class_id - 1])


def volume_weights() -> WeightVector:
    """The canonical q = 3 weights: count foreground lattice points."""
    values = np.zeros(N_CLASSES)
    values[N_CLASSES - 1] = 1.0
    return WeightVector(3, values)


def wdq_row(w: WeightVector, table: ClassTable | None = None) -> np.ndarray:
    """The row w D Q of the weight vector in expansion coordinates."""
    return estimator_row(w.values, table)


def weight_residual(w: WeightVector, table: ClassTable | None = None) -> np.ndarray:
    """Componentwise defect w D Q - b_q of the convergence condition."""
    return wdq_row(w, table) - target_row(w.q)


@dataclass(frozen=True)
class SolveResult:
    """Solution of the convergence condition on a given support.

    ``null_dimension`` is the dimension of the affine solution space on
    that support: the number of free directions left after the six
    active expansion conditions.
    """

    weights: WeightVector
    residual: np.ndarray
    null_dimension: int


def solve_weights(
    q: int,
    support=None,
    table: ClassTable | None = None,
) -> SolveResult:
    """Minimum-norm weights with w D Q = b_q, w_1 = w_22 = 0.

    ``support`` restricts the nonzero entries to the given class ids
    (default: all of 2..21).  Classes 1 and 22 are always pinned to
    zero: their slots carry the constant expansion terms, which already
    match b_q identically for q < 3.  Raises
    :class:`InfeasibleWeightsError` when the support cannot satisfy the
    condition.
    """
    if q not in (0, 1, 2):
        raise ValueError(f"solvable q are 0, 1, 2, got {q}")
    if table is None:
        table = default_class_table()
    if support is None:
        support = range(2, N_CLASSES)
    ids = sorted(set(int(j) for j in support))
    if any(j < 2 or j > N_CLASSES - 1 for j in ids):
        raise ValueError(f"support must lie within 2..{N_CLASSES - 1}, got {ids}")
    if not ids:
        raise ValueError("support is empty")

    scaled = table.multiplicity[: N_CLASSES - 1, None] * expansion_matrix(table)
    # Components 1 and 2 of w D Q vanish automatically once w_1 = 0, so
    # the active conditions are the six columns of orders a^1..a^3.
    columns = slice(2, 8)
    a = scaled[[j - 1 for j in ids]][:, columns].T
    b = target_row(q)[columns]
    solution, *_ = np.linalg.lstsq(a, b, rcond=None)
    defect = a @ solution - b
    if np.abs(defect).max() > _SOLVE_TOL:
        raise InfeasibleWeightsError(
            f"support {ids} cannot satisfy the q = {q} condition; "
            f"best defect {np.abs(defect).max():.3e}"
        )
    values = np.zeros(N_CLASSES)
    for j, value in zip(ids, solution):
        values[j - 1] = value
    w = WeightVector(q, values)
    residual = weight_residual(w, table)
    null_dimension = len(ids) - int(np.linalg.matrix_rank(a))
    return SolveResult(w, residual, null_dimension)


def save_weights(path, w: WeightVector, comments=()) -> None:
    """Write a weight file that loads back bit for bit."""
    lines = ["# voxmink weight file"]
    lines.extend(f"# {comment}" for comment in comments)
    lines.append(f"# q = {w.q}")
    for class_id in range(1, N_CLASSES + 1):
        lines.append(f"{class_id},{float(w.values[class_id - 1])!r}")
    Path(path).write_text("\n".join(lines) + "\n")


_Q_COMMENT = re.compile(r"#\s*q\s*=\s*(\d+)\s*$")


def _parse_weight_lines(lines, origin: str, q: int | None) -> WeightVector:
    values: dict[int, float] = {}
    file_q = None
    for number, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            match = _Q_COMMENT.match(line)
            if match:
                file_q = int(match.group(1))
            continue
        parts = line.split(",")
        if len(parts) != 2:
            raise WeightFileError(
                f"{origin}:{number}: expected 'class_id,weight', got {line!r}"
            )
        try:
            class_id = int(parts[0])
            value = float(parts[1])
        except ValueError:
            raise WeightFileError(
                f"{origin}:{number}: expected 'class_id,weight', got {line!r}"
            ) from None
        if not 1 <= class_id <= N_CLASSES:
            raise WeightFileError(
                f"{origin}:{number}: class id {class_id} outside 1..{N_CLASSES}"
            )
        if class_id in values:
            raise WeightFileError(f"{origin}:{number}: class {class_id} repeated")
        if not math.isfinite(value):
            raise WeightFileError(f"{origin}:{number}: weight {value!r} not finite")
        values[class_id] = value
    missing = sorted(set(range(1, N_CLASSES + 1)) - set(values))
    if missing:
        raise WeightFileError(f"{origin}: missing classes {missing}")
    effective_q = q if q is not None else file_q
    if effective_q is None:
        raise WeightFileError(
            f"{origin}: file does not state q; pass it explicitly"
        )
    ordered = np.array([values[j] for j in range(1, N_CLASSES + 1)])
    return WeightVector(effective_q, ordered)


def load_weights(path, q: int | None = None) -> WeightVector:
    """Read a weight file; ``q`` overrides the ``# q = n`` line if given."""
    text = Path(path).read_text()
    return _parse_weight_lines(text.splitlines(), str(path), q)


_REFERENCE_FILES = {
    2: "reference_weights_q2.txt",
    1: "reference_weights_q1.txt",
    0: "reference_weights_q0.txt",
}


def reference_weights(q: int) -> WeightVector:
    """The packaged reference weight set for the density of V_q."""
    if q == 3:
        return volume_weights()
    if q not in _REFERENCE_FILES:
        raise ValueError(f"q must be in 0..3, got {q}")
    text = resources.files("voxmink.data").joinpath(_REFERENCE_FILES[q]).read_text()
    return _parse_weight_lines(text.splitlines(), _REFERENCE_FILES[q], None)
