"""Expansion of configuration probabilities in the lattice distance.

For a stationary Boolean model Z with ball grains, the probability that a
scaled 2x2x2 configuration is observed at a lattice cell can be expanded
in the lattice distance a.  The probability that a finite background set
a S is missed by Z is exp(-gamma E V_3(ball + a conv S)), and expanding
the exponent through third order in a turns every configuration
probability into a row vector times a fixed basis vector v(a):

    P(class j observed) = Q_j . v(a) + O(a^4),

with Q = M P, where M is the integer inclusion-exclusion matrix over
configurations and P collects per-class hull functionals

    P_j = (0, 1, V_1, V_2, V_1^2, V_3 - pi V_1^(3), V_1 V_2, V_1^3)

of the representative background set.  The basis v(a) carries the model
dependence (intensity and radius moments) and the powers of a; its eight
components match the eight functional slots above.

The same machinery gives the mean of any configuration-count estimator:
a weight vector w over the 21 proper classes plus the all-foreground
class has mean a^(q-3) (w D Q) . v(a) up to O(a^(q+1)), where D is the
diagonal of orbit multiplicities.  Target rows b_q state the conditions
w D Q = b_q under which those means converge to the density V_q of the
model as a -> 0, and the classical closed forms for the densities of a
ball-grain Boolean model are provided for ground truth.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

from .configs import (
    ClassTable,
    N_CLASSES,
    default_class_table,
    full_foreground_inclusion_row,
    inclusion_exclusion_matrix,
)
from .model import BallModelParams

BASIS_DIM = 8


class ExpansionRangeError(ValueError):
    """A truncated probability fell outside [0, 1].

    The expansion is asymptotic in the lattice distance; far from its
    range of validity the truncation stops being a probability.  This is
    reported instead of clamped so that callers see the breakdown.
    """


def _table(table: ClassTable | None) -> ClassTable:
    return default_class_table() if table is None else table


def geometry_row(class_id: int, table: ClassTable | None = None) -> np.ndarray:
    """Functional row P_j of the representative background hull."""
    if not 1 <= class_id <= N_CLASSES - 1:
        raise ValueError(f"class id must be in 1..{N_CLASSES - 1}, got {class_id}")
    v3, v2, v1, power24 = _table(table).volumes[class_id - 1]
    v13 = power24 / 24.0
    return np.array(
        [0.0, 1.0, v1, v2, v1**2, v3 - math.pi * v13, v1 * v2, v1**3]
    )


def geometry_matrix(table: ClassTable | None = None) -> np.ndarray:
    """All 21 functional rows stacked, shape (21, 8)."""
    return np.stack([geometry_row(j, table) for j in range(1, N_CLASSES)])


def expansion_matrix(table: ClassTable | None = None) -> np.ndarray:
    """Q = M P, shape (21, 8): expansion rows of the class probabilities."""
    table = _table(table)
    m = inclusion_exclusion_matrix(table)
    return m.astype(float) @ geometry_matrix(table)


def full_foreground_expansion_row(table: ClassTable | None = None) -> np.ndarray:
    """Expansion row of the all-foreground configuration (class 22).

    Inclusion and exclusion over all nonempty vertex subsets, plus the
    constant term 1 from the empty subset, which lands in the first
    basis slot.  Its leading part (1, -1, ...) states that the window is
    all foreground with probability 1 - exp(-gamma E V_3(ball)) + O(a).
    """
    table = _table(table)
    row = np.zeros(BASIS_DIM)
    row[0] = 1.0
    row += full_foreground_inclusion_row(table).astype(float) @ geometry_matrix(table)
    return row


@lru_cache(maxsize=1)
def _default_expansion_matrix() -> np.ndarray:
    return expansion_matrix(default_class_table())


def _q_matrix(table: ClassTable | None) -> np.ndarray:
    if table is None:
        return _default_expansion_matrix()
    return expansion_matrix(table)


def basis_vector(model: BallModelParams, spacing: float) -> np.ndarray:
    """The model-and-spacing basis v(a) the expansion rows act on."""
    if not (math.isfinite(spacing) and spacing >= 0):
        raise ValueError(f"spacing must be finite and nonnegative, got {spacing}")
    gamma = model.intensity
    m1, m2, m3 = (model.radius.moment(k) for k in (1, 2, 3))
    void = math.exp(-gamma * 4.0 * math.pi * m3 / 3.0)
    a = spacing
    return np.array(
        [
            1.0,
            void,
            -a * gamma * m2 * math.pi * void,
            -(a**2) * gamma * 2.0 * m1 * void,
            a**2 * gamma**2 * math.pi**2 * m2**2 / 2.0 * void,
            -(a**3) * gamma * void,
            a**3 * gamma**2 * 2.0 * math.pi * m1 * m2 * void,
            -(a**3) * gamma**3 * math.pi**3 * m2**3 / 6.0 * void,
        ]
    )


def target_row(q: int) -> np.ndarray:
    """Row b_q with w D Q = b_q characterizing convergent weights.

    Contracting b_q with v(a) and the prefactor a^(q-3) reproduces the
    density V_q of the model exactly, for every spacing.
    """
    rows = {
        3: [1.0, -1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        2: [0.0, 0.0, -2.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        1: [0.0, 0.0, 0.0, -2.0, -math.pi, 0.0, 0.0, 0.0],
        0: [0.0, 0.0, 0.0, 0.0, 0.0, -1.0, -2.0, -math.pi],
    }
    if q not in rows:
        raise ValueError(f"q must be in 0..3, got {q}")
    return np.array(rows[q])


def specific_intrinsic_volumes(model: BallModelParams) -> np.ndarray:
    """Densities (V_0, V_1, V_2, V_3) of the Boolean model.

    Closed forms for isotropic grains, written in the radius moments;
    for ball grains they are exact at every intensity.
    """
    gamma = model.intensity
    m1, m2, m3 = (model.radius.moment(k) for k in (1, 2, 3))
    void = math.exp(-gamma * 4.0 * math.pi * m3 / 3.0)
    v3 = 1.0 - void
    v2 = void * gamma * 2.0 * math.pi * m2
    v1 = void * (4.0 * gamma * m1 - gamma**2 * math.pi**3 * m2**2 / 2.0)
    v0 = void * (
        gamma
        - 4.0 * math.pi * gamma**2 * m1 * m2
        + gamma**3 * math.pi**4 * m2**3 / 6.0
    )
    return np.array([v0, v1, v2, v3])


def predicted_class_probability(
    class_id: int,
    model: BallModelParams,
    spacing: float,
    table: ClassTable | None = None,
) -> float:
    """Truncated probability of observing class ``class_id`` at spacing a.

    Classes 1..21 use their row of Q; class 22 uses the all-foreground
    row.  Raises :class:`ExpansionRangeError` when the truncation leaves
    [0, 1], which signals that a is outside the expansion's range.
    """
    if class_id == N_CLASSES:
        row = full_foreground_expansion_row(table)
    elif 1 <= class_id <= N_CLASSES - 1:
        row = _q_matrix(table)[class_id - 1]
    else:
        raise ValueError(f"class id must be in 1..{N_CLASSES}, got {class_id}")
    value = float(row @ basis_vector(model, spacing))
    # Rows that cancel to zero can land a rounding error outside [0, 1];
    # only a material violation signals a spacing out of range.
    if not -1e-9 <= value <= 1.0 + 1e-9:
        raise ExpansionRangeError(
            f"truncated probability {value:.6g} for class {class_id} at "
            f"spacing {spacing:g} is not in [0, 1]"
        )
    return min(max(value, 0.0), 1.0)


def estimator_row(weight_values, table: ClassTable | None = None) -> np.ndarray:
    """Row vector w D Q of a weighted configuration-count estimator.

    ``weight_values`` has 22 entries.  The first 21 weight the class
    counts and contribute through D Q.  The last entry weights the
    lattice-point counter (foreground base points), whose mean is the
    volume target row in basis coordinates exactly, with no remainder.
    """
    w = np.asarray(weight_values, dtype=float)
    if w.shape != (N_CLASSES,):
        raise ValueError(f"expected {N_CLASSES} weights, got shape {w.shape}")
    table = _table(table)
    scaled = w[: N_CLASSES - 1] * table.multiplicity[: N_CLASSES - 1]
    return scaled @ _q_matrix(table) + w[N_CLASSES - 1] * target_row(3)


def predicted_estimator_mean(
    weight_values,
    q: int,
    model: BallModelParams,
    spacing: float,
    table: ClassTable | None = None,
) -> float:
    """Expansion mean a^(q-3) (w D Q) . v(a) of the estimator for V_q."""
    if q not in (0, 1, 2, 3):
        raise ValueError(f"q must be in 0..3, got {q}")
    if not spacing > 0:
        raise ValueError(f"spacing must be positive, got {spacing}")
    row = estimator_row(weight_values, table)
    return float(spacing ** (q - 3) * (row @ basis_vector(model, spacing)))


def curvature_constants(
    class_id: int, table: ClassTable | None = None
) -> tuple[float, float, float]:
    """Per-class constants (c_1, c_2, c_3) of the probability expansion.

    They repackage the first and second order entries of the class's
    expansion row in the normalization used for isotropic second-order
    analysis: c_1 = -Q_3 / 2, c_2 = -Q_4 / 2, c_3 = Q_5 / 4.
    """
    if not 1 <= class_id <= N_CLASSES - 1:
        raise ValueError(f"class id must be in 1..{N_CLASSES - 1}, got {class_id}")
    row = _q_matrix(table)[class_id - 1]
    return (-row[2] / 2.0, -row[3] / 2.0, row[4] / 4.0)
