"""Frozen numerical oracles shared by the test modules.

Everything in this file was derived or transcribed independently of the
package code; tests compare package output against these values, never
the other way around.
"""

import math

SQ2 = math.sqrt(2.0)
SQ3 = math.sqrt(3.0)
XI = math.atan(SQ2) / (2.0 * math.pi)

# Class multiplicities (number of white-set configurations per class),
# classes 1..21; the all-black class 22 has multiplicity 1.
MULTIPLICITIES = (1, 8, 12, 12, 4, 24, 24, 8, 6, 8, 24, 6, 2, 24, 8, 24, 24, 4, 12, 12, 8)

# Intrinsic volumes (V3, V2, V1, 24 V1^(3)) of the convex hull of each
# class's white point set at unit lattice spacing, classes 1..21.
VOLUME_TABLE = (
    (1.0, 3.0, 3.0, 3.0),
    (5 / 6, 9 / 4 + SQ3 / 4, 9 / 4 + 3 * SQ2 * XI, 9 / 4 + 6 * SQ2 * XI),
    (1 / 2, 3 / 2 + SQ2 / 2, 2 + SQ2 / 2, 2 + SQ2),
    (2 / 3, 3 / 2 + SQ3 / 2, 3 / 2 + 6 * SQ2 * XI, 3 / 2 + 12 * SQ2 * XI),
    (2 / 3, 3 / 2 + SQ3 / 2, 3 / 2 + 6 * SQ2 * XI, 3 / 2 + 12 * SQ2 * XI),
    (1 / 3, 1 + SQ2 / 2, 3 / 2 + SQ2 / 2 + SQ3 / 6, 3 / 2 + SQ2 + SQ3 / 2),
    (1 / 3, 3 / 4 + SQ2 / 2 + SQ3 / 4, 5 / 4 + SQ2 / 2 + 3 * SQ2 * XI,
     5 / 4 + SQ2 + 6 * SQ2 * XI),
    (1 / 2, 3 / 4 + 3 * SQ3 / 4, 3 / 4 + 9 * SQ2 * XI, 3 / 4 + 18 * SQ2 * XI),
    (0.0, 1.0, 2.0, 2.0),
    (1 / 6, 3 / 4 + SQ3 / 4, 3 / 4 + 3 * SQ2 / 2 - 3 * SQ2 * XI,
     3 / 4 + 3 * SQ2 - 6 * SQ2 * XI),
    (1 / 6, 1 / 2 + SQ2 / 2, 1 + SQ2 / 2 + SQ3 / 3, 1 + SQ2 + SQ3),
    (0.0, SQ2, 1 + SQ2, 1 + 2 * SQ2),
    (1 / 3, SQ3, 12 * SQ2 * XI, 24 * SQ2 * XI),
    (1 / 6, 1 / 4 + SQ2 / 2 + SQ3 / 4, 3 / 4 + SQ2 / 2 + SQ3 / 6 + 3 * SQ2 * XI,
     3 / 4 + SQ2 + SQ3 / 2 + 6 * SQ2 * XI),
    (0.0, SQ3 / 2, 3 * SQ2 / 2, 3 * SQ2),
    (0.0, SQ2 / 2, 1 / 2 + SQ2 / 2 + SQ3 / 2, 1 / 2 + SQ2 + 3 * SQ3 / 2),
    (0.0, 1 / 2, 1 + SQ2 / 2, 1 + SQ2),
    (0.0, 0.0, SQ3, 3 * SQ3),
    (0.0, 0.0, SQ2, 2 * SQ2),
    (0.0, 0.0, 1.0, 1.0),
    (0.0, 0.0, 0.0, 0.0),
)

# Inclusion-exclusion matrix over white subsets, 21 x 21.
M_MATRIX = (
    (1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0),
    (-1, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0),
    (1, -2, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0),
    (1, -2, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0),
    (1, -2, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0),
    (-1, 3, -2, -1, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0),
    (-1, 3, -1, -1, -1, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0),
    (-1, 3, 0, -3, 0, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0),
    (1, -4, 4, 2, 0, -4, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0),
    (1, -4, 3, 3, 0, -3, 0, -1, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0),
    (1, -4, 3, 2, 1, -2, -2, 0, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0),
    (1, -4, 2, 2, 2, 0, -4, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0),
    (1, -4, 0, 6, 0, 0, 0, -4, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0),
    (1, -4, 2, 3, 1, -1, -2, -1, 0, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0),
    (-1, 5, -3, -6, -1, 3, 3, 4, 0, -1, 0, 0, -1, -3, 1, 0, 0, 0, 0, 0, 0),
    (-1, 5, -4, -4, -2, 3, 6, 1, 0, 0, -2, -1, 0, -2, 0, 1, 0, 0, 0, 0, 0),
    (-1, 5, -5, -4, -1, 6, 3, 1, -1, -1, -2, 0, 0, -1, 0, 0, 1, 0, 0, 0, 0),
    (1, -6, 6, 6, 3, -6, -12, -2, 0, 0, 6, 3, 0, 6, 0, -6, 0, 1, 0, 0, 0),
    (1, -6, 6, 7, 2, -8, -8, -4, 1, 2, 4, 1, 1, 6, -2, -2, -2, 0, 1, 0, 0),
    (1, -6, 7, 6, 2, -10, -8, -2, 2, 2, 6, 1, 0, 4, 0, -2, -4, 0, 0, 1, 0),
    (-1, 7, -9, -9, -3, 15, 15, 5, -3, -4, -12, -3, -1, -12, 3, 9, 9, -1, -3, -3, 1),
)

# The inclusion-exclusion row of the all-black configuration.
ROW_ALL_BLACK = (
    1, -8, 12, 12, 4, -24, -24, -8, 6, 8, 24, 6, 2, 24, -8, -24, -24, 4, 12, 12, -8,
)

# Expansion row components with closed forms, classes 1..21.  The
# missing classes carry exact zeros in all three columns.
_Q3_NONZERO = {
    1: 3.0,
    2: -3 / 4 + 3 * SQ2 * XI,
    3: 1 / 2 - 6 * SQ2 * XI + SQ2 / 2,
    6: -1 / 4 - SQ2 / 2 + 3 * SQ2 * XI + SQ3 / 6,
    9: 1 - 2 * SQ3 / 3,
    10: 3 * SQ2 / 2 - 6 * SQ2 * XI - SQ3 / 2,
    17: -1 / 4 - SQ2 / 2 + 3 * SQ2 * XI + SQ3 / 6,
    20: 1 / 2 - 6 * SQ2 * XI + SQ2 / 2,
    21: -3 / 4 + 3 * SQ2 * XI,
}
_Q4_NONZERO = {
    1: 3.0,
    2: (SQ3 - 3) / 4,
    3: (SQ2 - SQ3) / 2,
    6: (1 - 2 * SQ2 + SQ3) / 4,
    17: (2 * SQ2 - SQ3 - 1) / 4,
    20: (SQ3 - SQ2) / 2,
    21: (3 - SQ3) / 4,
}
_Q6_NONZERO = {
    1: 1 - math.pi / 8,
    2: -(4 + math.pi * (-3 / 4 + 6 * SQ2 * XI)) / 24,
    3: -(4 + math.pi * (1 / 2 - 12 * SQ2 * XI + SQ2)) / 24,
    6: (4 - math.pi * (-1 / 4 - SQ2 + 6 * SQ2 * XI + SQ3 / 2)) / 24,
    9: -1 / 3 - (math.pi / 24) * (1 - 2 * SQ3),
    10: -(4 + math.pi * (3 * SQ2 - 12 * SQ2 * XI - 3 * SQ3 / 2)) / 24,
    17: (4 - math.pi * (-1 / 4 - SQ2 + 6 * SQ2 * XI + SQ3 / 2)) / 24,
    20: -(4 + math.pi * (1 / 2 - 12 * SQ2 * XI + SQ2)) / 24,
    21: -(4 + math.pi * (-3 / 4 + 6 * SQ2 * XI)) / 24,
}
Q3_COLUMN = tuple(_Q3_NONZERO.get(j, 0.0) for j in range(1, 22))
Q4_COLUMN = tuple(_Q4_NONZERO.get(j, 0.0) for j in range(1, 22))
Q6_COLUMN = tuple(_Q6_NONZERO.get(j, 0.0) for j in range(1, 22))

# The fifth expansion component, rounded print values, classes 1..21.
Q5_COLUMN = (
    9.0, -0.6186, -0.4344, 0.02203, 0.02203, -0.06855, 0.0174, 0.0,
    -0.5580, -0.1267, 0.03245, 0.01379, 0.0, 0.004902, 0.007310,
    0.008850, 0.04284, 0.00328, 0.04898, 0.07429, 0.5730,
)

# Reference estimator weights by class id; omitted classes are zero.
# The class 17 value for q = 0 follows from the defining linear
# condition at this support, written to four decimals like the rest.
REFERENCE_WEIGHTS = {
    2: {2: 0.1777, 9: 2.2019, 11: 4.7430, 17: 0.5241, 20: -1.4678, 21: 1.1620},
    1: {2: 0.4789, 9: -0.3769, 11: 1.0450, 17: 0.0111, 20: 0.5583, 21: -0.7321},
    0: {2: 0.1535, 9: -0.3024, 11: -0.3830, 17: -0.1937, 20: 0.2587, 21: 0.0031},
}

# Model benchmark: intensity 0.1, constant radius 1.  Densities
# (V0, V1, V2, V3 order) evaluated from the closed forms right here so
# the oracle shares no code with the package.
BENCH_GAMMA = 0.1
_E = math.exp(-BENCH_GAMMA * 4.0 * math.pi / 3.0)
BENCH_DENSITIES = (
    _E * (BENCH_GAMMA - 4.0 * math.pi * BENCH_GAMMA**2
          + BENCH_GAMMA**3 * math.pi**4 / 6.0),
    _E * (4.0 * BENCH_GAMMA - BENCH_GAMMA**2 * math.pi**3 / 2.0),
    _E * BENCH_GAMMA * 2.0 * math.pi,
    1.0 - _E,
)
