"""Motion-equivalence classes of 2x2x2 binary configurations.

A configuration assigns foreground or background to the eight vertices of
a unit cell.  Vertex i sits at ((i >> 0) & 1, (i >> 1) & 1, (i >> 2) & 1):

        6-------7
       /|      /|         z  y
      4-------5 |         | /
      | 2-----|-3         |/
      |/      |/          +---x
      0-------1

A mask is an eight-bit integer with bit i set when vertex i is foreground.
The full symmetry group of the cell (rotations and reflections, 48
elements) acts on masks by permuting vertices, and its orbits split the
256 masks into 22 classes.  Classes are defined through the background
set of a configuration: mask 0 (everything background) is class 1, the
all-foreground mask 255 (empty background) is class 22, and the 254
remaining masks fall into classes 2 to 21.

Class identifiers follow the standard numbering.  It is pinned here by
geometric signatures (orbit size together with intrinsic volumes of the
convex hull of a representative background set) instead of enumeration
order, so a change in how orbits happen to be enumerated cannot silently
renumber the classes.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .geometry import convex_hull, intrinsic_power_volume, intrinsic_volumes

#: Vertex coordinates in mask-bit order.
CUBE_VERTICES = np.array(
    [[(i >> 0) & 1, (i >> 1) & 1, (i >> 2) & 1] for i in range(8)], dtype=float
)

N_CLASSES = 22

#: Normalized exterior angle parameter of a cell edge against a diagonal,
#: arctan(sqrt 2) / (2 pi).  It appears in every mean-width value below.
XI = math.atan(math.sqrt(2.0)) / (2.0 * math.pi)

_S2 = math.sqrt(2.0)
_S3 = math.sqrt(3.0)

# Canonical numbering of the 22 classes, keyed by the signature of one
# representative background set F: orbit size and (V_3, V_2, V_1,
# 24 V_1^(3)) of conv F.  Classes 4 and 5 share all four functionals and
# are told apart by orbit size alone; class 22 (empty background) is
# handled separately.
_CLASS_SIGNATURES: dict[int, tuple[int, float, float, float, float]] = {
    1: (1, 1.0, 3.0, 3.0, 3.0),
    2: (8, 5 / 6, 9 / 4 + _S3 / 4, 9 / 4 + 3 * _S2 * XI, 9 / 4 + 6 * _S2 * XI),
    3: (12, 1 / 2, 3 / 2 + _S2 / 2, 2 + _S2 / 2, 2 + _S2),
    4: (12, 2 / 3, 3 / 2 + _S3 / 2, 3 / 2 + 6 * _S2 * XI, 3 / 2 + 12 * _S2 * XI),
    5: (4, 2 / 3, 3 / 2 + _S3 / 2, 3 / 2 + 6 * _S2 * XI, 3 / 2 + 12 * _S2 * XI),
    6: (24, 1 / 3, 1 + _S2 / 2, 3 / 2 + _S2 / 2 + _S3 / 6, 3 / 2 + _S2 + _S3 / 2),
    7: (
        24,
        1 / 3,
        3 / 4 + _S2 / 2 + _S3 / 4,
        5 / 4 + _S2 / 2 + 3 * _S2 * XI,
        5 / 4 + _S2 + 6 * _S2 * XI,
    ),
    8: (8, 1 / 2, 3 / 4 + 3 * _S3 / 4, 3 / 4 + 9 * _S2 * XI, 3 / 4 + 18 * _S2 * XI),
    9: (6, 0.0, 1.0, 2.0, 2.0),
    10: (
        8,
        1 / 6,
        3 / 4 + _S3 / 4,
        3 / 4 + 3 * _S2 / 2 - 3 * _S2 * XI,
        3 / 4 + 3 * _S2 - 6 * _S2 * XI,
    ),
    11: (24, 1 / 6, 1 / 2 + _S2 / 2, 1 + _S2 / 2 + _S3 / 3, 1 + _S2 + _S3),
    12: (6, 0.0, _S2, 1 + _S2, 1 + 2 * _S2),
    13: (2, 1 / 3, _S3, 12 * _S2 * XI, 24 * _S2 * XI),
    14: (
        24,
        1 / 6,
        1 / 4 + _S2 / 2 + _S3 / 4,
        3 / 4 + _S2 / 2 + _S3 / 6 + 3 * _S2 * XI,
        3 / 4 + _S2 + _S3 / 2 + 6 * _S2 * XI,
    ),
    15: (8, 0.0, _S3 / 2, 3 * _S2 / 2, 3 * _S2),
    16: (24, 0.0, _S2 / 2, 1 / 2 + _S2 / 2 + _S3 / 2, 1 / 2 + _S2 + 3 * _S3 / 2),
    17: (24, 0.0, 1 / 2, 1 + _S2 / 2, 1 + _S2),
    18: (4, 0.0, 0.0, _S3, 3 * _S3),
    19: (12, 0.0, 0.0, _S2, 2 * _S2),
    20: (12, 0.0, 0.0, 1.0, 1.0),
    21: (8, 0.0, 0.0, 0.0, 0.0),
}

_SIGNATURE_TOL = 1e-9


def _perm_sign(axes: tuple[int, int, int]) -> int:
    flips = sum(1 for a, b in itertools.combinations(axes, 2) if a > b)
    return -1 if flips % 2 else 1


def cube_symmetry_group(include_reflections: bool = True) -> tuple[tuple[int, ...], ...]:
    """Vertex permutations of the cell symmetry group.

    Each element is returned as a tuple p with p[i] the image of vertex i.
    With reflections there are 48 elements, without them 24.
    """
    elements = set()
    for axes in itertools.permutations((0, 1, 2)):
        for flips in itertools.product((0, 1), repeat=3):
            if not include_reflections:
                if _perm_sign(axes) * (-1) ** sum(flips) < 0:
                    continue
            perm = []
            for v in range(8):
                coords = ((v >> 0) & 1, (v >> 1) & 1, (v >> 2) & 1)
                image = 0
                for k in range(3):
                    image |= (coords[axes[k]] ^ flips[k]) << k
                perm.append(image)
            elements.add(tuple(perm))
    expected = 48 if include_reflections else 24
    if len(elements) != expected:
        raise RuntimeError(f"built {len(elements)} group elements, expected {expected}")
    return tuple(sorted(elements))


def transform_mask(perm: tuple[int, ...], mask: int) -> int:
    """Image of a configuration mask under a vertex permutation."""
    out = 0
    for v in range(8):
        if mask >> v & 1:
            out |= 1 << perm[v]
    return out


def mask_orbits(group) -> list[list[int]]:
    """Orbits of all 256 masks under the given vertex permutations."""
    seen = [False] * 256
    orbits = []
    for start in range(256):
        if seen[start]:
            continue
        orbit = sorted({transform_mask(perm, start) for perm in group})
        for m in orbit:
            if seen[m]:
                raise RuntimeError("orbit enumeration produced overlapping orbits")
            seen[m] = True
        orbits.append(orbit)
    return orbits


def submasks(mask: int):
    """All submasks of ``mask``, including 0 and the mask itself."""
    s = mask
    while True:
        yield s
        if s == 0:
            return
        s = (s - 1) & mask


def points_of_mask(mask: int) -> np.ndarray:
    """Coordinates of the vertices selected by a mask, shape (k, 3)."""
    return CUBE_VERTICES[[v for v in range(8) if mask >> v & 1]]


@dataclass(frozen=True)
class ClassTable:
    """Lookup tables tying masks, classes, and representative geometry.

    Attributes:
        set_class: for each subset mask s, the class id of that vertex
            set viewed as the background of a configuration (1..22).
        pattern_class: for each foreground mask m, the class id of the
            configuration, i.e. ``set_class[255 ^ m]``.
        background_rep: per class (index j-1), the smallest subset mask
            in the class when read as a background set.
        multiplicity: per class, the orbit size D_jj (class 22 has 1).
        volumes: per class, (V_3, V_2, V_1, 24 V_1^(3)) of the hull of
            the representative background set; the class 22 row is zero.
    """

    set_class: np.ndarray
    pattern_class: np.ndarray
    background_rep: np.ndarray
    multiplicity: np.ndarray
    volumes: np.ndarray

    def classify_mask(self, mask: int) -> int:
        if not 0 <= mask <= 255:
            raise ValueError(f"mask must be in 0..255, got {mask}")
        return int(self.pattern_class[mask])

    def background_mask(self, class_id: int) -> int:
        self._check_class(class_id)
        return int(self.background_rep[class_id - 1])

    def foreground_mask(self, class_id: int) -> int:
        return 255 ^ self.background_mask(class_id)

    def background_points(self, class_id: int) -> np.ndarray:
        return points_of_mask(self.background_mask(class_id))

    def foreground_points(self, class_id: int) -> np.ndarray:
        return points_of_mask(self.foreground_mask(class_id))

    @staticmethod
    def _check_class(class_id: int) -> None:
        if not 1 <= class_id <= N_CLASSES:
            raise ValueError(f"class id must be in 1..{N_CLASSES}, got {class_id}")


def _signature_match(size: int, values: tuple[float, float, float, float]) -> int:
    hits = []
    for cid, (mult, *ref) in _CLASS_SIGNATURES.items():
        if mult != size:
            continue
        if max(abs(a - b) for a, b in zip(values, ref)) <= _SIGNATURE_TOL:
            hits.append(cid)
    if len(hits) != 1:
        raise RuntimeError(
            f"orbit of size {size} with functionals {values} matched "
            f"classes {hits}; the geometry engine disagrees with the "
            "expected class inventory"
        )
    return hits[0]


def build_class_table() -> ClassTable:
    """Enumerate orbits and pin class ids through geometric signatures."""
    orbits = mask_orbits(cube_symmetry_group())
    set_class = np.zeros(256, dtype=np.int64)
    background_rep = np.zeros(N_CLASSES, dtype=np.int64)
    multiplicity = np.zeros(N_CLASSES, dtype=np.int64)
    volumes = np.zeros((N_CLASSES, 4), dtype=float)
    assigned: set[int] = set()
    for orbit in orbits:
        rep = orbit[0]
        if rep == 0:
            cid = N_CLASSES
            vals = (0.0, 0.0, 0.0, 0.0)
        else:
            hull = convex_hull(points_of_mask(rep))
            v1, v2, v3 = intrinsic_volumes(hull)
            vals = (v3, v2, v1, 24.0 * intrinsic_power_volume(hull))
            cid = _signature_match(len(orbit), vals)
        if cid in assigned:
            raise RuntimeError(f"two orbits matched class {cid}")
        assigned.add(cid)
        for mask in orbit:
            set_class[mask] = cid
        background_rep[cid - 1] = rep
        multiplicity[cid - 1] = len(orbit)
        volumes[cid - 1] = vals
    if assigned != set(range(1, N_CLASSES + 1)):
        raise RuntimeError(f"classes {sorted(set(range(1, 23)) - assigned)} unmatched")
    pattern_class = set_class[255 ^ np.arange(256)]
    return ClassTable(set_class, pattern_class, background_rep, multiplicity, volumes)


@lru_cache(maxsize=1)
def default_class_table() -> ClassTable:
    return build_class_table()


def inclusion_exclusion_matrix(
    table: ClassTable | None = None,
    background_masks=None,
) -> np.ndarray:
    """The 21 x 21 integer matrix M of the configuration expansion.

    Row i expands the probability of observing class i by inclusion and
    exclusion over subsets S of the representative foreground set:
    M[i, j] counts, with sign (-1)^|S|, the subsets S for which the
    background union W cup S falls into class j.  Any orbit member can
    serve as the representative; ``background_masks`` overrides the
    stored ones (one background mask per class 1..21) to exercise that.
    """
    if table is None:
        table = default_class_table()
    if background_masks is None:
        background_masks = table.background_rep[: N_CLASSES - 1]
    reps = [int(m) for m in background_masks]
    if len(reps) != N_CLASSES - 1:
        raise ValueError(f"need {N_CLASSES - 1} background masks, got {len(reps)}")
    matrix = np.zeros((N_CLASSES - 1, N_CLASSES - 1), dtype=np.int64)
    for row, background in enumerate(reps):
        if table.set_class[background] != row + 1:
            raise ValueError(
                f"mask {background} is not a background set of class {row + 1}"
            )
        foreground = 255 ^ background
        for s in submasks(foreground):
            cls = int(table.set_class[background | s])
            matrix[row, cls - 1] += -1 if s.bit_count() % 2 else 1
    return matrix


def full_foreground_inclusion_row(table: ClassTable | None = None) -> np.ndarray:
    """Signed class counts of the nonempty vertex subsets.

    This is the inclusion-exclusion expansion of the all-foreground
    configuration (empty background): entry j sums (-1)^|S| over the
    nonempty subsets S whose class as a background set is j.
    """
    if table is None:
        table = default_class_table()
    row = np.zeros(N_CLASSES - 1, dtype=np.int64)
    for s in range(1, 256):
        cls = int(table.set_class[s])
        row[cls - 1] += -1 if s.bit_count() % 2 else 1
    return row
