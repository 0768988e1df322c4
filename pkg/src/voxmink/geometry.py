"""Convex geometry for very small point sets in three dimensions.

Everything the estimation pipeline needs from geometry reduces to convex
hulls of at most a few dozen points whose coordinates are of order one:
vertex subsets of a unit cell, scaled copies of them, and difference sets
built from pairs of such subsets.  At that size a brute-force facet scan
over point triples is exact (orientation tests sit far from the decision
tolerance), fast, and easy to audit, so no external hull library is used.

Quantities computed here:

* ``convex_hull``: hull of the input points, with the facet structure
  collapsed to what the functionals below need: affine dimension, hull
  vertices, edge lengths with exterior angles, boundary area, volume.
* ``intrinsic_volumes``: (V_1, V_2, V_3) of a hull.  V_1 uses the edge
  formula V_1 = (1 / (2 pi)) sum_E l(E) alpha(E), where alpha(E) is the
  angular gap of the normal cone along edge E: 2 pi for an isolated
  segment, pi at the edge of a flat polygon, pi minus the interior
  dihedral angle in dimension three.
* ``intrinsic_power_volume``: (1/12) sum_E (alpha(E) / (4 pi)) l(E)^3,
  the cubic edge sum entering third-order expansion terms.
* ``support_function`` of a finite point set.
* ``support_deficit_integral``: the integral over the unit sphere of the
  positive part of -h(D, u), where D = {f - b} is the difference set of
  two point sets.  It vanishes exactly when the convex hulls of the two
  sets intersect, and otherwise measures the cone of directions in which
  a plane separates them.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

# All coordinates handled here are O(1).  Nonzero orientation determinants
# and plane clearances are then bounded below by roughly 0.1, so a fixed
# tolerance nine orders of magnitude smaller is safe on either side.
GEOM_TOL = 1e-9


class QuadratureError(RuntimeError):
    """Sphere quadrature refinements failed to settle within the budget."""


@dataclass(frozen=True)
class Polytope:
    """Convex hull of a small point set, reduced to functional data.

    Attributes:
        dim: affine dimension of the hull, 0 to 3.
        vertices: hull vertices, shape (n, 3).
        edges: one (length, exterior_angle) pair per edge of the hull.
        v2: second intrinsic volume (polygon area in dimension 2, half
            the surface area in dimension 3, zero below that).
        v3: enclosed volume (zero below dimension 3).
    """

    dim: int
    vertices: np.ndarray
    edges: tuple[tuple[float, float], ...]
    v2: float
    v3: float


def _clean_points(points) -> np.ndarray:
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 3:
        raise ValueError(f"expected an (n, 3) point array, got shape {pts.shape}")
    if len(pts) == 0:
        raise ValueError("empty point set has no convex hull")
    if not np.all(np.isfinite(pts)):
        raise ValueError("point coordinates must be finite")
    return np.unique(np.round(pts, 12), axis=0)


def _cross2(a: np.ndarray, b: np.ndarray):
    """z-component of the cross product of stacked 2-d vectors."""
    return a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]


def _chain_2d(p: np.ndarray) -> np.ndarray:
    """Indices of the convex hull of 2-d points, counter-clockwise.

    Andrew's monotone chain.  Collinear interior points are dropped, so
    every returned vertex is a strict corner of the polygon.
    """
    order = np.lexsort((p[:, 1], p[:, 0]))

    def build(seq):
        out: list[int] = []
        for i in seq:
            while len(out) >= 2:
                turn = _cross2(p[out[-1]] - p[out[-2]], p[i] - p[out[-2]])
                if turn <= GEOM_TOL:
                    out.pop()
                else:
                    break
            out.append(int(i))
        return out

    lower = build(order)
    upper = build(order[::-1])
    return np.array(lower[:-1] + upper[:-1], dtype=int)


def _unit_perp(n: np.ndarray) -> np.ndarray:
    axis = np.zeros(3)
    axis[int(np.argmin(np.abs(n)))] = 1.0
    u = np.cross(n, axis)
    return u / np.linalg.norm(u)


def _ring_area(loop2: np.ndarray) -> float:
    return 0.5 * float(np.sum(_cross2(loop2, np.roll(loop2, -1, axis=0))))


def _hull_flat(pts: np.ndarray, frame: np.ndarray) -> Polytope:
    u, v = frame[0], frame[1]
    planar = np.stack([pts @ u, pts @ v], axis=1)
    ring = _chain_2d(planar)
    loop = pts[ring]
    area = abs(_ring_area(planar[ring]))
    edges = []
    for i in range(len(ring)):
        seg = loop[(i + 1) % len(ring)] - loop[i]
        edges.append((float(np.linalg.norm(seg)), float(np.pi)))
    return Polytope(2, loop, tuple(edges), area, 0.0)


def _hull_solid(pts: np.ndarray) -> Polytope:
    n = len(pts)
    facets: dict[frozenset[int], np.ndarray] = {}
    for i, j, k in itertools.combinations(range(n), 3):
        nrm = np.cross(pts[j] - pts[i], pts[k] - pts[i])
        nn = np.linalg.norm(nrm)
        if nn <= GEOM_TOL:
            continue
        nrm = nrm / nn
        d = (pts - pts[i]) @ nrm
        lo, hi = float(d.min()), float(d.max())
        if lo < -GEOM_TOL and hi > GEOM_TOL:
            continue  # plane cuts the set, not a supporting plane
        if hi > GEOM_TOL:
            nrm, d = -nrm, -d  # orient outward
        members = frozenset(np.flatnonzero(d >= -GEOM_TOL).tolist())
        facets.setdefault(members, nrm)

    volume = 0.0
    area_total = 0.0
    edge_normals: dict[frozenset[int], list[np.ndarray]] = {}
    edge_length: dict[frozenset[int], float] = {}
    used: set[int] = set()
    for members, nrm in facets.items():
        idx = np.fromiter(sorted(members), dtype=int)
        u = _unit_perp(nrm)
        v = np.cross(nrm, u)
        planar = np.stack([pts[idx] @ u, pts[idx] @ v], axis=1)
        ring = idx[_chain_2d(planar)]
        loop2 = np.stack([pts[ring] @ u, pts[ring] @ v], axis=1)
        # (u, v, nrm) is right-handed, so the ring is counter-clockwise
        # seen from outside and the signed area is positive.
        area = _ring_area(loop2)
        area_total += area
        volume += area * float(pts[ring[0]] @ nrm) / 3.0
        used.update(int(r) for r in ring)
        for t in range(len(ring)):
            a_id, b_id = int(ring[t]), int(ring[(t + 1) % len(ring)])
            key = frozenset((a_id, b_id))
            edge_normals.setdefault(key, []).append(nrm)
            edge_length[key] = float(np.linalg.norm(pts[a_id] - pts[b_id]))

    edges = []
    for key in sorted(edge_normals, key=sorted):
        normals = edge_normals[key]
        if len(normals) != 2:
            raise RuntimeError(
                f"edge {sorted(key)} borders {len(normals)} facets, expected 2"
            )
        cosg = float(np.clip(normals[0] @ normals[1], -1.0, 1.0))
        edges.append((edge_length[key], float(np.arccos(cosg))))
    vertices = pts[sorted(used)]
    return Polytope(3, vertices, tuple(edges), area_total / 2.0, volume)


def convex_hull(points) -> Polytope:
    """Convex hull of a small point set in R^3, any affine dimension."""
    pts = _clean_points(points)
    if len(pts) == 1:
        return Polytope(0, pts.copy(), (), 0.0, 0.0)
    diffs = pts[1:] - pts[0]
    _, sing, frame = np.linalg.svd(diffs, full_matrices=True)
    sing = np.concatenate([sing, np.zeros(3 - len(sing))])
    dim = int(np.sum(sing > GEOM_TOL * max(1.0, float(sing[0]))))
    if dim == 1:
        axis = frame[0]
        t = pts @ axis
        lo, hi = int(np.argmin(t)), int(np.argmax(t))
        length = float(t[hi] - t[lo])
        return Polytope(1, pts[[lo, hi]], ((length, 2.0 * np.pi),), 0.0, 0.0)
    if dim == 2:
        return _hull_flat(pts, frame)
    return _hull_solid(pts)


def intrinsic_volumes(poly: Polytope) -> tuple[float, float, float]:
    """(V_1, V_2, V_3) of a hull produced by :func:`convex_hull`."""
    v1 = sum(length * angle for length, angle in poly.edges) / (2.0 * np.pi)
    return (v1, poly.v2, poly.v3)


def intrinsic_power_volume(poly: Polytope) -> float:
    """Cubic edge functional (1/12) sum_E (alpha(E)/(4 pi)) l(E)^3."""
    return sum(angle / (4.0 * np.pi) * length**3 for length, angle in poly.edges) / 12.0


def support_function(points, direction) -> float:
    """h(points, direction) = max over the set of the scalar product."""
    pts = np.asarray(points, dtype=float)
    u = np.asarray(direction, dtype=float)
    return float(np.max(pts @ u))


def _refine_sphere(verts: np.ndarray, tris: np.ndarray):
    """Split each spherical triangle in four at projected edge midpoints."""
    m = len(tris)
    edges = np.concatenate([tris[:, [0, 1]], tris[:, [1, 2]], tris[:, [2, 0]]])
    edges = np.sort(edges, axis=1)
    uniq, inv = np.unique(edges, axis=0, return_inverse=True)
    mids = verts[uniq[:, 0]] + verts[uniq[:, 1]]
    mids /= np.linalg.norm(mids, axis=1, keepdims=True)
    base = len(verts)
    verts = np.vstack([verts, mids])
    m01 = base + inv[:m]
    m12 = base + inv[m : 2 * m]
    m20 = base + inv[2 * m :]
    tris = np.concatenate(
        [
            np.stack([tris[:, 0], m01, m20], axis=1),
            np.stack([tris[:, 1], m12, m01], axis=1),
            np.stack([tris[:, 2], m20, m12], axis=1),
            np.stack([m01, m12, m20], axis=1),
        ]
    )
    return verts, tris


def _solid_angles(a: np.ndarray, b: np.ndarray, c: np.ndarray) -> np.ndarray:
    """Solid angle of spherical triangles with unit-vector corners."""
    num = np.abs(np.einsum("ij,ij->i", a, np.cross(b, c)))
    den = (
        1.0
        + np.einsum("ij,ij->i", a, b)
        + np.einsum("ij,ij->i", b, c)
        + np.einsum("ij,ij->i", c, a)
    )
    return 2.0 * np.arctan2(num, den)


_OCTA_VERTS = np.array(
    [
        [1.0, 0.0, 0.0],
        [-1.0, 0.0, 0.0],
        [0.0, 1.0, 0.0],
        [0.0, -1.0, 0.0],
        [0.0, 0.0, 1.0],
        [0.0, 0.0, -1.0],
    ]
)
_OCTA_TRIS = np.array(
    [
        [0, 2, 4],
        [2, 1, 4],
        [1, 3, 4],
        [3, 0, 4],
        [2, 0, 5],
        [1, 2, 5],
        [3, 1, 5],
        [0, 3, 5],
    ]
)

_EVAL_CHUNK = 1 << 18


def support_deficit_integral(
    foreground,
    background,
    rel_tol: float = 1e-4,
    max_level: int = 9,
) -> float:
    """Sphere integral of (-h(D, u))+ for the difference set D = {f - b}.

    The sphere is triangulated by repeated midpoint subdivision of an
    octahedron; each refinement level is integrated with the centroid
    rule and exact spherical triangle areas.  Refinement stops when two
    consecutive levels agree to ``rel_tol`` (relative, with a small
    absolute floor).  If the budget of ``max_level`` subdivisions is
    exhausted first, a :class:`QuadratureError` is raised.
    """
    fg = np.asarray(foreground, dtype=float).reshape(-1, 3)
    bg = np.asarray(background, dtype=float).reshape(-1, 3)
    if len(fg) == 0 or len(bg) == 0:
        raise ValueError("both point sets must be nonempty")
    diff = (fg[:, None, :] - bg[None, :, :]).reshape(-1, 3)
    diff = np.unique(np.round(diff, 12), axis=0)

    verts, tris = _OCTA_VERTS, _OCTA_TRIS
    plain = None
    extrapolated = None
    for level in range(max_level + 1):
        if level > 0:
            verts, tris = _refine_sphere(verts, tris)
        a, b, c = verts[tris[:, 0]], verts[tris[:, 1]], verts[tris[:, 2]]
        centroids = a + b + c
        centroids /= np.linalg.norm(centroids, axis=1, keepdims=True)
        areas = _solid_angles(a, b, c)
        total = 0.0
        for start in range(0, len(centroids), _EVAL_CHUNK):
            block = centroids[start : start + _EVAL_CHUNK]
            h = (block @ diff.T).max(axis=1)
            total += float(np.maximum(0.0, -h) @ areas[start : start + _EVAL_CHUNK])
        if plain is not None:
            # The centroid rule converges at second order in the mesh
            # width, so each refinement divides the error by about four;
            # eliminating that leading term leaves a sequence accurate
            # well beyond the requested tolerance.
            richardson = (4.0 * total - plain) / 3.0
            if extrapolated is not None and level >= 5:
                if abs(richardson - extrapolated) <= max(
                    1e-7, rel_tol * abs(richardson)
                ):
                    return richardson
            extrapolated = richardson
        plain = total
    raise QuadratureError(
        f"deficit integral still moving after {max_level} refinements: "
        f"successive extrapolated values differ by more than the tolerance"
    )
