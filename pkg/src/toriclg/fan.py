"""Smooth fans: parsing, validation and combinatorial queries.

A fan is given by primitive integer ray generators and a list of maximal
cones (sets of 1-based ray indices).  Validation checks primitivity,
smoothness (ray generators of every cone extend to a lattice basis), and
the fan condition (any two cones meet in a common face), the last one by
exact extreme-ray enumeration of pairwise intersections.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

from . import linalg
from .linalg import RationalMatrix, Vector, dot, inverse, kernel_basis, vector

IntVec = tuple[int, ...]


class FanError(ValueError):
    pass


class FanParseError(FanError):
    """Malformed fan file."""


class FanValidationError(FanError):
    """Structurally valid file describing an invalid fan."""


@dataclass(frozen=True, order=True)
class Cone:
    """A cone of the fan, stored as its sorted 1-based ray indices."""

    ray_indices: IntVec

    @property
    def dim(self) -> int:
        return len(self.ray_indices)

    @property
    def index_set(self) -> frozenset[int]:
        return frozenset(self.ray_indices)

    def __str__(self) -> str:
        return "{" + ",".join(str(i) for i in self.ray_indices) + "}" if self.ray_indices else "{0}"


def _as_cone(indices: Iterable[int]) -> Cone:
    return Cone(tuple(sorted(set(indices))))


@dataclass(frozen=True)
class PolyhedronInput:
    """A lattice polyhedron: convex hull of vertices plus recession rays."""

    vertices: tuple[IntVec, ...]
    recession_rays: tuple[IntVec, ...]


@dataclass(frozen=True)
class Fan:
    """Validated smooth fan.  Immutable; safe for concurrent reads."""

    rank: int
    rays: tuple[IntVec, ...]
    max_cones: tuple[Cone, ...]
    all_cones: tuple[Cone, ...]

    @property
    def num_rays(self) -> int:
        return len(self.rays)

    def ray(self, i: int) -> IntVec:
        """Ray generator for a 1-based ray index."""
        return self.rays[i - 1]

    @cached_property
    def _face_set(self) -> frozenset[frozenset[int]]:
        return frozenset(c.index_set for c in self.all_cones)

    def is_face(self, indices: Iterable[int]) -> bool:
        return frozenset(indices) in self._face_set

    def cone(self, indices: Iterable[int]) -> Cone:
        c = _as_cone(indices)
        if c.index_set not in self._face_set:
            raise FanError(f"{sorted(c.ray_indices)} is not a cone of the fan")
        return c

    def cones_of_dim(self, k: int) -> tuple[Cone, ...]:
        return tuple(c for c in self.all_cones if c.dim == k)

    def max_cones_containing(self, cone: Cone) -> tuple[Cone, ...]:
        s = cone.index_set
        return tuple(m for m in self.max_cones if s <= m.index_set)

    def ray_matrix(self, cone: Cone) -> RationalMatrix:
        """Rows are the generators of the cone's rays."""
        return RationalMatrix.from_rows([self.ray(i) for i in cone.ray_indices]) \
            if cone.ray_indices else RationalMatrix.zeros(0, self.rank)


# -- lattice helpers ------------------------------------------------------


def primitive_vector(v: Sequence) -> IntVec:
    """Scale a rational vector to a primitive integer vector, same direction."""
    fracs = [Fraction(x) for x in v]
    if all(x == 0 for x in fracs):
        return tuple(0 for _ in fracs)
    denom = math.lcm(*(x.denominator for x in fracs))
    ints = [int(x * denom) for x in fracs]
    g = math.gcd(*(abs(x) for x in ints))
    return tuple(x // g for x in ints)


def _is_primitive(v: IntVec) -> bool:
    nz = [abs(x) for x in v if x]
    return bool(nz) and math.gcd(*nz) == 1


def _max_minor_gcd(rows: list[IntVec], rank: int) -> int:
    """gcd of all k x k minors of a k x n integer matrix (k = len(rows))."""
    k = len(rows)
    if k == 0:
        return 1
    g = 0
    for cols in itertools.combinations(range(rank), k):
        sub = RationalMatrix.from_rows([[row[c] for c in cols] for row in rows])
        g = math.gcd(g, abs(int(linalg.det(sub))))
    return g


def is_unimodular_cone(rays: list[IntVec], rank: int) -> bool:
    """True when the rays are independent and extend to a Z-basis.

    Equivalent to: the gcd of all maximal minors of the ray matrix is 1
    (the product of the Smith normal form invariants).
    """
    return _max_minor_gcd(rays, rank) == 1


def ray_coordinates_in_cone_basis(fan: Fan, cone: Cone, ray_index: int) -> tuple[int, ...]:
    """Integer coordinates of a ray in the basis given by a full-dim smooth cone.

    Returns a_1..a_n with ray = sum a_i * (i-th cone ray), by Cramer's
    rule.  Raises on a non-integral solve, which cannot happen for a
    unimodular cone and signals an internal error.
    """
    if cone.dim != fan.rank:
        raise FanError(f"cone {cone} is not full-dimensional")
    rows = [fan.ray(i) for i in cone.ray_indices]
    target = fan.ray(ray_index)
    d = linalg.det(RationalMatrix.from_rows(rows))
    out = []
    for i in range(fan.rank):
        replaced = [target if t == i else rows[t] for t in range(fan.rank)]
        c = linalg.det(RationalMatrix.from_rows(replaced)) / d
        if c.denominator != 1:
            raise FanError(f"non-integral lattice solve for ray {ray_index} in cone {cone}")
        out.append(int(c))
    return tuple(out)


# -- cone geometry (exact) ------------------------------------------------


def _extend_to_basis(rays: list[IntVec], rank: int) -> list[Vector]:
    """Extend independent rows to a basis of Q^rank by greedy unit vectors."""
    rows = [vector(r) for r in rays]
    for j in range(rank):
        if len(rows) == rank:
            break
        e = tuple(Fraction(1 if t == j else 0) for t in range(rank))
        cand = rows + [e]
        if linalg.rank(RationalMatrix.from_rows(cand)) == len(cand):
            rows.append(e)
    if len(rows) != rank:  # pragma: no cover - rays assumed independent
        raise FanError("could not extend rays to a basis")
    return rows


def halfspace_representation(fan: Fan, cone: Cone) -> tuple[list[Vector], list[Vector]]:
    """(equalities, inequalities) cutting out a smooth cone exactly.

    x lies in the cone iff every equality functional vanishes on x and
    every inequality functional is >= 0 on x.  The functionals are the
    dual basis of the cone rays extended to a basis.
    """
    k = cone.dim
    n = fan.rank
    rays = [fan.ray(i) for i in cone.ray_indices]
    basis = _extend_to_basis(rays, n)
    dual_rows = inverse(RationalMatrix.from_rows(basis).transpose()).to_rows()
    ineqs = [tuple(dual_rows[i]) for i in range(k)]
    eqs = [tuple(dual_rows[i]) for i in range(k, n)]
    return eqs, ineqs


def extreme_rays(eqs: list[Vector], ineqs: list[Vector], rank: int) -> set[IntVec]:
    """Extreme rays of a pointed cone {x : eqs x = 0, ineqs x >= 0}.

    Brute-force enumeration over active sets; fine at desk scale.
    """
    found: set[IntVec] = set()
    m = len(ineqs)
    for size in range(m + 1):
        for subset in itertools.combinations(range(m), size):
            rows = list(eqs) + [ineqs[i] for i in subset]
            mat = RationalMatrix.from_rows(rows) if rows else RationalMatrix.zeros(0, rank)
            ker = kernel_basis(mat)
            if len(ker) != 1:
                continue
            v = ker[0]
            for cand in (v, tuple(-x for x in v)):
                if all(dot(a, cand) >= 0 for a in ineqs):
                    found.add(primitive_vector(cand))
    return found


def cone_intersection_extreme_rays(fan: Fan, c1: Cone, c2: Cone) -> set[IntVec]:
    e1, i1 = halfspace_representation(fan, c1)
    e2, i2 = halfspace_representation(fan, c2)
    return extreme_rays(e1 + e2, i1 + i2, fan.rank)


def _check_fan_condition(fan_rank: int, rays: tuple[IntVec, ...], cones: Sequence[Cone]) -> None:
    """Every pairwise intersection of maximal cones is the common-ray face."""
    tmp = Fan(fan_rank, rays, tuple(cones), tuple(cones))
    for a, b in itertools.combinations(cones, 2):
        common = a.index_set & b.index_set
        allowed = {rays[i - 1] for i in common}
        ext = cone_intersection_extreme_rays(tmp, a, b)
        for r in ext:
            if r not in allowed:
                raise FanValidationError(
                    f"fan condition fails: cones {a} and {b} intersect beyond their "
                    f"common face (extra extreme ray {list(r)})")


# -- construction ----------------------------------------------------------


def fan_from_data(rank: int, rays: Sequence[Sequence[int]],
                  max_cones: Sequence[Sequence[int]]) -> Fan:
    """Validate raw data and build a Fan with computed face closure."""
    if not isinstance(rank, int) or rank < 1:
        raise FanValidationError(f"rank must be a positive integer, got {rank!r}")
    ray_tuples: list[IntVec] = []
    for idx, r in enumerate(rays, start=1):
        if len(r) != rank or not all(isinstance(x, int) for x in r):
            raise FanParseError(f"ray {idx} is not an integer vector of length {rank}")
        t = tuple(r)
        if all(x == 0 for x in t):
            raise FanValidationError(f"ray {idx} is zero")
        if not _is_primitive(t):
            raise FanValidationError(f"ray {idx} = {list(t)} is not primitive")
        if t in ray_tuples:
            raise FanValidationError(f"ray {idx} duplicates ray {ray_tuples.index(t) + 1}")
        ray_tuples.append(t)
    d = len(ray_tuples)

    if not max_cones:
        raise FanParseError("max_cones must list at least one cone")
    seen: set[IntVec] = set()
    listed: list[Cone] = []
    for pos, raw in enumerate(max_cones, start=1):
        if not all(isinstance(i, int) and 1 <= i <= d for i in raw):
            raise FanParseError(f"cone #{pos} has ray indices outside 1..{d}")
        cone = _as_cone(raw)
        if len(raw) != len(cone.ray_indices):
            raise FanParseError(f"cone #{pos} repeats a ray index")
        gens = [ray_tuples[i - 1] for i in cone.ray_indices]
        if gens and linalg.rank(RationalMatrix.from_rows(gens)) != len(gens):
            raise FanValidationError(f"cone {cone} has linearly dependent rays")
        if not is_unimodular_cone(gens, rank):
            raise FanValidationError(
                f"cone {cone} is not smooth: its rays do not extend to a lattice basis")
        if cone.ray_indices not in seen:
            seen.add(cone.ray_indices)
            listed.append(cone)

    # keep only inclusion-maximal listed cones; faces are recovered below
    maximal = [c for c in listed
               if not any(c is not o and c.index_set < o.index_set for o in listed)]
    maximal.sort(key=lambda c: c.ray_indices)

    covered = set()
    for c in maximal:
        covered |= c.index_set
    missing = sorted(set(range(1, d + 1)) - covered)
    if missing:
        raise FanValidationError(f"rays {missing} appear in no cone")

    faces: set[IntVec] = set()
    for c in maximal:
        for k in range(c.dim + 1):
            for sub in itertools.combinations(c.ray_indices, k):
                faces.add(sub)
    all_cones = tuple(Cone(f) for f in sorted(faces))

    _check_fan_condition(rank, tuple(ray_tuples), maximal)

    return Fan(rank, tuple(ray_tuples), tuple(maximal), all_cones)


def parse_fan(text: str) -> Fan:
    """Parse and validate a fan file (UTF-8 JSON)."""
    return parse_fan_file(text)[0]


def parse_fan_file(text: str) -> tuple[Fan, PolyhedronInput | None]:
    """Parse a fan file, returning the fan and the optional polyhedron."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FanParseError(f"not valid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise FanParseError("fan file must be a JSON object")
    for key in ("rank", "rays", "max_cones"):
        if key not in data:
            raise FanParseError(f"missing key {key!r}")
    fan = fan_from_data(data["rank"], data["rays"], data["max_cones"])
    poly = None
    if data.get("polyhedron") is not None:
        pdata = data["polyhedron"]
        if not isinstance(pdata, dict) or "vertices" not in pdata:
            raise FanParseError("polyhedron must be an object with a 'vertices' list")
        verts = [tuple(v) for v in pdata["vertices"]]
        rec = [tuple(r) for r in pdata.get("recession_rays", [])]
        if not verts:
            raise FanValidationError("polyhedron has no vertices")
        for v in verts + rec:
            if len(v) != fan.rank or not all(isinstance(x, int) for x in v):
                raise FanParseError("polyhedron entries must be integer vectors of fan rank")
        base = verts[0]
        spanning = [tuple(a - b for a, b in zip(v, base)) for v in verts[1:]] + list(rec)
        if not spanning or linalg.rank(RationalMatrix.from_rows(spanning)) != fan.rank:
            raise FanValidationError("polyhedron is not full-dimensional")
        poly = PolyhedronInput(tuple(verts), tuple(rec))
    return fan, poly


# -- combinatorial queries --------------------------------------------------


def primitive_collections(fan: Fan) -> tuple[IntVec, ...]:
    """Minimal ray sets lying in no cone while all proper subsets do.

    Returned as sorted tuples in lexicographic order.
    """
    d = fan.num_rays
    out: list[IntVec] = []
    for size in range(2, d + 1):
        for subset in itertools.combinations(range(1, d + 1), size):
            if fan.is_face(subset):
                continue
            if all(fan.is_face(subset[:i] + subset[i + 1:]) for i in range(size)):
                out.append(subset)
    return tuple(sorted(out))


def cone_of_simplex(fan: Fan, cover: Sequence[Cone], tau: Iterable[int]) -> Cone:
    """Intersection of the cover cones indexed by tau (1-based positions).

    By the fan condition the intersection of fan cones is the cone on
    their common rays.
    """
    tau = sorted(set(tau))
    if not tau:
        raise FanError("tau must be nonempty")
    common: frozenset[int] | None = None
    for i in tau:
        if not 1 <= i <= len(cover):
            raise FanError(f"cover index {i} out of range")
        s = cover[i - 1].index_set
        common = s if common is None else common & s
    return fan.cone(common)
