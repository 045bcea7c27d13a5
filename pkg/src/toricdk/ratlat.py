"""Exact lattice algebra over Z and Q.

Lattices are stored as ``(1/d) * H * Z^n`` with ``H`` in column Hermite
normal form: lower triangular, positive diagonal, and every entry left of
the diagonal reduced into ``[0, H[i][i])``.  Two lattices are equal exactly
when their stored data are equal.

The module also carries the brute-force oracles used to check the closed
formulas elsewhere: enumeration of lattice points in ray-coordinate boxes,
minimal elements of shifted cones, and minimal generators of monomial
modules.
"""

from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from itertools import combinations
from math import ceil, floor, gcd, lcm, prod

from .errors import (
    BadInput,
    BoxTooSmall,
    NotContained,
    NotFullRank,
    NotPrincipal,
    RankMismatch,
)

__all__ = [
    "Cone",
    "Lattice",
    "as_rat_vec",
    "contains",
    "dot",
    "dual_lattice",
    "enumerate_box",
    "hilbert_basis",
    "hilbert_module_generators",
    "hnf",
    "index_in",
    "lattice_intersection",
    "lattice_sum",
    "min_shifted_generator",
    "minimal_elements",
    "module_generators",
    "primitive",
    "solve",
    "standard_lattice",
]

MAX_BOX_RETRIES = 4


def as_rat_vec(v):
    return tuple(Fraction(x) for x in v)


def dot(u, v):
    return sum((a * b for a, b in zip(u, v)), Fraction(0))


def primitive(v):
    """True if the integer vector ``v`` has coprime entries."""
    return reduce(gcd, (int(x) for x in v), 0) == 1


def solve(matrix, rhs):
    """Solve ``matrix @ x = rhs`` over Q; ``matrix`` is a list of rows.

    Returns None when the system is singular.
    """
    n = len(matrix)
    aug = [[Fraction(x) for x in row] + [Fraction(b)] for row, b in zip(matrix, rhs)]
    for col in range(n):
        piv = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if piv is None:
            return None
        aug[col], aug[piv] = aug[piv], aug[col]
        p = aug[col][col]
        aug[col] = [x / p for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
    return tuple(row[n] for row in aug)


def _inverse(matrix):
    n = len(matrix)
    cols = [solve(matrix, [1 if i == j else 0 for i in range(n)]) for j in range(n)]
    if any(c is None for c in cols):
        return None
    return [[cols[j][i] for j in range(n)] for i in range(n)]


@dataclass(frozen=True)
class Lattice:
    """The lattice ``(1/denom) * span_Z(columns)`` inside ``Q^n``.

    ``columns`` holds the HNF basis vectors; column ``j`` vanishes above
    row ``j``.  Build instances with :func:`hnf`, not directly.
    """

    columns: tuple
    denom: int = 1

    @property
    def rank(self):
        return len(self.columns)

    @property
    def ambient_rank(self):
        return len(self.columns)

    @property
    def is_integral(self):
        return self.denom == 1

    def basis(self):
        return [tuple(Fraction(x, self.denom) for x in c) for c in self.columns]

    def row_matrix(self):
        """HNF as a list of rows (lower triangular)."""
        n = self.rank
        return [[self.columns[j][i] for j in range(n)] for i in range(n)]

    def det(self):
        return Fraction(prod(c[i] for i, c in enumerate(self.columns)), self.denom**self.rank)

    def coordinates(self, m):
        """Integer coordinates of ``m`` in the HNF basis, or None."""
        m = as_rat_vec(m)
        if len(m) != self.rank:
            raise RankMismatch(f"vector of length {len(m)} in rank {self.rank} lattice")
        z = []
        for i in range(self.rank):
            acc = self.denom * m[i] - sum(self.columns[j][i] * z[j] for j in range(i))
            q = acc / self.columns[i][i]
            if q.denominator != 1:
                return None
            z.append(int(q))
        return tuple(z)

    def __contains__(self, m):
        return self.coordinates(m) is not None

    def point(self, z):
        n = self.rank
        return tuple(
            Fraction(sum(self.columns[j][i] * z[j] for j in range(n)), self.denom)
            for i in range(n)
        )

    def image(self, rows):
        """The lattice ``A * self`` for a square invertible rational matrix ``A``."""
        gens = []
        for v in self.basis():
            gens.append(tuple(dot(row, v) for row in rows))
        return hnf(gens)


def standard_lattice(n):
    return hnf([[1 if i == j else 0 for i in range(n)] for j in range(n)])


def diagonal_lattice(entries):
    """``diag(entries) * Z^n`` for positive rational entries."""
    n = len(entries)
    return hnf(
        [[Fraction(entries[j]) if i == j else 0 for i in range(n)] for j in range(n)]
    )


def hnf(generators):
    """Canonical lattice spanned by integer or rational ``generators``.

    Raises NotFullRank unless the generators span a full-rank lattice.
    """
    gens = [as_rat_vec(g) for g in generators]
    if not gens:
        raise NotFullRank("no generators")
    n = len(gens[0])
    if any(len(g) != n for g in gens):
        raise RankMismatch("generators of different lengths")
    if n == 0:
        return Lattice((), 1)
    d = lcm(*(x.denominator for g in gens for x in g))
    cols = [[int(x * d) for x in g] for g in gens]
    k = len(cols)
    for i in range(n):
        while True:
            nz = [j for j in range(i, k) if cols[j][i] != 0]
            if not nz:
                raise NotFullRank(f"generators do not span row {i}")
            p = min(nz, key=lambda j: abs(cols[j][i]))
            if len(nz) == 1:
                break
            for j in nz:
                if j != p:
                    q = cols[j][i] // cols[p][i]
                    cols[j] = [a - q * b for a, b in zip(cols[j], cols[p])]
        cols[i], cols[p] = cols[p], cols[i]
        if cols[i][i] < 0:
            cols[i] = [-a for a in cols[i]]
        piv = cols[i][i]
        for j in range(i):
            q = cols[j][i] // piv
            if q:
                cols[j] = [a - q * b for a, b in zip(cols[j], cols[i])]
    cols = cols[:n]
    g = reduce(gcd, (x for c in cols for x in c), d)
    return Lattice(tuple(tuple(x // g for x in c) for c in cols), d // g)


def _same_rank(a, b):
    if a.rank != b.rank:
        raise RankMismatch(f"ranks {a.rank} and {b.rank}")


def lattice_sum(a, b):
    _same_rank(a, b)
    return hnf(a.basis() + b.basis())


def dual_lattice(lat):
    """``{m : <m, v> in Z for all v in lat}``."""
    n = lat.rank
    inv_t = _inverse([list(v) for v in lat.basis()])
    if inv_t is None:
        raise NotFullRank("singular lattice")
    # columns of inv(B^T) form the dual basis
    return hnf([tuple(inv_t[i][j] for i in range(n)) for j in range(n)])


def lattice_intersection(a, b):
    _same_rank(a, b)
    return dual_lattice(lattice_sum(dual_lattice(a), dual_lattice(b)))


def contains(lat, m):
    return m in lat


def index_in(a, b):
    """Group index ``[b : a]``; requires ``a`` to be a sublattice of ``b``."""
    _same_rank(a, b)
    for v in a.basis():
        if v not in b:
            raise NotContained(f"{v} not in the larger lattice")
    q = a.det() / b.det()
    assert q.denominator == 1
    return abs(int(q))


@dataclass(frozen=True)
class Cone:
    """Cone generated by integer rays in ``R^n``."""

    rays: tuple

    def __post_init__(self):
        object.__setattr__(self, "rays", tuple(tuple(int(x) for x in r) for r in self.rays))

    @property
    def dim(self):
        return len(self.rays[0]) if self.rays else 0

    @property
    def simplicial(self):
        return len(self.rays) == self.dim and solve(
            [list(r) for r in self.rays], [0] * self.dim
        ) is not None

    def check_simplicial(self):
        for r in self.rays:
            if not primitive(r):
                raise BadInput(f"ray {r} is not primitive")
        if not self.simplicial:
            raise BadInput("cone is not simplicial and full-dimensional")

    def values(self, m):
        """Ray-coordinate chart: ``(<m, v_i>)_i``."""
        return tuple(dot(m, r) for r in self.rays)

    def from_values(self, y):
        """Inverse of :meth:`values` on a simplicial full-dimensional cone."""
        x = solve([list(r) for r in self.rays], y)
        if x is None:
            raise BadInput("cone is not simplicial and full-dimensional")
        return x

    def in_dual(self, m):
        return all(v >= 0 for v in self.values(m))


def _axis_exponents(lat):
    """Smallest ``t_i > 0`` with ``t_i e_i`` in ``lat``."""
    rows = lat.row_matrix()
    inv = _inverse(rows)
    out = []
    for i in range(lat.rank):
        col = [inv[r][i] for r in range(lat.rank)]
        s = lcm(*(x.denominator for x in col))
        out.append(Fraction(s, lat.denom))
    return out


def enumerate_box(lat, lo, hi):
    """Yield every point of ``lat`` with ``lo <= x <= hi`` coordinatewise.

    Points come out in lexicographic order of their HNF coordinates.
    """
    n = lat.rank
    cols, d = lat.columns, lat.denom
    lo = as_rat_vec(lo)
    hi = as_rat_vec(hi)
    z = [0] * n

    def rec(i):
        if i == n:
            yield lat.point(z)
            return
        p = sum(cols[j][i] * z[j] for j in range(i))
        h = cols[i][i]
        a = ceil((d * lo[i] - p) / h)
        b = floor((d * hi[i] - p) / h)
        for t in range(a, b + 1):
            z[i] = t
            yield from rec(i + 1)

    yield from rec(0)


def minimal_elements(points):
    """Minimal elements under the coordinatewise partial order."""
    pts = sorted(set(points), key=lambda p: (sum(p), p))
    mins = []
    for p in pts:
        if not any(all(a <= b for a, b in zip(q, p)) for q in mins):
            mins.append(p)
    return mins


def _chart_search(shift_values, cone, lat, box, constraints):
    """Minimal points of the shifted cone in ray-coordinates, within ``box``."""
    chart_lat = lat.image([list(r) for r in cone.rays])
    n = cone.dim
    extra = []
    for w, t in constraints:
        # <x, w> = <y, V^{-1} w> with y the chart values of x
        extra.append((solve([[r[i] for r in cone.rays] for i in range(n)], w), Fraction(t)))
    widths = [Fraction(box)] * n if box is not None else _axis_exponents(chart_lat)
    for attempt in range(MAX_BOX_RETRIES + 1):
        hi = [s + w for s, w in zip(shift_values, widths)]
        found = [
            y
            for y in enumerate_box(chart_lat, shift_values, hi)
            if all(dot(y, c) >= t for c, t in extra)
        ]
        if found:
            return minimal_elements(found), widths
        widths = [2 * w for w in widths]
    raise BoxTooSmall("no lattice point found in the search box", widths=widths)


def min_shifted_generator(m, cone, lat, box=None, constraints=()):
    """Unique minimal element of ``(m + dual cone) ∩ lat``.

    ``cone`` must be simplicial and full-dimensional.  The partial order is
    the one induced by the dual cone, which in ray coordinates is the
    coordinatewise order, so the search runs over lattice points with chart
    values in ``[<m, v_i>, <m, v_i> + box]``.  With ``box=None`` the width on
    each axis is the smallest positive multiple of that axis contained in
    the chart lattice, which always contains every minimal element.

    ``constraints`` adds half-spaces ``<x, w> >= t``.  A principal module
    returns its generator; otherwise NotPrincipal carries the antichain.
    """
    cone.check_simplicial()
    m = as_rat_vec(m)
    mins, _ = _chart_search(cone.values(m), cone, lat, box, constraints)
    points = [cone.from_values(y) for y in mins]
    if len(points) > 1:
        raise NotPrincipal("module has several minimal generators", antichain=points)
    return points[0]


def _polytope_points(rays, thresholds, lat, width):
    """Points of ``lat`` with ``t_i <= <x, v_i> <= t_i + width`` for every ray."""
    n = len(rays[0])
    basis_rows = None
    for combo in _independent_subsets(rays, n):
        basis_rows = combo
        break
    if basis_rows is None:
        raise BadInput("rays do not span the ambient space")
    sub = Cone(tuple(rays[i] for i in basis_rows))
    chart_lat = lat.image([list(r) for r in sub.rays])
    lo = [thresholds[i] for i in basis_rows]
    hi = [thresholds[i] + width for i in basis_rows]
    for y in enumerate_box(chart_lat, lo, hi):
        x = sub.from_values(y)
        vals = [dot(x, r) for r in rays]
        if all(t <= v <= t + width for v, t in zip(vals, thresholds)):
            yield x, vals


def _independent_subsets(rays, n):
    for idx in combinations(range(len(rays)), n):
        if solve([list(rays[i]) for i in idx], [0] * n) is not None:
            yield idx


def module_generators(rays, thresholds, lat, ring_lattice, box=None):
    """Minimal generators of ``{x in lat : <x, v_i> >= t_i}``.

    The acting monoid is ``{s in ring_lattice : <s, v_i> >= 0}``; a module
    element is a generator when it is not another module element plus a
    nonzero monoid element.  The search covers chart values up to
    ``t_i + box``; a generator in the upper half of that window signals a
    window that may be too small, which triggers doubling (up to four
    times) when ``box`` is None and BoxTooSmall otherwise.
    """
    rays = [tuple(int(x) for x in r) for r in rays]
    thresholds = [Fraction(t) for t in thresholds]
    width = Fraction(box) if box is not None else Fraction(2)
    retries = MAX_BOX_RETRIES if box is None else 0
    for _ in range(retries + 1):
        pts = list(_polytope_points(rays, thresholds, lat, width))
        gens = []
        for x, vals in pts:
            reducible = False
            for y, wvals in pts:
                if y != x and all(b <= a for a, b in zip(vals, wvals)):
                    diff = tuple(a - b for a, b in zip(x, y))
                    if diff in ring_lattice:
                        reducible = True
                        break
            if not reducible:
                gens.append((x, vals))
        if not gens:
            width *= 2
            continue
        touching = any(v - t > width / 2 for _, vals in gens for v, t in zip(vals, thresholds))
        if not touching:
            return sorted(x for x, _ in gens)
        width *= 2
    raise BoxTooSmall("module generators reach the search window boundary", width=width)


def hilbert_module_generators(shift, cone, lat, ring_lattice, box=None):
    """Minimal generators of ``(shift + dual cone) ∩ lat`` over the monoid ring.

    ``cone`` only needs to be full-dimensional.
    """
    thresholds = cone.values(as_rat_vec(shift))
    return module_generators(cone.rays, thresholds, lat, ring_lattice, box)


def hilbert_basis(cone, lat, box=None):
    """Irreducible nonzero elements of the monoid ``dual cone ∩ lat``."""
    rays = [tuple(r) for r in cone.rays]
    zeros = [Fraction(0)] * len(rays)
    width = Fraction(box) if box is not None else Fraction(2)
    retries = MAX_BOX_RETRIES if box is None else 0
    origin = tuple(Fraction(0) for _ in range(cone.dim))
    for _ in range(retries + 1):
        pts = {x: vals for x, vals in _polytope_points(rays, zeros, lat, width) if x != origin}
        basis = []
        for p in pts:
            if not any(tuple(a - b for a, b in zip(p, q)) in pts for q in pts):
                basis.append(p)
        if basis and not any(v > width / 2 for p in basis for v in pts[p]):
            return sorted(basis)
        width *= 2
    raise BoxTooSmall("Hilbert basis reaches the search window boundary", width=width)
