"""Stacky toric pairs, the four birational configurations, and divisor
bookkeeping (pullbacks, discrepancies, crepancy, iso classes of monomial
line bundles).

Ray labels follow the usual indexing of the configurations: the standard
basis vectors are rays ``1..n``, the relation vector ``v_{n+1} = (a_1..a_n)``
is ray ``n+1`` and the flip resolution adds ray ``n+2``.
"""

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from itertools import combinations
from math import ceil, gcd, lcm

from .errors import (
    BadInput,
    BadRange,
    ConfigMismatch,
    InvalidSigns,
    NotInCone,
    NotPrimitive,
    SupportError,
)
from .ratlat import (
    Cone,
    as_rat_vec,
    dot,
    dual_lattice,
    hnf,
    index_in,
    lattice_intersection,
    primitive,
    solve,
    standard_lattice,
)


class Case(enum.IntEnum):
    REWEIGHT = 1
    CONTRACTION = 2
    FLIP = 3
    INVERSE_CONTRACTION = 4


class Verdict(enum.Enum):
    STRICTLY_GREATER = "StrictlyGreater"
    EQUAL = "Equal"
    STRICTLY_LESS = "StrictlyLess"


def _verdict(x):
    if x > 0:
        return Verdict.STRICTLY_GREATER
    if x < 0:
        return Verdict.STRICTLY_LESS
    return Verdict.EQUAL


@dataclass(frozen=True)
class MonomialLineBundle:
    """Exponent numerators ``k_i``, one per ray, each over the ray's ``r_i``."""

    k: tuple

    def __post_init__(self):
        object.__setattr__(self, "k", tuple(int(x) for x in self.k))

    def __len__(self):
        return len(self.k)

    def __sub__(self, other):
        return MonomialLineBundle(tuple(a - b for a, b in zip(self.k, other.k)))


@dataclass(frozen=True)
class StackyFan:
    """Simplicial fan with ray multiplicities.

    ``rays[j]`` carries label ``labels[j]`` and multiplicity ``mults[j]``;
    maximal cones are frozensets of labels.  The lattice ``N`` defaults to
    ``Z^n``.
    """

    labels: tuple
    rays: tuple
    mults: tuple
    max_cones: tuple
    lattice: object = None

    def __post_init__(self):
        object.__setattr__(self, "rays", tuple(tuple(int(x) for x in v) for v in self.rays))
        object.__setattr__(self, "max_cones", tuple(frozenset(c) for c in self.max_cones))
        if self.lattice is None:
            object.__setattr__(self, "lattice", standard_lattice(self.ambient_rank))

    @property
    def ambient_rank(self):
        return len(self.rays[0]) if self.rays else 0

    def ray(self, label):
        return self.rays[self.labels.index(label)]

    def mult(self, label):
        return self.mults[self.labels.index(label)]

    def cone(self, labels):
        labels = sorted(labels)
        return Cone(tuple(self.ray(i) for i in labels))

    def boundary(self):
        """Coefficients ``1 - 1/r_i`` of the boundary divisor."""
        return {i: 1 - Fraction(1, r) for i, r in zip(self.labels, self.mults)}

    def chart_lattice(self, labels):
        """Covering lattice of a maximal cone: spanned by ``r_i v_i``."""
        return hnf([tuple(self.mult(i) * x for x in self.ray(i)) for i in sorted(labels)])

    def validate(self):
        n = self.ambient_rank
        for v in self.rays:
            if not primitive(v):
                raise BadInput(f"ray {v} is not primitive")
        if any(r <= 0 for r in self.mults):
            raise BadInput("multiplicities must be positive")
        for c in self.max_cones:
            if len(c) != n or not self.cone(c).simplicial:
                raise BadInput(f"cone {sorted(c)} is not simplicial of full dimension")
        for a, b in combinations(self.max_cones, 2):
            if not _meet_in_face(self, a, b):
                raise BadInput(f"cones {sorted(a)} and {sorted(b)} overlap improperly")
        return self


def _kernel_line(rows, n):
    """A nonzero vector orthogonal to ``rows`` (rank n-1), or None."""
    for j in range(n):
        # fix coordinate j to 1 and solve for the rest
        sub = [[row[c] for c in range(n) if c != j] for row in rows]
        rhs = [-row[j] for row in rows]
        if len(sub) != n - 1:
            return None
        x = solve(sub, rhs)
        if x is not None:
            x = list(x)
            x.insert(j, Fraction(1))
            return tuple(x)
    return None


def _facet_forms(cone):
    """Linear forms ``l_j`` with ``l_j(v_i) = delta_ij`` (barycentric coordinates)."""
    n = cone.dim
    return [solve([list(r) for r in cone.rays], [1 if i == j else 0 for i in range(n)])
            for j in range(n)]


def _meet_in_face(fan, a, b):
    """Exact check that two simplicial cones meet in their common face.

    Enumerates the extreme rays of the intersection (n-1 tight constraints
    out of 2n) and requires each to lie in the span of the shared rays.
    """
    n = fan.ambient_rank
    la, lb = sorted(a), sorted(b)
    fa, fb = _facet_forms(fan.cone(la)), _facet_forms(fan.cone(lb))
    forms = fa + fb
    outside = [fa[i] for i, lab in enumerate(la) if lab not in b]
    outside += [fb[i] for i, lab in enumerate(lb) if lab not in a]
    for tight in combinations(range(2 * n), n - 1):
        x = _kernel_line([forms[i] for i in tight], n) if n > 1 else (Fraction(1),)
        if x is None:
            continue
        for sign in (1, -1):
            y = tuple(sign * t for t in x)
            if all(dot(f, y) >= 0 for f in forms) and any(t != 0 for t in y):
                if any(dot(f, y) != 0 for f in outside):
                    return False
    return True


def orthant_fan(mults):
    n = len(mults)
    rays = tuple(tuple(1 if i == j else 0 for i in range(n)) for j in range(n))
    return StackyFan(tuple(range(1, n + 1)), rays, tuple(mults), (frozenset(range(1, n + 1)),))


@dataclass(frozen=True)
class BirationalConfig:
    """One of the four local configurations.

    ``a`` is ``(a_1..a_n)`` (empty for a reweighting), ``a_{n+1} = -1`` is
    implied.  ``r`` has length ``n`` for a reweighting and ``n+1`` otherwise.
    ``lam`` and ``v_res`` are only set for flips.
    """

    case: Case
    n: int
    n1: int
    n2: int
    a: tuple
    r: tuple
    s: tuple = ()
    lam: Fraction = None
    v_res: tuple = None

    @property
    def a_full(self):
        return self.a + (-1,)

    @property
    def v_exc(self):
        return self.a

    def rays(self):
        n = self.n
        out = {i + 1: tuple(1 if j == i else 0 for j in range(n)) for i in range(n)}
        if self.case != Case.REWEIGHT:
            out[n + 1] = tuple(self.a)
        if self.case == Case.FLIP:
            out[n + 2] = tuple(self.v_res)
        return out


def build_config(case, n, a=(), r=(), s=None, n1=None, n2=None):
    """Validate and complete a configuration.

    ``n1``/``n2`` (the counts of positive and non-negative leading entries of
    ``a``) are derived from ``a`` and only checked when given.
    """
    case = Case(case)
    a = tuple(int(x) for x in a)
    r = tuple(int(x) for x in r)
    if n < 1:
        raise BadRange("ambient rank must be positive")
    if any(x <= 0 for x in r):
        raise BadRange("multiplicities must be positive")
    if case == Case.REWEIGHT:
        s = tuple(int(x) for x in (s or ()))
        if len(r) != n or len(s) != n:
            raise BadRange("reweighting needs n multiplicities r and s")
        if any(x <= 0 for x in s):
            raise BadRange("multiplicities must be positive")
        if any(ri < si for ri, si in zip(r, s)):
            raise InvalidSigns("reweighting requires r_i >= s_i")
        return BirationalConfig(case, n, n, n, (), r, s)

    if len(a) != n:
        raise BadRange(f"a has length {len(a)}, expected {n}")
    if len(r) != n + 1:
        raise BadRange(f"r has length {len(r)}, expected {n + 1}")
    if s:
        raise BadRange("s is only used by reweightings")
    p = 0
    while p < n and a[p] > 0:
        p += 1
    q = p
    while q < n and a[q] == 0:
        q += 1
    tail = a[q:]
    if case == Case.FLIP:
        if any(x >= 0 for x in tail):
            raise InvalidSigns("flip needs a_i > 0, then a_i = 0, then a_i < 0")
        if p < 2 or q >= n:
            raise InvalidSigns("flip needs at least two positive and one negative a_i")
    else:
        if tail:
            raise InvalidSigns("divisorial contraction needs a_i > 0 then a_i = 0")
        if p < 2:
            raise InvalidSigns("divisorial contraction needs at least two positive a_i")
    if n1 is not None and n1 != p:
        raise BadRange(f"n' = {n1} does not match a (expected {p})")
    if n2 is not None and n2 != q:
        raise BadRange(f"n'' = {n2} does not match a (expected {q})")
    if not primitive(a):
        raise NotPrimitive(f"v_(n+1) = {a} is not primitive")
    lam = v_res = None
    if case == Case.FLIP:
        g = reduce(gcd, a[:p])
        lam = Fraction(1, g)
        v_res = tuple(x // g for x in a[:p]) + (0,) * (n - p)
    return BirationalConfig(case, n, p, q, a, r, (), lam, v_res)


def _config_fan(config, labels, mults, cones):
    rays = config.rays()
    return StackyFan(tuple(labels), tuple(rays[i] for i in labels), tuple(mults), tuple(cones))


def fans_of(config):
    """``(fan_X, fan_Y, fan_W)`` for a configuration.

    For contractions ``X`` is the blown-up side (rays ``1..n+1``) and the
    coarse space of ``W`` is ``X``.  The multiplicity recorded for the flip
    resolution ray ``n+2`` is the index of ``Z v_{n+2}`` in its saturation
    inside the first chart lattice of ``W``; the chart lattices themselves
    come from :func:`chart_lattices`.
    """
    n = config.n
    if config.case == Case.REWEIGHT:
        t = tuple(lcm(x, y) for x, y in zip(config.r, config.s))
        return orthant_fan(config.r), orthant_fan(config.s), orthant_fan(t)
    full = range(1, n + 2)
    r = config.r
    if config.case in (Case.CONTRACTION, Case.INVERSE_CONTRACTION):
        cones_x = [frozenset(full) - {i} for i in range(1, config.n1 + 1)]
        fan_x = _config_fan(config, full, r, cones_x)
        fan_y = _config_fan(config, range(1, n + 1), r[:n], [frozenset(range(1, n + 1))])
        return fan_x, fan_y, fan_x
    cones_x = [frozenset(full) - {i} for i in range(1, config.n1 + 1)]
    cones_y = [frozenset(full) - {i} for i in range(config.n2 + 1, n + 2)]
    cones_w = [
        (frozenset(full) - {i, j}) | {n + 2}
        for i in range(1, config.n1 + 1)
        for j in range(config.n2 + 1, n + 2)
    ]
    fan_x = _config_fan(config, full, r, cones_x)
    fan_y = _config_fan(config, full, r, cones_y)
    lats = chart_lattices(config)["W"]
    first = lats[min(lats)]
    v = config.v_res
    t = 1
    while tuple(t * x for x in v) not in first:
        t += 1
    fan_w = _config_fan(config, range(1, n + 3), r + (t,), cones_w)
    return fan_x, fan_y, fan_w


def chart_lattices(config):
    """Covering lattices ``N_chart`` keyed by side then chart.

    Charts are keyed by the omitted ray index (``i0``), by ``(i0, i1)`` for
    the flip resolution, and by ``None`` for single-cone sides.
    """
    n = config.n
    if config.case == Case.REWEIGHT:
        nx = orthant_fan(config.r).chart_lattice(range(1, n + 1))
        ny = orthant_fan(config.s).chart_lattice(range(1, n + 1))
        return {"X": {None: nx}, "Y": {None: ny}, "W": {None: lattice_intersection(nx, ny)}}
    rays = config.rays()
    r = dict(zip(range(1, n + 2), config.r))

    def span(labels):
        return hnf([tuple(r[i] * x for x in rays[i]) for i in sorted(labels)])

    full = frozenset(range(1, n + 2))
    n_i = {i: span(full - {i}) for i in range(1, n + 2) if config.a_full[i - 1] != 0}
    if config.case in (Case.CONTRACTION, Case.INVERSE_CONTRACTION):
        xs = {i: n_i[i] for i in range(1, config.n1 + 1)}
        ny = n_i[n + 1]
        return {
            "X": xs,
            "Y": {None: ny},
            "W": {i: lattice_intersection(xs[i], ny) for i in xs},
        }
    xs = {i: n_i[i] for i in range(1, config.n1 + 1)}
    ys = {i: n_i[i] for i in range(config.n2 + 1, n + 2)}
    ws = {(i, j): lattice_intersection(xs[i], ys[j]) for i in xs for j in ys}
    return {"X": xs, "Y": ys, "W": ws}


def chart_cone(config, side, key):
    """Rays (as a Cone) of a chart, matching :func:`chart_lattices` keys."""
    n = config.n
    rays = config.rays()
    if config.case == Case.REWEIGHT or key is None:
        labels = list(range(1, n + 1))
        return Cone(tuple(rays[i] for i in labels)), labels
    full = set(range(1, n + 2))
    if side == "W" and config.case == Case.FLIP:
        i0, i1 = key
        labels = sorted(full - {i0, i1}) + [n + 2]
    else:
        labels = sorted(full - {key})
    return Cone(tuple(rays[i] for i in labels)), labels


def pullback_divisor(config, divisor, side="Y"):
    """Pull a torus-invariant Q-divisor back along the configuration's maps.

    Contractions: ``f^* D'_i = D_i + a_i D_{n+1}`` from the base (side
    ``"Y"``) to the blown-up side.  Flips: ``side="X"`` applies ``mu^*`` and
    ``side="Y"`` applies ``nu^*`` into the common resolution ``W``.
    """
    n = config.n
    d = {int(i): Fraction(c) for i, c in divisor.items()}
    if config.case == Case.REWEIGHT:
        if any(i < 1 or i > n for i in d):
            raise SupportError("divisor must live on rays 1..n")
        return dict(d)
    if config.case in (Case.CONTRACTION, Case.INVERSE_CONTRACTION):
        if any(i < 1 or i > n for i in d):
            raise SupportError("divisor must be supported on the non-exceptional rays")
        out = dict(d)
        out[n + 1] = sum((config.a[i - 1] * c for i, c in d.items()), Fraction(0))
        return out
    if any(i < 1 or i > n + 1 for i in d):
        raise SupportError("divisor must be supported on rays 1..n+1")
    lam = config.lam
    a = config.a_full
    out = dict(d)
    if side == "X":
        exc = sum((c * lam * -a[i - 1] for i, c in d.items() if i > config.n2), Fraction(0))
    elif side == "Y":
        exc = sum((c * lam * a[i - 1] for i, c in d.items() if i <= config.n1), Fraction(0))
    else:
        raise ConfigMismatch(f"unknown side {side!r}")
    out[n + 2] = exc
    return out


def toric_pullback(fan, divisor, rays):
    """Pullback of a Q-divisor on a simplicial fan to arbitrary rays.

    Uses the piecewise-linear support function: on a maximal cone with
    barycentric coordinates ``w = sum lam_j v_j`` the coefficient of the
    divisor of ``w`` is ``sum lam_j c_j``.  ``rays`` maps labels to vectors.
    """
    out = {}
    for label, w in rays.items():
        w = as_rat_vec(w)
        for c in fan.max_cones:
            labs = sorted(c)
            lam = solve([[fan.ray(i)[row] for i in labs] for row in range(len(w))], w)
            if lam is not None and all(x >= 0 for x in lam):
                out[label] = sum(
                    (x * Fraction(divisor.get(i, 0)) for x, i in zip(lam, labs)), Fraction(0)
                )
                break
        else:
            raise NotInCone(f"ray {w} lies outside the support of the fan")
    return out


def log_canonical(fan):
    """``K + B = sum (-1/r_i) D_i`` (with ``K = -sum D_i``)."""
    return {i: Fraction(-1, r) for i, r in zip(fan.labels, fan.mults)}


def crepancy_compare(config):
    """Sign and value of the log-canonical comparison statistic.

    Contractions and flips: ``sum_{i<=n+1} a_i / r_i``.  Inverse
    contractions: ``1/r_{n+1} - sum_{i<=n} a_i / r_i``.  Reweightings:
    ``sum_i (1/s_i - 1/r_i)``.  ``EQUAL`` means log crepant.
    """
    if config.case == Case.REWEIGHT:
        diffs = [Fraction(1, s) - Fraction(1, r) for r, s in zip(config.r, config.s)]
        return _verdict(sum(diffs)), sum(diffs, Fraction(0))
    if config.case == Case.INVERSE_CONTRACTION:
        v = Fraction(1, config.r[-1]) - sum(
            (Fraction(a, r) for a, r in zip(config.a, config.r)), Fraction(0)
        )
        return _verdict(v), v
    v = sum((Fraction(a, r) for a, r in zip(config.a_full, config.r)), Fraction(0))
    return _verdict(v), v


@dataclass(frozen=True)
class DirectionReport:
    """Whether the configuration has the inequality the functor needs.

    For inverse contractions both readings of the bound are reported: the
    exceptional multiplicity ``1/r_{n+1}`` (used) and ``1/r_n``.
    """

    accepted: bool
    statistic: Fraction
    bound: Fraction
    alternate_bound: Fraction = None
    alternate_accepted: bool = None


def direction_check(config):
    verdict, value = crepancy_compare(config)
    if config.case == Case.INVERSE_CONTRACTION:
        stat = sum((Fraction(a, r) for a, r in zip(config.a, config.r)), Fraction(0))
        bound = Fraction(1, config.r[config.n])
        alt = Fraction(1, config.r[config.n - 1])
        return DirectionReport(stat <= bound, stat, bound, alt, stat <= alt)
    return DirectionReport(value >= 0, value, Fraction(0))


@dataclass(frozen=True)
class LedgerEntry:
    ray: tuple
    coefficients: tuple
    discrepancy: Fraction
    boundary: Fraction
    self_intersection: int = None

    @property
    def standard(self):
        """Whether the induced boundary coefficient has the form 1 - 1/r."""
        if self.boundary >= 1:
            return False
        return (1 / (1 - self.boundary)).denominator == 1


@dataclass(frozen=True)
class DiscrepancyLedger:
    entries: tuple
    lattice: object = None
    continued_fraction: tuple = ()

    @property
    def discrepancies(self):
        return [e.discrepancy for e in self.entries]


def discrepancy_of_ray(fan, w, cone, boundary=None):
    """Log discrepancy of the divisor of ``w`` over ``(X_fan, B)``.

    ``w = sum lam_i v_i`` over the rays of ``cone`` (labels) and the
    discrepancy is ``sum lam_i (1 - b_i) - 1``.  ``boundary`` maps labels to
    ``b_i`` and defaults to ``1 - 1/r_i``.
    """
    b = fan.boundary() if boundary is None else {i: Fraction(x) for i, x in boundary.items()}
    lam = _cone_coefficients(fan, w, cone)
    return sum((x * (1 - b.get(i, 0)) for x, i in zip(lam, sorted(cone))), Fraction(0)) - 1


def _cone_coefficients(fan, w, cone):
    labs = sorted(cone)
    w = as_rat_vec(w)
    n = len(w)
    rows = [[fan.ray(i)[row] for i in labs] for row in range(n)]
    if len(labs) == n:
        lam = solve(rows, w)
    else:
        # least-index square subsystem, then verify the full system
        lam = None
        for idx in combinations(range(n), len(labs)):
            lam = solve([rows[i] for i in idx], [w[i] for i in idx])
            if lam is not None:
                break
        if lam is not None and any(
            sum(rows[i][j] * lam[j] for j in range(len(labs))) != w[i] for i in range(n)
        ):
            lam = None
    if lam is None or any(x < 0 for x in lam):
        raise NotInCone(f"{w} is not in the cone {labs}")
    return lam


def ramified_discrepancy(a, e):
    """Discrepancy upstairs of a cover ramified with index ``e``: ``a e + e - 1``."""
    if e < 1:
        raise BadInput("ramification index must be positive")
    b = Fraction(a) * e + (e - 1)
    assert (b > -1) == (Fraction(a) > -1)
    return b


def hj_continued_fraction(n, q):
    digits = []
    x = Fraction(n, q)
    while True:
        b = ceil(x)
        digits.append(b)
        if b == x:
            return tuple(digits)
        x = 1 / (b - x)


def hj_resolution(n, q):
    """Minimal resolution of ``C^2 / Z_n(1, q)``.

    Exceptional rays come from ``u_0 = e_2``, ``u_1 = (1/n)(1, q)``,
    ``u_{i+1} = b_i u_i - u_{i-1}`` with ``n/q = [b_1, ..., b_s]``; the
    recursion ends at ``e_1``.  Self-intersections are ``-b_i``.
    """
    if not (0 < q < n) or gcd(n, q) != 1:
        raise BadInput(f"need 0 < q < n coprime, got ({n}, {q})")
    digits = hj_continued_fraction(n, q)
    lat = hnf([(1, 0), (0, 1), (Fraction(1, n), Fraction(q, n))])
    prev, cur = (Fraction(0), Fraction(1)), (Fraction(1, n), Fraction(q, n))
    rays = []
    for b in digits:
        rays.append(cur)
        prev, cur = cur, tuple(b * x - y for x, y in zip(cur, prev))
    if cur != (1, 0):
        raise AssertionError(f"recursion ended at {cur}, not e_1")
    fan = orthant_fan((1, 1))
    entries = []
    for u, b in zip(rays, digits):
        lam = _cone_coefficients(fan, u, {1, 2})
        a = discrepancy_of_ray(fan, u, {1, 2}, boundary={1: 0, 2: 0})
        entries.append(LedgerEntry(u, tuple(lam), a, -a, -b))
    return DiscrepancyLedger(tuple(entries), lat, digits)


def resolution_is_smooth(ledger):
    """Consecutive rays ``e_2, u_1, ..., u_s, e_1`` pairwise form bases of N."""
    seq = [(Fraction(0), Fraction(1))] + [e.ray for e in ledger.entries] + [(Fraction(1), Fraction(0))]
    return all(index_in(hnf([u, v]), ledger.lattice) == 1 for u, v in zip(seq, seq[1:]))


def cone_index(fan, labels):
    """Index of the sublattice spanned by a cone's rays inside ``N``."""
    return index_in(hnf([fan.ray(i) for i in sorted(labels)]), fan.lattice)


def weighted_blowup(weights, mults=(1, 1, 1)):
    """Plane fan subdivided at ``weights``; the new ray gets label 3."""
    w = tuple(weights)
    return StackyFan((1, 2, 3), ((1, 0), (0, 1), w), tuple(mults), ({1, 3}, {2, 3}))


def iso_equivalent(fan, bundle, other):
    """``m`` in ``M`` with ``(k_i - k'_i)/r_i = <m, v_i>`` for every ray, or None."""
    delta = [Fraction(x - y, r) for x, y, r in zip(bundle.k, other.k, fan.mults)]
    n = fan.ambient_rank
    if n == 0:
        return () if all(x == 0 for x in delta) else None
    m = None
    for idx in combinations(range(len(fan.rays)), n):
        m = solve([list(fan.rays[i]) for i in idx], [delta[i] for i in idx])
        if m is not None:
            break
    if m is None:
        return None
    if any(dot(m, v) != d for v, d in zip(fan.rays, delta)):
        return None
    if m not in dual_lattice(fan.lattice):
        return None
    return m


def relation_rows(fan):
    """Generators ``(r_i <m, v_i>)_i`` of the principal relation lattice."""
    if fan.ambient_rank == 0:
        return []
    dual = dual_lattice(fan.lattice)
    rows = []
    for m in dual.basis():
        row = [r * dot(m, v) for v, r in zip(fan.rays, fan.mults)]
        rows.append([int(x) for x in row])
    return rows


def _row_hnf(rows, width):
    """Row-style integer echelon form with reduced entries above pivots."""
    rows = [list(r) for r in rows if any(r)]
    out = []
    col = 0
    while rows and col < width:
        while True:
            nz = [r for r in rows if r[col] != 0]
            if len(nz) <= 1:
                break
            p = min(nz, key=lambda r: abs(r[col]))
            for r in nz:
                if r is not p:
                    q = r[col] // p[col]
                    r[:] = [x - q * y for x, y in zip(r, p)]
        piv = next((r for r in rows if r[col] != 0), None)
        if piv is not None:
            rows.remove(piv)
            if piv[col] < 0:
                piv[:] = [-x for x in piv]
            for r in out:
                q = r[col] // piv[col]
                r[:] = [x - q * y for x, y in zip(r, piv)]
            out.append(piv)
        rows = [r for r in rows if any(r)]
        col += 1
    return out


@dataclass(frozen=True)
class _Reducer:
    pivots: tuple  # (column, row) pairs in the reversed coordinates
    width: int

    def reduce(self, k):
        v = list(reversed(k))
        for col, row in self.pivots:
            q = v[col] // row[col]
            if q:
                v = [x - q * y for x, y in zip(v, row)]
        return tuple(reversed(v))


def relation_reducer(fan):
    """HNF of the relation lattice with coordinates reversed.

    Pivots therefore sit on the last rays, and reduced representatives keep
    their free part on the first rays.
    """
    width = len(fan.rays)
    rows = [list(reversed(r)) for r in relation_rows(fan)]
    echelon = _row_hnf(rows, width)
    pivots = []
    for row in echelon:
        col = next(c for c, x in enumerate(row) if x != 0)
        pivots.append((col, tuple(row)))
    return _Reducer(tuple(pivots), width)


def normal_form(fan, bundle, reducer=None):
    """Canonical representative of the iso class of ``bundle``."""
    reducer = reducer or relation_reducer(fan)
    return MonomialLineBundle(reducer.reduce(bundle.k))
