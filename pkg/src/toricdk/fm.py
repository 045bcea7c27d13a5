"""The functor ``F = pushforward . pullback`` on monomial line bundles.

Conventions per configuration (numerators ``k_i`` always sit over the ray
multiplicity):

* reweighting and contraction: the numerators are the exponents of the
  local generator ``m = sum k_i / r_i v_i^*``, so the bundle is
  ``O(-sum k_i/r_i D_i)``; the bundle lives on ``Y`` and ``F`` lands on ``X``.
* flip: ``L = O_Y(sum k_i/r_i D'_i)``, ``F(L)`` lives on ``X``.
* inverse contraction: ``L = O_X(sum k_i/r_i D_i)`` on the blown-up side,
  ``F(L)`` lives on the base ``Y``.
"""

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from math import ceil, floor

import numpy as np

from . import kernels
from .errors import BadStratum, ConfigMismatch, OutOfRange, WrongDirection
from .ratlat import dot, dual_lattice, min_shifted_generator
from .stacky import (
    Case,
    MonomialLineBundle,
    chart_cone,
    chart_lattices,
    direction_check,
    fans_of,
)

DIRECTIONS = {
    Case.REWEIGHT: ("Y", "X"),
    Case.CONTRACTION: ("Y", "X"),
    Case.FLIP: ("Y", "X"),
    Case.INVERSE_CONTRACTION: ("X", "Y"),
}


@dataclass(frozen=True)
class FmResult:
    """Image of a monomial line bundle.

    ``charts`` maps a chart key of the target side to the local generator
    (a rational vector in ``M_Q``); ``certificate`` holds the exact values
    that justify the computation.
    """

    source: MonomialLineBundle
    target: MonomialLineBundle
    charts: dict
    in_range: bool = True
    certificate: dict = field(default_factory=dict)
    direction: tuple = ("Y", "X")


def _require(config, *cases):
    if config.case not in cases:
        raise ConfigMismatch(f"operation needs case {'/'.join(str(int(c)) for c in cases)}")


def _check_length(bundle, size):
    if len(bundle.k) != size:
        raise ConfigMismatch(f"bundle has {len(bundle.k)} numerators, expected {size}")


def source_size(config):
    n = config.n
    if config.case == Case.REWEIGHT:
        return n
    if config.case == Case.CONTRACTION:
        return n
    return n + 1


def fm_case1(m_num, config):
    """Generator of ``(m + dual cone) ∩ M_X`` for ``m = sum m_i/s_i v_i^*``.

    ``F_i = ceil(m_i r_i / s_i)`` over ``r_i``.
    """
    _require(config, Case.REWEIGHT)
    m_num = tuple(int(x) for x in getattr(m_num, "k", m_num))
    if len(m_num) != config.n:
        raise ConfigMismatch("need one numerator per ray")
    f = tuple(ceil(Fraction(m * r, s)) for m, r, s in zip(m_num, config.r, config.s))
    gen = tuple(Fraction(x, r) for x, r in zip(f, config.r))
    return FmResult(MonomialLineBundle(m_num), MonomialLineBundle(f), {None: gen})


def ceiling_identity_check(r, s, m, m_prime):
    """``ceil((m-m')/s) == ceil((ceil(m r/s) - ceil(m' r/s)) / r)`` componentwise."""
    r, s, m, m_prime = (tuple(x) if isinstance(x, (list, tuple)) else (x,) for x in (r, s, m, m_prime))
    for ri, si, a, b in zip(r, s, m, m_prime):
        lhs = ceil(Fraction(a - b, si))
        rhs = ceil(Fraction(ceil(Fraction(a * ri, si)) - ceil(Fraction(b * ri, si)), ri))
        if lhs != rhs:
            return False
    return True


def exceptional_numerator(config, k):
    """``k_{n+1} = ceil(r_{n+1} sum a_i k_i / r_i)``."""
    s = sum((Fraction(a * x, r) for a, x, r in zip(config.a, k, config.r)), Fraction(0))
    return ceil(config.r[-1] * s)


def fm_case2(bundle, config):
    """Image on the blown-up side of a bundle on the base of a contraction."""
    _require(config, Case.CONTRACTION)
    _check_length(bundle, config.n)
    if not direction_check(config).accepted:
        raise WrongDirection("contraction needs sum a_i/r_i >= 0 (i <= n+1)")
    n, a, r = config.n, config.a, config.r
    k = bundle.k
    k_exc = exceptional_numerator(config, k)
    charts = {}
    for i0 in range(1, config.n1 + 1):
        j = i0 - 1
        gen = [Fraction(k[i], r[i]) if i != j else Fraction(0) for i in range(n)]
        rest = sum((Fraction(a[i] * k[i], a[j] * r[i]) for i in range(n) if i != j), Fraction(0))
        gen[j] = Fraction(k_exc, a[j] * r[n]) - rest
        charts[i0] = tuple(gen)
    target = MonomialLineBundle(k + (k_exc,))
    return FmResult(bundle, target, charts, True, {"k_exc": k_exc})


def range_bound(config):
    if config.case == Case.FLIP:
        return -sum(
            (Fraction(a, r) for a, r in zip(config.a_full[config.n2:], config.r[config.n2:])),
            Fraction(0),
        )
    if config.case == Case.INVERSE_CONTRACTION:
        return sum((Fraction(a, r) for a, r in zip(config.a, config.r)), Fraction(0))
    raise ConfigMismatch("range windows exist only for flips and inverse contractions")


def range_statistic(config, k):
    s = sum((Fraction(a * x, r) for a, x, r in zip(config.a_full, k, config.r)), Fraction(0))
    return s if config.case == Case.FLIP else -s


def range_check(bundle, config):
    """``(in window, statistic)`` for the flip or inverse-contraction window."""
    _require(config, Case.FLIP, Case.INVERSE_CONTRACTION)
    k = getattr(bundle, "k", bundle)
    _check_length(MonomialLineBundle(k), config.n + 1)
    stat = range_statistic(config, k)
    return 0 <= stat < range_bound(config), stat


def _local_generator(cone, labels, values):
    return cone.from_values([values[i] for i in labels])


def fm_case3(bundle, config):
    """Image on ``X`` of an in-window bundle on ``Y`` across a flip."""
    _require(config, Case.FLIP)
    ok, stat = range_check(bundle, config)
    bound = range_bound(config)
    if not ok:
        raise OutOfRange(f"statistic {stat} outside [0, {bound})", statistic=stat, bound=bound)
    if not direction_check(config).accepted:
        raise WrongDirection("flip needs sum a_i/r_i >= 0")
    k, r = bundle.k, config.r
    values = {i + 1: Fraction(-k[i], r[i]) for i in range(config.n + 1)}
    charts = {}
    for i0 in range(1, config.n1 + 1):
        cone, labels = chart_cone(config, "X", i0)
        charts[i0] = _local_generator(cone, labels, values)
    w_coeff = config.lam * sum(
        (Fraction(config.a[i] * k[i], r[i]) for i in range(config.n1)), Fraction(0)
    )
    cert = {"statistic": stat, "bound": bound, "w_coefficient": w_coeff}
    return FmResult(bundle, MonomialLineBundle(k), charts, True, cert)


def fm_case4(bundle, config):
    """Image on the base of an in-window bundle on the blown-up side."""
    _require(config, Case.INVERSE_CONTRACTION)
    ok, stat = range_check(bundle, config)
    bound = range_bound(config)
    if not ok:
        raise OutOfRange(f"statistic {stat} outside [0, {bound})", statistic=stat, bound=bound)
    report = direction_check(config)
    if not report.accepted:
        raise WrongDirection(
            f"sum a_i/r_i = {report.statistic} exceeds 1/r_(n+1) = {report.bound}"
        )
    k, r = bundle.k, config.r
    gen = tuple(Fraction(-k[i], r[i]) for i in range(config.n))
    cert = {"statistic": stat, "bound": bound}
    return FmResult(bundle, MonomialLineBundle(k[: config.n]), {None: gen}, True, cert, ("X", "Y"))


def apply_functor(bundle, config):
    if not isinstance(bundle, MonomialLineBundle):
        bundle = MonomialLineBundle(bundle)
    return {
        Case.REWEIGHT: fm_case1,
        Case.CONTRACTION: fm_case2,
        Case.FLIP: fm_case3,
        Case.INVERSE_CONTRACTION: fm_case4,
    }[config.case](bundle, config)


# independent route: push forward the pulled-back module chart by chart


def chart_oracle(bundle, config, box=None):
    """Per-chart generators of ``F(L)`` by brute-force lattice search.

    Works from the definition: the pullback is generated on each chart of
    the common cover by the source generator, and the pushforward on a
    target chart is the intersection of those modules with the target chart
    lattice.  Its minimal element is found by ``min_shifted_generator``.
    """
    k = bundle.k
    n = config.n
    if config.case == Case.REWEIGHT:
        lats = chart_lattices(config)
        m = tuple(Fraction(x, s) for x, s in zip(k, config.s))
        cone, _ = chart_cone(config, "X", None)
        return {None: min_shifted_generator(m, cone, dual_lattice(lats["X"][None]), box)}
    if config.case == Case.CONTRACTION:
        lats = chart_lattices(config)
        m = tuple(Fraction(x, r) for x, r in zip(k, config.r))
        out = {}
        for i0, lat in lats["X"].items():
            cone, _ = chart_cone(config, "X", i0)
            out[i0] = min_shifted_generator(m, cone, dual_lattice(lat), box)
        return out
    rays = config.rays()
    if config.case == Case.FLIP:
        lats = chart_lattices(config)
        src = {}
        for i1 in lats["Y"]:
            cone, labels = chart_cone(config, "Y", i1)
            src[i1] = cone.from_values([Fraction(-k[i - 1], config.r[i - 1]) for i in labels])
        out = {}
        for i0, lat in lats["X"].items():
            pieces = []
            for i1, g in src.items():
                _, wlabels = chart_cone(config, "W", (i0, i1))
                pieces += [(rays[j], dot(g, rays[j])) for j in wlabels]
            out[i0] = _pushforward(pieces, *chart_cone(config, "X", i0), dual_lattice(lat), box)
        return out
    lats = chart_lattices(config)
    pieces = []
    for i0 in lats["X"]:
        cone, labels = chart_cone(config, "X", i0)
        g = cone.from_values([Fraction(-k[i - 1], config.r[i - 1]) for i in labels])
        pieces += [(rays[j], dot(g, rays[j])) for j in labels]
    cone, labels = chart_cone(config, "Y", None)
    return {None: _pushforward(pieces, cone, labels, dual_lattice(lats["Y"][None]), box)}


def _pushforward(pieces, cone, labels, lat, box):
    """Minimal element of ``{u in lat : <u, w> >= t for (w, t) in pieces}``."""
    shift = {}
    extra = []
    rays = [tuple(r) for r in cone.rays]
    for w, t in pieces:
        if tuple(w) in rays:
            j = rays.index(tuple(w))
            shift[j] = max(shift.get(j, t), t)
        else:
            extra.append((w, t))
    values = [shift[j] for j in range(len(rays))]
    m = cone.from_values(values)
    return min_shifted_generator(m, cone, lat, box, constraints=extra)


# graded Hom comparison


class HomVerdict(enum.Enum):
    BIJECTIVE = "Bijective"
    INJECTIVE_ONLY = "InjectiveOnly"
    MISMATCH = "Mismatch"


@dataclass
class GradedHomReport:
    """Degree-by-degree comparison of two Hom modules inside ``[-box, box]^n``.

    ``counts[(src, tgt)]`` counts degrees by their pair of dimensions and
    ``mismatches`` lists one degree per kind of disagreement.  ``rows()``
    regenerates the full table.
    """

    box: int
    counts: dict
    mismatches: list
    verdict: HomVerdict
    halfspaces: tuple = ()
    n_source: int = 0

    def rows(self):
        G, h = self.halfspaces
        n = len(G[0]) if G else 0
        full_src = (1 << self.n_source) - 1
        full_tgt = ((1 << len(G)) - 1) ^ full_src
        for u, mask in kernels.iter_points(G, h, [-self.box] * n, [self.box] * n):
            yield u, int(mask & full_src == full_src), int(mask & full_tgt == full_tgt)


def hom_halfspaces(bundle_src, bundle_tgt, config, side):
    """Rays and thresholds of ``Hom(L', L)`` on one side, as ``(rays, bounds)``.

    ``side`` is ``"source"`` (before ``F``) or ``"target"`` (after ``F``).
    Degrees live in the coarse lattice ``M = Z^n``.
    """
    fan_x, fan_y, _ = fans_of(config)
    src_side, tgt_side = DIRECTIONS[config.case]
    home = src_side if side == "source" else tgt_side
    fan = fan_x if home == "X" else fan_y
    if side == "source":
        k1, k0 = bundle_tgt.k, bundle_src.k
        mults = config.s if config.case == Case.REWEIGHT else fan.mults
    else:
        k1 = apply_functor(bundle_tgt, config).target.k
        k0 = apply_functor(bundle_src, config).target.k
        mults = fan.mults
    sign = 1 if config.case in (Case.REWEIGHT, Case.CONTRACTION) else -1
    bounds = [sign * Fraction(x - y, r) for x, y, r in zip(k1, k0, mults)]
    return list(fan.rays), bounds


def default_hom_box(config, bundles):
    rmax = max(config.r)
    kmax = max((abs(x) for b in bundles for x in b.k), default=0)
    return 8 * rmax * (kmax + 1)


def hom_graded_compare(bundle_src, bundle_tgt, config, box=None, backend=None):
    """Compare ``Hom(L', L)`` with ``Hom(F L', F L)`` degree by degree.

    ``bundle_src`` is ``L'`` and ``bundle_tgt`` is ``L``.  The natural map
    sends a monomial to the same monomial, so the comparison is an equality
    test of two sets of lattice points.
    """
    bundle_src = bundle_src if isinstance(bundle_src, MonomialLineBundle) else MonomialLineBundle(bundle_src)
    bundle_tgt = bundle_tgt if isinstance(bundle_tgt, MonomialLineBundle) else MonomialLineBundle(bundle_tgt)
    if config.case in (Case.FLIP, Case.INVERSE_CONTRACTION):
        for b in (bundle_src, bundle_tgt):
            ok, stat = range_check(b, config)
            if not ok:
                raise OutOfRange(f"bundle {b.k} outside the window (statistic {stat})")
    if box is None:
        box = default_hom_box(config, [bundle_src, bundle_tgt])
    rays_s, bounds_s = hom_halfspaces(bundle_src, bundle_tgt, config, "source")
    rays_t, bounds_t = hom_halfspaces(bundle_src, bundle_tgt, config, "target")
    G, h = kernels.integer_halfspaces(rays_s + rays_t, bounds_s + bounds_t)
    n = config.n
    counts, first, seen = kernels.mask_scan(G, h, [-box] * n, [box] * n, backend)
    ns = len(rays_s)
    full_src = (1 << ns) - 1
    full_tgt = ((1 << len(G)) - 1) ^ full_src
    table = {}
    mismatches = []
    for mask in np.nonzero(counts)[0]:
        mask = int(mask)
        key = (int(mask & full_src == full_src), int(mask & full_tgt == full_tgt))
        table[key] = table.get(key, 0) + int(counts[mask])
        if key[0] != key[1]:
            mismatches.append((tuple(int(x) for x in first[mask]), key))
    mismatches.sort()
    if not mismatches:
        verdict = HomVerdict.BIJECTIVE
    elif all(key == (0, 1) for _, key in mismatches):
        verdict = HomVerdict.INJECTIVE_ONLY
    else:
        verdict = HomVerdict.MISMATCH
    return GradedHomReport(box, table, mismatches, verdict, (G, h), ns)


# spanning-class arithmetic


def stratum_twist_range_check(config, stratum, k, eps=None, normalize=True):
    """Koszul twists of a normalized bundle stay inside the flip window.

    ``stratum`` is a set of indices in ``(n'', n+1]`` that leaves at least
    one index of that range free (the inequality only needs a free
    ``i0``, so strata of size ``n - n''`` are accepted as well).  With ``normalize`` the numerator at the first free index
    ``i0`` of that range is moved so that ``0 <= stat < -a_{i0}/r_{i0}``.
    Every ``eps`` in ``{0,1}^t`` (or only the one given) must keep
    ``stat - sum eps_p a_{i_p}/r_{i_p}`` in ``[0, bound)``.
    """
    _require(config, Case.FLIP)
    n, n2 = config.n, config.n2
    stratum = sorted(set(int(i) for i in stratum))
    allowed = set(range(n2 + 1, n + 2))
    if not set(stratum) <= allowed or len(stratum) > n - n2:
        raise BadStratum(f"stratum {stratum} must be a subset of {sorted(allowed)} of size <= {n - n2}")
    k = list(k)
    a, r = config.a_full, config.r
    if normalize:
        i0 = min(allowed - set(stratum))
        step = Fraction(a[i0 - 1], r[i0 - 1])  # negative
        stat = range_statistic(config, k)
        # largest shift t with stat + t*step >= 0
        t = floor(stat / -step)
        k[i0 - 1] += t
    stat = range_statistic(config, k)
    bound = range_bound(config)
    choices = [tuple(eps)] if eps is not None else list(product((0, 1), repeat=len(stratum)))
    for e in choices:
        twisted = stat - sum((Fraction(a[i - 1] * x, r[i - 1]) for i, x in zip(stratum, e)), Fraction(0))
        if not (0 <= twisted < bound):
            return False
    return True
