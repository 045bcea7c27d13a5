"""Čech cohomology of torus-invariant divisorial sheaves on simplicial fans.

For ``D = sum c_i D_i`` and a character ``m`` the degree-``m`` part of the
Čech complex on the cover by maximal cones has a one-dimensional term at a
set ``S`` of cones exactly when ``<m, v_i> >= -c_i`` holds for every ray of
the common face ``∩S``.  So the cohomology in degree ``m`` only depends on
which rays satisfy their inequality, a bit mask with one bit per ray.  The
box scan histograms those masks with the compiled kernel, and the Čech
ranks are computed once per mask with exact rational elimination.
"""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from math import ceil, floor

import numpy as np

from . import kernels
from .errors import ConfigMismatch
from .ratlat import dual_lattice
from .stacky import Case, MonomialLineBundle, fans_of


@dataclass
class CechReport:
    """Result of a box scan.

    ``totals[p]`` is the summed dimension of ``H^p`` over all degrees of the
    box, ``witnesses`` one ``(degree, p)`` pair per distinct nonvanishing
    pattern (the lexicographically first degree showing it) and
    ``witness_count`` the number of degrees with some ``H^p != 0`` for
    ``p >= p_min``.  An empty witness list only certifies the box.
    """

    divisor: dict
    box: int
    totals: dict
    witnesses: list = field(default_factory=list)
    witness_count: int = 0
    p_min: int = 1
    backend: str = ""

    @property
    def clean(self):
        return not self.witnesses


def _rank(rows):
    """Rank over Q of a small integer matrix."""
    m = [[Fraction(x) for x in r] for r in rows]
    rank = 0
    width = len(m[0]) if m else 0
    for col in range(width):
        piv = next((i for i in range(rank, len(m)) if m[i][col] != 0), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        for i in range(len(m)):
            if i != rank and m[i][col] != 0:
                f = m[i][col] / m[rank][col]
                m[i] = [a - f * b for a, b in zip(m[i], m[rank])]
        rank += 1
    return rank


def _cone_masks(fan):
    """Bit mask (over ray positions) of every maximal cone, in a fixed order."""
    pos = {lab: j for j, lab in enumerate(fan.labels)}
    cones = sorted(fan.max_cones, key=lambda c: sorted(c))
    return tuple(sum(1 << pos[i] for i in c) for c in cones)


@lru_cache(maxsize=None)
def _cech_dims(cone_masks, good):
    """Dimensions of the Čech cohomology for one mask of satisfied rays.

    A term sits at every nonempty set ``S`` of cones whose common rays are
    all good; the differential has the usual alternating signs.
    """
    N = len(cone_masks)
    terms = []
    for size in range(1, N + 1):
        level = []
        for S in combinations(range(N), size):
            face = cone_masks[S[0]]
            for j in S[1:]:
                face &= cone_masks[j]
            if face & ~good == 0:
                level.append(S)
        terms.append(level)
    ranks = []
    for p in range(N - 1):
        src, tgt = terms[p], terms[p + 1]
        if not src or not tgt:
            ranks.append(0)
            continue
        index = {S: i for i, S in enumerate(src)}
        rows = []
        for T in tgt:
            row = [0] * len(src)
            for j in range(len(T)):
                face = T[:j] + T[j + 1 :]
                if face in index:
                    row[index[face]] = (-1) ** j
            rows.append(row)
        ranks.append(_rank(rows))
    dims = []
    for p in range(N):
        into = ranks[p - 1] if p > 0 else 0
        out = ranks[p] if p < N - 1 else 0
        dims.append(len(terms[p]) - out - into)
    return tuple(dims)


def _halfspaces(fan, divisor):
    """Integer rows ``G z >= h`` over coordinates ``z`` of the character lattice."""
    basis = dual_lattice(fan.lattice).basis()
    normals = [[sum(b[t] * v[t] for t in range(len(v))) for b in basis] for v in fan.rays]
    bounds = [-Fraction(divisor.get(lab, 0)) for lab in fan.labels]
    return kernels.integer_halfspaces(normals, bounds), basis


def _good_mask(fan, divisor, m):
    mask = 0
    for j, (lab, v) in enumerate(zip(fan.labels, fan.rays)):
        if sum(Fraction(a) * b for a, b in zip(m, v)) >= -Fraction(divisor.get(lab, 0)):
            mask |= 1 << j
    return mask


def cech_graded_dim(fan, divisor, m):
    """``[dim H^p(X, O(D))_m for p = 0..N-1]`` with ``N`` maximal cones."""
    return list(_cech_dims(_cone_masks(fan), _good_mask(fan, divisor, m)))


def euler_characteristic(fan, divisor, m):
    """Alternating count of Čech terms in degree ``m``."""
    cones = _cone_masks(fan)
    good = _good_mask(fan, divisor, m)
    chi = 0
    for size in range(1, len(cones) + 1):
        for S in combinations(cones, size):
            face = S[0]
            for c in S[1:]:
                face &= c
            if face & ~good == 0:
                chi += (-1) ** (size - 1)
    return chi


def _scan_slice(args):
    G, h, lo, hi, backend = args
    return kernels.mask_scan(G, h, lo, hi, backend)


def _scan(G, h, lo, hi, workers, backend):
    """Mask histogram, optionally split along the first coordinate."""
    if workers <= 1 or hi[0] - lo[0] < 1:
        return kernels.mask_scan(G, h, lo, hi, backend)
    cuts = np.linspace(lo[0], hi[0] + 1, workers + 1).astype(int)
    jobs = []
    for a, b in zip(cuts, cuts[1:]):
        if b > a:
            jobs.append((G, h, [int(a)] + list(lo[1:]), [int(b) - 1] + list(hi[1:]), backend))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(_scan_slice, jobs))
    # slices are in increasing first coordinate, so the earliest hit wins
    counts, first, seen = (x.copy() for x in parts[0])
    for c, f, s in parts[1:]:
        counts += c
        new = (s == 1) & (seen == 0)
        first[new] = f[new]
        seen |= s
    return counts, first, seen


def verify_vanishing(fan, divisor, box=48, p_min=1, workers=1, backend=None):
    """Scan all characters with coordinates in ``[-box, box]`` for ``H^p``, ``p >= p_min``.

    Coordinates are taken in the basis of the character lattice (the
    standard basis when ``N = Z^n``).  The result does not depend on
    ``workers``.
    """
    divisor = {int(k): int(v) for k, v in divisor.items()}
    (G, h), basis = _halfspaces(fan, divisor)
    n = fan.ambient_rank
    lo, hi = [-box] * n, [box] * n
    counts, first, seen = _scan(G, h, lo, hi, workers, backend)
    cones = _cone_masks(fan)
    totals = {p: 0 for p in range(len(cones))}
    witnesses = []
    witness_count = 0
    for mask in np.nonzero(counts)[0]:
        mask = int(mask)
        dims = _cech_dims(cones, mask)
        c = int(counts[mask])
        for p, d in enumerate(dims):
            totals[p] += d * c
        bad = [p for p, d in enumerate(dims) if p >= p_min and d]
        if bad:
            witness_count += c
            z = [int(x) for x in first[mask]]
            m = tuple(sum(zi * b[t] for zi, b in zip(z, basis)) for t in range(n))
            m = tuple(int(x) if x.denominator == 1 else x for x in m)
            witnesses += [(m, p) for p in bad]
    witnesses.sort(key=lambda w: (w[1], w[0]))
    return CechReport(
        dict(sorted(divisor.items())),
        box,
        totals,
        witnesses,
        witness_count,
        p_min,
        backend or kernels.BACKEND,
    )


# rounded Hom sheaves on the coarse spaces


def round_hom_divisor(delta, mults, mode):
    """Coefficients of the reflexive Hom sheaf on the coarse space.

    ``mode="ceil"`` gives ``-ceil(delta_i / r_i)`` (generator-exponent
    convention), ``mode="floor"`` gives ``floor(delta_i / r_i)`` (divisor
    convention).
    """
    if mode == "ceil":
        return [-ceil(Fraction(d, r)) for d, r in zip(delta, mults)]
    if mode == "floor":
        return [floor(Fraction(d, r)) for d, r in zip(delta, mults)]
    raise ValueError(f"unknown rounding mode {mode!r}")


def rounded_hom_sheaf(bundle_src, bundle_tgt, side, config):
    """``(fan, divisor)`` of ``Hom(L', L)`` on the coarse space of ``side``.

    ``bundle_src`` is ``L'`` and ``bundle_tgt`` is ``L``, both given on the
    source side of the functor; the other side uses their images.
    """
    from .fm import DIRECTIONS, apply_functor

    src = bundle_src if isinstance(bundle_src, MonomialLineBundle) else MonomialLineBundle(bundle_src)
    tgt = bundle_tgt if isinstance(bundle_tgt, MonomialLineBundle) else MonomialLineBundle(bundle_tgt)
    if side not in ("X", "Y"):
        raise ConfigMismatch(f"unknown side {side!r}")
    fan_x, fan_y, _ = fans_of(config)
    fan = fan_x if side == "X" else fan_y
    if side != DIRECTIONS[config.case][0]:
        src = apply_functor(src, config).target
        tgt = apply_functor(tgt, config).target
    delta = [a - b for a, b in zip(tgt.k, src.k)]
    if config.case == Case.REWEIGHT:
        mults = config.s if side == "Y" else config.r
        coeffs = round_hom_divisor(delta, mults, "ceil")
    elif config.case == Case.CONTRACTION:
        coeffs = round_hom_divisor(delta, fan.mults, "ceil")
    else:
        coeffs = round_hom_divisor(delta, fan.mults, "floor")
    if len(coeffs) != len(fan.labels):
        raise ConfigMismatch("bundle length does not match the fan")
    return fan, dict(zip(fan.labels, coeffs))
