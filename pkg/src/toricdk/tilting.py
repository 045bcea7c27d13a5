"""Range classes, the tilting bundle they sum to, and its endomorphism quiver.

Bundles follow the divisor convention ``L = O(sum k_i/r_i D_i)`` on the
home side of the configuration: ``Y`` for a flip, the blown-up side ``X``
for an inverse contraction.  ``Hom(L_a, L_b)`` is then the module of
characters ``u`` with ``<u, v_i> >= -(k_b - k_a)_i / r_i`` on every ray.
"""

import json
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from math import ceil, floor

from .cohom import round_hom_divisor, verify_vanishing
from .errors import ConfigMismatch, EmptyTilting, ParseError
from .fm import range_bound, range_check, range_statistic
from .ratlat import Cone, dual_lattice, hilbert_basis, module_generators
from .stacky import Case, MonomialLineBundle, fans_of, relation_reducer


def home_fan(config):
    fan_x, fan_y, _ = fans_of(config)
    if config.case == Case.FLIP:
        return fan_y
    if config.case == Case.INVERSE_CONTRACTION:
        return fan_x
    raise ConfigMismatch("range classes exist only for flips and inverse contractions")


def enumerate_range_classes(config):
    """Normal forms of all bundle classes inside the range window.

    The relation lattice has rank ``n`` in ``Z^{n+1}``, so its reversed
    echelon form leaves exactly one free coordinate.  Every class has a
    unique representative whose pivot coordinates are reduced residues;
    for each residue pattern the range statistic is affine in the free
    coordinate with a nonzero slope, which pins down the finitely many
    admissible values.
    """
    fan = home_fan(config)
    reducer = relation_reducer(fan)
    width = reducer.width
    pivot_cols = [col for col, _ in reducer.pivots]
    free = [c for c in range(width) if c not in pivot_cols]
    if len(free) != 1:
        raise AssertionError(f"expected one free coordinate, found {len(free)}")
    free_col = free[0]
    bound = range_bound(config)
    out = []
    for residues in product(*(range(row[col]) for col, row in reducer.pivots)):
        v = [0] * width
        for col, t in zip(pivot_cols, residues):
            v[col] = t
        k0 = tuple(reversed(v))
        base = range_statistic(config, k0)
        v[free_col] = 1
        slope = range_statistic(config, tuple(reversed(v))) - base
        v[free_col] = 0
        # 0 <= base + slope * x < bound
        if slope > 0:
            lo, hi = ceil(-base / slope), ceil((bound - base) / slope) - 1
        else:
            lo, hi = floor((bound - base) / slope) + 1, floor(-base / slope)
        for x in range(lo, hi + 1):
            v[free_col] = x
            k = tuple(reversed(v))
            assert range_check(k, config)[0]
            out.append(MonomialLineBundle(k))
    return sorted(out, key=lambda b: b.k)


@dataclass
class TiltingData:
    """Vertices, arrow generators and orthogonality evidence of ``End(P)``.

    ``arrows[(a, b)]`` lists the characters generating the arrows from
    vertex ``a`` to vertex ``b``; ``orthogonality[(a, b)]`` is the Čech
    report of the rounded Hom sheaf from ``a`` to ``b``.
    """

    representatives: list
    arrows: dict
    orthogonality: dict = field(default_factory=dict)
    box: int = 48
    side: str = "Y"

    @property
    def clean(self):
        return all(rep.clean for rep in self.orthogonality.values())


def _hom_thresholds(fan, src, tgt):
    return [Fraction(-(b - a), r) for a, b, r in zip(src.k, tgt.k, fan.mults)]


def _in_module(u, fan, thresholds):
    return all(
        sum(Fraction(x) * y for x, y in zip(u, v)) >= t for v, t in zip(fan.rays, thresholds)
    )


def build_tilting(config, box=48, workers=1, backend=None):
    """Assemble the quiver of ``End(P)`` for ``P`` the sum of all range classes.

    Arrows between distinct vertices are the minimal generators of
    ``Hom(L_a, L_b)`` over the base monoid.  Loops at a vertex are the
    Hilbert basis elements of the base monoid that do not factor through
    another vertex.  Orthogonality is checked by scanning ``H^p`` (``p >= 1``)
    of the floor-rounded Hom sheaf of every ordered pair in ``[-box, box]``.
    """
    reps = enumerate_range_classes(config)
    if not reps:
        raise EmptyTilting("no bundle classes in the range window")
    fan = home_fan(config)
    side = "Y" if config.case == Case.FLIP else "X"
    lat = dual_lattice(fan.lattice)
    modules = {}
    for a, src in enumerate(reps):
        for b, tgt in enumerate(reps):
            t = _hom_thresholds(fan, src, tgt)
            gens = module_generators(fan.rays, t, lat, lat) if a != b else None
            modules[(a, b)] = (t, gens)
    arrows = {}
    base_rays = _base_cone_rays(config)
    ring = hilbert_basis(base_rays, lat)
    for (a, b), (t, gens) in modules.items():
        if a != b:
            arrows[(a, b)] = gens
            continue
        loops = []
        for u in ring:
            factors = False
            for c in range(len(reps)):
                if c == a:
                    continue
                t_back = modules[(c, a)][0]
                if any(
                    _in_module(tuple(x - y for x, y in zip(u, g)), fan, t_back)
                    for g in modules[(a, c)][1]
                ):
                    factors = True
                    break
            if not factors:
                loops.append(u)
        arrows[(a, b)] = loops
    ortho = {}
    for a, src in enumerate(reps):
        for b, tgt in enumerate(reps):
            delta = [y - x for x, y in zip(src.k, tgt.k)]
            coeffs = round_hom_divisor(delta, fan.mults, "floor")
            ortho[(a, b)] = verify_vanishing(
                fan, dict(zip(fan.labels, coeffs)), box, 1, workers, backend
            )
    return TiltingData(reps, arrows, ortho, box, side)


def _base_cone_rays(config):
    """The cone of the affine base: all rays ``1..n+1``."""
    rays = config.rays()
    return Cone(tuple(rays[i] for i in range(1, config.n + 2)))


def _q(x):
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def _plain(x):
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _sorted_arrows(data):
    for key in sorted(data.arrows):
        for g in sorted(data.arrows[key]):
            yield key, g


def export_quiver(data, fmt="dot"):
    """Deterministic DOT or JSON text for the quiver of ``data``."""
    fmt = fmt.lower()
    if fmt == "dot":
        lines = ["digraph {"]
        for i, rep in enumerate(data.representatives):
            lines.append(f'  v{i} [label="k=({",".join(str(x) for x in rep.k)})"];')
        for (a, b), g in _sorted_arrows(data):
            lines.append(f'  v{a} -> v{b} [label="({",".join(_plain(x) for x in g)})"];')
        lines.append("}")
        return "\n".join(lines) + "\n"
    if fmt == "json":
        doc = {
            "box": data.box,
            "side": data.side,
            "vertices": [{"id": i, "k": list(rep.k)} for i, rep in enumerate(data.representatives)],
            "arrows": [
                {"source": a, "target": b, "generator": [_q(x) for x in g]}
                for (a, b), g in _sorted_arrows(data)
            ],
            "orthogonality": [
                {
                    "source": a,
                    "target": b,
                    "clean": rep.clean,
                    "witnesses": len(rep.witnesses),
                }
                for (a, b), rep in sorted(data.orthogonality.items())
            ],
        }
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"
    raise ConfigMismatch(f"unknown quiver format {fmt!r}")


def read_quiver_json(text):
    """Inverse of ``export_quiver(..., "json")`` (orthogonality kept as a summary)."""
    try:
        doc = json.loads(text)
        reps = [MonomialLineBundle(v["k"]) for v in sorted(doc["vertices"], key=lambda v: v["id"])]
        arrows = {(a, b): [] for a in range(len(reps)) for b in range(len(reps))}
        for arr in doc["arrows"]:
            arrows[(arr["source"], arr["target"])].append(
                tuple(Fraction(x) for x in arr["generator"])
            )
        ortho = {
            (o["source"], o["target"]): _Summary(o["clean"], o["witnesses"])
            for o in doc.get("orthogonality", [])
        }
        return TiltingData(reps, arrows, ortho, doc["box"], doc["side"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed quiver document: {exc}") from exc


@dataclass(frozen=True)
class _Summary:
    clean: bool
    count: int

    @property
    def witnesses(self):
        return [None] * self.count
