from itertools import product

import pytest

from toricdk.errors import ConfigMismatch, EmptyTilting, ParseError
from toricdk.fm import range_check
from toricdk.ratlat import Cone, hilbert_basis, standard_lattice
from toricdk.stacky import Case, MonomialLineBundle, build_config, normal_form
from toricdk.tilting import (
    TiltingData,
    build_tilting,
    enumerate_range_classes,
    export_quiver,
    home_fan,
    read_quiver_json,
)


@pytest.fixture(scope="module")
def flop():
    return build_config(Case.FLIP, 3, a=(1, 1, -1), r=(1, 1, 1, 1))


@pytest.fixture(scope="module")
def stacky_flip():
    return build_config(Case.FLIP, 3, a=(1, 1, -1), r=(1, 1, 1, 2))


@pytest.fixture(scope="module")
def flop_data(flop):
    return build_tilting(flop, box=24)


def test_flop_classes(flop):
    assert [c.k for c in enumerate_range_classes(flop)] == [(0, 0, 0, 0), (1, 0, 0, 0)]


def test_stacky_flip_classes(stacky_flip):
    classes = enumerate_range_classes(stacky_flip)
    assert [c.k for c in classes] == [(0, 0, 0, 0), (1, 0, 0, 0), (1, 0, 0, 1)]


@pytest.mark.parametrize(
    "config",
    [
        build_config(Case.FLIP, 3, a=(1, 1, -1), r=(1, 1, 1, 2)),
        build_config(Case.FLIP, 4, a=(2, 1, -1, -1), r=(1, 2, 1, 1, 3)),
        build_config(Case.INVERSE_CONTRACTION, 2, a=(1, 1), r=(2, 3, 1)),
    ],
)
def test_classes_are_complete(config):
    fan = home_fan(config)
    classes = {c.k for c in enumerate_range_classes(config)}
    found = set()
    for k in product(range(-3, 4), repeat=config.n + 1):
        if range_check(k, config)[0]:
            found.add(normal_form(fan, MonomialLineBundle(k)).k)
    assert found <= classes
    assert all(normal_form(fan, MonomialLineBundle(k)).k == k for k in classes)


def test_requires_flip_or_inverse_contraction():
    with pytest.raises(ConfigMismatch):
        enumerate_range_classes(build_config(Case.CONTRACTION, 2, a=(1, 1), r=(1, 1, 1)))


def test_flop_quiver(flop_data):
    assert flop_data.arrows[(0, 1)] == [(-1, 1, 0), (0, 0, 0)]
    assert flop_data.arrows[(1, 0)] == [(1, 0, 0), (1, 0, 1)]
    assert flop_data.arrows[(0, 0)] == [] and flop_data.arrows[(1, 1)] == []
    assert flop_data.clean


def test_arrow_compositions_stay_in_hom(flop_data, flop):
    fan = home_fan(flop)
    reps = flop_data.representatives
    for (a, b), gens in flop_data.arrows.items():
        for (c, d), gens2 in flop_data.arrows.items():
            if b != c:
                continue
            for g, h in product(gens, gens2):
                u = tuple(x + y for x, y in zip(g, h))
                t = [-(y - x) for x, y in zip(reps[a].k, reps[d].k)]
                assert all(sum(p * q for p, q in zip(u, v)) >= s for v, s in zip(fan.rays, t))


def test_stacky_flip_is_orthogonal(stacky_flip):
    data = build_tilting(stacky_flip, box=24)
    assert data.clean
    for (a, b), gens in data.arrows.items():
        for g in gens:
            for h in gens:
                if g != h:
                    diff = tuple(x - y for x, y in zip(g, h))
                    assert not all(sum(p * q for p, q in zip(diff, v)) >= 0 for v in home_fan(stacky_flip).rays)


def test_blowup_quiver_has_no_loops():
    config = build_config(Case.INVERSE_CONTRACTION, 2, a=(1, 1), r=(1, 1, 1))
    data = build_tilting(config, box=12)
    assert [b.k for b in data.representatives] == [(-1, 0, 0), (0, 0, 0)]
    assert data.arrows[(0, 1)] == [(-1, 1), (0, 0)]
    assert data.arrows[(1, 0)] == [(1, 0)]
    assert data.arrows[(0, 0)] == [] and data.arrows[(1, 1)] == []
    # every ring generator at a vertex factors through the other vertex
    ring = hilbert_basis(Cone(((1, 0), (0, 1), (1, 1))), standard_lattice(2))
    sums = {tuple(x + y for x, y in zip(g, h)) for g in data.arrows[(0, 1)] for h in data.arrows[(1, 0)]}
    assert set(map(tuple, ring)) <= sums


def test_empty_window_raises():
    from dataclasses import replace

    config = build_config(Case.INVERSE_CONTRACTION, 2, a=(1, 1), r=(1, 1, 1))
    with pytest.raises(EmptyTilting):
        build_tilting(replace(config, a=(0, 0)), box=4)


def test_exports_are_deterministic(flop_data):
    dot = export_quiver(flop_data, "dot")
    assert dot.count("->") == 4 and dot.count("[label=\"k=") == 2
    assert dot == export_quiver(flop_data, "dot")
    text = export_quiver(flop_data, "json")
    assert export_quiver(read_quiver_json(text), "json") == text
    with pytest.raises(ParseError):
        read_quiver_json("{}")


def test_one_vertex_export_has_loops_only():
    data = TiltingData([MonomialLineBundle((0, 0))], {(0, 0): [(1, 0), (0, 1)]})
    dot = export_quiver(data, "dot")
    assert dot.count("v0 -> v0") == 2
