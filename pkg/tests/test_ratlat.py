import random
from fractions import Fraction as Q

import pytest
from hypothesis import given, settings, strategies as st

from toricdk.errors import BoxTooSmall, NotContained, NotFullRank, NotPrincipal, RankMismatch
from toricdk.ratlat import (
    Cone,
    contains,
    diagonal_lattice,
    dual_lattice,
    hilbert_basis,
    hilbert_module_generators,
    hnf,
    index_in,
    lattice_intersection,
    lattice_sum,
    min_shifted_generator,
    module_generators,
    standard_lattice,
)


def test_hnf_small_examples():
    lat = hnf([(2, 0), (1, 1)])
    assert lat.columns == ((1, 1), (0, 2))
    assert lat.det() == 2
    assert hnf([(1, 0), (0, 1)]) == standard_lattice(2)
    assert hnf([(8, 0), (1, 3)]).det() == 24


def test_hnf_rejects_deficient_span():
    with pytest.raises(NotFullRank):
        hnf([(1, 2), (2, 4)])
    with pytest.raises(RankMismatch):
        hnf([(1, 0), (1,)])


def test_sum_and_intersection_of_diagonal_lattices():
    assert lattice_sum(hnf([(2,)]), hnf([(3,)])) == standard_lattice(1)
    mx, my = dual_lattice(diagonal_lattice([4])), dual_lattice(diagonal_lattice([6]))
    assert lattice_sum(mx, my) == diagonal_lattice([Q(1, 12)])
    assert lattice_intersection(hnf([(2,)]), hnf([(3,)])) == hnf([(6,)])
    assert lattice_intersection(diagonal_lattice([4]), diagonal_lattice([6])) == diagonal_lattice([12])
    a = hnf([(2, 1), (0, 3)])
    assert lattice_sum(a, a) == a and lattice_intersection(a, a) == a


def test_rank_mismatch():
    with pytest.raises(RankMismatch):
        lattice_sum(standard_lattice(1), standard_lattice(2))


def test_dual_of_diagonal_and_chart_lattice():
    assert dual_lattice(diagonal_lattice([2, 3, 5])) == diagonal_lattice([Q(1, 2), Q(1, 3), Q(1, 5)])
    assert dual_lattice(standard_lattice(3)) == standard_lattice(3)
    # blowup chart omitting ray 1: generated by v2 = e2 and v3 = (1, 1)
    m = dual_lattice(hnf([(0, 1), (1, 1)]))
    assert m == hnf([(-1, 1), (1, 0)])


def test_index():
    even = hnf([(2, 0), (1, 1)])
    assert index_in(even, standard_lattice(2)) == 2
    assert index_in(even, even) == 1
    assert index_in(hnf([(2, 0), (0, 3)]), standard_lattice(2)) == 6
    with pytest.raises(NotContained):
        index_in(standard_lattice(2), even)


def test_contains():
    half = diagonal_lattice([Q(1, 2), Q(1, 2)])
    assert contains(half, (Q(1, 2), Q(1, 2)))
    assert not contains(half, (Q(1, 3), 0))


def test_min_shifted_generator():
    line = Cone(((1,),))
    assert min_shifted_generator((Q(1, 3),), line, diagonal_lattice([Q(1, 4)])) == (Q(1, 2),)
    plane = Cone(((1, 0), (1, 2)))
    assert min_shifted_generator((0, 0), plane, standard_lattice(2)) == (0, 0)


def test_not_principal_reports_antichain():
    even = hnf([(1, 1), (2, 0)])
    orthant = Cone(((1, 0), (0, 1)))
    with pytest.raises(NotPrincipal) as info:
        min_shifted_generator((1, 0), orthant, even)
    assert sorted(info.value.antichain) == [(1, 1), (2, 0)]


def test_box_too_small():
    with pytest.raises(BoxTooSmall):
        min_shifted_generator((Q(1, 3),), Cone(((1,),)), diagonal_lattice([100]), box=1)


def test_module_generator_examples():
    z2 = standard_lattice(2)
    plane = Cone(((1, 0), (1, 2)))
    assert hilbert_basis(plane, z2) == [(0, 1), (1, 0), (2, -1)]
    orthant = Cone(((1, 0), (0, 1)))
    assert hilbert_module_generators((0, 0), orthant, z2, z2) == [(0, 0)]
    z3 = standard_lattice(3)
    flop_y = [(1, 0, 0), (0, 1, 0), (0, 0, 1), (1, 1, -1)]
    assert module_generators(flop_y, [-1, 0, 0, 0], z3, z3) == [(-1, 1, 0), (0, 0, 0)]
    assert module_generators(flop_y, [1, 0, 0, 0], z3, z3) == [(1, 0, 0), (1, 0, 1)]


def test_conifold_hilbert_basis():
    cone = Cone(((1, 0, 0), (0, 1, 0), (0, 0, 1), (1, 1, -1)))
    assert hilbert_basis(cone, standard_lattice(3)) == [(0, 1, 0), (0, 1, 1), (1, 0, 0), (1, 0, 1)]


# properties

small = st.integers(-6, 6)


def full_rank_generators(n):
    return st.lists(st.tuples(*[small] * n), min_size=n, max_size=n + 2).filter(
        lambda gens: _rank_ok(gens, n)
    )


def _rank_ok(gens, n):
    try:
        hnf(gens)
        return True
    except NotFullRank:
        return False


@settings(max_examples=60, deadline=None)
@given(full_rank_generators(3), st.randoms())
def test_hnf_is_canonical(gens, rnd):
    shuffled = list(gens)
    rnd.shuffle(shuffled)
    assert hnf(shuffled) == hnf(gens)
    lat = hnf(gens)
    assert all(g in lat for g in gens)
    for j, c in enumerate(lat.columns):
        assert c[j] > 0
        assert all(c[i] == 0 for i in range(j))


@settings(max_examples=60, deadline=None)
@given(full_rank_generators(2), st.integers(1, 5))
def test_duality_is_involutive(gens, d):
    lat = hnf([tuple(Q(x, d) for x in g) for g in gens])
    assert dual_lattice(dual_lattice(lat)) == lat


@settings(max_examples=40, deadline=None)
@given(full_rank_generators(2), full_rank_generators(2))
def test_de_morgan(ga, gb):
    a, b = hnf(ga), hnf(gb)
    assert dual_lattice(lattice_intersection(a, b)) == lattice_sum(dual_lattice(a), dual_lattice(b))


@settings(max_examples=40, deadline=None)
@given(full_rank_generators(2), st.integers(1, 4), st.integers(1, 4))
def test_index_is_multiplicative(gens, s, t):
    c = hnf(gens)
    b = hnf([tuple(s * x for x in v) for v in c.basis()])
    a = hnf([tuple(t * x for x in v) for v in b.basis()])
    assert index_in(a, b) * index_in(b, c) == index_in(a, c)


def test_min_shifted_generator_is_idempotent():
    rng = random.Random(3)
    cone = Cone(((1, 0), (1, 3)))
    for _ in range(30):
        lat = diagonal_lattice([Q(1, rng.randint(1, 5)), Q(1, rng.randint(1, 5))])
        m = (Q(rng.randint(-9, 9), 4), Q(rng.randint(-9, 9), 5))
        try:
            g = min_shifted_generator(m, cone, lat)
        except NotPrincipal:
            continue
        assert g in lat
        assert min_shifted_generator(g, cone, lat) == g
