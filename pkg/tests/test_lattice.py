"""Tests for the bitmask lattice core and JSON round-trips."""

import json
from math import comb

import pytest
from hypothesis import given, strategies as st

from latticeramsey.lattice import (
    Chain,
    Color,
    Coloring,
    Permutation,
    WeightedFamily,
    chain_from_json,
    coloring_from_json,
    dumps,
    elements_of,
    family_from_json,
    is_subset,
    iter_submasks,
    layer,
    mask_of,
    sym_diff_size,
)

masks6 = st.integers(min_value=0, max_value=63)


def test_subset_examples():
    assert is_subset(mask_of([1, 2]), mask_of([1, 2, 3]))
    assert not is_subset(mask_of([1, 3]), mask_of([1, 2]))
    assert is_subset(0, 0)


def test_sym_diff_examples():
    assert sym_diff_size(mask_of([1, 2]), mask_of([1, 3])) == 2
    assert sym_diff_size(mask_of([1, 2]), mask_of([1, 2])) == 0
    assert sym_diff_size(mask_of([1, 2]), mask_of([3, 4])) == 4


@given(masks6, masks6)
def test_subset_antisymmetry(a, b):
    if is_subset(a, b) and is_subset(b, a):
        assert a == b


@given(masks6, masks6, masks6)
def test_subset_transitivity(a, b, c):
    if is_subset(a, b) and is_subset(b, c):
        assert is_subset(a, c)


@given(masks6, masks6)
def test_sym_diff_cross_identity(a, b):
    # two independent computations of |a (+) b|
    direct = (a ^ b).bit_count()
    via_sizes = a.bit_count() + b.bit_count() - 2 * (a & b).bit_count()
    assert sym_diff_size(a, b) == direct == via_sizes


@pytest.mark.parametrize("n", range(0, 13))
def test_layer_counts_and_order(n):
    for s in range(n + 1):
        sets = list(layer(n, s))
        assert len(sets) == comb(n, s)
        assert len(set(sets)) == len(sets)
        assert all(m.bit_count() == s for m in sets)
        assert sets == sorted(sets)  # ascending numeric = colex


def test_layer_examples():
    assert len(list(layer(4, 2))) == 6
    assert list(layer(3, 0)) == [0]
    assert list(layer(5, 5)) == [mask_of([1, 2, 3, 4, 5])]
    # colex order spelled out
    assert [elements_of(m) for m in layer(4, 2)] == [
        [1, 2], [1, 3], [2, 3], [1, 4], [2, 4], [3, 4]
    ]


def test_layer_range_errors():
    with pytest.raises(ValueError):
        list(layer(4, 5))
    with pytest.raises(ValueError):
        list(layer(4, -1))


def test_submask_enumeration_is_colex_ascending():
    a = mask_of([1, 3, 4])
    subs = list(iter_submasks(a))
    assert subs == sorted(subs)
    assert len(subs) == 8 and subs[0] == 0 and subs[-1] == a


def test_structured_color_of():
    c = Coloring.structured(3, blue_layers={0})
    assert c.color_of(0) is Color.BLUE
    assert c.color_of(mask_of([1])) is Color.RED
    d = Coloring.dense(2, range(4))
    assert all(d.color_of(s) is Color.BLUE for s in range(4))


@pytest.mark.parametrize("n", [1, 4, 7, 10, 12])
def test_dense_structured_agreement(n):
    import random

    rng = random.Random(n)
    layers = {s for s in range(n + 1) if rng.random() < 0.3}
    extra = [
        s
        for s in range(1 << n)
        if s.bit_count() not in layers and rng.random() < 0.1
    ]
    structured = Coloring.structured(n, blue_layers=layers, blue_extra=extra)
    dense = structured.densify()
    for s in range(1 << n):
        assert structured.color_of(s) is dense.color_of(s)


def test_chain_roundtrip_and_validation():
    ch = Chain((0, mask_of([3])))
    assert dumps(ch) == '{"sets": [[], [3]]}'
    assert chain_from_json(dumps(ch)) == ch
    with pytest.raises(ValueError):
        chain_from_json('{"sets": [[3], []]}')
    with pytest.raises(ValueError):
        Chain((mask_of([1]), mask_of([1])))


def test_coloring_roundtrips():
    c = Coloring.structured(5, blue_layers={2})
    assert coloring_from_json(dumps(c)) == c
    d = Coloring.dense(3, [0, 5, 7])
    back = coloring_from_json(dumps(d))
    assert back == d
    obj = json.loads(dumps(d))
    assert obj["repr"] == "dense" and obj["blue_hex"] == obj["blue_hex"].lower()


def test_coloring_with_implicit_code_roundtrip():
    code = WeightedFamily(10, 4, modp_p=11, modp_d=3)
    c = Coloring.structured(10, blue_layers={3, 6}, blue_code=code)
    back = coloring_from_json(dumps(c))
    assert back == c
    member = next(code.iter_members())
    assert back.color_of(member) is Color.BLUE


def test_dense_guard():
    with pytest.raises(ValueError):
        Coloring.dense(29, [])


def test_structured_double_listing_rejected():
    with pytest.raises(ValueError):
        Coloring.structured(4, blue_layers={2}, blue_extra=[mask_of([1, 2])])


def test_family_roundtrip_and_membership():
    fam = WeightedFamily(5, 2, members=(mask_of([1, 2]), mask_of([3, 5])))
    assert family_from_json(dumps(fam)) == fam
    assert fam.contains(mask_of([1, 2])) and not fam.contains(mask_of([1, 3]))
    imp = WeightedFamily(5, 2, modp_p=5, modp_d=3)
    assert family_from_json(dumps(imp)) == imp
    assert imp.contains(mask_of([3, 5]))
    assert not imp.contains(mask_of([1, 3]))


def test_family_validation():
    with pytest.raises(ValueError):
        WeightedFamily(5, 2, members=(mask_of([1, 2, 3]),))
    with pytest.raises(ValueError):
        WeightedFamily(5, 2)
    with pytest.raises(ValueError):
        WeightedFamily(5, 2, members=(1,), modp_p=5, modp_d=1)


def test_permutation_validation_and_roundtrip():
    p = Permutation(2, 2, (4, 3))
    assert p.prefix_mask(1) == mask_of([4])
    assert Permutation.from_obj(p.to_obj()) == p
    with pytest.raises(ValueError):
        Permutation(2, 2, (3, 3))
    with pytest.raises(ValueError):
        Permutation(2, 2, (2, 3))
