"""Tests for the recursive embedder, permutation recovery, sweeps, and bounds."""

import random
from math import factorial

import pytest

from latticeramsey.embedder import (
    EmbedRecord,
    counting_bound,
    embed_with_permutation,
    minimal_k,
    recover_permutation,
    sweep_permutations,
)
from latticeramsey.lattice import Chain, Coloring, Permutation, mask_of
from latticeramsey.oracle import CopyKind, find_copy
from latticeramsey.verifier import verify_embedding


def chain_blue_coloring(ground):
    """Blue = one maximal chain (prefixes of [ground]); contains no Q_2."""
    blue = [(1 << j) - 1 for j in range(ground + 1)]
    return Coloring.dense(ground, blue)


def random_dense(ground, seed, density=0.5):
    rng = random.Random(seed)
    return Coloring.dense(
        ground, [s for s in range(1 << ground) if rng.random() < density]
    )


def test_all_red_embeds_identically():
    c = Coloring.dense(3, [])
    rec = embed_with_permutation(c, 2, 1, Permutation.identity(2, 1))
    assert rec.succeeded
    assert rec.images == (0, 1, 2, 3)
    assert rec.levels == (0, 0, 0, 0)
    assert all(len(ch) == 0 for ch in rec.chains)


def test_all_blue_fails_with_full_chain():
    c = Coloring.dense(2, range(4))
    rec = embed_with_permutation(c, 1, 1, Permutation.identity(1, 1))
    assert rec.images == (None, None)
    assert rec.levels == (2, 2)
    assert rec.chains[0] == Chain((0, mask_of([2])))


def test_single_blue_bottom_shifts_everything():
    c = Coloring.dense(3, [0])
    rec = embed_with_permutation(c, 2, 1, Permutation.identity(2, 1))
    assert rec.levels == (1, 1, 1, 1)
    assert rec.images[0] == mask_of([3])
    assert rec.images[mask_of([1])] == mask_of([1, 3])
    assert rec.images[mask_of([2])] == mask_of([2, 3])
    assert rec.images[mask_of([1, 2])] == mask_of([1, 2, 3])
    assert verify_embedding(rec, c).ok


def test_determinism_bit_identical():
    c = random_dense(5, seed=99)
    perm = Permutation(3, 2, (5, 4))
    a = embed_with_permutation(c, 3, 2, perm)
    b = embed_with_permutation(c, 3, 2, perm)
    assert a == b


def test_records_verify_on_random_colorings():
    rng = random.Random(5)
    for trial in range(50):
        c = random_dense(4, seed=trial, density=rng.random())
        image = list(range(3, 5))
        rng.shuffle(image)
        perm = Permutation(2, 2, tuple(image))
        rec = embed_with_permutation(c, 2, 2, perm)
        res = verify_embedding(rec, c)
        assert res.ok, res


def test_success_image_is_induced_copy():
    # when no failure occurs, the image family hosts an induced copy of Q_n
    rng = random.Random(17)
    found = 0
    for trial in range(60):
        c = random_dense(5, seed=trial + 1000, density=0.25)
        rec = embed_with_permutation(c, 3, 2, Permutation.identity(3, 2))
        if rec.succeeded:
            found += 1
            w = find_copy(list(rec.images), 3, CopyKind.INDUCED)
            assert w is not None
    assert found > 0


def test_recover_permutation_examples():
    assert recover_permutation(Chain((0, mask_of([3]), mask_of([3, 4]))), 2) == [3, 4]
    assert recover_permutation(Chain((0, mask_of([4]), mask_of([3, 4]))), 2) == [4, 3]
    assert recover_permutation(
        Chain((mask_of([1]), mask_of([1, 5]), mask_of([1, 4, 5]))), 3
    ) == [5, 4]


def test_recover_rejects_bad_shape():
    with pytest.raises(ValueError):
        recover_permutation(Chain((0, mask_of([3, 4]))), 2)
    with pytest.raises(ValueError):
        recover_permutation(Chain((mask_of([3]), mask_of([3, 4]))), 2)


def test_failure_chain_recovers_its_permutation():
    rng = random.Random(3)
    checked = 0
    for trial in range(80):
        c = random_dense(4, seed=trial + 500, density=0.8)
        image = [3, 4]
        rng.shuffle(image)
        perm = Permutation(2, 2, tuple(image))
        rec = embed_with_permutation(c, 2, 2, perm)
        if not rec.succeeded:
            chain = rec.failure_chain()
            assert len(chain) == 3
            assert recover_permutation(chain, 2) == list(perm.image)
            checked += 1
    assert checked > 10


def test_sweep_chain_blue_small():
    c = chain_blue_coloring(4)
    report = sweep_permutations(c, 2, 2, mode="all")
    assert report.perms_run <= 2
    assert report.success is not None or report.injective


def test_sweep_all_blue_collides():
    # an all-blue coloring contains an induced Q_2, and the sweep shows the
    # endpoint map colliding, matching that implication
    c = Coloring.dense(3, range(8))
    report = sweep_permutations(c, 1, 2, mode="all")
    assert report.success is None
    assert report.perms_run == 2
    assert report.injective is False and report.collisions
    assert find_copy(list(range(8)), 2, CopyKind.INDUCED) is not None
    assert report.recover_ok


def test_sweep_all_red_immediate_success():
    c = Coloring.dense(4, [])
    for kwargs in ({"mode": "all"}, {"mode": "sample", "sample_count": 5, "seed": 2}):
        report = sweep_permutations(c, 2, 2, **kwargs)
        assert report.success is not None
        assert report.perms_run == 1
        assert not report.failures


def test_sweep_all_blue_single_permutation():
    # k = 1 leaves a single permutation: it fails, and the endpoint map on one
    # chain is injective by default
    c = Coloring.dense(2, range(4))
    report = sweep_permutations(c, 1, 1, mode="all")
    assert report.success is None
    assert report.perms_run == 1
    assert report.injective is True
    assert report.recover_ok


def test_sweep_sample_mode_deterministic():
    c = random_dense(5, seed=123, density=0.7)
    a = sweep_permutations(c, 2, 3, mode="sample", sample_count=10, seed=9)
    b = sweep_permutations(c, 2, 3, mode="sample", sample_count=10, seed=9)
    assert a == b


def test_sweep_guard():
    c = random_dense(5, seed=1)
    with pytest.raises(ValueError):
        sweep_permutations(c, -4, 9, mode="all")


def test_embed_dimension_mismatch():
    c = Coloring.dense(3, [])
    with pytest.raises(ValueError):
        embed_with_permutation(c, 2, 2, Permutation.identity(2, 2))


def test_record_roundtrip():
    c = random_dense(4, seed=77, density=0.6)
    rec = embed_with_permutation(c, 2, 2, Permutation(2, 2, (4, 3)))
    assert EmbedRecord.from_obj(rec.to_obj()) == rec


def test_embed_matches_independent_reimplementation():
    from latticeramsey.lattice import elements_of
    from naive import naive_embed

    rng = random.Random(271)
    for trial in range(120):
        n = rng.choice((1, 2, 3))
        k = rng.choice((1, 2, 3))
        ground = n + k
        coloring = random_dense(ground, seed=9000 + trial, density=rng.random())
        image = list(range(n + 1, n + k + 1))
        rng.shuffle(image)
        rec = embed_with_permutation(coloring, n, k, Permutation(n, k, tuple(image)))

        def is_blue(fs):
            return coloring.is_blue(mask_of(fs))

        images, levels, chains = naive_embed(is_blue, n, k, tuple(image))
        for a in range(1 << n):
            fs = frozenset(elements_of(a))
            want = images[fs]
            got = rec.images[a]
            assert (got is None) == (want is None)
            if got is not None:
                assert frozenset(elements_of(got)) == want
            assert rec.levels[a] == levels[fs]
            assert tuple(frozenset(elements_of(s)) for s in rec.chains[a]) == chains[fs]


def test_counting_bound_exact_small():
    r = counting_bound(2, 6.14)
    assert r.k == 12
    assert r.exponent == 28
    assert r.contradiction
    assert factorial(12) == 479001600 > 2**28 == 268435456
    assert counting_bound(4, 6.14).k == 12  # floor(6.14 * 4 / 2)


def test_counting_bound_floor_formula():
    from math import floor, log2

    for n in (2, 5, 17, 100):
        for c in (2.0, 3.7, 6.14):
            assert counting_bound(n, c).k == floor(c * n / log2(n))


def test_counting_bound_no_contradiction_side():
    r = counting_bound(100, 2.0)
    assert not r.contradiction  # 30! is far below 2^260


def test_minimal_k_small_values_exact():
    assert minimal_k(2) == 12
    # independent check by direct big-integer scan
    def brute(n):
        k = 1
        while not factorial(k) > 2 ** (2 * (n + k)):
            k += 1
        return k

    for n in (2, 3, 5, 10, 50):
        assert minimal_k(n) == brute(n)


def test_stirling_remark_fields_reported_not_asserted():
    r = counting_bound(2, 6.14)
    # the 0.8797-coefficient shortcut genuinely fails at k = 12
    assert r.stirling_coeff_ok is False
    assert r.stirling_lower_bits < r.log2_factorial
