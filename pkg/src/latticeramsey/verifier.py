"""Independent structural certification of colorings, codes, and embeddings.

Nothing in this module reuses the machinery it checks: embeddings are
re-verified from color lookups and subset tests alone, code coverage is
counted by an independent dynamic program, and monochromatic-freeness of the
package's colorings is certified by the layer-forcing arguments their shapes
support (cross-checked against the exhaustive oracle wherever both can run).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import mpmath
import numpy as np

from .embedder import EmbedRecord
from .lattice import (
    Color,
    Coloring,
    SetWord,
    WeightedFamily,
    elements_of,
    full_mask,
    is_proper_subset,
    is_subset,
    iter_submasks,
    layer,
)


@dataclass(frozen=True)
class CheckResult:
    """Outcome of a structural check: ok, or a witness of failure."""

    ok: bool
    witness: Optional[tuple] = None
    detail: str = ""

    def to_obj(self) -> dict:
        def enc(x):
            if isinstance(x, int):
                return elements_of(x)
            return x

        return {
            "ok": self.ok,
            "witness": None if self.witness is None else [enc(x) for x in self.witness],
            "detail": self.detail,
        }


def check_min_distance(
    fam: WeightedFamily, bound: int, enumeration_limit: int = 1_000_000
) -> CheckResult:
    """All distinct members at pairwise symmetric difference >= bound.

    Implicit families are materialized (guarded by enumeration_limit).  On
    failure the witness is the colex-first violating pair.
    """
    members = fam.enumerated_members(enumeration_limit)
    for i, a in enumerate(members):
        for b in members[i + 1:]:
            if (a ^ b).bit_count() < bound:
                return CheckResult(False, (a, b), "pair below distance bound")
    return CheckResult(True, detail=f"{len(members)} members checked")


@dataclass(frozen=True)
class DpTable:
    """Counts of s-subsets of a ground set by element-sum residue.

    counts[s][r] is the number of s-subsets of the allowed elements whose
    element sum is congruent to r mod the modulus; counts[0][0] == 1.
    """

    ground: SetWord
    size_cap: int
    modulus: int
    counts: tuple[tuple[int, ...], ...]

    def count(self, size: int, residue: int) -> int:
        return self.counts[size][residue % self.modulus]


def build_dp_table(ground: SetWord, size_cap: int, modulus: int) -> DpTable:
    """Size-and-residue subset counts over the elements of `ground`.

    Exact: the table is int64 internally, which cannot overflow for ground
    sets of at most 64 elements (total counts are bounded by C(64, 32)).
    """
    if size_cap > ground.bit_count():
        raise ValueError("size cap exceeds the number of allowed elements")
    p = modulus
    table = np.zeros((size_cap + 1, p), dtype=np.int64)
    table[0][0] = 1
    for el in elements_of(ground):
        shifted = np.roll(table[:-1], el % p, axis=1)
        table[1:] += shifted
    return DpTable(
        ground,
        size_cap,
        p,
        tuple(tuple(int(x) for x in row) for row in table),
    )


def dp_count(ground: SetWord, k: int, p: int, r: int) -> int:
    """Number of k-subsets of `ground` with element sum = r (mod p)."""
    return build_dp_table(ground, k, p).count(k, r)


@dataclass(frozen=True)
class CodeStatementResult:
    """Coverage check of a residue code: every (avoid-set, element) pair is hit."""

    ok: bool
    witness: Optional[tuple[SetWord, int]]
    pairs_checked: int
    hypotheses_ok: bool

    def to_obj(self) -> dict:
        return {
            "ok": self.ok,
            "witness": None
            if self.witness is None
            else {"Y": elements_of(self.witness[0]), "y": self.witness[1]},
            "pairs_checked": self.pairs_checked,
            "hypotheses_ok": self.hypotheses_ok,
        }


def check_code_statement(
    ground: int, m: int, k: int, p: int, d: int
) -> CodeStatementResult:
    """For every m-set Y and y in Y: some k-subset of [ground] - Y completes
    with y to a code member (element sum d mod p).

    Decided by exact counting, one residue table per Y.  The size-window
    hypotheses under which this is guaranteed are evaluated and reported, but
    parameters outside them are still checked (exploratory use).
    """
    n = ground - m
    window = 8 * ground - 15
    hypotheses_ok = (
        n >= 1
        and k * k >= window
        and k <= n
        and (n - k) * (n - k) >= window
    )
    pairs = 0
    univ = full_mask(ground)
    for avoid in layer(ground, m):
        table = build_dp_table(univ & ~avoid, k, p)
        for y in elements_of(avoid):
            pairs += 1
            if table.count(k, (d - y) % p) < 1:
                return CodeStatementResult(False, (avoid, y), pairs, hypotheses_ok)
    return CodeStatementResult(True, None, pairs, hypotheses_ok)


@dataclass(frozen=True)
class ConditionsResult:
    """Scan of the two family conditions used by the resampled construction.

    Violations are (kind, set, count) triples: kind "undersupplied" for an
    (m-1)-set with fewer than 2 supersets, "oversubscribed" for an (m+1)-set
    with at least m subsets, each class in lexicographic order.
    """

    ok: bool
    violations: tuple[tuple[str, SetWord, int], ...]

    def to_obj(self) -> dict:
        return {
            "ok": self.ok,
            "violations": [
                {"kind": kind, "set": elements_of(s), "count": cnt}
                for kind, s, cnt in self.violations
            ],
        }


def check_conditions(fam: WeightedFamily) -> ConditionsResult:
    """Every (m-1)-set has >= 2 supersets in fam; every (m+1)-set <= m-1 subsets."""
    if not fam.is_explicit:
        raise ValueError("conditions are checked on explicit families")
    ground, m = fam.ground_n, fam.weight
    univ = full_mask(ground)
    sup_count: dict[SetWord, int] = {}
    sub_count: dict[SetWord, int] = {}
    for f in fam.members:
        for el in elements_of(f):
            s = f & ~(1 << (el - 1))
            sup_count[s] = sup_count.get(s, 0) + 1
        rest = univ & ~f
        while rest:
            low = rest & -rest
            t = f | low
            sub_count[t] = sub_count.get(t, 0) + 1
            rest ^= low

    def lex(mask: SetWord) -> tuple[int, ...]:
        return tuple(elements_of(mask))

    under = sorted(
        (s for s in layer(ground, m - 1) if sup_count.get(s, 0) < 2), key=lex
    )
    over = sorted((t for t, cnt in sub_count.items() if cnt >= m), key=lex)
    violations = tuple(
        [("undersupplied", s, sup_count.get(s, 0)) for s in under]
        + [("oversubscribed", t, sub_count[t]) for t in over]
    )
    return ConditionsResult(not violations, violations)


class UnknownShape(Exception):
    """The coloring does not match any construction this verifier certifies."""


def _detect_shape(coloring: Coloring) -> tuple[str, int, int]:
    """Classify a structured coloring; returns (shape, k-or-0, m).

    "spread": layers {k, k+3, ..., k+m+1} with extra sets of size k+1 (the
    pair-code and mod-p colorings; m = 2 collapses the block to {k, k+3}).
    "low-block": layers {0..m-2, m+1} with extra sets of size m (the
    resampled coloring).
    """
    if coloring.is_dense:
        raise UnknownShape("dense coloring carries no construction shape")
    layers = sorted(coloring.blue_layers)
    extra_sizes = {s.bit_count() for s in coloring.blue_extra}
    if coloring.blue_code is not None:
        extra_sizes.add(coloring.blue_code.weight)
    if len(extra_sizes) != 1:
        raise UnknownShape(f"expected one extra layer, got sizes {sorted(extra_sizes)}")
    w = next(iter(extra_sizes))

    if len(layers) >= 2 and layers[0] == w - 1 and layers[1:] == list(
        range(w + 2, w + len(layers) + 1)
    ):
        # layers are {k} + {k+3 .. k+m+1} with k = w - 1, so m = len(layers)
        return "spread", w - 1, len(layers)
    m = w
    if layers == list(range(0, m - 1)) + [m + 1]:
        return "low-block", 0, m
    raise UnknownShape(f"layers {layers} with extras at {w} match no known shape")


def certify_blue_free(coloring: Coloring, m: int, kind) -> CheckResult:
    """Certify that the blue side contains no copy of Q_m (weak, hence induced).

    Shape-aware: the blue layers force the size of every image level, so the
    only freedom a copy would have sits on the partial layer, where it is
    killed by the pairwise-distance or subset-count property.  The kind
    argument is accepted for interface symmetry; certificates cover weak
    copies, which subsume induced ones.
    """
    shape, k, shape_m = _detect_shape(coloring)
    if m != shape_m:
        raise ValueError(f"coloring shape certifies m = {shape_m}, asked for {m}")
    if shape == "spread":
        # Singleton images are forced onto the code layer and pairwise share a
        # forced bottom, so any copy needs two code sets at distance 2.
        if m < 2:
            raise ValueError("spread shape needs m >= 2")
        code = coloring.blue_code
        if code is not None:
            if code.modp_p is not None and code.modp_p >= coloring.ground_n:
                # One element-swap changes the residue sum by a nonzero amount
                # mod p, so distance-2 pairs cannot exist; nothing to scan.
                return CheckResult(
                    True,
                    detail=f"residue code mod {code.modp_p} >= N forbids distance-2 pairs",
                )
            res = check_min_distance(code, 4)
        else:
            fam = WeightedFamily(
                coloring.ground_n, k + 1, members=tuple(sorted(coloring.blue_extra))
            )
            res = check_min_distance(fam, 4)
        if not res.ok:
            return res
        return CheckResult(True, detail=f"forced sizes + distance >= 4 on layer {k + 1}")

    # low-block: the m level-(m-1) images are forced into the partial layer
    # and under a common top of size m+1, so the subset-count condition kills
    # every copy.
    fam = WeightedFamily(
        coloring.ground_n, m, members=tuple(sorted(coloring.blue_extra))
    )
    result = check_conditions(fam)
    over = [v for v in result.violations if v[0] == "oversubscribed"]
    if over:
        return CheckResult(False, (over[0][1],), "a top hosts m family members")
    return CheckResult(True, detail="forced sizes + subset cap on the partial layer")


def certify_red_singleton_bound(coloring: Coloring, n: int, m: int) -> CheckResult:
    """Red side of the resampled coloring cannot host Q_n: every candidate
    bottom on layer m-1 has at most n-1 red supersets on layer m.

    Counted directly from color lookups; equivalent to the family's
    at-least-2-supersets condition.
    """
    shape, _, shape_m = _detect_shape(coloring)
    if shape != "low-block" or shape_m != m:
        raise UnknownShape("red-side certificate applies to the resampled shape")
    ground = coloring.ground_n
    if ground != n + m:
        raise ValueError(f"coloring ground {ground} != n + m = {n + m}")
    for s in layer(ground, m - 1):
        red = 0
        for el in range(1, ground + 1):
            bit = 1 << (el - 1)
            if s & bit:
                continue
            if coloring.color_of(s | bit) is Color.RED:
                red += 1
        if red > n - 1:
            return CheckResult(False, (s,), f"{red} red supersets > {n - 1}")
    return CheckResult(True, detail="every bottom has <= n-1 red supersets")


@dataclass(frozen=True)
class LllReport:
    """Both sides of the asymmetric local-lemma inequality, at high precision.

    P_AS / P_BT are the exact closed-form probabilities that an (m-1)-set is
    undersupplied / an (m+1)-set oversubscribed under independent
    Bernoulli(p) membership; rhs_* are the corresponding event-weight bounds
    with the dependency counts deps_* (pairs: A-events, B-events).
    """

    n: int
    m: int
    p_inclusion: float
    x_y: float
    x_z: float
    p_as: float
    p_bt: float
    rhs_as: float
    rhs_bt: float
    satisfied_as: bool
    satisfied_bt: bool
    deps_as: tuple[int, int]
    deps_bt: tuple[int, int]

    def to_obj(self) -> dict:
        return {
            "n": self.n,
            "m": self.m,
            "p_inclusion": self.p_inclusion,
            "x_y": self.x_y,
            "x_z": self.x_z,
            "P_AS": self.p_as,
            "P_BT": self.p_bt,
            "rhs_AS": self.rhs_as,
            "rhs_BT": self.rhs_bt,
            "satisfied_AS": self.satisfied_as,
            "satisfied_BT": self.satisfied_bt,
            "deps_AS": list(self.deps_as),
            "deps_BT": list(self.deps_bt),
        }


def lll_inequality_report(
    n: int,
    m: int,
    p_incl: Optional[float] = None,
    x_y: Optional[float] = None,
    x_z: Optional[float] = None,
    dps: int = 60,
) -> LllReport:
    """Evaluate the local-lemma inequality for both event classes.

    An undersupplied event depends on n(n+1)/2 oversubscription events and
    (m-1)(n+1) other undersupply events; an oversubscription event depends on
    m(m+1)/2 undersupply events and (n-1)(m+1) other oversubscriptions.
    Computed with 60-digit arithmetic so boundary parameters are not
    misclassified; no satisfaction value is asserted here (at moderate n the
    undersupply side genuinely fails).
    """
    if m < 2 or n < 2:
        raise ValueError("need n, m >= 2")
    with mpmath.workdps(dps):
        if p_incl is None:
            p = (4 * (m + 1) * (mpmath.mpf(n) ** 2 - 1) * mpmath.e) ** (
                mpmath.mpf(-1) / m
            )
        else:
            p = mpmath.mpf(p_incl)
        y = mpmath.mpf(x_y) if x_y is not None else mpmath.mpf(1) / (4 * (m - 1) * (n + 1))
        z = mpmath.mpf(x_z) if x_z is not None else mpmath.mpf(1) / (4 * (n - 1) * (n + 1))

        q = 1 - p
        p_as = (n + 1) * q**n * p + q ** (n + 1)
        p_bt = (m + 1) * p**m * q + p ** (m + 1)

        deps_as = ((m - 1) * (n + 1), (n + 1) * n // 2)
        deps_bt = ((m + 1) * m // 2, (n - 1) * (m + 1))
        rhs_as = y * (1 - z) ** deps_as[1] * (1 - y) ** deps_as[0]
        rhs_bt = z * (1 - y) ** deps_bt[0] * (1 - z) ** deps_bt[1]

        return LllReport(
            n,
            m,
            float(p),
            float(y),
            float(z),
            float(p_as),
            float(p_bt),
            float(rhs_as),
            float(rhs_bt),
            bool(p_as <= rhs_as),
            bool(p_bt <= rhs_bt),
            deps_as,
            deps_bt,
        )


def verify_embedding(rec: EmbedRecord, coloring: Coloring) -> CheckResult:
    """Re-check an embedding record against its coloring from scratch.

    Uses only color lookups and subset tests: image form and level count,
    level monotonicity under inclusion, strict-containment equivalence between
    pattern and image, blocking-chain shape and blueness, chain-below-image,
    and redness of every assigned image.  Returns the first violated property.
    """
    n, k = rec.n, rec.k
    if coloring.ground_n != n + k:
        raise ValueError("record and coloring dimensions do not match")
    size = 1 << n
    if not (len(rec.images) == len(rec.levels) == len(rec.chains) == size):
        return CheckResult(False, None, "table sizes do not match 2^n")
    prefixes = [rec.perm.prefix_mask(i) for i in range(k + 1)]

    for a in range(size):
        lvl = rec.levels[a]
        img = rec.images[a]
        if not 0 <= lvl <= k + 1:
            return CheckResult(False, (a,), "level out of range")
        if lvl == k + 1:
            if img is not None:
                return CheckResult(False, (a,), "failed level but image assigned")
        else:
            if img is None:
                return CheckResult(False, (a,), "image missing at non-failure level")
            if img != a | prefixes[lvl]:
                return CheckResult(False, (a,), "image is not A + permuted prefix")
            if img & full_mask(n) != a:
                return CheckResult(False, (a,), "image meets [n] beyond A")
            if coloring.color_of(img) is not Color.RED:
                return CheckResult(False, (a,), "image is not red")

    for a in range(size):
        for b in iter_submasks(a):
            if b != a and rec.levels[b] > rec.levels[a]:
                return CheckResult(False, (b, a), "level not monotone under inclusion")

    for a in range(size):
        if rec.images[a] is None:
            continue
        for b in range(size):
            if b == a or rec.images[b] is None:
                continue
            want = is_proper_subset(b, a)
            got = is_proper_subset(rec.images[b], rec.images[a])
            if want != got:
                return CheckResult(
                    False, (b, a), "strict containment not preserved exactly"
                )

    for a in range(size):
        chain = rec.chains[a]
        if len(chain) != min(rec.levels[a], k + 1):
            return CheckResult(False, (a,), "chain length differs from level")
        for i, s in enumerate(chain):
            if coloring.color_of(s) is not Color.BLUE:
                return CheckResult(False, (a,), "chain contains a red set")
            if s & ~full_mask(n) != prefixes[i]:
                return CheckResult(False, (a,), "chain step has wrong top part")
        if 1 <= rec.levels[a] <= k:
            if not is_subset(chain[rec.levels[a] - 1], rec.images[a]):
                return CheckResult(False, (a,), "chain top not below the image")

    return CheckResult(True, detail="all embedding properties verified")
