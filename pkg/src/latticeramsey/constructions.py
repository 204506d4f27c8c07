"""Lower-bound colorings of the Boolean lattice.

Four families of constructions live here:

* layered colorings (whole layers blue / red);
* a greedy constant-weight pair code: one set C(y, z) per ordered pair of
  ground elements, with y in, z out, pairwise symmetric difference >= 4,
  yielding a coloring of Q_{n+2} whose blue side has no copy of Q_2;
* a residue-coded constant-weight family ("mod-p code") and its coloring of
  Q_{n+m}, with a constructive witness routine backed by a subset-sum solver
  over a prime modulus;
* a random family of m-sets realized by event resampling: every (m-1)-set
  must gain at least two supersets while every (m+1)-set keeps at most m-1
  subsets, which is exactly what the blue/red freeness arguments consume.

A refuter shows the two resampling conditions are jointly unsatisfiable at
weight 2.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from math import comb, e, isqrt
from typing import Iterable, Optional

from .lattice import (
    Coloring,
    SetWord,
    WeightedFamily,
    elements_of,
    full_mask,
    layer,
    mask_of,
    sorted_family,
)


def layered_coloring(
    m: int, n: int, blue_layer_indices: Optional[Iterable[int]] = None
) -> Coloring:
    """Coloring of Q_{m+n-1} with m blue layers and n red layers.

    Defaults to the top m layers blue.  Such a coloring has no blue chain of
    m+1 sets and no red chain of n+1 sets, hence neither a blue Q_m nor a red
    Q_n, even as weak copies.
    """
    if m < 1 or n < 1:
        raise ValueError("layer counts must be >= 1")
    ground = m + n - 1
    if blue_layer_indices is None:
        blue = set(range(n, ground + 1))
    else:
        blue = set(blue_layer_indices)
        if len(blue) != m:
            raise ValueError(f"expected exactly {m} blue layer indices, got {len(blue)}")
        for s in blue:
            if not 0 <= s <= ground:
                raise ValueError(f"blue layer {s} outside [0, {ground}]")
    return Coloring.structured(ground, blue_layers=blue)


class GreedyStuck(Exception):
    """The greedy pair-code scan ran out of candidates for some ordered pair."""

    def __init__(self, pair: tuple[int, int]):
        super().__init__(f"no candidate left for ordered pair {pair}")
        self.pair = pair


@dataclass(frozen=True)
class PairCode:
    """One (k+1)-set per ordered pair (y, z) of [n+2], pairwise distance >= 4.

    assignments is in lexicographic order of the ordered pairs.  The
    feasibility fields record the counting argument that guarantees the greedy
    scan completes: candidates per pair versus the sets blocked by previously
    accepted ones.
    """

    n: int
    k: int
    assignments: tuple[tuple[int, int, SetWord], ...]
    candidates_per_pair: int
    max_blocked: int

    @property
    def feasible(self) -> bool:
        return self.candidates_per_pair > self.max_blocked

    def masks(self) -> list[SetWord]:
        return [m for _, _, m in self.assignments]

    def to_obj(self) -> dict:
        return {
            "n": self.n,
            "k": self.k,
            "assignments": [
                {"y": y, "z": z, "set": elements_of(m)}
                for y, z, m in self.assignments
            ],
            "candidates_per_pair": self.candidates_per_pair,
            "max_blocked": self.max_blocked,
        }


def greedy_pair_code(n: int) -> PairCode:
    """Greedily assign C(y, z) for every ordered pair over [n+2].

    Pairs are visited in lexicographic order; for each, candidates of size
    k+1 containing y but not z are scanned in colex order and the first one at
    symmetric difference >= 4 from everything already accepted is taken.
    Distance-2 neighbors of accepted sets are tracked in a blocked set, so the
    scan is first-fit over unblocked candidates.  Raises GreedyStuck if a pair
    has no candidate left (cannot happen once C(n, k) out-counts the blocked
    sets, which holds from n = 18 up).
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    k = n // 2
    ground = n + 2
    candidates = comb(n, k)
    max_blocked = ((n + 2) * (n + 1) - 1) * (1 + k * (n - k))

    blocked: set[SetWord] = set()
    assignments: list[tuple[int, int, SetWord]] = []
    ground_bits = full_mask(ground)

    for y in range(1, ground + 1):
        ybit = 1 << (y - 1)
        for z in range(1, ground + 1):
            if z == y:
                continue
            allowed = [x for x in range(1, ground + 1) if x != y and x != z]
            chosen: Optional[SetWord] = None
            # colex over k-subsets of the allowed elements = colex over C
            for idx_mask in layer(n, k):
                cand = ybit
                rest = idx_mask
                while rest:
                    low = rest & -rest
                    cand |= 1 << (allowed[low.bit_length() - 1] - 1)
                    rest ^= low
                if cand not in blocked:
                    chosen = cand
                    break
            if chosen is None:
                raise GreedyStuck((y, z))
            assignments.append((y, z, chosen))
            blocked.add(chosen)
            inside = elements_of(chosen)
            outside = elements_of(ground_bits & ~chosen)
            for x in inside:
                for w in outside:
                    blocked.add((chosen & ~(1 << (x - 1))) | (1 << (w - 1)))

    return PairCode(n, k, tuple(assignments), candidates, max_blocked)


def induced_q2_coloring(n: int) -> Coloring:
    """Coloring of Q_{n+2}: layers k and k+3 blue plus the greedy pair code.

    Any blue copy of Q_2 would need two size-(k+1) blue sets at symmetric
    difference 2, which the pair code rules out.
    """
    code = greedy_pair_code(n)
    ground = n + 2
    return Coloring.structured(
        ground, blue_layers={code.k, code.k + 3}, blue_extra=code.masks()
    )


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p < 4:
        return True
    if p % 2 == 0:
        return False
    f = 3
    while f * f <= p:
        if p % f == 0:
            return False
        f += 2
    return True


def find_prime(ground: int) -> int:
    """Smallest prime p with ground <= p < 2*(ground-1).

    Such a prime exists for every ground > 3 (Bertrand's postulate).
    """
    if ground <= 3:
        raise ValueError("ground size must exceed 3")
    for p in range(ground, 2 * (ground - 1)):
        if _is_prime(p):
            return p
    raise AssertionError(f"no prime in [{ground}, {2 * (ground - 1)})")


def modp_code(ground: int, k: int, d: int, p: int) -> WeightedFamily:
    """Residue-coded family of (k+1)-subsets of [ground] with sum = d (mod p).

    Requires ground <= p < 2*(ground-1) and 1 <= d <= p.  Two distinct members
    can never be one element-swap apart: a swap x -> y changes the sum by a
    nonzero residue since 1 <= x, y <= ground <= p; hence all pairwise
    symmetric differences are at least 4.
    """
    if not _is_prime(p):
        raise ValueError(f"{p} is not prime")
    if not ground <= p < 2 * (ground - 1):
        raise ValueError(f"prime {p} outside [{ground}, {2 * (ground - 1)})")
    if not 1 <= d <= p:
        raise ValueError(f"residue {d} outside [1, {p}]")
    if k + 1 > ground:
        raise ValueError(f"weight {k + 1} exceeds ground size {ground}")
    return WeightedFamily(ground, k + 1, modp_p=p, modp_d=d)


class NoSolutionError(Exception):
    """No subset of the given residues attains the target sum."""


def olson_subset_sum(values: Iterable[int], p: int, target: int) -> list[int]:
    """A subset of the given distinct residues summing to target mod p.

    Dynamic programming over reachable residues with parent pointers; elements
    are processed in sorted order and the first subset reaching a residue is
    kept, so the result is deterministic (and the empty subset is returned for
    target 0).  Whenever len(values) >= sqrt(4p - 3), every residue is
    attainable; below that threshold NoSolutionError is possible.
    """
    vals = sorted(values)
    if len(set(vals)) != len(vals):
        raise ValueError("values must be distinct")
    for v in vals:
        if not 1 <= v <= p:
            raise ValueError(f"value {v} outside [1, {p}]")
    target %= p
    parent: dict[int, Optional[tuple[int, int]]] = {0: None}
    for v in vals:
        snapshot = list(parent.keys())
        for r in snapshot:
            nr = (r + v) % p
            if nr not in parent:
                parent[nr] = (r, v)
    if target not in parent:
        raise NoSolutionError(
            f"no subset of {vals} sums to {target} mod {p}"
        )
    out: list[int] = []
    r = target
    while parent[r] is not None:
        r_prev, v = parent[r]  # type: ignore[misc]
        out.append(v)
        r = r_prev
    return sorted(out)


def _ceil_sqrt(x: int) -> int:
    if x <= 0:
        return 0
    return isqrt(x - 1) + 1


def code_witness(
    ground: int,
    m: int,
    k: int,
    code: WeightedFamily,
    avoid: SetWord,
    y: int,
) -> SetWord:
    """A k-set C avoiding the m-set `avoid` with C + {y} in the code.

    Constructive: with l = ceil(sqrt(8*ground - 15)), pair the l smallest and
    l largest elements outside `avoid`, fill with the colex-first k-l middle
    elements, and choose which pairs contribute their large element by solving
    a subset-sum over the pairwise differences mod p.  Requires the size
    window sqrt(8*ground-15) <= k <= n - sqrt(8*ground-15) where n =
    ground - m, which guarantees the subset-sum instance is solvable.
    """
    if code.modp_p is None:
        raise ValueError("code must be a mod-p family")
    if code.ground_n != ground or code.weight != k + 1:
        raise ValueError("code parameters do not match (ground, k)")
    if avoid.bit_count() != m or avoid >> ground:
        raise ValueError(f"avoid must be an m-set over [{ground}]")
    if not avoid & (1 << (y - 1)):
        raise ValueError(f"element {y} is not in the avoided set")
    n = ground - m
    window = 8 * ground - 15
    if k * k < window:
        raise ValueError(f"k = {k} below sqrt({window})")
    if (n - k) * (n - k) < window or k > n:
        raise ValueError(f"k = {k} above {n} - sqrt({window})")

    p, d = code.modp_p, code.modp_d
    l = _ceil_sqrt(window)
    xs = elements_of(full_mask(ground) & ~avoid)
    lows = xs[:l]
    highs = xs[n - l:]
    middle = xs[l: n - l]
    fill = middle[: k - l]

    diffs = [highs[l - 1 - i] - lows[i] for i in range(l)]  # b_i - a_i, i = 1..l
    target = (d - y - sum(fill) - sum(lows)) % p
    chosen = set(olson_subset_sum(diffs, p, target))

    picks = []
    for i in range(l):
        b_i = highs[l - 1 - i]
        a_i = lows[i]
        picks.append(b_i if (b_i - a_i) in chosen else a_i)
    c_mask = mask_of(fill + picks)

    # re-verify the postcondition on every call
    if c_mask.bit_count() != k or c_mask & avoid:
        raise AssertionError("witness construction broke its size/disjointness contract")
    if not code.contains(c_mask | (1 << (y - 1))):
        raise AssertionError("witness construction missed the code")
    return c_mask


@dataclass(frozen=True)
class WeakParams:
    """Derived parameters and hypothesis flags for the mod-p code coloring."""

    n: int
    m: int
    ground: int
    k: int
    p: int
    d: int
    k_min: int
    k_max: int
    witness_window_ok: bool  # k within [sqrt(8N-15), n - sqrt(8N-15)]
    strict_window_ok: bool  # k also within the tighter n-1 - sqrt(8N-15) bound
    threshold_ok: bool  # n >= sqrt(32m + 260) + 18

    def to_obj(self) -> dict:
        return {
            "n": self.n,
            "m": self.m,
            "N": self.ground,
            "k": self.k,
            "p": self.p,
            "d": self.d,
            "k_min": self.k_min,
            "k_max": self.k_max,
            "witness_window_ok": self.witness_window_ok,
            "strict_window_ok": self.strict_window_ok,
            "threshold_ok": self.threshold_ok,
        }


def weak_parameters(
    n: int,
    m: int,
    k: Optional[int] = None,
    d: Optional[int] = None,
    p: Optional[int] = None,
) -> WeakParams:
    """Resolve (k, p, d) for weak_construction and report hypothesis checks.

    The valid k window is sqrt(8N-15) <= k <= n - sqrt(8N-15) (the window the
    witness statement needs); k defaults to its smallest integer.  p defaults
    to the smallest prime at or above the ground size (denser codes) but may
    be overridden by any prime in the admissible window.  The tighter k window
    with n-1 in place of n and the threshold on n are reported, not enforced,
    so exploratory parameters are allowed.
    """
    if m < 2:
        raise ValueError("m must be >= 2")
    if n < m:
        raise ValueError("need n >= m")
    ground = n + m
    window = 8 * ground - 15
    k_min = _ceil_sqrt(window)
    k_max = n - k_min
    if k is None:
        if k_min > k_max:
            raise ValueError(
                f"empty k window: need sqrt({window}) <= k <= {n} - sqrt({window})"
            )
        k = k_min
    if p is None:
        p = find_prime(ground)
    elif not (_is_prime(p) and ground <= p < 2 * (ground - 1)):
        raise ValueError(f"override prime {p} outside [{ground}, {2 * (ground - 1)}) or composite")
    if d is None:
        d = p
    witness_ok = k * k >= window and k <= n and (n - k) * (n - k) >= window
    strict_ok = witness_ok and k <= n - 1 and (n - 1 - k) * (n - 1 - k) >= window
    threshold_ok = n >= 18 and (n - 18) * (n - 18) >= 32 * m + 260
    return WeakParams(
        n, m, ground, k, p, d, k_min, k_max, witness_ok, strict_ok, threshold_ok
    )


def weak_construction(
    n: int,
    m: int,
    k: Optional[int] = None,
    d: Optional[int] = None,
    p: Optional[int] = None,
) -> Coloring:
    """Coloring of Q_{n+m}: layers k and k+3 .. k+m+1 blue plus a mod-p code.

    The code sits on layer k+1 and is kept implicit (its layer is far too
    large to materialize at interesting sizes).  For m = 2 the upper layer
    block degenerates to the single layer k+3.
    """
    params = weak_parameters(n, m, k, d, p)
    code = modp_code(params.ground, params.k, params.d, params.p)
    blue_layers = {params.k} | set(range(params.k + 3, params.k + m + 2))
    return Coloring.structured(params.ground, blue_layers=blue_layers, blue_code=code)


@dataclass(frozen=True)
class LllConfig:
    """Parameters for the resampled random family of m-sets over [n+m].

    p_inclusion defaults to (4(m+1)(n^2-1)e)^(-1/m), the density at which the
    local-lemma bound closes; that only happens at very large n, so callers
    typically override it.  x_y and x_z are the event weights used by the
    inequality report.
    """

    n: int
    m: int
    p_inclusion: Optional[float] = None
    seed: int = 0
    max_resamples: int = 10**6
    x_y: Optional[float] = None
    x_z: Optional[float] = None

    def __post_init__(self):
        if self.m < 3:
            raise ValueError("need m >= 3 (weight 2 is refutable, see refute_m2)")
        if self.n < self.m:
            raise ValueError("need n >= m")
        if self.p_inclusion is not None and not 0 < self.p_inclusion < 1:
            raise ValueError("p_inclusion must lie in (0, 1)")
        if self.max_resamples < 1:
            raise ValueError("max_resamples must be >= 1")

    @property
    def density(self) -> float:
        if self.p_inclusion is not None:
            return self.p_inclusion
        return self.default_density(self.n, self.m)

    @staticmethod
    def default_density(n: int, m: int) -> float:
        return (4 * (m + 1) * (n * n - 1) * e) ** (-1.0 / m)

    @property
    def weight_a(self) -> float:
        return self.x_y if self.x_y is not None else 1.0 / (4 * (self.m - 1) * (self.n + 1))

    @property
    def weight_b(self) -> float:
        return self.x_z if self.x_z is not None else 1.0 / (4 * (self.n - 1) * (self.n + 1))


class ResampleBudgetExceeded(Exception):
    """The resampler hit max_resamples; carries the best-effort family."""

    def __init__(self, family: WeightedFamily, violations: int, resamples: int):
        super().__init__(
            f"{violations} events still violated after {resamples} resamples"
        )
        self.family = family
        self.violations = violations
        self.resamples = resamples


def _lex_key(mask: SetWord) -> tuple[int, ...]:
    return tuple(elements_of(mask))


def lll_family(cfg: LllConfig) -> WeightedFamily:
    """Sample and repair a family of m-sets over [n+m] by event resampling.

    Start from an independent Bernoulli(p) sample of the m-sets.  While some
    (m-1)-set has at most one superset in the family, or some (m+1)-set has at
    least m subsets, pick the first such event (undersupplied sets first, each
    class in lexicographic order) and redraw exactly the membership indicators
    it depends on.  Deterministic given the seed.  On success the family
    satisfies both conditions by construction; on budget exhaustion
    ResampleBudgetExceeded carries the partial family.
    """
    n, m = cfg.n, cfg.m
    ground = n + m
    p = cfg.density
    rng = random.Random(cfg.seed)

    fam: set[SetWord] = set()
    for f in layer(ground, m):
        if rng.random() < p:
            fam.add(f)

    # Membership counters for both event classes, maintained incrementally.
    sup_count: dict[SetWord, int] = {s: 0 for s in layer(ground, m - 1)}
    sub_count: dict[SetWord, int] = {}
    for f in fam:
        for el in elements_of(f):
            sup_count[f & ~(1 << (el - 1))] += 1
        rest = full_mask(ground) & ~f
        while rest:
            low = rest & -rest
            t = f | low
            sub_count[t] = sub_count.get(t, 0) + 1
            rest ^= low

    viol_a = {s for s, cnt in sup_count.items() if cnt <= 1}
    viol_b = {t for t, cnt in sub_count.items() if cnt >= m}

    def toggle(f: SetWord) -> None:
        adding = f not in fam
        delta = 1 if adding else -1
        if adding:
            fam.add(f)
        else:
            fam.remove(f)
        for el in elements_of(f):
            s = f & ~(1 << (el - 1))
            cnt = sup_count[s] + delta
            sup_count[s] = cnt
            if cnt <= 1:
                viol_a.add(s)
            else:
                viol_a.discard(s)
        rest = full_mask(ground) & ~f
        while rest:
            low = rest & -rest
            t = f | low
            cnt = sub_count.get(t, 0) + delta
            sub_count[t] = cnt
            if cnt >= m:
                viol_b.add(t)
            else:
                viol_b.discard(t)
            rest ^= low

    resamples = 0
    while viol_a or viol_b:
        if resamples >= cfg.max_resamples:
            raise ResampleBudgetExceeded(
                sorted_family(fam, ground, m),
                len(viol_a) + len(viol_b),
                resamples,
            )
        if viol_a:
            s = min(viol_a, key=_lex_key)
            indicators = [
                s | (1 << (el - 1))
                for el in range(1, ground + 1)
                if not s & (1 << (el - 1))
            ]
        else:
            t = min(viol_b, key=_lex_key)
            indicators = [t & ~(1 << (el - 1)) for el in elements_of(t)]
        resamples += 1
        for f in indicators:
            want = rng.random() < p
            if want != (f in fam):
                toggle(f)

    return sorted_family(fam, ground, m)


def probabilistic_coloring(n: int, m: int, fam: WeightedFamily) -> Coloring:
    """Coloring of Q_{n+m}: layers 0..m-2 and m+1 blue plus the family on layer m.

    The family must satisfy the two resampling conditions (every (m-1)-set has
    at least two supersets in it, every (m+1)-set at most m-1 subsets); those
    are exactly what the freeness arguments for both colors use.
    """
    if m < 2:
        raise ValueError("m must be >= 2")
    ground = n + m
    if fam.ground_n != ground or fam.weight != m:
        raise ValueError(f"family must have weight {m} over [{ground}]")
    if not fam.is_explicit:
        raise ValueError("family must be explicit")
    from .verifier import check_conditions

    result = check_conditions(fam)
    if not result.ok:
        raise ValueError(
            f"family violates the superset/subset conditions "
            f"({len(result.violations)} events); first: {result.violations[0]}"
        )
    blue_layers = set(range(0, m - 1)) | {m + 1}
    return Coloring.structured(ground, blue_layers=blue_layers, blue_extra=fam.members)


class PreconditionFailed(Exception):
    """A singleton with fewer than two supersets, named by the exception."""

    def __init__(self, singleton: int):
        super().__init__(f"element {singleton} has fewer than 2 supersets")
        self.singleton = singleton


@dataclass(frozen=True)
class Refutation:
    """Witness that weight-2 families cannot satisfy both conditions.

    Two family members through a common element force a 3-set containing
    m = 2 members, violating the at-most-m-1-subsets condition.
    """

    singleton: SetWord
    first: SetWord
    second: SetWord
    triple: SetWord
    subsets_in_family: int

    def to_obj(self) -> dict:
        return {
            "singleton": elements_of(self.singleton),
            "first": elements_of(self.first),
            "second": elements_of(self.second),
            "triple": elements_of(self.triple),
            "subsets_in_family": self.subsets_in_family,
        }


def refute_m2(fam: WeightedFamily) -> Refutation:
    """Exhibit the conflict between the two conditions at weight 2.

    Requires the superset condition to hold (every singleton of the ground set
    has at least two supersets in the family); raises PreconditionFailed
    naming the first deficient element otherwise.
    """
    if fam.weight != 2:
        raise ValueError("refutation applies to weight-2 families")
    if not fam.is_explicit:
        raise ValueError("family must be explicit")
    members = fam.members
    for el in range(1, fam.ground_n + 1):
        bit = 1 << (el - 1)
        if sum(1 for f in members if f & bit) < 2:
            raise PreconditionFailed(el)
    bit = 1
    first, second = [f for f in members if f & bit][:2]
    triple = first | second
    count = sum(1 for f in members if f & ~triple == 0)
    return Refutation(bit, first, second, triple, count)
