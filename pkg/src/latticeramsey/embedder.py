"""Recursive embedding of Q_n into the red side of a colored Q_{n+k}.

Given a permutation of the top block [n+1, n+k], the embedder processes the
subsets A of [n] in cardinality-then-colex order and tries to map each one to
the red set A + {first few permuted top elements}, extending past any blue
sets it hits.  Per subset it records the image (or a failure marker), the
number of top elements consumed (the "level"), and the chain of blue sets
swallowed along the way (the "blocking chain").  A failed run yields a
blocking chain of length k+1 from which the permutation can be read back off,
which is what makes the all-permutation sweep and the factorial counting
bound work.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from math import e, factorial, floor, lgamma, log2
from typing import Iterator, Optional

from .lattice import (
    Chain,
    Coloring,
    Permutation,
    SetWord,
    elements_of,
    full_mask,
    iter_submasks,
    mask_of,
    subsets_by_rank,
)

MAX_BASE_DIM = 24
MAX_WIDTH = 20
MAX_SWEEP_WIDTH = 8


@dataclass(frozen=True)
class EmbedRecord:
    """Per-subset tables produced by one embedding run.

    All three tables are indexed by the bitmask of A over [n].  images[A] is
    the assigned red set, or None on failure; levels[A] counts the top-block
    elements included in the image (k+1 marks failure); chains[A] is the
    blocking chain of blue sets encountered for A and its subsets.
    """

    n: int
    k: int
    perm: Permutation
    images: tuple[Optional[SetWord], ...]
    levels: tuple[int, ...]
    chains: tuple[Chain, ...]

    @property
    def succeeded(self) -> bool:
        return all(img is not None for img in self.images)

    def first_failure(self) -> Optional[SetWord]:
        """First failed subset in processing order, or None."""
        for a in subsets_by_rank(self.n):
            if self.images[a] is None:
                return a
        return None

    def failure_chain(self) -> Optional[Chain]:
        a = self.first_failure()
        return None if a is None else self.chains[a]

    def to_obj(self) -> dict:
        return {
            "n": self.n,
            "k": self.k,
            "perm": list(self.perm.image),
            "images": [
                None if img is None else elements_of(img) for img in self.images
            ],
            "levels": list(self.levels),
            "chains": [c.to_obj() for c in self.chains],
        }

    @classmethod
    def from_obj(cls, obj: dict) -> "EmbedRecord":
        n, k = obj["n"], obj["k"]
        return cls(
            n,
            k,
            Permutation(n, k, tuple(obj["perm"])),
            tuple(
                None if img is None else mask_of(img) for img in obj["images"]
            ),
            tuple(obj["levels"]),
            tuple(Chain.from_obj(c) for c in obj["chains"]),
        )


def embed_with_permutation(
    coloring: Coloring, n: int, k: int, perm: Permutation
) -> EmbedRecord:
    """Run the recursive embedding for one permutation of the top block.

    Ties are broken deterministically: failure propagates from the colex-first
    failed proper subset, and the blocking-chain prefix is copied from the
    colex-first proper subset attaining the maximum level.
    """
    if coloring.ground_n != n + k:
        raise ValueError(
            f"coloring is over [{coloring.ground_n}], expected [{n + k}]"
        )
    if perm.base != n or perm.width != k:
        raise ValueError("permutation dimensions do not match (n, k)")
    if n > MAX_BASE_DIM:
        raise ValueError(f"base dimension capped at {MAX_BASE_DIM}")
    if k > MAX_WIDTH:
        raise ValueError(f"width capped at {MAX_WIDTH}")

    size = 1 << n
    prefixes = [perm.prefix_mask(i) for i in range(k + 1)]
    is_blue = coloring.is_blue

    images: list[Optional[SetWord]] = [None] * size
    levels = [0] * size
    chains: list[Optional[Chain]] = [None] * size
    failed = bytearray(size)

    for a in subsets_by_rank(n):
        # Failure propagates from the colex-first failed proper subset.
        beta = 0
        base_sub: Optional[SetWord] = None
        propagate: Optional[SetWord] = None
        if a:
            for s in iter_submasks(a):
                if s == a:
                    continue
                if failed[s]:
                    propagate = s
                    break
                if base_sub is None or levels[s] > beta:
                    beta = levels[s]
                    base_sub = s
        if propagate is not None:
            failed[a] = 1
            levels[a] = k + 1
            chains[a] = chains[propagate]
            continue

        level = k + 1
        for i in range(beta, k + 1):
            if not is_blue(a | prefixes[i]):
                level = i
                break
        levels[a] = level
        if level <= k:
            images[a] = a | prefixes[level]
        else:
            failed[a] = 1

        prefix_chain: tuple[SetWord, ...] = ()
        if a and beta > 0:
            prefix_chain = chains[base_sub].sets  # type: ignore[union-attr]
        new_blue = tuple(a | prefixes[i] for i in range(beta, min(level, k + 1)))
        chains[a] = Chain(prefix_chain + new_blue)

    return EmbedRecord(
        n,
        k,
        perm,
        tuple(images),
        tuple(levels),
        tuple(chains),  # type: ignore[arg-type]
    )


def recover_permutation(chain: Chain, n: int) -> list[int]:
    """Read the permutation back off a blocking chain.

    The chain must have the blocking shape: chain[i] minus [n] has exactly i
    elements and consecutive sets differ by one top-block element.  Returns
    [pi(n+1), ..., pi(n+len-1)].
    """
    base = full_mask(n)
    out: list[int] = []
    for i, s in enumerate(chain):
        top = s & ~base
        if top.bit_count() != i:
            raise ValueError(
                f"chain set {elements_of(s)} has {top.bit_count()} top elements, "
                f"expected {i}"
            )
        if i == 0:
            continue
        diff = (s & ~chain[i - 1]) & ~base
        if diff.bit_count() != 1:
            raise ValueError(
                f"chain step {i} adds {diff.bit_count()} top elements, expected 1"
            )
        out.append(diff.bit_length())
    return out


@dataclass(frozen=True)
class SweepReport:
    """Outcome of running the embedder over many permutations.

    If any permutation produced a full embedding, success holds the first one
    (in permutation rank order) and the failure data covers only earlier
    permutations.  Otherwise failures holds one blocking chain per permutation
    and the report records whether the map perm -> (chain bottom, chain top)
    was injective, listing any colliding permutation pairs.
    """

    n: int
    k: int
    mode: str
    perms_run: int
    success: Optional[EmbedRecord]
    failures: tuple[tuple[tuple[int, ...], Chain], ...]
    collisions: tuple[tuple[tuple[int, ...], tuple[int, ...]], ...]
    injective: Optional[bool]
    recover_ok: bool

    def to_obj(self) -> dict:
        return {
            "n": self.n,
            "k": self.k,
            "mode": self.mode,
            "perms_run": self.perms_run,
            "success": None if self.success is None else self.success.to_obj(),
            "failures": [
                {"perm": list(p), "chain": c.to_obj()} for p, c in self.failures
            ],
            "collisions": [[list(p), list(q)] for p, q in self.collisions],
            "injective": self.injective,
            "recover_ok": self.recover_ok,
        }


def _sampled_perm_images(
    n: int, k: int, count: int, seed: int
) -> list[tuple[int, ...]]:
    rng = random.Random(seed)
    values = list(range(n + 1, n + k + 1))
    seen = set()
    out = []
    for _ in range(count):
        img = tuple(rng.sample(values, k))
        if img not in seen:
            seen.add(img)
            out.append(img)
    return out


def sweep_permutations(
    coloring: Coloring,
    n: int,
    k: int,
    mode: str = "all",
    sample_count: int = 0,
    seed: int = 0,
) -> SweepReport:
    """Run the embedder per permutation and summarize.

    mode="all" iterates all k! permutations in lexicographic rank order
    (guarded at k <= 8); mode="sample" draws sample_count permutations from
    the given seed, deduplicated in draw order.
    """
    if mode == "all":
        if k > MAX_SWEEP_WIDTH:
            raise ValueError(f"all-permutations sweep guarded at k <= {MAX_SWEEP_WIDTH}")
        perm_images: Iterator[tuple[int, ...]] = itertools.permutations(
            range(n + 1, n + k + 1)
        )
        mode_desc = "all"
    elif mode == "sample":
        if sample_count < 1:
            raise ValueError("sample mode needs sample_count >= 1")
        perm_images = iter(_sampled_perm_images(n, k, sample_count, seed))
        mode_desc = f"sample({sample_count}, seed={seed})"
    else:
        raise ValueError(f"unknown sweep mode {mode!r}")

    failures: list[tuple[tuple[int, ...], Chain]] = []
    recover_ok = True
    run = 0
    for img in perm_images:
        perm = Permutation(n, k, img)
        rec = embed_with_permutation(coloring, n, k, perm)
        run += 1
        if rec.succeeded:
            return SweepReport(
                n, k, mode_desc, run, rec, tuple(failures), (), None, recover_ok
            )
        chain = rec.failure_chain()
        assert chain is not None
        if tuple(recover_permutation(chain, n)) != img:
            recover_ok = False
        failures.append((img, chain))

    endpoint_owner: dict[tuple[SetWord, SetWord], tuple[int, ...]] = {}
    collisions: list[tuple[tuple[int, ...], tuple[int, ...]]] = []
    for img, chain in failures:
        key = (chain[0], chain[len(chain) - 1])
        if key in endpoint_owner:
            collisions.append((endpoint_owner[key], img))
        else:
            endpoint_owner[key] = img
    return SweepReport(
        n,
        k,
        mode_desc,
        run,
        None,
        tuple(failures),
        tuple(collisions),
        not collisions,
        recover_ok,
    )


LOG2_E = log2(e)


@dataclass(frozen=True)
class BoundReport:
    """Exact comparison of k! against 2^(2(n+k)) for k = floor(c*n/log2 n).

    contradiction is decided exactly (big integers when the log-domain margin
    is thin).  The report also carries the classical lower estimate
    k*(log2 k - log2 e) on log2 k!, and whether the 0.8797-coefficient
    shortcut relating it to k*log2 k holds at this k; neither is asserted
    anywhere, they are informational.
    """

    n: int
    c: float
    k: int
    exponent: int
    log2_factorial: float
    contradiction: bool
    method: str
    stirling_lower_bits: float
    stirling_coeff_ok: bool

    def to_obj(self) -> dict:
        return {
            "n": self.n,
            "c": self.c,
            "k": self.k,
            "exponent": self.exponent,
            "log2_factorial": self.log2_factorial,
            "contradiction": self.contradiction,
            "method": self.method,
            "stirling_lower_bits": self.stirling_lower_bits,
            "stirling_coeff_ok": self.stirling_coeff_ok,
        }


def _log2_factorial(k: int) -> float:
    return lgamma(k + 1) / 0.6931471805599453


def _factorial_exceeds_power(k: int, exponent: int) -> tuple[bool, str]:
    """Exactly decide k! > 2^exponent, with a float fast path."""
    approx = _log2_factorial(k)
    if approx - exponent > 1e-3:
        return True, "log-domain"
    if approx - exponent < -1e-3:
        return False, "log-domain"
    f = factorial(k)
    bl = f.bit_length()
    if bl > exponent + 1:
        return True, "exact"
    if bl < exponent + 1:
        return False, "exact"
    return f != (1 << exponent), "exact"


def counting_bound(n: int, c: float) -> BoundReport:
    """Decide whether k = floor(c*n/log2 n) permutations out-count chain pairs."""
    if n < 2:
        raise ValueError("n must be >= 2")
    k = floor(c * n / log2(n))
    exponent = 2 * (n + k)
    contradiction, method = _factorial_exceeds_power(k, exponent)
    if k >= 1:
        stirling = k * (log2(k) - LOG2_E)
        coeff_ok = 0.8797 * k * log2(k) <= stirling
    else:
        stirling = 0.0
        coeff_ok = False
    return BoundReport(
        n,
        c,
        k,
        exponent,
        _log2_factorial(k),
        contradiction,
        method,
        stirling,
        coeff_ok,
    )


def minimal_k(n: int) -> int:
    """Least k with k! > 2^(2(n+k)), decided exactly.

    The gap log2 k! - 2(n+k) grows by log2 k - 2 per step, so it is monotone
    beyond k = 4; a log-domain scan locates the crossing and big-integer
    comparisons pin it down.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    k = 1
    while _log2_factorial(k) - 2 * (n + k) <= -1.0:
        k += 1
    # Back up to cover float slack, then confirm exactly going forward.
    k = max(1, k - 2)
    f = factorial(k)
    while True:
        e = 2 * (n + k)
        bl = f.bit_length()
        if bl > e + 1 or (bl == e + 1 and f != 1 << e):
            return k
        k += 1
        f *= k
