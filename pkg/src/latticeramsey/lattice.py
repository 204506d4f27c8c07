"""Subsets of [N] as machine-word bitmasks, and colorings of the Boolean lattice.

Conventions used throughout the package:

* The ground set is [N] = {1, ..., N} with N <= 64.  A subset ("SetWord") is a
  plain int: bit i-1 is set iff element i is present.
* For a fixed cardinality, increasing numeric order of the masks is exactly
  colex order on the sets.  Every enumeration in the package uses it, so runs
  are reproducible bit for bit.
* JSON encodes a set as a sorted 1-based integer array, and a dense coloring
  as a little-endian hex string: byte j of the decoded string holds the colors
  of the SetWords 8j .. 8j+7, bit s%8 being the color of SetWord s.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from math import comb
from typing import Iterable, Iterator, Optional

SetWord = int

MAX_GROUND = 64
MAX_DENSE_GROUND = 28


class Color(Enum):
    BLUE = "blue"
    RED = "red"


def mask_of(elements: Iterable[int]) -> SetWord:
    """Bitmask of a collection of 1-based elements."""
    m = 0
    for e in elements:
        if e < 1 or e > MAX_GROUND:
            raise ValueError(f"element {e} outside [1, {MAX_GROUND}]")
        m |= 1 << (e - 1)
    return m


def elements_of(mask: SetWord) -> list[int]:
    """Sorted 1-based elements of a bitmask."""
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length())
        mask ^= low
    return out


def element_sum(mask: SetWord) -> int:
    s = 0
    while mask:
        low = mask & -mask
        s += low.bit_length()
        mask ^= low
    return s


def full_mask(n: int) -> SetWord:
    return (1 << n) - 1


def is_subset(a: SetWord, b: SetWord) -> bool:
    """a is a subset of b (both over the same ground set)."""
    return a & ~b == 0


def is_proper_subset(a: SetWord, b: SetWord) -> bool:
    return a != b and a & ~b == 0


def sym_diff_size(a: SetWord, b: SetWord) -> int:
    """|a symmetric-difference b|."""
    return (a ^ b).bit_count()


def layer(n: int, s: int) -> Iterator[SetWord]:
    """All subsets of [n] of size s, in colex (= ascending numeric) order."""
    if not 0 <= n <= MAX_GROUND:
        raise ValueError(f"ground size {n} outside [0, {MAX_GROUND}]")
    if not 0 <= s <= n:
        raise ValueError(f"layer index {s} outside [0, {n}]")
    if s == 0:
        yield 0
        return
    m = (1 << s) - 1
    top = 1 << n
    while m < top:
        yield m
        # Gosper's hack: next mask with the same popcount.
        low = m & -m
        lift = m + low
        m = lift | (((m ^ lift) >> 2) // low)


def iter_submasks(mask: SetWord) -> Iterator[SetWord]:
    """All submasks of mask, including 0 and mask itself, ascending (colex)."""
    s = 0
    while True:
        yield s
        if s == mask:
            return
        s = (s - mask) & mask


def subsets_by_rank(n: int) -> Iterator[SetWord]:
    """All subsets of [n], cardinality-ascending, colex within a cardinality."""
    for s in range(n + 1):
        yield from layer(n, s)


def _check_ground(n: int) -> None:
    if not 0 <= n <= MAX_GROUND:
        raise ValueError(f"ground size {n} outside [0, {MAX_GROUND}]")


def _check_member(mask: SetWord, n: int) -> None:
    if mask < 0 or mask >> n:
        raise ValueError(f"mask {mask:#x} has elements outside [1, {n}]")


@dataclass(frozen=True)
class Chain:
    """A strictly increasing sequence of sets; doubles as a failure certificate."""

    sets: tuple[SetWord, ...]

    def __post_init__(self):
        for a, b in zip(self.sets, self.sets[1:]):
            if not is_proper_subset(a, b):
                raise ValueError(
                    f"chain not strictly increasing at {elements_of(a)} -> {elements_of(b)}"
                )

    def __len__(self) -> int:
        return len(self.sets)

    def __getitem__(self, i: int) -> SetWord:
        return self.sets[i]

    def __iter__(self):
        return iter(self.sets)

    def to_obj(self) -> dict:
        return {"sets": [elements_of(s) for s in self.sets]}

    @classmethod
    def from_obj(cls, obj: dict) -> "Chain":
        return cls(tuple(mask_of(e) for e in obj["sets"]))


@dataclass(frozen=True)
class Permutation:
    """A permutation of the top block [n+1, n+k] of the ground set.

    image[i-1] is where slot n+i is sent; image must be a bijection of
    {n+1, ..., n+k}.
    """

    base: int
    width: int
    image: tuple[int, ...]

    def __post_init__(self):
        n, k = self.base, self.width
        if n < 0 or k < 0 or n + k > MAX_GROUND:
            raise ValueError(f"invalid dimensions n={n}, k={k}")
        if sorted(self.image) != list(range(n + 1, n + k + 1)):
            raise ValueError(
                f"image {self.image} is not a bijection of [{n + 1}, {n + k}]"
            )

    @classmethod
    def identity(cls, n: int, k: int) -> "Permutation":
        return cls(n, k, tuple(range(n + 1, n + k + 1)))

    def prefix_mask(self, i: int) -> SetWord:
        """Bitmask of the first i image values."""
        return mask_of(self.image[:i])

    def to_obj(self) -> dict:
        return {"n": self.base, "k": self.width, "image": list(self.image)}

    @classmethod
    def from_obj(cls, obj: dict) -> "Permutation":
        return cls(obj["n"], obj["k"], tuple(obj["image"]))


@dataclass(frozen=True)
class WeightedFamily:
    """A family of fixed-weight subsets of [ground_n].

    Either an explicit sorted tuple of members, or the implicit residue-coded
    family {S of size weight : sum(S) = d (mod p)} over the full layer.
    """

    ground_n: int
    weight: int
    members: Optional[tuple[SetWord, ...]] = None
    modp_p: Optional[int] = None
    modp_d: Optional[int] = None

    def __post_init__(self):
        _check_ground(self.ground_n)
        if not 0 <= self.weight <= self.ground_n:
            raise ValueError(f"weight {self.weight} outside [0, {self.ground_n}]")
        if (self.members is None) == (self.modp_p is None):
            raise ValueError("exactly one of members / mod-p parameters required")
        if self.members is not None:
            prev = -1
            for m in self.members:
                _check_member(m, self.ground_n)
                if m.bit_count() != self.weight:
                    raise ValueError(
                        f"member {elements_of(m)} has size {m.bit_count()}, "
                        f"expected {self.weight}"
                    )
                if m <= prev:
                    raise ValueError("members must be strictly ascending")
                prev = m
        else:
            p, d = self.modp_p, self.modp_d
            if p is None or d is None:
                raise ValueError("mod-p family needs both p and d")
            if p < 2:
                raise ValueError(f"modulus {p} < 2")
            if not 1 <= d <= p:
                raise ValueError(f"residue {d} outside [1, {p}]")

    @property
    def is_explicit(self) -> bool:
        return self.members is not None

    def contains(self, mask: SetWord) -> bool:
        if mask.bit_count() != self.weight:
            return False
        if self.members is not None:
            return mask in self._member_set()
        return element_sum(mask) % self.modp_p == self.modp_d % self.modp_p

    def _member_set(self) -> frozenset:
        # cached on first use; object is frozen so this is safe
        cached = getattr(self, "_cached_member_set", None)
        if cached is None:
            cached = frozenset(self.members)
            object.__setattr__(self, "_cached_member_set", cached)
        return cached

    def iter_members(self) -> Iterator[SetWord]:
        if self.members is not None:
            yield from self.members
        else:
            p, d = self.modp_p, self.modp_d
            for m in layer(self.ground_n, self.weight):
                if element_sum(m) % p == d % p:
                    yield m

    def enumerated_members(self, limit: int = 1_000_000) -> list[SetWord]:
        """Materialize the family; refuses when the ambient layer is too big."""
        if self.members is not None:
            return list(self.members)
        if comb(self.ground_n, self.weight) > limit:
            raise ValueError(
                f"layer C({self.ground_n},{self.weight}) too large to enumerate "
                f"(limit {limit})"
            )
        return list(self.iter_members())

    def to_obj(self) -> dict:
        obj: dict = {"n": self.ground_n, "weight": self.weight}
        if self.members is not None:
            obj["members"] = [elements_of(m) for m in self.members]
        else:
            obj["modp"] = {"p": self.modp_p, "d": self.modp_d}
        return obj

    @classmethod
    def from_obj(cls, obj: dict) -> "WeightedFamily":
        if "members" in obj:
            members = tuple(sorted(mask_of(e) for e in obj["members"]))
            return cls(obj["n"], obj["weight"], members=members)
        mp = obj["modp"]
        return cls(obj["n"], obj["weight"], modp_p=mp["p"], modp_d=mp["d"])


def sorted_family(masks: Iterable[SetWord], ground_n: int, weight: int) -> WeightedFamily:
    """Explicit WeightedFamily from an unordered collection of masks."""
    return WeightedFamily(ground_n, weight, members=tuple(sorted(set(masks))))


@dataclass(frozen=True)
class Coloring:
    """A total blue/red assignment on the subsets of [ground_n].

    Dense form: blue_bits byte j, bit s%8 is the color of SetWord s (1 = blue);
    capped at ground_n <= 28.  Structured form: blue iff the size is a blue
    layer, or the set is listed in blue_extra, or it belongs to blue_code;
    everything else is red.
    """

    ground_n: int
    blue_bits: Optional[bytes] = None
    blue_layers: frozenset = frozenset()
    blue_extra: frozenset = frozenset()
    blue_code: Optional[WeightedFamily] = None

    def __post_init__(self):
        n = self.ground_n
        _check_ground(n)
        if self.blue_bits is not None:
            if n > MAX_DENSE_GROUND:
                raise ValueError(
                    f"dense colorings capped at N <= {MAX_DENSE_GROUND}; use structured"
                )
            if self.blue_layers or self.blue_extra or self.blue_code:
                raise ValueError("coloring must be dense or structured, not both")
            want = ((1 << n) + 7) // 8
            if len(self.blue_bits) != want:
                raise ValueError(
                    f"dense bit vector has {len(self.blue_bits)} bytes, expected {want}"
                )
            spare = 8 * want - (1 << n)
            if spare and self.blue_bits[-1] >> (8 - spare):
                raise ValueError("dense bit vector has bits beyond 2^N")
        else:
            for s in self.blue_layers:
                if not 0 <= s <= n:
                    raise ValueError(f"blue layer {s} outside [0, {n}]")
            for m in self.blue_extra:
                _check_member(m, n)
                if m.bit_count() in self.blue_layers:
                    raise ValueError(
                        f"extra blue set {elements_of(m)} lies on a blue layer"
                    )
            if self.blue_code is not None:
                if self.blue_code.ground_n != n:
                    raise ValueError("blue_code ground size mismatch")
                if self.blue_code.weight in self.blue_layers:
                    raise ValueError("blue_code weight lies on a blue layer")
                if any(m.bit_count() == self.blue_code.weight for m in self.blue_extra):
                    raise ValueError("blue_extra overlaps the blue_code layer")

    @property
    def is_dense(self) -> bool:
        return self.blue_bits is not None

    @classmethod
    def dense(cls, n: int, blue: Iterable[SetWord]) -> "Coloring":
        """Dense coloring from the collection of blue SetWords."""
        _check_ground(n)
        if n > MAX_DENSE_GROUND:
            raise ValueError(f"dense colorings capped at N <= {MAX_DENSE_GROUND}")
        buf = bytearray(((1 << n) + 7) // 8)
        for s in blue:
            _check_member(s, n)
            buf[s >> 3] |= 1 << (s & 7)
        return cls(n, blue_bits=bytes(buf))

    @classmethod
    def dense_from_int(cls, n: int, bits: int) -> "Coloring":
        """Dense coloring from an integer bit vector (bit s = SetWord s blue)."""
        _check_ground(n)
        if n > MAX_DENSE_GROUND:
            raise ValueError(f"dense colorings capped at N <= {MAX_DENSE_GROUND}")
        if bits < 0 or bits >> (1 << n):
            raise ValueError("bit vector has bits beyond 2^N")
        return cls(n, blue_bits=bits.to_bytes(((1 << n) + 7) // 8, "little"))

    @classmethod
    def structured(
        cls,
        n: int,
        blue_layers: Iterable[int] = (),
        blue_extra: Iterable[SetWord] = (),
        blue_code: Optional[WeightedFamily] = None,
    ) -> "Coloring":
        return cls(
            n,
            blue_layers=frozenset(blue_layers),
            blue_extra=frozenset(blue_extra),
            blue_code=blue_code,
        )

    def color_of(self, s: SetWord) -> Color:
        _check_member(s, self.ground_n)
        if self.blue_bits is not None:
            blue = (self.blue_bits[s >> 3] >> (s & 7)) & 1
            return Color.BLUE if blue else Color.RED
        if s.bit_count() in self.blue_layers or s in self.blue_extra:
            return Color.BLUE
        if self.blue_code is not None and self.blue_code.contains(s):
            return Color.BLUE
        return Color.RED

    def is_blue(self, s: SetWord) -> bool:
        return self.color_of(s) is Color.BLUE

    def blue_family(self) -> list[SetWord]:
        """All blue SetWords; requires an enumerable ground set."""
        if self.ground_n > MAX_DENSE_GROUND:
            raise ValueError("ground set too large to enumerate")
        return [s for s in range(1 << self.ground_n) if self.is_blue(s)]

    def red_family(self) -> list[SetWord]:
        if self.ground_n > MAX_DENSE_GROUND:
            raise ValueError("ground set too large to enumerate")
        return [s for s in range(1 << self.ground_n) if not self.is_blue(s)]

    def densify(self) -> "Coloring":
        """Equivalent dense coloring (for small ground sets)."""
        if self.is_dense:
            return self
        return Coloring.dense(self.ground_n, self.blue_family())

    def to_obj(self) -> dict:
        if self.blue_bits is not None:
            return {
                "n": self.ground_n,
                "repr": "dense",
                "blue_hex": self.blue_bits.hex(),
            }
        obj: dict = {
            "n": self.ground_n,
            "repr": "structured",
            "blue_layers": sorted(self.blue_layers),
            "blue_extra": [elements_of(m) for m in sorted(self.blue_extra)],
        }
        if self.blue_code is not None:
            obj["blue_modp"] = {
                "weight": self.blue_code.weight,
                "p": self.blue_code.modp_p,
                "d": self.blue_code.modp_d,
            }
        return obj

    @classmethod
    def from_obj(cls, obj: dict) -> "Coloring":
        n = obj["n"]
        if obj["repr"] == "dense":
            return cls(n, blue_bits=bytes.fromhex(obj["blue_hex"]))
        if obj["repr"] != "structured":
            raise ValueError(f"unknown coloring repr {obj['repr']!r}")
        code = None
        if "blue_modp" in obj:
            mp = obj["blue_modp"]
            code = WeightedFamily(
                n, mp["weight"], modp_p=mp["p"], modp_d=mp["d"]
            )
        return cls.structured(
            n,
            blue_layers=obj.get("blue_layers", ()),
            blue_extra=(mask_of(e) for e in obj.get("blue_extra", ())),
            blue_code=code,
        )


def dumps(obj) -> str:
    """Serialize any of the package's JSON-able objects to text."""
    return json.dumps(obj.to_obj(), sort_keys=True)


def chain_from_json(text: str) -> Chain:
    return Chain.from_obj(json.loads(text))


def coloring_from_json(text: str) -> Coloring:
    return Coloring.from_obj(json.loads(text))


def family_from_json(text: str) -> WeightedFamily:
    return WeightedFamily.from_obj(json.loads(text))


def permutation_from_json(text: str) -> Permutation:
    return Permutation.from_obj(json.loads(text))
