"""Canonical-form arithmetic for the supported group families.

Elements are immutable values tagged with their family.  Payloads are kept in
canonical form at construction, so value equality is equality in the group.

=============  ==========================================================
family         payload
=============  ==========================================================
free           reduced word, tuple of nonzero signed generator indices
lattice        integer vector
finite-cyclic  (residue, order)
finite-perm    image tuple of a permutation on ``{0..n-1}``
product        (left element, right element)
=============  ==========================================================
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any, Iterable, Sequence

from .exceptions import BudgetExceeded, FamilyMismatch

FAMILIES = ("free", "lattice", "finite-cyclic", "finite-perm", "product")


@dataclass(frozen=True)
class GroupElement:
    family: str
    payload: tuple

    def __mul__(self, other: "GroupElement") -> "GroupElement":
        return multiply(self, other)

    def __repr__(self) -> str:
        return f"{self.family}:{encode(self)}"


def reduce_word(word: Iterable[int]) -> tuple:
    """Free reduction of a signed-index word (stack based)."""
    out: list[int] = []
    for letter in word:
        if letter == 0:
            raise ValueError("generator index 0 is not allowed in a free word")
        if out and out[-1] == -letter:
            out.pop()
        else:
            out.append(letter)
    return tuple(out)


def free_word(word: Iterable[int]) -> GroupElement:
    return GroupElement("free", reduce_word(word))


def lattice_vector(vec: Iterable[int]) -> GroupElement:
    return GroupElement("lattice", tuple(int(v) for v in vec))


def cyclic_residue(r: int, order: int) -> GroupElement:
    if order < 1:
        raise ValueError("cyclic order must be positive")
    return GroupElement("finite-cyclic", (int(r) % order, order))


def permutation(images: Iterable[int]) -> GroupElement:
    images = tuple(int(i) for i in images)
    if sorted(images) != list(range(len(images))):
        raise ValueError(f"not a permutation: {list(images)}")
    return GroupElement("finite-perm", images)


def pair(a: GroupElement, b: GroupElement) -> GroupElement:
    return GroupElement("product", (a, b))


def _check_same(a: GroupElement, b: GroupElement) -> None:
    if a.family != b.family:
        raise FamilyMismatch(f"cannot combine {a.family} with {b.family}")


def multiply(a: GroupElement, b: GroupElement) -> GroupElement:
    _check_same(a, b)
    fam = a.family
    if fam == "free":
        return GroupElement("free", reduce_word(a.payload + b.payload))
    if fam == "lattice":
        if len(a.payload) != len(b.payload):
            raise FamilyMismatch("lattice dimension mismatch")
        return GroupElement("lattice", tuple(x + y for x, y in zip(a.payload, b.payload)))
    if fam == "finite-cyclic":
        (r, n), (s, n2) = a.payload, b.payload
        if n != n2:
            raise FamilyMismatch("cyclic order mismatch")
        return GroupElement("finite-cyclic", ((r + s) % n, n))
    if fam == "finite-perm":
        p, q = a.payload, b.payload
        if len(p) != len(q):
            raise FamilyMismatch("permutation degree mismatch")
        # (pq)(i) = p(q(i))
        return GroupElement("finite-perm", tuple(p[i] for i in q))
    if fam == "product":
        return GroupElement("product", (multiply(a.payload[0], b.payload[0]),
                                        multiply(a.payload[1], b.payload[1])))
    raise FamilyMismatch(f"unknown family {fam!r}")


def inverse(a: GroupElement) -> GroupElement:
    fam = a.family
    if fam == "free":
        return GroupElement("free", tuple(-x for x in reversed(a.payload)))
    if fam == "lattice":
        return GroupElement("lattice", tuple(-x for x in a.payload))
    if fam == "finite-cyclic":
        r, n = a.payload
        return GroupElement("finite-cyclic", ((-r) % n, n))
    if fam == "finite-perm":
        inv = [0] * len(a.payload)
        for i, j in enumerate(a.payload):
            inv[j] = i
        return GroupElement("finite-perm", tuple(inv))
    if fam == "product":
        return GroupElement("product", (inverse(a.payload[0]), inverse(a.payload[1])))
    raise FamilyMismatch(f"unknown family {fam!r}")


def identity_like(a: GroupElement) -> GroupElement:
    fam = a.family
    if fam == "free":
        return GroupElement("free", ())
    if fam == "lattice":
        return GroupElement("lattice", (0,) * len(a.payload))
    if fam == "finite-cyclic":
        return GroupElement("finite-cyclic", (0, a.payload[1]))
    if fam == "finite-perm":
        return GroupElement("finite-perm", tuple(range(len(a.payload))))
    return GroupElement("product", (identity_like(a.payload[0]), identity_like(a.payload[1])))


def is_identity(a: GroupElement) -> bool:
    return a == identity_like(a)


def to_json(a: GroupElement) -> Any:
    """Text-encodable form: lists for words, vectors and permutations, an int for residues."""
    if a.family in ("free", "lattice", "finite-perm"):
        return list(a.payload)
    if a.family == "finite-cyclic":
        return a.payload[0]
    return [to_json(a.payload[0]), to_json(a.payload[1])]


def encode(a: GroupElement) -> str:
    """Canonical compact text encoding; equal elements give identical strings."""
    return json.dumps(to_json(a), separators=(",", ":"))


def _letter_rank(letter: int) -> int:
    # g1 < g1^-1 < g2 < g2^-1 < ...
    return 2 * (abs(letter) - 1) + (1 if letter < 0 else 0)


def _int_rank(v: int) -> int:
    # 0 < 1 < -1 < 2 < -2 < ...
    return 2 * v - 1 if v > 0 else -2 * v


def sort_key(a: GroupElement) -> tuple:
    """Shortlex-style total order within one family."""
    fam = a.family
    if fam == "free":
        return (len(a.payload), tuple(_letter_rank(x) for x in a.payload))
    if fam == "lattice":
        return (sum(abs(x) for x in a.payload), tuple(_int_rank(x) for x in a.payload))
    if fam == "finite-cyclic":
        return (a.payload[0],)
    if fam == "finite-perm":
        return a.payload
    return (sort_key(a.payload[0]), sort_key(a.payload[1]))


def gen_set(elements: Iterable[GroupElement]) -> tuple:
    """Deduplicate and order elements canonically (a GenSet)."""
    elements = list(elements)
    if not elements:
        return ()
    fam = elements[0].family
    for el in elements:
        if el.family != fam:
            raise FamilyMismatch("mixed families in one generating set")
    return tuple(sorted(set(elements), key=sort_key))


def symmetrize(A: Iterable[GroupElement]) -> tuple:
    """Return A ∪ A⁻¹ ∪ {e}, deduplicated and canonically ordered."""
    A = list(A)
    if not A:
        raise ValueError("cannot symmetrize an empty set")
    return gen_set(A + [inverse(a) for a in A] + [identity_like(A[0])])


def product_set(A: Sequence[GroupElement], k: int, cap: int | None = None) -> tuple:
    """All products a_1 ... a_k with a_i in A, canonically ordered.

    With e in A this is the ball of A-radius k.  Raises BudgetExceeded once the
    set grows beyond ``cap`` elements.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    A = gen_set(A)
    level = set(A)
    for _ in range(k - 1):
        nxt = set()
        for x in level:
            for a in A:
                nxt.add(multiply(x, a))
                if cap is not None and len(nxt) > cap:
                    raise BudgetExceeded(f"|A^k| exceeds cap {cap}")
        level = nxt
    if cap is not None and len(level) > cap:
        raise BudgetExceeded(f"|A^k| exceeds cap {cap}")
    return gen_set(level)


# ---------------------------------------------------------------------------
# group descriptors


class Group:
    """A concrete finitely generated group of one family."""

    family: str

    def identity(self) -> GroupElement:
        raise NotImplementedError

    def generators(self) -> tuple:
        raise NotImplementedError

    def element(self, data: Any) -> GroupElement:
        """Parse a text encoding (see ``to_json``) into a canonical element."""
        raise NotImplementedError

    def descriptor(self) -> dict:
        raise NotImplementedError

    def contains(self, a: GroupElement) -> bool:
        try:
            return self.element(to_json(a)) == a
        except (ValueError, TypeError, FamilyMismatch):
            return False

    def __eq__(self, other):
        return isinstance(other, Group) and self.descriptor() == other.descriptor()

    def __hash__(self):
        return hash(json.dumps(self.descriptor(), sort_keys=True))

    def __repr__(self):
        return f"{type(self).__name__}({self.descriptor()})"


class FreeGroup(Group):
    family = "free"

    def __init__(self, rank: int):
        if rank < 1:
            raise ValueError("free group rank must be >= 1")
        self.rank = rank

    def identity(self):
        return GroupElement("free", ())

    def generators(self):
        return tuple(GroupElement("free", (i,)) for i in range(1, self.rank + 1))

    def element(self, data):
        if not isinstance(data, list) or not all(isinstance(x, int) and not isinstance(x, bool) for x in data):
            raise ValueError(f"free word must be a list of signed generator indices, got {data!r}")
        for x in data:
            if x == 0 or abs(x) > self.rank:
                raise ValueError(f"generator index {x} out of range for rank {self.rank}")
        return free_word(data)

    def descriptor(self):
        return {"family": "free", "rank": self.rank}


class Lattice(Group):
    family = "lattice"

    def __init__(self, dim: int):
        if dim < 1:
            raise ValueError("lattice dimension must be >= 1")
        self.dim = dim

    def identity(self):
        return GroupElement("lattice", (0,) * self.dim)

    def generators(self):
        return tuple(GroupElement("lattice", tuple(int(i == j) for j in range(self.dim)))
                     for i in range(self.dim))

    def element(self, data):
        if isinstance(data, int) and not isinstance(data, bool) and self.dim == 1:
            data = [data]
        if not isinstance(data, list) or not all(isinstance(x, int) and not isinstance(x, bool) for x in data):
            raise ValueError(f"lattice element must be an integer list, got {data!r}")
        if len(data) != self.dim:
            raise ValueError(f"expected dimension {self.dim}, got {len(data)}")
        return lattice_vector(data)

    def descriptor(self):
        return {"family": "lattice", "dim": self.dim}


class CyclicGroup(Group):
    family = "finite-cyclic"

    def __init__(self, order: int):
        if order < 1:
            raise ValueError("cyclic order must be >= 1")
        self.order = order

    def identity(self):
        return cyclic_residue(0, self.order)

    def generators(self):
        return (cyclic_residue(1, self.order),)

    def element(self, data):
        if not isinstance(data, int) or isinstance(data, bool):
            raise ValueError(f"cyclic element must be an integer, got {data!r}")
        return cyclic_residue(data, self.order)

    def descriptor(self):
        return {"family": "finite-cyclic", "order": self.order}


class PermGroup(Group):
    family = "finite-perm"

    def __init__(self, degree: int, generators: Sequence[Sequence[int]]):
        self.degree = degree
        self._gens = tuple(permutation(g) for g in generators)
        for g in self._gens:
            if len(g.payload) != degree:
                raise ValueError("generator degree mismatch")

    def identity(self):
        return GroupElement("finite-perm", tuple(range(self.degree)))

    def generators(self):
        return self._gens

    def element(self, data):
        if not isinstance(data, list) or len(data) != self.degree:
            raise ValueError(f"permutation of degree {self.degree} expected, got {data!r}")
        return permutation(data)

    def contains(self, a):
        if a.family != "finite-perm" or len(a.payload) != self.degree:
            return False
        return a in enumerate_group(self)

    def descriptor(self):
        return {"family": "finite-perm", "degree": self.degree,
                "generators": [list(g.payload) for g in self._gens]}


class ProductGroup(Group):
    family = "product"

    def __init__(self, left: Group, right: Group):
        self.left = left
        self.right = right

    def identity(self):
        return pair(self.left.identity(), self.right.identity())

    def generators(self):
        el, er = self.left.identity(), self.right.identity()
        return (tuple(pair(g, er) for g in self.left.generators())
                + tuple(pair(el, g) for g in self.right.generators()))

    def element(self, data):
        if not isinstance(data, list) or len(data) != 2:
            raise ValueError(f"product element must be a two-element list, got {data!r}")
        return pair(self.left.element(data[0]), self.right.element(data[1]))

    def descriptor(self):
        return {"family": "product", "factors": [self.left.descriptor(), self.right.descriptor()]}


def is_finite(group: Group) -> bool:
    if isinstance(group, ProductGroup):
        return is_finite(group.left) and is_finite(group.right)
    return group.family in ("finite-cyclic", "finite-perm")


def enumerate_group(group: Group, cap: int = 1_000_000) -> tuple:
    """All elements of a finite group by closure from the identity."""
    if not is_finite(group):
        raise ValueError(f"{group!r} is infinite")
    gens = group.generators()
    seen = {group.identity()}
    frontier = [group.identity()]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = multiply(x, g)
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
                    if len(seen) > cap:
                        raise BudgetExceeded(f"group order exceeds cap {cap}")
        frontier = nxt
    return gen_set(seen)


def group_from_descriptor(desc: dict) -> Group:
    if not isinstance(desc, dict) or "family" not in desc:
        raise ValueError("group descriptor must be an object with a 'family' key")
    fam = desc["family"]
    if fam == "free":
        return FreeGroup(int(desc["rank"]))
    if fam == "lattice":
        return Lattice(int(desc["dim"]))
    if fam == "finite-cyclic":
        return CyclicGroup(int(desc["order"]))
    if fam == "finite-perm":
        return PermGroup(int(desc["degree"]), desc.get("generators", []))
    if fam == "product":
        left, right = desc["factors"]
        return ProductGroup(group_from_descriptor(left), group_from_descriptor(right))
    raise ValueError(f"unsupported group family {fam!r}")
