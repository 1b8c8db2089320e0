"""Finite quotients pi: G -> H that are injective on a prescribed finite set.

Each quotient class knows how to evaluate pi on source elements and how to do
arithmetic on its images ("finite elements").  Image representations:

* lattice    -- tuple of residues mod N
* free-ball  -- :class:`Perm`, a permutation of the shortlex-ordered ball
* identity   -- the source :class:`~finact.groups.GroupElement` itself
* product    -- pair of factor images
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Iterable, Sequence

import numpy as np

from . import groups as gk
from .exceptions import BudgetExceeded, FamilyMismatch, UnsupportedFamily
from .groups import GroupElement


class Perm:
    """Immutable permutation backed by an int32 array; hashable and ordered by bytes."""

    __slots__ = ("arr", "_key")

    def __init__(self, arr):
        arr = np.ascontiguousarray(arr, dtype=np.int32)
        arr.setflags(write=False)
        self.arr = arr
        self._key = arr.tobytes()

    @property
    def key(self) -> bytes:
        return self._key

    def __eq__(self, other):
        return isinstance(other, Perm) and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __lt__(self, other):
        return self._key < other._key

    def __len__(self):
        return len(self.arr)

    def __repr__(self):
        if len(self.arr) <= 12:
            return f"Perm({self.arr.tolist()})"
        return f"Perm(<degree {len(self.arr)}>)"

    def compose(self, other: "Perm") -> "Perm":
        # (self * other)(i) = self(other(i))
        return Perm(self.arr[other.arr])

    def inverse(self) -> "Perm":
        inv = np.empty_like(self.arr)
        inv[self.arr] = np.arange(len(self.arr), dtype=np.int32)
        return Perm(inv)

    def order(self) -> int:
        seen = np.zeros(len(self.arr), dtype=bool)
        out = 1
        arr = self.arr
        for start in range(len(arr)):
            if seen[start]:
                continue
            n = 0
            i = start
            while not seen[i]:
                seen[i] = True
                i = arr[i]
                n += 1
            out = math.lcm(out, n)
        return out


class FiniteQuotient:
    """Base class.  Subclasses implement evaluation and target arithmetic."""

    source: gk.Group
    # the set B this quotient is guaranteed injective on: either an explicit
    # tuple of elements or (A, k) meaning B = A^k
    certificate_B: Any = None

    def apply(self, g: GroupElement):
        raise NotImplementedError

    def identity(self):
        raise NotImplementedError

    def mul(self, p, q):
        raise NotImplementedError

    def inv(self, p):
        raise NotImplementedError

    def key(self, p):
        """Hashable, totally ordered canonical key of an image element."""
        raise NotImplementedError

    def encode(self, p) -> Any:
        raise NotImplementedError

    def element_order(self, p) -> int:
        n, x, e = 1, p, self.identity()
        while x != e:
            x = self.mul(x, p)
            n += 1
        return n

    def descriptor(self) -> dict:
        raise NotImplementedError

    def certificate_set(self, cap: int | None = None) -> tuple:
        B = self.certificate_B
        if B is None:
            return ()
        if isinstance(B, tuple) and len(B) == 2 and isinstance(B[1], int):
            A, k = B
            return gk.product_set(A, k, cap=cap)
        return tuple(B)

    def __repr__(self):
        return f"{type(self).__name__}({self.descriptor()})"


class LatticeQuotient(FiniteQuotient):
    """Componentwise reduction Z^dim -> (Z/N)^dim."""

    def __init__(self, dim: int, modulus: int, certificate_B=None):
        if modulus < 1:
            raise ValueError("modulus must be positive")
        self.source = gk.Lattice(dim)
        self.dim = dim
        self.modulus = modulus
        self.certificate_B = certificate_B

    def apply(self, g):
        if g.family != "lattice" or len(g.payload) != self.dim:
            raise FamilyMismatch(f"{g!r} is not in Z^{self.dim}")
        return tuple(x % self.modulus for x in g.payload)

    def identity(self):
        return (0,) * self.dim

    def mul(self, p, q):
        n = self.modulus
        return tuple((a + b) % n for a, b in zip(p, q))

    def inv(self, p):
        return tuple((-a) % self.modulus for a in p)

    def key(self, p):
        return p

    def encode(self, p):
        return list(p)

    def element_order(self, p):
        out = 1
        for a in p:
            out = math.lcm(out, self.modulus // math.gcd(a, self.modulus))
        return out

    def descriptor(self):
        d = {"kind": "lattice", "modulus": self.modulus}
        if self.dim != 1:
            d["dim"] = self.dim
        return d


def ball_size(rank: int, radius: int) -> int:
    """Number of reduced words of length <= radius in the free group of given rank."""
    if rank == 1:
        return 1 + 2 * radius
    return 1 + 2 * rank * ((2 * rank - 1) ** radius - 1) // (2 * rank - 2)


def free_ball(rank: int, radius: int) -> list:
    """Reduced words of length <= radius in shortlex order (g1 < g1^-1 < g2 < ...)."""
    letters = [s for i in range(1, rank + 1) for s in (i, -i)]
    words: list[tuple] = [()]
    level: list[tuple] = [()]
    for _ in range(radius):
        nxt = []
        for w in level:
            for s in letters:
                if w and w[-1] == -s:
                    continue
                nxt.append(w + (s,))
        words.extend(nxt)
        level = nxt
    return words


class FreeBallQuotient(FiniteQuotient):
    """Free group of rank r acting on the radius-R ball of reduced words.

    Generator s sends w to sw whenever both lie in the ball; the leftover
    domain and codomain points (words of length exactly R) are matched in
    shortlex order.  Hence pi(w) moves the empty word to w for |w| <= R.
    """

    def __init__(self, rank: int, radius: int, max_ball: int = 2_000_000, certificate_B=None):
        if rank < 1 or radius < 0:
            raise ValueError("need rank >= 1 and radius >= 0")
        size = ball_size(rank, radius)
        if size > max_ball:
            raise BudgetExceeded(f"free ball of radius {radius} has {size} words, cap is {max_ball}")
        self.source = gk.FreeGroup(rank)
        self.rank = rank
        self.radius = radius
        self.certificate_B = certificate_B
        self.ball = free_ball(rank, radius)
        self.index = {w: i for i, w in enumerate(self.ball)}
        self._gen = {}
        for s in range(1, rank + 1):
            perm = self._generator_perm(s)
            self._gen[s] = perm
            self._gen[-s] = perm.inverse()
        self._id = Perm(np.arange(len(self.ball)))

    @property
    def ball_size(self) -> int:
        return len(self.ball)

    def _generator_perm(self, s: int) -> Perm:
        R = self.radius
        img = np.full(len(self.ball), -1, dtype=np.int64)
        hit = np.zeros(len(self.ball), dtype=bool)
        free_dom = []
        for i, w in enumerate(self.ball):
            sw = w[1:] if (w and w[0] == -s) else (s,) + w
            if len(sw) <= R:
                j = self.index[sw]
                img[i] = j
                hit[j] = True
            else:
                free_dom.append(i)
        free_cod = [j for j in range(len(self.ball)) if not hit[j]]
        assert len(free_dom) == len(free_cod)
        for i, j in zip(free_dom, free_cod):
            img[i] = j
        return Perm(img)

    def generator_image(self, s: int) -> Perm:
        return self._gen[s]

    def apply(self, g):
        if g.family != "free":
            raise FamilyMismatch(f"{g!r} is not a free word")
        arr = self._id.arr
        for letter in g.payload:
            if abs(letter) > self.rank:
                raise FamilyMismatch(f"generator {letter} outside rank {self.rank}")
            arr = arr[self._gen[letter].arr]
        return Perm(arr)

    def identity(self):
        return self._id

    def mul(self, p, q):
        return p.compose(q)

    def inv(self, p):
        return p.inverse()

    def key(self, p):
        return p.key

    def encode(self, p):
        return p.arr.tolist()

    def element_order(self, p):
        return p.order()

    def basepoint_image(self, p: Perm) -> tuple:
        """The word that p sends the empty word to."""
        return self.ball[int(p.arr[0])]

    def descriptor(self):
        return {"kind": "free-ball", "radius": self.radius, "ball_size": len(self.ball)}


class IdentityQuotient(FiniteQuotient):
    """A finite group is its own finite quotient."""

    def __init__(self, group: gk.Group, certificate_B=None):
        if not gk.is_finite(group):
            raise UnsupportedFamily(f"identity quotient needs a finite group, got {group!r}")
        self.source = group
        self.certificate_B = certificate_B
        self._id = group.identity()

    def apply(self, g):
        return g

    def identity(self):
        return self._id

    def mul(self, p, q):
        return gk.multiply(p, q)

    def inv(self, p):
        return gk.inverse(p)

    def key(self, p):
        return gk.sort_key(p)

    def encode(self, p):
        return gk.to_json(p)

    def descriptor(self):
        return {"kind": "identity"}


class ProductQuotient(FiniteQuotient):
    def __init__(self, q1: FiniteQuotient, q2: FiniteQuotient, certificate_B=None):
        self.q1, self.q2 = q1, q2
        self.source = gk.ProductGroup(q1.source, q2.source)
        self.certificate_B = certificate_B

    def apply(self, g):
        if g.family != "product":
            raise FamilyMismatch(f"{g!r} is not a pair")
        return (self.q1.apply(g.payload[0]), self.q2.apply(g.payload[1]))

    def identity(self):
        return (self.q1.identity(), self.q2.identity())

    def mul(self, p, q):
        return (self.q1.mul(p[0], q[0]), self.q2.mul(p[1], q[1]))

    def inv(self, p):
        return (self.q1.inv(p[0]), self.q2.inv(p[1]))

    def key(self, p):
        return (self.q1.key(p[0]), self.q2.key(p[1]))

    def encode(self, p):
        return [self.q1.encode(p[0]), self.q2.encode(p[1])]

    def element_order(self, p):
        return math.lcm(self.q1.element_order(p[0]), self.q2.element_order(p[1]))

    def certificate_set(self, cap=None):
        if self.certificate_B is not None:
            return super().certificate_set(cap)
        B1 = self.q1.certificate_set(cap)
        B2 = self.q2.certificate_set(cap)
        if cap is not None and len(B1) * len(B2) > cap:
            raise BudgetExceeded(f"|B1 x B2| exceeds cap {cap}")
        return tuple(gk.pair(u, v) for u in B1 for v in B2)

    def descriptor(self):
        return {"kind": "product", "factors": [self.q1.descriptor(), self.q2.descriptor()]}


# ---------------------------------------------------------------------------
# constructors


def lattice_quotient(dim: int, B: Iterable[GroupElement]) -> LatticeQuotient:
    """Reduce mod N = 2 * max|coordinate over B| + 1, which separates B."""
    B = gk.gen_set(B)
    width = max((abs(c) for b in B for c in b.payload), default=0)
    return LatticeQuotient(dim, 2 * width + 1, certificate_B=B)


def free_ball_quotient(rank: int, R: int, max_ball: int = 2_000_000) -> FreeBallQuotient:
    return FreeBallQuotient(rank, R, max_ball=max_ball)


def product_quotient(q1: FiniteQuotient, q2: FiniteQuotient) -> ProductQuotient:
    return ProductQuotient(q1, q2)


def _word_length(g: GroupElement) -> int:
    return len(g.payload)


def quotient_for(group: gk.Group, A: Sequence[GroupElement], k: int,
                 max_ball: int = 2_000_000) -> FiniteQuotient:
    """A finite quotient injective on B = A^k, without enumerating B.

    lattice:  N = 2 * k * max|coordinate over A| + 1
    free:     ball radius R = 2 * k * (max word length in A), so every u^-1 v
              with u, v in B is detected by the image of the empty word
    finite:   the identity map
    product:  componentwise, on the projections of A
    """
    A = gk.gen_set(A)
    for a in A:
        if a.family != group.family:
            raise FamilyMismatch(f"{a!r} is not in {group!r}")
    if isinstance(group, gk.ProductGroup):
        A1 = gk.gen_set(a.payload[0] for a in A)
        A2 = gk.gen_set(a.payload[1] for a in A)
        q = ProductQuotient(quotient_for(group.left, A1, k, max_ball),
                            quotient_for(group.right, A2, k, max_ball))
        q.certificate_B = (A, k)
        return q
    if isinstance(group, gk.Lattice):
        width = max((abs(c) for a in A for c in a.payload), default=0)
        return LatticeQuotient(group.dim, 2 * k * width + 1, certificate_B=(A, k))
    if isinstance(group, gk.FreeGroup):
        L = max((_word_length(a) for a in A), default=0)
        return FreeBallQuotient(group.rank, 2 * k * L, max_ball=max_ball, certificate_B=(A, k))
    if gk.is_finite(group):
        return IdentityQuotient(group, certificate_B=(A, k))
    raise UnsupportedFamily(f"no quotient oracle for {group!r}")


# ---------------------------------------------------------------------------
# checks and closures


@dataclass
class InjectivityReport:
    size: int
    pairs_checked: int
    collisions: list = field(default_factory=list)

    @property
    def injective(self) -> bool:
        return not self.collisions


def check_injective(q: FiniteQuotient, B: Sequence[GroupElement], cap: int = 200_000) -> InjectivityReport:
    """Pairwise separation check of pi on B; collisions are listed as element pairs."""
    B = gk.gen_set(B)
    if len(B) > cap:
        raise BudgetExceeded(f"|B| = {len(B)} exceeds brute-force cap {cap}")
    buckets: dict = {}
    for b in B:
        buckets.setdefault(q.key(q.apply(b)), []).append(b)
    collisions = []
    for members in buckets.values():
        for i in range(len(members)):
            for j in range(i + 1, len(members)):
                collisions.append((members[i], members[j]))
    n = len(B)
    return InjectivityReport(size=n, pairs_checked=n * (n - 1) // 2, collisions=collisions)


def order_lower_bound(q: FiniteQuotient, images: Sequence) -> int:
    """Lagrange bound: lcm of orders of the images and their pairwise products."""
    out = 1
    for p in images:
        out = math.lcm(out, q.element_order(p))
    for i in range(len(images)):
        for j in range(i + 1, len(images)):
            out = math.lcm(out, q.element_order(q.mul(images[i], images[j])))
    return out


def enumerate_image(q: FiniteQuotient, generators: Sequence[GroupElement], cap: int = 1_000_000) -> list:
    """Breadth-first closure of pi(generators); returns the generated subgroup.

    Elements come out in discovery order, starting at the identity.  Raises
    BudgetExceeded as soon as the subgroup provably or actually exceeds ``cap``.
    """
    if cap <= 0:
        raise ValueError("cap must be positive")
    seen_keys = set()
    imgs = []
    for g in generators:
        p = q.apply(g)
        if q.key(p) not in seen_keys:
            seen_keys.add(q.key(p))
            imgs.append(p)
    bound = order_lower_bound(q, imgs)
    if bound > cap:
        raise BudgetExceeded(f"image has order >= {bound} > cap {cap}; use lazy mode")
    steps = list(imgs)
    for p in imgs:
        ip = q.inv(p)
        if q.key(ip) not in seen_keys:
            seen_keys.add(q.key(ip))
            steps.append(ip)
    e = q.identity()
    out = [e]
    seen = {q.key(e)}
    frontier = [e]
    while frontier:
        nxt = []
        for x in frontier:
            for s in steps:
                y = q.mul(x, s)
                ky = q.key(y)
                if ky not in seen:
                    seen.add(ky)
                    out.append(y)
                    nxt.append(y)
                    if len(out) > cap:
                        raise BudgetExceeded(f"image exceeds cap {cap}; use lazy mode")
        frontier = nxt
    return out
