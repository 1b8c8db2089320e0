"""Isometric actions and their finite windows.

A window is the data (A, X0) together with the table
``kappa[(g,x),(h,y)] = d(phi_g x, phi_h y)``, indexed row-major with g in
A-order and x in X0-order.
"""
from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Sequence

import numpy as np

from . import groups as gk
from .exceptions import FamilyMismatch, UnsupportedFamily
from .groups import GroupElement

ACTION_KINDS = ("translation", "left-discrete", "left-word", "left-right")


@dataclass
class SampledAction:
    A: tuple
    X0: tuple
    kappa: np.ndarray
    provenance: str = "builtin"

    def __post_init__(self):
        self.A = tuple(self.A)
        self.X0 = tuple(str(x) for x in self.X0)
        self.kappa = np.asarray(self.kappa, dtype=float)
        n = len(self.A) * len(self.X0)
        if self.kappa.shape != (n, n):
            raise ValueError(f"kappa must be {n}x{n} for |A|={len(self.A)}, |X0|={len(self.X0)}")

    @property
    def size(self) -> int:
        return len(self.A) * len(self.X0)

    def index(self, gi: int, xi: int) -> int:
        return gi * len(self.X0) + xi

    def split(self, i: int) -> tuple:
        return divmod(i, len(self.X0))


@dataclass
class PseudometricReport:
    asymmetric: list = field(default_factory=list)
    nonzero_diagonal: list = field(default_factory=list)
    negative: list = field(default_factory=list)
    triangle: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not (self.asymmetric or self.nonzero_diagonal or self.negative or self.triangle)

    @property
    def violations(self) -> list:
        return ([("symmetry",) + v for v in self.asymmetric]
                + [("diagonal",) + v for v in self.nonzero_diagonal]
                + [("nonnegativity",) + v for v in self.negative]
                + [("triangle",) + v for v in self.triangle])


def validate_pseudometric(kappa, tol: float = 1e-9, limit: int = 100) -> PseudometricReport:
    """Check symmetry, zero diagonal, nonnegativity and every triangle inequality.

    Triangle violations are reported as ``(i, j, l)`` with
    ``kappa[i, l] > kappa[i, j] + kappa[j, l] + tol``; at most ``limit`` per kind.
    """
    K = np.asarray(kappa, dtype=float)
    rep = PseudometricReport()
    if K.ndim != 2 or K.shape[0] != K.shape[1]:
        raise ValueError("kappa must be a square matrix")
    n = K.shape[0]
    for i, j in zip(*np.nonzero(np.abs(K - K.T) > tol)):
        if i < j and len(rep.asymmetric) < limit:
            rep.asymmetric.append((int(i), int(j)))
    for i in np.nonzero(np.abs(np.diag(K)) > tol)[0][:limit]:
        rep.nonzero_diagonal.append((int(i),))
    for i, j in list(zip(*np.nonzero(K < -tol)))[:limit]:
        rep.negative.append((int(i), int(j)))
    # via-j slices keep memory at O(n^2)
    for j in range(n):
        via = K[:, j][:, None] + K[j, :][None, :]
        bad = np.nonzero(K > via + tol)
        for i, l in zip(*bad):
            if len(rep.triangle) >= limit:
                break
            rep.triangle.append((int(i), j, int(l)))
    return rep


# ---------------------------------------------------------------------------
# word lengths, used by the left-word action and by word seminorms


def word_length(group: gk.Group, g: GroupElement, weights: Sequence[float] | None = None) -> float:
    """Weighted word length of g with respect to the standard generators."""
    gens = group.generators()
    w = list(weights) if weights is not None else [1.0] * len(gens)
    if len(w) != len(gens):
        raise ValueError(f"expected {len(gens)} generator weights, got {len(w)}")
    if isinstance(group, gk.ProductGroup):
        r = len(group.left.generators())
        return (word_length(group.left, g.payload[0], w[:r])
                + word_length(group.right, g.payload[1], w[r:]))
    if isinstance(group, gk.FreeGroup):
        return float(sum(w[abs(x) - 1] for x in g.payload))
    if isinstance(group, gk.Lattice):
        return float(sum(wi * abs(x) for wi, x in zip(w, g.payload)))
    if isinstance(group, gk.CyclicGroup):
        r, n = g.payload
        return float(w[0] * min(r, n - r))
    if isinstance(group, gk.PermGroup):
        return _cayley_distances(group, tuple(w))[g]
    raise UnsupportedFamily(f"no word length for {group!r}")


_CAYLEY_CACHE: dict = {}


def _cayley_distances(group: gk.PermGroup, weights: tuple) -> dict:
    key = (group, weights)
    if key not in _CAYLEY_CACHE:
        steps = []
        for g, wt in zip(group.generators(), weights):
            steps.append((g, wt))
            steps.append((gk.inverse(g), wt))
        e = group.identity()
        dist = {e: 0.0}
        heap = [(0.0, gk.sort_key(e), e)]
        while heap:
            d, _, x = heapq.heappop(heap)
            if d > dist[x]:
                continue
            for s, wt in steps:
                y = gk.multiply(x, s)
                nd = d + wt
                if nd < dist.get(y, math.inf):
                    dist[y] = nd
                    heapq.heappush(heap, (nd, gk.sort_key(y), y))
        _CAYLEY_CACHE[key] = dist
    return _CAYLEY_CACHE[key]


# ---------------------------------------------------------------------------
# builtin actions


class Action:
    """An isometric action of ``group`` evaluable on finitely many points."""

    kind: str
    group: gk.Group

    def act(self, g: GroupElement, x):
        raise NotImplementedError

    def dist(self, x, y) -> float:
        raise NotImplementedError

    def point(self, data: Any):
        """Parse a point from its text form."""
        raise NotImplementedError

    def point_id(self, x) -> str:
        raise NotImplementedError

    def spec(self) -> dict:
        raise NotImplementedError


class TranslationAction(Action):
    """Z^n acting on R^n by translation, Euclidean distance."""

    kind = "translation"

    def __init__(self, group: gk.Group):
        if not isinstance(group, gk.Lattice):
            raise FamilyMismatch("translation action needs a lattice group")
        self.group = group
        self.dim = group.dim

    def act(self, g, x):
        return tuple(xi + gi for xi, gi in zip(x, g.payload))

    def dist(self, x, y):
        return math.sqrt(sum((a - b) ** 2 for a, b in zip(x, y)))

    def point(self, data):
        if isinstance(data, (int, float)) and not isinstance(data, bool):
            data = [data]
        if not isinstance(data, list) or len(data) != self.dim:
            raise ValueError(f"expected a point in R^{self.dim}, got {data!r}")
        return tuple(float(v) for v in data)

    def point_id(self, x):
        return ",".join(repr(v) if v != int(v) else str(int(v)) for v in x)

    def spec(self):
        return {"kind": "translation"}


class LeftDiscreteAction(Action):
    """G acting on itself by left multiplication, discrete 0/1 metric."""

    kind = "left-discrete"

    def __init__(self, group: gk.Group):
        self.group = group

    def act(self, g, x):
        return gk.multiply(g, x)

    def dist(self, x, y):
        return 0.0 if x == y else 1.0

    def point(self, data):
        return self.group.element(data)

    def point_id(self, x):
        return gk.encode(x)

    def spec(self):
        return {"kind": "left-discrete"}


class LeftWordAction(LeftDiscreteAction):
    """G acting on itself by left multiplication, weighted word metric."""

    kind = "left-word"

    def __init__(self, group: gk.Group, weights: Sequence[float] | None = None):
        super().__init__(group)
        self.weights = list(weights) if weights is not None else None
        # validates weight count
        word_length(group, group.identity(), self.weights)

    def dist(self, x, y):
        return word_length(self.group, gk.multiply(gk.inverse(x), y), self.weights)

    def spec(self):
        d = {"kind": "left-word"}
        if self.weights is not None:
            d["weights"] = list(self.weights)
        return d


class LeftRightAction(Action):
    """F x F acting on Q = Z/n by (g, h).x = pi(g) + x - pi(h), discrete metric.

    ``gen_images[i]`` is the residue that generator i+1 of F maps to.
    """

    kind = "left-right"

    def __init__(self, group: gk.Group, target_order: int, gen_images: Sequence[int]):
        if not (isinstance(group, gk.ProductGroup) and isinstance(group.left, gk.FreeGroup)
                and group.left == group.right):
            raise FamilyMismatch("left-right action needs a product F_r x F_r")
        if len(gen_images) != group.left.rank:
            raise ValueError(f"need {group.left.rank} generator images, got {len(gen_images)}")
        if target_order < 1:
            raise ValueError("target_order must be positive")
        self.group = group
        self.target_order = target_order
        self.gen_images = [int(v) % target_order for v in gen_images]

    def hom(self, w: GroupElement) -> int:
        n = self.target_order
        return sum((1 if x > 0 else -1) * self.gen_images[abs(x) - 1] for x in w.payload) % n

    def act(self, g, x):
        left, right = g.payload
        return (self.hom(left) + x - self.hom(right)) % self.target_order

    def dist(self, x, y):
        return 0.0 if x == y else 1.0

    def point(self, data):
        if not isinstance(data, int) or isinstance(data, bool):
            raise ValueError(f"points of the left-right action are residues, got {data!r}")
        return data % self.target_order

    def point_id(self, x):
        return str(x)

    def spec(self):
        return {"kind": "left-right",
                "hom": {"target_order": self.target_order, "gen_images": list(self.gen_images)}}


def make_builtin_action(spec: dict, group: gk.Group) -> Action:
    kind = spec.get("kind")
    if kind == "translation":
        return TranslationAction(group)
    if kind == "left-discrete":
        return LeftDiscreteAction(group)
    if kind == "left-word":
        return LeftWordAction(group, spec.get("weights"))
    if kind == "left-right":
        hom = spec.get("hom") or {}
        return LeftRightAction(group, int(hom.get("target_order", 0)), hom.get("gen_images", []))
    raise ValueError(f"unknown action kind {kind!r}")


def sample_action(handle: Action, A: Sequence[GroupElement], X0: Sequence, tol: float = 1e-9) -> SampledAction:
    """Fill the kappa table of the window (A, X0); the result is validated."""
    A = tuple(A)
    X0 = tuple(X0)
    images = [handle.act(g, x) for g in A for x in X0]
    n = len(images)
    K = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            K[i, j] = K[j, i] = handle.dist(images[i], images[j])
    sa = SampledAction(A=A, X0=tuple(handle.point_id(x) for x in X0), kappa=K, provenance="builtin")
    rep = validate_pseudometric(K, tol=tol)
    if not rep.ok:
        raise ValueError(f"sampled window is not a pseudometric: {rep.violations[:5]}")
    return sa


def table_action(group: gk.Group, A: Sequence[GroupElement], X0: Sequence[str], kappa,
                 tol: float = 1e-9) -> SampledAction:
    """Window from a user table.

    A must already be symmetric and contain e; rows are reordered into the
    canonical A-order.  Only window-checkable properties are validated.
    """
    A = list(A)
    if len(set(A)) != len(A):
        raise ValueError("duplicate elements in table A")
    if set(A) != set(gk.symmetrize(A)):
        raise ValueError("table A must be closed under inverses and contain the identity")
    for a in A:
        if a.family != group.family:
            raise FamilyMismatch(f"{a!r} is not in {group!r}")
    K = np.array([[_number(v) for v in row] for row in kappa], dtype=float)
    nx = len(X0)
    order = sorted(range(len(A)), key=lambda i: gk.sort_key(A[i]))
    perm = [gi * nx + xi for gi in order for xi in range(nx)]
    if K.shape != (len(A) * nx, len(A) * nx):
        raise ValueError(f"kappa must be {len(A) * nx} x {len(A) * nx}")
    K = K[np.ix_(perm, perm)]
    rep = validate_pseudometric(K, tol=tol)
    if not rep.ok:
        raise ValueError(f"table kappa is not a pseudometric: {rep.violations[:5]}")
    return SampledAction(A=tuple(A[i] for i in order), X0=tuple(X0), kappa=K, provenance="table")


def _number(v) -> float:
    if isinstance(v, bool):
        raise ValueError("booleans are not distances")
    if isinstance(v, (int, float)):
        return float(v)
    if isinstance(v, str):
        return float(Fraction(v.strip()))
    raise ValueError(f"not a distance value: {v!r}")
