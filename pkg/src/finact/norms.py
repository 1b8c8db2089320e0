"""Approximating a seminorm on G by a norm on a finite quotient."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from . import groups as gk
from .actions import SampledAction, word_length
from .groups import GroupElement
from .model import Caps, build_model


class Seminorm:
    """s: G -> [0, inf) with s(e) = 0, s(g^-1) = s(g), s(gh) <= s(g) + s(h)."""

    def __call__(self, g: GroupElement) -> float:
        raise NotImplementedError

    def spec(self) -> dict:
        raise NotImplementedError


class WordSeminorm(Seminorm):
    def __init__(self, group: gk.Group, weights: Sequence[float] | None = None):
        self.group = group
        self.weights = list(weights) if weights is not None else None
        word_length(group, group.identity(), self.weights)

    def __call__(self, g):
        return word_length(self.group, g, self.weights)

    def spec(self):
        d = {"kind": "word"}
        if self.weights is not None:
            d["weights"] = list(self.weights)
        return d


class StandardNorm(Seminorm):
    """n_std: 0 at the identity, 1 elsewhere."""

    def __call__(self, g):
        return 0.0 if gk.is_identity(g) else 1.0

    def spec(self):
        return {"kind": "standard"}


class PullbackSeminorm(Seminorm):
    """s(g) = rho(hom(g)) for a homomorphism into a normed group."""

    def __init__(self, hom: Callable[[GroupElement], object], rho: Callable[[object], float]):
        self.hom = hom
        self.rho = rho

    def __call__(self, g):
        return float(self.rho(self.hom(g)))

    def spec(self):
        return {"kind": "pullback"}


class TableSeminorm(Seminorm):
    """Explicit values on a finite set; evaluating elsewhere is an error."""

    def __init__(self, values: Mapping[GroupElement, float]):
        self.values = {g: float(v) for g, v in values.items()}

    def __call__(self, g):
        try:
            return self.values[g]
        except KeyError:
            raise ValueError(f"seminorm table has no value for {gk.encode(g)}") from None

    def spec(self):
        return {"kind": "table",
                "values": [[gk.to_json(g), v] for g, v in sorted(self.values.items(),
                                                                key=lambda kv: gk.sort_key(kv[0]))]}


def seminorm_to_window(s: Seminorm, A: Sequence[GroupElement]) -> SampledAction:
    """One-point window with kappa(g, h) = s(g^-1 h)."""
    A = tuple(A)
    n = len(A)
    K = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            K[i, j] = K[j, i] = s(gk.multiply(gk.inverse(A[i]), A[j]))
    return SampledAction(A=A, X0=("e",), kappa=K, provenance="seminorm")


@dataclass
class FiniteNormedGroup:
    elements: list           # finite elements (quotient images); index 0 is the identity
    encodings: list
    mul: np.ndarray          # mul[i, j] = index of elements[i] * elements[j]
    rho: np.ndarray
    phi: dict = field(default_factory=dict)   # encode(g) -> element index

    @property
    def order(self) -> int:
        return len(self.elements)


def approximate_seminorm(group: gk.Group, s: Seminorm, A: Sequence[GroupElement], epsilon: float,
                         caps: Caps | None = None):
    """Finite normed group (H, rho) and phi: G -> H with |rho(phi g) - s(g)| <= eps on A.

    H is the image of A together with the group generators, so phi is onto.
    Returns ``(normed_group, model)``.
    """
    A = gk.symmetrize(A)
    sa = seminorm_to_window(s, A)
    model = build_model(group, sa, epsilon=epsilon, mode="materialized", caps=caps)
    q = model.quotient
    elems = model.carrier
    index = {q.key(c): i for i, c in enumerate(elems)}
    n = len(elems)
    mul = np.empty((n, n), dtype=np.int64)
    for i, a in enumerate(elems):
        for j, b in enumerate(elems):
            mul[i, j] = index[q.key(q.mul(a, b))]
    e_vid = model.f["e"]
    rho = np.array([model.metric[model.vertex_id(c, 0), e_vid] for c in elems])
    phi = {}
    for g in list(A) + [g for g in group.generators() if g not in A]:
        phi[gk.encode(g)] = index[q.key(q.apply(g))]
    H = FiniteNormedGroup(elements=elems, encodings=[q.encode(c) for c in elems], mul=mul, rho=rho, phi=phi)
    return H, model


@dataclass
class NormReport:
    group_axioms: list = field(default_factory=list)
    identity: list = field(default_factory=list)
    definiteness: list = field(default_factory=list)
    symmetry: list = field(default_factory=list)
    subadditivity: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not (self.group_axioms or self.identity or self.definiteness
                    or self.symmetry or self.subadditivity)


def validate_norm(H: FiniteNormedGroup, tol: float = 1e-9, limit: int = 100) -> NormReport:
    """Exhaustive group-axiom and norm-axiom check over the tables."""
    rep = NormReport()
    M, rho = np.asarray(H.mul), np.asarray(H.rho)
    n = len(rho)
    ar = np.arange(n)
    # identity at index 0
    if not (np.array_equal(M[0], ar) and np.array_equal(M[:, 0], ar)):
        rep.group_axioms.append(("identity", 0))
    for i in range(n):
        if sorted(M[i].tolist()) != ar.tolist():
            rep.group_axioms.append(("latin-row", i))
    if n <= 400:
        # (ab)c == a(bc) for all triples
        left = M[M, :]                    # left[a, b, c] = (ab)c
        right = M[:, M]                   # right[a, b, c] = a(bc)
        bad = np.argwhere(left != right)
        rep.group_axioms.extend(("associativity",) + tuple(map(int, t)) for t in bad[:limit])
    inv = np.argmax(M == 0, axis=1)
    if abs(rho[0]) > tol:
        rep.identity.append(float(rho[0]))
    rep.definiteness.extend(int(i) for i in np.nonzero(rho[1:] <= tol)[0][:limit] + 1)
    rep.symmetry.extend(int(i) for i in np.nonzero(np.abs(rho - rho[inv]) > tol)[0][:limit])
    bad = np.argwhere(rho[M] > rho[:, None] + rho[None, :] + tol)
    rep.subadditivity.extend(tuple(map(int, t)) for t in bad[:limit])
    return rep
