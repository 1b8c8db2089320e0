"""Normalized Hamming length and metric on permutations, and the left-right demo."""
from __future__ import annotations

from typing import Sequence

import numpy as np

from . import groups as gk
from .actions import LeftRightAction
from .model import Caps, build_model, verify_model
from .quotients import FreeBallQuotient


def _arr(sigma) -> np.ndarray:
    if isinstance(sigma, gk.GroupElement):
        sigma = sigma.payload
    arr = np.asarray(getattr(sigma, "arr", sigma))
    if sorted(arr.tolist()) != list(range(len(arr))):
        raise ValueError("not a permutation")
    return arr


def hamming_length(sigma) -> float:
    """Fraction of points moved by sigma."""
    a = _arr(sigma)
    if len(a) == 0:
        return 0.0
    return int(np.count_nonzero(a != np.arange(len(a)))) / len(a)


def hamming_distance(sigma, tau) -> float:
    """l(sigma^-1 tau), i.e. the fraction of points where sigma and tau disagree."""
    a, b = _arr(sigma), _arr(tau)
    if len(a) != len(b):
        raise ValueError(f"degree mismatch: {len(a)} vs {len(b)}")
    if len(a) == 0:
        return 0.0
    # sigma^-1 tau fixes i iff tau(i) == sigma(i)
    return int(np.count_nonzero(a != b)) / len(a)


def left_right_demo(hom: dict, A_F: Sequence, epsilon: float, mode: str = "lazy", caps: Caps | None = None):
    """Model of F x F acting on (Z/n, discrete) by (g, h).x = pi(g) x pi(h)^-1.

    ``hom`` is ``{"target_order": n, "gen_images": [...]}``; ``A_F`` holds free
    words (as elements or signed index lists).  The window is A_F x A_F,
    symmetrized, at the single point e of Z/n.  Returns ``(model, report)``.
    """
    rank = len(hom["gen_images"])
    F = gk.FreeGroup(rank)
    G = gk.ProductGroup(F, F)
    action = LeftRightAction(G, int(hom["target_order"]), hom["gen_images"])
    words = [w if isinstance(w, gk.GroupElement) else F.element(list(w)) for w in A_F]
    words = gk.symmetrize(words)
    A = [gk.pair(g, h) for g in words for h in words]
    model = build_model(G, action, A, [0], epsilon=epsilon, mode=mode, caps=caps)
    return model, verify_model(model)


def ball_sofic_lengths(rank: int, words: Sequence, radii: Sequence[int]) -> dict:
    """Hamming lengths of the free-ball images of ``words`` for each radius.

    A finite-stage view of a sofic approximation of the free group: images of
    nontrivial words move the basepoint, images of e are the identity.
    """
    F = gk.FreeGroup(rank)
    out = {}
    for R in radii:
        q = FreeBallQuotient(rank, R)
        out[R] = [hamming_length(q.apply(w if isinstance(w, gk.GroupElement) else F.element(list(w))))
                  for w in words]
    return out
