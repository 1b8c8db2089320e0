"""Finite isometric models of a sampled action.

Pipeline: window kappa -> d_eps = kappa + eps * [distinct], its maximum m and
the radius k = max(2, ceil(2m / eps)) -> a quotient pi injective on A^k ->
the weighted graph on H0 x X0 with an edge between (q pi(g), x) and
(q pi(h), y) of weight d_eps((g,x),(h,y)) -> its path metric eta.

In materialized mode eta is tabulated on the whole carrier (H' x X0, with
H' the image of A together with the group generators); in lazy mode eta is
evaluated on demand by a bounded search from (e, x).
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

from . import groups as gk
from . import quotients as qo
from .actions import Action, SampledAction, sample_action, validate_pseudometric
from .exceptions import BudgetExceeded, FamilyMismatch
from .groups import GroupElement
from .paths import INF, ImplicitGraph, MaterializedGraph, all_pairs_oracle, bounded_dijkstra, diameter

MODES = ("materialized", "lazy")


def _env_max_vertices() -> int:
    raw = os.environ.get("FINACT_MAX_VERTICES")
    return int(raw) if raw else 1_000_000


@dataclass
class Caps:
    max_vertices: int = field(default_factory=_env_max_vertices)
    max_quotient_order: int = 1_000_000
    max_ball: int = 2_000_000
    max_materialized: int = 2000

    def to_dict(self) -> dict:
        return {"max_vertices": self.max_vertices, "max_quotient_order": self.max_quotient_order,
                "max_ball": self.max_ball, "max_materialized": self.max_materialized}


def normalize_mode(mode: str) -> str:
    if mode == "materialize":
        return "materialized"
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    return mode


@dataclass
class EpsilonMetric:
    action: SampledAction
    epsilon: float
    values: np.ndarray
    m: float
    k: int


def build_epsilon_metric(sa: SampledAction, epsilon: float) -> EpsilonMetric:
    """d_eps = kappa + eps * d_st on the window, with m and k."""
    if not epsilon > 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    n = sa.size
    values = sa.kappa + epsilon * (1.0 - np.eye(n))
    m = float(values.max()) if n else 0.0
    k = max(2, math.ceil(2 * m / epsilon))
    return EpsilonMetric(action=sa, epsilon=float(epsilon), values=values, m=m, k=k)


def _steps(em: EpsilonMetric, q: qo.FiniteQuotient) -> dict:
    """Per source point x: (step, y, weight, label), parallel edges collapsed to the minimum."""
    sa = em.action
    nx = len(sa.X0)
    imgs = [q.apply(g) for g in sa.A]
    inv_imgs = [q.inv(p) for p in imgs]
    steps = {}
    for xi in range(nx):
        best: dict = {}
        for gi in range(len(sa.A)):
            for hi in range(len(sa.A)):
                s = q.mul(inv_imgs[gi], imgs[hi])
                ks = q.key(s)
                for yi in range(nx):
                    w = float(em.values[sa.index(gi, xi), sa.index(hi, yi)])
                    if yi == xi and ks == q.key(q.identity()):
                        continue
                    slot = (ks, yi)
                    if slot not in best or w < best[slot][2]:
                        best[slot] = (s, yi, w, (gi, hi, xi, yi))
        steps[xi] = [best[key] for key in sorted(best)]
    return steps


@dataclass
class FiniteModel:
    mode: str
    group: gk.Group
    emetric: EpsilonMetric
    quotient: qo.FiniteQuotient
    graph: ImplicitGraph
    caps: Caps
    D: float | None = None
    carrier: list | None = None       # H' elements in vertex-block order
    subgroup_order: int | None = None  # |H0|; the first |H0| carrier entries are H0
    metric: np.ndarray | None = None
    y0_graph: MaterializedGraph | None = None
    psi: dict = field(default_factory=dict)
    f: dict = field(default_factory=dict)
    _index: dict = field(default_factory=dict, repr=False)
    _searches: dict = field(default_factory=dict, repr=False)

    @property
    def window(self) -> SampledAction:
        return self.emetric.action

    @property
    def epsilon(self) -> float:
        return self.emetric.epsilon

    @property
    def m(self) -> float:
        return self.emetric.m

    @property
    def k(self) -> int:
        return self.emetric.k

    @property
    def n_points(self) -> int:
        return len(self.window.X0)

    @property
    def params(self) -> dict:
        return {"epsilon": self.epsilon, "m": self.m, "k": self.k, "D": self.D,
                "quotient": self.quotient.descriptor()}

    # vertex bookkeeping (materialized)

    def vertex_id(self, elem, xi: int) -> int:
        try:
            return self._index[self.quotient.key(elem)] * self.n_points + xi
        except KeyError:
            raise ValueError("vertex out of carrier") from None

    def vertex(self, vid: int) -> tuple:
        e, xi = divmod(vid, self.n_points)
        return self.carrier[e], xi

    def search_from(self, xi: int):
        """Bounded search from (e, x); cached per x."""
        if xi not in self._searches:
            src = (self.quotient.identity(), xi)
            self._searches[xi] = bounded_dijkstra(self.graph, src, bound=self.m,
                                                  max_vertices=self.caps.max_vertices)
        return self._searches[xi]


def _window_A(group: gk.Group, A: Sequence[GroupElement]) -> tuple:
    for a in A:
        if not group.contains(a):
            raise FamilyMismatch(f"{a!r} is not an element of {group!r}")
    return gk.symmetrize(A)


def build_model(group: gk.Group, action, A: Sequence[GroupElement] | None = None,
                X0: Sequence | None = None, epsilon: float = 1.0, mode: str = "materialized",
                caps: Caps | None = None) -> FiniteModel:
    """Build the finite model for a builtin action handle or a sampled window.

    ``action`` is either an :class:`~finact.actions.Action` (then A and X0 are
    required; A is symmetrized) or a ready :class:`SampledAction`.
    """
    mode = normalize_mode(mode)
    caps = caps or Caps()
    if isinstance(action, SampledAction):
        sa = action
        if set(sa.A) != set(gk.symmetrize(sa.A)):
            raise ValueError("window A must be symmetric and contain the identity")
    elif isinstance(action, Action):
        if A is None or X0 is None:
            raise ValueError("A and X0 are required with an action handle")
        sa = sample_action(action, _window_A(group, A), X0)
    else:
        raise TypeError(f"expected an Action or SampledAction, got {type(action).__name__}")

    em = build_epsilon_metric(sa, epsilon)
    q = qo.quotient_for(group, sa.A, em.k, max_ball=caps.max_ball)
    graph = ImplicitGraph(q, _steps(em, q))
    model = FiniteModel(mode=mode, group=group, emetric=em, quotient=q, graph=graph, caps=caps)
    if mode == "materialized":
        _materialize(model)
    return model


def _left_invariant_form(dist: np.ndarray, H0: list, idx0: dict, q, nx: int) -> np.ndarray:
    """Rebuild all entries from the rows of (e, x), then symmetrize.

    All-pairs sums accumulate in different orders for translated pairs; this
    makes the table exactly invariant under left multiplication by H0.
    """
    h0 = len(H0)
    T = np.empty((h0, h0), dtype=np.int64)
    for i, p in enumerate(H0):
        ip = q.inv(p)
        for j, r in enumerate(H0):
            T[i, j] = idx0[q.key(q.mul(ip, r))]
    # H0[0] is the identity, so the row of (e, x) is row x
    ar = np.arange(nx)
    cols = T[:, None, :, None] * nx + ar[None, None, None, :]
    out = dist[ar[None, :, None, None], cols].reshape(h0 * nx, h0 * nx)
    return np.minimum(out, out.T)


def _materialize(model: FiniteModel) -> None:
    q, caps, em = model.quotient, model.caps, model.emetric
    sa = em.action
    nx = len(sa.X0)
    gens = list(sa.A) + [g for g in model.group.generators() if g not in sa.A]

    H0 = qo.enumerate_image(q, sa.A, cap=caps.max_quotient_order)
    n0 = len(H0) * nx
    if n0 > caps.max_materialized:
        raise BudgetExceeded(f"|H0 x X0| = {n0} exceeds the materialized cap "
                             f"{caps.max_materialized}; use lazy mode")
    idx0 = {q.key(h): i for i, h in enumerate(H0)}
    g0 = MaterializedGraph(n0)
    for i, v in enumerate(H0):
        for xi in range(nx):
            for s, yi, w, label in model.graph.steps[xi]:
                j = idx0[q.key(q.mul(v, s))]
                g0.add_edge(i * nx + xi, j * nx + yi, w, label)
    eta0 = _left_invariant_form(all_pairs_oracle(g0, cap=caps.max_materialized), H0, idx0, q, nx)
    diam0 = diameter(g0, distances=eta0)
    # the epsilon floor keeps cross-coset distances positive on one-point windows
    D = max(diam0, em.m, em.epsilon)

    Hp = qo.enumerate_image(q, gens, cap=caps.max_quotient_order)
    if len(Hp) * nx > caps.max_materialized:
        raise BudgetExceeded(f"carrier of {len(Hp) * nx} vertices exceeds the materialized cap "
                             f"{caps.max_materialized}; use lazy mode")
    carrier = list(H0)
    index = dict(idx0)
    for c in Hp:
        if q.key(c) in index:
            continue
        for h in H0:
            y = q.mul(c, h)
            index[q.key(y)] = len(carrier)
            carrier.append(y)
    if len(carrier) != len(Hp):
        raise AssertionError("coset decomposition does not cover the image")
    n = len(carrier) * nx
    metric = np.full((n, n), D)
    for b in range(0, n, n0):
        metric[b:b + n0, b:b + n0] = eta0

    model.D = D
    model.carrier = carrier
    model.subgroup_order = len(H0)
    model.metric = metric
    model.y0_graph = g0
    model._index = index
    for g in gens:
        p = q.apply(g)
        perm = np.empty(n, dtype=np.int64)
        for ei, c in enumerate(carrier):
            tgt = index[q.key(q.mul(p, c))]
            perm[ei * nx:(ei + 1) * nx] = tgt * nx + np.arange(nx)
        model.psi[gk.encode(g)] = perm
    model.f = {x: index[q.key(q.identity())] * nx + xi for xi, x in enumerate(sa.X0)}


# ---------------------------------------------------------------------------
# evaluation


def _window_index(model: FiniteModel, g, x) -> tuple:
    sa = model.window
    gi = int(g) if isinstance(g, (int, np.integer)) else sa.A.index(g)
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        xi = int(x)
    else:
        xi = sa.X0.index(str(x))
    return gi, xi


def eta(model: FiniteModel, g, h, x, y) -> float:
    """eta(psi_g f(x), psi_h f(y)) for g, h in A and x, y in X0.

    g and h may be elements or A-indices, x and y point ids or X0-indices.
    """
    gi, xi = _window_index(model, g, x)
    hi, yi = _window_index(model, h, y)
    sa, q = model.window, model.quotient
    pg, ph = q.apply(sa.A[gi]), q.apply(sa.A[hi])
    if model.mode == "materialized":
        return float(model.metric[model.vertex_id(pg, xi), model.vertex_id(ph, yi)])
    # left invariance: eta((pi g, x), (pi h, y)) = eta((e, x), (pi(g^-1 h), y))
    target = (q.key(q.mul(q.inv(pg), ph)), yi)
    found = model.search_from(xi).get(target, INF)
    direct = float(model.emetric.values[sa.index(gi, xi), sa.index(hi, yi)])
    return min(found, direct)


def lazy_path(model: FiniteModel, g, h, x, y) -> list:
    """Edge labels (g_j, h_j, x_{j-1}, x_j) of the shortest path found by the lazy search.

    Indices refer to the window; empty when the endpoints coincide.
    """
    gi, xi = _window_index(model, g, x)
    hi, yi = _window_index(model, h, y)
    sa, q = model.window, model.quotient
    pg, ph = q.apply(sa.A[gi]), q.apply(sa.A[hi])
    target = (q.key(q.mul(q.inv(pg), ph)), yi)
    res = model.search_from(xi)
    if target not in res:
        return []
    return [label for _, _, label in res.path_to(target)]


def eta_matrix(model: FiniteModel) -> np.ndarray:
    """eta on the whole window, indexed like kappa."""
    sa = model.window
    n = sa.size
    out = np.zeros((n, n))
    for i in range(n):
        gi, xi = sa.split(i)
        for j in range(n):
            hi, yi = sa.split(j)
            out[i, j] = eta(model, gi, hi, xi, yi)
    return out


def act(model: FiniteModel, g: GroupElement, vertex):
    """psi_g: left translation (q, x) -> (pi(g) q, x).

    ``vertex`` is a vertex id (materialized) or a pair (finite element, x-index).
    """
    q = model.quotient
    p = q.apply(g)
    if isinstance(vertex, (int, np.integer)):
        if model.metric is None:
            raise ValueError("vertex ids need a materialized model")
        if not 0 <= vertex < len(model.metric):
            raise ValueError("vertex out of carrier")
        elem, xi = model.vertex(int(vertex))
        return model.vertex_id(q.mul(p, elem), xi)
    elem, xi = vertex
    if not 0 <= xi < model.n_points:
        raise ValueError("vertex out of carrier")
    out = q.mul(p, elem)
    if model.metric is not None:
        model.vertex_id(out, xi)
    return (out, xi)


# ---------------------------------------------------------------------------
# verification


@dataclass
class VerificationReport:
    records: list
    max_eq_residual: float
    max_deviation: float
    max_bound_residual: float
    epsilon: float
    tol: float

    @property
    def passed(self) -> bool:
        return self.max_eq_residual <= self.tol and self.max_bound_residual <= self.tol

    def failing(self) -> list:
        return [r for r in self.records
                if abs(r["residual"]) > self.tol or r["bound_residual"] > self.tol]


def verify_model(model: FiniteModel, sa: SampledAction | None = None, epsilon: float | None = None,
                 tol: float = 1e-9) -> VerificationReport:
    """Check eta = d_eps and |eta - d| <= eps on every window pair."""
    sa = sa if sa is not None else model.window
    eps = model.epsilon if epsilon is None else epsilon
    if sa.size != model.window.size:
        raise ValueError("window does not match the model")
    em = model.emetric
    records = []
    max_eq = max_dev = 0.0
    max_bound = -eps
    for i in range(sa.size):
        gi, xi = sa.split(i)
        for j in range(sa.size):
            hi, yi = sa.split(j)
            e = eta(model, gi, hi, xi, yi)
            d = float(sa.kappa[i, j])
            de = float(em.values[i, j])
            rec = {"g": gk.encode(sa.A[gi]), "h": gk.encode(sa.A[hi]), "x": sa.X0[xi], "y": sa.X0[yi],
                   "d": d, "d_eps": de, "eta": e, "residual": e - de,
                   "bound_residual": abs(e - d) - eps}
            records.append(rec)
            max_eq = max(max_eq, abs(e - de))
            max_dev = max(max_dev, abs(e - d))
            max_bound = max(max_bound, abs(e - d) - eps)
    return VerificationReport(records=records, max_eq_residual=max_eq, max_deviation=max_dev,
                              max_bound_residual=max_bound, epsilon=eps, tol=tol)


@dataclass
class MetricReport:
    pseudometric_violations: list
    zero_distance_pairs: list
    isometry_defects: dict

    @property
    def ok(self) -> bool:
        return not (self.pseudometric_violations or self.zero_distance_pairs
                    or any(v > 0 for v in self.isometry_defects.values()))


def check_model_metric(model: FiniteModel, tol: float = 1e-9) -> MetricReport:
    """Metric axioms on the tabulated carrier and exactness of every stored psi_g."""
    if model.metric is None:
        raise ValueError("metric checks need a materialized model")
    M = model.metric
    rep = validate_pseudometric(M, tol=tol)
    off = ~np.eye(len(M), dtype=bool)
    zeros = [tuple(map(int, ij)) for ij in zip(*np.nonzero(off & (M <= tol)))][:100]
    defects = {}
    for g, perm in model.psi.items():
        defects[g] = float(np.max(np.abs(M[np.ix_(perm, perm)] - M))) if len(M) else 0.0
    return MetricReport(rep.violations, zeros, defects)
