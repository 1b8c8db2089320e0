"""Exit criteria, one test per criterion, each at its stated tolerance and time limit.

Run alone with ``pytest -m acceptance -s``; each test prints a PASS/FAIL line
and the terminal summary lists every criterion.
"""
import time

import numpy as np
import pytest

from finact import groups as gk
from finact import quotients as qo
from finact.actions import LeftDiscreteAction, TranslationAction
from finact.hamming import hamming_distance, hamming_length
from finact.model import build_model, check_model_metric, eta, eta_matrix, lazy_path, verify_model
from finact.norms import WordSeminorm, approximate_seminorm, validate_norm
from finact.sequence import SequencePlan, run_sequence

from instances import random_instances
from oracles import brute_eta

INSTANCES = random_instances(seed=2024, count=24)


def report(label, ok, detail=""):
    print(f"\n{label} {'PASS' if ok else 'FAIL'} {detail}")
    assert ok, detail


def z_window():
    Z = gk.Lattice(1)
    h = TranslationAction(Z)
    return Z, h, [Z.element(1)], [h.point(0)]


def instance_models(mode):
    Z, h, A, X0 = z_window()
    yield "integer", build_model(Z, h, A, X0, epsilon=1.0, mode=mode)
    for i, inst in enumerate(INSTANCES):
        yield f"{i}:{inst['kind']}", build_model(inst["group"], inst["window"], epsilon=inst["eps"], mode=mode)


@pytest.mark.acceptance("AC1")
def test_ac1_integer_equality():
    t0 = time.perf_counter()
    Z, h, A, X0 = z_window()
    model = build_model(Z, h, A, X0, epsilon=1.0)
    rep = verify_model(model)
    elapsed = time.perf_counter() - t0
    ok = (model.m == 3 and model.k == 6 and model.quotient.descriptor()["modulus"] == 13
          and len(rep.records) == 9 and rep.max_eq_residual <= 1e-9
          and abs(rep.max_deviation - 1.0) <= 1e-9 and elapsed < 1.0)
    report("AC1", ok, f"m={model.m} k={model.k} max|eta-d_eps|={rep.max_eq_residual} "
                      f"max|eta-d|={rep.max_deviation} t={elapsed:.3f}s")


@pytest.mark.acceptance("AC2")
def test_ac2_lazy_matches_oracle():
    assert len(INSTANCES) >= 20
    kinds = {inst["kind"] for inst in INSTANCES}
    t0 = time.perf_counter()
    worst = 0.0
    for inst in INSTANCES:
        order = inst["modulus"] ** getattr(inst["group"], "dim", 1)
        assert len(inst["A"]) <= 7 and len(inst["X0"]) <= 3 and order <= 500
        model = build_model(inst["group"], inst["window"], epsilon=inst["eps"], mode="lazy")
        oracle = brute_eta(inst["window"].kappa, inst["vecs"], len(inst["X0"]), inst["eps"], inst["modulus"])
        worst = max(worst, float(np.max(np.abs(eta_matrix(model) - oracle))))
    elapsed = time.perf_counter() - t0
    report("AC2", worst <= 1e-12 and elapsed < 30 and any(k.startswith("lattice") for k in kinds)
           and any(k.startswith("cyclic") for k in kinds),
           f"{len(INSTANCES)} instances, max|lazy-oracle|={worst:.3g} t={elapsed:.2f}s")


@pytest.mark.acceptance("AC3")
def test_ac3_free_group_lazy(monkeypatch):
    def forbidden(*a, **k):
        raise AssertionError("H0 enumeration attempted")

    monkeypatch.setattr(qo, "enumerate_image", forbidden)
    t0 = time.perf_counter()
    F = gk.FreeGroup(2)
    model = build_model(F, LeftDiscreteAction(F), F.generators(), [F.identity()], epsilon=1.0, mode="lazy")
    A = model.window.A
    etas = [eta(model, g, h, 0, 0) for g in A for h in A if g != h]
    explored = len(model.search_from(0))
    elapsed = time.perf_counter() - t0
    limit = len(gk.product_set(A, 4)) * len(model.window.X0)
    ok = (model.k == 4 and model.params["quotient"] == {"kind": "free-ball", "radius": 8, "ball_size": 13121}
          and all(v == 2.0 for v in etas) and explored <= limit and elapsed < 10)
    report("AC3", ok, f"k={model.k} explored={explored}<={limit} t={elapsed:.2f}s")


@pytest.mark.acceptance("AC4")
def test_ac4_metric_and_isometry():
    failures = []
    count = 0
    for name, model in instance_models("materialized"):
        rep = check_model_metric(model, tol=1e-9)
        bad_iso = {g: d for g, d in rep.isometry_defects.items() if d > 1e-9}
        if rep.pseudometric_violations or rep.zero_distance_pairs or bad_iso:
            failures.append(name)
        count += 1
    report("AC4", not failures, f"{count} models, failing: {failures}")


@pytest.mark.acceptance("AC5")
def test_ac5_quotient_certificates():
    bad = []
    for inst in INSTANCES:
        model = build_model(inst["group"], inst["window"], epsilon=inst["eps"], mode="lazy")
        q = model.quotient
        if not qo.check_injective(q, gk.product_set(model.window.A, model.k)).injective:
            bad.append(inst["kind"])
    F = gk.FreeGroup(2)
    q = qo.quotient_for(F, gk.symmetrize(F.generators()), 4)
    if not qo.check_injective(q, gk.product_set(gk.symmetrize(F.generators()), 4)).injective:
        bad.append("free")
    B = [gk.lattice_vector([i]) for i in range(-6, 7)]
    neg = qo.check_injective(qo.LatticeQuotient(1, 12), B)
    pairs = [{u.payload, v.payload} for u, v in neg.collisions]
    ball = qo.free_ball_quotient(2, 6)
    words = qo.free_ball(2, 6)
    basepoint = all(ball.basepoint_image(ball.apply(gk.free_word(w))) == tuple(w) for w in words)
    report("AC5", not bad and pairs == [{(6,), (-6,)}] and basepoint,
           f"non-injective: {bad}; Z/12 collisions {pairs}; {len(words)} words checked")


@pytest.mark.acceptance("AC6")
def test_ac6_integer_norm():
    t0 = time.perf_counter()
    Z = gk.Lattice(1)
    H, _ = approximate_seminorm(Z, WordSeminorm(Z), [Z.element(i) for i in (0, 1, 2, -1, -2)], 1.0)
    vals = {g: float(H.rho[H.phi[f"[{g}]"]]) for g in (-2, -1, 0, 1, 2)}
    expect = {g: (abs(g) + 1.0 if g else 0.0) for g in vals}
    rep = validate_norm(H)
    elapsed = time.perf_counter() - t0
    ok = (H.order == 41 and all(abs(vals[g] - expect[g]) <= 1e-9 for g in vals)
          and rep.ok and elapsed < 5)
    report("AC6", ok, f"|H|={H.order} rho={vals} t={elapsed:.2f}s")


@pytest.mark.acceptance("AC7")
def test_ac7_hamming():
    formulas = hamming_length(list(range(8))) == 0.0
    for n in range(2, 12):
        t = list(range(n))
        t[0], t[n - 1] = t[n - 1], t[0]
        formulas &= hamming_length(t) == 2 / n
        formulas &= hamming_length([(i + 1) % n for i in range(n)]) == 1.0
    rng = np.random.default_rng(20)
    bad = 0
    for _ in range(1000):
        s, t, u = (rng.permutation(8) for _ in range(3))
        d = hamming_distance(s, t)
        if hamming_distance(u[s], u[t]) != d or hamming_distance(s[u], t[u]) != d:
            bad += 1
    report("AC7", formulas and bad == 0, f"formulas={formulas} invariance failures={bad}/1000")


@pytest.mark.acceptance("AC8")
def test_ac8_sequence():
    t0 = time.perf_counter()
    Z, h, A, X0 = z_window()
    schedule = [1 / n for n in range(1, 5)]
    trace = run_sequence(SequencePlan(group=Z, action=h, A=A, X0=X0, schedule=schedule))
    elapsed = time.perf_counter() - t0
    devs = trace.deviations
    ok = (trace.complete and len(devs) == 4
          and all(abs(d - e) <= 1e-9 and d <= e + 1e-9 for d, e in zip(devs, schedule)) and elapsed < 5)
    report("AC8", ok, f"deviations={devs} t={elapsed:.2f}s")


@pytest.mark.acceptance("AC9")
def test_ac9_proof_trace():
    bad = []
    paths = 0
    for name, model in instance_models("lazy"):
        sa, q = model.window, model.quotient
        for gi, g in enumerate(sa.A):
            for hi, h in enumerate(sa.A):
                for xi in range(len(sa.X0)):
                    for yi in range(len(sa.X0)):
                        path = lazy_path(model, gi, hi, xi, yi)
                        paths += 1
                        b, x = g, xi
                        for gj, hj, xa, xb in path:
                            if xa != x:
                                bad.append((name, "chain"))
                            b = b * gk.inverse(sa.A[gj]) * sa.A[hj]
                            x = xb
                        if len(path) > model.k / 2 or x != yi or q.key(q.apply(b)) != q.key(q.apply(h)):
                            bad.append((name, gi, hi, xi, yi))
    report("AC9", not bad and paths > 0, f"{paths} paths, violations: {bad[:5]}")
