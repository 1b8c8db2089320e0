"""Model sequences with shrinking epsilon.

Each stage is an exact finite model, so the window deviations |eta_n - d| are
controlled stagewise.  The ultrafilter limit itself is not computed; the
trace reports tail envelopes (sup and inf over later stages) instead.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Sequence

from .exceptions import BudgetExceeded
from .model import Caps, build_model, verify_model

ULTRAFILTER_NOTE = ("stagewise surrogate: no ultrafilter limit is computed; "
                    "tail envelopes of the window deviations are reported instead")


@dataclass
class SequencePlan:
    group: Any
    action: Any          # Action handle or SampledAction
    A: Sequence | None
    X0: Sequence | None
    schedule: Sequence[float]
    mode: str = "materialized"
    caps: Caps | None = None
    tol: float = 1e-9

    def __post_init__(self):
        self.schedule = [float(e) for e in self.schedule]
        if not self.schedule:
            raise ValueError("schedule must be nonempty")
        if any(e <= 0 for e in self.schedule):
            raise ValueError("schedule entries must be positive")
        if any(b >= a for a, b in zip(self.schedule, self.schedule[1:])):
            raise ValueError("schedule must be strictly decreasing")


@dataclass
class SequenceTrace:
    stages: list = field(default_factory=list)
    complete: bool = True
    note: str = ULTRAFILTER_NOTE

    @property
    def deviations(self) -> list:
        return [s["max_deviation"] for s in self.stages if "max_deviation" in s]

    @property
    def passed(self) -> bool:
        return self.complete and all(s["pass"] for s in self.stages)

    @property
    def tail_sup(self) -> list:
        devs = self.deviations
        return [max(devs[i:]) for i in range(len(devs))]

    @property
    def tail_inf(self) -> list:
        devs = self.deviations
        return [min(devs[i:]) for i in range(len(devs))]


def run_sequence(plan: SequencePlan) -> SequenceTrace:
    trace = SequenceTrace()
    for eps in plan.schedule:
        try:
            model = build_model(plan.group, plan.action, plan.A, plan.X0, epsilon=eps,
                                mode=plan.mode, caps=plan.caps)
            rep = verify_model(model, tol=plan.tol)
        except BudgetExceeded as exc:
            trace.complete = False
            trace.stages.append({"epsilon": eps, "error": str(exc), "pass": False})
            break
        trace.stages.append({
            "epsilon": eps,
            "k": model.k,
            "quotient": model.quotient.descriptor(),
            "max_deviation": rep.max_deviation,
            "max_eq_residual": rep.max_eq_residual,
            "pass": rep.passed and rep.max_deviation <= eps + plan.tol,
        })
    return trace
