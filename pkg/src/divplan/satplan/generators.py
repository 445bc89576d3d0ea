"""SAT-backed behaviour and plan generators.

Both generators sweep an ascending horizon range, re-encoding from scratch at
each horizon: a plan of length h is found at horizon h, never as a padded
longer model. Every generator call restarts at the bottom of the range,
because forbidding a behaviour or plan may make shorter horizons feasible
again irrelevant — the cheapest remaining witness can sit at any length.
"""

from __future__ import annotations

from typing import Iterable, Optional, Sequence

from ..bspace import (
    Behaviour,
    BehaviourSpace,
    GoalAssignment,
    SpaceConfigError,
    pbehaviour,
)
from ..core import GeneratorTimeout, GroundProblem, Plan, PlanTrace, validate_plan
from .encoding import (
    CnfTask,
    decode,
    encode,
    forbid_behaviour,
    forbid_plan,
    solve_task,
)
from .solver import ResourceLimit

DEFAULT_HORIZONS = range(0, 21)


def _merged_assignment(space: BehaviourSpace, behaviour: Behaviour) -> Optional[dict]:
    """Combine per-feature goal-fluent assignments into one map.

    Returns None when two features contradict each other: such a cell can
    never be realised, so there is nothing to forbid.
    """
    merged: dict = {}
    for feature, value in zip(space.features, behaviour):
        for fluent, positive in feature.expression.assignment_for(value).items():
            if merged.setdefault(fluent, positive) != positive:
                return None
    return merged


def _check_goal_assignment_space(space: BehaviourSpace) -> None:
    for feature in space.features:
        if not isinstance(feature.expression, GoalAssignment):
            raise SpaceConfigError(
                f"feature {feature.name!r} is not expressed over goal-fluent "
                "assignments; use the simulator backend for temporal features"
            )


def _solve_task(
    task: CnfTask, seed: int, max_conflicts: Optional[int]
) -> Optional[list]:
    try:
        return solve_task(task, seed=seed, max_conflicts=max_conflicts)
    except ResourceLimit as exc:
        raise GeneratorTimeout(str(exc)) from exc


def _horizons(problem: GroundProblem, horizon_range: Iterable[int]):
    for h in horizon_range:
        if problem.budget is not None and h > problem.budget:
            continue
        yield h


def _checked_trace(problem: GroundProblem, task: CnfTask, model: Sequence) -> PlanTrace:
    trace = decode(model, task)
    validated = validate_plan(problem, trace.plan)
    if validated.states != trace.states:
        raise AssertionError(
            "decoded state sequence disagrees with plan execution; "
            "the encoding's frame axioms are broken"
        )
    return trace


def behaviour_generator_sat(
    problem: GroundProblem,
    space: BehaviourSpace,
    found_behaviours: Iterable[Behaviour],
    horizon_range: Iterable[int] = DEFAULT_HORIZONS,
    *,
    seed: int = 0,
    max_conflicts: Optional[int] = None,
) -> Optional[PlanTrace]:
    """A valid trace whose behaviour is none of found_behaviours, or None.

    Horizons are tried in the given (ascending) order; each horizon's task
    carries one forbidding clause per already-found behaviour.
    """
    _check_goal_assignment_space(space)
    assignments = []
    for behaviour in found_behaviours:
        merged = _merged_assignment(space, behaviour)
        if merged is None:
            continue
        if not merged:
            # a cell with no constraining fluents covers every trace
            return None
        assignments.append(sorted((str(f), f, v) for f, v in merged.items()))
    assignments.sort()

    for h in _horizons(problem, horizon_range):
        task = encode(problem, h)
        for assignment in assignments:
            forbid_behaviour(task, {f: v for _, f, v in assignment})
        model = _solve_task(task, seed, max_conflicts)
        if model is None:
            continue
        trace = _checked_trace(problem, task, model)
        behaviour = pbehaviour(space, trace)
        if behaviour in set(found_behaviours):
            raise AssertionError(
                f"solver returned already-found behaviour {behaviour}; "
                "behaviour-forbidding clauses are broken"
            )
        return trace
    return None


def plan_generator_sat(
    problem: GroundProblem,
    existing_plans: Iterable[Plan],
    horizon_range: Iterable[int] = DEFAULT_HORIZONS,
    *,
    seed: int = 0,
    max_conflicts: Optional[int] = None,
) -> Optional[PlanTrace]:
    """A valid trace whose plan is not in existing_plans, or None.

    Only plans whose length equals the current horizon are forbidden at that
    horizon — others cannot be models there anyway.
    """
    existing = list(existing_plans)
    seen_labels = {plan.labels() for plan in existing}

    for h in _horizons(problem, horizon_range):
        if h == 0 and () in seen_labels:
            continue  # the empty plan is the only horizon-0 model
        task = encode(problem, h)
        for plan in sorted(
            (p for p in existing if len(p) == h), key=lambda p: p.labels()
        ):
            forbid_plan(task, plan)
        model = _solve_task(task, seed, max_conflicts)
        if model is None:
            continue
        trace = _checked_trace(problem, task, model)
        if trace.plan.labels() in seen_labels:
            raise AssertionError(
                f"solver returned already-known plan {trace.plan.labels()}; "
                "plan-forbidding clauses are broken"
            )
        return trace
    return None
