"""Conflict-driven SAT solver with two watched literals and 1UIP learning.

Self-contained and fully deterministic: decisions pick the highest-activity
variable (ties to the lowest index) with saved phases, restarts follow a
fixed geometric schedule, and no randomness is consulted anywhere — the seed
argument is recorded for reproducibility bookkeeping only. A conflict budget
turns long runs into ResourceLimit instead of open-ended search.

Literals are non-zero ints (DIMACS convention: v / -v).
"""

from __future__ import annotations

import os
import shlex
import subprocess
import tempfile
from typing import Iterable, Optional, Sequence


class SatError(Exception):
    pass


class ResourceLimit(SatError):
    """Conflict budget exhausted before an answer was reached."""


class SolverBridgeError(SatError):
    """An external solver produced output we could not interpret."""


class Solver:
    """One-shot CDCL solver: construct with the full clause set, call solve()."""

    def __init__(
        self,
        num_vars: int,
        clauses: Iterable[Sequence[int]] = (),
        seed: int = 0,
        phases: Optional[Sequence[bool]] = None,
    ):
        self.num_vars = num_vars
        self.seed = seed
        self.assign: list = [None] * (num_vars + 1)
        self.level = [0] * (num_vars + 1)
        self.reason: list = [None] * (num_vars + 1)
        self.activity = [0.0] * (num_vars + 1)
        self.phase = list(phases) if phases is not None else [False] * (num_vars + 1)
        if phases is not None and len(self.phase) != num_vars + 1:
            raise ValueError("phases must have num_vars+1 entries (index 0 unused)")
        self.watches: dict = {}
        self.trail: list[int] = []
        self.trail_lim: list[int] = []
        self.qhead = 0
        self.ok = True
        self.var_inc = 1.0
        self.conflicts = 0
        for clause in clauses:
            self.add_clause(clause)

    # -- clause loading (pre-search, decision level 0) --

    def add_clause(self, lits: Sequence[int]) -> None:
        if not self.ok:
            return
        seen = set()
        out = []
        for lit in lits:
            if lit == 0 or abs(lit) > self.num_vars:
                raise ValueError(f"bad literal {lit}")
            if -lit in seen:
                return  # tautology
            if lit in seen:
                continue
            seen.add(lit)
            v = self._value(lit)
            if v is True:
                return  # already satisfied at level 0
            if v is False:
                continue  # falsified at level 0: drop the literal
            out.append(lit)
        if not out:
            self.ok = False
            return
        if len(out) == 1:
            self._enqueue(out[0], None)
            return
        self._watch(out)

    def _watch(self, clause: list) -> None:
        self.watches.setdefault(clause[0], []).append(clause)
        self.watches.setdefault(clause[1], []).append(clause)

    # -- assignment primitives --

    def _value(self, lit: int) -> Optional[bool]:
        v = self.assign[abs(lit)]
        if v is None:
            return None
        return v if lit > 0 else not v

    def _enqueue(self, lit: int, reason) -> bool:
        var = abs(lit)
        current = self.assign[var]
        if current is not None:
            return current == (lit > 0)
        self.assign[var] = lit > 0
        self.level[var] = len(self.trail_lim)
        self.reason[var] = reason
        self.trail.append(lit)
        return True

    def _propagate(self):
        """Unit propagation; returns a conflicting clause or None."""
        while self.qhead < len(self.trail):
            falsified = -self.trail[self.qhead]
            self.qhead += 1
            watchers = self.watches.get(falsified)
            if not watchers:
                continue
            self.watches[falsified] = keep = []
            i = 0
            n = len(watchers)
            while i < n:
                clause = watchers[i]
                i += 1
                if clause[0] == falsified:
                    clause[0], clause[1] = clause[1], clause[0]
                first = clause[0]
                if self._value(first) is True:
                    keep.append(clause)
                    continue
                for k in range(2, len(clause)):
                    if self._value(clause[k]) is not False:
                        clause[1], clause[k] = clause[k], clause[1]
                        self.watches.setdefault(clause[1], []).append(clause)
                        break
                else:
                    keep.append(clause)
                    if self._value(first) is False:
                        keep.extend(watchers[i:])
                        return clause
                    self._enqueue(first, clause)
        return None

    # -- conflict analysis (first unique implication point) --

    def _bump(self, var: int) -> None:
        self.activity[var] += self.var_inc
        if self.activity[var] > 1e100:
            for v in range(1, self.num_vars + 1):
                self.activity[v] *= 1e-100
            self.var_inc *= 1e-100

    def _analyze(self, conflict) -> tuple[list, int]:
        learnt = [0]  # slot 0 becomes the asserting literal
        seen = [False] * (self.num_vars + 1)
        counter = 0
        backjump = 0
        current = len(self.trail_lim)
        index = len(self.trail) - 1
        lit = None
        clause = conflict
        while True:
            start = 0 if lit is None else 1  # reasons keep the implied lit first
            for q in clause[start:]:
                v = abs(q)
                if not seen[v] and self.level[v] > 0:
                    seen[v] = True
                    self._bump(v)
                    if self.level[v] == current:
                        counter += 1
                    else:
                        learnt.append(q)
                        backjump = max(backjump, self.level[v])
            while not seen[abs(self.trail[index])]:
                index -= 1
            lit = self.trail[index]
            index -= 1
            seen[abs(lit)] = False
            counter -= 1
            if counter == 0:
                break
            clause = self.reason[abs(lit)]
        learnt[0] = -lit
        return learnt, backjump

    def _backtrack(self, target_level: int) -> None:
        while self.trail_lim and len(self.trail_lim) > target_level:
            boundary = self.trail_lim.pop()
            while len(self.trail) > boundary:
                lit = self.trail.pop()
                var = abs(lit)
                self.phase[var] = self.assign[var]
                self.assign[var] = None
                self.reason[var] = None
        self.qhead = len(self.trail)

    def _decide(self) -> Optional[int]:
        best = 0
        best_act = -1.0
        assign = self.assign
        activity = self.activity
        for v in range(1, self.num_vars + 1):
            if assign[v] is None and activity[v] > best_act:
                best = v
                best_act = activity[v]
        if best == 0:
            return None
        return best if self.phase[best] else -best

    def solve(self, max_conflicts: Optional[int] = None) -> Optional[list]:
        """A model as a list indexed by variable (index 0 unused), or None.

        Raises ResourceLimit when the conflict budget runs out first.
        """
        if not self.ok:
            return None
        restart_limit = 100.0
        since_restart = 0
        while True:
            conflict = self._propagate()
            if conflict is not None:
                self.conflicts += 1
                since_restart += 1
                if len(self.trail_lim) == 0:
                    return None
                if max_conflicts is not None and self.conflicts > max_conflicts:
                    raise ResourceLimit(f"exceeded {max_conflicts} conflicts")
                learnt, backjump = self._analyze(conflict)
                self._backtrack(backjump)
                if len(learnt) == 1:
                    self._enqueue(learnt[0], None)
                else:
                    # watch the asserting literal and one from the backjump level
                    for k in range(2, len(learnt)):
                        if self.level[abs(learnt[k])] > self.level[abs(learnt[1])]:
                            learnt[1], learnt[k] = learnt[k], learnt[1]
                    self._watch(learnt)
                    self._enqueue(learnt[0], learnt)
                self.var_inc /= 0.95
                continue
            if since_restart >= restart_limit:
                since_restart = 0
                restart_limit *= 1.5
                self._backtrack(0)
                continue
            lit = self._decide()
            if lit is None:
                return list(self.assign)
            self.trail_lim.append(len(self.trail))
            self._enqueue(lit, None)


def solve(
    clauses: Iterable[Sequence[int]],
    num_vars: int,
    seed: int = 0,
    max_conflicts: Optional[int] = None,
    phases: Optional[Sequence[bool]] = None,
) -> Optional[list]:
    """Convenience one-shot wrapper around Solver."""
    return Solver(num_vars, clauses, seed=seed, phases=phases).solve(max_conflicts)


# -- DIMACS and the external-solver bridge ------------------------------------


def to_dimacs(num_vars: int, clauses: Sequence[Sequence[int]]) -> str:
    lines = [f"p cnf {num_vars} {len(clauses)}"]
    for clause in clauses:
        lines.append(" ".join(map(str, clause)) + " 0")
    return "\n".join(lines) + "\n"


def parse_dimacs(text: str) -> tuple[int, list]:
    num_vars = 0
    clauses = []
    current: list[int] = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise ValueError(f"bad DIMACS header: {line!r}")
            num_vars = int(parts[2])
            continue
        for tok in line.split():
            lit = int(tok)
            if lit == 0:
                clauses.append(current)
                current = []
            else:
                current.append(lit)
    if current:
        clauses.append(current)
    return num_vars, clauses


def parse_solver_output(text: str, num_vars: int) -> Optional[list]:
    """Parse SAT-competition style output ("s ..." and "v ..." lines)."""
    status = None
    lits: list[int] = []
    for raw in text.splitlines():
        line = raw.strip()
        if line.startswith("s "):
            status = line[2:].strip().upper()
        elif line.startswith("v ") or line.startswith("v\t"):
            lits.extend(int(tok) for tok in line[2:].split())
        elif line == "v":
            continue
    if status == "UNSATISFIABLE":
        return None
    if status != "SATISFIABLE":
        raise SolverBridgeError(f"no recognisable status line in solver output")
    model: list = [False] * (num_vars + 1)
    model[0] = None
    for lit in lits:
        if lit == 0:
            continue
        if abs(lit) <= num_vars:
            model[abs(lit)] = lit > 0
    return model


EXTERNAL_SOLVER_ENV = "DIVPLAN_EXTERNAL_SAT"


def external_solver_command() -> Optional[list]:
    """The configured external solver argv, if the env var is set."""
    raw = os.environ.get(EXTERNAL_SOLVER_ENV)
    if not raw:
        return None
    return shlex.split(raw)


def solve_external(
    command: Sequence[str], num_vars: int, clauses: Sequence[Sequence[int]]
) -> Optional[list]:
    """Run `command <file.cnf>` and parse its s/v output lines.

    SAT-competition exit codes (10/20) are tolerated; anything else without a
    status line is a bridge error.
    """
    with tempfile.NamedTemporaryFile(
        "w", suffix=".cnf", prefix="divplan-", delete=False
    ) as fh:
        fh.write(to_dimacs(num_vars, clauses))
        path = fh.name
    try:
        proc = subprocess.run(
            list(command) + [path],
            stdout=subprocess.PIPE,
            stderr=subprocess.PIPE,
            text=True,
        )
        return parse_solver_output(proc.stdout, num_vars)
    finally:
        os.unlink(path)
