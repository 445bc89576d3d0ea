"""Finite-trace temporal logic: evaluation and three-valued prefix monitoring.

Formulas are built from atoms, boolean connectives, always (G) and
eventually (F), interpreted over non-empty finite traces of proposition
valuations. The monitor classifies a trace prefix by syntactic progression:
a definite verdict means every (respectively no) finite completion of the
prefix satisfies the formula; Undetermined is always a sound answer.

Text grammar: ``G``, ``F``, ``FG``, ``!``, ``&``, ``|``, parentheses, and
atom identifiers (``G``, ``F``, ``FG``, ``true``, ``false`` are reserved).
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from typing import Mapping, Sequence, Union


class LtlError(Exception):
    pass


class UnknownAtom(LtlError):
    """A formula atom is missing from a trace valuation."""


class LtlSyntaxError(LtlError):
    pass


@dataclass(frozen=True)
class Atom:
    name: str


@dataclass(frozen=True)
class Not:
    arg: "LtlFormula"


@dataclass(frozen=True)
class And:
    left: "LtlFormula"
    right: "LtlFormula"


@dataclass(frozen=True)
class Or:
    left: "LtlFormula"
    right: "LtlFormula"


@dataclass(frozen=True)
class Always:
    arg: "LtlFormula"


@dataclass(frozen=True)
class Eventually:
    arg: "LtlFormula"


@dataclass(frozen=True)
class TrueFormula:
    pass


@dataclass(frozen=True)
class FalseFormula:
    pass


TRUE = TrueFormula()
FALSE = FalseFormula()

LtlFormula = Union[Atom, Not, And, Or, Always, Eventually, TrueFormula, FalseFormula]

Valuation = Mapping[str, bool]
PropTrace = Sequence[Valuation]  # non-empty; one valuation per trace state


def atoms(formula: LtlFormula) -> frozenset:
    if isinstance(formula, Atom):
        return frozenset({formula.name})
    if isinstance(formula, (Not, Always, Eventually)):
        return atoms(formula.arg)
    if isinstance(formula, (And, Or)):
        return atoms(formula.left) | atoms(formula.right)
    return frozenset()


def _lookup(valuation: Valuation, name: str) -> bool:
    try:
        return bool(valuation[name])
    except KeyError:
        raise UnknownAtom(f"atom {name!r} not assigned by valuation") from None


def eval_finite(formula: LtlFormula, trace: PropTrace) -> bool:
    """Truth of the formula at position 0 of a non-empty finite trace.

    Computed bottom-up: for every subformula a truth vector over all trace
    positions is filled from the last position backwards, so G and F cost
    one sweep instead of a quadratic recursion.
    """
    if len(trace) == 0:
        raise ValueError("trace must be non-empty")
    return _truth_vector(formula, trace)[0]


def _truth_vector(formula: LtlFormula, trace: PropTrace) -> list[bool]:
    n = len(trace)
    if isinstance(formula, Atom):
        return [_lookup(v, formula.name) for v in trace]
    if isinstance(formula, TrueFormula):
        return [True] * n
    if isinstance(formula, FalseFormula):
        return [False] * n
    if isinstance(formula, Not):
        return [not x for x in _truth_vector(formula.arg, trace)]
    if isinstance(formula, And):
        lv = _truth_vector(formula.left, trace)
        rv = _truth_vector(formula.right, trace)
        return [a and b for a, b in zip(lv, rv)]
    if isinstance(formula, Or):
        lv = _truth_vector(formula.left, trace)
        rv = _truth_vector(formula.right, trace)
        return [a or b for a, b in zip(lv, rv)]
    if isinstance(formula, Always):
        av = _truth_vector(formula.arg, trace)
        out = [False] * n
        acc = True
        for i in range(n - 1, -1, -1):
            acc = av[i] and acc
            out[i] = acc
        return out
    if isinstance(formula, Eventually):
        av = _truth_vector(formula.arg, trace)
        out = [False] * n
        acc = False
        for i in range(n - 1, -1, -1):
            acc = av[i] or acc
            out[i] = acc
        return out
    raise TypeError(f"not a formula: {formula!r}")


# -- simplifying constructors (used by progression only, never the parser) ---


def mk_not(f: LtlFormula) -> LtlFormula:
    if f is TRUE or isinstance(f, TrueFormula):
        return FALSE
    if f is FALSE or isinstance(f, FalseFormula):
        return TRUE
    if isinstance(f, Not):
        return f.arg
    return Not(f)


def mk_and(left: LtlFormula, right: LtlFormula) -> LtlFormula:
    if isinstance(left, FalseFormula) or isinstance(right, FalseFormula):
        return FALSE
    if isinstance(left, TrueFormula):
        return right
    if isinstance(right, TrueFormula):
        return left
    if left == right:
        return left
    # x & Gx == Gx over non-empty traces
    if isinstance(right, Always) and right.arg == left:
        return right
    if isinstance(left, Always) and left.arg == right:
        return left
    return And(left, right)


def mk_or(left: LtlFormula, right: LtlFormula) -> LtlFormula:
    if isinstance(left, TrueFormula) or isinstance(right, TrueFormula):
        return TRUE
    if isinstance(left, FalseFormula):
        return right
    if isinstance(right, FalseFormula):
        return left
    if left == right:
        return left
    # x | Fx == Fx over non-empty traces
    if isinstance(right, Eventually) and right.arg == left:
        return right
    if isinstance(left, Eventually) and left.arg == right:
        return left
    return Or(left, right)


def progress(formula: LtlFormula, valuation: Valuation) -> LtlFormula:
    """One progression step: the obligation left for the rest of the trace.

    For any non-empty continuation w, eval(f, v.w) == eval(progress(f, v), w).
    Says nothing about the trace ending at v; see final_eval for that.
    """
    if isinstance(formula, Atom):
        return TRUE if _lookup(valuation, formula.name) else FALSE
    if isinstance(formula, (TrueFormula, FalseFormula)):
        return formula
    if isinstance(formula, Not):
        return mk_not(progress(formula.arg, valuation))
    if isinstance(formula, And):
        return mk_and(
            progress(formula.left, valuation), progress(formula.right, valuation)
        )
    if isinstance(formula, Or):
        return mk_or(
            progress(formula.left, valuation), progress(formula.right, valuation)
        )
    if isinstance(formula, Always):
        return mk_and(progress(formula.arg, valuation), formula)
    if isinstance(formula, Eventually):
        return mk_or(progress(formula.arg, valuation), formula)
    raise TypeError(f"not a formula: {formula!r}")


def final_eval(formula: LtlFormula, valuation: Valuation) -> bool:
    """Truth of the formula on the one-state trace [valuation]."""
    if isinstance(formula, Atom):
        return _lookup(valuation, formula.name)
    if isinstance(formula, TrueFormula):
        return True
    if isinstance(formula, FalseFormula):
        return False
    if isinstance(formula, Not):
        return not final_eval(formula.arg, valuation)
    if isinstance(formula, And):
        return final_eval(formula.left, valuation) and final_eval(
            formula.right, valuation
        )
    if isinstance(formula, Or):
        return final_eval(formula.left, valuation) or final_eval(
            formula.right, valuation
        )
    if isinstance(formula, (Always, Eventually)):
        return final_eval(formula.arg, valuation)
    raise TypeError(f"not a formula: {formula!r}")


class Verdict(enum.Enum):
    SATISFIED_ALL_EXTENSIONS = "satisfied-all-extensions"
    VIOLATED_ALL_EXTENSIONS = "violated-all-extensions"
    UNDETERMINED = "undetermined"


def monitor(formula: LtlFormula, prefix: PropTrace) -> Verdict:
    """Three-valued verdict over all finite completions of the prefix.

    A completion is the prefix itself or the prefix extended by any finite
    state sequence. Sound by the progression identity; not complete (a
    residual that is equivalent to true or false without simplifying to it
    yields Undetermined, which only costs search time).
    """
    if len(prefix) == 0:
        raise ValueError("prefix must be non-empty")
    residual: LtlFormula = formula
    for valuation in prefix:
        residual = progress(residual, valuation)
    prefix_value = eval_finite(formula, prefix)
    if isinstance(residual, TrueFormula) and prefix_value:
        return Verdict.SATISFIED_ALL_EXTENSIONS
    if isinstance(residual, FalseFormula) and not prefix_value:
        return Verdict.VIOLATED_ALL_EXTENSIONS
    return Verdict.UNDETERMINED


# -- text grammar -------------------------------------------------------------

_TOKEN_RE = re.compile(r"\s*(?:([A-Za-z_][\w-]*)|([&|!()])|(\S))")
_RESERVED = {"G", "F", "FG", "true", "false"}


def _tokenize(text: str) -> list[str]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            break
        word, sym, bad = m.groups()
        if bad is not None:
            raise LtlSyntaxError(f"unexpected character {bad!r} at offset {m.start(3)}")
        if word is not None:
            tokens.append(word)
        elif sym is not None:
            tokens.append(sym)
        pos = m.end()
    return tokens


class _Parser:
    def __init__(self, tokens: list[str]):
        self.tokens = tokens
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def take(self):
        tok = self.peek()
        if tok is None:
            raise LtlSyntaxError("unexpected end of formula")
        self.pos += 1
        return tok

    def parse(self) -> LtlFormula:
        f = self.disjunction()
        if self.peek() is not None:
            raise LtlSyntaxError(f"trailing input at token {self.peek()!r}")
        return f

    def disjunction(self) -> LtlFormula:
        f = self.conjunction()
        while self.peek() == "|":
            self.take()
            f = Or(f, self.conjunction())
        return f

    def conjunction(self) -> LtlFormula:
        f = self.unary()
        while self.peek() == "&":
            self.take()
            f = And(f, self.unary())
        return f

    def unary(self) -> LtlFormula:
        tok = self.take()
        if tok == "!":
            return Not(self.unary())
        if tok == "G":
            return Always(self.unary())
        if tok == "F":
            return Eventually(self.unary())
        if tok == "FG":
            return Eventually(Always(self.unary()))
        if tok == "(":
            f = self.disjunction()
            if self.take() != ")":
                raise LtlSyntaxError("expected ')'")
            return f
        if tok == "true":
            return TRUE
        if tok == "false":
            return FALSE
        if tok in {")", "&", "|"}:
            raise LtlSyntaxError(f"unexpected token {tok!r}")
        return Atom(tok)


def parse_formula(text: str) -> LtlFormula:
    return _Parser(_tokenize(text)).parse()


def format_formula(formula: LtlFormula) -> str:
    """Round-trippable text form: parse_formula(format_formula(f)) == f."""
    return _format(formula, 0)


def _format(f: LtlFormula, parent_level: int) -> str:
    # binding strength: | = 1, & = 2, unary = 3
    if isinstance(f, Atom):
        return f.name
    if isinstance(f, TrueFormula):
        return "true"
    if isinstance(f, FalseFormula):
        return "false"
    if isinstance(f, Or):
        # parser is left-associative, so a right-nested Or needs parentheses
        text = f"{_format(f.left, 1)} | {_format(f.right, 2)}"
        return f"({text})" if parent_level > 1 else text
    if isinstance(f, And):
        text = f"{_format(f.left, 2)} & {_format(f.right, 3)}"
        return f"({text})" if parent_level > 2 else text
    if isinstance(f, Not):
        return f"! {_format(f.arg, 3)}"
    if isinstance(f, Eventually) and isinstance(f.arg, Always):
        return f"FG {_format(f.arg.arg, 3)}"
    if isinstance(f, Always):
        return f"G {_format(f.arg, 3)}"
    if isinstance(f, Eventually):
        return f"F {_format(f.arg, 3)}"
    raise TypeError(f"not a formula: {f!r}")
