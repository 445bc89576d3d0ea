"""Bundled case-study domains and the registry the CLI picks them from."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from .platformer import platformer_pack
from .story import story_pack, story_space, tiny_story_pack
from .urban import urban_pack

DECLARATIVE = "declarative"  # a GroundProblem; planned with the SAT backend
SIMULATOR = "simulator"  # a Simulator; planned with the search backend


@dataclass(frozen=True)
class BundledDomain:
    name: str
    kind: str  # DECLARATIVE or SIMULATOR
    load: Callable[[], tuple]  # () -> (problem-or-simulator, BehaviourSpace)


def _load_story() -> tuple:
    problem, feature = story_pack()
    return problem, story_space(feature)


def _load_tiny_story() -> tuple:
    problem, feature = tiny_story_pack()
    return problem, story_space(feature)


BUNDLED = {
    d.name: d
    for d in (
        BundledDomain("story", DECLARATIVE, _load_story),
        BundledDomain("story-tiny", DECLARATIVE, _load_tiny_story),
        BundledDomain("urban", SIMULATOR, urban_pack),
        BundledDomain("platformer", SIMULATOR, platformer_pack),
    )
}


def get_domain(name: str) -> BundledDomain:
    try:
        return BUNDLED[name]
    except KeyError:
        raise KeyError(
            f"unknown bundled domain {name!r}; available: {sorted(BUNDLED)}"
        ) from None


__all__ = [
    "BUNDLED",
    "BundledDomain",
    "DECLARATIVE",
    "SIMULATOR",
    "get_domain",
]
