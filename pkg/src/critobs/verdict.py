"""Verdicts, refutation witnesses, and search statistics."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .errors import ContractError


class Outcome(Enum):
    CRITICALLY_OBSERVABLE = "critically-observable"
    NOT_CRITICALLY_OBSERVABLE = "not-critically-observable"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class SearchStats:
    """Counters reported by a checker: configurations discovered and the
    largest breadth-first frontier seen."""

    explored: int
    peak_frontier: int


@dataclass(frozen=True)
class Witness:
    """Two runs with the same observation, one ending in a critical
    configuration (`end1`) and one in a non-critical configuration (`end2`).

    The shape of run entries depends on the model kind:

    * single automaton: ``(source state, event, target state)`` triples,
      ``end1``/``end2`` are state names;
    * network: ``(source tuple, event, target tuple)`` triples over
      component-state tuples, ends are state-name tuples;
    * Petri net: transition names, ends are markings (token vectors).
    """

    observation: tuple[str, ...]
    run1: tuple
    run2: tuple
    end1: object
    end2: object


@dataclass(frozen=True)
class Verdict:
    outcome: Outcome
    witness: Witness | None = None
    stats: SearchStats | None = None

    def __post_init__(self):
        refuted = self.outcome is Outcome.NOT_CRITICALLY_OBSERVABLE
        if refuted and self.witness is None:
            raise ContractError("refutation verdict requires a witness")
        if not refuted and self.witness is not None:
            raise ContractError("only refutation verdicts carry a witness")
