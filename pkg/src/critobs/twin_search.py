"""Breadth-first refutation search over two synchronized system copies.

The engine works on any "system" exposing integer-comparable nodes: a single
automaton (nodes are state indices) or a lazy product of components (nodes
are index tuples). Observable events advance both copies in lockstep;
unobservable events advance one copy. A pair (critical, non-critical) proves
the system is not critically observable, and the recorded parent links turn
that pair into a replayable two-run witness.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Protocol, Sequence

from .automata import Mover
from .verdict import Witness


class PairSystem(Protocol):
    events: Sequence[str]
    observable_flags: Sequence[bool]
    n_events: int

    def initial_nodes(self) -> Sequence:
        ...

    def successors(self, node, event_index: int) -> Sequence:
        ...

    def label(self, node):
        ...


@dataclass
class PairSearchResult:
    hit: tuple | None
    witness: Witness | None
    explored: int
    peak_frontier: int


def refutation_search(system: PairSystem, is_critical: Callable) -> PairSearchResult:
    """Search the twin of `system` for a pair whose first coordinate is
    critical and whose second is not.

    Deterministic realization: breadth-first over pair levels, each level
    sorted by node order, so the reported witness is depth-minimal with ties
    broken lexicographically. By the pair-swap symmetry of the construction,
    testing one orientation of (critical, non-critical) is complete.
    """
    inits = list(system.initial_nodes())
    frontier = sorted((a, b) for a in inits for b in inits)
    visited = set(frontier)
    parent = {}
    peak = len(frontier)

    hit = None
    for pair in frontier:
        if is_critical(pair[0]) and not is_critical(pair[1]):
            hit = pair
            break

    while frontier and hit is None:
        level = []
        for pair in frontier:
            a, b = pair
            for ei in range(system.n_events):
                if system.observable_flags[ei]:
                    sb = system.successors(b, ei)
                    if not sb:
                        continue
                    for a2 in system.successors(a, ei):
                        for b2 in sb:
                            child = (a2, b2)
                            if child not in visited:
                                visited.add(child)
                                parent[child] = (pair, ei, Mover.BOTH)
                                level.append(child)
                else:
                    for a2 in system.successors(a, ei):
                        child = (a2, b)
                        if child not in visited:
                            visited.add(child)
                            parent[child] = (pair, ei, Mover.FIRST)
                            level.append(child)
                    for b2 in system.successors(b, ei):
                        child = (a, b2)
                        if child not in visited:
                            visited.add(child)
                            parent[child] = (pair, ei, Mover.SECOND)
                            level.append(child)
        level.sort()
        for pair in level:
            if is_critical(pair[0]) and not is_critical(pair[1]):
                hit = pair
                break
        frontier = level
        peak = max(peak, len(level))

    witness = _assemble_witness(system, parent, hit) if hit is not None else None
    return PairSearchResult(hit, witness, len(visited), peak)


def _assemble_witness(system: PairSystem, parent: dict, hit: tuple) -> Witness:
    steps = []
    cur = hit
    while cur in parent:
        prev, ei, mover = parent[cur]
        steps.append((prev, ei, mover, cur))
        cur = prev
    steps.reverse()

    run1, run2, observation = [], [], []
    for (a1, b1), ei, mover, (a2, b2) in steps:
        e = system.events[ei]
        if mover is Mover.BOTH:
            run1.append((system.label(a1), e, system.label(a2)))
            run2.append((system.label(b1), e, system.label(b2)))
            observation.append(e)
        elif mover is Mover.FIRST:
            run1.append((system.label(a1), e, system.label(a2)))
        else:
            run2.append((system.label(b1), e, system.label(b2)))

    return Witness(
        observation=tuple(observation),
        run1=tuple(run1),
        run2=tuple(run2),
        end1=system.label(hit[0]),
        end2=system.label(hit[1]),
    )
