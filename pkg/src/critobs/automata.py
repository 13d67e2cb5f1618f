"""Finite automata with partial observation.

States and events are identified by strings. Every structure is immutable
after construction and every operation is a pure function of its inputs, so
values can be shared freely between threads. Identifiers are mapped to dense
integer indices internally; all results are reported with the original names.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from itertools import product as cartesian
from typing import Iterable, Sequence

from .errors import ResourceLimitError, ValidationError

Word = tuple[str, ...]
Transition = tuple[str, str, str]

PAIR_SEP = "|"


@dataclass(frozen=True)
class EventAlphabet:
    """An event set partitioned into observable and unobservable events."""

    events: tuple[str, ...]
    observable: frozenset[str]
    _index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        events = tuple(self.events)
        observable = frozenset(self.observable)
        object.__setattr__(self, "events", events)
        object.__setattr__(self, "observable", observable)
        if not events:
            raise ValidationError("alphabet must contain at least one event")
        index = {}
        for i, e in enumerate(events):
            if e in index:
                raise ValidationError(f"duplicate event name {e!r}")
            index[e] = i
        stray = observable - index.keys()
        if stray:
            raise ValidationError(f"observable events not in alphabet: {sorted(stray)}")
        object.__setattr__(self, "_index", index)

    @property
    def unobservable(self) -> frozenset[str]:
        return frozenset(self.events) - self.observable

    def __contains__(self, event: str) -> bool:
        return event in self._index

    def is_observable(self, event: str) -> bool:
        if event not in self._index:
            raise ValidationError(f"unknown event {event!r}")
        return event in self.observable


def project(word: Iterable[str], alphabet: EventAlphabet) -> Word:
    """Erase unobservable events from a word, preserving order.

    This is the morphism induced by the alphabet partition:
    project(u + v) == project(u) + project(v).
    """
    out = []
    for e in word:
        if e not in alphabet:
            raise ValidationError(f"unknown event {e!r} in word")
        if e in alphabet.observable:
            out.append(e)
    return tuple(out)


@dataclass(frozen=True)
class Nfa:
    """A nondeterministic finite automaton with a partially observable
    alphabet, a nonempty set of initial states, and a set of marked states.

    Marked states do not affect the generated language used by the
    observability checkers; they are carried for constructions that need
    acceptance (e.g. the hardness-reduction instance generators).
    """

    states: tuple[str, ...]
    alphabet: EventAlphabet
    transitions: tuple[Transition, ...]
    initial: frozenset[str]
    marked: frozenset[str] = frozenset()
    _sidx: dict = field(init=False, repr=False, compare=False)
    # successor table indexed [event][state] -> sorted tuple of target indices
    _succ: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        states = tuple(self.states)
        sidx = {}
        for i, s in enumerate(states):
            if s in sidx:
                raise ValidationError(f"duplicate state name {s!r}")
            sidx[s] = i
        if not states:
            raise ValidationError("automaton needs at least one state")
        eidx = self.alphabet._index

        succ_sets = [[set() for _ in states] for _ in self.alphabet.events]
        canon = set()
        for k, t in enumerate(self.transitions):
            try:
                src, event, dst = t
            except (TypeError, ValueError):
                raise ValidationError(f"transitions[{k}]: expected (source, event, target)")
            if src not in sidx:
                raise ValidationError(f"transitions[{k}]: unknown state {src!r}")
            if dst not in sidx:
                raise ValidationError(f"transitions[{k}]: unknown state {dst!r}")
            if event not in eidx:
                raise ValidationError(f"transitions[{k}]: unknown event {event!r}")
            si, ei, di = sidx[src], eidx[event], sidx[dst]
            succ_sets[ei][si].add(di)
            canon.add((si, ei, di))

        initial = frozenset(self.initial)
        marked = frozenset(self.marked)
        if not initial:
            raise ValidationError("initial state set must be nonempty")
        for name, which in ((initial, "initial"), (marked, "marked")):
            stray = name - sidx.keys()
            if stray:
                raise ValidationError(f"unknown {which} state(s): {sorted(stray)}")

        events = self.alphabet.events
        object.__setattr__(self, "states", states)
        object.__setattr__(
            self,
            "transitions",
            tuple((states[si], events[ei], states[di]) for si, ei, di in sorted(canon)),
        )
        object.__setattr__(self, "initial", initial)
        object.__setattr__(self, "marked", marked)
        object.__setattr__(self, "_sidx", sidx)
        object.__setattr__(
            self,
            "_succ",
            tuple(tuple(tuple(sorted(cell)) for cell in row) for row in succ_sets),
        )

    def state_index(self, state: str) -> int:
        try:
            return self._sidx[state]
        except KeyError:
            raise ValidationError(f"unknown state {state!r}") from None

    def event_index(self, event: str) -> int:
        try:
            return self.alphabet._index[event]
        except KeyError:
            raise ValidationError(f"unknown event {event!r}") from None

    def successors(self, state: str, event: str) -> tuple[str, ...]:
        row = self._succ[self.event_index(event)][self.state_index(state)]
        return tuple(self.states[i] for i in row)

    def is_deterministic(self) -> bool:
        """Single initial state and at most one target per (state, event)."""
        return len(self.initial) == 1 and all(
            len(cell) <= 1 for row in self._succ for cell in row
        )

    def is_total_dfa(self) -> bool:
        """Deterministic with exactly one target per (state, event)."""
        return len(self.initial) == 1 and all(
            len(cell) == 1 for row in self._succ for cell in row
        )


def step(g: Nfa, states: Iterable[str], event: str) -> frozenset[str]:
    """One-step successor set: all states reachable from `states` by `event`."""
    row = g._succ[g.event_index(event)]
    out = set()
    for s in states:
        out.update(row[g.state_index(s)])
    return frozenset(g.states[i] for i in out)


def step_word(g: Nfa, states: Iterable[str], word: Iterable[str]) -> frozenset[str]:
    """Extension of `step` to words: the states reachable under the whole word."""
    cur = {g.state_index(s) for s in states}
    for e in word:
        row = g._succ[g.event_index(e)]
        cur = {d for s in cur for d in row[s]}
        if not cur:
            break
    return frozenset(g.states[i] for i in cur)


def unobservable_reach(g: Nfa, states: Iterable[str]) -> frozenset[str]:
    """Closure of a state set under unobservable transitions."""
    uo_rows = [
        g._succ[ei]
        for ei, e in enumerate(g.alphabet.events)
        if e not in g.alphabet.observable
    ]
    closure = {g.state_index(s) for s in states}
    stack = list(closure)
    while stack:
        s = stack.pop()
        for row in uo_rows:
            for d in row[s]:
                if d not in closure:
                    closure.add(d)
                    stack.append(d)
    return frozenset(g.states[i] for i in closure)


def bounded_language(g: Nfa, n: int) -> set[Word]:
    """All words of length at most `n` generated by `g` (exact enumeration)."""
    if n < 0:
        raise ValidationError("length bound must be nonnegative")
    init = frozenset(g.state_index(s) for s in g.initial)
    words = {()}
    frontier = [((), init)]
    for _ in range(n):
        nxt = []
        for word, live in frontier:
            for ei, e in enumerate(g.alphabet.events):
                row = g._succ[ei]
                tgt = frozenset(d for s in live for d in row[s])
                if tgt:
                    w2 = word + (e,)
                    words.add(w2)
                    nxt.append((w2, tgt))
        frontier = nxt
    return words


def _subset_name(g: Nfa, subset: Iterable[int]) -> str:
    return "{" + ",".join(g.states[i] for i in sorted(subset)) + "}"


def observer(g: Nfa) -> Nfa:
    """Deterministic observer of `g` over the observable events.

    States of the observer are the sets of states of `g` consistent with an
    observation; the initial state is the unobservable closure of the initial
    set, and each observable step is followed by another closure.
    """
    obs_events = tuple(e for e in g.alphabet.events if e in g.alphabet.observable)
    uo_rows = [
        g._succ[ei]
        for ei, e in enumerate(g.alphabet.events)
        if e not in g.alphabet.observable
    ]

    def closure(subset):
        out = set(subset)
        stack = list(out)
        while stack:
            s = stack.pop()
            for row in uo_rows:
                for d in row[s]:
                    if d not in out:
                        out.add(d)
                        stack.append(d)
        return tuple(sorted(out))

    start = closure(g.state_index(s) for s in g.initial)
    seen = {start: 0}
    order = [start]
    transitions = []
    queue = deque([start])
    while queue:
        cur = queue.popleft()
        for e in obs_events:
            row = g._succ[g.event_index(e)]
            tgt = {d for s in cur for d in row[s]}
            if not tgt:
                continue
            tgt = closure(tgt)
            if tgt not in seen:
                seen[tgt] = len(order)
                order.append(tgt)
                queue.append(tgt)
            transitions.append((_subset_name(g, cur), e, _subset_name(g, tgt)))

    marked_idx = {g.state_index(s) for s in g.marked}
    # an empty observable alphabet leaves nothing to label transitions with;
    # keep the original events so the alphabet stays nonempty
    alphabet = EventAlphabet(obs_events or g.alphabet.events, frozenset(obs_events))
    return Nfa(
        states=tuple(_subset_name(g, s) for s in order),
        alphabet=alphabet,
        transitions=tuple(transitions),
        initial=frozenset({_subset_name(g, start)}),
        marked=frozenset(
            _subset_name(g, s) for s in order if marked_idx.intersection(s)
        ),
    )


def merged_observability(components: Sequence[Nfa]) -> tuple[tuple[str, ...], frozenset[str]]:
    """Union alphabet of a component list, in first-appearance order.

    Raises if an event is observable in one component and unobservable in
    another.
    """
    events = []
    status = {}
    for k, g in enumerate(components):
        for e in g.alphabet.events:
            obs = e in g.alphabet.observable
            if e not in status:
                status[e] = obs
                events.append(e)
            elif status[e] != obs:
                raise ValidationError(
                    f"event {e!r} has inconsistent observability status "
                    f"(component {k} disagrees with an earlier component)"
                )
    return tuple(events), frozenset(e for e in events if status[e])


class SyncProduct:
    """Lazy synchronous product of a list of automata.

    Shared events (events in more than one component alphabet) synchronize
    all their owners; private events move only their owner. Nothing is
    materialized: product states are tuples of component state indices and
    successors are computed on demand.
    """

    def __init__(self, components: Sequence[Nfa]):
        components = tuple(components)
        if not components:
            raise ValidationError("product of an empty component list")
        self.components = components
        self.events, self.observable = merged_observability(components)
        owners = []
        rows = []
        for e in self.events:
            own = tuple(k for k, g in enumerate(components) if e in g.alphabet)
            owners.append(own)
            rows.append(tuple(components[k]._succ[components[k].event_index(e)] for k in own))
        self._owners = tuple(owners)
        self._rows = tuple(rows)
        self.n_events = len(self.events)
        self.observable_flags = tuple(e in self.observable for e in self.events)

    def initial_nodes(self) -> list[tuple[int, ...]]:
        per = [sorted(g.state_index(s) for s in g.initial) for g in self.components]
        return sorted(cartesian(*per))

    def successors(self, node: tuple[int, ...], ei: int) -> list[tuple[int, ...]]:
        owners = self._owners[ei]
        choices = []
        for own, row in zip(owners, self._rows[ei]):
            targets = row[node[own]]
            if not targets:
                return []
            choices.append(targets)
        out = []
        for combo in cartesian(*choices):
            nxt = list(node)
            for own, tgt in zip(owners, combo):
                nxt[own] = tgt
            out.append(tuple(nxt))
        out.sort()
        return out

    def names(self, node: tuple[int, ...]) -> tuple[str, ...]:
        return tuple(g.states[i] for g, i in zip(self.components, node))

    def is_marked(self, node: tuple[int, ...]) -> bool:
        return all(g.states[i] in g.marked for g, i in zip(self.components, node))

    def reachable(self, cap: int | None = None) -> list[tuple[int, ...]]:
        """Accessible product states in breadth-first discovery order."""
        inits = self.initial_nodes()
        seen = set(inits)
        order = list(inits)
        queue = deque(inits)
        while queue:
            cur = queue.popleft()
            for ei in range(self.n_events):
                for nxt in self.successors(cur, ei):
                    if nxt not in seen:
                        if cap is not None and len(seen) >= cap:
                            raise ResourceLimitError(
                                f"product exceeds the state cap of {cap}"
                            )
                        seen.add(nxt)
                        order.append(nxt)
                        queue.append(nxt)
        return order

    def materialize(self, cap: int | None = None) -> Nfa:
        nfa, _ = self.materialize_with_nodes(cap)
        return nfa

    def materialize_with_nodes(
        self, cap: int | None = None
    ) -> tuple[Nfa, list[tuple[int, ...]]]:
        """Explicit accessible product plus the node tuple behind each state.

        Product states are named by joining component state names with
        `PAIR_SEP` in component order.
        """
        order = self.reachable(cap)
        name = {node: PAIR_SEP.join(self.names(node)) for node in order}
        transitions = []
        for node in order:
            for ei, e in enumerate(self.events):
                for nxt in self.successors(node, ei):
                    transitions.append((name[node], e, name[nxt]))
        return (
            Nfa(
                states=tuple(name[n] for n in order),
                alphabet=EventAlphabet(self.events, self.observable),
                transitions=tuple(transitions),
                initial=frozenset(name[n] for n in self.initial_nodes()),
                marked=frozenset(name[n] for n in order if self.is_marked(n)),
            ),
            order,
        )


def parallel_compose(a: Nfa, b: Nfa) -> Nfa:
    """Classical parallel composition of two automata (accessible part).

    Events shared by both alphabets synchronize; private events interleave.
    The observability status of every event must agree between components.
    """
    return SyncProduct((a, b)).materialize()


class Mover(Enum):
    """Which copy of the system a twin move advances."""

    BOTH = "both"
    FIRST = "first"
    SECOND = "second"


@dataclass(frozen=True)
class TwinAutomaton:
    """Two synchronized copies of one automaton: observable events behave as
    shared events, unobservable events as private events of either copy.

    A pair (x, y) is reachable here exactly when two runs with the same
    observation reach x and y. The structure is lazy; `materialize` builds
    the explicit accessible part.
    """

    source: Nfa

    def initial_pairs(self) -> tuple[tuple[str, str], ...]:
        g = self.source
        init = sorted(g.state_index(s) for s in g.initial)
        return tuple(
            (g.states[x], g.states[y]) for x, y in cartesian(init, init)
        )

    def moves(self, pair: tuple[str, str]) -> tuple[tuple[str, Mover, tuple[str, str]], ...]:
        """All moves out of a pair, in (event order, pair order); unobservable
        events contribute one move per copy, so a move can repeat a pair."""
        g = self.source
        x, y = (g.state_index(pair[0]), g.state_index(pair[1]))
        out = []
        for ei, e in enumerate(g.alphabet.events):
            row = g._succ[ei]
            if e in g.alphabet.observable:
                for x2, y2 in cartesian(row[x], row[y]):
                    out.append((e, Mover.BOTH, (g.states[x2], g.states[y2])))
            else:
                for x2 in row[x]:
                    out.append((e, Mover.FIRST, (g.states[x2], pair[1])))
                for y2 in row[y]:
                    out.append((e, Mover.SECOND, (pair[0], g.states[y2])))
        return tuple(out)

    def reachable_pairs(self) -> frozenset[tuple[str, str]]:
        seen = set(self.initial_pairs())
        queue = deque(seen)
        while queue:
            cur = queue.popleft()
            for _, _, nxt in self.moves(cur):
                if nxt not in seen:
                    seen.add(nxt)
                    queue.append(nxt)
        return frozenset(seen)

    def materialize(self) -> Nfa:
        """Accessible part as an explicit automaton over pair states."""
        g = self.source
        inits = self.initial_pairs()
        seen = dict.fromkeys(inits)
        queue = deque(inits)
        transitions = set()
        while queue:
            cur = queue.popleft()
            for e, _, nxt in self.moves(cur):
                transitions.add((PAIR_SEP.join(cur), e, PAIR_SEP.join(nxt)))
                if nxt not in seen:
                    seen[nxt] = None
                    queue.append(nxt)
        return Nfa(
            states=tuple(PAIR_SEP.join(p) for p in seen),
            alphabet=g.alphabet,
            transitions=tuple(sorted(transitions)),
            initial=frozenset(PAIR_SEP.join(p) for p in inits),
            marked=frozenset(
                PAIR_SEP.join(p) for p in seen if p[0] in g.marked and p[1] in g.marked
            ),
        )


def twin(g: Nfa) -> TwinAutomaton:
    """The modified composition of `g` with itself used by the checkers."""
    return TwinAutomaton(g)
