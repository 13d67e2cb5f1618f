"""Critical observability of a single automaton.

`check_nfa` decides the property by reachability in the twin of the
automaton (two copies synchronized on observable events). `check_nfa_oracle`
is an independent, exponential-time reference that classifies every reachable
observer state directly; the two must always agree and are differentially
tested against each other.
"""

from __future__ import annotations

from collections import deque
from typing import Iterable

from .automata import Nfa, project
from .errors import ValidationError
from .twin_search import refutation_search
from .verdict import Outcome, SearchStats, Verdict, Witness


def _critical_indices(g: Nfa, critical: Iterable[str]) -> frozenset[int]:
    crit = set(critical)
    stray = crit - set(g.states)
    if stray:
        raise ValidationError(f"critical states not in the automaton: {sorted(stray)}")
    return frozenset(g.state_index(s) for s in crit)


class _NfaPairSystem:
    def __init__(self, g: Nfa):
        self.g = g
        self.events = g.alphabet.events
        self.n_events = len(self.events)
        self.observable_flags = tuple(
            e in g.alphabet.observable for e in self.events
        )

    def initial_nodes(self):
        return sorted(self.g.state_index(s) for s in self.g.initial)

    def successors(self, node, ei):
        return self.g._succ[ei][node]

    def label(self, node):
        return self.g.states[node]


def check_nfa(g: Nfa, critical: Iterable[str]) -> Verdict:
    """Decide critical observability of `g` with respect to `critical`.

    Not critically observable iff the twin of `g` reaches a pair in
    C x (Q \\ C); the returned witness replays two runs with the same
    observation ending in a critical and a non-critical state.
    """
    crit = _critical_indices(g, critical)
    result = refutation_search(_NfaPairSystem(g), crit.__contains__)
    stats = SearchStats(result.explored, result.peak_frontier)
    if result.witness is not None:
        return Verdict(Outcome.NOT_CRITICALLY_OBSERVABLE, result.witness, stats)
    return Verdict(Outcome.CRITICALLY_OBSERVABLE, stats=stats)


def check_nfa_oracle(g: Nfa, critical: Iterable[str]) -> Verdict:
    """Reference check via the observer's state sets.

    Critically observable iff every reachable observer state is contained in
    the critical set or disjoint from it. Exponential in the worst case;
    meant for differential testing and small models.
    """
    crit = _critical_indices(g, critical)
    uo_rows = [
        g._succ[ei]
        for ei, e in enumerate(g.alphabet.events)
        if e not in g.alphabet.observable
    ]
    obs_events = [
        (ei, e) for ei, e in enumerate(g.alphabet.events)
        if e in g.alphabet.observable
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

    def mixed(subset):
        has_crit = any(s in crit for s in subset)
        has_other = any(s not in crit for s in subset)
        return has_crit and has_other

    start = closure(g.state_index(s) for s in g.initial)
    parent = {}
    visited = {start}
    frontier = [start]
    explored = 1
    peak = 1
    bad = start if mixed(start) else None
    while frontier and bad is None:
        level = []
        for cur in frontier:
            for ei, e in obs_events:
                row = g._succ[ei]
                tgt = {d for s in cur for d in row[s]}
                if not tgt:
                    continue
                tgt = closure(tgt)
                if tgt not in visited:
                    visited.add(tgt)
                    parent[tgt] = (cur, e)
                    level.append(tgt)
        level.sort()
        explored += len(level)
        peak = max(peak, len(level))
        for sub in level:
            if mixed(sub):
                bad = sub
                break
        frontier = level

    stats = SearchStats(explored, peak)
    if bad is None:
        return Verdict(Outcome.CRITICALLY_OBSERVABLE, stats=stats)

    word = []
    cur = bad
    while cur in parent:
        cur, e = parent[cur]
        word.append(e)
    word.reverse()
    end1 = min(s for s in bad if s in crit)
    end2 = min(s for s in bad if s not in crit)
    witness = Witness(
        observation=tuple(word),
        run1=_run_with_observation(g, word, end1),
        run2=_run_with_observation(g, word, end2),
        end1=g.states[end1],
        end2=g.states[end2],
    )
    return Verdict(Outcome.NOT_CRITICALLY_OBSERVABLE, witness, stats)


def _run_with_observation(g: Nfa, word: list[str], target: int) -> tuple:
    """Shortest run from an initial state to `target` whose projection is
    `word`. Breadth-first over (state, consumed-prefix-length) nodes."""
    word_idx = [g.event_index(e) for e in word]
    goal = (target, len(word))
    starts = sorted((g.state_index(s), 0) for s in g.initial)
    parent = {}
    visited = set(starts)
    queue = deque(starts)
    while queue:
        cur = queue.popleft()
        if cur == goal:
            break
        s, k = cur
        for ei, e in enumerate(g.alphabet.events):
            if e in g.alphabet.observable:
                if k < len(word) and ei == word_idx[k]:
                    k2 = k + 1
                else:
                    continue
            else:
                k2 = k
            for d in g._succ[ei][s]:
                child = (d, k2)
                if child not in visited:
                    visited.add(child)
                    parent[child] = (cur, e)
                    queue.append(child)
    else:
        raise AssertionError("observer state not realizable; internal inconsistency")

    run = []
    cur = goal
    while cur in parent:
        prev, e = parent[cur]
        run.append((g.states[prev[0]], e, g.states[cur[0]]))
        cur = prev
    run.reverse()
    return tuple(run)


def replay_nfa_witness(g: Nfa, critical: Iterable[str], witness: Witness) -> tuple[bool, str]:
    """Validate a refutation witness against the model and critical set.

    True iff both runs are enabled from the initial states, their label
    projections equal the recorded observation, and the end states are
    classified critical / non-critical as claimed.
    """
    try:
        crit = set(critical) & set(g.states)
        for name, run, end, want_critical in (
            ("run1", witness.run1, witness.end1, True),
            ("run2", witness.run2, witness.end2, False),
        ):
            state = run[0][0] if run else end
            if state not in g.states:
                return False, f"{name}: unknown start state {state!r}"
            if state not in g.initial:
                return False, f"{name}: start state {state!r} is not initial"
            for src, e, dst in run:
                if src != state:
                    return False, f"{name}: broken chaining at {src!r}"
                if dst not in g.successors(src, e):
                    return False, f"{name}: transition ({src},{e},{dst}) not in the model"
                state = dst
            if state != end:
                return False, f"{name}: run ends in {state!r}, not {end!r}"
            labels = project((e for _, e, _ in run), g.alphabet)
            if labels != tuple(witness.observation):
                return False, f"{name}: projected labels differ from the observation"
            if (end in crit) != want_critical:
                kind = "critical" if want_critical else "non-critical"
                return False, f"{name}: end state {end!r} is not {kind}"
    except ValidationError as exc:
        return False, str(exc)
    return True, "witness valid"
