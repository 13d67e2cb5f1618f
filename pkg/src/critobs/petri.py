"""Labeled Petri nets: firing semantics, bounded exploration, and the
label-synchronized twin net.

Markings are plain tuples of token counts indexed by place order. All
structures are immutable; `explore` keeps its search state private, so
concurrent calls are safe.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping

from .errors import ContractError, ValidationError

Marking = tuple[int, ...]

LAMBDA = "λ"
PAIR_SEP = "|"


@dataclass(frozen=True)
class PetriNet:
    """Net structure: places, transitions, and Pre/Post arc-weight matrices
    indexed [place][transition]."""

    places: tuple[str, ...]
    transitions: tuple[str, ...]
    pre: tuple[tuple[int, ...], ...]
    post: tuple[tuple[int, ...], ...]
    # per-transition columns, for fast enabledness/firing
    _pre_t: tuple = field(init=False, repr=False, compare=False)
    _delta_t: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        places = tuple(self.places)
        transitions = tuple(self.transitions)
        object.__setattr__(self, "places", places)
        object.__setattr__(self, "transitions", transitions)
        if not places and not transitions:
            raise ValidationError("net needs at least one place or transition")
        if len(set(places)) != len(places):
            raise ValidationError("duplicate place names")
        if len(set(transitions)) != len(transitions):
            raise ValidationError("duplicate transition names")
        if set(places) & set(transitions):
            raise ValidationError("place and transition names must be disjoint")
        pre = tuple(tuple(row) for row in self.pre)
        post = tuple(tuple(row) for row in self.post)
        for label, mat in (("pre", pre), ("post", post)):
            if len(mat) != len(places):
                raise ValidationError(f"{label} matrix must have one row per place")
            for p, row in enumerate(mat):
                if len(row) != len(transitions):
                    raise ValidationError(
                        f"{label}[{p}] must have one entry per transition"
                    )
                for w in row:
                    if not isinstance(w, int) or w < 0:
                        raise ValidationError(
                            f"{label}[{p}]: arc weights must be nonnegative integers"
                        )
        object.__setattr__(self, "pre", pre)
        object.__setattr__(self, "post", post)
        n = len(transitions)
        object.__setattr__(
            self, "_pre_t", tuple(tuple(pre[p][t] for p in range(len(places))) for t in range(n))
        )
        object.__setattr__(
            self,
            "_delta_t",
            tuple(
                tuple(post[p][t] - pre[p][t] for p in range(len(places)))
                for t in range(n)
            ),
        )

    def transition_index(self, name: str) -> int:
        try:
            return self.transitions.index(name)
        except ValueError:
            raise ValidationError(f"unknown transition {name!r}") from None


def _check_marking(net: PetriNet, m: Marking) -> Marking:
    m = tuple(m)
    if len(m) != len(net.places):
        raise ValidationError(
            f"marking has {len(m)} entries, net has {len(net.places)} places"
        )
    if any(not isinstance(x, int) or x < 0 for x in m):
        raise ValidationError("marking entries must be nonnegative integers")
    return m


def is_enabled(net: PetriNet, m: Marking, transition: str) -> bool:
    t = net.transition_index(transition)
    return all(x >= w for x, w in zip(m, net._pre_t[t]))


def enabled(net: PetriNet, m: Marking) -> tuple[str, ...]:
    """Transitions enabled in `m`, in declared order."""
    m = _check_marking(net, m)
    return tuple(
        name
        for name, pre in zip(net.transitions, net._pre_t)
        if all(x >= w for x, w in zip(m, pre))
    )


def fire(net: PetriNet, m: Marking, transition: str) -> Marking:
    """Fire an enabled transition: tokens change by Post - Pre per place."""
    m = _check_marking(net, m)
    t = net.transition_index(transition)
    if not all(x >= w for x, w in zip(m, net._pre_t[t])):
        raise ContractError(f"transition {transition!r} is not enabled")
    return tuple(x + d for x, d in zip(m, net._delta_t[t]))


def fire_sequence(net: PetriNet, m: Marking, sequence: Iterable[str]) -> Marking:
    for t in sequence:
        m = fire(net, m, t)
    return m


@dataclass(frozen=True)
class LabeledPetriNet:
    """A net with an initial marking and a labeling of transitions into the
    alphabet or the empty label (None); None-labeled transitions are the
    unobservable ones."""

    net: PetriNet
    initial: Marking
    labels: Mapping[str, str | None]
    alphabet: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "initial", _check_marking(self.net, self.initial))
        object.__setattr__(self, "alphabet", tuple(self.alphabet))
        labels = dict(self.labels)
        if len(set(self.alphabet)) != len(self.alphabet):
            raise ValidationError("duplicate labels in alphabet")
        missing = set(self.net.transitions) - labels.keys()
        if missing:
            raise ValidationError(f"transitions without a label entry: {sorted(missing)}")
        stray = labels.keys() - set(self.net.transitions)
        if stray:
            raise ValidationError(f"labels for unknown transitions: {sorted(stray)}")
        for t, a in labels.items():
            if a is not None and a not in self.alphabet:
                raise ValidationError(f"label {a!r} of {t!r} is not in the alphabet")
        object.__setattr__(self, "labels", labels)

    def label_word(self, sequence: Iterable[str]) -> tuple[str, ...]:
        """Observation of a transition sequence (empty labels erased)."""
        out = []
        for t in sequence:
            if t not in self.labels:
                raise ValidationError(f"unknown transition {t!r}")
            a = self.labels[t]
            if a is not None:
                out.append(a)
        return tuple(out)

    def unobservable(self) -> tuple[str, ...]:
        return tuple(t for t in self.net.transitions if self.labels[t] is None)


def identity_labeled(net: PetriNet, initial: Marking) -> LabeledPetriNet:
    """Label every transition by its own name (fully observable net)."""
    return LabeledPetriNet(
        net=net,
        initial=initial,
        labels={t: t for t in net.transitions},
        alphabet=net.transitions,
    )


@dataclass(frozen=True)
class TwinNet:
    """Label-based synchronization of a labeled net with a place-disjoint
    copy of itself.

    Transitions are pairs: (t, t') for equal non-empty labels, acting on the
    original places with t and on the copy places with t'; (t, λ) and (λ, t)
    for unobservable t, acting on one side only. A reachable twin marking
    restricts to two markings of the source net reached by runs with equal
    observations.
    """

    net: PetriNet
    initial: Marking
    source: LabeledPetriNet
    pairs: tuple[tuple[str | None, str | None], ...]

    def split(self, m: Marking) -> tuple[Marking, Marking]:
        n = len(self.source.net.places)
        return tuple(m[:n]), tuple(m[n:])

    def split_sequence(self, sequence: Iterable[str]) -> tuple[tuple[str, ...], tuple[str, ...]]:
        """Project a twin firing sequence to the two component sequences."""
        by_name = dict(zip(self.net.transitions, self.pairs))
        first, second = [], []
        for name in sequence:
            a, b = by_name[name]
            if a is not None:
                first.append(a)
            if b is not None:
                second.append(b)
        return tuple(first), tuple(second)


def twin_net(g: LabeledPetriNet) -> TwinNet:
    base = g.net
    n_places = len(base.places)
    copy_places = tuple(p + "'" for p in base.places)
    if set(copy_places) & (set(base.places) | set(base.transitions)):
        raise ValidationError("primed place names collide with existing names")
    if LAMBDA in base.transitions:
        raise ValidationError(f"{LAMBDA!r} is reserved and cannot name a transition")

    pairs: list[tuple[str | None, str | None]] = []
    for t in base.transitions:
        if g.labels[t] is None:
            pairs.append((t, None))
            pairs.append((None, t))
    by_label: dict[str, list[str]] = {}
    for t in base.transitions:
        a = g.labels[t]
        if a is not None:
            by_label.setdefault(a, []).append(t)
    for a in g.alphabet:
        for t1 in by_label.get(a, ()):
            for t2 in by_label[a]:
                pairs.append((t1, t2))

    def render(pair):
        a, b = pair
        return f"{a or LAMBDA}{PAIR_SEP}{b or LAMBDA}"

    names = tuple(render(p) for p in pairs)
    zeros = (0,) * len(pairs)
    pre = [list(zeros) for _ in range(2 * n_places)]
    post = [list(zeros) for _ in range(2 * n_places)]
    for k, (t1, t2) in enumerate(pairs):
        if t1 is not None:
            ti = base.transition_index(t1)
            for p in range(n_places):
                pre[p][k] = base.pre[p][ti]
                post[p][k] = base.post[p][ti]
        if t2 is not None:
            ti = base.transition_index(t2)
            for p in range(n_places):
                pre[n_places + p][k] = base.pre[p][ti]
                post[n_places + p][k] = base.post[p][ti]

    return TwinNet(
        net=PetriNet(
            places=base.places + copy_places,
            transitions=names,
            pre=tuple(tuple(row) for row in pre),
            post=tuple(tuple(row) for row in post),
        ),
        initial=g.initial + g.initial,
        source=g,
        pairs=tuple(pairs),
    )


@dataclass(frozen=True)
class ExploreLimits:
    max_markings: int = 10**6
    max_depth: int = 10**4
    max_tokens: int = 10**6

    def __post_init__(self):
        if min(self.max_markings, self.max_depth, self.max_tokens) < 1:
            raise ValidationError("exploration limits must be positive")


@dataclass
class ExploreResult:
    """Fragment of the reachability graph discovered by `explore`.

    `markings` is in breadth-first discovery order; `parent[i]` is the
    (marking index, transition) edge that discovered marking i; `exhaustive`
    is True only when the frontier emptied with no limit hit and no stop,
    in which case the fragment is the full reachability graph.
    """

    markings: list[Marking]
    index: dict[Marking, int]
    parent: list[tuple[int, str] | None]
    depth: list[int]
    edges: list[tuple[int, str, int]]
    exhaustive: bool
    limit_hits: tuple[str, ...]
    stopped_at: int | None
    peak_frontier: int
    unbounded_evidence: bool = False

    def path_to(self, i: int) -> list[str]:
        """Firing sequence from the initial marking to marking i."""
        seq = []
        while self.parent[i] is not None:
            j, t = self.parent[i]
            seq.append(t)
            i = j
        seq.reverse()
        return seq


def explore(
    net: PetriNet,
    initial: Marking,
    limits: ExploreLimits = ExploreLimits(),
    stop: Callable[[Marking], bool] | None = None,
    detect_unbounded: bool = False,
) -> ExploreResult:
    """Breadth-first marking exploration with explicit limits.

    Transitions are tried in declared order from a FIFO queue, so discovery
    order (and any witness derived from parent edges) is reproducible. When
    `stop` returns True for a discovered marking the search halts there and
    `stopped_at` is its index. Limit hits are reported in-band via
    `exhaustive=False` and `limit_hits`.
    """
    initial = _check_marking(net, initial)
    res = ExploreResult(
        markings=[initial],
        index={initial: 0},
        parent=[None],
        depth=[0],
        edges=[],
        exhaustive=False,
        limit_hits=(),
        stopped_at=None,
        peak_frontier=1,
    )
    hits = set()
    if max(initial, default=0) > limits.max_tokens:
        hits.add("max-tokens")
        res.limit_hits = tuple(sorted(hits))
        return res
    if stop is not None and stop(initial):
        res.stopped_at = 0
        return res

    queue = deque([0])
    trans = list(enumerate(net.transitions))
    while queue:
        res.peak_frontier = max(res.peak_frontier, len(queue))
        i = queue.popleft()
        m = res.markings[i]
        if res.depth[i] >= limits.max_depth:
            if any(all(x >= w for x, w in zip(m, pre)) for pre in net._pre_t):
                hits.add("max-depth")
            continue
        for ti, name in trans:
            pre = net._pre_t[ti]
            if not all(x >= w for x, w in zip(m, pre)):
                continue
            m2 = tuple(x + d for x, d in zip(m, net._delta_t[ti]))
            if max(m2, default=0) > limits.max_tokens:
                hits.add("max-tokens")
                continue
            j = res.index.get(m2)
            if j is None:
                if len(res.markings) >= limits.max_markings:
                    hits.add("max-markings")
                    continue
                j = len(res.markings)
                res.index[m2] = j
                res.markings.append(m2)
                res.parent.append((i, name))
                res.depth.append(res.depth[i] + 1)
                res.edges.append((i, name, j))
                if detect_unbounded and not res.unbounded_evidence:
                    res.unbounded_evidence = _covers_ancestor(res, j)
                if stop is not None and stop(m2):
                    res.stopped_at = j
                    res.limit_hits = tuple(sorted(hits))
                    return res
                queue.append(j)
            else:
                res.edges.append((i, name, j))
    res.limit_hits = tuple(sorted(hits))
    res.exhaustive = not hits
    return res


def _covers_ancestor(res: ExploreResult, i: int) -> bool:
    m = res.markings[i]
    j = i
    while res.parent[j] is not None:
        j = res.parent[j][0]
        a = res.markings[j]
        if a != m and all(x <= y for x, y in zip(a, m)):
            return True
    return False
