"""Hardness-reduction instance generators and their independent oracles.

Each generator turns an instance of a classical decision problem into a
critical-observability instance whose verdict is determined by the source
problem:

* DAG non-reachability -> single NFA over one observable event;
* total-DFA intersection emptiness -> network, either by a shared observable
  event or by one shared unobservable event;
* unary-NFA intersection nonemptiness -> unary network;
* Petri-net reachability -> labeled net with an unobservable token pump;
* Petri-net marking inclusion -> gadget selecting between two nets, with a
  generally infinite critical set emitted as a symbolic descriptor.

The matching oracle functions decide the source problem directly (graph
search, explicit products, explicit marking exploration) and are used for
differential testing of the checkers.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from graphlib import CycleError, TopologicalSorter
from math import lcm

from .automata import EventAlphabet, Nfa
from .errors import ResourceLimitError, ValidationError
from .network import Network, TupleCriticalSet, subset_sequence, _seq_at
from .petri import ExploreLimits, LabeledPetriNet, Marking, PetriNet, explore
from .petri_check import CriticalMarkingSet, CriticalMode


def _fresh(base: str, taken: set[str]) -> str:
    if base not in taken:
        return base
    k = 0
    while f"{base}{k}" in taken:
        k += 1
    return f"{base}{k}"


@dataclass(frozen=True)
class Dag:
    """Directed acyclic graph with designated source and target nodes."""

    nodes: tuple[str, ...]
    edges: tuple[tuple[str, str], ...]
    source: str
    target: str

    def __post_init__(self):
        nodes = tuple(self.nodes)
        edges = tuple(tuple(e) for e in self.edges)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "edges", edges)
        node_set = set(nodes)
        if len(node_set) != len(nodes):
            raise ValidationError("duplicate node names")
        for p, q in edges:
            if p not in node_set or q not in node_set:
                raise ValidationError(f"edge ({p!r}, {q!r}) mentions unknown nodes")
        if self.source not in node_set or self.target not in node_set:
            raise ValidationError("source and target must be nodes")
        graph = {n: set() for n in nodes}
        for p, q in edges:
            graph[q].add(p)
        try:
            TopologicalSorter(graph).static_order()
        except CycleError:
            raise ValidationError("graph has a cycle") from None


def dag_reachable(d: Dag) -> bool:
    """Oracle: is the target reachable from the source?"""
    succ = {n: [] for n in d.nodes}
    for p, q in d.edges:
        succ[p].append(q)
    seen = {d.source}
    stack = [d.source]
    while stack:
        for q in succ[stack.pop()]:
            if q not in seen:
                seen.add(q)
                stack.append(q)
    return d.target in seen


def gen_dag_nfa(d: Dag) -> tuple[Nfa, frozenset[str]]:
    """Reduce DAG non-reachability to critical observability.

    One observable event; every edge becomes a transition; the target gets a
    self-loop and an exit to a fresh sink. The result is critically
    observable w.r.t. {target} iff the target is unreachable from the source.
    """
    sink = _fresh("r", set(d.nodes))
    transitions = [(p, "a", q) for p, q in d.edges]
    transitions += [(d.target, "a", d.target), (d.target, "a", sink)]
    nfa = Nfa(
        states=d.nodes + (sink,),
        alphabet=EventAlphabet(("a",), frozenset({"a"})),
        transitions=tuple(transitions),
        initial=frozenset({d.source}),
        marked=frozenset(d.nodes) | {sink},
    )
    return nfa, frozenset({d.target})


def _require_total_binary_dfa(k: int, g: Nfa) -> None:
    if tuple(sorted(g.alphabet.events)) != ("0", "1"):
        raise ValidationError(f"component {k}: alphabet must be exactly {{'0','1'}}")
    if not g.is_total_dfa():
        raise ValidationError(f"component {k}: expected a total DFA")


def dfa_intersection_nonempty(dfas: list[Nfa]) -> bool:
    """Oracle: explicit product emptiness for the marked languages."""
    inits = tuple(next(iter(g.initial)) for g in dfas)
    seen = {inits}
    queue = deque([inits])
    while queue:
        cur = queue.popleft()
        if all(s in g.marked for g, s in zip(dfas, cur)):
            return True
        for e in ("0", "1"):
            nxt = []
            for g, s in zip(dfas, cur):
                t = g.successors(s, e)
                if not t:
                    break
                nxt.append(t[0])
            else:
                nxt = tuple(nxt)
                if nxt not in seen:
                    seen.add(nxt)
                    queue.append(nxt)
    return False


def gen_dfa_intersection(
    dfas: list[Nfa], variant: str = "shared-observable-1"
) -> tuple[Network, TupleCriticalSet]:
    """Reduce total-DFA intersection emptiness to network observability.

    Every component gets a fresh state reachable from each marked state,
    either by the observable event "1" (making the component a proper NFA) or
    by a shared fresh unobservable event "u" (keeping components
    deterministic). The network is critically observable w.r.t. the tuple of
    fresh states iff the intersection of the marked languages is empty.
    """
    if variant not in ("shared-observable-1", "unobservable-u"):
        raise ValidationError(f"unknown variant {variant!r}")
    components = []
    crit = []
    for k, g in enumerate(dfas):
        _require_total_binary_dfa(k, g)
        s_k = _fresh(f"s{k}", set(g.states))
        if variant == "shared-observable-1":
            alphabet = g.alphabet
            extra = [(p, "1", s_k) for p in sorted(g.marked)]
        else:
            alphabet = EventAlphabet(g.alphabet.events + ("u",), g.alphabet.observable)
            extra = [(p, "u", s_k) for p in sorted(g.marked)]
        components.append(
            Nfa(
                states=g.states + (s_k,),
                alphabet=alphabet,
                transitions=g.transitions + tuple(extra),
                initial=g.initial,
                marked=g.marked,
            )
        )
        crit.append(s_k)
    net = Network(tuple(components))
    return net, TupleCriticalSet(arity=len(dfas), tuples=frozenset({tuple(crit)}))


def unary_intersection_nonempty(nfas: list[Nfa], scan_cap: int = 2**20) -> bool:
    """Oracle: scan word lengths up to the joint subset-sequence bound and
    test whether every component marks some state at that length."""
    infos = [subset_sequence(g) for g in nfas]
    bound = max(t for t, _, _ in infos) + lcm(*(p for _, p, _ in infos))
    if bound > scan_cap:
        raise ResourceLimitError(f"scan bound {bound} exceeds the cap {scan_cap}")
    marked_idx = [frozenset(g.state_index(s) for s in g.marked) for g in nfas]
    for k in range(bound):
        hit = True
        for (t, p, seq), marks in zip(infos, marked_idx):
            if not (_seq_at(seq, t, p, k) & marks):
                hit = False
                break
        if hit:
            return True
    return False


def gen_unary_intersection(nfas: list[Nfa]) -> tuple[Network, TupleCriticalSet]:
    """Reduce unary-NFA intersection nonemptiness to network observability.

    Each component gets two fresh states reachable from every marked state by
    the shared event. The network is not critically observable w.r.t. the
    tuple of first fresh states iff the marked-language intersection is
    nonempty.
    """
    events = {e for g in nfas for e in g.alphabet.events}
    if any(len(g.alphabet.events) != 1 for g in nfas) or len(events) != 1:
        raise ValidationError("components must share a single unary event")
    event = next(iter(events))
    components = []
    crit = []
    for k, g in enumerate(nfas):
        taken = set(g.states)
        s_k = _fresh(f"s{k}", taken)
        t_k = _fresh(f"t{k}", taken | {s_k})
        extra = [(p, event, s_k) for p in sorted(g.marked)]
        extra += [(p, event, t_k) for p in sorted(g.marked)]
        components.append(
            Nfa(
                states=g.states + (s_k, t_k),
                alphabet=EventAlphabet((event,), frozenset({event})),
                transitions=g.transitions + tuple(extra),
                initial=g.initial,
                marked=g.marked,
            )
        )
        crit.append(s_k)
    net = Network(tuple(components))
    return net, TupleCriticalSet(arity=len(nfas), tuples=frozenset({tuple(crit)}))


def petri_reachable(
    net: PetriNet, initial: Marking, target: Marking, limits: ExploreLimits = ExploreLimits()
) -> bool:
    """Oracle: explicit-search reachability. Raises when the search neither
    finds the target nor exhausts the reachable set within the limits."""
    target = tuple(target)
    result = explore(net, initial, limits, stop=lambda m: m == target)
    if result.stopped_at is not None:
        return True
    if result.exhaustive:
        return False
    raise ResourceLimitError(
        "reachability undetermined within the exploration limits"
    )


def gen_reachability_petri(
    net: PetriNet, initial: Marking, target: Marking
) -> tuple[LabeledPetriNet, CriticalMarkingSet]:
    """Reduce Petri-net reachability to (non-)critical observability.

    Adds a fresh place fed by a fresh unobservable transition that pumps
    tokens unboundedly; every original transition keeps its own name as an
    observable label. The output is critically observable w.r.t. the single
    critical marking (target, 0) iff the target is unreachable. The pump
    makes the twin net unbounded, so confirmations are expected to come back
    Unknown from the explicit checker.
    """
    if len(tuple(initial)) != len(net.places) or len(tuple(target)) != len(net.places):
        raise ValidationError("marking dimensions must match the net")
    pump_place = _fresh("p'", set(net.places) | set(net.transitions))
    pump = _fresh("t'", set(net.places) | set(net.transitions) | {pump_place})
    places = net.places + (pump_place,)
    transitions = net.transitions + (pump,)
    pre = tuple(row + (0,) for row in net.pre) + ((0,) * len(transitions),)
    post = tuple(row + (0,) for row in net.post) + (
        (0,) * len(net.transitions) + (1,),
    )
    labeled = LabeledPetriNet(
        net=PetriNet(places, transitions, pre, post),
        initial=tuple(initial) + (0,),
        labels={**{t: t for t in net.transitions}, pump: None},
        alphabet=net.transitions,
    )
    critical = CriticalMarkingSet(CriticalMode.FINITE, (tuple(target) + (0,),))
    return labeled, critical


@dataclass(frozen=True)
class MarkingInclusionCritical:
    """Symbolic critical set of the marking-inclusion gadget.

    The critical markings are: the idle initial marking, and every marking of
    the reference net's reachable set in either branch. The set is generally
    infinite; `concretize` enumerates it for bounded reference nets.
    """

    reference: PetriNet
    reference_initial: Marking
    shared_places: int

    def concretize(self, limits: ExploreLimits = ExploreLimits()) -> CriticalMarkingSet:
        result = explore(self.reference, self.reference_initial, limits)
        if not result.exhaustive:
            raise ResourceLimitError(
                "reference net exploration hit a limit; the critical set "
                "cannot be enumerated"
            )
        r = self.shared_places
        markings = [(0,) * r + (0, 0, 1)]
        for m in sorted(result.markings):
            markings.append(m + (1, 0, 0))
            markings.append(m + (0, 1, 0))
        return CriticalMarkingSet(CriticalMode.FINITE, tuple(dict.fromkeys(markings)))


def marking_inclusion_holds(
    a: LabeledPetriNet, b: LabeledPetriNet, limits: ExploreLimits = ExploreLimits()
) -> bool:
    """Oracle: explicit R(A) subset-of R(B) on bounded nets."""
    ra = explore(a.net, a.initial, limits)
    rb = explore(b.net, b.initial, limits)
    if not (ra.exhaustive and rb.exhaustive):
        raise ResourceLimitError("marking inclusion undetermined within the limits")
    return set(ra.markings) <= set(rb.markings)


def gen_marking_inclusion(
    a: LabeledPetriNet, b: LabeledPetriNet
) -> tuple[LabeledPetriNet, MarkingInclusionCritical]:
    """Reduce marking inclusion (R(A) subset-of R(B)) to critical
    observability.

    The gadget runs A or B over shared places, selected by an unobservable
    transition moving a control token from the idle place to the branch gate;
    the B gate additionally carries one self-loop per label of A so that any
    observation of A's branch can be mimicked without moving B. The output is
    critically observable w.r.t. the symbolic critical set iff the inclusion
    holds (decided on bounded instances only).
    """
    r = len(a.net.places)
    if len(b.net.places) != r:
        raise ValidationError(
            f"place counts differ: {r} vs {len(b.net.places)}"
        )
    shared = tuple(f"p{i}" for i in range(r))
    taken = set(shared)
    gate_a = _fresh("ga", taken)
    gate_b = _fresh("gb", taken)
    idle = _fresh("idle", taken)
    places = shared + (gate_a, gate_b, idle)
    gate_a_i, gate_b_i, idle_i = r, r + 1, r + 2

    names: list[str] = []
    labels: dict[str, str | None] = {}
    pre_cols: list[tuple[int, ...]] = []
    post_cols: list[tuple[int, ...]] = []
    taken_t = set(places)

    def add(name, label, pre, post):
        name = _fresh(name, taken_t)
        taken_t.add(name)
        names.append(name)
        labels[name] = label
        pre_cols.append(tuple(pre))
        post_cols.append(tuple(post))
        return name

    def copy_net(src: LabeledPetriNet, gate: int, prefix: str):
        for ti, t in enumerate(src.net.transitions):
            pre = [src.net.pre[p][ti] for p in range(r)] + [0, 0, 0]
            post = [src.net.post[p][ti] for p in range(r)] + [0, 0, 0]
            pre[gate] += 1
            post[gate] += 1
            add(f"{prefix}.{t}", src.labels[t], pre, post)

    # selector transitions deposit the branch's initial marking
    add(
        "t_a",
        None,
        [0] * r + [0, 0, 1],
        list(a.initial) + [1, 0, 0],
    )
    add(
        "t_b",
        None,
        [0] * r + [0, 0, 1],
        list(b.initial) + [0, 1, 0],
    )
    copy_net(a, gate_a_i, "A")
    copy_net(b, gate_b_i, "B")
    mimic_alphabet = tuple(a.alphabet)
    for sigma in mimic_alphabet:
        pre = [0] * r + [0, 1, 0]
        add(f"s.{sigma}", sigma, pre, pre)

    alphabet = tuple(dict.fromkeys(tuple(a.alphabet) + tuple(b.alphabet)))
    gadget = LabeledPetriNet(
        net=PetriNet(
            places=places,
            transitions=tuple(names),
            pre=tuple(
                tuple(col[p] for col in pre_cols) for p in range(len(places))
            ),
            post=tuple(
                tuple(col[p] for col in post_cols) for p in range(len(places))
            ),
        ),
        initial=(0,) * r + (0, 0, 1),
        labels=labels,
        alphabet=alphabet,
    )
    descriptor = MarkingInclusionCritical(
        reference=b.net, reference_initial=b.initial, shared_places=r
    )
    return gadget, descriptor
