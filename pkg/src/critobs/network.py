"""Critical observability for networks of automata.

`check_network` runs the twin search over the lazy synchronous product of
the components: a search node is a pair of component-state tuples and the
composed system is never built. `materialize_and_check` is the explicit
oracle (compose, then run the single-automaton checker). `check_unary_network`
is the exact decision procedure for single-event networks based on the
eventually periodic subset sequences of the components.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product as cartesian
from math import lcm, prod
from typing import Iterable

from .automata import Nfa, SyncProduct, merged_observability
from .errors import ResourceLimitError, ValidationError
from .nfa_check import check_nfa
from .twin_search import refutation_search
from .verdict import Outcome, SearchStats, Verdict, Witness

DEFAULT_PRODUCT_CAP = 10**6


@dataclass(frozen=True)
class Network:
    """Nonempty ordered list of automata composed by synchronous product on
    shared events. Every event must have one observability status across all
    components that carry it."""

    components: tuple[Nfa, ...]

    def __post_init__(self):
        components = tuple(self.components)
        object.__setattr__(self, "components", components)
        if not components:
            raise ValidationError("network needs at least one component")
        merged_observability(components)


@dataclass(frozen=True)
class TupleCriticalSet:
    """Critical state tuples of a network.

    `tuples` lists explicit tuples. `blocks` is a product-form shorthand:
    each block gives, per component, either a set of allowed state names or
    None for "any state"; a tuple is critical when it matches some block.
    Blocks are expanded only on membership tests, never enumerated, except by
    `explicit` (which enforces a cap).
    """

    arity: int
    tuples: frozenset[tuple[str, ...]] = frozenset()
    blocks: tuple[tuple[frozenset[str] | None, ...], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "tuples", frozenset(tuple(t) for t in self.tuples))
        object.__setattr__(
            self,
            "blocks",
            tuple(
                tuple(None if part is None else frozenset(part) for part in block)
                for block in self.blocks
            ),
        )
        if self.arity < 1:
            raise ValidationError("tuple arity must be positive")
        for t in self.tuples:
            if len(t) != self.arity:
                raise ValidationError(f"critical tuple {t!r} has wrong arity")
        for block in self.blocks:
            if len(block) != self.arity:
                raise ValidationError("product block has wrong arity")

    def contains(self, state_tuple: tuple[str, ...]) -> bool:
        if tuple(state_tuple) in self.tuples:
            return True
        return any(
            all(part is None or s in part for part, s in zip(block, state_tuple))
            for block in self.blocks
        )

    def validate_against(self, net: Network) -> None:
        if self.arity != len(net.components):
            raise ValidationError(
                f"critical tuples have arity {self.arity}, "
                f"network has {len(net.components)} components"
            )
        for t in self.tuples:
            for k, s in enumerate(t):
                if s not in net.components[k].states:
                    raise ValidationError(
                        f"critical tuple {t!r}: {s!r} is not a state of component {k}"
                    )
        for block in self.blocks:
            for k, part in enumerate(block):
                if part is None:
                    continue
                stray = part - set(net.components[k].states)
                if stray:
                    raise ValidationError(
                        f"product block: {sorted(stray)} not states of component {k}"
                    )

    def explicit(self, net: Network, cap: int = DEFAULT_PRODUCT_CAP) -> frozenset[tuple[str, ...]]:
        """All critical tuples, with product blocks expanded."""
        out = set(self.tuples)
        for block in self.blocks:
            parts = [
                sorted(part) if part is not None else list(net.components[k].states)
                for k, part in enumerate(block)
            ]
            if prod(len(p) for p in parts) + len(out) > cap:
                raise ResourceLimitError(
                    f"expanding product blocks exceeds the cap of {cap} tuples"
                )
            out.update(cartesian(*parts))
        return frozenset(out)


class _ProductPairSystem:
    def __init__(self, product: SyncProduct):
        self.product = product
        self.events = product.events
        self.n_events = product.n_events
        self.observable_flags = product.observable_flags

    def initial_nodes(self):
        return self.product.initial_nodes()

    def successors(self, node, ei):
        return self.product.successors(node, ei)

    def label(self, node):
        return self.product.names(node)


def _critical_predicate(net: Network, critical: TupleCriticalSet):
    idx_tuples = set()
    for t in critical.tuples:
        idx_tuples.add(tuple(g.state_index(s) for g, s in zip(net.components, t)))
    idx_blocks = []
    for block in critical.blocks:
        idx_blocks.append(
            tuple(
                None if part is None else frozenset(g.state_index(s) for s in part)
                for g, part in zip(net.components, block)
            )
        )

    def is_critical(node):
        if node in idx_tuples:
            return True
        return any(
            all(part is None or s in part for part, s in zip(block, node))
            for block in idx_blocks
        )

    return is_critical


def check_network(net: Network, critical: TupleCriticalSet) -> Verdict:
    """Decide critical observability of the composed system without building
    the composition: twin search over pairs of component-state tuples."""
    critical.validate_against(net)
    system = _ProductPairSystem(SyncProduct(net.components))
    result = refutation_search(system, _critical_predicate(net, critical))
    stats = SearchStats(result.explored, result.peak_frontier)
    if result.witness is not None:
        return Verdict(Outcome.NOT_CRITICALLY_OBSERVABLE, result.witness, stats)
    return Verdict(Outcome.CRITICALLY_OBSERVABLE, stats=stats)


def materialize_and_check(
    net: Network, critical: TupleCriticalSet, cap: int = DEFAULT_PRODUCT_CAP
) -> Verdict:
    """Oracle: build the explicit composition and defer to `check_nfa`.

    Raises `ResourceLimitError` when the accessible product exceeds `cap`
    states. The witness, if any, is translated back to state tuples so it is
    interchangeable with `check_network` output.
    """
    critical.validate_against(net)
    product = SyncProduct(net.components)
    nfa, nodes = product.materialize_with_nodes(cap)
    tuple_of = {
        name: product.names(node) for name, node in zip(nfa.states, nodes)
    }
    crit_states = frozenset(
        name for name, t in tuple_of.items() if critical.contains(t)
    )
    verdict = check_nfa(nfa, crit_states)
    if verdict.witness is None:
        return verdict
    w = verdict.witness
    witness = Witness(
        observation=w.observation,
        run1=tuple((tuple_of[a], e, tuple_of[b]) for a, e, b in w.run1),
        run2=tuple((tuple_of[a], e, tuple_of[b]) for a, e, b in w.run2),
        end1=tuple_of[w.end1],
        end2=tuple_of[w.end2],
    )
    return Verdict(verdict.outcome, witness, verdict.stats)


def subset_sequence(g: Nfa) -> tuple[int, int, list[frozenset[int]]]:
    """Tail, period, and prefix of the subset sequence of a unary automaton.

    The sequence S(k) of state-index sets reachable under k copies of the
    event is eventually periodic; the returned (tail, period) is minimal and
    the prefix covers S(0) .. S(tail + period - 1).
    """
    if len(g.alphabet.events) != 1:
        raise ValidationError("subset sequence requires a unary alphabet")
    row = g._succ[0]
    cur = frozenset(g.state_index(s) for s in g.initial)
    seen = {}
    seq = []
    while cur not in seen:
        seen[cur] = len(seq)
        seq.append(cur)
        cur = frozenset(d for s in cur for d in row[s])
    tail = seen[cur]
    return tail, len(seq) - tail, seq


def _seq_at(seq: list, tail: int, period: int, k: int) -> frozenset[int]:
    if k < len(seq):
        return seq[k]
    return seq[tail + (k - tail) % period]


def _unary_path(g: Nfa, states_at, length: int, target: int) -> list[int]:
    """A run of exactly `length` steps ending in `target`, each intermediate
    state drawn from the corresponding subset of the sequence."""
    row = g._succ[0]
    path = [target]
    cur = target
    for k in range(length, 0, -1):
        pred = min(s for s in states_at(k - 1) if cur in row[s])
        path.append(pred)
        cur = pred
    path.reverse()
    return path


def check_unary_network(
    net: Network,
    critical: TupleCriticalSet,
    max_scan: int = 2**20,
    explicit_cap: int = DEFAULT_PRODUCT_CAP,
) -> Verdict:
    """Exact decision for networks over one shared observable event.

    Each component's reachable-subset sequence is eventually periodic with
    tail t_i and period p_i; the tuple set reachable after k events is the
    product of the component subsets, so scanning k below
    max(t_i) + lcm(p_i) is exhaustive. Not critically observable iff some
    scanned product meets both the critical set and its complement.
    """
    events = {e for g in net.components for e in g.alphabet.events}
    if any(len(g.alphabet.events) != 1 for g in net.components) or len(events) != 1:
        raise ValidationError("unary check requires one shared event in every component")
    event = next(iter(events))
    if any(event not in g.alphabet.observable for g in net.components):
        raise ValidationError(f"the shared event {event!r} must be observable")
    critical.validate_against(net)

    comps = net.components
    crit_tuples = sorted(
        tuple(g.state_index(s) for g, s in zip(comps, t))
        for t in critical.explicit(net, explicit_cap)
    )

    infos = [subset_sequence(g) for g in comps]
    bound = max(t for t, _, _ in infos) + lcm(*(p for _, p, _ in infos))
    if bound > max_scan:
        raise ResourceLimitError(
            f"exact scan bound {bound} exceeds the configured limit {max_scan}"
        )

    peak = max(len(seq) for _, _, seq in infos)
    for k in range(bound):
        subs = [_seq_at(seq, t, p, k) for t, p, seq in infos]
        if not all(subs):
            continue
        total = prod(len(s) for s in subs)
        inside = [c for c in crit_tuples if all(ci in s for ci, s in zip(c, subs))]
        if inside and total > len(inside):
            witness = _unary_witness(net, event, infos, k, subs, inside)
            stats = SearchStats(k + 1, peak)
            return Verdict(Outcome.NOT_CRITICALLY_OBSERVABLE, witness, stats)
    return Verdict(Outcome.CRITICALLY_OBSERVABLE, stats=SearchStats(bound, peak))


def _unary_witness(net, event, infos, k, subs, inside) -> Witness:
    comps = net.components
    end1 = inside[0]
    inside_set = set(inside)
    end2 = next(
        t for t in cartesian(*(sorted(s) for s in subs)) if t not in inside_set
    )

    def tuple_run(target):
        paths = []
        for g, (t, p, seq), ci in zip(comps, infos, target):
            paths.append(_unary_path(g, lambda j, t=t, p=p, seq=seq: _seq_at(seq, t, p, j), k, ci))
        steps = []
        for m in range(k):
            src = tuple(g.states[path[m]] for g, path in zip(comps, paths))
            dst = tuple(g.states[path[m + 1]] for g, path in zip(comps, paths))
            steps.append((src, event, dst))
        return tuple(steps)

    names = lambda t: tuple(g.states[i] for g, i in zip(comps, t))
    return Witness(
        observation=(event,) * k,
        run1=tuple_run(end1),
        run2=tuple_run(end2),
        end1=names(end1),
        end2=names(end2),
    )


def replay_network_witness(
    net: Network, critical: TupleCriticalSet, witness: Witness
) -> tuple[bool, str]:
    """Validate a network witness: both runs must be firable product moves
    from initial tuples, project to the recorded observation, and end in a
    critical / non-critical tuple as claimed."""
    product = SyncProduct(net.components)
    observable = product.observable
    try:
        critical.validate_against(net)
        for name, run, end, want_critical in (
            ("run1", witness.run1, witness.end1, True),
            ("run2", witness.run2, witness.end2, False),
        ):
            cur = tuple(run[0][0]) if run else tuple(end)
            if len(cur) != len(net.components):
                return False, f"{name}: tuple arity mismatch"
            if any(s not in g.initial for g, s in zip(net.components, cur)):
                return False, f"{name}: start tuple {cur!r} is not initial"
            node = tuple(g.state_index(s) for g, s in zip(net.components, cur))
            for src, e, dst in run:
                if tuple(src) != cur:
                    return False, f"{name}: broken chaining at {src!r}"
                if e not in product.events:
                    return False, f"{name}: unknown event {e!r}"
                ei = product.events.index(e)
                dst_node = tuple(
                    g.state_index(s) for g, s in zip(net.components, dst)
                )
                if dst_node not in product.successors(node, ei):
                    return False, f"{name}: move ({src},{e},{dst}) is not a product move"
                node, cur = dst_node, tuple(dst)
            if cur != tuple(end):
                return False, f"{name}: run ends in {cur!r}, not {tuple(end)!r}"
            labels = tuple(e for _, e, _ in run if e in observable)
            if labels != tuple(witness.observation):
                return False, f"{name}: projected labels differ from the observation"
            if critical.contains(cur) != want_critical:
                kind = "critical" if want_critical else "non-critical"
                return False, f"{name}: end tuple {cur!r} is not {kind}"
    except ValidationError as exc:
        return False, str(exc)
    return True, "witness valid"
