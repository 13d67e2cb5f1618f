"""Critical observability for labeled Petri nets with finite or co-finite
critical marking sets.

The checker explores the twin net under explicit limits and answers with
three values: a refutation carries a replayable pair of firing sequences, a
confirmation requires the twin exploration to have been exhaustive, and
anything else is an honest Unknown.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .errors import ContractError, ValidationError
from .petri import (
    ExploreLimits,
    LabeledPetriNet,
    Marking,
    explore,
    fire_sequence,
    twin_net,
)
from .verdict import Outcome, SearchStats, Witness


class CriticalMode(Enum):
    FINITE = "finite"
    COFINITE = "cofinite"


@dataclass(frozen=True)
class CriticalMarkingSet:
    """Critical markings given as an explicit finite list.

    Finite mode: the list is the critical set C. Co-finite mode: the list is
    the complement of C within the reachable set, so a reachable marking is
    critical iff it is not listed. Membership is only ever queried on
    reachable markings, which keeps the co-finite reading well defined.
    """

    mode: CriticalMode
    markings: tuple[Marking, ...]

    def __post_init__(self):
        markings = tuple(tuple(m) for m in self.markings)
        object.__setattr__(self, "markings", markings)
        if not isinstance(self.mode, CriticalMode):
            raise ValidationError(f"unknown critical-set mode {self.mode!r}")
        if len(set(markings)) != len(markings):
            raise ValidationError("critical marking list has duplicates")
        dims = {len(m) for m in markings}
        if len(dims) > 1:
            raise ValidationError("critical markings have inconsistent dimensions")
        for m in markings:
            if any(not isinstance(x, int) or x < 0 for x in m):
                raise ValidationError("marking entries must be nonnegative integers")


def member(m: Marking, critical: CriticalMarkingSet) -> bool:
    """Is `m` critical? Listed (finite mode) or unlisted (co-finite mode)."""
    listed = tuple(m) in critical.markings
    return listed if critical.mode is CriticalMode.FINITE else not listed


@dataclass(frozen=True)
class PetriVerdict:
    outcome: Outcome
    witness: Witness | None
    exhaustive: bool
    limits: ExploreLimits
    stats: SearchStats | None = None
    unbounded_evidence: bool = False


def check_petri(
    g: LabeledPetriNet,
    critical: CriticalMarkingSet,
    limits: ExploreLimits = ExploreLimits(),
    detect_unbounded: bool = False,
) -> PetriVerdict:
    """Search the twin net for a marking whose original-places half is
    critical and whose copy half is not.

    The single-sided test is complete because twin reachability is symmetric
    under swapping the two halves. Confirmation requires exhaustive twin
    exploration; otherwise the verdict is Unknown with the limits reported.
    """
    n_places = len(g.net.places)
    for m in critical.markings:
        if len(m) != n_places:
            raise ValidationError(
                f"critical markings have {len(m)} entries, net has {n_places} places"
            )
    tw = twin_net(g)
    membership = set(critical.markings)
    finite = critical.mode is CriticalMode.FINITE

    def half_is_critical(half: Marking) -> bool:
        return (half in membership) == finite

    def bad(m: Marking) -> bool:
        return half_is_critical(m[:n_places]) and not half_is_critical(m[n_places:])

    result = explore(tw.net, tw.initial, limits, stop=bad, detect_unbounded=detect_unbounded)
    stats = SearchStats(len(result.markings), result.peak_frontier)

    if result.stopped_at is not None:
        hit = result.markings[result.stopped_at]
        run1, run2 = tw.split_sequence(result.path_to(result.stopped_at))
        observation = g.label_word(run1)
        if observation != g.label_word(run2):
            raise AssertionError("twin runs disagree on observation; construction bug")
        witness = Witness(
            observation=observation,
            run1=run1,
            run2=run2,
            end1=hit[:n_places],
            end2=hit[n_places:],
        )
        return PetriVerdict(
            Outcome.NOT_CRITICALLY_OBSERVABLE,
            witness,
            exhaustive=False,
            limits=limits,
            stats=stats,
            unbounded_evidence=result.unbounded_evidence,
        )

    outcome = Outcome.CRITICALLY_OBSERVABLE if result.exhaustive else Outcome.UNKNOWN
    return PetriVerdict(
        outcome,
        None,
        exhaustive=result.exhaustive,
        limits=limits,
        stats=stats,
        unbounded_evidence=result.unbounded_evidence,
    )


def replay_petri_witness(
    g: LabeledPetriNet, critical: CriticalMarkingSet, witness: Witness
) -> tuple[bool, str]:
    """Validate a Petri refutation witness: both firing sequences must be
    enabled from the initial marking, share the recorded observation, and end
    in markings classified critical / non-critical as claimed."""
    try:
        for name, run, end, want_critical in (
            ("run1", witness.run1, witness.end1, True),
            ("run2", witness.run2, witness.end2, False),
        ):
            try:
                reached = fire_sequence(g.net, g.initial, run)
            except (ValidationError, ContractError) as exc:
                return False, f"{name}: {exc}"
            if reached != tuple(end):
                return False, f"{name}: reaches {reached}, not {tuple(end)}"
            if g.label_word(run) != tuple(witness.observation):
                return False, f"{name}: labels differ from the observation"
            if member(reached, critical) != want_critical:
                kind = "critical" if want_critical else "non-critical"
                return False, f"{name}: end marking {reached} is not {kind}"
    except ValidationError as exc:
        return False, str(exc)
    return True, "witness valid"
