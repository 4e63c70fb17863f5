"""Max/min-consensus and the windowed distributed stopping mechanism.

Every D steps (D at least the graph diameter) each node snapshots, per
cluster label, the ratio of the labeled mass it currently holds; the
snapshots then flood for exactly D one-hop merge rounds.  When the running
maximum and minimum coincide for a label, every contributing mass ratio was
identical at snapshot time, which certifies that the common value is the
exact cluster average.  A label nobody contributed to is flagged empty.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, TypeVar
from weakref import WeakValueDictionary

from .exactmath import FractionVector

T = TypeVar("T")


def max_consensus_step(own: T, received: Iterable[T]) -> T:
    """One synchronous update: the maximum of the node's value and every
    value heard from in-neighbors this step."""
    best = own
    for value in received:
        if value > best:
            best = value
    return best


def min_consensus_step(own: T, received: Iterable[T]) -> T:
    best = own
    for value in received:
        if value < best:
            best = value
    return best


@dataclass(frozen=True)
class ClusterExtrema:
    """Running per-dimension extrema of one cluster's snapshot values."""
    upper: FractionVector
    lower: FractionVector


# Extrema entries are interned by value: equal extrema are one shared object,
# so the per-step merges across every edge degrade to identity checks once
# values stop moving.  Keys are exact because the vectors inside entries are
# always kept in reduced canonical form.
_entry_intern: "WeakValueDictionary[tuple, ClusterExtrema]" = WeakValueDictionary()


def _make_entry(upper: FractionVector, lower: FractionVector) -> ClusterExtrema:
    key = (upper.nums, upper.den, lower.nums, lower.den)
    entry = _entry_intern.get(key)
    if entry is None:
        entry = ClusterExtrema(upper, lower)
        _entry_intern[key] = entry
    return entry


class ExtremaState:
    """Per-cluster extrema for one node; ``None`` entries mean the node has
    observed no contribution for that cluster in the current window."""

    __slots__ = ("entries",)

    def __init__(self, entries: Iterable[Optional[ClusterExtrema]]):
        self.entries = tuple(entries)

    def defined(self, cl: int) -> bool:
        return self.entries[cl] is not None

    def __repr__(self) -> str:
        return f"ExtremaState({self.entries!r})"


def snapshot(values: Sequence[Optional[FractionVector]]) -> ExtremaState:
    """Open a window: each present value seeds both extrema for its cluster.
    Values must be in reduced form (mass ratios are reduced at the source)."""
    return ExtremaState(
        None if v is None else _make_entry(v, v) for v in values
    )


def _merge_entry(a: Optional[ClusterExtrema],
                 b: Optional[ClusterExtrema]) -> Optional[ClusterExtrema]:
    if b is None or b is a:
        return a
    if a is None:
        return b
    upper = a.upper.elementwise_max(b.upper)
    lower = a.lower.elementwise_min(b.lower)
    if upper is a.upper and lower is a.lower:
        return a
    if upper is b.upper and lower is b.lower:
        return b
    return _make_entry(upper, lower)


def extrema_merge(own: ExtremaState,
                  received: Iterable[ExtremaState]) -> ExtremaState:
    """Fold received extrema into the node's own, per cluster and dimension.

    Absent entries act as identity elements.  When the result coincides with
    one input, that input's object is returned unchanged, so an agreed state
    propagates through the network by reference.
    """
    result = own
    entries = None
    for other in received:
        if other is result:
            continue
        base = result.entries if entries is None else entries
        if other.entries is base:
            continue
        changed = None
        for idx, (a, b) in enumerate(zip(base, other.entries)):
            merged = _merge_entry(a, b)
            if merged is not a:
                if changed is None:
                    changed = list(base)
                changed[idx] = merged
        if changed is not None:
            adopted = all(x is y for x, y in zip(changed, other.entries))
            if adopted:
                result, entries = other, None
            else:
                entries = changed
    if entries is not None:
        return ExtremaState(entries)
    return result


@dataclass(frozen=True)
class Agreed:
    """Window verdict: all contributions matched; ``value`` is the certified
    exact average for the cluster."""
    value: FractionVector


class _Sentinel:
    __slots__ = ("_name",)

    def __init__(self, name: str):
        self._name = name

    def __repr__(self) -> str:
        return self._name


DISAGREED = _Sentinel("DISAGREED")
EMPTY = _Sentinel("EMPTY")

WindowOutcome = object  # Agreed | DISAGREED | EMPTY


def window_check(state: ExtremaState) -> tuple[WindowOutcome, ...]:
    """Close a window: per cluster, Agreed when max equals min exactly in
    every dimension, Empty when nobody contributed, Disagreed otherwise."""
    outcomes: list[WindowOutcome] = []
    for entry in state.entries:
        if entry is None:
            outcomes.append(EMPTY)
        elif entry.upper is entry.lower or entry.upper == entry.lower:
            outcomes.append(Agreed(entry.upper))
        else:
            outcomes.append(DISAGREED)
    return tuple(outcomes)


def all_settled(outcomes: Iterable[WindowOutcome]) -> bool:
    """The inner loop may stop only when no cluster is still disagreeing."""
    return not any(o is DISAGREED for o in outcomes)
