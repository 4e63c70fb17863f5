"""Centralized reference implementations used to validate the protocols.

The Lloyd reference deliberately reuses the exact assignment and refinement
operations, so a divergence between it and a distributed run isolates a
protocol bug rather than arithmetic drift.  A float variant exists purely to
demonstrate how inexact arithmetic drifts; it takes no part in validation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

from .exactmath import FractionVector
from .kmeans import CentroidSet, assign_cluster, refinement_value


def brute_average(vectors: Sequence[Sequence[int]]) -> FractionVector:
    """Sum over count, exact and unreduced."""
    if not vectors:
        raise ValueError("average of an empty collection")
    dim = len(vectors[0])
    sums = [0] * dim
    for v in vectors:
        if len(v) != dim:
            raise ValueError("dimension mismatch")
        for i, value in enumerate(v):
            sums[i] += value
    return FractionVector(tuple(sums), len(vectors))


@dataclass
class LloydResult:
    centroid_sets: list[CentroidSet]      # index T = 0 .. rounds executed
    assignments: list[list[int]]          # per executed round
    T: int
    terminated: bool


def lloyd_reference(observations: Sequence[Sequence[int]],
                    initial_centroids: Sequence[FractionVector],
                    max_rounds: int = 100,
                    tie_break: str = "low") -> LloydResult:
    """Centralized alternation of assignment and exact refinement.

    Empty clusters carry their centroid forward.  The loop stops at the first
    round whose calculated centroids equal the previous round's calculation;
    the initial guess itself never counts as a calculation.
    """
    current = CentroidSet(initial_centroids, 0)
    sets = [current]
    assignment_history: list[list[int]] = []
    terminated = False
    T = 0
    while T < max_rounds and not terminated:
        T += 1
        labels = [assign_cluster(x, current, tie_break=tie_break)
                  for x in observations]
        members: list[list[Sequence[int]]] = [[] for _ in range(current.k)]
        for x, label in zip(observations, labels):
            members[label].append(x)
        new = []
        for cl in range(current.k):
            if members[cl]:
                new.append(refinement_value(members[cl]))
            else:
                new.append(current.centroids[cl])
        updated = CentroidSet(new, T)
        assignment_history.append(labels)
        sets.append(updated)
        if T >= 2 and updated.values_equal(current):
            terminated = True
        current = updated
    return LloydResult(sets, assignment_history, T, terminated)


@dataclass
class EquivalenceReport:
    passed: bool
    rounds_compared: int
    first_divergence: Optional[tuple[int, int]] = None   # (round, cluster)
    detail: str = ""
    notes: list[str] = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.passed


def check_equivalence(trace, oracle: LloydResult) -> EquivalenceReport:
    """Round-by-round comparison of a distributed trace against the reference:
    both must produce the same number of calculations and exactly equal
    centroid values at every round."""
    distributed = trace.centroid_sets
    reference = oracle.centroid_sets
    rounds = min(len(distributed), len(reference))
    for t in range(rounds):
        a, b = distributed[t], reference[t]
        for cl in range(a.k):
            if a.centroids[cl] != b.centroids[cl]:
                return EquivalenceReport(
                    False, rounds, (t, cl),
                    f"round {t} cluster {cl}: distributed "
                    f"{a.centroids[cl]} vs reference {b.centroids[cl]}")
    if trace.T != oracle.T:
        return EquivalenceReport(
            False, rounds, (rounds, -1),
            f"calculation counts differ: distributed T={trace.T}, "
            f"reference T={oracle.T}")
    if len(distributed) != len(reference):
        return EquivalenceReport(
            False, rounds, (rounds, -1),
            f"sequence lengths differ: {len(distributed)} vs {len(reference)}")
    return EquivalenceReport(True, rounds, None, "identical centroid sequences")


def lloyd_float(observations: Sequence[Sequence[int]],
                initial_centroids: Sequence[Sequence[float]],
                max_rounds: int = 100) -> tuple[list[list[list[float]]], int]:
    """Float-arithmetic Lloyd, for demonstrating quantization-free drift.
    Not used by any validation path."""
    centroids = [list(map(float, c)) for c in initial_centroids]
    history = [[list(c) for c in centroids]]
    for T in range(1, max_rounds + 1):
        k = len(centroids)
        sums = [[0.0] * len(centroids[0]) for _ in range(k)]
        counts = [0] * k
        for x in observations:
            best, best_d = 0, None
            for idx, c in enumerate(centroids):
                d = sum((xi - ci) ** 2 for xi, ci in zip(x, c))
                if best_d is None or d < best_d:
                    best, best_d = idx, d
            counts[best] += 1
            for i, xi in enumerate(x):
                sums[best][i] += xi
        new = [
            [s / counts[cl] for s in sums[cl]] if counts[cl] else list(centroids[cl])
            for cl in range(k)
        ]
        history.append([list(c) for c in new])
        if T >= 2 and new == centroids:
            return history, T
        centroids = new
    return history, max_rounds
