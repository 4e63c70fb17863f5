"""Deterministic synchronous-round scheduler and experiment runners.

Every message sent at step t is delivered at step t+1; there is no loss,
duplication, or reordering.  All nodes advance in lock step, so a run is a
pure function of (graph, edge orders, initial data) and repeated runs are
bit-identical.  The runners verify the protocol's step bounds and mass
conservation as they go and fail loudly on any violation.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, replace
from typing import Optional, Sequence

from .consensus import ConsensusState, Mass
from .coordination import (Agreed, all_settled, extrema_merge, snapshot,
                           window_check)
from .exactmath import Fraction, FractionVector
from .graph import (Digraph, EdgeOrdering, assign_edge_orders, diameter,
                    generate_random_digraph, is_strongly_connected)
from .kmeans import CentroidSet, NodeKMeansState, assign_cluster, finalize_round


class ProtocolError(RuntimeError):
    """A protocol invariant or published bound failed; never ignored."""


# --------------------------------------------------------------------------
# plain averaging runs


@dataclass
class ConsensusTrace:
    n: int
    m: int
    dim: int
    steps: int                      # steps simulated until stability was certain
    S_t: int                        # first step from which all estimates stay exact
    step_bound: int                 # n * m^2
    bound_ok: bool
    average: FractionVector
    estimates: list[FractionVector]
    messages: int
    per_step_messages: list[int]
    conservation_checked: bool
    message_log: Optional[list[tuple[int, int, int, int, tuple[int, ...]]]] = None


def run_consensus(g: Digraph, initial: Sequence[Sequence[int]],
                  orders: EdgeOrdering | None = None,
                  log_messages: bool = False) -> ConsensusTrace:
    """Run the averaging protocol until every node's estimate equals the exact
    network average and can no longer change (every remaining mass carries
    that same ratio).  Records S_t and enforces the n*m^2 step bound."""
    n = g.n
    if n <= 2:
        raise ValueError("the protocol requires more than 2 nodes")
    if not is_strongly_connected(g):
        raise ValueError("graph is not strongly connected")
    values = [tuple(v) for v in initial]
    if len(values) != n:
        raise ValueError("one initial vector per node is required")
    dim = len(values[0])
    if any(len(v) != dim for v in values):
        raise ValueError("initial vectors must share one dimension")
    if orders is None:
        orders = assign_edge_orders(g)

    total_y = tuple(sum(v[i] for v in values) for i in range(dim))
    average = FractionVector(total_y, n)
    log: Optional[list] = [] if log_messages else None

    states: list[ConsensusState] = []
    pending: list[tuple[int, int, Mass]] = []
    for j in range(n):
        state, message = ConsensusState.create(values[j], 1, orders.targets(j))
        states.append(state)
        assert message is not None
        pending.append((j, message[0], message[1]))
        if log is not None:
            log.append((0, j, message[0], 1, values[j]))

    messages = len(pending)
    per_step = [len(pending)]
    step_bound = n * g.m * g.m
    cap = step_bound + 4 * g.m + 64

    def estimates_exact() -> bool:
        for st in states:
            if st.stored_z == 0:
                return False
            z = st.stored_z
            for yi, ti in zip(st.stored_y, total_y):
                if yi * n != ti * z:
                    return False
        return True

    def masses_settled() -> bool:
        # Every held or in-flight mass must already carry the average ratio;
        # from such a state no future transmission can move any estimate.
        for st in states:
            z = st.held_z
            if z == 0 and not any(st.held_y):
                continue
            for yi, ti in zip(st.held_y, total_y):
                if yi * n != ti * z:
                    return False
        for _, _, mass in pending:
            for yi, ti in zip(mass.y, total_y):
                if yi * n != ti * mass.z:
                    return False
        return True

    def check_conservation() -> None:
        sums = [0] * dim
        z_sum = 0
        for st in states:
            z_sum += st.held_z
            for i, yi in enumerate(st.held_y):
                sums[i] += yi
        for _, _, mass in pending:
            z_sum += mass.z
            for i, yi in enumerate(mass.y):
                sums[i] += yi
        if z_sum != n or tuple(sums) != total_y:
            raise ProtocolError("mass conservation violated")

    step = 0
    first_stable: Optional[int] = 0 if estimates_exact() else None
    check_conservation()
    while first_stable is None or not masses_settled():
        if step >= cap:
            raise ProtocolError(
                f"no convergence within {cap} steps (bound {step_bound})")
        step += 1
        inbox: list[list[Mass]] = [[] for _ in range(n)]
        for _, receiver, mass in pending:
            inbox[receiver].append(mass)
        pending = []
        for j, st in enumerate(states):
            out = st.node_step(inbox[j])
            if out is not None:
                pending.append((j, out[0], out[1]))
                messages += 1
                if log is not None:
                    log.append((step, j, out[0], out[1].z, out[1].y))
        per_step.append(len(pending))
        check_conservation()
        if estimates_exact():
            if first_stable is None:
                first_stable = step
        else:
            first_stable = None

    S_t = first_stable
    if S_t > step_bound:
        raise ProtocolError(
            f"convergence took {S_t} steps, above the bound {step_bound}")
    return ConsensusTrace(
        n=n, m=g.m, dim=dim, steps=step, S_t=S_t, step_bound=step_bound,
        bound_ok=True, average=average,
        estimates=[st.estimate for st in states],
        messages=messages, per_step_messages=per_step,
        conservation_checked=True, message_log=log)


# --------------------------------------------------------------------------
# clustering runs


@dataclass
class RoundRecord:
    T: int
    steps: int
    mass_messages: int
    extrema_messages: int
    centroids: CentroidSet
    objective: Fraction


@dataclass
class KMeansTrace:
    n: int
    m: int
    diam: int
    d_bound: int
    k: int
    dim: int
    rounds: list[RoundRecord]
    centroid_sets: list[CentroidSet]
    final_assignments: list[int]
    T: int
    C_t: int
    terminated: bool
    step_bound: int
    bound_ok: bool
    mass_messages: int
    extrema_messages: int
    max_mass_component: int
    mass_payload_bits: int
    flag_step: Optional[int]
    silent_after_stop: bool
    conservation_checked: bool
    message_log: Optional[list[tuple[int, int, int, int, int, tuple[int, ...]]]] = None
    config: Optional[dict] = None

    @property
    def total_messages(self) -> int:
        return self.mass_messages + self.extrema_messages

    @property
    def objective_values(self) -> list[Fraction]:
        return [r.objective for r in self.rounds]


def distance_objective(observations: Sequence[Sequence[int]],
                       assignments: Sequence[int],
                       centroids: CentroidSet | Sequence[FractionVector],
                       ) -> Fraction:
    """Exact sum of squared distances of each observation to its assigned
    centroid.  Members of one cluster share a denominator, so the sum is
    grouped per cluster before combining."""
    if isinstance(centroids, CentroidSet):
        cents = centroids.centroids
    else:
        cents = tuple(centroids)
    if len(observations) != len(assignments):
        raise ValueError("one assignment per observation is required")
    sums = [0] * len(cents)
    for x, label in zip(observations, assignments):
        c = cents[label]
        if len(x) != len(c.nums):
            raise ValueError("dimension mismatch")
        den = c.den
        acc = 0
        for xi, ci in zip(x, c.nums):
            diff = xi * den - ci
            acc += diff * diff
        sums[label] += acc
    total = Fraction(0, 1)
    for label, num in enumerate(sums):
        if num:
            den = cents[label].den
            total = (total + Fraction(num, den * den)).reduced()
    return total


class _MessageStats:
    __slots__ = ("max_component", "bits")

    def __init__(self):
        self.max_component = 0
        self.bits = 0

    def record(self, mass: Mass) -> None:
        z = mass.z
        if z > self.max_component:
            self.max_component = z
        self.bits += z.bit_length()
        for v in mass.y:
            a = v if v >= 0 else -v
            if a > self.max_component:
                self.max_component = a
            self.bits += a.bit_length() + 1


def _outcomes_equal(a, b) -> bool:
    if len(a) != len(b):
        return False
    for x, y in zip(a, b):
        if isinstance(x, Agreed) and isinstance(y, Agreed):
            if x.value != y.value:
                return False
        elif x is not y:
            return False
    return True


def _run_round(nodes: list[NodeKMeansState], in_nbrs: list[tuple[int, ...]],
               centroids: CentroidSet, window: int, m_edges: int,
               step_cap: int, stats: _MessageStats,
               check_conservation: bool,
               log: Optional[list], step_base: int):
    """One full round of the inner loop: inject labeled masses, run the
    averaging instances with windowed stopping, return when a window closes
    with no cluster still disagreeing.  No message leaves on the closing
    step, so the bus is empty at every round boundary."""
    n = len(nodes)
    k = centroids.k
    pending: list[tuple[int, int, int, Mass]] = []
    extrema = []
    for j, node in enumerate(nodes):
        snap_values, messages = node.begin_round(centroids)
        extrema.append(snapshot(snap_values))
        for cl, dest, mass in messages:
            pending.append((j, dest, cl, mass))
            stats.record(mass)
            if log is not None:
                log.append((step_base + 1, j, dest, cl, mass.z, mass.y))
    steps = 1
    mass_msgs = len(pending)
    ext_msgs = m_edges

    if check_conservation:
        dim = nodes[0].instances[0].dim
        label_totals = [[0] * (dim + 1) for _ in range(k)]
        for node in nodes:
            row = label_totals[node.assignment]
            for i, v in enumerate(node.x):
                row[i] += v
            row[dim] += 1

    merges = 0
    while True:
        if steps > step_cap:
            raise ProtocolError(
                f"round did not stop within {step_cap} steps")
        steps += 1
        inbox: list[list[tuple[int, Mass]]] = [[] for _ in range(n)]
        for _, receiver, cl, mass in pending:
            inbox[receiver].append((cl, mass))
        pending = []
        for j, node in enumerate(nodes):
            if inbox[j]:
                instances = node.instances
                for cl, mass in inbox[j]:
                    instances[cl].absorb_one(mass.y, mass.z)
        if check_conservation:
            seen = [[0] * (dim + 1) for _ in range(k)]
            for node in nodes:
                for cl, st in enumerate(node.instances):
                    row = seen[cl]
                    for i, v in enumerate(st.held_y):
                        row[i] += v
                    row[dim] += st.held_z
            if seen != label_totals:
                raise ProtocolError("mass conservation violated in round")

        prev = extrema
        extrema = [extrema_merge(prev[j], [prev[i] for i in in_nbrs[j]])
                   for j in range(n)]
        merges += 1
        if merges == window:
            outcomes = window_check(extrema[0])
            for j in range(1, n):
                if not _outcomes_equal(window_check(extrema[j]), outcomes):
                    raise ProtocolError(
                        "stopping verdicts diverged across nodes")
            if all_settled(outcomes):
                if pending:
                    raise ProtocolError("messages in flight at round close")
                return steps, mass_msgs, ext_msgs, outcomes
            extrema = [snapshot(node.held_snapshot_values()) for node in nodes]
            merges = 0

        for j, node in enumerate(nodes):
            for cl, dest, mass in node.mass_phase():
                pending.append((j, dest, cl, mass))
                mass_msgs += 1
                stats.record(mass)
                if log is not None:
                    log.append((step_base + steps, j, dest, cl, mass.z, mass.y))
        ext_msgs += m_edges


def run_kmeans(g: Digraph, observations: Sequence[Sequence[int]],
               initial_centroids: Sequence[FractionVector],
               d_bound: int | str | None = None,
               max_rounds: int = 100,
               orders: EdgeOrdering | None = None,
               check_conservation: bool = True,
               log_messages: bool = False) -> KMeansTrace:
    """Execute the distributed clustering protocol to termination (two equal
    consecutive centroid calculations) or until max_rounds calculations."""
    n = g.n
    if n <= 2:
        raise ValueError("the protocol requires more than 2 nodes")
    if not is_strongly_connected(g):
        raise ValueError("graph is not strongly connected")
    x = [tuple(v) for v in observations]
    if len(x) != n:
        raise ValueError("one observation per node is required")
    dim = len(x[0])
    if any(len(v) != dim for v in x):
        raise ValueError("observations must share one dimension")
    k = len(initial_centroids)
    if not (1 <= k < n):
        raise ValueError("the cluster count must satisfy 1 <= k < n")
    if any(c.dim != dim for c in initial_centroids):
        raise ValueError("centroid dimension does not match the observations")
    diam = diameter(g)
    if d_bound is None or d_bound == "auto":
        window = diam
    else:
        window = int(d_bound)
        if window < diam:
            raise ValueError(
                f"diameter bound {window} is below the true diameter {diam}")
    if orders is None:
        orders = assign_edge_orders(g)

    nodes = [NodeKMeansState(j, x[j], orders.targets(j)) for j in range(n)]
    in_nbrs = [g.in_neighbors(j) for j in range(n)]
    current = CentroidSet(initial_centroids, 0)

    log: Optional[list] = [] if log_messages else None
    stats = _MessageStats()
    assignments = [assign_cluster(v, current) for v in x]
    rounds = [RoundRecord(0, 0, 0, 0, current,
                          distance_objective(x, assignments, current))]
    centroid_sets = [current]
    C_t = 0
    mass_total = 0
    ext_total = 0
    per_round_cap = n * g.m * g.m + 2 * window + 64
    terminated = False
    T = 0
    while T < max_rounds and not terminated:
        T += 1
        steps, mass_msgs, ext_msgs, outcomes = _run_round(
            nodes, in_nbrs, current, window, g.m, per_round_cap, stats,
            check_conservation, log, C_t)
        current, unchanged = finalize_round(outcomes, current)
        centroid_sets.append(current)
        assignments = [assign_cluster(v, current) for v in x]
        rounds.append(RoundRecord(T, steps, mass_msgs, ext_msgs, current,
                                  distance_objective(x, assignments, current)))
        C_t += steps
        mass_total += mass_msgs
        ext_total += ext_msgs
        if T >= 2 and unchanged:
            terminated = True
            for node in nodes:
                node.set_flag()

    step_bound = T * (window + n * g.m * g.m)
    if C_t > step_bound:
        raise ProtocolError(
            f"total steps {C_t} exceed the bound {step_bound}")
    return KMeansTrace(
        n=n, m=g.m, diam=diam, d_bound=window, k=k, dim=dim,
        rounds=rounds, centroid_sets=centroid_sets,
        final_assignments=assignments, T=T, C_t=C_t, terminated=terminated,
        step_bound=step_bound, bound_ok=True,
        mass_messages=mass_total, extrema_messages=ext_total,
        max_mass_component=stats.max_component,
        mass_payload_bits=stats.bits,
        flag_step=C_t if terminated else None,
        silent_after_stop=terminated,
        conservation_checked=check_conservation,
        message_log=log, config=None)


# --------------------------------------------------------------------------
# experiment configuration and seed sweeps


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything needed to reproduce one experiment, seeds included."""
    n: int = 100
    k: int = 3
    dim: int = 2
    region: tuple[tuple[int, int], ...] = ((0, 50), (0, 50))
    extra_edge_probability: float = 0.05
    graph_seed: int = 1
    observation_seed: int = 2
    centroid_seed: int = 3
    d_bound: int | str = "auto"
    max_rounds: int = 100
    scale: int = 1

    def as_dict(self) -> dict:
        return {
            "n": self.n, "k": self.k, "dim": self.dim,
            "region": [list(r) for r in self.region],
            "extra_edge_probability": self.extra_edge_probability,
            "graph_seed": self.graph_seed,
            "observation_seed": self.observation_seed,
            "centroid_seed": self.centroid_seed,
            "d_bound": self.d_bound, "max_rounds": self.max_rounds,
            "scale": self.scale,
        }

    def validate(self) -> None:
        if self.n <= 2:
            raise ValueError("n must exceed 2")
        if not (1 <= self.k < self.n):
            raise ValueError("k must satisfy 1 <= k < n")
        if len(self.region) != self.dim:
            raise ValueError("one region interval per dimension is required")
        if self.scale < 1:
            raise ValueError("scale must be a positive integer")
        for lo, hi in self.region:
            if lo > hi:
                raise ValueError("region intervals must be nonempty")


def generate_observations(config: ExperimentConfig) -> list[tuple[int, ...]]:
    """Uniform integer points in the (scaled) region box."""
    rng = random.Random(config.observation_seed)
    out = []
    for _ in range(config.n):
        out.append(tuple(rng.randint(lo * config.scale, hi * config.scale)
                         for lo, hi in config.region))
    return out


def generate_centroids(config: ExperimentConfig) -> list[FractionVector]:
    rng = random.Random(config.centroid_seed)
    out = []
    for _ in range(config.k):
        point = tuple(rng.randint(lo * config.scale, hi * config.scale)
                      for lo, hi in config.region)
        out.append(FractionVector.from_ints(point))
    return out


def run_experiment(config: ExperimentConfig,
                   check_conservation: bool = True,
                   log_messages: bool = False) -> KMeansTrace:
    config.validate()
    g = generate_random_digraph(config.n, config.extra_edge_probability,
                                config.graph_seed)
    trace = run_kmeans(
        g, generate_observations(config), generate_centroids(config),
        d_bound=config.d_bound, max_rounds=config.max_rounds,
        check_conservation=check_conservation, log_messages=log_messages)
    trace.config = config.as_dict()
    return trace


# Seed strides keep the derived graph/observation/centroid streams disjoint
# across sweep indices without sharing generator state.
_GRAPH_STRIDE = 7919
_OBS_STRIDE = 104729
_CENTROID_STRIDE = 1299709

T_SANITY_BAND = (1, 100)


def config_for_seed(config: ExperimentConfig, index: int) -> ExperimentConfig:
    return replace(
        config,
        graph_seed=config.graph_seed + _GRAPH_STRIDE * index,
        observation_seed=config.observation_seed + _OBS_STRIDE * index,
        centroid_seed=config.centroid_seed + _CENTROID_STRIDE * index)


@dataclass
class SweepResult:
    config: dict
    num_seeds: int
    per_seed: list[dict]
    t_mean: float
    t_min: int
    t_max: int
    histogram: list[tuple[int, int]]
    f_mean_curve: list[float]
    band: tuple[int, int]
    band_violations: list[int]
    all_bounds_ok: bool = True


def _sweep_single(args: tuple[ExperimentConfig, int]) -> dict:
    config, index = args
    sub = config_for_seed(config, index)
    try:
        trace = run_experiment(sub, check_conservation=False)
    except (ProtocolError, ValueError) as exc:
        raise ProtocolError(f"sweep seed {index} failed: {exc}") from exc
    if not trace.terminated:
        raise ProtocolError(
            f"sweep seed {index}: no termination within {sub.max_rounds} rounds")
    objectives = trace.objective_values
    monotone = all(b <= a for a, b in zip(objectives, objectives[1:]))
    final = trace.rounds[-1].objective
    return {
        "seed": index,
        "graph_seed": sub.graph_seed,
        "observation_seed": sub.observation_seed,
        "centroid_seed": sub.centroid_seed,
        "n": trace.n, "m": trace.m, "diameter": trace.diam,
        "T": trace.T, "C_t": trace.C_t, "step_bound": trace.step_bound,
        "bound_ok": trace.bound_ok,
        "mass_messages": trace.mass_messages,
        "extrema_messages": trace.extrema_messages,
        "objective_monotone": monotone,
        "objective_final": str(final),
        "objective_final_float": float(final),
        "objective_curve_float": [float(r.objective) for r in trace.rounds],
    }


def sweep(config: ExperimentConfig, num_seeds: int,
          workers: int | None = None) -> SweepResult:
    """Run num_seeds independent experiments with derived seeds and aggregate
    the calculation counts and objective curves.  Results are merged in seed
    order, so the aggregate does not depend on the worker count."""
    if num_seeds < 1:
        raise ValueError("num_seeds must be positive")
    config.validate()
    jobs = [(config, index) for index in range(num_seeds)]
    if workers is not None and workers > 1:
        import multiprocessing
        with multiprocessing.get_context("fork").Pool(workers) as pool:
            results = pool.map(_sweep_single, jobs)
    else:
        results = [_sweep_single(job) for job in jobs]

    ts = [row["T"] for row in results]
    histogram: dict[int, int] = {}
    for t in ts:
        histogram[t] = histogram.get(t, 0) + 1
    longest = max(len(row["objective_curve_float"]) for row in results)
    f_mean = []
    for idx in range(longest):
        total = 0.0
        for row in results:
            curve = row["objective_curve_float"]
            total += curve[idx] if idx < len(curve) else curve[-1]
        f_mean.append(total / len(results))
    lo, hi = T_SANITY_BAND
    violations = [row["seed"] for row in results if not lo <= row["T"] <= hi]
    return SweepResult(
        config=config.as_dict(), num_seeds=num_seeds, per_seed=results,
        t_mean=sum(ts) / len(ts), t_min=min(ts), t_max=max(ts),
        histogram=sorted(histogram.items()), f_mean_curve=f_mean,
        band=T_SANITY_BAND, band_violations=violations, all_bounds_ok=True)
