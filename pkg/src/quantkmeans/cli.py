"""Command-line front end: graph generation, single experiments, seed sweeps.

Every output file embeds the full configuration (seeds included) so any run
can be reproduced from its own output.  Exact values appear as ``num/den``
strings; float columns exist only as projections for plotting.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

from .exactmath import FractionVector
from .graph import diameter, generate_random_digraph, parse_edge_list, serialize_edge_list
from .kmeans import parse_centroids, parse_observations
from .oracle import check_equivalence, lloyd_reference
from .sim import (ExperimentConfig, ProtocolError, generate_centroids,
                  generate_observations, run_consensus, run_kmeans, sweep)

SCHEMA_PREFIX = "quantkmeans"


def _config_comment(config: dict) -> str:
    return "# config: " + json.dumps(config, sort_keys=True)


def _write_csv(path: Path, config: dict, header: list[str], rows) -> None:
    lines = [_config_comment(config), ",".join(header)]
    for row in rows:
        lines.append(",".join(str(v) for v in row))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n",
                    encoding="utf-8")


def _centroid_cell(vector: FractionVector) -> str:
    return ";".join(str(f) for f in vector.components())


def _load_config_file(path: str | None) -> dict[str, str]:
    if path is None:
        return {}
    values: dict[str, str] = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(),
                                 start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"config line {lineno}: expected key=value")
        key, value = line.split("=", 1)
        values[key.strip().replace("-", "_")] = value.strip()
    return values


def _pick(args, file_values: dict, key: str, default, convert):
    """Flag value if given, else config-file value, else default."""
    flag = getattr(args, key, None)
    if flag is not None:
        return flag
    if key in file_values:
        return convert(file_values[key])
    return default


def _parse_region(text: str) -> tuple[tuple[int, int], ...]:
    intervals = []
    for part in text.split(","):
        lo, hi = part.split(":")
        intervals.append((int(lo), int(hi)))
    return tuple(intervals)


def _d_bound_value(text: str):
    return text if text == "auto" else int(text)


def _experiment_config(args) -> ExperimentConfig:
    file_values = _load_config_file(args.config)
    base_seed = _pick(args, file_values, "seed", None, int)
    graph_seed = _pick(args, file_values, "graph_seed", None, int)
    obs_seed = _pick(args, file_values, "observation_seed", None, int)
    centroid_seed = _pick(args, file_values, "centroid_seed", None, int)
    if base_seed is not None:
        graph_seed = graph_seed if graph_seed is not None else base_seed
        obs_seed = obs_seed if obs_seed is not None else base_seed + 1
        centroid_seed = centroid_seed if centroid_seed is not None else base_seed + 2
    dim = _pick(args, file_values, "dim", 2, int)
    region_text = _pick(args, file_values, "region", None, str)
    box = _pick(args, file_values, "box", None, str)
    if region_text is not None:
        region = _parse_region(region_text)
    elif box is not None:
        lo, hi = box.split(":")
        region = tuple((int(lo), int(hi)) for _ in range(dim))
    else:
        region = tuple((0, 50) for _ in range(dim))
    return ExperimentConfig(
        n=_pick(args, file_values, "n", 100, int),
        k=_pick(args, file_values, "k", 3, int),
        dim=dim,
        region=region,
        extra_edge_probability=_pick(args, file_values, "p", 0.05, float),
        graph_seed=graph_seed if graph_seed is not None else 1,
        observation_seed=obs_seed if obs_seed is not None else 2,
        centroid_seed=centroid_seed if centroid_seed is not None else 3,
        d_bound=_pick(args, file_values, "d_bound", "auto", _d_bound_value),
        max_rounds=_pick(args, file_values, "max_rounds", 100, int),
        scale=_pick(args, file_values, "scale", 1, int),
    )


def _out_dir(args) -> Path:
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


# --------------------------------------------------------------------------
# subcommands


def cmd_gen_graph(args) -> int:
    file_values = _load_config_file(args.config)
    n = _pick(args, file_values, "n", None, int)
    if n is None:
        raise ValueError("--n is required")
    p = _pick(args, file_values, "p", 0.05, float)
    seed = _pick(args, file_values, "seed", 1, int)
    g = generate_random_digraph(n, p, seed)
    out = Path(args.out)
    out.write_text(serialize_edge_list(g), encoding="utf-8")
    # the edge-list format has no comment syntax, so the generation config
    # rides in a sidecar
    _write_json(out.with_suffix(out.suffix + ".meta.json"), {
        "schema": f"{SCHEMA_PREFIX}-graph-v1",
        "config": {"command": "gen-graph", "n": n, "p": p, "seed": seed},
        "n": g.n, "m": g.m, "diameter": diameter(g),
    })
    print(f"n={g.n} m={g.m} D={diameter(g)}")
    return 0


def cmd_consensus(args) -> int:
    g = parse_edge_list(Path(args.graph).read_text(encoding="utf-8"))
    values = parse_observations(Path(args.values).read_text(encoding="utf-8"))
    trace = run_consensus(g, values, log_messages=args.log_messages)
    out = _out_dir(args)
    config = {
        "command": "consensus", "graph": args.graph, "values": args.values,
        "n": g.n, "m": g.m,
    }
    _write_json(out / "consensus_summary.json", {
        "schema": f"{SCHEMA_PREFIX}-consensus-v1",
        "config": config,
        "n": trace.n, "m": trace.m, "dim": trace.dim,
        "steps": trace.steps, "S_t": trace.S_t,
        "step_bound": trace.step_bound, "bound_ok": trace.bound_ok,
        "messages": trace.messages,
        "average": str(trace.average),
        "estimates": [str(e) for e in trace.estimates],
        "conservation_checked": trace.conservation_checked,
    })
    _write_csv(out / "consensus_trace.csv", config,
               ["step", "messages_sent"],
               list(enumerate(trace.per_step_messages)))
    if trace.message_log is not None:
        _write_csv(out / "consensus_messages.csv", config,
                   ["step", "sender", "receiver", "z", "y"],
                   [(s, a, b, z, " ".join(map(str, y)))
                    for s, a, b, z, y in trace.message_log])
    print(f"S_t={trace.S_t} bound={trace.step_bound} bound_ok={trace.bound_ok}")
    return 0


def _load_kmeans_inputs(args, config: ExperimentConfig):
    if args.graph is not None:
        g = parse_edge_list(Path(args.graph).read_text(encoding="utf-8"))
        if g.n != config.n:
            config = replace(config, n=g.n)
    else:
        g = generate_random_digraph(config.n, config.extra_edge_probability,
                                    config.graph_seed)
    if args.observations is not None:
        observations = parse_observations(
            Path(args.observations).read_text(encoding="utf-8"))
    else:
        observations = generate_observations(config)
    if args.centroids is not None:
        centroids = parse_centroids(Path(args.centroids).read_text(encoding="utf-8"))
    else:
        centroids = generate_centroids(config)
    return g, observations, centroids, config


def cmd_kmeans(args) -> int:
    config = _experiment_config(args)
    g, observations, centroids, config = _load_kmeans_inputs(args, config)
    trace = run_kmeans(g, observations, centroids,
                       d_bound=config.d_bound, max_rounds=config.max_rounds,
                       check_conservation=not args.no_conservation_check,
                       log_messages=args.log_messages)
    config_dict = config.as_dict()
    config_dict.update({
        "command": "kmeans",
        "graph_file": args.graph, "observations_file": args.observations,
        "centroids_file": args.centroids,
    })
    trace.config = config_dict
    out = _out_dir(args)

    summary = {
        "schema": f"{SCHEMA_PREFIX}-kmeans-v1",
        "config": config_dict,
        "n": trace.n, "m": trace.m, "diameter": trace.diam,
        "d_bound": trace.d_bound, "k": trace.k, "dim": trace.dim,
        "T": trace.T, "C_t": trace.C_t, "terminated": trace.terminated,
        "step_bound": trace.step_bound, "bound_ok": trace.bound_ok,
        "mass_messages": trace.mass_messages,
        "extrema_messages": trace.extrema_messages,
        "max_mass_component": trace.max_mass_component,
        "mass_payload_bits": trace.mass_payload_bits,
        "silent_after_stop": trace.silent_after_stop,
        "final_centroids": [_centroid_cell(c)
                            for c in trace.centroid_sets[-1].centroids],
        "objective_final": str(trace.rounds[-1].objective),
    }
    exit_code = 0
    if args.oracle_check:
        reference = lloyd_reference(observations, centroids,
                                    max_rounds=config.max_rounds)
        report = check_equivalence(trace, reference)
        summary["equivalence"] = "pass" if report.passed else "fail"
        summary["equivalence_detail"] = report.detail
        if not report.passed:
            exit_code = 1
        print(f"equivalence: {summary['equivalence']}")

    _write_json(out / "kmeans_summary.json", summary)
    k = trace.k
    _write_csv(out / "rounds.csv", config_dict,
               ["T", "steps", "mass_messages", "extrema_messages",
                "F_num", "F_den"] + [f"c_{cl}" for cl in range(k)],
               [(r.T, r.steps, r.mass_messages, r.extrema_messages,
                 r.objective.reduced().num, r.objective.reduced().den,
                 *[_centroid_cell(c) for c in r.centroids.centroids])
                for r in trace.rounds])
    _write_csv(out / "fcurve.csv", config_dict,
               ["T", "F_num", "F_den", "F_float"],
               [(r.T, r.objective.reduced().num, r.objective.reduced().den,
                 float(r.objective)) for r in trace.rounds])
    dim = trace.dim
    _write_csv(out / "trajectories.csv", config_dict,
               ["T", "cluster"] + [f"coord_{i}" for i in range(dim)]
               + [f"float_{i}" for i in range(dim)],
               [(r.T, cl,
                 *[str(f) for f in r.centroids.centroids[cl].components()],
                 *[float(f) for f in r.centroids.centroids[cl].components()])
                for r in trace.rounds for cl in range(k)])
    _write_csv(out / "assignments.csv", config_dict,
               ["node", "cluster"] + [f"x_{i}" for i in range(dim)],
               [(j, trace.final_assignments[j], *observations[j])
                for j in range(trace.n)])
    if trace.message_log is not None:
        _write_csv(out / "messages.csv", config_dict,
                   ["step", "sender", "receiver", "label", "z", "y"],
                   [(s, a, b, cl, z, " ".join(map(str, y)))
                    for s, a, b, cl, z, y in trace.message_log])
    print(f"T={trace.T} C_t={trace.C_t} terminated={trace.terminated}")
    return exit_code


def cmd_sweep(args) -> int:
    config = _experiment_config(args)
    result = sweep(config, args.seeds, workers=args.workers)
    out = _out_dir(args)
    config_dict = dict(result.config)
    config_dict.update({"command": "sweep", "num_seeds": args.seeds})
    _write_json(out / "sweep_aggregate.json", {
        "schema": f"{SCHEMA_PREFIX}-sweep-v1",
        "config": config_dict,
        "num_seeds": result.num_seeds,
        "t_mean": result.t_mean, "t_min": result.t_min, "t_max": result.t_max,
        "histogram": [list(pair) for pair in result.histogram],
        "band": list(result.band),
        "band_violations": result.band_violations,
        "all_bounds_ok": result.all_bounds_ok,
    })
    _write_csv(out / "sweep_per_seed.csv", config_dict,
               ["seed", "graph_seed", "observation_seed", "centroid_seed",
                "n", "m", "diameter", "T", "C_t", "step_bound", "bound_ok",
                "mass_messages", "extrema_messages",
                "F_final", "F_final_float"],
               [(r["seed"], r["graph_seed"], r["observation_seed"],
                 r["centroid_seed"], r["n"], r["m"], r["diameter"], r["T"],
                 r["C_t"], r["step_bound"], r["bound_ok"], r["mass_messages"],
                 r["extrema_messages"], r["objective_final"],
                 r["objective_final_float"]) for r in result.per_seed])
    _write_csv(out / "sweep_thist.csv", config_dict, ["T", "count"],
               result.histogram)
    _write_csv(out / "sweep_fmean.csv", config_dict, ["T", "F_mean_float"],
               list(enumerate(result.f_mean_curve)))
    print(f"seeds={result.num_seeds} t_mean={result.t_mean:.2f} "
          f"t_min={result.t_min} t_max={result.t_max}")
    if result.band_violations:
        print(f"warning: T outside sanity band {result.band} for seeds "
              f"{result.band_violations}", file=sys.stderr)
    return 0


# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="quantkmeans",
        description="Distributed k-means with integer-only messaging over "
                    "digraphs: generators, single runs, and seed sweeps.")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def add_common(p):
        p.add_argument("--config", help="key=value config file; flags override")
        p.add_argument("--out-dir", default=".", help="output directory")

    g = sub.add_parser("gen-graph", help="generate a random digraph edge list")
    g.add_argument("--n", type=int)
    g.add_argument("--p", type=float, help="extra-edge probability")
    g.add_argument("--seed", type=int)
    g.add_argument("--out", "-o", required=True)
    g.add_argument("--config")
    g.set_defaults(func=cmd_gen_graph)

    c = sub.add_parser("consensus", help="run plain exact averaging")
    c.add_argument("--graph", required=True, help="edge-list file")
    c.add_argument("--values", required=True, help="initial integer vectors")
    c.add_argument("--log-messages", action="store_true")
    add_common(c)
    c.set_defaults(func=cmd_consensus)

    def add_experiment_flags(p):
        p.add_argument("--graph", help="edge-list file (else generated)")
        p.add_argument("--observations", help="observations file (else generated)")
        p.add_argument("--centroids", help="initial centroids file (else generated)")
        p.add_argument("--n", type=int)
        p.add_argument("--k", type=int)
        p.add_argument("--dim", type=int)
        p.add_argument("--p", type=float)
        p.add_argument("--box", help="LO:HI applied to every dimension")
        p.add_argument("--region", help="per-dimension LO:HI list, comma separated")
        p.add_argument("--scale", type=int, help="integer quantization scale")
        p.add_argument("--seed", type=int,
                       help="base seed; graph/observation/centroid seeds "
                            "default to seed, seed+1, seed+2")
        p.add_argument("--graph-seed", type=int, dest="graph_seed")
        p.add_argument("--obs-seed", type=int, dest="observation_seed")
        p.add_argument("--centroid-seed", type=int, dest="centroid_seed")
        p.add_argument("--d-bound", dest="d_bound", type=_d_bound_value,
                       help="diameter upper bound, or 'auto'")
        p.add_argument("--max-rounds", dest="max_rounds", type=int)

    km = sub.add_parser("kmeans", help="run one clustering experiment")
    add_experiment_flags(km)
    km.add_argument("--oracle-check", action="store_true",
                    help="also run the centralized reference and compare")
    km.add_argument("--log-messages", action="store_true")
    km.add_argument("--no-conservation-check", action="store_true")
    add_common(km)
    km.set_defaults(func=cmd_kmeans)

    sw = sub.add_parser("sweep", help="run many seeded experiments")
    add_experiment_flags(sw)
    sw.add_argument("--seeds", type=int, default=100,
                    help="number of derived-seed runs")
    sw.add_argument("--workers", type=int, default=None)
    add_common(sw)
    sw.set_defaults(func=cmd_sweep)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ProtocolError as exc:
        print(f"protocol violation: {exc}", file=sys.stderr)
        return 1
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
