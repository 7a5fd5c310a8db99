"""Command-line harness: experiment orchestration and report generation.

Subcommands
-----------
learn          learn Hebbian weights from a memory file; writes weights.csv
energy-report  memory/flip/probe energies over an h grid; energy_report.csv
               (columns h, E_probe, E_mem_1.., E_flip_1..) plus figure
recall         one recall at fixed h with the chosen engine; recall.json and,
               for sampling engines, counts.csv (columns state,count)
sweep-h        success vs field strength; sweep_h.csv (columns h, success,
               h_max, allowed) plus figure
radius         guaranteed attraction radius for a given N; radius.json
basin-verify   exhaustive recall check over probe balls; basin_failures.csv
               (columns probe,d_s,d_b,h,classification) and summary JSON
capacity       exact-vs-bound tail grid (pstar_grid.csv: N,x,exact,bound,ok)
               and the exponent-budget curve (tradeoff.csv: f,budget)
montecarlo     random-memory recall rates vs the predicted bound
               (montecarlo.csv: N,p,t_frac,trials,successes,rate,bound,engine)
embed          clique-embed a problem onto a chimera graph; embedding.txt,
               physical_problem.txt, optional SA round trip in embed.json
qa-gap         minimum spectral gap along the anneal; gap.csv (columns s,gap)

Exit codes: 0 success, 2 configuration error, 3 engine cap violation,
4 embedding failure.  Every command is deterministic given the config seeds;
CSV outputs are byte-identical across reruns except for the leading
'# generated:' timestamp line.
"""

from __future__ import annotations

import argparse
import json
import sys
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import attraction, capacity, chimera, oracle, quantum, sa
from .config import ConfigError, ExperimentConfig
from .hopfield import MemorySet, format_spin_string, hamming, hebbian_learn
from .ising import (
    IsingProblem,
    ProbeSpec,
    build_problem,
    check_orthogonal,
    energy_report,
    h_max_generic,
    h_max_per_memory,
)
from .oracle import CapExceededError

__all__ = ["main"]

QA_CLI_MAX_SPINS = quantum.EVOLVE_MAX_SPINS
ORACLE_CLI_MAX_SPINS = oracle.ORACLE_MAX_SPINS


def _timestamp_line() -> str:
    return f"# generated: {datetime.now(timezone.utc).isoformat()}"


def _write_csv(path: Path, header: str, rows) -> None:
    lines = [_timestamp_line(), header]
    lines += [",".join(_fmt(v) for v in row) for row in rows]
    path.write_text("\n".join(lines) + "\n")


def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def _write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _out_dir(cfg: ExperimentConfig, override: str | None) -> Path:
    out = Path(override) if override else cfg.output_dir
    out.mkdir(parents=True, exist_ok=True)
    return out


def _nearest(memories: MemorySet, probe: ProbeSpec) -> tuple[int, np.ndarray]:
    dist = np.array([probe.distance_to(m) for m in memories])
    return int(dist.argmin()), dist


def _overall_h_max(memories: MemorySet, probe: ProbeSpec) -> tuple[float, float]:
    """(max, min) of the per-memory overbias bounds via the generic inequality."""
    weights = hebbian_learn(memories)
    bounds = []
    for m in memories:
        if probe.distance_to(m) > 0:
            bounds.append(h_max_generic(weights, probe, m))
    if not bounds:
        return float("inf"), float("inf")
    return max(bounds), min(bounds)


def _check_engine_cap(engine: str, n: int) -> None:
    if engine == "qa" and n > QA_CLI_MAX_SPINS:
        raise CapExceededError(f"engine qa is capped at N <= {QA_CLI_MAX_SPINS}, got N = {n}")
    if engine == "oracle" and n > ORACLE_CLI_MAX_SPINS:
        raise CapExceededError(
            f"engine oracle is capped at N <= {ORACLE_CLI_MAX_SPINS}, got N = {n}"
        )


def _qa_schedule(cfg: ExperimentConfig) -> quantum.AnnealSchedule:
    if cfg.qa_schedule_a or cfg.qa_schedule_b:
        if not (cfg.qa_schedule_a and cfg.qa_schedule_b):
            raise ConfigError("[qa] schedule_a/schedule_b: both tables are required")
        return quantum.AnnealSchedule.from_tables(
            quantum.load_schedule_table(cfg.qa_schedule_a),
            quantum.load_schedule_table(cfg.qa_schedule_b),
            cfg.qa_t_anneal,
        )
    return quantum.AnnealSchedule.linear(cfg.qa_t_anneal)


def _sa_schedule(cfg: ExperimentConfig) -> sa.SASchedule:
    return sa.SASchedule(cfg.sa_t_initial, cfg.sa_t_final, cfg.sa_sweeps, cfg.sa_interpolation)


def _engine_success(
    cfg: ExperimentConfig,
    problem: IsingProblem,
    memories: MemorySet,
    probe: ProbeSpec,
    nearest: int,
    seed: int,
) -> float:
    """Success probability of one engine run (oracle: exact 0/1)."""
    target = memories[nearest]
    if cfg.engine == "oracle":
        outcome = oracle.classify_recall(oracle.ground_set(problem), memories, probe)
        ok = outcome.classification == oracle.UNIQUE_MEMORY and outcome.memory_index == nearest
        return 1.0 if ok else 0.0
    if cfg.engine == "qa":
        result = quantum.evolve(problem, _qa_schedule(cfg), cfg.qa_steps)
        counts = quantum.sample(result, cfg.shots, seed)
        hit = counts.get(oracle.spins_to_index(target), 0)
        return hit / cfg.shots
    result = sa.sa_sample(problem, _sa_schedule(cfg), restarts=cfg.sa_restarts, seed=seed)
    key = oracle.spins_to_index(target)
    return result.counts.get(key, 0) / result.restarts


# command handlers ---------------------------------------------------------


def cmd_learn(cfg: ExperimentConfig, out: Path, plots: bool) -> int:
    memories = cfg.load_memories()
    weights = hebbian_learn(memories)
    header = ",".join(f"w_{j}" for j in range(memories.n))
    _write_csv(out / "weights.csv", header, weights)
    off = np.abs(weights[~np.eye(memories.n, dtype=bool)])
    _write_json(out / "learn.json", {
        "n": memories.n,
        "p": memories.p,
        "max_abs_coupling": float(off.max()),
        "min_abs_coupling": float(off.min()),
        "orthogonal": check_orthogonal(memories),
    })
    print(f"learned {memories.p} memories on N = {memories.n}; "
          f"|W| in [{off.min():g}, {off.max():g}]")
    return 0


def cmd_energy_report(cfg: ExperimentConfig, out: Path, plots: bool) -> int:
    memories = cfg.load_memories()
    probe = cfg.probe_spec(memories)
    report = energy_report(memories, probe, cfg.h_grid())
    report.to_csv(out / "energy_report.csv", header_lines=[_timestamp_line()])
    finite = report.h_max[np.isfinite(report.h_max)]
    payload = {
        "n": memories.n,
        "p": memories.p,
        "distances": [int(d) for d in report.distances],
        "h_max_per_memory": [float(b) for b in report.h_max],
        "h_max_overall_max": float(finite.max()) if finite.size else None,
        "h_max_overall_min": float(finite.min()) if finite.size else None,
    }
    if check_orthogonal(memories) and probe.full_mask and np.all(report.distances > 0):
        payload["h_max_closed_form"] = [float(b) for b in h_max_per_memory(memories, probe)]
    _write_json(out / "energy_report.json", payload)
    if plots:
        from .plots import plot_energy_report

        plot_energy_report(report, out / "energy_report.png")
    print(f"energy report over {report.h_values.size} field values; "
          f"overall h_max = {payload['h_max_overall_max']}")
    return 0


def cmd_recall(cfg: ExperimentConfig, out: Path, plots: bool) -> int:
    memories = cfg.load_memories()
    probe = cfg.probe_spec(memories)
    _check_engine_cap(cfg.engine, memories.n)
    weights = hebbian_learn(memories)
    problem = build_problem(weights, probe)
    nearest, dist = _nearest(memories, probe)
    payload = {
        "engine": cfg.engine,
        "h": probe.h,
        "n": memories.n,
        "p": memories.p,
        "probe": format_spin_string(probe.pattern),
        "distances": [int(d) for d in dist],
        "nearest_memory": nearest,
        "nearest_tied": int((dist == dist[nearest]).sum()) > 1,
    }
    if cfg.engine == "oracle":
        outcome = oracle.classify_recall(oracle.ground_set(problem), memories, probe)
        payload.update({
            "classification": outcome.classification,
            "memory_index": outcome.memory_index,
            "ground_energy": outcome.ground.energy,
            "ground_states": [format_spin_string(s) for s in outcome.ground.states],
        })
    elif cfg.engine == "qa":
        result = quantum.evolve(problem, _qa_schedule(cfg), cfg.qa_steps)
        counts = quantum.sample(result, cfg.shots, cfg.seed)
        rows = [(format_spin_string(oracle.index_to_spins(i, memories.n)), c)
                for i, c in sorted(counts.items())]
        _write_csv(out / "counts.csv", "state,count", rows)
        payload.update({
            "shots": cfg.shots,
            "success_probability": result.success_probability(memories[nearest]),
            "shot_fraction_nearest": counts.get(
                oracle.spins_to_index(memories[nearest]), 0) / cfg.shots,
            "modal_state": format_spin_string(result.modal_state()),
            "norm_drift": result.norm_drift,
        })
    else:
        result = sa.sa_sample(problem, _sa_schedule(cfg), restarts=cfg.sa_restarts, seed=cfg.seed)
        rows = [(format_spin_string(oracle.index_to_spins(i, memories.n)), c)
                for i, c in sorted(result.counts.items())]
        _write_csv(out / "counts.csv", "state,count", rows)
        payload.update({
            "restarts": result.restarts,
            "best_state": format_spin_string(result.best_state),
            "best_energy": result.best_energy,
            "restart_fraction_nearest": result.counts.get(
                oracle.spins_to_index(memories[nearest]), 0) / result.restarts,
        })
    _write_json(out / "recall.json", payload)
    summary = payload.get("classification") or payload.get("modal_state") \
        or payload.get("best_state")
    print(f"recall (engine={cfg.engine}, h={probe.h:g}): {summary}")
    return 0


def cmd_sweep_h(cfg: ExperimentConfig, out: Path, plots: bool) -> int:
    memories = cfg.load_memories()
    probe0 = cfg.probe_spec(memories, h=0.0)
    _check_engine_cap(cfg.engine, memories.n)
    weights = hebbian_learn(memories)
    nearest, _ = _nearest(memories, probe0)
    bound_max, bound_min = _overall_h_max(memories, probe0)
    rows = []
    successes = []
    grid = cfg.h_grid()
    for i, h in enumerate(grid):
        probe = probe0.with_h(float(h))
        problem = build_problem(weights, probe)
        success = _engine_success(cfg, problem, memories, probe, nearest, cfg.seed + i)
        if cfg.majority_vote:
            success = 1.0 if success > 0.5 else 0.0
        successes.append(success)
        rows.append((float(h), success, bound_max, bool(h < bound_max)))
    _write_csv(out / "sweep_h.csv", "h,success,h_max,allowed", rows)
    if plots:
        from .plots import plot_sweep

        plot_sweep(grid, successes, bound_max, out / "sweep_h.png", cfg.engine)
    print(f"sweep over {grid.size} field values (engine={cfg.engine}); "
          f"h_max max/min = {bound_max:g}/{bound_min:g}")
    return 0


def cmd_radius(cfg: ExperimentConfig, out: Path, plots: bool, n: int | None) -> int:
    if n is None:
        n = cfg.load_memories().n
    radius = attraction.radius_bound(n)
    _write_json(out / "radius.json", {"n": n, "radius": radius})
    print(f"guaranteed attraction radius for N = {n}: {radius}")
    return 0


def cmd_basin_verify(cfg: ExperimentConfig, out: Path, plots: bool, max_d: int | None) -> int:
    memories = cfg.load_memories()
    if max_d is None:
        max_d = attraction.radius_bound(memories.n)
    result = attraction.verify_basin_exhaustive(memories, h=None, max_d=max_d)
    result.failures_csv(out / "basin_failures.csv", header_lines=[_timestamp_line()])
    _write_json(out / "basin_verify.json", {
        "n": memories.n,
        "p": memories.p,
        "max_d": max_d,
        "probes_tested": result.probes_tested,
        "failures": len(result.failures),
        "ties_skipped": len(result.ties_skipped),
        "condition_skipped": result.condition_skipped,
        "no_valid_h": result.no_valid_h,
    })
    print(f"basin verification: {result.probes_tested} probes tested, "
          f"{len(result.failures)} failures, {len(result.ties_skipped)} ties skipped")
    return 0


def cmd_capacity(cfg: ExperimentConfig, out: Path, plots: bool) -> int:
    rows = []
    for n in range(2, cfg.capacity_n_max + 1, 2):
        for x in range(n // 2 + 1):
            exact, bound = capacity.p_star(n, x)
            rows.append((n, x, exact, bound, bool(exact >= bound)))
    _write_csv(out / "pstar_grid.csv", "N,x,exact,bound,ok", rows)
    f_values = np.linspace(0.0, 0.45, cfg.capacity_tradeoff_points)
    budget = [capacity.tradeoff(float(f)) for f in f_values]
    _write_csv(out / "tradeoff.csv", "f,budget",
               [(float(f), b) for f, b in zip(f_values, budget)])
    if plots:
        from .plots import plot_pstar_grid, plot_tradeoff

        plot_pstar_grid([r[:4] for r in rows], out / "pstar_grid.png")
        plot_tradeoff(f_values, budget, out / "tradeoff.png")
    violations = sum(1 for r in rows if not r[4])
    print(f"capacity grid: {len(rows)} (N, x) points, {violations} bound violations")
    if cfg.capacity_montecarlo:
        _run_montecarlo(cfg, out, plots)
    return 0


def _run_montecarlo(cfg: ExperimentConfig, out: Path, plots: bool):
    results = []
    for p in cfg.mc_p:
        results.append(capacity.monte_carlo_success(
            cfg.mc_n, p, cfg.mc_t_frac, cfg.mc_trials, cfg.mc_seed, engine=cfg.mc_engine,
            sa_schedule=_sa_schedule(cfg), sa_restarts=cfg.sa_restarts,
        ))
    rows = [(r.n, r.p, r.t_frac, r.trials, r.successes, r.success_rate,
             r.predicted_lower_bound, r.engine) for r in results]
    _write_csv(out / "montecarlo.csv",
               "N,p,t_frac,trials,successes,rate,predicted_bound,engine", rows)
    if plots:
        from .plots import plot_montecarlo

        plot_montecarlo(results, out / "montecarlo.png")
    for r in results:
        print(f"montecarlo N={r.n} p={r.p}: rate {r.success_rate:.4f} "
              f"vs bound {r.predicted_lower_bound:.4f}")
    return results


def cmd_montecarlo(cfg: ExperimentConfig, out: Path, plots: bool) -> int:
    _run_montecarlo(cfg, out, plots)
    return 0


def cmd_embed(cfg: ExperimentConfig, out: Path, plots: bool) -> int:
    problem = None
    if cfg.memories_path is not None:
        memories = cfg.load_memories()
        probe = cfg.probe_spec(memories)
        problem = build_problem(hebbian_learn(memories), probe)
        n_logical = memories.n
    elif cfg.embed_n_logical is not None:
        n_logical = cfg.embed_n_logical
    else:
        raise ConfigError("[embed] n_logical: required when no memory file is given")
    graph = chimera.chimera_graph(cfg.embed_m, cfg.embed_missing)
    chimera.save_graph(graph, out / "graph.txt")
    embedding = chimera.embed_clique(n_logical, graph)
    chimera.save_embedding(embedding, out / "embedding.txt")
    lengths = sorted(embedding.chain_lengths.values())
    payload = {
        "m": cfg.embed_m,
        "missing": len(graph.missing),
        "n_logical": n_logical,
        "n_physical": embedding.n_physical,
        "chain_length_min": lengths[0],
        "chain_length_max": lengths[-1],
    }
    if problem is not None:
        physical = chimera.embed_problem(problem, embedding)
        _save_problem(physical, out / "physical_problem.txt")
        payload["chain_strength"] = chimera.default_chain_strength(problem, embedding)
        if cfg.embed_solve:
            result = sa.sa_sample(physical, _sa_schedule(cfg),
                                  restarts=cfg.sa_restarts, seed=cfg.seed)
            decoded, broken = chimera.decode(result.best_state, embedding)
            payload["solve"] = {
                "best_physical_energy": result.best_energy,
                "decoded_state": format_spin_string(decoded),
                "broken_chains": broken,
                "decoded_logical_energy": problem.energy(decoded),
            }
    _write_json(out / "embed.json", payload)
    print(f"embedded {n_logical} logical qubits on {embedding.n_physical} physical "
          f"(chains {lengths[0]}..{lengths[-1]})")
    return 0


def _save_problem(problem: IsingProblem, path: Path) -> None:
    lines = [f"# ising n={problem.n}"]
    for i in range(problem.n):
        if problem.fields[i] != 0.0:
            lines.append(f"h {i} {problem.fields[i]!r}")
    for i in range(problem.n):
        for j in range(i + 1, problem.n):
            if problem.couplings[i, j] != 0.0:
                lines.append(f"J {i} {j} {problem.couplings[i, j]!r}")
    path.write_text("\n".join(lines) + "\n")


def cmd_qa_gap(cfg: ExperimentConfig, out: Path, plots: bool) -> int:
    memories = cfg.load_memories()
    probe = cfg.probe_spec(memories)
    problem = build_problem(hebbian_learn(memories), probe)
    schedule = _qa_schedule(cfg)
    s_values, gaps = quantum.gap_profile(problem, schedule, cfg.qa_gap_grid)
    i = int(np.argmin(gaps))
    gap, s_at = float(gaps[i]), float(s_values[i])
    _write_csv(out / "gap.csv", "s,gap", list(zip(s_values, gaps)))
    _write_json(out / "gap.json", {"min_gap": gap, "s_at_min": s_at,
                                   "grid_points": cfg.qa_gap_grid})
    if plots:
        from .plots import plot_gap

        plot_gap(s_values, gaps, out / "gap.png")
    print(f"minimum gap {gap:.6g} at s = {s_at:.4g}")
    return 0


# entry point ---------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="annealmem",
        description="Hopfield associative memories with recall by (simulated) quantum annealing",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help_, needs_config=True):
        p = sub.add_parser(name, help=help_)
        if needs_config:
            p.add_argument("-c", "--config", required=True, help="experiment config file (INI)")
        p.add_argument("--out", help="output directory (overrides [output] dir)")
        p.add_argument("--no-plot", action="store_true", help="skip figure rendering")
        return p

    add("learn", "learn Hebbian weights; writes weights.csv and learn.json")
    add("energy-report", "energy_report.csv: h,E_probe,E_mem_mu..,E_flip_mu.. plus figure")
    add("recall", "recall.json (and counts.csv for qa/sa engines)")
    add("sweep-h", "sweep_h.csv: h,success,h_max,allowed plus figure")
    p = add("radius", "radius.json: guaranteed attraction radius", needs_config=False)
    p.add_argument("-c", "--config", help="experiment config file (INI)")
    p.add_argument("--n", type=int, help="network size (otherwise taken from the memory file)")
    p = add("basin-verify", "basin_failures.csv: probe,d_s,d_b,h,classification plus summary")
    p.add_argument("--max-d", type=int, help="ball radius (default: the guaranteed radius)")
    add("capacity", "pstar_grid.csv: N,x,exact,bound,ok and tradeoff.csv: f,budget")
    add("montecarlo", "montecarlo.csv: N,p,t_frac,trials,successes,rate,predicted_bound,engine")
    add("embed", "embedding.txt, physical_problem.txt and embed.json")
    add("qa-gap", "gap.csv: s,gap plus gap.json and figure")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if getattr(args, "config", None):
            cfg = ExperimentConfig.from_file(args.config)
        elif args.command == "radius" and args.n is not None:
            cfg = ExperimentConfig()
        else:
            raise ConfigError("a config file is required (-c/--config)")
        out = _out_dir(cfg, args.out)
        plots = cfg.plots and not args.no_plot
        if args.command == "learn":
            return cmd_learn(cfg, out, plots)
        if args.command == "energy-report":
            return cmd_energy_report(cfg, out, plots)
        if args.command == "recall":
            return cmd_recall(cfg, out, plots)
        if args.command == "sweep-h":
            return cmd_sweep_h(cfg, out, plots)
        if args.command == "radius":
            return cmd_radius(cfg, out, plots, args.n)
        if args.command == "basin-verify":
            return cmd_basin_verify(cfg, out, plots, args.max_d)
        if args.command == "capacity":
            return cmd_capacity(cfg, out, plots)
        if args.command == "montecarlo":
            return cmd_montecarlo(cfg, out, plots)
        if args.command == "embed":
            return cmd_embed(cfg, out, plots)
        if args.command == "qa-gap":
            return cmd_qa_gap(cfg, out, plots)
        raise AssertionError(args.command)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except CapExceededError as exc:
        print(f"engine cap violation: {exc}", file=sys.stderr)
        return 3
    except chimera.EmbeddingError as exc:
        print(f"embedding failure: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
