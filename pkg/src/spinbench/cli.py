"""Command-line orchestration.

Subcommands: gen, import, reduce, solve, bench, anneal-sim, report. Global
flags (--seed, --out, --format, --threads) precede the subcommand; all
randomness flows from --seed, and every output file embeds the format
version, the master seed, and a full parameter echo.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import instances as inst
from . import metrics, qa_sim, reduction, solvers
from .model import energy
from .rng import seed_sequence

__all__ = ["main"]


def _derive_int_seed(master: int, *path: int) -> int:
    return int(seed_sequence(master, *path).generate_state(1)[0])


def _echo(args: argparse.Namespace, skip=("func", "out")) -> dict:
    """Parameter echo embedded in outputs; the output path itself is omitted
    so reruns of one command are byte-identical wherever they are written."""
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


# ---------------------------------------------------------------------------
# gen
# ---------------------------------------------------------------------------

def cmd_gen(args) -> int:
    if args.out is None:
        print("gen requires --out", file=sys.stderr)
        return 1
    if args.family == "maxcut":
        graph = inst.gen_random_regular(args.nodes, args.degree, args.seed)
        name = inst.maxcut_name(args.nodes, args.degree, args.seed)
        meta = inst.InstanceMetadata(
            name=name,
            family="maxcut",
            source="generated",
            provenance={"generator": "gen_random_regular", "seed": args.seed},
            graph=graph,
        )
        problem = inst.maxcut_to_ising(graph)
        inst.save_instance(args.out, problem, meta)
        print(f"{name}: {graph.num_nodes} nodes, {graph.num_edges} edges -> {args.out}")
    elif args.family == "hoso":
        topo = inst.gen_heavy_hex(args.topology)
        problem, meta = inst.gen_hoso_instance(topo, args.seed, args.triple_rule)
        inst.save_instance(args.out, problem, meta)
        print(
            f"{meta.name}: {problem.num_spins} spins, {len(problem.linear)} linear, "
            f"{len(problem.quadratic)} quadratic, {len(problem.cubic)} cubic -> {args.out}"
        )
    else:  # planar-sg
        topo = inst.gen_heavy_hex(args.topology)
        problem = inst.gen_planar_spin_glass(topo, args.seed)
        meta = inst.InstanceMetadata(
            name=f"planar-sg-{topo.spec}-s{args.seed}",
            family="planar_sg",
            source="generated",
            provenance={
                "generator": "gen_planar_spin_glass",
                "seed": args.seed,
                "topology": topo.spec,
            },
        )
        inst.save_instance(args.out, problem, meta)
        print(
            f"{meta.name}: {problem.num_spins} spins, {len(problem.quadratic)} couplings "
            f"-> {args.out}"
        )
    return 0


# ---------------------------------------------------------------------------
# import
# ---------------------------------------------------------------------------

def cmd_import(args) -> int:
    try:
        problem, meta = inst.load_instance(args.instance)
    except (inst.InstanceFormatError, OSError) as exc:
        print(f"import failed: {exc}", file=sys.stderr)
        return 1
    if args.solve_opt and meta.opt_value is None:
        result = solvers.exact_ground(problem, limit=args.exact_limit)
        if meta.family == "maxcut":
            meta.opt_value = (meta.graph.total_weight - result.ground_energy) / 2.0
        else:
            meta.opt_value = result.ground_energy
    meta.source = "imported"
    print(
        f"{meta.name}: family={meta.family}, {problem.num_spins} spins, "
        f"{problem.num_terms} terms, opt_value={meta.opt_value}"
    )
    if args.out:
        inst.save_instance(args.out, problem, meta)
        print(f"normalized copy -> {args.out}")
    return 0


# ---------------------------------------------------------------------------
# reduce
# ---------------------------------------------------------------------------

def _gadget_set(choice: str, gadget_file: str | None) -> dict[float, reduction.GadgetSpec]:
    if gadget_file:
        return reduction.load_gadget_library(gadget_file)
    if choice == "baseline":
        return reduction.baseline_gadget_set()
    if choice == "better":
        return reduction.better_gadget_set(reduction.baseline_gadget_set())
    raise ValueError(f"unknown gadget set {choice!r}")


def cmd_reduce(args) -> int:
    if args.out is None:
        print("reduce requires --out", file=sys.stderr)
        return 1
    problem, meta = inst.load_instance(args.instance)
    gadgets = _gadget_set(args.gadgets, args.gadget_file)
    reduced, rmap = reduction.reduce_cubic(problem, gadgets)
    out_meta = inst.InstanceMetadata(
        name=f"{meta.name}-reduced-{args.gadgets}",
        family=meta.family,
        opt_value=(None if meta.opt_value is None else meta.opt_value + rmap.offset_shift),
        source=meta.source,
        provenance={
            **meta.provenance,
            "reduced_from": meta.name,
            "gadget_set": args.gadgets if not args.gadget_file else args.gadget_file,
            "aux_spins": len(rmap.aux_index),
            "offset_shift": rmap.offset_shift,
        },
    )
    inst.save_instance(args.out, reduced, out_meta)
    print(
        f"{meta.name}: {problem.num_spins} spins + {len(rmap.aux_index)} aux "
        f"-> {reduced.num_spins} variables, offset shift {rmap.offset_shift:+g} -> {args.out}"
    )
    return 0


# ---------------------------------------------------------------------------
# solve
# ---------------------------------------------------------------------------

def cmd_solve(args) -> int:
    problem, meta = inst.load_instance(args.instance)
    seed = args.seed
    if args.solver == "local":
        config = solvers.local_solver(problem, seed)
        best_energy = energy(problem, config)
    else:
        if args.solver == "sa":
            params = solvers.SamplerParams(
                reads=args.reads, sweeps=args.sweeps, seed=seed,
                parallel_copies=args.copies,
            )
            samples = solvers.simulated_anneal(problem, params)
        else:
            samples = solvers.random_sample(problem, args.reads * args.copies, seed)
        if args.postprocess:
            samples = solvers.postprocess_samples(
                problem, samples, _derive_int_seed(seed, 1), args.post_sweeps
            )
        best = samples.best
        config, best_energy = best.config, best.energy
    line = f"{meta.name}: best energy {best_energy:g}"
    if meta.family == "maxcut" and meta.graph is not None:
        line += f", cut {inst.cut_value(meta.graph, config):g}"
    print(line)
    if args.out:
        doc = {
            "format_version": 1,
            "seed": seed,
            "parameters": _echo(args),
            "instance": meta.name,
            "best_energy": best_energy,
            "best_config": [int(x) for x in config],
        }
        if meta.family == "maxcut" and meta.graph is not None:
            doc["best_cut"] = inst.cut_value(meta.graph, config)
        with open(args.out, "w", encoding="utf-8") as f:
            json.dump(doc, f, indent=1)
            f.write("\n")
    return 0


# ---------------------------------------------------------------------------
# bench
# ---------------------------------------------------------------------------

class BenchFailure(RuntimeError):
    pass


def _resolve_opt_energy(problem, meta, exact_limit: int):
    """Ground energy and natural-units optimum; never trusts the sampler."""
    if meta.opt_value is not None:
        if meta.family == "maxcut":
            return inst.maxcut_opt_energy(meta.graph, meta.opt_value), meta.opt_value
        return float(meta.opt_value), float(meta.opt_value)
    if problem.num_spins > exact_limit:
        raise BenchFailure(
            f"{meta.name}: no opt_value in metadata and n = {problem.num_spins} exceeds "
            f"the exact-enumeration limit {exact_limit}; refusing to guess an optimum"
        )
    ground = solvers.exact_ground(problem, limit=exact_limit).ground_energy
    if meta.family == "maxcut":
        return ground, (meta.graph.total_weight - ground) / 2.0
    return ground, ground


def _bench_one(path: str, index: int, args) -> metrics.BenchmarkRow:
    try:
        problem, meta = inst.load_instance(path)
    except (inst.InstanceFormatError, OSError) as exc:
        raise BenchFailure(f"{path}: {exc}") from exc
    opt_energy, opt_natural = _resolve_opt_energy(problem, meta, args.exact_limit)
    sampler_seed = _derive_int_seed(args.seed, index, 0)
    post_seed = _derive_int_seed(args.seed, index, 1)
    ci_seed = _derive_int_seed(args.seed, index, 2)
    if args.solver == "sa":
        params = solvers.SamplerParams(
            reads=args.reads, sweeps=args.sweeps, seed=sampler_seed,
            parallel_copies=args.copies, anneal_time_ms=args.anneal_time_ms,
        )
        samples = solvers.simulated_anneal(problem, params)
    elif args.solver == "random":
        samples = solvers.random_sample(problem, args.reads * args.copies, sampler_seed)
    else:  # local
        configs = np.stack([
            solvers.local_solver(problem, _derive_int_seed(sampler_seed, r))
            for r in range(args.reads)
        ])
        samples = solvers.SampleSet.from_configs(
            problem, configs, sampler="local_solver", seed=sampler_seed, reads=args.reads
        )
    t_samp = samples.meta.t_sample_ms
    if args.t_sample_ms is not None:
        t_samp = args.t_sample_ms
    if t_samp is None or t_samp <= 0:
        raise BenchFailure(
            f"{meta.name}: solver {args.solver!r} has no deterministic timing model; "
            "pass --t-sample-ms"
        )
    p_raw = metrics.estimate_pgs(samples, opt_energy, tol=args.tol)
    if args.postprocess:
        post = solvers.postprocess_samples(problem, samples, post_seed, args.post_sweeps)
        p_post = metrics.estimate_pgs(post, opt_energy, tol=args.tol)
        ci_lo, ci_hi = metrics.bootstrap_ci(post, opt_energy, seed=ci_seed, tol=args.tol)
    else:
        p_post = p_raw
        ci_lo, ci_hi = metrics.bootstrap_ci(samples, opt_energy, seed=ci_seed, tol=args.tol)
    return metrics.BenchmarkRow(
        instance=meta.name,
        family=meta.family,
        opt_value=opt_natural,
        p_gs_raw=p_raw,
        p_gs_post=p_post,
        t_sample_ms=t_samp,
        tts_raw_ms=metrics.tts(p_raw, t_samp),
        tts_post_ms=metrics.tts(p_post, t_samp),
        n_samples=samples.total_multiplicity,
        ci_low=ci_lo,
        ci_high=ci_hi,
    )


def cmd_bench(args) -> int:
    jobs = list(enumerate(args.instances))
    results: dict[int, metrics.BenchmarkRow] = {}
    failures: list[str] = []

    def run(job):
        index, path = job
        try:
            return index, _bench_one(path, index, args), None
        except BenchFailure as exc:
            return index, None, str(exc)
        except Exception as exc:  # keep other instances running
            return index, None, f"{path}: {type(exc).__name__}: {exc}"

    if args.threads > 1:
        with ThreadPoolExecutor(max_workers=args.threads) as pool:
            outcomes = list(pool.map(run, jobs))
    else:
        outcomes = [run(job) for job in jobs]
    for index, row, failure in outcomes:
        if failure is None:
            results[index] = row
        else:
            failures.append(failure)

    rows = [results[i] for i in sorted(results)]
    for row in rows:
        print(
            f"{row.instance}: opt={row.opt_value:g} p_raw={row.p_gs_raw:.4g} "
            f"p_post={row.p_gs_post:.4g} t_sample={row.t_sample_ms:g}ms "
            f"tts_post={metrics.render_cell(row.tts_post_ms)}ms"
        )
    if args.out:
        _write_rows_output(args, rows)
    for msg in failures:
        print(f"bench failure: {msg}", file=sys.stderr)
    return 1 if failures else 0


def _write_rows_output(args, rows):
    params = _echo(args)
    if args.format == "rows":
        comment = json.dumps({"format_version": 1, "seed": args.seed, "parameters": params})
        metrics.write_report_rows(args.out, rows, header_comment=comment)
    else:
        metrics.write_report_structured(args.out, rows, seed=args.seed, parameters=params)
    print(f"report -> {args.out}")


# ---------------------------------------------------------------------------
# anneal-sim
# ---------------------------------------------------------------------------

def _time_grid(args) -> list[float]:
    if args.times:
        return [float(x) for x in args.times.split(",")]
    if args.points < 1:
        raise ValueError("need at least one grid point")
    return list(np.geomspace(args.tmin, args.tmax, args.points))


def cmd_anneal_sim(args) -> int:
    problem, meta = inst.load_instance(args.instance)
    if problem.num_spins > qa_sim.MAX_SIM_SPINS:
        print(
            f"anneal-sim failure: {meta.name} has {problem.num_spins} spins "
            f"> simulator limit {qa_sim.MAX_SIM_SPINS}",
            file=sys.stderr,
        )
        return 1
    ground = solvers.exact_ground(problem).ground_energy
    rows = qa_sim.anneal_sweep(
        problem,
        _time_grid(args),
        ground_energy=ground,
        shots=args.shots,
        seed=args.seed,
        slices_per_unit=args.slices_per_unit,
    )
    for r in rows:
        print(
            f"t={r.total_time:g} slices={r.slices} t_hw={r.digitized_time_us:g}us "
            f"residual={r.residual_energy:.6g} p_gs={r.p_gs:.4g}"
        )
    if args.out:
        header = ("total_time", "slices", "digitized_time_us", "residual_energy", "p_gs")
        params = _echo(args)
        if args.format == "rows":
            with open(args.out, "w", encoding="utf-8", newline="") as f:
                f.write("# " + json.dumps(
                    {"format_version": 1, "seed": args.seed, "parameters": params}) + "\n")
                writer = csv.writer(f)
                writer.writerow(header)
                for r in rows:
                    writer.writerow([
                        r.total_time, r.slices, r.digitized_time_us,
                        r.residual_energy, r.p_gs,
                    ])
        else:
            doc = {
                "format_version": 1,
                "seed": args.seed,
                "parameters": params,
                "instance": meta.name,
                "ground_energy": ground,
                "rows": [vars(r) for r in rows],
            }
            with open(args.out, "w", encoding="utf-8") as f:
                json.dump(doc, f, indent=1)
                f.write("\n")
        print(f"sweep -> {args.out}")
    return 0


# ---------------------------------------------------------------------------
# report
# ---------------------------------------------------------------------------

def cmd_report(args) -> int:
    with open(args.report, "r", encoding="utf-8") as f:
        doc = json.load(f)
    if doc.get("format_version") != 1 or "rows" not in doc:
        print(f"not a structured report: {args.report}", file=sys.stderr)
        return 1
    if args.out is None:
        for row in doc["rows"]:
            print(",".join(metrics.render_cell(row[c]) for c in doc["columns"]))
        return 0
    if args.format == "structured":
        with open(args.out, "w", encoding="utf-8") as f:
            json.dump(doc, f, indent=1)
            f.write("\n")
    else:
        with open(args.out, "w", encoding="utf-8", newline="") as f:
            f.write("# " + json.dumps(
                {"format_version": 1, "seed": doc.get("seed"),
                 "parameters": doc.get("parameters", {})}) + "\n")
            writer = csv.writer(f)
            writer.writerow(doc["columns"])
            for row in doc["rows"]:
                writer.writerow([metrics.render_cell(row[c]) for c in doc["columns"]])
    print(f"report -> {args.out}")
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spinbench",
        description="Ising/HUBO benchmarking: instances, order reduction, sampling, metrics.",
    )
    parser.add_argument("--seed", type=int, default=0, help="master seed; all randomness derives from it")
    parser.add_argument("--out", type=str, default=None, help="output path")
    parser.add_argument("--format", choices=("rows", "structured"), default="rows")
    parser.add_argument("--threads", type=int, default=1, help="instance-level parallelism for bench")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate an instance file")
    gsub = p.add_subparsers(dest="family", required=True)
    g = gsub.add_parser("maxcut")
    g.add_argument("--nodes", type=int, required=True)
    g.add_argument("--degree", type=int, default=3)
    g.set_defaults(func=cmd_gen)
    g = gsub.add_parser("hoso")
    g.add_argument("--topology", type=str, default="eagle127")
    g.add_argument("--triple-rule", dest="triple_rule", type=str, default="paths2")
    g.set_defaults(func=cmd_gen)
    g = gsub.add_parser("planar-sg")
    g.add_argument("--topology", type=str, default="heron133")
    g.set_defaults(func=cmd_gen)

    p = sub.add_parser("import", help="validate (and normalize) an instance file")
    p.add_argument("instance")
    p.add_argument("--solve-opt", dest="solve_opt", action="store_true",
                   help="fill opt_value by exact enumeration when feasible")
    p.add_argument("--exact-limit", dest="exact_limit", type=int, default=32)
    p.set_defaults(func=cmd_import)

    p = sub.add_parser("reduce", help="order-reduce cubic terms via gadgets")
    p.add_argument("instance")
    p.add_argument("--gadgets", choices=("baseline", "better"), default="better")
    p.add_argument("--gadget-file", dest="gadget_file", type=str, default=None,
                   help="imported gadget library (overrides --gadgets)")
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("solve", help="run one solver on one instance")
    p.add_argument("instance")
    p.add_argument("--solver", choices=("local", "sa", "random"), default="local")
    p.add_argument("--reads", type=int, default=500)
    p.add_argument("--sweeps", type=int, default=64)
    p.add_argument("--copies", type=int, default=1)
    p.add_argument("--postprocess", action="store_true")
    p.add_argument("--post-sweeps", dest="post_sweeps", type=int, default=5)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("bench", help="benchmark instances and emit a report")
    p.add_argument("instances", nargs="+")
    p.add_argument("--solver", choices=("sa", "random", "local"), default="sa")
    p.add_argument("--reads", type=int, default=500)
    p.add_argument("--sweeps", type=int, default=64)
    p.add_argument("--copies", type=int, default=1)
    p.add_argument("--anneal-time-ms", dest="anneal_time_ms", type=float, default=1.0)
    p.add_argument("--no-postprocess", dest="postprocess", action="store_false")
    p.add_argument("--post-sweeps", dest="post_sweeps", type=int, default=5)
    p.add_argument("--t-sample-ms", dest="t_sample_ms", type=float, default=None,
                   help="override the per-sample time (required for solvers without a timing model)")
    p.add_argument("--exact-limit", dest="exact_limit", type=int, default=32)
    p.add_argument("--tol", type=float, default=1e-9)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("anneal-sim", help="residual-energy-vs-time sweep of the digitized anneal")
    p.add_argument("instance")
    p.add_argument("--times", type=str, default=None, help="comma-separated total times")
    p.add_argument("--tmin", type=float, default=0.25)
    p.add_argument("--tmax", type=float, default=32.0)
    p.add_argument("--points", type=int, default=8)
    p.add_argument("--shots", type=int, default=4096)
    p.add_argument("--slices-per-unit", dest="slices_per_unit", type=float, default=4.0)
    p.set_defaults(func=cmd_anneal_sim)

    p = sub.add_parser("report", help="convert a structured report")
    p.add_argument("report")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
