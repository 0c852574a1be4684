"""Command-line front end: ``sdpath <command> ...``.

Exit codes: 0 success, 1 some targets have no descending path (or a path
failed verification), 2 bad input, 3 an internal invariant was violated.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from dataclasses import dataclass, field

import numpy as np

from . import generators
from .discretizer import compute_delta, discretize
from .errors import NoDescendingPathError, SDPError
from .geometry import Path
from .oracle import verify_descending
from .query import SOLVERS, Solver
from .serialize import dumps, format_float
from .terrain import Terrain, dump_terrain, geometry_params, load_terrain, validate

EXIT_OK, EXIT_INFEASIBLE, EXIT_INPUT, EXIT_INTERNAL = 0, 1, 2, 3


class InputError(Exception):
    pass


class InvariantError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    terrain: str | None = None
    gen: str | None = None
    epsilon: float = 1.0
    source: str | None = None
    targets: list = field(default_factory=list)
    solver: str = "dijkstra"
    edge_chords: bool = False
    seed: int = 0
    format: str = "json"
    out: str | None = None

    def check(self):
        if not 0 < self.epsilon <= 1:
            raise InputError(f"--epsilon must lie in (0, 1], got {self.epsilon}")
        if (self.terrain is None) == (self.gen is None):
            raise InputError("give exactly one of --terrain or --gen")


# ---------------------------------------------------------------------------
# argument helpers


def parse_gen(spec: str, seed: int = 0) -> Terrain:
    """``family`` or ``family:param`` (e.g. ``skinny:20``)."""
    family, _, param = spec.partition(":")
    try:
        value = float(param) if param else None
    except ValueError:
        raise InputError(f"bad generator parameter in {spec!r}") from None
    try:
        return generators.generate(family, value, seed)
    except ValueError as exc:
        raise InputError(str(exc)) from None


def read_terrain(cfg: RunConfig) -> Terrain:
    if cfg.gen is not None:
        t = parse_gen(cfg.gen, cfg.seed)
    else:
        fmt = cfg.format
        if cfg.terrain.endswith(".off"):
            fmt = "off"
        try:
            with open(cfg.terrain, "rb") as fh:
                t = load_terrain(fh, fmt)
        except OSError as exc:
            raise InputError(str(exc)) from None
        except (SDPError, ValueError, IndexError) as exc:
            raise InputError(f"{cfg.terrain}: {exc}") from None
    report = validate(t)
    if not report.ok:
        raise InputError(f"invalid terrain:\n{report}")
    return t


def parse_point_spec(spec: str, t: Terrain):
    """``v:ID`` / ``ID`` gives a vertex id; ``p:x,y`` or ``p:x,y,z`` a point
    (``z`` is read off the surface when omitted)."""
    s = spec.strip()
    if s.startswith("v:") or s.lstrip("-").isdigit():
        try:
            idx = int(s[2:] if s.startswith("v:") else s)
        except ValueError:
            raise InputError(f"bad vertex spec {spec!r}") from None
        if not 0 <= idx < t.n:
            raise InputError(f"vertex {idx} outside 0..{t.n - 1}")
        return idx
    if s.startswith("p:"):
        s = s[2:]
    try:
        xs = [float(c) for c in s.split(",")]
    except ValueError:
        raise InputError(f"bad point spec {spec!r}") from None
    if len(xs) == 2:
        try:
            xs.append(t.surface_z(*xs))
        except SDPError as exc:
            raise InputError(str(exc)) from None
    if len(xs) != 3:
        raise InputError(f"a point needs 2 or 3 coordinates, got {spec!r}")
    return np.array(xs)


def emit(text: str, out: str | None):
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)


def _solver_for(cfg: RunConfig, t: Terrain) -> Solver:
    src = cfg.source if cfg.source is not None else t.source
    if src is None:
        src = int(np.argmax(t.heights))
    elif isinstance(src, str):
        src = parse_point_spec(src, t)
    try:
        return Solver(t, cfg.epsilon, src, solver=cfg.solver, edge_chords=cfg.edge_chords)
    except SDPError as exc:
        raise InputError(str(exc)) from None


def _target_point(sol: Solver, target):
    if isinstance(target, (int, np.integer)):
        return sol.terrain.vertices[int(target)]
    return target


def _answer_targets(cfg: RunConfig, sol: Solver, t: Terrain):
    rows, infeasible = [], False
    for spec in cfg.targets:
        target = parse_point_spec(spec, t)
        point = _target_point(sol, target)
        entry = {"target": spec}
        try:
            ans = sol.query(point)
        except NoDescendingPathError as exc:
            entry.update(status="no-descending-path", detail=str(exc))
            infeasible = True
        except SDPError as exc:
            raise InputError(f"target {spec}: {exc}") from None
        else:
            report = verify_descending(sol.terrain, ans.path)
            if not report.ok:
                raise InvariantError(f"path to {spec} is not descending: {report}")
            entry.update(status="ok", **ans.to_json())
        rows.append(entry)
    return rows, infeasible


# ---------------------------------------------------------------------------
# commands


def cmd_info(cfg: RunConfig) -> int:
    t = read_terrain(cfg)
    p = geometry_params(t)
    d = discretize(t, cfg.epsilon, p)
    report = {
        "n": t.n,
        "edges": t.n_edges,
        "faces": t.n_faces,
        "L": p.L,
        "h": p.h,
        "theta": p.theta,
        "sec_theta": p.sec_theta,
        "X": p.X,
        "epsilon": cfg.epsilon,
        "delta": d.delta,
        "nodes": d.n_nodes,
        "bound_c": d.c,
        "bound_total": 3 * t.n * d.c,
    }
    emit(dumps(report) + "\n", cfg.out)
    return EXIT_OK


def cmd_gen(cfg: RunConfig) -> int:
    t = read_terrain(cfg)
    emit(dump_terrain(t, cfg.format), cfg.out)
    return EXIT_OK


def cmd_discretize(cfg: RunConfig) -> int:
    t = read_terrain(cfg)
    d = discretize(t, cfg.epsilon)
    s = d.summary()
    if d.n_nodes > 3 * t.n * d.c:
        raise InvariantError("node count exceeds the 3 n c bound")
    emit(dumps(s) + "\n", cfg.out)
    return EXIT_OK


def cmd_solve(cfg: RunConfig) -> int:
    t = read_terrain(cfg)
    sol = _solver_for(cfg, t)
    rows, infeasible = _answer_targets(cfg, sol, t)
    tree = sol.tree
    reach = np.isfinite(tree.dist)
    doc = {
        "epsilon": cfg.epsilon,
        "solver": cfg.solver,
        "edge_chords": cfg.edge_chords,
        "source": sol.source,
        "source_point": sol.terrain.vertices[sol.source].tolist(),
        "delta": sol.disc.delta,
        "nodes": sol.disc.n_nodes,
        "reachable_nodes": int(reach.sum()),
        "max_dist": float(tree.dist[reach].max()),
        "targets": rows,
    }
    emit(dumps(doc) + "\n", cfg.out)
    return EXIT_INFEASIBLE if infeasible else EXIT_OK


def cmd_query(cfg: RunConfig) -> int:
    t = read_terrain(cfg)
    sol = _solver_for(cfg, t)
    rows, infeasible = _answer_targets(cfg, sol, t)
    if len(rows) == 1 and rows[0]["status"] == "ok":
        doc = {k: rows[0][k] for k in ("points", "length", "terminal_kind", "last_hop")}
    else:
        doc = rows
    emit(dumps(doc) + "\n", cfg.out)
    return EXIT_INFEASIBLE if infeasible else EXIT_OK


def cmd_verify(cfg: RunConfig, path_file: str) -> int:
    t = read_terrain(cfg)
    try:
        with open(path_file, "r", encoding="utf-8") as fh:
            path = Path.from_json(json.load(fh))
    except (OSError, ValueError, KeyError) as exc:
        raise InputError(f"{path_file}: {exc}") from None
    report = verify_descending(t, path)
    doc = {"ok": report.ok, "violation": report.violation, "segment": report.segment,
           "length": path.length}
    emit(dumps(doc) + "\n", cfg.out)
    return EXIT_OK if report.ok else EXIT_INFEASIBLE


BENCH_FIELDS = ["terrain", "n", "X", "epsilon", "nodes", "settled", "preprocess_s",
                "node_query_s", "interior_query_s", "ratio"]


def cmd_bench(cfg: RunConfig, gens: list, epsilons: list) -> int:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(BENCH_FIELDS)
    specs = gens or [cfg.gen]
    eps = sorted(epsilons or [cfg.epsilon], reverse=True)
    for e in eps:
        if not 0 < e <= 1:
            raise InputError(f"epsilon must lie in (0, 1], got {e}")
    if cfg.targets:
        for spec in specs:
            c = RunConfig(cfg.command, terrain=cfg.terrain if spec is None else None, gen=spec,
                          seed=cfg.seed, format=cfg.format)
            t = read_terrain(c)
            runs = []
            for e in eps:
                c.epsilon, c.source, c.solver, c.edge_chords = e, cfg.source, cfg.solver, cfg.edge_chords
                t0 = time.perf_counter()
                sol = _solver_for(c, t)
                prep = time.perf_counter() - t0
                targets = [_target_point(sol, parse_point_spec(s, t)) for s in cfg.targets]
                node_t, int_t, lengths = [], [], []
                for target in targets:
                    t1 = time.perf_counter()
                    length = sol.length(target)
                    dt = time.perf_counter() - t1
                    kind = "node"
                    try:
                        kind = sol.query(target).terminal_kind
                    except NoDescendingPathError:
                        pass
                    (node_t if kind == "tree-node" else int_t).append(dt)
                    lengths.append(length)
                runs.append((e, sol, prep, node_t, int_t, np.array(lengths)))
            base = runs[-1][5]
            for e, sol, prep, node_t, int_t, lengths in runs:
                ok = np.isfinite(lengths) & np.isfinite(base) & (base > 0)
                ratio = float(np.mean(lengths[ok] / base[ok])) if ok.any() else float("nan")
                w.writerow([spec or cfg.terrain, sol.terrain.n, format_float(sol.params.X),
                            format_float(e), sol.disc.n_nodes, sol.tree.n_settled,
                            format_float(prep),
                            format_float(np.mean(node_t)) if node_t else "",
                            format_float(np.mean(int_t)) if int_t else "",
                            format_float(ratio)])
    emit(buf.getvalue(), cfg.out)
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    src = common.add_argument_group("terrain")
    src.add_argument("--terrain", help="terrain file (.json or .off)")
    src.add_argument("--gen", help="generator spec: family[:param], family in "
                     + ", ".join(generators.FAMILIES))
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--format", choices=["json", "off"], default="json")
    common.add_argument("--out", help="write output here instead of stdout")

    solve = argparse.ArgumentParser(add_help=False)
    solve.add_argument("--epsilon", type=float, default=1.0)
    solve.add_argument("--source", help="v:ID or p:x,y[,z] (default: terrain source or highest vertex)")
    solve.add_argument("--target", action="append", default=[], dest="targets",
                       help="v:ID or p:x,y[,z]; repeatable")
    solve.add_argument("--solver", choices=sorted(SOLVERS), default="dijkstra")
    solve.add_argument("--edge-chords", action="store_true",
                       help="also link consecutive nodes of one edge")

    parser = argparse.ArgumentParser(prog="sdpath",
                                     description="Approximate shortest descending paths on terrains.")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("info", parents=[common, solve], help="terrain parameters and node counts")
    g = sub.add_parser("gen", parents=[common], help="generate a terrain")
    g.add_argument("family", nargs="?", choices=generators.FAMILIES)
    g.add_argument("--param", type=float, help="family shape parameter (aspect, tilt, size, rings)")
    sub.add_parser("discretize", parents=[common, solve], help="Steiner placement report")
    sub.add_parser("solve", parents=[common, solve], help="solve from a source to targets")
    q = sub.add_parser("query", parents=[common, solve], help="answer one or more point queries")
    q.add_argument("point", nargs="?", help="x,y or x,y,z (same as --target p:...)")
    v = sub.add_parser("verify", parents=[common], help="check that a path is descending")
    v.add_argument("path", help="Path JSON: {\"points\": [[x,y,z], ...]}")
    b = sub.add_parser("bench", parents=[common, solve], help="timing/size CSV over an epsilon sweep")
    b.add_argument("--epsilons", type=float, nargs="+", help="epsilon sweep (finest is the baseline)")
    b.add_argument("--sweep", nargs="+", default=[], help="several generator specs")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    gen = args.gen
    if args.command == "gen" and args.family is not None:
        gen = args.family if args.param is None else f"{args.family}:{args.param!r}"
    cfg = RunConfig(
        command=args.command,
        terrain=args.terrain,
        gen=gen,
        epsilon=getattr(args, "epsilon", 1.0),
        source=getattr(args, "source", None),
        targets=list(getattr(args, "targets", [])),
        solver=getattr(args, "solver", "dijkstra"),
        edge_chords=getattr(args, "edge_chords", False),
        seed=args.seed,
        format=args.format,
        out=args.out,
    )
    if args.command == "query" and args.point:
        cfg.targets.insert(0, "p:" + args.point)
    try:
        if args.command == "bench" and args.sweep:
            if cfg.terrain is not None:
                raise InputError("--sweep replaces --terrain/--gen")
            cfg.gen = args.sweep[0]
        cfg.check()
        if args.command == "info":
            return cmd_info(cfg)
        if args.command == "gen":
            return cmd_gen(cfg)
        if args.command == "discretize":
            return cmd_discretize(cfg)
        if args.command == "solve":
            return cmd_solve(cfg)
        if args.command == "query":
            return cmd_query(cfg)
        if args.command == "verify":
            return cmd_verify(cfg, args.path)
        if args.command == "bench":
            return cmd_bench(cfg, args.sweep, args.epsilons)
    except InputError as exc:
        print(f"sdpath: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except InvariantError as exc:
        print(f"sdpath: internal invariant violated: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
