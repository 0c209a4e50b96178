"""Command-line front end.

Exit codes: 0 success, 1 invalid input, 2 numerical failure, 3 I/O error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np
import scipy.io

from . import __version__, cases, io
from .graph import Graph, cayley_tree, erdos_renyi, glued_binary_tree, line_graph, random_glued_binary_tree
from .linalg import DEFAULT_TOL, ConvergenceError, default_dense_limit
from .operators import dephasing_set, generator_matrix, hamiltonian, lindblad_set, pagerank_lindblad_set
from .walk import (
    ClassicalPropagator,
    QuantumPropagator,
    Superoperator,
    WalkResult,
    maximally_mixed,
    pure_state,
    walk_series,
)

logger = logging.getLogger("stochwalk")

EXIT_OK, EXIT_INVALID, EXIT_NUMERICAL, EXIT_IO = 0, 1, 2, 3


class UsageError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _ints(text: str, count: int, name: str) -> list[int]:
    try:
        vals = [int(x) for x in text.split(",")]
    except ValueError:
        raise UsageError(f"{name} expects {count} integer parameter(s), got {text!r}") from None
    if len(vals) != count:
        raise UsageError(f"{name} expects {count} integer parameter(s), got {text!r}")
    return vals


GENERATORS = ("line", "cayley", "glued", "rglued", "er")


def generate_graph(spec: str, seed: int | None = None) -> Graph:
    """Graph from ``line:N``, ``cayley:d,n``, ``glued:n``, ``rglued:n`` or ``er:N,M``."""
    name, sep, params = spec.partition(":")
    if not sep or name not in GENERATORS:
        raise UsageError(f"unknown graph generator {spec!r}; expected one of {', '.join(GENERATORS)}")
    seed = 0 if seed is None else seed
    if name == "line":
        return line_graph(*_ints(params, 1, name))
    if name == "cayley":
        return cayley_tree(*_ints(params, 2, name))
    if name == "glued":
        return glued_binary_tree(*_ints(params, 1, name))
    if name == "rglued":
        return random_glued_binary_tree(*_ints(params, 1, name), seed=seed)
    n, m = _ints(params, 2, name)
    return erdos_renyi(n, m, seed=seed)


def build_graph(spec: str, seed: int | None = None) -> Graph:
    """Generator spec or a file path; ``.mtx`` files are read as Matrix Market, others as edge lists."""
    path = Path(spec)
    if ":" in spec and (spec.partition(":")[0] in GENERATORS or not path.exists()):
        return generate_graph(spec, seed)
    if path.suffix.lower() == ".mtx":
        return io.read_matrix_market(path)
    return io.read_edge_list(path)


def _lindblads(kind: str, g: Graph, gamma: float, alpha: float | None):
    if kind == "canonical":
        return lindblad_set(generator_matrix(g, gamma))
    if kind == "dephasing":
        return dephasing_set(g.n)
    if kind == "google":
        return pagerank_lindblad_set(g, alpha, gamma)
    m = scipy.io.mmread(kind)
    if m.shape != (g.n, g.n):
        raise UsageError(f"Lindblad matrix {kind} is {m.shape[0]}x{m.shape[1]}, graph has {g.n} vertices")
    return lindblad_set(m)


def _initial(kind: str, n: int, init: str):
    if init == "uniform":
        vertex = None
    else:
        try:
            vertex = int(init)
        except ValueError:
            raise UsageError(f"--init must be a vertex number or 'uniform', got {init!r}") from None
        if not 1 <= vertex <= n:
            raise UsageError(f"--init vertex {vertex} outside 1..{n}")
    if kind == "qsw":
        return maximally_mixed(n) if vertex is None else pure_state(n, vertex)
    if kind == "qw":
        if vertex is None:
            return np.full(n, 1.0 / np.sqrt(n), dtype=complex)
        psi = np.zeros(n, dtype=complex)
        psi[vertex - 1] = 1.0
        return psi
    if vertex is None:
        return np.full(n, 1.0 / n)
    p = np.zeros(n)
    p[vertex - 1] = 1.0
    return p


def _time_grid(t: float, dt: float | None, steps: int | None) -> tuple[float, int]:
    if t < 0:
        raise UsageError("--t must be nonnegative")
    if dt is not None and dt <= 0:
        raise UsageError("--dt must be positive")
    if steps is not None and steps < 1:
        raise UsageError("--steps must be >= 1")
    if steps is None:
        steps = max(1, round(t / dt)) if dt is not None and t > 0 else 1
    if dt is None:
        dt = t / steps
    return dt, steps


def _series(propagator, state0, dt: float, steps: int, tol: float) -> WalkResult:
    if dt == 0:
        pops = np.array([propagator.populations(state0)] * (steps + 1))
        return WalkResult(np.zeros(steps + 1), [state0] * (steps + 1), pops)
    return walk_series(propagator, state0, dt, steps, tol)


def cmd_walk(args) -> int:
    if args.kind == "qsw":
        if args.omega is None:
            raise UsageError("--omega is required for --kind qsw")
        if not 0.0 <= args.omega <= 1.0:
            raise UsageError(f"--omega must lie in [0, 1], got {args.omega}")
    elif args.omega is not None:
        raise UsageError("--omega only applies to --kind qsw")
    if args.lindblad == "google":
        if args.alpha is None:
            raise UsageError("--alpha is required for --lindblad google")
    elif args.alpha is not None:
        raise UsageError("--alpha only applies to --lindblad google")
    if args.gamma <= 0:
        raise UsageError("--gamma must be positive")
    if args.density and args.kind != "qsw":
        raise UsageError("--density only applies to --kind qsw")

    g = build_graph(args.graph, args.seed)
    dt, steps = _time_grid(args.t, args.dt, args.steps)
    state0 = _initial(args.kind, g.n, args.init)
    if args.kind == "crw":
        propagator = ClassicalPropagator(generator_matrix(g, args.gamma))
    elif args.kind == "qw":
        propagator = QuantumPropagator(hamiltonian(g, args.gamma))
    else:
        lk = _lindblads(args.lindblad, g, args.gamma, args.alpha)
        propagator = Superoperator(hamiltonian(g, args.gamma), lk, args.omega)
    result = _series(propagator, state0, dt, steps, args.tol)

    meta = {
        "tool": "stochwalk",
        "version": __version__,
        "kind": args.kind,
        "graph": args.graph,
        "n": g.n,
        "gamma": args.gamma,
        "omega": args.omega,
        "alpha": args.alpha,
        "lindblad": args.lindblad if args.kind == "qsw" else None,
        "t": args.t,
        "dt": dt,
        "steps": steps,
        "tol": args.tol,
        "seed": args.seed,
        "init": args.init,
        "dense_limit": default_dense_limit(),
    }
    out = Path(args.out)
    io.write_populations(result, out, meta)
    if args.density:
        io.write_density_matrix(result.states[-1], out.with_name(out.stem + "_rho.csv"))
    return EXIT_OK


def _fmt_omega(w: float) -> str:
    return format(w, "g")


def cmd_example(args) -> int:
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    base = {"tool": "stochwalk", "version": __version__, "example": args.name, "tol": args.tol}

    if args.name in ("line", "dephasing"):
        d = cases.LINE_DEFAULTS
        omegas = args.omega if args.omega else list(d["omegas"])
        gamma = d["gamma"] if args.gamma is None else args.gamma
        t = d["t"] if args.t is None else args.t
        steps = d["steps"] if args.steps is None else args.steps
        n = d["n"]
        init = (n + 1) // 2
        lindblad = "canonical" if args.name == "line" else "dephasing"
        results = cases.run_line(omegas, n, gamma, t, steps, init, lindblad, args.tol, args.jobs)
        long_rows = ["omega,t,vertex,population"]
        for omega, res in results.items():
            meta = dict(base, graph=f"line:{n}", kind="qsw", lindblad=lindblad, n=n, gamma=gamma,
                        omega=omega, t=t, dt=t / steps, steps=steps, init=init)
            io.write_populations(res, out_dir / f"{args.name}_omega{_fmt_omega(omega)}.csv", meta)
            for time, row in zip(res.times, res.populations):
                long_rows += [
                    f"{io._fmt(omega)},{io._fmt(time)},{v},{io._fmt(p)}" for v, p in enumerate(row, start=1)
                ]
        io.atomic_write(out_dir / f"{args.name}_sweep.csv", "\n".join(long_rows) + "\n")
        return EXIT_OK

    if args.name == "fmo":
        d = cases.FMO_DEFAULTS
        params = {
            "gamma": d["gamma"] if args.gamma is None else args.gamma,
            "omega": d["omega"] if not args.omega else _single(args.omega),
            "alpha": d["alpha"] if args.alpha is None else args.alpha,
            "t": d["t"] if args.t is None else args.t,
            "steps": d["steps"] if args.steps is None else args.steps,
            "init": d["init"],
        }
        res = cases.run_fmo(**params, tol=args.tol)
        meta = dict(base, graph="fmo", kind="qsw", lindblad="canonical+sink", n=cases.FMO_SINK,
                    dt=params["t"] / params["steps"], energy_unit="cm^-1",
                    time_unit_ps=cases.FMO_TIME_UNIT_PS, **params)
        io.write_populations(res, out_dir / "fmo.csv", meta)
        return EXIT_OK

    d = cases.PAGERANK_DEFAULTS
    params = {
        "gamma": d["gamma"] if args.gamma is None else args.gamma,
        "omega": d["omega"] if not args.omega else _single(args.omega),
        "alpha": d["alpha"] if args.alpha is None else args.alpha,
        "t": d["t"] if args.t is None else args.t,
    }
    classical, quantum = cases.run_pagerank(tol=args.tol, **params)
    rows = ["vertex,classical,quantum"]
    rows += [f"{v},{io._fmt(c)},{io._fmt(q)}" for v, (c, q) in enumerate(zip(classical, quantum), start=1)]
    io.atomic_write(out_dir / "pagerank.csv", "\n".join(rows) + "\n")
    meta = dict(base, graph="bundled:pagerank_graph.txt (reconstruction)", kind="qsw", lindblad="google",
                init="uniform", n=len(classical), **params)
    io.write_metadata(meta, out_dir / "pagerank.json")
    return EXIT_OK


def _single(values: list[float]) -> float:
    if len(values) != 1:
        raise UsageError("this example takes a single --omega value")
    w = values[0]
    if not 0.0 <= w <= 1.0:
        raise UsageError(f"--omega must lie in [0, 1], got {w}")
    return w


def cmd_graph_gen(args) -> int:
    g = generate_graph(args.spec, args.seed)
    text = io.format_edge_list(g)
    if args.out:
        io.atomic_write(args.out, text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def make_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="stochwalk", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    walk = sub.add_parser("walk", help="propagate a CRW, QW or QSW on a graph")
    walk.add_argument("--kind", choices=("crw", "qw", "qsw"), required=True)
    walk.add_argument("--graph", required=True, help="generator spec (line:N, cayley:d,n, glued:n, rglued:n, er:N,M) or file")
    walk.add_argument("--gamma", type=float, default=1.0)
    walk.add_argument("--omega", type=float)
    walk.add_argument("--alpha", type=float, help="Google-matrix damping (with --lindblad google)")
    walk.add_argument("--lindblad", default="canonical",
                      help="canonical, dephasing, google, or a Matrix Market file")
    walk.add_argument("--t", type=float, required=True)
    walk.add_argument("--dt", type=float)
    walk.add_argument("--steps", type=int)
    walk.add_argument("--tol", type=float, default=DEFAULT_TOL)
    walk.add_argument("--seed", type=int)
    walk.add_argument("--init", default="1", help="1-based start vertex or 'uniform'")
    walk.add_argument("--out", default="walk.csv")
    walk.add_argument("--density", action="store_true", help="also write the final density matrix")
    walk.set_defaults(func=cmd_walk)

    ex = sub.add_parser("example", help="run one of the bundled case studies")
    ex.add_argument("name", choices=("line", "dephasing", "fmo", "pagerank"))
    ex.add_argument("--omega", type=float, action="append")
    ex.add_argument("--gamma", type=float)
    ex.add_argument("--alpha", type=float)
    ex.add_argument("--t", type=float)
    ex.add_argument("--steps", type=int)
    ex.add_argument("--tol", type=float, default=DEFAULT_TOL)
    ex.add_argument("--jobs", type=int, default=1, help="concurrent omega-sweep members")
    ex.add_argument("--out-dir", default=".")
    ex.set_defaults(func=cmd_example)

    graph = sub.add_parser("graph", help="graph utilities")
    gsub = graph.add_subparsers(dest="graph_command", required=True, parser_class=_Parser)
    gen = gsub.add_parser("gen", help="write a generated graph as an edge list")
    gen.add_argument("spec", help="line:N, cayley:d,n, glued:n, rglued:n or er:N,M")
    gen.add_argument("--seed", type=int)
    gen.add_argument("--out")
    gen.set_defaults(func=cmd_graph_gen)
    return parser


def main(argv=None) -> int:
    try:
        args = make_parser().parse_args(argv)
    except UsageError as exc:
        print(f"stochwalk: error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ConvergenceError, FloatingPointError, np.linalg.LinAlgError) as exc:
        print(f"stochwalk: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ValueError as exc:
        print(f"stochwalk: error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"stochwalk: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
