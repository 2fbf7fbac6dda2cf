"""Command-line interface.

Exit codes: 0 success, 1 an enabled audit failed, 2 usage error, 3 I/O
error, 4 parse error, 5 solver failure, 6 instance above an exhaustive cap.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from contextlib import nullcontext

import numpy as np

from . import __version__
from .decompose import DecompositionError, compute_scales
from .graph import (
    Graph,
    GraphParseError,
    cutwidth_cost,
    mla_cost,
    parse_graph,
    path_decomposition_from_ordering,
    validate_path_decomposition,
    vs_cost,
)
from .layout import SolveConfig, approximation_factor, jsonl_trace, mla_guarantee_check, solve_cutwidth, solve_pathwidth
from .lp import LPError, solve_mla_lp, solve_vs_lp
from .oracle import FAMILIES, ScaleCapError, cstar_estimate, exact_cutwidth, exact_mla, exact_vs, lpcw_lower_bound, random_graph

SCHEMA = 1
AUDIT_AUTO_MAX_N = 256

EXIT_OK, EXIT_AUDIT, EXIT_USAGE, EXIT_IO, EXIT_PARSE, EXIT_SOLVER, EXIT_CAP = range(7)


class CLIError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _read_graph(path: str) -> Graph:
    try:
        if path == "-":
            text = sys.stdin.read()
        else:
            with open(path, "rb") as fh:
                text = fh.read()
    except OSError as exc:
        raise CLIError(EXIT_IO, f"cannot read {path}: {exc.strerror or exc}") from None
    try:
        return parse_graph(text)
    except GraphParseError as exc:
        raise CLIError(EXIT_PARSE, f"{path}: {exc}") from None


def _params_json(n: int, gamma):
    if n < 2:
        return None
    p = compute_scales(n, gamma)
    return {"gamma": p.gamma, "ell": p.ell, "beta": p.beta}


def _input_json(G: Graph) -> dict:
    return {"n": G.n, "m": G.m, "total_weight": G.total_weight}


def _config(args, G: Graph) -> SolveConfig:
    audit = args.audit if args.audit is not None else G.n <= AUDIT_AUTO_MAX_N
    return SolveConfig(
        seed=args.seed, gamma_override=args.gamma, audit=audit,
        reuse_metric=getattr(args, "reuse_metric", False), lp_backend=args.backend,
    )


def _trace_sink(args):
    if not getattr(args, "trace", None):
        return nullcontext(None)
    try:
        fh = open(args.trace, "w")
    except OSError as exc:
        raise CLIError(EXIT_IO, f"cannot write trace {args.trace}: {exc.strerror or exc}") from None

    class _Sink:
        def __enter__(self):
            return jsonl_trace(fh)

        def __exit__(self, *exc):
            fh.close()

    return _Sink()


def _base_report(command: str, args, G: Graph) -> dict:
    return {
        "schema": SCHEMA,
        "command": command,
        "seed": args.seed,
        "input": _input_json(G),
        "params": _params_json(G.n, args.gamma),
    }


def _audit_json(cfg: SolveConfig, res) -> dict:
    if not cfg.audit:
        return {"enabled": False, "ok": None}
    return {"enabled": True, "ok": res.audit_ok, "max_ratio": res.max_audit_ratio}


def cmd_cutwidth(args, command: str = "cutwidth") -> dict:
    G = _read_graph(args.graph)
    cfg = _config(args, G)
    with _trace_sink(args) as trace:
        res = solve_cutwidth(G, cfg, trace)
    pi = res.ordering
    rep = _base_report(command, args, G)
    Lstar = res.root_objective
    check = mla_guarantee_check(G, pi, Lstar, args.gamma)
    rep.update(
        ordering=pi.positions_1based(),
        sequence=pi.sequence,
        costs={"cutwidth": cutwidth_cost(G, pi), "mla": mla_cost(G, pi)},
        lower_bounds={"mla_lp": Lstar, "cutwidth_from_mla_lp": Lstar / G.n if G.n else 0.0},
        guarantee={"factor": approximation_factor(G.n, args.gamma), "mla_ok": check.ok, "mla_bound": check.bound},
        audit=_audit_json(cfg, res),
        retries=res.retries,
    )
    return rep


def cmd_mla(args) -> dict:
    return cmd_cutwidth(args, "mla")


def cmd_pathwidth(args) -> dict:
    G = _read_graph(args.graph)
    cfg = _config(args, G)
    with _trace_sink(args) as trace:
        res = solve_pathwidth(G, cfg, trace)
    pi = res.ordering
    pd = path_decomposition_from_ordering(G, pi)
    rep = _base_report("pathwidth", args, G)
    val = validate_path_decomposition(G, pd)
    rep.update(
        ordering=pi.positions_1based(),
        sequence=pi.sequence,
        costs={"vs": vs_cost(G, pi), "pathwidth": pd.width},
        bags=[sorted(b) for b in pd.bags],
        lower_bounds={"vs_lp": res.root_objective, "vs_from_vs_lp": res.root_objective / G.n if G.n else 0.0},
        validation={"ok": val.ok, "condition": val.condition, "message": val.message},
        audit=_audit_json(cfg, res),
        retries=res.retries,
    )
    if not val.ok:
        raise CLIError(EXIT_AUDIT, f"path decomposition invalid: {val.message}")
    return rep


_EXACT = {"cw": (exact_cutwidth, cutwidth_cost), "vs": (exact_vs, vs_cost), "mla": (exact_mla, mla_cost)}


def cmd_exact(args) -> dict:
    G = _read_graph(args.graph)
    solver, cost = _EXACT[args.objective]
    res = solver(G, cap=args.exact_cap)
    rep = _base_report("exact", args, G)
    rep.update(
        objective=args.objective,
        value=res.value,
        ordering=res.ordering.positions_1based(),
        sequence=res.ordering.sequence,
        recomputed=cost(G, res.ordering),
    )
    return rep


def cmd_lowerbound(args) -> dict:
    G = _read_graph(args.graph)
    rep = _base_report("lowerbound", args, G)
    rep["which"] = args.which
    n = max(G.n, 1)
    if args.which == "mla-lp":
        sol = solve_mla_lp(G, backend=args.backend)
        rep.update(value=sol.objective, Lstar=sol.objective, cutwidth_bound=sol.objective / n)
    elif args.which == "vs-lp":
        sol = solve_vs_lp(G, backend=args.backend)
        rep.update(value=sol.objective / n, Pstar=sol.objective, x=sol.x.tolist())
    elif args.which == "lpcw":
        sol = lpcw_lower_bound(G, backend=args.backend)
        rep.update(value=sol.C, Cstarstar=sol.C)
    else:
        val, S = cstar_estimate(G, seed=args.seed, backend=args.backend)
        rep.update(value=val, Cstar_estimate=val, argmax_subset=list(S))
    return rep


def _ratio(value, ref):
    """``value / ref``; 1 when both vanish, ``None`` when undefined."""
    if ref is None:
        return None
    if ref > 0:
        return value / ref
    return 1.0 if value == 0 else None


def _bench_row(family, n, seed, args) -> dict:
    row = {"schema": SCHEMA, "family": family, "n": n, "seed": seed, "objective": args.objective}
    try:
        m = None
        if family == "gnm":
            m = min(n * (n - 1) // 2, int(round(args.density * n)))
        G = random_graph(n, family, m=m, p=args.p, seed=seed)
        row["m"] = G.m
        cfg = SolveConfig(seed=seed, gamma_override=args.gamma, audit=True, lp_backend=args.backend)
        if args.objective == "vs":
            res = solve_pathwidth(G, cfg)
            value = vs_cost(G, res.ordering)
            lb = res.root_objective / n if n else 0.0
            exact = exact_vs(G).value if n <= args.exact_cap else None
        else:
            res = solve_cutwidth(G, cfg)
            if args.objective == "cw":
                value = cutwidth_cost(G, res.ordering)
                lb = res.root_objective / n if n else 0.0
                exact = exact_cutwidth(G).value if n <= args.exact_cap else None
            else:
                value = mla_cost(G, res.ordering)
                lb = res.root_objective
                exact = exact_mla(G).value if n <= args.exact_cap else None
        factor = approximation_factor(n, args.gamma)
        ref = exact if exact is not None else lb
        row.update(
            value=value, lower_bound=lb, exact=exact,
            ratio_vs_exact=_ratio(value, exact),
            ratio_vs_lb=_ratio(value, lb),
            bound_factor=factor,
            within_bound=bool(value <= factor * ref + 1e-6) if ref is not None else None,
            audit="pass" if res.audit_ok else "fail",
            error=None,
        )
    except (LPError, DecompositionError, ValueError, AssertionError) as exc:
        row.update(error=f"{type(exc).__name__}: {exc}", audit="error")
    return row


def _int_range(text: str) -> list[int]:
    try:
        if ":" in text:
            a, b = text.split(":", 1)
            return list(range(int(a), int(b) + 1))
        return [int(text)]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected N or A:B, got {text!r}") from None


def cmd_bench(args) -> list[dict]:
    rows = []
    for n in args.sizes:
        for s in range(args.seed, args.seed + args.seeds):
            rows.append(_bench_row(args.family, n, s, args))
    ratios = [r["ratio_vs_exact"] for r in rows if r.get("ratio_vs_exact") is not None]
    lbr = [r["ratio_vs_lb"] for r in rows if r.get("ratio_vs_lb") is not None]
    rows.append({
        "schema": SCHEMA, "summary": True, "rows": len(rows),
        "errors": sum(r.get("error") is not None for r in rows),
        "audit_failures": sum(r.get("audit") == "fail" for r in rows),
        "max_ratio_vs_exact": max(ratios) if ratios else None,
        "mean_ratio_vs_exact": float(np.mean(ratios)) if ratios else None,
        "max_ratio_vs_lb": max(lbr) if lbr else None,
        "mean_ratio_vs_lb": float(np.mean(lbr)) if lbr else None,
    })
    return rows


def cmd_gen(args) -> str:
    try:
        G = random_graph(args.n, args.family, m=args.m, p=args.p, seed=args.seed)
    except ValueError as exc:
        raise CLIError(EXIT_USAGE, str(exc)) from None
    return G.to_edge_list()


# ---------------------------------------------------------------------------


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.6g}"
    if isinstance(v, (list, tuple)) and len(v) > 16:
        return "[" + " ".join(map(str, v[:16])) + " ...]"
    if isinstance(v, dict):
        return ", ".join(f"{k}={_fmt(x)}" for k, x in v.items())
    return str(v)


def _pretty(rep: dict) -> str:
    width = max(len(k) for k in rep)
    return "\n".join(f"{k:<{width}}  {_fmt(v)}" for k, v in rep.items()) + "\n"


_BENCH_COLS = ("n", "m", "seed", "value", "lower_bound", "exact", "ratio_vs_exact", "ratio_vs_lb", "audit")


def _pretty_table(rows: list[dict]) -> str:
    body = [r for r in rows if not r.get("summary")]
    lines = ["  ".join(f"{c:>14}" for c in _BENCH_COLS)]
    for r in body:
        lines.append("  ".join(f"{_fmt(r.get(c)) if r.get(c) is not None else '-':>14}" for c in _BENCH_COLS))
        if r.get("error"):
            lines.append(f"    error: {r['error']}")
    for r in rows:
        if r.get("summary"):
            lines.append("summary: " + _fmt({k: v for k, v in r.items() if k not in ("schema", "summary")}))
    return "\n".join(lines) + "\n"


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="spreadlayout", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, graph=True):
        if graph:
            p.add_argument("graph", help="edge-list file, or - for stdin")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--gamma", type=float, default=None, help="override the scale ratio (>= 2)")
        p.add_argument("--backend", choices=("highs", "simplex"), default="highs", help="LP backend")
        p.add_argument("--pretty", action="store_true", help="human-readable output")
        return p

    for name, helptext in (("cutwidth", "cutwidth ordering (reports linear arrangement too)"),
                           ("mla", "linear arrangement ordering from the cutwidth driver")):
        p = common(sub.add_parser(name, help=helptext))
        p.add_argument("--audit", action=argparse.BooleanOptionalAction, default=None,
                       help=f"budget audits (default on for n <= {AUDIT_AUTO_MAX_N})")
        p.add_argument("--trace", metavar="FILE", help="write one JSON line per decomposition round")
        p.add_argument("--reuse-metric", action="store_true", help="experimental: restrict the parent metric instead of re-solving")
    p = common(sub.add_parser("pathwidth", help="vertex separation ordering and path decomposition"))
    p.add_argument("--audit", action=argparse.BooleanOptionalAction, default=None)
    p.add_argument("--trace", metavar="FILE")
    p.add_argument("--validate", action="store_true", help="validate the decomposition (always done; kept for scripts)")
    p = common(sub.add_parser("exact", help="exact subset DP"))
    p.add_argument("--objective", choices=tuple(_EXACT), default="cw")
    p.add_argument("--exact-cap", type=int, default=18)
    p = common(sub.add_parser("lowerbound", help="LP lower bounds"))
    p.add_argument("--which", choices=("mla-lp", "vs-lp", "lpcw", "cstar"), default="mla-lp")
    p = common(sub.add_parser("bench", help="benchmark on generated graphs (JSON lines)"), graph=False)
    p.add_argument("--family", choices=FAMILIES, default="gnm")
    p.add_argument("--sizes", type=_int_range, default=_int_range("8:12"), help="N or A:B")
    p.add_argument("--seeds", type=int, default=5, help="seeds per size, starting at --seed")
    p.add_argument("--objective", choices=("cw", "vs", "mla"), default="cw")
    p.add_argument("--density", type=float, default=1.5, help="gnm edges per vertex")
    p.add_argument("--p", type=float, default=None, help="gnp edge probability")
    p.add_argument("--exact-cap", type=int, default=18)
    p = sub.add_parser("gen", help="write a generated graph as an edge list")
    p.add_argument("--family", choices=FAMILIES, default="gnm")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, default=None)
    p.add_argument("--p", type=float, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output", default="-")
    return ap


_COMMANDS = {
    "cutwidth": cmd_cutwidth, "mla": cmd_mla, "pathwidth": cmd_pathwidth, "exact": cmd_exact,
    "lowerbound": cmd_lowerbound, "bench": cmd_bench, "gen": cmd_gen,
}


def _emit(text: str, path: str = "-") -> None:
    if path == "-":
        sys.stdout.write(text)
        return
    try:
        with open(path, "w") as fh:
            fh.write(text)
    except OSError as exc:
        raise CLIError(EXIT_IO, f"cannot write {path}: {exc.strerror or exc}") from None


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "gamma", None) is not None and args.gamma < 2:
        print("error: --gamma must be at least 2", file=sys.stderr)
        return EXIT_USAGE
    t0 = time.perf_counter()
    try:
        out = _COMMANDS[args.command](args)
    except CLIError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except ScaleCapError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (LPError, DecompositionError) as exc:
        print(f"error: solver failed: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    if args.command == "gen":
        _emit(out, args.output)
        return EXIT_OK
    if args.command == "bench":
        text = _pretty_table(out) if args.pretty else "".join(json.dumps(r, sort_keys=True) + "\n" for r in out)
        _emit(text)
        summary = out[-1]
        return EXIT_AUDIT if summary["audit_failures"] else EXIT_OK
    out["timing_ms"] = round((time.perf_counter() - t0) * 1000, 3)
    _emit(_pretty(out) if args.pretty else json.dumps(out, sort_keys=True) + "\n")
    audit = out.get("audit")
    if audit and audit.get("enabled") and not audit.get("ok"):
        return EXIT_AUDIT
    return EXIT_OK


def main(argv=None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
