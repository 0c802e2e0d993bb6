"""Command-line entry point: ``rainbowturan <group> <command> [options]``.

Exit status is 0 when every asserted invariant held, 1 when a check failed or
a pipeline stage raised, and 2 on usage errors.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
import warnings
from pathlib import Path

from .errors import HeuristicInconclusive, PreconditionViolated, RainbowTuranError
from .graph import (
    ColouredGraph,
    Graph,
    bipartition,
    format_edge_list,
    load_any,
    to_jsonable,
)
from .params import derive_seed, desk_params, param_calculator


class Outcome:
    """What a command produced: a JSON payload, optional CSV rows and a verdict."""

    def __init__(self, payload, ok: bool = True, rows: list | None = None, header: list | None = None,
                 text: str | None = None):
        self.payload, self.ok, self.rows, self.header, self.text = payload, ok, rows, header, text


# -- helpers ---------------------------------------------------------------------------

def _graph(args) -> Graph | ColouredGraph:
    if args.graph == "-":
        from .graph import parse_coloured_graph, parse_graph

        text = sys.stdin.read()
        try:
            return parse_coloured_graph(text)
        except RainbowTuranError:
            return parse_graph(text)
    return load_any(args.graph)


def _plain(g):
    return g.graph if isinstance(g, ColouredGraph) else g


def _coloured(g) -> ColouredGraph:
    if not isinstance(g, ColouredGraph):
        raise PreconditionViolated("this command needs a coloured edge list (u v c per line)")
    return g


def _params(args, **extra):
    over = {"exact_max_n": min(args.exact_max_n, 18)} if args.exact_max_n is not None else {}
    for name in ("k", "s", "ell", "q"):
        v = getattr(args, name, None)
        if v is not None:
            over[name] = v
    over.update(extra)
    return desk_params(args.scale, **over)


# -- gen ---------------------------------------------------------------------------

def cmd_gen(args) -> Outcome:
    from . import generators as G

    if args.kind == "hypercube":
        g = G.hypercube_coloured(args.k)
    elif args.kind == "gnp":
        g = G.random_graph(args.n, args.p, args.seed)
        if args.colour:
            g = G.greedy_proper_colouring(g, derive_seed(args.seed, "colouring"))
    elif args.kind == "blowup-cycle":
        g = G.blowup_cycle(args.k, args.r)
    else:
        res = G.crfree_construction(args.n, args.r, args.kmax, args.seed, c=args.c)
        if args.colour:
            return Outcome(res.summary(), res.meets_bound,
                           text=format_edge_list(G.greedy_proper_colouring(res.graph, derive_seed(args.seed, "colouring"))))
        return Outcome(res.summary(), res.meets_bound, text=format_edge_list(res.graph))
    return Outcome({"n": g.n, "m": _plain(g).m}, True, text=format_edge_list(g))


# -- expander ------------------------------------------------------------------------

def cmd_expander(args) -> Outcome:
    from . import expander as E

    g = _plain(_graph(args))
    emax = args.exact_max_n if args.exact_max_n is not None else 18
    if args.command == "extract":
        h, cert = E.extract_expander(g, args.eps, emax)
        return Outcome({"n": h.n, "m": h.m, "vertices": [h.label(v) for v in range(h.n)],
                        "certificate": cert.as_dict()}, cert.holds, text=_maybe_graph(args, h))
    if args.command == "verify":
        cert = E.verify_expander(g, E.ExpanderParams(args.d, args.eta, args.eps), emax)
        return Outcome(cert.as_dict(), cert.holds)
    if args.command == "regularize":
        res = E.regularize_bipartite(g, args.d, args.seed, relaxed=args.relaxed)
        ok = res.graph.max_degree <= args.d
        return Outcome(res.as_dict(), ok, text=_maybe_graph(args, res.graph))
    ar = E.almost_regular_expander(g, args.eps, args.seed, relaxed=args.relaxed, exact_max_n=emax,
                                   target=args.target)
    payload = ar.as_dict() | {"vertices": [ar.graph.label(v) for v in range(ar.graph.n)]}
    return Outcome(payload, ar.certificate.holds, text=_maybe_graph(args, ar.graph))


def _maybe_graph(args, h: Graph) -> str | None:
    if getattr(args, "out", None):
        Path(args.out).write_text(format_edge_list(h))
    return None


# -- spectral ---------------------------------------------------------------------------

def cmd_spectral(args) -> Outcome:
    from . import spectral as S

    g = _plain(_graph(args))
    emax = args.exact_max_n if args.exact_max_n is not None else 22
    if args.command == "summary":
        return Outcome(S.spectrum(g).as_dict())
    if args.command == "conductance":
        summ = S.spectrum(g, with_conductance=True, exact_max_n=emax)
        margin = S.check_eigen_conductance_bound(g, emax) if summ.conductance.exact else None
        return Outcome(summ.as_dict() | {"eigen_conductance_margin": margin}, margin is None or margin >= -1e-9)
    bip = bipartition(g)
    rep = S.mixing_deviation(g, args.k, bip, strict=False, keep=True)
    rows = [[x, y, float(rep.deviations[x, y])] for x in range(g.n) for y in range(g.n)]
    ok = rep.max_excess <= 1e-8 and rep.parity_max <= 1e-12
    return Outcome(rep.as_dict(), ok, rows, ["x", "y", "deviation"])


# -- walks ----------------------------------------------------------------------------

def cmd_walks(args) -> Outcome:
    from . import walks as W

    g = _graph(args)
    if args.command == "count":
        t = W.count_paths(g, args.k)
        rows = [[x, y, p, c] for x, y, p, c in t.rows()]
        total = sum(r[3] for r in rows)
        return Outcome({"k": args.k, "hom_cycles": total}, True, rows, ["x", "y", "paths", "cycles"])
    if args.command == "degenerate":
        if args.mc:
            st = W.estimate_degenerate(g, args.x, args.y, args.k, samples=args.mc, seed=args.seed)
        else:
            st = W.count_degenerate_exact(g, args.x, args.y, args.k)
        return Outcome(st.as_dict())
    if args.command == "good-pairs":
        bip = bipartition(_plain(g))
        rep = W.good_pairs(g, bip, args.k, args.s, "mc" if args.mc else "exact", args.mc or 2000, args.seed)
        rows = [[x, y, v, rep.hom.get((x, y)), rep.hom_star.get((x, y))] for (x, y), v in sorted(rep.verdicts.items())]
        return Outcome(rep.as_dict(), True, rows, ["x", "y", "verdict", "hom", "hom_star"])
    rel = args.relation
    if rel == "colour" and not isinstance(g, ColouredGraph):
        rel = "vertex"
    rep = W.janzer_inequality_check(g, args.k, rel, strict=False)
    return Outcome(rep.as_dict(), rep.margin >= 0)


# -- subdiv --------------------------------------------------------------------------

def _load_cert(path):
    from .subdivision import SubdivisionCertificate

    return SubdivisionCertificate.from_dict(json.loads(Path(path).read_text()))


def cmd_subdiv(args) -> Outcome:
    from . import subdivision as D

    g = _graph(args)
    if args.command == "verify":
        res = D.verify_subdivision(g, _load_cert(args.cert))
        return Outcome(res.as_dict(), res.ok)
    params = _params(args)
    if args.command == "find":
        cert = D.find_subdivision(g, args.m, params, args.seed)
        res = D.verify_subdivision(g, cert)
        return Outcome(cert.to_dict() | {"verified": res.as_dict()}, res.ok)
    cg = _coloured(g)
    Z = [int(z) for z in args.z.split(",")]
    if args.as_host:
        host_cg, local, bip = cg, Z, None
    else:
        host = D.prepare_host(cg, params, args.seed)
        where = {host.graph.label(v): v for v in range(host.graph.n)}
        missing = [z for z in Z if z not in where]
        if missing:
            raise PreconditionViolated(f"roots {missing} are not in the extracted expander; "
                                       "pass --as-host to search the input graph directly")
        host_cg, local, bip = cg.lift(host.graph), [where[z] for z in Z], host.bip
    cert = D.find_rooted_subdivision(host_cg, local, params, args.seed, bip)
    res = D.verify_subdivision(cg, cert)
    ok = res.ok and all(len(p) - 1 <= params.L for p in cert.paths.values())
    return Outcome(cert.to_dict() | {"verified": res.as_dict()}, ok)


# -- blowup -------------------------------------------------------------------------------

def cmd_blowup(args) -> Outcome:
    from . import blowup as B

    g = _plain(_graph(args))
    if args.command == "collection":
        col = B.build_krr_collection(g, args.r, args.cap, args.budget, args.seed, allow_partial=True)
        worst = B.check_collection(g, col)
        text = "\n".join(col.lines()) + ("\n" if col.copies else "")
        return Outcome({"r": args.r, "size": len(col), "cap": args.cap, "max_codegree": worst,
                        "enumerated": col.enumerated, "truncated": col.truncated}, True, text=text)
    if args.command == "verify":
        cert = B.BlowupCertificate.from_dict(json.loads(Path(args.cert).read_text()))
        res = B.verify_blowup(g, cert)
        return Outcome(res.as_dict(), res.ok)
    cert = B.find_blowup_subdivision(g, args.r, args.m, _params(args), args.seed, cap=args.cap)
    res = B.verify_blowup(g, cert)
    return Outcome(cert.to_dict() | {"verified": res.as_dict()}, res.ok)


# -- params / run ---------------------------------------------------------------------

def cmd_params(args) -> Outcome:
    return Outcome(param_calculator(args.n, args.eps, args.m, args.r, args.scale))


def cmd_run(args) -> Outcome:
    from .experiment import run_experiment

    summary = run_experiment(args.spec, args.out)
    rows = [[r["repetition"], r["seed"], r["status"], r["verified"], round(r["elapsed"], 3)]
            for r in summary["records"]]
    payload = {k: v for k, v in summary.items() if k != "records"}
    return Outcome(payload, summary["all_certificates_verified"], rows,
                   ["repetition", "seed", "status", "verified", "elapsed"])


# -- parser --------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False, allow_abbrev=False)
    common.add_argument("--seed", type=int, default=0, help="global seed (default 0)")
    common.add_argument("--scale", type=float, default=1.0, help="scale factor for desk parameters")
    common.add_argument("--json-out", help="write the JSON report here")
    common.add_argument("--csv-out", help="write tabular output here")
    common.add_argument("--exact-max-n", type=int, default=None, help="largest n for exhaustive subset checks")

    p = argparse.ArgumentParser(prog="rainbowturan", parents=[common], allow_abbrev=False,
                                description="Rainbow subdivisions and blow-ups at desk scale.")
    sub = p.add_subparsers(dest="group", required=True)

    def group(name, help_):
        g = sub.add_parser(name, help=help_, parents=[common], allow_abbrev=False)
        return g.add_subparsers(dest="command", required=True)

    def graph_arg(sp):
        sp.add_argument("--graph", required=True, help="edge-list file ('-' for stdin)")

    gen = group("gen", "instance generators (edge list on stdout)")
    s = gen.add_parser("hypercube", parents=[common], allow_abbrev=False); s.add_argument("--k", type=int, required=True)
    s = gen.add_parser("gnp", parents=[common], allow_abbrev=False)
    s.add_argument("--n", type=int, required=True); s.add_argument("--p", type=float, required=True)
    s.add_argument("--colour", action="store_true", help="greedy proper colouring")
    s = gen.add_parser("blowup-cycle", parents=[common], allow_abbrev=False)
    s.add_argument("--k", type=int, required=True); s.add_argument("--r", type=int, required=True)
    s = gen.add_parser("crfree", parents=[common], allow_abbrev=False)
    s.add_argument("--n", type=int, required=True); s.add_argument("--r", type=int, required=True)
    s.add_argument("--kmax", type=int, default=4); s.add_argument("--c", type=float, default=0.2)
    s.add_argument("--colour", action="store_true")
    gen_cmds = {"hypercube", "gnp", "blowup-cycle", "crfree"}

    ex = group("expander", "expander extraction and verification")
    s = ex.add_parser("extract", parents=[common], allow_abbrev=False); graph_arg(s)
    s.add_argument("--eps", type=float, default=0.5); s.add_argument("--out")
    s = ex.add_parser("verify", parents=[common], allow_abbrev=False); graph_arg(s)
    s.add_argument("--d", type=float, required=True); s.add_argument("--eta", type=float, required=True)
    s.add_argument("--eps", type=float, default=0.5)
    s = ex.add_parser("regularize", parents=[common], allow_abbrev=False); graph_arg(s)
    s.add_argument("--d", type=int, required=True); s.add_argument("--relaxed", action="store_true")
    s.add_argument("--out")
    s = ex.add_parser("almost-regular", parents=[common], allow_abbrev=False); graph_arg(s)
    s.add_argument("--eps", type=float, default=0.5); s.add_argument("--relaxed", action="store_true")
    s.add_argument("--target", choices=["half", "core"], default="core"); s.add_argument("--out")

    sp = group("spectral", "spectrum, conductance and mixing")
    s = sp.add_parser("summary", parents=[common], allow_abbrev=False); graph_arg(s)
    s = sp.add_parser("conductance", parents=[common], allow_abbrev=False); graph_arg(s)
    s = sp.add_parser("mixing", parents=[common], allow_abbrev=False); graph_arg(s); s.add_argument("--k", type=int, required=True)

    wk = group("walks", "walk counts, degeneracy and good pairs")
    s = wk.add_parser("count", parents=[common], allow_abbrev=False); graph_arg(s); s.add_argument("--k", type=int, required=True)
    s = wk.add_parser("degenerate", parents=[common], allow_abbrev=False); graph_arg(s)
    for name in ("x", "y", "k"):
        s.add_argument(f"--{name}", type=int, required=True)
    s.add_argument("--mc", type=int, default=0, help="Monte-Carlo samples (0 = exact)")
    s = wk.add_parser("good-pairs", parents=[common], allow_abbrev=False); graph_arg(s)
    s.add_argument("--k", type=int, required=True); s.add_argument("--s", type=int, required=True)
    s.add_argument("--mc", type=int, default=0)
    s = wk.add_parser("janzer-check", parents=[common], allow_abbrev=False); graph_arg(s)
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--relation", choices=["colour", "vertex", "rainbow"], default="colour")

    sd = group("subdiv", "rainbow K_m-subdivisions")
    s = sd.add_parser("find", parents=[common], allow_abbrev=False); graph_arg(s); s.add_argument("--m", type=int, default=3)
    for name in ("k", "s", "ell"):
        s.add_argument(f"--{name}", type=int)
    s = sd.add_parser("rooted", parents=[common], allow_abbrev=False); graph_arg(s)
    s.add_argument("--z", required=True, help="comma-separated branch vertices")
    s.add_argument("--as-host", action="store_true", help="search the input graph without extracting an expander")
    for name in ("k", "s", "ell"):
        s.add_argument(f"--{name}", type=int)
    s.add_argument("--q", type=float)
    s = sd.add_parser("verify", parents=[common], allow_abbrev=False); graph_arg(s); s.add_argument("--cert", required=True)

    bl = group("blowup", "r-blow-ups of subdivisions")
    s = bl.add_parser("collection", parents=[common], allow_abbrev=False); graph_arg(s)
    s.add_argument("--r", type=int, required=True); s.add_argument("--cap", type=int)
    s.add_argument("--budget", type=int, default=10 ** 7)
    s = bl.add_parser("find", parents=[common], allow_abbrev=False); graph_arg(s)
    s.add_argument("--r", type=int, required=True); s.add_argument("--m", type=int, default=3)
    s.add_argument("--cap", type=int)
    for name in ("k", "s"):
        s.add_argument(f"--{name}", type=int)
    s = bl.add_parser("verify", parents=[common], allow_abbrev=False); graph_arg(s); s.add_argument("--cert", required=True)

    pr = sub.add_parser("params", help="parameter sheet", parents=[common], allow_abbrev=False)
    pr.add_argument("--n", type=int, required=True); pr.add_argument("--eps", type=float, default=0.5)
    pr.add_argument("--m", type=int, default=3); pr.add_argument("--r", type=int, default=1)

    rn = sub.add_parser("run", help="run an experiment spec (TOML)", parents=[common], allow_abbrev=False)
    rn.add_argument("--spec", required=True); rn.add_argument("--out", help="output directory")

    p.set_defaults(_gen_cmds=gen_cmds)
    return p


HANDLERS = {"gen": cmd_gen, "expander": cmd_expander, "spectral": cmd_spectral, "walks": cmd_walks,
            "subdiv": cmd_subdiv, "blowup": cmd_blowup, "params": cmd_params, "run": cmd_run}


def _emit(args, out: Outcome) -> None:
    payload = to_jsonable(out.payload)
    text = json.dumps(payload, indent=2, sort_keys=True)
    if args.json_out:
        Path(args.json_out).write_text(text + "\n")
    if out.rows is not None and args.csv_out:
        with open(args.csv_out, "w", newline="") as fh:
            w = csv.writer(fh)
            if out.header:
                w.writerow(out.header)
            w.writerows(to_jsonable(out.rows))
    if out.text is not None:
        sys.stdout.write(out.text)
    elif not args.json_out:
        print(text)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.group == "gen":
        args.kind = args.command
    warnings.simplefilter("ignore", HeuristicInconclusive)
    try:
        out = HANDLERS[args.group](args)
    except (RainbowTuranError, ValueError, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    _emit(args, out)
    return 0 if out.ok else 1


if __name__ == "__main__":
    sys.exit(main())
