"""Command-line surface: solve | table | encode | embed | gauge.

Exit codes: 0 success, 2 invalid arguments or inputs, 3 infeasible graph
(twin vertices), 4 budget exhausted without proof or embedding failure.
"""

import argparse
import csv
import json
import sys
import time

import numpy as np

from . import altmodels, chimera, ising
from .cnf import (InfeasibleError, assign_true, build_formula, case_split,
                  choose_pivots, format_dimacs, format_smtlib, simplify)
from .exact import BnbConfig, min_hitting_set, solve_with_case_split
from .graph import (CapacityError, GraphError, bits_to_list, debruijn,
                    list_to_bits, read_graph)
from .idcode import default_workers, is_identifying, min_code_bruteforce

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_INFEASIBLE = 3
EXIT_BUDGET = 4

SCAN_GRIDS = (8, 12, 16, 24, 32)


def _parse_pivots(text):
    """'3,11;4,12' -> [(3, 11), (4, 12)]; None passes through."""
    if not text:
        return None
    pivots = []
    for part in text.split(";"):
        vs = tuple(sorted(int(t) for t in part.split(",")))
        if len(vs) != 2:
            raise ValueError("pivot %r is not a pair of variables" % part)
        pivots.append(vs)
    return pivots


def _parse_cells(text):
    cells = []
    if text and text.strip():
        for part in text.split(";"):
            d, n = (int(t) for t in part.split(","))
            cells.append((d, n))
    return cells


def _load_graph(args):
    if args.debruijn:
        d, n = args.debruijn
        return debruijn(d, n), "B(%d,%d)" % (d, n)
    return read_graph(args.graph), args.graph


def _deadline(args):
    if args.budget_secs is None:
        return None
    return time.monotonic() + args.budget_secs


def _workers(args):
    return default_workers() if args.workers is None else args.workers


def _force_units(f):
    """Assign unit clauses true until none remain; keeps gadget arity >= 2."""
    while True:
        units = {cl[0] for cl in f.clauses if len(cl) == 1}
        if not units:
            return f
        f = assign_true(f, units)


def _write_text(text, out):
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _emit(args, report, text_lines):
    if args.output == "json":
        print(json.dumps(report, sort_keys=True, indent=2))
    elif args.output == "csv":
        w = csv.writer(sys.stdout)
        for key in sorted(report):
            val = report[key]
            if isinstance(val, (list, dict)):
                val = json.dumps(val, sort_keys=True)
            w.writerow([key, val])
    else:
        for line in text_lines:
            print(line)


# solve

def _solve_anneal(g, args, deadline):
    """CNF -> optional case split -> compile -> SA -> decode -> verify.

    Only codes passing the identifying-code verifier are ever reported; the
    best verified size across all cases and restarts wins.
    """
    f = simplify(build_formula(g))
    if args.case_split or args.pivots:
        pivots = _parse_pivots(args.pivots)
        if pivots is None:
            pivots = choose_pivots(f)
        cases = [case for _, case in case_split(f, pivots).cases]
    else:
        cases = [f]
    best_size = None
    best_codes = set()
    restarts = 0
    for case in cases:
        case = _force_units(case)
        if not case.clauses:
            cand = list_to_bits(case.assumptions)
            if not is_identifying(g, cand):
                continue
            size = len(case.assumptions)
        else:
            m = ising.compile_cnf(case)
            r = ising.simulated_annealing(m, sweeps=args.sweeps,
                                          restarts=args.restarts,
                                          seed=args.seed)
            restarts += r.restarts
            for s in r.states:
                _, code = ising.decode(m, s)
                if not is_identifying(g, code):
                    continue
                size = code.bit_count()
                if best_size is None or size < best_size:
                    best_size, best_codes = size, {code}
                elif size == best_size:
                    best_codes.add(code)
            if deadline is not None and time.monotonic() > deadline:
                break
            continue
        if best_size is None or size < best_size:
            best_size, best_codes = size, {cand}
        elif size == best_size:
            best_codes.add(cand)
    return best_size, sorted(best_codes), restarts


def cmd_solve(args):
    g, gspec = _load_graph(args)
    workers = _workers(args)
    deadline = _deadline(args)
    pivots = _parse_pivots(args.pivots)
    report = {
        "command": "solve",
        "graph": gspec,
        "method": args.method,
        "parameters": {"seed": args.seed, "workers": workers,
                       "budget_secs": args.budget_secs,
                       "find_all": bool(args.find_all),
                       "case_split": bool(args.case_split or pivots)},
    }
    t0 = time.monotonic()
    infeasible = False
    min_size = None
    proven = False
    codes = []
    try:
        if args.method == "brute":
            res = min_code_bruteforce(g, workers=workers,
                                      find_all=args.find_all,
                                      deadline=deadline)
            if res.infeasible:
                infeasible = True
            else:
                min_size = res.min_size
                proven = res.proven_minimum
                codes = list(res.codes)
        elif args.method == "bnb":
            cfg = BnbConfig(enumerate_all=args.find_all, workers=workers,
                            deadline=deadline)
            if args.case_split or pivots:
                res = solve_with_case_split(g, cfg, pivots=pivots)
            else:
                res = min_hitting_set(simplify(build_formula(g)), cfg)
            min_size = res.min_size
            proven = res.proven_minimum
            codes = list(res.codes)
        else:
            min_size, codes, restarts = _solve_anneal(g, args, deadline)
            report["parameters"]["restarts"] = restarts
            report["parameters"]["sweeps"] = args.sweeps
    except InfeasibleError:
        infeasible = True

    report["elapsed_secs"] = round(time.monotonic() - t0, 3)
    report["infeasible"] = infeasible
    report["min_size"] = None if infeasible else min_size
    report["proven"] = bool(proven) if not infeasible else True

    if infeasible:
        _emit(args, report, ["%s: infeasible (twin vertices)" % gspec])
        return EXIT_INFEASIBLE

    code_list = [sorted(bits_to_list(c)) for c in codes]
    report["code"] = code_list[0] if code_list else None
    if args.find_all:
        report["codes"] = code_list

    if args.method == "anneal-ising" and args.check:
        cfg = BnbConfig(workers=workers, deadline=deadline)
        opt = solve_with_case_split(g, cfg)
        report["optimum"] = opt.min_size
        report["matches_optimum"] = (opt.proven_minimum
                                     and min_size == opt.min_size)
        report["proven"] = report["matches_optimum"]

    lines = []
    if min_size is None:
        lines.append("%s: no code found within budget" % gspec)
    else:
        tag = "proven minimum" if report["proven"] else "not proven minimal"
        lines.append("%s: identifying code of size %d (%s)"
                     % (gspec, min_size, tag))
        if report["code"] is not None:
            lines.append("code: %s" % " ".join(map(str, report["code"])))
        if args.find_all:
            lines.append("codes found: %d" % len(code_list))
    if "matches_optimum" in report:
        lines.append("matches proven optimum %s: %s"
                     % (report["optimum"], report["matches_optimum"]))
    _emit(args, report, lines)

    if min_size is None:
        return EXIT_BUDGET
    if args.method in ("brute", "bnb"):
        return EXIT_OK if report["proven"] else EXIT_BUDGET
    if args.check and not report["matches_optimum"]:
        return EXIT_BUDGET
    return EXIT_OK


# table

def _cell_display(entry):
    if entry["infeasible"]:
        return "twins"
    if entry["min_size"] is None:
        return "?"
    if entry["proven"]:
        return str(entry["min_size"])
    return "(%d)" % entry["min_size"]


def cmd_table(args):
    cells = _parse_cells(args.cells)
    workers = _workers(args)
    rows = []
    for d, n in cells:
        deadline = _deadline(args)          # budget applies per cell
        t0 = time.monotonic()
        entry = {"d": d, "n": n, "vertices": d ** n,
                 "min_size": None, "proven": False, "infeasible": False}
        g = debruijn(d, n)
        try:
            if args.method == "brute":
                res = min_code_bruteforce(g, workers=workers,
                                          deadline=deadline)
            else:
                cfg = BnbConfig(workers=workers, deadline=deadline)
                if args.case_split:
                    res = solve_with_case_split(g, cfg)
                else:
                    res = min_hitting_set(simplify(build_formula(g)), cfg)
            if res.infeasible:
                entry["infeasible"] = True
                entry["proven"] = True
            else:
                entry["min_size"] = res.min_size
                entry["proven"] = res.proven_minimum
        except InfeasibleError:
            entry["infeasible"] = True
            entry["proven"] = True
        entry["elapsed_secs"] = round(time.monotonic() - t0, 3)
        rows.append(entry)

    report = {"command": "table", "method": args.method, "cells": rows,
              "parameters": {"workers": workers,
                             "budget_secs": args.budget_secs}}
    if args.output == "csv":
        w = csv.writer(sys.stdout)
        w.writerow(["d", "n", "vertices", "min_size", "proven",
                    "infeasible", "display", "elapsed_secs"])
        for e in rows:
            w.writerow([e["d"], e["n"], e["vertices"], e["min_size"],
                        e["proven"], e["infeasible"], _cell_display(e),
                        e["elapsed_secs"]])
        return EXIT_OK

    lines = ["%-8s %9s %6s %10s" % ("graph", "vertices", "min", "time(s)")]
    for e in rows:
        lines.append("%-8s %9d %6s %10.2f"
                     % ("B(%d,%d)" % (e["d"], e["n"]), e["vertices"],
                        _cell_display(e), e["elapsed_secs"]))
    _emit(args, report, lines)
    return EXIT_OK


# encode

def cmd_encode(args):
    g, gspec = _load_graph(args)
    summary = ["graph %s: %d vertices" % (gspec, g.vertex_count)]

    if args.format == "lp":
        if args.case is not None or args.case_split:
            print("error: case split does not apply to the lp format",
                  file=sys.stderr)
            return EXIT_USAGE
        m = altmodels.build_ip(g)
        text = altmodels.format_lp(m)
        summary.append("lp: %d binaries, %d separation rows, %d domination rows"
                       % (m.var_count, len(m.separation_rows),
                          len(m.domination_rows)))
    else:
        f = simplify(build_formula(g))
        if args.case is not None or args.case_split:
            pivots = _parse_pivots(args.pivots)
            if pivots is None:
                pivots = choose_pivots(f)
            split = case_split(f, pivots)
            idx = args.case if args.case is not None else 1
            if not 1 <= idx <= len(split.cases):
                print("error: --case %d out of range (1..%d)"
                      % (idx, len(split.cases)), file=sys.stderr)
                return EXIT_USAGE
            f = split.cases[idx - 1][1]
            summary.append("case %d of %d: assumptions %s"
                           % (idx, len(split.cases), sorted(f.assumptions)))
        summary.append("%d clauses over %d variables"
                       % (len(f.clauses), len(f.variables())))
        if args.format == "dimacs":
            text = format_dimacs(f)
        elif args.format == "smtlib":
            if args.size is None:
                print("error: --format smtlib requires --size",
                      file=sys.stderr)
                return EXIT_USAGE
            text = format_smtlib(f, args.size)
        else:
            m = ising.compile_cnf(_force_units(f))
            text = ising.format_model(m)
            nprob = sum(1 for r in m.roles if r == "problem")
            summary.append("ising: %d spins (%d problem + %d ancilla), "
                           "lambda %g" % (m.var_count, nprob,
                                          m.var_count - nprob,
                                          m.penalty_lambda))

    _write_text(text, args.out)
    for line in summary:
        print(line, file=sys.stderr)
    return EXIT_OK


# embed

def cmd_embed(args):
    logical = ising.read_model(args.model)
    faults = ()
    if args.faults:
        with open(args.faults) as fh:
            faults = tuple(json.load(fh))

    attempts = []
    hw = None
    chains = None
    if args.scan:
        grids = [(s, s) for s in SCAN_GRIDS]
    else:
        if args.grid is None:
            print("error: --grid M N required unless --scan", file=sys.stderr)
            return EXIT_USAGE
        grids = [tuple(args.grid)]
    for gm, gn in grids:
        hw_try = chimera.ChimeraGraph(gm, gn, args.shore, faults)
        t0 = time.monotonic()
        ch = chimera.heuristic_embed(hw_try, logical, seed=args.seed,
                                     tries=args.tries)
        att = {"grid": [gm, gn], "shore": args.shore,
               "success": ch is not None,
               "elapsed_secs": round(time.monotonic() - t0, 3)}
        if ch is not None:
            att["physical_qubits"] = sum(len(c) for c in ch.values())
            att["max_chain_length"] = max(len(c) for c in ch.values())
        attempts.append(att)
        if ch is not None:
            hw, chains = hw_try, ch
            break

    report = {"command": "embed", "model": args.model,
              "logical_vars": logical.var_count, "attempts": attempts,
              "parameters": {"seed": args.seed, "tries": args.tries,
                             "shore": args.shore, "faults": len(faults)}}
    if chains is None:
        report["success"] = False
        _emit(args, report, ["embedding failed on all grids tried"])
        return EXIT_BUDGET

    qubits = sum(len(c) for c in chains.values())
    longest = max(len(c) for c in chains.values())
    embedded = chimera.embed_model(hw, logical, chains,
                                   j_fm=args.chain_strength)
    if args.out_embedding:
        chimera.write_embedding(chains, args.out_embedding)
    if args.out_model:
        ising.write_model(embedded, args.out_model)

    report["success"] = True
    report["grid"] = [hw.grid_m, hw.grid_n]
    report["physical_qubits"] = qubits
    report["max_chain_length"] = longest
    lines = ["embedded %d logical spins into %d physical qubits on "
             "Chimera(%d,%d,%d)" % (logical.var_count, qubits, hw.grid_m,
                                    hw.grid_n, hw.shore),
             "max chain length: %d" % longest]
    if len(attempts) > 1:
        for att in attempts:
            lines.append("  grid %dx%d: %s" % (att["grid"][0], att["grid"][1],
                         "ok" if att["success"] else "failed"))
    _emit(args, report, lines)
    return EXIT_OK


# gauge

def cmd_gauge(args):
    m = ising.read_model(args.model)
    if args.checkerboard:
        if args.grid is None:
            print("error: --checkerboard needs --grid M N (and --shore)",
                  file=sys.stderr)
            return EXIT_USAGE
        hw = chimera.ChimeraGraph(args.grid[0], args.grid[1], args.shore)
        if hw.qubit_count != m.var_count:
            print("error: model has %d spins but Chimera(%d,%d,%d) has %d "
                  "qubits" % (m.var_count, args.grid[0], args.grid[1],
                              args.shore, hw.qubit_count), file=sys.stderr)
            return EXIT_USAGE
        signs = list(chimera.checkerboard_gauge(hw))
    elif args.gauge_file:
        with open(args.gauge_file) as fh:
            signs = list(json.load(fh))
    else:
        print("error: need --checkerboard or --gauge FILE", file=sys.stderr)
        return EXIT_USAGE

    m2 = chimera.gauge_transform(m, signs)
    verified = 0
    if args.verify:
        rng = np.random.default_rng(args.seed)
        for _ in range(1000):
            s = [int(x) for x in rng.integers(0, 2, m.var_count) * 2 - 1]
            s2 = [signs[i] * s[i] for i in range(m.var_count)]
            if ising.energy(m, s) != ising.energy(m2, s2):
                print("error: energy mismatch under the spin bijection",
                      file=sys.stderr)
                return 1
            verified += 1

    _write_text(ising.format_model(m2), args.out)
    flips = sum(1 for sgn in signs if sgn < 0)
    report = {"command": "gauge", "model": args.model, "spins": m.var_count,
              "sign_flips": flips, "verified_states": verified,
              "out": args.out}
    lines = ["gauge applied: %d of %d spins flipped" % (flips, m.var_count)]
    if args.verify:
        lines.append("energies of %d random states agree exactly" % verified)
    if args.out:
        _emit(args, report, lines)
    else:
        # the transformed model owns stdout; keep the summary on stderr
        for line in lines:
            print(line, file=sys.stderr)
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="idcodes",
        description="Minimum identifying codes on graphs: exact solvers, "
                    "Ising encodings, and Chimera embedding tools.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0,
                        help="seed for every random choice (default 0)")
    common.add_argument("--workers", type=int, default=None,
                        help="worker processes (default: IDCODE_WORKERS env "
                             "or the machine's cpu count)")
    common.add_argument("--budget-secs", type=float, default=None,
                        dest="budget_secs",
                        help="wall-clock budget; solvers degrade to unproven "
                             "results when it runs out")
    common.add_argument("--output", choices=("json", "csv", "text"),
                        default="text", help="report format (default text)")

    graphspec = argparse.ArgumentParser(add_help=False)
    grp = graphspec.add_mutually_exclusive_group(required=True)
    grp.add_argument("--debruijn", nargs=2, type=int, metavar=("D", "N"),
                     help="undirected de Bruijn graph B(D,N)")
    grp.add_argument("--graph", metavar="FILE",
                     help="graph JSON file (vertex_count/labels/edges)")

    sub = parser.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("solve", parents=[common, graphspec],
                       help="compute a minimum identifying code")
    p.add_argument("--method", choices=("brute", "bnb", "anneal-ising"),
                   default="bnb")
    p.add_argument("--find-all", action="store_true", dest="find_all",
                   help="enumerate every minimum code")
    p.add_argument("--check", action="store_true",
                   help="anneal-ising: also solve exactly and compare")
    p.add_argument("--case-split", action="store_true", dest="case_split",
                   help="split on two disjoint 2-clauses before solving")
    p.add_argument("--pivots", default=None,
                   help="explicit pivot pairs, e.g. \"3,11;4,12\"")
    p.add_argument("--restarts", type=int, default=512,
                   help="anneal-ising: restarts per case (default 512)")
    p.add_argument("--sweeps", type=int, default=1000,
                   help="anneal-ising: sweeps per restart (default 1000)")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("table", parents=[common],
                       help="minimum-code table over de Bruijn cells")
    p.add_argument("--cells", required=True,
                   help="semicolon-separated d,n list, e.g. \"2,3;2,4;3,2\"")
    p.add_argument("--method", choices=("brute", "bnb"), default="bnb")
    p.add_argument("--case-split", action="store_true", dest="case_split")
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("encode", parents=[common, graphspec],
                       help="emit DIMACS / SMT-LIB / Ising / LP encodings")
    p.add_argument("--format", required=True,
                   choices=("dimacs", "smtlib", "ising", "lp"))
    p.add_argument("--size", type=int, default=None,
                   help="target code size (smtlib cardinality)")
    p.add_argument("--case", type=int, default=None,
                   help="1-based case index; implies a case split")
    p.add_argument("--case-split", action="store_true", dest="case_split",
                   help="split and emit case 1 unless --case is given")
    p.add_argument("--pivots", default=None,
                   help="explicit pivot pairs for the split")
    p.add_argument("--out", default=None, help="output file (default stdout)")
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("embed", parents=[common],
                       help="minor-embed an Ising model into a Chimera graph")
    p.add_argument("--model", required=True, help="Ising model file")
    p.add_argument("--grid", nargs=2, type=int, metavar=("M", "N"),
                   default=None)
    p.add_argument("--shore", type=int, default=4,
                   help="cell shore size c (default 4)")
    p.add_argument("--faults", default=None,
                   help="JSON list of dead qubit ids")
    p.add_argument("--tries", type=int, default=32,
                   help="embedding restarts (default 32)")
    p.add_argument("--chain-strength", type=float, default=None,
                   dest="chain_strength",
                   help="ferromagnetic chain coupling (default 2x max |coeff|)")
    p.add_argument("--scan", action="store_true",
                   help="grow the grid 8,12,16,24,32 until embedding succeeds")
    p.add_argument("--out-embedding", default=None, dest="out_embedding",
                   help="write the chains as JSON")
    p.add_argument("--out-model", default=None, dest="out_model",
                   help="write the embedded physical model")
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("gauge", parents=[common],
                       help="apply a gauge transformation to an Ising model")
    p.add_argument("--model", required=True, help="Ising model file")
    p.add_argument("--grid", nargs=2, type=int, metavar=("M", "N"),
                   default=None)
    p.add_argument("--shore", type=int, default=4)
    p.add_argument("--checkerboard", action="store_true",
                   help="the checkerboard gauge for the given Chimera grid")
    p.add_argument("--gauge", default=None, dest="gauge_file",
                   help="JSON list of +1/-1 spin signs")
    p.add_argument("--verify", action="store_true",
                   help="recheck 1000 random-state energies under the gauge")
    p.add_argument("--out", default=None, help="output file (default stdout)")
    p.set_defaults(func=cmd_gauge)

    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_USAGE
    try:
        return args.func(args)
    except InfeasibleError as e:
        print("infeasible: %s" % e, file=sys.stderr)
        return EXIT_INFEASIBLE
    except (GraphError, CapacityError, ValueError, OSError) as e:
        print("error: %s" % e, file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
