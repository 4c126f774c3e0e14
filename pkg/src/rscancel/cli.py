"""Command-line entry point: rscancel <command> ..."""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import os
import sys
from fractions import Fraction
from pathlib import Path
from typing import Optional

from . import __version__
from .coefficients import (CoefficientFormatError, CoefficientTable, check_rs_condition,
                           gen_power_coefficients, gen_ruler_coefficients)
from .dehn import UncertifiedError, build_index, dehn_reduce, required_cap, verify_embedding, verify_nup
from .genericity import (PatternQuery, SubdivisionModel, count_pattern_exact, mc_graphical,
                         mc_presentation)
from .graph import (GraphFormatError, ab_subdivide, from_dot, from_json_dict, reduce,
                    to_dot, to_json)
from .pieces import check_gr, parse_fraction
from .products import (ProductSet, derive_sets, extract_witnesses, extract_witnesses_explicit,
                       instructive_preset)
from .rsgraph import (RSConstructionError, _finish, build_gamma, emit_presentation, label_underlying)
from .underlying import (GenerationError, UnderlyingFormatError, UnderlyingGraph, gen_underlying,
                         moore_bound, projective_underlying)
from .words import format_word, parse_word

EXIT_OK, EXIT_INVALID, EXIT_INPUT, EXIT_REFUSED = 0, 1, 2, 3


class InputError(Exception):
    pass


# -- helpers --------------------------------------------------------------

def read_config(path: Optional[str]) -> dict:
    """key = value lines; values are JSON when they parse, strings otherwise."""
    if not path:
        return {}
    cfg = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}")
    for n, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line or line.startswith("["):
            continue
        if "=" not in line:
            raise InputError(f"{path}:{n}: expected key = value")
        key, val = (x.strip() for x in line.split("=", 1))
        try:
            cfg[key] = json.loads(val)
        except json.JSONDecodeError:
            cfg[key] = val.strip("'\"")
    return cfg


def resolve_seed(flag, cfg) -> int:
    if flag is not None:
        return int(flag)
    if cfg.get("seed") is not None:
        return int(cfg["seed"])
    env = os.environ.get("RS_CANCEL_SEED")
    return int(env) if env else 0


def config_hash(cfg: dict) -> str:
    body = json.dumps({k: v for k, v in cfg.items() if k != "out"}, sort_keys=True, default=str)
    return hashlib.sha256(body.encode()).hexdigest()[:16]


def _load_json(path: str):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}")
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}:{exc.lineno}:{exc.colno}: invalid JSON: {exc.msg}")


def load_table(path: str) -> CoefficientTable:
    data = _load_json(path)
    try:
        return CoefficientTable.from_data(data)
    except CoefficientFormatError as exc:
        raise InputError(f"{path}: {exc}")


def load_underlying(path: str) -> UnderlyingGraph:
    data = _load_json(path)
    try:
        return UnderlyingGraph.from_json(json.dumps(data))
    except (UnderlyingFormatError, ValueError) as exc:
        raise InputError(f"{path}: {exc}")


def load_graph(path: str):
    """(reduced graph, RSGraph or None, raw dict or None) from .json or .dot."""
    if path.endswith(".dot"):
        try:
            g = from_dot(Path(path).read_text())
        except (OSError, ValueError) as exc:
            raise InputError(f"{path}: {exc}")
        raw = None
    else:
        raw = _load_json(path)
        try:
            g = from_json_dict(raw)
        except GraphFormatError as exc:
            raise InputError(f"{path}: {exc}")
    if not g.is_generator_labeled() or not g.is_reduced():
        g = reduce(ab_subdivide(g))
    rs = None
    if raw is not None and "rips_segev" in raw:
        meta = raw["rips_segev"]
        try:
            table = CoefficientTable.from_data(meta["coefficients"])
            rs = _finish(g, [int(s) for s in meta["line_starts"]], table)
        except (KeyError, TypeError, CoefficientFormatError) as exc:
            raise InputError(f"{path}: rips_segev block: {exc}")
    return g, rs, raw


def write(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)


def dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=1, default=str) + "\n"


def stamp(report: dict, cfg: dict) -> dict:
    report["version"] = __version__
    report["config_hash"] = config_hash(cfg)
    return report


# -- build ----------------------------------------------------------------

BUILD_KEYS = ("coefficients", "power", "phi", "ruler", "underlying", "n", "girth", "attempts",
              "method", "projective", "preset", "lambda", "cycle_cap", "gamma_cap", "seed")


def _build_config(args) -> dict:
    cfg = read_config(args.config)
    for key in BUILD_KEYS:
        val = getattr(args, key, None)
        if val is not None:
            cfg[key] = val
    cfg["seed"] = resolve_seed(args.seed, cfg)
    cfg.setdefault("lambda", "1/8")
    cfg.setdefault("cycle_cap", 0)
    cfg["out"] = args.out or cfg.get("out") or "out"
    return cfg


def cmd_build(args) -> int:
    cfg = _build_config(args)
    out = Path(cfg["out"])
    lam = parse_fraction(cfg["lambda"])
    if cfg.get("preset"):
        return _build_preset(cfg, out, lam)
    # underlying graph
    if cfg.get("underlying"):
        phi = load_underlying(cfg["underlying"])
    elif cfg.get("projective"):
        phi = projective_underlying(int(cfg["projective"]))
    elif cfg.get("n"):
        try:
            phi = gen_underlying(int(cfg["n"]), int(cfg.get("girth", 3)), seed=cfg["seed"],
                                 attempts=int(cfg.get("attempts", 200)), method=cfg.get("method", "random"))
        except GenerationError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_INVALID
    else:
        raise InputError("no underlying graph: give --underlying, --n or --projective")
    # coefficients
    if cfg.get("coefficients"):
        table = load_table(cfg["coefficients"])
    elif cfg.get("ruler"):
        table = gen_ruler_coefficients(phi.n, seed=cfg["seed"])
    else:
        phi_map = cfg.get("phi")
        if isinstance(phi_map, str):
            phi_map = [int(x) for x in phi_map.split(",")]
        table = gen_power_coefficients(phi.n, phi_map)
    rs = check_rs_condition(table)
    report = {"config": {k: v for k, v in cfg.items() if k != "out"},
              "rips_segev_condition": rs.to_json(),
              "underlying": {"n": phi.n, "girth": phi.girth, "moore_bound_for_girth": moore_bound(8, phi.girth)}}
    structural = rs.passed
    if not rs.passed:
        report["error"] = "coefficient table fails the Rips-Segev condition"
    else:
        try:
            gamma = build_gamma(label_underlying(phi, table), table, phi)
        except RSConstructionError as exc:
            report["error"] = f"construction error: {exc}"
            structural = False
            gamma = None
        if gamma is not None:
            g = gamma.graph
            pr = check_gr(g, lam, cfg.get("gamma_cap"))
            wit = extract_witnesses(gamma)
            pres = emit_presentation(gamma, int(cfg["cycle_cap"]))
            closed = all(w.cycle.is_closed(g) for w in wit)
            structural = structural and closed and len(wit) == 4 * gamma.K
            report["gamma"] = {"vertices": g.num_vertices(), "edges": g.num_edges(), "lines": gamma.K,
                               "c": [format_word(c) for c in gamma.c]}
            report["pieces"] = pr.to_json()
            cv = pr.criterion_value
            if cv is not None and not pr.passes.get("1/6", False):
                report["demonstration_lambda"] = str(cv)
            report["witnesses"] = {"count": len(wit), "expected": 4 * gamma.K,
                                   "unique_in_F": sum(w.unique_in_F for w in wit),
                                   "all_closed": closed, "list": [w.to_json() for w in wit]}
            report["presentation"] = {"relators": len(pres.relators), "fundamental_cycles": pres.chords}
            write(out / "gamma.json", gamma.to_json())
            write(out / "gamma.dot", to_dot(g, "Gamma"))
            write(out / "presentation.txt", pres.text())
    report["structural_ok"] = structural
    write(out / "report.json", dump(stamp(report, cfg)))
    return EXIT_OK if structural else EXIT_INVALID


def _build_preset(cfg, out, lam) -> int:
    if cfg["preset"] != "instructive":
        raise InputError(f"unknown preset {cfg['preset']!r}")
    g, A, B = instructive_preset()
    pr = check_gr(g, lam)
    wit = extract_witnesses_explicit(g, A, B)
    pres = emit_presentation(g)
    report = {"config": {k: v for k, v in cfg.items() if k != "out"}, "pieces": pr.to_json(),
              "witnesses": {"count": len(wit), "list": [w.to_json() for w in wit]},
              "presentation": {"relators": len(pres.relators), "fundamental_cycles": pres.chords},
              "structural_ok": True}
    extra = {"preset": {"A": [format_word(x) for x in A], "B": [format_word(y) for y in B]}}
    write(out / "gamma.json", to_json(g, extra))
    write(out / "gamma.dot", to_dot(g, "Gamma"))
    write(out / "presentation.txt", pres.text())
    write(out / "report.json", dump(stamp(report, cfg)))
    return EXIT_OK


# -- check / verify / dehn -------------------------------------------------

def cmd_check(args) -> int:
    g, _, _ = load_graph(args.graph)
    rep = check_gr(g, args.lam, args.gamma_cap).to_json()
    cfg = {"graph": os.path.basename(args.graph), "lambda": args.lam}
    print(dump(stamp(rep, cfg)), end="")
    return EXIT_OK


def _sets_for(g, rs, raw):
    if rs is not None:
        return derive_sets(rs), extract_witnesses(rs)
    if raw and "preset" in raw:
        A = [parse_word(x) for x in raw["preset"]["A"]]
        B = [parse_word(x) for x in raw["preset"]["B"]]
        return ProductSet(explicit_A=tuple(A), B=tuple(B)), extract_witnesses_explicit(g, A, B)
    raise InputError("graph has neither a rips_segev block nor a preset block")


def cmd_verify(args) -> int:
    g, rs, raw = load_graph(args.graph)
    sets, wit = _sets_for(g, rs, raw)
    cfg = {"graph": os.path.basename(args.graph), "lambda": args.lam, "relator_cap": args.relator_cap,
           "demonstration": args.demonstration, "unsafe": args.unsafe, "a_pairs": args.a_pairs}
    report = {}
    try:
        idx = build_index(rs if rs is not None else g, args.relator_cap, args.lam,
                          unsafe=args.unsafe, demonstration=args.demonstration)
    except UncertifiedError as exc:
        nup = verify_nup(wit, g, None)
        report.update(refused=str(exc), nup=nup.to_json(),
                      verdict="REFUSED (only the structural half was checked)")
        print(dump(stamp(report, cfg)), end="")
        return EXIT_OK
    emb = verify_embedding(sets, idx, max_pairs=args.a_pairs, include_A=args.a_pairs > 0)
    nup = verify_nup(wit, g, idx)
    report["certified"] = idx.certified
    report["lambda_used"] = str(idx.lam)
    report["note"] = idx.note
    report["embedding"] = emb.to_json()
    report["nup"] = nup.to_json()
    report["conditional_halves"] = [] if idx.certified else ["embedding", "nup.factors_distinct"]
    ok = emb.passed and nup.passed
    if not ok:
        verdict = "FAIL" if (emb.failures or nup.dehn_passed is False and not emb.inconclusive) else "INCOMPLETE"
    else:
        verdict = "PASS" if idx.certified else "PASS (conditional on λ <= 1/6)"
    report["verdict"] = verdict
    print(dump(stamp(report, cfg)), end="")
    return EXIT_OK


def cmd_dehn(args) -> int:
    g, rs, _ = load_graph(args.graph)
    try:
        w = parse_word(args.word)
    except ValueError as exc:
        raise InputError(f"--word: {exc}")
    cap = args.cap if args.cap is not None else required_cap(w, min(parse_fraction(args.lam), Fraction(1, 6)))
    try:
        idx = build_index(rs if rs is not None else g, cap, args.lam, unsafe=args.unsafe,
                          demonstration=args.demonstration)
    except UncertifiedError as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return EXIT_REFUSED
    _, trace = dehn_reduce(w, idx)
    for row in trace.json_lines():
        print(json.dumps(row, sort_keys=True))
    return EXIT_OK


# -- genericity -----------------------------------------------------------

def _int_list(text) -> list:
    return [int(x) for x in str(text).split(",") if x.strip()]


def cmd_few_relator(args) -> int:
    seed = resolve_seed(args.seed, {})
    rows = []
    for t in _int_list(args.t):
        est = mc_presentation(PatternQuery(t, args.n, args.trials, seed))
        row = {"t": t, "estimate": est.p, "ci_low": est.lo, "ci_high": est.hi, "trials": est.trials, "seed": seed}
        if args.exact and args.n == 1:
            p, tot = count_pattern_exact(t)
            row["exact"] = p / tot
        rows.append(row)
    _emit_csv(rows, args.csv)
    return EXIT_OK


def cmd_graphical(args) -> int:
    seed = resolve_seed(args.seed, {})
    rows = []
    for j in _int_list(args.j):
        if args.delta:
            raw = _load_json(args.delta)
            m = SubdivisionModel(int(raw["n"]), tuple(tuple(e) for e in raw["edges"]), j, args.threshold)
        else:
            m = SubdivisionModel.cycle(args.cycle, j, args.threshold)
        est = mc_graphical(m, args.trials, seed)
        rows.append({"j": j, "estimate": est.p, "ci_low": est.lo, "ci_high": est.hi, "trials": est.trials,
                     "seed": seed, "collapsed": est.flagged})
    _emit_csv(rows, args.csv)
    return EXIT_OK


def _emit_csv(rows, path):
    fh = open(path, "w", newline="") if path else sys.stdout
    try:
        w = csv.DictWriter(fh, fieldnames=list(rows[0].keys()) if rows else ["t"])
        w.writeheader()
        w.writerows(rows)
    finally:
        if path:
            fh.close()


# -- coefficients / underlying ---------------------------------------------

def cmd_coeff_check(args) -> int:
    table = load_table(args.file)
    res = check_rs_condition(table, args.max_coincidences)
    print(dump(res.to_json()), end="")
    return EXIT_OK if res.passed else EXIT_INVALID


def cmd_coeff_generate(args) -> int:
    if args.kind == "power":
        phi = _int_list(args.phi) if args.phi else None
        try:
            table = gen_power_coefficients(args.k, phi)
        except ValueError as exc:
            raise InputError(str(exc))
    else:
        table = gen_ruler_coefficients(args.k, seed=resolve_seed(args.seed, {}))
    text = table.to_json()
    if args.out:
        write(Path(args.out), text)
    else:
        print(text, end="")
    return EXIT_OK


def cmd_under_generate(args) -> int:
    if args.projective:
        phi = projective_underlying(args.projective)
    else:
        try:
            phi = gen_underlying(args.n, args.girth, seed=resolve_seed(args.seed, {}),
                                 attempts=args.attempts, method=args.method)
        except GenerationError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_INVALID
    if args.out:
        write(Path(args.out), phi.to_json())
    else:
        print(phi.to_json(), end="")
    return EXIT_OK


def cmd_under_load(args) -> int:
    phi = load_underlying(args.file)
    print(dump({"n": phi.n, "girth": phi.girth, "moore_bound_for_girth": moore_bound(8, phi.girth)}), end="")
    return EXIT_OK


# -- parser ---------------------------------------------------------------

def make_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="rscancel", description=__doc__)
    p.add_argument("--version", action="version", version=f"rscancel {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    b = sub.add_parser("build", help="build Γ, check it, extract witnesses, write artifacts")
    b.add_argument("--config", help="key = value file; flags override it")
    b.add_argument("--coefficients", help="coefficient table JSON")
    b.add_argument("--power", action="store_const", const=True, help="power-of-ten coefficients (default)")
    b.add_argument("--phi", help="comma-separated injective exponent map for power coefficients")
    b.add_argument("--ruler", action="store_const", const=True, help="small random coefficients")
    b.add_argument("--underlying", help="underlying graph JSON {n, perms}")
    b.add_argument("--n", type=int, help="generate an underlying graph on n vertices")
    b.add_argument("--girth", type=int, help="girth target for generation")
    b.add_argument("--attempts", type=int)
    b.add_argument("--method", choices=["random", "greedy"])
    b.add_argument("--projective", type=int, help="use the incidence graph of PG(2, q)")
    b.add_argument("--preset", choices=["instructive"])
    b.add_argument("--lambda", dest="lambda", help="λ for the piece criterion (default 1/8)")
    b.add_argument("--cycle-cap", dest="cycle_cap", type=int, help="add cycle labels up to this syllable length")
    b.add_argument("--gamma-cap", dest="gamma_cap", type=int)
    b.add_argument("--seed", type=int, help="defaults to $RS_CANCEL_SEED, then 0")
    b.add_argument("--out", help="output directory (default ./out)")
    b.set_defaults(func=cmd_build)

    c = sub.add_parser("check", help="piece criterion for a labeled graph")
    c.add_argument("--graph", required=True)
    c.add_argument("--lambda", dest="lam", default="1/6")
    c.add_argument("--gamma-cap", type=int)
    c.set_defaults(func=cmd_check)

    v = sub.add_parser("verify", help="embedding and non-unique-product checks")
    v.add_argument("--graph", required=True)
    v.add_argument("--lambda", dest="lam", default="1/6")
    v.add_argument("--relator-cap", type=int, default=12)
    v.add_argument("--a-pairs", type=int, default=200, help="pairs of A to test (0 skips A)")
    v.add_argument("--demonstration", action="store_true", help="accept an uncertified graph, verdicts conditional")
    v.add_argument("--unsafe", action="store_true")
    v.set_defaults(func=cmd_verify)

    d = sub.add_parser("dehn", help="Dehn reduction of a word; trace as JSON lines")
    d.add_argument("--word", required=True)
    d.add_argument("--graph", required=True)
    d.add_argument("--lambda", dest="lam", default="1/6")
    d.add_argument("--cap", type=int, help="relator syllable cap (default: the sufficient bound)")
    d.add_argument("--demonstration", action="store_true")
    d.add_argument("--unsafe", action="store_true")
    d.set_defaults(func=cmd_dehn)

    gen = sub.add_parser("genericity", help="pattern-word frequency experiments")
    gsub = gen.add_subparsers(dest="mode", required=True)
    fr = gsub.add_parser("few-relator")
    fr.add_argument("--t", default="5,10,15,20")
    fr.add_argument("--n", type=int, default=1)
    fr.add_argument("--trials", type=int, default=100000)
    fr.add_argument("--seed", type=int)
    fr.add_argument("--exact", action="store_true", help="add the exact ratio column (n = 1)")
    fr.add_argument("--csv")
    fr.set_defaults(func=cmd_few_relator)
    gr = gsub.add_parser("graphical")
    gr.add_argument("--delta", help="base graph JSON {n, edges}")
    gr.add_argument("--cycle", type=int, default=6, help="use a cycle of this length as base graph")
    gr.add_argument("--j", default="1,2,3")
    gr.add_argument("--threshold", type=int, default=12)
    gr.add_argument("--trials", type=int, default=2000)
    gr.add_argument("--seed", type=int)
    gr.add_argument("--csv")
    gr.set_defaults(func=cmd_graphical)

    co = sub.add_parser("coefficients", help="coefficient tables")
    csub = co.add_subparsers(dest="mode", required=True)
    cc = csub.add_parser("check")
    cc.add_argument("file")
    cc.add_argument("--max-coincidences", type=int, default=0)
    cc.set_defaults(func=cmd_coeff_check)
    cg = csub.add_parser("generate")
    cg.add_argument("--k", type=int, required=True)
    cg.add_argument("--kind", choices=["power", "ruler"], default="power")
    cg.add_argument("--phi")
    cg.add_argument("--seed", type=int)
    cg.add_argument("--out")
    cg.set_defaults(func=cmd_coeff_generate)

    un = sub.add_parser("underlying", help="underlying graphs")
    usub = un.add_subparsers(dest="mode", required=True)
    ug = usub.add_parser("generate")
    ug.add_argument("--n", type=int, default=60)
    ug.add_argument("--girth", type=int, default=4)
    ug.add_argument("--attempts", type=int, default=200)
    ug.add_argument("--method", choices=["random", "greedy"], default="random")
    ug.add_argument("--projective", type=int)
    ug.add_argument("--seed", type=int)
    ug.add_argument("--out")
    ug.set_defaults(func=cmd_under_generate)
    ul = usub.add_parser("load")
    ul.add_argument("file")
    ul.set_defaults(func=cmd_under_load)
    return p


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (ValueError, RSConstructionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
