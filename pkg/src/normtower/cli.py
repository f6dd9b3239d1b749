"""Command-line entry point.  Every command writes one JSON report.

Exit codes: 0 success, 1 property failure, 2 budget exhausted, 3 invalid input.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import absgroup, graphs, normtrees, projline, towerlab
from .grouptop import Budget, DEFAULT_NODE_BUDGET, SearchBudgetExceeded

SCHEMA_VERSION = 1

OK, FAILED, BUDGET, INVALID = 0, 1, 2, 3


class InvalidInput(ValueError):
    pass


def _budget(args) -> Budget:
    return Budget(args.budget)


def _family(args, k: int) -> graphs.RigidFamily:
    return graphs.rigid_family(max(k, args.seed_index + 1))


def _seed(args) -> graphs.Graph:
    return _family(args, 1)[args.seed_index]


def cmd_stage(args) -> tuple[dict, bool]:
    b = _budget(args)
    max_stage = towerlab.EXTENDED_MAX_STAGE if args.extended else args.max_stage
    s = towerlab.build_stage(_seed(args), args.n, max_stage, args.method, b)
    if args.tamper:
        s = towerlab.tamper(s)
    rep = towerlab.check_conditions(s, b)
    height = towerlab.stage_tower_height(s)
    out = {
        "stage": s.to_json(),
        "height": height,
        "conditions": rep.to_json(),
        "failed_conditions": rep.failed(),
    }
    ok = height == args.n and rep.passed
    if args.vertex_check:
        v = towerlab.vertex_level_check(s.graph, towerlab.PermGroup.symmetric(s.degree))
        out["vertex_check"] = v
        ok = ok and v
    return out, ok


def cmd_dcons(args) -> tuple[dict, bool]:
    b = _budget(args)
    max_stage = towerlab.EXTENDED_MAX_STAGE if args.extended else args.max_stage
    D = towerlab.build_D(_seed(args), args.n, args.m, max_stage, args.method, b)
    wr = D.tower.levels[args.m] == D.expected_level(args.method) if D.tower.height >= args.m else False
    out = dict(D.to_json(), wreath_level_matches=wr)
    return out, D.tower.height == args.m and wr


def cmd_assemble(args) -> tuple[dict, bool]:
    b = _budget(args)
    fam = _family(args, args.L + 1)
    a = towerlab.assemble_main(fam, args.L, args.alpha, args.method, b)
    t = a.tower(args.method, b)
    sub = towerlab.subtowers(a, args.method, b)
    out = {"assembly": a.to_json(), "height": t.height, "orders": t.orders(), "factor_heights": sub}
    return out, t.height == args.alpha


def cmd_relabel(args) -> tuple[dict, bool]:
    b = _budget(args)
    fam = _family(args, args.L + 1)
    a = towerlab.assemble_main(fam, args.L, args.alpha, args.method, b)
    if args.partition is not None:
        E = json.loads(args.partition)
    elif args.identity:
        E = towerlab.identity_partition(args.L)
    elif args.beta is not None:
        E = towerlab.partition_for(args.L, args.alpha, args.beta)
    else:
        raise InvalidInput("one of --beta, --identity or --partition is required")
    r = towerlab.relabel_by_E(a, E, args.representative, args.method, b)
    out = dict(r.to_json(), alpha=args.alpha, beta=args.beta, L=args.L)
    return out, r.ok


def cmd_tower(args) -> tuple[dict, bool]:
    if args.file:
        with open(args.file) as fh:
            G = absgroup.FiniteGroup.from_json(json.load(fh))
    else:
        G = absgroup.catalog(args.group)
    if not G.is_centreless():
        return {"group": G.name, "order": len(G), "centre_order": len(G.center()), "centreless": False}, False
    r = absgroup.check_tower_equals_normalisers(G, args.bound)
    out = {"group": G.name, "order": len(G), "centreless": True, "tau": r.tau, "check": r.to_json()}
    return out, r.passed


def cmd_graph(args) -> tuple[dict, bool]:
    if args.tree_height is not None:
        t = normtrees.build_normal(args.tree_height)
        g = graphs.encode_tree(t)
        a = graphs.aut_group(g).order()
        out = {"tree": t.to_json(), "graph": g.to_json(), "aut_order": a, "tree_aut_order": normtrees.aut_order(t)}
        return out, a == normtrees.aut_order(t)
    if args.file:
        with open(args.file) as fh:
            g = graphs.Graph.from_json(json.load(fh))
        A = graphs.aut_group(g, _budget(args))
        out = {
            "graph": g.to_json(),
            "aut_order": A.order(),
            "aut_generators": [x.to_json() for x in A.generators],
            "components": graphs.connected_components(g),
            "canonical": graphs.canonical_form(g).to_json(),
        }
        return out, True
    F = graphs.rigid_family(args.family)
    return {"family": F.to_json()}, F.verify()


def _h_order(value: str, q: int) -> int:
    n = projline.GaloisGroup(q).n
    if value == "trivial":
        return 1
    if value == "full":
        return n
    try:
        return int(value)
    except ValueError:
        raise InvalidInput(f"--H must be trivial, full or a divisor of {n}") from None


def cmd_pgl(args) -> tuple[dict, bool]:
    r = projline.verify_semilinear_tower(args.q, _h_order(args.H, args.q), args.method, _budget(args))
    return r.to_json(), r.passed


def cmd_tree(args) -> tuple[dict, bool]:
    if args.file:
        with open(args.file) as fh:
            t = normtrees.Tree.from_json(json.load(fh))
    else:
        t = normtrees.build_normal(args.height)
    if args.extend_to is not None:
        t = normtrees.end_extend(t, args.extend_to)
    v = normtrees.validate_normal(t)
    out = {"tree": t.to_json(), "validation": v.to_json(), "levels": t.level_sizes()}
    ok = v.normal
    if args.extend_iso:
        if t.height == 0:
            raise InvalidInput("isomorphism extension needs a non-empty tree")
        phi = normtrees.root_map(t, t)
        full = normtrees.extend_iso(phi)
        count = sum(1 for _ in normtrees.enumerate_extensions(phi))
        good = normtrees.is_isomorphism(t, t, full)
        out["extension_is_isomorphism"] = good
        out["witness_count"] = count
        ok = ok and good
    return out, ok


COMMANDS = {
    "stage": cmd_stage,
    "dcons": cmd_dcons,
    "assemble": cmd_assemble,
    "relabel": cmd_relabel,
    "tower": cmd_tower,
    "graph": cmd_graph,
    "pgl": cmd_pgl,
    "tree": cmd_tree,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="normtower", description=__doc__, allow_abbrev=False)
    p.add_argument("--out", help="write the report here instead of stdout")
    p.add_argument("--budget", type=int, default=DEFAULT_NODE_BUDGET, help="search node cap")
    p.add_argument("--method", default="auto", choices=["auto", "exhaustive", "backtrack", "crosscheck"])
    p.add_argument("--seed-index", type=int, default=0, help="rigid family member used as seed graph")
    p.add_argument("--max-stage", type=int, default=towerlab.DEFAULT_MAX_STAGE)
    p.add_argument("--extended", action="store_true", help="allow stage 4")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("stage", help="stage groups, tower height and conditions")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--tamper", action="store_true", help="negative control")
    s.add_argument("--vertex-check", action="store_true")

    s = sub.add_parser("dcons", help="tower of the triple product D^n_m")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--m", type=int, required=True)

    s = sub.add_parser("assemble", help="main assembly and its tower")
    s.add_argument("--L", type=int, required=True)
    s.add_argument("--alpha", type=int, required=True)

    s = sub.add_parser("relabel", help="identify seed graphs and recompute the height")
    s.add_argument("--L", type=int, required=True)
    s.add_argument("--alpha", type=int, required=True)
    g = s.add_mutually_exclusive_group()
    g.add_argument("--beta", type=int)
    g.add_argument("--identity", action="store_true")
    g.add_argument("--partition", help="JSON list of classes of 0..L")
    s.add_argument("--representative", choices=["min", "max"], default="min")

    s = sub.add_parser("tower", help="automorphism tower of an abstract group")
    g = s.add_mutually_exclusive_group(required=True)
    g.add_argument("--group", choices=sorted(absgroup.CATALOG_BUILDERS))
    g.add_argument("--file")
    s.add_argument("--bound", type=int, default=absgroup.CATALOG_BOUND)

    s = sub.add_parser("graph", help="rigid family, automorphisms, tree coding")
    g = s.add_mutually_exclusive_group()
    g.add_argument("--family", type=int, default=1)
    g.add_argument("--file")
    g.add_argument("--tree-height", type=int)

    s = sub.add_parser("pgl", help="semilinear tower on the projective line")
    s.add_argument("--q", type=int, required=True)
    s.add_argument("--H", default="trivial")

    s = sub.add_parser("tree", help="normal trees and isomorphism extension")
    g = s.add_mutually_exclusive_group()
    g.add_argument("--height", type=int, default=3)
    g.add_argument("--file")
    s.add_argument("--extend-to", type=int)
    s.add_argument("--extend-iso", action="store_true")
    return p


def run(argv: list[str] | None = None) -> tuple[int, dict, str | None]:
    args = build_parser().parse_args(argv)
    config = {k: v for k, v in sorted(vars(args).items()) if k != "out"}
    report = {"schema_version": SCHEMA_VERSION, "command": args.command, "config": config}
    try:
        result, ok = COMMANDS[args.command](args)
        report.update(status="ok" if ok else "failed", result=result)
        code = OK if ok else FAILED
    except (SearchBudgetExceeded, absgroup.OrderBoundExceeded) as e:
        report.update(status="budget", error=str(e))
        code = BUDGET
    except (ValueError, KeyError, OSError) as e:
        report.update(status="invalid", error=str(e))
        code = INVALID
    return code, report, args.out


def main(argv: list[str] | None = None) -> int:
    try:
        code, report, out = run(argv)
    except SystemExit as e:  # argparse usage errors
        return INVALID if e.code else OK
    text = json.dumps(report, sort_keys=True, indent=2) + "\n"
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
