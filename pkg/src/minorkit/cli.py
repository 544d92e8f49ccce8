"""Command-line surface for the toolkit.

Subcommands: ball, minor {find,verify,construct-z2s2,construct-z2xc,
project}, collapse, kpr, rays, vfree-bound.  Output is deterministic
JSON (no timestamps); kpr also offers a per-element CSV dump.

Exit codes: 0 pass, 1 check failed, 2 usage, 3 capacity exceeded,
4 search budget exhausted, 5 insufficient radius.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import __version__, groups, kpr, minors, rays as rays_mod, vfree
from .errors import CapExceeded, RadiusTooSmall, SpecSyntaxError
from .graphs import Graph

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2
EXIT_CAPACITY = 3
EXIT_BUDGET = 4
EXIT_RADIUS = 5


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


def _write_text(path: str | None, text: str):
    if path is None or path == "-":
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _emit(args, payload: dict) -> None:
    doc = {
        "tool": "minorkit",
        "version": __version__,
        "command": args.command if not getattr(args, "subcommand", None)
        else f"{args.command} {args.subcommand}",
        "seed": args.seed,
        "config": {k: v for k, v in vars(args).items()
                   if k not in ("func", "out", "format") and not callable(v)},
    }
    doc.update(payload)
    _write_text(args.out, json.dumps(doc, sort_keys=True, indent=2))


def _load_graph_doc(path: str) -> Graph:
    obj = json.loads(_read_text(path))
    if "graph" in obj:
        obj = obj["graph"]
    return Graph.from_json_obj(obj)


def _host_payload(ball: groups.CayleyBall) -> dict:
    return {"kind": "cayley", "spec": str(ball.spec), "radius": ball.radius}


def _rebuild_host(obj: dict) -> tuple[Graph, groups.CayleyBall | None]:
    host = obj.get("host")
    if host is None:
        raise SpecSyntaxError("document carries no host description")
    if host.get("kind") == "cayley":
        ball = groups.cayley_ball(groups.parse_group_spec(host["spec"]), host["radius"])
        return ball.graph, ball
    return Graph.from_json_obj(host["graph"]), None


# -- subcommand implementations -------------------------------------------------

def cmd_ball(args) -> int:
    spec = groups.parse_group_spec(args.spec)
    ball = groups.cayley_ball(spec, args.radius, cap=args.cap)
    _emit(args, {"graph": ball.graph.to_json_obj(),
                 "host": _host_payload(ball),
                 "num_vertices": ball.graph.n,
                 "num_edges": ball.graph.num_edges})
    return EXIT_OK


def cmd_minor_find(args) -> int:
    host = _load_graph_doc(args.host)
    outcome = minors.find_clique_minor(host, args.m, budget=args.budget, seed=args.seed)
    payload = {"found": outcome.found, "expansions": outcome.expansions,
               "exhausted": outcome.exhausted}
    if outcome.found:
        payload["decomposition"] = outcome.decomposition.to_json_obj()
        _emit(args, payload)
        return EXIT_OK
    _emit(args, payload)
    return EXIT_BUDGET


def cmd_minor_verify(args) -> int:
    obj = json.loads(_read_text(args.decomposition))
    if args.host:
        host, _ = _load_graph_doc(args.host), None
    else:
        host, _ = _rebuild_host(obj)
    bd = minors.BranchDecomposition.from_json_obj(obj["decomposition"], host)
    verdict = minors.verify_minor(host, bd)
    _emit(args, {"verdict": verdict.to_json_obj()})
    return EXIT_OK if verdict.passed else EXIT_CHECK_FAILED


def cmd_minor_construct_z2s2(args) -> int:
    bd = minors.construct_z2_s2_minor(args.m)
    _emit(args, {"decomposition": bd.to_json_obj(),
                 "host": _host_payload(bd.ball)})
    return EXIT_OK


def cmd_minor_construct_z2xc(args) -> int:
    spec = groups.parse_group_spec(args.spec)
    term = spec.term
    s1 = groups.parse_element(term, args.s1)
    s2 = groups.parse_element(term, args.s2)
    s3 = groups.parse_element(term, args.s3)
    bd = minors.construct_z2xc_minor(args.m, spec, s1, s2, s3)
    _emit(args, {"decomposition": bd.to_json_obj(),
                 "host": _host_payload(bd.ball)})
    return EXIT_OK


def cmd_minor_project(args) -> int:
    spec = groups.parse_group_spec(args.spec)
    obj = json.loads(_read_text(args.decomposition))
    ball = groups.cayley_ball(spec, args.host_radius, labels=False)
    bd = minors.BranchDecomposition.from_json_obj(obj["decomposition"], ball.graph)
    bd.ball = ball
    out = minors.project_free_product_minor(spec, ball, bd, debug=args.debug,
                                            factor_radius=args.factor_radius)
    _emit(args, {"decomposition": out.to_json_obj(),
                 "host": _host_payload(out.ball)})
    return EXIT_OK


def cmd_collapse(args) -> int:
    host = _load_graph_doc(args.host)
    obj = json.loads(_read_text(args.classes))
    classes = obj["classes"] if isinstance(obj, dict) else obj
    if len(classes) != host.n:
        print(f"class map covers {len(classes)} of {host.n} vertices", file=sys.stderr)
        return EXIT_USAGE
    try:
        quotient, members = groups.babai_collapse(host, dict(enumerate(classes)))
    except ValueError as exc:
        print(f"collapse failed: {exc}", file=sys.stderr)
        return EXIT_CHECK_FAILED
    _emit(args, {"graph": quotient.to_json_obj(),
                 "members": [sorted(mem) for mem in members]})
    return EXIT_OK


def cmd_kpr(args) -> int:
    if args.host:
        host = _load_graph_doc(args.host)
        boundary = ()
    else:
        if not args.spec:
            print("kpr needs --host or --spec", file=sys.stderr)
            return EXIT_USAGE
        ball = groups.cayley_ball(groups.parse_group_spec(args.spec), args.radius)
        host, boundary = ball.graph, ball.boundary()
    s_list = [int(tok) for tok in args.s.split(",") if tok]
    report = kpr.nagata_witness(host, args.m, s_list, boundary=boundary,
                                j_from_one=args.j_from_one,
                                with_diameters=not args.no_diameters)
    if args.format == "csv":
        lines = ["s,delta,cluster,cluster_size,u_size,diameter"]
        for s in s_list:
            forest = kpr.PartitionForest(host, args.m, s, j_from_one=args.j_from_one)
            cover = forest.cover()
            diam = kpr.cover_diameter_report(host, cover, s)
            for st in diam.elements:
                delta = "(" + " ".join(map(str, st.delta)) + ")"
                lines.append(f"{s},{delta},{st.cluster},{st.cluster_size},"
                             f"{st.u_size},{'' if st.diameter is None else st.diameter}")
        _write_text(args.out, "\n".join(lines) + "\n")
    else:
        _emit(args, {"report": report.to_json_obj()})
    return EXIT_OK if report.passed else EXIT_CHECK_FAILED


def cmd_rays(args) -> int:
    spec = groups.parse_group_spec(args.spec)
    ray_text = _read_text(args.ray_file) if args.ray_file else None
    result = rays_mod.build_minor_from_rays(spec, args.m, args.radius,
                                            ray_source=args.ray_source,
                                            ray_text=ray_text)
    _emit(args, {"decomposition": result.decomposition.to_json_obj(),
                 "host": _host_payload(result.decomposition.ball),
                 "log": result.log})
    return EXIT_OK


def cmd_vfree_bound(args) -> int:
    if args.family == "z":
        structure = vfree.integers_structure()
    elif args.family == "dinfty":
        structure = vfree.infinite_dihedral_structure(enlarged=args.enlarged)
    else:
        print(f"unknown family {args.family!r}", file=sys.stderr)
        return EXIT_USAGE
    report = vfree.virtually_free_bound(structure, args.probe_radius)
    _emit(args, {"report": report.to_json_obj(), "spec": str(structure.spec)})
    return EXIT_OK


# -- parser ----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="minorkit", description=__doc__,
                                formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--version", action="version", version=f"minorkit {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--out", default=None, help="output path (default stdout)")
        sp.add_argument("--format", choices=("json", "csv"), default="json")
        sp.add_argument("--threads", type=int, default=1)

    sp = sub.add_parser("ball", help="write a Cayley-ball graph")
    sp.add_argument("spec")
    sp.add_argument("--radius", type=int, required=True)
    sp.add_argument("--cap", type=int, default=groups.DEFAULT_BALL_CAP)
    common(sp)
    sp.set_defaults(func=cmd_ball)

    mp = sub.add_parser("minor", help="minor search / verification / constructions")
    msub = mp.add_subparsers(dest="subcommand", required=True)

    sp = msub.add_parser("find")
    sp.add_argument("--host", required=True)
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--budget", type=int, default=1_000_000)
    common(sp)
    sp.set_defaults(func=cmd_minor_find)

    sp = msub.add_parser("verify")
    sp.add_argument("--decomposition", default="-")
    sp.add_argument("--host", default=None)
    common(sp)
    sp.set_defaults(func=cmd_minor_verify)

    sp = msub.add_parser("construct-z2s2")
    sp.add_argument("--m", type=int, required=True)
    common(sp)
    sp.set_defaults(func=cmd_minor_construct_z2s2)

    sp = msub.add_parser("construct-z2xc")
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--spec", default="Z^2 x C2")
    sp.add_argument("--s1", default=None)
    sp.add_argument("--s2", default=None)
    sp.add_argument("--s3", default=None)
    common(sp)
    sp.set_defaults(func=cmd_minor_construct_z2xc)

    sp = msub.add_parser("project")
    sp.add_argument("--spec", required=True, help="free-product group spec")
    sp.add_argument("--host-radius", type=int, required=True)
    sp.add_argument("--decomposition", default="-")
    sp.add_argument("--factor-radius", type=int, default=None)
    sp.add_argument("--debug", action="store_true")
    common(sp)
    sp.set_defaults(func=cmd_minor_project)

    sp = sub.add_parser("collapse", help="quotient a graph along connected classes")
    sp.add_argument("--host", required=True)
    sp.add_argument("--classes", required=True)
    common(sp)
    sp.set_defaults(func=cmd_collapse)

    sp = sub.add_parser("kpr", help="cut/partition/cover suite with checks")
    sp.add_argument("--spec", default=None)
    sp.add_argument("--radius", type=int, default=20)
    sp.add_argument("--host", default=None)
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--s", required=True, help="comma-separated scales, e.g. 1,2,3")
    sp.add_argument("--j-from-one", action="store_true",
                    help="start annuli at 4R+delta instead of delta")
    sp.add_argument("--no-diameters", action="store_true")
    common(sp)
    sp.set_defaults(func=cmd_kpr)

    sp = sub.add_parser("rays", help="build a complete-minor witness from rays")
    sp.add_argument("--spec", default="Z^2")
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--radius", type=int, required=True)
    sp.add_argument("--ray-source", choices=("auto", "menger"), default="auto")
    sp.add_argument("--ray-file", default=None)
    common(sp)
    sp.set_defaults(func=cmd_rays)

    sp = sub.add_parser("vfree-bound", help="virtually-free bound computations")
    sp.add_argument("--family", required=True, help="z or dinfty")
    sp.add_argument("--enlarged", action="store_true")
    sp.add_argument("--probe-radius", type=int, default=6)
    common(sp)
    sp.set_defaults(func=cmd_vfree_bound)

    return p


def _fill_z2xc_defaults(args):
    if args.command == "minor" and getattr(args, "subcommand", "") == "construct-z2xc":
        spec = groups.parse_group_spec(args.spec)
        width = sum(groups._flat_widths(spec.term) or [0])
        if args.s1 is None and width >= 3:
            args.s1 = "(" + ",".join("1" if i == 0 else "0" for i in range(width)) + ")"
            args.s2 = "(" + ",".join("1" if i == 1 else "0" for i in range(width)) + ")"
            args.s3 = "(" + ",".join("1" if i == width - 1 else "0" for i in range(width)) + ")"
        if args.s1 is None or args.s2 is None or args.s3 is None:
            raise SpecSyntaxError("construct-z2xc needs --s1/--s2/--s3 for this spec")


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if getattr(args, "threads", 1) < 1:
        print("--threads must be at least 1", file=sys.stderr)
        return EXIT_USAGE
    try:
        _fill_z2xc_defaults(args)
        return args.func(args)
    except SpecSyntaxError as exc:
        print(f"spec error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CapExceeded as exc:
        print(f"capacity exceeded: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except RadiusTooSmall as exc:
        hint = f" (try radius {exc.suggested})" if exc.suggested else ""
        print(f"insufficient radius: {exc}{hint}", file=sys.stderr)
        return EXIT_RADIUS
    except rays_mod.MengerObstruction as exc:
        print(f"obstruction: {exc}; separator {exc.separator}", file=sys.stderr)
        return EXIT_RADIUS
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FileNotFoundError as exc:
        print(f"missing file: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
