"""Command-line front door.

Exit codes: 0 pass/success, 1 definitive fail, 2 unknown, 3 validation
error, 4 resource cap.  Results go to stdout (or ``--out``) as canonical
JSON; diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional, Sequence

from . import branch, construct, gog, ret
from .errors import InconsistencyError, ResourceError, StructuralError, ValidationError
from .permgroup import Perm
from .serialize import (SCHEMAS, cover_to_json, datum_from_json, delta_to_dot, dumps, graph_from_json,
                        graph_to_dot, graph_to_json, group_from_json, witness_to_json, cover_from_json)

EXIT_OK, EXIT_FAIL, EXIT_UNKNOWN, EXIT_INVALID, EXIT_RESOURCE = 0, 1, 2, 3, 4


class _Result:
    def __init__(self, payload, code: int = EXIT_OK, text: bool = False):
        self.payload = payload
        self.code = code
        self.text = text


def _load(path: str):
    try:
        if path == "-":
            return json.load(sys.stdin)
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: not valid JSON ({exc})") from None
    except OSError as exc:
        raise ValidationError(f"{path}: {exc.strerror}") from None


def _verdict(command: str, code: int, **fields) -> _Result:
    return _Result(dict(fields, schema=SCHEMAS["verdict"], command=command), code)


def _group_arg(args):
    if getattr(args, "group", None):
        return group_from_json(args.group)
    if getattr(args, "input", None):
        return group_from_json(_load(args.input))
    raise ValidationError("give a group with --group NAME or an input document")


def cmd_check_hm(args):
    ok = ret.hm_condition(datum_from_json(_load(args.input)))
    return _verdict("check-hm", EXIT_OK if ok else EXIT_FAIL, hm=ok)


def cmd_check_mumford_type(args):
    datum = datum_from_json(_load(args.input))
    w = ret.mumford_type_witness(datum, args.p, args.cap)
    return _verdict("check-mumford-type", EXIT_OK if w else EXIT_FAIL, mumford_type=w is not None,
                    witness=witness_to_json(w) if w else None)


def cmd_check_virtual(args):
    report = ret.virtual_mumford_type(datum_from_json(_load(args.input)), args.p, args.cap)
    if report is None:
        return _verdict("check-virtual", EXIT_FAIL, status="absent", report=None)
    code = EXIT_OK if report.status == "certified" else EXIT_UNKNOWN
    return _verdict("check-virtual", code, status=report.status, report=report.as_dict())


def cmd_check_genus_system(args):
    doc = _load(args.input)
    datum = datum_from_json(doc)
    genus = args.genus if args.genus is not None else int(doc.get("genus", 0))
    if "system" in doc:
        system = [Perm.parse(x, datum.group.degree) for x in doc["system"]]
        ok = ret.is_genus_g_system(datum.group, genus, system)
        return _verdict("check-genus-system", EXIT_OK if ok else EXIT_FAIL, genus=genus, system_ok=ok)
    found = ret.exists_genus_g_system(datum.group, genus, datum, args.cap)
    return _verdict("check-genus-system", EXIT_OK if found else EXIT_FAIL, genus=genus,
                    exists=found is not None, system=[str(x) for x in found] if found else None)


def cmd_check_mumford_schwarz(args):
    doc = _load(args.input)
    group = group_from_json(doc["group"]) if "group" in doc else _group_arg(args)
    triple = [Perm.parse(x, group.degree) for x in doc["triple"]]
    flag = ret.mumford_schwarz_check(group, triple, args.p)
    code = {ret.FINITE: EXIT_OK, ret.EXCLUDED: EXIT_FAIL}.get(flag.status, EXIT_UNKNOWN)
    return _verdict("check-mumford-schwarz", code, status=flag.status, p=flag.p)


def cmd_branch_count(args):
    g = graph_from_json(_load(args.input))
    if args.stabilize:
        g = gog.stabilize(g)
    return _Result(dict(branch.branch_count(g).as_dict(), schema=SCHEMAS["branch"]))


def cmd_rh_genus(args):
    sig = [int(x) for x in args.signature.split(",") if x.strip()] if args.signature else []
    h = branch.riemann_hurwitz_genus(args.order, args.genus, sig)
    return _verdict("rh-genus", EXIT_OK, cover_genus=h)


def cmd_hurwitz_dim(args):
    return _verdict("hurwitz-dim", EXIT_OK, dimension=branch.hurwitz_dimension(args.genus, args.n))


def cmd_stabilize(args):
    return _Result(graph_to_json(gog.stabilize(graph_from_json(_load(args.input)))))


def cmd_contract(args):
    g = graph_from_json(_load(args.input))
    gog.require_valid(g)
    return _Result(graph_to_json(gog.contract(g, args.edge)))


def cmd_slide(args):
    g = graph_from_json(_load(args.input))
    gog.require_valid(g)
    e = g.edge(args.edge)
    vertex = g.group_at(e.endpoint(args.end))
    return _Result(graph_to_json(gog.slide(g, args.edge, args.end, Perm.parse(args.conjugator, vertex.degree))))


def cmd_amalgamify(args):
    res = construct.amalgamify(graph_from_json(_load(args.input)))
    return _Result(dict(res.as_dict(), schema=SCHEMAS["graph"] + "+amalgamification",
                        result=graph_to_json(res.result)))


def cmd_subdivide(args):
    return _Result(graph_to_json(construct.subdivide_segment(args.e, args.e_prime, args.p)))


def _cover_result(spec) -> _Result:
    return _Result(cover_to_json(spec), EXIT_OK if spec.valid else EXIT_FAIL)


def cmd_realize(args):
    return _cover_result(construct.realize(_group_arg(args), args.p))


def cmd_realize_full_aut(args):
    return _cover_result(construct.realize_full_aut(_group_arg(args), args.p, args.method))


def cmd_paste(args):
    """Input: {"group": G, "h1": [generators], "h2": [generators]}."""
    doc = _load(args.input)
    group = group_from_json(doc["group"])
    specs = []
    for key in ("h1", "h2"):
        sub = group.subgroup(Perm.parse(x, group.degree) for x in doc[key])
        if sub.order == 1:
            raise ValidationError(f"{key} is trivial")
        specs.append(construct.realize(sub, args.p))
    return _cover_result(construct.harbater_paste(specs[0], specs[1], group))


def cmd_export_dot(args):
    doc = _load(args.input)
    if doc.get("schema") == SCHEMAS["cover"]:
        spec = cover_from_json(doc)
        text = delta_to_dot(spec) if args.delta else graph_to_dot(spec.star_graph)
    else:
        if args.delta:
            raise ValidationError("--delta needs a cover-spec document")
        text = graph_to_dot(graph_from_json(doc))
    return _Result(text, text=True)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mumford-ret", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, inp=True, p=False, group=False):
        sp = sub.add_parser(name)
        if inp:
            sp.add_argument("input", nargs="?" if group else None, help="JSON document ('-' for stdin)")
        if p:
            sp.add_argument("--p", type=int, default=3, help="residue characteristic (prime)")
        if group:
            sp.add_argument("--group", help="group name such as S3, D4, Q8, C2xC4")
        sp.add_argument("--cap", type=int, default=ret.DEFAULT_SEARCH_CAP, help="search cap")
        sp.add_argument("--out", help="write the result here instead of stdout")
        sp.set_defaults(func=func)
        return sp

    add("check-hm", cmd_check_hm)
    add("check-mumford-type", cmd_check_mumford_type, p=True)
    add("check-virtual", cmd_check_virtual, p=True)
    add("check-genus-system", cmd_check_genus_system).add_argument("--genus", type=int)
    add("check-mumford-schwarz", cmd_check_mumford_schwarz, p=True)
    add("branch-count", cmd_branch_count).add_argument("--stabilize", action="store_true")
    sp = add("rh-genus", cmd_rh_genus, inp=False)
    sp.add_argument("--order", type=int, required=True)
    sp.add_argument("--genus", type=int, default=0)
    sp.add_argument("--signature", default="", help="comma-separated orders, e.g. 2,2,3")
    sp = add("hurwitz-dim", cmd_hurwitz_dim, inp=False)
    sp.add_argument("--genus", type=int, required=True)
    sp.add_argument("--n", type=int, required=True)
    add("stabilize", cmd_stabilize)
    add("contract", cmd_contract).add_argument("--edge", type=int, required=True)
    sp = add("slide", cmd_slide)
    sp.add_argument("--edge", type=int, required=True)
    sp.add_argument("--end", choices=[gog.ORIGIN, gog.TERMINAL], required=True)
    sp.add_argument("--conjugator", required=True, help="cycle notation, e.g. '(0 1 2)'")
    add("amalgamify", cmd_amalgamify)
    sp = add("subdivide", cmd_subdivide, inp=False, p=True)
    sp.add_argument("--e", type=int, required=True)
    sp.add_argument("--e-prime", type=int, required=True)
    add("realize", cmd_realize, p=True, group=True)
    add("realize-full-aut", cmd_realize_full_aut, p=True, group=True).add_argument(
        "--method", choices=["genus3", "genus2"], default="genus3")
    add("paste", cmd_paste, p=True)
    add("export-dot", cmd_export_dot).add_argument("--delta", action="store_true",
                                                   help="draw the covering graph of a cover spec")
    return parser


def run(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if getattr(args, "p", None) is not None:
            ret.require_prime(args.p)
        result = args.func(args)
    except ResourceError as exc:
        print(f"resource cap: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except ValidationError as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (InconsistencyError, StructuralError) as exc:
        print(f"failed: {exc}", file=sys.stderr)
        return EXIT_FAIL
    text = result.payload if result.text else dumps(result.payload)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return result.code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
