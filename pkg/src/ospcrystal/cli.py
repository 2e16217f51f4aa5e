"""Command-line front end: `osp <command> ...`.

Every command emits a deterministic JSON report (or DOT/text where asked)
and exits 0 on success, 1 when a verification fails, 2 on usage errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import List, Optional, Tuple

from . import hooktab, pvcrystal, radcrystal
from .pbwalg import pbw_algebra
from .qscalar import Scalar
from .superroot import AlgebraType, roots_report, root_system
from .radcrystal import APPENDIX_CASES


def _algebra(args) -> AlgebraType:
    return AlgebraType(args.type, args.m, args.n)


def _parse_lambda(text: Optional[str]):
    if not text:
        return ()
    return hooktab.normalize_partition(int(x) for x in text.split(","))


def parse_ops(text: str) -> List[Tuple[str, int]]:
    """Parse an operator string like "f1 f1 e3" or "f4^6"."""
    out: List[Tuple[str, int]] = []
    for tok in text.replace(",", " ").split():
        power = 1
        if "^" in tok:
            tok, p = tok.split("^", 1)
            power = int(p)
        if not tok or tok[0] not in "ef":
            raise ValueError("bad operator token %r" % tok)
        i = int(tok[1:])
        out.extend([(tok[0], i)] * power)
    return out


def _emit(args, payload: dict, text: Optional[str] = None) -> int:
    """Write the report; return the exit status."""
    if text is None:
        text = json.dumps(payload, sort_keys=True, indent=2) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0 if payload.get("ok", True) else 1


def _scalar_str(c: Scalar) -> str:
    return c.render()


def _elem_json(A, el) -> list:
    rs = A.rs
    out = []
    for mono, coeff in sorted(el.items()):
        factors = [{"root": [rs.roots[p].i, rs.roots[p].j], "exp": e}
                   for p, e in mono]
        out.append({"monomial": factors, "coeff": coeff.to_pairs(),
                    "coeff_str": _scalar_str(coeff)})
    return out


# -- commands -------------------------------------------------------------------

def cmd_roots(args) -> int:
    g = _algebra(args)
    rep = roots_report(g)
    if args.format == "text":
        lines = ["%3d  (%d,%d)  %-17s %s" %
                 (r["pos"], r["i"], r["j"], r["class"],
                  " ".join(str(x) for x in r["weight"])) for r in rep]
        return _emit(args, {"ok": True}, "\n".join(lines) + "\n")
    return _emit(args, {"algebra": str(g), "roots": rep, "ok": True})


def cmd_commutator(args) -> int:
    g = _algebra(args)
    A = pbw_algebra(g, args.convention)
    rs = A.rs
    ai, aj = (int(x) for x in args.alpha.split(","))
    bi, bj = (int(x) for x in args.beta.split(","))
    pa, pb = rs.upos(ai, aj), rs.upos(bi, bj)
    if pa > pb:
        pa, pb = pb, pa
    el = A.prop_table(pa, pb)
    return _emit(args, {
        "algebra": str(g),
        "alpha": [rs.roots[pa].i, rs.roots[pa].j],
        "beta": [rs.roots[pb].i, rs.roots[pb].j],
        "bracket": _elem_json(A, el),
        "ok": True,
    })


def cmd_crystal_op(args) -> int:
    g = _algebra(args)
    c = radcrystal.array_from_json(g, json.loads(args.element))
    ops = parse_ops(args.ops)
    cur = radcrystal.apply_ops(g, c, ops)
    return _emit(args, {
        "algebra": str(g),
        "input": radcrystal.array_to_json(g, c),
        "ops": args.ops,
        "result": None if cur is None else radcrystal.array_to_json(g, cur),
        "ok": True,
    })


def cmd_tableau(args) -> int:
    g = _algebra(args)
    t = hooktab.tableau_from_json(json.loads(args.tableau))
    if not hooktab.is_hook_semistandard(g, t):
        raise SystemExit2("input is not an (m|n)-hook semistandard tableau")
    cur = t
    for d, i in parse_ops(args.ops):
        if cur is None:
            break
        cur = hooktab.crystal_op(g, i, cur, d)
    return _emit(args, {
        "algebra": str(g),
        "input": hooktab.tableau_to_json(t),
        "ops": args.ops,
        "result": None if cur is None else hooktab.tableau_to_json(cur),
        "ok": True,
    })


def cmd_graph(args) -> int:
    g = _algebra(args)
    lam = _parse_lambda(args.lam)
    G = pvcrystal.build_graph(g, lam, args.max_degree,
                              vertex_cap=args.vertex_cap)
    if args.format == "dot":
        return _emit(args, {"ok": True}, G.to_dot())
    return _emit(args, {"ok": True}, G.to_json() + "\n")


def cmd_hw_scan(args) -> int:
    g = _algebra(args)
    rep = pvcrystal.hw_scan_report(g, _parse_lambda(args.lam), args.max_degree)
    return _emit(args, rep)


def cmd_decompose(args) -> int:
    g = _algebra(args)
    rep = pvcrystal.l_branching(g, args.max_degree)
    return _emit(args, rep)


def cmd_verify(args) -> int:
    what = args.what
    if what != "appendix" and not args.type:
        raise SystemExit2("verify %s requires --type/--m/--n" % what)
    g = _algebra(args) if args.type else None
    if what == "commutators":
        A = pbw_algebra(g, args.convention)
        rep = A.verify_commutators(full=args.full)
    elif what == "adjoint":
        A = pbw_algebra(g, args.convention)
        rep = A.verify_adjoint()
    elif what == "pbw":
        rep = _verify_pbw(g, args.max_degree or 6, args.threads)
    elif what == "lattice":
        rep = _verify_lattice_all(g, args.max_degree or 5, args.convention,
                                  args.threads)
    elif what == "appendix":
        cases = [args.case] if args.case else list(APPENDIX_CASES)
        reps = [radcrystal.verify_appendix(c, args.a_max, args.c_max)
                for c in cases]
        rep = {"cases": reps, "ok": all(r["ok"] for r in reps)}
    elif what == "omega":
        A = pbw_algebra(g)
        rep = A.verify_omega(count=args.count, max_degree=args.max_degree or 5,
                             seed=args.seed)
    else:
        raise SystemExit2("unknown verification %r" % what)
    rep = dict(rep)
    rep.setdefault("command", "verify %s" % what)
    rep.setdefault("algebra", str(g))
    _save_cache(g, args.convention)
    return _emit(args, rep)


def _verify_pbw(g: AlgebraType, max_degree: int, threads: int) -> dict:
    if threads and threads > 1:
        import concurrent.futures as cf
        degs = list(range(1, max_degree + 1))
        with cf.ProcessPoolExecutor(max_workers=threads) as pool:
            reps = list(pool.map(_pbw_worker,
                                 [(g.family, g.m, g.n, d) for d in degs]))
        failed = [f for r in reps for f in r["failed"]]
        return {"weights": sum(r["weights"] for r in reps),
                "failed": failed, "ok": not failed}
    return pbw_algebra(g).pbw_independence(max_degree)


def _pbw_worker(spec) -> dict:
    fam, m, n, d = spec
    A = pbw_algebra(AlgebraType(fam, m, n))
    by_weight = {}
    for mono in A.nmonomials_of_degree(d):
        by_weight.setdefault(A.mono_betasum(mono), []).append(mono)
    from .pbwalg import _sv_rank
    failures = []
    for beta, monos in sorted(by_weight.items()):
        rank = _sv_rank([A.mono_psi(mn) for mn in monos])
        if rank != len(monos):
            failures.append({"weight": list(beta), "monomials": len(monos),
                             "rank": rank})
    return {"weights": len(by_weight), "failed": failures, "ok": not failures}


def _verify_lattice_all(g: AlgebraType, max_degree: int, convention: str,
                        threads: int) -> dict:
    directions = list(range(1, g.rank))
    if threads and threads > 1:
        import concurrent.futures as cf
        with cf.ProcessPoolExecutor(max_workers=threads) as pool:
            reps = list(pool.map(_lattice_worker,
                                 [(g.family, g.m, g.n, i, max_degree,
                                   convention) for i in directions]))
    else:
        reps = [radcrystal.verify_lattice(g, i, max_degree, convention)
                for i in directions]
    failed = [f for r in reps for f in r["failed"]]
    return {"directions": reps, "checked": sum(r["checked"] for r in reps),
            "failed": failed, "ok": not failed}


def _lattice_worker(spec) -> dict:
    fam, m, n, i, max_degree, convention = spec
    return radcrystal.verify_lattice(AlgebraType(fam, m, n), i, max_degree,
                                     convention)


class SystemExit2(SystemExit):
    def __init__(self, message: str):
        sys.stderr.write("error: %s\n" % message)
        super().__init__(2)


# -- persistent memo cache (optional) --------------------------------------------

def _cache_path(g: AlgebraType, convention: str) -> Optional[str]:
    root = os.environ.get("OSP_CACHE_DIR")
    if not root:
        return None
    return os.path.join(root, "tables-%s-%d-%d-%s.json"
                        % (g.family, g.m, g.n, convention))


def _save_cache(g: AlgebraType, convention: str = "bracket-default"):
    path = _cache_path(g, convention)
    if not path:
        return
    A = pbw_algebra(g, convention)
    obj = {}
    for (pa, pb), el in A._table.items():
        obj["%d,%d" % (pa, pb)] = [
            [list(mono), coeff.to_pairs()] for mono, coeff in sorted(el.items())]
    os.makedirs(os.path.dirname(path), exist_ok=True)
    with open(path, "w") as fh:
        json.dump(obj, fh, sort_keys=True)


def _load_cache(g: AlgebraType, convention: str = "bracket-default"):
    path = _cache_path(g, convention)
    if not path or not os.path.exists(path):
        return
    A = pbw_algebra(g, convention)
    with open(path) as fh:
        obj = json.load(fh)
    for key, items in obj.items():
        pa, pb = (int(x) for x in key.split(","))
        el = {}
        for mono, pairs in items:
            el[tuple((int(p), int(e)) for p, e in mono)] = Scalar.from_pairs(pairs)
        A._table[(pa, pb)] = el


# -- parser ----------------------------------------------------------------------

def _add_common(p: argparse.ArgumentParser, need_algebra: bool = True):
    if need_algebra:
        p.add_argument("--type", required=True, choices=("b", "c", "d"))
        p.add_argument("--m", type=int, required=True)
        p.add_argument("--n", type=int, required=True)
    p.add_argument("--convention", default="bracket-default",
                   choices=("bracket-default", "bracket-odd-braces"))
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--out", default=None)
    p.add_argument("--format", default="json", choices=("json", "dot", "text"))


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="osp",
        description="Exact engine for the quantum orthosymplectic radical "
                    "subalgebra and its crystals")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("roots", help="print Phi+(u) in the Lyndon order")
    _add_common(p)
    p.set_defaults(func=cmd_roots)

    p = sub.add_parser("commutator", help="closed q-commutator of two roots")
    _add_common(p)
    p.add_argument("--alpha", required=True, help="pair i,j")
    p.add_argument("--beta", required=True, help="pair i,j")
    p.set_defaults(func=cmd_commutator)

    p = sub.add_parser("crystal-op", help="apply operators to an array")
    _add_common(p)
    p.add_argument("--ops", required=True)
    p.add_argument("--element", required=True, help='JSON {"c": {"i,j": e}}')
    p.set_defaults(func=cmd_crystal_op)

    p = sub.add_parser("tableau", help="apply operators to a tableau")
    _add_common(p)
    p.add_argument("--ops", required=True)
    p.add_argument("--tableau", required=True, help="JSON row arrays")
    p.set_defaults(func=cmd_tableau)

    p = sub.add_parser("graph", help="truncated crystal graph of P(lambda)")
    _add_common(p)
    p.add_argument("--lambda", dest="lam", default="")
    p.add_argument("--max-degree", type=int, required=True)
    p.add_argument("--vertex-cap", type=int, default=500000)
    p.set_defaults(func=cmd_graph)

    p = sub.add_parser("hw-scan", help="scan for e~-killed vertices")
    _add_common(p)
    p.add_argument("--lambda", dest="lam", default="")
    p.add_argument("--max-degree", type=int, required=True)
    p.set_defaults(func=cmd_hw_scan)

    p = sub.add_parser("decompose", help="branching of B(N) up to a degree")
    _add_common(p)
    p.add_argument("--max-degree", type=int, required=True)
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("verify", help="verification suites")
    p.add_argument("what", choices=("commutators", "adjoint", "pbw",
                                    "lattice", "appendix", "omega"))
    _add_common(p)
    p.add_argument("--max-degree", type=int, default=None)
    p.add_argument("--full", action="store_true",
                   help="commutators: compare full shuffle expansions")
    p.add_argument("--case", default=None, choices=APPENDIX_CASES)
    p.add_argument("--a-max", type=int, default=4)
    p.add_argument("--c-max", type=int, default=4)
    p.add_argument("--count", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_verify)

    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        if getattr(args, "type", None):
            g = AlgebraType(args.type, args.m, args.n)
            if os.environ.get("OSP_CACHE_DIR"):
                _load_cache(g, args.convention)
        return args.func(args)
    except (ValueError, KeyError, json.JSONDecodeError) as exc:
        sys.stderr.write("error: %s\n" % exc)
        return 2
    except pvcrystal.GraphSizeError as exc:
        sys.stderr.write("resource error: %s\n" % exc)
        return 2


if __name__ == "__main__":
    sys.exit(main())
