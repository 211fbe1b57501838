"""Command line interface.

Exit status: 0 on success, 1 when a verification fails, 2 on bad input.
"""
from __future__ import annotations

import argparse
import json
import sys
import time

import numpy as np

from . import means
from .exactlin import FieldPrime, format_vector, parse_subspace, rank, unrank
from .monoid import (
    ALL_CHECKS,
    ConstructionState,
    classify,
    factor,
    star,
    verify_axioms,
    write_trace,
)
from .ordmset import format_multiset


class InputError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(2, f"{self.prog}: error: {message}\n")


def _emit(args, text: str, data: dict) -> None:
    if args.format == "machine":
        print(json.dumps(data, sort_keys=True))
    else:
        print(text)


def _field(args) -> FieldPrime:
    try:
        return FieldPrime(args.p)
    except ValueError as exc:
        raise InputError(str(exc)) from None


def _subspace(text, F):
    try:
        return parse_subspace(text, F)
    except ValueError as exc:
        raise InputError(str(exc)) from None


def _generators(U) -> str:
    return ";".join(format_vector(r, U.field) for r in U.rows) or "0"


def cmd_rank(args) -> int:
    F = _field(args)
    U = _subspace(args.subspace, F)
    if not U.rows:
        raise InputError("the zero subspace has no id")
    r = rank(U)
    _emit(args, str(r), {"id": r, "subspace": str(U)})
    return 0


def cmd_unrank(args) -> int:
    F = _field(args)
    if args.id < 0:
        raise InputError("ids are non-negative")
    U = unrank(args.id, F)
    _emit(args, _generators(U), {"id": args.id, "subspace": str(U), "generators": _generators(U)})
    return 0


def cmd_star(args) -> int:
    F = _field(args)
    A, B = _subspace(args.lhs, F), _subspace(args.rhs, F)
    st = ConstructionState(F, keep_log=False)
    P = star(st, A, B)
    fac = factor(st, P)
    pid = P.id if P.rows else None
    head = f"{P} (id {pid})" if pid is not None else f"{P}"
    _emit(
        args,
        f"{head}\nfactors: {format_multiset(fac)}",
        {"subspace": str(P), "id": pid, "factors": format_multiset(fac)},
    )
    return 0


def cmd_factor(args) -> int:
    F = _field(args)
    U = _subspace(args.subspace, F)
    st = ConstructionState(F, keep_log=False)
    fac = factor(st, U)
    kind = classify(st, U).value
    _emit(args, f"{format_multiset(fac)}\nclass: {kind}", {"factors": format_multiset(fac), "class": kind})
    return 0


def cmd_classify(args) -> int:
    F = _field(args)
    if args.id < 0:
        raise InputError("ids are non-negative")
    st = ConstructionState(F, keep_log=False)
    kind = classify(st, unrank(args.id, F)).value
    _emit(args, kind, {"id": args.id, "class": kind})
    return 0


def cmd_trace(args) -> int:
    F = _field(args)
    if args.steps < 0:
        raise InputError("steps must be non-negative")
    st = ConstructionState(F)
    if args.out == "-":
        digest = write_trace(st, args.steps, sys.stdout)
        return 0
    digest = write_trace(st, args.steps, args.out)
    _emit(args, f"{args.steps} steps written to {args.out}\nsha256 {digest}", {"steps": args.steps, "sha256": digest})
    return 0


def cmd_verify(args) -> int:
    F = _field(args)
    checks = [c.strip() for c in args.checks.split(",") if c.strip()]
    bad = [c for c in checks if c not in ALL_CHECKS]
    if bad:
        raise InputError(f"unknown checks: {', '.join(bad)}")
    st = ConstructionState(F, keep_log=False)
    deadline = None if args.budget is None else time.monotonic() + args.budget
    rep = verify_axioms(st, args.max_id, checks, triple_max_id=args.triple_max_id, deadline=deadline)
    data = {
        "max_id": args.max_id,
        "counts": rep.counts,
        "failures": [[c, str(w)] for c, w in rep.failures],
        "complete": rep.complete,
        "schedule_steps": st.cursor,
        "pass": rep.ok,
    }
    _emit(args, rep.summary() + f"\nschedule steps processed: {st.cursor}", data)
    return 0 if rep.ok else 1


def _parse_shift(text: str, k: int) -> list[int]:
    s = [0] * k
    text = text.strip().replace("-", "+-")
    for term in text.split("+"):
        term = term.strip()
        if not term:
            continue
        sign = 1
        if term.startswith("-"):
            sign, term = -1, term[1:]
        coef = 1
        if "*" in term:
            c, term = term.split("*", 1)
            coef = int(c)
        if not term.startswith("e") or not term[1:].isdigit():
            raise InputError(f"bad shift term {term!r}")
        i = int(term[1:])
        if not 1 <= i <= k:
            raise InputError(f"shift coordinate e{i} outside 1..{k}")
        s[i - 1] += sign * coef
    return s


def cmd_mean(args) -> int:
    try:
        group = means.parse_group(args.group)
        f = means.parse_fn(args.fn, group)
    except (ValueError, KeyError) as exc:
        raise InputError(str(exc)) from None
    if group.kind != "Zk":
        f = means.lift_abs(f)
    shifts = [_parse_shift(s, group.k) for s in args.shifts.split(",") if s.strip()] if args.shifts else []
    rep = means.mean_report(f, args.n, shifts)
    lines = [f"n = {rep.n}", "value = " + " ".join(f"{x:.12g}" for x in rep.value)]
    for d in rep.defects:
        lines.append(f"shift {d['shift']}: defect {d['defect']:.6e} bound {d['bound']:.6e}")
    _emit(args, "\n".join(lines), rep.as_dict())
    return 0


def _matrix(text: str) -> list[list[int]]:
    return [[int(x) for x in row.split(":")] for row in text.split("/")]


def _lemma(name: str, kv: dict) -> tuple[bool, dict]:
    g = lambda key, default: kv.get(key, default)
    if name == "groth-decomposition":
        k, i, n = int(g("k", 2)), int(g("i", 1)), int(g("n", 6))
        f = means.random_fn(int(g("seed", 0)), int(g("support", 4)), means.LatticeGroup("Nk", k))
        res = means.check_groth_decomposition(f, i, n)
        return res.ok, {"witness": res.witness, "detail": res.detail}
    if name == "kernel-bound":
        k, i, c, n = int(g("k", 2)), int(g("i", 1)), int(g("c", 0)), int(g("n", 10))
        f = means.slab_indicator(i, c, means.LatticeGroup("Zk", k))
        measured, bound = means.kernel_mean_bound(f, n, i, c)
        return measured <= bound * (1 + means.TOL), {"measured": measured, "bound": bound}
    if name == "disjoint-support":
        k, i, m, n = int(g("k", 2)), int(g("i", 1)), int(g("m", 3)), int(g("n", 5))
        f = means.slab_indicator(i, 0, means.LatticeGroup("Zk", k))
        return means.disjoint_support_translates(f, i, m, n), {}
    if name == "zero-semigroup":
        order = int(g("order", 3))
        tables = means.semigroup_tables(order, zero=True)
        rng = np.random.default_rng(int(g("seed", 0)))
        for t in tables:
            vals = rng.integers(-5, 6, size=(len(t), 2))
            _, chk = means.zero_semigroup_mean(t, vals)
            if not chk.ok:
                return False, {"table": t, "witness": chk.witness}
        return True, {"tables": len(tables)}
    if name == "coset":
        moduli = [int(x) for x in g("moduli", "2").split("x")]
        k = len(moduli)
        n = int(g("n", 6))
        f = means.random_fn(int(g("seed", 0)), int(g("support", 6)), means.LatticeGroup("Zk", k))
        ext = means.coset_extension(f, moduli)
        pts = means.box(n, k)
        m = np.asarray(moduli)
        ok = np.array_equal(ext(pts), f(pts - np.mod(pts, m)))
        onH = pts[(np.mod(pts, m) == 0).all(axis=1)]
        ok = ok and np.array_equal(ext(onH), f(onH))
        return bool(ok), {}
    if name == "quotient":
        P = np.asarray(_matrix(g("proj", "1:0")))
        j, k = P.shape
        n = int(g("n", 5))
        f = means.random_fn(int(g("seed", 0)), int(g("support", 4)), means.LatticeGroup("Zk", j))
        pb = means.quotient_pullback(f, P)
        pts = means.box(n, k)
        return bool(np.array_equal(pb(pts), f(pts @ P.T))), {}
    if name == "iso":
        U = np.asarray(_matrix(g("U", "1:1/0:1")))
        k = U.shape[0]
        n = int(g("n", 5))
        f = means.random_fn(int(g("seed", 0)), int(g("support", 4)), means.LatticeGroup("Zk", k))
        h = means.iso_transfer(f, U)
        pts = means.box(n, k)
        return bool(np.array_equal(h(pts), f(pts @ U.T))), {}
    raise InputError(f"unknown lemma {name!r}")


def cmd_lemma(args) -> int:
    kv = {}
    if args.params:
        for part in args.params.split(","):
            if "=" not in part:
                raise InputError(f"expected key=value, got {part!r}")
            k, v = part.split("=", 1)
            kv[k.strip()] = v.strip()
    try:
        ok, info = _lemma(args.name, kv)
    except means.PreconditionError as exc:
        ok, info = False, {"error": str(exc), "witness": exc.witness}
    except (ValueError, KeyError) as exc:
        raise InputError(str(exc)) from None
    text = ("pass" if ok else "fail") + "".join(f"\n{k}: {v}" for k, v in info.items())
    _emit(args, text, {"lemma": args.name, "pass": ok, **{k: _jsonable(v) for k, v in info.items()}})
    return 0 if ok else 1


def _jsonable(v):
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.floating,)):
        return float(v)
    if isinstance(v, tuple):
        return list(v)
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=["text", "machine"], default="text")
    fieldopt = argparse.ArgumentParser(add_help=False)
    fieldopt.add_argument("--p", type=int, default=2, help="field characteristic (prime)")

    ap = _Parser(prog="finmonoid", description="Free commutative monoid on subspaces of GF(p)^(inf).")
    sub = ap.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    s = sub.add_parser("rank", parents=[common, fieldopt], help="id of a subspace")
    s.add_argument("--subspace", required=True)
    s.set_defaults(func=cmd_rank)

    s = sub.add_parser("unrank", parents=[common, fieldopt], help="subspace with a given id")
    s.add_argument("--id", type=int, required=True)
    s.set_defaults(func=cmd_unrank)

    s = sub.add_parser("star", parents=[common, fieldopt], help="product of two subspaces")
    s.add_argument("--lhs", required=True)
    s.add_argument("--rhs", required=True)
    s.set_defaults(func=cmd_star)

    s = sub.add_parser("factor", parents=[common, fieldopt], help="prime factorization")
    s.add_argument("--subspace", required=True)
    s.set_defaults(func=cmd_factor)

    s = sub.add_parser("classify", parents=[common, fieldopt], help="prime (P) or composite (Q)")
    s.add_argument("--id", type=int, required=True)
    s.set_defaults(func=cmd_classify)

    s = sub.add_parser("trace", parents=[common, fieldopt], help="write a construction trace")
    s.add_argument("--steps", type=int, required=True)
    s.add_argument("--out", required=True, help="output file, or - for stdout")
    s.set_defaults(func=cmd_trace)

    s = sub.add_parser("verify", parents=[common, fieldopt], help="check the monoid laws on a prefix")
    s.add_argument("--max-id", type=int, required=True)
    s.add_argument("--checks", default=",".join(ALL_CHECKS))
    s.add_argument("--triple-max-id", type=int, default=None, help="id bound for associativity triples")
    s.add_argument("--budget", type=float, default=None, help="time budget in seconds")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("mean", parents=[common], help="box mean and translation defects")
    s.add_argument("--group", required=True, help="Z<k> or N<k>")
    s.add_argument("--fn", required=True)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--shifts", default="")
    s.set_defaults(func=cmd_mean)

    s = sub.add_parser("lemma", parents=[common], help="exact check of a transfer identity")
    s.add_argument(
        "--name",
        required=True,
        choices=["groth-decomposition", "kernel-bound", "disjoint-support", "zero-semigroup", "coset", "quotient", "iso"],
    )
    s.add_argument("--params", default="")
    s.set_defaults(func=cmd_lemma)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"finmonoid: error: {exc}", file=sys.stderr)
        return 2


def run(argv) -> int:
    """Run the CLI on an argument list; returns the exit status."""
    try:
        return main(argv)
    except SystemExit as exc:
        return int(exc.code or 0)


if __name__ == "__main__":
    sys.exit(main())
