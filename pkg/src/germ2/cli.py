"""Command-line entry point ``germ2``.

Exact results print as ``.germ`` text or JSON; numeric results print as JSON
(and CSV on request).  Exit status: 0 success, 1 usage or input error,
2 mathematical precondition failure.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import blowup, dynamics, jets, lie, normalform
from .germio import GermDecl, GermSyntaxError, parse_complex, parse_germ, parse_scalar, render_decl
from .scalar import ScalarError

EXIT_OK, EXIT_USAGE, EXIT_MATH = 0, 1, 2

_MODULE_ERRORS = (
    (jets.JetError, "jets"),
    (lie.LieError, "lie"),
    (blowup.BlowupError, "blowup"),
    (normalform.NormalFormError, "normalform"),
    (dynamics.DynamicsError, "dynamics"),
    (ScalarError, "scalar"),
    (ZeroDivisionError, "scalar"),
)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _load(paths, order, kinds=None) -> list[GermDecl]:
    decls = []
    for p in paths:
        try:
            text = sys.stdin.read() if p == "-" else Path(p).read_text()
        except OSError as exc:
            raise UsageError(f"cannot read {p}: {exc.strerror}") from exc
        try:
            doc = parse_germ(text, order)
        except GermSyntaxError as exc:
            raise UsageError(f"{p}: {exc}") from exc
        decls.extend(doc.decls)
    if kinds is not None:
        decls = [d for d in decls if d.kind in kinds]
    return decls


def _need(decls, count, what):
    if len(decls) < count:
        raise UsageError(f"expected {count} {what} declaration(s), found {len(decls)}")
    return decls[:count]


def _out_germ(name, obj) -> str:
    return render_decl("", name, obj)


def _json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, default=str)


# ---------------------------------------------------------------------------
# command handlers: each returns the text to print


def cmd_parse(a):
    return "\n".join(render_decl(d.kind, d.name, d.obj) for d in _load(a.files, a.order))


def cmd_compose(a):
    F, G = _need(_load(a.files, a.order, {"map"}), 2, "map")
    return _out_germ(f"{F.name}_{G.name}", jets.compose(F.obj, G.obj))


def cmd_invert(a):
    (F,) = _need(_load(a.files, a.order, {"map"}), 1, "map")
    return _out_germ(f"{F.name}_inv", jets.invert(F.obj))


def cmd_exp(a):
    (X,) = _need(_load(a.files, a.order, {"field"}), 1, "field")
    return _out_germ(f"exp_{X.name}", lie.exp_field(X.obj))


def cmd_log(a):
    (F,) = _need(_load(a.files, a.order, {"map"}), 1, "map")
    return _out_germ(f"log_{F.name}", lie.log_diffeo(F.obj))


def cmd_flow_power(a):
    (F,) = _need(_load(a.files, a.order, {"map"}), 1, "map")
    return _out_germ(f"{F.name}_t", lie.flow_power(F.obj, parse_scalar(a.t)))


def cmd_bracket(a):
    X, Y = _need(_load(a.files, a.order, {"field"}), 2, "field")
    return _out_germ(f"br_{X.name}_{Y.name}", lie.lie_bracket(X.obj, Y.obj))


def cmd_commutator(a):
    F, G = _need(_load(a.files, a.order, {"map"}), 2, "map")
    C = lie.group_commutator(F.obj, G.obj)
    fo = jets.flat_order(C)
    return _json({"commutator": _out_germ("C", C), "flat_order": str(fo), "identity": C.is_identity()})


def cmd_order(a):
    (F,) = _need(_load(a.files, a.order, {"map"}), 1, "map")
    n = lie.germ_order(F.obj, a.max)
    return _json({"order": n if n is not None else f"no order <= {a.max}"})


def cmd_average_linearize(a):
    gens = _load(a.files, a.order, {"map"})
    _need(gens, 1, "map")
    return _out_germ("g", lie.average_linearizer([d.obj for d in gens], a.max_group))


def cmd_invariant_field(a):
    (F,) = _need(_load(a.files, a.order, {"map"}), 1, "map")
    (X,) = _need(_load(a.files, a.order, {"field"}), 1, "field")
    return _json({"invariant": lie.is_invariant_field(F.obj, X.obj)})


def cmd_linearize_radial(a):
    (X,) = _need(_load(a.files, a.order, {"field"}), 1, "field")
    return _out_germ("g", lie.linearize_radial(X.obj))


def cmd_dicritic(a):
    (F,) = _need(_load(a.files, a.order, {"map"}), 1, "map")
    info = lie.is_dicritic(F.obj)
    if isinstance(info, jets.Flatness):
        return _json({"result": str(info)})
    return _json({"dicritic": info.dicritic, "k": info.k, "f": str(info.f) if info.f is not None else None})


def cmd_abelian_t(a):
    F, G = _need(_load(a.files, a.order, {"map"}), 2, "map")
    t = lie.abelian_structure(F.obj, G.obj)
    return _json({"t": str(t) if t is not None else "not in flow"})


def cmd_resonances(a):
    rep = lie.find_resonances(parse_scalar(a.l1), parse_scalar(a.l2), a.M)
    return _json(rep.as_dict())


def cmd_sla(a):
    try:
        B = [[int(c) for c in row.split(",")] for row in a.matrix.split(";")]
    except ValueError as exc:
        raise UsageError("matrix rows are ';'-separated lists of integers") from exc
    lam = [str(parse_scalar(c)) for c in a.lam.split(",")]
    return _json({"member": lie.sla_membership(B, lam)})


def cmd_blowup(a):
    decls = _load(a.files, a.order, {"map", "chart"})
    (D,) = _need(decls, 1, "map or chart")
    if D.kind == "chart":
        S = D.obj
        if a.chart != 1:
            raise UsageError("a chart declaration is already in chart 1")
    else:
        S = blowup.blowup_chart1(D.obj) if a.chart == 1 else blowup.blowup_chart2(D.obj)
    if a.transition:
        S = blowup.chart_transition(S)
    if a.json:
        return _json(S.as_dict())
    return render_decl("chart", D.name + "_chart", S)


def cmd_directions(a):
    (F,) = _need(_load(a.files, a.order, {"map"}), 1, "map")
    dd = blowup.direction_data(F.obj)
    dirs = blowup.characteristic_directions(F.obj)
    out = dd.as_dict()
    out["directions"] = str(dirs) if isinstance(dirs, blowup.AllDirections) else [d.as_dict() for d in dirs]
    return _json(out)


def cmd_normal_form(a):
    if a.kind == "1d":
        (h,) = _need(_load(a.files, a.order, {"map1"}), 1, "one-variable map")
        k, lead, mu = normalform.normal_form_1d(h.obj)
        return _json({"k": k, "a": str(lead), "mu": str(mu)})
    (D,) = _need(_load(a.files, a.order, {"map", "chart"}), 1, "map or chart")
    nf = normalform.dicritic_normal_form(D.obj, order=a.x_order)
    return _json(nf.as_dict())


def cmd_lambda(a):
    (D,) = _need(_load(a.files, a.order, {"map", "chart"}), 1, "map or chart")
    v0 = parse_complex(a.v0) if a.numeric_roots else parse_scalar(a.v0)
    inv = normalform.lambda_invariant(D.obj, v0, a.vorder, numeric=a.numeric_roots)
    return _json(inv.as_dict())


def cmd_lagrange(a):
    (D,) = _need(_load(a.files, a.order, {"map", "chart"}), 1, "map or chart")
    L = normalform.lagrange_LF(D.obj, a.vorder, numeric=a.numeric_roots)
    if isinstance(L, list):
        return _json({"coefficients": [[c.real, c.imag] for c in L]})
    return _json({"L": str(L)})


def cmd_residue(a):
    (h,) = _need(_load(a.files, a.order, {"map1"}), 1, "one-variable map")
    k, c = normalform.residue_1d(h.obj)
    return _json({"k": k, "c": str(c)})


def _start(text):
    parts = text.split(",")
    if len(parts) != 2:
        raise UsageError("--start takes two comma-separated coordinates")
    return tuple(parse_complex(p) for p in parts)


def cmd_orbit(a):
    (F,) = _need(_load(a.files, a.order, {"map"}), 1, "map")
    orbit = dynamics.iterate_orbit(F.obj, _start(a.start), a.n, a.escape)
    if a.csv:
        p = blowup.direction_data(F.obj).p if isinstance(jets.flat_order(F.obj), int) else None
        orbit.write_csv(a.csv, p)
    return _json(orbit.summary())


def cmd_seq1(a):
    (F,) = _need(_load(a.files, a.order, {"map"}), 1, "map")
    return _json(dynamics.seq1_check(F.obj, _start(a.start), a.n).as_dict())


def cmd_flower(a):
    (F,) = _need(_load(a.files, a.order, {"map"}), 1, "map")
    R = a.R if a.R == "auto" else float(a.R)
    rep = dynamics.flower_verify(F.obj, a.samples, a.n, R, a.r, seed=a.seed)
    if a.csv:
        rep.write_csv(a.csv)
    return _json(rep.as_dict())


def cmd_classify_roots(a):
    (F,) = _need(_load(a.files, a.order, {"map"}), 1, "map")
    res = dynamics.classify_characteristic_roots(F.obj, a.tolerance, a.probes, a.n, seed=a.seed)
    return _json([r.as_dict() for r in res])


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    def flags(suppress):
        # subcommands accept the global flags too; SUPPRESS keeps them from
        # overwriting values given before the subcommand name
        d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
        g = argparse.ArgumentParser(add_help=False)
        g.add_argument("--order", type=int, default=d(None), help="truncation order N for parsed germs")
        g.add_argument("--seed", type=int, default=d(0), help="sampling seed")
        g.add_argument("--json", action="store_true", default=d(False), help="JSON output where both forms exist")
        g.add_argument("--csv", default=d(None), help="CSV output path (orbit)")
        g.add_argument("--numeric-roots", action="store_true", default=d(False), help="allow floating-point roots")
        return g

    common = flags(True)
    ap = _Parser(prog="germ2", description="Exact jet computations for plane diffeomorphism germs.",
                 parents=[flags(False)])
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, fn, help_, files=True):
        p = sub.add_parser(name, help=help_, parents=[common])
        if files:
            p.add_argument("files", nargs="+", help=".germ input files ('-' for stdin)")
        p.set_defaults(fn=fn)
        return p

    add("parse", cmd_parse, "parse and re-render in canonical form")
    add("compose", cmd_compose, "F o G")
    add("invert", cmd_invert, "compositional inverse")
    add("exp", cmd_exp, "time-one flow of a flat field")
    add("log", cmd_log, "infinitesimal generator of a tangent-to-identity map")
    add("flow-power", cmd_flow_power, "exp(t log F)").add_argument("--t", required=True)
    add("bracket", cmd_bracket, "Lie bracket of two fields")
    add("commutator", cmd_commutator, "group commutator F G F^-1 G^-1")
    add("order", cmd_order, "finite order of a germ").add_argument("--max", type=int, default=24)
    add("average-linearize", cmd_average_linearize, "linearizer of a finite group").add_argument(
        "--max-group", type=int, default=64)
    add("invariant-field", cmd_invariant_field, "is F_* X = X")
    add("linearize-radial", cmd_linearize_radial, "straighten a field with radial linear part")
    add("dicritic", cmd_dicritic, "dicritic test")
    add("abelian-t", cmd_abelian_t, "t with G = F^t")
    p = add("resonances", cmd_resonances, "resonance relations", files=False)
    p.add_argument("l1")
    p.add_argument("l2")
    p.add_argument("M", type=int)
    p = add("sla", cmd_sla, "SL_A membership", files=False)
    p.add_argument("--matrix", required=True, help="rows separated by ';', entries by ','")
    p.add_argument("--lambda", dest="lam", required=True, help="comma-separated rationals")
    p = add("blowup", cmd_blowup, "chart series of a germ")
    p.add_argument("--chart", type=int, choices=(1, 2), default=1)
    p.add_argument("--transition", action="store_true", help="rewrite chart 1 in chart 2")
    add("directions", cmd_directions, "p, r and characteristic directions")
    p = add("normal-form", cmd_normal_form, "dicritic normal form or 1-D normal form", files=False)
    p.add_argument("kind", choices=("dicritic", "1d"))
    p.add_argument("files", nargs="+", help=".germ input files ('-' for stdin)")
    p.add_argument("--x-order", type=int, default=None)
    p = add("lambda", cmd_lambda, "local invariant at a root of r")
    p.add_argument("--v0", required=True)
    p.add_argument("--vorder", type=int, default=4)
    add("lagrange", cmd_lagrange, "interpolation polynomial of the local invariants").add_argument(
        "--vorder", type=int, default=4)
    add("residue", cmd_residue, "residue of a one-variable germ")
    p = add("orbit", cmd_orbit, "iterate an orbit")
    p.add_argument("--start", required=True)
    p.add_argument("--n", type=int, default=10_000)
    p.add_argument("--escape", type=float, default=1.0)
    p = add("seq1", cmd_seq1, "check 1/(n x_n^k) -> -k p(v)")
    p.add_argument("--start", required=True)
    p.add_argument("--n", type=int, default=10_000)
    p = add("flower", cmd_flower, "sector convergence fractions for a dicritic germ")
    p.add_argument("--samples", type=int, default=500)
    p.add_argument("--n", type=int, default=10_000)
    p.add_argument("--R", default="auto")
    p.add_argument("--r", type=float, default=0.5)
    p = add("classify-roots", cmd_classify_roots, "orientation of characteristic roots")
    p.add_argument("--tolerance", type=float, default=1e-6)
    p.add_argument("--probes", type=int, default=50)
    p.add_argument("--n", type=int, default=4000)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        out = args.fn(args)
    except (UsageError, GermSyntaxError) as exc:
        print(f"germ2: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:
        for cls, mod in _MODULE_ERRORS:
            if isinstance(exc, cls):
                print(f"germ2: error[{mod}]: {exc}", file=sys.stderr)
                return EXIT_MATH
        raise
    if out:
        sys.stdout.write(out if out.endswith("\n") else out + "\n")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
