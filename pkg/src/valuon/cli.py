"""valuon command line: rings, Gamma tables, valuation checks, tropicalization,
hom classification, tropical matrix closure, abelianization and congruences.

Exit codes: 0 success, 1 domain error, 2 usage or parse error. With
``--format machine`` every command prints a schema line followed by the
line-based formats of the library modules; ``read_machine`` parses it back.
"""
from __future__ import annotations

import argparse
import dataclasses
import random
import sys
from fractions import Fraction

from . import gamma as gm
from . import linalg as la
from . import poly
from . import ring as rg
from . import semiring as sr
from .errors import ArgumentError, ParseError, ValuonError

SCHEMA = "valuon-schema 1"


# --- helpers -----------------------------------------------------------------


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise ArgumentError(f"cannot read {path}: {exc.strerror}") from None


def _ring_options(p: argparse.ArgumentParser, required: bool = True):
    g = p.add_argument_group("ring selection")
    x = g.add_mutually_exclusive_group(required=required)
    x.add_argument("--cyclic", type=int, metavar="N", help="Z/N")
    x.add_argument("--field", type=int, metavar="Q", help="finite field with Q elements")
    x.add_argument("--upper-triangular", type=int, metavar="N", help="upper triangular NxN matrices over --base")
    x.add_argument("--matrix", type=int, metavar="N", help="all NxN matrices over --base")
    x.add_argument("--product", nargs=2, metavar="SPEC", help="product of two ring specs")
    x.add_argument("--ring-spec", metavar="SPEC", help="z<n>, f<q>, ut<n>:<base>, mat<n>:<base>, r8, A*B")
    x.add_argument("--ring-file", metavar="PATH", help="ring file")
    g.add_argument("--base", default="z2", metavar="SPEC", help="base ring for matrix rings (default z2)")
    return x


def select_ring(args, validate: bool = True) -> rg.FiniteRing:
    if args.cyclic is not None:
        if args.cyclic < 1:
            raise ArgumentError("--cyclic needs N >= 1")
        return rg.cyclic(args.cyclic)
    if args.field is not None:
        p, k = rg.prime_power(args.field)
        return rg.finite_field(p, k)
    if args.upper_triangular is not None:
        R = rg.upper_triangular(rg.parse_ring_spec(args.base), args.upper_triangular)
        if args.upper_triangular == 2 and args.base.strip().lower() in ("z2", "f2"):
            R.name = "R8"
        return R
    if args.matrix is not None:
        return rg.matrix_ring(rg.parse_ring_spec(args.base), args.matrix)
    if args.product is not None:
        return rg.product(rg.parse_ring_spec(args.product[0]), rg.parse_ring_spec(args.product[1]))
    if args.ring_spec is not None:
        return rg.parse_ring_spec(args.ring_spec)
    if args.ring_file is not None:
        R = rg.parse_ring(_read(args.ring_file), validate=validate)
        return R
    raise ArgumentError("no ring selected")


def _yes(b: bool) -> str:
    return "yes" if b else "no"


def _show_point(show, z) -> str:
    return show(z[0]) if len(z) == 1 else "(" + ", ".join(show(x) for x in z) + ")"


# --- subcommands -------------------------------------------------------------


def cmd_ring(args, out):
    R = select_ring(args, validate=not args.validate)
    if args.validate:
        report = R.law_report()
        for law, witness in report:
            line = f"{law}: {'pass' if witness is None else 'fail'}"
            if witness is not None:
                line += " at " + " ".join(R.show(i) for i in witness)
            out.append(line)
        ok = all(w is None for _, w in report)
        out.append(f"ring: {_yes(ok)}")
        return 0 if ok else 1
    if args.format == "human":
        out.append(f"# {R.name}: {R.n} elements, zero {R.show(R.zero)}, one {R.show(R.one)}")
        out.append("# elements: " + " ".join(R.labels))
    out.append(rg.format_ring(R).rstrip("\n"))
    return 0


def cmd_gamma(args, out):
    R = select_ring(args)
    G = gm.enumerate_gamma(R)
    if args.singletons:
        out.append(gm.format_singleton_table(G).rstrip("\n"))
        return 0
    if args.format == "machine":
        out.append(gm.format_gamma(G).rstrip("\n"))
        return 0
    out.append(f"Gamma({R.name}): {len(G)} classes")
    for k, g in enumerate(G):
        out.append(f"g{k} = {g}  span {{{', '.join(R.show(x) for x in g)}}}")
    out.append("add:")
    out += [" ".join(f"g{c}" for c in row) for row in G.add_table]
    out.append("mul:")
    out += [" ".join(f"g{c}" for c in row) for row in G.mul_table]
    return 0


def _valuation_target(args):
    """(domain, semiring, nu, mode, elements) for the val command."""
    spec = args.valuation
    mode = args.mode
    if spec.startswith("padic:"):
        p = _int_arg(spec[6:], "prime")
        return rg.RATIONALS, sr.TROPICAL, gm.padic_valuation(p), mode, None
    if spec == "gammaq":
        return rg.RATIONALS, gm.GAMMA_Q, gm.nu_gammaQ, mode, None
    R = select_ring(args)
    if spec == "universal":
        G = gm.enumerate_gamma(R)
        return R, G.semiring, lambda a: gm.nu_universal(R, a), mode, None
    if spec == "ideal":
        S, nu = gm.ideal_valuation(R)
        return R, S, nu, mode, None
    if spec == "solutions":
        names = [f"x{i}" for i in range(args.vars)] if args.vars > 1 else ["x"]
        rng = random.Random(args.seed)
        exprs = [poly.random_expression(rng, R, names) for _ in range(args.cases)]
        D = poly.ExpressionDomain(R, names, exprs)
        D.elements = [D.zero, D.one] + D.elements
        S, nu = poly.solution_set_valuation(R, names)
        return D, S, nu, mode, None
    raise ArgumentError(f"unknown valuation {spec!r} (universal, ideal, solutions, padic:<p>, gammaq)")


def _int_arg(text: str, what: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise ArgumentError(f"bad {what} {text!r}") from None


def cmd_val(args, out):
    if args.rep is not None:
        if args.prime is None:
            raise ArgumentError("--rep needs --prime")
        rep = la.parse_rep(_read(args.rep), args.prime)
        nu_map, report = la.rep_to_valuation(rep, max_word=args.word_length)
        for label, m in nu_map.items():
            out.append(la.format_matrix(m, "tropical", label=label).rstrip("\n"))
        out += report.lines()
        return 0
    domain, S, nu, mode, elements = _valuation_target(args)
    report = gm.check_valuation(domain, S, nu, mode=mode, elements=elements, seed=args.seed, cases=args.cases)
    out += report.lines()
    return 0


_INF_LOOKUP = {"inf": sr.INF}.get


def _machine_ctx(S, G=None):
    """Copy of a coefficient handle whose show/lookup use parseable names."""
    if G is not None:
        labels = {g: f"g{k}" for k, g in enumerate(G)}
        by_label = {f"g{k}": g for k, g in enumerate(G)}
        return dataclasses.replace(S, show=labels.__getitem__, lookup=by_label.get)
    return dataclasses.replace(S, lookup=_INF_LOOKUP)


def _trop_domain(args, S):
    if args.domain is None:
        return [-3, -2, -1, 0, 1, 2, 3, sr.INF]
    try:
        return [sr.parse_number(t) for t in args.domain.split(",")]
    except (ValueError, ZeroDivisionError):
        raise ArgumentError(f"bad domain {args.domain!r}") from None


def cmd_trop(args, out):
    text = _read(args.file) if args.file else args.expression
    if text is None:
        raise ArgumentError("give an expression or --file")
    text = text.strip()
    machine = args.format == "machine"
    if args.rationals:
        ctx = rg.RATIONALS
        if args.valuation == "universal":
            S, nu, G = gm.GAMMA_Q, gm.nu_gammaQ, None
        elif args.valuation.startswith("padic:"):
            S, nu, G = sr.TROPICAL, gm.padic_valuation(_int_arg(args.valuation[6:], "prime")), None
        else:
            raise ArgumentError(f"unknown valuation {args.valuation!r}")
        if args.roots:
            raise ArgumentError("--roots needs a finite ring")
    else:
        ctx = select_ring(args)
        if args.valuation != "universal":
            raise ArgumentError("over a finite ring only the universal valuation is available")
        G = gm.enumerate_gamma(ctx)
        S = G.semiring
        R = ctx
        nu = lambda a: gm.nu_universal(R, a)  # noqa: E731
    if args.vars:
        variables = args.vars.split(",")
    else:
        variables = [n for n in poly.expression_names(text) if ctx.lookup(n) is None]
    f = poly.parse_expression(text, ctx, variables)
    t = poly.tropicalize(f, nu, S)
    if machine and S is not gm.GAMMA_Q:
        mctx = _machine_ctx(S, G)
        t = poly.Expression(mctx, t.monomials, t.variables, multiset=True, flags=t.flags)
        show = mctx.show
    else:
        show = S.show
    out.append(f"trop: {t}")
    if "degenerate" in t.flags:
        out.append("warning: degenerate valuation (a nonzero coefficient valued to 0)")
    if G is not None:
        domain = list(G) if args.full_gamma else G.singletons()
    elif S is sr.TROPICAL:
        domain = _trop_domain(args, S)
    else:
        domain = None
    if domain is not None:
        pts = poly.crease_points(t, domain)
        out.append(" ".join(["crease:"] + [_show_point(show, z) for z in pts]))
    if args.roots:
        rep = poly.root_crease_check(f, nu, S)
        out.append(" ".join(["roots:"] + [_show_point(ctx.show, z) for z in rep.roots]))
        if rep.ok:
            out.append("verdict: all roots crease")
        else:
            out.append("verdict: violations " + " ".join(_show_point(ctx.show, z) for z in rep.violations))
            return 1
    return 0


def _parse_assignment(items):
    values = {}
    for item in items:
        key, sep, val = item.partition("=")
        if not sep:
            raise ArgumentError(f"expected <prime>=<value>, got {item!r}")
        p = _int_arg(key, "prime")
        try:
            c = Fraction(val)
        except (ValueError, ZeroDivisionError):
            raise ArgumentError(f"bad value {val!r}") from None
        values[p] = c
    return values


def cmd_hom(args, out):
    values = _parse_assignment(args.assignment)
    verdict = gm.classify_trop_hom(values)
    out.append(str(verdict))
    return 0


def cmd_star(args, out):
    S, A = la.parse_matrix(_read(args.file))
    X = la.least_fixed_point(S, A)
    name = "minmax" if S is sr.MINMAX else "tropical"
    out.append(la.format_matrix(X, name).rstrip("\n"))
    if S is sr.MINMAX:
        try:
            ok, w = la.is_ultrametric(A)
            out.append("input ultrametric: " + _yes(ok) + ("" if ok else " witness " + " ".join(map(str, w))))
        except ValuonError as exc:
            out.append(f"input ultrametric: no ({exc})")
        try:
            ok, w = la.is_ultrametric(X)
            out.append("closure ultrametric: " + _yes(ok) + ("" if ok else " witness " + " ".join(map(str, w))))
        except ValuonError as exc:
            out.append(f"closure ultrametric: no ({exc})")
    return 0


def cmd_ab(args, out):
    R = select_ring(args)
    report = gm.abelianization_correspondence(R)
    out.append(str(report))
    if report.reason and args.format == "human":
        out.append(report.reason)
    return 0


def _element_arg(S, text: str):
    if S.lookup is not None:
        x = S.lookup(text)
        if x is not None:
            return x
    try:
        i = int(text)
    except ValueError:
        raise ArgumentError(f"unknown element {text!r}") from None
    if not 0 <= i < len(S.elements):
        raise ArgumentError(f"element index {i} out of range")
    return S.elements[i]


def named_semiring(name: str) -> sr.Semiring:
    """boolean | powerset:z<k> | powerset:<monoid file> | gamma:<ring spec>;
    the infinite instances are named for a clear error."""
    if name == "boolean":
        return sr.BOOLEAN
    if name in ("tropical", "minmax", "gcdq", "padicvec"):
        raise ArgumentError(f"{name} has an infinite carrier; congruence closure needs a finite one")
    kind, sep, rest = name.partition(":")
    if sep and kind == "powerset":
        if rest.startswith("z") and rest[1:].isdigit():
            return sr.powerset_semiring(sr.Monoid.cyclic(int(rest[1:])), name=name)
        return sr.powerset_semiring(sr.parse_monoid(_read(rest)), name=name)
    if sep and kind == "gamma":
        return gm.enumerate_gamma(rg.parse_ring_spec(rest)).semiring
    raise ArgumentError(f"unknown semiring {name!r}")


def cmd_cong(args, out):
    if (args.file is None) == (args.semiring is None):
        raise ArgumentError("give a semiring file or --semiring")
    S = sr.parse_semiring(_read(args.file)) if args.file else named_semiring(args.semiring)
    if not S.finite:
        raise ArgumentError(f"{S.name} is too large to enumerate")
    pairs = []
    if args.commutators:
        pairs += [(S.mul(a, b), S.mul(b, a)) for a in S.elements for b in S.elements]
    for a, b in args.pair or ():
        pairs.append((_element_arg(S, a), _element_arg(S, b)))
    C = sr.congruence_closure(S, pairs)
    Q = sr.quotient_semiring(S, C)
    out.append(f"classes: {len(C)}")
    for k, members in enumerate(C.classes):
        out.append(f"class {k}: " + " ".join(S.show(S.elements[i]) for i in members))
    out.append(sr.format_semiring(Q).rstrip("\n"))
    return 0


# --- parser ------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ArgumentError(message)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--format", choices=("human", "machine"), default="human",
                        help="machine output starts with a schema line and round-trips")
    seeds = _Parser(add_help=False)
    seeds.add_argument("--seed", type=int, default=None, help="seed for sampled checks (default VALUON_SEED or 1729)")
    seeds.add_argument("--cases", type=int, default=sr.DEFAULT_CASES, help="sampled cases")

    p = _Parser(prog="valuon", description="Valuations, Gamma_R and tropical tools for finite rings.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("ring", parents=[common], help="construct a ring and print its tables")
    _ring_options(s)
    s.add_argument("--validate", action="store_true", help="print a verdict per ring law")
    s.set_defaults(func=cmd_ring)

    s = sub.add_parser("gamma", parents=[common], help="enumerate Gamma_R")
    _ring_options(s)
    s.add_argument("--singletons", action="store_true", help="only the singleton classes' product table")
    s.set_defaults(func=cmd_gamma)

    s = sub.add_parser("val", parents=[common, seeds], help="check valuation axioms")
    _ring_options(s, required=False)
    s.add_argument("--valuation", default="universal", help="universal | ideal | solutions | padic:<p> | gammaq")
    s.add_argument("--mode", choices=("multiplicative", "supermultiplicative"), default="multiplicative")
    s.add_argument("--vars", type=int, default=1, help="variables for the solutions valuation")
    s.add_argument("--rep", metavar="PATH", help="matrix file of generators over Q")
    s.add_argument("--prime", type=int, help="prime for --rep")
    s.add_argument("--word-length", type=int, default=3, help="longest generator word for --rep")
    s.set_defaults(func=cmd_val)

    s = sub.add_parser("trop", parents=[common], help="tropicalize an expression and list crease points")
    s.add_argument("expression", nargs="?", help="expression text")
    s.add_argument("--file", metavar="PATH", help="read the expression from a file")
    _ring_options(s, required=False).add_argument("--rationals", action="store_true", help="coefficients in Q")
    s.add_argument("--valuation", default="universal", help="universal | padic:<p> (Q only)")
    s.add_argument("--vars", help="comma-separated variable names (default: unknown names)")
    s.add_argument("--roots", action="store_true", help="also print the zero set and the root/crease verdict")
    s.add_argument("--full-gamma", action="store_true", help="crease points over all of Gamma_R")
    s.add_argument("--domain", help="comma-separated tropical values for crease search (padic)")
    s.set_defaults(func=cmd_trop)

    s = sub.add_parser("hom", parents=[common], help="classify a map Z^omega -> T given on primes")
    s.add_argument("assignment", nargs="*", help="<prime>=<value>")
    s.set_defaults(func=cmd_hom)

    s = sub.add_parser("star", parents=[common], help="least solution of X = AX + I")
    s.add_argument("file", help="matrix file")
    s.set_defaults(func=cmd_star)

    s = sub.add_parser("ab", parents=[common], help="compare Ab(Gamma_R) with Gamma_Ab(R)")
    _ring_options(s)
    s.set_defaults(func=cmd_ab)

    s = sub.add_parser("cong", parents=[common], help="congruence closure on a semiring file")
    s.add_argument("file", nargs="?", help="semiring file")
    s.add_argument("--semiring", help="boolean | powerset:z<k> | powerset:<monoid file> | gamma:<ring spec>")
    s.add_argument("--commutators", action="store_true", help="add every pair (ab, ba)")
    s.add_argument("--pair", nargs=2, action="append", metavar=("A", "B"), help="generating pair (repeatable)")
    s.set_defaults(func=cmd_cong)
    return p


def run(argv=None) -> tuple[int, str, str]:
    """Run the CLI and return (exit code, stdout text, stderr text)."""
    out: list[str] = []
    try:
        args = build_parser().parse_args(argv)
        if getattr(args, "seed", None) is None and hasattr(args, "seed"):
            args.seed = sr.default_seed()
        code = args.func(args, out)
    except ArgumentError as exc:
        return 2, "", f"valuon: error: {exc}\n"
    except ValuonError as exc:
        msg = str(exc)
        witness = getattr(exc, "witness", None)
        if witness is not None:
            msg += f" (witness {witness})"
        return 1, "", f"valuon: {type(exc).__name__}: {msg}\n"
    text = "\n".join(out) + "\n" if out else ""
    if args.format == "machine":
        text = f"{SCHEMA} {args.command}\n" + text
    return code, text, ""


def main(argv=None) -> int:
    if argv is None:
        argv = sys.argv[1:]
    if any(a in ("-h", "--help") for a in argv):
        build_parser().parse_args(argv)  # argparse prints help and exits 0
    code, text, err = run(argv)
    sys.stdout.write(text)
    sys.stderr.write(err)
    return code


# --- reading machine output back ---------------------------------------------


def read_machine(text: str, ring: rg.FiniteRing | None = None):
    """Parse ``--format machine`` output into library objects.

    ring -> FiniteRing; gamma -> GammaTable (or the singleton rows as a dict);
    star -> (Semiring, Matrix, verdict lines); cong -> (classes, Semiring);
    trop -> dict with the expression re-parsed over Gamma(ring) or T;
    hom/ab/val -> dict of fields.
    """
    head, _, body = text.partition("\n")
    parts = head.split()
    if len(parts) != 3 or " ".join(parts[:2]) != SCHEMA:
        raise ParseError(f"expected '{SCHEMA} <command>' header", 1)
    cmd = parts[2]
    lines = body.splitlines()
    if cmd == "ring":
        if lines and lines[-1].startswith("ring: "):
            return dict(ln.split(": ", 1) for ln in lines)
        return rg.parse_ring(body)
    if cmd == "gamma":
        if body.startswith("singletons:"):
            names = lines[0].split(": ", 1)[1].split()
            rows = {}
            for ln in lines[1:]:
                a, _, rest = ln.partition(": ")
                rows[a] = dict(zip(names, rest.split()))
            return rows
        return gm.parse_gamma(body)
    if cmd == "star":
        n = int(lines[0].split()[1].split("=")[1])
        S, X = la.parse_matrix("\n".join(lines[:n + 1]))
        return S, X, lines[n + 1:]
    if cmd == "cong":
        k = int(lines[0].split(": ")[1])
        classes = [ln.split(": ", 1)[1].split() for ln in lines[1:1 + k]]
        return classes, sr.parse_semiring("\n".join(lines[1 + k:]))
    if cmd == "hom":
        return _parse_hom_line(lines[0])
    if cmd == "ab":
        a, b, _, verdict = lines[0].split()
        return {"ab_gamma_size": int(a), "gamma_ab_size": int(b), "isomorphic": verdict == "yes"}
    if cmd == "val":
        return dict(ln.split(": ", 1) for ln in lines if ": " in ln and not ln.startswith(("matrix",)))
    if cmd == "trop":
        fields = dict(ln.split(": ", 1) if ": " in ln else (ln.rstrip(":"), "") for ln in lines)
        if ring is not None:
            G = gm.enumerate_gamma(ring)
            ctx = _machine_ctx(G.semiring, G)
        else:
            ctx = _machine_ctx(sr.TROPICAL)
        text = fields["trop"]
        variables = [n for n in poly.expression_names(text) if ctx.lookup(n) is None]
        fields["trop"] = poly.parse_expression(text, ctx, variables, multiset=True)
        if "crease" in fields:
            fields["crease"] = [ctx.lookup(t) if ctx.lookup(t) is not None else sr.parse_number(t)
                                for t in fields["crease"].split()]
        return fields
    raise ParseError(f"unknown command {cmd!r}")


def _parse_hom_line(line: str) -> gm.HomClassification:
    if line == "trivial":
        return gm.HomClassification("trivial")
    if line.startswith("p-adic "):
        f = dict(t.split("=") for t in line.split()[1:])
        return gm.HomClassification("p-adic", prime=int(f["p"]), scale=Fraction(f["scale"]))
    if line.startswith("invalid: "):
        return gm.HomClassification("invalid", reason=line[len("invalid: "):])
    raise ParseError(f"bad hom line {line!r}")


if __name__ == "__main__":
    sys.exit(main())
