"""Non-commutative polynomial expressions: parsing, evaluation,
tropicalization, crease points and root sets."""
from __future__ import annotations

import itertools
import random
import re
from collections import Counter
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Mapping, Sequence

from .errors import ArgumentError, ParseError, ResourceBoundError
from .semiring import Semiring

MAX_DOMAIN = 10**6


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self):
        return self.name


def is_ring(ctx) -> bool:
    return getattr(ctx, "neg", None) is not None


def _is_idempotent(ctx) -> bool:
    if is_ring(ctx):
        return False
    return ctx.eq(ctx.add(ctx.one, ctx.one), ctx.one)


def normalize_monomial(ctx, tokens: Iterable) -> tuple | None:
    """Merge adjacent coefficients, drop unit coefficients; None if zero."""
    out: list = []
    for tok in tokens:
        if isinstance(tok, Var):
            out.append(tok)
            continue
        if out and not isinstance(out[-1], Var):
            out[-1] = ctx.mul(out[-1], tok)
        else:
            out.append(tok)
    if any(not isinstance(t, Var) and t == ctx.zero for t in out):
        return None
    out = [t for t in out if isinstance(t, Var) or t != ctx.one]
    return tuple(out) if out else (ctx.one,)


class Expression:
    """A finite sum of monomials (token words) over a coefficient structure.

    Over an idempotent semiring duplicate monomials collapse unless
    ``multiset`` is set; ring-coefficient sums always keep multiplicity.
    """

    __slots__ = ("ctx", "monomials", "variables", "multiset", "flags")

    def __init__(self, ctx, monomials: Iterable[Iterable] = (), variables: Sequence[str] = (),
                 multiset: bool = False, flags: Iterable[str] = ()):
        self.ctx = ctx
        self.multiset = multiset
        mons = []
        seen = set()
        collapse = not multiset and _is_idempotent(ctx)
        names = list(variables)
        for m in monomials:
            nm = normalize_monomial(ctx, m)
            if nm is None:
                continue
            for t in nm:
                if isinstance(t, Var) and t.name not in names:
                    names.append(t.name)
            if collapse:
                if nm in seen:
                    continue
                seen.add(nm)
            mons.append(nm)
        self.monomials = tuple(mons)
        self.variables = tuple(names)
        self.flags = frozenset(flags)

    # construction helpers
    @classmethod
    def constant(cls, ctx, c, variables=()) -> "Expression":
        return cls(ctx, [(c,)], variables)

    @classmethod
    def variable(cls, ctx, name: str, variables=()) -> "Expression":
        return cls(ctx, [(Var(name),)], variables or (name,))

    @classmethod
    def zero(cls, ctx, variables=()) -> "Expression":
        return cls(ctx, [], variables)

    def _like(self, monomials, other=None) -> "Expression":
        names = list(self.variables)
        if other is not None:
            names += [v for v in other.variables if v not in names]
        multiset = self.multiset or (other is not None and other.multiset)
        return Expression(self.ctx, monomials, names, multiset=multiset)

    def _check(self, other):
        if not isinstance(other, Expression):
            return Expression.constant(self.ctx, other, self.variables)
        if other.ctx is not self.ctx:
            raise ArgumentError("expressions over different coefficient structures")
        return other

    def __add__(self, other):
        other = self._check(other)
        return self._like(self.monomials + other.monomials, other)

    def __mul__(self, other):
        other = self._check(other)
        return self._like([a + b for a in self.monomials for b in other.monomials], other)

    def __neg__(self):
        if not is_ring(self.ctx):
            raise ArgumentError("negation needs ring coefficients")
        m1 = self.ctx.neg(self.ctx.one)
        return self._like([(m1,) + m for m in self.monomials])

    def __sub__(self, other):
        return self + (-self._check(other))

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ArgumentError("powers must be nonnegative integers")
        out = Expression.constant(self.ctx, self.ctx.one, self.variables)
        for _ in range(k):
            out = out * self
        return out

    def __len__(self):
        return len(self.monomials)

    def __iter__(self):
        return iter(self.monomials)

    def is_zero(self) -> bool:
        return not self.monomials

    def __eq__(self, other):
        if not isinstance(other, Expression) or other.ctx is not self.ctx:
            return NotImplemented
        return Counter(self.monomials) == Counter(other.monomials)

    def __hash__(self):
        return hash(frozenset(Counter(self.monomials).items()))

    def __str__(self):
        return format_expression(self)

    def __repr__(self):
        return f"Expression({format_expression(self)!r})"


# --- printing ----------------------------------------------------------------


_PLAIN = re.compile(r"-?(\d+|[A-Za-z_][A-Za-z_0-9']*)$")


def _show_coeff(ctx, c, first: bool) -> str:
    s = ctx.show(c)
    if is_ring(ctx) and not _PLAIN.match(s):
        return f"({s})"
    if s.startswith("-") and not first:
        return f"({s})"
    return s


def format_monomial(ctx, m: tuple) -> str:
    parts = []
    i = 0
    while i < len(m):
        t = m[i]
        if isinstance(t, Var):
            j = i
            while j < len(m) and m[j] == t:
                j += 1
            k = j - i
            parts.append(t.name if k == 1 else f"{t.name}^{k}")
            i = j
        else:
            parts.append(_show_coeff(ctx, t, first=(i == 0)))
            i += 1
    return "*".join(parts)


def format_expression(f: Expression) -> str:
    if not f.monomials:
        return "0"
    ctx = f.ctx
    out = ""
    for n, m in enumerate(f.monomials):
        text = format_monomial(ctx, m)
        if is_ring(ctx) and text.startswith("-") and not text.startswith("(-"):
            out += ("-" if n == 0 else " - ") + text[1:]
        else:
            out += ("" if n == 0 else " + ") + text
    return out


# --- parsing -----------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9']*)|(\S))")


class UnknownSymbolError(ParseError):
    pass


def _tokenize(text: str):
    pos = 0
    toks = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            break
        start = m.start(m.lastindex)
        if m.group(1) is not None:
            toks.append(("int", int(m.group(1)), start))
        elif m.group(2) is not None:
            toks.append(("name", m.group(2), start))
        else:
            ch = m.group(3)
            if ch not in "+-*^()/":
                raise ParseError(f"unexpected character {ch!r}", start)
            toks.append((ch, ch, start))
        pos = m.end()
    toks.append(("end", None, len(text)))
    return toks


class _Parser:
    def __init__(self, text, ctx, variables, multiset=False):
        self.multiset = multiset
        self.toks = _tokenize(text)
        self.i = 0
        self.ctx = ctx
        self.variables = tuple(variables)
        self.ring = is_ring(ctx)

    def peek(self):
        return self.toks[self.i]

    def take(self, kind=None):
        tok = self.toks[self.i]
        if kind is not None and tok[0] != kind:
            raise ParseError(f"expected {kind!r}, found {tok[1]!r}", tok[2])
        self.i += 1
        return tok

    def minus_allowed(self, tok):
        if not self.ring:
            raise ParseError("'-' needs ring coefficients", tok[2])

    def expr(self) -> Expression:
        tok = self.peek()
        negate = False
        if tok[0] == "-":
            self.minus_allowed(tok)
            self.take()
            negate = True
        f = self.term()
        if negate:
            f = -f
        while self.peek()[0] in ("+", "-"):
            tok = self.take()
            if tok[0] == "-":
                self.minus_allowed(tok)
                f = f - self.term()
            else:
                f = f + self.term()
        return f

    def term(self) -> Expression:
        f = self.factor()
        while True:
            kind = self.peek()[0]
            if kind == "*":
                self.take()
                f = f * self.factor()
            elif kind in ("int", "name", "("):
                f = f * self.factor()
            else:
                return f

    def factor(self) -> Expression:
        f = self.atom()
        while self.peek()[0] == "^":
            self.take()
            tok = self.take("int")
            f = f ** tok[1]
        return f

    def atom(self) -> Expression:
        f = self._atom()
        return Expression(self.ctx, f.monomials, self.variables, multiset=self.multiset) if self.multiset else f

    def _atom(self) -> Expression:
        tok = self.take()
        kind, value, pos = tok
        if kind == "int":
            if self.ctx.from_int is None:
                raise ParseError("integer literals are not supported here", pos)
            c = self.ctx.from_int(value)
            if self.peek()[0] == "/":
                if not hasattr(self.ctx, "from_fraction"):
                    raise ParseError("'/' literals need rational coefficients", self.peek()[2])
                self.take()
                den = self.take("int")
                if den[1] == 0:
                    raise ParseError("zero denominator", den[2])
                c = self.ctx.from_fraction(value, den[1])
            return Expression.constant(self.ctx, c, self.variables)
        if kind == "name":
            if value in self.variables:
                return Expression.variable(self.ctx, value, self.variables)
            c = self.ctx.lookup(value) if self.ctx.lookup is not None else None
            if c is None:
                raise UnknownSymbolError(f"unknown symbol {value!r}", pos)
            return Expression.constant(self.ctx, c, self.variables)
        if kind == "(":
            f = self.expr()
            self.take(")")
            if not any(isinstance(t, Var) for m in f.monomials for t in m):
                # a variable-free group is one coefficient: (j+k)*z stays a single monomial
                return Expression.constant(self.ctx, evaluate(f, {}), self.variables)
            return f
        raise ParseError(f"unexpected {value!r}" if value is not None else "unexpected end of input", pos)


def commutative_quotient(f: Expression) -> Expression:
    """Image in the commutative polynomial structure: coefficients (in their
    original order) multiplied at the front, variables sorted by name."""
    ctx = f.ctx
    mons = []
    for m in f.monomials:
        coeffs = [t for t in m if not isinstance(t, Var)]
        vs = sorted((t for t in m if isinstance(t, Var)), key=lambda v: v.name)
        mons.append(tuple(coeffs) + tuple(vs))
    return Expression(ctx, mons, f.variables, multiset=f.multiset)


def parse_expression(text: str, ctx, variables: Sequence[str], commutative: bool = False,
                     multiset: bool = False) -> Expression:
    """Parse ``text`` over the coefficient structure ``ctx``.

    Grammar: expr := ['-'] term (('+'|'-') term)*; term := factor ('*'? factor)*;
    factor := atom ('^' UINT)*; atom := INT | LABEL | VAR | '(' expr ')'.
    Integer literals denote multiples of the unit; over Q, ``INT/INT`` is a
    rational literal. ``multiset`` keeps repeated monomials over idempotent
    coefficients (the shape of a tropicalization).
    """
    p = _Parser(text, ctx, variables, multiset)
    f = p.expr()
    tok = p.peek()
    if tok[0] != "end":
        raise ParseError(f"unexpected {tok[1]!r}", tok[2])
    f = Expression(ctx, f.monomials, variables, multiset=multiset)
    return commutative_quotient(f) if commutative else f


def expression_names(text: str) -> list[str]:
    """Identifiers occurring in ``text``, in order of first appearance."""
    names = []
    for kind, value, _ in _tokenize(text):
        if kind == "name" and value not in names:
            names.append(value)
    return names


# --- evaluation --------------------------------------------------------------


def _assignment(f: Expression, z) -> Mapping:
    if isinstance(z, Mapping):
        return z
    z = tuple(z)
    if len(z) != len(f.variables):
        raise ArgumentError(f"expected {len(f.variables)} values, got {len(z)}")
    return dict(zip(f.variables, z))


def evaluate_monomial(ctx, m: tuple, assignment: Mapping):
    acc = ctx.one
    for t in m:
        if isinstance(t, Var):
            try:
                t = assignment[t.name]
            except KeyError:
                raise ArgumentError(f"no value bound to variable {t.name!r}") from None
        acc = ctx.mul(acc, t)
    return acc


def evaluate(f: Expression, assignment) -> Any:
    """Substitute and fold in token order."""
    a = _assignment(f, assignment)
    ctx = f.ctx
    acc = ctx.zero
    for m in f.monomials:
        acc = ctx.add(acc, evaluate_monomial(ctx, m, a))
    return acc


# --- tropicalization ---------------------------------------------------------


def tropicalize(f: Expression, nu: Callable, target: Semiring) -> Expression:
    """Replace every coefficient by its valuation.

    The result keeps one monomial per source monomial (a multiset), so the
    crease condition is taken over the same decomposition as ``f``. Flag
    ``degenerate`` is set when a nonzero coefficient valued to zero.
    """
    flags = set()
    mons = []
    for m in f.monomials:
        toks = []
        for t in m:
            if isinstance(t, Var):
                toks.append(t)
            else:
                v = nu(t)
                if t != f.ctx.zero and target.eq(v, target.zero):
                    flags.add("degenerate")
                toks.append(v)
        mons.append(toks)
    return Expression(target, mons, f.variables, multiset=True, flags=flags)


@dataclass
class CreaseReport:
    total: Any
    values: list
    deletion_sums: list
    verdict: bool
    argmin_multiplicity: int | None = None


def is_crease_point(f: Expression, z) -> CreaseReport:
    """Deleting any one monomial leaves the value unchanged. With a single
    monomial the deletion sum is the empty sum, 0."""
    S = f.ctx
    a = _assignment(f, z)
    values = [evaluate_monomial(S, m, a) for m in f.monomials]
    total = S.sum(values)
    deletions = [S.sum(values[:k] + values[k + 1:]) for k in range(len(values))]
    verdict = all(S.eq(d, total) for d in deletions)
    mult = None
    if getattr(S, "totally_ordered", False):
        mult = sum(1 for v in values if S.eq(v, total))
    return CreaseReport(total, values, deletions, verdict, mult)


def _points(domain: Sequence, k: int):
    if len(domain) ** k > MAX_DOMAIN:
        raise ResourceBoundError(f"domain of size {len(domain)}^{k} exceeds {MAX_DOMAIN}")
    return itertools.product(domain, repeat=k)


def crease_points(f: Expression, domain: Sequence) -> list[tuple]:
    """All points of domain^n (n = number of variables) that are crease points."""
    return [z for z in _points(list(domain), len(f.variables)) if is_crease_point(f, z).verdict]


def roots(f: Expression, domain: Sequence | None = None) -> list[tuple]:
    """Exact zero set of ``f`` over a finite ring, by exhaustive evaluation."""
    ctx = f.ctx
    if domain is None:
        domain = ctx.elements
    return [z for z in _points(list(domain), len(f.variables)) if evaluate(f, z) == ctx.zero]


@dataclass
class RootCreaseReport:
    roots: list
    images: list
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def root_crease_check(f: Expression, nu: Callable, target: Semiring, domain: Sequence | None = None) -> RootCreaseReport:
    """Every root's pointwise valuation must be a crease point of trop(f)."""
    t = tropicalize(f, nu, target)
    rs = roots(f, domain)
    images = [tuple(nu(x) for x in r) for r in rs]
    report = RootCreaseReport(rs, images)
    for r, img in zip(rs, images):
        if not is_crease_point(t, img).verdict:
            report.violations.append(r)
    return report


def random_expression(rng: random.Random, ctx, variables: Sequence[str], max_monomials: int = 3,
                      max_degree: int = 3) -> Expression:
    """A random sum of up to ``max_monomials`` words with at most ``max_degree``
    variable occurrences, coefficients optional at each slot."""
    nonzero = [c for c in ctx.elements if c != ctx.zero]
    if not nonzero:
        return Expression.zero(ctx, variables)
    mons = []
    for _ in range(rng.randint(1, max_monomials)):
        deg = rng.randint(0, max_degree)
        toks = []
        for slot in range(deg + 1):
            if rng.random() < 0.6 or deg == 0:
                toks.append(rng.choice(nonzero))
            if slot < deg:
                toks.append(Var(rng.choice(list(variables))))
        mons.append(toks)
    return Expression(ctx, mons, variables)


# --- solution-set valuation --------------------------------------------------


class ExpressionDomain:
    """Expressions over a finite ring as a ring-like domain for valuation checks."""

    def __init__(self, ctx, variables: Sequence[str], elements: Sequence[Expression]):
        self.ctx = ctx
        self.variables = tuple(variables)
        self.elements = list(elements)
        self.zero = Expression.zero(ctx, variables)
        self.one = Expression.constant(ctx, ctx.one, variables)

    def add(self, a, b):
        return a + b

    def mul(self, a, b):
        return a * b

    def neg(self, a):
        return -a


def solution_set_valuation(A, variables: Sequence[str]) -> tuple[Semiring, Callable]:
    """f -> set of points of A^n where f vanishes, valued in
    (subsets of A^n, intersection, union, A^n, empty set)."""
    points = frozenset(_points(list(A.elements), len(variables)))
    S = Semiring(
        name=f"Solutions({A.name}^{len(variables)})",
        add=frozenset.intersection,
        mul=frozenset.union,
        zero=points,
        one=frozenset(),
        contains=lambda x: isinstance(x, frozenset) and x <= points,
        show=lambda x: "{" + ", ".join(map(str, sorted(x))) + "}",
    )

    def nu(f: Expression):
        g = Expression(f.ctx, f.monomials, variables)
        return frozenset(roots(g))

    return S, nu
