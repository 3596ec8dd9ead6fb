"""Idempotent semirings: a uniform handle, concrete instances, law checks,
homomorphism checks and congruence closure for finite carriers.

Order convention throughout is the min-plus one: ``a <= b`` iff ``a + b == a``.
"""
from __future__ import annotations

import itertools
import math
import operator
import os
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Iterable, Sequence

from sympy import factorint

from .errors import BrokenInstanceError, DomainMismatchError, InvalidCongruenceError, ParseError

INF = math.inf
DEFAULT_SEED = 1729
DEFAULT_CASES = 1000


def default_seed() -> int:
    """Seed for every randomized check; ``VALUON_SEED`` overrides it."""
    return int(os.environ.get("VALUON_SEED", DEFAULT_SEED))


def _always(_x):
    return True


@dataclass(frozen=True, eq=False)
class Semiring:
    """Handle bundling the operations of one semiring instance.

    ``elements`` is set for finite carriers and makes every check exhaustive;
    otherwise ``sample`` draws random elements for property checks.
    """

    name: str
    add: Callable[[Any, Any], Any]
    mul: Callable[[Any, Any], Any]
    zero: Any
    one: Any
    elements: tuple | None = None
    contains: Callable[[Any], bool] = _always
    sample: Callable[[random.Random], Any] | None = None
    eq: Callable[[Any, Any], bool] = operator.eq
    show: Callable[[Any], str] = str
    totally_ordered: bool = False
    from_int: Callable[[int], Any] | None = None
    lookup: Callable[[str], Any] | None = None

    @property
    def finite(self) -> bool:
        return self.elements is not None

    def __len__(self):
        if self.elements is None:
            raise TypeError(f"{self.name} has an infinite carrier")
        return len(self.elements)

    def __repr__(self):
        return f"Semiring({self.name!r})"

    def check_member(self, *xs):
        for x in xs:
            if not self.contains(x):
                raise DomainMismatchError(f"{x!r} is not an element of {self.name}")

    def draw(self, rng: random.Random):
        if self.elements is not None:
            return rng.choice(self.elements)
        if self.sample is None:
            raise TypeError(f"{self.name} has no sampler")
        return self.sample(rng)

    def sum(self, xs: Iterable) -> Any:
        acc = self.zero
        for x in xs:
            acc = self.add(acc, x)
        return acc

    def product(self, xs: Iterable) -> Any:
        acc = self.one
        for x in xs:
            acc = self.mul(acc, x)
        return acc

    def power(self, x, k: int):
        return self.product([x] * k)


def leq(S: Semiring, a, b) -> bool:
    """Natural order: ``a <= b`` iff ``a + b == a``."""
    S.check_member(a, b)
    return S.eq(S.add(a, b), a)


def inf_of(S: Semiring, xs: Iterable):
    """Infimum of a finite family; the empty infimum is ``S.zero``."""
    xs = list(xs)
    S.check_member(*xs)
    return S.sum(xs)


def check_idempotent(S: Semiring) -> bool:
    """True iff 1 + 1 = 1.

    On finite carriers a + a = a is cross-checked for every element; a
    disagreement means the instance is broken and raises with the witness.
    """
    verdict = S.eq(S.add(S.one, S.one), S.one)
    if S.finite:
        for a in S.elements:
            if S.eq(S.add(a, a), a) != verdict:
                raise BrokenInstanceError(
                    f"{S.name}: 1+1=1 is {verdict} but a+a=a is {not verdict} for a={S.show(a)}",
                    witness=a,
                )
    return verdict


# --- semiring laws -----------------------------------------------------------

LAWS = (
    "add_assoc",
    "add_comm",
    "add_identity",
    "mul_assoc",
    "mul_identity",
    "left_distrib",
    "right_distrib",
    "annihilation",
)


@dataclass(frozen=True)
class LawViolation:
    law: str
    witness: tuple


def _law_holds(S: Semiring, law: str, a, b, c) -> bool:
    add, mul, eq = S.add, S.mul, S.eq
    if law == "add_assoc":
        return eq(add(add(a, b), c), add(a, add(b, c)))
    if law == "add_comm":
        return eq(add(a, b), add(b, a))
    if law == "add_identity":
        return eq(add(a, S.zero), a) and eq(add(S.zero, a), a)
    if law == "mul_assoc":
        return eq(mul(mul(a, b), c), mul(a, mul(b, c)))
    if law == "mul_identity":
        return eq(mul(a, S.one), a) and eq(mul(S.one, a), a)
    if law == "left_distrib":
        return eq(mul(a, add(b, c)), add(mul(a, b), mul(a, c)))
    if law == "right_distrib":
        return eq(mul(add(a, b), c), add(mul(a, c), mul(b, c)))
    if law == "annihilation":
        return eq(mul(S.zero, a), S.zero) and eq(mul(a, S.zero), S.zero)
    raise ValueError(law)


_ARITY = {"add_identity": 1, "mul_identity": 1, "annihilation": 1, "add_comm": 2}


def check_laws(S: Semiring, seed: int | None = None, cases: int = DEFAULT_CASES) -> list[LawViolation]:
    """First violation of each of the eight semiring laws (empty list = all hold).

    Exhaustive over finite carriers; ``cases`` seeded random triples otherwise.
    """
    violations = []
    rng = random.Random(default_seed() if seed is None else seed)
    for law in LAWS:
        arity = _ARITY.get(law, 3)
        if S.finite:
            tuples = itertools.product(S.elements, repeat=arity)
        else:
            tuples = (tuple(S.draw(rng) for _ in range(arity)) for _ in range(cases))
        for t in tuples:
            a, b, c = (t + (S.zero, S.zero))[:3]
            if not _law_holds(S, law, a, b, c):
                violations.append(LawViolation(law, t))
                break
    return violations


# --- homomorphisms -----------------------------------------------------------


@dataclass
class HomReport:
    add: bool = True
    mul: bool = True
    zero: bool = True
    one: bool = True
    order: bool = True
    counterexamples: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.add and self.mul and self.zero and self.one

    def _fail(self, law, witness):
        if getattr(self, law):
            setattr(self, law, False)
            self.counterexamples[law] = witness


def check_homomorphism(f: Callable, S: Semiring, T: Semiring, samples: Sequence | None = None) -> HomReport:
    """Check that ``f: S -> T`` preserves +, *, 0 and 1 on ``samples``.

    ``samples`` defaults to the whole carrier of a finite ``S``. Order
    preservation is checked separately on the same pairs.
    """
    if samples is None:
        if not S.finite:
            raise TypeError("samples are required for an infinite source semiring")
        samples = S.elements
    samples = list(samples)
    report = HomReport()
    if not T.eq(f(S.zero), T.zero):
        report._fail("zero", (S.zero,))
    if not T.eq(f(S.one), T.one):
        report._fail("one", (S.one,))
    image = [f(a) for a in samples]
    for (a, fa), (b, fb) in itertools.product(zip(samples, image), repeat=2):
        if not T.eq(f(S.add(a, b)), T.add(fa, fb)):
            report._fail("add", (a, b))
        if not T.eq(f(S.mul(a, b)), T.mul(fa, fb)):
            report._fail("mul", (a, b))
        if S.eq(S.add(a, b), a) and not T.eq(T.add(fa, fb), fa):
            report._fail("order", (a, b))
    return report


# --- concrete instances ------------------------------------------------------


def is_rational(x) -> bool:
    return isinstance(x, (int, Fraction)) and not isinstance(x, bool)


def _tropical_contains(x) -> bool:
    return x == INF or is_rational(x)


def _tropical_sample(rng: random.Random):
    if rng.random() < 0.1:
        return INF
    return Fraction(rng.randint(-60, 60), rng.randint(1, 12))


def show_number(x) -> str:
    if x == INF:
        return "inf"
    return str(x)


def parse_number(text: str):
    text = text.strip()
    if text in ("inf", "∞"):
        return INF
    q = Fraction(text)
    return q.numerator if q.denominator == 1 else q


def _int_or_fraction(x):
    if isinstance(x, Fraction) and x.denominator == 1:
        return x.numerator
    return x


def tropical_add(a, b):
    return a if a <= b else b


def tropical_mul(a, b):
    if a == INF or b == INF:
        return INF
    return _int_or_fraction(a + b)


TROPICAL = Semiring(
    name="tropical",
    add=tropical_add,
    mul=tropical_mul,
    zero=INF,
    one=0,
    contains=_tropical_contains,
    sample=_tropical_sample,
    show=show_number,
    totally_ordered=True,
    from_int=lambda n: n,
)


def _minmax_contains(x) -> bool:
    return x == INF or (is_rational(x) and x >= 0)


def _minmax_sample(rng: random.Random):
    if rng.random() < 0.1:
        return INF
    return Fraction(rng.randint(0, 60), rng.randint(1, 6))


MINMAX = Semiring(
    name="minmax",
    add=tropical_add,
    mul=lambda a, b: a if a >= b else b,
    zero=INF,
    one=0,
    contains=_minmax_contains,
    sample=_minmax_sample,
    show=show_number,
    totally_ordered=True,
    from_int=lambda n: n,
)

BOOLEAN = Semiring(
    name="boolean",
    add=lambda a, b: a or b,
    mul=lambda a, b: a and b,
    zero=False,
    one=True,
    elements=(False, True),
    contains=lambda x: isinstance(x, bool),
    show=lambda x: "top" if x else "bot",
    totally_ordered=True,
)

# Ordinary natural numbers: a semiring that is not idempotent.
NATURALS = Semiring(
    name="naturals",
    add=operator.add,
    mul=operator.mul,
    zero=0,
    one=1,
    contains=lambda x: isinstance(x, int) and x >= 0,
    sample=lambda rng: rng.randint(0, 100),
    from_int=lambda n: n,
)


def gcd_q(a: Fraction, b: Fraction) -> Fraction:
    """gcd of nonnegative rationals over the common denominator; gcd(a, 0) = a."""
    a, b = Fraction(a), Fraction(b)
    den = a.denominator * b.denominator
    return Fraction(math.gcd(a.numerator * b.denominator, b.numerator * a.denominator), den)


def _gcdq_sample(rng: random.Random):
    if rng.random() < 0.05:
        return Fraction(0)
    return Fraction(rng.randint(1, 720), rng.randint(1, 720))


GCDQ = Semiring(
    name="gcdq",
    add=gcd_q,
    mul=lambda a, b: Fraction(a) * Fraction(b),
    zero=Fraction(0),
    one=Fraction(1),
    contains=lambda x: is_rational(x) and x >= 0,
    sample=_gcdq_sample,
    from_int=Fraction,
)


class PadicVector:
    """Element of Z^omega: either infinity or a finite-support exponent vector
    indexed by primes. Zero exponents are dropped so equality is structural."""

    __slots__ = ("exps", "is_inf")

    def __init__(self, exps: dict | Iterable = (), is_inf: bool = False):
        items = exps.items() if isinstance(exps, dict) else exps
        self.is_inf = is_inf
        self.exps = () if is_inf else tuple(sorted((int(p), int(e)) for p, e in items if e != 0))

    @classmethod
    def infinity(cls) -> "PadicVector":
        return cls(is_inf=True)

    @classmethod
    def unit(cls, p: int) -> "PadicVector":
        return cls({p: 1})

    @classmethod
    def from_rational(cls, q) -> "PadicVector":
        """Exponent vector of |q|; 0 maps to infinity."""
        q = Fraction(q)
        if q == 0:
            return cls.infinity()
        exps = dict(factorint(abs(q.numerator)))
        for p, e in factorint(q.denominator).items():
            exps[p] = exps.get(p, 0) - e
        exps.pop(1, None)
        return cls(exps)

    def to_rational(self) -> Fraction:
        if self.is_inf:
            return Fraction(0)
        out = Fraction(1)
        for p, e in self.exps:
            out *= Fraction(p) ** e
        return out

    def __getitem__(self, p: int) -> int:
        if self.is_inf:
            return INF
        return dict(self.exps).get(p, 0)

    def support(self) -> tuple:
        return tuple(p for p, _ in self.exps)

    def __eq__(self, other):
        return isinstance(other, PadicVector) and (self.is_inf, self.exps) == (other.is_inf, other.exps)

    def __hash__(self):
        return hash((self.is_inf, self.exps))

    def __repr__(self):
        if self.is_inf:
            return "PadicVector.infinity()"
        return f"PadicVector({dict(self.exps)})"

    def __str__(self):
        if self.is_inf:
            return "inf"
        return "{" + ", ".join(f"{p}:{e}" for p, e in self.exps) + "}"


def padic_add(a: PadicVector, b: PadicVector) -> PadicVector:
    if a.is_inf:
        return b
    if b.is_inf:
        return a
    primes = set(a.support()) | set(b.support())
    return PadicVector({p: min(a[p], b[p]) for p in primes})


def padic_mul(a: PadicVector, b: PadicVector) -> PadicVector:
    if a.is_inf or b.is_inf:
        return PadicVector.infinity()
    primes = set(a.support()) | set(b.support())
    return PadicVector({p: a[p] + b[p] for p in primes})


_SMALL_PRIMES = (2, 3, 5, 7, 11, 13)


def _padic_sample(rng: random.Random):
    if rng.random() < 0.05:
        return PadicVector.infinity()
    return PadicVector({p: rng.randint(-4, 4) for p in rng.sample(_SMALL_PRIMES, rng.randint(0, 3))})


PADICVEC = Semiring(
    name="padicvec",
    add=padic_add,
    mul=padic_mul,
    zero=PadicVector.infinity(),
    one=PadicVector(),
    contains=lambda x: isinstance(x, PadicVector),
    sample=_padic_sample,
)


def padic_projection(p: int) -> Callable[[PadicVector], Any]:
    """pi_p: Z^omega -> T, the exponent of ``p`` (infinity stays infinity)."""

    def pi(v: PadicVector):
        return v[p]

    return pi


# --- finite table semirings --------------------------------------------------


def table_semiring(
    add_table: Sequence[Sequence[int]],
    mul_table: Sequence[Sequence[int]],
    zero: int,
    one: int,
    labels: Sequence[str] | None = None,
    name: str = "table",
) -> Semiring:
    """Finite semiring on 0..n-1 given by operation tables."""
    n = len(add_table)
    add_t = tuple(tuple(row) for row in add_table)
    mul_t = tuple(tuple(row) for row in mul_table)
    labels = tuple(labels) if labels is not None else tuple(str(i) for i in range(n))
    index = {lab: i for i, lab in enumerate(labels)}
    return Semiring(
        name=name,
        add=lambda a, b: add_t[a][b],
        mul=lambda a, b: mul_t[a][b],
        zero=zero,
        one=one,
        elements=tuple(range(n)),
        contains=lambda x: isinstance(x, int) and 0 <= x < n,
        show=lambda x: labels[x],
        lookup=index.get,
    )


def tables_of(S: Semiring) -> tuple[list[list[int]], list[list[int]]]:
    """Add/mul tables of a finite semiring over the indices of ``S.elements``."""
    idx = {x: i for i, x in enumerate(S.elements)}
    add = [[idx[S.add(a, b)] for b in S.elements] for a in S.elements]
    mul = [[idx[S.mul(a, b)] for b in S.elements] for a in S.elements]
    return add, mul


@dataclass(frozen=True)
class Monoid:
    elements: tuple
    table: tuple  # table[a][b] = index of a*b
    identity: int

    @classmethod
    def cyclic(cls, k: int) -> "Monoid":
        return cls(tuple(range(k)), tuple(tuple((a + b) % k for b in range(k)) for a in range(k)), 0)


def powerset_semiring(M: Monoid, name: str = "powerset") -> Semiring:
    """2^M with union and Minkowski product; A <= B iff A contains B."""
    n = len(M.elements)

    def mink(A, B):
        return frozenset(M.table[a][b] for a in A for b in B)

    elements = None
    if n <= 12:
        elements = tuple(
            frozenset(c) for r in range(n + 1) for c in itertools.combinations(range(n), r)
        )

    def sample(rng):
        return frozenset(x for x in range(n) if rng.random() < 0.5)

    def show(A):
        return "{" + ",".join(str(M.elements[a]) for a in sorted(A)) + "}"

    lookup = {show(A): A for A in elements}.get if elements is not None else None

    return Semiring(
        name=name,
        add=frozenset.union,
        mul=mink,
        zero=frozenset(),
        one=frozenset([M.identity]),
        elements=elements,
        contains=lambda x: isinstance(x, frozenset) and all(0 <= a < n for a in x),
        sample=sample,
        show=show,
        lookup=lookup,
    )


# --- congruences -------------------------------------------------------------


class _UnionFind:
    def __init__(self, n):
        self.parent = list(range(n))

    def find(self, x):
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a, b) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if rb < ra:
            ra, rb = rb, ra
        self.parent[rb] = ra
        return True


@dataclass(frozen=True)
class Congruence:
    """Partition of a finite semiring carrier. Classes are tuples of element
    indices, sorted, and listed by smallest member."""

    semiring: Semiring
    classes: tuple

    def class_index(self, x) -> int:
        i = self.semiring.elements.index(x)
        for k, cls in enumerate(self.classes):
            if i in cls:
                return k
        raise DomainMismatchError(f"{x!r} not in carrier")

    def related(self, a, b) -> bool:
        return self.class_index(a) == self.class_index(b)

    def __len__(self):
        return len(self.classes)


def _congruence_from_uf(S: Semiring, uf: _UnionFind) -> Congruence:
    groups: dict[int, list[int]] = {}
    for i in range(len(S.elements)):
        groups.setdefault(uf.find(i), []).append(i)
    classes = tuple(sorted(tuple(g) for g in groups.values()))
    return Congruence(S, classes)


def congruence_closure(S: Semiring, pairs: Iterable[tuple]) -> Congruence:
    """Smallest congruence on finite ``S`` containing ``pairs``.

    Union-find seeded with the pairs; each pass merges the images of every
    element and its class root under x -> x+c, x*c and c*x, until no merge
    happens. Compatibility with one-sided translations is enough because
    a~b, c~d gives a+c ~ b+c ~ b+d.
    """
    if not S.finite:
        raise TypeError("congruence closure needs a finite carrier")
    elems = S.elements
    idx = {x: i for i, x in enumerate(elems)}
    n = len(elems)
    add, mul = tables_of(S)
    uf = _UnionFind(n)
    for a, b in pairs:
        uf.union(idx[a], idx[b])
    changed = True
    while changed:
        changed = False
        for a in range(n):
            r = uf.find(a)
            if r == a:
                continue
            for c in range(n):
                changed |= uf.union(add[a][c], add[r][c])
                changed |= uf.union(mul[a][c], mul[r][c])
                changed |= uf.union(mul[c][a], mul[c][r])
    return _congruence_from_uf(S, uf)


def discrete_congruence(S: Semiring) -> Congruence:
    return Congruence(S, tuple((i,) for i in range(len(S.elements))))


def is_congruence(S: Semiring, C: Congruence) -> tuple | None:
    """None if ``C`` respects + and *, else a witness (a, b, c, op)."""
    add, mul = tables_of(S)
    n = len(S.elements)
    cls = [0] * n
    for k, members in enumerate(C.classes):
        for i in members:
            cls[i] = k
    for members in C.classes:
        r = members[0]
        for a in members[1:]:
            for c in range(n):
                if cls[add[a][c]] != cls[add[r][c]]:
                    return (S.elements[a], S.elements[r], S.elements[c], "add")
                if cls[mul[a][c]] != cls[mul[r][c]] or cls[mul[c][a]] != cls[mul[c][r]]:
                    return (S.elements[a], S.elements[r], S.elements[c], "mul")
    return None


def quotient_semiring(S: Semiring, C: Congruence, name: str | None = None) -> Semiring:
    """S/C on class indices 0..k-1 with the induced operations."""
    witness = is_congruence(S, C)
    if witness is not None:
        raise InvalidCongruenceError(f"partition is not a congruence: {witness}")
    add, mul = tables_of(S)
    cls = [0] * len(S.elements)
    for k, members in enumerate(C.classes):
        for i in members:
            cls[i] = k
    reps = [members[0] for members in C.classes]
    qadd = [[cls[add[a][b]] for b in reps] for a in reps]
    qmul = [[cls[mul[a][b]] for b in reps] for a in reps]
    idx = {x: i for i, x in enumerate(S.elements)}
    labels = ["[" + S.show(S.elements[r]) + "]" for r in reps]
    return table_semiring(
        qadd, qmul, cls[idx[S.zero]], cls[idx[S.one]], labels=labels, name=name or f"{S.name}/~"
    )


# --- semiring file format ----------------------------------------------------


def format_semiring(S: Semiring) -> str:
    """Line format for a finite semiring, mirroring the ring file format."""
    add, mul = tables_of(S)
    idx = {x: i for i, x in enumerate(S.elements)}
    lines = [f"semiring n={len(S.elements)}", f"zero={idx[S.zero]}", f"one={idx[S.one]}"]
    lines += ["add: " + " ".join(map(str, row)) for row in add]
    lines += ["mul: " + " ".join(map(str, row)) for row in mul]
    labels = [S.show(x) for x in S.elements]
    if labels != [str(i) for i in range(len(labels))]:
        lines += [f"label {i} {lab}" for i, lab in enumerate(labels)]
    return "\n".join(lines) + "\n"


def parse_semiring(text: str, name: str = "semiring") -> Semiring:
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines or not lines[0].startswith("semiring n="):
        raise ParseError("expected header 'semiring n=<N>'", 0)
    try:
        n = int(lines[0].split("=", 1)[1])
    except ValueError:
        raise ParseError("bad semiring size", 0) from None
    zero = one = None
    add, mul = [], []
    labels = [str(i) for i in range(n)]
    for lineno, ln in enumerate(lines[1:], start=1):
        try:
            if ln.startswith("zero="):
                zero = int(ln[5:])
            elif ln.startswith("one="):
                one = int(ln[4:])
            elif ln.startswith("add:"):
                add.append([int(x) for x in ln[4:].split()])
            elif ln.startswith("mul:"):
                mul.append([int(x) for x in ln[4:].split()])
            elif ln.startswith("label "):
                _, i, lab = ln.split(None, 2)
                labels[int(i)] = lab
            else:
                raise ParseError(f"unexpected line {ln!r}", lineno)
        except (ValueError, IndexError):
            raise ParseError(f"malformed line {ln!r}", lineno) from None
    if zero is None or one is None:
        raise ParseError("missing zero= or one=")
    rows = add + mul
    if len(add) != n or len(mul) != n or any(len(r) != n for r in rows):
        raise ParseError(f"expected {n} add and {n} mul rows of length {n}")
    if any(not 0 <= x < n for r in rows for x in r) or not (0 <= zero < n and 0 <= one < n):
        raise ParseError("table entry out of range")
    return table_semiring(add, mul, zero, one, labels=labels, name=name)


def parse_monoid(text: str) -> Monoid:
    """``monoid n=<N> identity=<i>`` then N ``mul:`` rows, optional labels."""
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines or not lines[0].startswith("monoid "):
        raise ParseError("expected header 'monoid n=<N> identity=<i>'", 0)
    try:
        fields = dict(tok.split("=", 1) for tok in lines[0].split()[1:])
        n, e = int(fields["n"]), int(fields["identity"])
    except (KeyError, ValueError):
        raise ParseError("bad monoid header", 0) from None
    rows, labels = [], [str(i) for i in range(n)]
    for lineno, ln in enumerate(lines[1:], start=1):
        try:
            if ln.startswith("mul:"):
                rows.append(tuple(int(x) for x in ln[4:].split()))
            elif ln.startswith("label "):
                _, i, lab = ln.split(None, 2)
                labels[int(i)] = lab
            else:
                raise ParseError(f"unexpected line {ln!r}", lineno)
        except (ValueError, IndexError):
            raise ParseError(f"malformed line {ln!r}", lineno) from None
    if len(rows) != n or any(len(r) != n or not all(0 <= x < n for x in r) for r in rows):
        raise ParseError(f"expected {n} mul rows of {n} indices")
    if not 0 <= e < n:
        raise ParseError("identity out of range")
    M = Monoid(tuple(labels), tuple(rows), e)
    for a in range(n):
        if rows[a][e] != a or rows[e][a] != a:
            raise BrokenInstanceError(f"{labels[e]} is not an identity", (a,))
        for b in range(n):
            for c in range(n):
                if rows[rows[a][b]][c] != rows[a][rows[b][c]]:
                    raise BrokenInstanceError("monoid table is not associative", (a, b, c))
    return M
