"""Finite rings as explicit tables, the example constructors, additive and
ideal closures, abelianization and ring homomorphisms."""
from __future__ import annotations

import itertools
import random
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .errors import ArgumentError, ConstructionError, ParseError, RingValidationError


class FiniteRing:
    """A unital ring on the indices 0..n-1.

    ``neg`` is derived from the addition table. Construction validates every
    ring law exhaustively unless ``validate=False``.
    """

    def __init__(self, add_table, mul_table, zero: int, one: int, labels=None, name: str = "ring",
                 validate: bool = True):
        self.add_table = tuple(tuple(int(x) for x in row) for row in add_table)
        self.mul_table = tuple(tuple(int(x) for x in row) for row in mul_table)
        self.n = len(self.add_table)
        self.zero = zero
        self.one = one
        self.name = name
        self.labels = tuple(labels) if labels is not None else tuple(str(i) for i in range(self.n))
        self._index = {lab: i for i, lab in enumerate(self.labels)}
        self.neg_table = self._derive_neg()
        if validate:
            self.validate()

    def _derive_neg(self):
        neg = []
        for a in range(self.n):
            row = self.add_table[a]
            inv = [b for b in range(self.n) if row[b] == self.zero]
            if len(inv) != 1:
                raise RingValidationError(f"element {self.labels[a]} has {len(inv)} additive inverses", (a,))
            neg.append(inv[0])
        return tuple(neg)

    @property
    def elements(self) -> tuple:
        return tuple(range(self.n))

    def __len__(self):
        return self.n

    def __repr__(self):
        return f"FiniteRing({self.name!r}, n={self.n})"

    def add(self, a: int, b: int) -> int:
        return self.add_table[a][b]

    def mul(self, a: int, b: int) -> int:
        return self.mul_table[a][b]

    def neg(self, a: int) -> int:
        return self.neg_table[a]

    def sub(self, a: int, b: int) -> int:
        return self.add_table[a][self.neg_table[b]]

    def from_int(self, k: int) -> int:
        """k * 1_R."""
        x = self.zero
        unit = self.one if k >= 0 else self.neg(self.one)
        for _ in range(abs(k)):
            x = self.add(x, unit)
        return x

    def lookup(self, label: str):
        return self._index.get(label)

    def index(self, label: str) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise ArgumentError(f"{self.name} has no element labelled {label!r}") from None

    def show(self, x: int) -> str:
        return self.labels[x]

    def is_commutative(self) -> bool:
        m = np.array(self.mul_table)
        return bool((m == m.T).all())

    RING_LAWS = ("add associativity", "add commutativity", "mul associativity", "left distributivity",
                 "right distributivity", "additive identity", "multiplicative identity", "zero annihilates")

    def law_report(self) -> list[tuple[str, tuple | None]]:
        """(law, first counterexample or None) for every ring law."""
        n = self.n
        if n == 0:
            raise RingValidationError("empty carrier")
        A = np.array(self.add_table, dtype=np.int32)
        M = np.array(self.mul_table, dtype=np.int32)
        for name, T in (("add", A), ("mul", M)):
            if T.shape != (n, n) or T.min() < 0 or T.max() >= n:
                raise RingValidationError(f"{name} table is not an n x n table of indices")
        if not (0 <= self.zero < n and 0 <= self.one < n):
            raise RingValidationError("zero/one index out of range")
        r = np.arange(n)
        checks = [
            A[A] == A[:, A],
            A == A.T,
            M[M] == M[:, M],
            M[:, A] == A[M[:, :, None], M[:, None, :]],
            M[A] == A[M[:, None, :], M[None, :, :]],
            A[r, self.zero] == r,
            (M[r, self.one] == r) & (M[self.one, r] == r),
            (M[r, self.zero] == self.zero) & (M[self.zero, r] == self.zero),
        ]
        out = []
        for law, ok in zip(self.RING_LAWS, checks):
            bad = np.argwhere(~ok)
            out.append((law, tuple(int(v) for v in bad[0]) if len(bad) else None))
        return out

    def validate(self) -> None:
        """Raise RingValidationError with a counterexample on the first broken law."""
        for law, witness in self.law_report():
            if witness is not None:
                raise RingValidationError(f"{law} fails", witness)

    def element_order(self, a: int) -> int:
        k, x = 1, a
        while x != self.zero:
            x = self.add(x, a)
            k += 1
        return k


class Rationals:
    """The field Q as a ring-like domain over ``Fraction`` (used for sampled
    valuation checks and as a coefficient structure)."""

    name = "Q"
    zero = Fraction(0)
    one = Fraction(1)
    elements = None

    def add(self, a, b):
        return Fraction(a) + Fraction(b)

    def mul(self, a, b):
        return Fraction(a) * Fraction(b)

    def neg(self, a):
        return -Fraction(a)

    def sub(self, a, b):
        return Fraction(a) - Fraction(b)

    def from_int(self, k: int):
        return Fraction(k)

    def from_fraction(self, num: int, den: int):
        return Fraction(num, den)

    def lookup(self, label):
        return None

    def show(self, q) -> str:
        return str(Fraction(q))

    def sample(self, rng: random.Random, bound: int = 10**6) -> Fraction:
        if rng.random() < 0.02:
            return Fraction(0)
        return Fraction(rng.choice((-1, 1)) * rng.randint(1, bound), rng.randint(1, bound))


RATIONALS = Rationals()


# --- subgroups and ideals ----------------------------------------------------


def _bits(mask: int):
    i = 0
    while mask:
        if mask & 1:
            yield i
        mask >>= 1
        i += 1


class Subgroup:
    """Additive subgroup of a FiniteRing stored as a membership bitmask."""

    __slots__ = ("ring", "mask")

    def __init__(self, ring: FiniteRing, mask: int):
        self.ring = ring
        self.mask = mask

    @property
    def elements(self) -> tuple:
        return tuple(_bits(self.mask))

    def __iter__(self):
        return _bits(self.mask)

    def __len__(self):
        return bin(self.mask).count("1")

    def __contains__(self, x):
        return bool(self.mask >> x & 1)

    def __eq__(self, other):
        return isinstance(other, Subgroup) and self.ring is other.ring and self.mask == other.mask

    def __hash__(self):
        return hash(self.mask)

    def __le__(self, other):
        return self.mask & ~other.mask == 0

    def __repr__(self):
        return f"{type(self).__name__}({{{', '.join(self.ring.show(x) for x in self)}}})"


class Ideal(Subgroup):
    __slots__ = ()


def _closure(R: FiniteRing, seed: Iterable[int], ideal: bool) -> int:
    mask = 1 << R.zero
    members = [R.zero]
    queue = list(seed)
    while queue:
        x = queue.pop()
        if mask >> x & 1:
            continue
        mask |= 1 << x
        members.append(x)
        queue.append(R.neg(x))
        for m in members:
            queue.append(R.add(x, m))
        if ideal:
            for r in range(R.n):
                queue.append(R.mul(r, x))
                queue.append(R.mul(x, r))
    return mask


def span_mask(R: FiniteRing, gens: Iterable[int], mask: int | None = None) -> int:
    """Mask of the subgroup generated by ``gens`` and the subgroup ``mask``.

    Each generator outside the current span S replaces S by S + <g>, which
    is again a subgroup, so no further closure pass is needed.
    """
    if mask is None:
        mask = 1 << R.zero
    members = list(_bits(mask))
    add = R.add_table
    for g in gens:
        if mask >> g & 1:
            continue
        multiples, x = [], g
        while x != R.zero:
            multiples.append(x)
            x = add[x][g]
        new = []
        for m in multiples:
            row = add[m]
            for s in members:
                y = row[s]
                if not mask >> y & 1:
                    mask |= 1 << y
                    new.append(y)
        members += new
    return mask


def zspan(R: FiniteRing, gens: Iterable[int]) -> Subgroup:
    """Smallest additive subgroup containing ``gens``."""
    return Subgroup(R, span_mask(R, gens))


def zspan_worklist(R: FiniteRing, gens: Iterable[int]) -> Subgroup:
    """Same as zspan, by a plain worklist closure under + and negation."""
    return Subgroup(R, _closure(R, gens, ideal=False))


def two_sided_ideal(R: FiniteRing, gens: Iterable[int]) -> Ideal:
    return Ideal(R, _closure(R, gens, ideal=True))


def commutator_ideal(R: FiniteRing) -> Ideal:
    return two_sided_ideal(R, {R.sub(R.mul(a, b), R.mul(b, a)) for a in range(R.n) for b in range(R.n)})


def minkowski(R: FiniteRing, A: Iterable[int], B: Iterable[int]) -> set[int]:
    B = list(B)
    return {R.mul(a, b) for a in A for b in B}


# --- homomorphisms -----------------------------------------------------------


class RingHom:
    def __init__(self, source: FiniteRing, target: FiniteRing, table: Sequence[int]):
        if len(table) != source.n:
            raise ArgumentError("hom table length must equal the source size")
        self.source = source
        self.target = target
        self.table = tuple(table)

    def __call__(self, x: int) -> int:
        return apply_ring_hom(self, x)

    def __repr__(self):
        return f"RingHom({self.source.name} -> {self.target.name})"

    def validate(self) -> tuple | None:
        """None if the map preserves +, *, 0 and 1, else a witness."""
        S, T, f = self.source, self.target, self.table
        if f[S.zero] != T.zero:
            return ("zero",)
        if f[S.one] != T.one:
            return ("one",)
        for a, b in itertools.product(range(S.n), repeat=2):
            if f[S.add(a, b)] != T.add(f[a], f[b]):
                return ("add", a, b)
            if f[S.mul(a, b)] != T.mul(f[a], f[b]):
                return ("mul", a, b)
        return None

    @classmethod
    def identity(cls, R: FiniteRing) -> "RingHom":
        return cls(R, R, range(R.n))

    def compose(self, other: "RingHom") -> "RingHom":
        """self after other."""
        if other.target is not self.source:
            raise ArgumentError("homs are not composable")
        return RingHom(other.source, self.target, [self.table[other.table[x]] for x in range(other.source.n)])


def apply_ring_hom(f: RingHom, x: int) -> int:
    if not (isinstance(x, int) and 0 <= x < f.source.n):
        raise ArgumentError(f"index {x!r} out of range for {f.source.name}")
    return f.table[x]


# --- constructors ------------------------------------------------------------


def cyclic(n: int) -> FiniteRing:
    if n < 1:
        raise ConstructionError("cyclic ring needs n >= 1")
    add = [[(a + b) % n for b in range(n)] for a in range(n)]
    mul = [[(a * b) % n for b in range(n)] for a in range(n)]
    return FiniteRing(add, mul, 0, 1 % n, name=f"Z/{n}")


# Irreducible polynomials, lowest coefficient first, monic of degree k.
IRREDUCIBLE = {
    (2, 2): (1, 1, 1),        # x^2 + x + 1
    (2, 3): (1, 1, 0, 1),     # x^3 + x + 1
    (3, 2): (1, 0, 1),        # x^2 + 1
    (2, 4): (1, 1, 0, 0, 1),  # x^4 + x + 1
    (5, 2): (2, 0, 1),        # x^2 + 2
    (3, 3): (1, 2, 0, 1),     # x^3 + 2x + 1
}


def prime_power(q: int) -> tuple[int, int]:
    from sympy import factorint

    f = factorint(q)
    if len(f) != 1:
        raise ConstructionError(f"{q} is not a prime power")
    (p, k), = f.items()
    return int(p), int(k)


def _poly_label(coeffs: Sequence[int]) -> str:
    terms = []
    for deg in range(len(coeffs) - 1, -1, -1):
        c = coeffs[deg]
        if c == 0:
            continue
        var = "" if deg == 0 else ("w" if deg == 1 else f"w^{deg}")
        if not var:
            terms.append(str(c))
        else:
            terms.append(var if c == 1 else f"{c}{var}")
    return "+".join(terms) or "0"


def finite_field(p: int, k: int = 1, poly: Sequence[int] | None = None) -> FiniteRing:
    """F_{p^k} as F_p[w]/(poly); ``poly`` lists coefficients lowest first.

    Element index is sum(c_i p^i). A reducible ``poly`` is detected by a
    nonzero element without inverse.
    """
    from sympy import isprime

    if not isprime(p):
        raise ConstructionError(f"{p} is not prime")
    if k == 1 and poly is None:
        R = cyclic(p)
        R.name = f"F{p}"
        return R
    if poly is None:
        try:
            poly = IRREDUCIBLE[(p, k)]
        except KeyError:
            raise ConstructionError(f"no built-in irreducible polynomial for F_{p}^{k}") from None
    poly = [c % p for c in poly]
    if len(poly) != k + 1 or poly[-1] != 1:
        raise ConstructionError("polynomial must be monic of degree k")
    vecs = list(itertools.product(range(p), repeat=k))
    vecs = [tuple(reversed(v)) for v in vecs]
    vecs.sort(key=lambda v: sum(c * p**i for i, c in enumerate(v)))
    index = {v: i for i, v in enumerate(vecs)}

    def mulpoly(u, v):
        prod = [0] * (2 * k - 1)
        for i, a in enumerate(u):
            for j, b in enumerate(v):
                prod[i + j] = (prod[i + j] + a * b) % p
        for deg in range(2 * k - 2, k - 1, -1):
            c = prod[deg]
            if c:
                for i in range(k + 1):
                    prod[deg - k + i] = (prod[deg - k + i] - c * poly[i]) % p
        return tuple(prod[:k])

    add = [[index[tuple((a + b) % p for a, b in zip(u, v))] for v in vecs] for u in vecs]
    mul = [[index[mulpoly(u, v)] for v in vecs] for u in vecs]
    R = FiniteRing(add, mul, 0, 1, labels=[_poly_label(v) for v in vecs], name=f"F{p**k}")
    for a in range(1, R.n):
        if R.one not in R.mul_table[a]:
            raise ConstructionError(f"polynomial {list(poly)} is reducible over F_{p}")
    return R


MAX_VALIDATE = 256
_UNIT_LETTERS = "ijklmnopqrstuvxyz"


def _matrix_ring(base: FiniteRing, n: int, positions: list[tuple[int, int]], name: str) -> FiniteRing:
    m = len(positions)
    vecs = list(itertools.product(range(base.n), repeat=m))
    vecs.sort(key=lambda v: (sum(1 for c in v if c != base.zero), [-c for c in v]))
    index = {v: i for i, v in enumerate(vecs)}
    pos_index = {pq: t for t, pq in enumerate(positions)}

    def entry(v, r, c):
        t = pos_index.get((r, c))
        return base.zero if t is None else v[t]

    # encode vectors in mixed radix so result rows map back to indices by lookup
    V = np.array(vecs, dtype=np.int64).reshape(len(vecs), m)
    radix = base.n ** np.arange(m, dtype=np.int64)
    decode = np.zeros(base.n ** m, dtype=np.int64)
    decode[V @ radix] = np.arange(len(vecs))
    BA = np.array(base.add_table, dtype=np.int64)
    BM = np.array(base.mul_table, dtype=np.int64)
    add = decode[BA[V[:, None, :], V[None, :, :]] @ radix]
    prod = np.empty((len(vecs), len(vecs), m), dtype=np.int64)
    for t, (r, c) in enumerate(positions):
        acc = np.full((len(vecs), len(vecs)), base.zero, dtype=np.int64)
        for s_ in range(n):
            t1, t2 = pos_index.get((r, s_)), pos_index.get((s_, c))
            if t1 is not None and t2 is not None:
                acc = BA[acc, BM[V[:, None, t1], V[None, :, t2]]]
        prod[:, :, t] = acc
    mul = decode[prod @ radix]
    zero = index[tuple(base.zero for _ in positions)]
    one = index[tuple(base.one if r == c else base.zero for r, c in positions)]

    if base.n == 2 and m <= len(_UNIT_LETTERS):
        def label(v):
            if v == vecs[one]:
                return "1"
            names = [_UNIT_LETTERS[t] for t, c in enumerate(v) if c != base.zero]
            return "+".join(names) or "0"
    else:
        def label(v):
            rows = [",".join(base.show(entry(v, r, c)) for c in range(n)) for r in range(n)]
            return "[" + ";".join(rows) + "]"

    # tables past MAX_VALIDATE are rings by construction; skip the cubic law check
    return FiniteRing(add, mul, zero, one, labels=[label(v) for v in vecs], name=name,
                      validate=len(vecs) <= MAX_VALIDATE)


def matrix_ring(base: FiniteRing, n: int) -> FiniteRing:
    positions = [(r, c) for r in range(n) for c in range(n)]
    return _matrix_ring(base, n, positions, f"M{n}({base.name})")


def upper_triangular(base: FiniteRing, n: int) -> FiniteRing:
    """Upper triangular n x n matrices. Over Z/2 with n = 2 the matrix units
    E11, E12, E22 are labelled i, j, k and the identity 1."""
    positions = [(r, c) for r in range(n) for c in range(n) if r <= c]
    return _matrix_ring(base, n, positions, f"UT{n}({base.name})")


def product(R1: FiniteRing, R2: FiniteRing) -> FiniteRing:
    n1, n2 = R1.n, R2.n

    def idx(a, b):
        return a * n2 + b

    pairs = [(a, b) for a in range(n1) for b in range(n2)]
    add = [[idx(R1.add(a, c), R2.add(b, d)) for c, d in pairs] for a, b in pairs]
    mul = [[idx(R1.mul(a, c), R2.mul(b, d)) for c, d in pairs] for a, b in pairs]
    labels = [f"({R1.show(a)},{R2.show(b)})" for a, b in pairs]
    return FiniteRing(add, mul, idx(R1.zero, R2.zero), idx(R1.one, R2.one), labels=labels,
                      name=f"{R1.name}x{R2.name}")


def quotient_ring(R: FiniteRing, ideal: Subgroup) -> tuple[FiniteRing, RingHom]:
    """R/I on coset representatives (the smallest index of each coset)."""
    check = two_sided_ideal(R, ideal)
    if check.mask != ideal.mask:
        raise ConstructionError("quotient needs a two-sided ideal")
    members = ideal.elements
    rep = [min(R.add(x, i) for i in members) for x in range(R.n)]
    reps = sorted(set(rep))
    pos = {r: k for k, r in enumerate(reps)}
    add = [[pos[rep[R.add(a, b)]] for b in reps] for a in reps]
    mul = [[pos[rep[R.mul(a, b)]] for b in reps] for a in reps]
    Q = FiniteRing(add, mul, pos[rep[R.zero]], pos[rep[R.one]], labels=[R.labels[r] for r in reps],
                   name=f"{R.name}/I")
    return Q, RingHom(R, Q, [pos[rep[x]] for x in range(R.n)])


def abelianize_ring(R: FiniteRing) -> tuple[FiniteRing, RingHom]:
    """R modulo the two-sided ideal generated by all ab - ba, with the projection."""
    Q, pi = quotient_ring(R, commutator_ideal(R))
    Q.name = f"Ab({R.name})"
    if not Q.is_commutative():
        raise RingValidationError("abelianization is not commutative")
    return Q, pi


def from_tables(add, mul, zero: int, one: int, labels=None, name: str = "ring", validate: bool = True) -> FiniteRing:
    return FiniteRing(add, mul, zero, one, labels=labels, name=name, validate=validate)


def r8() -> FiniteRing:
    """Upper triangular 2x2 matrices over F_2: eight elements, generated by i, j, k."""
    R = upper_triangular(cyclic(2), 2)
    R.name = "R8"
    return R


def parse_ring_spec(spec: str) -> FiniteRing:
    """Compact ring descriptors: ``z<n>``, ``f<q>``, ``ut<n>:<base>``,
    ``mat<n>:<base>``, ``r8`` and products ``A*B``."""
    spec = spec.strip().lower()
    if "*" in spec:
        parts = [parse_ring_spec(s) for s in spec.split("*")]
        R = parts[0]
        for S in parts[1:]:
            R = product(R, S)
        return R
    try:
        if spec == "r8":
            return r8()
        if spec.startswith("ut") and ":" in spec:
            n, base = spec[2:].split(":", 1)
            return upper_triangular(parse_ring_spec(base), int(n))
        if spec.startswith("mat") and ":" in spec:
            n, base = spec[3:].split(":", 1)
            return matrix_ring(parse_ring_spec(base), int(n))
        if spec.startswith("z"):
            return cyclic(int(spec[1:]))
        if spec.startswith("f"):
            p, k = prime_power(int(spec[1:]))
            return finite_field(p, k)
    except ValueError:
        pass
    raise ArgumentError(f"unrecognised ring spec {spec!r}")


# --- ring file format --------------------------------------------------------


def format_ring(R: FiniteRing) -> str:
    lines = [f"ring n={R.n}", f"zero={R.zero}", f"one={R.one}"]
    lines += ["add: " + " ".join(map(str, row)) for row in R.add_table]
    lines += ["mul: " + " ".join(map(str, row)) for row in R.mul_table]
    if R.labels != tuple(str(i) for i in range(R.n)):
        lines += [f"label {i} {lab}" for i, lab in enumerate(R.labels)]
    return "\n".join(lines) + "\n"


def parse_ring(text: str, name: str = "ring", validate: bool = True) -> FiniteRing:
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines or not lines[0].startswith("ring n="):
        raise ParseError("expected header 'ring n=<N>'", 0)
    try:
        n = int(lines[0].split("=", 1)[1])
    except ValueError:
        raise ParseError("bad ring size", 0) from None
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
    if len(add) != n or len(mul) != n or any(len(r) != n for r in add + mul):
        raise ParseError(f"expected {n} add and {n} mul rows of length {n}")
    return FiniteRing(add, mul, zero, one, labels=labels, name=name, validate=validate)
