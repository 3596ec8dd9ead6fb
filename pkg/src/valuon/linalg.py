"""Matrices over semirings: M_n(S), Kleene star of X = AX + I, minimax
closure and ultrametrics, and valuations induced by rational representations."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .errors import ArgumentError, DomainMismatchError, NonConvergenceError, ParseError, ValidationError
from .gamma import ValuationReport, _require_prime, check_valuation, nu_padic
from .semiring import (
    INF, MINMAX, TROPICAL, Semiring, is_rational, parse_number, show_number,
)

Matrix = tuple  # n-tuple of n-tuples

SEMIRINGS = {"tropical": TROPICAL, "minmax": MINMAX}
MAX_ENUMERATED = 4096


def as_matrix(rows) -> Matrix:
    m = tuple(tuple(r) for r in rows)
    if any(len(r) != len(m) for r in m):
        raise DomainMismatchError(f"matrix is not square: {[len(r) for r in m]}")
    return m


def _dim(*ms) -> int:
    n = len(ms[0])
    for m in ms[1:]:
        if len(m) != n:
            raise DomainMismatchError(f"dimension mismatch: {n} vs {len(m)}")
    return n


def mat_identity(S: Semiring, n: int) -> Matrix:
    return tuple(tuple(S.one if i == j else S.zero for j in range(n)) for i in range(n))


def mat_zero(S: Semiring, n: int) -> Matrix:
    return tuple((S.zero,) * n for _ in range(n))


def mat_add(S: Semiring, A: Matrix, B: Matrix) -> Matrix:
    n = _dim(A, B)
    return tuple(tuple(S.add(A[i][j], B[i][j]) for j in range(n)) for i in range(n))


def mat_mul(S: Semiring, A: Matrix, B: Matrix) -> Matrix:
    _dim(A, B)
    cols = list(zip(*B))
    return tuple(
        tuple(S.sum(S.mul(a, b) for a, b in zip(row, col)) for col in cols)
        for row in A
    )


def mat_eq(S: Semiring, A: Matrix, B: Matrix) -> bool:
    return len(A) == len(B) and all(S.eq(a, b) for ra, rb in zip(A, B) for a, b in zip(ra, rb))


def show_matrix(S: Semiring, A: Matrix) -> str:
    return "[" + ", ".join("[" + ", ".join(S.show(x) for x in row) + "]" for row in A) + "]"


def matrix_semiring(S: Semiring, n: int) -> Semiring:
    """M_n(S) as a semiring handle. Finite when S is and |S|^(n*n) is small."""
    elements = None
    if S.finite and len(S.elements) ** (n * n) <= MAX_ENUMERATED:
        elements = tuple(
            tuple(tuple(flat[i * n:(i + 1) * n]) for i in range(n))
            for flat in itertools.product(S.elements, repeat=n * n)
        )

    def sample(rng):
        return tuple(tuple(S.draw(rng) for _ in range(n)) for _ in range(n))

    def contains(A):
        return (isinstance(A, tuple) and len(A) == n
                and all(isinstance(r, tuple) and len(r) == n and all(S.contains(x) for x in r) for r in A))

    return Semiring(
        name=f"M{n}({S.name})",
        add=lambda A, B: mat_add(S, A, B),
        mul=lambda A, B: mat_mul(S, A, B),
        zero=mat_zero(S, n),
        one=mat_identity(S, n),
        elements=elements,
        contains=contains,
        sample=sample if S.sample is not None or S.finite else None,
        eq=lambda A, B: mat_eq(S, A, B),
        show=lambda A: show_matrix(S, A),
        totally_ordered=False,
    )


# --- Kleene star -------------------------------------------------------------


def _first_difference(S, A, B):
    for i, (ra, rb) in enumerate(zip(A, B)):
        for j, (a, b) in enumerate(zip(ra, rb)):
            if not S.eq(a, b):
                return (i, j)
    return None


def least_fixed_point(S: Semiring, A: Matrix) -> Matrix:
    """Least X with X = AX + I, by iterating X <- AX + I from I.

    Over (min, max) and over min-plus with nonnegative weights the iterates
    are path sums over at most k edges, so they settle within n steps.
    Negative min-plus weights are rejected up front.
    """
    A = as_matrix(A)
    n = len(A)
    S.check_member(*(x for row in A for x in row))
    if S is TROPICAL:
        for i, row in enumerate(A):
            for j, x in enumerate(row):
                if x != INF and x < 0:
                    raise NonConvergenceError(f"negative min-plus weight {x} at ({i},{j})", (i, j))
    identity = mat_identity(S, n)
    X = identity
    for _ in range(n + 1):
        nxt = mat_add(S, mat_mul(S, A, X), identity)
        diff = _first_difference(S, X, nxt)
        if diff is None:
            return X
        X = nxt
    i, j = diff
    raise NonConvergenceError(f"iteration did not settle within {n + 1} steps; entry ({i},{j}) still moving", diff)


# --- ultrametrics ------------------------------------------------------------


def validate_candidate(d) -> Matrix:
    d = as_matrix(d)
    n = len(d)
    for i in range(n):
        if d[i][i] != 0:
            raise ValidationError(f"nonzero diagonal entry d({i},{i}) = {show_number(d[i][i])}")
        for j in range(n):
            x = d[i][j]
            if not (x == INF or (is_rational(x) and x >= 0)):
                raise ValidationError(f"entry d({i},{j}) = {x!r} is not in [0, inf]")
            if d[j][i] != x:
                raise ValidationError(f"asymmetric: d({i},{j}) != d({j},{i})")
    return d


def is_ultrametric(d) -> tuple[bool, tuple | None]:
    """(True, None) or (False, (i, j, k)) with d(i,k) > max(d(i,j), d(j,k))."""
    d = validate_candidate(d)
    n = len(d)
    for i, j, k in itertools.product(range(n), repeat=3):
        if d[i][k] > max(d[i][j], d[j][k]):
            return False, (i, j, k)
    return True, None


def minimax_closure(d) -> Matrix:
    """Bottleneck path weights: the Kleene star of d over (min, max)."""
    d = validate_candidate(d)
    return least_fixed_point(MINMAX, d)


# --- representations ---------------------------------------------------------


@dataclass(frozen=True)
class RationalRep:
    generators: dict  # label -> square matrix over Q
    p: int

    def __post_init__(self):
        _require_prime(self.p)
        if not self.generators:
            raise ArgumentError("representation needs at least one generator")
        ns = set()
        for label, g in self.generators.items():
            m = as_matrix(g)
            if not all(is_rational(x) for r in m for x in r):
                raise DomainMismatchError(f"generator {label} has non-rational entries")
            ns.add(len(m))
        if len(ns) != 1:
            raise DomainMismatchError(f"generators have different dimensions {sorted(ns)}")

    @property
    def n(self) -> int:
        return len(next(iter(self.generators.values())))


class MatrixAlgebraQ:
    """M_n(Q) as a ring-like domain; ``elements`` is a finite test set."""

    def __init__(self, n: int, elements=None):
        self.n = n
        self.zero = tuple((Fraction(0),) * n for _ in range(n))
        self.one = tuple(tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n))
        self.elements = elements

    def add(self, A, B):
        return tuple(tuple(a + b for a, b in zip(ra, rb)) for ra, rb in zip(A, B))

    def mul(self, A, B):
        cols = list(zip(*B))
        return tuple(tuple(sum((a * b for a, b in zip(r, c)), Fraction(0)) for c in cols) for r in A)

    def neg(self, A):
        return tuple(tuple(-a for a in r) for r in A)


def entrywise_valuation(p: int, g) -> Matrix:
    return tuple(tuple(nu_padic(p, x) for x in row) for row in g)


def rep_words(rep: RationalRep, max_word: int = 3) -> list:
    """All products of generators of length 0..max_word (identity included)."""
    Q = MatrixAlgebraQ(rep.n)
    gens = [tuple(tuple(Fraction(x) for x in r) for r in as_matrix(g)) for g in rep.generators.values()]
    seen = {Q.one: None}
    layer = [Q.one]
    for _ in range(max_word):
        layer = [Q.mul(w, g) for w in layer for g in gens]
        for w in layer:
            seen.setdefault(w, None)
    return list(seen)


def rep_to_valuation(rep: RationalRep, max_word: int = 3) -> tuple[dict, ValuationReport]:
    """Entrywise p-adic valuation of each generator, plus the supermultiplicative
    axiom check over all pairs of generator words up to ``max_word`` (covering
    their sums and products)."""
    nu_map = {label: entrywise_valuation(rep.p, g) for label, g in rep.generators.items()}
    words = rep_words(rep, max_word)
    Q = MatrixAlgebraQ(rep.n, elements=[MatrixAlgebraQ(rep.n).zero] + words)
    T = matrix_semiring(TROPICAL, rep.n)
    report = check_valuation(Q, T, lambda A: entrywise_valuation(rep.p, A), mode="supermultiplicative")
    return nu_map, report


# --- file format -------------------------------------------------------------


def format_matrix(A: Matrix, semiring: str, label: str | None = None) -> str:
    head = f"matrix n={len(A)} semiring={semiring}"
    if label is not None:
        head += f" label={label}"
    rows = [" ".join(show_number(x) for x in row) for row in A]
    return "\n".join([head] + rows) + "\n"


def _parse_header(line: str, lineno: int) -> dict:
    parts = line.split()
    if not parts or parts[0] != "matrix":
        raise ParseError(f"expected 'matrix n=<N> semiring=<name>' header, got {line!r}", lineno)
    fields = {}
    for part in parts[1:]:
        key, sep, value = part.partition("=")
        if not sep:
            raise ParseError(f"bad header field {part!r}", lineno)
        fields[key] = value
    if "n" not in fields or "semiring" not in fields:
        raise ParseError("header needs n= and semiring=", lineno)
    try:
        fields["n"] = int(fields["n"])
    except ValueError:
        raise ParseError(f"bad dimension {fields['n']!r}", lineno) from None
    return fields


def parse_matrices(text: str) -> list[tuple[dict, Matrix]]:
    """All ``matrix`` blocks in ``text`` as (header fields, matrix). Blank lines
    and ``#`` comments are ignored; positions are line numbers."""
    lines = [(i + 1, ln.split("#")[0].strip()) for i, ln in enumerate(text.splitlines())]
    lines = [(i, ln) for i, ln in lines if ln]
    out = []
    pos = 0
    while pos < len(lines):
        lineno, line = lines[pos]
        head = _parse_header(line, lineno)
        n = head["n"]
        rows = []
        for lineno, line in lines[pos + 1:pos + 1 + n]:
            try:
                row = tuple(parse_number(tok) for tok in line.split())
            except (ValueError, ZeroDivisionError):
                raise ParseError(f"bad matrix entry in {line!r}", lineno) from None
            if len(row) != n:
                raise ParseError(f"expected {n} entries, got {len(row)}", lineno)
            rows.append(row)
        if len(rows) != n:
            raise ParseError(f"expected {n} rows", lineno)
        out.append((head, tuple(rows)))
        pos += 1 + n
    if not out:
        raise ParseError("no matrix found", 1)
    return out


def parse_matrix(text: str) -> tuple[Semiring, Matrix]:
    blocks = parse_matrices(text)
    if len(blocks) != 1:
        raise ParseError(f"expected one matrix, found {len(blocks)}")
    head, A = blocks[0]
    name = head["semiring"]
    if name not in SEMIRINGS:
        raise ParseError(f"unknown semiring {name!r} (expected one of {', '.join(SEMIRINGS)})")
    S = SEMIRINGS[name]
    S.check_member(*(x for row in A for x in row))
    return S, A


def parse_rep(text: str, p: int) -> RationalRep:
    gens = {}
    for k, (head, A) in enumerate(parse_matrices(text)):
        if any(x == INF for row in A for x in row):
            raise ParseError("representation matrices must be rational")
        gens[head.get("label", f"g{k}")] = A
    return RationalRep(gens, p)
