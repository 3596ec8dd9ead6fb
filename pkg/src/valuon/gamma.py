"""The universal valuation semiring of a finite ring, in canonical form.

An element of Gamma_R is stored as the additive subgroup generated by the
ring elements of a generator sum: two sums are equal exactly when they span
the same subgroup, and the product of two classes is the span of the
elementwise products.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Iterable, Sequence

from sympy import isprime, multiplicity

from .errors import ArgumentError, DomainMismatchError, ParseError, ResourceBoundError
from .ring import FiniteRing, RingHom, Subgroup, _bits, abelianize_ring, two_sided_ideal, zspan
from .semiring import (
    DEFAULT_CASES,
    GCDQ,
    INF,
    PadicVector,
    Semiring,
    check_homomorphism,
    congruence_closure,
    default_seed,
    gcd_q,
    padic_add,
    quotient_semiring,
)

MAX_RING_SIZE = 256
MAX_CLASSES = 20000


class GammaElement(Subgroup):
    """Class [sum x_a] in Gamma_R, identified with the Z-span of the a's."""

    __slots__ = ()

    def generators(self) -> list[int]:
        """A small generating set, picked greedily by index."""
        R = self.ring
        gens, mask = [], 1 << R.zero
        for x in self:
            if not mask >> x & 1:
                gens.append(x)
                mask = zspan(R, gens).mask
            if mask == self.mask:
                break
        return gens

    def __str__(self):
        R = self.ring
        if self.mask == 1 << R.zero:
            return "0"
        if self.mask == zspan(R, [R.one]).mask:
            return "1"
        for x in self:
            if zspan(R, [x]).mask == self.mask:
                return _x(R, x)
        return "[" + " + ".join(_x(R, g) for g in self.generators()) + "]"

    def __repr__(self):
        return f"GammaElement({self})"


def _x(R: FiniteRing, a: int) -> str:
    if a == R.one:
        return "1"
    lab = R.show(a)
    return f"x_{lab}" if len(lab) == 1 else f"x_{{{lab}}}"


def _check_same(a: GammaElement, b: GammaElement):
    if a.ring is not b.ring:
        raise DomainMismatchError("Gamma elements over different rings")


def gamma_element(R: FiniteRing, gens: Iterable[int]) -> GammaElement:
    return GammaElement(R, zspan(R, gens).mask)


def nu_universal(R: FiniteRing, r: int) -> GammaElement:
    """The universal valuation r -> [x_r]."""
    return gamma_element(R, [r])


def hat_gamma_add_class(R: FiniteRing, gens: Iterable[int]) -> GammaElement:
    """Additive class of a generator sum in the supermultiplicative variant.

    Only these sums have a canonical form there; the product is not modelled.
    """
    return gamma_element(R, gens)


def _sum_mask(R: FiniteRing, a: int, b: int) -> int:
    """Mask of the subgroup sum A + B of two subgroup masks."""
    A, B = list(_bits(a)), list(_bits(b))
    mask = 0
    add = R.add_table
    for x in A:
        row = add[x]
        for y in B:
            mask |= 1 << row[y]
    return mask


def gamma_add(a: GammaElement, b: GammaElement) -> GammaElement:
    _check_same(a, b)
    return GammaElement(a.ring, _sum_mask(a.ring, a.mask, b.mask))


def gamma_mul(a: GammaElement, b: GammaElement) -> GammaElement:
    _check_same(a, b)
    R = a.ring
    mul = R.mul_table
    B = list(b)
    return gamma_element(R, {mul[x][y] for x in a for y in B})


def gamma_leq(a: GammaElement, b: GammaElement) -> bool:
    """[A] <= [B] iff A contains B."""
    _check_same(a, b)
    return b.mask & ~a.mask == 0


def _sort_key(mask: int):
    elems = tuple(_bits(mask))
    return (len(elems), elems)


class GammaSemiring:
    """Gamma_R with every element enumerated and full operation tables.

    Elements are ordered by subgroup size, then lexicographically by the
    sorted index list. ``semiring`` is a table-backed handle whose carrier is
    the GammaElement objects themselves.
    """

    def __init__(self, R: FiniteRing, masks: Sequence[int]):
        self.ring = R
        self.elements = tuple(GammaElement(R, m) for m in sorted(masks, key=_sort_key))
        self.index = {g: i for i, g in enumerate(self.elements)}
        n = len(self.elements)
        self.add_table = [[self.index[gamma_add(a, b)] for b in self.elements] for a in self.elements]
        self.mul_table = [[self.index[gamma_mul(a, b)] for b in self.elements] for a in self.elements]
        self.zero = self.elements[self.index[nu_universal(R, R.zero)]]
        self.one = self.elements[self.index[nu_universal(R, R.one)]]
        elems, add_t, mul_t, idx = self.elements, self.add_table, self.mul_table, self.index
        self.semiring = Semiring(
            name=f"Gamma({R.name})",
            add=lambda a, b: elems[add_t[idx[a]][idx[b]]],
            mul=lambda a, b: elems[mul_t[idx[a]][idx[b]]],
            zero=self.zero,
            one=self.one,
            elements=elems,
            contains=lambda x: isinstance(x, GammaElement) and x.ring is R,
            show=str,
            lookup={str(g): g for g in elems}.get,
        )
        assert len(self.index) == n

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def singletons(self, nontrivial: bool = False) -> list[GammaElement]:
        """Distinct classes [x_a], in element order; optionally without 0 and 1."""
        R = self.ring
        found = {nu_universal(R, a) for a in range(R.n)}
        out = [g for g in self.elements if g in found]
        if nontrivial:
            out = [g for g in out if g != self.zero and g != self.one]
        return out


def _check_size(R: FiniteRing):
    if R.n > MAX_RING_SIZE:
        raise ResourceBoundError(f"ring has {R.n} elements; the bound is {MAX_RING_SIZE}")


def enumerate_subgroup_masks(R: FiniteRing) -> set[int]:
    """All additive subgroups: singleton spans closed under subgroup join."""
    _check_size(R)
    singles = {zspan(R, [a]).mask for a in range(R.n)}
    found = set(singles)
    queue = list(singles)
    while queue:
        m = queue.pop()
        for s in singles:
            j = _sum_mask(R, m, s)
            if j not in found:
                found.add(j)
                if len(found) > MAX_CLASSES:
                    raise ResourceBoundError(f"more than {MAX_CLASSES} subgroups")
                queue.append(j)
    return found


def enumerate_subgroup_masks_bruteforce(R: FiniteRing) -> set[int]:
    """zspan of every subset of R; the power-set cross-check (n <= 16)."""
    if R.n > 16:
        raise ResourceBoundError("power-set sweep is limited to 16 elements")
    return {
        zspan(R, subset).mask
        for r in range(R.n + 1)
        for subset in itertools.combinations(range(R.n), r)
    }


def enumerate_gamma(R: FiniteRing) -> GammaSemiring:
    return GammaSemiring(R, enumerate_subgroup_masks(R))


# --- table format ------------------------------------------------------------


def format_gamma(G: GammaSemiring) -> str:
    lines = [f"gamma n={G.ring.n} classes={len(G)}"]
    lines += [f"g{k}: " + " ".join(map(str, g.elements)) for k, g in enumerate(G.elements)]
    lines.append("add:")
    lines += [" ".join(map(str, row)) for row in G.add_table]
    lines.append("mul:")
    lines += [" ".join(map(str, row)) for row in G.mul_table]
    return "\n".join(lines) + "\n"


@dataclass
class GammaTable:
    """Parsed form of the Gamma table format."""

    ring_size: int
    subgroups: list[tuple[int, ...]]
    add: list[list[int]]
    mul: list[list[int]]

    def semiring(self, name: str = "gamma-table") -> Semiring:
        from .semiring import table_semiring

        n = len(self.subgroups)
        zero = next(z for z in range(n) if all(self.add[z][a] == a for a in range(n)))
        one = next(e for e in range(n) if all(self.mul[e][a] == a == self.mul[a][e] for a in range(n)))
        return table_semiring(self.add, self.mul, zero, one, labels=[f"g{k}" for k in range(n)], name=name)


def parse_gamma(text: str) -> GammaTable:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("gamma "):
        raise ParseError("expected header 'gamma n=<N> classes=<K>'", 0)
    try:
        fields = dict(tok.split("=") for tok in lines[0].split()[1:])
        n, k = int(fields["n"]), int(fields["classes"])
        subgroups = []
        for i in range(k):
            tag, _, rest = lines[1 + i].partition(":")
            if tag != f"g{i}":
                raise ParseError(f"expected g{i}", 1 + i)
            subgroups.append(tuple(int(x) for x in rest.split()))
        pos = 1 + k
        if lines[pos] != "add:":
            raise ParseError("expected 'add:'", pos)
        add = [[int(x) for x in ln.split()] for ln in lines[pos + 1: pos + 1 + k]]
        pos += 1 + k
        if lines[pos] != "mul:":
            raise ParseError("expected 'mul:'", pos)
        mul = [[int(x) for x in ln.split()] for ln in lines[pos + 1: pos + 1 + k]]
    except (KeyError, ValueError, IndexError):
        raise ParseError("malformed gamma table") from None
    if len(add) != k or len(mul) != k:
        raise ParseError("truncated gamma table")
    return GammaTable(n, subgroups, add, mul)


def format_singleton_table(G: GammaSemiring) -> str:
    """Multiplication table restricted to the nontrivial singleton classes."""
    S = G.singletons(nontrivial=True)
    lines = ["singletons: " + " ".join(map(str, S))]
    for a in S:
        lines.append(f"{a}: " + " ".join(str(gamma_mul(a, b)) for b in S))
    return "\n".join(lines) + "\n"


# --- valuation checks --------------------------------------------------------


@dataclass
class ValuationReport:
    mode: str = "multiplicative"
    unital: bool = True
    multiplicative: bool = True
    superadditive: bool = True
    supermultiplicative: bool = True
    nondegenerate: bool = True
    counterexamples: dict = field(default_factory=dict)

    @property
    def is_valuation(self) -> bool:
        mult = self.multiplicative if self.mode == "multiplicative" else self.supermultiplicative
        return self.unital and self.superadditive and mult

    def fail(self, axiom: str, witness):
        if getattr(self, axiom):
            setattr(self, axiom, False)
            self.counterexamples[axiom] = witness

    def lines(self) -> list[str]:
        out = []
        for axiom in ("unital", "multiplicative", "supermultiplicative", "superadditive", "nondegenerate"):
            ok = getattr(self, axiom)
            line = f"{axiom}: {'pass' if ok else 'fail'}"
            if not ok:
                line += f" {self.counterexamples[axiom]!r}"
            out.append(line)
        out.append(f"valuation ({self.mode}): {'yes' if self.is_valuation else 'no'}")
        return out


def check_valuation(domain, S: Semiring, nu: Callable, mode: str = "multiplicative",
                    elements: Sequence | None = None, seed: int | None = None,
                    cases: int = DEFAULT_CASES) -> ValuationReport:
    """Check the valuation axioms of ``nu: domain -> S``.

    ``domain`` is a ring-like object (``add``, ``mul``, ``neg``, ``zero``,
    ``one``). Pairs range over ``elements`` (default: the whole finite
    carrier) or over ``cases`` seeded random pairs from ``domain.sample``.
    Superadditivity is tested in the equational form
    nu(a+b) + nu(a) + nu(b) == nu(a) + nu(b).
    """
    if mode not in ("multiplicative", "supermultiplicative"):
        raise ArgumentError(f"unknown mode {mode!r}")
    report = ValuationReport(mode=mode)
    eq, add, mul = S.eq, S.add, S.mul
    if not eq(nu(domain.zero), S.zero):
        report.fail("unital", ("0", domain.zero))
    if not eq(nu(domain.one), S.one):
        report.fail("unital", ("1", domain.one))
    elif not eq(nu(domain.neg(domain.one)), S.one):
        report.fail("unital", ("-1", domain.neg(domain.one)))

    if elements is None:
        elements = domain.elements
    if elements is not None:
        elements = list(elements)
        pairs = itertools.product(elements, repeat=2)
        singles = elements
    else:
        rng = random.Random(default_seed() if seed is None else seed)
        pairs = [(domain.sample(rng), domain.sample(rng)) for _ in range(cases)]
        singles = [x for p in pairs for x in p]

    cache: dict = {}

    def val(x):
        try:
            return cache[x]
        except KeyError:
            cache[x] = v = nu(x)
            return v
        except TypeError:
            return nu(x)

    for a in singles:
        if a != domain.zero and eq(val(a), S.zero):
            report.fail("nondegenerate", (a,))
            break
    for a, b in pairs:
        na, nb = val(a), val(b)
        inf_ab = add(na, nb)
        if not eq(add(val(domain.add(a, b)), inf_ab), inf_ab):
            report.fail("superadditive", (a, b))
        prod = mul(na, nb)
        nab = val(domain.mul(a, b))
        if not eq(nab, prod):
            report.fail("multiplicative", (a, b))
            if not eq(add(prod, nab), prod):
                report.fail("supermultiplicative", (a, b))
    return report


def meet_of_sum_check(domain, S: Semiring, nu: Callable, a, b) -> bool:
    """nu(a)+nu(b) == nu(a+b)+nu(a) == nu(a+b)+nu(b)."""
    na, nb, ns = nu(a), nu(b), nu(domain.add(a, b))
    first = S.add(na, nb)
    return S.eq(first, S.add(ns, na)) and S.eq(first, S.add(ns, nb))


def universal_factor(G: GammaSemiring, S: Semiring, nu: Callable) -> Callable:
    """The semiring map Gamma_R -> S induced by a valuation: [A] -> sum nu(a)."""

    def phi(g: GammaElement):
        return S.sum(nu(a) for a in g)

    return phi


def gamma_functor_map(f: RingHom) -> Callable[[GammaElement], GammaElement]:
    """Gamma_f: [A] -> [f(A)]."""

    def gamma_f(g: GammaElement) -> GammaElement:
        if g.ring is not f.source:
            raise DomainMismatchError("element is not over the source ring")
        return GammaElement(f.target, zspan(f.target, {f.table[a] for a in g}).mask)

    return gamma_f


# --- ideal valuation ---------------------------------------------------------


def ideal_semiring(R: FiniteRing) -> Semiring:
    """Two-sided ideals under ideal sum and ideal product, ordered by reverse
    inclusion: zero is {0}, one is R."""
    ideals = sorted({m for m in enumerate_subgroup_masks(R) if two_sided_ideal(R, _bits(m)).mask == m},
                    key=_sort_key)
    elems = tuple(GammaElement(R, m) for m in ideals)
    return Semiring(
        name=f"Ideals({R.name})",
        add=gamma_add,
        mul=gamma_mul,
        zero=GammaElement(R, 1 << R.zero),
        one=GammaElement(R, (1 << R.n) - 1),
        elements=elems,
        contains=lambda x: isinstance(x, GammaElement) and x.ring is R,
    )


def ideal_valuation(R: FiniteRing) -> tuple[Semiring, Callable]:
    S = ideal_semiring(R)

    def nu(a):
        return GammaElement(R, two_sided_ideal(R, [a]).mask)

    return S, nu


# --- the rationals -----------------------------------------------------------


def _require_prime(p: int):
    if not (isinstance(p, int) and isprime(p)):
        raise ArgumentError(f"{p!r} is not a prime")


def nu_padic(p: int, q) -> Any:
    """Exponent of ``p`` in the rational ``q``; infinity for 0."""
    _require_prime(p)
    q = Fraction(q)
    if q == 0:
        return INF
    return multiplicity(p, abs(q.numerator)) - multiplicity(p, q.denominator)


def padic_valuation(p: int) -> Callable:
    _require_prime(p)
    return lambda q: nu_padic(p, q)


@dataclass(frozen=True)
class GammaQElement:
    """Element of Gamma_Q, shown as the nonnegative rational |q|."""

    value: Fraction

    @property
    def vector(self) -> PadicVector:
        return PadicVector.from_rational(self.value)

    def __str__(self):
        return str(self.value)


GAMMA_Q = Semiring(
    name="Gamma(Q)",
    add=lambda a, b: GammaQElement(gcd_q(a.value, b.value)),
    mul=lambda a, b: GammaQElement(a.value * b.value),
    zero=GammaQElement(Fraction(0)),
    one=GammaQElement(Fraction(1)),
    contains=lambda x: isinstance(x, GammaQElement),
    sample=lambda rng: GammaQElement(GCDQ.sample(rng)),
)


def nu_gammaQ(q) -> GammaQElement:
    return GammaQElement(abs(Fraction(q)))


# --- Ostrowski classification ------------------------------------------------


@dataclass(frozen=True)
class HomClassification:
    """Verdict on a candidate map Z^omega -> T given by its values on unit vectors.

    ``witness`` is a pair (u, v) of exponent vectors with
    phi(u + v) != phi(u) + phi(v) under the linear extension.
    """

    kind: str  # "trivial" | "p-adic" | "invalid"
    prime: int | None = None
    scale: Fraction | None = None
    witness: tuple | None = None
    reason: str = ""

    def __str__(self):
        if self.kind == "trivial":
            return "trivial"
        if self.kind == "p-adic":
            return f"p-adic p={self.prime} scale={self.scale}"
        return f"invalid: {self.reason}"


def trop_hom(assignment: dict) -> Callable[[PadicVector], Any]:
    """Linear extension phi(v) = sum_p v_p * c_p, with phi(inf) = inf."""
    values = {int(p): Fraction(c) for p, c in assignment.items()}

    def phi(v: PadicVector):
        if v.is_inf:
            return INF
        total = sum((e * values.get(p, 0) for p, e in v.exps), Fraction(0))
        return total.numerator if total.denominator == 1 else total

    return phi


def classify_trop_hom(assignment: dict) -> HomClassification:
    values = {}
    for p, c in assignment.items():
        p = int(p)
        _require_prime(p)
        values[p] = Fraction(c)
    for p in sorted(values):
        if values[p] < 0:
            return HomClassification(
                "invalid",
                witness=(PadicVector.unit(p), PadicVector()),
                reason=f"min(c_{p},0) must be 0",
            )
    positive = sorted(p for p, c in values.items() if c > 0)
    if not positive:
        return HomClassification("trivial")
    if len(positive) == 1:
        p = positive[0]
        return HomClassification("p-adic", prime=p, scale=values[p])
    p, q = positive[:2]
    return HomClassification(
        "invalid",
        witness=(PadicVector.unit(p), PadicVector.unit(q)),
        reason=f"min(c_{p},c_{q}) must be 0",
    )


def witness_violates(assignment: dict, verdict: HomClassification) -> bool:
    """True iff the verdict's witness really breaks additivity of phi."""
    if verdict.witness is None:
        return False
    phi = trop_hom(assignment)
    u, v = verdict.witness
    return phi(padic_add(u, v)) != min(phi(u), phi(v))


def rescale(x, c):
    """eta_c on T: tropical x^c, i.e. c * x."""
    if x == INF:
        return INF
    y = Fraction(c) * x
    return y.numerator if y.denominator == 1 else y


# --- abelianization ----------------------------------------------------------


@dataclass
class AbReport:
    ab_gamma_size: int
    gamma_ab_size: int
    isomorphic: bool
    reason: str = ""

    def __str__(self):
        return f"{self.ab_gamma_size} {self.gamma_ab_size} isomorphic: {'yes' if self.isomorphic else 'no'}"


def abelianization_correspondence(R: FiniteRing) -> AbReport:
    """Compare Ab(Gamma_R), built by congruence closure on all (AB, BA), with
    Gamma_{Ab(R)}, through the map [class of [A]] -> [pi(A)]."""
    G = enumerate_gamma(R)
    S = G.semiring
    pairs = [(S.mul(a, b), S.mul(b, a)) for a in G for b in G]
    cong = congruence_closure(S, pairs)
    Q = quotient_semiring(S, cong)
    AbR, pi = abelianize_ring(R)
    H = enumerate_gamma(AbR)
    gamma_pi = gamma_functor_map(pi)
    image = []
    for members in cong.classes:
        targets = {gamma_pi(G.elements[i]) for i in members}
        if len(targets) != 1:
            return AbReport(len(Q), len(H), False, "map is not constant on a congruence class")
        image.append(targets.pop())
    if len(set(image)) != len(image) or len(image) != len(H):
        return AbReport(len(Q), len(H), False, "map is not a bijection")
    report = check_homomorphism(lambda k: image[k], Q, H.semiring)
    if not report.ok:
        return AbReport(len(Q), len(H), False, f"not a homomorphism: {report.counterexamples}")
    return AbReport(len(Q), len(H), True)
