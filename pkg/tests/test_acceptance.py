"""The twelve acceptance criteria, one test each.

Every test records a ``criterion N: PASS|FAIL ...`` line, shown in the pytest
terminal summary, then asserts. Run this file directly to print the lines
without pytest.
"""
import itertools
import random
import time
from fractions import Fraction
from pathlib import Path

from conftest import ACCEPTANCE_LINES, COMMUTATIVE, CORPUS, ring
from oracles import brute_zspan, gcd_rational, minimax_paths, padic_exponent
from valuon.cli import run
from valuon.gamma import (
    GAMMA_Q, abelianization_correspondence, check_valuation, classify_trop_hom, enumerate_gamma, gamma_element,
    gamma_leq, ideal_valuation, meet_of_sum_check, nu_gammaQ, nu_universal, padic_valuation, rescale, trop_hom,
    witness_violates,
)
from valuon.linalg import (
    RationalRep, is_ultrametric, least_fixed_point, mat_add, mat_eq, mat_identity, mat_mul, minimax_closure,
    rep_to_valuation,
)
from valuon.poly import ExpressionDomain, random_expression, root_crease_check, solution_set_valuation
from valuon.ring import RATIONALS, cyclic, finite_field, r8
from valuon.semiring import INF, MINMAX, TROPICAL, Monoid, PadicVector, gcd_q, powerset_semiring

GOLDEN = Path(__file__).parent / "golden" / "r8_singletons.txt"


def record(n, ok, desc):
    ACCEPTANCE_LINES.append(f"criterion {n}: {'PASS' if ok else 'FAIL'} {desc}")
    assert ok, desc


class Clock:
    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.start


def subsets(n):
    for r in range(n + 1):
        yield from itertools.combinations(range(n), r)


def test_criterion_1_singleton_table():
    with Clock() as c:
        code, out, _ = run(["gamma", "--ring-spec", "r8", "--singletons"])
    golden = GOLDEN.read_text()
    entries = sum(len(ln.split(": ", 1)[1].split()) for ln in golden.splitlines()[1:])
    ok = code == 0 and out == golden and entries == 36 and c.elapsed < 1
    record(1, ok, f"R8 singleton table byte-identical to golden ({entries} entries, {c.elapsed:.2f}s)")


def test_criterion_2_fano_structure():
    with Clock() as c:
        R = r8()
        G = enumerate_gamma(R)
        brute = {brute_zspan(R, A) for A in subsets(R.n)}

        def cls(*names):
            return gamma_element(R, [R.index(x) for x in names])

        ids = [
            cls("i", "k") == cls("k", "1") == cls("1", "i"),
            cls("1", "i+j+k") == cls("i+j+k", "j") == cls("1", "j"),
            cls("i", "j", "k") == cls("1", "i+j", "j"),
            cls("1", "i+j", "j+k") == cls("1", "i+j"),
            cls("1", "i+j") != cls("i", "j", "k"),
        ]
    ok = len(G) == 16 and len(brute) == 16 and all(ids) and c.elapsed < 1
    record(2, ok, f"|Gamma(R8)| = {len(G)} (oracle {len(brute)}), {sum(ids)}/5 identifications ({c.elapsed:.2f}s)")


def test_criterion_3_canonical_form():
    bad = 0
    pairs = 0
    with Clock() as c:
        for spec in ("z4", "z6", "f4", "r8"):
            R = ring(spec)
            subs = list(subsets(R.n))
            canon = [gamma_element(R, A) for A in subs]
            spans = [brute_zspan(R, A) for A in subs]
            singles = [nu_universal(R, b) for b in range(R.n)]
            for a in range(len(subs)):
                for b in range(len(subs)):
                    bad += (canon[a] == canon[b]) != (spans[a] == spans[b])
                pairs += len(subs)
                for x in range(R.n):
                    bad += gamma_leq(canon[a], singles[x]) != (x in spans[a])
    ok = bad == 0 and c.elapsed < 30
    record(3, ok, f"canonical form vs zspan oracle: {bad} violations over {pairs} subset pairs ({c.elapsed:.1f}s)")


def test_criterion_4_valuation_axioms():
    problems = []
    ideal_failures = []
    for spec in CORPUS:
        R = ring(spec)
        G = enumerate_gamma(R)
        rep = check_valuation(R, G.semiring, lambda a, R=R: nu_universal(R, a))
        if not (rep.unital and rep.multiplicative and rep.superadditive and rep.nondegenerate):
            problems.append(f"universal {spec}")
        S, nu = ideal_valuation(R)
        rep = check_valuation(R, S, nu)
        if not (rep.unital and rep.superadditive and rep.supermultiplicative):
            problems.append(f"ideal {spec}")
        if not rep.multiplicative:
            ideal_failures.append(spec)
        if R.n == 1:
            # subsets of A^1 form a two-element semiring even for the zero
            # ring, where 1 = 0 cannot map to both its zero and its one
            continue
        S, nu = solution_set_valuation(R, ["x"])
        rng = random.Random(spec)
        D = ExpressionDomain(R, ["x"], [random_expression(rng, R, ["x"], max_degree=2) for _ in range(12)])
        D.elements = [D.zero, D.one] + D.elements
        rep = check_valuation(D, S, nu, mode="supermultiplicative")
        if not (rep.unital and rep.superadditive):
            problems.append(f"solutions {spec}")
    # the ideal valuation is only claimed supermultiplicative; it is
    # multiplicative exactly on the commutative members of the corpus
    expected = sorted(set(CORPUS) - set(COMMUTATIVE))
    ok = not problems and sorted(ideal_failures) == expected
    record(4, ok, f"axioms on {len(CORPUS)} rings: {len(problems)} violations; "
                  f"ideal valuation not multiplicative on {', '.join(ideal_failures)} (reported)")


def test_criterion_5_meet_of_sum():
    bad = 0
    for spec in CORPUS:
        R = ring(spec)
        G = enumerate_gamma(R)
        nu = lambda a, R=R: nu_universal(R, a)  # noqa: E731
        for a, b in itertools.product(range(R.n), repeat=2):
            bad += not meet_of_sum_check(R, G.semiring, nu, a, b)
    rng = random.Random(1729)
    for _ in range(1000):
        a = Fraction(rng.randint(-500, 500), rng.randint(1, 500))
        b = Fraction(rng.randint(-500, 500), rng.randint(1, 500))
        for p in (2, 3, 5):
            bad += not meet_of_sum_check(RATIONALS, TROPICAL, padic_valuation(p), a, b)
        bad += not meet_of_sum_check(RATIONALS, GAMMA_Q, nu_gammaQ, a, b)
        bad += gcd_q(abs(a), abs(b)) != gcd_q(abs(a - b), abs(b))
        bad += gcd_q(abs(a), abs(b)) != gcd_rational(abs(a), abs(b))
    record(5, bad == 0, f"three-way equality: {bad} violations (corpus exhaustive, 1000 rational pairs)")


def test_criterion_6_small_fields():
    sizes = {p: len(enumerate_gamma(finite_field(p, 1))) for p in (2, 3, 5, 7)}
    f4 = len(enumerate_gamma(finite_field(2, 2)))
    quotient = len(powerset_semiring(Monoid.cyclic(2)))  # B[x]/<x^2 = 1>
    ok = all(v == 2 for v in sizes.values()) and f4 == 5 and quotient == 4
    record(6, ok, f"|Gamma(F_p)| = {sorted(set(sizes.values()))} for p in 2,3,5,7; "
                  f"expected discrepancy |Gamma(F4)| = {f4} != {quotient} = |B[x]/<x^2=1>| (open question)")


def test_criterion_7_crease_example():
    from valuon.poly import crease_points, parse_expression, roots, tropicalize
    with Clock() as c:
        R = r8()
        G = enumerate_gamma(R)
        f = parse_expression("(j+k)*z^2 + z*k + j", R, ["z"])
        t = tropicalize(f, lambda a: nu_universal(R, a), G.semiring)
        rts = {R.labels[z[0]] for z in roots(f)}
        crease = {str(z[0]) for z in crease_points(t, G.singletons())}
        extra = gamma_element(R, [R.index("i"), R.index("j"), R.index("k")])
        full = crease_points(t, list(G))
    ok = (rts == {"1", "j", "k", "i+j"} and crease == {"1", "x_j", "x_k", "x_{i+j}"}
          and (extra,) in full and c.elapsed < 1)
    record(7, ok, f"roots {sorted(rts)}, crease singletons {sorted(crease)}, "
                  f"[x_i + x_j + x_k] crease: {(extra,) in full} ({c.elapsed:.2f}s)")


def test_criterion_8_roots_are_crease():
    rng = random.Random(1729)
    violations = 0
    with Clock() as c:
        rings = [(R, enumerate_gamma(R)) for R in (r8(), cyclic(4))]
        for k in range(500):
            R, G = rings[k % 2]
            variables = ["x", "y"][:rng.randint(1, 2)]
            f = random_expression(rng, R, variables, max_monomials=3, max_degree=3)
            rep = root_crease_check(f, lambda a, R=R: nu_universal(R, a), G.semiring)
            violations += len(rep.violations)
    ok = violations == 0 and c.elapsed < 60
    record(8, ok, f"500 random expressions over R8 and Z/4: {violations} violations ({c.elapsed:.1f}s)")


def test_criterion_9_ostrowski():
    values = [Fraction(0), Fraction(1, 2), Fraction(1), Fraction(2)]
    rng = random.Random(1729)
    samples = [Fraction(rng.choice([-1, 1]) * rng.randint(1, 10**4), rng.randint(1, 10**4)) for _ in range(100)]
    bad = 0
    total = 0
    for combo in itertools.product(values, repeat=3):
        assignment = dict(zip((2, 3, 5), combo))
        v = classify_trop_hom(assignment)
        positive = [p for p, c in assignment.items() if c > 0]
        total += 1
        if not positive:
            bad += v.kind != "trivial"
        elif len(positive) == 1:
            p = positive[0]
            if v.kind != "p-adic" or v.prime != p or v.scale != assignment[p]:
                bad += 1
                continue
            phi = trop_hom(assignment)
            for q in samples:
                bad += rescale(phi(PadicVector.from_rational(q)), 1 / v.scale) != padic_exponent(p, q)
        else:
            bad += v.kind != "invalid" or not witness_violates(assignment, v)
    record(9, bad == 0, f"{total} assignments classified, p-adic ones checked on 100 rationals: {bad} violations")


def test_criterion_10_abelianization():
    with Clock() as c:
        rep = abelianization_correspondence(r8())
        others = [abelianization_correspondence(ring(s)) for s in COMMUTATIVE]
        sizes_ok = all(o.isomorphic and o.ab_gamma_size == o.gamma_ab_size == len(enumerate_gamma(ring(s)))
                       for s, o in zip(COMMUTATIVE, others))
    ok = rep.isomorphic and rep.ab_gamma_size == rep.gamma_ab_size == 5 and sizes_ok and c.elapsed < 10
    record(10, ok, f"R8: {rep}; {len(others)} commutative rings agree: {sizes_ok} ({c.elapsed:.1f}s)")


def random_candidate(rng, n):
    d = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            d[i][j] = d[j][i] = rng.choice([1, 2, 3, 4, 5, 8, INF])
    return d


def test_criterion_11_tropical_linalg():
    rng = random.Random(1729)
    bad = 0
    with Clock() as c:
        for _ in range(200):
            d = random_candidate(rng, rng.randint(1, 6))
            bad += [list(r) for r in minimax_closure(d)] != minimax_paths(d)
        for _ in range(1000):
            d = random_candidate(rng, rng.randint(1, 8))
            if rng.random() < 0.3:
                d = [list(r) for r in minimax_closure(d)]
            bad += is_ultrametric(d)[0] != ([list(r) for r in minimax_closure(d)] == d)
        for _ in range(300):
            n = rng.randint(1, 6)
            S = rng.choice([MINMAX, TROPICAL])
            A = [[rng.choice([0, 1, 2, 5, INF]) for _ in range(n)] for _ in range(n)]
            X = least_fixed_point(S, A)
            bad += not mat_eq(S, X, mat_add(S, mat_mul(S, A, X), mat_identity(S, n)))
    ok = bad == 0 and c.elapsed < 60
    record(11, ok, f"closure oracle, ultrametric equivalence, fixed-point checks: {bad} violations ({c.elapsed:.1f}s)")


def test_criterion_12_representation():
    gens = {"a": [[1, Fraction(1, 2)], [0, 1]], "b": [[2, 0], [0, Fraction(1, 3)]]}
    bad = []
    for p in (2, 3):
        _, rep = rep_to_valuation(RationalRep(gens, p), max_word=3)
        if not (rep.superadditive and rep.supermultiplicative and rep.unital):
            bad.append(p)
    record(12, not bad, f"generator words up to length 3, p in 2,3: violations at {bad or 'none'}")


if __name__ == "__main__":
    tests = [(int(name.split("_")[2]), fn) for name, fn in globals().items() if name.startswith("test_criterion_")]
    for n, fn in sorted(tests):
        try:
            fn()
        except AssertionError:
            pass
        except Exception as exc:
            ACCEPTANCE_LINES.append(f"criterion {n}: FAIL {type(exc).__name__}: {exc}")
    for line in ACCEPTANCE_LINES:
        print(line)
