import os
import subprocess
import sys
from fractions import Fraction
from pathlib import Path

import pytest

from valuon.cli import SCHEMA, read_machine, run
from valuon.gamma import enumerate_gamma, format_gamma, nu_universal
from valuon.poly import parse_expression, tropicalize
from valuon.ring import cyclic, format_ring, r8
from valuon.semiring import INF, MINMAX, TROPICAL, format_semiring, parse_semiring

GOLDEN = Path(__file__).parent / "golden"
EXAMPLE = "(j+k)*z^2 + z*k + j"


def ok(*argv):
    code, out, err = run(list(argv))
    assert code == 0, err
    return out


def lines(*argv):
    return ok(*argv).splitlines()


# --- ring --------------------------------------------------------------------


def test_ring_r8_listing():
    out = ok("ring", "--upper-triangular", "2", "--base", "z2")
    assert out.startswith("# R8: 8 elements")
    labels = out.splitlines()[1].split()[2:]
    assert {"i", "j", "k"} <= set(labels)
    assert "ring n=8" in out


def test_ring_zero_ring():
    out = ok("ring", "--cyclic", "1")
    assert "zero=0\none=0" in out


def test_ring_validate():
    out = lines("ring", "--field", "4", "--validate")
    assert len(out) == 9 and out[-1] == "ring: yes"
    assert all(ln.endswith("pass") for ln in out[:-1])


def test_ring_validate_reports_failure(tmp_path):
    bad = tmp_path / "bad.ring"
    bad.write_text("ring n=2\nzero=0\none=1\nadd: 0 1\nadd: 1 0\nmul: 0 0\nmul: 0 0\n")
    code, out, _ = run(["ring", "--ring-file", str(bad), "--validate"])
    assert code == 1
    assert "multiplicative identity: fail at" in out and out.endswith("ring: no\n")
    code, out, err = run(["ring", "--ring-file", str(bad)])
    assert code == 1 and "RingValidationError" in err and "witness" in err


# --- gamma -------------------------------------------------------------------


def test_gamma_singletons_match_golden():
    out = ok("gamma", "--ring-spec", "r8", "--singletons")
    assert out == (GOLDEN / "r8_singletons.txt").read_text()


def test_gamma_ut2_spelling_is_r8():
    assert ok("gamma", "--upper-triangular", "2", "--singletons") == (GOLDEN / "r8_singletons.txt").read_text()


@pytest.mark.parametrize("argv,count", [(["--field", "2"], 2), (["--cyclic", "4"], 3), (["--ring-spec", "r8"], 16)])
def test_gamma_class_counts(argv, count):
    assert lines("gamma", *argv)[0].endswith(f": {count} classes")


def test_gamma_size_bound():
    code, _, err = run(["gamma", "--matrix", "3"])
    assert code == 1 and "ResourceBoundError" in err


# --- val ---------------------------------------------------------------------


def test_val_universal():
    out = lines("val", "--ring-spec", "r8")
    assert out[-1] == "valuation (multiplicative): yes"


def test_val_ideal_reports_multiplicativity_failure():
    out = ok("val", "--ring-spec", "r8", "--valuation", "ideal")
    assert "multiplicative: fail" in out and "superadditive: pass" in out
    assert "supermultiplicative: pass" in out


def test_val_padic_and_gammaq():
    assert lines("val", "--valuation", "padic:3", "--cases", "200")[-1].endswith("yes")
    assert lines("val", "--valuation", "gammaq", "--cases", "200")[-1].endswith("yes")


def test_val_solutions():
    out = ok("val", "--field", "4", "--valuation", "solutions", "--cases", "30")
    assert "superadditive: pass" in out and "unital: pass" in out


def test_val_rep(tmp_path):
    f = tmp_path / "gens.txt"
    f.write_text("matrix n=2 semiring=tropical label=a\n1 1/2\n0 1\n"
                 "matrix n=2 semiring=tropical label=b\n2 0\n0 1/3\n")
    out = ok("val", "--rep", str(f), "--prime", "2")
    assert "matrix n=2 semiring=tropical label=a\n0 -1\ninf 0" in out
    assert "supermultiplicative: pass" in out and "superadditive: pass" in out
    code, _, _ = run(["val", "--rep", str(f)])
    assert code == 2


# --- trop --------------------------------------------------------------------


def test_trop_r8_roots():
    out = lines("trop", "--ring-spec", "r8", "--roots", EXAMPLE)
    assert out[0] == "trop: x_{j+k}*z^2 + z*x_k + x_j"
    assert set(out[1].split()[1:]) == {"1", "x_j", "x_k", "x_{i+j}"}
    assert set(out[2].split()[1:]) == {"1", "j", "k", "i+j"}
    assert out[3] == "verdict: all roots crease"


def test_trop_full_gamma():
    out = lines("trop", "--ring-spec", "r8", "--full-gamma", EXAMPLE)
    assert "[x_i + x_j + x_k]" in out[1]


def test_trop_rationals():
    out = lines("trop", "--rationals", "--valuation", "padic:2", "x^3*12*x - 2*x + x*2")
    assert out[0] == "trop: x^3*2*x + 1*x + x*1"
    assert lines("trop", "--rationals", "--valuation", "padic:5", "5") == ["trop: 1", "crease:"]


def test_trop_file(tmp_path):
    f = tmp_path / "f.txt"
    f.write_text(EXAMPLE + "\n")
    assert ok("trop", "--file", str(f), "--ring-spec", "r8") == ok("trop", "--ring-spec", "r8", EXAMPLE)


@pytest.mark.parametrize("argv", [
    ["trop", "--ring-spec", "r8", "(j+k"],
    ["trop", "--ring-spec", "r8", "z ^ ^ 2"],
    ["trop", "--ring-spec", "r8"],
    ["trop", "--rationals", "--valuation", "padic:2", "--roots", "x"],
    ["trop", "--ring-spec", "r8", "--valuation", "padic:2", "z"],
])
def test_trop_usage_errors(argv):
    code, out, err = run(argv)
    assert code == 2 and out == "" and err.startswith("valuon: error:")


def test_trop_parse_error_has_position():
    _, _, err = run(["trop", "--ring-spec", "r8", "z + + j"])
    assert "at position 4" in err


# --- hom, star, ab -----------------------------------------------------------


@pytest.mark.parametrize("argv,expected", [
    (["2=1"], "p-adic p=2 scale=1"),
    ([], "trivial"),
    (["2=1", "3=2"], "invalid: min(c_2,c_3) must be 0"),
    (["3=1/2", "5=0"], "p-adic p=3 scale=1/2"),
])
def test_hom(argv, expected):
    assert lines("hom", *argv) == [expected]


@pytest.mark.parametrize("argv", [["4=1"], ["2"], ["2=x"]])
def test_hom_usage_errors(argv):
    assert run(["hom", *argv])[0] == 2


def write_matrix(tmp_path, text):
    f = tmp_path / "m.txt"
    f.write_text(text)
    return str(f)


def test_star_closes_and_judges(tmp_path):
    f = write_matrix(tmp_path, "matrix n=3 semiring=minmax\n0 1 3\n1 0 2\n3 2 0\n")
    out = lines("star", f)
    assert out[:4] == ["matrix n=3 semiring=minmax", "0 1 2", "1 0 2", "2 2 0"]
    assert out[4] == "input ultrametric: no witness 0 1 2"
    assert out[5] == "closure ultrametric: yes"


def test_star_ultrametric_input_unchanged(tmp_path):
    f = write_matrix(tmp_path, "matrix n=3 semiring=minmax\n0 1 2\n1 0 2\n2 2 0\n")
    out = lines("star", f)
    assert out[1:4] == ["0 1 2", "1 0 2", "2 2 0"] and out[4] == "input ultrametric: yes"


def test_star_zero_weights(tmp_path):
    f = write_matrix(tmp_path, "matrix n=2 semiring=tropical\ninf inf\ninf inf\n")
    assert lines("star", f) == ["matrix n=2 semiring=tropical", "0 inf", "inf 0"]


def test_star_errors(tmp_path):
    f = write_matrix(tmp_path, "matrix n=2 semiring=tropical\ninf -1\n1 inf\n")
    code, _, err = run(["star", f])
    assert code == 1 and "NonConvergenceError" in err
    assert run(["star", str(tmp_path / "missing.txt")])[0] == 2
    f = write_matrix(tmp_path, "matrix n=2 semiring=tropical\n0 1\n")
    assert run(["star", f])[0] == 2


@pytest.mark.parametrize("argv,expected", [
    (["--ring-spec", "r8"], "5 5 isomorphic: yes"),
    (["--product", "z2", "z2"], "5 5 isomorphic: yes"),
    (["--cyclic", "4"], "3 3 isomorphic: yes"),
])
def test_ab(argv, expected):
    assert lines("ab", *argv)[0] == expected


# --- cong --------------------------------------------------------------------


def test_cong_on_gamma_commutators():
    out = lines("cong", "--semiring", "gamma:r8", "--commutators")
    assert out[0] == "classes: 5"


def test_cong_file_and_pairs(tmp_path):
    from valuon.semiring import Monoid, powerset_semiring
    S = powerset_semiring(Monoid.cyclic(2))
    f = tmp_path / "s.txt"
    f.write_text(format_semiring(S))
    out = lines("cong", str(f))
    assert out[0] == "classes: 4"
    out = lines("cong", "--semiring", "powerset:z2", "--pair", "{0}", "{1}")
    assert int(out[0].split()[1]) < 4


def test_cong_errors():
    assert run(["cong"])[0] == 2
    assert run(["cong", "--semiring", "tropical"])[0] == 2
    assert run(["cong", "--semiring", "boolean", "--pair", "7", "0"])[0] == 2


# --- general -----------------------------------------------------------------


def test_usage_errors_exit_2():
    assert run([])[0] == 2
    assert run(["nosuch"])[0] == 2
    assert run(["ring", "--cyclic", "x"])[0] == 2
    assert run(["ring", "--cyclic", "2", "--field", "4"])[0] == 2
    assert run(["ring", "--ring-spec", "q9"])[0] == 2


def test_output_is_deterministic():
    argv = ["val", "--field", "4", "--valuation", "solutions", "--seed", "3", "--cases", "20"]
    assert run(argv) == run(argv)
    assert ok("gamma", "--ring-spec", "r8") == ok("gamma", "--ring-spec", "r8")


def test_seed_from_environment(monkeypatch):
    argv = ["val", "--valuation", "padic:2", "--cases", "20"]
    monkeypatch.setenv("VALUON_SEED", "5")
    a = run(argv)
    assert a == run(argv + ["--seed", "5"])


def test_module_entry_point():
    env = dict(os.environ)
    src = str(Path(__file__).resolve().parents[1] / "src")
    env["PYTHONPATH"] = src + os.pathsep + env.get("PYTHONPATH", "")
    p = subprocess.run([sys.executable, "-m", "valuon", "hom", "2=1"], capture_output=True, text=True, env=env)
    assert p.returncode == 0 and p.stdout == "p-adic p=2 scale=1\n"
    p = subprocess.run([sys.executable, "-m", "valuon", "hom", "4=1"], capture_output=True, text=True, env=env)
    assert p.returncode == 2 and p.stderr


# --- machine mode round trips ------------------------------------------------


def machine(*argv):
    out = ok(*argv, "--format", "machine")
    assert out.splitlines()[0] == f"{SCHEMA} {argv[0]}"
    return out


def test_machine_ring():
    R = read_machine(machine("ring", "--ring-spec", "r8"))
    assert format_ring(R) == format_ring(r8())
    fields = read_machine(machine("ring", "--cyclic", "3", "--validate"))
    assert fields["ring"] == "yes"


def test_machine_gamma():
    table = read_machine(machine("gamma", "--cyclic", "12"))
    text = format_gamma(enumerate_gamma(cyclic(12)))
    from valuon.gamma import parse_gamma
    assert table == parse_gamma(text)
    rows = read_machine(machine("gamma", "--ring-spec", "r8", "--singletons"))
    assert rows["x_{i+j}"]["x_{j+k}"] == "0" and rows["x_{i+j+k}"]["x_{i+j+k}"] == "1"
    assert rows["x_i"]["x_{j+k}"] == "x_j"


def test_machine_trop_r8():
    R = r8()
    fields = read_machine(machine("trop", "--ring-spec", "r8", EXAMPLE), ring=R)
    G = enumerate_gamma(R)
    f = parse_expression(EXAMPLE, R, ["z"])
    t = tropicalize(f, lambda a: nu_universal(R, a), G.semiring)
    assert list(fields["trop"]) == list(t)
    assert {str(g) for g in fields["crease"]} == {"1", "x_j", "x_k", "x_{i+j}"}


def test_machine_trop_rationals():
    fields = read_machine(machine("trop", "--rationals", "--valuation", "padic:2", "x^3*12*x - 2*x + x*2"))
    assert fields["trop"].ctx.name == TROPICAL.name
    assert len(fields["trop"]) == 3
    assert fields["crease"] == [0, 1, 2, 3, INF]


def test_machine_star(tmp_path):
    f = write_matrix(tmp_path, "matrix n=3 semiring=minmax\n0 1 3\n1 0 2\n3 2 0\n")
    S, X, rest = read_machine(machine("star", f))
    assert S is MINMAX and X == ((0, 1, 2), (1, 0, 2), (2, 2, 0))
    assert rest[-1] == "closure ultrametric: yes"


def test_machine_hom_ab_val():
    h = read_machine(machine("hom", "3=1/2"))
    assert h.kind == "p-adic" and h.prime == 3 and h.scale == Fraction(1, 2)
    assert read_machine(machine("hom")).kind == "trivial"
    assert read_machine(machine("hom", "2=1", "3=1")).kind == "invalid"
    assert read_machine(machine("ab", "--ring-spec", "r8")) == {"ab_gamma_size": 5, "gamma_ab_size": 5,
                                                                "isomorphic": True}
    v = read_machine(machine("val", "--ring-spec", "r8", "--valuation", "ideal"))
    assert v["superadditive"] == "pass" and v["multiplicative"].startswith("fail")


def test_machine_cong():
    classes, Q = read_machine(machine("cong", "--semiring", "gamma:r8", "--commutators"))
    assert len(classes) == 5 and len(Q) == 5
    assert format_semiring(Q) == format_semiring(parse_semiring(format_semiring(Q)))


def test_machine_header_is_checked():
    from valuon.errors import ParseError
    with pytest.raises(ParseError):
        read_machine("ring n=1\n")
