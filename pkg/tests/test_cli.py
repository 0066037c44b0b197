from importlib.resources import as_file, files

import pytest

from nonnormal.cli import main

CORPUS = files("nonnormal") / "corpus"


@pytest.fixture
def corpus():
    with as_file(CORPUS) as path:
        yield path


@pytest.fixture
def write(tmp_path):
    def _write(name, text):
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return str(path)
    return _write


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_translate_axiom_t(capsys, corpus):
    code, out, _ = run(capsys, "translate", corpus / "axiomT.st")
    assert code == 0
    assert out.strip() == "(seq (fml (dia-nu (box-ni (var p)))) (fml (var p)))"


def test_verify_correspondence(capsys):
    code, out, _ = run(capsys, "verify-correspondence", "--axiom", "T", "--max-size", "2")
    assert code == 0 and out.strip() == "36 frames, 0 mismatches"


def test_verify_correspondence_lines(capsys):
    code, out, _ = run(capsys, "--output", "lines", "verify-correspondence", "--axiom", "ID",
                       "--max-size", "1")
    rows = [line.split("\t") for line in out.splitlines()]
    assert code == 0 and len(rows) == 4
    assert all(r[0].startswith("ID/1:") and r[1] == r[2] for r in rows)


def test_verify_cs_theorem_row_reports_mismatches(capsys):
    code, out, _ = run(capsys, "verify-correspondence", "--axiom", "CS", "--max-size", "2")
    assert code == 1 and "mismatch" in out
    code, out, _ = run(capsys, "verify-correspondence", "--axiom", "CS", "--max-size", "2",
                       "--cs-variant", "guarded")
    assert code == 0


def test_check_proof(capsys, corpus):
    code, out, _ = run(capsys, "check-proof", corpus / "T.proof", "--calc", "dmt-nabla", "--ext", "T")
    assert code == 0 and out.startswith("ok")
    code, out, _ = run(capsys, "check-proof", corpus / "T.proof")
    assert code == 1 and "error at node" in out


def test_check_proof_on_ill_formed_proof(capsys, write):
    bogus = write("bogus.proof", "(rule Id_S (seq (fml (var p)) (fml (var q))))")
    code, out, _ = run(capsys, "check-proof", bogus)
    assert code == 1 and "node 0" in out


def test_parse_error_exit_code(capsys, write):
    bad = write("bad.f", "(and (var p)")
    code, _, err = run(capsys, "parse", bad)
    assert code == 2 and "bytes" in err


def test_missing_file_is_a_usage_error(capsys, tmp_path):
    code, _, err = run(capsys, "parse", tmp_path / "nothing-here")
    assert code == 2 and err


def test_bad_flag_is_a_usage_error(capsys):
    code, _, err = run(capsys, "verify-correspondence", "--max-size", "x")
    assert code == 2 and "invalid int value" in err


def test_eval_valid_star_unstar_supported(capsys, write):
    f1 = write("f1", "(nframe (worlds 0) (nu 0 ((0))))")
    refuter = write("f2", "(nframe (worlds 0) (nu 0 (() (0))))")
    t = write("t.st", "(imp (nabla (var p)) (var p))")
    assert run(capsys, "valid", f1, t)[0] == 0
    code, out, _ = run(capsys, "valid", refuter, t)
    assert code == 1 and "p=()" in out
    code, out, _ = run(capsys, "eval", f1, t, "--val", "p=0")
    assert code == 0 and out.strip() == "(0)"
    code, out, _ = run(capsys, "star", f1)
    assert code == 0 and out.startswith("(twosorted (kind n)")
    starred = write("s1", out)
    code, out, _ = run(capsys, "unstar", starred)
    assert code == 0 and " ".join(out.split()) == "(nframe (worlds 0) (nu 0 ((0))))"
    assert run(capsys, "supported", starred)[0] == 0
    empty = write("e", "(twosorted (kind n) (xs 0) (ys 0))")
    assert run(capsys, "supported", empty)[0] == 1
    code, _, err = run(capsys, "unstar", empty)
    assert code == 1 and "refused" in err


def test_eval_missing_variable(capsys, write):
    f1 = write("f1", "(nframe (worlds 0) (nu 0 ((0))))")
    t = write("t.st", "(nabla (var p))")
    assert run(capsys, "eval", f1, t)[0] == 2


def test_classify(capsys, corpus, write):
    code, out, _ = run(capsys, "classify", corpus / "axiomT.st")
    assert code == 0 and out.startswith("analytic inductive")
    four = write("four", "(leq (dia-nu (box-ni (dia-nu (box-ni (var p))))) "
                         "(box-nuc (dia-notni (var p))))")
    code, out, _ = run(capsys, "--output", "lines", "classify", four)
    assert code == 1 and out.splitlines()[0] == "analytic\tfalse"


def test_search_proof(capsys, write):
    goal = write("g", "(seq (hnu (fml (box-ni (var p)))) (fml (var p)))")
    code, out, _ = run(capsys, "search-proof", goal, "--ext", "T", "--depth", "4")
    assert code == 0 and out.startswith("(rule T")
    code, out, _ = run(capsys, "search-proof", goal, "--depth", "3")
    assert code == 1 and "no proof" in out


def test_rule_soundness(capsys):
    code, out, _ = run(capsys, "rule-soundness", "--rule", "T")
    assert code == 0 and "0 violations" in out
    code, out, _ = run(capsys, "rule-soundness", "--rule", "Id_S", "--nx", "1", "--ny", "2")
    assert code == 0
    code, _, _ = run(capsys, "rule-soundness", "--rule", "NoSuchRule")
    assert code == 2


def test_output_is_deterministic(capsys, corpus):
    first = run(capsys, "--output", "lines", "verify-correspondence", "--axiom", "P", "--max-size", "2")
    second = run(capsys, "--output", "lines", "verify-correspondence", "--axiom", "P", "--max-size", "2")
    assert first == second
