import pytest

from cantortx.cli import BUDGET, INPUT, NEGATIVE, OK, main

DOC = """\
alphabet 2
transducer ODO
  state c i
  trans c 0 i 1
  trans c 1 c 0
  trans i 0 i 0
  trans i 1 i 1
end
transducer DBL2
  state d
  trans d 0 d 00
  trans d 1 d 1
end
vmap SWAP
  pair 0 1
  pair 1 0
end
vmap PRES
  pair 00 11
  pair 01 01
  pair 10 10
  pair 11 00
end
comp H over XB
  leaf ε ε p0
end
comp BAD over XB
  leaf 0 0 p1
  leaf 1 1 id
end
"""


@pytest.fixture
def doc(tmp_path):
    path = tmp_path / "doc.tx"
    path.write_text(DOC, encoding="utf-8")
    return str(path)


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_sync_level(capsys):
    assert run(capsys, "sync-level", "builtin", "PARITY") == (OK, "level: 1\n", "")
    code, out, _ = run(capsys, "sync-level", "builtin", "XB")
    assert out == "level: 2\n"


def test_classify(capsys, doc):
    assert run(capsys, "classify", "builtin", "PARITY")[:2] == (OK, "one_way\n")
    assert run(capsys, "classify", "builtin", "XB")[:2] == (OK, "bi_synchronizing\n")
    assert run(capsys, "classify", doc, "ODO")[:2] == (NEGATIVE, "not_synchronizing\n")


def test_invert_prints_a_parseable_machine(capsys):
    code, out, _ = run(capsys, "invert", "builtin", "PARITY")
    assert code == OK
    assert out.startswith("transducer PARITY_inv\n")
    assert "a⁻¹" in out


def saved(capsys, tmp_path, *argv):
    """Run a command that prints a machine and store it as a document."""
    code, out, _ = run(capsys, *argv)
    assert code == OK
    path = tmp_path / "out.tx"
    path.write_text("alphabet 2\n" + out, encoding="utf-8")
    return str(path)


def test_relation(capsys, tmp_path):
    # the parity relation lives on the inverse automaton
    path = saved(capsys, tmp_path, "invert", "builtin", "PARITY")
    code, out, _ = run(capsys, "relation", path, "PARITY_inv", "0", "1", "11", "0101")
    assert code == OK
    classes = [line.split()[1] for line in out.splitlines()]
    assert classes[0] == classes[2] == classes[3] != classes[1]
    # the forward automaton synchronizes at once, so its relation is trivial
    code, out, _ = run(capsys, "relation", "builtin", "PARITY", "0", "1")
    assert len({line.split()[1] for line in out.splitlines()}) == 1


def test_member(capsys, tmp_path):
    path = saved(capsys, tmp_path, "invert", "builtin", "PARITY")
    with open(path, "a", encoding="utf-8") as fh:
        fh.write(DOC.split("end\n", 2)[2].split("comp")[0])
    code, out, _ = run(capsys, "member", path, "PARITY_inv", "PRES")
    assert (code, out.splitlines()[0]) == (OK, "member: yes")
    code, out, _ = run(capsys, "member", path, "PARITY_inv", "SWAP")
    assert (code, out.splitlines()[0]) == (NEGATIVE, "member: no")


def test_conj(capsys, doc):
    code, out, _ = run(capsys, "conj", doc, "PARITY", "SWAP")
    assert code == OK
    assert "pair 00 11" in out
    code, out, _ = run(capsys, "conj", doc, "PARITY", "SWAP", "--inverse")
    assert code == OK
    assert "comp SWAP_conj over PARITY_TS" in out


def test_conj_refuses_non_synchronizing(capsys, doc):
    code, _, err = run(capsys, "conj", doc, "ODO", "SWAP")
    assert code == NEGATIVE
    assert "NotSynchronizing" in err


def test_group_ts(capsys):
    code, out, _ = run(capsys, "group-ts", "builtin", "PARITY")
    assert code == OK
    assert "order: 2" in out


def test_viable(capsys, doc):
    assert run(capsys, "viable", doc, "H")[0] == OK
    code, out, _ = run(capsys, "viable", doc, "BAD")
    assert code == NEGATIVE
    assert "valid: no" in out


def test_validate(capsys, doc):
    code, out, _ = run(capsys, "validate", "builtin", "XB")
    assert code == OK
    assert "state p1 clopen-image: yes injective: yes" in out


def test_budget_exit_code(capsys, doc, monkeypatch):
    monkeypatch.setenv("TX_BUDGET", "5000,16")
    code, _, err = run(capsys, "invert", doc, "DBL2")
    assert code == BUDGET
    assert "budget exceeded" in err


def test_contracting(capsys, tmp_path):
    path = saved(capsys, tmp_path, "ts", "builtin", "PARITY")
    code, out, _ = run(capsys, "contracting", path, "PARITY_TS", "--len", "3", "--depth", "4")
    assert code == OK
    assert "verdict: contracting_to_depth" in out


def test_eval(capsys):
    assert run(capsys, "eval", "builtin", "XB", "-", "10(0)")[:2] == (OK, "01(0)\n")
    assert run(capsys, "eval", "builtin", "PARITY", "b", "(0)")[:2] == (OK, "1(0)\n")


def test_dot(capsys):
    code, out, _ = run(capsys, "dot", "builtin", "PARITY")
    assert code == OK
    assert out.startswith('digraph "PARITY"')


def test_input_errors(capsys, tmp_path):
    assert run(capsys, "sync-level", str(tmp_path / "missing.tx"), "X")[0] == INPUT
    bad = tmp_path / "bad.tx"
    bad.write_text("alphabet 2\ntransducer T\n state a\n", encoding="utf-8")
    code, _, err = run(capsys, "minimize", str(bad), "T")
    assert code == INPUT
    assert "line" in err and "column" in err
    assert run(capsys, "minimize", "builtin", "NOPE")[0] == INPUT
    assert run(capsys, "no-such-command")[0] == INPUT


def test_stdin(capsys, monkeypatch):
    import io

    monkeypatch.setattr("sys.stdin", io.StringIO(DOC))
    assert run(capsys, "sync-level", "-", "ODO")[:2] == (NEGATIVE, "level: none\n")
