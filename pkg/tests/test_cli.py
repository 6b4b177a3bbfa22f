"""The command-line frontend: every subcommand, exit codes, and output
determinism."""

import json

import pytest

from bindlog import cli, proofs, sigma, syntax

from proof_corpus import CORPUS_SIG, corpus, equality_compat_derivation

ARITH_SIG_TEXT = """\
fun 0 : <>
fun S : <0>
fun + : <0,0>
fun * : <0,0>
pred = : <0,0>
"""

ARITH_RULES_TEXT = """\
plus0: +(0(), ?y) -> ?y
plusS: +(S(?x), ?y) -> S(+(?x, ?y))
mul0:  *(0(), ?y) -> 0()
mulS:  *(S(?x), ?y) -> +(*(?x, ?y), ?y)
"""

FOUR_IS_EVEN = """\
rule ex-right [x=x A==(*(S(S(0())), x), S(S(S(S(0()))))) t=S(S(0())) at=0] |- forall x. =(x, x) |- exists x. =(*(S(S(0())), x), S(S(S(S(0())))))
  rule all-left [x=x A==(x, x) t=S(S(S(S(0())))) at=0] |- forall x. =(x, x) |- =(*(S(S(0())), S(S(0()))), S(S(S(S(0())))))
    rule axiom |- =(S(S(S(S(0())))), S(S(S(S(0()))))) |- =(*(S(S(0())), S(S(0()))), S(S(S(S(0())))))
"""


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture
def corpus_sig_file(tmp_path):
    p = tmp_path / "corpus.sig"
    p.write_text(syntax.print_signature(CORPUS_SIG))
    return str(p)


def test_parse_term(capsys, corpus_sig_file):
    code, out, _ = run(capsys, "--sig", corpus_sig_file, "parse", "--term", "Λ(x. f(x))")
    assert code == 0 and out.strip() == "Λ(x. f(x))"


def test_parse_rejects_unknown_symbol(capsys, corpus_sig_file):
    code, out, _ = run(capsys, "--sig", corpus_sig_file, "parse", "--term", "h(x)")
    assert code == 1 and "UnknownSymbol" in out


def test_parse_malformed_input(capsys, corpus_sig_file):
    code, _, err = run(capsys, "--sig", corpus_sig_file, "parse", "--term", "f(x")
    assert code == 2 and "input error" in err


def test_check_proof_corpus(capsys, tmp_path, corpus_sig_file):
    for name, proof in corpus():
        path = tmp_path / f"{name}.prf"
        path.write_text(proofs.print_proof_file(proof))
        code, out, _ = run(capsys, "--sig", corpus_sig_file, "check-proof", str(path))
        assert code == 0, (name, out)


def test_check_proof_invalid_exits_1(capsys, tmp_path, corpus_sig_file):
    path = tmp_path / "bad.prf"
    path.write_text("rule axiom |- Q |- P(x)\n")
    code, out, _ = run(capsys, "--sig", corpus_sig_file, "check-proof", str(path))
    assert code == 1 and "RuleMismatch" in out


def test_check_proof_malformed_exits_2(capsys, tmp_path, corpus_sig_file):
    path = tmp_path / "bad.prf"
    path.write_text("rule nonsense |- Q |- Q\n")
    code, _, err = run(capsys, "--sig", corpus_sig_file, "check-proof", str(path))
    assert code == 2


def test_check_proof_modulo_arithmetic(capsys, tmp_path):
    sig = tmp_path / "arith.sig"
    sig.write_text(ARITH_SIG_TEXT)
    rules = tmp_path / "arith.rw"
    rules.write_text(ARITH_RULES_TEXT)
    prf = tmp_path / "even.prf"
    prf.write_text(FOUR_IS_EVEN)
    code, out, _ = run(capsys, "--sig", str(sig), "check-proof",
                       "--modulo", str(rules), str(prf))
    assert code == 0, out
    # without the congruence the axiom leaf cannot close
    code, out, _ = run(capsys, "--sig", str(sig), "check-proof", str(prf))
    assert code == 1


def test_normalize_sigma(capsys, corpus_sig_file):
    code, out, _ = run(capsys, "--sig", corpus_sig_file, "normalize",
                       "--system", "sigma", "1_1[t . id_0]")
    assert code == 0 and out.strip() == "t"


def test_normalize_user_rules(capsys, tmp_path):
    sig = tmp_path / "arith.sig"
    sig.write_text(ARITH_SIG_TEXT)
    rules = tmp_path / "arith.rw"
    rules.write_text(ARITH_RULES_TEXT)
    code, out, _ = run(capsys, "--sig", str(sig), "normalize",
                       "--system", str(rules), "*(S(S(0())), S(S(0())))")
    assert code == 0 and out.strip() == "S(S(S(S(0()))))"


def test_precook_worked_example(capsys, tmp_path):
    sig = tmp_path / "lam.sig"
    sig.write_text("fun f : <0,0>\nfun Λ : <1>\npred = : <0,0>\n")
    code, out, _ = run(capsys, "--sig", str(sig), "precook",
                       "--prop", "forall x. forall y. =(f(x, y), Λ(z. f(x, z)))")
    assert code == 0
    assert out.strip() == "forall x. forall y. =(f_0(x, y), Λ_0(f_1(x[up_0], 1_1)))"


def test_translate_proof_pipeline(capsys, tmp_path, corpus_sig_file):
    src = tmp_path / "eq.prf"
    src.write_text(proofs.print_proof_file(equality_compat_derivation()))
    dst = tmp_path / "eq_modulo.prf"
    code, _, _ = run(capsys, "--sig", corpus_sig_file, "translate-proof",
                     str(src), "-o", str(dst))
    assert code == 0
    back = proofs.parse_proof_file(dst.read_text(), CORPUS_SIG)
    cong = proofs.Congruence(sigma.sigma_system(CORPUS_SIG))
    assert proofs.check_modulo_proof(CORPUS_SIG, cong, back).ok


def test_eval_model(capsys):
    code, out, _ = run(capsys, "eval", "--model", "ext",
                       "--prop", "forall x. =(f(x), x)")
    assert code == 0 and "valid" in out
    code, out, _ = run(capsys, "eval", "--model", "ext",
                       "--prop", "=(Λ(x. f(x)), Λ(x. x))")
    assert code == 1 and "not valid" in out


def test_eval_sampled_verdict_labeled(capsys):
    code, out, _ = run(capsys, "eval", "--model", "delta",
                       "--prop", "forall x. =(x, x)")
    assert code == 0 and "(on samples)" in out


def test_verify_model(capsys):
    code, out, _ = run(capsys, "verify-model", "--model", "ext", "--bounds", "2,2,2")
    assert code == 0
    assert "structure laws" in out and "coherence of Λ" in out


def test_verify_fullfn(capsys):
    code, out, _ = run(capsys, "verify-model", "--model", "fullfn:2", "--bounds", "1,1,1")
    assert code == 0


def test_demo_extensionality(capsys):
    code, out, _ = run(capsys, "demo", "extensionality")
    assert code == 0
    assert "⟦Λx f(x)⟧ = l0" in out
    assert "⟦Λx x⟧ = k0" in out
    assert "scheme instance NOT valid" in out
    assert out.count("axiom valid") == 5


def test_demo_disjoint_sum(capsys):
    code, out, _ = run(capsys, "demo", "disjoint-sum")
    assert code == 0
    assert "⟦δ(a, x a, y a)⟧ = 0" in out
    assert "⟦a⟧ = 1" in out
    assert "equation not valid" in out


def test_demo_json(capsys):
    code, out, _ = run(capsys, "--json", "demo", "extensionality")
    assert code == 0
    payload = json.loads(out)
    assert payload["lam_fx"] == "l0" and payload["lam_x"] == "k0"
    assert payload["axioms_valid"] is True and payload["scheme_valid"] is False


def test_output_deterministic(capsys):
    outs = []
    for _ in range(2):
        code, out, _ = run(capsys, "--seed", "7", "--samples", "40", "--json",
                           "verify-model", "--model", "delta", "--bounds", "1,1,1",
                           "--mode", "sampled")
        assert code == 0
        outs.append(out)
    assert outs[0] == outs[1]


def test_seed_env_override(capsys, monkeypatch):
    monkeypatch.setenv("BINDLOG_SEED", "99")
    code, out1, _ = run(capsys, "--samples", "40", "--json", "verify-model",
                        "--model", "delta", "--bounds", "1,1,1", "--mode", "sampled")
    monkeypatch.setenv("BINDLOG_SEED", "99")
    code, out2, _ = run(capsys, "--seed", "3", "--samples", "40", "--json",
                        "verify-model", "--model", "delta", "--bounds", "1,1,1",
                        "--mode", "sampled")
    assert out1 == out2  # env wins over the flag


def test_demo_values_are_recomputed(capsys, monkeypatch):
    # break the binder family: the demo must notice, not print stored claims
    from bindlog import models

    good = models.ext_counter_model

    def broken():
        m = good()
        fhat = dict(m.fhat)
        fhat["Λ"] = lambda p, args: ("k", p)
        return models.BindingModel(m.name, m.sig, m.ifs, fhat, m.phat)

    monkeypatch.setattr(models, "ext_counter_model", broken)
    code, out, _ = run(capsys, "demo", "extensionality")
    assert code == 1


def test_eval_bare_structure_is_an_input_error(capsys):
    code, _, err = run(capsys, "eval", "--model", "fullfn:2", "--prop", "false")
    assert code == 2


def test_table_model_via_cli(capsys, tmp_path):
    from bindlog import models

    mdl = tmp_path / "ext.mdl"
    mdl.write_text(models.dump_model(models.ext_counter_model(), 2))
    sig = tmp_path / "ext.sig"
    sig.write_text(syntax.print_signature(models.ext_counter_model().sig))
    code, out, _ = run(capsys, "--sig", str(sig), "eval", "--model", str(mdl),
                       "--prop", "forall x. =(x, x)")
    assert code == 0 and "valid" in out
