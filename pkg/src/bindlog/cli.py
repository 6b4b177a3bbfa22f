"""Command-line frontend: parsing, proof checking, normalization, the
translation pipeline, model evaluation, structure sweeps, and the two
independence demonstrations.

Exit codes: 0 success, 1 semantic failure (invalid proof, invalid
property), 2 malformed input.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from pathlib import Path

from . import models, precook, proofs, sigma, syntax
from .errors import BindLogError, ParseError


@dataclass
class RunConfig:
    sig_path: str | None = None
    step_budget: int = sigma.DEFAULT_BUDGET
    probe_budget: int = 289
    samples: int = 1000
    seed: int = 0
    as_json: bool = False


def _load_signature(cfg: RunConfig) -> syntax.Signature:
    if cfg.sig_path is None:
        return syntax.Signature({}, {})
    return syntax.parse_signature(Path(cfg.sig_path).read_text())


def _emit(cfg: RunConfig, lines: list[str], payload: dict):
    if cfg.as_json:
        print(json.dumps(payload, sort_keys=True, ensure_ascii=False))
    else:
        for line in lines:
            print(line)


# ---------------------------------------------------------------------------
# Commands


def cmd_parse(args, cfg: RunConfig) -> int:
    sig = _load_signature(cfg)
    if args.term is not None:
        t = syntax.parse_term(args.term, sig)
        check = syntax.well_formed(sig, t)
        text = syntax.print_term(t)
    else:
        p = syntax.parse_prop(args.prop, sig)
        check = syntax.well_formed(sig, p)
        text = syntax.print_prop(p)
    lines = [text] if check.ok else [text, f"ill-formed: {check}"]
    _emit(cfg, lines, {"parsed": text, "well_formed": check.ok,
                       "error": None if check.ok else str(check)})
    return 0 if check.ok else 1


def _congruence_from_arg(modulo: str | None, sig, cfg: RunConfig):
    if modulo is None:
        return None
    if modulo == "sigma":
        return proofs.Congruence(sigma.sigma_system(sig), budget=cfg.step_budget)
    rs = sigma.load_rules(Path(modulo).read_text(), sig=sig, name=Path(modulo).stem)
    return proofs.Congruence(rs, budget=cfg.step_budget)


def cmd_check_proof(args, cfg: RunConfig) -> int:
    sig = _load_signature(cfg)
    proof = proofs.parse_proof_file(Path(args.proof).read_text(), sig)
    cong = _congruence_from_arg(args.modulo, sig, cfg)
    if cong is None:
        result = proofs.check_binding_proof(sig, proof)
        kind = "binding"
    else:
        result = proofs.check_modulo_proof(sig, cong, proof)
        kind = f"modulo {args.modulo}"
    lines = [f"proof check ({kind}): {result}"]
    _emit(cfg, lines, {"check": kind, "ok": result.ok,
                       "error": None if result.ok else str(result)})
    return 0 if result.ok else 1


def cmd_normalize(args, cfg: RunConfig) -> int:
    sig = _load_signature(cfg)
    if args.system == "sigma":
        rs = sigma.sigma_system(sig)
    else:
        rs = sigma.load_rules(Path(args.system).read_text(), sig=sig,
                              name=Path(args.system).stem)
    if rs.layer == "lterm":
        t = sigma.parse_lterm(args.input)
        nf, steps = sigma.normalize_steps(rs, t, budget=cfg.step_budget)
        out = sigma.print_lterm(nf)
    else:
        t = syntax.parse_term(args.input, sig)
        nf, steps = sigma.normalize_steps(rs, t, budget=cfg.step_budget)
        out = syntax.print_term(nf)
    _emit(cfg, [out], {"normal_form": out, "steps": steps})
    return 0


def cmd_precook(args, cfg: RunConfig) -> int:
    sig = _load_signature(cfg)
    p = syntax.parse_prop(args.prop, sig)
    check = syntax.well_formed(sig, p)
    if not check.ok:
        print(f"ill-formed proposition: {check}", file=sys.stderr)
        return 2
    out = sigma.print_lprop(precook.precook_prop(sig, p))
    _emit(cfg, [out], {"translated": out})
    return 0


def cmd_translate_proof(args, cfg: RunConfig) -> int:
    sig = _load_signature(cfg)
    proof = proofs.parse_proof_file(Path(args.proof).read_text(), sig)
    result = proofs.check_binding_proof(sig, proof)
    if not result.ok:
        print(f"source proof invalid: {result}", file=sys.stderr)
        return 1
    translated = precook.translate_proof(sig, proof)
    text = proofs.print_proof_file(translated, layer="lprop")
    if args.output:
        Path(args.output).write_text(text)
        _emit(cfg, [f"wrote {args.output}"], {"output": args.output})
    else:
        print(text, end="")
    return 0


def _model_from_name(name: str, cfg: RunConfig, sig=None):
    if name == "ext":
        return models.ext_counter_model()
    if name == "delta":
        return models.delta_model(cfg.probe_budget)
    if name.startswith("fullfn:"):
        size = int(name.split(":", 1)[1])
        return models.full_function_ifs(range(size))
    path = Path(name)
    if path.exists():
        if sig is None:
            raise ParseError("a table model needs --sig")
        return models.load_model(path.read_text(), sig, name=path.stem)
    raise ParseError(f"unknown model {name!r}")


def cmd_eval(args, cfg: RunConfig) -> int:
    sig = _load_signature(cfg) if cfg.sig_path else None
    m = _model_from_name(args.model, cfg, sig)
    if isinstance(m, models.IFS):
        print("a bare function-space structure has no symbol denotations; "
              "use verify-model, or eval with ext/delta/a table model", file=sys.stderr)
        return 2
    p = syntax.parse_prop(args.prop, m.sig)
    check = syntax.well_formed(m.sig, p)
    if not check.ok:
        print(f"ill-formed proposition: {check}", file=sys.stderr)
        return 2
    value, exact = models.eval_prop_report(m, p)
    status = "valid" if value == 1 else "not valid"
    if not exact:
        status += " (on samples)"
    witness = None
    if value == 0:
        w = models.quantifier_witness(m, p)
        if w:
            witness = {x: models.fmt_element(v) for x, v in w.items()}
            status += " (witness: " + ", ".join(f"{x} = {v}" for x, v in witness.items()) + ")"
    lines = [f"{syntax.print_prop(p)}: {status}"]
    _emit(cfg, lines, {"prop": syntax.print_prop(p), "value": value, "exact": exact,
                       "witness": witness})
    return 0 if value == 1 else 1


def cmd_verify_model(args, cfg: RunConfig) -> int:
    n, p, q = (int(s) for s in args.bounds.split(","))
    sig = _load_signature(cfg) if cfg.sig_path else None
    m = _model_from_name(args.model, cfg, sig)
    ifs = m if isinstance(m, models.IFS) else m.ifs
    mode = args.mode
    rep = models.check_ifs(ifs, n, p, q, mode=mode, samples=cfg.samples // 10 or 10,
                           seed=cfg.seed)
    lines = [f"structure laws: {rep.summary()}"]
    payload = {"structure": {"checked": rep.checked, "violations": rep.violations}}
    ok = rep.ok
    if isinstance(m, models.BindingModel):
        for f in m.sig.functions:
            crep = models.check_coherence(m, f, p, q, mode=mode,
                                          samples=cfg.samples // 20 or 5, seed=cfg.seed)
            lines.append(f"coherence of {f}: {crep.summary()}")
            payload[f"coherence {f}"] = {"checked": crep.checked,
                                         "violations": crep.violations}
            ok = ok and crep.ok
    _emit(cfg, lines, payload)
    return 0 if ok else 1


EXT_AXIOMS = (
    "forall x. =(x, x)",
    "forall x. forall y. =(x, y) => =(y, x)",
    "forall x. forall y. forall z. =(x, y) => (=(y, z) => =(x, z))",
    "forall x. forall y. =(x, y) => =(f(x), f(y))",
    "forall x. forall y. =(x, y) => =(Λ(z. x), Λ(z. y))",
)


def cmd_demo(args, cfg: RunConfig) -> int:
    if args.which == "extensionality":
        return _demo_extensionality(cfg)
    return _demo_disjoint_sum(cfg)


def _demo_extensionality(cfg: RunConfig) -> int:
    m = models.ext_counter_model()
    lines = []
    payload: dict = {"demo": "extensionality"}
    all_axioms_valid = True
    for text in EXT_AXIOMS:
        a = syntax.parse_prop(text, m.sig)
        v = models.eval_prop(m, a)
        all_axioms_valid = all_axioms_valid and v == 1
        lines.append(f"axiom {'valid' if v == 1 else 'NOT valid'}: {text}")
    lam_fx = syntax.parse_term("Λ(x. f(x))", m.sig)
    lam_x = syntax.parse_term("Λ(x. x)", m.sig)
    v_fx = models.eval_term(m, lam_fx)
    v_x = models.eval_term(m, lam_x)
    lines.append(f"⟦Λx f(x)⟧ = {models.fmt_element(v_fx)}")
    lines.append(f"⟦Λx x⟧ = {models.fmt_element(v_x)}")
    scheme = syntax.parse_prop("(forall x. =(f(x), x)) => =(Λ(x. f(x)), Λ(x. x))", m.sig)
    v_scheme = models.eval_prop(m, scheme)
    lines.append(
        f"scheme instance {'valid' if v_scheme == 1 else 'NOT valid'}: "
        f"{syntax.print_prop(scheme)}")
    payload.update({
        "axioms_valid": all_axioms_valid,
        "lam_fx": models.fmt_element(v_fx),
        "lam_x": models.fmt_element(v_x),
        "scheme_valid": v_scheme == 1,
    })
    _emit(cfg, lines, payload)
    demonstrated = all_axioms_valid and v_scheme == 0 and v_fx != v_x
    return 0 if demonstrated else 1


def _demo_disjoint_sum(cfg: RunConfig) -> int:
    m = models.delta_model(cfg.probe_budget)
    case_split = syntax.parse_term("δ(a(), x. a(), y. a())", m.sig)
    const = syntax.parse_term("a()", m.sig)
    v_case = models.eval_term(m, case_split)
    v_const = models.eval_term(m, const)
    equation = syntax.parse_prop("=(δ(a(), x. a(), y. a()), a())", m.sig)
    v_eq, exact = models.eval_prop_report(m, equation)
    lines = [
        f"⟦δ(a, x a, y a)⟧ = {models.fmt_element(v_case)}",
        f"⟦a⟧ = {models.fmt_element(v_const)}",
        f"equation {'valid' if v_eq == 1 else 'not valid'}: {syntax.print_prop(equation)}",
    ]
    payload = {
        "demo": "disjoint-sum",
        "case_split": v_case,
        "constant": v_const,
        "equation_valid": v_eq == 1,
        "exact": exact,
    }
    _emit(cfg, lines, payload)
    demonstrated = v_case == 0 and v_const == 1 and v_eq == 0 and exact
    return 0 if demonstrated else 1


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="bindlog",
        description="logic kernel for binder-aware predicate logic")
    ap.add_argument("--sig", help="signature file (.sig)")
    ap.add_argument("--step-budget", type=int, default=sigma.DEFAULT_BUDGET)
    ap.add_argument("--probe-budget", type=int, default=289)
    ap.add_argument("--samples", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--json", action="store_true", help="machine-readable summary")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse", help="parse and well-form a term or proposition")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--term")
    g.add_argument("--prop")
    p.set_defaults(fn=cmd_parse)

    p = sub.add_parser("check-proof", help="check a proof file")
    p.add_argument("proof")
    p.add_argument("--modulo", help="'sigma' or a rewrite-rule file (.rw)")
    p.set_defaults(fn=cmd_check_proof)

    p = sub.add_parser("normalize", help="normalize a term under a rewrite system")
    p.add_argument("--system", required=True, help="'sigma' or a rule file (.rw)")
    p.add_argument("input")
    p.set_defaults(fn=cmd_normalize)

    p = sub.add_parser("precook", help="translate a proposition to the sorted layer")
    p.add_argument("--prop", required=True)
    p.set_defaults(fn=cmd_precook)

    p = sub.add_parser("translate-proof", help="translate a proof to the calculus modulo")
    p.add_argument("proof")
    p.add_argument("-o", "--output")
    p.set_defaults(fn=cmd_translate_proof)

    p = sub.add_parser("eval", help="evaluate a proposition in a model")
    p.add_argument("--model", required=True, help="ext | delta | fullfn:<size> | table file")
    p.add_argument("--prop", required=True)
    p.set_defaults(fn=cmd_eval)

    p = sub.add_parser("verify-model", help="run the structure and coherence sweeps")
    p.add_argument("--model", required=True)
    p.add_argument("--bounds", default="2,2,2", help="n,p,q level bounds")
    p.add_argument("--mode", choices=("exhaustive", "sampled"), default="exhaustive")
    p.set_defaults(fn=cmd_verify_model)

    p = sub.add_parser("demo", help="reproduce an independence demonstration")
    p.add_argument("which", choices=("extensionality", "disjoint-sum"))
    p.set_defaults(fn=cmd_demo)

    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.step_budget <= 0 or args.probe_budget <= 0 or args.samples <= 0:
        print("input error: budgets and sample counts must be positive", file=sys.stderr)
        return 2
    seed = int(os.environ.get("BINDLOG_SEED", args.seed))
    cfg = RunConfig(
        sig_path=args.sig,
        step_budget=args.step_budget,
        probe_budget=args.probe_budget,
        samples=args.samples,
        seed=seed,
        as_json=args.json,
    )
    try:
        return args.fn(args, cfg)
    except (ParseError, FileNotFoundError) as e:
        print(f"input error: {e}", file=sys.stderr)
        return 2
    except BindLogError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
