#!/usr/bin/env python3
"""Exhaustive structure/coherence sweeps over the built-in models and the
adapter round trip, at configurable level bounds."""

import argparse
import time

from bindlog import models


def timed(label, fn):
    t0 = time.perf_counter()
    rep = fn()
    print(f"{label}: {rep.summary()} [{time.perf_counter() - t0:.2f}s]")
    return rep.ok


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--bound", type=int, default=3, help="n,p,q level bound for the finite model")
    ap.add_argument("--fullfn-bound", type=int, default=2)
    ap.add_argument("--rule-instances", type=int, default=84)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    b = args.bound

    ok = True
    ext = models.ext_counter_model()
    ok &= timed(f"ext structure laws (<= {b})",
                lambda: models.check_ifs(ext.ifs, b, b, b))
    for f in ext.sig.functions:
        ok &= timed(f"ext coherence of {f}",
                    lambda f=f: models.check_coherence(ext, f, b, b))
    ok &= timed("ext binder retraction",
                lambda: models.check_unary_retraction(ext, "Λ", b))

    fb = args.fullfn_bound
    ok &= timed(f"full function spaces over {{0,1}} (<= {fb})",
                lambda: models.check_ifs(models.full_function_ifs((0, 1)), fb, fb, fb))

    nm = models.sigma_model_from_binding(ext)
    ok &= timed("substitution rules in the ext model",
                lambda: models.validate_sigma_rules(
                    nm, instances_per_rule=args.rule_instances, seed=args.seed))
    ok &= timed("denotation transport",
                lambda: models.denotation_transport_check(ext, nm, samples=1000,
                                                          seed=args.seed))
    roundtrip = models.binding_model_from_sigma(nm, "roundtrip")
    ok &= timed("round-trip structure laws",
                lambda: models.check_ifs(roundtrip.ifs, 2, 2, 2))

    delta = models.delta_model()
    ok &= timed("delta structure laws (sampled)",
                lambda: models.check_ifs(delta.ifs, 2, 2, 2, mode="sampled",
                                         samples=5, seed=args.seed))
    ok &= timed("delta coherence of δ (sampled)",
                lambda: models.check_coherence(delta, "δ", 1, 1, mode="sampled",
                                               samples=4, seed=args.seed))
    return 0 if ok else 1


if __name__ == "__main__":
    raise SystemExit(main())
