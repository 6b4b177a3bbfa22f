#!/usr/bin/env python3
"""Run the rewrite-engine probes at configurable scale.

Samples sort-correct terms, normalizes them under both strategies with
per-step sort checking, and stress-tests local confluence by rewriting
every redex of multi-redex samples one step and joining the results.
"""

import argparse

from bindlog import sigma
from bindlog.syntax import Signature

DEFAULT_SIG = Signature(
    {"f": (0,), "g": (0, 0), "Λ": (1,), "δ": (0, 1, 1), "c": ()},
    {"=": (0, 0)},
)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--samples", type=int, default=10_000)
    ap.add_argument("--size", type=int, default=40)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--sig", help="signature file; defaults to a mixed-arity one")
    ap.add_argument("--json", action="store_true", help="machine-readable summary")
    args = ap.parse_args()

    if args.sig:
        from pathlib import Path

        from bindlog.syntax import parse_signature
        sig = parse_signature(Path(args.sig).read_text())
    else:
        sig = DEFAULT_SIG
    rs = sigma.sigma_system(sig)

    rep = sigma.termination_probe(rs, size_bound=args.size, samples=args.samples,
                                  seed=args.seed, check_sorts=True)
    crep = sigma.local_confluence_probe(rs, size_bound=args.size,
                                        samples=args.samples, seed=args.seed + 1)
    if args.json:
        import dataclasses
        import json

        print(json.dumps({"termination": dataclasses.asdict(rep),
                          "confluence": dataclasses.asdict(crep)}, sort_keys=True))
    else:
        print(rep.summary())
        for item in rep.nf_mismatches + rep.budget_failures + rep.sort_violations:
            print(f"  witness: {item}")
        print(crep.summary())
        for item in crep.divergent:
            print(f"  divergent peak: {item}")

    return 0 if (rep.ok and crep.ok) else 1


if __name__ == "__main__":
    raise SystemExit(main())
