"""Replay the degeneration argument over a batch of torus derivations.

For each sampled obstruction datum on torus(n) the certifier either walks
all steps (zero datum: the page turn changes nothing) or stops at the first
step whose instance check fails, reporting the witness. Prints one line per
case and a verdict histogram.
"""

import argparse
import random
from collections import Counter

from specseq import (
    ObstructionDatum,
    build_model,
    d2_from_alpha,
    degeneration_certify,
)
from specseq.fuzz import random_obstruction_datum


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=2, help="torus dimension parameter")
    ap.add_argument("--cases", type=int, default=12)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--witnesses", action="store_true",
                    help="print the failing witness of each uncertified case")
    args = ap.parse_args()

    model = build_model("torus", args.n)
    verdicts: Counter[str] = Counter()
    for i in range(args.cases):
        rng = random.Random(f"certificates:{args.seed}:{i}")
        if rng.random() < 0.25:
            od = ObstructionDatum(model, {}, 1)
        else:
            od = random_obstruction_datum(rng, model, constrained=rng.random() < 0.5)
        cert = degeneration_certify(model.pa, d2_from_alpha(od))
        verdicts[cert.verdict] += 1
        print(f"case {i:3d}: {cert.verdict}")
        if args.witnesses and not cert.certified():
            print(f"          witness: {cert.steps[-1].witness}")

    print()
    for verdict, count in sorted(verdicts.items()):
        print(f"{count:4d}  {verdict}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
