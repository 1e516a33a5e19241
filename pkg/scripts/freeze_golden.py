"""Freeze reference values at the canonical points into tests/golden.json.

Each value is cross-checked against an independent route before it is written:
h against the shifted lattice sums, E against the u-expansion and the
difference quotient.  Nothing is written if any check disagrees.

    python3 scripts/freeze_golden.py [--precision 40] [--out tests/golden.json]
"""

import argparse
import json
import sys
from pathlib import Path

from drforms.cinfty import working_precision
from drforms.eisenstein import PointForms, false_eisenstein, h_function_bruteforce
from drforms.lattice import canonical_cm_point

CONFIGS = [(2, 2), (3, 2), (2, 3)]


def freeze(q, r, precision, N=8):
    with working_precision(precision):
        z = canonical_cm_point(q, r)
        f = PointForms(z, 3 if r == 2 else 2, N)
        E = {route: false_eisenstein(f, route) for route in ("det", "u", "dL")}
        problems = []
        if not (h_function_bruteforce(z, f.D, f.pi) - f.h).is_zero_to_precision():
            problems.append("h disagrees with the shifted lattice sums")
        for route in ("u", "dL"):
            if not (E["det"] - E[route]).is_zero_to_precision():
                problems.append(f"E[det] disagrees with E[{route}]")
        doc = {
            "q": q,
            "r": r,
            "precision": precision,
            "pi": f.pi.to_json(),
            "h": f.h.to_json(),
            "delta": f.mod.delta.to_json(),
            "g": [x.to_json() for x in f.mod.g],
            "E": E["det"].to_json(),
        }
    return doc, problems


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--precision", type=int, default=40)
    parser.add_argument("--out", default=str(Path(__file__).resolve().parent.parent / "tests" / "golden.json"))
    args = parser.parse_args(argv)
    docs, problems = [], []
    for q, r in CONFIGS:
        doc, bad = freeze(q, r, args.precision)
        docs.append(doc)
        problems += [f"(q={q}, r={r}) {msg}" for msg in bad]
        print(f"q={q} r={r}: {'ok' if not bad else 'MISMATCH'}")
    if problems:
        print("\n".join(problems), file=sys.stderr)
        return 1
    Path(args.out).write_text("[\n" + ",\n".join(json.dumps(d) for d in docs) + "\n]\n")
    print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
