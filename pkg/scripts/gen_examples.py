"""Regenerate the bundled example documents.

    python3 scripts/gen_examples.py            # torus-2k-parallel with k = 3
    python3 scripts/gen_examples.py --k 2
"""

import argparse
from pathlib import Path

from tsspic import surfaces

DATA = Path(__file__).resolve().parents[1] / "src" / "tsspic" / "data"


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--k", type=int, default=3, help="torus-2k-parallel gets 2k zero curves")
    ap.add_argument("--out", type=Path, default=DATA)
    args = ap.parse_args(argv)
    if args.k < 1:
        ap.error("--k must be positive")
    args.out.mkdir(parents=True, exist_ok=True)
    builders = dict(surfaces.BUILTIN)
    builders["torus-2k-parallel"] = lambda: surfaces.torus_parallel(2 * args.k)
    for name, build in sorted(builders.items()):
        path = args.out / f"{name}.json"
        path.write_text(surfaces.to_document(build()), encoding="utf-8")
        print(path)


if __name__ == "__main__":
    main()
