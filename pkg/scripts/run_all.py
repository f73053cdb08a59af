"""Run every verification suite and the experiments, then list the verdict summary.

Usage: python3 scripts/run_all.py [--config configs/acceptance.ini] [--out DIR]
"""

import argparse
import sys
import time

from wavekit import cli


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--config", default="configs/acceptance.ini")
    ap.add_argument("--out", default=None)
    args = ap.parse_args(argv)
    extra = ["--out", args.out] if args.out else []
    t0 = time.perf_counter()
    code = cli.main(["all", "--config", args.config, "-q", *extra])
    print(f"exit code {code} after {time.perf_counter() - t0:.1f} s")
    return code


if __name__ == "__main__":
    sys.exit(main())
