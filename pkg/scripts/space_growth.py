"""Region-store size of the kappa_n region graph against n, with a log-log slope fit."""
import argparse

import numpy as np

from trc.generators import random_kappa_bfg
from trc.propagate import TRCConfig, build_regions


def sizes(n, rgbf=True):
    rg = build_regions(random_kappa_bfg(n, 2, 0), TRCConfig(rgbf=rgbf)).rg
    return len(rg.regions), rg.size_entries()


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, nargs="+", default=[10, 20, 40])
    args = ap.parse_args()
    for rgbf in (False, True):
        rows = [(n, *sizes(n, rgbf)) for n in args.n]
        print(f"rgbf={rgbf}")
        for n, r, e in rows:
            print(f"  n={n:<4} regions={r:<7} entries={e:<8} regions/(n-2)^2={r / (n - 2) ** 2:.3f}")
        x = np.log([n for n, _, _ in rows])
        for k, lab in ((1, "regions"), (2, "entries")):
            print(f"  fitted exponent ({lab}): {np.polyfit(x, np.log([row[k] for row in rows]), 1)[0]:.3f}")
