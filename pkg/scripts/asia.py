"""Chest-clinic network with a = yes and d = yes: TRC, GBP and exact mean values."""
import argparse

from trc.generators import asia
from trc.oracle import exact_marginals
from trc.propagate import TRCConfig, trc_run

if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--order", default="edge-first", help="edge-first | lexicographic | comma-separated order")
    args = ap.parse_args()
    order = args.order if args.order in ("edge-first", "lexicographic") else args.order.split(",")
    net, ev = asia(), {"a": 1, "d": 1}
    exact = exact_marginals(net, ev).means
    runs = {"trc-cccp": trc_run(net, ev, TRCConfig(factorize="kappa", order=order)),
            "trc-gbp": trc_run(net, ev, TRCConfig(engine="gbp", factorize="kappa", order=order)),
            "binary": trc_run(net, ev, TRCConfig(factorize="binary"))}
    print(f"{'var':<5}{'exact':>8}" + "".join(f"{k:>10}" for k in runs))
    for v in net.names:
        print(f"{v:<5}{exact[v]:>8.3f}" + "".join(f"{r.means[v]:>10.3f}" for r in runs.values()))
