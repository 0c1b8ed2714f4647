"""CCCP and GBP with and without the RGBF transform on kappa_12.

GBP runs use damping 0.8 and up to 5000 sweeps; with damping 0.5 it
oscillates on most kappa_12 instances.
"""
from _common import finish, parser

from trc.experiments import ExperimentSpec, InstanceSpec, run_experiment

if __name__ == "__main__":
    ap = parser(__doc__)
    ap.add_argument("--n", type=int, default=12)
    ap.add_argument("--seeds", type=int, nargs="+", default=[0, 1, 2])
    ap.add_argument("--damping", type=float, default=0.8)
    args = ap.parse_args()
    inst = [InstanceSpec("kappa", args.n, 2, args.seeds)]
    results = run_experiment(ExperimentSpec(instances=inst, rgbf=[True, False], workers=args.workers))
    results += run_experiment(ExperimentSpec(instances=inst, engines=["trc-gbp"], rgbf=[True, False],
                                             damping=args.damping, max_outer_iterations=5000,
                                             workers=args.workers))
    finish(results, args)
