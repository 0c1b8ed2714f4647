"""Multi-state kappa_8 instances (m = 3..6), plus m = 6 rerun at a tighter threshold."""
from _common import finish, parser

from trc.experiments import ExperimentSpec, InstanceSpec, run_experiment

if __name__ == "__main__":
    ap = parser(__doc__)
    ap.add_argument("--n", type=int, default=8)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    inst = [InstanceSpec("kappa", args.n, m, [args.seed]) for m in (3, 4, 5, 6)]
    results = run_experiment(ExperimentSpec(instances=inst, epsilons=[1e-5], workers=args.workers))
    results += run_experiment(ExperimentSpec(instances=inst[-1:], epsilons=[1e-6]))
    finish(results, args)
