"""Accuracy against the convergence threshold on kappa_12 (max KL should fall with epsilon)."""
from _common import finish, parser

from trc.experiments import ExperimentSpec, InstanceSpec, run_experiment

if __name__ == "__main__":
    ap = parser(__doc__)
    ap.add_argument("--n", type=int, default=12)
    ap.add_argument("--seeds", type=int, nargs="+", default=[0, 1, 2])
    ap.add_argument("--epsilons", type=float, nargs="+", default=[1e-3, 1e-4, 1e-5])
    args = ap.parse_args()
    spec = ExperimentSpec(instances=[InstanceSpec("kappa", args.n, 2, args.seeds)],
                          epsilons=args.epsilons, workers=args.workers)
    results = run_experiment(spec)
    finish(results, args)
    for s in args.seeds:
        col = [r.max_kl for r in results if r.seed == s and r.max_kl is not None]
        mono = all(a > b for a, b in zip(col, col[1:]))
        print(f"seed {s}: max KL {' > '.join(f'{x:.2e}' for x in col)}  monotone={mono}")
