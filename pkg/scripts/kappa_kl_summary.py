"""KL summary on random kappa_n BFGs (default kappa_12, three seeds)."""
from _common import finish, parser

from trc.experiments import ExperimentSpec, InstanceSpec, run_experiment

if __name__ == "__main__":
    ap = parser(__doc__)
    ap.add_argument("--n", type=int, nargs="+", default=[12], help="kappa sizes (20 takes about a minute)")
    ap.add_argument("--seeds", type=int, nargs="+", default=[0, 1, 2])
    ap.add_argument("--epsilon", type=float, default=1e-5)
    args = ap.parse_args()
    spec = ExperimentSpec(instances=[InstanceSpec("kappa", n, 2, args.seeds) for n in args.n],
                          epsilons=[args.epsilon], workers=args.workers)
    finish(run_experiment(spec), args)
