"""Experiment matrix: instances x engines x epsilons x RGBF, with summaries and bound checks."""
from __future__ import annotations

import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from itertools import product

from .errors import InvalidInput, TRCError
from .generators import random_complete_bn, random_kappa_bfg
from .oracle import compare_report, exact_marginals
from .propagate import EngineConfig, TRCConfig, trc_run


@dataclass
class InstanceSpec:
    kind: str = "kappa"          # kappa (random kappa_n BFG) | complete (random complete BN) | file
    n: int = 12
    m: int = 2
    seeds: list = field(default_factory=lambda: [0])
    path: str | None = None      # kind == file
    evidence: dict = field(default_factory=dict)  # labels, kind == file

    def networks(self):
        if self.kind == "file":
            from .io import read_model
            yield None, read_model(self.path)
            return
        make = {"kappa": random_kappa_bfg, "complete": random_complete_bn}.get(self.kind)
        if make is None:
            raise InvalidInput(f"unknown instance kind {self.kind!r}")
        for s in self.seeds:
            yield s, make(self.n, self.m, s)


@dataclass
class ExperimentSpec:
    name: str = "experiment"
    instances: list = field(default_factory=list)       # InstanceSpec
    engines: list = field(default_factory=lambda: ["trc-cccp"])
    epsilons: list = field(default_factory=lambda: [1e-5])
    rgbf: list = field(default_factory=lambda: [True])
    damping: float = 0.5
    placement: str = "back"
    max_outer_iterations: int = 2000
    bounds: dict = field(default_factory=dict)          # max_kl / avg_kl limits per run
    workers: int = 1

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentSpec":
        d = dict(d)
        known = set(cls.__dataclass_fields__)
        extra = set(d) - known
        if extra:
            raise InvalidInput(f"unknown experiment keys: {sorted(extra)}")
        d["instances"] = [InstanceSpec(**i) for i in d.get("instances", [])]
        return cls(**d)


@dataclass
class RunResult:
    instance: str
    seed: int | None
    n: int
    m: int
    engine: str
    epsilon: float
    rgbf: bool
    max_kl: float | None = None
    min_kl: float | None = None
    avg_kl: float | None = None
    iterations: int = 0
    converged: bool = False
    seconds: float = 0.0
    error: str | None = None
    records: list = field(default_factory=list)


def _label(inst: InstanceSpec, net):
    return net.name if inst.kind == "file" else f"{inst.kind}{inst.n}-m{inst.m}"


def _one(job):
    inst, seed, net, engine, eps, rgbf, spec = job
    res = RunResult(_label(inst, net), seed, inst.n if inst.kind != "file" else len(net.originals),
                    inst.m, engine, eps, rgbf)
    t0 = time.perf_counter()
    try:
        ev = {}
        if inst.evidence:
            from .model import Evidence
            ev = Evidence.from_labels(net, inst.evidence).assignments
        exact = exact_marginals(net, ev)
        if engine == "exact":
            approx = exact
        else:
            cfg = TRCConfig(engine=engine.removeprefix("trc-"), rgbf=rgbf, placement=spec.placement,
                            seed=seed or 0,
                            engine_cfg=EngineConfig(epsilon=eps, damping=spec.damping,
                                                    max_outer_iterations=spec.max_outer_iterations))
            approx = trc_run(net, ev, cfg)
        approx.marginals = {v: approx.marginals[v] for v in exact.marginals}
        cmp = compare_report(approx, exact)
        res.max_kl, res.min_kl, res.avg_kl = cmp.max_kl, cmp.min_kl, cmp.avg_kl
        res.iterations, res.converged = approx.iterations, approx.converged
        res.records = approx.records(cmp.kl)
    except TRCError as e:
        res.error = f"{type(e).__name__}: {e}"
    res.seconds = time.perf_counter() - t0
    return res


def jobs(spec: ExperimentSpec):
    for inst in spec.instances:
        for seed, net in inst.networks():
            for engine, eps, rgbf in product(spec.engines, spec.epsilons, spec.rgbf):
                if engine not in ("trc-cccp", "trc-gbp", "exact"):
                    raise InvalidInput(f"unknown engine {engine!r}")
                yield inst, seed, net, engine, eps, rgbf, spec


def run_experiment(spec: ExperimentSpec) -> list[RunResult]:
    """Every matrix cell; errors are recorded on the result instead of raised."""
    work = list(jobs(spec))
    if spec.workers > 1 and len(work) > 1:
        with ProcessPoolExecutor(spec.workers) as pool:
            return list(pool.map(_one, work))
    return [_one(j) for j in work]


def violations(results, bounds: dict) -> list[str]:
    out = []
    for r in results:
        tag = f"{r.instance} seed={r.seed} {r.engine} eps={r.epsilon:g} rgbf={r.rgbf}"
        if r.error:
            out.append(f"{tag}: {r.error}")
            continue
        if not r.converged:
            out.append(f"{tag}: not converged")
        if "max_kl" in bounds and r.max_kl > bounds["max_kl"]:
            out.append(f"{tag}: max KL {r.max_kl:.3e} > {bounds['max_kl']:g}")
        if "avg_kl" in bounds and r.avg_kl > bounds["avg_kl"]:
            out.append(f"{tag}: average KL {r.avg_kl:.3e} > {bounds['avg_kl']:g}")
    return out


def summary_rows(results) -> list[dict]:
    return [{k: v for k, v in asdict(r).items() if k != "records"} for r in results]


def format_summary(results) -> str:
    """One line per run: KL summary, iterations and time, plus the matrix coordinates."""
    head = f"{'instance':<16}{'seed':>5} {'engine':<9}{'eps':>8} {'rgbf':<6}{'max(KL)':>11}{'min(KL)':>11}{'avg(KL)':>11}{'iter':>6}{'sec':>7}"
    lines = [head]
    for r in results:
        coord = f"{r.instance:<16}{r.seed!s:>5} {r.engine:<9}{r.epsilon:>8.0e} {r.rgbf!s:<6}"
        if r.error:
            lines.append(coord + f"  {r.error}")
        else:
            flag = "" if r.converged else "  (not converged)"
            lines.append(coord + f"{r.max_kl:>11.3e}{r.min_kl:>11.3e}{r.avg_kl:>11.3e}"
                         f"{r.iterations:>6}{r.seconds:>7.1f}{flag}")
    return "\n".join(lines) + "\n"


def write_jsonl(results, path):
    """Per-variable records (tagged with the run coordinates) followed by one summary per run."""
    with open(path, "w") as fh:
        for r in results:
            for rec in r.records:
                rec = dict(rec, instance=r.instance, rgbf=r.rgbf, m=r.m, n=r.n)
                fh.write(json.dumps(rec) + "\n")
        for row in summary_rows(results):
            fh.write(json.dumps(dict(row, record="summary")) + "\n")


def load_spec(path) -> ExperimentSpec:
    with open(path) as fh:
        return ExperimentSpec.from_dict(json.load(fh))
