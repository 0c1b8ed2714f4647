"""End-to-end triplet region construction: factorize, build regions, propagate, read out."""
from __future__ import annotations

import time
from dataclasses import dataclass, field

from ..errors import InvalidInput, UnknownVariable
from ..factorize import binary_factorize, identity_metadata, to_kappa_bfg
from ..markov import moralize
from ..model import DiscreteNetwork, as_evidence, validate_network
from ..ori import outer_regions
from ..regions import cvm_construct
from ..report import MarginalReport
from ..rgbf import rgbf_transform
from .engine import EngineConfig, cccp_run, extract_marginal, gbp_run
from .layout import compile_layout


@dataclass
class TRCConfig:
    engine: str = "cccp"            # cccp | gbp
    rgbf: bool = True
    placement: str = "back"         # where RGBF puts non-zero counting numbers
    seed: int = 0
    factorize: str = "auto"         # auto | kappa | binary | none
    kappa_limit: int = 12           # auto: embed into kappa_n only up to this many nodes
    order: object = "edge-first"    # node order for the kappa embedding
    interactions: str = "moral-edges"
    engine_cfg: EngineConfig = field(default_factory=EngineConfig)


@dataclass
class Built:
    bfg: DiscreteNetwork
    meta: object
    fs: object
    outer: object
    rg_cvm: object
    rg: object


def _is_bfg(net: DiscreteNetwork) -> bool:
    return (all(len(c.parents) <= 2 for c in net.cpts)
            and any(v.kind == "intermediate" for v in net.variables))


def factorize_for_trc(net: DiscreteNetwork, mode="auto", kappa_limit=12, order="edge-first"):
    """BFG for ``net``.  ``auto`` keeps a BFG as is, embeds small networks into
    kappa_n and binary factorizes the rest (the embedding's inner loop slows
    sharply with its replica chains)."""
    if mode == "auto":
        if _is_bfg(net):
            mode = "none"
        else:
            mode = "kappa" if len(binary_factorize(net)[0]) <= kappa_limit else "binary"
    if mode == "none":
        if any(len(c.parents) > 2 for c in net.cpts):
            raise InvalidInput("factorize='none' needs every node to have at most two parents")
        return net, identity_metadata(net)
    if mode == "binary":
        return binary_factorize(net)
    if mode == "kappa":
        return to_kappa_bfg(net, order=order)
    raise InvalidInput(f"unknown factorize mode {mode!r}")


def build_regions(net: DiscreteNetwork, cfg: TRCConfig | None = None) -> Built:
    cfg = cfg or TRCConfig()
    validate_network(net).raise_if_invalid()
    bfg, meta = factorize_for_trc(net, cfg.factorize, cfg.kappa_limit, cfg.order)
    fs = moralize(bfg)
    outer = outer_regions(bfg, fs, cfg.interactions)
    rg0 = cvm_construct(outer)
    rg = rgbf_transform(rg0, cfg.placement, cfg.seed) if cfg.rgbf else rg0
    return Built(bfg, meta, fs, outer, rg0, rg)


def evidence_masks(built: Built, evidence) -> dict:
    """Evidence on source variables replicated onto every BFG variable that encodes them."""
    ev = as_evidence(evidence)
    names = set(built.meta.source_cards)
    for k in ev.assignments:
        if k not in names:
            raise UnknownVariable(f"evidence on unknown variable {k!r}")
    masks = {}
    for v in built.bfg.names:
        m = built.meta.evidence_mask(v, ev.assignments)
        if m is not None:
            masks[v] = m
    return masks


def source_variables(net: DiscreteNetwork, built: Built):
    if built.bfg is net:
        return net.originals
    return list(net.names)


def trc_run(net: DiscreteNetwork, evidence=None, cfg: TRCConfig | None = None, built: Built | None = None) -> MarginalReport:
    cfg = cfg or TRCConfig()
    t0 = time.perf_counter()
    built = built or build_regions(net, cfg)
    masks = evidence_masks(built, evidence)
    lay = compile_layout(built.rg, masks)
    run = {"cccp": cccp_run, "gbp": gbp_run}.get(cfg.engine)
    if run is None:
        raise InvalidInput(f"unknown engine {cfg.engine!r}")
    state = run(lay, cfg=cfg.engine_cfg)
    marg, gap = {}, {}
    for v in source_variables(net, built):
        marg[v], gap[v] = extract_marginal(state, v)
    return MarginalReport(marg, method=f"trc-{cfg.engine}", iterations=state.iteration,
                          converged=state.converged, epsilon=cfg.engine_cfg.epsilon, seed=cfg.seed,
                          disagreement=gap, free_energy_trace=list(state.free_energy_trace),
                          seconds=time.perf_counter() - t0,
                          extra={"regions": len(built.rg.regions), "rgbf": cfg.rgbf,
                                 "inner_sweeps": sum(state.inner_sweeps)})
