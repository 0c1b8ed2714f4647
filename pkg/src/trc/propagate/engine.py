"""CCCP (double loop) and two-way GBP drivers over a compiled region graph."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import InvalidInput, NotConverged, NumericalFailure, UnknownVariable
from . import kernels as K
from .layout import Layout, compile_layout


@dataclass
class EngineConfig:
    epsilon: float = 1e-5
    max_outer_iterations: int = 2000
    inner_tolerance: float = 1e-7
    max_inner_iterations: int = 200
    damping: float = 0.5          # GBP only
    schedule: str = "sequential"  # GBP: sequential (edge by edge) | synchronous
    parallelism: int = 1          # > 1 runs disjoint edge batches concurrently (CCCP inner loop)
    strict: bool = False          # raise NotConverged instead of flagging it
    adaptive_inner: bool = True   # inner tolerance tracks the last outer belief change
    inner_ratio: float = 1e-3     # inner tolerance = inner_ratio * last change, capped at 1e-3
    inner_floor: float = 1e-12    # smallest adaptive inner tolerance

    def __post_init__(self):
        if not self.epsilon > 0:
            raise InvalidInput("epsilon must be positive")
        if not 0 <= self.damping < 1:
            raise InvalidInput("damping must lie in [0, 1)")
        if self.schedule not in ("sequential", "synchronous"):
            raise InvalidInput(f"unknown schedule {self.schedule!r}")
        if self.max_outer_iterations < 1 or self.max_inner_iterations < 1:
            raise InvalidInput("iteration caps must be positive")


@dataclass
class BeliefState:
    layout: Layout
    logb: np.ndarray                 # flat log beliefs, every region normalized
    engine: str
    multipliers: np.ndarray | None = None   # CCCP lambda per edge slot
    messages_down: np.ndarray | None = None  # GBP log m_{parent -> child}
    messages_up: np.ndarray | None = None    # GBP log n_{child -> parent}
    iteration: int = 0
    converged: bool = False
    free_energy_trace: list = field(default_factory=list)
    change_trace: list = field(default_factory=list)
    inner_sweeps: list = field(default_factory=list)
    epsilon: float = 1e-5

    @property
    def rg(self):
        return self.layout.rg

    @property
    def region_energies(self):
        return -self.layout.logpot

    def belief(self, r) -> np.ndarray:
        return self.layout.table(np.exp(self.logb), r)

    @property
    def beliefs(self) -> list:
        return [self.belief(r) for r in range(len(self.rg.regions))]

    def free_energy(self) -> float:
        return region_free_energy(self.layout, self.logb)

    def consistency_gap(self) -> float:
        """Largest |sum_{r minus c} b_r - b_c| over region edges."""
        worst = 0.0
        lay = self.layout
        for e in range(len(lay.eparent)):
            p, c = int(lay.eparent[e]), int(lay.echild[e])
            bp = np.exp(self.logb[lay.region_slice(p)])
            m = np.bincount(lay.emap[lay.moff[e]:lay.moff[e] + lay.rsize[p]], weights=bp,
                            minlength=int(lay.rsize[c]))
            worst = max(worst, float(np.abs(m - np.exp(self.logb[lay.region_slice(c)])).max()))
        return worst


def region_free_energy(lay: Layout, logb) -> float:
    """``sum_r c_r sum_x b_r (E_r + ln b_r)``."""
    b = np.exp(logb)
    c = lay.per_entry(lay.counts)
    with np.errstate(invalid="ignore"):
        terms = np.where(b > 0, b * (logb - lay.logpot), 0.0)
    return float(np.dot(c, terms))


def _uniform_logb(lay: Layout):
    return np.repeat(-np.log(lay.rsize.astype(float)), lay.rsize)


def _check(arr, what, it):
    if not np.all(np.isfinite(arr)):
        raise NumericalFailure(f"non-finite {what} at iteration {it}")


def _finish(state: BeliefState, cfg: EngineConfig):
    if not state.converged and cfg.strict:
        raise NotConverged(f"{state.engine} did not reach epsilon={cfg.epsilon} "
                           f"in {cfg.max_outer_iterations} iterations")
    return state


def _layout(rg, masks):
    return rg if isinstance(rg, Layout) else compile_layout(rg, masks)


def cccp_run(rg, masks=None, cfg: EngineConfig | None = None) -> BeliefState:
    """Double-loop minimization of the region free energy.

    Outer step: bound the concave part at the previous beliefs, giving
    ``log h_r = -(c_r/c_max)(E_r + 1) + ((c_max - c_r)/c_max) log b_r_old``.
    Inner loop: iterative scaling of the edge multipliers until parent beliefs
    marginalize onto child beliefs.  ``masks`` is evidence as variable -> allowed states.
    """
    cfg = cfg or EngineConfig()
    lay = _layout(rg, masks)
    cmax = float(lay.counts.max()) if lay.counts.size else 1.0
    if cmax <= 0:
        raise InvalidInput("region graph has no region with a positive counting number")
    c = lay.per_entry(lay.counts)
    E = -lay.logpot
    logb = _uniform_logb(lay)
    lam = np.zeros(lay.slots)
    state = BeliefState(lay, logb, "cccp", multipliers=lam, epsilon=cfg.epsilon)
    new = np.empty_like(logb)
    change = np.inf
    for it in range(1, cfg.max_outer_iterations + 1):
        tol = cfg.inner_tolerance
        if cfg.adaptive_inner:
            tol = max(cfg.inner_floor, min(1e-3, cfg.inner_ratio * change))
        logh = -(c / cmax) * (E + 1.0) + ((cmax - c) / cmax) * logb
        K.assemble_cccp(logh, lam, lay.roff, lay.rsize, lay.eparent, lay.echild, lay.emap,
                        lay.moff, lay.loff, 1.0 / cmax, new)
        if len(lay.eparent):
            if cfg.parallelism > 1:
                sweeps, _ = K.cccp_inner_batched(new, lam, lay.roff, lay.rsize, lay.eparent, lay.echild,
                                                 lay.emap, lay.moff, lay.loff, cmax, lay.batches, lay.boff,
                                                 tol, cfg.max_inner_iterations, lay.maxchild)
            else:
                sweeps, _ = K.cccp_inner(new, lam, lay.roff, lay.rsize, lay.eparent, lay.echild,
                                         lay.emap, lay.moff, lay.loff, cmax, lay.order,
                                         tol, cfg.max_inner_iterations, lay.maxchild)
            state.inner_sweeps.append(int(sweeps))
        _check(new, "CCCP beliefs", it)
        _check(lam, "CCCP multipliers", it)
        change = K.max_abs_change(new, logb)
        logb, new = new, logb
        state.logb = logb
        state.iteration = it
        state.change_trace.append(change)
        state.free_energy_trace.append(region_free_energy(lay, logb))
        if change < cfg.epsilon:
            state.converged = True
            break
    state.multipliers = lam
    return _finish(state, cfg)


def gbp_betas(lay: Layout) -> np.ndarray:
    """``beta_r = 1 / (2 - (1 - c_r) / p_r)`` for regions with parents (1 elsewhere)."""
    nparents = np.bincount(lay.echild, minlength=len(lay.rsize)) if len(lay.echild) else np.zeros(len(lay.rsize))
    beta = np.ones(len(lay.rsize))
    for r in np.nonzero(nparents)[0]:
        den = 2.0 - (1.0 - lay.counts[r]) / nparents[r]
        if den == 0:
            raise NumericalFailure(f"GBP exponent undefined for region {r}")
        beta[r] = 1.0 / den
    return beta


def gbp_run(rg, masks=None, cfg: EngineConfig | None = None) -> BeliefState:
    """Two-way generalized belief propagation with damped log-space messages.

    The ``sequential`` schedule updates one edge at a time in level order and
    refreshes the two beliefs it touches; ``synchronous`` updates every edge
    from the previous sweep's beliefs.
    """
    cfg = cfg or EngineConfig()
    lay = _layout(rg, masks)
    logf = lay.per_entry(lay.counts) * lay.logpot
    beta = gbp_betas(lay)
    logm = np.zeros(lay.slots)
    logn = np.zeros(lay.slots)
    logb = np.empty(lay.total)
    K.gbp_beliefs(logf, logm, logn, lay.roff, lay.rsize, lay.eparent, lay.echild, lay.emap,
                  lay.moff, lay.loff, logb)
    state = BeliefState(lay, logb, "gbp", messages_down=logm, messages_up=logn, epsilon=cfg.epsilon)
    if not len(lay.eparent):
        state.converged = True
        state.iteration = 1
        return state
    new = logb.copy()
    for it in range(1, cfg.max_outer_iterations + 1):
        with np.errstate(all="ignore"):
            if cfg.schedule == "sequential":
                K.gbp_sequential_sweep(logm, logn, lay.roff, lay.rsize, lay.eparent, lay.echild, lay.emap,
                                       lay.moff, lay.loff, beta, cfg.damping, lay.order, new, lay.maxchild)
            else:
                K.gbp_sweep(logf, logm, logn, lay.roff, lay.rsize, lay.eparent, lay.echild, lay.emap,
                            lay.moff, lay.loff, beta, cfg.damping, new, lay.maxchild)
        _check(new, "GBP beliefs", it)
        _check(logm, "GBP messages", it)
        _check(logn, "GBP messages", it)
        change = K.max_abs_change(new, logb)
        logb[:] = new
        state.iteration = it
        state.change_trace.append(change)
        state.free_energy_trace.append(region_free_energy(lay, logb))
        if change < cfg.epsilon:
            state.converged = True
            break
    state.logb = logb
    return _finish(state, cfg)


def region_marginal(state: BeliefState, r, variable) -> np.ndarray:
    lab = state.rg.regions[r].label
    b = state.belief(r)
    axes = tuple(i for i, v in enumerate(lab) if v != variable)
    return b.sum(axis=axes)


def extract_marginal(state: BeliefState, variable, rg=None):
    """Marginal of ``variable`` from its smallest containing region.

    Returns ``(distribution, disagreement)``; the second value is the largest
    L-infinity gap between the marginals implied by any two containing regions.
    """
    rg = rg or state.rg
    holders = [i for i, r in enumerate(rg.regions) if variable in r.vars]
    if not holders:
        raise UnknownVariable(f"variable {variable!r} is in no region")
    best = min(holders, key=lambda i: (len(rg.regions[i].label), -rg.regions[i].level, i))
    p = region_marginal(state, best, variable)
    margs = np.array([region_marginal(state, i, variable) for i in holders])
    gap = float((margs.max(axis=0) - margs.min(axis=0)).max())
    return p / p.sum(), gap
