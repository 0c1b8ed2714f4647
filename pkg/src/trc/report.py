"""Per-variable inference results shared by the approximate engines and the exact oracle."""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np


def mean_value(p) -> float:
    """Expected state number when states are labelled 1, 2, ..., m."""
    p = np.asarray(p, dtype=float)
    return float(np.dot(np.arange(1, p.size + 1), p))


@dataclass
class MarginalReport:
    marginals: dict                       # variable -> 1-d probability array
    method: str = "exact"
    iterations: int = 0
    converged: bool = True
    epsilon: float | None = None
    seed: int | None = None
    disagreement: dict = field(default_factory=dict)  # variable -> max cross-region gap
    free_energy_trace: list = field(default_factory=list)
    seconds: float = 0.0
    extra: dict = field(default_factory=dict)

    @property
    def means(self) -> dict:
        return {v: mean_value(p) for v, p in self.marginals.items()}

    @property
    def variables(self):
        return list(self.marginals)

    def records(self, kl=None) -> list[dict]:
        """One flat record per variable (the line-delimited output format)."""
        out = []
        for v, p in self.marginals.items():
            rec = {"variable": v, "marginal": [float(x) for x in p], "mean": mean_value(p),
                   "iterations": self.iterations, "converged": self.converged,
                   "engine": self.method, "epsilon": self.epsilon, "seed": self.seed}
            if kl is not None and v in kl:
                rec["kl"] = float(kl[v])
            out.append(rec)
        return out

    def to_jsonl(self, kl=None) -> str:
        return "".join(json.dumps(r) + "\n" for r in self.records(kl))

    def to_text(self) -> str:
        width = max([len(v) for v in self.marginals] + [8])
        lines = [f"method {self.method}  iterations {self.iterations}  converged {self.converged}",
                 f"{'variable':<{width}}  {'mean':>8}  marginal"]
        for v, p in self.marginals.items():
            probs = " ".join(f"{x:.6f}" for x in p)
            lines.append(f"{v:<{width}}  {mean_value(p):8.4f}  {probs}")
        return "\n".join(lines) + "\n"
