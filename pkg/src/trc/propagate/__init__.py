from .engine import (BeliefState, EngineConfig, cccp_run, extract_marginal, gbp_run,
                     region_free_energy)
from .layout import compile_layout
from .pipeline import TRCConfig, build_regions, evidence_masks, trc_run

__all__ = ["BeliefState", "EngineConfig", "TRCConfig", "build_regions", "cccp_run",
           "compile_layout", "evidence_masks", "extract_marginal", "gbp_run",
           "region_free_energy", "trc_run"]
