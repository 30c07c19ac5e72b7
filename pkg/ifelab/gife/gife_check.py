"""
GIFE verdicts: the dynamic trace-power test and its algebraic counterpart.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

from config.settings import DEFAULT_TOLERANCE
from ifelab.core.dynamics import TimeGrid, functional_trajectories
from ifelab.core.errors import InvalidInputError
from ifelab.core.model import (
    BipartiteHamiltonian,
    as_pure_state,
    eigensystem_for,
    expand_in_eigenbasis,
    state_vector,
)
from ifelab.detect.ife_check import ife_algebraic_check
from ifelab.gife.gife_recipe import ClassKey, RecipeTables

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class GifeVerdict:
    is_gife: bool
    max_drift: Tuple[float, ...]
    algebraic_residuals: Dict[ClassKey, float] = field(default_factory=dict)
    is_proper_gife: Optional[bool] = None
    tolerance: float = DEFAULT_TOLERANCE
    method: str = "dynamic"

    def to_dict(self) -> dict:
        return {
            "isGife": self.is_gife,
            "isProperGife": self.is_proper_gife,
            "maxDrift": [{"k": k + 1, "drift": d} for k, d in enumerate(self.max_drift)],
            "algebraicResiduals": [
                {"order": order, "delta": delta, "residual": value}
                for (order, delta), value in sorted(self.algebraic_residuals.items())
            ],
            "tolerance": self.tolerance,
            "method": self.method,
        }


def _proper(H: BipartiteHamiltonian, chi, is_gife: bool, tol: float) -> bool:
    return is_gife and not ife_algebraic_check(H, chi, tol).is_ife


def gife_dynamic_check(H: BipartiteHamiltonian, chi, grid: TimeGrid,
                       tol: float = DEFAULT_TOLERANCE) -> GifeVerdict:
    """isGife iff tr(ρ_B(t)^k) is flat over the grid for k = 1..min(dimA, dimB)"""
    chi = as_pure_state(chi, H.dims)
    trajectories = functional_trajectories(H.total, chi, grid, H.dims.schmidt_rank_bound,
                                           eigensystem=eigensystem_for(H))
    drifts = tuple(traj.drift for traj in trajectories)
    is_gife = all(d <= tol for d in drifts)
    logger.debug(f"[GIFE] dynamic drifts={['%.2e' % d for d in drifts]}")
    return GifeVerdict(
        is_gife=is_gife,
        max_drift=drifts,
        is_proper_gife=_proper(H, chi, is_gife, tol),
        tolerance=tol,
        method="dynamic",
    )


def gife_algebraic_check(H: BipartiteHamiltonian, chi, tol: float = DEFAULT_TOLERANCE,
                         k_max: Optional[int] = None, cluster_tol: Optional[float] = None,
                         tables: Optional[RecipeTables] = None) -> GifeVerdict:
    """
    isGife iff every nonresonant class sum vanishes for k = 2..kMax (k = 1
    is normalization). Raises CapacityError when the tuple budget is exceeded.
    """
    amps = state_vector(chi, H.dims)
    n = H.dims.schmidt_rank_bound
    k_max = n if k_max is None else k_max
    if k_max < 1 or k_max > n:
        raise InvalidInputError(f"kMax must lie in [1, {n}], got {k_max}")
    if tables is None:
        tables = RecipeTables(eigensystem_for(H), H.dims, k_max, cluster_tol)
    residuals = tables.residuals(expand_in_eigenbasis(amps, tables.eigensystem))
    is_gife = all(v <= tol for v in residuals.values())
    worst = max(residuals.values(), default=0.0)
    logger.debug(f"[GIFE] algebraic classes={len(residuals)} max residual={worst:.2e}")
    return GifeVerdict(
        is_gife=is_gife,
        max_drift=(),
        algebraic_residuals=residuals,
        is_proper_gife=_proper(H, amps, is_gife, tol),
        tolerance=tol,
        method="algebraic",
    )


def verdicts_agree(dynamic: GifeVerdict, algebraic: GifeVerdict) -> bool:
    agree = dynamic.is_gife == algebraic.is_gife
    if not agree:
        logger.warning(
            f"[GIFE] algebraic/dynamic disagreement: dynamic={dynamic.is_gife} "
            f"(max drift {max(dynamic.max_drift, default=0.0):.2e}), algebraic={algebraic.is_gife} "
            f"(max residual {max(algebraic.algebraic_residuals.values(), default=0.0):.2e})"
        )
    return agree
