"""
FamilyInstance: a generated Hamiltonian plus the structures known for it.
"""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np

from ifelab.core.model import BipartiteHamiltonian, PureState
from ifelab.core.numerics import EigenSystem


@dataclass(frozen=True, eq=False)
class FamilyInstance:
    family: str
    hamiltonian: BipartiteHamiltonian
    known_dfs_bases: List[np.ndarray] = field(default_factory=list)
    known_gife_states: List[PureState] = field(default_factory=list)
    known_ife_states: List[PureState] = field(default_factory=list)
    metadata: Dict[str, Any] = field(default_factory=dict)
    eigensystem: Optional[EigenSystem] = None

    def __post_init__(self):
        # IFE ⊂ GIFE: make every IFE state visible in the GIFE list too
        listed = {id(s) for s in self.known_gife_states}
        missing = [s for s in self.known_ife_states if id(s) not in listed]
        if missing:
            object.__setattr__(self, "known_gife_states", list(self.known_gife_states) + missing)

    def metadata_document(self) -> Dict[str, Any]:
        """JSON-ready sidecar: parameters plus known structures as [re, im] arrays"""
        def pairs(arr):
            arr = np.asarray(arr, dtype=np.complex128)
            return np.stack([arr.real, arr.imag], axis=-1).tolist()

        doc = {
            "family": self.family,
            "parameters": _jsonable(self.metadata),
            "knownDfsBases": [pairs(B) for B in self.known_dfs_bases],
            "knownGifeStates": [{"label": s.label, "amplitudes": pairs(s.amplitudes)} for s in self.known_gife_states],
            "knownIfeStates": [{"label": s.label, "amplitudes": pairs(s.amplitudes)} for s in self.known_ife_states],
        }
        if self.eigensystem is not None:
            doc["eigenvalues"] = self.eigensystem.eigenvalues.tolist()
        return doc


def _jsonable(value):
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        if np.iscomplexobj(value):
            return np.stack([value.real, value.imag], axis=-1).tolist()
        return value.tolist()
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    if isinstance(value, complex):
        return [value.real, value.imag]
    return value
