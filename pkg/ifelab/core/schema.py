"""
JSON documents for Hamiltonians and states.
Matrices are row-major arrays of [re, im] pairs; non-finite values are rejected.
"""

import json
from pathlib import Path
from typing import List, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from ifelab.core.model import BipartiteDims, BipartiteHamiltonian, PureState

Pair = List[float]


def _check_pairs(values: list, depth: int, name: str) -> list:
    def walk(node, level):
        if level == 0:
            if len(node) != 2:
                raise ValueError(f"{name}: complex entries must be [re, im] pairs, got {node!r}")
            return
        for item in node:
            walk(item, level - 1)
    walk(values, depth)
    return values


class HamiltonianDocument(BaseModel):
    model_config = ConfigDict(allow_inf_nan=False)

    dimA: int = Field(ge=2)
    dimB: int = Field(ge=2)
    HA: List[List[Pair]]
    HB: List[List[Pair]]
    HI: List[List[Pair]]

    @field_validator("HA", "HB", "HI")
    @classmethod
    def pairs_only(cls, v, info):
        return _check_pairs(v, 2, info.field_name)


class StateDocument(BaseModel):
    model_config = ConfigDict(allow_inf_nan=False)

    dimA: int = Field(ge=2)
    dimB: int = Field(ge=2)
    amplitudes: List[Pair]
    label: Optional[str] = None

    @field_validator("amplitudes")
    @classmethod
    def pairs_only(cls, v):
        return _check_pairs(v, 1, "amplitudes")


# ─────────────────────────────  CONVERSION  ──────────────────────────────────

def to_pairs(arr: np.ndarray) -> list:
    arr = np.asarray(arr, dtype=np.complex128)
    return np.stack([arr.real, arr.imag], axis=-1).tolist()


def from_pairs(pairs) -> np.ndarray:
    arr = np.asarray(pairs, dtype=float)
    return arr[..., 0] + 1j * arr[..., 1]


def hamiltonian_to_document(H: BipartiteHamiltonian) -> HamiltonianDocument:
    return HamiltonianDocument(
        dimA=H.dims.dim_a, dimB=H.dims.dim_b,
        HA=to_pairs(H.h_a), HB=to_pairs(H.h_b), HI=to_pairs(H.h_i),
    )


def document_to_hamiltonian(doc: HamiltonianDocument) -> BipartiteHamiltonian:
    return BipartiteHamiltonian(
        dims=BipartiteDims(doc.dimA, doc.dimB),
        h_a=from_pairs(doc.HA), h_b=from_pairs(doc.HB), h_i=from_pairs(doc.HI),
    )


def state_to_document(chi: PureState) -> StateDocument:
    return StateDocument(dimA=chi.dims.dim_a, dimB=chi.dims.dim_b,
                         amplitudes=to_pairs(chi.amplitudes), label=chi.label)


def document_to_state(doc: StateDocument) -> PureState:
    return PureState(BipartiteDims(doc.dimA, doc.dimB), from_pairs(doc.amplitudes), label=doc.label)


def load_hamiltonian(path: Union[str, Path]) -> BipartiteHamiltonian:
    with open(path, "r", encoding="utf-8") as f:
        return document_to_hamiltonian(HamiltonianDocument.model_validate(json.load(f)))


def dump_hamiltonian(H: BipartiteHamiltonian, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.write_text(hamiltonian_to_document(H).model_dump_json(indent=2), encoding="utf-8")
    return path


def load_state(path: Union[str, Path]) -> PureState:
    """
    Raises:
        pydantic.ValidationError: malformed document or non-finite amplitude.
        InvalidInputError: amplitudes not unit-norm.
        ShapeError: amplitude count differs from dimA·dimB.
    """
    with open(path, "r", encoding="utf-8") as f:
        return document_to_state(StateDocument.model_validate(json.load(f)))


def dump_state(chi: PureState, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.write_text(state_to_document(chi).model_dump_json(indent=2), encoding="utf-8")
    return path
