"""
Family lookup by name, for scenario files and the generate command.
Matrix-valued parameters arrive as [re, im] pair arrays.
"""

import logging
from typing import Any, Callable, Dict

from ifelab.core.errors import InvalidInputError
from ifelab.core.schema import from_pairs
from ifelab.families.dephasing import bosonic_dephasing, pure_dephasing
from ifelab.families.family_instance import FamilyInstance
from ifelab.families.projector import random_projector_family
from ifelab.families.spin_boson import spin_boson_dephasing
from ifelab.families.two_qubit import two_qubit_xy

logger = logging.getLogger(__name__)


def _pure_dephasing(epsilons, h_b, b_ops) -> FamilyInstance:
    return pure_dephasing(epsilons, from_pairs(h_b), [from_pairs(B) for B in b_ops])


FAMILY_BUILDERS: Dict[str, Callable[..., FamilyInstance]] = {
    "two_qubit_xy": two_qubit_xy,
    "spin_boson_dephasing": spin_boson_dephasing,
    "pure_dephasing": _pure_dephasing,
    "bosonic_dephasing": bosonic_dephasing,
    "projector_family": random_projector_family,
}


def build_family(name: str, params: Dict[str, Any]) -> FamilyInstance:
    builder = FAMILY_BUILDERS.get(name)
    if builder is None:
        raise InvalidInputError(f"unknown family '{name}' (known: {', '.join(sorted(FAMILY_BUILDERS))})")
    try:
        instance = builder(**params)
    except TypeError as e:
        raise InvalidInputError(f"bad parameters for family '{name}': {e}") from e
    logger.info(f"[FAMILY] built {name} D={instance.hamiltonian.dims.total}")
    return instance
