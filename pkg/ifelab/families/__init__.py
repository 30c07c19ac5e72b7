# Hamiltonian families with known IFE / GIFE / DFS structure
from ifelab.families.dephasing import bosonic_dephasing, dephasing_coefficients, pure_dephasing
from ifelab.families.family_instance import FamilyInstance
from ifelab.families.projector import projector_family, random_projector_family
from ifelab.families.spin_boson import spin_boson_dephasing
from ifelab.families.two_qubit import two_qubit_xy

__all__ = [
    "FamilyInstance",
    "bosonic_dephasing",
    "dephasing_coefficients",
    "projector_family",
    "pure_dephasing",
    "random_projector_family",
    "spin_boson_dephasing",
    "two_qubit_xy",
]
