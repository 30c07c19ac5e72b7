# IFE and DFS detection
# Primary entry points: ife_check.ife_algebraic_check(), dfs_check.dfs_check()
from ifelab.detect.dfs_check import DfsVerdict, dfs_check, dfs_dynamic_check, dfs_to_ife_bridge
from ifelab.detect.ife_check import IfeVerdict, ife_algebraic_check, ife_dynamic_check, ife_subspace_check

__all__ = [
    "DfsVerdict",
    "IfeVerdict",
    "dfs_check",
    "dfs_dynamic_check",
    "dfs_to_ife_bridge",
    "ife_algebraic_check",
    "ife_dynamic_check",
    "ife_subspace_check",
]
