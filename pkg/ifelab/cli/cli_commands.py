"""
Subcommand implementations
==========================
check     IFE (algebraic + dynamic) and GIFE (dynamic + algebraic) verdicts per state
search    maximal GIFE supports in the eigenbasis
evolve    functional / Schmidt / entropy trajectories as CSV
generate  family Hamiltonian plus metadata sidecar
"""

import json
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from config.settings import WORKERS
from ifelab import __version__
from ifelab.cli.cli_config import ScenarioConfig, StateSpec
from ifelab.cli.cli_report import Report, StateReport
from ifelab.core.dynamics import (
    TimeGrid,
    entropy_trajectories,
    functional_trajectories,
    schmidt_trajectory,
    write_entropy_csv,
    write_functional_csv,
    write_schmidt_csv,
)
from ifelab.core.errors import CapacityError, InvalidInputError, ShapeError, UsageError
from ifelab.core.model import BipartiteHamiltonian, PureState, eigensystem_for, validate
from ifelab.core.numerics import EigenSystem
from ifelab.core.schema import (
    document_to_hamiltonian,
    dump_hamiltonian,
    from_pairs,
    load_hamiltonian,
    load_state,
)
from ifelab.detect.dfs_check import dfs_check
from ifelab.detect.ife_check import ife_algebraic_check, ife_dynamic_check
from ifelab.families.family_instance import FamilyInstance
from ifelab.families.registry import build_family
from ifelab.gife.gife_check import gife_algebraic_check, gife_dynamic_check, verdicts_agree
from ifelab.gife.gife_recipe import RecipeTables, find_gife_supports, support_draws

logger = logging.getLogger(__name__)

StateItem = Tuple[PureState, Dict[str, bool]]


# ─────────────────────  SCENARIO RESOLUTION  ─────────────────────────────────

@dataclass
class Scenario:
    config: ScenarioConfig
    hamiltonian: BipartiteHamiltonian
    eigensystem: EigenSystem
    instance: Optional[FamilyInstance] = None

    @property
    def grid(self) -> TimeGrid:
        return TimeGrid.uniform(self.config.grid.tMax, self.config.grid.samples)

    @property
    def k_max(self) -> int:
        return self.config.kMax or self.hamiltonian.dims.schmidt_rank_bound


def resolve_scenario(config: ScenarioConfig) -> Scenario:
    source = config.hamiltonian
    instance = None
    if source.family is not None:
        instance = build_family(source.family.name, source.family.params)
        H = instance.hamiltonian
    elif source.file is not None:
        H = load_hamiltonian(source.file)
    else:
        H = document_to_hamiltonian(source.inline)

    report = validate(H)
    if not report.ok:
        raise InvalidInputError(f"invalid Hamiltonian: {[c.name for c in report.failures()]}")
    es = instance.eigensystem if instance is not None and instance.eigensystem is not None else eigensystem_for(H)
    return Scenario(config=config, hamiltonian=H, eigensystem=es, instance=instance)


def _state_from_spec(scenario: Scenario, spec: StateSpec, index: int) -> StateItem:
    dims = scenario.hamiltonian.dims
    label = spec.label or f"state[{index}]"
    if spec.file is not None:
        loaded = load_state(spec.file)
        if loaded.dims != dims:
            raise ShapeError(f"state file {spec.file} has dims ({loaded.dims.dim_a}, {loaded.dims.dim_b}), "
                             f"Hamiltonian has ({dims.dim_a}, {dims.dim_b})")
        state = replace(loaded, label=spec.label or loaded.label or label)
    elif spec.amplitudes is not None:
        state = PureState.from_amplitudes(dims, from_pairs(spec.amplitudes), normalize=spec.normalize, label=label)
    else:
        state = PureState.from_eigen_coefficients(dims, scenario.eigensystem, spec.coefficient_values(),
                                                  normalize=spec.normalize, label=label)
    return state, spec.expect.requested() if spec.expect is not None else {}


def _known_states(scenario: Scenario) -> List[StateItem]:
    instance = scenario.instance
    if instance is None:
        raise UsageError("states 'known' needs a family Hamiltonian source")
    ife = {id(s) for s in instance.known_ife_states}
    items = []
    for i, state in enumerate(instance.known_gife_states):
        expect = {"isIfe": True, "isGife": True} if id(state) in ife else {"isGife": True}
        items.append((state if state.label else replace(state, label=f"known[{i}]"), expect))
    return items


def _searched_states(scenario: Scenario, workers: int) -> List[StateItem]:
    result = _run_search(scenario, workers)
    es, dims = scenario.eigensystem, scenario.hamiltonian.dims
    items = []
    for pattern in result.maximal_supports:
        c = np.zeros(es.dimension, dtype=np.complex128)
        c[list(pattern.indices)] = support_draws(pattern.indices, 1, scenario.config.seed)[0]
        state = PureState.from_eigen_coefficients(dims, es, c, normalize=True, label=f"support{list(pattern.indices)}")
        items.append((state, {"isGife": True}))
    return items


def resolve_states(scenario: Scenario, workers: int = 1) -> List[StateItem]:
    states = scenario.config.states
    if states == "known":
        return _known_states(scenario)
    if states == "search":
        return _searched_states(scenario, workers)
    return [_state_from_spec(scenario, spec, i) for i, spec in enumerate(states)]


def _failed(expect: Dict[str, bool], actual: Dict[str, Optional[bool]]) -> List[str]:
    return [key for key, wanted in expect.items() if key in actual and actual[key] is not None and actual[key] != wanted]


# ─────────────────────  CHECK  ───────────────────────────────────────────────

def _recipe_tables(scenario: Scenario) -> Optional[RecipeTables]:
    policy = scenario.config.algebraic
    if policy == "never":
        return None
    try:
        return RecipeTables(scenario.eigensystem, scenario.hamiltonian.dims, scenario.k_max)
    except CapacityError as e:
        if policy == "always":
            raise
        logger.warning(f"[CHECK] algebraic GIFE check skipped: {e}")
        return None


def _check_state(scenario: Scenario, grid: TimeGrid, tables: Optional[RecipeTables], item: StateItem) -> StateReport:
    state, expect = item
    H, tol = scenario.hamiltonian, scenario.config.tolerance
    ife_alg = ife_algebraic_check(H, state, tol)
    ife_dyn = ife_dynamic_check(H, state, grid, tol)
    gife_dyn = gife_dynamic_check(H, state, grid, tol)
    gife_alg = None
    if tables is not None:
        gife_alg = gife_algebraic_check(H, state, tol, k_max=scenario.k_max, tables=tables)

    is_ife = ife_alg.is_ife and ife_dyn.is_ife
    actual = {"isIfe": is_ife, "isGife": gife_dyn.is_gife, "isProperGife": gife_dyn.is_gife and not is_ife}
    failed = _failed(expect, actual)
    if failed:
        logger.warning(f"[CHECK] {state.label}: expectation failed for {failed}")
    return StateReport(
        label=state.label,
        **actual,
        ifeAlgebraic=ife_alg.to_dict(),
        ifeDynamic=ife_dyn.to_dict(),
        gifeDynamic=gife_dyn.to_dict(),
        gifeAlgebraic=gife_alg.to_dict() if gife_alg is not None else None,
        verdictsAgree=verdicts_agree(gife_dyn, gife_alg) if gife_alg is not None else None,
        expect=expect,
        failedExpectations=failed,
    )


def _dfs_verdicts(scenario: Scenario) -> List[Dict[str, Any]]:
    bases = []
    if scenario.instance is not None:
        bases.extend(("family", B) for B in scenario.instance.known_dfs_bases)
    for vectors in scenario.config.dfsBases:
        bases.append(("config", np.stack([from_pairs(v) for v in vectors], axis=1)))
    out = []
    for origin, basis in bases:
        verdict = dfs_check(scenario.hamiltonian, basis, scenario.config.tolerance).to_dict()
        verdict["source"] = origin
        out.append(verdict)
    return out


def cmd_check(config: ScenarioConfig, workers: int = WORKERS) -> Report:
    started = time.perf_counter()
    scenario = resolve_scenario(config)
    items = resolve_states(scenario, workers)
    grid = scenario.grid
    tables = _recipe_tables(scenario)
    logger.info(f"[CHECK] {len(items)} states, D={scenario.hamiltonian.dims.total}, workers={workers}")
    with ThreadPoolExecutor(max_workers=max(1, workers)) as executor:
        states = list(executor.map(lambda item: _check_state(scenario, grid, tables, item), items))
    return Report(
        command="check",
        version=__version__,
        config=config.echo(),
        hamiltonianHash=scenario.hamiltonian.content_hash,
        states=states,
        dfs=_dfs_verdicts(scenario),
        wallTimeSeconds=time.perf_counter() - started,
    )


# ─────────────────────  SEARCH  ──────────────────────────────────────────────

def _run_search(scenario: Scenario, workers: int):
    config = scenario.config
    return find_gife_supports(
        scenario.eigensystem,
        scenario.hamiltonian.dims,
        k_max=scenario.k_max,
        trials=config.trials,
        seed=config.seed,
        tol=config.tolerance,
        hamiltonian=scenario.hamiltonian,
        workers=workers,
    )


def cmd_search(config: ScenarioConfig, workers: int = WORKERS) -> Report:
    started = time.perf_counter()
    scenario = resolve_scenario(config)
    result = _run_search(scenario, workers)
    logger.info(f"[SEARCH] maximal supports: {result.supports()}")
    return Report(
        command="search",
        version=__version__,
        config=config.echo(),
        hamiltonianHash=scenario.hamiltonian.content_hash,
        search=result.to_dict(),
        wallTimeSeconds=time.perf_counter() - started,
    )


# ─────────────────────  EVOLVE  ──────────────────────────────────────────────

def _evolve_state(scenario: Scenario, grid: TimeGrid, out_dir: Path, index: int, item: StateItem) -> StateReport:
    state, expect = item
    H, es = scenario.hamiltonian, scenario.eigensystem
    trajectories = functional_trajectories(H.total, state, grid, scenario.k_max, eigensystem=es)
    schmidt = schmidt_trajectory(H.total, state, grid, eigensystem=es)
    von_neumann, linear = entropy_trajectories(H.total, state, grid, eigensystem=es)

    stem = f"state{index:02d}"
    files = {
        "functionals": write_functional_csv(trajectories, out_dir / f"{stem}_functionals.csv").name,
        "schmidt": write_schmidt_csv(schmidt, out_dir / f"{stem}_schmidt.csv").name,
        "entropy": write_entropy_csv(grid.samples, von_neumann, linear, out_dir / f"{stem}_entropy.csv").name,
    }
    drifts = [{"k": t.k, "drift": t.drift} for t in trajectories]
    # flat trace powers up to n are the GIFE criterion; a lower kMax decides nothing
    is_gife = None
    if scenario.k_max == H.dims.schmidt_rank_bound:
        is_gife = all(d["drift"] <= scenario.config.tolerance for d in drifts)
    failed = _failed(expect, {"isGife": is_gife})
    return StateReport(label=state.label, isGife=is_gife, drift=drifts,
                       expect=expect, failedExpectations=failed, trajectories=files)


def cmd_evolve(config: ScenarioConfig, out_dir: Path, workers: int = WORKERS) -> Report:
    """
    Raises:
        OSError: output directory cannot be created or written.
    """
    started = time.perf_counter()
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    scenario = resolve_scenario(config)
    items = resolve_states(scenario, workers)
    grid = scenario.grid
    with ThreadPoolExecutor(max_workers=max(1, workers)) as executor:
        states = list(executor.map(
            lambda pair: _evolve_state(scenario, grid, out_dir, *pair), enumerate(items)))
    files = sorted(name for s in states for name in s.trajectories.values())
    logger.info(f"[EVOLVE] wrote {len(files)} trajectory files to {out_dir}")
    return Report(
        command="evolve",
        version=__version__,
        config=config.echo(),
        hamiltonianHash=scenario.hamiltonian.content_hash,
        states=states,
        files=files,
        wallTimeSeconds=time.perf_counter() - started,
    )


# ─────────────────────  GENERATE  ────────────────────────────────────────────

def cmd_generate(family: str, params: Dict[str, Any], out_dir: Path) -> Report:
    started = time.perf_counter()
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    instance = build_family(family, params)
    dump_hamiltonian(instance.hamiltonian, out_dir / "hamiltonian.json")
    metadata = out_dir / "metadata.json"
    metadata.write_text(json.dumps(instance.metadata_document(), indent=2), encoding="utf-8")
    logger.info(f"[GENERATE] {family} written to {out_dir}")
    return Report(
        command="generate",
        version=__version__,
        config={"family": family, "params": params},
        hamiltonianHash=instance.hamiltonian.content_hash,
        files=["hamiltonian.json", "metadata.json"],
        wallTimeSeconds=time.perf_counter() - started,
    )
