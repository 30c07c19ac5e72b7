"""
Report models and rendering.
"""

from pathlib import Path
from typing import Any, Dict, List, Optional

from pydantic import BaseModel


class StateReport(BaseModel):
    label: str
    isIfe: Optional[bool] = None
    isGife: Optional[bool] = None
    isProperGife: Optional[bool] = None
    ifeAlgebraic: Optional[Dict[str, Any]] = None
    ifeDynamic: Optional[Dict[str, Any]] = None
    gifeDynamic: Optional[Dict[str, Any]] = None
    gifeAlgebraic: Optional[Dict[str, Any]] = None
    verdictsAgree: Optional[bool] = None
    drift: Optional[List[Dict[str, Any]]] = None
    expect: Dict[str, bool] = {}
    failedExpectations: List[str] = []
    trajectories: Dict[str, str] = {}


class Report(BaseModel):
    command: str
    version: str
    config: Dict[str, Any] = {}
    hamiltonianHash: Optional[str] = None
    states: List[StateReport] = []
    dfs: List[Dict[str, Any]] = []
    search: Optional[Dict[str, Any]] = None
    files: List[str] = []
    wallTimeSeconds: float = 0.0

    @property
    def ok(self) -> bool:
        return not any(s.failedExpectations for s in self.states)

    def exit_code(self) -> int:
        return 0 if self.ok else 1


def write_report(report: Report, out_dir: Path) -> Path:
    path = Path(out_dir) / "report.json"
    path.write_text(report.model_dump_json(indent=2), encoding="utf-8")
    return path


def _flag(value: Optional[bool]) -> str:
    if value is None:
        return "-"
    return "yes" if value else "no"


def render_text(report: Report) -> str:
    lines = [f"ifelab {report.version} · {report.command} · {report.wallTimeSeconds:.3f}s"]
    if report.hamiltonianHash:
        lines.append(f"hamiltonian {report.hamiltonianHash[:12]}")

    if report.states:
        lines.append("")
        lines.append(f"{'state':<28} {'IFE':>4} {'GIFE':>5} {'proper':>7} {'max drift':>11}  failed")
        for s in report.states:
            drifts = [d["drift"] for d in (s.drift or (s.gifeDynamic or {}).get("maxDrift", []))]
            worst = f"{max(drifts):.2e}" if drifts else "-"
            failed = ",".join(s.failedExpectations) or "-"
            lines.append(f"{s.label[:28]:<28} {_flag(s.isIfe):>4} {_flag(s.isGife):>5} "
                         f"{_flag(s.isProperGife):>7} {worst:>11}  {failed}")

    for i, verdict in enumerate(report.dfs):
        lines.append(f"dfs[{i}] {'yes' if verdict['isDfs'] else 'no'} "
                     f"(max residual {max(verdict['residuals'], default=0.0):.2e})")

    if report.search is not None:
        lines.append("")
        lines.append("maximal GIFE supports:")
        for pattern in report.search["maximalSupports"]:
            lines.append(f"  {pattern['support']}  residual {pattern['maxResidual']:.2e}  "
                         f"proper {_flag(pattern['isProperGife'])}")

    for name in report.files:
        lines.append(f"wrote {name}")
    lines.append("OK" if report.ok else "FAILED")
    return "\n".join(lines)
