"""Report records for verification, reduction, localization and selftest runs."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Protocol

import yaml

from clatool.errors import InputError
from clatool.utils import write_text_atomic

FORMATS = ("text", "json", "yaml")


class Report(Protocol):
    def to_dict(self) -> dict[str, Any]: ...

    def render_text(self) -> str: ...


@dataclass
class Witness:
    kind: str
    message: str
    rows: list[int] = field(default_factory=list)


@dataclass
class VerificationReport:
    kind: str
    params: dict[str, Any]
    passed: bool
    rows: int
    checked: int = 0
    violations: int = 0
    witnesses: list[Witness] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)
    degenerate: bool = False

    def add_witness(self, witness: Witness, limit: int) -> None:
        self.violations += 1
        if len(self.witnesses) < limit:
            self.witnesses.append(witness)

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)

    def render_text(self) -> str:
        if self.passed:
            lines = ["PASS"]
        else:
            first = self.witnesses[0].message if self.witnesses else "verification failed"
            lines = [f"FAIL: {first}"]
        params = ", ".join(f"{key}={value}" for key, value in self.params.items())
        lines.append(f"kind: {self.kind} ({params})")
        lines.append(f"rows: {self.rows}")
        lines.append(f"checked: {self.checked}")
        if self.violations:
            lines.append(f"violations: {self.violations}")
            lines.extend(f"  - {witness.message}" for witness in self.witnesses[1:])
            hidden = self.violations - len(self.witnesses)
            if hidden > 0:
                lines.append(f"  ... {hidden} more")
        if self.degenerate:
            lines.append("note: degenerate parameters, condition is vacuous")
        lines.extend(f"warning: {warning}" for warning in self.warnings)
        return "\n".join(lines) + "\n"


@dataclass
class RowVerdict:
    row: int
    deleted: bool
    reason: str = ""


@dataclass
class ReductionReport:
    t: int
    seed: int
    run: int
    input_size: int
    output_size: int
    deletion_order: list[int] = field(default_factory=list)
    verdicts: list[RowVerdict] = field(default_factory=list)
    run_sizes: list[int] = field(default_factory=list)

    @property
    def deleted(self) -> int:
        return self.input_size - self.output_size

    def to_dict(self) -> dict[str, Any]:
        data = asdict(self)
        data["deleted"] = self.deleted
        return data

    def render_text(self) -> str:
        lines = [
            "Reduction report",
            "=" * 40,
            f"strength: {self.t}",
            f"seed: {self.seed}",
            f"run: {self.run}",
            f"input rows: {self.input_size}",
            f"output rows: {self.output_size}",
            f"deleted rows: {self.deleted}",
            "deletion order: " + (" ".join(str(row) for row in self.deletion_order) or "-"),
        ]
        if self.run_sizes:
            sizes = self.run_sizes
            lines.append(
                f"run sizes: {' '.join(str(size) for size in sizes)} "
                f"(min {min(sizes)}, mean {sum(sizes) / len(sizes):.1f}, max {max(sizes)})"
            )
        lines.append("verdicts:")
        for verdict in self.verdicts:
            status = "deleted" if verdict.deleted else "kept"
            suffix = f": {verdict.reason}" if verdict.reason else ""
            lines.append(f"  row {verdict.row}: {status}{suffix}")
        return "\n".join(lines) + "\n"


@dataclass
class PropertyResult:
    name: str
    checked: int = 0
    failures: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures


@dataclass
class SelftestReport:
    models: int
    seed: int
    properties: list[PropertyResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(result.passed for result in self.properties)

    def to_dict(self) -> dict[str, Any]:
        return {
            "models": self.models,
            "seed": self.seed,
            "passed": self.passed,
            "properties": [
                {"name": r.name, "checked": r.checked, "failed": len(r.failures), "failures": r.failures[:20]}
                for r in self.properties
            ],
        }

    def render_text(self) -> str:
        lines = ["Selftest", "=" * 40, f"models: {self.models}", f"seed: {self.seed}"]
        for result in self.properties:
            status = "ok" if result.passed else "FAILED"
            lines.append(f"  {result.name:28s} {result.checked:6d} checked  {status}")
            lines.extend(f"    {failure}" for failure in result.failures[:20])
        lines.append("PASS" if self.passed else "FAIL")
        return "\n".join(lines) + "\n"


def format_report(report: Report, fmt: str) -> str:
    if fmt == "text":
        return report.render_text()
    if fmt == "json":
        return json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n"
    if fmt == "yaml":
        return yaml.safe_dump(report.to_dict(), sort_keys=True)
    raise InputError(f"Unknown report format '{fmt}', expected one of {', '.join(FORMATS)}")


def write_report(path: Path, report: Report, fmt: str = "json") -> None:
    """Write a report file."""
    write_text_atomic(Path(path), format_report(report, fmt))
