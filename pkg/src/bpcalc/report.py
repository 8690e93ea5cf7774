"""Check records and reports shared by the verification pipelines and the CLI.

A report is a deterministic, ordered list of check records.  Identical
invocations produce identical reports; wall-clock timings are isolated in
the ``runtime_ms`` field of each record and the ``timing`` header, which
consumers strip when comparing bytes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

SCHEMA_VERSION = "bpcalc-report/1"


@dataclass
class CheckRecord:
    id: str
    anchor: str  # the identity or statement being verified, verbatim
    status: bool
    expected: str = ""
    computed: str = ""
    modulus: str = ""
    witness: str = ""
    note: str = ""
    runtime_ms: int = 0

    def as_dict(self, timing=True):
        d = {
            "id": self.id,
            "anchor": self.anchor,
            "status": "pass" if self.status else "fail",
            "expected": self.expected,
            "computed": self.computed,
            "modulus": self.modulus,
            "witness": self.witness,
            "note": self.note,
        }
        if timing:
            d["runtime_ms"] = self.runtime_ms
        return d


@dataclass
class Report:
    title: str
    config: dict = field(default_factory=dict)
    records: list = field(default_factory=list)
    tool_version: str = ""

    def __post_init__(self):
        if not self.tool_version:
            from . import __version__

            self.tool_version = __version__

    def add(self, record: CheckRecord):
        self.records.append(record)
        return record

    def check(self, id, anchor, status, **kw):
        return self.add(CheckRecord(id=id, anchor=anchor, status=bool(status), **kw))

    def extend(self, other: "Report", prefix: str = ""):
        for rec in other.records:
            copy = CheckRecord(**{**rec.__dict__})
            if prefix:
                copy.id = f"{prefix}.{copy.id}"
            self.records.append(copy)

    @property
    def passed(self) -> bool:
        return all(r.status for r in self.records)

    def failures(self):
        return [r for r in self.records if not r.status]

    def as_dict(self, timing=True):
        return {
            "schema": SCHEMA_VERSION,
            "tool_version": self.tool_version,
            "title": self.title,
            "config": dict(self.config),
            "status": "pass" if self.passed else "fail",
            "checks": [r.as_dict(timing=timing) for r in self.records],
        }

    def to_json(self, timing=True) -> str:
        return json.dumps(self.as_dict(timing=timing), indent=2, sort_keys=False)

    @classmethod
    def from_json(cls, text: str) -> "Report":
        data = json.loads(text)
        report = cls(
            title=data["title"],
            config=data.get("config", {}),
            tool_version=data.get("tool_version", ""),
        )
        for c in data.get("checks", []):
            report.add(
                CheckRecord(
                    id=c["id"],
                    anchor=c.get("anchor", ""),
                    status=c.get("status") == "pass",
                    expected=c.get("expected", ""),
                    computed=c.get("computed", ""),
                    modulus=c.get("modulus", ""),
                    witness=c.get("witness", ""),
                    note=c.get("note", ""),
                    runtime_ms=c.get("runtime_ms", 0),
                )
            )
        return report

    def to_text(self, timing=True) -> str:
        lines = [
            f"report: {self.title}",
            f"tool:   bpcalc {self.tool_version}",
            f"config: " + ", ".join(f"{k}={v}" for k, v in sorted(self.config.items())),
            f"status: {'PASS' if self.passed else 'FAIL'}",
            "",
        ]
        width = max((len(r.id) for r in self.records), default=4)
        for r in self.records:
            mark = "ok " if r.status else "FAIL"
            line = f"  [{mark}] {r.id.ljust(width)}  {r.anchor}"
            lines.append(line)
            if r.expected or r.computed:
                lines.append(f"         expected: {r.expected}")
                lines.append(f"         computed: {r.computed}")
            if r.modulus:
                lines.append(f"         modulus:  {r.modulus}")
            if r.witness:
                lines.append(f"         witness:  {r.witness}")
            if r.note:
                lines.append(f"         note:     {r.note}")
        return "\n".join(lines) + "\n"
