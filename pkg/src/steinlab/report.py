"""Verification report values and their serialization."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

SCHEMA_VERSION = 1


def _plain(value):
    """Convert tuples, frozensets and numpy scalars into JSON-friendly values."""
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, (set, frozenset)):
        return sorted((_plain(v) for v in value), key=repr)
    if hasattr(value, "to_dict"):
        return _plain(value.to_dict())
    if hasattr(value, "item") and not isinstance(value, (str, bytes)):
        return value.item()
    if isinstance(value, (str, int, float, bool)) or value is None:
        return value
    return repr(value)


@dataclass
class Check:
    name: str
    status: str = "pass"  # pass | fail | skipped
    instances: int = 0
    counterexample: object = None
    reason: str | None = None

    @classmethod
    def from_failures(cls, name, instances, failures):
        if failures:
            return cls(name, "fail", instances, counterexample=failures[0])
        return cls(name, "pass", instances)

    @classmethod
    def skipped(cls, name, reason):
        return cls(name, "skipped", 0, reason=reason)

    @property
    def ok(self):
        return self.status != "fail"

    def to_dict(self):
        out = {"name": self.name, "status": self.status, "instances": self.instances}
        if self.status == "fail":
            out["counterexample"] = _plain(self.counterexample)
        if self.status == "skipped":
            out["reason"] = self.reason
        return out


@dataclass
class VerificationReport:
    """Outcome of one battery on one instance set."""

    suite: str
    instance: dict = field(default_factory=dict)
    checks: list = field(default_factory=list)
    seed: int | None = None
    data: dict = field(default_factory=dict)
    timing: float | None = None  # kept out of the JSON so reports stay byte-stable

    def add(self, check: Check):
        self.checks.append(check)
        return check

    def extend(self, checks):
        self.checks.extend(checks)

    @property
    def status(self):
        if any(c.status == "fail" for c in self.checks):
            return "fail"
        if self.checks and all(c.status == "skipped" for c in self.checks):
            return "skipped"
        return "pass"

    @property
    def ok(self):
        return self.status != "fail"

    def failures(self):
        return [c for c in self.checks if c.status == "fail"]

    def check(self, name):
        return next(c for c in self.checks if c.name == name)

    def to_dict(self):
        out = {"suite": self.suite, "status": self.status,
               "instance": _plain(self.instance),
               "checks": [c.to_dict() for c in self.checks]}
        if self.seed is not None:
            out["seed"] = self.seed
        if self.data:
            out["data"] = _plain(self.data)
        return out


@dataclass
class RunReport:
    suites: list = field(default_factory=list)

    @property
    def ok(self):
        return all(s.ok for s in self.suites)

    def to_dict(self):
        return {"version": SCHEMA_VERSION, "suites": [s.to_dict() for s in self.suites]}


def emit_report(report, fmt: str = "json") -> bytes:
    if isinstance(report, VerificationReport):
        report = RunReport([report])
    if fmt == "json":
        return json.dumps(report.to_dict(), separators=(",", ":")).encode()
    if fmt == "text":
        lines = []
        for s in report.suites:
            lines.append(f"[{s.status.upper()}] {s.suite} {json.dumps(_plain(s.instance), separators=(',', ':'))}")
            for c in s.checks:
                extra = ""
                if c.status == "fail":
                    extra = f" counterexample={json.dumps(_plain(c.counterexample))}"
                elif c.status == "skipped":
                    extra = f" reason={c.reason}"
                lines.append(f"  {c.status:7s} {c.name} ({c.instances}){extra}")
        lines.append("OK" if report.ok else "FAILED")
        return ("\n".join(lines) + "\n").encode()
    raise ValueError(f"unknown report format {fmt!r}")
