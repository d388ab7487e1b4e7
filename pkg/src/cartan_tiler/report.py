"""Pass/fail reports produced by the verifiers."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class Report:
    """Ordered collection of named checks, each with a verdict and findings."""

    name: str
    checks: dict[str, bool] = field(default_factory=dict)
    findings: dict[str, list[str]] = field(default_factory=dict)
    stats: dict[str, object] = field(default_factory=dict)

    def check(self, key: str, ok: bool = True, finding: str | None = None, limit: int = 20) -> None:
        prev = self.checks.get(key, True)
        self.checks[key] = prev and bool(ok)
        self.findings.setdefault(key, [])
        if not ok and finding is not None and len(self.findings[key]) < limit:
            self.findings[key].append(finding)

    def fail(self, key: str, finding: str) -> None:
        self.check(key, False, finding)

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def failed_checks(self) -> list[str]:
        return [k for k, v in self.checks.items() if not v]

    def merge(self, other: "Report", prefix: str = "") -> None:
        for k, v in other.checks.items():
            self.check(prefix + k, v)
            for f in other.findings.get(k, []):
                self.findings[prefix + k].append(f)

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "checks": {k: self.checks[k] for k in self.checks},
            "findings": {k: v for k, v in self.findings.items() if v},
            "stats": self.stats,
        }

    def __str__(self) -> str:
        lines = [f"{self.name}: {'PASS' if self.passed else 'FAIL'}"]
        for k, v in self.checks.items():
            lines.append(f"  {k}: {'ok' if v else 'FAIL'}")
            for f in self.findings.get(k, [])[:3]:
                lines.append(f"    - {f}")
        return "\n".join(lines)
