"""Line-oriented verification reports."""
from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class Failure:
    identity: str
    forest: str
    left: str
    right: str

    def line(self) -> str:
        return f"FAIL\t{self.identity}\t{self.forest}\t{self.left}\t{self.right}"


@dataclass
class Report:
    suite: str
    checks: int = 0
    failures: list[Failure] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)
    seed: int | None = None

    @property
    def ok(self) -> bool:
        return not self.failures

    def check(self, identity: str, forest, left, right) -> bool:
        """Record one exact comparison; returns whether it held."""
        self.checks += 1
        if left == right:
            return True
        self.failures.append(Failure(identity, str(forest), str(left), str(right)))
        return False

    def fail(self, identity: str, forest, left, right="") -> None:
        self.checks += 1
        self.failures.append(Failure(identity, str(forest), str(left), str(right)))

    def note(self, text: str) -> None:
        self.notes.append(text)

    def merge(self, other: "Report") -> "Report":
        self.checks += other.checks
        self.failures.extend(other.failures)
        self.notes.extend(other.notes)
        return self

    def render(self) -> str:
        lines = [f"suite: {self.suite}"]
        if self.seed is not None:
            lines.append(f"seed: {self.seed}")
        lines.append(f"checks: {self.checks}")
        lines.extend(f.line() for f in self.failures)
        lines.extend(f"NOTE\t{n}" for n in self.notes)
        lines.append(f"failures: {len(self.failures)}")
        return "\n".join(lines)
