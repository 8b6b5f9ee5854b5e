"""Named verification checks collected into a serializable report."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import IoError

_FMT = "%.17g"


@dataclass(frozen=True)
class ReportCheck:
    """One named check: passes iff ``max_abs_error <= tolerance``."""

    name: str
    max_abs_error: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return math.isfinite(self.max_abs_error) and self.max_abs_error <= self.tolerance


@dataclass
class VerificationReport:
    checks: list[ReportCheck] = field(default_factory=list)

    def add(self, name: str, max_abs_error: float, tolerance: float) -> ReportCheck:
        check = ReportCheck(name, float(max_abs_error), float(tolerance))
        self.checks.append(check)
        return check

    def extend(self, other: "VerificationReport") -> None:
        self.checks.extend(other.checks)

    def scaled(self, factor: float) -> "VerificationReport":
        """Copy with every tolerance multiplied by ``factor``."""
        return VerificationReport(
            [ReportCheck(c.name, c.max_abs_error, c.tolerance * factor)
             for c in self.checks])

    @property
    def all_pass(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list[ReportCheck]:
        return [c for c in self.checks if not c.passed]

    def rows(self) -> list[str]:
        """CSV lines with header ``check_name,max_abs_error,tolerance,pass``."""
        out = ["check_name,max_abs_error,tolerance,pass"]
        for c in self.checks:
            out.append("%s,%s,%s,%s" % (
                c.name, _FMT % c.max_abs_error, _FMT % c.tolerance,
                "true" if c.passed else "false"))
        return out

    def to_csv(self, path) -> None:
        try:
            with open(path, "w", encoding="utf-8", newline="\n") as fh:
                fh.write("\n".join(self.rows()) + "\n")
        except OSError as exc:  # pragma: no cover - environment dependent
            raise IoError(f"cannot write report to {path}: {exc}") from exc
