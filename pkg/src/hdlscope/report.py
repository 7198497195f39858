"""Diagnostic reports shared by every analysis, with dedup and serialization."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field

SEVERITIES = ("error", "warning", "info")


@dataclass(frozen=True)
class Location:
    file: str
    line: int

    @classmethod
    def parse(cls, loc: str | None) -> "Location":
        if not loc:
            return cls("<unknown>", 0)
        file, _, line = loc.rpartition(":")
        if not file or not line.isdigit():
            return cls(loc, 0)
        return cls(file, int(line))

    def __str__(self) -> str:
        return f"{self.file}:{self.line}"


@dataclass(frozen=True)
class Report:
    analysis: str
    category: str
    severity: str
    location: Location
    message: str
    site: str = ""  # IR site: qualified signal or Proc name
    evidence: tuple[str, ...] = ()
    module: str = ""  # module defining the site, for dedup
    subject: str = ""  # instance-path-free name of what is reported

    @property
    def key(self) -> tuple:
        return (self.analysis, self.category, self.module, str(self.location), self.subject)

    def sort_key(self) -> tuple:
        return (self.location.file, self.location.line, self.analysis, self.category,
                self.site, self.message, self.evidence)

    def text(self) -> str:
        return f"{self.location}: {self.severity}: [{self.analysis}/{self.category}] {self.message}"

    def record(self) -> str:
        return json.dumps({
            "analysis": self.analysis,
            "category": self.category,
            "severity": self.severity,
            "file": self.location.file,
            "line": self.location.line,
            "site": self.site,
            "message": self.message,
            "evidence": list(self.evidence),
            "key": "|".join(map(str, self.key)),
        }, sort_keys=True, ensure_ascii=False)


def erase_path(name: str) -> str:
    """Drop the instance path of a qualified signal name."""
    return name.rsplit(".", 1)[-1]


def make_report(analysis: str, category: str, severity: str, loc: str | None, message: str, *,
                site: str = "", evidence=(), module: str = "", subject: str | None = None) -> Report:
    if severity not in SEVERITIES:
        raise ValueError(f"bad severity {severity!r}")
    return Report(analysis, category, severity, Location.parse(loc), message, site,
                  tuple(evidence), module, erase_path(site) if subject is None else subject)


def dedup(reports) -> list[Report]:
    """Keep the first report of every dedup key, then sort deterministically."""
    seen = {}
    for r in reports:
        seen.setdefault(r.key, r)
    return sorted(seen.values(), key=Report.sort_key)


_RESET_TOKEN = re.compile(r"^[asn]?(rst|reset)[nb]?$", re.IGNORECASE)


def looks_like_reset(name: str) -> bool:
    """Naming-convention check: some ``_``-separated token reads rst/reset."""
    return any(_RESET_TOKEN.match(t) for t in erase_path(name).split("_"))


@dataclass
class ReportSet:
    """Minimal result type for analyses whose only product is a list of reports."""

    reports: list[Report] = field(default_factory=list)

    def dump(self):
        for r in self.reports:
            yield r.text()
