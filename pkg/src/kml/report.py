"""Machine-readable verification reports.

A report is a suite name plus a list of check records sorted by check
id.  Serialization is deterministic: keys are sorted, wall-clock data is
omitted unless explicitly requested, and the CSV next to the JSON holds
one delimited row per check.
"""

import csv
import io as _io
import json
from dataclasses import dataclass, field
from typing import List, Mapping, Optional, Sequence

from . import __version__

SCHEMA = "kml-report/1"
PASS = "pass"
FAIL = "fail"
NON_VERDICT = "non-verdict"


@dataclass(frozen=True)
class CheckRecord:
    check: str
    verdict: str
    parameters: Mapping = field(default_factory=dict)
    window: Optional[int] = None
    witness: Optional[Mapping] = None
    seconds: Optional[float] = None

    def __post_init__(self) -> None:
        if self.verdict not in (PASS, FAIL, NON_VERDICT):
            raise ValueError(f"unknown verdict {self.verdict!r}")
        if self.verdict == FAIL and not self.witness:
            raise ValueError("a failing check must carry a witness")

    def to_dict(self, timings: bool = False) -> dict:
        doc = {
            "check": self.check,
            "verdict": self.verdict,
            "parameters": dict(self.parameters),
        }
        if self.window is not None:
            doc["window"] = self.window
        if self.witness is not None:
            doc["witness"] = self.witness
        if timings and self.seconds is not None:
            doc["seconds"] = round(self.seconds, 6)
        return doc


def record(check: str, ok: bool, parameters: Optional[Mapping] = None,
           window: Optional[int] = None, witness: Optional[Mapping] = None,
           seconds: Optional[float] = None) -> CheckRecord:
    """Pass/fail record; failing records keep the witness they were given."""
    return CheckRecord(check, PASS if ok else FAIL, parameters or {},
                       window, witness, seconds)


def non_verdict(check: str, reason: str, parameters: Optional[Mapping] = None,
                window: Optional[int] = None,
                seconds: Optional[float] = None) -> CheckRecord:
    return CheckRecord(check, NON_VERDICT, parameters or {}, window,
                       {"reason": reason}, seconds)


@dataclass
class Report:
    suite: str
    records: List[CheckRecord]
    seed: Optional[int] = None

    def sorted_records(self) -> List[CheckRecord]:
        return sorted(self.records, key=lambda r: r.check)

    def counts(self) -> dict:
        out = {PASS: 0, FAIL: 0, NON_VERDICT: 0}
        for r in self.records:
            out[r.verdict] += 1
        return out

    def exit_code(self, allow_non_verdict: bool = False) -> int:
        counts = self.counts()
        if counts[FAIL]:
            return 1
        if counts[NON_VERDICT] and not allow_non_verdict:
            return 1
        return 0

    def to_dict(self, timings: bool = False) -> dict:
        return {
            "schema": SCHEMA,
            "tool": f"kml {__version__}",
            "suite": self.suite,
            "seed": self.seed,
            "counts": self.counts(),
            "results": [r.to_dict(timings) for r in self.sorted_records()],
        }

    def to_json(self, timings: bool = False) -> str:
        return json.dumps(self.to_dict(timings), indent=2, sort_keys=True) + "\n"

    def to_csv(self) -> str:
        buf = _io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["check", "verdict", "window", "parameters", "witness"])
        for r in self.sorted_records():
            writer.writerow([
                r.check,
                r.verdict,
                "" if r.window is None else r.window,
                json.dumps(dict(r.parameters), sort_keys=True),
                "" if r.witness is None else json.dumps(r.witness, sort_keys=True),
            ])
        return buf.getvalue()

    def write(self, path: str, timings: bool = False) -> List[str]:
        """Write the JSON report and the delimited table next to it."""
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.to_json(timings))
        csv_path = (path[:-5] if path.endswith(".json") else path) + ".csv"
        with open(csv_path, "w", encoding="utf-8") as fh:
            fh.write(self.to_csv())
        return [path, csv_path]


def merge(suite: str, reports: Sequence[Report],
          seed: Optional[int] = None) -> Report:
    records: List[CheckRecord] = []
    for rep in reports:
        records.extend(rep.records)
    return Report(suite, records, seed)
