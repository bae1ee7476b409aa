"""Per-run measurements: call counts and wall-clock totals."""
from __future__ import annotations

import time
from dataclasses import dataclass, field

CSV_HEADER = ("Name", "Size", "Time", "TVT", "TVC", "MVT", "TST", "TSC", "MST", "Outcome", "Mode")


@dataclass(frozen=True)
class VerifCall:
    seconds: float
    label: str


@dataclass(frozen=True)
class SynthCall:
    seconds: float
    examples: int


@dataclass
class RunStats:
    name: str = ""
    mode: str = "hanoi"
    flags: tuple[str, ...] = ()
    size: int | None = None
    outcome: str = ""
    verify_calls: list[VerifCall] = field(default_factory=list)
    synth_calls: list[SynthCall] = field(default_factory=list)
    cache_hits: int = 0
    started: float = field(default_factory=time.perf_counter)
    finished: float | None = None

    def record_verify(self, seconds: float, label: str = "verify") -> None:
        self.verify_calls.append(VerifCall(seconds, label))

    def record_synth(self, seconds: float, examples: int = 0) -> None:
        self.synth_calls.append(SynthCall(seconds, examples))

    def finish(self, outcome: str, size: int | None = None) -> None:
        self.finished = time.perf_counter()
        self.outcome = outcome
        self.size = size

    @property
    def time(self) -> float:
        end = self.finished if self.finished is not None else time.perf_counter()
        return end - self.started

    @property
    def tvt(self) -> float:
        return sum(c.seconds for c in self.verify_calls)

    @property
    def tvc(self) -> int:
        return len(self.verify_calls)

    @property
    def mvt(self) -> float:
        return self.tvt / self.tvc if self.tvc else 0.0

    @property
    def tst(self) -> float:
        return sum(c.seconds for c in self.synth_calls)

    @property
    def tsc(self) -> int:
        return len(self.synth_calls)

    @property
    def mst(self) -> float:
        return self.tst / self.tsc if self.tsc else 0.0

    def row(self) -> dict:
        return {
            "Name": self.name,
            "Size": "" if self.size is None else self.size,
            "Time": self.time,
            "TVT": self.tvt,
            "TVC": self.tvc,
            "MVT": self.mvt,
            "TST": self.tst,
            "TSC": self.tsc,
            "MST": self.mst,
            "Outcome": self.outcome,
            "Mode": self.mode,
        }


def average_rows(runs: list[RunStats]) -> dict:
    """Average repeated runs; the set counts as a timeout if any run timed out."""
    if not runs:
        raise ValueError("no runs to average")
    rows = [r.row() for r in runs]
    out = dict(rows[0])
    for key in ("Time", "TVT", "TVC", "MVT", "TST", "TSC", "MST"):
        out[key] = sum(r[key] for r in rows) / len(rows)
    outcomes = {r["Outcome"] for r in rows}
    if "Timeout" in outcomes:
        out["Outcome"] = "Timeout"
    elif len(outcomes) > 1:
        out["Outcome"] = "/".join(sorted(outcomes))
    return out


def format_row(row: dict) -> list[str]:
    out = []
    for key in CSV_HEADER:
        v = row[key]
        if key in ("Size", "TVC", "TSC") and isinstance(v, float):
            out.append(str(int(v)) if v.is_integer() else f"{v:.1f}")
        elif isinstance(v, float):
            out.append(f"{v:.4f}")
        else:
            out.append(str(v))
    return out
