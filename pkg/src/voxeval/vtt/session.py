"""Session state for the rating study: cases, raters, orders, journal.

Ground truth lives only in this process; anything rater-facing is built
from views that omit it.  Every rater sees the cases in a private shuffled
order derived from the session seed and their id, so the sequence is
reproducible without storing it.

Ratings go to an append-only JSONL journal guarded by a lock; replaying
the journal yields the current state with the last record per
(rater, case) winning.  Nothing is ever rewritten in place, which keeps a
human study auditable after the fact.
"""

from __future__ import annotations

import json
import threading
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..errors import OutOfRangeError, ValidationError

PRESENTATIONS = ("slice", "volume")
TRUTH_VALUES = ("real", "synthetic")

# named significance levels for reports
ALPHA_PRESETS = {"default": 0.05, "paper-strict": 0.04}


@dataclass(frozen=True)
class Case:
    case_id: str
    path: str  # volume file on disk (.nii/.nii.gz/.raw)
    truth: str
    presentation: str
    intensity_kind: str = "HU"
    slice_axis: int = 2
    slice_index: int | None = None  # None: middle slice

    def __post_init__(self) -> None:
        if self.truth not in TRUTH_VALUES:
            raise ValidationError(f"truth must be one of {TRUTH_VALUES}, got {self.truth!r}")
        if self.presentation not in PRESENTATIONS:
            raise ValidationError(
                f"presentation must be one of {PRESENTATIONS}, got {self.presentation!r}"
            )
        if not 0 <= self.slice_axis <= 2:
            raise ValidationError(f"slice_axis must be 0..2, got {self.slice_axis}")


@dataclass(frozen=True)
class Rater:
    rater_id: str
    years_practice: float = 0.0
    synthetic_data_experience: bool = False


@dataclass(frozen=True)
class RatingRecord:
    rater_id: str
    case_id: str
    score: int
    presentation: str
    timestamp: float

    def to_json_obj(self) -> dict:
        return {
            "rater_id": self.rater_id,
            "case_id": self.case_id,
            "score": self.score,
            "presentation": self.presentation,
            "timestamp": self.timestamp,
        }


@dataclass
class VttSession:
    session_id: str
    seed: int
    cases: tuple[Case, ...]
    raters: tuple[Rater, ...]
    admin_token: str = ""

    def __post_init__(self) -> None:
        ids = [c.case_id for c in self.cases]
        if len(set(ids)) != len(ids):
            raise ValidationError("duplicate case ids")
        rids = [r.rater_id for r in self.raters]
        if len(set(rids)) != len(rids):
            raise ValidationError("duplicate rater ids")
        self._by_case = {c.case_id: c for c in self.cases}
        self._by_rater = {r.rater_id: r for r in self.raters}

    def case(self, case_id: str) -> Case:
        try:
            return self._by_case[case_id]
        except KeyError:
            raise ValidationError(f"unknown case {case_id!r}") from None

    def rater(self, rater_id: str) -> Rater:
        try:
            return self._by_rater[rater_id]
        except KeyError:
            raise ValidationError(f"unknown rater {rater_id!r}") from None

    def order_for(self, rater_id: str) -> list[str]:
        """Deterministic per-rater case order: seeded by (seed, rater id)."""
        self.rater(rater_id)
        rng = np.random.default_rng([self.seed, *rater_id.encode("utf-8")])
        order = rng.permutation(len(self.cases))
        return [self.cases[i].case_id for i in order]


def load_session(path: str | Path) -> VttSession:
    """Build a session from its JSON description file.

    Relative case paths resolve against the JSON file's directory.
    """
    p = Path(path)
    with open(p, "r", encoding="utf-8") as fh:
        obj = json.load(fh)
    base = p.parent
    cases = []
    for c in obj["cases"]:
        case_path = Path(c["path"])
        if not case_path.is_absolute():
            case_path = base / case_path
        cases.append(
            Case(
                case_id=str(c["case_id"]),
                path=str(case_path),
                truth=c["truth"],
                presentation=c.get("presentation", "slice"),
                intensity_kind=c.get("intensity_kind", "HU"),
                slice_axis=int(c.get("slice_axis", 2)),
                slice_index=c.get("slice_index"),
            )
        )
    raters = [
        Rater(
            rater_id=str(r["rater_id"]),
            years_practice=float(r.get("years_practice", 0.0)),
            synthetic_data_experience=bool(r.get("synthetic_data_experience", False)),
        )
        for r in obj["raters"]
    ]
    return VttSession(
        session_id=str(obj["session_id"]),
        seed=int(obj["seed"]),
        cases=tuple(cases),
        raters=tuple(raters),
        admin_token=str(obj.get("admin_token", "")),
    )


class RatingJournal:
    """Append-only JSONL store; last record per (rater, case) wins.

    Writes serialize through a lock (single-writer journal); reads build a
    snapshot dict and never block writers beyond the append itself.
    """

    def __init__(self, path: str | Path) -> None:
        self.path = Path(path)
        self._lock = threading.Lock()
        self.path.parent.mkdir(parents=True, exist_ok=True)

    def append(self, record: RatingRecord) -> None:
        line = json.dumps(record.to_json_obj(), sort_keys=True)
        with self._lock:
            with open(self.path, "a", encoding="utf-8") as fh:
                fh.write(line + "\n")
                fh.flush()

    def snapshot(self) -> dict[tuple[str, str], RatingRecord]:
        if not self.path.exists():
            return {}
        out: dict[tuple[str, str], RatingRecord] = {}
        with open(self.path, "r", encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                obj = json.loads(line)
                rec = RatingRecord(
                    rater_id=obj["rater_id"],
                    case_id=obj["case_id"],
                    score=int(obj["score"]),
                    presentation=obj["presentation"],
                    timestamp=float(obj["timestamp"]),
                )
                out[(rec.rater_id, rec.case_id)] = rec
        return out


def submit_rating(
    session: VttSession,
    journal: RatingJournal,
    rater_id: str,
    case_id: str,
    score: int,
    timestamp: float | None = None,
) -> RatingRecord:
    """Validate and journal one rating; resubmission replaces the old one."""
    case = session.case(case_id)
    session.rater(rater_id)
    s = int(score)
    if s != score or not 1 <= s <= 10:
        raise OutOfRangeError(f"score must be an integer in [1, 10], got {score!r}")
    rec = RatingRecord(
        rater_id=rater_id,
        case_id=case_id,
        score=s,
        presentation=case.presentation,
        timestamp=time.time() if timestamp is None else float(timestamp),
    )
    journal.append(rec)
    return rec


def next_case_for(
    session: VttSession, records: dict[tuple[str, str], RatingRecord], rater_id: str
) -> tuple[Case | None, int, int]:
    """(next unrated case or None, number done, total) for one rater."""
    order = session.order_for(rater_id)
    done = sum(1 for cid in order if (rater_id, cid) in records)
    for cid in order:
        if (rater_id, cid) not in records:
            return session.case(cid), done, len(order)
    return None, done, len(order)
