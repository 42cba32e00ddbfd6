"""Study summary: accuracy, agreement, and significance over a session.

All statistics run on an immutable snapshot of the journal.  Agreement
(kappa) per presentation mode uses only cases rated by every rater, since
the table requires a constant rating count per case.  Degenerate test
inputs are reported as such instead of aborting the whole report.
"""

from __future__ import annotations

import numpy as np

from ..errors import DegenerateSampleError, InsufficientDataError
from .session import ALPHA_PRESETS, RatingRecord, VttSession
from .stats import REAL, SYNTHETIC, binarize, fleiss_kappa, mann_whitney_u, welch_t_test

EXPERIENCE_YEARS_SPLIT = 10.0


def _test_block(a: list[float], b: list[float], alpha: float) -> dict:
    """Welch t and Mann-Whitney U comparing two samples, fault-tolerant."""
    out: dict = {"n_a": len(a), "n_b": len(b)}
    try:
        t = welch_t_test(a, b)
        out["welch_t"] = {
            "t": t.t,
            "p": t.p,
            "df": t.df,
            "significant": bool(t.p < alpha),
        }
    except (DegenerateSampleError, InsufficientDataError) as exc:
        out["welch_t"] = {"error": str(exc)}
    try:
        u = mann_whitney_u(a, b)
        out["mann_whitney"] = {
            "u": u.u,
            "p": u.p,
            "method": u.method,
            "significant": bool(u.p < alpha),
        }
    except (DegenerateSampleError, InsufficientDataError) as exc:
        out["mann_whitney"] = {"error": str(exc)}
    return out


def _kappa_block(
    session: VttSession,
    records: dict[tuple[str, str], RatingRecord],
    presentation: str,
) -> dict:
    case_ids = [c.case_id for c in session.cases if c.presentation == presentation]
    rater_ids = [r.rater_id for r in session.raters]
    complete = [
        cid for cid in case_ids if all((rid, cid) in records for rid in rater_ids)
    ]
    if len(rater_ids) < 2 or not complete:
        return {
            "presentation": presentation,
            "n_cases": len(complete),
            "kappa": None,
            "note": "needs >= 2 raters and >= 1 fully rated case",
        }
    table = np.zeros((len(complete), 2), dtype=np.int64)
    for i, cid in enumerate(complete):
        for rid in rater_ids:
            cls = binarize(records[(rid, cid)].score)
            table[i, 0 if cls == REAL else 1] += 1
    res = fleiss_kappa(table)
    return {
        "presentation": presentation,
        "n_cases": len(complete),
        "kappa": res.kappa,
        "degenerate": res.degenerate,
    }


def session_report(
    session: VttSession,
    records: dict[tuple[str, str], RatingRecord],
    alpha: float | str = "default",
) -> dict:
    """Full study summary as a JSON-ready dict; truth is allowed here."""
    if isinstance(alpha, str):
        alpha = ALPHA_PRESETS[alpha]
    alpha = float(alpha)

    truth_of = {c.case_id: c.truth for c in session.cases}
    raters = []
    for r in session.raters:
        scored = [
            (cid, records[(r.rater_id, cid)].score)
            for cid in truth_of
            if (r.rater_id, cid) in records
        ]
        n_total = len(session.cases)
        correct = sum(1 for cid, s in scored if binarize(s) == truth_of[cid])
        by_truth = {REAL: [], SYNTHETIC: []}
        for cid, s in scored:
            by_truth[truth_of[cid]].append(s)
        raters.append(
            {
                "rater_id": r.rater_id,
                "years_practice": r.years_practice,
                "synthetic_data_experience": r.synthetic_data_experience,
                "n_rated": len(scored),
                "complete": len(scored) == n_total,
                "accuracy": correct / len(scored) if scored else None,
                "mean_score_real": (
                    float(np.mean(by_truth[REAL])) if by_truth[REAL] else None
                ),
                "mean_score_synthetic": (
                    float(np.mean(by_truth[SYNTHETIC])) if by_truth[SYNTHETIC] else None
                ),
            }
        )

    real_scores: list[float] = []
    synth_scores: list[float] = []
    for (rid, cid), rec in records.items():
        if cid not in truth_of:
            continue
        (real_scores if truth_of[cid] == REAL else synth_scores).append(float(rec.score))

    exp_acc = [
        r["accuracy"]
        for r in raters
        if r["accuracy"] is not None and r["years_practice"] > EXPERIENCE_YEARS_SPLIT
    ]
    novice_acc = [
        r["accuracy"]
        for r in raters
        if r["accuracy"] is not None and r["years_practice"] <= EXPERIENCE_YEARS_SPLIT
    ]

    return {
        "session_id": session.session_id,
        "alpha": alpha,
        "n_cases": len(session.cases),
        "n_raters": len(session.raters),
        "n_ratings": len(records),
        "raters": raters,
        "incomplete_raters": [r["rater_id"] for r in raters if not r["complete"]],
        "kappa_by_presentation": [
            _kappa_block(session, records, mode) for mode in ("slice", "volume")
        ],
        "scores_real_vs_synthetic": _test_block(real_scores, synth_scores, alpha),
        "experience_split": {
            "years_threshold": EXPERIENCE_YEARS_SPLIT,
            "accuracy_experienced": exp_acc,
            "accuracy_rest": novice_acc,
            "tests": _test_block(exp_acc, novice_acc, alpha),
        },
    }


def ratings_csv(records: dict[tuple[str, str], RatingRecord]) -> str:
    """CSV export, one row per surviving (rater, case) record."""
    lines = ["rater,case,score,mode,timestamp"]
    for rec in sorted(records.values(), key=lambda r: (r.rater_id, r.case_id)):
        lines.append(
            f"{rec.rater_id},{rec.case_id},{rec.score},{rec.presentation},{rec.timestamp!r}"
        )
    return "\n".join(lines) + "\n"
