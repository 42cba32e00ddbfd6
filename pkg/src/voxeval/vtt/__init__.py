"""Rating-study backend: sessions, statistics, rendering, HTTP service."""

from .render import default_window_level, render_slice_png, slice_array
from .report import ratings_csv, session_report
from .session import (
    ALPHA_PRESETS,
    Case,
    Rater,
    RatingJournal,
    RatingRecord,
    VttSession,
    load_session,
    next_case_for,
    submit_rating,
)
from .stats import (
    EXACT_U_LIMIT,
    REAL,
    SYNTHETIC,
    FleissKappaResult,
    TTestResult,
    UTestResult,
    binarize,
    fleiss_kappa,
    mann_whitney_u,
    welch_t_test,
)

__all__ = [
    "ALPHA_PRESETS",
    "EXACT_U_LIMIT",
    "REAL",
    "SYNTHETIC",
    "Case",
    "FleissKappaResult",
    "Rater",
    "RatingJournal",
    "RatingRecord",
    "TTestResult",
    "UTestResult",
    "VttSession",
    "binarize",
    "default_window_level",
    "fleiss_kappa",
    "load_session",
    "mann_whitney_u",
    "next_case_for",
    "ratings_csv",
    "render_slice_png",
    "session_report",
    "slice_array",
    "submit_rating",
    "welch_t_test",
]
