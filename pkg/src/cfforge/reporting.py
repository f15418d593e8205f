"""Machine-readable verification/proof/recognition reports."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional

STATUS_PROVED = "proved_symbolic"
STATUS_VERIFIED = "verified_numeric"
STATUS_MISMATCH = "mismatch"
STATUS_UNSUPPORTED = "unsupported"
STATUS_ERROR = "error"

STATUSES = (
    STATUS_PROVED,
    STATUS_VERIFIED,
    STATUS_MISMATCH,
    STATUS_UNSUPPORTED,
    STATUS_ERROR,
)

# Keys always present in serialized reports, in spec order.
_CORE_KEYS = (
    "id",
    "status",
    "series_value",
    "cf_value",
    "closed_form_given",
    "closed_form_derived",
    "abs_err",
    "n_terms",
    "precision_bits",
)


@dataclass
class Report:
    id: str
    status: str
    series_value: Optional[str] = None
    cf_value: Optional[str] = None
    closed_form_given: Optional[str] = None
    closed_form_derived: Optional[str] = None
    abs_err: Optional[str] = None
    n_terms: Optional[int] = None
    precision_bits: int = 0
    detail: Optional[str] = None
    timings: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.status not in STATUSES:
            raise ValueError(f"unknown status {self.status!r}")
        if self.status == STATUS_MISMATCH and self.abs_err is None:
            raise ValueError("mismatch reports must carry abs_err")
        if self.status == STATUS_PROVED and self.closed_form_derived is None:
            raise ValueError("proved_symbolic reports must carry closed_form_derived")

    def to_obj(self, include_timings: bool = False) -> dict:
        obj = {k: getattr(self, k) for k in _CORE_KEYS}
        if self.detail is not None:
            obj["detail"] = self.detail
        if include_timings:
            obj["timings"] = self.timings
        return obj

    def to_json(self, include_timings: bool = False) -> str:
        return json.dumps(
            self.to_obj(include_timings), sort_keys=True, separators=(",", ":")
        )

    @property
    def failing(self) -> bool:
        return self.status in (STATUS_MISMATCH, STATUS_ERROR)
