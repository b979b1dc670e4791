from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Mapping, Optional, Tuple


@dataclass(frozen=True)
class EstimatorReport:
    """Point estimate, biases, MSEs and PRE of one estimator."""

    estimator: str
    point: Optional[float] = None
    bias1: Optional[float] = None
    mse1: Optional[float] = None
    bias2: Optional[float] = None
    mse2: Optional[float] = None
    pre: Optional[float] = None
    note: str = ""


class ToleranceClass(Enum):
    MATCH = "match"
    LOOSE = "loose"
    DISCREPANCY = "discrepancy"
    INFO = "info"


class ReproductionStatus(Enum):
    MATCH = "match"
    LOOSE_MATCH = "loose-match"
    DOCUMENTED_DISCREPANCY = "documented-discrepancy"
    MISMATCH = "mismatch"
    COMPUTED_ONLY = "computed-only"


@dataclass(frozen=True)
class CellTolerance:
    """Tolerance class of one cell; ``absolute`` compares differences instead of ratios."""

    tolerance_class: ToleranceClass
    tolerance: float = 0.0
    note: str = ""
    absolute: bool = False


@dataclass(frozen=True)
class ReproductionRow:
    """One table cell: printed value against the computed one."""

    cell_id: str
    paper_value: Optional[float]
    computed_value: float
    rel_residual: Optional[float]
    status: ReproductionStatus
    tolerance: float = 0.0
    note: str = ""

    @property
    def failed(self) -> bool:
        return self.status is ReproductionStatus.MISMATCH


@dataclass(frozen=True)
class ReproductionReport:
    table_id: str
    rows: Tuple[ReproductionRow, ...]
    tolerance_profile: str
    notes: Tuple[str, ...] = ()

    @property
    def failures(self) -> List[ReproductionRow]:
        return [row for row in self.rows if row.failed]

    @property
    def ok(self) -> bool:
        return not self.failures


@dataclass(frozen=True)
class DatasetDescriptor:
    """A builtin dataset with per-constant citations and notes."""

    id: str
    description: str
    payload: Mapping[str, Any]
    citations: Mapping[str, str]
    notes: Mapping[str, str] = field(default_factory=dict)
    calibrated: Tuple[str, ...] = ()

    def rows(self) -> List[Dict[str, Any]]:
        """Flat listing of every constant with its citation and note."""
        listing = []
        for key, value in self.payload.items():
            if isinstance(value, (int, float)):
                listing.append(
                    {
                        "constant": key,
                        "value": value,
                        "citation": self.citations.get(key, ""),
                        "note": self.notes.get(key, ""),
                        "calibrated": key in self.calibrated,
                    }
                )
        return listing
