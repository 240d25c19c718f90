"""ISO 21434 attack-potential risk scoring for camera-pipeline attacks.

Implements the TARA attack-potential method: four core parameters
(knowledge, equipment, window of opportunity, specialist expertise) sum to
an attack-feasibility score, the score is bucketed into a feasibility
rating, and the rating combines with an impact rating into an overall
risk value from 1 to 5. Ships a catalog of published attacks with their
expected ratings so the whole table can be recomputed and validated.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from enum import Enum, IntEnum
from importlib import resources
from pathlib import Path
from typing import Iterable


class RiskDomainError(ValueError):
    """Raised for out-of-range scores or malformed catalog records."""


class ImpactLevel(IntEnum):
    NEGLIGIBLE = 1
    MODERATE = 2
    MAJOR = 3
    SEVERE = 4


class AccuracyTag(Enum):
    TARGETED = "Targeted"
    UNTARGETED = "Untargeted"


class Expertise(Enum):
    """Specialist expertise required by the attacker; value is the
    aggregation score."""

    LAYMAN = 0
    PROFICIENT = 3
    EXPERT = 6
    MULTIPLE_EXPERTS = 8


class Knowledge(Enum):
    """Required knowledge of the attacked item; black-box is the
    least-knowledge case and scores 0."""

    BLACK_BOX = 0
    GRAY_BOX = 5
    WHITE_BOX = 11


class Equipment(Enum):
    STANDARD = 0
    SPECIALIZED = 4
    BESPOKE = 7
    MULTIPLE_BESPOKE = 9


class WindowOfOpportunity(Enum):
    """Attacker-to-victim distance buckets; closer required proximity
    never scores lower. Remote entry (network) scores like the hardest
    bucket since it requires a prior stepping-stone attack."""

    UNDER_100M = ("Under100m", 0)
    UNDER_10M = ("Under10m", 1)
    UNDER_1M = ("Under1m", 4)
    UNDER_HALF_M = ("UnderHalfMeter", 4)
    UNDER_0P1M = ("Under0p1m", 10)
    REMOTE = ("Remote", 10)

    def __init__(self, token: str, score: int):
        self.token = token
        self.score = score


class FeasibilityRating(IntEnum):
    """Ordinal attack-feasibility rating; F in the risk formula."""

    VERY_LOW = 1
    LOW = 2
    MEDIUM = 3
    HIGH = 4


# Inclusive core-parameter-sum ranges per rating; they partition 0..38.
FEASIBILITY_SUM_RANGES: dict[FeasibilityRating, tuple[int, int]] = {
    FeasibilityRating.HIGH: (0, 13),
    FeasibilityRating.MEDIUM: (14, 19),
    FeasibilityRating.LOW: (20, 24),
    FeasibilityRating.VERY_LOW: (25, 38),
}

MAX_FEASIBILITY_SUM = 38

LAYER_NAMES = ("Physical", "Sensor", "DataPreparation", "Application")

# Enum token spellings used by the catalog JSON schema.
_IMPACT_TOKENS = {
    "Negligible": ImpactLevel.NEGLIGIBLE,
    "Moderate": ImpactLevel.MODERATE,
    "Major": ImpactLevel.MAJOR,
    "Severe": ImpactLevel.SEVERE,
}
_ACCURACY_TOKENS = {t.value: t for t in AccuracyTag}
_EXPERTISE_TOKENS = {
    "Layman": Expertise.LAYMAN,
    "Proficient": Expertise.PROFICIENT,
    "Expert": Expertise.EXPERT,
    "MultipleExperts": Expertise.MULTIPLE_EXPERTS,
}
_KNOWLEDGE_TOKENS = {
    "BlackBox": Knowledge.BLACK_BOX,
    "GrayBox": Knowledge.GRAY_BOX,
    "WhiteBox": Knowledge.WHITE_BOX,
}
_EQUIPMENT_TOKENS = {
    "Standard": Equipment.STANDARD,
    "Specialized": Equipment.SPECIALIZED,
    "Bespoke": Equipment.BESPOKE,
    "MultipleBespoke": Equipment.MULTIPLE_BESPOKE,
}
_WOO_TOKENS = {w.token: w for w in WindowOfOpportunity}
_FEASIBILITY_TOKENS = {
    "VeryLow": FeasibilityRating.VERY_LOW,
    "Low": FeasibilityRating.LOW,
    "Medium": FeasibilityRating.MEDIUM,
    "High": FeasibilityRating.HIGH,
}
FEASIBILITY_LABELS = {v: k for k, v in _FEASIBILITY_TOKENS.items()}
IMPACT_LABELS = {v: k for k, v in _IMPACT_TOKENS.items()}


@dataclass(frozen=True)
class AttackRecord:
    """One published attack: layer, entry point, impact sub-ratings, the
    four feasibility core parameters, and the expected ratings."""

    id: str
    layer: str
    entry_point: str
    attack_class: int
    impact_safety: ImpactLevel
    impact_operational: ImpactLevel
    accuracy: AccuracyTag
    impact_overall: ImpactLevel
    knowledge: Knowledge
    equipment: Equipment
    woo: WindowOfOpportunity
    expertise: Expertise
    expected_feasibility: FeasibilityRating
    expected_risk: int

    def __post_init__(self):
        if self.layer not in LAYER_NAMES:
            raise RiskDomainError(f"record {self.id!r}: unknown layer {self.layer!r}")
        if not 1 <= self.attack_class <= 8:
            raise RiskDomainError(
                f"record {self.id!r}: attack_class {self.attack_class} outside 1..8"
            )
        if not 1 <= self.expected_risk <= 5:
            raise RiskDomainError(
                f"record {self.id!r}: expected_risk {self.expected_risk} outside 1..5"
            )


@dataclass(frozen=True)
class RecordEvaluation:
    record: AttackRecord
    computed_sum: int
    computed_feasibility: FeasibilityRating
    computed_risk: int
    feasibility_matches: bool
    risk_matches: bool

    @property
    def matches_expected(self) -> bool:
        return self.feasibility_matches and self.risk_matches


def feasibility_sum(
    knowledge: Knowledge,
    equipment: Equipment,
    woo: WindowOfOpportunity,
    expertise: Expertise,
) -> int:
    """Sum of the four core-parameter scores, in 0..38."""
    return knowledge.value + equipment.value + woo.score + expertise.value


def feasibility_rating(total: int) -> FeasibilityRating:
    """Bucket a core-parameter sum into the feasibility rating.

    High covers 0..13, Medium 14..19, Low 20..24, Very Low 25..38.
    """
    if not isinstance(total, int) or isinstance(total, bool):
        raise RiskDomainError(f"feasibility sum must be an integer, got {total!r}")
    if not 0 <= total <= MAX_FEASIBILITY_SUM:
        raise RiskDomainError(
            f"feasibility sum {total} outside 0..{MAX_FEASIBILITY_SUM}"
        )
    for rating, (lo, hi) in FEASIBILITY_SUM_RANGES.items():
        if lo <= total <= hi:
            return rating
    raise AssertionError("sum ranges must partition 0..38")


def _round_half_away_from_zero(x: float) -> int:
    # round() half-to-even would give Moderate x High = 2, contradicting
    # the published matrix cell of 3.
    return int(math.floor(x + 0.5)) if x >= 0 else -int(math.floor(-x + 0.5))


def risk(impact: ImpactLevel, feasibility: FeasibilityRating) -> int:
    """Overall risk value in 1..5 from impact (1..4) and feasibility (1..4).

    R = max(round(I*F/(4*4)*5), 1), rounding half away from zero.
    """
    i, f = int(impact), int(feasibility)
    if not (1 <= i <= 4 and 1 <= f <= 4):
        raise RiskDomainError(f"impact {i} / feasibility {f} outside 1..4")
    return max(_round_half_away_from_zero(i * f / 16.0 * 5.0), 1)


def risk_matrix() -> list[list[int]]:
    """4x4 risk table; cell [I-1][F-1] = risk(I, F)."""
    return [
        [risk(ImpactLevel(i), FeasibilityRating(f)) for f in range(1, 5)]
        for i in range(1, 5)
    ]


def evaluate_record(record: AttackRecord) -> RecordEvaluation:
    """Recompute feasibility and risk for one record and compare with the
    stored expected values. Mismatches are reported, never raised."""
    total = feasibility_sum(
        record.knowledge, record.equipment, record.woo, record.expertise
    )
    feas = feasibility_rating(total)
    value = risk(record.impact_overall, feas)
    return RecordEvaluation(
        record=record,
        computed_sum=total,
        computed_feasibility=feas,
        computed_risk=value,
        feasibility_matches=feas == record.expected_feasibility,
        risk_matches=value == record.expected_risk,
    )


def evaluate_catalog(records: Iterable[AttackRecord]) -> list[RecordEvaluation]:
    return [evaluate_record(r) for r in records]


def suggest_overall_impact(
    safety: ImpactLevel, operational: ImpactLevel, accuracy: AccuracyTag
) -> ImpactLevel:
    """Heuristic for flagging suspicious overall-impact entries.

    max(safety, operational), bumped one level for targeted attacks. This
    is advisory only: several published rows disagree with any simple
    rule, so stored impact_overall data is never overridden.
    """
    level = max(int(safety), int(operational))
    if accuracy is AccuracyTag.TARGETED:
        level = min(level + 1, 4)
    return ImpactLevel(level)


# --------------------------------------------------------------------------
# catalog loading


def _parse_enum(mapping: dict, token, field: str, index: int):
    try:
        return mapping[token]
    except (KeyError, TypeError):
        raise RiskDomainError(
            f"record {index}: field {field!r} has unknown value {token!r}; "
            f"expected one of {sorted(mapping)}"
        ) from None


def record_from_dict(obj: dict, index: int = 0) -> AttackRecord:
    required = {
        "id", "layer", "entry_point", "attack_class", "impact_safety",
        "impact_operational", "accuracy", "impact_overall", "knowledge",
        "equipment", "window_of_opportunity", "expertise",
        "expected_feasibility", "expected_risk",
    }
    missing = required - obj.keys()
    if missing:
        raise RiskDomainError(f"record {index}: missing fields {sorted(missing)}")
    return AttackRecord(
        id=str(obj["id"]),
        layer=str(obj["layer"]),
        entry_point=str(obj["entry_point"]),
        attack_class=int(obj["attack_class"]),
        impact_safety=_parse_enum(_IMPACT_TOKENS, obj["impact_safety"], "impact_safety", index),
        impact_operational=_parse_enum(
            _IMPACT_TOKENS, obj["impact_operational"], "impact_operational", index
        ),
        accuracy=_parse_enum(_ACCURACY_TOKENS, obj["accuracy"], "accuracy", index),
        impact_overall=_parse_enum(_IMPACT_TOKENS, obj["impact_overall"], "impact_overall", index),
        knowledge=_parse_enum(_KNOWLEDGE_TOKENS, obj["knowledge"], "knowledge", index),
        equipment=_parse_enum(_EQUIPMENT_TOKENS, obj["equipment"], "equipment", index),
        woo=_parse_enum(
            _WOO_TOKENS, obj["window_of_opportunity"], "window_of_opportunity", index
        ),
        expertise=_parse_enum(_EXPERTISE_TOKENS, obj["expertise"], "expertise", index),
        expected_feasibility=_parse_enum(
            _FEASIBILITY_TOKENS, obj["expected_feasibility"], "expected_feasibility", index
        ),
        expected_risk=int(obj["expected_risk"]),
    )


def load_catalog(path: str | Path) -> list[AttackRecord]:
    """Load a JSON attack catalog; records come back in file order.

    Unknown enum spellings are rejected with the field name and the
    offending token.
    """
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise RiskDomainError(f"{path}: invalid JSON at line {e.lineno}: {e.msg}") from e
    if not isinstance(data, list):
        raise RiskDomainError(f"{path}: expected a JSON array of records")
    return [record_from_dict(obj, i) for i, obj in enumerate(data)]


def builtin_catalog_path() -> Path:
    """Path of the shipped catalog of published attacks."""
    return Path(str(resources.files("workbench").joinpath("data/table2.json")))


def load_builtin_catalog() -> list[AttackRecord]:
    return load_catalog(builtin_catalog_path())


# --------------------------------------------------------------------------
# reporting


def _report_rows(results: list[RecordEvaluation]) -> list[list[str]]:
    rows = []
    for r in results:
        rows.append([
            r.record.id,
            r.record.layer,
            r.record.entry_point,
            str(r.record.attack_class),
            IMPACT_LABELS[r.record.impact_overall],
            str(r.computed_sum),
            FEASIBILITY_LABELS[r.computed_feasibility],
            FEASIBILITY_LABELS[r.record.expected_feasibility],
            str(r.computed_risk),
            str(r.record.expected_risk),
            "yes" if r.matches_expected else "NO",
        ])
    return rows


_REPORT_HEADER = [
    "id", "layer", "entry_point", "class", "impact", "sum",
    "feasibility", "expected_feasibility", "risk", "expected_risk", "match",
]


def render_report(results: list[RecordEvaluation], format: str = "markdown") -> str:
    """Deterministic text report: one row per record plus a match footer."""
    rows = _report_rows(results)
    matched = sum(1 for r in results if r.matches_expected)
    footer = f"{matched}/{len(results)} match"
    if format == "csv":
        lines = [",".join(_REPORT_HEADER)]
        lines += [",".join(row) for row in rows]
        lines.append(footer)
        return "\n".join(lines) + "\n"
    if format == "markdown":
        lines = ["| " + " | ".join(_REPORT_HEADER) + " |"]
        lines.append("|" + "|".join(["---"] * len(_REPORT_HEADER)) + "|")
        lines += ["| " + " | ".join(row) + " |" for row in rows]
        lines.append("")
        lines.append(footer)
        return "\n".join(lines) + "\n"
    raise RiskDomainError(f"unknown report format {format!r}")


def render_matrix(format: str = "markdown") -> str:
    """The 4x4 impact-by-feasibility risk table as text."""
    matrix = risk_matrix()
    feas_names = [FEASIBILITY_LABELS[FeasibilityRating(f)] for f in range(1, 5)]
    impact_names = [IMPACT_LABELS[ImpactLevel(i)] for i in range(1, 5)]
    if format == "csv":
        lines = ["impact," + ",".join(feas_names)]
        for i in range(4):
            lines.append(impact_names[i] + "," + ",".join(str(v) for v in matrix[i]))
        return "\n".join(lines) + "\n"
    lines = ["| impact | " + " | ".join(feas_names) + " |"]
    lines.append("|" + "|".join(["---"] * 5) + "|")
    for i in range(4):
        lines.append(
            "| " + impact_names[i] + " | " + " | ".join(str(v) for v in matrix[i]) + " |"
        )
    return "\n".join(lines) + "\n"
