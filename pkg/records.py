"""
P1 Cube - Records
Candidate database and calibration cache as JSON-lines files with a
versioned header, plus the report bundle shared by table and line output
"""

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import pandas as pd

from format_cube import MuVector
from orbifold_analysis import Basket, parse_point
from rr_engine import CalibrationTable, PeriodicContribution
from search import CandidateRecord
from series_algebra import P1CubeError, format_rational, parse_rational

logger = logging.getLogger(__name__)

CANDIDATE_HEADER = {"format": "p1cube-candidates", "version": 1}
CALIBRATION_HEADER = {"format": "p1cube-calibration", "version": 1}


class RecordFormatError(P1CubeError):
    pass


# ---------------------------------------------------------------------------
# JSON lines
# ---------------------------------------------------------------------------

def _read_lines(path: Path, header: dict) -> List[dict]:
    with open(path, 'r') as f:
        lines = [line for line in f if line.strip()]
    if not lines:
        raise RecordFormatError(f"{path} is empty")
    try:
        rows = [json.loads(line) for line in lines]
    except json.JSONDecodeError as e:
        raise RecordFormatError(f"{path}: {e}") from e
    if rows[0] != header:
        raise RecordFormatError(f"{path}: expected header {json.dumps(header)}, found {json.dumps(rows[0])}")
    return rows[1:]


def _write_lines(path: Path, header: dict, rows: Iterable[dict]):
    with open(path, 'w') as f:
        f.write(json.dumps(header) + "\n")
        for row in rows:
            f.write(json.dumps(row) + "\n")


# ---------------------------------------------------------------------------
# Candidate database
# ---------------------------------------------------------------------------

def record_to_dict(record: CandidateRecord) -> dict:
    """Fixed key order; rationals as "p/q" strings"""
    return {
        'index': record.index,
        'ambient': sorted(record.ambient),
        'adjunction': record.adjunction_number,
        'mu': list(record.mu.as_tuple()),
        'recipe': record.recipe,
        'dsq': format_rational(record.dsq),
        'minus_k_squared': format_rational(record.minus_k_squared),
        'h0': record.h0,
        'rr_baskets': [str(b) for b in record.rr_baskets],
        'geometric': str(record.geometric) if record.geometric is not None else None,
        'flags': list(record.flags),
        'wellformed': record.wellformed,
        'obstructed': record.obstructed,
        'status': record.status,
        'prefix': list(record.prefix),
    }


def record_from_dict(data: dict) -> CandidateRecord:
    try:
        return CandidateRecord(
            mu=MuVector.of(data['mu']),
            recipe=data['recipe'],
            ambient=list(data['ambient']),
            index=int(data['index']),
            dsq=parse_rational(data['dsq']),
            minus_k_squared=parse_rational(data['minus_k_squared']),
            h0=int(data['h0']),
            rr_baskets=[Basket.parse(b) for b in data['rr_baskets']],
            geometric=Basket.parse(data['geometric']) if data.get('geometric') is not None else None,
            flags=list(data.get('flags', [])),
            wellformed=bool(data.get('wellformed', True)),
            obstructed=bool(data.get('obstructed', False)),
            status=data.get('status', 'candidate'),
            prefix=tuple(data.get('prefix', ())),
        )
    except (KeyError, TypeError, ValueError) as e:
        raise RecordFormatError(f"malformed candidate record: {e}") from e


class CandidateDatabase:
    """Search output kept across runs"""

    def __init__(self, path: str):
        self.path = Path(path)

    def exists(self) -> bool:
        return self.path.exists()

    def load(self) -> List[CandidateRecord]:
        if not self.exists():
            return []
        return [record_from_dict(row) for row in _read_lines(self.path, CANDIDATE_HEADER)]

    def save(self, records: Sequence[CandidateRecord]):
        ordered = sorted(records, key=CandidateRecord.sort_key)
        _write_lines(self.path, CANDIDATE_HEADER, (record_to_dict(r) for r in ordered))

    def merge(self, records: Sequence[CandidateRecord]) -> Tuple[int, int]:
        """Append-merge by record key; returns (added, already present)"""
        existing = self.load()
        known = {r.key for r in existing}
        added = 0
        for record in records:
            if record.key in known:
                continue
            known.add(record.key)
            existing.append(record)
            added += 1
        self.save(existing)
        logger.info("merged %d new records into %s", added, self.path)
        return added, len(records) - added


# ---------------------------------------------------------------------------
# Calibration cache
# ---------------------------------------------------------------------------

def describe_contribution(contribution: PeriodicContribution) -> str:
    """e.g. 1/2(1,1): -1/4t / (1 - t^2)"""
    series = contribution.series()
    return f"{contribution.point}: {series.numerator} / {series.denominator}"


class CalibrationCache:
    """Calibrated base types; regenerated when missing or from another format version"""

    def __init__(self, path: str):
        self.path = Path(path)

    def load(self) -> Optional[CalibrationTable]:
        if not self.path.exists():
            return None
        try:
            rows = _read_lines(self.path, CALIBRATION_HEADER)
        except RecordFormatError as e:
            logger.warning("ignoring calibration cache: %s", e)
            return None
        table = CalibrationTable()
        for row in rows:
            try:
                point = parse_point(row['type'])
                values = tuple(parse_rational(v) for v in row['numerator'])
            except (KeyError, ValueError) as e:
                raise RecordFormatError(f"{self.path}: malformed calibration record: {e}") from e
            if len(values) != int(row['period']):
                raise RecordFormatError(f"{self.path}: {row['type']} has {len(values)} values "
                                        f"for period {row['period']}")
            table.add(PeriodicContribution(point, values), row.get('provenance', []))
        return table

    def save(self, table: CalibrationTable):
        rows = []
        for point in table.types():
            contribution = table.entries[point]
            rows.append({
                'type': str(point),
                'period': contribution.period,
                'numerator': [format_rational(v) for v in contribution.values],
                'series': describe_contribution(contribution),
                'provenance': list(table.provenance.get(point, [])),
            })
        _write_lines(self.path, CALIBRATION_HEADER, rows)


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------

def _field(value) -> str:
    text = "" if value is None else str(value)
    if not text or any(ch.isspace() for ch in text) or '"' in text:
        return json.dumps(text)
    return text


@dataclass
class ReportBundle:
    """Rows rendered either as a table or as key=value lines"""
    title: str
    rows: List[Dict[str, object]] = field(default_factory=list)

    def frame(self) -> pd.DataFrame:
        return pd.DataFrame(self.rows)

    def table(self) -> str:
        if not self.rows:
            return "(no rows)"
        return self.frame().to_string(index=False)

    def lines(self) -> List[str]:
        return [" ".join(f"{key}={_field(value)}" for key, value in row.items()) for row in self.rows]


def candidates_bundle(records: Sequence[CandidateRecord]) -> ReportBundle:
    return ReportBundle("candidates", [r.summary() for r in records])


def frame_bundle(title: str, frame: pd.DataFrame) -> ReportBundle:
    return ReportBundle(title, frame.to_dict(orient='records'))
