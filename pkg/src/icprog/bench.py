"""Classification benchmark: SM/IC/L verdicts of corpus programs against a table."""

from __future__ import annotations

import csv
import io
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .analysis import NA, analyze
from .frontend import ParseError, load_program

MATCH = "match"
MISMATCH = "mismatch"
MISSING = "missing"
SKIPPED = "skipped"
ERROR = "error"

_LETTER = {"in": "i", "out": "o", "_": "x"}


def _norm(v: str) -> str:
    v = (v or "").strip().lower()
    return NA if v in ("", "-", "n/a") else v


@dataclass
class BenchRow:
    name: str
    moding: str
    expected: tuple  # (SM, IC, L)
    computed: Optional[tuple] = None
    status: str = MISSING
    file: str = ""
    reasons: list = field(default_factory=list)

    @property
    def match(self) -> bool:
        return self.computed is not None and all(_norm(a) == _norm(b) for a, b in zip(self.expected, self.computed))

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "moding": self.moding,
            "expected": list(self.expected),
            "computed": list(self.computed) if self.computed else None,
            "match": self.match,
            "status": self.status,
            "file": self.file,
            "reasons": self.reasons,
        }


def corpus_file(name: str, moding: str) -> str:
    """File name for a row: ``append`` with ``(In,In,Out)`` lives in ``append_iio.icp``."""
    parts = [m.strip().lower() for m in moding.strip().strip("()").split(",") if m.strip()]
    try:
        letters = "".join(_LETTER[m] for m in parts)
    except KeyError as e:
        raise ValueError("bad moding %r" % moding) from e
    return "%s_%s.icp" % (name, letters)


def read_expected(path) -> list:
    rows = []
    with open(path, newline="") as fh:
        for rec in csv.DictReader(fh):
            row = BenchRow(rec["name"].strip(), rec["moding"].strip(), tuple(_norm(rec[c]) for c in ("SM", "IC", "L")))
            if _norm(rec.get("status") or "") == SKIPPED:
                row.status = SKIPPED
            rows.append(row)
    return rows


def _evaluate(row: BenchRow, corpus_dir: Path) -> BenchRow:
    if row.status == SKIPPED:
        return row
    f = corpus_dir / corpus_file(row.name, row.moding)
    row.file = f.name
    if not f.exists():
        row.status = MISSING
        return row
    try:
        rep = analyze(load_program(f))
    except (ParseError, OSError) as e:
        row.status = ERROR
        row.reasons = [str(e)]
        return row
    row.computed = rep.columns()
    row.reasons = rep.reasons
    row.status = MATCH if row.match else MISMATCH
    return row


def run_benchmarks(corpus_dir, expected, workers: int = 4) -> tuple:
    """Check every table row against its corpus file; returns (rows sorted by name, exit status)."""
    corpus_dir = Path(corpus_dir)
    rows = read_expected(expected)
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        rows = list(pool.map(lambda r: _evaluate(r, corpus_dir), rows))
    rows.sort(key=lambda r: (r.name, r.moding))
    bad = any(r.status in (MISMATCH, MISSING, ERROR) for r in rows)
    return rows, 1 if bad else 0


def summary(rows) -> dict:
    out = {s: 0 for s in (MATCH, MISMATCH, MISSING, SKIPPED, ERROR)}
    for r in rows:
        out[r.status] += 1
    return out


def format_rows(rows) -> str:
    """Rows as CSV with the computed columns next to the expected ones."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["name", "moding", "SM", "IC", "L", "computed_SM", "computed_IC", "computed_L", "status"])
    for r in rows:
        comp = r.computed or ("", "", "")
        w.writerow([r.name, r.moding, *r.expected, *comp, r.status])
    return buf.getvalue()
