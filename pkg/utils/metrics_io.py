import csv
import json
from pathlib import Path
from typing import Any, Dict, Iterable, List, Sequence

from schemas.response_schema import METRICS_COLUMNS, MetricsRecord
from utils.common import format_number, json_safe


def write_csv(path, rows: Iterable[Dict[str, Any]], columns: Sequence[str]) -> Path:
    """
    Write rows as CSV with a header, in the given column order.

    List-valued cells are joined with spaces. Line endings are always "\\n".
    """
    path = Path(path)
    with path.open("w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow(
                [
                    " ".join(format_number(item) for item in row[column])
                    if isinstance(row[column], (list, tuple))
                    else format_number(row[column])
                    for column in columns
                ]
            )
    return path


def write_json(path, document: Any) -> Path:
    path = Path(path)
    path.write_text(json.dumps(json_safe(document), indent=2, sort_keys=False) + "\n")
    return path


def write_metrics_csv(path, records: Sequence[MetricsRecord]) -> Path:
    return write_csv(path, (record.model_dump() for record in records), METRICS_COLUMNS)


def read_metrics_csv(path) -> List[MetricsRecord]:
    """Parse a metrics.csv written by write_metrics_csv back into records."""
    with Path(path).open(newline="") as handle:
        reader = csv.DictReader(handle)
        if tuple(reader.fieldnames or ()) != METRICS_COLUMNS:
            raise ValueError(f"unexpected metrics columns {reader.fieldnames}")
        return [MetricsRecord.model_validate(row) for row in reader]
