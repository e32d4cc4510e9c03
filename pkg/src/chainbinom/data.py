"""Dataset files: the household CSV schema and packaged fixtures.

The on-disk format is a plain UTF-8 CSV with header
``id,s0,i0,infected,generations[,<covariate>...]``.  An empty
``generations`` field marks a fully observed outbreak.  Any extra
columns become covariates: numeric when every value parses as a number,
categorical otherwise.  Validation failures name the offending file row
and column.
"""

from __future__ import annotations

import csv
import io
import warnings
from dataclasses import dataclass, replace
from typing import Iterable, Mapping

from .errors import DataError
from .estimate import HouseholdObservation
from .model import FINAL

REQUIRED_COLUMNS = ("id", "s0", "i0", "infected", "generations")


@dataclass(frozen=True)
class DatasetFile:
    """A loaded household dataset."""

    path: str | None
    records: tuple[HouseholdObservation, ...]
    covariate_names: tuple[str, ...]

    def __len__(self) -> int:
        return len(self.records)


def subset(dataset: DatasetFile, conditions: Mapping[str, str]) -> DatasetFile:
    """Records whose covariates match every condition (string compare)."""
    unknown = set(conditions) - set(dataset.covariate_names)
    if unknown:
        raise DataError(f"unknown covariates in filter: {sorted(unknown)}")
    kept = tuple(
        r
        for r in dataset.records
        if all(str(r.covariates[k]) == v for k, v in conditions.items())
    )
    return replace(dataset, records=kept)


def _parse_count(raw: str, line: int, column: str, minimum: int) -> int:
    try:
        value = int(raw)
    except ValueError:
        raise DataError(f"row {line}, column {column!r}: {raw!r} is not an integer") from None
    if value < minimum:
        raise DataError(f"row {line}, column {column!r}: {value} is below {minimum}")
    return value


def _load_rows(reader: Iterable[list[str]], path: str | None) -> DatasetFile:
    rows = iter(reader)
    try:
        header = next(rows)
    except StopIteration:
        raise DataError("file is empty, expected a header row") from None
    if tuple(header[: len(REQUIRED_COLUMNS)]) != REQUIRED_COLUMNS:
        raise DataError(
            f"header must start with {','.join(REQUIRED_COLUMNS)}, got {','.join(header)}"
        )
    covariate_names = tuple(header[len(REQUIRED_COLUMNS) :])
    if len(set(covariate_names)) != len(covariate_names):
        raise DataError(f"duplicated covariate columns in header: {covariate_names}")

    records: list[HouseholdObservation] = []
    raw_covariates: dict[str, list[str]] = {name: [] for name in covariate_names}
    seen_ids: set[str] = set()
    for line, row in enumerate(rows, start=2):
        if len(row) != len(header):
            raise DataError(f"row {line}: expected {len(header)} fields, got {len(row)}")
        ident, s0_raw, i0_raw, infected_raw, generations_raw = row[:5]
        s0 = _parse_count(s0_raw, line, "s0", minimum=0)
        i0 = _parse_count(i0_raw, line, "i0", minimum=1)
        infected = _parse_count(infected_raw, line, "infected", minimum=0)
        if infected > s0:
            raise DataError(f"row {line}, column 'infected': {infected} exceeds s0={s0}")
        horizon = (
            FINAL
            if generations_raw == ""
            else _parse_count(generations_raw, line, "generations", minimum=1)
        )
        if ident in seen_ids:
            warnings.warn(f"row {line}: duplicate household id {ident!r}", stacklevel=2)
        seen_ids.add(ident)
        for name, value in zip(covariate_names, row[5:]):
            if value == "":
                raise DataError(f"row {line}, column {name!r}: missing covariate value")
            raw_covariates[name].append(value)
        records.append(
            HouseholdObservation(id=ident, s0=s0, i0=i0, infected=infected, horizon=horizon)
        )
    if not records:
        raise DataError("file contains a header but no data rows")

    # type each covariate column: numeric only if every value parses
    typed: dict[str, list[float] | list[str]] = {}
    for name, values in raw_covariates.items():
        try:
            typed[name] = [float(v) for v in values]
        except ValueError:
            typed[name] = values
    records = [
        replace(rec, covariates={name: typed[name][k] for name in covariate_names})
        for k, rec in enumerate(records)
    ]
    return DatasetFile(path=path, records=tuple(records), covariate_names=covariate_names)


def load_csv(path) -> DatasetFile:
    """Load a household dataset from a CSV file."""
    with open(path, newline="", encoding="utf-8") as handle:
        return _load_rows(csv.reader(handle), str(path))


def loads_csv(text: str) -> DatasetFile:
    """Load a household dataset from CSV text."""
    return _load_rows(csv.reader(io.StringIO(text)), None)


def _format_cell(value) -> str:
    if isinstance(value, float) and value.is_integer():
        return str(value)
    return str(value)


def dumps_csv(records: Iterable[HouseholdObservation], covariate_names: Iterable[str] = ()) -> str:
    """Serialize records to CSV text in the on-disk schema."""
    covariate_names = tuple(covariate_names)
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(REQUIRED_COLUMNS + covariate_names)
    for rec in records:
        row = [
            rec.id,
            str(rec.s0),
            str(rec.i0),
            str(rec.infected),
            "" if rec.horizon is FINAL else str(rec.horizon),
        ]
        row.extend(_format_cell(rec.covariates[name]) for name in covariate_names)
        writer.writerow(row)
    return out.getvalue()


def write_csv(dataset: DatasetFile, path) -> None:
    """Write a dataset back out in the on-disk schema."""
    with open(path, "w", newline="", encoding="utf-8") as handle:
        handle.write(dumps_csv(dataset.records, dataset.covariate_names))


# Final outbreak sizes from the CoronaHouse SARS-CoV-2 household study
# (Norway, 2020/21): (variant, household size, index cases, infected
# among the susceptibles, number of such households).  Cells with no
# households are omitted.
_CORONAHOUSE_CELLS = (
    ("nonvoc", 2, 1, 0, 8),
    ("nonvoc", 2, 1, 1, 7),
    ("nonvoc", 3, 1, 0, 2),
    ("nonvoc", 3, 1, 1, 3),
    ("nonvoc", 3, 1, 2, 3),
    ("nonvoc", 4, 1, 0, 5),
    ("nonvoc", 4, 1, 2, 1),
    ("nonvoc", 4, 1, 3, 1),
    ("nonvoc", 4, 2, 0, 1),
    ("nonvoc", 4, 3, 0, 1),
    ("nonvoc", 5, 1, 0, 2),
    ("nonvoc", 5, 1, 1, 1),
    ("nonvoc", 5, 1, 2, 1),
    ("nonvoc", 6, 1, 3, 1),
    ("nonvoc", 6, 1, 5, 1),
    ("alpha", 2, 1, 0, 1),
    ("alpha", 2, 1, 1, 5),
    ("alpha", 4, 1, 0, 1),
    ("alpha", 4, 1, 1, 1),
    ("alpha", 4, 1, 3, 5),
    ("alpha", 4, 2, 2, 1),
)


def coronahouse_fixture() -> DatasetFile:
    """The CoronaHouse household transmission dataset.

    52 Norwegian households (166 members) followed after a SARS-CoV-2
    index case, with fully observed outbreaks and the virus variant
    (original "nonvoc" vs B.1.1.7 "alpha") as a household covariate.
    """
    records = []
    for variant, size, i0, infected, count in _CORONAHOUSE_CELLS:
        for _ in range(count):
            records.append(
                HouseholdObservation(
                    id=f"ch{len(records) + 1:02d}",
                    s0=size - i0,
                    i0=i0,
                    infected=infected,
                    horizon=FINAL,
                    covariates={"variant": variant},
                )
            )
    return DatasetFile(path=None, records=tuple(records), covariate_names=("variant",))
