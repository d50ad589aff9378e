"""Reading and writing network documents and CSV datasets.

Networks are stored as JSON with two top-level arrays: ``variables``
(objects with ``name`` and ``values``) and ``cpds`` (objects with
``child``, ``parents`` and ``rows``).  The serializer is canonical: fixed
key order, two-space indent, LF line endings, floats in their shortest
round-trip decimal form, so parse(serialize(net)) == net.

Datasets are plain CSV with a header row.  LF and CRLF are both accepted;
the serializer emits LF.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass

from .bnmodel import BayesianNetwork, Cpt, Variable, validate_network
from .errors import ModelError, ParseError


def parse_network(text: bytes | str) -> BayesianNetwork:
    """Parse a JSON network document and validate it.

    Raises ParseError with position information for malformed JSON and
    with a violation list for structurally invalid networks.
    """
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(e.msg, line=e.lineno, column=e.colno) from None

    if not isinstance(doc, dict):
        raise ParseError("top level must be an object")
    variables = doc.get("variables")
    cpds = doc.get("cpds")
    if not isinstance(variables, list) or not variables:
        raise ParseError("no variables")
    if not isinstance(cpds, list):
        raise ParseError("missing 'cpds' array")

    vs: list[Variable] = []
    for i, entry in enumerate(variables):
        if not isinstance(entry, dict):
            raise ParseError(f"variables[{i}] must be an object")
        name = entry.get("name")
        values = entry.get("values")
        if not isinstance(name, str):
            raise ParseError(f"variables[{i}] needs a string 'name'")
        if not isinstance(values, list) or not all(isinstance(v, str) for v in values):
            raise ParseError(f"variable {name!r} needs a list of string 'values'")
        try:
            vs.append(Variable(name, tuple(values)))
        except ModelError as e:
            raise ParseError(str(e)) from None

    cs: list[Cpt] = []
    for i, entry in enumerate(cpds):
        if not isinstance(entry, dict):
            raise ParseError(f"cpds[{i}] must be an object")
        child = entry.get("child")
        parents = entry.get("parents", [])
        rows = entry.get("rows")
        if not isinstance(child, str):
            raise ParseError(f"cpds[{i}] needs a string 'child'")
        if not isinstance(parents, list) or not all(isinstance(p, str) for p in parents):
            raise ParseError(f"cpd {child!r} needs a list of string 'parents'")
        if not isinstance(rows, list) or not rows:
            raise ParseError(f"cpd {child!r} needs a nonempty 'rows' array")
        grid: list[tuple[float, ...]] = []
        for j, row in enumerate(rows):
            if not isinstance(row, list) or not all(
                isinstance(x, (int, float)) and not isinstance(x, bool) for x in row
            ):
                raise ParseError(f"cpd {child!r} row {j} must be a list of numbers")
            grid.append(tuple(float(x) for x in row))
        cs.append(Cpt(child, tuple(parents), tuple(grid)))

    net = BayesianNetwork(tuple(vs), tuple(cs))
    problems = validate_network(net)
    if problems:
        raise ParseError("invalid network: " + "; ".join(problems))
    return net


def serialize_network(net: BayesianNetwork) -> bytes:
    """Serialize a network to canonical JSON bytes."""
    doc = {
        "variables": [
            {"name": v.name, "values": list(v.values)} for v in net.variables
        ],
        "cpds": [
            {
                "child": c.child,
                "parents": list(c.parents),
                "rows": [list(row) for row in c.rows],
            }
            for c in net.cpts
        ],
    }
    return (json.dumps(doc, indent=2) + "\n").encode("utf-8")


@dataclass(frozen=True)
class Dataset:
    """A rectangular table of string cells with named columns, one of
    which is designated as the class column."""

    columns: tuple[str, ...]
    rows: tuple[tuple[str, ...], ...]
    class_column: str

    def __post_init__(self) -> None:
        object.__setattr__(self, "columns", tuple(self.columns))
        object.__setattr__(self, "rows", tuple(tuple(r) for r in self.rows))
        if self.class_column not in self.columns:
            raise ModelError(f"unknown class column {self.class_column!r}")

    def column_index(self, name: str) -> int:
        try:
            return self.columns.index(name)
        except ValueError:
            raise ModelError(f"unknown column {name!r}") from None

    def column_values(self, name: str) -> list[str]:
        i = self.column_index(name)
        return [r[i] for r in self.rows]

    def restrict(self, keep: list[str]) -> "Dataset":
        """A view with only the given columns (class column always kept)."""
        names = [c for c in self.columns if c in set(keep) | {self.class_column}]
        idx = [self.column_index(c) for c in names]
        rows = tuple(tuple(r[i] for i in idx) for r in self.rows)
        return Dataset(tuple(names), rows, self.class_column)

    def take(self, indices: list[int]) -> "Dataset":
        return Dataset(self.columns, tuple(self.rows[i] for i in indices), self.class_column)


def parse_dataset(text: bytes | str, class_column: str) -> Dataset:
    """Parse a CSV dataset with a header row.

    Rejects empty files, unknown class columns, ragged rows and missing
    (empty) cells.  Row numbers in error messages count data rows from 1.
    """
    if isinstance(text, bytes):
        text = text.decode("utf-8-sig")
    lines = text.splitlines()
    records = [row for row in csv.reader(lines)]
    if not records:
        raise ParseError("empty file")
    header = tuple(records[0])
    if any(not h for h in header):
        raise ParseError("header contains an empty column name")
    if class_column not in header:
        raise ParseError(f"unknown class column {class_column!r}")
    rows: list[tuple[str, ...]] = []
    for n, rec in enumerate(records[1:], start=1):
        if not rec:
            continue  # ignore blank lines
        if len(rec) != len(header):
            raise ParseError(f"ragged row {n}: {len(rec)} cells, expected {len(header)}")
        for col, cell in zip(header, rec):
            if cell == "":
                raise ParseError(f"missing value in row {n}, column {col!r}")
        rows.append(tuple(rec))
    return Dataset(header, tuple(rows), class_column)


def serialize_dataset(data: Dataset) -> bytes:
    """Serialize a dataset to CSV bytes with LF line endings."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(data.columns)
    writer.writerows(data.rows)
    return buf.getvalue().encode("utf-8")
