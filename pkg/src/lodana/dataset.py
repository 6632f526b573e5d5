"""Record ingestion, class-count thresholding, and pattern construction.

The binarization rule is tied to the class balance: with k class-positive
records out of n, each feature's cut is its (k+1)-th largest value, so a
strict "value > cut" test marks exactly k records high whenever the k-th
and (k+1)-th largest values differ.  Ties push the realized high count
below k; they are reported, never silently broken.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import IO, Iterable, Mapping, Sequence

from .boolring import BoolPoly, VariableTable
from .errors import InputError

# Expanding one indicator costs 2^(zero bits) monomials; past this the
# polynomial would not be workable downstream anyway.
MAX_INDICATOR_ZEROS = 20


@dataclass(frozen=True)
class Record:
    """One measurement row: feature values aligned to table.feature_indices."""

    record_id: str
    values: tuple[float, ...]
    label: int

    def __post_init__(self) -> None:
        if self.label not in (0, 1):
            raise InputError(f"record {self.record_id!r}: class must be 0 or 1")


@dataclass(frozen=True)
class RecordTable:
    table: VariableTable
    records: tuple[Record, ...]

    def __post_init__(self) -> None:
        width = len(self.table.feature_indices)
        seen: set[str] = set()
        for r in self.records:
            if len(r.values) != width:
                raise InputError(
                    f"record {r.record_id!r}: expected {width} feature values, got {len(r.values)}"
                )
            if r.record_id in seen:
                raise InputError(f"duplicate record id {r.record_id!r}")
            seen.add(r.record_id)

    def __len__(self) -> int:
        return len(self.records)

    @property
    def class_positive(self) -> int:
        return sum(r.label for r in self.records)


def parse_records(
    source: str | IO[str],
    table: VariableTable,
    labels: Mapping[str, int] | None = None,
) -> RecordTable:
    """Read delimited text into a RecordTable.

    Expected header: an id column first, then one column per variable,
    matched by variable name.  Extra columns are ignored.  The class
    column accepts 0/1 or any strings mapped by `labels`.
    """
    stream = io.StringIO(source) if isinstance(source, str) else source
    reader = csv.reader(stream)
    try:
        header = next(reader)
    except StopIteration:
        raise InputError("empty input: no header row") from None
    header = [h.strip() for h in header]
    if len(header) < 2:
        raise InputError("header must name an id column and the variable columns")

    positions: dict[int, int] = {}  # table index -> column position
    for idx, var in enumerate(table.variables):
        try:
            positions[idx] = header.index(var.name, 1)
        except ValueError:
            raise InputError(f"missing column {var.name!r}") from None

    class_pos = positions[table.class_index]
    records: list[Record] = []
    seen: set[str] = set()
    for lineno, row in enumerate(reader, start=2):
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) < len(header):
            raise InputError(f"row {lineno}: expected {len(header)} columns, got {len(row)}")
        rid = row[0].strip()
        if not rid:
            raise InputError(f"row {lineno}: empty record id")
        if rid in seen:
            raise InputError(f"row {lineno}: duplicate record id {rid!r}")
        seen.add(rid)

        values: list[float] = []
        for idx in table.feature_indices:
            pos = positions[idx]
            cell = row[pos].strip()
            name = table.variables[idx].name
            if not cell:
                raise InputError(f"row {lineno}: empty value in column {name!r}")
            try:
                values.append(float(cell))
            except ValueError:
                raise InputError(
                    f"row {lineno}: non-numeric value {cell!r} in column {name!r}"
                ) from None

        cell = row[class_pos].strip()
        if labels and cell in labels:
            label = labels[cell]
        elif cell in ("0", "1"):
            label = int(cell)
        else:
            raise InputError(
                f"row {lineno}: class value {cell!r} is not 0/1 and has no label mapping"
            )
        records.append(Record(rid, tuple(values), label))

    return RecordTable(table, tuple(records))


@dataclass(frozen=True)
class Deviation:
    """A feature whose realized high count fell below k due to ties."""

    code: str
    expected: int
    realized: int


@dataclass(frozen=True)
class Thresholds:
    """Per-feature cuts, aligned to table.feature_indices; high means value > cut."""

    table: VariableTable
    cuts: tuple[float, ...]
    deviations: tuple[Deviation, ...] = ()

    def __post_init__(self) -> None:
        if len(self.cuts) != len(self.table.feature_indices):
            raise InputError("one cut per feature required")
        for c in self.cuts:
            if c != c or c in (float("inf"), float("-inf")):
                raise InputError("cuts must be finite")

    def cut_for(self, code: str) -> float:
        idx = self.table.index(code)
        return self.cuts[self.table.feature_indices.index(idx)]


def compute_thresholds(records: RecordTable) -> Thresholds:
    k = records.class_positive
    n = len(records)
    if k == 0 or k == n:
        raise InputError(f"degenerate class balance: {k} positive of {n}")

    cuts: list[float] = []
    deviations: list[Deviation] = []
    for fpos, idx in enumerate(records.table.feature_indices):
        ordered = sorted((r.values[fpos] for r in records.records), reverse=True)
        cut = ordered[k]  # the (k+1)-th largest
        cuts.append(cut)
        realized = sum(1 for v in ordered if v > cut)
        if realized != k:
            deviations.append(Deviation(records.table.variables[idx].code, k, realized))
    return Thresholds(records.table, tuple(cuts), tuple(deviations))


@dataclass(frozen=True)
class Pattern:
    """A distinct bit assignment (features plus class) with its record ids."""

    bits: int
    multiplicity: int
    record_ids: tuple[str, ...]

    def __post_init__(self) -> None:
        if self.multiplicity != len(self.record_ids):
            raise InputError("pattern multiplicity must equal its record count")
        if self.multiplicity < 1:
            raise InputError("pattern multiplicity must be at least 1")


def pattern_key(bits: int, width: int) -> str:
    """Bit string in variable-table order, e.g. '1100110111'."""
    return "".join("1" if bits >> i & 1 else "0" for i in range(width))


@dataclass(frozen=True)
class PatternTable:
    table: VariableTable
    patterns: tuple[Pattern, ...]

    def __post_init__(self) -> None:
        full = self.table.full_mask
        seen: set[int] = set()
        for p in self.patterns:
            if p.bits & ~full:
                raise InputError("pattern bits outside the variable table")
            if p.bits in seen:
                raise InputError(f"duplicate pattern {pattern_key(p.bits, self.table.width)}")
            seen.add(p.bits)

    def __len__(self) -> int:
        return len(self.patterns)

    @property
    def observed_count(self) -> int:
        return len(self.patterns)

    @property
    def unobserved_exponent(self) -> int:
        return (1 << self.table.width) - self.observed_count

    @property
    def record_count(self) -> int:
        return sum(p.multiplicity for p in self.patterns)

    @property
    def class_positive(self) -> int:
        cm = self.table.class_mask
        return sum(p.multiplicity for p in self.patterns if p.bits & cm)

    @property
    def class_negative(self) -> int:
        return self.record_count - self.class_positive

    def key_of(self, pattern: Pattern) -> str:
        return pattern_key(pattern.bits, self.table.width)

    def get(self, key: str) -> Pattern | None:
        if len(key) != self.table.width or set(key) - {"0", "1"}:
            return None
        bits = sum(1 << i for i, c in enumerate(key) if c == "1")
        for p in self.patterns:
            if p.bits == bits:
                return p
        return None

    def without_records(self, record_ids: Iterable[str]) -> "PatternTable":
        """Excise records; patterns emptied out drop from the observed set."""
        drop = set(record_ids)
        kept: list[Pattern] = []
        for p in self.patterns:
            ids = tuple(r for r in p.record_ids if r not in drop)
            if ids:
                kept.append(Pattern(p.bits, len(ids), ids))
        return PatternTable(self.table, tuple(kept))


def binarize(records: RecordTable, cuts: Thresholds) -> PatternTable:
    if cuts.table != records.table:
        raise InputError("thresholds were computed for a different variable table")
    merged: dict[int, list[str]] = {}
    class_bit = 1 << records.table.class_index
    for r in records.records:
        bits = 0
        for fpos, idx in enumerate(records.table.feature_indices):
            if r.values[fpos] > cuts.cuts[fpos]:
                bits |= 1 << idx
        if r.label:
            bits |= class_bit
        merged.setdefault(bits, []).append(r.record_id)
    patterns = tuple(
        Pattern(bits, len(ids), tuple(ids)) for bits, ids in sorted(merged.items())
    )
    return PatternTable(records.table, patterns)


def record_bits(record: Record, cuts: Thresholds) -> int:
    """Binarize a single record, class bit included."""
    table = cuts.table
    bits = 0
    for fpos, idx in enumerate(table.feature_indices):
        if record.values[fpos] > cuts.cuts[fpos]:
            bits |= 1 << idx
    if record.label:
        bits |= 1 << table.class_index
    return bits


def pattern_indicator(table: VariableTable, bits: int) -> BoolPoly:
    """The polynomial evaluating to 1 exactly on `bits`.

    Product over all variables of v (bit set) or v+1 (bit clear), expanded:
    one monomial per subset of the zero-bit variables.
    """
    full = table.full_mask
    if bits & ~full:
        raise InputError("pattern bits outside the variable table")
    zeros = full & ~bits
    if zeros.bit_count() > MAX_INDICATOR_ZEROS:
        raise InputError("pattern has too many zero bits to expand an indicator")
    monomials = []
    sub = zeros
    while True:
        monomials.append(bits | sub)
        if sub == 0:
            break
        sub = (sub - 1) & zeros
    return BoolPoly(table, frozenset(monomials))


def build_sigma(patterns: PatternTable) -> BoolPoly:
    """1 + sum of observed-pattern indicators; 1 exactly on unobserved bits."""
    acc: set[int] = {0}
    for p in patterns.patterns:
        acc ^= pattern_indicator(patterns.table, p.bits).monomials
    return BoolPoly(patterns.table, frozenset(acc))


def count_empty_criteria(patterns: PatternTable) -> int:
    """Exponent u in 2^u, the number of criteria vanishing on all observations."""
    return patterns.unobserved_exponent
