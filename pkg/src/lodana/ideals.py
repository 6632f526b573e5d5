"""Ideals over the Boolean ring: generators plus a cached reduced basis.

Ideal values are persistent: extension returns a new value, so workflow
cycles can keep snapshots.  Basis computation is memoized process-wide
behind a single-flight guard; concurrent readers of the same ideal
trigger at most one Buchberger run.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .boolring import BoolPoly, MonomialOrder, VariableTable
from .dataset import PatternTable, build_sigma
from .errors import InputError
from .gbasis import GroebnerBasis, buchberger, normal_form

_CacheKey = tuple[VariableTable, MonomialOrder, tuple[frozenset[int], ...]]

_LOCK = threading.Lock()
_BASES: dict[_CacheKey, GroebnerBasis] = {}
_PENDING: dict[_CacheKey, threading.Event] = {}


def _canonical_generators(generators: Sequence[BoolPoly]) -> tuple[frozenset[int], ...]:
    distinct = {g.monomials for g in generators if g}
    return tuple(sorted(distinct, key=lambda ms: (len(ms), sorted(ms))))


def _cached_basis(key: _CacheKey, generators: Sequence[BoolPoly], order: MonomialOrder) -> GroebnerBasis:
    while True:
        with _LOCK:
            got = _BASES.get(key)
            if got is not None:
                return got
            event = _PENDING.get(key)
            if event is None:
                event = threading.Event()
                _PENDING[key] = event
                computing = True
            else:
                computing = False
        if not computing:
            event.wait()
            continue
        try:
            basis = buchberger(list(generators), order)
        except BaseException:
            with _LOCK:
                del _PENDING[key]
            event.set()
            raise
        with _LOCK:
            _BASES[key] = basis
            del _PENDING[key]
        event.set()
        return basis


@dataclass(frozen=True)
class Ideal:
    table: VariableTable
    generators: tuple[BoolPoly, ...]
    order: MonomialOrder
    label: str = ""

    def __post_init__(self) -> None:
        for g in self.generators:
            if g.table != self.table:
                raise InputError("ideal generators must share one variable table")

    def basis(self) -> GroebnerBasis:
        key = (self.table, self.order, _canonical_generators(self.generators))
        return _cached_basis(key, self.generators, self.order)

    def __len__(self) -> int:
        return len(self.generators)


def ideal_from_patterns(
    patterns: PatternTable, order: MonomialOrder | None = None, label: str = ""
) -> Ideal:
    """The ideal of all criteria vanishing on every observed pattern."""
    table = patterns.table
    if order is None:
        order = MonomialOrder.default(table)
    return Ideal(table, (build_sigma(patterns),), order, label)


def zero_ideal(table: VariableTable, order: MonomialOrder | None = None, label: str = "") -> Ideal:
    if order is None:
        order = MonomialOrder.default(table)
    return Ideal(table, (), order, label)


def membership(p: BoolPoly, ideal: Ideal) -> bool:
    return not normal_form(p, ideal.basis())


def extend(ideal: Ideal, polys: Iterable[BoolPoly]) -> Ideal:
    new = tuple(polys)
    for p in new:
        if p.table != ideal.table:
            raise InputError("extension polynomials must share the ideal's variable table")
    return Ideal(ideal.table, ideal.generators + new, ideal.order, ideal.label)


def remainders_mod(source: Sequence[BoolPoly], ideal: Ideal) -> list[BoolPoly]:
    """Normal forms of each source polynomial, order preserved, zeros retained."""
    basis = ideal.basis()
    return [normal_form(p, basis) for p in source]
