"""Groebner machinery for the Boolean quotient ring.

Everything is computed directly on squarefree monomials.  The field
relations v^2 + v are never carried as generators; they surface as extra
pair obligations instead: for every basis element g and every variable v
dividing lm(g), the idempotent product v*g must reduce to zero.  Pairs
whose leading monomials are coprime may be skipped, but only ordinary
pairs - the coprimality shortcut is unsound for field pairs.

Division is well behaved here because a reduction cofactor is disjoint
from the leading monomial it cancels, so the step removes the target
monomial exactly once and introduces only strictly smaller ones.  That
monotonicity also enables the dense kernel below: with monomials renamed
to their rank in the order, a polynomial fits in one big int and the next
monomial to reduce is simply its top bit.
"""

from __future__ import annotations

import heapq
from bisect import bisect_right
from dataclasses import dataclass
from typing import Iterable, Sequence

from .boolring import BoolPoly, MonomialOrder, RingError, _mono_times

# Widest table for which the dense (rank-indexed bigint) kernel is used;
# beyond this the 2^width rank tables stop paying for themselves.
DENSE_MAX_WIDTH = 14

_RANK_TABLES: dict[MonomialOrder, tuple[list[int], list[int]]] = {}


def _rank_tables(order: MonomialOrder) -> tuple[list[int], list[int]]:
    got = _RANK_TABLES.get(order)
    if got is None:
        size = 1 << order.width
        mask_of = sorted(range(size), key=order.key)
        rank_of = [0] * size
        for r, m in enumerate(mask_of):
            rank_of[m] = r
        got = (mask_of, rank_of)
        _RANK_TABLES[order] = got
    return got


@dataclass(frozen=True)
class GroebnerBasis:
    """Reduced basis: elements sorted ascending by leading monomial."""

    elements: tuple[BoolPoly, ...]
    order: MonomialOrder
    reduced: bool = True

    def __iter__(self):
        return iter(self.elements)

    def __len__(self) -> int:
        return len(self.elements)

    @property
    def leading_monomials(self) -> tuple[int, ...]:
        return tuple(self.order.leading_monomial(g) for g in self.elements)

    def _reducer(self):
        # Lazily built and cached: membership tests tend to come in batches.
        red = getattr(self, "_reducer_cache", None)
        if red is None:
            red = _make_reducer(self.order)
            for g in self.elements:
                red.add(self.order.leading_monomial(g), g.monomials)
            object.__setattr__(self, "_reducer_cache", red)
        return red

    def to_doc(self) -> dict:
        if not self.elements:
            return {"order": None, "reduced": self.reduced, "elements": []}
        table = self.elements[0].table
        return {
            "order": self.order.to_doc(table),
            "reduced": self.reduced,
            "elements": [g.render(self.order) for g in self.elements],
        }


class _DenseReducer:
    """Reduction kernel over rank-indexed bigint polynomials.

    Elements are addressed by arrival id; a parallel sorted-by-lm view
    gives deterministic divisor choice (smallest leading monomial first).
    var_posmask[v] marks, per sorted position, the elements whose leading
    monomial contains v, so divisor lookup is a handful of int ops instead
    of a scan.
    """

    __slots__ = (
        "key", "width", "full", "mask_of", "rank_of",
        "monos", "lm_of", "prod_cache",
        "keys", "pos_ids", "var_posmask", "npos",
        "steps", "none_version",
    )

    def __init__(self, order: MonomialOrder):
        self.key = order.key
        self.width = order.width
        self.full = (1 << order.width) - 1
        self.mask_of, self.rank_of = _rank_tables(order)
        self.monos: list[tuple[int, ...]] = []
        self.lm_of: list[int] = []
        self.prod_cache: dict[tuple[int, int], int] = {}
        self.keys: list[int] = []
        self.pos_ids: list[int] = []
        self.var_posmask = [0] * order.width
        self.npos = 0
        # Per-rank reduction caches.  steps[r] is the dense product that
        # cancels the monomial of rank r; it stays valid forever because
        # elements never change once added (the divisor merely may stop
        # being the smallest one, which is harmless mid-completion and
        # cannot happen for a frozen basis).  A "no divisor" verdict is
        # only trusted while the element count is unchanged.
        size = 1 << order.width
        self.steps: list[int | None] = [None] * size
        self.none_version: list[int] = [-1] * size

    def to_dense(self, masks: Iterable[int]) -> int:
        rank_of = self.rank_of
        d = 0
        for m in masks:
            d ^= 1 << rank_of[m]
        return d

    def from_dense(self, d: int) -> frozenset[int]:
        mask_of = self.mask_of
        out = []
        while d:
            low = d & -d
            d ^= low
            out.append(mask_of[low.bit_length() - 1])
        return frozenset(out)

    def add(self, lm: int, monomials: Iterable[int]) -> int:
        eid = len(self.monos)
        self.monos.append(tuple(monomials))
        self.lm_of.append(lm)
        pos = bisect_right(self.keys, self.key(lm))
        self.keys.insert(pos, self.key(lm))
        self.pos_ids.insert(pos, eid)
        low = (1 << pos) - 1
        for v in range(self.width):
            pm = self.var_posmask[v]
            pm = (pm & low) | ((pm & ~low) << 1)
            if lm >> v & 1:
                pm |= 1 << pos
            self.var_posmask[v] = pm
        self.npos += 1
        return eid

    def product(self, eid: int, cof: int) -> int:
        """Dense form of cof * element, parity-folded via XOR of shifts."""
        if cof == 0:
            cof_key = (eid, 0)
        else:
            cof_key = (eid, cof)
        d = self.prod_cache.get(cof_key)
        if d is None:
            rank_of = self.rank_of
            d = 0
            for t in self.monos[eid]:
                d ^= 1 << rank_of[t | cof]
            self.prod_cache[cof_key] = d
        return d

    def _divisor_pos(self, m: int) -> int | None:
        bad = 0
        comp = ~m & self.full
        var_posmask = self.var_posmask
        while comp:
            low = comp & -comp
            comp ^= low
            bad |= var_posmask[low.bit_length() - 1]
        cand = ((1 << self.npos) - 1) & ~bad
        if not cand:
            return None
        return (cand & -cand).bit_length() - 1

    def reduce_dense(self, d: int) -> int:
        mask_of = self.mask_of
        pos_ids = self.pos_ids
        steps = self.steps
        none_version = self.none_version
        version = self.npos
        out = 0
        while d:
            top = d.bit_length() - 1
            step = steps[top]
            if step is not None:
                d ^= step
                continue
            if none_version[top] == version:
                bit = 1 << top
                out |= bit
                d ^= bit
                continue
            m = mask_of[top]
            pos = self._divisor_pos(m)
            if pos is None:
                none_version[top] = version
                bit = 1 << top
                out |= bit
                d ^= bit
                continue
            eid = pos_ids[pos]
            step = self.product(eid, m & ~self.lm_of[eid])
            steps[top] = step
            d ^= step
        return out

    def reduce(self, masks: Iterable[int]) -> frozenset[int]:
        return self.from_dense(self.reduce_dense(self.to_dense(masks)))

    def spair_reduce(self, i: int, j: int) -> frozenset[int]:
        lmi, lmj = self.lm_of[i], self.lm_of[j]
        lcm = lmi | lmj
        d = self.product(i, lcm & ~lmi) ^ self.product(j, lcm & ~lmj)
        return self.from_dense(self.reduce_dense(d))

    def vmul_reduce(self, i: int, vmask: int) -> frozenset[int]:
        return self.from_dense(self.reduce_dense(self.product(i, vmask)))


class _SparseReducer:
    """Heap-based fallback for tables too wide for rank tables.

    Monomials carry a parity map because distinct products can collapse
    onto the same mask and must cancel mod 2.
    """

    __slots__ = ("key", "monos", "lm_of", "keys", "lms", "tails")

    def __init__(self, order: MonomialOrder):
        self.key = order.key
        self.monos: list[tuple[int, ...]] = []
        self.lm_of: list[int] = []
        self.keys: list[int] = []
        self.lms: list[int] = []
        self.tails: list[tuple[int, ...]] = []

    def add(self, lm: int, monomials: Iterable[int]) -> int:
        eid = len(self.monos)
        monos = tuple(monomials)
        self.monos.append(monos)
        self.lm_of.append(lm)
        k = self.key(lm)
        pos = bisect_right(self.keys, k)
        self.keys.insert(pos, k)
        self.lms.insert(pos, lm)
        self.tails.insert(pos, tuple(m for m in monos if m != lm))
        return eid

    def reduce(self, masks: Iterable[int]) -> frozenset[int]:
        key = self.key
        lms = self.lms
        keys = self.keys
        heap: list[tuple[int, int]] = []
        parity: dict[int, int] = {}
        for m in masks:
            c = parity.get(m, 0) ^ 1
            parity[m] = c
            if c:
                heapq.heappush(heap, (-key(m), m))
        out: list[int] = []
        while heap:
            nk, m = heapq.heappop(heap)
            if not parity.pop(m, 0):
                continue
            tail = None
            for j in range(bisect_right(keys, -nk)):
                lm = lms[j]
                if lm & m == lm:
                    tail = self.tails[j]
                    cof = m & ~lm
                    break
            if tail is None:
                out.append(m)
                continue
            for t in tail:
                u = t | cof
                c = parity.get(u, 0) ^ 1
                parity[u] = c
                if c:
                    heapq.heappush(heap, (-key(u), u))
        return frozenset(out)

    def spair_reduce(self, i: int, j: int) -> frozenset[int]:
        lmi, lmj = self.lm_of[i], self.lm_of[j]
        lcm = lmi | lmj
        s = _mono_times(lcm & ~lmi, self.monos[i]) ^ _mono_times(lcm & ~lmj, self.monos[j])
        return self.reduce(s)

    def vmul_reduce(self, i: int, vmask: int) -> frozenset[int]:
        return self.reduce(_mono_times(vmask, self.monos[i]))


def _make_reducer(order: MonomialOrder):
    if order.width <= DENSE_MAX_WIDTH:
        return _DenseReducer(order)
    return _SparseReducer(order)


def _as_basis_list(basis, order: MonomialOrder | None):
    if isinstance(basis, GroebnerBasis):
        return list(basis.elements), basis.order if order is None else order
    if order is None:
        raise RingError("an explicit monomial order is required for a raw basis list")
    return list(basis), order


def normal_form(p: BoolPoly, basis, order: MonomialOrder | None = None) -> BoolPoly:
    """Remainder of p under multivariate division by the basis.

    No monomial of the result is divisible by any basis leading monomial,
    and p - result lies in the ideal the basis generates.  Ties are broken
    by always dividing by the element with the smallest leading monomial,
    so remainders are deterministic even for non-Groebner bases.
    """
    if isinstance(basis, GroebnerBasis) and (order is None or order == basis.order):
        red = basis._reducer()
        return BoolPoly(p.table, red.reduce(p.monomials))
    polys, order = _as_basis_list(basis, order)
    red = _make_reducer(order)
    for g in polys:
        if not g:
            raise RingError("basis elements must be nonzero")
        red.add(order.leading_monomial(g), g.monomials)
    return BoolPoly(p.table, red.reduce(p.monomials))


def s_polynomial(f: BoolPoly, g: BoolPoly, order: MonomialOrder) -> BoolPoly:
    """Cancel the leading monomials of f and g against their lcm."""
    if not f or not g:
        raise RingError("s-polynomial of the zero polynomial is undefined")
    lmf = order.leading_monomial(f)
    lmg = order.leading_monomial(g)
    lcm = lmf | lmg
    left = _mono_times(lcm & ~lmf, f.monomials)
    right = _mono_times(lcm & ~lmg, g.monomials)
    return BoolPoly(f.table, left ^ right)


_ORDINARY = 0
_FIELD = 1

_SUBMASK_PATTERNS: dict[int, list[int]] = {}


def _submask_patterns(width: int) -> list[int]:
    """patterns[v]: bitmap over all masks m in [0, 2^width) with v not in m."""
    got = _SUBMASK_PATTERNS.get(width)
    if got is None:
        got = []
        for v in range(width):
            block = (1 << (1 << v)) - 1
            period = 1 << (v + 1)
            p = 0
            for k in range(1 << (width - v - 1)):
                p |= block << (k * period)
            got.append(p)
        _SUBMASK_PATTERNS[width] = got
    return got


def _unblocked_lcms(classes: dict[int, tuple[int, bool]], width: int) -> list[int]:
    """Live class lcms not properly divisible by any other class lcm.

    Dead (coprime) classes still act as blockers: that is what makes the
    coprimality shortcut eliminate every pair sharing its lcm.
    """
    if width <= DENSE_MAX_WIDTH:
        closure = 0
        for L in classes:
            closure |= 1 << L
        for v, pattern in enumerate(_submask_patterns(width)):
            closure |= (closure & pattern) << (1 << v)
        out = []
        for L, (_, dead) in classes.items():
            if dead:
                continue
            m = L
            blocked = False
            while m:
                low = m & -m
                m ^= low
                if closure >> (L ^ low) & 1:
                    blocked = True
                    break
            if not blocked:
                out.append(L)
        return out
    return [
        L
        for L, (_, dead) in classes.items()
        if not dead
        and not any(L2 != L and L2 & L == L2 for L2 in classes)
    ]


def buchberger(generators: Sequence[BoolPoly], order: MonomialOrder) -> GroebnerBasis:
    """Complete the generators to the unique reduced basis of their ideal.

    Normal selection strategy: pending pairs are processed smallest lcm
    first.  Ordinary pairs pass through the Gebauer-Moeller filters
    (coprime lcm classes dropped, non-minimal lcms dropped, chained pairs
    pruned); field pairs are exempt from all of them.  Termination holds
    because every accepted remainder has a leading monomial outside the
    monomial ideal spanned so far, and there are finitely many squarefree
    monomials.
    """
    gens = [g for g in generators if g]
    if not gens:
        return GroebnerBasis((), order, True)
    table = gens[0].table
    key = order.key
    width = order.width

    red = _make_reducer(order)
    lms: list[int] = []
    polys: list[frozenset[int]] = []
    # Heap entries: (lcm key, kind, index, other index or variable bit).
    # Ordinary entries may be stale; `alive` is authoritative.
    pairs: list[tuple[int, int, int, int]] = []
    alive: set[tuple[int, int]] = set()

    def add_element(monomials: frozenset[int]) -> None:
        lm = max(monomials, key=key)
        t = len(lms)

        # Chain criterion: the new element may supersede pending pairs.
        for ab in [p for p in alive]:
            a, b = ab
            lab = lms[a] | lms[b]
            if lm & lab == lm and (lms[a] | lm) != lab and (lms[b] | lm) != lab:
                alive.discard(ab)

        # New candidate pairs, grouped into lcm classes.
        classes: dict[int, tuple[int, bool]] = {}
        for i in range(t):
            L = lms[i] | lm
            rep, dead = classes.get(L, (i, False))
            classes[L] = (rep, dead or (lms[i] & lm) == 0)
        keep = {}
        for L in _unblocked_lcms(classes, width):
            keep[L] = classes[L][0]
        for L, rep in sorted(keep.items()):
            alive.add((rep, t))
            heapq.heappush(pairs, (key(L), _ORDINARY, rep, t))

        lms.append(lm)
        polys.append(monomials)
        red.add(lm, monomials)
        m = lm
        while m:
            low = m & -m
            m ^= low
            heapq.heappush(pairs, (key(lm), _FIELD, t, low))

    for g in gens:
        r = red.reduce(g.monomials) if lms else g.monomials
        if r:
            add_element(frozenset(r))

    while pairs:
        _, kind, i, extra = heapq.heappop(pairs)
        if kind == _ORDINARY:
            if (i, extra) not in alive:
                continue
            alive.discard((i, extra))
            r = red.spair_reduce(i, extra)
        else:
            r = red.vmul_reduce(i, extra)
        if r:
            add_element(r)

    return GroebnerBasis(_reduce_final(polys, lms, order, table), order, True)


def _reduce_final(
    polys: list[frozenset[int]],
    lms: list[int],
    order: MonomialOrder,
    table,
) -> tuple[BoolPoly, ...]:
    """Minimalize, then tail-reduce to the unique reduced basis."""
    key = order.key
    indexed = sorted(range(len(polys)), key=lambda i: key(lms[i]))
    kept_lms: list[int] = []
    kept: list[frozenset[int]] = []
    for i in indexed:
        lm = lms[i]
        # A divisor is a subset, hence has a smaller-or-equal key: scanning
        # previously kept (smaller) elements is enough.
        if any(d & lm == d for d in kept_lms):
            continue
        kept_lms.append(lm)
        kept.append(polys[i])

    changed = True
    while changed:
        changed = False
        for idx in range(len(kept)):
            red = _make_reducer(order)
            for j in range(len(kept)):
                if j != idx:
                    red.add(kept_lms[j], kept[j])
            r = red.reduce(kept[idx])
            if r != kept[idx]:
                kept[idx] = frozenset(r)
                changed = True
    return tuple(BoolPoly(table, m) for m in kept)


def is_groebner(basis: GroebnerBasis, generators: Sequence[BoolPoly] = ()) -> bool:
    """Check the completion criteria directly; used by tests and importers.

    (a) every generator reduces to zero, (b) every s-polynomial reduces to
    zero, (c) v*g reduces to zero for every variable v dividing lm(g).
    """
    order = basis.order
    elems = list(basis.elements)
    for g in generators:
        if normal_form(g, basis):
            return False
    for i, f in enumerate(elems):
        lm = order.leading_monomial(f)
        m = lm
        while m:
            low = m & -m
            m ^= low
            if normal_form(BoolPoly(f.table, _mono_times(low, f.monomials)), basis):
                return False
        for g in elems[i + 1 :]:
            if normal_form(s_polynomial(f, g, order), basis):
                return False
    return True
