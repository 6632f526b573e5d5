"""Arithmetic in the Boolean quotient ring GF(2)[v1..vn] / (vi^2 + vi).

Every monomial is squarefree, so a monomial is just a set of variables and
is stored as a plain int bitmask (bit i = variable i of the table, at most
63 variables).  A polynomial is a set of monomials; a monomial is present
iff its coefficient is 1.  Addition is symmetric difference, multiplication
distributes pairwise unions and cancels collisions mod 2.
"""

from __future__ import annotations

import string
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .errors import LodanaError

MAX_VARIABLES = 63

# Characters that can never serve as variable codes: they belong to the
# polynomial grammar (or would be unreadable in it).
RESERVED_CODE_CHARS = frozenset("+*()01") | frozenset(string.whitespace)

DEGLEX = "deglex"
DEGREVLEX = "degrevlex"
LEX = "lex"
ORDER_KINDS = (DEGLEX, DEGREVLEX, LEX)


class RingError(LodanaError, ValueError):
    """Ill-formed ring value, or values from different variable tables."""


class PolyParseError(RingError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


def mono_mul(a: int, b: int) -> int:
    """Idempotent monomial product: union of the two variable sets."""
    return a | b


def mono_degree(m: int) -> int:
    return m.bit_count()


def _mono_times(mask: int, monomials: Iterable[int]) -> frozenset[int]:
    """Multiply a polynomial (as monomial set) by one monomial, mod 2.

    Distinct monomials can collapse onto the same union and must cancel
    in pairs, hence the parity fold instead of a plain set comprehension.
    """
    parity: dict[int, int] = {}
    for t in monomials:
        u = t | mask
        parity[u] = parity.get(u, 0) ^ 1
    return frozenset(u for u, c in parity.items() if c)


@dataclass(frozen=True)
class Variable:
    name: str
    code: str


@dataclass(frozen=True)
class VariableTable:
    """Ordered variable descriptors; exactly one is the class variable."""

    variables: tuple[Variable, ...]
    class_index: int

    def __post_init__(self) -> None:
        if not self.variables:
            raise RingError("variable table needs at least the class variable")
        if len(self.variables) > MAX_VARIABLES:
            raise RingError(f"at most {MAX_VARIABLES} variables are supported")
        if not 0 <= self.class_index < len(self.variables):
            raise RingError("class index out of range")
        seen: dict[str, int] = {}
        for i, v in enumerate(self.variables):
            if len(v.code) != 1 or not v.code.isprintable() or v.code in RESERVED_CODE_CHARS:
                raise RingError(f"invalid variable code {v.code!r}")
            if v.code in seen:
                raise RingError(f"duplicate variable code {v.code!r}")
            seen[v.code] = i
        object.__setattr__(self, "_by_code", seen)

    @classmethod
    def from_codes(cls, codes: str, class_code: str | None = None) -> "VariableTable":
        """Build a table of single-letter variables; class defaults to the last code."""
        if class_code is None:
            class_code = codes[-1]
        if class_code not in codes:
            raise RingError(f"class code {class_code!r} not among {codes!r}")
        return cls(tuple(Variable(c, c) for c in codes), codes.index(class_code))

    @property
    def width(self) -> int:
        return len(self.variables)

    @property
    def codes(self) -> tuple[str, ...]:
        return tuple(v.code for v in self.variables)

    @property
    def class_code(self) -> str:
        return self.variables[self.class_index].code

    @property
    def class_mask(self) -> int:
        return 1 << self.class_index

    @property
    def full_mask(self) -> int:
        return (1 << self.width) - 1

    @property
    def feature_indices(self) -> tuple[int, ...]:
        return tuple(i for i in range(self.width) if i != self.class_index)

    def index(self, code: str) -> int:
        try:
            return self._by_code[code]  # type: ignore[attr-defined]
        except KeyError:
            raise RingError(f"unknown variable code {code!r}") from None

    def monomial(self, codes: str) -> int:
        """Monomial mask from juxtaposed codes; '' is the constant monomial 1."""
        m = 0
        for c in codes:
            m |= 1 << self.index(c)
        return m

    def monomial_codes(self, mask: int) -> str:
        """Render a monomial: codes in table order, '1' for the constant."""
        if mask == 0:
            return "1"
        return "".join(v.code for i, v in enumerate(self.variables) if mask >> i & 1)

    def zero(self) -> "BoolPoly":
        return BoolPoly(self, frozenset())

    def one(self) -> "BoolPoly":
        return BoolPoly(self, frozenset((0,)))

    def var(self, code: str) -> "BoolPoly":
        return BoolPoly(self, frozenset((1 << self.index(code),)))

    def to_doc(self) -> dict:
        return {
            "variables": [
                {"name": v.name, "code": v.code, "class": i == self.class_index}
                for i, v in enumerate(self.variables)
            ]
        }

    @classmethod
    def from_doc(cls, doc: dict) -> "VariableTable":
        entries = doc["variables"]
        class_indices = [i for i, e in enumerate(entries) if e.get("class")]
        if len(class_indices) != 1:
            raise RingError("variable document must flag exactly one class variable")
        return cls(
            tuple(Variable(e["name"], e["code"]) for e in entries),
            class_indices[0],
        )


@dataclass(frozen=True)
class BoolPoly:
    """A polynomial of the quotient ring: a frozen set of monomial masks."""

    table: VariableTable
    monomials: frozenset[int]

    def __post_init__(self) -> None:
        full = self.table.full_mask
        for m in self.monomials:
            if not 0 <= m <= full:
                raise RingError(f"monomial mask {m:#x} outside the variable table")

    @classmethod
    def from_masks(cls, table: VariableTable, masks: Iterable[int]) -> "BoolPoly":
        """Parity-folds duplicates so repeated masks cancel mod 2."""
        parity: dict[int, int] = {}
        for m in masks:
            parity[m] = parity.get(m, 0) ^ 1
        return cls(table, frozenset(m for m, c in parity.items() if c))

    def _check_same_table(self, other: "BoolPoly") -> None:
        if self.table != other.table:
            raise RingError("polynomials belong to different variable tables")

    def __add__(self, other: "BoolPoly") -> "BoolPoly":
        self._check_same_table(other)
        return BoolPoly(self.table, self.monomials ^ other.monomials)

    def __mul__(self, other: "BoolPoly") -> "BoolPoly":
        self._check_same_table(other)
        parity: dict[int, int] = {}
        for a in self.monomials:
            for b in other.monomials:
                u = a | b
                parity[u] = parity.get(u, 0) ^ 1
        return BoolPoly(self.table, frozenset(u for u, c in parity.items() if c))

    def __bool__(self) -> bool:
        return bool(self.monomials)

    def __len__(self) -> int:
        return len(self.monomials)

    @property
    def is_zero(self) -> bool:
        return not self.monomials

    @property
    def is_one(self) -> bool:
        return self.monomials == frozenset((0,))

    @property
    def support_mask(self) -> int:
        """Union of all variables occurring anywhere in the polynomial."""
        m = 0
        for t in self.monomials:
            m |= t
        return m

    def mentions(self, code: str) -> bool:
        return bool(self.support_mask >> self.table.index(code) & 1)

    def eval_mask(self, assignment: int) -> int:
        """Evaluate at a full 0/1 assignment packed as a mask (bit i = variable i)."""
        acc = 0
        for m in self.monomials:
            if m & assignment == m:
                acc ^= 1
        return acc

    def evaluate(self, assignment: Mapping[str, int]) -> int:
        """Evaluate with per-code values; all occurring variables must be covered."""
        mask = 0
        covered = 0
        for code, value in assignment.items():
            i = self.table.index(code)
            covered |= 1 << i
            if value not in (0, 1):
                raise RingError(f"assignment for {code!r} must be 0 or 1")
            if value:
                mask |= 1 << i
        missing = self.support_mask & ~covered
        if missing:
            names = self.table.monomial_codes(missing)
            raise RingError(f"assignment is missing variables: {names}")
        return self.eval_mask(mask)

    def render(self, order: "MonomialOrder | None" = None) -> str:
        if not self.monomials:
            return "0"
        if order is None:
            order = MonomialOrder.default(self.table)
        monos = sorted(self.monomials, key=order.key, reverse=True)
        return " + ".join(self.table.monomial_codes(m) for m in monos)

    def __str__(self) -> str:
        return self.render()

    def __repr__(self) -> str:
        return f"BoolPoly({self.render()!r})"


def poly_add(p: BoolPoly, q: BoolPoly) -> BoolPoly:
    return p + q


def poly_mul(p: BoolPoly, q: BoolPoly) -> BoolPoly:
    return p * q


def poly_eval(p: BoolPoly, assignment: Mapping[str, int]) -> int:
    return p.evaluate(assignment)


@dataclass(frozen=True)
class MonomialOrder:
    """A total order on squarefree monomials, encoded as an integer key.

    kind is one of deglex | degrevlex | lex; precedence lists variable
    indices from highest to lowest.  Keys compare like the order, which
    keeps hot loops on plain int comparisons.
    """

    kind: str
    precedence: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.kind not in ORDER_KINDS:
            raise RingError(f"unknown order kind {self.kind!r}")
        n = len(self.precedence)
        if sorted(self.precedence) != list(range(n)):
            raise RingError("precedence must be a permutation of the variable indices")
        weights = [0] * n
        for rank, i in enumerate(self.precedence):
            if self.kind == DEGREVLEX:
                weights[i] = 1 << rank
            else:
                weights[i] = 1 << (n - 1 - rank)
        object.__setattr__(self, "_weights", tuple(weights))
        object.__setattr__(self, "_full", (1 << n) - 1)
        object.__setattr__(self, "_cache", {})

    @classmethod
    def default(cls, table: VariableTable, kind: str = DEGLEX) -> "MonomialOrder":
        """Table sequence as precedence, with the class variable demoted to last."""
        prec = tuple(i for i in range(table.width) if i != table.class_index)
        return cls(kind, prec + (table.class_index,))

    @property
    def width(self) -> int:
        return len(self.precedence)

    def key(self, mask: int) -> int:
        cache: dict[int, int] = self._cache  # type: ignore[attr-defined]
        k = cache.get(mask)
        if k is None:
            k = self._compute_key(mask)
            cache[mask] = k
        return k

    def _compute_key(self, mask: int) -> int:
        weights = self._weights  # type: ignore[attr-defined]
        v = 0
        m = mask
        while m:
            low = m & -m
            v += weights[low.bit_length() - 1]
            m ^= low
        if self.kind == LEX:
            return v
        d = mask.bit_count()
        if self.kind == DEGLEX:
            return (d << self.width) | v
        return (d << self.width) | (self._full ^ v)  # type: ignore[attr-defined]

    def leading_monomial(self, p: BoolPoly) -> int:
        if not p.monomials:
            raise RingError("the zero polynomial has no leading monomial")
        return max(p.monomials, key=self.key)

    def to_doc(self, table: VariableTable) -> dict:
        return {
            "kind": self.kind,
            "precedence": [table.variables[i].code for i in self.precedence],
        }

    @classmethod
    def from_doc(cls, doc: dict, table: VariableTable) -> "MonomialOrder":
        prec = tuple(table.index(c) for c in doc["precedence"])
        if len(prec) != table.width:
            raise RingError("order precedence does not cover the variable table")
        return cls(doc["kind"], prec)


def leading_monomial(p: BoolPoly, order: MonomialOrder) -> int:
    return order.leading_monomial(p)


ANF_MAX_VARIABLES = 20


def anf_from_truth_table(table: VariableTable, values: Sequence[int]) -> BoolPoly:
    """Algebraic normal form of a map {0,1}^n -> {0,1}.

    values[a] is the function value at the assignment packed as mask a.
    Moebius transform over the subset lattice; capped at 20 variables.
    """
    n = table.width
    if n > ANF_MAX_VARIABLES:
        raise RingError(f"truth tables are limited to {ANF_MAX_VARIABLES} variables")
    size = 1 << n
    if len(values) != size:
        raise RingError(f"expected {size} truth-table entries, got {len(values)}")
    arr = [v & 1 for v in values]
    for j in range(n):
        bit = 1 << j
        for m in range(size):
            if m & bit:
                arr[m] ^= arr[m ^ bit]
    return BoolPoly(table, frozenset(m for m in range(size) if arr[m]))


def truth_table(p: BoolPoly) -> list[int]:
    """Exhaustive evaluation over all assignments; inverse of anf_from_truth_table."""
    n = p.table.width
    if n > ANF_MAX_VARIABLES:
        raise RingError(f"truth tables are limited to {ANF_MAX_VARIABLES} variables")
    return [p.eval_mask(a) for a in range(1 << n)]


def parse_poly(text: str, table: VariableTable) -> BoolPoly:
    """Parse the textual polynomial syntax.

    Grammar (whitespace ignored):
        expr   := term ('+' term)*
        term   := factor (['*'] factor)*
        factor := CODE | '0' | '1' | '(' expr ')'
    Juxtaposition multiplies, so 'FTs(y+1)' is F*T*s*(y+1).
    """
    pos = 0
    n = len(text)

    def skip_ws() -> None:
        nonlocal pos
        while pos < n and text[pos].isspace():
            pos += 1

    def peek() -> str | None:
        skip_ws()
        return text[pos] if pos < n else None

    def parse_factor() -> BoolPoly:
        nonlocal pos
        c = peek()
        if c is None:
            raise PolyParseError("expected a factor", pos)
        if c == "(":
            pos += 1
            inner = parse_expr()
            if peek() != ")":
                raise PolyParseError("missing ')'", pos)
            pos += 1
            return inner
        if c == "0":
            pos += 1
            return table.zero()
        if c == "1":
            pos += 1
            return table.one()
        if c in RESERVED_CODE_CHARS:
            raise PolyParseError(f"unexpected {c!r}", pos)
        pos += 1
        try:
            return table.var(c)
        except RingError:
            raise PolyParseError(f"unknown variable code {c!r}", pos - 1) from None

    def parse_term() -> BoolPoly:
        nonlocal pos
        acc = parse_factor()
        while True:
            c = peek()
            if c == "*":
                pos += 1
                acc = acc * parse_factor()
            elif c is not None and c not in ("+", ")"):
                acc = acc * parse_factor()
            else:
                return acc

    def parse_expr() -> BoolPoly:
        nonlocal pos
        acc = parse_term()
        while peek() == "+":
            pos += 1
            acc = acc + parse_term()
        return acc

    result = parse_expr()
    if peek() is not None:
        raise PolyParseError(f"unexpected trailing {text[pos]!r}", pos)
    return result


def render_factored(factors: Sequence[BoolPoly], order: MonomialOrder | None = None) -> str:
    """Display a product of factors: single monomials bare, sums parenthesized."""
    parts = []
    for f in factors:
        if len(f.monomials) == 1:
            parts.append(f.render(order))
        else:
            parts.append(f"({f.render(order)})")
    return " ".join(parts)
