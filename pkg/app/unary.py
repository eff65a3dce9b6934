"""Unary regular expressions over {s} and their exact eventually periodic denotation."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Literal, Union as TypingUnion

from lark import Lark, Token, Transformer, v_args
from lark.exceptions import UnexpectedInput, VisitError

from app.errors import ExpressionSyntaxError

EXPR_GRAMMAR = r"""
    start: alt
    alt: cat ("|" cat)*
    cat: atom+
    atom: "s" "^" INT                 -> pow
        | "s"                         -> single
        | "(" "s" ("^" INT)? ")" "*"  -> star

    INT: /[0-9]+/

    %import common.WS
    %ignore WS
"""

_parser = Lark(EXPR_GRAMMAR, parser="lalr", maybe_placeholders=False)


# AST


@dataclass(frozen=True)
class Pow:
    n: int


@dataclass(frozen=True)
class Star:
    p: int


@dataclass(frozen=True)
class Concat:
    parts: tuple["UnaryExpr", ...]


@dataclass(frozen=True)
class Union:
    alternatives: tuple["UnaryExpr", ...]


UnaryExpr = TypingUnion[Pow, Star, Concat, Union]


def _positive(token: Token) -> int:
    value = int(token)
    if value < 1:
        raise ExpressionSyntaxError("exponent must be >= 1", token.line, token.column)
    return value


@v_args(inline=True)
class _ExprBuilder(Transformer):
    def start(self, alt):
        return alt

    def alt(self, *cats):
        return cats[0] if len(cats) == 1 else Union(tuple(cats))

    def cat(self, *atoms):
        return atoms[0] if len(atoms) == 1 else Concat(tuple(atoms))

    def pow(self, exponent):
        return Pow(_positive(exponent))

    def single(self):
        return Pow(1)

    def star(self, exponent=None):
        return Star(1 if exponent is None else _positive(exponent))


def parse_expr(text: str) -> UnaryExpr:
    """Parse concrete syntax like ``s^2(s^16)*`` into an AST."""
    try:
        tree = _parser.parse(text)
        return _ExprBuilder().transform(tree)
    except VisitError as e:
        if isinstance(e.orig_exc, ExpressionSyntaxError):
            raise e.orig_exc from None
        raise
    except UnexpectedInput as e:
        line = e.line if e.line >= 0 else None
        column = e.column if e.column >= 0 else None
        raise ExpressionSyntaxError(f"invalid expression {text!r}", line, column) from None


def format_expr(e: UnaryExpr) -> str:
    if isinstance(e, Pow):
        return "s" if e.n == 1 else f"s^{e.n}"
    if isinstance(e, Star):
        return "(s)*" if e.p == 1 else f"(s^{e.p})*"
    if isinstance(e, Concat):
        return "".join(format_expr(p) for p in e.parts)
    return " | ".join(format_expr(a) for a in e.alternatives)


# Denotation


@dataclass(frozen=True)
class EventuallyPeriodicSet:
    """Set of naturals: ``prefix`` gives membership of 0..threshold-1, ``cycle`` repeats after."""

    threshold: int
    period: int
    prefix: tuple[bool, ...]
    cycle: tuple[bool, ...]

    def __post_init__(self) -> None:
        if self.period < 1 or len(self.cycle) != self.period or len(self.prefix) != self.threshold:
            raise ValueError("inconsistent eventually periodic set")

    def __contains__(self, k: int) -> bool:
        return member(self, k)

    @property
    def is_finite(self) -> bool:
        return not any(self.cycle)

    def is_empty(self) -> bool:
        return self.is_finite and not any(self.prefix)

    def members_upto(self, limit: int) -> list[int]:
        return [k for k in range(limit + 1) if member(self, k)]


EMPTY = EventuallyPeriodicSet(0, 1, (), (False,))


def member(s: EventuallyPeriodicSet, k: int) -> bool:
    if k < 0:
        return False
    if k < s.threshold:
        return s.prefix[k]
    return s.cycle[(k - s.threshold) % s.period]


def canonical(threshold: int, period: int, bits: Iterable[bool]) -> EventuallyPeriodicSet:
    """Canonical set from ``threshold + period`` membership bits (minimal period, then threshold)."""
    bits = tuple(bool(b) for b in bits)
    prefix, cycle = list(bits[:threshold]), list(bits[threshold : threshold + period])
    for p in range(1, period + 1):
        if period % p == 0 and all(cycle[i] == cycle[i % p] for i in range(period)):
            cycle = cycle[:p]
            break
    while prefix and prefix[-1] == cycle[-1]:
        cycle = [prefix.pop()] + cycle[:-1]
    return EventuallyPeriodicSet(len(prefix), len(cycle), tuple(prefix), tuple(cycle))


def singleton(n: int) -> EventuallyPeriodicSet:
    return canonical(n + 1, 1, [k == n for k in range(n + 1)] + [False])


def multiples(p: int) -> EventuallyPeriodicSet:
    return canonical(0, p, [k == 0 for k in range(p)])


def _mask(s: EventuallyPeriodicSet, n: int) -> int:
    mask = 0
    for k in range(min(n, s.threshold)):
        if s.prefix[k]:
            mask |= 1 << k
    if n > s.threshold and not s.is_finite:
        block = sum(1 << j for j, bit in enumerate(s.cycle) if bit)
        k = s.threshold
        while k < n:
            mask |= block << k
            k += s.period
        mask &= (1 << n) - 1
    return mask


def _from_mask(mask: int, threshold: int, period: int) -> EventuallyPeriodicSet:
    return canonical(threshold, period, ((mask >> k) & 1 for k in range(threshold + period)))


def shift(s: EventuallyPeriodicSet, n: int) -> EventuallyPeriodicSet:
    """Minkowski sum with the singleton {n}."""
    if s.is_empty():
        return EMPTY
    return canonical(s.threshold + n, s.period, (False,) * n + s.prefix + s.cycle)


def _union2(a: EventuallyPeriodicSet, b: EventuallyPeriodicSet) -> EventuallyPeriodicSet:
    threshold = max(a.threshold, b.threshold)
    period = math.lcm(a.period, b.period)
    return canonical(
        threshold, period, (member(a, k) or member(b, k) for k in range(threshold + period))
    )


def _sum2(a: EventuallyPeriodicSet, b: EventuallyPeriodicSet) -> EventuallyPeriodicSet:
    if a.is_empty() or b.is_empty():
        return EMPTY
    for x, y in ((a, b), (b, a)):
        if x.is_finite and sum(x.prefix) == 1:
            return shift(y, x.prefix.index(True))
    # Beyond θa + θb + lcm the sum is periodic with the lcm period.
    period = math.lcm(a.period, b.period)
    threshold = a.threshold + b.threshold + period
    n = threshold + period
    mask_a, mask_b = _mask(a, n), _mask(b, n)
    out = 0
    k = 0
    while mask_a >> k:
        if (mask_a >> k) & 1:
            out |= mask_b << k
        k += 1
    return _from_mask(out & ((1 << n) - 1), threshold, period)


def normalize(
    sets: list[EventuallyPeriodicSet], op: Literal["union", "sum"]
) -> EventuallyPeriodicSet:
    """Canonical union or Minkowski sum of a nonempty list of sets."""
    if not sets:
        raise ValueError("normalize needs at least one set")
    combine = _union2 if op == "union" else _sum2
    result = canonical(sets[0].threshold, sets[0].period, sets[0].prefix + sets[0].cycle)
    for s in sets[1:]:
        result = combine(result, s)
    return result


def denote(e: UnaryExpr) -> EventuallyPeriodicSet:
    if isinstance(e, Pow):
        return singleton(e.n)
    if isinstance(e, Star):
        return multiples(e.p)
    if isinstance(e, Concat):
        return normalize([denote(p) for p in e.parts], "sum")
    return normalize([denote(a) for a in e.alternatives], "union")


@lru_cache(maxsize=4096)
def compile_guard(text: str) -> EventuallyPeriodicSet:
    """parse + denote, memoized on the source text."""
    return denote(parse_expr(text))


def intersects_from(a: EventuallyPeriodicSet, b: EventuallyPeriodicSet, low: int) -> bool:
    """True if some k >= low lies in both sets."""
    horizon = max(a.threshold, b.threshold, low) + math.lcm(a.period, b.period)
    return any(member(a, k) and member(b, k) for k in range(low, horizon + 1))


# Chain-and-cycle acceptor


@dataclass(frozen=True)
class TailCycle:
    """States g_1..g_y: chain g_1..g_{x-1}, cycle g_x..g_y; g_1 is the zero-count state."""

    x: int
    y: int
    accepts: frozenset[int]

    @property
    def cycle_length(self) -> int:
        return self.y - self.x + 1

    def state_after(self, k: int) -> int:
        if k + 1 < self.x:
            return k + 1
        return self.x + (k - (self.x - 1)) % self.cycle_length

    def accepts_count(self, k: int) -> bool:
        return self.state_after(k) in self.accepts

    def run(self, k: int) -> int:
        """Feed k spikes one at a time from g_1."""
        state = 1
        for _ in range(k):
            state = self.x if state == self.y else state + 1
        return state


def tail_cycle(s: EventuallyPeriodicSet, b: int) -> TailCycle:
    """Automaton accepting exactly {k in s : k >= b}, with x > b."""
    x = max(s.threshold, b) + 1
    y = x + s.period - 1
    accepts = frozenset(j for j in range(1, y + 1) if j - 1 >= b and member(s, j - 1))
    return TailCycle(x, y, accepts)
