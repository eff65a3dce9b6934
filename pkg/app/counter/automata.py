"""Rule applicability automata used by the translation.

``G`` is a chain-and-cycle acceptor over unary input: g_1 is the empty count, g_1..g_{x-1}
form the chain and g_x..g_y the cycle. ``G'`` adds the reverse (-s) move of every +s edge so
the automaton can follow a neuron's content down as well as up.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

from app.errors import CmCounterUnderflow
from app.snp.model import RuleSpec
from app.unary import TailCycle, tail_cycle


@dataclass(frozen=True)
class RuleAutomaton:
    x: int
    y: int
    accepts: frozenset[int]
    consume: int
    delay: int
    forgetting: bool

    @property
    def cycle(self) -> TailCycle:
        return TailCycle(self.x, self.y, self.accepts)

    def state_for(self, count: int) -> int:
        return self.cycle.state_after(count)

    def accepts_count(self, count: int) -> bool:
        return self.state_for(count) in self.accepts


def build_G(rule: RuleSpec) -> RuleAutomaton:
    """Acceptor for the counts at which ``rule`` is applicable (always x > b)."""
    cycle = tail_cycle(rule.guard, rule.consume)
    return RuleAutomaton(cycle.x, cycle.y, cycle.accepts, rule.consume, rule.delay, rule.is_forgetting)


@dataclass(frozen=True)
class TrackingAutomaton:
    g: RuleAutomaton
    plus_edges: dict[int, int]
    minus_edges: dict[int, tuple[int, ...]]

    def plus(self, state: int) -> int:
        return self.plus_edges[state]

    def minus(self, state: int, count_before: int) -> int:
        """Undo one spike; the count before removal picks the branch at g_x."""
        options = self.minus_edges.get(state)
        if options is None:
            raise CmCounterUnderflow(f"automaton state g_{state} has no predecessor")
        if len(options) == 1:
            return options[0]
        return self.g.x - 1 if count_before == self.g.x - 1 else self.g.y

    @cached_property
    def ambiguous(self) -> frozenset[int]:
        return frozenset(s for s, options in self.minus_edges.items() if len(options) > 1)


def build_Gprime(g: RuleAutomaton) -> TrackingAutomaton:
    plus = {state: state + 1 for state in range(1, g.y)}
    plus[g.y] = g.x
    minus: dict[int, list[int]] = {}
    for source, target in sorted(plus.items()):
        minus.setdefault(target, []).append(source)
    return TrackingAutomaton(g, plus, {state: tuple(sorted(p)) for state, p in minus.items()})
