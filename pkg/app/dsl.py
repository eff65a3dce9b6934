"""Text format for SN P systems, counter machines and Turing machines.

Every document starts with a kind keyword (``system``, ``cm`` or ``tm``). ``#`` starts a
comment outside of quoted strings. Printers emit a canonical form that parses back to an
equal object.
"""

from __future__ import annotations

import re
from typing import Mapping, Union

from lark import Lark, Token, Transformer, v_args
from lark.exceptions import UnexpectedInput, VisitError

from app.counter.machine import END_MARKER, CmEntry, CmSpec
from app.errors import DslSyntaxError, ExpressionSyntaxError
from app.snp.model import Mode, Neuron, OutputConvention, RuleSpec, SnpSystem
from app.turing import TmSpec, Transition

_COMMON = r"""
    NAME: /[A-Za-z_][A-Za-z0-9_.\-]*/
    STRING: /"[^"\n]*"/
    COMMENT: /#[^\n]*/

    %import common.INT
    %import common.WS
    %ignore WS
    %ignore COMMENT
"""

SNP_GRAMMAR = r"""
    start: header item*
    header: "system" NAME option*
    ?item: neuron | synapses
    option: NAME "=" (NAME | INT)
    neuron: "neuron" INT option* "{" rule* "}"
    rule: "rule" STRING "/" INT "->" INT ";" INT
    synapses: "synapses" "{" pair* "}"
    pair: "(" INT "," INT ")"
""" + _COMMON

TM_GRAMMAR = r"""
    start: "tm" NAME option* delta*
    option: NAME "=" INT
    delta: "delta" STATE SYMBOL "->" SYMBOL DIR STATE

    STATE: /q[0-9]+/
    SYMBOL: /a[0-9]+/
    DIR: "L" | "R"
""" + _COMMON

CM_GRAMMAR = r"""
    start: "cm" NAME option* entry*
    option: NAME "=" (NAME | INT | STRING)
    entry: "on" STRING NAME COUNTER TRUTH "->" MOVE NAME op
    op: "INC" COUNTER  -> inc
      | "DEC" COUNTER  -> dec
      | "NULL"         -> null

    COUNTER: /c[0-9]+/
    TRUTH: "true" | "false"
    MOVE: "Y" | "N"
""" + _COMMON

_snp_parser = Lark(SNP_GRAMMAR, parser="lalr")
_tm_parser = Lark(TM_GRAMMAR, parser="lalr")
_cm_parser = Lark(CM_GRAMMAR, parser="lalr")

Document = Union[SnpSystem, CmSpec, TmSpec]

_KIND = re.compile(r"(?:\s|#[^\n]*)*(\S+)")


def _fail(message: str, token: Token | None) -> DslSyntaxError:
    if token is None:
        return DslSyntaxError(message)
    return DslSyntaxError(message, token.line, token.column)


def _options(pairs: list[tuple[Token, Token]], allowed: set[str]) -> dict[str, Token]:
    found: dict[str, Token] = {}
    for key, value in pairs:
        if key not in allowed:
            raise _fail(f"unknown option {key!r}", key)
        if key in found:
            raise _fail(f"duplicate option {key!r}", key)
        found[str(key)] = value
    return found


def _require(options: dict[str, Token], key: str, owner: Token) -> Token:
    if key not in options:
        raise _fail(f"missing option {key!r}", owner)
    return options[key]


def _run(parser: Lark, builder: Transformer, text: str):
    try:
        return builder.transform(parser.parse(text))
    except VisitError as e:
        if isinstance(e.orig_exc, DslSyntaxError):
            raise e.orig_exc from None
        raise
    except UnexpectedInput as e:
        line = e.line if e.line >= 0 else None
        column = e.column if e.column >= 0 else None
        raise DslSyntaxError("unexpected input", line, column) from None


# SN P systems


@v_args(inline=True)
class _SnpBuilder(Transformer):
    def option(self, key, value):
        return key, value

    def header(self, name, *options):
        return name, list(options)

    def pair(self, i, j):
        return int(i), int(j), i

    def synapses(self, *pairs):
        return "synapses", list(pairs)

    def rule(self, text, consume, emit, delay):
        expr = text[1:-1]
        b, p, d = int(consume), int(emit), int(delay)
        if b < 1:
            raise _fail("a rule consumes at least one spike", consume)
        if p == 0 and d != 0:
            raise _fail("forgetting rules take delay 0", delay)
        if p > 0 and d < 1:
            raise _fail("spiking rules need delay >= 1", delay)
        try:
            return RuleSpec.of(expr, b, p, d)
        except ExpressionSyntaxError as e:
            raise DslSyntaxError(e.message, text.line, text.column + (e.column or 1)) from None

    def neuron(self, ident, *parts):
        options = [part for part in parts if isinstance(part, tuple)]
        rules = tuple(part for part in parts if isinstance(part, RuleSpec))
        found = _options(options, {"spikes"})
        spikes = found.get("spikes")
        if spikes is not None and spikes.type != "INT":
            raise _fail("spikes must be an integer", spikes)
        return "neuron", Neuron(int(ident), rules, int(spikes or 0)), ident

    def start(self, header, *items):
        name, options = header
        found = _options(options, {"mode", "input", "output", "output_convention"})
        try:
            mode = Mode(str(found.get("mode", "standard")))
        except ValueError:
            raise _fail("mode must be standard, extended or exhaustive", found["mode"]) from None
        try:
            convention = OutputConvention(str(found.get("output_convention", "gap")))
        except ValueError:
            raise _fail("output_convention must be gap or events", found["output_convention"]) from None
        roles = {}
        for role in ("input", "output"):
            token = _require(found, role, name)
            if token.type != "INT":
                raise _fail(f"{role} must be a neuron id", token)
            roles[role] = int(token)

        neurons: dict[int, Neuron] = {}
        synapses: set[tuple[int, int]] = set()
        for kind, payload, *rest in items:
            if kind == "neuron":
                if payload.id in neurons:
                    raise _fail(f"neuron {payload.id} declared twice", rest[0])
                neurons[payload.id] = payload
            else:
                for i, j, token in payload:
                    if i == j:
                        raise _fail(f"synapse ({i},{j}) is reflexive", token)
                    synapses.add((i, j))
        return SnpSystem(
            name=str(name),
            neurons=tuple(neurons[k] for k in sorted(neurons)),
            synapses=frozenset(synapses),
            input=roles["input"],
            output=roles["output"],
            mode=mode,
            output_convention=convention,
        )


def parse_snp(text: str) -> SnpSystem:
    return _run(_snp_parser, _SnpBuilder(), text)


def print_snp(system: SnpSystem, notes: Mapping[tuple[int, int], str] | None = None) -> str:
    """Canonical text; ``notes`` adds a trailing comment to rule (neuron id, rule index)."""
    notes = notes or {}
    lines = [
        f"system {system.name} mode={system.mode.value} input={system.input} "
        f"output={system.output} output_convention={system.output_convention.value}",
        "",
    ]
    for neuron in system.neurons:
        lines.append(f"neuron {neuron.id} spikes={neuron.initial_spikes} {{")
        for index, rule in enumerate(neuron.rules):
            line = f'  rule "{rule.expr}" / {rule.consume} -> {rule.emit} ; {rule.delay}'
            note = notes.get((neuron.id, index))
            lines.append(f"{line}  # {note}" if note else line)
        lines += ["}", ""]
    lines.append("synapses {")
    lines += [f"  ({i},{j})" for i, j in sorted(system.synapses)]
    lines.append("}")
    return "\n".join(lines) + "\n"


# Turing machines


@v_args(inline=True)
class _TmBuilder(Transformer):
    def option(self, key, value):
        return key, value

    def delta(self, state, symbol, write, move, target):
        return state, symbol, write, move, target

    def start(self, name, *parts):
        options = [p for p in parts if len(p) == 2]
        deltas = [p for p in parts if len(p) == 5]
        found = _options(options, {"states", "symbols", "blank", "halt"})
        states = int(_require(found, "states", name))
        symbols = int(_require(found, "symbols", name))
        if states < 1 or symbols < 1:
            raise _fail("a machine needs at least one state and one symbol", name)
        if "blank" in found and int(found["blank"]) != 1:
            raise _fail("the blank symbol is a1", found["blank"])
        if "halt" in found and int(found["halt"]) != states:
            raise _fail(f"the halt state is the last state q{states}", found["halt"])

        table: dict[tuple[int, int], Transition] = {}
        for state, symbol, write, move, target in deltas:
            key = (int(state[1:]), int(symbol[1:]))
            for token, value, limit in (
                (state, key[0], states),
                (symbol, key[1], symbols),
                (write, int(write[1:]), symbols),
                (target, int(target[1:]), states),
            ):
                if not 1 <= value <= limit:
                    raise _fail(f"{token} is out of range", token)
            if key in table:
                raise _fail(f"duplicate transition for ({state}, {symbol})", state)
            table[key] = Transition(int(write[1:]), str(move), int(target[1:]))
        return TmSpec(str(name), states, symbols, table)


def parse_tm(text: str) -> TmSpec:
    return _run(_tm_parser, _TmBuilder(), text)


def print_tm(spec: TmSpec) -> str:
    lines = [f"tm {spec.name} states={spec.states} symbols={spec.symbols} blank=1 halt={spec.halt}"]
    for (state, symbol), rule in sorted(spec.delta.items()):
        lines.append(f"delta q{state} a{symbol} -> a{rule.write} {rule.move} q{rule.next_state}")
    return "\n".join(lines) + "\n"


# Counter machines


@v_args(inline=True)
class _CmBuilder(Transformer):
    def option(self, key, value):
        return key, value

    def inc(self, counter):
        return "INC", counter

    def dec(self, counter):
        return "DEC", counter

    def null(self):
        return "NULL", None

    def entry(self, symbol, state, counter, truth, move, target, op):
        return symbol, state, counter, truth, move, target, op

    def start(self, name, *parts):
        options = [p for p in parts if len(p) == 2]
        raw = [p for p in parts if len(p) == 7]
        found = _options(options, {"counters", "output", "alphabet", "initial", "halt"})
        counters = int(_require(found, "counters", name))
        output = int(_require(found, "output", name))
        if not 1 <= output <= counters:
            raise _fail(f"output counter {output} out of range 1..{counters}", found["output"])
        alphabet_token = found.get("alphabet")
        alphabet = tuple(str(alphabet_token)[1:-1]) if alphabet_token else ("0", "1", END_MARKER)
        if END_MARKER not in alphabet:
            alphabet += (END_MARKER,)

        def index(token: Token) -> int:
            value = int(token[1:])
            if not 1 <= value <= counters:
                raise _fail(f"counter {token} out of range c1..c{counters}", token)
            return value

        entries = []
        for symbol, state, counter, truth, move, target, (op, op_counter) in raw:
            char = symbol[1:-1]
            if len(char) != 1 or char not in alphabet:
                raise _fail(f"symbol {symbol} is not in the alphabet", symbol)
            tested = index(counter)
            changed = index(op_counter) if op_counter is not None else None
            if op == "DEC" and (changed != tested or truth != "true"):
                raise _fail("DEC must test its own counter for true", op_counter)
            entries.append(
                CmEntry(char, str(state), tested, truth == "true", move == "Y", str(target), op, changed)
            )
        return CmSpec(
            name=str(name),
            counters=counters,
            output=output,
            initial=str(found.get("initial", "q0")),
            halt=str(found.get("halt", "qh")),
            alphabet=alphabet,
            entries=tuple(entries),
        )


def parse_cm(text: str) -> CmSpec:
    return _run(_cm_parser, _CmBuilder(), text)


def print_cm(spec: CmSpec) -> str:
    alphabet = "".join(spec.alphabet)
    lines = [
        f'cm {spec.name} counters={spec.counters} output={spec.output} alphabet="{alphabet}" '
        f"initial={spec.initial} halt={spec.halt}"
    ]
    for e in spec.entries:
        op = "NULL" if e.op == "NULL" else f"{e.op} c{e.target}"
        move = "Y" if e.move else "N"
        lines.append(
            f'on "{e.symbol}" {e.state} c{e.counter} {str(e.truth).lower()} -> {move} {e.next_state} {op}'
        )
    return "\n".join(lines) + "\n"


def parse_document(text: str) -> Document:
    """Dispatch on the leading kind keyword."""
    match = _KIND.match(text)
    if match is None:
        raise DslSyntaxError("empty document")
    parser = {"system": parse_snp, "tm": parse_tm, "cm": parse_cm}.get(match.group(1))
    if parser is None:
        line = text.count("\n", 0, match.start(1)) + 1
        column = match.start(1) - text.rfind("\n", 0, match.start(1))
        raise DslSyntaxError(f"unknown document kind {match.group(1)!r}", line, column)
    return parser(text)
