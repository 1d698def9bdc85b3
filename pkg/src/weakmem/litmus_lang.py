"""The litmus-test language: parsing and thread-local semantics.

Programs are parallel threads of loads, stores and fences over a small
set of shared locations.  Store arguments are expressions over
registers, constants, + and *.  There are no branches, so a thread is a
straight line and its behavior is a pure function of the values its
loads return.  Dependency extraction is syntactic: a load feeds every
later instruction whose expression mentions the load's register, even
when the operand is dead (1 + a * 0 still depends on a).

File format, line oriented:

    locations x y z;
    values 0 1;            // optional, default 0 1
    r1 = load(rlx, x)
    store(rlx, y, 1)
    |||
    r2 = load(rlx, y)
    store(rlx, x, r2)
    exists (r1 = 1 && r2 = 1)
    allow imm immsc
    forbid rc11

``//`` starts a comment.  ``allow``/``forbid`` lines attach expected
per-model verdicts to the preceding ``exists`` clause.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import cached_property
from typing import Dict, List, Optional, Sequence, Tuple

from .relational_core import Rel

MODES = ("rlx", "acq", "rel", "acqrel", "sc")
MODELS = ("imm", "immsc", "rc11", "tso", "armv8", "weakestmo")

# Expressions are nested tuples:
#   ("const", n) | ("reg", name) | ("add", a, b) | ("mul", a, b)
Expr = tuple


class ParseError(ValueError):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"line {line}, col {col}: {message}")
        self.line = line
        self.col = col


class ArityError(ValueError):
    """read_values does not supply a value for every load."""


def eval_expr(expr: Expr, env: Dict[str, int]) -> int:
    op = expr[0]
    if op == "const":
        return expr[1]
    if op == "reg":
        if expr[1] not in env:
            raise ValueError(f"register {expr[1]!r} used before assignment")
        return env[expr[1]]
    if op == "add":
        return eval_expr(expr[1], env) + eval_expr(expr[2], env)
    if op == "mul":
        return eval_expr(expr[1], env) * eval_expr(expr[2], env)
    raise ValueError(f"bad expression node {op!r}")


def expr_registers(expr: Expr) -> frozenset:
    """All registers appearing syntactically, dead operands included."""
    op = expr[0]
    if op == "const":
        return frozenset()
    if op == "reg":
        return frozenset({expr[1]})
    return expr_registers(expr[1]) | expr_registers(expr[2])


@dataclass(frozen=True)
class Instruction:
    kind: str  # load | store | fence
    mode: str
    register: Optional[str] = None  # loads
    location: Optional[str] = None  # loads and stores
    expr: Optional[Expr] = None  # stores


@dataclass(frozen=True)
class Label:
    kind: str  # R | W | F
    mode: str
    loc: Optional[str] = None  # R/W only
    val: Optional[int] = None  # R/W only

    def __str__(self) -> str:
        if self.kind == "F":
            return f"F^{self.mode}"
        return f"{self.kind}^{self.mode}({self.loc},{self.val})"


@dataclass(frozen=True)
class Assertion:
    """An exists clause plus its expected per-model verdicts."""

    conds: Tuple[Tuple[str, int], ...]  # (register, value) conjuncts
    expect: Tuple[Tuple[str, str], ...] = ()  # (model, "allow"|"forbid")

    def expected(self) -> Dict[str, str]:
        return dict(self.expect)

    def __str__(self) -> str:
        return " && ".join(f"{r} = {v}" for r, v in self.conds)


@dataclass(frozen=True)
class Program:
    threads: Tuple[Tuple[int, Tuple[Instruction, ...]], ...]
    locations: frozenset
    value_domain: frozenset
    assertions: Tuple[Assertion, ...] = ()

    @cached_property
    def thread_map(self) -> Dict[int, Tuple[Instruction, ...]]:
        return dict(self.threads)

    @property
    def thread_ids(self) -> Tuple[int, ...]:
        return tuple(t for t, _ in self.threads)

    def thread(self, t: int) -> Tuple[Instruction, ...]:
        return self.thread_map[t]

    def loads_of(self, t: int) -> int:
        return sum(1 for ins in self.thread(t) if ins.kind == "load")

    @cached_property
    def register_thread(self) -> Dict[str, int]:
        """Which thread assigns each register; registers unique per file
        may still repeat across threads, in which case outcome clauses
        must not reference them."""
        seen: Dict[str, int] = {}
        for t, instrs in self.threads:
            for ins in instrs:
                if ins.kind == "load":
                    if ins.register in seen and seen[ins.register] != t:
                        seen[ins.register] = -1  # ambiguous
                    else:
                        seen.setdefault(ins.register, t)
        return seen


@dataclass(frozen=True)
class Trace:
    """One thread's deterministic run for fixed read values."""

    events: Tuple[Tuple[tuple, Label], ...]
    data: Rel  # load event -> later event using its register


# ---------------------------------------------------------------------------
# Tokenizer and parser

_TOKEN_RE = re.compile(
    r"(?P<ws>\s+)|(?P<ident>[A-Za-z_]\w*)|(?P<num>\d+)|(?P<op>&&|[=(),+*;])"
)


def _tokenize(text: str, line: int) -> List[Tuple[str, str, int]]:
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos + 1)
        if m.lastgroup != "ws":
            out.append((m.lastgroup, m.group(), pos + 1))
        pos = m.end()
    return out


class _Cursor:
    def __init__(self, tokens, line):
        self.tokens = tokens
        self.line = line
        self.i = 0

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def next(self):
        tok = self.peek()
        if tok is None:
            raise ParseError("unexpected end of line", self.line, 1)
        self.i += 1
        return tok

    def expect(self, kind, value=None):
        tok = self.peek()
        if tok is None:
            want = value or kind
            raise ParseError(f"expected {want!r}", self.line, 1)
        if tok[0] != kind or (value is not None and tok[1] != value):
            want = value or kind
            raise ParseError(f"expected {want!r}, got {tok[1]!r}", self.line, tok[2])
        self.i += 1
        return tok

    def done(self):
        tok = self.peek()
        if tok is not None:
            raise ParseError(f"trailing input {tok[1]!r}", self.line, tok[2])


def _parse_mode(cur: _Cursor, kind: str) -> str:
    tok = cur.expect("ident")
    mode = tok[1]
    if mode not in MODES:
        raise ParseError(f"unknown mode {mode!r}", cur.line, tok[2])
    if kind == "load" and mode == "rel":
        raise ParseError("loads cannot use mode 'rel'", cur.line, tok[2])
    if kind == "store" and mode == "acq":
        raise ParseError("stores cannot use mode 'acq'", cur.line, tok[2])
    return mode


def _parse_atom(cur: _Cursor) -> Expr:
    tok = cur.next()
    if tok[0] == "num":
        return ("const", int(tok[1]))
    if tok[0] == "ident":
        return ("reg", tok[1])
    raise ParseError(f"expected register or constant, got {tok[1]!r}", cur.line, tok[2])


def _parse_term(cur: _Cursor) -> Expr:
    left = _parse_atom(cur)
    while True:
        tok = cur.peek()
        if tok and tok[0] == "op" and tok[1] == "*":
            cur.next()
            left = ("mul", left, _parse_atom(cur))
        else:
            return left


def _parse_expr(cur: _Cursor) -> Expr:
    left = _parse_term(cur)
    while True:
        tok = cur.peek()
        if tok and tok[0] == "op" and tok[1] == "+":
            cur.next()
            left = ("add", left, _parse_term(cur))
        else:
            return left


def _parse_instruction(cur: _Cursor) -> Instruction:
    head = cur.expect("ident")
    if head[1] == "store":
        cur.expect("op", "(")
        mode = _parse_mode(cur, "store")
        cur.expect("op", ",")
        loc = cur.expect("ident")[1]
        cur.expect("op", ",")
        expr = _parse_expr(cur)
        cur.expect("op", ")")
        cur.done()
        return Instruction("store", mode, location=loc, expr=expr)
    if head[1] == "fence":
        cur.expect("op", "(")
        mode = _parse_mode(cur, "fence")
        cur.expect("op", ")")
        cur.done()
        return Instruction("fence", mode)
    # register = load(mode, loc)
    reg = head[1]
    cur.expect("op", "=")
    kw = cur.expect("ident")
    if kw[1] != "load":
        raise ParseError(f"expected 'load', got {kw[1]!r}", cur.line, kw[2])
    cur.expect("op", "(")
    mode = _parse_mode(cur, "load")
    cur.expect("op", ",")
    loc = cur.expect("ident")[1]
    cur.expect("op", ")")
    cur.done()
    return Instruction("load", mode, register=reg, location=loc)


def parse_litmus(text: str) -> Program:
    locations: Optional[List[str]] = None
    values: Optional[List[int]] = None
    thread_bufs: List[List[Tuple[int, Instruction]]] = [[]]
    assertions: List[Assertion] = []
    in_assertions = False

    for lineno, raw in enumerate(text.splitlines(), start=1):
        content = raw.split("//", 1)[0].rstrip()
        if not content.strip():
            continue
        if content.strip() == "|||":
            if in_assertions:
                raise ParseError("thread separator after exists clause", lineno, 1)
            thread_bufs.append([])
            continue
        tokens = _tokenize(content, lineno)
        cur = _Cursor(tokens, lineno)
        head = tokens[0]

        if head[0] == "ident" and head[1] == "locations":
            if locations is not None:
                raise ParseError("duplicate locations header", lineno, head[2])
            cur.next()
            locations = []
            while cur.peek() and cur.peek()[0] == "ident":
                locations.append(cur.next()[1])
            cur.expect("op", ";")
            cur.done()
            continue
        if head[0] == "ident" and head[1] == "values":
            if values is not None:
                raise ParseError("duplicate values header", lineno, head[2])
            cur.next()
            values = []
            while cur.peek() and cur.peek()[0] == "num":
                values.append(int(cur.next()[1]))
            cur.expect("op", ";")
            cur.done()
            if not values:
                raise ParseError("empty value domain", lineno, head[2])
            continue
        if head[0] == "ident" and head[1] == "exists":
            cur.next()
            cur.expect("op", "(")
            conds = []
            while True:
                reg = cur.expect("ident")[1]
                cur.expect("op", "=")
                num = int(cur.expect("num")[1])
                conds.append((reg, num))
                tok = cur.peek()
                if tok and tok[0] == "op" and tok[1] == "&&":
                    cur.next()
                    continue
                break
            cur.expect("op", ")")
            cur.done()
            assertions.append(Assertion(tuple(conds)))
            in_assertions = True
            continue
        if head[0] == "ident" and head[1] in ("allow", "forbid"):
            if not assertions:
                raise ParseError(f"{head[1]!r} line without exists clause", lineno, head[2])
            verdict = head[1]
            cur.next()
            models = []
            while cur.peek() and cur.peek()[0] == "ident":
                tok = cur.next()
                if tok[1] not in MODELS:
                    raise ParseError(f"unknown model {tok[1]!r}", lineno, tok[2])
                models.append(tok[1])
            cur.done()
            if not models:
                raise ParseError(f"empty {verdict!r} list", lineno, head[2])
            last = assertions[-1]
            expect = dict(last.expect)
            for m in models:
                if m in expect and expect[m] != verdict:
                    raise ParseError(f"conflicting expectation for {m!r}", lineno, head[2])
                expect[m] = verdict
            assertions[-1] = Assertion(last.conds, tuple(sorted(expect.items())))
            continue

        if in_assertions:
            raise ParseError("instruction after exists clause", lineno, head[2])
        instr = _parse_instruction(cur)
        thread_bufs[-1].append((lineno, instr))

    # assemble threads
    if all(not buf for buf in thread_bufs):
        threads: Tuple[Tuple[int, Tuple[Instruction, ...]], ...] = ()
    else:
        for idx, buf in enumerate(thread_bufs, start=1):
            if not buf:
                raise ParseError(f"thread {idx} is empty", 1, 1)
        threads = tuple(
            (idx, tuple(ins for _, ins in buf))
            for idx, buf in enumerate(thread_bufs, start=1)
        )

    locset = frozenset(locations or ())
    # static checks: declared locations, assign-before-use
    for t, _ in threads:
        assigned = set()
        for lineno, ins in thread_bufs[t - 1]:
            if ins.location is not None and ins.location not in locset:
                raise ParseError(f"location {ins.location!r} not declared", lineno, 1)
            if ins.kind == "store":
                for r in sorted(expr_registers(ins.expr)):
                    if r not in assigned:
                        raise ParseError(
                            f"register {r!r} used before assignment", lineno, 1
                        )
            if ins.kind == "load":
                assigned.add(ins.register)

    program = Program(
        threads=threads,
        locations=locset,
        value_domain=frozenset(values if values is not None else (0, 1)),
        assertions=tuple(assertions),
    )
    # outcome clauses must name unambiguous registers
    for a in assertions:
        for reg, _ in a.conds:
            owner = program.register_thread.get(reg)
            if owner is None:
                raise ParseError(f"exists clause names unknown register {reg!r}", 1, 1)
            if owner == -1:
                raise ParseError(
                    f"exists clause register {reg!r} is assigned in several threads", 1, 1
                )
    return program


# ---------------------------------------------------------------------------
# Thread semantics


def run_thread(p: Program, t: int, read_values: Sequence[int]) -> Trace:
    """Deterministic straight-line run of thread t.

    read_values supplies one value per load in program order; extras are
    ignored, which makes prefix evaluation easy (pad and slice).
    """
    try:
        instrs = p.thread(t)
    except KeyError:
        raise ValueError(f"no thread {t} in program") from None
    env: Dict[str, int] = {}
    taint: Dict[str, int] = {}  # register -> serial of the load that set it
    events: List[Tuple[tuple, Label]] = []
    data_pairs = set()
    vi = 0
    for serial, ins in enumerate(instrs, start=1):
        eid = (t, serial)
        if ins.kind == "load":
            if vi >= len(read_values):
                raise ArityError(
                    f"thread {t} needs {p.loads_of(t)} read values, got {len(read_values)}"
                )
            v = read_values[vi]
            vi += 1
            events.append((eid, Label("R", ins.mode, ins.location, v)))
            env[ins.register] = v
            taint[ins.register] = serial
        elif ins.kind == "store":
            v = eval_expr(ins.expr, env)
            events.append((eid, Label("W", ins.mode, ins.location, v)))
            for r in expr_registers(ins.expr):
                if r in taint:
                    data_pairs.add(((t, taint[r]), eid))
        else:
            events.append((eid, Label("F", ins.mode)))
    carrier = frozenset(e for e, _ in events)
    return Trace(tuple(events), Rel(data_pairs, carrier))


def enumerate_executions(p: Program):
    """All complete well-formed execution candidates of p.

    Read values range over the program's value domain; reads whose value
    has no same-location write of that value (initialization writes of 0
    included) make the candidate incomplete and it is dropped.  rf picks
    any matching write, co any per-location total order with the
    initialization write first.  Consistency is not checked here, that
    is the model checkers' job.
    """
    from itertools import permutations, product

    from .exec_graph import build_graph

    thread_ids = list(p.thread_ids)
    load_counts = [p.loads_of(t) for t in thread_ids]
    total_loads = sum(load_counts)
    domain = sorted(p.value_domain)
    out = set()

    for assignment in product(domain, repeat=total_loads):
        traces = {}
        offset = 0
        for t, n in zip(thread_ids, load_counts):
            traces[t] = run_thread(p, t, assignment[offset : offset + n])
            offset += n
        labels = {t: [lab for _, lab in traces[t].events] for t in thread_ids}
        data_pairs = set()
        for t in thread_ids:
            data_pairs |= traces[t].data.pairs

        # writes available per (location, value), initialization included
        writes_by_locval: Dict[Tuple[str, int], List[tuple]] = {}
        writes_by_loc: Dict[str, List[tuple]] = {loc: [] for loc in p.locations}
        for loc in p.locations:
            writes_by_locval.setdefault((loc, 0), []).append((0, loc))
        for t in thread_ids:
            for eid, lab in traces[t].events:
                if lab.kind == "W":
                    writes_by_locval.setdefault((lab.loc, lab.val), []).append(eid)
                    writes_by_loc[lab.loc].append(eid)

        reads = [
            (eid, lab)
            for t in thread_ids
            for eid, lab in traces[t].events
            if lab.kind == "R"
        ]
        rf_choices = []
        complete = True
        for eid, lab in reads:
            cands = writes_by_locval.get((lab.loc, lab.val), [])
            if not cands:
                complete = False
                break
            rf_choices.append([(w, eid) for w in cands])
        if not complete:
            continue

        co_per_loc = []
        for loc in sorted(p.locations):
            orders = []
            for perm in permutations(writes_by_loc[loc]):
                chain = [(0, loc)] + list(perm)
                orders.append(
                    frozenset(
                        (chain[i], chain[j])
                        for i in range(len(chain))
                        for j in range(i + 1, len(chain))
                    )
                )
            co_per_loc.append(orders)

        for rf_pick in product(*rf_choices):
            for co_pick in product(*co_per_loc):
                co_pairs = frozenset().union(*co_pick) if co_pick else frozenset()
                out.add(
                    build_graph(labels, p.locations, frozenset(rf_pick), co_pairs, frozenset(data_pairs))
                )
    return out
