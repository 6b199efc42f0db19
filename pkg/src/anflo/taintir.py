"""Mini program IR and static taint analysis.

A program is a set of named components (public or private), each a straight
line of statements over local variables:

    component Main public {
        loc = source read_gps      # read a sensitive value
        x = assign(loc)            # copy/combine values
        sink openConnection(x)     # pass values to a sensitive API
        send Uploader(x)           # inter-component message
        y = recv                   # receive an inter-component message
    }

Taint propagation is flow sensitive at statement level with weak updates:
a use at index j sees every earlier definition of that variable, so
redefinition never kills taint.  Inter-component sends feed every recv of
the target component.  A send to the reserved target EXTERNAL leaves the
app: it is a sink of the IPC pseudo-group.  A recv in a public component
can be driven by other apps, so it is a source of the IPC pseudo-group;
recvs fed only by internal sends just forward their senders' labels.

propagate_taint returns one FlowFact per (source group, sink group) pair,
carrying a shortest witness path (ties broken by component declaration
order, then statement index, so results are deterministic).
"""

from __future__ import annotations

import heapq
import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Union

__all__ = [
    "Visibility",
    "SourceCall",
    "SinkCall",
    "Assign",
    "IccSend",
    "IccRecv",
    "Statement",
    "Component",
    "ProgramIR",
    "IccLink",
    "FlowFact",
    "EXTERNAL",
    "IPC_GROUP",
    "IrSyntaxError",
    "UndefinedVariable",
    "DuplicateComponent",
    "UnresolvedTarget",
    "UnknownApi",
    "parse_program",
    "serialize_program",
    "resolve_icc",
    "propagate_taint",
    "group_by_permission",
    "verify_witness",
    "internal_send_count",
]

EXTERNAL = "EXTERNAL"
IPC_GROUP = "IPC"


class IrSyntaxError(ValueError):
    """Malformed IR text.  Carries (line, column, message)."""

    def __init__(self, line: int, column: int, message: str):
        super().__init__(f"line {line}, col {column}: {message}")
        self.line = line
        self.column = column
        self.message = message


class UndefinedVariable(IrSyntaxError):
    def __init__(self, line: int, column: int, var: str):
        super().__init__(line, column, f"use of undefined variable {var!r}")
        self.var = var


class DuplicateComponent(IrSyntaxError):
    def __init__(self, line: int, name: str):
        super().__init__(line, 1, f"duplicate component {name!r}")
        self.name = name


class UnresolvedTarget(ValueError):
    """send names a component that is not declared in the program."""

    def __init__(self, component: str, index: int, target: str):
        super().__init__(
            f"send target {target!r} in component {component!r} "
            f"(statement {index}) is not declared"
        )
        self.component = component
        self.index = index
        self.target = target


class UnknownApi(KeyError):
    """API name missing from the catalog, or used in the wrong role."""

    def __init__(self, api: str, detail: str):
        super().__init__(f"{api}: {detail}")
        self.api = api
        self.detail = detail


class Visibility(Enum):
    PUBLIC = "public"
    PRIVATE = "private"


@dataclass(frozen=True)
class SourceCall:
    dest: str
    api: str


@dataclass(frozen=True)
class SinkCall:
    api: str
    args: tuple[str, ...]


@dataclass(frozen=True)
class Assign:
    dest: str
    args: tuple[str, ...]


@dataclass(frozen=True)
class IccSend:
    target: str  # component name or EXTERNAL
    args: tuple[str, ...]


@dataclass(frozen=True)
class IccRecv:
    dest: str


Statement = Union[SourceCall, SinkCall, Assign, IccSend, IccRecv]


@dataclass(frozen=True)
class Component:
    name: str
    visibility: Visibility
    statements: tuple[Statement, ...]


@dataclass(frozen=True)
class ProgramIR:
    components: tuple[Component, ...]

    def component(self, name: str) -> Component:
        for comp in self.components:
            if comp.name == name:
                return comp
        raise KeyError(name)


@dataclass(frozen=True)
class IccLink:
    sender: str
    send_index: int
    target: str
    recv_index: int


@dataclass(frozen=True)
class FlowFact:
    source_group: str
    sink_group: str
    # witness: ordered (component name, statement index) pairs from the
    # source statement to the sink statement
    witness: tuple[tuple[str, int], ...] = field(compare=False)

    @property
    def pair(self) -> tuple[str, str]:
        return (self.source_group, self.sink_group)


# ---------------------------------------------------------------------------
# Parsing

_NAME = r"[A-Za-z_][A-Za-z0-9_]*"
_API = r"[A-Za-z_][A-Za-z0-9_.]*"
_ARGS = rf"{_NAME}(?:\s*,\s*{_NAME})*"

_COMPONENT_RE = re.compile(rf"^component\s+(?P<name>{_NAME})\s+(?P<vis>public|private)\s*\{{$")
_CLOSE_RE = re.compile(r"^\}$")
_SOURCE_RE = re.compile(rf"^(?P<dest>{_NAME})\s*=\s*source\s+(?P<api>{_API})$")
_SINK_RE = re.compile(rf"^sink\s+(?P<api>{_API})\s*\(\s*(?P<args>{_ARGS})\s*\)$")
_ASSIGN_RE = re.compile(rf"^(?P<dest>{_NAME})\s*=\s*assign\s*\(\s*(?P<args>{_ARGS})\s*\)$")
_SEND_RE = re.compile(rf"^send\s+(?P<target>{_NAME})\s*\(\s*(?P<args>{_ARGS})\s*\)$")
_RECV_RE = re.compile(rf"^(?P<dest>{_NAME})\s*=\s*recv$")

_KEYWORDS = frozenset({"component", "public", "private", "source", "sink", "assign", "send", "recv"})


def _split_args(text: str) -> tuple[str, ...]:
    return tuple(a.strip() for a in text.split(","))


def parse_program(text: str) -> ProgramIR:
    """Parse IR text.  Raises IrSyntaxError (with line/column) on bad input,
    UndefinedVariable on use-before-def, DuplicateComponent on name reuse."""
    components: list[Component] = []
    names: set[str] = set()

    current: str | None = None
    visibility: Visibility | None = None
    statements: list[Statement] = []
    defined: set[str] = set()
    header_line = 0

    def check_defined(vars_: Iterable[str], line_no: int, line: str) -> None:
        for v in vars_:
            if v not in defined:
                raise UndefinedVariable(line_no, line.index(v) + 1, v)

    for line_no, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if current is None:
            m = _COMPONENT_RE.match(line)
            if not m:
                raise IrSyntaxError(line_no, 1, f"expected component declaration, got {line!r}")
            name = m.group("name")
            if name == EXTERNAL:
                raise IrSyntaxError(line_no, 1, f"{EXTERNAL} is reserved and cannot be declared")
            if name in names:
                raise DuplicateComponent(line_no, name)
            current = name
            visibility = Visibility(m.group("vis"))
            statements = []
            defined = set()
            header_line = line_no
            continue
        if _CLOSE_RE.match(line):
            names.add(current)
            components.append(Component(current, visibility, tuple(statements)))
            current = None
            continue
        stmt = _parse_statement(line, line_no, defined, check_defined)
        statements.append(stmt)

    if current is not None:
        raise IrSyntaxError(header_line, 1, f"component {current!r} is never closed")
    return ProgramIR(tuple(components))


def _parse_statement(line: str, line_no: int, defined: set[str], check_defined) -> Statement:
    m = _SOURCE_RE.match(line)
    if m:
        defined.add(m.group("dest"))
        return SourceCall(m.group("dest"), m.group("api"))
    m = _SINK_RE.match(line)
    if m:
        args = _split_args(m.group("args"))
        check_defined(args, line_no, line)
        return SinkCall(m.group("api"), args)
    m = _ASSIGN_RE.match(line)
    if m:
        args = _split_args(m.group("args"))
        check_defined(args, line_no, line)
        defined.add(m.group("dest"))
        return Assign(m.group("dest"), args)
    m = _SEND_RE.match(line)
    if m:
        args = _split_args(m.group("args"))
        check_defined(args, line_no, line)
        return IccSend(m.group("target"), args)
    m = _RECV_RE.match(line)
    if m:
        defined.add(m.group("dest"))
        return IccRecv(m.group("dest"))
    raise IrSyntaxError(line_no, 1, f"unrecognized statement {line!r}")


def serialize_program(program: ProgramIR) -> str:
    """Canonical text form; parse(serialize(p)) == p."""
    lines: list[str] = []
    for comp in program.components:
        lines.append(f"component {comp.name} {comp.visibility.value} {{")
        for stmt in comp.statements:
            lines.append("    " + _format_statement(stmt))
        lines.append("}")
    return "\n".join(lines) + "\n"


def _format_statement(stmt: Statement) -> str:
    if isinstance(stmt, SourceCall):
        return f"{stmt.dest} = source {stmt.api}"
    if isinstance(stmt, SinkCall):
        return f"sink {stmt.api}({', '.join(stmt.args)})"
    if isinstance(stmt, Assign):
        return f"{stmt.dest} = assign({', '.join(stmt.args)})"
    if isinstance(stmt, IccSend):
        return f"send {stmt.target}({', '.join(stmt.args)})"
    if isinstance(stmt, IccRecv):
        return f"{stmt.dest} = recv"
    raise TypeError(f"unknown statement {stmt!r}")


# ---------------------------------------------------------------------------
# ICC resolution and taint propagation


def resolve_icc(program: ProgramIR) -> list[IccLink]:
    """Connect each internal send to every recv of its target component.

    Raises UnresolvedTarget for sends naming undeclared components.
    Sends to EXTERNAL produce no links (they leave the app).
    """
    names = {c.name for c in program.components}
    links: list[IccLink] = []
    for comp in program.components:
        for idx, stmt in enumerate(comp.statements):
            if not isinstance(stmt, IccSend) or stmt.target == EXTERNAL:
                continue
            if stmt.target not in names:
                raise UnresolvedTarget(comp.name, idx, stmt.target)
            target = program.component(stmt.target)
            for ridx, rstmt in enumerate(target.statements):
                if isinstance(rstmt, IccRecv):
                    links.append(IccLink(comp.name, idx, stmt.target, ridx))
    return links


def _stmt_uses(stmt: Statement) -> tuple[str, ...]:
    if isinstance(stmt, (SinkCall, IccSend)):
        return stmt.args
    if isinstance(stmt, Assign):
        return stmt.args
    return ()


def _stmt_def(stmt: Statement) -> str | None:
    if isinstance(stmt, (SourceCall, Assign, IccRecv)):
        return stmt.dest
    return None


def _validate_roles(program: ProgramIR, catalog) -> None:
    for comp in program.components:
        for stmt in comp.statements:
            if isinstance(stmt, SourceCall):
                entry = catalog.get(stmt.api)
                if entry is None:
                    raise UnknownApi(stmt.api, "not in catalog")
                if entry.role.value not in ("source", "both"):
                    raise UnknownApi(stmt.api, f"declared {entry.role.value}, used as source")
            elif isinstance(stmt, SinkCall):
                entry = catalog.get(stmt.api)
                if entry is None:
                    raise UnknownApi(stmt.api, "not in catalog")
                if entry.role.value not in ("sink", "both"):
                    raise UnknownApi(stmt.api, f"declared {entry.role.value}, used as sink")


def _build_graph(program: ProgramIR):
    """Statement-level def-use graph.

    Nodes are (component index, statement index).  Edges:
      def at i  -> every use of that variable at j > i in the component
      internal send -> every recv of the target component

    Returns (nodes dict, successor dict, components list).
    """
    comps = program.components
    succ: dict[tuple[int, int], list[tuple[int, int]]] = {}
    links = resolve_icc(program)
    recv_edges: dict[tuple[str, int], list[tuple[str, int]]] = {}
    for link in links:
        recv_edges.setdefault((link.sender, link.send_index), []).append(
            (link.target, link.recv_index)
        )
    comp_index = {c.name: i for i, c in enumerate(comps)}

    for ci, comp in enumerate(comps):
        for si, stmt in enumerate(comp.statements):
            node = (ci, si)
            out: list[tuple[int, int]] = []
            var = _stmt_def(stmt)
            if var is not None:
                for sj in range(si + 1, len(comp.statements)):
                    if var in _stmt_uses(comp.statements[sj]):
                        out.append((ci, sj))
            if isinstance(stmt, IccSend) and stmt.target != EXTERNAL:
                for tname, ridx in recv_edges.get((comp.name, si), ()):
                    out.append((comp_index[tname], ridx))
            succ[node] = out
    return succ


def propagate_taint(program: ProgramIR, catalog) -> set[FlowFact]:
    """All (source group, sink group) flows with shortest witnesses.

    Witness paths are minimal in statement count; ties are broken by the
    lexicographic order of the path's (component index, statement index)
    sequence, which makes output deterministic for a given program.
    """
    _validate_roles(program, catalog)
    comps = program.components
    succ = _build_graph(program)

    # group label seeds: statement -> source group(s) it originates
    starts: dict[str, list[tuple[int, int]]] = {}
    for ci, comp in enumerate(comps):
        for si, stmt in enumerate(comp.statements):
            if isinstance(stmt, SourceCall):
                group = catalog.get(stmt.api).permission_group
                starts.setdefault(group, []).append((ci, si))
            elif isinstance(stmt, IccRecv) and comp.visibility is Visibility.PUBLIC:
                # public recvs can be driven by arbitrary other apps
                starts.setdefault(IPC_GROUP, []).append((ci, si))

    def sink_group_of(node: tuple[int, int]) -> str | None:
        stmt = comps[node[0]].statements[node[1]]
        if isinstance(stmt, SinkCall):
            return catalog.get(stmt.api).permission_group
        if isinstance(stmt, IccSend) and stmt.target == EXTERNAL:
            return IPC_GROUP
        return None

    best: dict[tuple[str, str], tuple[int, tuple, tuple]] = {}
    for group, seeds in starts.items():
        # multi-source Dijkstra ordered by (length, path key)
        dist: dict[tuple[int, int], tuple[int, tuple]] = {}
        heap: list[tuple[int, tuple, tuple[int, int]]] = []
        for node in seeds:
            key = (node,)
            if node not in dist or (1, key) < dist[node]:
                dist[node] = (1, key)
                heapq.heappush(heap, (1, key, node))
        while heap:
            length, key, node = heapq.heappop(heap)
            if dist.get(node) != (length, key):
                continue
            sgroup = sink_group_of(node)
            if sgroup is not None:
                cand = (length, key, key)
                prev = best.get((group, sgroup))
                if prev is None or (length, key) < (prev[0], prev[1]):
                    best[(group, sgroup)] = cand
            for nxt in succ[node]:
                nlen, nkey = length + 1, key + (nxt,)
                if nxt not in dist or (nlen, nkey) < dist[nxt]:
                    dist[nxt] = (nlen, nkey)
                    heapq.heappush(heap, (nlen, nkey, nxt))

    facts: set[FlowFact] = set()
    for (group, sgroup), (_, _, path) in best.items():
        witness = tuple((comps[ci].name, si) for ci, si in path)
        facts.add(FlowFact(group, sgroup, witness))
    return facts


def group_by_permission(facts: Iterable[FlowFact]) -> set[tuple[str, str]]:
    """Project facts to their (source group, sink group) pairs."""
    return {f.pair for f in facts}


def internal_send_count(program: ProgramIR) -> int:
    """Number of sends with a named (non-EXTERNAL) target; such sends are
    not reported as IPC sink flows because they stay inside the app."""
    return sum(
        1
        for comp in program.components
        for stmt in comp.statements
        if isinstance(stmt, IccSend) and stmt.target != EXTERNAL
    )


def verify_witness(program: ProgramIR, catalog, fact: FlowFact) -> bool:
    """Replay a witness path and confirm it realizes the claimed flow."""
    comps = {c.name: (i, c) for i, c in enumerate(program.components)}
    if not fact.witness:
        return False
    succ = _build_graph(program)
    prev = None
    for name, si in fact.witness:
        if name not in comps:
            return False
        ci, comp = comps[name]
        if not 0 <= si < len(comp.statements):
            return False
        node = (ci, si)
        if prev is not None and node not in succ[prev]:
            return False
        prev = node

    first_name, first_idx = fact.witness[0]
    first = comps[first_name][1].statements[first_idx]
    if isinstance(first, SourceCall):
        entry = catalog.get(first.api)
        if entry is None or entry.permission_group != fact.source_group:
            return False
    elif isinstance(first, IccRecv):
        if fact.source_group != IPC_GROUP:
            return False
        if comps[first_name][1].visibility is not Visibility.PUBLIC:
            return False
    else:
        return False

    last_name, last_idx = fact.witness[-1]
    last = comps[last_name][1].statements[last_idx]
    if isinstance(last, SinkCall):
        entry = catalog.get(last.api)
        return entry is not None and entry.permission_group == fact.sink_group
    if isinstance(last, IccSend) and last.target == EXTERNAL:
        return fact.sink_group == IPC_GROUP
    return False
