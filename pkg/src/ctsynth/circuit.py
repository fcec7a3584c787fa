"""Circuit intermediate representation.

Events are gates (primitive or macro), Z-basis measurements, ancilla
allocations and releases.  Gates may carry a single classical condition
(bit, value).  Qubit 0 is the most significant bit of a basis-state index,
matching top-wire-first circuit diagrams.

X-basis measurement is not a primitive: write H followed by measz.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace

PRIMITIVE_KINDS = {
    "x": 1, "z": 1, "h": 1, "s": 1, "sdg": 1, "t": 1, "tdg": 1,
    "cx": 2, "cz": 2,
}

# Macro kinds with fixed arity.  The lambda family takes a control-count
# parameter and exists only as a verification target: it has no expansion.
MACRO_KINDS = {
    "toffoli": 3, "ccix": 3, "ccixdg": 3,
    "cs": 2, "csdg": 2, "cciz": 3, "ccmiz": 3,
}
TARGET_ONLY_KINDS = {"lambdax", "lambdaz", "lambdaix"}

DAGGER = {
    "x": "x", "z": "z", "h": "h", "s": "sdg", "sdg": "s", "t": "tdg",
    "tdg": "t", "cx": "cx", "cz": "cz", "toffoli": "toffoli",
    "ccix": "ccixdg", "ccixdg": "ccix", "cs": "csdg", "csdg": "cs",
    "cciz": "ccmiz", "ccmiz": "cciz", "lambdax": "lambdax",
    "lambdaz": "lambdaz",
}


class CircuitError(Exception):
    pass


@dataclass(frozen=True)
class Gate:
    """A gate event: controls first, target last in `qubits`."""
    kind: str
    qubits: tuple[int, ...]
    param: int | None = None           # control count for lambda macros
    condition: tuple[int, int] | None = None  # (classical bit, required value)

    def arity(self) -> int:
        if self.kind in PRIMITIVE_KINDS:
            return PRIMITIVE_KINDS[self.kind]
        if self.kind in MACRO_KINDS:
            return MACRO_KINDS[self.kind]
        if self.kind in TARGET_ONLY_KINDS:
            if not self.param or self.param < 1:
                raise CircuitError(f"{self.kind} needs a positive control count")
            return self.param + 1
        raise CircuitError(f"unknown gate kind {self.kind!r}")


@dataclass(frozen=True)
class MeasureZ:
    qubit: int
    cbit: int


@dataclass(frozen=True)
class AllocAncilla:
    qubit: int
    role: str  # "clean" | "dirty"


@dataclass(frozen=True)
class Release:
    qubit: int
    expected: str  # "zero" | "unchanged" | "measured"


Event = Gate | MeasureZ | AllocAncilla | Release

# Per-qubit roles: input / clean / dirty / target.
ROLES = ("input", "clean", "dirty", "target")


@dataclass(frozen=True)
class Circuit:
    n_qubits: int
    n_cbits: int
    events: tuple[Event, ...]
    io_spec: tuple[str, ...] = ()

    def __post_init__(self):
        if not self.io_spec:
            object.__setattr__(self, "io_spec", ("input",) * self.n_qubits)
        validate(self)

    def has_measurement(self) -> bool:
        return any(isinstance(e, MeasureZ) for e in self.events)

    def gates(self):
        return (e for e in self.events if isinstance(e, Gate))


def validate(c: Circuit) -> None:
    if len(c.io_spec) != c.n_qubits:
        raise CircuitError("io_spec length must match qubit count")
    for r in c.io_spec:
        if r not in ROLES:
            raise CircuitError(f"unknown io role {r!r}")
    measured: set[int] = set()
    released: set[int] = set()
    written: set[int] = set()
    for ev in c.events:
        if isinstance(ev, Gate):
            qs = ev.qubits
            if len(set(qs)) != len(qs):
                raise CircuitError(f"duplicate qubits in {ev}")
            if len(qs) != ev.arity():
                raise CircuitError(f"bad arity for {ev}")
            for q in qs:
                if not 0 <= q < c.n_qubits:
                    raise CircuitError(f"qubit {q} out of range")
                if q in released:
                    raise CircuitError(f"qubit {q} used after release")
            if ev.condition is not None:
                bit, val = ev.condition
                if not 0 <= bit < c.n_cbits:
                    raise CircuitError(f"classical bit {bit} out of range")
                if val not in (0, 1):
                    raise CircuitError("condition value must be 0 or 1")
                if bit not in written:
                    raise CircuitError(f"classical bit {bit} read before write")
        elif isinstance(ev, MeasureZ):
            if ev.qubit in measured:
                raise CircuitError(f"qubit {ev.qubit} measured twice")
            if ev.qubit in released:
                raise CircuitError(f"qubit {ev.qubit} used after release")
            if not 0 <= ev.qubit < c.n_qubits:
                raise CircuitError(f"qubit {ev.qubit} out of range")
            if not 0 <= ev.cbit < c.n_cbits:
                raise CircuitError(f"classical bit {ev.cbit} out of range")
            measured.add(ev.qubit)
            written.add(ev.cbit)
        elif isinstance(ev, AllocAncilla):
            if ev.role not in ("clean", "dirty"):
                raise CircuitError(f"bad ancilla role {ev.role!r}")
            # Allocating a released wire re-activates it with a fresh
            # identity (a measured qubit re-used as a clean ancilla).
            released.discard(ev.qubit)
            measured.discard(ev.qubit)
        elif isinstance(ev, Release):
            if ev.expected not in ("zero", "unchanged", "measured"):
                raise CircuitError(f"bad release expectation {ev.expected!r}")
            if ev.qubit in released:
                raise CircuitError(f"qubit {ev.qubit} released twice")
            if ev.expected == "measured" and ev.qubit not in measured:
                raise CircuitError("release(measured) on unmeasured qubit")
            released.add(ev.qubit)
        else:
            raise CircuitError(f"unknown event {ev!r}")


class Builder:
    """Incremental circuit construction."""

    def __init__(self, n_qubits: int, n_cbits: int = 0, io_spec=None):
        self.n_qubits = n_qubits
        self.n_cbits = n_cbits
        self.io_spec = tuple(io_spec) if io_spec else ("input",) * n_qubits
        self.events: list[Event] = []

    def g(self, kind: str, *qubits: int, param: int | None = None,
          condition: tuple[int, int] | None = None) -> "Builder":
        self.events.append(Gate(kind, tuple(qubits), param, condition))
        return self

    def cg(self, bit: int, val: int, kind: str, *qubits: int,
           param: int | None = None) -> "Builder":
        return self.g(kind, *qubits, param=param, condition=(bit, val))

    def measz(self, qubit: int, cbit: int) -> "Builder":
        self.events.append(MeasureZ(qubit, cbit))
        return self

    def alloc(self, qubit: int, role: str) -> "Builder":
        self.events.append(AllocAncilla(qubit, role))
        return self

    def release(self, qubit: int, expected: str) -> "Builder":
        self.events.append(Release(qubit, expected))
        return self

    def inline(self, sub: Circuit, qmap: dict[int, int],
               cmap: dict[int, int] | None = None,
               condition: tuple[int, int] | None = None) -> "Builder":
        """Append sub's events with qubits (and classical bits) relabeled.

        An extra condition, if given, is attached to every inlined gate;
        gates already conditioned cannot be re-conditioned.
        """
        cmap = cmap or {}
        for ev in sub.events:
            if isinstance(ev, Gate):
                cond = ev.condition
                if cond is not None:
                    cond = (cmap[cond[0]], cond[1])
                if condition is not None:
                    if cond is not None:
                        raise CircuitError("cannot stack classical conditions")
                    cond = condition
                self.events.append(Gate(ev.kind, tuple(qmap[q] for q in ev.qubits),
                                        ev.param, cond))
            elif isinstance(ev, MeasureZ):
                self.events.append(MeasureZ(qmap[ev.qubit], cmap[ev.cbit]))
            elif isinstance(ev, AllocAncilla):
                self.events.append(AllocAncilla(qmap[ev.qubit], ev.role))
            elif isinstance(ev, Release):
                self.events.append(Release(qmap[ev.qubit], ev.expected))
        return self

    def build(self) -> Circuit:
        return Circuit(self.n_qubits, self.n_cbits, tuple(self.events), self.io_spec)


# ---------------------------------------------------------------------------
# Macro expansions
# ---------------------------------------------------------------------------

def _fig_ccix(a: int, b: int, t: int) -> list[tuple[str, tuple[int, ...]]]:
    # 4-T doubly-controlled iX: |a,b,y> -> i^{ab} |a,b,y+ab>.
    return [("h", (t,)), ("tdg", (t,)), ("cx", (b, t)), ("t", (t,)),
            ("cx", (a, t)), ("tdg", (t,)), ("cx", (b, t)), ("t", (t,)),
            ("cx", (a, t)), ("h", (t,))]


def _expansion(g: Gate) -> list[tuple[str, tuple[int, ...]]]:
    q = g.qubits
    if g.kind == "ccix":
        return _fig_ccix(*q)
    if g.kind == "ccixdg":
        seq = _fig_ccix(*q)
        return [(DAGGER[k], w) for k, w in reversed(seq)]
    if g.kind == "cciz":
        # Diagonal i^{ab}(-1)^{abc}: the doubly-controlled iX conjugated by
        # H on its target, with the Hadamards cancelled.
        return _fig_ccix(q[0], q[1], q[2])[1:-1]
    if g.kind == "ccmiz":
        seq = _fig_ccix(q[0], q[1], q[2])[1:-1]
        return [(DAGGER[k], w) for k, w in reversed(seq)]
    if g.kind == "cs":
        a, b = q
        return [("t", (a,)), ("t", (b,)), ("cx", (a, b)), ("tdg", (b,)),
                ("cx", (a, b))]
    if g.kind == "csdg":
        a, b = q
        return [("tdg", (a,)), ("tdg", (b,)), ("cx", (a, b)), ("t", (b,)),
                ("cx", (a, b))]
    if g.kind == "toffoli":
        a, b, t = q
        return [("h", (t,)), ("cx", (b, t)), ("tdg", (t,)), ("cx", (a, t)),
                ("t", (t,)), ("cx", (b, t)), ("tdg", (t,)), ("cx", (a, t)),
                ("t", (b,)), ("t", (t,)), ("h", (t,)), ("cx", (a, b)),
                ("t", (a,)), ("tdg", (b,)), ("cx", (a, b))]
    raise CircuitError(f"no expansion for {g.kind!r}")


def expand_macros(c: Circuit) -> Circuit:
    """Expand every macro gate into primitives.  Idempotent.

    The lambda family has no expansion; it only names verification targets.
    """
    out: list[Event] = []
    for ev in c.events:
        if isinstance(ev, Gate) and ev.kind not in PRIMITIVE_KINDS:
            if ev.kind in TARGET_ONLY_KINDS:
                raise CircuitError(f"target-only macro {ev.kind!r} cannot be expanded")
            for kind, wires in _expansion(ev):
                out.append(Gate(kind, wires, None, ev.condition))
        else:
            out.append(ev)
    return Circuit(c.n_qubits, c.n_cbits, tuple(out), c.io_spec)


# ---------------------------------------------------------------------------
# T-count accounting
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TCount:
    unconditional: int
    # Map from assignments of measured classical bits (sorted (bit, value)
    # tuples) to the total T-count realized under that outcome.
    per_outcome: dict = field(default_factory=dict)

    def outcome_values(self) -> set[int]:
        return set(self.per_outcome.values())

    def min_max(self) -> tuple[int, int]:
        if not self.per_outcome:
            return (self.unconditional, self.unconditional)
        vals = self.outcome_values()
        return (min(vals), max(vals))


def t_count(c: Circuit) -> TCount:
    c = expand_macros(c)
    measured_bits = sorted(e.cbit for e in c.events if isinstance(e, MeasureZ))
    uncond = 0
    conditioned: list[tuple[int, int]] = []  # (bit, val) per conditioned T
    for ev in c.events:
        if isinstance(ev, Gate) and ev.kind in ("t", "tdg"):
            if ev.condition is None:
                uncond += 1
            else:
                conditioned.append(ev.condition)
    per: dict = {}
    if measured_bits:
        for values in itertools.product((0, 1), repeat=len(measured_bits)):
            assign = tuple(zip(measured_bits, values))
            lookup = dict(assign)
            total = uncond + sum(1 for bit, val in conditioned
                                 if lookup.get(bit) == val)
            per[assign] = total
    return TCount(uncond, per)


# ---------------------------------------------------------------------------
# Structural operations
# ---------------------------------------------------------------------------

def inverse(c: Circuit) -> Circuit:
    """Reversed circuit with each gate replaced by its dagger."""
    out: list[Event] = []
    for ev in reversed(c.events):
        if isinstance(ev, (MeasureZ, AllocAncilla, Release)):
            raise CircuitError("non-invertible: circuit has measurement/ancilla events")
        if ev.condition is not None:
            raise CircuitError("non-invertible: circuit has conditioned gates")
        if ev.kind not in DAGGER:
            raise CircuitError(f"no dagger for {ev.kind!r}")
        out.append(Gate(DAGGER[ev.kind], ev.qubits, ev.param, None))
    return Circuit(c.n_qubits, c.n_cbits, tuple(out), c.io_spec)


def embed(c: Circuit, mapping: dict[int, int], total: int) -> Circuit:
    """Relabel qubits through an injective mapping into a register of `total`."""
    if len(set(mapping.values())) != len(mapping):
        raise CircuitError("embedding must be injective")
    if any(not 0 <= v < total for v in mapping.values()):
        raise CircuitError("embedding target out of range")
    roles = ["input"] * total
    for src, dst in mapping.items():
        roles[dst] = c.io_spec[src]
    out: list[Event] = []
    for ev in c.events:
        if isinstance(ev, Gate):
            out.append(replace(ev, qubits=tuple(mapping[q] for q in ev.qubits)))
        elif isinstance(ev, MeasureZ):
            out.append(MeasureZ(mapping[ev.qubit], ev.cbit))
        elif isinstance(ev, AllocAncilla):
            out.append(AllocAncilla(mapping[ev.qubit], ev.role))
        else:
            out.append(Release(mapping[ev.qubit], ev.expected))
    return Circuit(total, c.n_cbits, tuple(out), tuple(roles))


def compose(a: Circuit, b: Circuit) -> Circuit:
    if a.n_qubits != b.n_qubits:
        raise CircuitError("register size mismatch")
    return Circuit(a.n_qubits, max(a.n_cbits, b.n_cbits),
                   a.events + b.events, a.io_spec)


# ---------------------------------------------------------------------------
# Text format
# ---------------------------------------------------------------------------

def _kind_token(g: Gate) -> str:
    if g.kind in TARGET_ONLY_KINDS:
        return f"{g.kind}:{g.param}"
    return g.kind


def _parse_kind(token: str) -> tuple[str, int | None]:
    if ":" in token:
        kind, _, p = token.partition(":")
        if kind not in TARGET_ONLY_KINDS:
            raise CircuitError(f"unexpected parameter on {kind!r}")
        return kind, int(p)
    return token, None


def to_text(c: Circuit) -> str:
    lines = [f"qubits {c.n_qubits} cbits {c.n_cbits}"]
    for ev in c.events:
        if isinstance(ev, Gate):
            qs = " ".join(str(q) for q in ev.qubits)
            if ev.condition is None:
                lines.append(f"g {_kind_token(ev)} {qs}")
            else:
                bit, val = ev.condition
                lines.append(f"cg {bit} {val} {_kind_token(ev)} {qs}")
        elif isinstance(ev, MeasureZ):
            lines.append(f"measz {ev.qubit} {ev.cbit}")
        elif isinstance(ev, AllocAncilla):
            lines.append(f"alloc {ev.qubit} {ev.role}")
        else:
            lines.append(f"release {ev.qubit} {ev.expected}")
    return "\n".join(lines) + "\n"


def from_text(text: str) -> Circuit:
    lines = [ln for ln in (raw.strip() for raw in text.splitlines()) if ln]
    if not lines:
        raise CircuitError("empty circuit text")
    head = lines[0].split()
    if len(head) != 4 or head[0] != "qubits" or head[2] != "cbits":
        raise CircuitError(f"bad header: {lines[0]!r}")
    n_qubits, n_cbits = int(head[1]), int(head[3])
    events: list[Event] = []
    roles = ["input"] * n_qubits
    for ln in lines[1:]:
        parts = ln.split()
        tag = parts[0]
        if tag == "g":
            kind, param = _parse_kind(parts[1])
            events.append(Gate(kind, tuple(int(p) for p in parts[2:]), param))
        elif tag == "cg":
            bit, val = int(parts[1]), int(parts[2])
            kind, param = _parse_kind(parts[3])
            events.append(Gate(kind, tuple(int(p) for p in parts[4:]), param,
                               (bit, val)))
        elif tag == "measz":
            events.append(MeasureZ(int(parts[1]), int(parts[2])))
        elif tag == "alloc":
            q = int(parts[1])
            events.append(AllocAncilla(q, parts[2]))
            roles[q] = parts[2]
        elif tag == "release":
            events.append(Release(int(parts[1]), parts[2]))
        else:
            raise CircuitError(f"bad event line: {ln!r}")
    return Circuit(n_qubits, n_cbits, tuple(events), tuple(roles))
