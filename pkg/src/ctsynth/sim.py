"""Exact sparse state-vector simulation with measurement branching.

States map basis indices to ring scalars; every branch of every
measurement is kept (no sampling), so a circuit with measurements yields
its full family of Kraus operators.  All checks are exact ring equalities.
"""

from __future__ import annotations

from dataclasses import dataclass

from ctsynth.circuit import (
    AllocAncilla, Circuit, Gate, MeasureZ, Release, expand_macros,
)
from ctsynth.ring import ONE, ZERO, INV_RT2, RingScalar, omega_power

State = dict[int, RingScalar]


class SimulationError(Exception):
    pass


# phase applied to |1> by single-qubit diagonal gates, as omega powers
_DIAG = {"z": 4, "s": 2, "sdg": 6, "t": 1, "tdg": 7}


def _bit(index: int, q: int, n: int) -> int:
    # qubit 0 is the most significant bit
    return (index >> (n - 1 - q)) & 1


def _mask(q: int, n: int) -> int:
    return 1 << (n - 1 - q)


def apply_gate(state: State, g: Gate, n: int) -> State:
    kind = g.kind
    if kind == "x":
        m = _mask(g.qubits[0], n)
        return {idx ^ m: amp for idx, amp in state.items()}
    if kind in _DIAG:
        m = _mask(g.qubits[0], n)
        ph = omega_power(_DIAG[kind])
        return {idx: (amp * ph if idx & m else amp) for idx, amp in state.items()}
    if kind == "h":
        m = _mask(g.qubits[0], n)
        out: State = {}
        for idx, amp in state.items():
            lo, hi = idx & ~m, idx | m
            half = amp * INV_RT2
            for tgt, contrib in ((lo, half), (hi, half if not idx & m else -half)):
                acc = out.get(tgt)
                acc = contrib if acc is None else acc + contrib
                if acc.is_zero():
                    out.pop(tgt, None)
                else:
                    out[tgt] = acc
        return out
    if kind == "cx":
        c, t = g.qubits
        cm, tm = _mask(c, n), _mask(t, n)
        return {(idx ^ tm if idx & cm else idx): amp for idx, amp in state.items()}
    if kind == "cz":
        c, t = g.qubits
        cm, tm = _mask(c, n), _mask(t, n)
        return {idx: (-amp if (idx & cm) and (idx & tm) else amp)
                for idx, amp in state.items()}
    raise SimulationError(f"cannot apply non-primitive gate {kind!r}")


@dataclass
class Branch:
    outcomes: dict[int, int]          # classical bit -> measured value
    state: State
    measured: dict[int, int]          # qubit -> collapsed value


def run(c: Circuit, input_index: int) -> list[tuple[dict[int, int], State]]:
    """Simulate from a basis state; return (outcome assignment, state) per branch.

    Branch states are sub-normalized.  Clean-ancilla inputs must be 0 and
    release expectations are asserted, not projected.
    """
    n = c.n_qubits
    if not 0 <= input_index < (1 << n):
        raise SimulationError("input index out of range")
    for q, role in enumerate(c.io_spec):
        if role == "clean" and _bit(input_index, q, n):
            raise SimulationError(f"clean ancilla {q} must start in |0>")
    c = expand_macros(c)
    branches = [Branch({}, {input_index: ONE}, {})]
    for ev in c.events:
        if isinstance(ev, Gate):
            for br in branches:
                if ev.condition is not None:
                    bit, val = ev.condition
                    if bit not in br.outcomes:
                        raise SimulationError(f"condition on unwritten bit {bit}")
                    if br.outcomes[bit] != val:
                        continue
                br.state = apply_gate(br.state, ev, n)
        elif isinstance(ev, MeasureZ):
            m = _mask(ev.qubit, n)
            new: list[Branch] = []
            for br in branches:
                for val in (0, 1):
                    sub = {idx: amp for idx, amp in br.state.items()
                           if bool(idx & m) == bool(val)}
                    if sub:
                        new.append(Branch({**br.outcomes, ev.cbit: val}, sub,
                                          {**br.measured, ev.qubit: val}))
            branches = new
        elif isinstance(ev, AllocAncilla):
            if ev.role == "clean":
                m = _mask(ev.qubit, n)
                for br in branches:
                    if any(idx & m for idx in br.state):
                        raise SimulationError(
                            f"clean ancilla {ev.qubit} not in |0> at allocation")
            for br in branches:
                br.measured.pop(ev.qubit, None)
        elif isinstance(ev, Release):
            m = _mask(ev.qubit, n)
            for br in branches:
                if ev.expected == "zero":
                    if any(idx & m for idx in br.state):
                        raise SimulationError(
                            f"release(zero) violated on qubit {ev.qubit}")
                elif ev.expected == "unchanged":
                    want = _bit(input_index, ev.qubit, n)
                    if any(_bit(idx, ev.qubit, n) != want for idx in br.state):
                        raise SimulationError(
                            f"release(unchanged) violated on qubit {ev.qubit}")
                else:  # measured
                    val = br.measured.get(ev.qubit)
                    if val is None:
                        raise SimulationError(
                            f"release(measured) on unmeasured qubit {ev.qubit}")
                    if any(_bit(idx, ev.qubit, n) != val for idx in br.state):
                        raise SimulationError(
                            f"released qubit {ev.qubit} not in its measured state")
    return [(br.outcomes, br.state) for br in branches]


# ---------------------------------------------------------------------------
# Matrices over the ring
# ---------------------------------------------------------------------------

Matrix = list[list[RingScalar]]


def zeros(rows: int, cols: int) -> Matrix:
    return [[ZERO] * cols for _ in range(rows)]


def identity(dim: int) -> Matrix:
    m = zeros(dim, dim)
    for i in range(dim):
        m[i][i] = ONE
    return m


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    rows, inner, cols = len(a), len(b), len(b[0])
    out = zeros(rows, cols)
    for i in range(rows):
        ai = a[i]
        for k in range(inner):
            x = ai[k]
            if x.is_zero():
                continue
            bk = b[k]
            row = out[i]
            for j in range(cols):
                if not bk[j].is_zero():
                    row[j] = row[j] + x * bk[j]
    return out


def mat_dagger(a: Matrix) -> Matrix:
    return [[a[i][j].conj() for i in range(len(a))] for j in range(len(a[0]))]


def mat_equal(a: Matrix, b: Matrix) -> bool:
    if len(a) != len(b) or len(a[0]) != len(b[0]):
        return False
    return all(a[i][j] == b[i][j] for i in range(len(a)) for j in range(len(a[0])))


def mat_to_strings(a: Matrix) -> list[list[str]]:
    return [[str(x) for x in row] for row in a]


def unitary_of(c: Circuit) -> Matrix:
    """Full unitary, column by column.  Errors if the circuit measures."""
    if c.has_measurement():
        raise SimulationError("unitary_of: circuit contains measurement")
    dim = 1 << c.n_qubits
    cols = []
    for idx in range(dim):
        branches = run(c, idx)
        assert len(branches) == 1
        cols.append(branches[0][1])
    u = zeros(dim, dim)
    for j, col in enumerate(cols):
        for i, amp in col.items():
            u[i][j] = amp
    return u


def norm_sq(state: State) -> RingScalar:
    total = ZERO
    for amp in state.values():
        total = total + amp.conj() * amp
    return total


# ---------------------------------------------------------------------------
# Channels
# ---------------------------------------------------------------------------

@dataclass
class BranchMap:
    """Kraus operators per classical outcome on a declared input basis.

    Rows run over `output_qubits` (in circuit order), columns over the
    given list of full-register input indices.
    """
    kraus: dict[tuple, Matrix]
    input_basis: list[int]
    output_qubits: list[int]


def _released_qubits(c: Circuit) -> list[int]:
    return [e.qubit for e in c.events if isinstance(e, Release)]


def default_input_basis(c: Circuit) -> list[int]:
    """All basis states with clean ancillas fixed to 0, dirty/input/target free."""
    n = c.n_qubits
    free = [q for q in range(n) if c.io_spec[q] != "clean"]
    basis = []
    for bits in range(1 << len(free)):
        idx = 0
        for pos, q in enumerate(free):
            if (bits >> (len(free) - 1 - pos)) & 1:
                idx |= _mask(q, n)
        basis.append(idx)
    return sorted(basis)


def kraus_of(c: Circuit, input_basis: list[int] | None = None) -> BranchMap:
    """Assemble per-outcome Kraus operators column-wise over an input basis.

    Released qubits are separated out: each must factor as |0>, as its
    measured value, or as its unchanged input bit; anything else is an
    entangled release and rejected by `run`.
    """
    n = c.n_qubits
    if input_basis is None:
        input_basis = default_input_basis(c)
    released = set(_released_qubits(c))
    out_qubits = [q for q in range(n) if q not in released]
    dim_out = 1 << len(out_qubits)
    kraus: dict[tuple, Matrix] = {}
    for col, idx in enumerate(input_basis):
        for outcomes, state in run(c, idx):
            key = tuple(sorted(outcomes.items()))
            if key not in kraus:
                kraus[key] = zeros(dim_out, len(input_basis))
            mat = kraus[key]
            for full_idx, amp in state.items():
                out_idx = 0
                for pos, q in enumerate(out_qubits):
                    if _bit(full_idx, q, n):
                        out_idx |= 1 << (len(out_qubits) - 1 - pos)
                mat[out_idx][col] = mat[out_idx][col] + amp
    return BranchMap(kraus, list(input_basis), out_qubits)


def trace_preserving(bm: BranchMap) -> bool:
    """Check sum_o K_o^dag K_o == identity on the input basis, exactly."""
    dim = len(bm.input_basis)
    acc = zeros(dim, dim)
    for mat in bm.kraus.values():
        prod = mat_mul(mat_dagger(mat), mat)
        for i in range(dim):
            for j in range(dim):
                acc[i][j] = acc[i][j] + prod[i][j]
    return mat_equal(acc, identity(dim))


@dataclass
class ChannelReport:
    equal: bool
    scalars: dict[tuple, RingScalar]
    trace_preserving: bool
    detail: str = ""


def channel_equals(c: Circuit, target: Matrix, mode: str = "exact",
                   input_basis: list[int] | None = None) -> ChannelReport:
    """True iff every Kraus operator is a scalar multiple of `target`.

    The scalars must satisfy sum |c_o|^2 = 1 exactly; in "exact" mode each
    scalar must additionally be of the form omega^j / sqrt(2)^m.  The
    "per-branch-global-phase" mode allows any ring scalars.
    """
    if mode not in ("exact", "per-branch-global-phase"):
        raise ValueError(f"unknown mode {mode!r}")
    bm = kraus_of(c, input_basis)
    tp = trace_preserving(bm)
    scalars: dict[tuple, RingScalar] = {}
    rows, cols = len(target), len(target[0])
    for key, mat in bm.kraus.items():
        if len(mat) != rows or len(mat[0]) != cols:
            return ChannelReport(False, scalars, tp, "dimension mismatch")
        scalar = None
        # Find the proportionality constant from any nonzero target entry,
        # then check every entry.  c_o * target == K_o must hold exactly.
        for i in range(rows):
            for j in range(cols):
                if not target[i][j].is_zero():
                    num = mat[i][j]
                    if num.is_zero():
                        continue
                    # scalar = num / target[i][j]; division realized by
                    # scanning candidate = num * conj(t) / |t|^2 would need
                    # rational k; instead require target entries to be
                    # omega-power/rt2 form and invert directly.
                    inv = _invert_phase_like(target[i][j])
                    if inv is None:
                        return ChannelReport(False, scalars, tp,
                                             "target entry not invertible phase")
                    scalar = num * inv
                    break
            if scalar is not None:
                break
        if scalar is None:
            return ChannelReport(False, scalars, tp, "all-zero Kraus operator")
        for i in range(rows):
            for j in range(cols):
                if not (scalar * target[i][j] == mat[i][j]):
                    return ChannelReport(False, scalars, tp,
                                         f"branch {key}: mismatch at ({i},{j})")
        if mode == "exact" and scalar.is_unit_phase_over_rt2() is None:
            return ChannelReport(False, scalars, tp,
                                 f"branch {key}: scalar {scalar} not omega^j/rt2^m")
        scalars[key] = scalar
    total = ZERO
    for s in scalars.values():
        total = total + s.conj() * s
    if not total == ONE:
        return ChannelReport(False, scalars, tp, "branch weights do not sum to 1")
    return ChannelReport(True, scalars, tp)


def _invert_phase_like(x: RingScalar) -> RingScalar | None:
    """Invert omega^j / rt2^m (the only target entries channels need)."""
    form = x.is_unit_phase_over_rt2()
    if form is None:
        return None
    j, m = form
    inv = omega_power(-j)
    for _ in range(m):
        inv = inv * RingScalar(0, 1, 0, -1)  # times sqrt(2)
    return inv
