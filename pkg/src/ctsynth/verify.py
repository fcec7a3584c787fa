"""Semantic verification: generalized permutations, per-construction
obligations, the safe-substitution rewriter, appendix identity checks, and
the T-count ledger.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from ctsynth import constructions as cons
from ctsynth.circuit import (
    Builder, Circuit, Gate, MeasureZ, PRIMITIVE_KINDS, Release, expand_macros,
    inverse, t_count,
)
from ctsynth.constructions import ConstructionSpec, ValidityError
from ctsynth.ring import ONE, ZERO, RingScalar, omega_power
from ctsynth.sim import (
    Matrix, channel_equals, kraus_of, mat_equal, mat_mul, unitary_of, zeros,
)


# ---------------------------------------------------------------------------
# Generalized permutations
# ---------------------------------------------------------------------------

@dataclass
class GenPerm:
    """Factorization U = P * D: a basis permutation plus a phase function
    (omega exponents) applied on the input side."""
    n_qubits: int
    perm: list[int]
    phase: list[int]

    def reconstruct(self) -> Matrix:
        dim = 1 << self.n_qubits
        m = zeros(dim, dim)
        for idx in range(dim):
            m[self.perm[idx]][idx] = omega_power(self.phase[idx])
        return m


def extract_genperm(u: Matrix) -> GenPerm | None:
    """Factor a matrix as permutation times diagonal of omega powers.

    Returns None when some column is not a single omega-power entry (a
    superposition column, a non-unit phase, or a non-bijective pattern).
    """
    dim = len(u)
    n = dim.bit_length() - 1
    if 1 << n != dim:
        raise ValueError("matrix dimension must be a power of 2")
    perm = [-1] * dim
    phase = [0] * dim
    seen_rows: set[int] = set()
    for col in range(dim):
        hit = None
        for row in range(dim):
            if not u[row][col].is_zero():
                if hit is not None:
                    return None
                hit = row
        if hit is None:
            return None
        j = u[hit][col].as_omega_power()
        if j is None:
            return None
        if hit in seen_rows:
            return None
        seen_rows.add(hit)
        perm[col] = hit
        phase[col] = j
    return GenPerm(n, perm, phase)


def extract_genperm_scaled(m: Matrix) -> tuple[list[int], list[int], int] | None:
    """Column-wise single-entry extraction allowing a common 1/sqrt(2)^s
    factor, as Kraus operators of measurement branches carry.

    Returns (row per column, omega exponent per column, s); the row
    pattern must be injective.  Works for non-square isometry blocks.
    """
    rows, cols = len(m), len(m[0])
    perm = [-1] * cols
    phase = [0] * cols
    scale = None
    seen: set[int] = set()
    for col in range(cols):
        hit = None
        for row in range(rows):
            if not m[row][col].is_zero():
                if hit is not None:
                    return None
                hit = row
        if hit is None or hit in seen:
            return None
        form = m[hit][col].is_unit_phase_over_rt2()
        if form is None:
            return None
        j, s = form
        if scale is None:
            scale = s
        elif scale != s:
            return None
        seen.add(hit)
        perm[col] = hit
        phase[col] = j
    return perm, phase, (scale or 0)


def phase_support(g: GenPerm) -> set[int]:
    """Qubits the phase function depends on: i is in the support iff
    flipping bit i changes the phase for some input."""
    support = set()
    dim = 1 << g.n_qubits
    for q in range(g.n_qubits):
        m = 1 << (g.n_qubits - 1 - q)
        if any(g.phase[idx] != g.phase[idx ^ m] for idx in range(dim)):
            support.add(q)
    return support


# ---------------------------------------------------------------------------
# Per-construction checking
# ---------------------------------------------------------------------------

@dataclass
class VerificationReport:
    name: str
    params: dict
    semantics_ok: bool
    tcount_ok: bool
    measured_tcount: int | None
    measured_branch_tcounts: list[int] | None
    expected_tcount: int | None
    expected_branch_tcounts: list[int] | None
    phase_support_found: list[int] | None
    phase_support_declared: list[int] | None
    detail: str = ""

    @property
    def ok(self) -> bool:
        return self.semantics_ok and self.tcount_ok

    def to_json(self) -> dict:
        return {
            "schema": 1,
            "name": self.name,
            "params": self.params,
            "ok": self.ok,
            "semantics_ok": self.semantics_ok,
            "tcount_ok": self.tcount_ok,
            "measured_tcount": self.measured_tcount,
            "measured_branch_tcounts": self.measured_branch_tcounts,
            "expected_tcount": self.expected_tcount,
            "expected_branch_tcounts": self.expected_branch_tcounts,
            "phase_support_found": self.phase_support_found,
            "phase_support_declared": self.phase_support_declared,
            "detail": self.detail,
        }


def _check_genperm(spec: ConstructionSpec) -> tuple[bool, set[int] | None, str]:
    """Full-unitary generalized-permutation check (no subspace restriction)."""
    u = unitary_of(spec.circuit)
    gp = extract_genperm(u)
    if gp is None:
        return False, None, "unitary is not a generalized permutation"
    if spec.target_perm is not None:
        dim = 1 << spec.circuit.n_qubits
        for idx in range(dim):
            if gp.perm[idx] != spec.target_perm(idx):
                return False, None, f"permutation differs at input {idx}"
    support = phase_support(gp)
    if spec.declared_support is not None and not support <= spec.declared_support:
        return (False, support,
                f"phase support {sorted(support)} exceeds declared "
                f"{sorted(spec.declared_support)}")
    return True, support, ""


def _check_scaled_genperm_channel(spec: ConstructionSpec) -> tuple[bool, set[int] | None, str]:
    """Generalized-permutation check on a restricted input subspace,
    branch by branch (clean ancillas, releases, measurements allowed)."""
    from ctsynth.sim import default_input_basis
    basis = spec.channel_input_basis
    if basis is None:
        basis = default_input_basis(spec.circuit)
    bm = kraus_of(spec.circuit, basis)
    support_all: set[int] = set()
    n_out = len(bm.output_qubits)
    n = spec.circuit.n_qubits
    for key, mat in bm.kraus.items():
        got = extract_genperm_scaled(mat)
        if got is None:
            return False, None, f"branch {key} is not a scaled genperm"
        perm, phase, _ = got
        if spec.target_perm is not None:
            for col, full_in in enumerate(basis):
                want_full = spec.target_perm(full_in)
                out_idx = 0
                for pos, q in enumerate(bm.output_qubits):
                    bit = (want_full >> (n - 1 - q)) & 1
                    out_idx |= bit << (n_out - 1 - pos)
                if perm[col] != out_idx:
                    return False, None, f"branch {key}: permutation differs"
        pairs = {full_in: phase[col] for col, full_in in enumerate(basis)}
        for q in range(n):
            mask = 1 << (n - 1 - q)
            for full_in, ph in pairs.items():
                partner = full_in ^ mask
                if partner in pairs and pairs[partner] != ph:
                    support_all.add(q)
                    break
    if spec.declared_support is not None and not support_all <= spec.declared_support:
        return (False, support_all,
                f"phase support {sorted(support_all)} exceeds declared "
                f"{sorted(spec.declared_support)}")
    return True, support_all, ""


def check_construction(spec: ConstructionSpec) -> VerificationReport:
    """Discharge the construction's obligation and compare T-counts."""
    tc = t_count(spec.circuit)
    measured_branches = sorted(tc.outcome_values()) if tc.per_outcome else None
    tcount_ok = True
    if spec.expected_tcount is not None and not tc.per_outcome:
        tcount_ok = tc.unconditional == spec.expected_tcount
    if spec.expected_branch_tcounts is not None:
        tcount_ok = tcount_ok and (set(measured_branches or [tc.unconditional])
                                   == set(spec.expected_branch_tcounts))
    elif spec.expected_tcount is not None and tc.per_outcome:
        tcount_ok = tc.unconditional == spec.expected_tcount

    support_found: set[int] | None = None
    detail = ""
    if spec.kind == "unitary":
        u = unitary_of(spec.circuit)
        semantics = mat_equal(u, spec.target_unitary)
        if not semantics:
            detail = "unitary differs from target"
        else:
            gp = extract_genperm(u)
            if gp is not None:
                support_found = phase_support(gp)
    elif spec.kind == "genperm":
        restricted = (spec.circuit.has_measurement()
                      or spec.channel_input_basis is not None
                      or any(r == "clean" for r in spec.circuit.io_spec)
                      or any(isinstance(e, Release) for e in spec.circuit.events))
        if restricted:
            semantics, support_found, detail = _check_scaled_genperm_channel(spec)
        else:
            semantics, support_found, detail = _check_genperm(spec)
    elif spec.kind == "channel":
        rep = channel_equals(spec.circuit, spec.target_channel, mode="exact",
                             input_basis=spec.channel_input_basis)
        semantics = rep.equal and rep.trace_preserving
        detail = rep.detail
    else:
        raise ValueError(f"unknown obligation kind {spec.kind!r}")
    return VerificationReport(
        spec.name, dict(spec.params), semantics, tcount_ok,
        tc.unconditional, measured_branches,
        spec.expected_tcount,
        sorted(spec.expected_branch_tcounts) if spec.expected_branch_tcounts else None,
        sorted(support_found) if support_found is not None else None,
        sorted(spec.declared_support) if spec.declared_support is not None else None,
        detail)


# ---------------------------------------------------------------------------
# Safe substitution (compute/uncompute pair rewriting)
# ---------------------------------------------------------------------------

_DIAG_1Q = {"z", "s", "sdg", "t", "tdg"}


def safe_to_substitute(middle: Circuit, qubits: set[int]) -> bool:
    """Syntactic sufficient condition for replacing an oracle pair around
    `middle` with a relative-phase implementation on `qubits`.

    True iff every gate touching the protected wires acts diagonally on
    them (diagonal single-qubit gates, CZ on either wire, any controlled
    gate using them only as controls) and no measurement reads them.
    """
    for ev in middle.events:
        if isinstance(ev, MeasureZ):
            if ev.qubit in qubits:
                return False
            continue
        if isinstance(ev, Gate):
            touched = [q for q in ev.qubits if q in qubits]
            if not touched:
                continue
            kind = ev.kind
            if kind in _DIAG_1Q or kind in ("cz", "cs", "csdg", "cciz", "ccmiz"):
                continue
            if kind in ("cx", "toffoli", "ccix", "ccixdg", "lambdax", "lambdaix"):
                target = ev.qubits[-1]
                if target in qubits:
                    return False
                continue
            if kind == "lambdaz":
                continue
            # x, h, or anything that changes the basis on a protected wire
            return False
    return True


@dataclass(frozen=True)
class PairRegion:
    """A marked compute/uncompute pair: events [start] and [stop] are the
    oracle application and its inverse; the region between is the middle."""
    start: int
    stop: int
    wires: tuple[int, ...]


def find_pair(c: Circuit, start: int, stop: int) -> PairRegion:
    ev_a, ev_b = c.events[start], c.events[stop]
    if not isinstance(ev_a, Gate) or not isinstance(ev_b, Gate):
        raise ValueError("pair must mark gate events")
    if set(ev_a.qubits) != set(ev_b.qubits):
        raise ValueError("pair must act on the same wires")
    return PairRegion(start, stop, ev_a.qubits)


def substitute_pair(c: Circuit, region: PairRegion, repl: Circuit,
                    repl_inverse: Circuit | None = None) -> Circuit:
    """Replace the marked pair by `repl` ... `repl`^dagger.

    The middle must pass the syntactic safety check on the pair's wires;
    otherwise the substitution is rejected as unsafe.
    """
    middle = Circuit(c.n_qubits, c.n_cbits,
                     c.events[region.start + 1:region.stop], c.io_spec)
    if not safe_to_substitute(middle, set(region.wires)):
        raise ValueError("unsafe substitution")
    if repl.n_qubits != c.n_qubits:
        raise ValueError("replacement must be laid out on the full register")
    inv_repl = repl_inverse if repl_inverse is not None else inverse(repl)
    events = (c.events[:region.start] + repl.events
              + c.events[region.start + 1:region.stop]
              + inv_repl.events + c.events[region.stop + 1:])
    return Circuit(c.n_qubits, c.n_cbits, events, c.io_spec)


# ---------------------------------------------------------------------------
# Appendix identities
# ---------------------------------------------------------------------------

def _bullet_equals_exact_times_ladder(k: int) -> bool:
    """Relative-phase k-control X over a dirty wire equals the exact
    k-control X composed with the one-fewer-control phase ladder
    (H-conjugated on the helper) acting on the input side."""
    n = k + 2
    a, t = k, k + 1
    bullet = cons.bullet_fragment(n, list(range(k)), a, t)
    u = unitary_of(bullet)
    zdot = _z_ladder(n, list(range(k - 1)), k - 1, a)
    exact = cons.perm_matrix(n, cons.lambda_x_perm(n, list(range(k)), t))
    rhs = mat_mul(exact, unitary_of(zdot))
    return mat_equal(u, rhs)


def _z_ladder(n: int, controls: list[int], dirty: int, target: int) -> Circuit:
    """Relative-phase multi-control Z: H on target around the phase ladder.

    With a single control the ladder bottoms out at the controlled-S
    between the control and the formerly-dirty wire (no target term).
    """
    b = Builder(n)
    if len(controls) == 1:
        b.g("cs", controls[0], dirty)
        return b.build()
    b.g("h", target)
    b.inline(cons.bullet_fragment(n, controls, dirty, target),
             {i: i for i in range(n)})
    b.g("h", target)
    return b.build()


def _star_init_decomposition(k: int) -> bool:
    """Star init + Sdg equals (exact product init) composed with the
    (k-2)-control phase ladder on the controls, input side."""
    init = cons.kand_init(k, "star")
    n = k + 1
    basis_in = [x << 1 for x in range(1 << k)]
    bm = kraus_of(init.circuit, basis_in)
    (_, v), = bm.kraus.items()
    ladder = _z_ladder(n, list(range(k - 2)), k - 2, k - 1)
    lu = unitary_of(ladder)
    for col, idx_in in enumerate(basis_in):
        x = idx_in >> 1
        p = 1 if x == (1 << k) - 1 else 0
        want_row = (x << 1) | p
        # ladder is diagonal on (x, p=0): phase at the input index
        ph = lu[idx_in][idx_in]
        for row in range(1 << n):
            want = ph if row == want_row else ZERO
            if not v[row][col] == want:
                return False
    return True


def _termination_decomposition(k: int) -> bool:
    """The measured relative termination equals (ideal product removal)
    after the inverse phase ladder, as channels on the valid inputs."""
    term = cons.kand_terminate(k, "relative")
    n = k + 1
    ladder_inv = Builder(n)
    ladder_inv.g("h", k - 1)
    ladder_inv.inline(
        inverse(cons.bullet_fragment(n, list(range(k - 2)), k - 2, k - 1)),
        {i: i for i in range(n)})
    ladder_inv.g("h", k - 1)
    lu = unitary_of(ladder_inv.build())
    basis = cons._product_basis(k)
    # RHS target: drop the product wire after applying the diagonal; the
    # diagonal acts at the stored-product index of each column.
    target = zeros(1 << k, len(basis))
    for col, full in enumerate(basis):
        x = full >> 1
        target[x][col] = lu[full][full]
    rep = channel_equals(term.circuit, target, mode="exact", input_basis=basis)
    return rep.equal and rep.trace_preserving


def appendix_identities(ks: dict | None = None) -> list[tuple[str, bool]]:
    """The three relative-phase decomposition identities, each at its two
    smallest valid sizes."""
    ks = ks or {"a1": (3, 4), "a2": (3, 4), "a3": (4, 5)}
    out: list[tuple[str, bool]] = []
    for k in ks["a1"]:
        out.append((f"A.1 k={k}", _bullet_equals_exact_times_ladder(k)))
    for k in ks["a2"]:
        out.append((f"A.2 k={k}", _star_init_decomposition(k)))
    for k in ks["a3"]:
        out.append((f"A.3 k={k}", _termination_decomposition(k)))
    return out


# ---------------------------------------------------------------------------
# T-count ledger
# ---------------------------------------------------------------------------

@dataclass
class LedgerRow:
    gate: str
    ancilla: str
    formula: str
    valid: str
    note: str
    k: int | None
    formula_value: object   # int, set of ints, or None for reference rows
    measured: object        # same shapes
    match: bool | None      # None for reference-only rows

    def to_json(self) -> dict:
        def norm(v):
            if isinstance(v, (set, frozenset)):
                return sorted(v)
            return v
        return {
            "gate": self.gate, "ancilla": self.ancilla, "formula": self.formula,
            "valid": self.valid, "note": self.note, "k": self.k,
            "formula_value": norm(self.formula_value),
            "measured": norm(self.measured), "match": self.match,
        }


def _toy_oracle(n: int, tcount: int) -> Circuit:
    """An oracle |x,y> -> |x, y xor x1> padded to a known T-count."""
    b = Builder(n + 1)
    for _ in range(tcount // 2):
        b.g("t", n).g("tdg", n)
    b.g("cx", 0, n)
    return b.build()


def _measured_total(c: Circuit) -> object:
    tc = t_count(c)
    if tc.per_outcome:
        return set(tc.outcome_values())
    return tc.unconditional


def table_ledger(k_max: int = 8) -> list[LedgerRow]:
    """One row per in-scope T-count table entry, with measured values."""
    rows: list[LedgerRow] = []
    f4, g6 = _toy_oracle(2, 4), _toy_oracle(2, 6)
    tf, tg = 4, 6

    def add(gate, anc, formula, valid, note, k, fval, measured):
        match = None if measured is None else (fval == measured)
        rows.append(LedgerRow(gate, anc, formula, valid, note, k, fval,
                              measured, match))

    add("U_{f.g}", "|00>", "2tf+tg+8", "-", "",
        None, 2 * tf + tg + 8,
        _measured_total(cons.oracle_mult_clean(f4, g6).circuit))
    add("U_{f.g}", "-", "2tf+2tg+4", "-", "phase on controls",
        None, 2 * tf + 2 * tg + 4,
        _measured_total(cons.oracle_mult_matched(f4, g6).circuit))
    add("U_{f.g}", "-", "2tf+tg+4", "-", "phase on controls+target",
        None, 2 * tf + tg + 4,
        _measured_total(cons.oracle_mult_unmatched(f4, g6).circuit))

    rows.append(LedgerRow("L_k(X)", "|z>", "16(k-1)", "k>=6",
                          "prior art; reference-only", None, None, None, None))
    rows.append(LedgerRow("L_k(iX)", "-", "16(k-2)+4", "k>=6",
                          "prior art; reference-only", None, None, None, None))

    for k in range(2, k_max + 1):
        add("L_k(X*)", "|z>", "8(k-2)+4", "k>=2", "phase on controls+helper",
            k, 8 * (k - 2) + 4,
            _measured_total(cons.lambda_x_bullet_dirty(k).circuit))
    for k in range(4, k_max + 1):
        add("L_k(X)", "|z>", "16(k-2)", "k>=4", "",
            k, 16 * (k - 2),
            _measured_total(cons.lambda_x_dirty(k).circuit))
    for k in range(4, k_max + 1):
        add("L_k(X)", "|0>", "{16(k-3), 16(k-3)+4}", "k>=4",
            "measurement-assisted; composition measured",
            k, {16 * (k - 3), 16 * (k - 3) + 4},
            _measured_total(cons.jones_lambda_x(k).circuit))
    for k in range(4, k_max + 1):
        add("L_k(iX)", "-", "16(k-3)+4", "k>=4", "phase on controls",
            k, 16 * (k - 3) + 4, _measured_total(cons.cix(k).circuit))
    for k in range(5, k_max + 1):
        add("L_k(X.)", "-", "16(k-4)+4", "k>=5", "phase on controls",
            k, 16 * (k - 4) + 4, _measured_total(cons.cxbullet(k).circuit))
    for k in range(3, k_max + 1):
        add("L_k(X*)", "-", "8(k-2)", "k>=3", "phase on controls+target",
            k, 8 * (k - 2), _measured_total(cons.cxstar(k).circuit))
    for k in range(5, k_max + 1):
        m = 2 if k >= 5 else 1
        add("L_k(X*)", f"|0>^{m}", "4m+8(k-m-2)", "k>=5",
            "phase on controls+target",
            k, {4 * m + 8 * (k - m - 2)},
            _measured_total(cons.cxstar_with_ancillas(k, m).circuit))
    for k in range(2, k_max + 1):
        add("U_{f_k}", "|z>", "8(k-1)", "k>=2", "",
            k, 8 * (k - 1),
            _measured_total(cons.fk_circuit(k, "exact_dirty").circuit))
    for k in range(2, k_max + 1):
        add("U_{f_k}", "-", "4(k-1)", "k>=2", "phase on controls+target",
            k, 4 * (k - 1), _measured_total(cons.fk_circuit(k).circuit))

    add("3-AND", "|0>", "8", "-", "phase on controls (prior art)",
        3, 8, _measured_total(cons.kand_init(3, "star").circuit))
    add("3-AND^t", "-", "{3, 4}", "-", "measurement-assisted",
        3, {3, 4}, _measured_total(cons.and3_terminate().circuit))
    for k in range(4, k_max + 1):
        add("k-AND", "|0>", "16(k-3)+4", "k>=4", "",
            k, 16 * (k - 3) + 4,
            _measured_total(cons.kand_init(k, "iX").circuit))
    for k in range(6, k_max + 1):
        add("k-AND^t", "-", "{0, 16(k-4)+4}", "k>=6", "measurement-assisted",
            k, {0, 16 * (k - 4) + 4},
            _measured_total(cons.kand_terminate(k, "exact").circuit))
    for k in range(3, k_max + 1):
        add("k-AND", "|0>", "8(k-2)", "k>=3", "phase on controls",
            k, 8 * (k - 2), _measured_total(cons.kand_init(k, "star").circuit))
    for k in range(4, k_max + 1):
        add("k-AND^t", "-", "{8(k-4), 8(k-4)+4}", "k>=4",
            "measurement-assisted",
            k, {8 * (k - 4), 8 * (k - 4) + 4},
            _measured_total(cons.kand_terminate(k, "relative").circuit))
    return rows


def ledger_to_text(rows: list[LedgerRow]) -> str:
    def norm(v):
        if isinstance(v, (set, frozenset)):
            return "{" + ", ".join(str(x) for x in sorted(v)) + "}"
        return "-" if v is None else str(v)
    header = f"{'gate':<12} {'anc':<8} {'k':<4} {'formula':<22} {'measured':<14} {'match':<6} note"
    lines = [header, "-" * len(header)]
    for r in rows:
        mark = "-" if r.match is None else ("yes" if r.match else "NO")
        lines.append(f"{r.gate:<12} {r.ancilla:<8} {str(r.k) if r.k else '-':<4} "
                     f"{norm(r.formula_value):<22} {norm(r.measured):<14} "
                     f"{mark:<6} {r.note}")
    return "\n".join(lines)


def ledger_to_json(rows: list[LedgerRow]) -> str:
    return json.dumps({"schema": 1, "rows": [r.to_json() for r in rows]},
                      indent=2)
