"""Generators for every circuit construction in the toolkit.

Each generator returns a ConstructionSpec: the circuit together with its
claimed semantics (exact unitary, generalized permutation with a declared
phase-support set, or measurement channel), its T-count formula, and its
validity range.  The verify module discharges the obligations.

Multiply-controlled gates follow one shared skeleton (H, T/Tdg rotations
and two alternating sub-oracles on the target wire); the relative-phase
ladders thread a single borrowed wire through a recursion whose base is
the 4-T doubly-controlled iX.  Measurement-assisted terminations move
temporary values into the phase with H, measure, and correct the leftover
phase classically.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ctsynth.boolfn import BooleanFn, fk
from ctsynth.circuit import Builder, Circuit, inverse
from ctsynth.ring import ONE, ZERO, RingScalar, omega_power
from ctsynth.sim import Matrix, zeros


class ValidityError(Exception):
    """Parameter outside the construction's validity range."""


@dataclass
class ConstructionSpec:
    name: str
    params: dict
    circuit: Circuit
    # semantic obligation: "unitary" | "genperm" | "channel"
    kind: str
    target_unitary: Matrix | None = None
    # genperm targets: permutation on full basis indices + allowed supports
    target_perm: object = None               # callable index -> index
    declared_support: frozenset[int] | None = None
    # channel targets
    target_channel: Matrix | None = None
    channel_input_basis: list[int] | None = None
    # T-count bookkeeping: the achieved formula (verified exactly) and the
    # per-branch totals where measurements split the count
    tcount_formula: str = ""
    expected_tcount: int | None = None
    expected_branch_tcounts: frozenset[int] | None = None
    validity: str = ""
    notes: list[str] = field(default_factory=list)

    def sidecar(self) -> dict:
        out = {
            "schema": 1,
            "name": self.name,
            "params": dict(self.params),
            "kind": self.kind,
            "tcount_formula": self.tcount_formula,
            "validity": self.validity,
            "notes": list(self.notes),
        }
        if self.declared_support is not None:
            out["phase_support"] = sorted(self.declared_support)
        if self.expected_tcount is not None:
            out["tcount"] = self.expected_tcount
        if self.expected_branch_tcounts is not None:
            out["tcount_branches"] = sorted(self.expected_branch_tcounts)
        return out


# ---------------------------------------------------------------------------
# Ideal matrices
# ---------------------------------------------------------------------------

def perm_matrix(n_qubits: int, perm) -> Matrix:
    dim = 1 << n_qubits
    m = zeros(dim, dim)
    for idx in range(dim):
        m[perm(idx)][idx] = ONE
    return m


def phased_perm_matrix(n_qubits: int, perm, phase_exp) -> Matrix:
    """Matrix of P*D: column idx holds omega^{phase_exp(idx)} at row perm(idx)."""
    dim = 1 << n_qubits
    m = zeros(dim, dim)
    for idx in range(dim):
        m[perm(idx)][idx] = omega_power(phase_exp(idx))
    return m


def lambda_x_perm(n_qubits: int, controls: list[int], target: int):
    def perm(idx: int) -> int:
        if all((idx >> (n_qubits - 1 - c)) & 1 for c in controls):
            return idx ^ (1 << (n_qubits - 1 - target))
        return idx
    return perm


def lambda_x_matrix(k: int) -> Matrix:
    """Lambda_k(X) on k controls followed by the target wire."""
    return perm_matrix(k + 1, lambda_x_perm(k + 1, list(range(k)), k))


def lambda_ix_matrix(k: int) -> Matrix:
    """Lambda_k(iX): the multiply-controlled X with phase i on active columns."""
    perm = lambda_x_perm(k + 1, list(range(k)), k)
    def phase(idx: int) -> int:
        return 2 if all((idx >> (k - c)) & 1 for c in range(k)) else 0
    return phased_perm_matrix(k + 1, perm, phase)


def oracle_perm(n_qubits: int, f: BooleanFn, x_wires: list[int], target: int):
    """Permutation |x,y> -> |x, y xor f(x)| on the given wire layout."""
    def perm(idx: int) -> int:
        packed = 0
        for pos, w in enumerate(x_wires):
            packed |= ((idx >> (n_qubits - 1 - w)) & 1) << (f.n_vars - 1 - pos)
        if f.eval(packed):
            return idx ^ (1 << (n_qubits - 1 - target))
        return idx
    return perm


# ---------------------------------------------------------------------------
# Core fragments
# ---------------------------------------------------------------------------

def _tof_slot(b: Builder, control: int, helper: int, target: int, sign: int):
    """Toffoli(control, helper -> target) realized as a doubly-controlled
    iZ (i-part on control/target) conjugated by H on the target.

    Used wherever two such Toffolis sandwich an operation that changes the
    helper wire: the i-parts cancel between the +/- pair regardless of the
    helper value, which a plain doubly-controlled iX pair would not do.
    """
    kind = "cciz" if sign > 0 else "ccmiz"
    b.g("h", target).g(kind, control, target, helper).g("h", target)


def bullet_fragment(n: int, controls: list[int], dirty: int, target: int) -> Circuit:
    """Multiply-controlled X up to a phase on the controls and the borrowed
    dirty wire; 8(k-2)+4 T gates for k controls.

    Recursion: trade the dirty wire into the phase space with H, compute
    the (k-1)-control product onto it between a matched pair of Toffoli
    slots on the target, and trade back.
    """
    if len(controls) < 2:
        raise ValidityError("needs at least 2 controls")
    b = Builder(n)
    _emit_bullet(b, controls, dirty, target)
    return b.build()


def _emit_bullet(b: Builder, controls: list[int], dirty: int, target: int):
    if len(controls) == 2:
        b.g("ccix", controls[0], controls[1], target)
        return
    peel = controls[-1]
    rest = controls[:-1]
    b.g("h", dirty)
    _tof_slot(b, peel, dirty, target, +1)
    _emit_bullet(b, rest, peel, dirty)
    _tof_slot(b, peel, dirty, target, -1)
    b.g("h", dirty)


def star_fragment(n: int, controls: list[int], target: int) -> Circuit:
    """Multiply-controlled X up to a phase on controls and target; 8(k-2) T.

    Unmatched multiplication: the last control is added twice around a
    single relative-phase product of the others, which borrows that same
    control as its dirty wire.
    """
    if len(controls) < 3:
        raise ValidityError("needs at least 3 controls")
    b = Builder(n)
    _emit_star(b, controls, target)
    return b.build()


def _emit_star(b: Builder, controls: list[int], target: int):
    doubled = controls[-1]
    rest = controls[:-1]
    b.g("h", target).g("t", target).g("cx", doubled, target).g("tdg", target)
    _emit_bullet(b, rest, doubled, target)
    b.g("t", target).g("cx", doubled, target).g("tdg", target).g("h", target)


def _split_groups(controls: list[int]) -> tuple[list[int], list[int]]:
    half = (len(controls) + 1) // 2
    return controls[:half], controls[half:]


def _skeleton(b: Builder, target: int, gate_b, gate_a, inv_b, inv_a):
    """H Tdg B T A Tdg B^-1 T A^-1 H on the target wire."""
    b.g("h", target).g("tdg", target)
    gate_b()
    b.g("t", target)
    gate_a()
    b.g("tdg", target)
    inv_b()
    b.g("t", target)
    inv_a()
    b.g("h", target)


# ---------------------------------------------------------------------------
# Small named constructions
# ---------------------------------------------------------------------------

def ccix() -> ConstructionSpec:
    """Doubly-controlled iX: 4 T gates, phase i on the 11 control columns."""
    c = Builder(3).g("ccix", 0, 1, 2).build()
    perm = lambda_x_perm(3, [0, 1], 2)
    return ConstructionSpec(
        "ccix", {}, c, "unitary",
        target_unitary=lambda_ix_matrix(2),
        target_perm=perm, declared_support=frozenset({0, 1}),
        tcount_formula="4", expected_tcount=4, validity="-")


def ccix_dg() -> ConstructionSpec:
    c = Builder(3).g("ccixdg", 0, 1, 2).build()
    perm = lambda_x_perm(3, [0, 1], 2)
    def phase(idx):
        return -2 if (idx >> 1) & 0b11 == 0b11 else 0
    return ConstructionSpec(
        "ccix_dg", {}, c, "unitary",
        target_unitary=phased_perm_matrix(3, perm, phase),
        target_perm=perm, declared_support=frozenset({0, 1}),
        tcount_formula="4", expected_tcount=4, validity="-")


def maslov_toffoli4() -> ConstructionSpec:
    """The 8-T relative-phase 4-qubit Toffoli, exactly as drawn."""
    b = Builder(4)
    t = 3
    b.g("h", t).g("t", t).g("cx", 2, t).g("tdg", t).g("h", t)
    b.g("cx", 0, t).g("t", t).g("cx", 1, t).g("tdg", t)
    b.g("cx", 0, t).g("t", t).g("cx", 1, t).g("tdg", t)
    b.g("h", t).g("t", t).g("cx", 2, t).g("tdg", t).g("h", t)
    return ConstructionSpec(
        "maslov_toffoli4", {}, b.build(), "genperm",
        target_perm=lambda_x_perm(4, [0, 1, 2], 3),
        declared_support=frozenset({0, 1, 2, 3}),
        tcount_formula="8", expected_tcount=8, validity="-")


def giles_selinger_skeleton(inner_a: Circuit, inner_b: Circuit,
                            a_wires: list[int], b_wires: list[int],
                            n: int, target: int) -> ConstructionSpec:
    """The matched-multiplication skeleton with caller-supplied
    multiply-controlled-X implementations for the two control groups.

    inner_a / inner_b are oracles on (group wires..., target); wire lists
    locate their controls in the full register.
    """
    if not a_wires or not b_wires:
        raise ValidityError("needs two nonempty control groups")
    if inner_a.n_qubits != len(a_wires) + 1 or inner_b.n_qubits != len(b_wires) + 1:
        raise ValidityError("inner circuit arity does not match its group")
    b = Builder(n)
    amap = {i: w for i, w in enumerate(a_wires)} | {len(a_wires): target}
    bmap = {i: w for i, w in enumerate(b_wires)} | {len(b_wires): target}
    _skeleton(b, target,
              lambda: b.inline(inner_b, bmap),
              lambda: b.inline(inner_a, amap),
              lambda: b.inline(inverse(inner_b), bmap),
              lambda: b.inline(inverse(inner_a), amap))
    k = len(a_wires) + len(b_wires)
    return ConstructionSpec(
        "giles_selinger_skeleton", {"k": k}, b.build(), "genperm",
        target_perm=lambda_x_perm(n, a_wires + b_wires, target),
        declared_support=frozenset(a_wires + b_wires),
        tcount_formula="4 + 2 tau(A) + 2 tau(B)", validity="k>=2")


def jones_toffoli() -> ConstructionSpec:
    """Full Toffoli from 4 T gates, one measurement and a classical CZ."""
    b = Builder(4, 1, io_spec=("input", "input", "clean", "input"))
    b.alloc(2, "clean")
    b.g("ccix", 0, 1, 2).g("sdg", 2).g("cx", 2, 3)
    b.g("h", 2).measz(2, 0).cg(0, 1, "cz", 0, 1).release(2, "measured")
    return ConstructionSpec(
        "jones_toffoli", {}, b.build(), "channel",
        target_channel=lambda_x_matrix(2),
        tcount_formula="4", expected_tcount=4,
        expected_branch_tcounts=frozenset({4}), validity="-")


def gidney_and_init() -> ConstructionSpec:
    """Initialize a clean ancilla to the AND of two bits, exactly, 4 T."""
    b = Builder(3, 0, io_spec=("input", "input", "clean"))
    b.alloc(2, "clean").g("ccix", 0, 1, 2).g("sdg", 2)
    perm = oracle_perm(3, BooleanFn.product_of([0, 1], 2), [0, 1], 2)
    return ConstructionSpec(
        "gidney_and_init", {}, b.build(), "genperm",
        target_perm=perm, declared_support=frozenset(),
        tcount_formula="4", expected_tcount=4, validity="-")


def gidney_and_terminate() -> ConstructionSpec:
    """Terminate a temporary AND by X-basis measurement; 0 T either way."""
    b = Builder(3, 1, io_spec=("input", "input", "target"))
    b.g("h", 2).measz(2, 0).cg(0, 1, "cz", 0, 1).release(2, "measured")
    basis = [(x << 1) | ((x >> 1) & x & 1) for x in range(4)]
    target = zeros(4, 4)
    for i in range(4):
        target[i][i] = ONE
    return ConstructionSpec(
        "gidney_and_terminate", {}, b.build(), "channel",
        target_channel=target, channel_input_basis=basis,
        tcount_formula="0", expected_tcount=0,
        expected_branch_tcounts=frozenset({0}), validity="-")


# ---------------------------------------------------------------------------
# Bennett-style oracle wrappers
# ---------------------------------------------------------------------------

def _oracle_shape(f_circ: Circuit) -> int:
    if f_circ.n_qubits < 2:
        raise ValidityError("oracle needs at least one input and a target")
    if f_circ.has_measurement():
        raise ValidityError("oracle circuits must be measurement-free")
    return f_circ.n_qubits - 1


def bennett(f_circ: Circuit) -> ConstructionSpec:
    """Compute-copy-uncompute with a clean helper wire."""
    n_in = _oracle_shape(f_circ)
    n = n_in + 2
    a, y = n_in, n_in + 1
    roles = ("input",) * n_in + ("clean", "input")
    b = Builder(n, 0, io_spec=roles)
    fmap = {i: i for i in range(n_in)} | {n_in: a}
    b.alloc(a, "clean")
    b.inline(f_circ, fmap).g("cx", a, y).inline(inverse(f_circ), fmap)
    b.release(a, "zero")
    return ConstructionSpec(
        "bennett", {"n": n_in}, b.build(), "genperm",
        target_perm=None, declared_support=frozenset(range(n_in)),
        tcount_formula="2 tau(f)", validity="-")


def bennett_dirty(f_circ: Circuit) -> ConstructionSpec:
    """Bennett trick with a dirty helper: one extra CX pre-copies its value."""
    n_in = _oracle_shape(f_circ)
    n = n_in + 2
    a, y = n_in, n_in + 1
    roles = ("input",) * n_in + ("dirty", "input")
    b = Builder(n, 0, io_spec=roles)
    fmap = {i: i for i in range(n_in)} | {n_in: a}
    b.g("cx", a, y).inline(f_circ, fmap).g("cx", a, y).inline(inverse(f_circ), fmap)
    b.release(a, "unchanged")
    return ConstructionSpec(
        "bennett_dirty", {"n": n_in}, b.build(), "genperm",
        target_perm=None, declared_support=frozenset(range(n_in)).union({a}),
        tcount_formula="2 tau(f)", validity="-")


def phase_bennett(f_circ: Circuit) -> ConstructionSpec:
    """Single-compute Bennett: park the helper's clean state in the phase.

    H swaps |0> into the phase space, the now-dirty helper value is added
    to the target twice, and the final H retrieves the clean state.
    """
    n_in = _oracle_shape(f_circ)
    n = n_in + 2
    a, y = n_in, n_in + 1
    roles = ("input",) * n_in + ("clean", "input")
    b = Builder(n, 0, io_spec=roles)
    fmap = {i: i for i in range(n_in)} | {n_in: a}
    b.alloc(a, "clean")
    b.g("h", a).g("cx", a, y).inline(f_circ, fmap).g("cx", a, y).g("h", a)
    b.release(a, "zero")
    return ConstructionSpec(
        "phase_bennett", {"n": n_in}, b.build(), "genperm",
        target_perm=None, declared_support=frozenset(range(n_in)),
        tcount_formula="tau(f)", validity="-")


def relative_tof4_dirty() -> ConstructionSpec:
    """4-control Toffoli over two dirty wires, uncomputation traded for the
    phase (-1)^{a x1x2 + b x1x2x3}; Toffolis kept exact."""
    b = Builder(7, 0, io_spec=("input",) * 4 + ("dirty", "dirty", "input"))
    a, bb, y = 4, 5, 6
    b.g("h", a).g("h", bb)
    b.g("toffoli", 3, bb, y).g("toffoli", 2, a, bb).g("toffoli", 0, 1, a)
    b.g("toffoli", 2, a, bb).g("toffoli", 3, bb, y)
    b.g("h", a).g("h", bb)
    return ConstructionSpec(
        "relative_tof4_dirty", {}, b.build(), "genperm",
        target_perm=lambda_x_perm(7, [0, 1, 2, 3], y),
        declared_support=frozenset({0, 1, 2, 4, 5}),
        tcount_formula="35 (5 Toffolis; 20 with doubly-controlled iX slots)",
        expected_tcount=35, validity="-",
        notes=["uncomputation of both helpers traded for a phase"])


# ---------------------------------------------------------------------------
# Oracle multiplication
# ---------------------------------------------------------------------------

def _two_oracles(f_circ: Circuit, g_circ: Circuit) -> int:
    n_f, n_g = _oracle_shape(f_circ), _oracle_shape(g_circ)
    if n_f != n_g:
        raise ValidityError("oracles must share the input register")
    return n_f


def oracle_mult_clean(f_circ: Circuit, g_circ: Circuit) -> ConstructionSpec:
    """Exact oracle for f*g with two clean helpers: 2 tau(f) + tau(g) + 8.

    The two Toffolis of the plain construction become +/- doubly
    controlled iZ gates (i-part on the f-helper and the target) wrapped
    in H on the target, so their phases cancel exactly even though the
    g-helper changes between them.
    """
    n_in = _two_oracles(f_circ, g_circ)
    n = n_in + 3
    a1, a2, y = n_in, n_in + 1, n_in + 2
    roles = ("input",) * n_in + ("clean", "clean", "input")
    b = Builder(n, 0, io_spec=roles)
    fmap = {i: i for i in range(n_in)} | {n_in: a1}
    gmap = {i: i for i in range(n_in)} | {n_in: a2}
    b.alloc(a1, "clean").alloc(a2, "clean")
    b.inline(f_circ, fmap)
    b.g("h", a2)
    _tof_slot(b, a1, a2, y, +1)
    b.inline(g_circ, gmap)
    _tof_slot(b, a1, a2, y, -1)
    b.g("h", a2)
    b.inline(inverse(f_circ), fmap)
    b.release(a1, "zero").release(a2, "zero")
    return ConstructionSpec(
        "oracle_mult_clean", {"n": n_in}, b.build(), "genperm",
        target_perm=None, declared_support=frozenset(),
        tcount_formula="2 tau(f) + tau(g) + 8", validity="-")


def oracle_mult_matched(f_circ: Circuit, g_circ: Circuit) -> ConstructionSpec:
    """Ancilla-free f*g up to a phase in the controls: 2 tau(f)+2 tau(g)+4."""
    n_in = _two_oracles(f_circ, g_circ)
    n = n_in + 1
    y = n_in
    b = Builder(n)
    omap = {i: i for i in range(n_in)} | {n_in: y}
    b.g("h", y).g("t", y)
    b.inline(f_circ, omap)
    b.g("tdg", y)
    b.inline(g_circ, omap)
    b.g("t", y)
    b.inline(f_circ, omap)
    b.g("tdg", y)
    b.inline(g_circ, omap)
    b.g("h", y)
    return ConstructionSpec(
        "oracle_mult_matched", {"n": n_in}, b.build(), "genperm",
        target_perm=None, declared_support=frozenset(range(n_in)),
        tcount_formula="2 tau(f) + 2 tau(g) + 4", validity="-")


def oracle_mult_unmatched(f_circ: Circuit, g_circ: Circuit) -> ConstructionSpec:
    """Ancilla-free f*g up to a phase in controls and target:
    2 tau(f) + tau(g) + 4."""
    n_in = _two_oracles(f_circ, g_circ)
    n = n_in + 1
    y = n_in
    b = Builder(n)
    omap = {i: i for i in range(n_in)} | {n_in: y}
    b.g("h", y).g("t", y)
    b.inline(f_circ, omap)
    b.g("tdg", y)
    b.inline(g_circ, omap)
    b.g("t", y)
    b.inline(f_circ, omap)
    b.g("tdg", y).g("h", y)
    return ConstructionSpec(
        "oracle_mult_unmatched", {"n": n_in}, b.build(), "genperm",
        target_perm=None, declared_support=frozenset(range(n_in + 1)),
        tcount_formula="2 tau(f) + tau(g) + 4", validity="-")


# ---------------------------------------------------------------------------
# Multiply-controlled Toffoli family
# ---------------------------------------------------------------------------

def lambda_x_bullet_dirty(k: int) -> ConstructionSpec:
    """k-control X up to a phase on controls and one dirty wire: 8(k-2)+4 T."""
    if k < 2:
        raise ValidityError("valid for k >= 2")
    n = k + 2
    a, t = k, k + 1
    roles = ("input",) * k + ("dirty", "input")
    frag = bullet_fragment(n, list(range(k)), a, t)
    c = Circuit(n, 0, frag.events, roles)
    return ConstructionSpec(
        "lambda_x_bullet_dirty", {"k": k}, c, "genperm",
        target_perm=lambda_x_perm(n, list(range(k)), t),
        declared_support=frozenset(range(k)).union({a}),
        tcount_formula="8(k-2)+4", expected_tcount=8 * (k - 2) + 4,
        validity="k>=2")


def lambda_x_dirty(k: int, variant: str = "matched") -> ConstructionSpec:
    """Exact k-control X with one dirty wire: 16(k-2) T.

    matched: two Toffoli slots around a matched relative-phase pair
    computing the (k-1)-product onto the dirty wire.
    phase_cleanup: the relative-phase form followed by an explicit inverse
    phase ladder, preferable when a later uncomputation can cancel it.
    """
    if k < 4:
        raise ValidityError("valid for k >= 4")
    n = k + 2
    a, t = k, k + 1
    roles = ("input",) * k + ("dirty", "input")
    b = Builder(n, 0, io_spec=roles)
    inner = bullet_fragment(n, list(range(k - 1)), k - 1, a)
    if variant == "matched":
        _tof_slot(b, k - 1, a, t, +1)
        b.inline(inner, {i: i for i in range(n)})
        _tof_slot(b, k - 1, a, t, -1)
        b.inline(inverse(inner), {i: i for i in range(n)})
    elif variant == "phase_cleanup":
        b.inline(bullet_fragment(n, list(range(k)), a, t), {i: i for i in range(n)})
        b.g("h", a)
        b.inline(inverse(inner), {i: i for i in range(n)})
        b.g("h", a)
    else:
        raise ValidityError(f"unknown variant {variant!r}")
    return ConstructionSpec(
        "lambda_x_dirty", {"k": k, "variant": variant}, b.build(), "unitary",
        target_unitary=perm_matrix(n, lambda_x_perm(n, list(range(k)), t)),
        target_perm=lambda_x_perm(n, list(range(k)), t),
        declared_support=frozenset(),
        tcount_formula="16(k-2)", expected_tcount=16 * (k - 2),
        validity="k>=4")


def lambda_z_relative(k: int) -> ConstructionSpec:
    """k-control Z up to relative phase with a dirty wire, via H-conjugated
    relative-phase k-control X."""
    if k < 2:
        raise ValidityError("valid for k >= 2")
    n = k + 2
    a, y = k, k + 1
    roles = ("input",) * k + ("dirty", "input")
    b = Builder(n, 0, io_spec=roles)
    b.g("h", y)
    b.inline(bullet_fragment(n, list(range(k)), a, y), {i: i for i in range(n)})
    b.g("h", y)
    return ConstructionSpec(
        "lambda_z_relative", {"k": k}, b.build(), "genperm",
        target_perm=lambda idx: idx,
        declared_support=frozenset(range(n)),
        tcount_formula="8(k-2)+4", expected_tcount=8 * (k - 2) + 4,
        validity="k>=2",
        notes=["diagonal: phase difference in the target slot is the k-control Z"])


def cix(k: int) -> ConstructionSpec:
    """Ancilla-free k-control iX: 16(k-3)+4 T, phase only on the controls.

    Matched multiplication over two control groups, each group's product
    realized by the relative-phase ladder borrowing a wire of the other
    group; the ladder phases cancel pairwise, leaving exactly the i on
    all-ones control columns.
    """
    if k < 4:
        raise ValidityError("valid for k >= 4")
    n = k + 1
    t = k
    grp_a, grp_b = _split_groups(list(range(k)))
    xa = bullet_fragment(n, grp_a, grp_b[0], t)
    xb = bullet_fragment(n, grp_b, grp_a[0], t)
    ident = {i: i for i in range(n)}
    b = Builder(n)
    _skeleton(b, t,
              lambda: b.inline(xb, ident),
              lambda: b.inline(xa, ident),
              lambda: b.inline(inverse(xb), ident),
              lambda: b.inline(inverse(xa), ident))
    return ConstructionSpec(
        "cix", {"k": k}, b.build(), "unitary",
        target_unitary=lambda_ix_matrix(k),
        target_perm=lambda_x_perm(n, list(range(k)), t),
        declared_support=frozenset(range(k)),
        tcount_formula="16(k-3)+4", expected_tcount=16 * (k - 3) + 4,
        validity="k>=4")


def cxstar(k: int) -> ConstructionSpec:
    """Ancilla-free k-control X up to a phase on controls and target: 8(k-2) T."""
    if k < 3:
        raise ValidityError("valid for k >= 3")
    n = k + 1
    t = k
    c = star_fragment(n, list(range(k)), t)
    return ConstructionSpec(
        "cxstar", {"k": k}, c, "genperm",
        target_perm=lambda_x_perm(n, list(range(k)), t),
        declared_support=frozenset(range(n)),
        tcount_formula="8(k-2)", expected_tcount=8 * (k - 2),
        validity="k>=3")


def cxbullet(k: int) -> ConstructionSpec:
    """Ancilla-free k-control X up to a phase only on the controls.

    Matched multiplication over two groups with star-type inner gates.
    For k >= 6 both groups have 3+ controls and the count is 16(k-4)+4.
    At k = 5 no 2-control star-type gate exists below 4 T, so the small
    group falls back to the doubly-controlled iX and the count is 28, not
    the 16(k-4)+4 = 20 the formula row claims; see the ledger note.
    """
    if k < 5:
        raise ValidityError("valid for k >= 5")
    n = k + 1
    t = k
    grp_a, grp_b = _split_groups(list(range(k)))
    def inner(grp):
        if len(grp) >= 3:
            return star_fragment(n, grp, t)
        frag = Builder(n).g("ccix", grp[0], grp[1], t).build()
        return frag
    xa, xb = inner(grp_a), inner(grp_b)
    ident = {i: i for i in range(n)}
    b = Builder(n)
    _skeleton(b, t,
              lambda: b.inline(xb, ident),
              lambda: b.inline(xa, ident),
              lambda: b.inline(inverse(xb), ident),
              lambda: b.inline(inverse(xa), ident))
    expected = 16 * (k - 4) + 4 if k >= 6 else 28
    return ConstructionSpec(
        "cxbullet", {"k": k}, b.build(), "genperm",
        target_perm=lambda_x_perm(n, list(range(k)), t),
        declared_support=frozenset(range(k)),
        tcount_formula="16(k-4)+4 for k>=6; 28 at k=5",
        expected_tcount=expected, validity="k>=5")


def cxstar_with_ancillas(k: int, m: int) -> ConstructionSpec:
    """k-control X up to phase on controls and target with m clean helpers:
    4m + 8(k-m-2) T.

    Each helper absorbs one control via a temporary AND (4 T to make,
    0 T to terminate by measurement); the residual (k-m)-control star gate
    does the rest.
    """
    if k < 5:
        raise ValidityError("valid for k >= 5")
    if not 1 <= m <= k - 3:
        raise ValidityError("helper count must satisfy 1 <= m <= k-3")
    n = k + m + 1
    ancs = list(range(k, k + m))
    t = k + m
    roles = ("input",) * k + ("clean",) * m + ("input",)
    b = Builder(n, m, io_spec=roles)
    # chain of temporary products: anc_j = (previous product) AND x_{j+1}
    pairs = []
    prev = 0
    for j, anc in enumerate(ancs):
        other = j + 1
        b.alloc(anc, "clean").g("ccix", prev, other, anc).g("sdg", anc)
        pairs.append((prev, other, anc))
        prev = anc
    eff_controls = [prev] + list(range(m + 1, k))
    b.inline(star_fragment(n, eff_controls, t), {i: i for i in range(n)})
    for bit, (u, v, anc) in enumerate(reversed(pairs)):
        b.g("h", anc).measz(anc, bit).cg(bit, 1, "cz", u, v)
        b.release(anc, "measured")
    return ConstructionSpec(
        "cxstar_with_ancillas", {"k": k, "m": m}, b.build(), "genperm",
        target_perm=lambda_x_perm(n, list(range(k)), t),
        declared_support=frozenset(range(k)).union({t}),
        tcount_formula="4m + 8(k-m-2)",
        expected_tcount=4 * m + 8 * (k - m - 2),
        expected_branch_tcounts=frozenset({4 * m + 8 * (k - m - 2)}),
        validity="k>=5, 1<=m<=k-3")


# ---------------------------------------------------------------------------
# High-degree oracles
# ---------------------------------------------------------------------------

def _fk_fragment(n: int, x_wires: list[int], target: int, variant: str) -> Circuit:
    b = Builder(n)
    _emit_fk(b, x_wires, target, variant)
    return b.build()


def _emit_fk(b: Builder, x_wires: list[int], target: int, variant: str):
    k = len(x_wires)
    if k == 1:
        b.g("cx", x_wires[0], target)
        return
    if variant == "maslov" and k == 2:
        # matched multiplication of the two bits: exact product, phase in
        # the controls only
        x1, x2 = x_wires
        b.g("h", target).g("t", target).g("cx", x1, target).g("tdg", target)
        b.g("cx", x2, target).g("t", target).g("cx", x1, target)
        b.g("tdg", target).g("cx", x2, target).g("h", target)
        return
    lead = x_wires[0]
    b.g("h", target).g("t", target).g("cx", lead, target).g("tdg", target)
    _emit_fk(b, x_wires[1:], target, variant)
    b.g("t", target).g("cx", lead, target).g("tdg", target).g("h", target)


def fk_circuit(k: int, variant: str = "plain") -> ConstructionSpec:
    """Oracles for the degree-k recurrence functions.

    plain / maslov: ancilla-free, 4(k-1) T, up to a phase in controls and
    target.  exact_dirty: the exact oracle from a matched pair of the
    relative-phase circuit around CX copies through a dirty wire, 8(k-1) T.
    """
    if k < 1:
        raise ValidityError("valid for k >= 1")
    if variant in ("plain", "maslov"):
        if variant == "maslov" and k < 2:
            raise ValidityError("maslov variant needs k >= 2")
        n = k + 1
        c = _fk_fragment(n, list(range(k)), k, variant)
        return ConstructionSpec(
            "fk_circuit", {"k": k, "variant": variant}, c, "genperm",
            target_perm=oracle_perm(n, fk(k, variant), list(range(k)), k),
            declared_support=frozenset(range(n)),
            tcount_formula="4(k-1)", expected_tcount=4 * (k - 1),
            validity="k>=2" if variant == "maslov" else "k>=1")
    if variant == "exact_dirty":
        n = k + 2
        a, y = k, k + 1
        roles = ("input",) * k + ("dirty", "input")
        b = Builder(n, 0, io_spec=roles)
        frag = _fk_fragment(n, list(range(k)), a, "plain")
        b.g("cx", a, y)
        b.inline(frag, {i: i for i in range(n)})
        b.g("cx", a, y)
        b.inline(inverse(frag), {i: i for i in range(n)})
        b.release(a, "unchanged")
        return ConstructionSpec(
            "fk_circuit", {"k": k, "variant": variant}, b.build(), "unitary",
            target_unitary=perm_matrix(n, oracle_perm(n, fk(k), list(range(k)), y)),
            target_perm=oracle_perm(n, fk(k), list(range(k)), y),
            declared_support=frozenset(),
            tcount_formula="8(k-1)", expected_tcount=8 * (k - 1),
            validity="k>=1")
    raise ValidityError(f"unknown variant {variant!r}")


# ---------------------------------------------------------------------------
# Temporary k-bit products
# ---------------------------------------------------------------------------

def _product_basis(k: int) -> list[int]:
    """Basis indices |x, product(x)> for a register (x wires, product wire)."""
    out = []
    for x in range(1 << k):
        p = 1 if x == (1 << k) - 1 else 0
        out.append((x << 1) | p)
    return out


def kand_init(k: int, variant: str = "star") -> ConstructionSpec:
    """Initialize a clean wire to the product of k bits.

    iX variant (k >= 4): multiply-controlled iX + Sdg, exact, 16(k-3)+4 T.
    star variant (k >= 3): the 8(k-2)-T relative-phase gate + Sdg; the
    product is stored exactly, a phase on the controls remains and is
    undone by the matching relative termination.
    """
    n = k + 1
    p = k
    roles = ("input",) * k + ("clean",)
    b = Builder(n, 0, io_spec=roles)
    b.alloc(p, "clean")
    if variant == "iX":
        if k < 4:
            raise ValidityError("iX variant valid for k >= 4")
        b.inline(cix(k).circuit, {i: i for i in range(n)})
        b.g("sdg", p)
        support: frozenset[int] = frozenset()
        formula, count = "16(k-3)+4", 16 * (k - 3) + 4
    elif variant == "star":
        if k < 3:
            raise ValidityError("star variant valid for k >= 3")
        b.inline(star_fragment(n, list(range(k)), p), {i: i for i in range(n)})
        b.g("sdg", p)
        support = frozenset(range(k))
        formula, count = "8(k-2)", 8 * (k - 2)
    else:
        raise ValidityError(f"unknown variant {variant!r}")
    return ConstructionSpec(
        "kand_init", {"k": k, "variant": variant}, b.build(), "genperm",
        target_perm=oracle_perm(n, BooleanFn.product_of(list(range(k)), k),
                                list(range(k)), p),
        declared_support=support,
        tcount_formula=formula, expected_tcount=count,
        validity="k>=4" if variant == "iX" else "k>=3")


def _init_isometry_dagger(init: ConstructionSpec, k: int) -> Matrix:
    """Adjoint of the init isometry |x> -> phase |x, product>: the exact
    target map every termination must realize branch-by-branch."""
    from ctsynth.sim import kraus_of
    basis_in = [x << 1 for x in range(1 << k)]
    bm = kraus_of(init.circuit, basis_in)
    (key, v), = bm.kraus.items()
    assert key == ()
    rows = 1 << k
    target = zeros(rows, rows)
    prod_basis = _product_basis(k)
    for col, full in enumerate(prod_basis):
        x = full >> 1
        target[x][col] = v[full][col].conj()
    return target


def kand_terminate(k: int, variant: str = "relative") -> ConstructionSpec:
    """Measurement-assisted termination of a stored k-bit product.

    exact (k >= 6): pairs with the iX init.  X-basis measure; on outcome 1
    make a temporary AND of the last two controls on the freed wire
    (4 T), apply the exact (k-2)-control Z through a dirty wire
    (16(k-4) T), terminate the temporary AND by measurement (0 T).
    Branch totals {0, 16(k-4)+4}.

    relative (k >= 4): pairs with the star init.  The inverse phase ladder
    runs unconditionally on the freed wire (8(k-4)+4 T), sandwiched in CX
    from the last control so its diagonal lands on the right product; the
    outcome-1 branch additionally routes through a temporary AND of the
    last two controls (4 T) which shifts the same diagonal by the full
    k-bit product.  Branch totals {8(k-4)+4, 8(k-4)+8}.
    """
    n = k + 1
    p = k
    roles = ("input",) * k + ("target",)
    b = Builder(n, 2, io_spec=roles)
    b.g("h", p).measz(p, 0)
    cond = (0, 1)
    if variant == "exact":
        if k < 6:
            raise ValidityError("exact variant valid for k >= 6")
        b.cg(0, 1, "x", p).release(p, "zero").alloc(p, "clean")
        b.cg(0, 1, "ccix", k - 2, k - 1, p).cg(0, 1, "sdg", p)
        # exact (k-2)-control Z on (x1..x_{k-2}, p): H on p around the
        # matched dirty-wire k-control X, borrowing control k-1 of the
        # register (the wire inside the temporary AND) as the helper
        helper = k - 2
        peel = k - 3
        inner = bullet_fragment(n, list(range(k - 3)), peel, helper)
        ident = {i: i for i in range(n)}
        b.cg(0, 1, "h", p)
        b.cg(0, 1, "h", p).cg(0, 1, "cciz", peel, p, helper).cg(0, 1, "h", p)
        b.inline(inner, ident, condition=cond)
        b.cg(0, 1, "h", p).cg(0, 1, "ccmiz", peel, p, helper).cg(0, 1, "h", p)
        b.inline(inverse(inner), ident, condition=cond)
        b.cg(0, 1, "h", p)
        b.cg(0, 1, "h", p)
        b.measz(p, 1).cg(1, 1, "cz", k - 2, k - 1)
        b.release(p, "measured")
        branch = frozenset({0, 16 * (k - 4) + 4})
        formula = "{0, 16(k-4)+4}"
        init = kand_init(k, "iX")
        validity = "k>=6"
    elif variant == "relative":
        if k < 4:
            raise ValidityError("relative variant valid for k >= 4")
        b.cg(0, 1, "x", p).release(p, "zero").alloc(p, "clean")
        b.cg(0, 1, "ccix", k - 2, k - 1, p).cg(0, 1, "sdg", p)
        b.g("cx", k - 1, p)
        b.g("h", p)
        inner = bullet_fragment(n, list(range(k - 2)), k - 2, p)
        b.inline(inverse(inner), {i: i for i in range(n)})
        b.g("h", p)
        b.g("cx", k - 1, p)
        b.cg(0, 1, "h", p)
        b.measz(p, 1).cg(1, 1, "cz", k - 2, k - 1)
        b.release(p, "measured")
        branch = frozenset({8 * (k - 4) + 4, 8 * (k - 4) + 8})
        formula = "{8(k-4)+4, 8(k-4)+8}"
        init = kand_init(k, "star")
        validity = "k>=4"
    else:
        raise ValidityError(f"unknown variant {variant!r}")
    return ConstructionSpec(
        "kand_terminate", {"k": k, "variant": variant}, b.build(), "channel",
        target_channel=_init_isometry_dagger(init, k),
        channel_input_basis=_product_basis(k),
        tcount_formula=formula, expected_branch_tcounts=branch,
        validity=validity,
        notes=["target map is the adjoint of the paired init isometry"])


def and3_terminate() -> ConstructionSpec:
    """Terminate a 3-bit product made by the 8-T relative-phase Toffoli-4.

    Outcome 0 needs only the inverse controlled-S (3 T); outcome 1 a
    doubly-controlled -iZ (4 T).
    """
    b = Builder(4, 1, io_spec=("input", "input", "input", "target"))
    b.g("h", 3).measz(3, 0)
    b.cg(0, 0, "csdg", 0, 1)
    b.cg(0, 1, "ccmiz", 0, 1, 2)
    b.release(3, "measured")
    init = kand_init(3, "star")
    return ConstructionSpec(
        "and3_terminate", {}, b.build(), "channel",
        target_channel=_init_isometry_dagger(init, 3),
        channel_input_basis=_product_basis(3),
        tcount_formula="{3, 4}", expected_branch_tcounts=frozenset({3, 4}),
        validity="-",
        notes=["target map is the adjoint of the 3-control star init"])


def jones_lambda_x(k: int) -> ConstructionSpec:
    """k-control Toffoli from one clean helper, measurements and classical
    control: star init, CX copy, relative termination."""
    if k < 4:
        raise ValidityError("valid for k >= 4")
    n = k + 2
    p, y = k, k + 1
    roles = ("input",) * k + ("clean", "input")
    b = Builder(n, 2, io_spec=roles)
    init = kand_init(k, "star")
    term = kand_terminate(k, "relative")
    sub_map = {i: i for i in range(k + 1)}
    b.inline(init.circuit, sub_map)
    b.g("cx", p, y)
    b.inline(term.circuit, sub_map, cmap={0: 0, 1: 1})
    lo = 8 * (k - 2) + 8 * (k - 4) + 4
    return ConstructionSpec(
        "jones_lambda_x", {"k": k}, b.build(), "channel",
        target_channel=perm_matrix(k + 1, lambda_x_perm(k + 1, list(range(k)), k)),
        tcount_formula="{16(k-3)+4, 16(k-3)+8}",
        expected_branch_tcounts=frozenset({lo, lo + 4}),
        validity="k>=4")


# ---------------------------------------------------------------------------
# Registry
# ---------------------------------------------------------------------------

def _toy_oracle(n: int = 1) -> Circuit:
    return Builder(n + 1).g("cx", 0, n).build()


REGISTRY: dict = {
    "ccix": (ccix, ()),
    "ccix_dg": (ccix_dg, ()),
    "maslov_toffoli4": (maslov_toffoli4, ()),
    "jones_toffoli": (jones_toffoli, ()),
    "gidney_and_init": (gidney_and_init, ()),
    "gidney_and_terminate": (gidney_and_terminate, ()),
    "relative_tof4_dirty": (relative_tof4_dirty, ()),
    "lambda_x_bullet_dirty": (lambda_x_bullet_dirty, ("k",)),
    "lambda_x_dirty": (lambda_x_dirty, ("k", "variant")),
    "lambda_z_relative": (lambda_z_relative, ("k",)),
    "cix": (cix, ("k",)),
    "cxstar": (cxstar, ("k",)),
    "cxbullet": (cxbullet, ("k",)),
    "cxstar_with_ancillas": (cxstar_with_ancillas, ("k", "m")),
    "fk_circuit": (fk_circuit, ("k", "variant")),
    "kand_init": (kand_init, ("k", "variant")),
    "kand_terminate": (kand_terminate, ("k", "variant")),
    "and3_terminate": (and3_terminate, ()),
    "jones_lambda_x": (jones_lambda_x, ("k",)),
}
