"""Per-construction obligations: semantics, phases, T-counts, validity."""

from __future__ import annotations

import pytest

from conftest import cx_oracle, isometry_on_clean_subspace, oracle_truth_table, padded_oracle
from ctsynth import constructions as cons
from ctsynth.boolfn import fk
from ctsynth.circuit import Builder, Circuit, compose, inverse, t_count
from ctsynth.constructions import ValidityError
from ctsynth.ring import ONE, omega_power
from ctsynth.sim import (
    channel_equals, identity, mat_equal, mat_mul, unitary_of,
)
from ctsynth.verify import check_construction, extract_genperm, phase_support


def bit(idx, q, n):
    return (idx >> (n - 1 - q)) & 1


# -- doubly-controlled iX ----------------------------------------------------

def test_ccix_spec():
    spec = cons.ccix()
    assert check_construction(spec).ok
    assert t_count(spec.circuit).unconditional == 4


def test_ccix_times_dagger_is_identity():
    c = compose(cons.ccix().circuit, cons.ccix_dg().circuit)
    assert mat_equal(unitary_of(c), identity(8))


def test_ccix_dg_spec():
    assert check_construction(cons.ccix_dg()).ok


# -- the 8-T relative-phase Toffoli-4 ----------------------------------------

def test_maslov_toffoli4_exact_phase():
    spec = cons.maslov_toffoli4()
    rep = check_construction(spec)
    assert rep.ok
    gp = extract_genperm(unitary_of(spec.circuit))
    for idx in range(16):
        x1, x2, x3, y = (bit(idx, q, 4) for q in range(4))
        want = (2 * x1 * x2 + 2 * x1 * x2 * x3 + 4 * x1 * x2 * y) % 8
        assert gp.phase[idx] == want
    assert phase_support(gp) == {0, 1, 2, 3}


def test_maslov_equals_star3():
    assert mat_equal(unitary_of(cons.maslov_toffoli4().circuit),
                     unitary_of(cons.cxstar(3).circuit))


# -- Giles-Selinger skeleton -------------------------------------------------

def test_skeleton_with_cx_inners_is_ccix():
    inner = cx_oracle(1)
    spec = cons.giles_selinger_skeleton(inner, inner, [0], [1], 3, 2)
    assert mat_equal(unitary_of(spec.circuit), unitary_of(cons.ccix().circuit))


def test_skeleton_with_exact_toffoli_inners():
    inner = Builder(3).g("toffoli", 0, 1, 2).build()
    spec = cons.giles_selinger_skeleton(inner, inner, [0, 1], [2, 3], 5, 4)
    rep = check_construction(spec)
    assert rep.semantics_ok
    assert set(rep.phase_support_found) <= {0, 1, 2, 3}
    assert mat_equal(unitary_of(spec.circuit), cons.lambda_ix_matrix(4))


def test_skeleton_needs_two_groups():
    inner = cx_oracle(1)
    with pytest.raises(ValidityError):
        cons.giles_selinger_skeleton(inner, inner, [0], [], 2, 1)


# -- measurement-assisted Toffoli and logical AND ----------------------------

def test_jones_toffoli_channel():
    spec = cons.jones_toffoli()
    rep = check_construction(spec)
    assert rep.ok
    tc = t_count(spec.circuit)
    assert tc.unconditional == 4
    # outcome 0 applies no correction: same T-count, and the correction
    # gate is conditioned on outcome 1 only
    assert tc.per_outcome == {((0, 0),): 4, ((0, 1),): 4}


def test_gidney_init_exact_and_supportless():
    spec = cons.gidney_and_init()
    rep = check_construction(spec)
    assert rep.ok
    assert rep.phase_support_found == []


def test_gidney_terminate_counts():
    spec = cons.gidney_and_terminate()
    rep = check_construction(spec)
    assert rep.ok
    assert t_count(spec.circuit).outcome_values() == {0}


def test_gidney_init_then_terminate_is_identity_channel():
    init = cons.gidney_and_init().circuit
    term = cons.gidney_and_terminate().circuit
    c = Circuit(3, 1, init.events + term.events, init.io_spec)
    rep = channel_equals(c, identity(4), input_basis=[0, 2, 4, 6])
    assert rep.equal and rep.trace_preserving


# -- Bennett wrappers ---------------------------------------------------------

def test_bennett_garbage_free():
    f = cx_oracle(2, src=1)  # f(x1,x2) = x2
    spec = cons.bennett(f)
    mat, basis = isometry_on_clean_subspace(spec.circuit)
    # acts as |x1 x2, 0, y> -> |x1 x2, y xor x2> with the helper dropped
    for col, idx in enumerate(basis):
        x1, x2, y = bit(idx, 0, 4), bit(idx, 1, 4), bit(idx, 3, 4)
        want = (x1 << 2) | (x2 << 1) | (y ^ x2)
        hits = [r for r in range(len(mat)) if not mat[r][col].is_zero()]
        assert hits == [want]
        assert mat[want][col] == ONE


def test_phase_bennett_equals_bennett():
    f = cx_oracle(2, src=0)
    a, _ = isometry_on_clean_subspace(cons.bennett(f).circuit)
    b, _ = isometry_on_clean_subspace(cons.phase_bennett(f).circuit)
    assert mat_equal(a, b)
    assert (t_count(cons.phase_bennett(f).circuit).unconditional
            <= t_count(cons.bennett(f).circuit).unconditional)


def test_bennett_dirty_restores_helper_both_values():
    f = cx_oracle(1)
    spec = cons.bennett_dirty(f)
    u = unitary_of(spec.circuit)  # wires: x, a, y
    for idx in range(8):
        x, a, y = (bit(idx, q, 3) for q in range(3))
        want = (x << 2) | (a << 1) | (y ^ x)
        assert u[want][idx] == ONE


# -- relative-phase 4-control Toffoli over two dirty wires --------------------

def test_relative_tof4_dirty_phase():
    spec = cons.relative_tof4_dirty()
    rep = check_construction(spec)
    assert rep.ok
    gp = extract_genperm(unitary_of(spec.circuit))
    for idx in range(128):
        x1, x2, x3, x4, a, b, y = (bit(idx, q, 7) for q in range(7))
        want = (4 * a * x1 * x2 + 4 * b * x1 * x2 * x3) % 8
        assert gp.phase[idx] == want


# -- oracle multiplication -----------------------------------------------------

def test_oracle_mult_clean_exact():
    f = cx_oracle(2, src=0)
    g = cx_oracle(2, src=1)
    spec = cons.oracle_mult_clean(f, g)
    assert t_count(spec.circuit).unconditional == 8  # toy oracles cost 0
    rep = check_construction(spec)
    assert rep.semantics_ok
    assert rep.phase_support_found == []
    mat, basis = isometry_on_clean_subspace(spec.circuit)
    # |x1 x2, 0, 0, y> -> |x1 x2, y xor x1 x2> with both helpers dropped
    for col, idx in enumerate(basis):
        x1, x2, y = bit(idx, 0, 5), bit(idx, 1, 5), bit(idx, 4, 5)
        want = (x1 << 2) | (x2 << 1) | (y ^ (x1 & x2))
        assert mat[want][col] == ONE


def test_oracle_mult_matched_phase():
    f = cx_oracle(2, src=0)
    g = cx_oracle(2, src=1)
    spec = cons.oracle_mult_matched(f, g)
    gp = extract_genperm(unitary_of(spec.circuit))
    for idx in range(8):
        x1, x2, y = (bit(idx, q, 3) for q in range(3))
        assert gp.perm[idx] == idx ^ (x1 & x2)
        assert gp.phase[idx] == (-2 * x1 * x2) % 8  # i^{-x1 x2}
    assert phase_support(gp) == {0, 1}


def test_oracle_mult_unmatched_target_phase():
    f = cx_oracle(2, src=0)
    g = cx_oracle(2, src=1)
    spec = cons.oracle_mult_unmatched(f, g)
    gp = extract_genperm(unitary_of(spec.circuit))
    for idx in range(8):
        x1, x2, y = (bit(idx, q, 3) for q in range(3))
        assert gp.perm[idx] == idx ^ (x1 & x2)
    assert 2 in phase_support(gp)


def test_oracle_mult_cost_accounting():
    f = padded_oracle(2, 4)
    g = padded_oracle(2, 6)
    assert t_count(cons.oracle_mult_clean(f, g).circuit).unconditional == 2 * 4 + 6 + 8
    assert t_count(cons.oracle_mult_matched(f, g).circuit).unconditional == 2 * 4 + 2 * 6 + 4
    assert t_count(cons.oracle_mult_unmatched(f, g).circuit).unconditional == 2 * 4 + 6 + 4


# -- multiply-controlled ladders ----------------------------------------------

@pytest.mark.parametrize("k,count", [(2, 4), (3, 12), (5, 28)])
def test_bullet_dirty(k, count):
    spec = cons.lambda_x_bullet_dirty(k)
    rep = check_construction(spec)
    assert rep.ok
    assert rep.measured_tcount == count


def test_bullet_dirty_range():
    with pytest.raises(ValidityError):
        cons.lambda_x_bullet_dirty(1)


@pytest.mark.parametrize("k,count", [(4, 32), (6, 64)])
def test_lambda_x_dirty(k, count):
    spec = cons.lambda_x_dirty(k)
    rep = check_construction(spec)
    assert rep.ok
    assert rep.measured_tcount == count


def test_lambda_x_dirty_variants_equal():
    a = unitary_of(cons.lambda_x_dirty(4, "matched").circuit)
    b = unitary_of(cons.lambda_x_dirty(4, "phase_cleanup").circuit)
    assert mat_equal(a, b)


def test_lambda_x_dirty_range():
    with pytest.raises(ValidityError):
        cons.lambda_x_dirty(3)


def test_lambda_z_relative_diagonal():
    spec = cons.lambda_z_relative(2)
    rep = check_construction(spec)
    assert rep.ok
    gp = extract_genperm(unitary_of(spec.circuit))
    assert gp.perm == list(range(16))
    # target-slot phase difference is exactly the controlled-Z content
    n = 4
    for idx in range(16):
        x1, x2, a, y = (bit(idx, q, n) for q in range(n))
        if y == 0:
            flipped = idx | 0b1
            assert (gp.phase[flipped] - gp.phase[idx]) % 8 == (4 * x1 * x2) % 8


def test_lambda_z_relative_matches_bullet_conjugation():
    k = 3
    zrel = cons.lambda_z_relative(k).circuit
    n = k + 2
    b = Builder(n, 0, io_spec=zrel.io_spec)
    b.g("h", n - 1)
    b.inline(zrel, {i: i for i in range(n)})
    b.g("h", n - 1)
    bullet = cons.bullet_fragment(n, list(range(k)), k, n - 1)
    assert mat_equal(unitary_of(b.build()), unitary_of(bullet))


@pytest.mark.parametrize("k,count", [(4, 20), (6, 52)])
def test_cix(k, count):
    rep = check_construction(cons.cix(k))
    assert rep.ok
    assert rep.measured_tcount == count
    assert set(rep.phase_support_found) <= set(range(k))


def test_cix_range():
    with pytest.raises(ValidityError):
        cons.cix(3)


@pytest.mark.parametrize("k,count", [(3, 8), (6, 32)])
def test_cxstar(k, count):
    rep = check_construction(cons.cxstar(k))
    assert rep.ok
    assert rep.measured_tcount == count


def test_cxstar_inverse_composes_to_identity():
    c = cons.cxstar(4).circuit
    assert mat_equal(unitary_of(compose(c, inverse(c))), identity(32))


def test_cxbullet_counts_and_support():
    rep = check_construction(cons.cxbullet(7))
    assert rep.ok
    assert rep.measured_tcount == 52
    assert set(rep.phase_support_found) <= set(range(7))
    # at k=5 the two-control group already sits at the 4-T floor, so the
    # achievable count is 28 rather than the 16(k-4)+4 = 20 of the table
    rep5 = check_construction(cons.cxbullet(5))
    assert rep5.ok
    assert rep5.measured_tcount == 28


def test_cxbullet_range():
    with pytest.raises(ValidityError):
        cons.cxbullet(4)


def test_cxstar_with_ancillas():
    rep = check_construction(cons.cxstar_with_ancillas(7, 2))
    assert rep.ok
    assert rep.measured_branch_tcounts == [32]
    rep = check_construction(cons.cxstar_with_ancillas(5, 1))
    assert rep.ok
    assert rep.measured_branch_tcounts == [4 + 8 * 2]
    with pytest.raises(ValidityError):
        cons.cxstar_with_ancillas(7, 5)


# -- high-degree oracles -------------------------------------------------------

def test_fk_circuit_matches_anf():
    for k in (2, 3, 4):
        spec = cons.fk_circuit(k)
        rep = check_construction(spec)
        assert rep.ok
        table = oracle_truth_table_genperm(spec.circuit, k)
        want = [fk(k).eval(x) for x in range(1 << k)]
        assert table == want


def oracle_truth_table_genperm(circ, k):
    gp = extract_genperm(unitary_of(circ))
    out = []
    for x in range(1 << k):
        out.append(gp.perm[x << 1] & 1)
    return out


def test_fk2_is_product():
    spec = cons.fk_circuit(2)
    assert t_count(spec.circuit).unconditional == 4
    assert oracle_truth_table_genperm(spec.circuit, 2) == [0, 0, 0, 1]


def test_fk_maslov_matches_anf():
    for k in (3, 4, 5):
        spec = cons.fk_circuit(k, "maslov")
        rep = check_construction(spec)
        assert rep.ok
        table = oracle_truth_table_genperm(spec.circuit, k)
        assert table == [fk(k, "maslov").eval(x) for x in range(1 << k)]


def test_fk_exact_dirty():
    rep = check_construction(cons.fk_circuit(4, "exact_dirty"))
    assert rep.ok
    assert rep.measured_tcount == 24


# -- temporary k-bit products ---------------------------------------------------

def test_kand_init_counts():
    assert check_construction(cons.kand_init(5, "iX")).measured_tcount == 36
    assert check_construction(cons.kand_init(4, "star")).measured_tcount == 16


def test_kand_init_ix_supportless():
    rep = check_construction(cons.kand_init(4, "iX"))
    assert rep.ok
    assert rep.phase_support_found == []


def test_kand_init_ranges():
    with pytest.raises(ValidityError):
        cons.kand_init(3, "iX")
    with pytest.raises(ValidityError):
        cons.kand_init(2, "star")


@pytest.mark.parametrize("k", [4, 5])
def test_star_init_then_relative_terminate_identity(k):
    init = cons.kand_init(k, "star").circuit
    term = cons.kand_terminate(k, "relative").circuit
    c = Circuit(k + 1, 2, init.events + term.events, init.io_spec)
    basis = [x << 1 for x in range(1 << k)]
    rep = channel_equals(c, identity(1 << k), input_basis=basis)
    assert rep.equal and rep.trace_preserving


def test_ix_init_then_exact_terminate_identity():
    k = 6
    init = cons.kand_init(k, "iX").circuit
    term = cons.kand_terminate(k, "exact").circuit
    c = Circuit(k + 1, 2, init.events + term.events, init.io_spec)
    basis = [x << 1 for x in range(1 << k)]
    rep = channel_equals(c, identity(1 << k), input_basis=basis)
    assert rep.equal and rep.trace_preserving


def test_kand_terminate_counts():
    rep = check_construction(cons.kand_terminate(6, "exact"))
    assert rep.ok
    assert rep.measured_branch_tcounts == [0, 36]
    rep = check_construction(cons.kand_terminate(5, "relative"))
    assert rep.ok
    # achieved {8(k-4)+4, 8(k-4)+8}; the table's {8(k-4), 8(k-4)+4} is
    # unattainable for this family (see the acceptance suite)
    assert rep.measured_branch_tcounts == [12, 16]


def test_kand_terminate_ranges():
    with pytest.raises(ValidityError):
        cons.kand_terminate(5, "exact")
    with pytest.raises(ValidityError):
        cons.kand_terminate(3, "relative")


def test_and3_terminate():
    rep = check_construction(cons.and3_terminate())
    assert rep.ok
    assert rep.measured_branch_tcounts == [3, 4]
    # outcome-0 correction is the inverse controlled-S
    gates = [e for e in cons.and3_terminate().circuit.events
             if getattr(e, "condition", None) == (0, 0)]
    assert [g.kind for g in gates] == ["csdg"]


def test_maslov_init_then_and3_terminate_identity():
    init = cons.kand_init(3, "star").circuit
    term = cons.and3_terminate().circuit
    c = Circuit(4, 1, init.events + term.events, init.io_spec)
    basis = [x << 1 for x in range(8)]
    rep = channel_equals(c, identity(8), input_basis=basis)
    assert rep.equal and rep.trace_preserving


def test_jones_lambda_x_channel():
    rep = check_construction(cons.jones_lambda_x(4))
    assert rep.ok
    assert rep.measured_branch_tcounts == [20, 24]


def test_all_registry_sidecars():
    for name, (fn, params) in cons.REGISTRY.items():
        if not params:
            spec = fn()
        elif params == ("k",):
            spec = fn(6 if name == "cxbullet" else 4)
        elif params == ("k", "m"):
            spec = fn(6, 1)
        else:
            spec = fn(**{"k": 6, "variant": "exact"}) if name == "kand_terminate" \
                else fn(4)
        side = spec.sidecar()
        assert side["schema"] == 1 and side["name"] == name
