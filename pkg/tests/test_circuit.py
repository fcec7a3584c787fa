"""Circuit IR: macro expansions, T-counts, inverse, embed, text round-trip."""

from __future__ import annotations

import pytest

from ctsynth.circuit import (
    Builder, Circuit, CircuitError, compose, embed, expand_macros, from_text,
    inverse, t_count, to_text,
)
from ctsynth.ring import ONE, ZERO, omega_power
from ctsynth.sim import identity, mat_equal, mat_mul, unitary_of


def single(kind, *qubits, n=None, param=None):
    n = n if n is not None else (max(qubits) + 1)
    return Builder(n).g(kind, *qubits, param=param).build()


def lambda_x_matrix(k):
    dim = 1 << (k + 1)
    m = [[ZERO] * dim for _ in range(dim)]
    top = dim - 2
    for idx in range(dim):
        out = idx ^ 1 if idx & top == top else idx
        m[out][idx] = ONE
    return m


def test_expand_ccix_tcount_and_unitary():
    c = single("ccix", 0, 1, 2)
    e = expand_macros(c)
    assert t_count(e).unconditional == 4
    u = unitary_of(c)
    # Lambda_2(iX): swap |110> <-> |111| with entries i, identity elsewhere
    for idx in range(8):
        col = [u[i][idx] for i in range(8)]
        if idx in (6, 7):
            assert col[idx ^ 1] == omega_power(2)
            assert sum(1 for x in col if not x.is_zero()) == 1
        else:
            assert col[idx] == ONE


def test_expand_fixpoint_and_idempotent():
    c = Builder(2).g("h", 0).g("cx", 0, 1).build()
    assert expand_macros(c) == c
    big = single("toffoli", 0, 1, 2)
    assert expand_macros(expand_macros(big)) == expand_macros(big)


def test_toffoli_seven_t_and_semantics():
    c = single("toffoli", 0, 1, 2)
    assert t_count(c).unconditional == 7
    assert mat_equal(unitary_of(c), lambda_x_matrix(2))


@pytest.mark.parametrize("kind,phase_exp", [("cs", 2), ("csdg", -2)])
def test_cs_family(kind, phase_exp):
    c = single(kind, 0, 1)
    assert t_count(c).unconditional == 3
    u = unitary_of(c)
    for idx in range(4):
        expect = omega_power(phase_exp) if idx == 3 else ONE
        assert u[idx][idx] == expect


@pytest.mark.parametrize("kind,sign", [("cciz", 1), ("ccmiz", -1)])
def test_cciz_family(kind, sign):
    c = single(kind, 0, 1, 2)
    assert t_count(c).unconditional == 4
    u = unitary_of(c)
    for idx in range(8):
        a, b, y = (idx >> 2) & 1, (idx >> 1) & 1, idx & 1
        expect = omega_power(sign * (2 * a * b + 4 * a * b * y))
        assert u[idx][idx] == expect


def test_target_only_macros_rejected():
    c = single("lambdax", 0, 1, 2, param=2)
    with pytest.raises(CircuitError, match="target-only"):
        expand_macros(c)


def test_inverse_basics():
    c = Builder(1).g("t", 0).build()
    inv = inverse(c)
    assert inv.events[0].kind == "tdg"
    big = Builder(3).g("h", 0).g("ccix", 0, 1, 2).g("s", 1).build()
    assert inverse(inverse(big)) == big
    assert t_count(inverse(big)).unconditional == t_count(big).unconditional


def test_inverse_is_matrix_dagger():
    c = Builder(3).g("ccix", 0, 1, 2).build()
    u = unitary_of(c)
    v = unitary_of(inverse(c))
    assert mat_equal(mat_mul(u, v), identity(8))


def test_compose_tcount_additive():
    a = single("toffoli", 0, 1, 2)
    b = single("ccix", 0, 1, 2)
    assert (t_count(compose(a, b)).unconditional
            == t_count(a).unconditional + t_count(b).unconditional)


def test_embed_permutes_wires():
    c = single("ccix", 0, 1, 2)
    moved = embed(c, {0: 2, 1: 0, 2: 1}, 3)
    u = unitary_of(c)
    v = unitary_of(moved)
    # basis bit permutation: old (q0,q1,q2) -> new (q2,q0,q1)
    def remap(idx):
        b = [(idx >> 2) & 1, (idx >> 1) & 1, idx & 1]
        nb = [b[1], b[2], b[0]]
        return (nb[0] << 2) | (nb[1] << 1) | nb[2]
    for i in range(8):
        for j in range(8):
            assert v[remap(i)][remap(j)] == u[i][j]


def test_embed_identity_mapping():
    c = single("cs", 0, 1)
    assert embed(c, {0: 0, 1: 1}, 2) == c


def test_conditioned_tcounts():
    b = Builder(2, 1)
    b.g("h", 0).measz(0, 0).cg(0, 1, "t", 1).g("tdg", 1)
    tc = t_count(b.build())
    assert tc.unconditional == 1
    assert tc.per_outcome == {((0, 0),): 1, ((0, 1),): 2}


def test_validation_errors():
    with pytest.raises(CircuitError):
        Builder(2).g("cx", 0, 0).build()
    with pytest.raises(CircuitError):
        Builder(1).g("cx", 0, 1).build()
    with pytest.raises(CircuitError):
        Builder(1, 1).cg(0, 1, "x", 0).build()  # read before write
    b = Builder(2, 1).measz(0, 0)
    b.measz(0, 0)
    with pytest.raises(CircuitError):
        b.build()


def test_text_roundtrip_byte_stable():
    b = Builder(4, 2)
    b.alloc(2, "clean").g("h", 0).g("ccix", 0, 1, 2)
    b.g("lambdax", 0, 1, 2, 3, param=3)
    b.measz(2, 0).cg(0, 1, "z", 1).release(2, "measured")
    c = b.build()
    text = to_text(c)
    again = from_text(text)
    assert to_text(again) == text
    assert again.events == c.events
