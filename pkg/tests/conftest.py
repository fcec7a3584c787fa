from __future__ import annotations

from ctsynth.circuit import Builder, Circuit
from ctsynth.ring import ZERO
from ctsynth.sim import kraus_of, run


def cx_oracle(n_inputs: int = 1, src: int = 0) -> Circuit:
    """Oracle |x, t> -> |x, t xor x_src> on n_inputs + 1 wires."""
    return Builder(n_inputs + 1).g("cx", src, n_inputs).build()


def padded_oracle(n_inputs: int, tcount: int, src: int = 0) -> Circuit:
    """A linear oracle padded with cancelling T pairs to a known T-count."""
    b = Builder(n_inputs + 1)
    for _ in range(tcount // 2):
        b.g("t", n_inputs).g("tdg", n_inputs)
    b.g("cx", src, n_inputs)
    return b.build()


def oracle_truth_table(circ: Circuit, n_inputs: int) -> list[int]:
    """Extract f from an (up-to-phase) oracle |x,t> -> ph |x, t xor f(x)>.

    Asserts the permutation shape: inputs restored, target toggled by a
    function of the inputs only.
    """
    table = []
    for x in range(1 << n_inputs):
        idx = x << 1
        (_, state), = run(circ, idx)
        (out, _), = state.items()
        assert out >> 1 == x, "oracle changed its inputs"
        table.append(out & 1)
        (_, state1), = run(circ, idx | 1)
        (out1, _), = state1.items()
        assert out1 >> 1 == x and (out1 & 1) == (out & 1) ^ 1
    return table


def isometry_on_clean_subspace(circ: Circuit):
    """Single-Kraus matrix on the clean-ancilla-zero subspace."""
    bm = kraus_of(circ)
    (key, mat), = bm.kraus.items()
    assert key == ()
    return mat, bm.input_basis
