"""Generalized permutations, the substitution rewriter, appendix identities,
and the T-count ledger."""

from __future__ import annotations

import random

import pytest

from ctsynth import constructions as cons
from ctsynth.circuit import Builder, Circuit, Gate, inverse
from ctsynth.ring import omega_power
from ctsynth.sim import mat_equal, unitary_of
from ctsynth.verify import (
    GenPerm, appendix_identities, extract_genperm, find_pair, ledger_to_json,
    ledger_to_text, phase_support, safe_to_substitute, substitute_pair,
    table_ledger,
)


# -- extraction ---------------------------------------------------------------

def test_extract_identity():
    c = Builder(2).build()
    gp = extract_genperm(unitary_of(c))
    assert gp.perm == [0, 1, 2, 3]
    assert gp.phase == [0, 0, 0, 0]
    assert phase_support(gp) == set()


def test_extract_fig1():
    gp = extract_genperm(unitary_of(cons.ccix().circuit))
    assert gp.perm[6] == 7 and gp.perm[7] == 6
    assert gp.phase[6] == 2 and gp.phase[7] == 2
    assert all(gp.phase[i] == 0 for i in range(6))
    assert phase_support(gp) == {0, 1}


def test_extract_hadamard_absent():
    c = Builder(1).g("h", 0).build()
    assert extract_genperm(unitary_of(c)) is None


def test_genperm_roundtrip_random():
    rng = random.Random(5)
    for _ in range(30):
        n = rng.randint(1, 6)
        dim = 1 << n
        perm = list(range(dim))
        rng.shuffle(perm)
        phase = [rng.randrange(8) for _ in range(dim)]
        gp = GenPerm(n, perm, phase)
        again = extract_genperm(gp.reconstruct())
        assert again.perm == perm and again.phase == phase


# -- safety condition ----------------------------------------------------------

def test_safe_control_use():
    middle = Builder(3).g("cx", 0, 2).build()
    assert safe_to_substitute(middle, {0, 1})


def test_unsafe_target_use():
    middle = Builder(3).g("cx", 2, 0).build()
    assert not safe_to_substitute(middle, {0, 1})


def test_safe_h_off_wires_cz_on_wires():
    middle = Builder(4).g("h", 3).g("cz", 0, 1).build()
    assert safe_to_substitute(middle, {0, 1})


def test_unsafe_measurement_reads_wires():
    middle = Builder(2, 1).measz(0, 0).build()
    assert not safe_to_substitute(middle, {0})


def test_unsafe_x_on_wire():
    middle = Builder(2).g("x", 0).build()
    assert not safe_to_substitute(middle, {0})


# -- substitution -------------------------------------------------------------

def _toffoli_pair_circuit(middle_events) -> Circuit:
    """Toffoli(0,1->2) ... Toffoli(0,1->2) with the middle in between."""
    b = Builder(4)
    b.g("toffoli", 0, 1, 2)
    for ev in middle_events:
        b.events.append(ev)
    b.g("toffoli", 0, 1, 2)
    return b.build()


def test_substitute_toffoli_pair_with_ccix():
    # compute/uncompute pair around a CZ on the temporary value
    middle = [Gate("cz", (2, 3))]
    c = _toffoli_pair_circuit(middle)
    region = find_pair(c, 0, len(c.events) - 1)
    repl = Builder(4).g("ccix", 0, 1, 2).build()
    rewritten = substitute_pair(c, region, repl)
    assert mat_equal(unitary_of(rewritten), unitary_of(c))
    from ctsynth.circuit import t_count
    assert t_count(c).unconditional == 14
    assert t_count(rewritten).unconditional == 8


def test_substitute_lambda4_pair_with_star():
    # exact 4-control X onto wire 5 (dirty helper on wire 4), around a
    # middle that is diagonal on the oracle wires {0..3, 5} and free to
    # scramble the helper wire 4
    k = 4
    n = k + 2
    middle = [Gate("t", (5,)), Gate("cz", (0, 5)), Gate("h", (4,)),
              Gate("s", (4,)), Gate("h", (4,))]
    exact = cons.lambda_x_dirty(k).circuit  # wires (0..3, dirty 4, target 5)
    star = cons.cxstar(k).circuit
    star_map = {0: 0, 1: 1, 2: 2, 3: 3, 4: 5}
    pair = Builder(n)
    pair.inline(exact, {i: i for i in range(n)})
    for ev in middle:
        pair.events.append(ev)
    pair.inline(inverse(exact), {i: i for i in range(n)})
    sub = Builder(n)
    sub.inline(star, star_map)
    for ev in middle:
        sub.events.append(ev)
    sub.inline(inverse(star), star_map)
    assert mat_equal(unitary_of(sub.build()), unitary_of(pair.build()))


_OFF_KINDS = ["h", "x", "s", "t", "z"]


def _random_safe_middle(rng, n, qset):
    b = Builder(n)
    off = [q for q in range(n) if q not in qset]
    for _ in range(rng.randint(1, 10)):
        roll = rng.random()
        if roll < 0.3 and off:
            b.g(rng.choice(_OFF_KINDS), rng.choice(off))
        elif roll < 0.5:
            b.g(rng.choice(["z", "s", "t", "tdg", "sdg"]), rng.choice(sorted(qset)))
        elif roll < 0.7 and off:
            b.g("cx", rng.choice(sorted(qset)), rng.choice(off))
        elif roll < 0.85 and len(qset) >= 2:
            a, c = rng.sample(sorted(qset), 2)
            b.g("cz", a, c)
        elif off:
            a = rng.choice(sorted(qset))
            b.g("cz", a, rng.choice(off))
    return b.build()


def test_substitution_property_randomized():
    """>= 100 random safe middles: replacing an exact pair by a
    relative-phase pair never changes the full unitary."""
    rng = random.Random(99)
    checked = 0
    while checked < 100:
        n = rng.randint(4, 6)
        qset = {0, 1, 2}  # oracle wires: Toffoli(0,1->2) pair
        middle = _random_safe_middle(rng, n, qset)
        assert safe_to_substitute(middle, qset)
        base = Builder(n)
        base.g("toffoli", 0, 1, 2)
        for ev in middle.events:
            base.events.append(ev)
        base.g("toffoli", 0, 1, 2)
        c = base.build()
        region = find_pair(c, 0, len(c.events) - 1)
        repl = Builder(n).g("ccix", 0, 1, 2).build()
        rewritten = substitute_pair(c, region, repl)
        assert mat_equal(unitary_of(rewritten), unitary_of(c))
        checked += 1


def test_unsafe_substitution_rejected_and_actually_unsound():
    """The safety check is not vacuous: an X on an oracle control between
    the pair both fails the check and genuinely changes the unitary."""
    n = 4
    middle = Builder(n).g("x", 0).build()
    assert not safe_to_substitute(middle, {0, 1, 2})
    base = Builder(n)
    base.g("toffoli", 0, 1, 2).g("x", 0).g("toffoli", 0, 1, 2)
    c = base.build()
    region = find_pair(c, 0, 2)
    repl = Builder(n).g("ccix", 0, 1, 2).build()
    with pytest.raises(ValueError, match="unsafe"):
        substitute_pair(c, region, repl)
    # force the rewrite anyway: the phase on the flipped control survives
    forced = Builder(n)
    forced.g("ccix", 0, 1, 2).g("x", 0).g("ccixdg", 0, 1, 2)
    assert not mat_equal(unitary_of(forced.build()), unitary_of(c))


# -- appendix identities --------------------------------------------------------

def test_appendix_identities_all_hold():
    results = appendix_identities()
    assert [nm for nm, _ in results] == [
        "A.1 k=3", "A.1 k=4", "A.2 k=3", "A.2 k=4", "A.3 k=4", "A.3 k=5"]
    assert all(ok for _, ok in results)


# -- ledger ----------------------------------------------------------------------

def test_ledger_small():
    rows = table_ledger(k_max=4)
    by_gate = {}
    for r in rows:
        by_gate.setdefault((r.gate, r.formula), []).append(r)
    # spot checks at small k
    star = [r for r in rows if r.gate == "L_k(X*)" and r.ancilla == "-" and r.k == 3]
    assert star and star[0].match
    dirty = [r for r in rows if r.gate == "L_k(X)" and r.ancilla == "|z>" and r.k == 4]
    assert dirty and dirty[0].match and dirty[0].measured == 32
    ref = [r for r in rows if r.match is None]
    assert len(ref) == 2  # the two prior-art reference rows
    text = ledger_to_text(rows)
    assert "L_k(X*)" in text
    js = ledger_to_json(rows)
    assert '"schema": 1' in js
