"""Relative-phase Toffoli gates and what the exact simulator sees.

Builds the 4-T doubly-controlled iX and the 8-T relative-phase Toffoli-4,
extracts their permutation/phase factorizations, and shows the phase
support classification that separates "controls only" from
"controls and target".
"""

from ctsynth import constructions as cons
from ctsynth.circuit import t_count, to_text
from ctsynth.sim import unitary_of
from ctsynth.verify import extract_genperm, phase_support

print("=== doubly-controlled iX (4 T) ===")
spec = cons.ccix()
print(to_text(spec.circuit))
gp = extract_genperm(unitary_of(spec.circuit))
print("permutation:", gp.perm)
print("phase exponents (omega^j per input):", gp.phase)
print("phase support (qubits):", sorted(phase_support(gp)))
print("T-count:", t_count(spec.circuit).unconditional)

print()
print("=== relative-phase Toffoli-4 (8 T) ===")
spec = cons.maslov_toffoli4()
gp = extract_genperm(unitary_of(spec.circuit))
print("phase support includes the target:", 3 in phase_support(gp))
for idx in (0b1100, 0b1101, 0b1110, 0b1111):
    print(f"  input {idx:04b}: -> {gp.perm[idx]:04b}  phase omega^{gp.phase[idx]}")

print()
print("=== the same gate as the k=3 star construction ===")
star = cons.cxstar(3)
print("equal unitaries:",
      unitary_of(star.circuit) == unitary_of(spec.circuit))

print()
print("=== scaling: ancilla-free k-control gates ===")
for k in range(3, 9):
    star = cons.cxstar(k)
    print(f"  k={k}: star {t_count(star.circuit).unconditional:3d} T", end="")
    if k >= 4:
        print(f"   iX {t_count(cons.cix(k).circuit).unconditional:3d} T", end="")
    print()
