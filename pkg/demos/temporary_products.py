"""Temporary k-bit products: initialize, use, terminate by measurement.

Shows the Gidney-style 2-bit logical AND, the k-bit generalizations, and
the Kraus operators the exact simulator extracts for the terminations.
Every check here is an exact ring identity, no tolerances.
"""

from ctsynth import constructions as cons
from ctsynth.circuit import Circuit, t_count
from ctsynth.sim import channel_equals, identity, kraus_of

print("=== 2-bit logical AND ===")
init = cons.gidney_and_init()
term = cons.gidney_and_terminate()
print("init T-count:", t_count(init.circuit).unconditional)
print("terminate T-count per outcome:",
      dict(t_count(term.circuit).per_outcome))

bm = kraus_of(term.circuit, term.channel_input_basis)
for outcome, mat in sorted(bm.kraus.items()):
    entries = {(i, j): str(mat[i][j]) for i in range(4) for j in range(4)
               if not mat[i][j].is_zero()}
    print(f"outcome {outcome}: nonzero Kraus entries {entries}")

composite = Circuit(3, 1, init.circuit.events + term.circuit.events,
                    init.circuit.io_spec)
rep = channel_equals(composite, identity(4), input_basis=[0, 2, 4, 6])
print("init followed by terminate is the identity channel:", rep.equal)

print()
print("=== k-bit products ===")
for k in (4, 5):
    init = cons.kand_init(k, "star")
    term = cons.kand_terminate(k, "relative")
    comp = Circuit(k + 1, 2, init.circuit.events + term.circuit.events,
                   init.circuit.io_spec)
    rep = channel_equals(comp, identity(1 << k),
                         input_basis=[x << 1 for x in range(1 << k)])
    tc_term = sorted(t_count(term.circuit).outcome_values())
    print(f"k={k}: init {t_count(init.circuit).unconditional} T, "
          f"terminate {tc_term} T per outcome, round trip exact: {rep.equal}")

k = 6
init = cons.kand_init(k, "iX")
term = cons.kand_terminate(k, "exact")
comp = Circuit(k + 1, 2, init.circuit.events + term.circuit.events,
               init.circuit.io_spec)
rep = channel_equals(comp, identity(1 << k),
                     input_basis=[x << 1 for x in range(1 << k)])
print(f"k={k} (exact family): init {t_count(init.circuit).unconditional} T, "
      f"terminate {sorted(t_count(term.circuit).outcome_values())} T, "
      f"round trip exact: {rep.equal}")

print()
print("=== the full measured k-control Toffoli ===")
spec = cons.jones_lambda_x(4)
rep = channel_equals(spec.circuit, spec.target_channel, mode="exact")
print("channel equals the 4-control Toffoli exactly:", rep.equal)
print("branch scalars:", {k: str(v) for k, v in rep.scalars.items()})
