"""Dropping exact Toffolis from compute/uncompute pairs.

A Toffoli pair around a computation that only reads the temporary value
can be replaced by the 4-T relative-phase version; the phases cancel and
the full unitary is unchanged.  The rewriter's syntactic safety check
guards the substitution.
"""

from ctsynth.circuit import Builder, t_count
from ctsynth.sim import mat_equal, unitary_of
from ctsynth.verify import find_pair, safe_to_substitute, substitute_pair

# Toffoli(0,1 -> 2), a CZ reading the temporary value, Toffoli again.
b = Builder(4)
b.g("toffoli", 0, 1, 2).g("cz", 2, 3).g("toffoli", 0, 1, 2)
c = b.build()
print("original T-count:", t_count(c).unconditional)

region = find_pair(c, 0, 2)
repl = Builder(4).g("ccix", 0, 1, 2).build()
rewritten = substitute_pair(c, region, repl)
print("rewritten T-count:", t_count(rewritten).unconditional)
print("unitaries equal:", mat_equal(unitary_of(rewritten), unitary_of(c)))

# The safety check refuses when the middle writes a protected wire.
bad_middle = Builder(4).g("x", 2).build()
print("middle with X on the temporary value is safe?",
      safe_to_substitute(bad_middle, {0, 1, 2}))
