"""Entropies with observed outcomes, and why one decomposition fails.

A conditional entropy like H[X | Y] averages over both variables.  Once an
outcome is *observed* (tied), the expectation instead runs over what is
still unknown, conditioned on what we saw.  This script walks the eight
quantities relating a variable X to an observed outcome y and shows the
one decomposition that does NOT hold.
"""

import math

from discinfo import diagram, entropy, three_cell_distribution

# A tiny joint: uniform mass on (x, y) in {(0,0), (1,0), (1,1)}.
# Observing y=1 pins X down completely (only (1,1) remains), yet the
# marginal of X stays uncertain: p(X) = (1/3, 2/3).
d = three_cell_distribution()
print("cells:")
for xi in (0, 1):
    for yi in (0, 1):
        print(f"  p(X={xi}, Y={yi}) = {d.probs[xi, yi]:.4f}")

table = diagram(d, {"Y": 1})
print("\nthe eight quantities for the observed outcome Y=1:")
for label, value in table.rows():
    print(f"  {label:24s} = {value: .6f}")

# Two decompositions of the joint H[X,y]:
print("\nH[X,y] = H[X|y] + H[y]:")
print(f"  {table.joint:.6f} = {table.cond_head:.6f} + {table.outcome:.6f}")
print("H[X,y] = H[y|X] + E_(p(x|y)) H[x]:")
print(f"  {table.joint:.6f} = {table.cond_outcome:.6f} + {table.expected_marginal_ic:.6f}")

# The tempting analogue H[y|X] = H[X,y] - H[X] is FALSE: the second
# decomposition needs the expected marginal code length under p(x|y), not
# the marginal entropy H[X].  On this distribution the gap is exactly
# (1/3) ln 2.
wrong = table.joint - table.marginal
print(f"\nH[y|X]        = {table.cond_outcome:.6f}")
print(f"H[X,y] - H[X] = {wrong:.6f}   <- not the same thing")
print(f"gap           = {table.cond_outcome - wrong:.6f} (= ln(2)/3 = {math.log(2)/3:.6f})")

# The same engine handles any mix of tied and untied terms:
print("\nassorted quantities on the same distribution:")
print(f"  H[X]        = {entropy(d, ['X']):.6f}")
print(f"  H[X | Y]    = {entropy(d, ['X'], ['Y']):.6f}   (average over both)")
print(f"  H[X | Y=0]  = {entropy(d, ['X'], [('Y', 0)]):.6f}   (one observed slice)")
print(f"  H[X | Y=1]  = {entropy(d, ['X'], [('Y', 1)]):.6f}   (X fully determined)")
