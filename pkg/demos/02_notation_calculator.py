"""The expression notation: parse, pretty-print, and evaluate.

Uppercase identifiers are averaged over; lowercase identifiers are tied to
an observed outcome, written inline (y=1) or supplied as bindings.  The
same strings work on the command line:

    discinfo eval --dist my.json "I[X; Y | z=0]"
"""

import numpy as np

from discinfo import (
    JointDistribution,
    ParseError,
    Variable,
    evaluate,
    format_expression,
    parse,
)

rng = np.random.default_rng(0)
cells = rng.dirichlet(np.ones(12)).reshape(2, 3, 2)
d = JointDistribution(
    (
        Variable("X", ("0", "1")),
        Variable("Y", ("a", "b", "c")),
        Variable("Z", ("0", "1")),
    ),
    cells,
)

examples = [
    "H[X]",
    "H[X, Y | Z]",
    "H[X | y=b]",            # one observed outcome, by its label
    "I[X; Y]",
    "I[X; y=b]",             # information gain: may be negative
    "I[y=b; X]",             # surprise: never negative
    "I[X; Y; Z]",            # triple mutual information: may be negative
    "E_{p(y)}[I[X; y]]",     # averaging the gain recovers I[X;Y]
    "KL[p(X|y=b) || p(X)]",  # the surprise, written as a divergence
    "H[X,Y] == H[X] + H[Y|X]",
]

for text in examples:
    node = parse(text)
    value = evaluate(text, d)
    shown = f"{value:.6f}" if not isinstance(value, bool) else str(value)
    print(f"{format_expression(node):32s} -> {shown}")

# bare lowercase identifiers resolve through bindings
print()
print("with bindings {Y: 1}:")
print(f"  H[X|y]  -> {evaluate('H[X|y]', d, bindings={'Y': 1}):.6f}")

# every parse failure carries the offset of the problem
for bad in ("H[X | ", "I[X]", "CE[p(X) | q(X)]"):
    try:
        parse(bad)
    except ParseError as err:
        print(f"parse error in {bad!r}: offset {err.offset}, expected {sorted(err.expected)}")
