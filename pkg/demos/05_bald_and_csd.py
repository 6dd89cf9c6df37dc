"""Acquisition scores on an exact Bayesian model: BALD vs. the label-aware
information gain (core-set by disagreement), and its decomposition.

BALD scores an input by the *expected* information gain about the
hypotheses over the model's own label predictive.  When the true label is
available, the realized information gain can be used directly; it splits
into a posterior code shift plus the surprise, and the shift vanishes
whenever the current posterior is uniform.
"""

import numpy as np

from discinfo import (
    BayesModel,
    Posterior,
    bald,
    csd,
    csd_decomposition,
    posterior,
    predictive,
    surprise,
)

# two hypotheses that agree on x0 and disagree deterministically on x1
likelihood = np.array(
    [
        [[0.5, 0.5], [1.0, 0.0]],  # hypothesis A
        [[0.5, 0.5], [0.0, 1.0]],  # hypothesis B
    ]
)
model = BayesModel(("A", "B"), [0.5, 0.5], ("x0", "x1"), ("0", "1"), likelihood)
prior = posterior(model, [])

print("expected information gain (no labels needed):")
for x in model.inputs:
    print(f"  bald({x}) = {bald(model, prior, x):.6f}")
print("  -> only the disagreement point is worth labelling (ln 2 = 0.693147)")

print("\nrealized information gain once the label is known:")
for y in model.labels:
    print(f"  csd(x1, y={y}) = {csd(model, prior, 'x1', y):.6f}")

# bald is exactly the predictive-weighted average of csd over labels
pred = predictive(model, prior, "x1")
avg = sum(pred[i] * csd(model, prior, "x1", i) for i in range(2))
print(f"\nbald(x1) = E_y csd(x1, y): {bald(model, prior, 'x1'):.6f} = {avg:.6f}")

# a richer random model: the decomposition csd = code_shift + surprise
rng = np.random.default_rng(3)
lik = rng.dirichlet(np.ones(3), size=(4, 2))
m2 = BayesModel(
    ("w0", "w1", "w2", "w3"),
    rng.dirichlet(np.ones(4)),
    ("x0", "x1"),
    ("a", "b", "c"),
    lik,
)
post = posterior(m2, [("x0", "a"), ("x1", "c")])
dec = csd_decomposition(m2, post, "x0", "b")
print("\non a random 4-hypothesis model after two observations:")
print(f"  info gain   = {dec.info_gain: .6f}")
print(f"  code shift  = {dec.code_shift: .6f}")
print(f"  surprise    = {dec.surprise: .6f}  (shift + surprise = gain)")
print(f"  label entropy, direct route     = {dec.label_entropy_direct:.6f}")
print(f"  label entropy, importance route = {dec.label_entropy_importance:.6f}")

# with a uniform posterior the shift term dies and gain == surprise;
# this is what makes the surprise a usable stand-in for the gain there
uniform = Posterior(np.full(4, 0.25))
dec_u = csd_decomposition(m2, uniform, "x0", "b")
print("\nsame query from a uniform posterior:")
print(f"  code shift = {dec_u.code_shift:.2e}")
print(f"  gain - surprise = {dec_u.info_gain - dec_u.surprise:.2e}")

# the realized gain can be negative: an observation can spread the
# posterior out; the surprise never goes below zero
print("\nhunting a negative realized gain on random models:")
rng = np.random.default_rng(7)
while True:
    lik = (rng.dirichlet(np.ones(2), size=(3, 1)) + 0.02) / 1.04
    m3 = BayesModel(("u", "v", "w"), rng.dirichlet(np.ones(3)), ("x",), ("0", "1"), lik)
    p3 = posterior(m3, [("x", "0")])
    gain = csd(m3, p3, "x", "1")
    if gain < -1e-3:
        print(f"  found: csd = {gain:.6f}, surprise = {surprise(m3, p3, 'x', '1'):.6f}")
        break
