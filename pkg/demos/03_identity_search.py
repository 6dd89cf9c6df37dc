"""Run the identity suite and inspect a found counterexample.

The suite has two kinds of entries: identities that must hold on every
random distribution, and non-identities for which the search must produce
a concrete witness (a distribution plus tied outcomes where the claimed
equality misses by more than 1e-6).
"""

from discinfo import JointDistribution, check_suite, default_suite, evaluate

suite = default_suite()
reports = check_suite(suite, seeds=150, rng_seed=0)

print(f"{len(reports)} entries:")
for report in reports:
    print(" ", report.format_line())

# pull out the negative-information-gain witness and replay it
negative = next(r for r in reports if r.name == "information_gain_can_be_negative")
w = negative.witness
d = JointDistribution.from_json_dict(w["distribution"])
print("\nwitness for a negative information gain I[X;y]:")
print("  cells:", [round(float(p), 4) for p in d.probs.ravel()])
print("  bindings:", w["bindings"])
value = evaluate("I[X;y]", d, bindings=w["bindings"])
print(f"  I[X;y] = {value:.6f}  (observing this outcome makes X *less* certain)")
print(f"  the surprise stays non-negative: I[y;X] = "
      f"{evaluate('I[y;X]', d, bindings=w['bindings']):.6f}")
