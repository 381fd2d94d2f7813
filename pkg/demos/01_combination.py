"""Fusing two pieces of evidence about a five-element frame.

Dempster's rule normalizes away the conflict; the conjunctive rule keeps it
on the empty set.  The weight of conflict is -ln(1 - kappa).
"""

from evidential import Frame, MassFunction, belief, conjunctive_combine, dempster_combine, plausibility

theta = Frame(("t1", "t2", "t3", "t4", "t5"))
m1 = MassFunction(theta, {("t2",): 0.7, ("t2", "t4"): 0.3})
m2 = MassFunction(theta, {("t2", "t3"): 0.6, ("t4", "t5"): 0.4})

out, report = dempster_combine(m1, m2)
print("Dempster:", {"".join(out.frame.labels_of(a)): round(v, 6) for a, v in out.items()})
print(f"conflict kappa={report.kappa:.3f}")

raw = conjunctive_combine(m1, m2)
print("conjunctive mass on the empty set:", round(raw.empty_mass, 6))

for event in (("t2",), ("t2", "t3"), ("t4",)):
    print(event, "belief", round(belief(out, event), 4), "plausibility", round(plausibility(out, event), 4))
