"""Credal set of a belief function and the pignistic barycenter."""

import numpy as np

from evidential import Frame, MassFunction, credal_generators, credal_vertices, pignistic
from evidential.geometry import l1_consistent_constant, l1_distance
from evidential.transforms import ProbabilityDistribution, relative_belief, relative_plausibility

q = Frame(("q1", "q2", "q3"))
m = MassFunction(q, {("q1", "q2"): 1 / 3, ("q3",): 1 / 6, ("q1", "q2", "q3"): 0.5})

verts = credal_vertices(m)
print("extreme points:")
for v in verts.unique():
    print("  ", np.round(v, 4))
print("one distribution per focal selection:", len(credal_generators(m)))
print("barycenter of the 3! permutation vertices:", np.round(verts.barycenter(), 6))
print("pignistic:", np.round(pignistic(m).probs, 6))
print("relative plausibility:", np.round(relative_plausibility(m).probs, 6))
print("relative belief:", np.round(relative_belief(m).probs, 6))

# every dominating probability sits at the same L1 distance from b
c = l1_consistent_constant(m)
print("L1 constant", round(c, 6), [round(l1_distance(m, ProbabilityDistribution(q, v)), 6) for v in verts.unique()])
