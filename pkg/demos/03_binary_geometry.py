"""Dempster's rule on a binary frame, done with straight lines.

The sum m1 + m2 lies where the line from p_x towards the x-focus of m1
meets the line from p_y towards its y-focus.
"""

from evidential import Frame, MassFunction, dempster_combine
from evidential.geometry import (
    binary_canonical_decomposition,
    binary_dempster_geometric,
    binary_foci,
    binary_probabilistic_coordinates,
)

xy = Frame(("x", "y"))
m1 = MassFunction(xy, {("x",): 0.3, ("y",): 0.5, ("x", "y"): 0.2})
m2 = MassFunction(xy, {("x",): 0.6, ("y",): 0.2, ("x", "y"): 0.2})

f = binary_foci(m1)
print("foci of m1:", f.fx, f.fy)
print("p_x, p_y:", *binary_probabilistic_coordinates(m1, m2))
geo = binary_dempster_geometric(m1, m2)
alg = dempster_combine(m1, m2).mass
print("geometric:", [round(geo[a], 6) for a in (1, 2, 3)])
print("algebraic:", [round(alg[a], 6) for a in (1, 2, 3)])
print("simple support degrees of m1:", binary_canonical_decomposition(m1))
