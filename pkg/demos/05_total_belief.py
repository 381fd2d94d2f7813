"""Building a belief function from a prior on a coarse frame plus one
conditional per coarse element."""

from evidential import Frame, MassFunction
from evidential.frames_algebra import Refining
from evidential.total_belief import TotalBeliefProblem, solution_graph, solve_total, verify_total

fine = Frame(("a1", "a2", "b1", "c1", "c2"))
coarse = Frame(("w1", "w2", "w3"))
refining = Refining(coarse, fine, (0b00011, 0b00100, 0b11000))
conds = {
    0: MassFunction(fine, {("a1",): 0.3, ("a1", "a2"): 0.7}),
    1: MassFunction(fine, {("b1",): 1.0}),
    2: MassFunction(fine, {("c1",): 0.6, ("c1", "c2"): 0.4}),
}
prior = MassFunction(coarse, {("w1", "w2", "w3"): 1.0})
problem = TotalBeliefProblem(refining, prior, conds)

total, cells = solve_total(problem)
for a, v in total.items():
    print("".join(fine.labels_of(a)).ljust(14), round(v, 6))
print("strategy:", [s.strategy for s in cells.values()])
print("verified:", verify_total(total, problem).passed)

g = solution_graph(0b111, conds)
print("solution graph:", len(g.nodes), "nodes, edges", g.edges, "signs", g.signs())
