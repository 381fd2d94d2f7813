"""Compatible frames as partitions of a common base."""

from evidential import Frame
from evidential.frames_algebra import (
    PartitionFrame,
    is_independent_IF,
    lattice_relations,
    maximal_coarsening,
    minimal_refinement,
)

base = Frame(("1", "2", "3", "4"))
rows = PartitionFrame.parse(base, "12|34")
cols = PartitionFrame.parse(base, "13|24")
other = PartitionFrame.parse(base, "12|3|4")

for pair in ([rows, cols], [other, cols]):
    names = " and ".join(str(p) for p in pair)
    ind = is_independent_IF(pair)
    print(names)
    print("   minimal refinement:", minimal_refinement(pair).partition)
    print("   maximal coarsening:", maximal_coarsening(pair))
    print("   independent:", ind.independent, "witness:", ind.witness)
    print("   relations:", lattice_relations(pair).as_dict())
