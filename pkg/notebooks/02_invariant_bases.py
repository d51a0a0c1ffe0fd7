# %% [markdown]
# # Bases closed under relabeling levels
#
# Permuting the levels of a variable maps fibers to fibers.  A basis that
# is closed under these permutations is described by a handful of orbits.

# %%
from mbk import ModelSpec
from mbk.bases import (
    dobra_basis,
    dobra_is_minimal_invariant,
    invariant_basis,
    moves_in_fiber,
    stabilizer_orbits,
)
from mbk.chordal import CliqueTree
from mbk.fiber2 import enumerate_representative_fibers

ci3 = ModelSpec.complete_independence([2, 2, 2])
inv = invariant_basis(ci3)
for o in inv.orbits:
    print(o.key.describe(), o.vector, len(o))

# %% [markdown]
# Four-way complete independence with two clique trees: the chain has two
# leaves, the star has three.  Restricted to the fiber where the first three
# variables differ, the star's clique-tree basis falls into three orbits
# while two suffice.

# %%
ci4 = ModelSpec.complete_independence([2, 2, 2, 2])
chain = CliqueTree([(0,), (1,), (2,), (3,)], [(0, 1), (1, 2), (2, 3)])
star = CliqueTree([(0,), (1,), (2,), (3,)], [(0, 3), (1, 3), (2, 3)])
key = [k for k in enumerate_representative_fibers(ci4) if k.nondegenerate == (0, 1, 2)][0]
for name, tree in (("chain", chain), ("star", star)):
    moves = moves_in_fiber(dobra_basis(ci4, tree), key, ci4)
    print(name, len(moves), "moves,", len(stabilizer_orbits(moves, key)), "orbits,",
          "minimal" if dobra_is_minimal_invariant(tree, ci4) else "not minimal")
