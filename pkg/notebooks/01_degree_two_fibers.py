# %% [markdown]
# # Degree-two fibers and minimal bases
#
# A walk through the 2x2x2 complete independence model: which degree-two
# fibers have more than one table, how big they are, and what a minimal
# Markov basis looks like.

# %%
from mbk import ModelSpec
from mbk.bases import is_markov_basis, minimal_basis
from mbk.fiber2 import enumerate_all_degree2_fibers, minimal_bases_nonunique
from mbk.oracle import iter_fibers

model = ModelSpec.complete_independence([2, 2, 2])
keys = enumerate_all_degree2_fibers(model)
len(keys)

# %% [markdown]
# Each key records which variables take two different levels and how those
# variables split into connected pieces of the independence graph.  The
# fiber has `2**(c-1)` tables where `c` is the number of pieces.

# %%
for key in keys:
    print(key.describe())

# %%
big = max(keys, key=lambda k: k.size)
for t in big.members():
    print(t)

# %% [markdown]
# Brute force agrees: grouping all 36 pairs of cells by their margins gives
# the same seven fibers with two or more members.

# %%
sorted(len(f) for f in iter_fibers(model, 2) if len(f) > 1)

# %% [markdown]
# A spanning tree on every fiber is a minimal basis.  Different trees give
# different bases of the same size, which is why the minimal basis is not
# unique here.

# %%
for policy in ("star", "path", "random:7"):
    basis = minimal_basis(model, policy)
    print(policy, len(basis), bool(is_markov_basis(model, basis, 3)))

minimal_bases_nonunique(model)
