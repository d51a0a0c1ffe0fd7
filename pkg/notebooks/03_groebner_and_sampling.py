# %% [markdown]
# # Gröbner bases and an exact test
#
# For a decomposable model the star on every degree-two fiber, centred at
# the lowest member, reduces every table to the minimum of its fiber.

# %%
from mbk import ModelSpec, Table
from mbk.groebner import groebner_basis, is_groebner_empirically, is_reduced
from mbk.order import TermOrder
from mbk.sampler import ChainConfig, exact_test, fit_decomposable

model = ModelSpec([2, 3, 2], [[0, 1], [1, 2]])
order = TermOrder(model)
gb = groebner_basis(model, order)
len(gb), bool(is_groebner_empirically(gb, model, order, 3)), bool(is_reduced(gb, order))

# %% [markdown]
# The same moves drive a Metropolis-Hastings chain over the fiber of an
# observed table; the p-value is the share of visited tables with a
# chi-square at least as large as the observed one.

# %%
t = Table([((0, 0, 0), 4), ((0, 1, 1), 2), ((1, 2, 0), 3), ((1, 0, 1), 1), ((0, 2, 1), 2)])
print(fit_decomposable(t, model).chi2)
res = exact_test(t, model, gb.moves, ChainConfig(20_000, 1_000, 1, seed=1))
res.as_dict()
