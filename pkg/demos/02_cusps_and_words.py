"""S/T words and the cusps of the working group."""

# %%
from bfpairing.modular_group import CongruenceGroup, SL2Matrix, decompose_st, word_length_bound

g = SL2Matrix(2, 1, 5, 3)
w = decompose_st(g)
print(w.to_json(), "length", len(w), "bound", word_length_bound(g))
print(w.matrix() == g)

big = SL2Matrix(999983, 1, 999982, 1)
w = decompose_st(big)
print(len(w), "tokens for c =", big.c)

# %%
# the octagonal computation lives on Gamma_0(432) cap Gamma_1(12)
G = CongruenceGroup(432, 12)
cusps = G.cusp_set()
print(G.label(), "index", G.index(), "psl index", G.psl_index(), "cusps", len(cusps))
print("-I in group:", G.contains_minus_identity())

# %%
widths = {}
for cd in cusps:
    widths[cd.width] = widths.get(cd.width, 0) + 1
print("width: count", dict(sorted(widths.items())))
print("widths sum to the psl index:", sum(cd.width for cd in cusps) == G.psl_index())

# %%
for cd in cusps[:6]:
    print(cd.label, cd.width, tuple(cd.gamma_rho))
