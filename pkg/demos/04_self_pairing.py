"""A self-pairing computed exactly and by numerical integration."""

# %%
import time

from bfpairing.bf_pairing import bf_pair, petersson_eta8_numeric
from bfpairing.modular_group import CongruenceGroup
from bfpairing.theta_forms import UnaryThetaSpec

th = UnaryThetaSpec(1, 1, 2)  # eta(8 tau)^3
G = CongruenceGroup(64, 8)
rep = bf_pair(th.to_source(), th, G)
print(rep)

# %%
for cd, contrib, terms in rep.per_cusp:
    if not contrib.is_zero():
        print(cd.label, "width", cd.width, "->", contrib)

# %%
t0 = time.time()
num = petersson_eta8_numeric(G)
print(f"numeric {num:.12f}  exact {float(rep.total.to_fraction()):.12f}  ({time.time() - t0:.0f}s)")

# %%
# a larger group gives the same normalised value
print(bf_pair(th.to_source(), th, CongruenceGroup(128, 8)).total)
