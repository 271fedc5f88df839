"""End to end: Theta_{L+nu} for p8 is orthogonal to every unary theta.

Takes a couple of minutes.
"""

# %%
import time

from bfpairing.bf_pairing import bf_pair, octagonal_setup, orthogonality_report
from bfpairing.theta_forms import UnaryThetaSpec

lat, f, G, cands = octagonal_setup(8, 1, 3, 3)
print(G.label(), "candidates:", [th.label for th in cands])

# %%
t0 = time.time()


def show(rep):
    nz = sum(1 for _, c, _ in rep.per_cusp if not c.is_zero())
    print(f"{rep.label:16s} total {rep.total}  nonzero cusps {nz}  mismatch {rep.character_mismatch}")


res = orthogonality_report(8, 1, 3, 3, progress=show)
print("orthogonal:", res.orthogonal, f"({time.time() - t0:.0f}s)")

# %%
# negative control: put vartheta_{2,1,3} into f
th = UnaryThetaSpec(2, 1, 3)
print(bf_pair(f + th.to_source(), th, G))
