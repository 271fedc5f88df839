"""The weight 1/2 preimage F_{2,1,3}: principal part, shadow, rescaling."""

# %%
from fractions import Fraction

from bfpairing.mock_eichler import MockSpec, holo_part_at_cusp, unary_theta_numeric, xi_check
from bfpairing.modular_group import cusp_to_matrix
from bfpairing.theta_forms import UnaryThetaSpec

F = MockSpec(2, 1, 3)
he = holo_part_at_cusp(F, (1, 0, 0, 1), 6)
print("H+ at infinity:", he.holo)

# %%
# at another cusp the slash is one transformation step
sl = F.slash(tuple(cusp_to_matrix(1, 2)))
print(sl)
print(sl.holomorphic(2))

# %%
samples = [1j, 1 / 3 + 1j, 2j]
print("xi error:", xi_check(F, samples, step=1e-4))
print("raw differences:", xi_check(F, samples[:1], step=1e-3, subtract_holomorphic=False),
      xi_check(F, samples[:1], step=1e-4, subtract_holomorphic=False))

# %%
# F(tau/4) has shadow theta(tau/4) / 2
F4 = MockSpec(2, 1, 3, rescale=Fraction(1, 4))
for k in (2, 4):
    err = xi_check(F4, samples, target=lambda tau, k=k: unary_theta_numeric(2, 1, 3, tau / 4) / k)
    print(f"factor 1/{k}: {err:.2e}")

# %%
# when t > 1 the preimage needs the t-rescale
th = UnaryThetaSpec(1, 3, 9)
target = lambda tau: unary_theta_numeric(1, 3, 9, tau)  # noqa: E731
print("literal F_1,3,9:", xi_check(MockSpec(1, 3, 9), samples, target=target))
print("preimage      :", xi_check(MockSpec.preimage(th), samples, target=target))
