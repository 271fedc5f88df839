"""Theta series of the octagonal shifted lattice, three ways."""

# %%
from fractions import Fraction

from bfpairing.theta_forms import (
    ThetaSpec,
    UnaryThetaSpec,
    chi_theta_expansion,
    octagonal_product,
    polygonal_series,
    polygonal_to_lattice,
    theta_expansion_infty,
)

# p8(x) + 3 p8(y) + 3 p8(z) as a shifted lattice
lat, const, scale = polygonal_to_lattice(8, 1, 3, 3)
print(lat.to_json(), "constant", const)

# %%
# direct sum over integers vs the lattice theta (shifted by q^-const)
direct = polygonal_series(8, 1, 3, 3, 30)
theta = theta_expansion_infty(lat, 30 + const).shift(-const)
print(direct)
print("same:", theta == direct)

# %%
# the product form counts x^2 + 3y^2 + 3z^2 with 3 not dividing xyz
prod = octagonal_product(101)
print(prod)
print("coefficient of q^13:", prod.coefficient(13))
print("8 Theta_L+nu(3 tau) == product:", prod == theta_expansion_infty(lat, Fraction(101, 3)).rescale(3).scale(8))

# %%
# as a Shimura theta: h = (2,2,2), A = diag(6,18,18), N = 3
shim = ThetaSpec((2, 2, 2), ((6, 0, 0), (0, 18, 0), (0, 0, 18)), 3)
print("Shimura form matches:", shim.expansion(60) == theta_expansion_infty(lat, 60))

# %%
# the character twist is a rescaled unary theta
lhs = chi_theta_expansion(-3, 50)
rhs = UnaryThetaSpec(2, 1, 3).expansion(200).rescale(Fraction(1, 4))
print(lhs)
print(rhs)
