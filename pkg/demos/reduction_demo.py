"""
Which term drives a mixed functional?
=====================================

"""

# Two independent fields on the square [-r, r]^2: eta1 is short-range
# (Cauchy tail exponent 2.5 > 2), eta2 is long-range (exponent 0.2 < 2).
# The functional G(w) = w1 + w2**2 - 1 has Hermite rank 1, yet the
# second-order term on the long-range component governs its growth.
import numpy as np

from strongweak import Cauchy, GridSpec, HermiteExpansion, reduction_sets, simulate_vector
from strongweak.asymptotics import predict_variance
from strongweak.functionals import decompose
from strongweak.stats import ks_two_sample

expansion = HermiteExpansion.from_coefficients({(1, 0): 1.0, (0, 2): 2.0})
rs = reduction_sets(expansion, betas=[2.5], alphas=[0.2])
print("Hermite rank:", rs.kappa, " gamma~:", rs.gamma_tilde, " levels:", rs.L_plus)

pred = predict_variance(expansion, [2.5], [0.2])
print("predicted Var(K_r) ~ r^%.1f (%s)" % (pred.exponent, pred.regime.value))

# %%
# Simulate a few hundred windows of radius 30 and split K_r into its parts.
models = [Cauchy(2.5), Cauchy(0.2)]
grid = GridSpec(30.0)
parts = [decompose(simulate_vector(grid, models, seed=1, base_stream=2 * i), expansion, rs)
         for i in range(300)]
kr = np.array([p["Kr"].value for p in parts])
k1 = np.array([p["KrKappa"].value for p in parts])
vr = np.array([p["Vr"].value for p in parts])

# Scale each by its sample standard deviation and compare the shapes.
z = lambda x: x / x.std(ddof=1)
print("KS(K_r, V_r)     p =", round(ks_two_sample(z(kr), z(vr)).p_value, 4))
print("KS(K_r, K_r,1)   p =", ks_two_sample(z(kr), z(k1)).p_value)
print("Var(K_r,1) / Var(V_r) =", k1.var() / vr.var())
