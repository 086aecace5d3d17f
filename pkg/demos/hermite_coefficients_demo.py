"""
Hermite coefficients by quadrature
==================================

"""

# Smooth functionals are handled by tensor Gauss-Hermite rules that double
# the node count until the value settles. Indicators are discontinuous, so
# scrambled Sobol points are used instead and a replicate standard error is
# reported alongside the estimate.
from strongweak.hermite import (coefficient_quadrature, expand, hermite_rank, student_indicator,
                                student_rank1_coeff)

cubic = expand(lambda w: w[..., 0] ** 3, p=1, truncation_order=5)
print("w^3 coefficients:", {v: round(c, 10) for v, c in cubic.nonzero().items()})
print("Parseval sum:", cubic.parseval_sum(), " rank:", hermite_rank(cubic))

# %%
# The excursion indicator of the Student field.
G = student_indicator(2, 0.5)
est, err = coefficient_quadrature(G, (1, 0, 0), method="qmc", qmc_points=2 ** 20)
print(f"QMC {est:.6f} +- {err:.1e}   closed form {student_rank1_coeff(2, 0.5):.6f}")
