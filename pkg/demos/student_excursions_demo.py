"""
Excursion areas of a Student field
==================================

"""

# T_2 = eta1 / sqrt((eta2**2 + eta3**2) / 2) is heavy-tailed. Its excursion
# area above a = 0.5 is asymptotically Gaussian when all components are
# short-range, but a long-range denominator pushes the limit away from the
# normal law.
import numpy as np

from strongweak import Cauchy, GridSpec, simulate_vector
from strongweak.functionals import centered_minkowski
from strongweak.hermite import student_mean_constant, student_rank1_coeff, student_rank2_coeff
from strongweak.stats import excess_kurtosis, skewness

n, a = 2, 0.5
print("P(T_2 > 0.5) =", student_mean_constant(n, a))
print("first-order coefficient  =", student_rank1_coeff(n, a))
print("second-order coefficient =", student_rank2_coeff(n, a))

regimes = {
    "short": [Cauchy(4.0)] * 3,
    "strong-weak": [Cauchy(4.0), Cauchy(0.4), Cauchy(0.4)],
}
grid = GridSpec(40.0)
for block, (name, models) in enumerate(regimes.items()):
    # a separate stream block per regime keeps the draws independent
    vals = np.array([centered_minkowski(simulate_vector(grid, models, 7, (block << 40) + 3 * i), n, a).value
                     for i in range(200)])
    z = vals / vals.std(ddof=1)
    print(f"{name:12s} skewness {skewness(z):+.3f}   excess kurtosis {excess_kurtosis(z):+.3f}")
